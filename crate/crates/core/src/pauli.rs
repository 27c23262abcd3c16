//! Phase-free Pauli operators on up to 64 qubits.
//!
//! A [`PauliMask`] stores one bit per qubit for the X component and one for
//! the Z component. A qubit carries Y exactly when both bits are set. Global
//! phases are discarded, so composition is a plain XOR of the two words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Largest register a mask can describe (one `u64` word per component).
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli, encoded as `x | (z << 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Z = 2,
    Y = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::Y];

    /// Decodes the two low bits of `code` (bit 0 = X, bit 1 = Z).
    #[inline]
    pub fn from_code(code: u8) -> Pauli {
        match code & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn has_x(self) -> bool {
        self.code() & 1 != 0
    }

    #[inline]
    pub fn has_z(self) -> bool {
        self.code() & 2 != 0
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Z => 'Z',
            Pauli::Y => 'Y',
        }
    }
}

/// An `n`-qubit Pauli operator modulo phase.
///
/// Bit `j` of `x` (resp. `z`) is set when qubit `j` carries an X (resp. Z)
/// component. Bits at positions `>= n` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliMask {
    n: u8,
    x: u64,
    z: u64,
}

#[inline]
fn width_mask(n: usize) -> u64 {
    if n == MAX_QUBITS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliMask {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Result<Self, Error> {
        Self::from_bits(n, 0, 0)
    }

    /// Builds a mask from raw component words.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Result<Self, Error> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Usage(format!("register width {n} outside 1..=64")));
        }
        let keep = width_mask(n);
        if (x | z) & !keep != 0 {
            return Err(Error::Usage(format!("mask has bits beyond qubit {n}")));
        }
        Ok(PauliMask { n: n as u8, x, z })
    }

    /// A single-qubit Pauli `p` on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self, Error> {
        if q >= n {
            return Err(Error::Usage(format!("qubit {q} outside register of {n}")));
        }
        let mut m = Self::identity(n)?;
        m.set(q, p);
        Ok(m)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn x_bits(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_bits(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x | self.z == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_code((((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)) as u8)
    }

    /// Overwrites the Pauli on qubit `q`.
    #[inline]
    pub fn set(&mut self, q: usize, p: Pauli) {
        debug_assert!(q < self.len());
        let bit = 1u64 << q;
        self.x = (self.x & !bit) | if p.has_x() { bit } else { 0 };
        self.z = (self.z & !bit) | if p.has_z() { bit } else { 0 };
    }

    /// Multiplies `p` onto qubit `q` (phase discarded).
    #[inline]
    pub fn apply(&mut self, q: usize, p: Pauli) {
        debug_assert!(q < self.len());
        let code = p.code() as u64;
        self.x ^= (code & 1) << q;
        self.z ^= ((code >> 1) & 1) << q;
    }

    /// Resets qubit `q` to identity.
    #[inline]
    pub fn clear(&mut self, q: usize) {
        let keep = !(1u64 << q);
        self.x &= keep;
        self.z &= keep;
    }

    /// Product of two operators, ignoring phase.
    pub fn compose(&self, other: &PauliMask) -> Result<PauliMask, Error> {
        self.check_len(other)?;
        Ok(PauliMask {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        })
    }

    /// In-place product; both masks must have the same length.
    pub fn compose_assign(&mut self, other: &PauliMask) -> Result<(), Error> {
        self.check_len(other)?;
        self.x ^= other.x;
        self.z ^= other.z;
        Ok(())
    }

    /// Number of qubits carrying a non-identity factor.
    #[inline]
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Symplectic product: true when the two operators anticommute.
    pub fn anticommutes(&self, other: &PauliMask) -> Result<bool, Error> {
        self.check_len(other)?;
        Ok(((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1)
    }

    /// The first `k` qubits as a `k`-qubit mask.
    pub fn truncate(&self, k: usize) -> Result<PauliMask, Error> {
        if k == 0 || k > self.len() {
            return Err(Error::Usage(format!("cannot truncate {} qubits to {k}", self.n)));
        }
        let keep = width_mask(k);
        Ok(PauliMask {
            n: k as u8,
            x: self.x & keep,
            z: self.z & keep,
        })
    }

    /// Conjugation by a Hadamard on `q`: exchanges the X and Z bits.
    #[inline]
    pub fn apply_h(&mut self, q: usize) {
        let bit = 1u64 << q;
        let diff = (self.x ^ self.z) & bit;
        self.x ^= diff;
        self.z ^= diff;
    }

    /// Conjugation by CNOT(control, target):
    /// X_c -> X_c X_t and Z_t -> Z_c Z_t.
    #[inline]
    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        self.x ^= ((self.x >> control) & 1) << target;
        self.z ^= ((self.z >> target) & 1) << control;
    }

    fn check_len(&self, other: &PauliMask) -> Result<(), Error> {
        if self.n != other.n {
            return Err(Error::Usage(format!(
                "length mismatch: {} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PauliMask {
    /// Qubit 0 leftmost, e.g. `XIYZIII`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len() {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliMask({self})")
    }
}

impl FromStr for PauliMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        let mut m = PauliMask::identity(n)?;
        for (q, c) in s.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Usage(format!("bad Pauli symbol {other:?}"))),
            };
            m.set(q, p);
        }
        Ok(m)
    }
}
