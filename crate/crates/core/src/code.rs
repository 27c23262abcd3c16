//! The [[7,1,3]] CSS code.
//!
//! The parity-check matrix uses binary-counting columns: column `j` (qubit
//! `j`, counted from 1) is the binary expansion of `j`. The X-error syndrome
//! read as an integer therefore names the flipped qubit directly, and
//! decoding is a table-free lookup.
//!
//! Qubits are 0-based in code: qubit `q` has column `q + 1`.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitBuilder, Gate, Qubit};
use crate::error::Error;
use crate::pauli::PauliMask;

/// Block length.
pub const N: usize = 7;
/// Encoded qubits.
pub const K: usize = 1;
/// Distance.
pub const D: usize = 3;
/// Correction radius, `(D - 1) / 2`.
pub const T: usize = 1;

const BLOCK: u64 = (1 << N) - 1;

/// Rows of the parity-check matrix as qubit masks. Row `i` covers the qubits
/// whose 1-based index has bit `i` set.
pub const CHECK_ROWS: [u64; 3] = [0b101_0101, 0b110_0110, 0b111_1000];

/// Static description of the code: generators and logical operators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDefinition {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
    pub x_generators: [PauliMask; 3],
    pub z_generators: [PauliMask; 3],
    pub logical_x: PauliMask,
    pub logical_z: PauliMask,
}

impl CodeDefinition {
    pub fn steane() -> Self {
        let x = |bits| PauliMask::from_bits(N, bits, 0).unwrap();
        let z = |bits| PauliMask::from_bits(N, 0, bits).unwrap();
        CodeDefinition {
            n: N,
            k: K,
            d: D,
            t: T,
            x_generators: CHECK_ROWS.map(x),
            z_generators: CHECK_ROWS.map(z),
            logical_x: x(BLOCK),
            logical_z: z(BLOCK),
        }
    }

    /// Parity-check matrix entry `H[i][j]` for row `i` and qubit `j` (0-based).
    pub fn check(&self, row: usize, qubit: usize) -> bool {
        (CHECK_ROWS[row] >> qubit) & 1 == 1
    }
}

/// Support of parity-check row `row` as ascending 0-based qubit indices.
pub fn row_support(row: usize) -> [usize; 4] {
    let mut out = [0; 4];
    let mut k = 0;
    for q in 0..N {
        if (CHECK_ROWS[row] >> q) & 1 == 1 {
            out[k] = q;
            k += 1;
        }
    }
    out
}

/// Classical Hamming syndrome of a 7-bit word: `H · word`, read as an
/// integer with row 0 as the least significant bit.
#[inline]
pub fn hamming_syndrome(word: u64) -> u8 {
    let mut s = 0u8;
    let mut w = word & BLOCK;
    while w != 0 {
        let q = w.trailing_zeros();
        s ^= (q + 1) as u8;
        w &= w - 1;
    }
    s
}

/// Both halves of a syndrome.
///
/// `s_z` collects violations of the Z-type generators (X errors), `s_x` the
/// violations of the X-type generators (Z errors). Each is a value in 0..8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Syndrome {
    pub s_z: u8,
    pub s_x: u8,
}

impl Syndrome {
    pub const ZERO: Syndrome = Syndrome { s_z: 0, s_x: 0 };

    pub fn new(s_z: u8, s_x: u8) -> Self {
        debug_assert!(s_z < 8 && s_x < 8);
        Syndrome { s_z, s_x }
    }

    pub fn is_trivial(&self) -> bool {
        self.s_z == 0 && self.s_x == 0
    }

    /// The syndrome packed into 6 bits, `s_z` low.
    pub fn bits(&self) -> u8 {
        self.s_z | (self.s_x << 3)
    }
}

/// Where a residual error lands in the F0/F1/non-correctable partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorClass {
    /// The error is a stabilizer: counts toward F0.
    CorrectIdentity,
    /// The error is `X_i Z_k` (not both trivial) times a stabilizer: F1.
    CorrectWeightOne,
    /// Anything else.
    NonCorrectable,
}

impl ErrorClass {
    pub fn index(self) -> usize {
        match self {
            ErrorClass::CorrectIdentity => 0,
            ErrorClass::CorrectWeightOne => 1,
            ErrorClass::NonCorrectable => 2,
        }
    }
}

/// Logical content of an undetectable error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalClass {
    Trivial,
    X,
    Z,
    Y,
}

/// Syndrome of the data block (the first seven qubits of `e`).
#[inline]
pub fn syndrome(e: &PauliMask) -> Syndrome {
    Syndrome {
        s_z: hamming_syndrome(e.x_bits()),
        s_x: hamming_syndrome(e.z_bits()),
    }
}

/// Minimal-weight correction: X on qubit `s_z` and Z on qubit `s_x`
/// (1-based), as a 7-qubit mask.
#[inline]
pub fn decode(s: Syndrome) -> PauliMask {
    let bit = |v: u8| if v == 0 { 0 } else { 1u64 << (v - 1) };
    PauliMask::from_bits(N, bit(s.s_z), bit(s.s_x)).unwrap()
}

/// Logical class of a zero-syndrome error on the data block.
pub fn logical_class(e: &PauliMask) -> Result<LogicalClass, Error> {
    if !syndrome(e).is_trivial() {
        return Err(Error::Usage(format!(
            "logical_class needs a zero-syndrome error, got {e}"
        )));
    }
    Ok(logical_class_unchecked(e.x_bits(), e.z_bits()))
}

#[inline]
fn logical_class_unchecked(x: u64, z: u64) -> LogicalClass {
    // X component flips logical Z (all-ones Z); Z component flips logical X.
    let xl = (x & BLOCK).count_ones() % 2 == 1;
    let zl = (z & BLOCK).count_ones() % 2 == 1;
    match (xl, zl) {
        (false, false) => LogicalClass::Trivial,
        (true, false) => LogicalClass::X,
        (false, true) => LogicalClass::Z,
        (true, true) => LogicalClass::Y,
    }
}

/// Classifies the data block (first seven qubits) of `e`.
#[inline]
pub fn classify(e: &PauliMask) -> ErrorClass {
    classify_bits(e.x_bits(), e.z_bits())
}

/// Same as [`classify`] on raw component words.
#[inline]
pub fn classify_bits(x: u64, z: u64) -> ErrorClass {
    let sz = hamming_syndrome(x);
    let sx = hamming_syndrome(z);
    let rx = if sz == 0 { 0 } else { 1u64 << (sz - 1) };
    let rz = if sx == 0 { 0 } else { 1u64 << (sx - 1) };
    match logical_class_unchecked(x ^ rx, z ^ rz) {
        LogicalClass::Trivial if sz == 0 && sx == 0 => ErrorClass::CorrectIdentity,
        LogicalClass::Trivial => ErrorClass::CorrectWeightOne,
        _ => ErrorClass::NonCorrectable,
    }
}

/// CNOT ordering used when building an encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncoderSchedule {
    /// One CNOT per time step: depth 10 with the Hadamard layer.
    Sequential,
    /// Three conflict-free CNOT layers: depth 4 with the Hadamard layer.
    Parallel,
}

/// Encoder pivots: qubits 1, 2, 4 (1-based).
const PIVOTS: [usize; 3] = [0, 1, 3];

/// Sequential CNOT order, 0-based `(control, target)`.
const SEQUENTIAL_CNOTS: [(usize, usize); 9] = [
    (0, 2),
    (0, 4),
    (0, 6),
    (1, 2),
    (1, 5),
    (1, 6),
    (3, 4),
    (3, 5),
    (3, 6),
];

/// Parallel layers, 0-based. 1-based this is
/// `{1→7, 2→3, 4→5}`, `{1→5, 2→7, 4→6}`, `{1→3, 2→6, 4→7}`.
const PARALLEL_LAYERS: [[(usize, usize); 3]; 3] = [
    [(0, 6), (1, 2), (3, 4)],
    [(0, 4), (1, 6), (3, 5)],
    [(0, 2), (1, 5), (3, 6)],
];

fn encoder_steps(b: &mut CircuitBuilder, block: &[Qubit; N], schedule: EncoderSchedule) {
    let mut first = b.step();
    for &q in block {
        first = first.prep_z(q);
    }
    for p in PIVOTS {
        first = first.gate(Gate::H(block[p]));
    }
    first.finish();
    match schedule {
        EncoderSchedule::Sequential => {
            for (c, t) in SEQUENTIAL_CNOTS {
                b.step().gate(Gate::cnot(block[c], block[t])).finish();
            }
        }
        EncoderSchedule::Parallel => {
            for layer in PARALLEL_LAYERS {
                let mut s = b.step();
                for (c, t) in layer {
                    s = s.gate(Gate::cnot(block[c], block[t]));
                }
                s.finish();
            }
        }
    }
}

/// Circuit preparing `|0_L>` on `block` from fresh qubits.
pub fn zero_logical_encoder(
    register: usize,
    block: &[Qubit; N],
    schedule: EncoderSchedule,
) -> Result<Circuit, Error> {
    let mut b = CircuitBuilder::new(register, 0)?;
    encoder_steps(&mut b, block, schedule);
    b.build()
}

/// Circuit preparing `|+_L>`: the `|0_L>` encoder followed by one layer of
/// transversal Hadamards.
pub fn plus_logical_encoder(
    register: usize,
    block: &[Qubit; N],
    schedule: EncoderSchedule,
) -> Result<Circuit, Error> {
    let mut b = CircuitBuilder::new(register, 0)?;
    encoder_steps(&mut b, block, schedule);
    let mut s = b.step();
    for &q in block {
        s = s.gate(Gate::H(q));
    }
    s.finish();
    b.build()
}

/// Appends encoder steps for several blocks in lockstep (all blocks share
/// the same time steps). Used to build ancilla blocks together with their
/// verification blocks.
pub(crate) fn encode_blocks(
    b: &mut CircuitBuilder,
    blocks: &[(&[Qubit; N], bool)],
    schedule: EncoderSchedule,
) {
    let cnot_layers: Vec<Vec<(usize, usize)>> = match schedule {
        EncoderSchedule::Sequential => SEQUENTIAL_CNOTS.iter().map(|&g| vec![g]).collect(),
        EncoderSchedule::Parallel => PARALLEL_LAYERS.iter().map(|l| l.to_vec()).collect(),
    };
    let mut s = b.step();
    for (block, _) in blocks {
        for &q in block.iter() {
            s = s.prep_z(q);
        }
        for p in PIVOTS {
            s = s.gate(Gate::H(block[p]));
        }
    }
    s.finish();
    for layer in &cnot_layers {
        let mut s = b.step();
        for (block, _) in blocks {
            for &(c, t) in layer {
                s = s.gate(Gate::cnot(block[c], block[t]));
            }
        }
        s.finish();
    }
    if blocks.iter().any(|(_, plus)| *plus) {
        let mut s = b.step();
        for (block, plus) in blocks {
            if *plus {
                for &q in block.iter() {
                    s = s.gate(Gate::H(q));
                }
            }
        }
        s.finish();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Noiseless;

    fn p(s: &str) -> PauliMask {
        s.parse().unwrap()
    }

    fn x_on(q1: usize) -> PauliMask {
        let mut m = PauliMask::identity(N).unwrap();
        m.apply(q1 - 1, crate::pauli::Pauli::X);
        m
    }

    /// `H · e` computed directly from the matrix entries.
    fn matrix_syndrome(bits: u64) -> u8 {
        let code = CodeDefinition::steane();
        let mut s = 0;
        for row in 0..3 {
            let mut parity = false;
            for q in 0..N {
                if code.check(row, q) && (bits >> q) & 1 == 1 {
                    parity = !parity;
                }
            }
            if parity {
                s |= 1 << row;
            }
        }
        s
    }

    #[test]
    fn columns_are_binary_counting() {
        let code = CodeDefinition::steane();
        for q in 0..N {
            let col: usize = (0..3).map(|r| (code.check(r, q) as usize) << r).sum();
            assert_eq!(col, q + 1);
        }
    }

    #[test]
    fn generators_commute_and_logicals_anticommute() {
        let code = CodeDefinition::steane();
        let gens: Vec<_> = code.x_generators.iter().chain(&code.z_generators).collect();
        for a in &gens {
            for b in &gens {
                assert!(!a.anticommutes(b).unwrap());
            }
            assert!(!a.anticommutes(&code.logical_x).unwrap());
            assert!(!a.anticommutes(&code.logical_z).unwrap());
        }
        assert!(code.logical_x.anticommutes(&code.logical_z).unwrap());
    }

    #[test]
    fn syndrome_examples() {
        assert_eq!(syndrome(&PauliMask::identity(N).unwrap()), Syndrome::ZERO);
        let s = syndrome(&x_on(5));
        assert_eq!((s.s_z, s.s_x), (5, 0));
        assert_eq!(matrix_syndrome(x_on(5).x_bits()), 5);
        let code = CodeDefinition::steane();
        for g in code.x_generators.iter().chain(&code.z_generators) {
            assert!(syndrome(g).is_trivial());
        }
    }

    #[test]
    fn fast_syndrome_matches_matrix_product() {
        for bits in 0..128u64 {
            assert_eq!(hamming_syndrome(bits), matrix_syndrome(bits));
        }
    }

    #[test]
    fn decode_examples() {
        assert!(decode(Syndrome::ZERO).is_identity());
        assert_eq!(decode(Syndrome::new(3, 3)), p("IIYIIII"));
        assert_eq!(decode(Syndrome::new(5, 2)), p("IZIIXII"));
        for sz in 0..8 {
            for sx in 0..8 {
                let s = Syndrome::new(sz, sx);
                assert_eq!(syndrome(&decode(s)), s);
            }
        }
    }

    #[test]
    fn logical_class_examples() {
        assert_eq!(
            logical_class(&PauliMask::identity(N).unwrap()).unwrap(),
            LogicalClass::Trivial
        );
        assert_eq!(logical_class(&p("XXXXXXX")).unwrap(), LogicalClass::X);
        assert_eq!(logical_class(&p("ZZZIIII")).unwrap(), LogicalClass::Z);
        assert!(logical_class(&p("XIIIIII")).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&PauliMask::identity(N).unwrap()),
            ErrorClass::CorrectIdentity
        );
        assert_eq!(classify(&p("XIIIIII")), ErrorClass::CorrectWeightOne);
        assert_eq!(classify(&p("XXIIIII")), ErrorClass::NonCorrectable);
    }

    #[test]
    fn weight_one_per_sector_is_correctable_and_xx_pairs_are_not() {
        for i in 0..8u64 {
            for k in 0..8u64 {
                let x = if i == 0 { 0 } else { 1 << (i - 1) };
                let z = if k == 0 { 0 } else { 1 << (k - 1) };
                let class = classify_bits(x, z);
                if i == 0 && k == 0 {
                    assert_eq!(class, ErrorClass::CorrectIdentity);
                } else {
                    assert_eq!(class, ErrorClass::CorrectWeightOne);
                }
            }
        }
        for a in 0..N {
            for b in 0..N {
                if a != b {
                    assert_eq!(
                        classify_bits((1 << a) | (1 << b), 0),
                        ErrorClass::NonCorrectable
                    );
                }
            }
        }
    }

    #[test]
    fn correction_never_leaves_weight_one() {
        for x in 0..128u64 {
            for z in 0..128u64 {
                let e = PauliMask::from_bits(N, x, z).unwrap();
                let r = e.compose(&decode(syndrome(&e))).unwrap();
                assert_ne!(classify(&r), ErrorClass::CorrectWeightOne);
            }
        }
    }

    #[test]
    fn noiseless_encoders_give_identity_frames() {
        let block = [0, 1, 2, 3, 4, 5, 6];
        for schedule in [EncoderSchedule::Sequential, EncoderSchedule::Parallel] {
            for c in [
                zero_logical_encoder(N, &block, schedule).unwrap(),
                plus_logical_encoder(N, &block, schedule).unwrap(),
            ] {
                let mut frame = PauliMask::identity(N).unwrap();
                c.run(&mut frame, &mut Noiseless);
                assert_eq!(classify(&frame), ErrorClass::CorrectIdentity);
            }
        }
    }

    #[test]
    fn encoder_depths() {
        let block = [0, 1, 2, 3, 4, 5, 6];
        let seq = zero_logical_encoder(N, &block, EncoderSchedule::Sequential).unwrap();
        let par = zero_logical_encoder(N, &block, EncoderSchedule::Parallel).unwrap();
        assert_eq!(seq.depth(), 10);
        assert_eq!(par.depth(), 4);
        assert_eq!(
            plus_logical_encoder(N, &block, EncoderSchedule::Parallel)
                .unwrap()
                .depth(),
            par.depth() + 1
        );
        assert_eq!(seq.gate_count(), 12);
        assert_eq!(par.gate_count(), 12);
    }

    #[test]
    fn encoder_cnots_follow_check_rows() {
        // Pivot 1-based j fans out to the rest of the row whose lowest qubit it is.
        for (pivot, row) in PIVOTS.iter().zip(0..3) {
            let mut targets: Vec<usize> = SEQUENTIAL_CNOTS
                .iter()
                .filter(|(c, _)| c == pivot)
                .map(|&(_, t)| t)
                .collect();
            targets.push(*pivot);
            targets.sort();
            assert_eq!(targets, row_support(row).to_vec());
        }
        let mut par: Vec<_> = PARALLEL_LAYERS.iter().flatten().copied().collect();
        let mut seq = SEQUENTIAL_CNOTS.to_vec();
        par.sort();
        seq.sort();
        assert_eq!(par, seq);
    }

    #[test]
    fn x_after_pivot_hadamard_spreads_through_fanout() {
        use crate::circuit::ScriptedFault;
        use crate::pauli::Pauli;
        let block = [0, 1, 2, 3, 4, 5, 6];
        let c = zero_logical_encoder(N, &block, EncoderSchedule::Sequential).unwrap();
        // Location 0 is H on qubit 1; the fault follows the gate.
        let mut noise = ScriptedFault::single(0, Pauli::X.code());
        let mut frame = PauliMask::identity(N).unwrap();
        c.run(&mut frame, &mut noise);
        assert_eq!(frame, p("XIXIXIX"));
        // X1X3X5X7 is a stabilizer of |0_L>.
        assert_eq!(classify(&frame), ErrorClass::CorrectIdentity);
    }

    #[test]
    fn x_before_last_fanout_cnot_is_weight_two() {
        use crate::circuit::ScriptedFault;
        use crate::pauli::Pauli;
        let block = [0, 1, 2, 3, 4, 5, 6];
        let c = zero_logical_encoder(N, &block, EncoderSchedule::Sequential).unwrap();
        // Location order: H0 H1 H3 (gates), waits 2,4,5,6, then the CNOT
        // steps. A fault on CNOT(1->5) (location 8 counted below) leaves X1
        // to spread through CNOT(1->7) only.
        let locs = c.location_count();
        let mut found = false;
        for loc in 0..locs {
            // pair code: control X only
            let mut noise = ScriptedFault::single(loc, Pauli::X.code());
            let mut frame = PauliMask::identity(N).unwrap();
            c.run(&mut frame, &mut noise);
            if frame == p("XIIIIIX") {
                found = true;
                assert_eq!(classify(&frame), ErrorClass::NonCorrectable);
            }
        }
        assert!(found);
    }

    #[test]
    fn weight_one_error_after_perfect_encoding() {
        let mut frame = PauliMask::identity(N).unwrap();
        frame.apply(5, crate::pauli::Pauli::X);
        assert_eq!(classify(&frame), ErrorClass::CorrectWeightOne);
    }

    #[test]
    fn plus_encoder_maps_x_to_z_in_last_layer() {
        let mut frame = p("IIXIIII");
        for q in 0..N {
            frame.apply_h(q);
        }
        assert_eq!(frame, p("IIZIIII"));
    }
}
