//! Syndrome-extraction gadgets for the five ancilla kinds.
//!
//! Every gadget splits into an offline part (ancilla preparation plus
//! verification, retried until it passes) and an online part that couples
//! the accepted ancilla to the data and measures it. Data qubits only age
//! during the online part.
//!
//! Register layout: data on qubits 0..7, ancillas above. Qubits are reused
//! across gadgets once measured.
//!
//! Which ancilla errors matter:
//! * an ancilla that is a CNOT *target* of the data (`data -> anc`) hands its
//!   Z errors back to the data, its X errors only corrupt the readout;
//! * an ancilla that is a CNOT *control* (`anc -> data`) hands its X errors
//!   to the data, its Z errors only corrupt the readout.
//!
//! Verification always checks the kind that reaches the data. The fifth
//! kind also checks the readout-corrupting kind, before the data-facing
//! check so that errors copied in by the first check get caught by the
//! second.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitBuilder, Frame, Gate, Noise, Qubit, StepBuilder};
use crate::code::{self, hamming_syndrome, row_support, EncoderSchedule, Syndrome, N};
use crate::error::Error;

/// Width of the simulated register.
pub const REGISTER: usize = 64;

/// Data block qubits.
pub const DATA: [Qubit; N] = [0, 1, 2, 3, 4, 5, 6];
pub const DATA_MASK: u64 = (1 << N) - 1;

const fn block(base: usize) -> [Qubit; N] {
    [base, base + 1, base + 2, base + 3, base + 4, base + 5, base + 6]
}

/// Ancilla for the X-error syndrome (`|+_L>`, target of the data).
const BLOCK_A: [Qubit; N] = block(7);
/// Ancilla for the Z-error syndrome (`|0_L>`, control onto the data).
const BLOCK_A_PRIME: [Qubit; N] = block(14);
/// Verification block checking the data-facing error type.
const BLOCK_CHECK: [Qubit; N] = block(21);
/// Extra verification block for the fifth kind.
const BLOCK_CHECK_2: [Qubit; N] = block(28);

/// Each Shor generator gadget owns four cat qubits and a check qubit.
const CAT_BASE: Qubit = 7;
const CAT_STRIDE: usize = 5;

/// Single-qubit ancillas of the unverified gadget.
const SIMPLE_ANC: [Qubit; 3] = [7, 8, 9];

/// Coupling order of the unverified gadget: in step `s`, the ancilla of row
/// `r` touches data qubit `SIMPLE_ORDER[s][r]` (0-based). Each step touches
/// three distinct data qubits.
const SIMPLE_ORDER: [[Qubit; 3]; 4] = [[0, 1, 3], [6, 2, 4], [2, 6, 5], [4, 5, 6]];

/// The five ancilla constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AncillaKind {
    /// Three unverified single-qubit ancillas per sector.
    Simple = 1,
    /// Four-qubit cat plus one verification qubit, per generator.
    Shor = 2,
    /// Encoded block, sequential encoder, verified.
    Steane = 3,
    /// Encoded block, parallel encoder, verified.
    SteanePar = 4,
    /// As [`AncillaKind::SteanePar`] with both error types verified.
    SteaneParVerified = 5,
}

impl AncillaKind {
    pub const ALL: [AncillaKind; 5] = [
        AncillaKind::Simple,
        AncillaKind::Shor,
        AncillaKind::Steane,
        AncillaKind::SteanePar,
        AncillaKind::SteaneParVerified,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            AncillaKind::Simple => "simple",
            AncillaKind::Shor => "shor",
            AncillaKind::Steane => "steane",
            AncillaKind::SteanePar => "steane-par",
            AncillaKind::SteaneParVerified => "steane-par-v",
        }
    }

    /// Syndromes taken per recovery.
    pub fn repeats(self) -> usize {
        match self {
            AncillaKind::Simple => 1,
            _ => 3,
        }
    }

    pub fn is_fault_tolerant(self) -> bool {
        self != AncillaKind::Simple
    }
}

impl fmt::Display for AncillaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AncillaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AncillaKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.number().to_string() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown ancilla {s:?} (expected simple, shor, steane, steane-par, steane-par-v)"
                ))
            })
    }
}

/// What to do when verification keeps failing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnExhaust {
    /// Use the last prepared ancilla anyway.
    ProceedUnverified,
    /// Abandon the trial.
    AbortTrial,
}

impl FromStr for OnExhaust {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proceed-unverified" | "proceed" => Ok(OnExhaust::ProceedUnverified),
            "abort-trial" | "abort" => Ok(OnExhaust::AbortTrial),
            other => Err(Error::Config(format!(
                "unknown exhaust policy {other:?} (expected proceed-unverified or abort-trial)"
            ))),
        }
    }
}

/// Repeat-until-pass policy for ancilla verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VerificationPolicy {
    max_attempts: u32,
    on_exhaust: OnExhaust,
}

impl Default for VerificationPolicy {
    fn default() -> Self {
        VerificationPolicy {
            max_attempts: 10,
            on_exhaust: OnExhaust::ProceedUnverified,
        }
    }
}

impl VerificationPolicy {
    pub fn new(max_attempts: u32, on_exhaust: OnExhaust) -> Result<Self, Error> {
        if max_attempts == 0 {
            return Err(Error::Config("max_attempts must be at least 1".into()));
        }
        Ok(VerificationPolicy {
            max_attempts,
            on_exhaust,
        })
    }

    pub fn max_attempts(&self) -> u32 {
        self.max_attempts
    }

    pub fn on_exhaust(&self) -> OnExhaust {
        self.on_exhaust
    }
}

/// Acceptance test on the flips of an offline circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    /// Every measured bit must be unflipped.
    AllZero,
    /// Each consecutive 7-bit word must lie in the Hamming code.
    HammingWords(u8),
}

impl Check {
    fn passes(self, flips: u64) -> bool {
        match self {
            Check::AllZero => flips == 0,
            Check::HammingWords(k) => {
                (0..k).all(|i| hamming_syndrome(flips >> (7 * i as u32)) == 0)
            }
        }
    }
}

/// An ancilla preparation with its verification.
#[derive(Debug, Clone)]
struct Offline {
    circuit: Circuit,
    check: Check,
}

impl Offline {
    fn prepare<M: Noise>(
        &self,
        frame: &mut Frame,
        noise: &mut M,
        policy: &VerificationPolicy,
    ) -> Result<u32, Error> {
        for attempt in 1..=policy.max_attempts {
            let flips = self.circuit.run(frame, noise);
            if self.check.passes(flips) {
                return Ok(attempt);
            }
        }
        match policy.on_exhaust {
            OnExhaust::ProceedUnverified => Ok(policy.max_attempts),
            OnExhaust::AbortTrial => Err(Error::TrialAborted {
                attempts: policy.max_attempts,
            }),
        }
    }
}

/// How the flips of the online circuit become syndrome bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Readout {
    /// Flips 0..3 are `s_z`, flips 3..6 are `s_x`.
    Simple,
    /// Six groups of four flips, one per generator (Z-type rows first);
    /// each bit is the group parity.
    CatParities,
    /// Two 7-bit words; their Hamming syndromes are `s_z` then `s_x`.
    Words,
}

impl Readout {
    fn syndrome(self, flips: u64) -> Syndrome {
        match self {
            Readout::Simple => Syndrome::new((flips & 7) as u8, ((flips >> 3) & 7) as u8),
            Readout::CatParities => {
                let mut bits = 0u8;
                for g in 0..6 {
                    bits |= ((((flips >> (4 * g)) & 0xF).count_ones() & 1) as u8) << g;
                }
                Syndrome::new(bits & 7, bits >> 3)
            }
            Readout::Words => Syndrome::new(hamming_syndrome(flips), hamming_syndrome(flips >> N)),
        }
    }
}

/// A prebuilt syndrome-extraction gadget for one ancilla kind: offline
/// ancilla preparations, then one online circuit on data plus ancillas.
#[derive(Debug, Clone)]
pub struct SyndromeExtractor {
    kind: AncillaKind,
    offline: Vec<Offline>,
    online: Circuit,
    readout: Readout,
}

impl SyndromeExtractor {
    pub fn new(kind: AncillaKind) -> Self {
        let (offline, online, readout) = match kind {
            AncillaKind::Simple => (vec![], simple_online(), Readout::Simple),
            AncillaKind::Shor => shor_gadget(),
            AncillaKind::Steane => steane_gadget(EncoderSchedule::Sequential, false),
            AncillaKind::SteanePar => steane_gadget(EncoderSchedule::Parallel, false),
            AncillaKind::SteaneParVerified => steane_gadget(EncoderSchedule::Parallel, true),
        };
        SyndromeExtractor {
            kind,
            offline,
            online,
            readout,
        }
    }

    pub fn kind(&self) -> AncillaKind {
        self.kind
    }

    /// Time steps the data block spends inside one extraction.
    pub fn data_steps(&self) -> usize {
        self.online.depth()
    }

    /// The circuit run while the data is coupled in.
    pub fn online(&self) -> &Circuit {
        &self.online
    }

    /// Extracts one syndrome, updating `frame` with every error the gadget
    /// introduces on data and ancillas.
    pub fn extract<M: Noise>(
        &self,
        frame: &mut Frame,
        noise: &mut M,
        policy: &VerificationPolicy,
    ) -> Result<Syndrome, Error> {
        for off in &self.offline {
            off.prepare(frame, noise, policy)?;
        }
        let flips = self.online.run(frame, noise);
        Ok(self.readout.syndrome(flips))
    }

    /// Human-readable listing of every circuit in the gadget.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, off) in self.offline.iter().enumerate() {
            out.push_str(&format!("# offline {} ({:?})\n", i + 1, off.check));
            out.push_str(&off.circuit.to_string());
        }
        out.push_str(&format!("# online ({:?})\n", self.readout));
        out.push_str(&self.online.to_string());
        out
    }
}

fn build(register_live: u64, f: impl FnOnce(&mut CircuitBuilder)) -> Circuit {
    let mut b = CircuitBuilder::new(REGISTER, register_live).expect("register width");
    f(&mut b);
    b.build().expect("gadget circuits are valid by construction")
}

fn mask(qs: &[Qubit]) -> u64 {
    qs.iter().fold(0, |m, &q| m | (1u64 << q))
}

fn simple_online() -> Circuit {
    build(DATA_MASK, |b| {
        for x_sector in [false, true] {
            for (s, order) in SIMPLE_ORDER.iter().enumerate() {
                let mut st = b.step();
                if s == 0 {
                    for &a in &SIMPLE_ANC {
                        st = if x_sector { st.prep_plus(a) } else { st.prep_z(a) };
                    }
                }
                for (row, &d) in order.iter().enumerate() {
                    let a = SIMPLE_ANC[row];
                    st = st.gate(if x_sector { Gate::cnot(a, d) } else { Gate::cnot(d, a) });
                }
                st.finish();
            }
            let mut st = b.step();
            for &a in &SIMPLE_ANC {
                st = st.gate(if x_sector { Gate::MeasX(a) } else { Gate::MeasZ(a) });
            }
            st.finish();
        }
    })
}

/// Cat qubits of generator gadget `g` (Z-type rows 0..3, then X-type).
fn cat_qubits(g: usize) -> [Qubit; 4] {
    let base = CAT_BASE + CAT_STRIDE * g;
    [base, base + 1, base + 2, base + 3]
}

/// Cat state `|0000> + |1111>` with a parity check between the first and
/// last cat qubit. Guards against correlated X errors.
fn shor_cat(g: usize) -> Circuit {
    let c = cat_qubits(g);
    let v = c[3] + 1;
    build(0, |b| {
        b.step().prep_z(c[0]).gate(Gate::H(c[0])).finish();
        b.step().prep_z(c[1]).gate(Gate::cnot(c[0], c[1])).finish();
        b.step()
            .prep_z(c[2])
            .prep_z(c[3])
            .gate(Gate::cnot(c[0], c[2]))
            .gate(Gate::cnot(c[1], c[3]))
            .finish();
        b.step().prep_z(v).gate(Gate::cnot(c[0], v)).finish();
        b.step().gate(Gate::cnot(c[3], v)).finish();
        b.step().gate(Gate::MeasZ(v)).finish();
    })
}

/// Six cat gadgets. Generator supports pairwise overlap, so each coupling
/// takes its own step; the readout of one cat shares a step with the
/// coupling of the next.
///
/// X-type generators use the cat as control and read it in X. Z-type
/// generators use the Hadamard-dual cat as target and read it in Z.
fn shor_gadget() -> (Vec<Offline>, Circuit, Readout) {
    let offline = (0..6)
        .map(|g| {
            let cat = shor_cat(g);
            Offline {
                circuit: if g < 3 { cat.hadamard_dual() } else { cat },
                check: Check::AllZero,
            }
        })
        .collect();
    let live = (0..6).fold(DATA_MASK, |m, g| m | mask(&cat_qubits(g)));
    let online = build(live, |b| {
        for g in 0..=6 {
            let mut st = b.step();
            if g > 0 {
                let x_sector = g > 3;
                for c in cat_qubits(g - 1) {
                    st = st.gate(if x_sector { Gate::MeasX(c) } else { Gate::MeasZ(c) });
                }
            }
            if g < 6 {
                let cat = cat_qubits(g);
                for (k, &d) in row_support(g % 3).iter().enumerate() {
                    st = st.gate(if g >= 3 {
                        Gate::cnot(cat[k], d)
                    } else {
                        Gate::cnot(d, cat[k])
                    });
                }
            }
            st.finish();
        }
    });
    (offline, online, Readout::CatParities)
}

fn transversal_cnot(b: &mut CircuitBuilder, control: &[Qubit; N], target: &[Qubit; N]) {
    let mut st = b.step();
    for j in 0..N {
        st = st.gate(Gate::cnot(control[j], target[j]));
    }
    st.finish();
}

fn transversal_measure<'a>(st: StepBuilder<'a>, blk: &[Qubit; N], x_basis: bool) -> StepBuilder<'a> {
    let mut st = st;
    for &q in blk {
        st = st.gate(if x_basis { Gate::MeasX(q) } else { Gate::MeasZ(q) });
    }
    st
}

/// Offline preparation of the X-syndrome block `|+_L>`.
///
/// The data-facing check copies Z errors of the ancilla onto a second
/// `|+_L>` block (ancilla is the target) and reads that block in X. With
/// `both`, an earlier check copies X errors onto a third `|+_L>` block read
/// in Z.
fn steane_plus_block(schedule: EncoderSchedule, both: bool) -> Offline {
    let circuit = build(0, |b| {
        let mut blocks = vec![(&BLOCK_A, true), (&BLOCK_CHECK, true)];
        if both {
            blocks.push((&BLOCK_CHECK_2, true));
        }
        code::encode_blocks(b, &blocks, schedule);
        if both {
            transversal_cnot(b, &BLOCK_A, &BLOCK_CHECK_2);
            let mut st = transversal_measure(b.step(), &BLOCK_CHECK_2, false);
            for j in 0..N {
                st = st.gate(Gate::cnot(BLOCK_CHECK[j], BLOCK_A[j]));
            }
            st.finish();
        } else {
            transversal_cnot(b, &BLOCK_CHECK, &BLOCK_A);
        }
        transversal_measure(b.step(), &BLOCK_CHECK, true).finish();
    });
    Offline {
        circuit,
        check: Check::HammingWords(if both { 2 } else { 1 }),
    }
}

/// Offline preparation of the Z-syndrome block `|0_L>`: the X/Z mirror of
/// [`steane_plus_block`].
fn steane_zero_block(schedule: EncoderSchedule, both: bool) -> Offline {
    let circuit = build(0, |b| {
        let mut blocks = vec![(&BLOCK_A_PRIME, false), (&BLOCK_CHECK, false)];
        if both {
            blocks.push((&BLOCK_CHECK_2, false));
        }
        code::encode_blocks(b, &blocks, schedule);
        if both {
            transversal_cnot(b, &BLOCK_CHECK_2, &BLOCK_A_PRIME);
            let mut st = transversal_measure(b.step(), &BLOCK_CHECK_2, true);
            for j in 0..N {
                st = st.gate(Gate::cnot(BLOCK_A_PRIME[j], BLOCK_CHECK[j]));
            }
            st.finish();
        } else {
            transversal_cnot(b, &BLOCK_A_PRIME, &BLOCK_CHECK);
        }
        transversal_measure(b.step(), &BLOCK_CHECK, false).finish();
    });
    Offline {
        circuit,
        check: Check::HammingWords(if both { 2 } else { 1 }),
    }
}

/// Both blocks are prepared offline; the measurement of the first block
/// shares a step with the coupling of the second.
fn steane_gadget(schedule: EncoderSchedule, both: bool) -> (Vec<Offline>, Circuit, Readout) {
    let offline = vec![steane_plus_block(schedule, both), steane_zero_block(schedule, both)];
    let online = build(DATA_MASK | mask(&BLOCK_A) | mask(&BLOCK_A_PRIME), |b| {
        transversal_cnot(b, &DATA, &BLOCK_A);
        let mut st = transversal_measure(b.step(), &BLOCK_A, false);
        for j in 0..N {
            st = st.gate(Gate::cnot(BLOCK_A_PRIME[j], DATA[j]));
        }
        st.finish();
        transversal_measure(b.step(), &BLOCK_A_PRIME, true).finish();
    });
    (offline, online, Readout::Words)
}
