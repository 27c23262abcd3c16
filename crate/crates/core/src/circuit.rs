//! Time-stepped Clifford circuits with error locations, executed on a Pauli
//! frame.
//!
//! Each time step is a set of locations. A qubit that is live during a step
//! and not touched by any location in it idles and suffers a memory error.
//! Gate and measurement locations suffer their own error instead; the gate
//! acts first and the error follows it. Preparations are noiseless and take
//! effect at the start of the step that lists them, so a freshly prepared
//! qubit may also be acted on in that same step.
//!
//! Because every gate is Clifford and every error is a Pauli, the deviation
//! from the ideal noiseless run is itself a Pauli operator (the frame). A
//! measurement reports only whether its outcome is flipped relative to the
//! ideal outcome; callers combine flips into parities whose ideal value is 0.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pauli::{Pauli, PauliMask, MAX_QUBITS};

pub type Qubit = usize;

/// The accumulated Pauli deviation from the ideal state.
pub type Frame = PauliMask;

/// Measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// One location in a time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    PrepZ(Qubit),
    PrepPlus(Qubit),
    H(Qubit),
    Cnot { control: Qubit, target: Qubit },
    MeasZ(Qubit),
    MeasX(Qubit),
}

impl Gate {
    pub fn cnot(control: Qubit, target: Qubit) -> Gate {
        Gate::Cnot { control, target }
    }

    pub fn is_prep(&self) -> bool {
        matches!(self, Gate::PrepZ(_) | Gate::PrepPlus(_))
    }

    fn qubits(&self) -> (Qubit, Option<Qubit>) {
        match *self {
            Gate::PrepZ(q) | Gate::PrepPlus(q) | Gate::H(q) | Gate::MeasZ(q) | Gate::MeasX(q) => {
                (q, None)
            }
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    fn touched(&self) -> u64 {
        let (a, b) = self.qubits();
        (1u64 << a) | b.map_or(0, |b| 1u64 << b)
    }

    /// The same location with the roles of X and Z exchanged.
    pub fn hadamard_dual(&self) -> Gate {
        match *self {
            Gate::PrepZ(q) => Gate::PrepPlus(q),
            Gate::PrepPlus(q) => Gate::PrepZ(q),
            Gate::H(q) => Gate::H(q),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: target,
                target: control,
            },
            Gate::MeasZ(q) => Gate::MeasX(q),
            Gate::MeasX(q) => Gate::MeasZ(q),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::PrepZ(q) => write!(f, "PrepZ({q})"),
            Gate::PrepPlus(q) => write!(f, "PrepPlus({q})"),
            Gate::H(q) => write!(f, "H({q})"),
            Gate::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            Gate::MeasZ(q) => write!(f, "MeasZ({q})"),
            Gate::MeasX(q) => write!(f, "MeasX({q})"),
        }
    }
}

/// One time step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub locations: Vec<Gate>,
}

/// Location kinds, in the order a [`Noise`] source is queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocationKind {
    Wait,
    Single,
    Pair,
}

/// Source of Pauli errors for each location.
///
/// Codes use bit 0 for X and bit 1 for Z. For [`Noise::pair`], bits 0–1 act
/// on the CNOT control and bits 2–3 on the target.
pub trait Noise {
    fn wait(&mut self) -> u8;
    fn single(&mut self) -> u8;
    fn pair(&mut self) -> u8;
}

/// No errors anywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct Noiseless;

impl Noise for Noiseless {
    #[inline]
    fn wait(&mut self) -> u8 {
        0
    }
    #[inline]
    fn single(&mut self) -> u8 {
        0
    }
    #[inline]
    fn pair(&mut self) -> u8 {
        0
    }
}

/// Independent stochastic location errors.
///
/// `epsilon` is the memory error per qubit per idle step (X, Y, Z each with
/// `epsilon / 3`). `gamma` is the error of a one-qubit gate or measurement
/// location (each Pauli `gamma / 3`) and of a CNOT location (each of the 15
/// non-identity two-qubit Paulis `gamma / 15`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    epsilon: f64,
    gamma: f64,
}

impl ErrorModel {
    pub fn new(epsilon: f64, gamma: f64) -> Result<Self, Error> {
        for (name, v) in [("epsilon", epsilon), ("gamma", gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} is not a probability")));
            }
        }
        Ok(ErrorModel { epsilon, gamma })
    }

    pub fn noiseless() -> Self {
        ErrorModel {
            epsilon: 0.0,
            gamma: 0.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `C = epsilon / gamma`, undefined when `gamma` is zero.
    pub fn c_ratio(&self) -> Option<f64> {
        (self.gamma > 0.0).then(|| self.epsilon / self.gamma)
    }

    pub fn is_noiseless(&self) -> bool {
        self.epsilon == 0.0 && self.gamma == 0.0
    }

    pub fn sample_wait<R: RngCore + ?Sized>(&self, rng: &mut R) -> Pauli {
        Pauli::from_code(draw(self.epsilon, 3, rng))
    }

    pub fn sample_single<R: RngCore + ?Sized>(&self, rng: &mut R) -> Pauli {
        Pauli::from_code(draw(self.gamma, 3, rng))
    }

    /// Returns `(control error, target error)`.
    pub fn sample_pair<R: RngCore + ?Sized>(&self, rng: &mut R) -> (Pauli, Pauli) {
        let code = draw(self.gamma, 15, rng);
        (Pauli::from_code(code), Pauli::from_code(code >> 2))
    }
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// With probability `p` returns one of `1..=outcomes` uniformly, else 0.
/// A single 64-bit draw decides both the event and the outcome; nothing is
/// drawn when `p` is zero.
#[inline]
fn draw<R: RngCore + ?Sized>(p: f64, outcomes: u8, rng: &mut R) -> u8 {
    if p == 0.0 {
        return 0;
    }
    let u = (rng.next_u64() >> 11) as f64 * INV_2_53;
    if u < p {
        let k = ((u / p) * outcomes as f64) as u8;
        1 + k.min(outcomes - 1)
    } else {
        0
    }
}

/// [`Noise`] drawn from an [`ErrorModel`] with a caller-owned generator.
pub struct SampledNoise<'a, R: RngCore> {
    pub model: ErrorModel,
    pub rng: &'a mut R,
}

impl<'a, R: RngCore> SampledNoise<'a, R> {
    pub fn new(model: ErrorModel, rng: &'a mut R) -> Self {
        SampledNoise { model, rng }
    }
}

impl<R: RngCore> Noise for SampledNoise<'_, R> {
    #[inline]
    fn wait(&mut self) -> u8 {
        draw(self.model.epsilon, 3, self.rng)
    }
    #[inline]
    fn single(&mut self) -> u8 {
        draw(self.model.gamma, 3, self.rng)
    }
    #[inline]
    fn pair(&mut self) -> u8 {
        draw(self.model.gamma, 15, self.rng)
    }
}

/// Injects one chosen error at the `target`-th location visited and nothing
/// elsewhere. Records the kind of every location it is asked about, so a
/// fault-free pass enumerates the locations of a run.
#[derive(Debug, Clone)]
pub struct ScriptedFault {
    target: usize,
    code: u8,
    seen: usize,
    pub log: Vec<LocationKind>,
}

impl ScriptedFault {
    pub fn single(target: usize, code: u8) -> Self {
        ScriptedFault {
            target,
            code,
            seen: 0,
            log: Vec::new(),
        }
    }

    /// A recorder that never injects anything.
    pub fn recorder() -> Self {
        Self::single(usize::MAX, 0)
    }

    fn next(&mut self, kind: LocationKind) -> u8 {
        let i = self.seen;
        self.seen += 1;
        self.log.push(kind);
        if i == self.target {
            self.code
        } else {
            0
        }
    }
}

impl Noise for ScriptedFault {
    fn wait(&mut self) -> u8 {
        self.next(LocationKind::Wait) & 3
    }
    fn single(&mut self) -> u8 {
        self.next(LocationKind::Single) & 3
    }
    fn pair(&mut self) -> u8 {
        self.next(LocationKind::Pair) & 15
    }
}

#[inline]
fn apply_code(frame: &mut PauliMask, q: Qubit, code: u8) {
    if code != 0 {
        frame.apply(q, Pauli::from_code(code));
    }
}

/// Conjugates the frame by an H or CNOT location.
pub fn conjugate(frame: &mut Frame, gate: &Gate) -> Result<(), Error> {
    match *gate {
        Gate::H(q) => {
            check_qubit(frame, q)?;
            frame.apply_h(q)
        }
        Gate::Cnot { control, target } => {
            check_qubit(frame, control)?;
            check_qubit(frame, target)?;
            if control == target {
                return Err(Error::Usage("CNOT control equals target".into()));
            }
            frame.apply_cnot(control, target)
        }
        other => return Err(Error::Usage(format!("{other} is not a Clifford gate"))),
    }
    Ok(())
}

fn check_qubit(frame: &Frame, q: Qubit) -> Result<(), Error> {
    if q >= frame.len() {
        return Err(Error::Usage(format!(
            "qubit {q} outside register of {}",
            frame.len()
        )));
    }
    Ok(())
}

/// Memory error on an idle qubit.
pub fn inject_wait_error<R: RngCore>(
    frame: &mut Frame,
    q: Qubit,
    model: &ErrorModel,
    rng: &mut R,
) -> Result<(), Error> {
    check_qubit(frame, q)?;
    frame.apply(q, model.sample_wait(rng));
    Ok(())
}

/// Gate error following an (already applied) gate location. Preparations are
/// noiseless; H and measurements draw a one-qubit error, CNOT a two-qubit one.
pub fn inject_gate_error<R: RngCore>(
    frame: &mut Frame,
    gate: &Gate,
    model: &ErrorModel,
    rng: &mut R,
) -> Result<(), Error> {
    let mut noise = SampledNoise::new(*model, rng);
    match *gate {
        Gate::PrepZ(_) | Gate::PrepPlus(_) => Ok(()),
        Gate::H(q) | Gate::MeasZ(q) | Gate::MeasX(q) => {
            check_qubit(frame, q)?;
            apply_code(frame, q, noise.single());
            Ok(())
        }
        Gate::Cnot { control, target } => {
            check_qubit(frame, control)?;
            check_qubit(frame, target)?;
            let code = noise.pair();
            apply_code(frame, control, code & 3);
            apply_code(frame, target, code >> 2);
            Ok(())
        }
    }
}

/// Noisy destructive measurement of `qubits` in `basis`.
///
/// Each qubit first suffers a one-qubit gate error, then reports a flip when
/// its frame anticommutes with the measured observable. Measured qubits are
/// cleared from the frame and removed from `live`.
pub fn measure_flips<N: Noise>(
    frame: &mut Frame,
    live: &mut u64,
    qubits: &[Qubit],
    basis: Basis,
    noise: &mut N,
) -> Result<Vec<bool>, Error> {
    let mut out = Vec::with_capacity(qubits.len());
    for &q in qubits {
        check_qubit(frame, q)?;
        if (*live >> q) & 1 == 0 {
            return Err(Error::Usage(format!("measuring dead qubit {q}")));
        }
        out.push(measure_one(frame, q, basis, noise));
        *live &= !(1u64 << q);
    }
    Ok(out)
}

#[inline]
fn measure_one<N: Noise>(frame: &mut Frame, q: Qubit, basis: Basis, noise: &mut N) -> bool {
    apply_code(frame, q, noise.single());
    let p = frame.get(q);
    frame.clear(q);
    match basis {
        Basis::Z => p.has_x(),
        Basis::X => p.has_z(),
    }
}

/// Executes one step against an explicit live set, checking every
/// precondition. Returns the measurement flips in location order.
pub fn run_step<N: Noise>(
    frame: &mut Frame,
    live: &mut u64,
    step: &Step,
    noise: &mut N,
) -> Result<Vec<bool>, Error> {
    let idle = validate_step(frame.len(), *live, step)?;
    for g in step.locations.iter().filter(|g| g.is_prep()) {
        let (q, _) = g.qubits();
        frame.clear(q);
        *live |= 1u64 << q;
    }
    let mut flips = Vec::new();
    for g in step.locations.iter().filter(|g| !g.is_prep()) {
        match *g {
            Gate::MeasZ(q) => flips.push(measure_flips(frame, live, &[q], Basis::Z, noise)?[0]),
            Gate::MeasX(q) => flips.push(measure_flips(frame, live, &[q], Basis::X, noise)?[0]),
            Gate::H(q) => {
                conjugate(frame, g)?;
                apply_code(frame, q, noise.single());
            }
            Gate::Cnot { control, target } => {
                conjugate(frame, g)?;
                let code = noise.pair();
                apply_code(frame, control, code & 3);
                apply_code(frame, target, code >> 2);
            }
            Gate::PrepZ(_) | Gate::PrepPlus(_) => unreachable!(),
        }
    }
    let mut w = idle;
    while w != 0 {
        let q = w.trailing_zeros() as usize;
        apply_code(frame, q, noise.wait());
        w &= w - 1;
    }
    Ok(flips)
}

/// Checks one step against the live set; returns the idle mask.
fn validate_step(register: usize, live: u64, step: &Step) -> Result<u64, Error> {
    let mut prepped = 0u64;
    let mut touched = 0u64;
    for g in &step.locations {
        let (a, b) = g.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= register {
                return Err(Error::Usage(format!(
                    "{g} outside register of {register}"
                )));
            }
        }
        if b == Some(a) {
            return Err(Error::Usage(format!("{g} acts twice on qubit {a}")));
        }
        let m = g.touched();
        if g.is_prep() {
            if prepped & m != 0 {
                return Err(Error::Usage(format!("qubit {a} prepared twice in one step")));
            }
            if live & m != 0 {
                return Err(Error::Usage(format!("{g} on a live qubit")));
            }
            prepped |= m;
        } else {
            if touched & m != 0 {
                return Err(Error::Usage(format!("{g} overlaps another location")));
            }
            touched |= m;
        }
    }
    let live_now = live | prepped;
    if touched & !live_now != 0 {
        return Err(Error::Usage(format!(
            "step acts on dead qubits {:#x}",
            touched & !live_now
        )));
    }
    Ok(live_now & !touched)
}

/// A validated circuit with precomputed idle sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    register: usize,
    initial_live: u64,
    final_live: u64,
    steps: Vec<Step>,
    idle: Vec<u64>,
    measurements: usize,
}

impl Circuit {
    pub fn new(register: usize, initial_live: u64, steps: Vec<Step>) -> Result<Self, Error> {
        if register == 0 || register > MAX_QUBITS {
            return Err(Error::Usage(format!("register width {register} outside 1..=64")));
        }
        if register < MAX_QUBITS && initial_live >> register != 0 {
            return Err(Error::Usage("initial live set outside register".into()));
        }
        let mut live = initial_live;
        let mut idle = Vec::with_capacity(steps.len());
        let mut measurements = 0;
        for step in &steps {
            idle.push(validate_step(register, live, step)?);
            for g in &step.locations {
                match *g {
                    Gate::PrepZ(q) | Gate::PrepPlus(q) => live |= 1u64 << q,
                    Gate::MeasZ(q) | Gate::MeasX(q) => {
                        live &= !(1u64 << q);
                        measurements += 1;
                    }
                    _ => {}
                }
            }
        }
        if measurements > 64 {
            return Err(Error::Usage("more than 64 measurements in one circuit".into()));
        }
        Ok(Circuit {
            register,
            initial_live,
            final_live: live,
            steps,
            idle,
            measurements,
        })
    }

    pub fn register(&self) -> usize {
        self.register
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn initial_live(&self) -> u64 {
        self.initial_live
    }

    pub fn final_live(&self) -> u64 {
        self.final_live
    }

    /// Number of time steps.
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Non-preparation locations.
    pub fn gate_count(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.locations)
            .filter(|g| !g.is_prep())
            .count()
    }

    /// Every noisy location: gates, measurements, and idle qubit-steps.
    pub fn location_count(&self) -> usize {
        self.gate_count() + self.idle.iter().map(|m| m.count_ones() as usize).sum::<usize>()
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements
    }

    /// Idle qubits of each step.
    pub fn idle_masks(&self) -> &[u64] {
        &self.idle
    }

    /// X/Z-exchanged circuit: preparation and measurement bases swap and
    /// every CNOT is reversed.
    pub fn hadamard_dual(&self) -> Circuit {
        let steps = self
            .steps
            .iter()
            .map(|s| Step {
                locations: s.locations.iter().map(Gate::hadamard_dual).collect(),
            })
            .collect();
        Circuit {
            steps,
            ..self.clone()
        }
    }

    /// Runs the circuit on `frame`. Bit `i` of the result is the flip of the
    /// `i`-th measurement in location order.
    pub fn run<N: Noise>(&self, frame: &mut Frame, noise: &mut N) -> u64 {
        debug_assert!(frame.len() >= self.register);
        let mut flips = 0u64;
        let mut m = 0;
        for (step, &idle) in self.steps.iter().zip(&self.idle) {
            for g in &step.locations {
                match *g {
                    Gate::PrepZ(q) | Gate::PrepPlus(q) => frame.clear(q),
                    _ => {}
                }
            }
            for g in &step.locations {
                match *g {
                    Gate::PrepZ(_) | Gate::PrepPlus(_) => {}
                    Gate::H(q) => {
                        frame.apply_h(q);
                        apply_code(frame, q, noise.single());
                    }
                    Gate::Cnot { control, target } => {
                        frame.apply_cnot(control, target);
                        let code = noise.pair();
                        apply_code(frame, control, code & 3);
                        apply_code(frame, target, code >> 2);
                    }
                    Gate::MeasZ(q) => {
                        flips |= (measure_one(frame, q, Basis::Z, noise) as u64) << m;
                        m += 1;
                    }
                    Gate::MeasX(q) => {
                        flips |= (measure_one(frame, q, Basis::X, noise) as u64) << m;
                        m += 1;
                    }
                }
            }
            let mut w = idle;
            while w != 0 {
                let q = w.trailing_zeros() as usize;
                apply_code(frame, q, noise.wait());
                w &= w - 1;
            }
        }
        flips
    }
}

impl fmt::Display for Circuit {
    /// One line per time step: `<step>: <locations>`, steps counted from 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            write!(f, "{}:", i + 1)?;
            for g in &s.locations {
                write!(f, " {g}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Incremental circuit construction; validation happens in [`build`].
///
/// [`build`]: CircuitBuilder::build
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    register: usize,
    initial_live: u64,
    steps: Vec<Step>,
}

impl CircuitBuilder {
    pub fn new(register: usize, initial_live: u64) -> Result<Self, Error> {
        if register == 0 || register > MAX_QUBITS {
            return Err(Error::Usage(format!("register width {register} outside 1..=64")));
        }
        Ok(CircuitBuilder {
            register,
            initial_live,
            steps: Vec::new(),
        })
    }

    pub fn step(&mut self) -> StepBuilder<'_> {
        StepBuilder {
            owner: self,
            step: Step::default(),
        }
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn build(self) -> Result<Circuit, Error> {
        Circuit::new(self.register, self.initial_live, self.steps)
    }
}

pub struct StepBuilder<'a> {
    owner: &'a mut CircuitBuilder,
    step: Step,
}

impl StepBuilder<'_> {
    pub fn gate(mut self, g: Gate) -> Self {
        self.step.locations.push(g);
        self
    }

    pub fn prep_z(self, q: Qubit) -> Self {
        self.gate(Gate::PrepZ(q))
    }

    pub fn prep_plus(self, q: Qubit) -> Self {
        self.gate(Gate::PrepPlus(q))
    }

    pub fn finish(self) {
        self.owner.steps.push(self.step);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn p(s: &str) -> PauliMask {
        s.parse().unwrap()
    }

    #[test]
    fn conjugation_examples() {
        let mut f = p("X");
        conjugate(&mut f, &Gate::H(0)).unwrap();
        assert_eq!(f, p("Z"));
        let mut f = p("XI");
        conjugate(&mut f, &Gate::cnot(0, 1)).unwrap();
        assert_eq!(f, p("XX"));
        // Y1Y2: x1 copies onto 2 (cancelling x2), z2 copies onto 1 (cancelling z1).
        let mut f = p("YY");
        conjugate(&mut f, &Gate::cnot(0, 1)).unwrap();
        assert_eq!(f, p("XZ"));
        assert!(conjugate(&mut f, &Gate::MeasZ(0)).is_err());
        assert!(conjugate(&mut f, &Gate::cnot(1, 1)).is_err());
    }

    #[test]
    fn gate_then_error_composes() {
        // H maps X to Z; an injected Z then cancels it.
        let mut f = p("X");
        let step = Step {
            locations: vec![Gate::H(0)],
        };
        let mut live = 1;
        let mut noise = ScriptedFault::single(0, Pauli::Z.code());
        run_step(&mut f, &mut live, &step, &mut noise).unwrap();
        assert!(f.is_identity());
    }

    #[test]
    fn zero_noise_leaves_frame_alone() {
        let model = ErrorModel::noiseless();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let mut f = PauliMask::identity(3).unwrap();
        for _ in 0..1000 {
            inject_wait_error(&mut f, 1, &model, &mut rng).unwrap();
            inject_gate_error(&mut f, &Gate::cnot(0, 2), &model, &mut rng).unwrap();
        }
        assert!(f.is_identity());
    }

    #[test]
    fn certain_wait_error_always_fires() {
        let model = ErrorModel::new(1.0, 0.0).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        for _ in 0..1000 {
            let mut f = PauliMask::identity(1).unwrap();
            inject_wait_error(&mut f, 0, &model, &mut rng).unwrap();
            assert!(!f.is_identity());
        }
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(ErrorModel::new(-0.1, 0.0).is_err());
        assert!(ErrorModel::new(0.0, 1.5).is_err());
        assert!(ErrorModel::new(f64::NAN, 0.0).is_err());
        assert_eq!(ErrorModel::new(0.2, 0.4).unwrap().c_ratio(), Some(0.5));
        assert_eq!(ErrorModel::new(0.2, 0.0).unwrap().c_ratio(), None);
    }

    #[test]
    fn measurement_examples() {
        let mut live = 0b11;
        let mut f = p("II");
        let flips = measure_flips(&mut f, &mut live, &[0, 1], Basis::Z, &mut Noiseless).unwrap();
        assert_eq!(flips, vec![false, false]);

        let mut live = 1;
        let mut f = p("X");
        assert_eq!(
            measure_flips(&mut f, &mut live, &[0], Basis::Z, &mut Noiseless).unwrap(),
            vec![true]
        );
        assert!(f.is_identity());
        assert_eq!(live, 0);
        assert!(measure_flips(&mut f, &mut live, &[0], Basis::Z, &mut Noiseless).is_err());

        let mut live = 1;
        let mut f = p("Z");
        assert_eq!(
            measure_flips(&mut f, &mut live, &[0], Basis::Z, &mut Noiseless).unwrap(),
            vec![false]
        );
        let mut live = 1;
        let mut f = p("Z");
        assert_eq!(
            measure_flips(&mut f, &mut live, &[0], Basis::X, &mut Noiseless).unwrap(),
            vec![true]
        );
    }

    #[test]
    fn empty_step_draws_one_wait_per_live_qubit() {
        let mut rec = ScriptedFault::recorder();
        let mut f = PauliMask::identity(7).unwrap();
        let mut live = 0x7f;
        run_step(&mut f, &mut live, &Step::default(), &mut rec).unwrap();
        assert_eq!(rec.log, vec![LocationKind::Wait; 7]);
    }

    #[test]
    fn step_validation() {
        let overlap = Step {
            locations: vec![Gate::H(0), Gate::cnot(0, 1)],
        };
        assert!(Circuit::new(2, 0b11, vec![overlap]).is_err());
        let dead = Step {
            locations: vec![Gate::H(1)],
        };
        assert!(Circuit::new(2, 0b01, vec![dead]).is_err());
        let prep_live = Step {
            locations: vec![Gate::PrepZ(0)],
        };
        assert!(Circuit::new(2, 0b01, vec![prep_live]).is_err());
        let measure_twice = vec![
            Step {
                locations: vec![Gate::MeasZ(0)],
            },
            Step {
                locations: vec![Gate::MeasZ(0)],
            },
        ];
        assert!(Circuit::new(1, 1, measure_twice).is_err());
        let reprep = vec![
            Step {
                locations: vec![Gate::MeasZ(0)],
            },
            Step {
                locations: vec![Gate::PrepPlus(0), Gate::H(0)],
            },
        ];
        assert!(Circuit::new(1, 1, reprep).is_ok());
        let outside = Step {
            locations: vec![Gate::H(3)],
        };
        assert!(Circuit::new(2, 0b11, vec![outside]).is_err());
    }

    #[test]
    fn idle_masks_track_liveness() {
        let mut b = CircuitBuilder::new(4, 0b0011).unwrap();
        b.step().prep_z(2).gate(Gate::H(0)).finish();
        b.step().gate(Gate::MeasZ(1)).finish();
        b.step().finish();
        let c = b.build().unwrap();
        assert_eq!(c.idle_masks(), &[0b0110, 0b0101, 0b0101]);
        assert_eq!(c.final_live(), 0b0101);
        assert_eq!(c.location_count(), 2 + 2 + 2 + 2);
    }

    #[test]
    fn dual_is_an_involution() {
        let mut b = CircuitBuilder::new(3, 0).unwrap();
        b.step().prep_z(0).prep_plus(1).gate(Gate::H(0)).finish();
        b.step().gate(Gate::cnot(0, 1)).finish();
        b.step().gate(Gate::MeasZ(0)).gate(Gate::MeasX(1)).finish();
        let c = b.build().unwrap();
        let d = c.hadamard_dual();
        assert_ne!(c, d);
        assert_eq!(d.hadamard_dual(), c);
        assert_eq!(
            d.steps()[1].locations[0],
            Gate::Cnot {
                control: 1,
                target: 0
            }
        );
    }

    #[test]
    fn fast_runner_matches_checked_steps() {
        let mut b = CircuitBuilder::new(6, 0b000111).unwrap();
        b.step().prep_z(3).prep_plus(4).gate(Gate::H(0)).finish();
        b.step().gate(Gate::cnot(0, 3)).gate(Gate::cnot(4, 1)).finish();
        b.step().gate(Gate::cnot(2, 3)).gate(Gate::H(4)).finish();
        b.step().gate(Gate::MeasZ(3)).gate(Gate::MeasX(4)).finish();
        b.step().prep_z(5).finish();
        let c = b.build().unwrap();
        let model = ErrorModel::new(0.3, 0.4).unwrap();
        for seed in 0..200 {
            let mut r1 = Xoshiro256PlusPlus::seed_from_u64(seed);
            let mut r2 = r1.clone();
            let mut f1 = PauliMask::identity(6).unwrap();
            let flips = c.run(&mut f1, &mut SampledNoise::new(model, &mut r1));

            let mut f2 = PauliMask::identity(6).unwrap();
            let mut live = c.initial_live();
            let mut all = Vec::new();
            let mut noise = SampledNoise::new(model, &mut r2);
            for s in c.steps() {
                all.extend(run_step(&mut f2, &mut live, s, &mut noise).unwrap());
            }
            assert_eq!(f1, f2);
            assert_eq!(live, c.final_live());
            let packed = all.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
            assert_eq!(flips, packed);
        }
    }

    #[test]
    fn debug_dump_format() {
        let mut b = CircuitBuilder::new(3, 0).unwrap();
        b.step().prep_z(0).prep_z(1).gate(Gate::H(0)).finish();
        b.step().gate(Gate::cnot(0, 1)).finish();
        b.step().gate(Gate::MeasZ(0)).gate(Gate::MeasX(1)).finish();
        let c = b.build().unwrap();
        assert_eq!(
            c.to_string(),
            "1: PrepZ(0) PrepZ(1) H(0)\n2: CNOT(0,1)\n3: MeasZ(0) MeasX(1)\n"
        );
    }
}
