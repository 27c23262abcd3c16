//! Every single fault anywhere in one recovery, injected one at a time.

use steane_ft::ancilla::REGISTER;
use steane_ft::circuit::{LocationKind, ScriptedFault};
use steane_ft::code::{classify_bits, ErrorClass};
use steane_ft::{AncillaKind, PauliMask, Recovery, RecoveryConfig, VerificationPolicy};

fn codes(kind: LocationKind) -> std::ops::RangeInclusive<u8> {
    match kind {
        LocationKind::Wait | LocationKind::Single => 1..=3,
        LocationKind::Pair => 1..=15,
    }
}

/// (faults tried, faults that left an uncorrectable data error)
fn sweep(kind: AncillaKind) -> (usize, usize) {
    let rec = Recovery::new(RecoveryConfig::new(kind, VerificationPolicy::default())).unwrap();
    let mut log = ScriptedFault::recorder();
    let mut frame = PauliMask::identity(REGISTER).unwrap();
    rec.recover(&mut frame, &mut log).unwrap();
    assert_eq!(classify_bits(frame.x_bits(), frame.z_bits()), ErrorClass::CorrectIdentity);

    let (mut tried, mut bad) = (0, 0);
    for (i, &loc) in log.log.iter().enumerate() {
        for code in codes(loc) {
            let mut frame = PauliMask::identity(REGISTER).unwrap();
            rec.recover(&mut frame, &mut ScriptedFault::single(i, code)).unwrap();
            tried += 1;
            if classify_bits(frame.x_bits(), frame.z_bits()) == ErrorClass::NonCorrectable {
                bad += 1;
            }
        }
    }
    (tried, bad)
}

#[test]
fn fault_tolerant_gadgets_absorb_every_single_fault() {
    for kind in AncillaKind::ALL.into_iter().filter(|k| k.is_fault_tolerant()) {
        let (tried, bad) = sweep(kind);
        assert!(tried > 100, "{kind}: only {tried} faults enumerated");
        assert_eq!(bad, 0, "{kind}: {bad} of {tried} single faults were uncorrectable");
    }
}

#[test]
fn simple_gadget_is_not_fault_tolerant() {
    let (tried, bad) = sweep(AncillaKind::Simple);
    assert_eq!((tried, bad), (516, 118));
}
