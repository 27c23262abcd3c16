//! One full recovery: repeated extraction, majority vote, correction.

use serde::{Deserialize, Serialize};

use crate::ancilla::{AncillaKind, SyndromeExtractor, VerificationPolicy};
use crate::circuit::{Frame, Noise};
use crate::code::{decode, Syndrome};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub ancilla: AncillaKind,
    pub repeats: usize,
    pub policy: VerificationPolicy,
}

impl RecoveryConfig {
    pub fn new(ancilla: AncillaKind, policy: VerificationPolicy) -> Self {
        RecoveryConfig {
            ancilla,
            repeats: ancilla.repeats(),
            policy,
        }
    }
}

/// Most repeated of three syndromes, compared as whole 6-bit values.
/// `None` when all three differ.
pub fn majority(s: &[Syndrome]) -> Result<Option<Syndrome>, Error> {
    let [a, b, c] = s else {
        return Err(Error::Usage(format!(
            "majority needs 3 syndromes, got {}",
            s.len()
        )));
    };
    Ok(if a == b || a == c {
        Some(*a)
    } else if b == c {
        Some(*b)
    } else {
        None
    })
}

/// A recovery procedure with its gadget prebuilt.
#[derive(Debug, Clone)]
pub struct Recovery {
    config: RecoveryConfig,
    extractor: SyndromeExtractor,
}

impl Recovery {
    pub fn new(config: RecoveryConfig) -> Result<Self, Error> {
        let expected = config.ancilla.repeats();
        if config.repeats != expected {
            return Err(Error::Config(format!(
                "ancilla {} takes {expected} syndrome(s) per recovery, not {}",
                config.ancilla, config.repeats
            )));
        }
        Ok(Recovery {
            config,
            extractor: SyndromeExtractor::new(config.ancilla),
        })
    }

    pub fn config(&self) -> &RecoveryConfig {
        &self.config
    }

    pub fn extractor(&self) -> &SyndromeExtractor {
        &self.extractor
    }

    /// Runs the recovery on `frame` and returns the syndrome acted on, if
    /// any. The correction itself is noiseless.
    pub fn recover<M: Noise>(&self, frame: &mut Frame, noise: &mut M) -> Result<Option<Syndrome>, Error> {
        let mut seen = [Syndrome::ZERO; 3];
        for s in seen.iter_mut().take(self.config.repeats) {
            *s = self.extractor.extract(frame, noise, &self.config.policy)?;
        }
        let chosen = if self.config.repeats == 1 {
            Some(seen[0])
        } else {
            majority(&seen)?
        };
        if let Some(s) = chosen {
            apply_correction(frame, s);
        }
        Ok(chosen)
    }
}

/// Composes `decode(s)` onto the data block of `frame`.
pub fn apply_correction(frame: &mut Frame, s: Syndrome) {
    let r = decode(s);
    let fix = Frame::from_bits(frame.len(), r.x_bits(), r.z_bits()).expect("data block fits");
    frame.compose_assign(&fix).expect("same width");
}
