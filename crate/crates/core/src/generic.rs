//! Seeded sampling of generic constants with checked nonvanishing conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::rat::{rat, Rat};

pub const MAX_ATTEMPTS: usize = 64;

/// A sampled constant together with the conditions it was checked against.
#[derive(Clone, Debug)]
pub struct GenericConstant {
    pub value: Coefficient,
    pub conditions_checked: Vec<String>,
    pub seed: u64,
}

impl GenericConstant {
    /// A constant that needed no sampling.
    pub fn fixed(value: Coefficient, conditions_checked: Vec<String>, seed: u64) -> Self {
        GenericConstant {
            value,
            conditions_checked,
            seed,
        }
    }
}

/// Deterministic source of small rationals `p/q`, `1 <= |p|, q <= 9`.
#[derive(Clone, Debug)]
pub struct GenericSampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl GenericSampler {
    pub fn new(seed: u64) -> Self {
        GenericSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&mut self) -> Rat {
        let mut p: i64 = self.rng.random_range(1..=9);
        if self.rng.random_bool(0.5) {
            p = -p;
        }
        let q: i64 = self.rng.random_range(1..=9);
        rat(p, q)
    }

    /// Draws until every condition holds, at most `MAX_ATTEMPTS` times.
    /// Conditions are `(description, predicate)` pairs.
    pub fn pick(
        &mut self,
        purpose: &str,
        conditions: &[(String, &dyn Fn(&Coefficient) -> bool)],
    ) -> Result<GenericConstant> {
        for _ in 0..MAX_ATTEMPTS {
            let v = Coefficient::from(self.sample());
            if conditions.iter().all(|(_, ok)| ok(&v)) {
                return Ok(GenericConstant {
                    value: v,
                    conditions_checked: conditions.iter().map(|(d, _)| d.clone()).collect(),
                    seed: self.seed,
                });
            }
        }
        Err(Error::GenericityFailed {
            purpose: purpose.to_string(),
            attempts: MAX_ATTEMPTS,
        })
    }
}
