use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::ParamSet;

/// Closed interval for the mean waiting time `1/p`, in iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseRange {
    pub lo: f64,
    pub hi: f64,
}

impl InverseRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        1.0 / (self.lo + u * (self.hi - self.lo))
    }
}

/// Uniform priors on the inverse of each free parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub rho: InverseRange,
    pub sigma: InverseRange,
    pub omega0: InverseRange,
    pub omega1: InverseRange,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            rho: InverseRange::new(1.0, 50.0),
            sigma: InverseRange::new(1.0, 90.0),
            omega0: InverseRange::new(1.0, 40.0),
            omega1: InverseRange::new(1.0, 61.0),
        }
    }
}

impl PriorSpec {
    pub fn ranges(&self) -> [InverseRange; 4] {
        [self.rho, self.sigma, self.omega0, self.omega1]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in crate::netmodel::FREE_PARAM_NAMES.iter().zip(self.ranges()) {
            if !(r.lo >= 1.0 && r.hi >= r.lo && r.hi.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "prior on 1/{name} must satisfy 1 <= lo <= hi, got [{}, {}]",
                    r.lo, r.hi
                )));
            }
        }
        Ok(())
    }

    /// Draws `[rho, sigma, omega0, omega1]`.
    pub fn sample_free<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 4] {
        self.ranges().map(|r| r.sample(rng))
    }
}

/// Prior draw for the free parameters; `mu` and `n` are passed through.
pub fn sample_prior<R: Rng + ?Sized>(spec: &PriorSpec, mu: f64, n: usize, rng: &mut R) -> ParamSet {
    ParamSet::from_free(spec.sample_free(rng), mu, n)
}
