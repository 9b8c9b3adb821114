use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names of the four parameters recovered by inference, in vector order.
pub const FREE_PARAM_NAMES: [&str; 4] = ["rho", "sigma", "omega0", "omega1"];

/// Per-iteration probabilities of the model plus the target population size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    /// Single node becomes willing to form a steady partnership.
    pub rho: f64,
    /// Steady partnership dissolves.
    pub sigma: f64,
    /// Single node becomes willing to form a casual contact.
    pub omega0: f64,
    /// Partnered node becomes willing to form a casual contact.
    pub omega1: f64,
    /// Node leaves the population.
    pub mu: f64,
    pub n: usize,
}

impl ParamSet {
    /// Parameter values used for the network illustrations and the
    /// fixed-others mapping sweeps.
    pub const REFERENCE: ParamSet = ParamSet {
        rho: 0.3,
        sigma: 0.1,
        omega0: 0.4,
        omega1: 0.2,
        mu: 0.0,
        n: 1000,
    };

    pub fn from_free(free: [f64; 4], mu: f64, n: usize) -> Self {
        Self {
            rho: free[0],
            sigma: free[1],
            omega0: free[2],
            omega1: free[3],
            mu,
            n,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// `[rho, sigma, omega0, omega1]`.
    pub fn free(&self) -> [f64; 4] {
        [self.rho, self.sigma, self.omega0, self.omega1]
    }

    pub fn free_mut(&mut self, name: &str) -> Option<&mut f64> {
        match name {
            "rho" => Some(&mut self.rho),
            "sigma" => Some(&mut self.sigma),
            "omega0" => Some(&mut self.omega0),
            "omega1" => Some(&mut self.omega1),
            "mu" => Some(&mut self.mu),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("rho", self.rho),
            ("sigma", self.sigma),
            ("omega0", self.omega0),
            ("omega1", self.omega1),
            ("mu", self.mu),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParam(format!("{name} = {p} not in [0, 1]")));
            }
        }
        if self.n < 2 {
            return Err(Error::PopulationTooSmall(self.n));
        }
        Ok(())
    }
}
