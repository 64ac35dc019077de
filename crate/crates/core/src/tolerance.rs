use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by constructors and verification scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Closure of a span under the commutator, and re-expansion defects.
    pub closure: f64,
    /// Algebraic identities (antisymmetry, Jacobi, Yang-Baxter).
    pub identity: f64,
    /// Relative agreement with central finite differences.
    pub finite_difference: f64,
    /// ad-invariance of the symmetric part of a tensor r-matrix.
    pub invariance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closure: 1e-10,
            identity: 1e-12,
            finite_difference: 1e-5,
            invariance: 1e-8,
        }
    }
}

impl Tolerances {
    /// Every threshold multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            closure: self.closure * factor,
            identity: self.identity * factor,
            finite_difference: self.finite_difference * factor,
            invariance: self.invariance * factor,
        }
    }
}
