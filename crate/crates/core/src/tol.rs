//! Numerical tolerances shared by every module.
//!
//! Constraints (is this a valid state, do the effects sum to one) use
//! `constraint`; property checks use `assertion`. The values can be
//! replaced process-wide with [`set_tolerances`].

use std::sync::RwLock;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity of entry-wise constructed operators.
    pub hermitian: f64,
    /// Trace of states and norms of pure states.
    pub normalization: f64,
    /// Validity constraints: PSD slack, effect bounds, completeness.
    pub constraint: f64,
    /// Slack allowed when asserting a proven inequality.
    pub assertion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            normalization: 1e-12,
            constraint: 1e-10,
            assertion: 1e-9,
        }
    }
}

static GLOBAL: RwLock<Option<Tolerances>> = RwLock::new(None);

pub fn tolerances() -> Tolerances {
    GLOBAL
        .read()
        .map(|g| g.unwrap_or_default())
        .unwrap_or_default()
}

pub fn set_tolerances(t: Tolerances) {
    if let Ok(mut g) = GLOBAL.write() {
        *g = Some(t);
    }
}
