use serde::{Deserialize, Serialize};

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

/// Relative tolerance with an absolute floor.
///
/// A quantity of magnitude `scale` is treated as zero when its absolute value
/// does not exceed `max(rel * scale, abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: DEFAULT_REL_TOL, abs: DEFAULT_ABS_TOL }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        (self.rel * scale.abs()).max(self.abs)
    }
}
