//! Feasibility caps on graph levels.

/// Environment variable overriding every cap below.
pub const MAX_LEVEL_ENV: &str = "SIERPILE_MAX_LEVEL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest graph `build_gasket` will construct.
    pub gasket: u32,
    /// Largest level for a full-matrix Green table.
    pub green_full: u32,
    /// Largest level for on-demand series rows.
    pub green_series: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { gasket: 14, green_full: 6, green_series: 12 }
    }
}

impl Caps {
    pub fn from_env() -> Self {
        match std::env::var(MAX_LEVEL_ENV).ok().and_then(|v| v.trim().parse::<u32>().ok()) {
            Some(level) => Caps { gasket: level, green_full: level, green_series: level },
            None => Caps::default(),
        }
    }
}
