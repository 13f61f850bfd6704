//! Exact discrete potential theory on the gasket graphs.

pub mod dirichlet;
pub mod green;
pub mod limits;
pub mod rat;
pub mod series;
pub mod spline;

pub use green::{
    convolve_green, decompose_check, decompose_check_rows, decompose_on, green_dirichlet, green_rows, h_field,
    DecompositionReport, GreenMode, GreenTable,
};
pub use limits::{integral_g, limit_report, preset, EvalPoint, IntegralEstimate, LimitReport, LimitRow, Statement};
pub use series::{green_series, SeriesGreen};
pub use spline::{energy, energy_bilinear, harmonic_extend, harmonic_extension, spline_support, SplineBasis, SplineSupport};
