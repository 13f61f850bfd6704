//! Sandpile identities and exact discrete potential theory on
//! Sierpinski gasket approximation graphs.
//!
//! * [`gasket`]: graph construction, corner distances, rotations, cells.
//! * [`sandpile`]: chip-firing with an implicit sink, group operation,
//!   burning test and two identity algorithms.
//! * [`potential`]: exact Green functions (Dirichlet elimination and the
//!   harmonic-spline series), energy, `h_n`, the identity decomposition and
//!   convergence reports.
//! * [`render`]: SVG figures of configurations.

pub mod caps;
pub mod error;
pub mod gasket;
pub mod potential;
pub mod render;
pub mod sandpile;

pub use caps::Caps;
pub use error::{Error, Result};
pub use gasket::{build_gasket, corner_distance, nearest_vertex, GasketGraph, Point, TriCoord};
pub use potential::rat::Rat;
pub use sandpile::{Odometer, SandpileConfig};
