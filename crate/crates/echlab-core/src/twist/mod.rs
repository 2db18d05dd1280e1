//! Monotone radial twists T(r, θ) = (r, θ + f(r)) of the unit disk.

pub mod census;
pub mod complex;
pub mod experiments;
pub mod profile;
pub mod spectral;

pub use census::{level_action, periodic_census, PeriodicCircle, CALIBRATION};
pub use complex::{build_complex, ComplexOptions, FilteredComplex, LatticePathGenerator};
pub use profile::{calabi, hofer_norm_bound, TwistProfile};
pub use spectral::{spectral_dp, spectral_invariant_cd};
