//! Toroidal symbols on `Z^n`: lattice differences, restriction of standard
//! symbols, extension through a cardinal interpolation kernel, summation by
//! parts and the smoothing classifier.

mod kernel;
mod sequences;
mod smoothing;
mod table;

pub use kernel::{build_kernel, extend, phi1_direct, theta1, ExtendedSymbol, InterpolationKernel, CACHE_EXTENT, DEFAULT_MARGIN, DEFAULT_WINDOW};
pub use sequences::{summation_by_parts_check, TemperedSequence, BOUNDARY_MASS_TOL};
pub use smoothing::{classify_smoothing, classify_smoothing_with, SmoothingClass, SmoothingOptions, MIN_RADIUS};
pub use table::{difference_derivative_order, lattice_difference_at, restrict, DeclaredOrder, Direction, ToroidalSymbol};
