//! Standard and classical symbols.

mod borel;
mod classical;
mod homogeneous;
mod polynomial;
mod standard;

pub use borel::{borel_cutoff, borel_realize, BorelSymbol, ExcisedComponent, HALVING_BUDGET};
pub use classical::{bracket_xi_power, classical_product, ClassicalSymbol};
pub use homogeneous::{binom, HomogeneousSymbol};
pub use polynomial::PolynomialSymbol;
pub(crate) use standard::check_point;
pub use standard::{
    finite_difference, fit_shells, multi_orders_up_to, order_fit, seminorm_estimate, shell_maxima,
    FnSymbol, JapaneseBracket, SamplingGrid, SeminormEstimate, Symbol,
};
