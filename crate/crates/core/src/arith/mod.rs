//! Exact scalars: rationals, multivariate polynomials, polynomial fractions,
//! and simplex integration.

pub mod gcd;
mod json;
pub mod mpoly;
pub mod ratio;
pub mod rfrac;
pub mod simplex;

pub use gcd::poly_gcd;
pub use mpoly::{MPoly, Mono, Var, MAX_CHART, MAX_SIMPLEX, NVARS};
pub use ratio::Ratio;
pub use rfrac::RFrac;
pub use simplex::{simplex_integrate, simplex_integrate_frac, simplex_monomial_integral};
