//! Young functions, their inverses and complementary functions, Luxemburg
//! norms over cubes, and the tail integrals `α_p`, `β_p`.

pub mod conjugate;
pub mod holder;
pub mod luxemburg;
mod parse;
pub mod quadrature;
pub mod tails;
pub mod young;

pub use conjugate::NumericConjugate;
pub use holder::{default_t_grid, holder_kappa, log_grid, KappaResult};
pub use luxemburg::{luxemburg_norm, luxemburg_of_values, LuxemburgResult, LUXEMBURG_MAX_ITER, LUXEMBURG_TOL};
pub use parse::parse_young;
pub use tails::{alpha_p, aux_estimate_sides, beta_p, beta_p_with};
pub use young::{log_plus, Growth, YoungFunction};
