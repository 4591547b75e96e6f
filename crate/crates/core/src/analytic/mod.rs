//! Floating-point analytic layer: special functions, Dirichlet characters
//! and L-functions, Dedekind zeta, and the main-term predictions.

pub mod characters;
pub mod hurwitz;
pub mod main_terms;
pub mod zeta;

pub use characters::{dirichlet_characters, kronecker_character, DirichletCharacter};
pub use hurwitz::{digamma, hurwitz_zeta, riemann_zeta};
pub use main_terms::{
    avg_sigma_error_scale, avg_sigma_main_term, avg_sigma_pair_error_scale,
    avg_sigma_pair_main_term, first_moment_error_scale, first_moment_main_term,
    second_moment_error_scale, second_moment_main_term, C2Convention, Regime,
};
pub use zeta::{constants, dedekind_zeta, dirichlet_l, l_at_one, AnalyticConstants};
