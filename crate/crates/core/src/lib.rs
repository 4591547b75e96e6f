//! Exact arithmetic of ideals in number fields (rational, quadratic,
//! cyclotomic), Ramanujan sums over ideals, generalized divisor functions,
//! Dirichlet-series identity checks, Dedekind zeta evaluation, and moment
//! experiments comparing empirical sums against their predicted main terms.

pub mod analytic;
pub mod arith;
pub mod cache;
pub mod cli;
pub mod error;
pub mod field;
pub mod ideals;
pub mod moments;

pub use error::{Error, Result};
pub use field::{FieldKind, NumberField, SplittingSignature};
pub use ideals::{Ideal, PrimeIdealId};
