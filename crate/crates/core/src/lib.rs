//! Intertwining operators among generalized Verma modules for affine Lie
//! algebras, built from the Knizhnik-Zamolodchikov recursion in exact
//! arithmetic, together with obstruction analysis and sl2 fusion-rule
//! criteria.

pub mod affine_verma;
pub mod error;
pub mod exact_arith;
pub mod fusion_sl2;
pub mod g_modules;
pub mod kz_engine;
pub mod lie_core;

pub use error::{Error, Result};
pub use exact_arith::{q, ExactMatrix, Level, Lin, Scalar};
