//! Model checking for higher-order fixpoint logic over finite transition systems.
//!
//! Formulas are built with [`syntax`] or parsed with [`surface`], typed with
//! [`typesys`], and evaluated over an [`lts::Lts`] either directly with [`eval`]
//! or through the model-checking games of [`games`]. The [`encodings`] module
//! contains the counter, tape and machine constructions together with a few
//! example properties.

pub mod denote;
pub mod encodings;
pub mod eval;
pub mod games;
pub mod lts;
pub mod surface;
pub mod syntax;
pub mod typesys;

pub use lts::Lts;
pub use syntax::Formula;
pub use typesys::{HflType, Variance};
