//! Exact symbolic engine for first-order linear difference equations with a
//! second commuting endomorphism.
//!
//! Given a tower of transcendental parameters under an equation variable and
//! two commuting endomorphisms phi and sigma, the engine decides whether the
//! solutions of phi(y) = a*y satisfy any sigma-polynomial relation over the
//! base field, synthesizes and verifies the multiplicative certificates when
//! they do, tests linear systems phi(y) = A*y for isomonodromy, and
//! cross-validates every symbolic verdict numerically in the sequence model.

pub mod dependence;
pub mod error;
pub mod field;
pub mod introots;
pub mod isomono;
pub mod matrix;
pub mod orbit;
pub mod poly;
pub mod seq;
pub mod tower;
pub mod zpoly;

pub use error::{EngineError, Result};
pub use field::FieldElement;
pub use poly::RPoly;
pub use tower::{Action, Endo, TowerSpec, VarSpec};
