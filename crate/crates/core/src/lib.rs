//! Polynomial symbol calculus, truncated Bargmann–Fock spaces, normal and
//! anti-normal quantization, finite bosonization, and a time-sliced anti-normal
//! propagator checked against exact spectral evolution.

pub mod bosonization;
pub mod error;
pub mod fock;
pub mod multi_index;
pub mod propagator;
pub mod quadrature;
pub mod quantization;
pub mod symbol;

pub use error::{Error, Result};
pub use fock::{CoherentState, FockBasis, FockVector, Ladder, Shift};
pub use multi_index::MultiIndex;
pub use quantization::OperatorMatrix;
pub use symbol::{Monomial, PolySymbol};
