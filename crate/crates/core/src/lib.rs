//! Conley complexes and connection matrices of poset-graded cell complexes
//! over prime fields.
//!
//! A [`GradedComplex`] is reduced by a tower of graded discrete Morse
//! reductions until every fiber has zero internal boundary. The surviving
//! boundary is a connection matrix; with the trivial grading the same loop
//! computes homology. Because every reduction is a filtered chain
//! equivalence, the result has the same persistent homology as the input.
//!
//! ```
//! use std::sync::Arc;
//! use conley_core::{cubical, conley, PrimeField};
//!
//! let x = cubical::interval_complex(PrimeField::new(2).unwrap(), 10);
//! let r = conley::homology(Arc::new(x));
//! assert_eq!(r.result.complex().f_polynomial().to_string(), "1");
//! ```

pub mod bitset;
pub mod chain;
pub mod complex;
pub mod conley;
pub mod cubical;
pub mod field;
#[cfg(feature = "oracle")]
pub mod fixtures;
pub mod graded;
pub mod linalg;
pub mod morse;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod order;
pub mod persistence;
pub mod poly;

pub use bitset::BitSet;
pub use chain::Chain;
pub use complex::{Cell, CellComplex, ComplexBuilder, ComplexError, ValidationReport, Violation};
pub use conley::{ConleyError, ConleyOptions, ConleyResult, Strategy};
pub use cubical::{CubicalError, CubicalGrid};
pub use field::{FieldElement, FieldError, PrimeField};
pub use graded::{FiberGraph, GradedComplex, GradedError};
pub use morse::{Matching, MorseError, Reduction, Role};
pub use order::{DownSet, OrderError, Poset};
pub use persistence::{PersistenceDiagram, PersistenceError};
pub use poly::IntPolynomial;

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Conley(#[from] ConleyError),
    #[error(transparent)]
    Cubical(#[from] CubicalError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
}
