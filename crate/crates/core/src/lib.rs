//! Odd Khovanov homology of links, second Steenrod squares built from framed
//! 1-flow categories, and Steenrod-square refinements of the Rasmussen
//! s-invariant over F2.
//!
//! The pipeline runs bottom-up:
//!
//! * [`diagram`] parses planar diagram codes and computes the resolution cube
//!   (circles, surgeries, face types, edge assignments);
//! * [`oddcomplex`] builds the odd Khovanov chain complex over Z and F2;
//! * [`flowcat`] builds the framed 1-flow category covering the cube;
//! * [`steenrod`] evaluates `Sq²` (odd and even) and `Sq¹` on cohomology;
//! * [`sinvariant`] computes `s` over F2 and its refinements.
//!
//! [`exactla`] and [`cube`] provide exact linear algebra and cube
//! combinatorics; [`knottable`] bundles a table of knot diagrams.

pub mod cube;
pub mod diagram;
pub mod exactla;
pub mod flowcat;
pub mod knottable;
pub mod oddcomplex;
pub mod sinvariant;
pub mod steenrod;

pub use cube::{FaceSignQuad, SubCube, Vertex};
pub use diagram::LinkDiagram;
pub use exactla::{AbelianGroup, F2Matrix, F2Vec, IntMatrix, Subspace};
pub use flowcat::{build_cover, CoverParams, FramedOneFlowCategory, FramingTable, Variant};
pub use oddcomplex::{Choices, OddCube, Reduction, Theory};
pub use steenrod::{ChangWord, Operation, SteenrodReport};

/// Errors raised by the library.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed user input (diagram text, knot names, options).
    #[error("input error: {0}")]
    Input(String),
    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Sign data with an odd number of changes or a face not summing to one.
    #[error("invalid sign data: {0}")]
    InvalidSigns(String),
    /// The face classification admits no edge assignment.
    #[error("face classification invalid: {0}")]
    FaceClassification(String),
    /// Integer overflow in checked arithmetic.
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
    /// The input is valid but outside what this library supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
