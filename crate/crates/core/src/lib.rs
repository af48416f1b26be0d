//! Exact construction and verification of finite element de Rham sequences
//! on intervals, triangles, squares, convex polygons, tetrahedra, cubes,
//! prisms and pyramids.
//!
//! Everything is computed over the rationals: spaces are spans of
//! polynomial or rational functions, and every dimension is a matrix rank.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

use alloc::string::String;

pub mod calculus;
pub mod geometry;
pub mod interp;
pub mod polyalg;
pub mod qlinalg;
pub mod spaces;
pub mod verify;

pub use geometry::{make_polygon, make_reference, AffineMap, ElementKind, PolygonElement, ReferenceElement};
pub use polyalg::{Factor, Field, Polynomial, RationalFunction};
pub use qlinalg::{QMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("a denominator factor vanishes identically under the substitution")]
    DenominatorVanishes,
    #[error("denominator is not a product of the element's registered factors")]
    UnsupportedFactor,
    #[error("integral diverges")]
    DivergentIntegral,
    #[error("affine map is singular")]
    SingularMap,
    #[error("polygon is not convex")]
    NonConvex,
    #[error("polygon has collinear vertices")]
    CollinearVertices,
    #[error("bad specification: {0}")]
    BadSpec(String),
    #[error("space does not fit this element: {0}")]
    IncompatibleElement(String),
    #[error("unknown family {family} on {element}")]
    UnknownFamily { element: ElementKind, family: u8 },
    #[error("direct sum is not direct: dim {sum} < {left} + {right}")]
    OverlapNotTrivial { left: usize, right: usize, sum: usize },
    #[error("admissibility violated: {0}")]
    AdmissibilityViolated(String),
    #[error("interpolation system is singular: rank {rank} of {size}")]
    SingularSystem { rank: usize, size: usize },
    #[error("faces do not match")]
    FacesDoNotMatch,
    #[error("operation not supported: {0}")]
    Unsupported(String),
}
