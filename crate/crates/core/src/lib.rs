//! Exact computations with pellytopes, their normal fans, and the affine
//! variety cut out by their u-equations.
//!
//! ```
//! use pellspace::pellytope::PellModel;
//!
//! let model = PellModel::new(3).unwrap();
//! assert_eq!(model.fan().num_maximal_cones(), 12);
//! assert_eq!(model.uequations().len(), 8);
//! ```
//!
//! See the guide in `book/` for a walk through each module.

pub mod associahedron;
pub mod binary_geometry;
pub mod graph;
pub mod linalg;
pub mod pellytope;
pub mod poly;
pub mod polyhedra;
pub mod uequations;

// Book chapters are compiled as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/fans.md")]
    mod fans {}
    #[doc = include_str!("../../../book/src/pellytope.md")]
    mod pellytope {}
    #[doc = include_str!("../../../book/src/u-equations.md")]
    mod u_equations {}
    #[doc = include_str!("../../../book/src/binary-geometry.md")]
    mod binary_geometry {}
    #[doc = include_str!("../../../book/src/associahedron.md")]
    mod associahedron {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
