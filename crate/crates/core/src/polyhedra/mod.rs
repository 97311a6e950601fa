//! Lattice polytopes kept as point supports, simplicial fans, and the flag
//! complexes of their rays.

mod fan;
mod flag;
mod polytope;

pub use fan::{int_vec_from_json, int_vec_json, Refinement, SimplicialFan, Star};
pub use flag::FlagComplex;
pub use polytope::{check_simple_and_facets, vertices_from_fan, LatticePolytope, PolytopeReport};

use thiserror::Error;

use crate::linalg::{IntVec, LinalgError, RatVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("vector has length {found}, ambient dimension is {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("ray generator {0} is not primitive")]
    NotPrimitive(IntVec),
    #[error("ray index {0} out of range")]
    BadRayIndex(usize),
    #[error("cone {0:?} has linearly dependent generators")]
    DependentCone(Vec<usize>),
    #[error("{0} is already a ray of the fan")]
    RayOnExistingRay(IntVec),
    #[error("{0:?} does not span a cone of the fan")]
    NotACone(Vec<usize>),
    #[error("clique {0:?} of the compatibility graph is not a cone")]
    NotFlag(Vec<usize>),
    #[error("no unique vertex for maximal cone {0}")]
    AmbiguousVertex(usize),
    #[error("point {0:?} is not covered by the fan")]
    NotComplete(RatVec),
    #[error("ray order is not a permutation of the fan's rays")]
    RayOrderMismatch,
    #[error("malformed fan JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
