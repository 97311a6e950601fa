use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::fan::int_vec_json;
use super::{FanError, SimplicialFan};
use crate::linalg::{int_rank, IntVec};

/// A lattice polytope kept as the finite point set whose convex hull it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    support: Vec<IntVec>,
    vertices: Vec<IntVec>,
}

impl LatticePolytope {
    /// Support points are deduplicated and sorted. Vertices start empty; see
    /// [`LatticePolytope::with_vertices_from_fan`].
    pub fn from_support(dim: usize, support: impl IntoIterator<Item = IntVec>) -> Self {
        let support: BTreeSet<IntVec> = support.into_iter().collect();
        assert!(support.iter().all(|p| p.len() == dim), "support point of wrong length");
        LatticePolytope {
            dim,
            support: support.into_iter().collect(),
            vertices: Vec::new(),
        }
    }

    /// Derives the vertex set from a fan refining the normal fan.
    pub fn with_vertices_from_fan(mut self, fan: &SimplicialFan) -> Result<Self, FanError> {
        let per_cone = vertices_from_fan(&self.support, fan)?;
        let distinct: BTreeSet<IntVec> = per_cone.into_iter().collect();
        self.vertices = distinct.into_iter().collect();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[IntVec] {
        &self.support
    }

    pub fn vertices(&self) -> &[IntVec] {
        &self.vertices
    }

    /// `{"dim": d, "support": [[ints]], "vertices": [[ints]]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "support": self.support.iter().map(int_vec_json).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(int_vec_json).collect::<Vec<_>>(),
        })
    }
}

fn small(v: &IntVec) -> Vec<i64> {
    v.to_i64s().expect("lattice coordinates fit in i64")
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Points of `support` minimising `⟨w, ·⟩`.
fn minimisers<'a>(support: &'a [Vec<i64>], w: &[i64]) -> Vec<&'a Vec<i64>> {
    let mut best = i64::MAX;
    let mut out = Vec::new();
    for p in support {
        let value = dot(w, p);
        if value < best {
            best = value;
            out.clear();
            out.push(p);
        } else if value == best {
            out.push(p);
        }
    }
    out
}

fn minimises(support: &[Vec<i64>], w: &[i64], candidate: &[i64]) -> bool {
    let value = dot(w, candidate);
    support.iter().all(|p| dot(w, p) >= value)
}

/// For each maximal cone, the vertex of `conv(support)` whose normal cone
/// contains it.
///
/// The functional is the sum of the cone's generators; ties are broken by
/// up to three perturbations toward individual generators. The chosen point
/// must also minimise every generator, which certifies that the whole cone
/// lies in its normal cone.
pub fn vertices_from_fan(support: &[IntVec], fan: &SimplicialFan) -> Result<Vec<IntVec>, FanError> {
    let pts: Vec<Vec<i64>> = support.iter().map(small).collect();
    let rays: Vec<Vec<i64>> = fan.rays().iter().map(small).collect();
    let dim = fan.dim();
    fan.maximal_cones()
        .par_iter()
        .enumerate()
        .map(|(k, cone)| {
            for attempt in 0..=3u32 {
                // weights N + position, N large, so attempt 0 is the plain sum
                let scale = if attempt == 0 { 1 } else { 10i64.pow(attempt) };
                let mut w = vec![0i64; dim];
                for (pos, &r) in cone.iter().enumerate() {
                    let weight = if attempt == 0 { 1 } else { scale + pos as i64 + 1 };
                    for (wi, ri) in w.iter_mut().zip(&rays[r]) {
                        *wi += weight * ri;
                    }
                }
                let mins = minimisers(&pts, &w);
                if mins.len() != 1 {
                    continue;
                }
                let v = mins[0];
                if cone.iter().all(|&r| minimises(&pts, &rays[r], v)) {
                    return Ok(IntVec::from_i64s(v));
                }
                return Err(FanError::AmbiguousVertex(k));
            }
            Err(FanError::AmbiguousVertex(k))
        })
        .collect()
}

/// Facet, vertex, and simplicity data for a polytope against its normal fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeReport {
    /// Rays whose minimising face has affine dimension `dim - 1`.
    pub facet_rays: Vec<usize>,
    pub num_facets: usize,
    pub num_vertices: usize,
    /// Every maximal cone has exactly `dim` rays and the cone→vertex map is injective.
    pub simple: bool,
}

pub fn check_simple_and_facets(
    polytope: &LatticePolytope,
    fan: &SimplicialFan,
) -> Result<PolytopeReport, FanError> {
    let per_cone = vertices_from_fan(polytope.support(), fan)?;
    let distinct: BTreeSet<&IntVec> = per_cone.iter().collect();
    let pts: Vec<Vec<i64>> = polytope.support().iter().map(small).collect();
    let dim = polytope.dim();
    let facet_rays: Vec<usize> = fan
        .rays()
        .par_iter()
        .enumerate()
        .filter(|(_, r)| {
            let face = minimisers(&pts, &small(r));
            let base = face[0];
            let diffs: Vec<IntVec> = face[1..]
                .iter()
                .map(|p| IntVec::from_i64s(&p.iter().zip(base).map(|(a, b)| a - b).collect::<Vec<_>>()))
                .collect();
            dim >= 1 && int_rank(&diffs) == dim - 1
        })
        .map(|(i, _)| i)
        .collect();
    let simple = fan.maximal_cones().iter().all(|c| c.len() == dim)
        && distinct.len() == per_cone.len();
    Ok(PolytopeReport {
        num_facets: facet_rays.len(),
        facet_rays,
        num_vertices: distinct.len(),
        simple,
    })
}
