//! The ABHY associahedron: polygon arcs, the polynomial `G_{n−3}`, its
//! normal fan (triangulations), and dihedral coordinates.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{rat_string, IntVec};
use crate::pellytope::{build_fan, pellytope_polynomial, PellError};
use crate::poly::{poly_product, Alphabet, PolyError, SparsePoly};
use crate::polyhedra::{int_vec_json, vertices_from_fan, FanError, Refinement, SimplicialFan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssocError {
    #[error("polygon needs at least 4 vertices, got {0}")]
    TooSmall(usize),
    #[error("({i}, {j}) is not a diagonal of the {n}-gon")]
    InvalidArc { i: usize, j: usize, n: usize },
    #[error("configuration has {found} points, expected {expected}")]
    ConfigLength { expected: usize, found: usize },
    #[error("cross-ratio for arc {0} has a vanishing factor")]
    DegenerateConfig(Arc),
    #[error("could not draw a nondegenerate configuration")]
    NoConfig,
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Pell(#[from] PellError),
}

/// A diagonal `ij` of the `n`-gon, vertices labelled `1..n`, `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub i: usize,
    pub j: usize,
}

impl Arc {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Arc, AssocError> {
        let ok = 1 <= i && i + 2 <= j && j <= n && !(i == 1 && j == n);
        if !ok {
            return Err(AssocError::InvalidArc { i, j, n });
        }
        Ok(Arc { i, j })
    }

    pub fn crosses(&self, other: &Arc) -> bool {
        crossing(self, other)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

/// All `n(n−3)/2` diagonals, sorted.
pub fn arcs(n: usize) -> Result<Vec<Arc>, AssocError> {
    if n < 4 {
        return Err(AssocError::TooSmall(n));
    }
    Ok((1..=n)
        .flat_map(|i| (i + 2..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| !(i == 1 && j == n))
        .map(|(i, j)| Arc { i, j })
        .collect())
}

pub fn crossing(a: &Arc, b: &Arc) -> bool {
    (a.i < b.i && b.i < a.j && a.j < b.j) || (b.i < a.i && a.i < b.j && b.j < a.j)
}

/// `∏ (1 + y_i + y_i y_{i+1} + ⋯ + y_i⋯y_{j−2})` over arcs with `j ≤ n − 1`,
/// expanded in `y_1..y_{n−3}`.
pub fn build_g(n: usize) -> Result<SparsePoly, AssocError> {
    let d = n.checked_sub(3).filter(|&d| d >= 1).ok_or(AssocError::TooSmall(n))?;
    let vars = Alphabet::indexed("y", d);
    let factors = arcs(n)?
        .into_iter()
        .filter(|a| a.j < n)
        .map(|a| {
            let exps: Vec<Vec<i64>> = (0..a.j - a.i)
                .map(|len| {
                    let mut e = vec![0i64; d];
                    for slot in e.iter_mut().skip(a.i - 1).take(len) {
                        *slot = 1;
                    }
                    e
                })
                .collect();
            SparsePoly::sum_of_monomials(vars.clone(), &exps)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(poly_product(&vars, &factors)?)
}

/// Primitive generator of the ray labelled by `arc`:
/// `i(n−1) ↦ e_i`, `(i+1)n ↦ −e_i`, `i(k+1) ↦ e_i − e_k`.
pub fn arc_to_ray(arc: &Arc, n: usize) -> IntVec {
    let d = n - 3;
    let mut v = vec![0i64; d];
    if arc.j == n {
        v[arc.i - 2] = -1;
    } else if arc.j == n - 1 {
        v[arc.i - 1] = 1;
    } else {
        v[arc.i - 1] = 1;
        v[arc.j - 2] = -1;
    }
    IntVec::from_i64s(&v)
}

/// Inverse of [`arc_to_ray`] on the rays of the associahedron fan.
pub fn ray_to_arc(ray: &IntVec, n: usize) -> Option<Arc> {
    let v = ray.to_i64s()?;
    let ones: Vec<usize> = (0..v.len()).filter(|&k| v[k] == 1).collect();
    let negs: Vec<usize> = (0..v.len()).filter(|&k| v[k] == -1).collect();
    if ones.len() + negs.len() != v.iter().filter(|x| **x != 0).count() {
        return None;
    }
    let arc = match (ones.as_slice(), negs.as_slice()) {
        ([i], []) => Arc { i: i + 1, j: n - 1 },
        ([], [i]) => Arc { i: i + 2, j: n },
        ([i], [k]) if i < k => Arc { i: i + 1, j: k + 2 },
        _ => return None,
    };
    Some(arc)
}

/// Triangulations of the convex `n`-gon as sets of diagonals, by choosing
/// the apex over each base edge recursively.
pub fn triangulations(n: usize) -> Result<Vec<Vec<Arc>>, AssocError> {
    if n < 4 {
        return Err(AssocError::TooSmall(n));
    }
    fn rec(a: usize, b: usize, n: usize) -> Vec<Vec<Arc>> {
        if b - a < 2 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for k in a + 1..b {
            let left = rec(a, k, n);
            let right = rec(k, b, n);
            for l in &left {
                for r in &right {
                    let mut t: Vec<Arc> = l.iter().chain(r).copied().collect();
                    for (x, y) in [(a, k), (k, b)] {
                        if y - x >= 2 && !(x == 1 && y == n) {
                            t.push(Arc { i: x, j: y });
                        }
                    }
                    t.sort();
                    out.push(t);
                }
            }
        }
        out
    }
    let mut all = rec(1, n, n);
    all.sort();
    Ok(all)
}

/// `C_m` by the convolution recursion.
pub fn catalan(m: usize) -> BigInt {
    let mut c = vec![BigInt::one()];
    for k in 1..=m {
        let next = (0..k).map(|i| &c[i] * &c[k - 1 - i]).sum();
        c.push(next);
    }
    c.swap_remove(m)
}

/// The associahedron fan with its arc labels.
#[derive(Clone, Debug)]
pub struct AssocFan {
    pub n: usize,
    pub fan: SimplicialFan,
    /// `arc_of_ray[r]` labels ray `r`.
    pub arc_of_ray: Vec<Arc>,
}

/// Rays are those of `Σ_{n−3}` in their usual order followed by the
/// remaining `e_i − e_k`, `k > i + 1`, by gap and then `i`. Maximal cones are
/// the triangulations.
pub fn build_assoc_fan(n: usize) -> Result<AssocFan, AssocError> {
    let d = n.checked_sub(3).filter(|&d| d >= 1).ok_or(AssocError::TooSmall(n))?;
    let mut rays: Vec<IntVec> = crate::pellytope::ray_generators(d);
    for gap in 2..d {
        for i in 1..=d - gap {
            let mut v = vec![0i64; d];
            v[i - 1] = 1;
            v[i + gap - 1] = -1;
            rays.push(IntVec::from_i64s(&v));
        }
    }
    let arc_of_ray: Vec<Arc> = rays
        .iter()
        .map(|r| ray_to_arc(r, n).expect("dictionary covers every ray"))
        .collect();
    let cones = triangulations(n)?
        .into_iter()
        .map(|t| {
            t.iter()
                .map(|a| arc_of_ray.iter().position(|b| b == a).expect("every diagonal is a ray"))
                .collect()
        })
        .collect();
    let fan = SimplicialFan::new(d, rays, cones)?;
    Ok(AssocFan { n, fan, arc_of_ray })
}

/// Vertex data of `Newt(G_{n−3})` read off the triangulation fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocPolytope {
    pub num_cones: usize,
    pub vertices: Vec<IntVec>,
}

/// Certifies that the triangulation fan refines the normal fan of
/// `Newt(G_{n−3})`, returning the distinct vertices found.
pub fn assoc_vertices(n: usize) -> Result<AssocPolytope, AssocError> {
    let af = build_assoc_fan(n)?;
    let support = build_g(n)?.support();
    let per_cone = vertices_from_fan(&support, &af.fan)?;
    let distinct: BTreeSet<IntVec> = per_cone.into_iter().collect();
    Ok(AssocPolytope {
        num_cones: af.fan.num_maximal_cones(),
        vertices: distinct.into_iter().collect(),
    })
}

/// Whether the pellytope polynomial divides `G_{n−3}` exactly.
pub fn pellytope_divides_g(n: usize) -> Result<bool, AssocError> {
    let g = build_g(n)?;
    let p = pellytope_polynomial(n - 3)?;
    let (_, rem) = g.div_rem(&p)?;
    Ok(rem.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementReport {
    pub n: usize,
    pub refines: bool,
    pub extra_rays: Vec<IntVec>,
    /// `(fine cone, coarse cone)` pairs.
    pub cone_map: Vec<(usize, usize)>,
}

impl RefinementReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "refines": self.refines,
            "extra_rays": self.extra_rays.iter().map(int_vec_json).collect::<Vec<_>>(),
            "cone_map": self.cone_map.iter().map(|&(f, c)| vec![f, c]).collect::<Vec<_>>(),
        })
    }
}

/// Compares the associahedron fan with `Σ_{n−3}`.
pub fn check_refinement(n: usize) -> Result<RefinementReport, AssocError> {
    let af = build_assoc_fan(n)?;
    let coarse = build_fan(n - 3)?;
    let extra_rays = af
        .fan
        .rays()
        .iter()
        .filter(|r| coarse.ray_index(r).is_none())
        .cloned()
        .collect();
    let (refines, cone_map) = match af.fan.is_refinement_of(&coarse)? {
        Refinement::Refines { cone_map } => (true, cone_map.into_iter().enumerate().collect()),
        _ => (false, Vec::new()),
    };
    Ok(RefinementReport {
        n,
        refines,
        extra_rays,
        cone_map,
    })
}

/// `u_ij = (x_i − x_{j+1})(x_{i+1} − x_j) / ((x_i − x_j)(x_{i+1} − x_{j+1}))`,
/// labels read mod `n`.
pub fn dihedral(x: &[BigRational], arc: &Arc) -> Result<BigRational, AssocError> {
    let n = x.len();
    if n < 4 {
        return Err(AssocError::TooSmall(n));
    }
    if arc.j > n {
        return Err(AssocError::InvalidArc { i: arc.i, j: arc.j, n });
    }
    let at = |label: usize| &x[(label - 1) % n];
    let (i, i1, j, j1) = (at(arc.i), at(arc.i + 1), at(arc.j), at(arc.j + 1));
    let den = (i - j) * (i1 - j1);
    let num = (i - j1) * (i1 - j);
    if den.is_zero() || num.is_zero() {
        return Err(AssocError::DegenerateConfig(*arc));
    }
    Ok(num / den)
}

/// `u_ij + ∏_{kl crossing ij} u_kl − 1` for every arc.
pub fn dihedral_residues(x: &[BigRational]) -> Result<Vec<(Arc, BigRational)>, AssocError> {
    let all = arcs(x.len())?;
    let u: Vec<BigRational> = all.iter().map(|a| dihedral(x, a)).collect::<Result<_, _>>()?;
    Ok(all
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let prod = all
                .iter()
                .enumerate()
                .filter(|(_, b)| crossing(a, b))
                .fold(BigRational::one(), |acc, (l, _)| acc * &u[l]);
            (*a, &u[k] + prod - BigRational::one())
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralTrial {
    pub x: Vec<BigRational>,
    /// Arcs whose identity failed.
    pub failed: Vec<Arc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralReport {
    pub n: usize,
    pub identities: usize,
    pub trials: Vec<DihedralTrial>,
}

impl DihedralReport {
    pub fn passed(&self) -> bool {
        self.trials.iter().all(|t| t.failed.is_empty())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "identities": self.identities,
            "passed": self.passed(),
            "trials": self.trials.iter().map(|t| json!({
                "x": t.x.iter().map(rat_string).collect::<Vec<_>>(),
                "failed": t.failed.iter().map(|a| vec![a.i, a.j]).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Random configuration of `n` distinct integers in `[0, 10n]`.
pub fn random_config<R: Rng>(n: usize, rng: &mut R) -> Vec<BigRational> {
    let mut seen = BTreeSet::new();
    while seen.len() < n {
        seen.insert(rng.gen_range(0..=10 * n as i64));
    }
    let mut pts: Vec<i64> = seen.into_iter().collect();
    // a random order, so the configuration is not always increasing
    for k in (1..pts.len()).rev() {
        pts.swap(k, rng.gen_range(0..=k));
    }
    pts.into_iter().map(|v| BigRational::from_integer(v.into())).collect()
}

/// Checks every identity exactly on `trials` random configurations.
pub fn check_assoc_u_equations(n: usize, trials: usize, seed: u64) -> Result<DihedralReport, AssocError> {
    let identities = arcs(n)?.len();
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            for _ in 0..16 {
                let x = random_config(n, &mut rng);
                match dihedral_residues(&x) {
                    Ok(res) => {
                        let failed = res.into_iter().filter(|(_, r)| !r.is_zero()).map(|(a, _)| a).collect();
                        return Ok(DihedralTrial { x, failed });
                    }
                    Err(AssocError::DegenerateConfig(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(AssocError::NoConfig)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DihedralReport {
        n,
        identities,
        trials: results,
    })
}
