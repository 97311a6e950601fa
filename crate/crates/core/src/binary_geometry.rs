//! Stratum-by-stratum verification that the Pellspace u-equations cut out a
//! binary geometry.
//!
//! For a face `S`, the stratum `{u_S = 0}` is described by the equations on
//! the link vertices `W_S`; everything outside `S ∪ W_S` is forced to `1`.
//! The incompatibility graph on `W_S` splits into components, each of which
//! is the system of a smaller pellytope. Interior points of those factors
//! assemble into an exact point of the stratum.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::SimpleGraph;
use crate::linalg::{rat_string, RatVec};
use crate::pellytope::{PellError, PellModel};
use crate::polyhedra::FlagComplex;
use crate::uequations::{Factor, UEquationError, UEquationSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinaryError {
    #[error("component {component:?} of the stratum {s:?} matches no pellytope system")]
    FactorMatchFailed { s: Vec<usize>, component: Vec<usize> },
    #[error("point does not satisfy the u-equations")]
    PointNotOnVariety,
    #[error("assembled witness for stratum {0:?} fails the original equations")]
    WitnessFailed(Vec<usize>),
    #[error("stratum {s:?}: factor dimensions sum to {found}, expected {expected}")]
    CodimMismatch { s: Vec<usize>, expected: usize, found: usize },
    #[error("stratum {0:?}: face status disagrees with the fan")]
    FaceMismatch(Vec<usize>),
    #[error("Jacobian rank {found} at a sampled point, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("no generic interior point found after {0} draws")]
    NoWitness(usize),
    #[error(transparent)]
    Pell(#[from] PellError),
    #[error(transparent)]
    UEquation(#[from] UEquationError),
}

/// Disjoint union of two systems, `b`'s variables shifted past `a`'s.
pub fn system_product(a: &UEquationSystem, b: &UEquationSystem) -> UEquationSystem {
    a.product_with(b)
}

/// The equations cutting out the stratum `{u_S = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumSystem {
    /// Sorted zero set.
    pub s: Vec<usize>,
    /// `W_S`: variables compatible with all of `S`, sorted.
    pub active: Vec<usize>,
    /// Variables forced to `1`.
    pub frozen_ones: Vec<usize>,
    /// Equations for `W_S`; local index `k` stands for `active[k]`.
    pub reduced: UEquationSystem,
}

impl StratumSystem {
    /// Requires `S` to be a face of `system`'s flag complex.
    pub fn new(system: &UEquationSystem, s: &[usize]) -> Result<Self, BinaryError> {
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        let flag = system.flag_complex();
        let active = flag.link_vertices(&s);
        let frozen_ones = (0..system.len())
            .filter(|v| s.binary_search(v).is_err() && active.binary_search(v).is_err())
            .collect();
        let local: BTreeMap<usize, usize> = active.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let products = active
            .iter()
            .map(|&v| {
                system
                    .product(v)
                    .iter()
                    .filter_map(|f| local.get(&f.var).map(|&k| Factor { var: k, exp: f.exp }))
                    .collect()
            })
            .collect();
        Ok(StratumSystem {
            s,
            active,
            frozen_ones,
            reduced: UEquationSystem::new(products)?,
        })
    }

    /// Connected components of the reduced incompatibility graph, as lists of
    /// original variable indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.reduced
            .flag_complex()
            .incompatibility_graph()
            .components()
            .into_iter()
            .map(|c| c.into_iter().map(|k| self.active[k]).collect())
            .collect()
    }
}

/// Outcome of analysing one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumReport {
    pub s: Vec<usize>,
    pub is_face: bool,
    pub witness: Option<RatVec>,
    pub certificate: Option<(usize, usize)>,
    pub codim: Option<usize>,
}

impl StratumReport {
    /// Indices are written 1-based.
    pub fn to_json(&self) -> Value {
        json!({
            "S": self.s.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "face": self.is_face,
            "witness": self.witness.as_ref().map(|w| w.iter().map(rat_string).collect::<Vec<_>>()),
            "certificate": self.certificate.map(|(i, j)| vec![i + 1, j + 1]),
            "codim": self.codim,
        })
    }
}

/// Random rational `y ∈ (0, 10)^d` with denominators at most 1000 and
/// distinct coordinates, pushed through the generator monomials.
pub fn interior_witness<R: Rng>(model: &PellModel, rng: &mut R) -> Result<RatVec, BinaryError> {
    const ATTEMPTS: usize = 64;
    let d = model.d();
    for _ in 0..ATTEMPTS {
        let y: Vec<BigRational> = (0..d)
            .map(|_| {
                let den: i64 = rng.gen_range(1..=1000);
                let num: i64 = rng.gen_range(1..10 * den);
                BigRational::new(num.into(), den.into())
            })
            .collect();
        let distinct = (0..d).all(|i| (i + 1..d).all(|j| y[i] != y[j]));
        if !distinct {
            continue;
        }
        if let Some(u) = witness_at(model, &y)? {
            return Ok(u);
        }
    }
    Err(BinaryError::NoWitness(ATTEMPTS))
}

/// The point of the Pellspace over `y`, or `None` if some coordinate is `0`
/// or `1`.
pub fn witness_at(model: &PellModel, y: &[BigRational]) -> Result<Option<RatVec>, BinaryError> {
    let u: Vec<BigRational> = model.generators().iter().map(|g| g.eval(y)).collect();
    if u.iter().any(|x| x.is_zero() || x.is_one()) {
        return Ok(None);
    }
    if !model.uequations().is_solution(&u)? {
        return Err(BinaryError::PointNotOnVariety);
    }
    Ok(Some(RatVec::new(u)))
}

/// Exact rank of the Jacobian of the u-equations at a point on the variety.
pub fn jacobian_rank(model: &PellModel, point: &RatVec) -> Result<usize, BinaryError> {
    if !model.uequations().is_solution(point.entries())? {
        return Err(BinaryError::PointNotOnVariety);
    }
    Ok(model.uequations().jacobian_rank(point.entries())?)
}

/// Full verification report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryReport {
    pub d: usize,
    pub strata: Vec<StratumReport>,
    /// Jacobian ranks at the sampled interior points.
    pub jacobian_ranks: Vec<usize>,
}

impl BinaryReport {
    pub fn num_faces(&self) -> usize {
        self.strata.iter().filter(|r| r.is_face).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "strata": self.strata.iter().map(StratumReport::to_json).collect::<Vec<_>>(),
            "jacobian_rank": self.jacobian_ranks.first(),
        })
    }
}

/// Analyses strata of one Pellspace, reusing the smaller pellytope systems
/// its strata factor into.
pub struct BinaryVerifier {
    model: PellModel,
    flag: FlagComplex,
    /// `bases[k]` is the model for `Σ_k` together with its incompatibility graph.
    bases: Vec<Option<(PellModel, SimpleGraph)>>,
}

impl BinaryVerifier {
    pub fn new(model: PellModel) -> Result<Self, BinaryError> {
        let d = model.d();
        let mut bases = vec![None];
        for k in 1..=d {
            let base = if k == d { model.clone() } else { PellModel::new(k)? };
            let graph = base.uequations().flag_complex().incompatibility_graph();
            bases.push(Some((base, graph)));
        }
        Ok(BinaryVerifier {
            flag: model.uequations().flag_complex(),
            model,
            bases,
        })
    }

    pub fn model(&self) -> &PellModel {
        &self.model
    }

    /// Non-faces get the first incompatible pair as certificate; faces get an
    /// exact point of the stratum, checked against the original equations.
    pub fn analyze_stratum<R: Rng>(&self, s: &[usize], rng: &mut R) -> Result<StratumReport, BinaryError> {
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(pair) = self.flag.incompatible_pair(&s) {
            return Ok(StratumReport {
                s,
                is_face: false,
                witness: None,
                certificate: Some(pair),
                codim: None,
            });
        }
        let system = self.model.uequations();
        let stratum = StratumSystem::new(system, &s)?;
        let mut point = vec![BigRational::one(); system.len()];
        for &i in &s {
            point[i] = BigRational::zero();
        }
        let whole = self.flag.incompatibility_graph();
        let mut dim = 0;
        for component in stratum.components() {
            let fail = || BinaryError::FactorMatchFailed {
                s: s.clone(),
                component: component.clone(),
            };
            if (component.len() + 1) % 3 != 0 {
                return Err(fail());
            }
            let k = (component.len() + 1) / 3;
            let (base, base_graph) = self.bases.get(k).and_then(Option::as_ref).ok_or_else(fail)?;
            let phi = whole.induced(&component).isomorphism_to(base_graph).ok_or_else(fail)?;
            let w = interior_witness(base, rng)?;
            for (pos, &v) in component.iter().enumerate() {
                point[v] = w[phi[pos]].clone();
            }
            dim += k;
        }
        if !system.is_solution(&point)? {
            return Err(BinaryError::WitnessFailed(s));
        }
        let expected = self.model.d() - s.len();
        if dim != expected {
            return Err(BinaryError::CodimMismatch { s, expected, found: dim });
        }
        Ok(StratumReport {
            codim: Some(s.len()),
            s,
            is_face: true,
            witness: Some(RatVec::new(point)),
            certificate: None,
        })
    }

    /// Every subset for `d ≤ 5`; all faces plus the minimal non-faces
    /// (incompatible pairs) beyond that. Each face is also checked against
    /// the fan, and the Jacobian rank is sampled at `rank_samples` points.
    pub fn verify(&self, seed: u64, rank_samples: usize) -> Result<BinaryReport, BinaryError> {
        let d = self.model.d();
        let n = self.model.num_vars();
        let subsets: Vec<Vec<usize>> = if d <= 5 {
            (0u64..1 << n)
                .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
                .collect()
        } else {
            let mut all = self.flag.faces();
            all.extend(self.flag.non_edges().iter().map(|&(a, b)| vec![a, b]));
            all
        };
        let fan = self.model.fan();
        let mut strata = subsets
            .par_iter()
            .enumerate()
            .map(|(idx, s)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let report = self.analyze_stratum(s, &mut rng)?;
                if report.is_face != fan.is_cone(s) {
                    return Err(BinaryError::FaceMismatch(s.clone()));
                }
                Ok(report)
            })
            .collect::<Result<Vec<_>, _>>()?;
        strata.sort_by(|a, b| a.s.cmp(&b.s));

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let expected = 2 * d - 1;
        let mut jacobian_ranks = Vec::with_capacity(rank_samples);
        for _ in 0..rank_samples {
            let p = interior_witness(&self.model, &mut rng)?;
            let r = jacobian_rank(&self.model, &p)?;
            if r != expected {
                return Err(BinaryError::RankMismatch { expected, found: r });
            }
            jacobian_ranks.push(r);
        }
        Ok(BinaryReport { d, strata, jacobian_ranks })
    }
}

/// [`BinaryVerifier::verify`] with ten rank samples.
pub fn verify_binary_geometry(model: &PellModel, seed: u64) -> Result<BinaryReport, BinaryError> {
    BinaryVerifier::new(model.clone())?.verify(seed, 10)
}
