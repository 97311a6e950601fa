use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{FanError, FlagComplex};
use crate::linalg::{
    int_rank, solve_linear, solve_simplicial_membership, ConeMembership, IntVec, RatVec,
};

/// A simplicial fan given by primitive ray generators and maximal cones
/// (sorted ray-index sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialFan {
    dim: usize,
    rays: Vec<IntVec>,
    cones: Vec<Vec<usize>>,
}

/// Result of [`SimplicialFan::star`]: the projected fan and the basis used
/// to realise `ℝⁿ / L(τ)`.
#[derive(Clone, Debug)]
pub struct Star {
    pub fan: SimplicialFan,
    /// Columns completing τ's generators to a basis of ℝⁿ; the quotient
    /// coordinates are the coefficients on these vectors.
    pub complement_basis: Vec<IntVec>,
    /// Original ray index of each star ray.
    pub ray_origin: Vec<usize>,
}

/// Outcome of [`SimplicialFan::is_refinement_of`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// `cone_map[k]` is the coarse maximal cone containing fine maximal cone `k`.
    Refines { cone_map: Vec<usize> },
    /// A coarse ray that is not a ray of the fine fan.
    MissingRay(IntVec),
    /// A fine maximal cone that lies in no coarse maximal cone.
    ConeNotContained(usize),
}

impl Refinement {
    pub fn holds(&self) -> bool {
        matches!(self, Refinement::Refines { .. })
    }
}

impl SimplicialFan {
    /// Validates ray lengths, primitivity, index ranges, and linear
    /// independence of every maximal cone.
    pub fn new(dim: usize, rays: Vec<IntVec>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        for r in &rays {
            if r.len() != dim {
                return Err(FanError::Dimension {
                    expected: dim,
                    found: r.len(),
                });
            }
            if !r.is_primitive() {
                return Err(FanError::NotPrimitive(r.clone()));
            }
        }
        let mut sorted = Vec::with_capacity(cones.len());
        for mut c in cones {
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::BadRayIndex(bad));
            }
            let gens: Vec<IntVec> = c.iter().map(|&i| rays[i].clone()).collect();
            if int_rank(&gens) != gens.len() {
                return Err(FanError::DependentCone(c));
            }
            sorted.push(c);
        }
        Ok(SimplicialFan {
            dim,
            rays,
            cones: sorted,
        })
    }

    /// The fan in ℝ⁰ consisting of the origin.
    pub fn point() -> Self {
        SimplicialFan {
            dim: 0,
            rays: Vec::new(),
            cones: vec![Vec::new()],
        }
    }

    /// The complete fan in ℝ¹ with rays `e_1` and `-e_1`.
    pub fn line() -> Self {
        SimplicialFan {
            dim: 1,
            rays: vec![IntVec::from_i64s(&[1]), IntVec::from_i64s(&[-1])],
            cones: vec![vec![0], vec![1]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn num_maximal_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn ray_index(&self, v: &IntVec) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn generators(&self, cone: &[usize]) -> Vec<IntVec> {
        cone.iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// Sum of the generators; an interior point of the cone.
    pub fn interior_point(&self, cone: &[usize]) -> IntVec {
        cone.iter()
            .fold(IntVec::zeros(self.dim), |acc, &i| &acc + &self.rays[i])
    }

    /// Whether the ray-index set spans a cone of the fan, i.e. is contained
    /// in some maximal cone.
    pub fn is_cone(&self, set: &[usize]) -> bool {
        self.cones
            .iter()
            .any(|c| set.iter().all(|i| c.binary_search(i).is_ok()))
    }

    /// Indices of the maximal cones containing every ray of `set`.
    pub fn cones_containing(&self, set: &[usize]) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&k| set.iter().all(|i| self.cones[k].binary_search(i).is_ok()))
            .collect()
    }

    /// Product fan in ℝ^{n+m}; rays of `self` first, then `other`'s.
    pub fn product(&self, other: &SimplicialFan) -> SimplicialFan {
        let dim = self.dim + other.dim;
        let left_pad = IntVec::zeros(other.dim);
        let right_pad = IntVec::zeros(self.dim);
        let mut rays: Vec<IntVec> = self.rays.iter().map(|r| r.concat(&left_pad)).collect();
        rays.extend(other.rays.iter().map(|r| right_pad.concat(r)));
        let shift = self.rays.len();
        let cones = self
            .cones
            .iter()
            .flat_map(|c| {
                other.cones.iter().map(move |c2| {
                    c.iter()
                        .copied()
                        .chain(c2.iter().map(|&i| i + shift))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        SimplicialFan { dim, rays, cones }
    }

    /// Stellar subdivision at a new primitive ray `rho`. The new ray is
    /// appended last.
    pub fn stellar_refine(&self, rho: &IntVec) -> Result<SimplicialFan, FanError> {
        if rho.len() != self.dim {
            return Err(FanError::Dimension {
                expected: self.dim,
                found: rho.len(),
            });
        }
        if !rho.is_primitive() {
            return Err(FanError::NotPrimitive(rho.clone()));
        }
        if self.ray_index(rho).is_some() {
            return Err(FanError::RayOnExistingRay(rho.clone()));
        }
        let target = rho.to_rat();
        let new_index = self.rays.len();
        let pieces: Vec<Vec<Vec<usize>>> = self
            .cones
            .par_iter()
            .map(|cone| {
                let gens = self.generators(cone);
                match solve_simplicial_membership(&gens, &target)? {
                    ConeMembership::NotInCone => Ok(vec![cone.clone()]),
                    ConeMembership::Inside(lambda) => {
                        let support: Vec<usize> = (0..cone.len())
                            .filter(|&k| lambda[k].is_positive())
                            .collect();
                        Ok(support
                            .iter()
                            .map(|&k| {
                                let mut c = cone.clone();
                                c[k] = new_index;
                                c.sort_unstable();
                                c
                            })
                            .collect())
                    }
                }
            })
            .collect::<Result<_, FanError>>()?;
        let mut rays = self.rays.clone();
        rays.push(rho.clone());
        Ok(SimplicialFan {
            dim: self.dim,
            rays,
            cones: pieces.into_iter().flatten().collect(),
        })
    }

    /// Reorders the rays to match `order` (a permutation of the ray vectors).
    pub fn with_ray_order(&self, order: &[IntVec]) -> Result<SimplicialFan, FanError> {
        if order.len() != self.rays.len() {
            return Err(FanError::RayOrderMismatch);
        }
        let new_pos: Vec<usize> = self
            .rays
            .iter()
            .map(|r| order.iter().position(|o| o == r).ok_or(FanError::RayOrderMismatch))
            .collect::<Result<_, _>>()?;
        let mut cones: Vec<Vec<usize>> = self
            .cones
            .iter()
            .map(|c| {
                let mut m: Vec<usize> = c.iter().map(|&i| new_pos[i]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        cones.sort();
        Ok(SimplicialFan {
            dim: self.dim,
            rays: order.to_vec(),
            cones,
        })
    }

    /// Same rays and same maximal cones, compared as sets of ray vectors.
    pub fn same_fan(&self, other: &SimplicialFan) -> bool {
        let as_sets = |f: &SimplicialFan| -> BTreeSet<BTreeSet<IntVec>> {
            f.cones
                .iter()
                .map(|c| c.iter().map(|&i| f.rays[i].clone()).collect())
                .collect()
        };
        let rays = |f: &SimplicialFan| f.rays.iter().cloned().collect::<BTreeSet<_>>();
        self.dim == other.dim && rays(self) == rays(other) && as_sets(self) == as_sets(other)
    }

    /// Star of the cone spanned by `tau`: the cones containing it, projected
    /// to `ℝⁿ / L(τ)`.
    pub fn star(&self, tau: &[usize]) -> Result<Star, FanError> {
        let mut tau: Vec<usize> = tau.to_vec();
        tau.sort_unstable();
        tau.dedup();
        if tau.iter().any(|&i| i >= self.rays.len()) || !self.is_cone(&tau) {
            return Err(FanError::NotACone(tau));
        }
        // τ's generators, then standard basis vectors greedily
        let mut basis = self.generators(&tau);
        let mut complement = Vec::new();
        for j in 0..self.dim {
            let e = IntVec::unit(self.dim, j);
            let mut trial = basis.clone();
            trial.push(e.clone());
            if int_rank(&trial) == trial.len() {
                basis = trial;
                complement.push(e);
            }
        }
        let k = tau.len();
        let project = |v: &IntVec| -> Result<IntVec, FanError> {
            let coords = solve_linear(&basis, &v.to_rat())?.expect("basis spans ℝⁿ");
            let tail: RatVec = coords.iter().skip(k).cloned().collect();
            Ok(tail.primitive_integer())
        };
        let containing = self.cones_containing(&tau);
        let link_rays: BTreeSet<usize> = containing
            .iter()
            .flat_map(|&c| self.cones[c].iter().copied())
            .filter(|i| tau.binary_search(i).is_err())
            .collect();
        let mut rays: Vec<IntVec> = Vec::new();
        let mut ray_origin = Vec::new();
        let mut index_of: BTreeMap<usize, usize> = BTreeMap::new();
        for &r in &link_rays {
            let p = project(&self.rays[r])?;
            let idx = match rays.iter().position(|q| *q == p) {
                Some(idx) => idx,
                None => {
                    rays.push(p);
                    ray_origin.push(r);
                    rays.len() - 1
                }
            };
            index_of.insert(r, idx);
        }
        let cones = containing
            .iter()
            .map(|&c| {
                self.cones[c]
                    .iter()
                    .filter(|i| tau.binary_search(i).is_err())
                    .map(|i| index_of[i])
                    .collect()
            })
            .collect();
        let fan = SimplicialFan::new(self.dim - k, rays, cones)?;
        Ok(Star {
            fan,
            complement_basis: complement,
            ray_origin,
        })
    }

    /// Compatibility relation of the rays: `{i, j}` is a non-edge iff no
    /// maximal cone contains both. Fails with a witness clique if the clique
    /// complex of the compatibility graph is larger than the fan.
    pub fn flag_complex(&self) -> Result<FlagComplex, FanError> {
        let n = self.rays.len();
        let mut compatible = vec![vec![false; n]; n];
        for c in &self.cones {
            for &a in c {
                for &b in c {
                    compatible[a][b] = true;
                }
            }
        }
        let non_edges: BTreeSet<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !compatible[a][b])
            .collect();
        let complex = FlagComplex::new(n, non_edges);
        // a maximal clique inside a maximal cone (itself a clique) equals it
        let cones: HashSet<&Vec<usize>> = self.cones.iter().collect();
        if let Some(clique) = complex
            .maximal_faces()
            .into_iter()
            .find(|clique| !cones.contains(clique))
        {
            return Err(FanError::NotFlag(clique));
        }
        Ok(complex)
    }

    /// Maximal cones containing a rational point (boundary points may lie in
    /// several).
    pub fn locate(&self, point: &RatVec) -> Result<Vec<usize>, FanError> {
        let mut out = Vec::new();
        for (k, c) in self.cones.iter().enumerate() {
            if solve_simplicial_membership(&self.generators(c), point)?.is_inside() {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// Samples random rational directions; every one must lie in at least one
    /// maximal cone and in the interior of at most one. Returns the number of
    /// samples that landed in exactly one cone.
    pub fn check_completeness<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<usize, FanError> {
        let mut exactly_one = 0;
        for _ in 0..samples {
            let point: RatVec = (0..self.dim)
                .map(|_| {
                    BigRational::new(
                        BigInt::from(rng.gen_range(-1000i64..=1000)),
                        BigInt::from(rng.gen_range(1i64..=1000)),
                    )
                })
                .collect();
            let mut containing = 0;
            let mut interior = 0;
            for c in &self.cones {
                if let ConeMembership::Inside(lambda) =
                    solve_simplicial_membership(&self.generators(c), &point)?
                {
                    containing += 1;
                    if lambda.iter().all(|x| !x.is_zero()) {
                        interior += 1;
                    }
                }
            }
            if containing == 0 || interior > 1 {
                return Err(FanError::NotComplete(point));
            }
            if containing == 1 {
                exactly_one += 1;
            }
        }
        Ok(exactly_one)
    }

    /// Checks that `self` refines `coarse`: every coarse ray is a ray here and
    /// every maximal cone here sits inside a coarse maximal cone.
    pub fn is_refinement_of(&self, coarse: &SimplicialFan) -> Result<Refinement, FanError> {
        if self.dim != coarse.dim {
            return Err(FanError::Dimension {
                expected: coarse.dim,
                found: self.dim,
            });
        }
        if let Some(missing) = coarse.rays.iter().find(|r| self.ray_index(r).is_none()) {
            return Ok(Refinement::MissingRay(missing.clone()));
        }
        let located: Vec<Option<usize>> = self
            .cones
            .par_iter()
            .map(|cone| {
                let p = self.interior_point(cone).to_rat();
                for k in coarse.locate(&p)? {
                    let coarse_gens = coarse.generators(&coarse.cones[k]);
                    let all_inside = cone.iter().all(|&i| {
                        solve_simplicial_membership(&coarse_gens, &self.rays[i].to_rat())
                            .map(|m| m.is_inside())
                            .unwrap_or(false)
                    });
                    if all_inside {
                        return Ok(Some(k));
                    }
                }
                Ok(None)
            })
            .collect::<Result<_, FanError>>()?;
        let mut cone_map = Vec::with_capacity(located.len());
        for (k, l) in located.into_iter().enumerate() {
            match l {
                Some(c) => cone_map.push(c),
                None => return Ok(Refinement::ConeNotContained(k)),
            }
        }
        Ok(Refinement::Refines { cone_map })
    }

    /// `{"dim": d, "rays": [[ints]], "maximal_cones": [[ray indices]]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "rays": self.rays.iter().map(int_vec_json).collect::<Vec<_>>(),
            "maximal_cones": self.cones,
        })
    }

    pub fn from_json(v: &Value) -> Result<SimplicialFan, FanError> {
        let bad = |m: &str| FanError::Json(m.to_string());
        let dim = v["dim"].as_u64().ok_or_else(|| bad("missing dim"))? as usize;
        let rays = v["rays"]
            .as_array()
            .ok_or_else(|| bad("missing rays"))?
            .iter()
            .map(|r| int_vec_from_json(r).ok_or_else(|| bad("bad ray")))
            .collect::<Result<Vec<_>, _>>()?;
        let cones = v["maximal_cones"]
            .as_array()
            .ok_or_else(|| bad("missing maximal_cones"))?
            .iter()
            .map(|c| {
                c.as_array()
                    .ok_or_else(|| bad("bad cone"))?
                    .iter()
                    .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| bad("bad index")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SimplicialFan::new(dim, rays, cones)
    }
}

/// Integer vector as a JSON array. Entries beyond `i64` are emitted as strings.
pub fn int_vec_json(v: &IntVec) -> Value {
    use num_traits::ToPrimitive;
    Value::Array(
        v.iter()
            .map(|x| match x.to_i64() {
                Some(s) => json!(s),
                None => json!(x.to_string()),
            })
            .collect(),
    )
}

pub fn int_vec_from_json(v: &Value) -> Option<IntVec> {
    v.as_array()?
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_i64().map(BigInt::from),
            Value::String(s) => s.parse().ok(),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[i64]) -> IntVec {
        IntVec::from_i64s(x)
    }

    fn quadrants() -> SimplicialFan {
        SimplicialFan::line().product(&SimplicialFan::line())
    }

    #[test]
    fn product_of_lines_is_quadrant_fan() {
        let q = quadrants();
        assert_eq!(q.dim(), 2);
        assert_eq!(q.rays(), &[v(&[1, 0]), v(&[-1, 0]), v(&[0, 1]), v(&[0, -1])]);
        assert_eq!(q.maximal_cones(), &[vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn product_with_point_fan() {
        let q = quadrants();
        assert_eq!(q.product(&SimplicialFan::point()), q);
        assert_eq!(SimplicialFan::point().product(&q), q);
    }

    #[test]
    fn refine_quadrants_at_diagonal() {
        let q = quadrants();
        let s2 = q.stellar_refine(&v(&[1, -1])).unwrap();
        assert_eq!(s2.num_rays(), 5);
        assert_eq!(s2.num_maximal_cones(), 5);
        let expected = SimplicialFan::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, 0]), v(&[0, -1]), v(&[1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![0, 4]],
        )
        .unwrap();
        assert!(s2.same_fan(&expected));
        assert!(s2.check_completeness(50, &mut ChaCha8Rng::seed_from_u64(1)).is_ok());
    }

    #[test]
    fn refine_at_existing_ray() {
        assert_eq!(
            quadrants().stellar_refine(&v(&[1, 0])),
            Err(FanError::RayOnExistingRay(v(&[1, 0])))
        );
    }

    #[test]
    fn star_of_maximal_cone_is_point() {
        let q = quadrants();
        let st = q.star(&[0, 2]).unwrap();
        assert_eq!(st.fan, SimplicialFan::point());
    }

    #[test]
    fn star_of_ray_in_quadrants() {
        let st = quadrants().star(&[0]).unwrap();
        assert_eq!(st.fan.dim(), 1);
        assert_eq!(st.fan.num_rays(), 2);
        assert_eq!(st.fan.num_maximal_cones(), 2);
    }

    #[test]
    fn star_of_non_cone() {
        assert!(matches!(quadrants().star(&[0, 1]), Err(FanError::NotACone(_))));
    }

    #[test]
    fn flag_complex_of_quadrants() {
        let fc = quadrants().flag_complex().unwrap();
        assert_eq!(fc.non_edges(), &[(0, 1), (2, 3)].into_iter().collect());
        let fc1 = SimplicialFan::line().flag_complex().unwrap();
        assert_eq!(fc1.non_edges(), &[(0, 1)].into_iter().collect());
    }

    #[test]
    fn boundary_of_triangle_is_not_flag() {
        // three rays pairwise adjacent but no 3-cone: the hollow triangle
        let fan = SimplicialFan::new(
            2,
            vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        // complete 2d fan: every pair spans a cone, and {0,1,2} is a clique
        assert_eq!(fan.flag_complex(), Err(FanError::NotFlag(vec![0, 1, 2])));
    }

    #[test]
    fn refinement_of_itself() {
        let q = quadrants();
        assert!(q.is_refinement_of(&q).unwrap().holds());
        let s2 = q.stellar_refine(&v(&[1, -1])).unwrap();
        assert!(s2.is_refinement_of(&q).unwrap().holds());
        assert_eq!(
            q.is_refinement_of(&s2).unwrap(),
            Refinement::MissingRay(v(&[1, -1]))
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SimplicialFan::new(2, vec![v(&[2, 0])], vec![vec![0]]),
            Err(FanError::NotPrimitive(_))
        ));
        assert!(matches!(
            SimplicialFan::new(2, vec![v(&[1, 0]), v(&[-1, 0])], vec![vec![0, 1]]),
            Err(FanError::DependentCone(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let q = quadrants();
        let j = q.to_json();
        assert_eq!(j["rays"][1], json!([-1, 0]));
        assert_eq!(SimplicialFan::from_json(&j).unwrap(), q);
    }
}
