//! Pellytopes, their normal fans, bounded characters, and u-equations.
//!
//! Rays of `Σ_d` are always ordered
//! `e_1, …, e_d, −e_1, …, −e_d, e_1 − e_2, …, e_{d−1} − e_d`, and the variable
//! `u_i` corresponds to the `i`-th ray in this order. Indices are 0-based in
//! code; the formulas below are written with the conventional 1-based labels.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{IntMatrix, IntVec, LinalgError, RatVec};
use crate::poly::{poly_product, Alphabet, Monomial, MonomialMap, PolyError, SparsePoly};
use crate::polyhedra::{int_vec_from_json, int_vec_json, FanError, LatticePolytope, SimplicialFan};
use crate::uequations::{UEquationError, UEquationSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },
    #[error("character has lengths ({a}, {b}, {c}); expected ({d}, {d}, {})", d.saturating_sub(1))]
    CharacterShape { a: usize, b: usize, c: usize, d: usize },
    #[error("row {index} of the inverse matrix disagrees with the generator formula")]
    GeneratorMismatch { index: usize },
    #[error("M_d times its closed-form inverse is not the identity")]
    InverseMismatch,
    #[error("two cases of the u-equation formula disagree on equation {0}")]
    ConflictingCases(usize),
    #[error("u-equation {0} is not produced by any case")]
    MissingEquation(usize),
    #[error("character is not bounded")]
    NotBounded,
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    UEquation(#[from] UEquationError),
}

/// `n_1 = 1, n_2 = 2, n_k = 2 n_{k−1} + n_{k−2}`.
pub fn pell_number(k: usize) -> Result<BigInt, PellError> {
    if k < 1 {
        return Err(PellError::InvalidDimension { min: 1, got: k });
    }
    let (mut prev, mut cur) = (BigInt::from(0), BigInt::from(1));
    // n_0 = 0 extends the recursion: n_2 = 2·1 + 0
    for _ in 1..k {
        let next = BigInt::from(2) * &cur + &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn check_dim(d: usize) -> Result<(), PellError> {
    if d < 1 {
        return Err(PellError::InvalidDimension { min: 1, got: d });
    }
    Ok(())
}

/// The three families of rays of `Σ_d`, with 1-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayKind {
    /// `e_k`
    Pos(usize),
    /// `−e_k`
    Neg(usize),
    /// `e_k − e_{k+1}`
    Edge(usize),
}

impl RayKind {
    pub fn of_index(d: usize, index: usize) -> RayKind {
        assert!(index < 3 * d - 1, "ray index out of range");
        if index < d {
            RayKind::Pos(index + 1)
        } else if index < 2 * d {
            RayKind::Neg(index - d + 1)
        } else {
            RayKind::Edge(index - 2 * d + 1)
        }
    }

    pub fn index(self, d: usize) -> Option<usize> {
        match self {
            RayKind::Pos(k) if (1..=d).contains(&k) => Some(k - 1),
            RayKind::Neg(k) if (1..=d).contains(&k) => Some(d + k - 1),
            RayKind::Edge(k) if k >= 1 && k < d => Some(2 * d + k - 1),
            _ => None,
        }
    }

    pub fn vector(self, d: usize) -> IntVec {
        let mut v = vec![0i64; d];
        match self {
            RayKind::Pos(k) => v[k - 1] = 1,
            RayKind::Neg(k) => v[k - 1] = -1,
            RayKind::Edge(k) => {
                v[k - 1] = 1;
                v[k] = -1;
            }
        }
        IntVec::from_i64s(&v)
    }
}

impl fmt::Display for RayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayKind::Pos(k) => write!(f, "e{k}"),
            RayKind::Neg(k) => write!(f, "-e{k}"),
            RayKind::Edge(k) => write!(f, "e{}-e{}", k, k + 1),
        }
    }
}

/// Ray generators of `Σ_d` in the fixed order.
pub fn ray_generators(d: usize) -> Vec<IntVec> {
    (0..3 * d - 1)
        .map(|i| RayKind::of_index(d, i).vector(d))
        .collect()
}

/// `∏ (1 + y_i) · ∏ (1 + y_j + y_j y_{j+1})`, expanded.
pub fn pellytope_polynomial(d: usize) -> Result<SparsePoly, PellError> {
    check_dim(d)?;
    let vars = Alphabet::indexed("y", d);
    let unit = |idx: &[usize]| {
        let mut e = vec![0i64; d];
        for &i in idx {
            e[i] += 1;
        }
        e
    };
    let mut factors = Vec::with_capacity(2 * d - 1);
    for i in 0..d {
        factors.push(SparsePoly::sum_of_monomials(vars.clone(), &[unit(&[]), unit(&[i])])?);
    }
    for j in 0..d - 1 {
        factors.push(SparsePoly::sum_of_monomials(
            vars.clone(),
            &[unit(&[]), unit(&[j]), unit(&[j, j + 1])],
        )?);
    }
    Ok(poly_product(&vars, &factors)?)
}

/// The pellytope as the support of its defining product, with vertices
/// read off `Σ_d`.
pub fn build_pellytope(d: usize) -> Result<LatticePolytope, PellError> {
    let support = pellytope_polynomial(d)?.support();
    let fan = build_fan(d)?;
    Ok(LatticePolytope::from_support(d, support).with_vertices_from_fan(&fan)?)
}

/// `Σ_1 = {cone(e_1), cone(−e_1)}`; `Σ_d` is `Σ_{d−1} × Σ_1` subdivided at
/// `e_{d−1} − e_d`.
pub fn build_fan(d: usize) -> Result<SimplicialFan, PellError> {
    check_dim(d)?;
    let mut fan = SimplicialFan::line();
    for k in 2..=d {
        let rho = RayKind::Edge(k - 1).vector(k);
        fan = fan
            .product(&SimplicialFan::line())
            .stellar_refine(&rho)?
            .with_ray_order(&ray_generators(k))?;
    }
    Ok(fan)
}

/// A Laurent monomial `y^a p^b q^c` on the open Pellspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    a: IntVec,
    b: IntVec,
    c: IntVec,
}

impl Character {
    pub fn new(a: IntVec, b: IntVec, c: IntVec) -> Result<Self, PellError> {
        let d = a.len();
        if d == 0 || b.len() != d || c.len() + 1 != d {
            return Err(PellError::CharacterShape {
                a: a.len(),
                b: b.len(),
                c: c.len(),
                d,
            });
        }
        Ok(Character { a, b, c })
    }

    pub fn trivial(d: usize) -> Self {
        Character {
            a: IntVec::zeros(d),
            b: IntVec::zeros(d),
            c: IntVec::zeros(d - 1),
        }
    }

    /// From the concatenated exponent vector `(a, b, c)` of length `3d − 1`.
    pub fn from_exponents(d: usize, exps: &IntVec) -> Result<Self, PellError> {
        if exps.len() != 3 * d - 1 {
            return Err(PellError::CharacterShape {
                a: exps.len(),
                b: 0,
                c: 0,
                d,
            });
        }
        let e = exps.entries();
        Character::new(
            IntVec::new(e[..d].to_vec()),
            IntVec::new(e[d..2 * d].to_vec()),
            IntVec::new(e[2 * d..].to_vec()),
        )
    }

    pub fn from_i64s(d: usize, exps: &[i64]) -> Result<Self, PellError> {
        Character::from_exponents(d, &IntVec::from_i64s(exps))
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &IntVec {
        &self.a
    }

    pub fn b(&self) -> &IntVec {
        &self.b
    }

    pub fn c(&self) -> &IntVec {
        &self.c
    }

    pub fn exponents(&self) -> IntVec {
        self.a.concat(&self.b).concat(&self.c)
    }

    pub fn to_monomial(&self) -> Monomial {
        let d = self.dim();
        Monomial::from_int_vec(Alphabet::ypq(d), &self.exponents()).expect("small exponents")
    }

    /// Evaluates at a point `y` with `p_i = 1 + y_i`, `q_j = 1 + y_j + y_j y_{j+1}`.
    pub fn eval(&self, y: &[BigRational]) -> BigRational {
        let d = self.dim();
        assert_eq!(y.len(), d);
        let one = BigRational::from_integer(1.into());
        let mut point: Vec<BigRational> = y.to_vec();
        point.extend(y.iter().map(|t| &one + t));
        point.extend((0..d - 1).map(|j| &one + &y[j] + &y[j] * &y[j + 1]));
        self.to_monomial().eval(&point)
    }

    /// `{"a": [...], "b": [...], "c": [...]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "a": int_vec_json(&self.a),
            "b": int_vec_json(&self.b),
            "c": int_vec_json(&self.c),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, PellError> {
        let field = |k: &str| {
            int_vec_from_json(&v[k]).ok_or_else(|| PellError::Poly(PolyError::Json(format!("bad field {k}"))))
        };
        Character::new(field("a")?, field("b")?, field("c")?)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_monomial())
    }
}

/// `trop(y^a p^b q^c)(Y) = Σ a_i Y_i + Σ b_i min{0, Y_i} + Σ c_i min{0, Y_i, Y_i + Y_{i+1}}`.
pub fn trop_eval(chi: &Character, y: &RatVec) -> Result<BigRational, PellError> {
    let d = chi.dim();
    if y.len() != d {
        return Err(LinalgError::DimensionMismatch {
            expected: d,
            found: y.len(),
        }
        .into());
    }
    let zero = BigRational::zero();
    let rat = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut total = BigRational::zero();
    for i in 0..d {
        total += rat(&chi.a[i]) * &y[i];
        total += rat(&chi.b[i]) * (&y[i]).min(&zero);
    }
    for i in 0..d - 1 {
        let pair = &y[i] + &y[i + 1];
        let m = [&zero, &y[i], &pair].into_iter().min().expect("nonempty").clone();
        total += rat(&chi.c[i]) * m;
    }
    Ok(total)
}

/// `m_ij = trop(F_i)(V_j)` with `F = (y_1..y_d, p_1..p_d, q_1..q_{d−1})` and
/// `V` the ordered ray generators.
pub fn build_m(d: usize) -> Result<IntMatrix, PellError> {
    check_dim(d)?;
    let n = 3 * d - 1;
    let rays: Vec<RatVec> = ray_generators(d).iter().map(IntVec::to_rat).collect();
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        let f = Character::from_exponents(d, &IntVec::unit(n, i))?;
        for (j, v) in rays.iter().enumerate() {
            let value = trop_eval(&f, v)?;
            debug_assert!(value.is_integer());
            m.set(i, j, value.to_integer());
        }
    }
    Ok(m)
}

/// Inverse of `M_d` assembled from the closed-form rows `β_i`.
pub fn closed_form_minv(d: usize) -> Result<IntMatrix, PellError> {
    check_dim(d)?;
    let n = 3 * d - 1;
    // 1-based column helper
    let row = |entries: &[(usize, i64)]| {
        let mut r = vec![0i64; n];
        for &(col, v) in entries {
            r[col - 1] += v;
        }
        r
    };
    let mut rows = vec![Vec::new(); n];
    for i in 1..d {
        rows[i - 1] = row(&[(i, 1), (d + i + 1, 1), (2 * d + i, -1)]);
    }
    rows[d - 1] = row(&[(d, 1), (2 * d, -1)]);
    rows[d] = row(&[(d + 1, -1)]);
    for j in 2..=d {
        rows[d + j - 1] = row(&[(d + j - 1, 1), (2 * d + j - 1, -1)]);
    }
    for i in 1..d {
        rows[2 * d + i - 1] = row(&[(d + i, -1), (d + i + 1, -1), (2 * d + i, 1)]);
    }
    Ok(IntMatrix::from_rows(&rows))
}

/// The generators `u_i` written directly as monomials in `y, p, q`:
/// `u_i = y_i p_{i+1}/q_i`, `u_d = y_d/p_d`, `u_{d+1} = 1/p_1`,
/// `u_{i+d+1} = p_i/q_i`, `u_{i+2d} = q_i/(p_i p_{i+1})` for `i < d`.
pub fn generator_monomials(d: usize) -> Result<Vec<Character>, PellError> {
    check_dim(d)?;
    let n = 3 * d - 1;
    let y = |i: usize| i - 1;
    let p = |i: usize| d + i - 1;
    let q = |i: usize| 2 * d + i - 1;
    let chi = |entries: &[(usize, i64)]| {
        let mut e = vec![0i64; n];
        for &(k, v) in entries {
            e[k] += v;
        }
        Character::from_i64s(d, &e)
    };
    let mut out = vec![Character::trivial(d); n];
    for i in 1..d {
        out[i - 1] = chi(&[(y(i), 1), (p(i + 1), 1), (q(i), -1)])?;
        out[i + d] = chi(&[(p(i), 1), (q(i), -1)])?;
        out[i + 2 * d - 1] = chi(&[(q(i), 1), (p(i), -1), (p(i + 1), -1)])?;
    }
    out[d - 1] = chi(&[(y(d), 1), (p(d), -1)])?;
    out[d] = chi(&[(p(1), -1)])?;
    Ok(out)
}

/// Rows of the closed-form inverse as characters, cross-checked against
/// [`generator_monomials`].
pub fn minimal_generators(d: usize) -> Result<Vec<Character>, PellError> {
    let minv = closed_form_minv(d)?;
    let formulas = generator_monomials(d)?;
    minv.row_vectors()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let chi = Character::from_exponents(d, row)?;
            if chi != formulas[i] {
                return Err(PellError::GeneratorMismatch { index: i });
            }
            Ok(chi)
        })
        .collect()
}

/// `u_i ↦` its `(y, p, q)` monomial.
pub fn generator_map(d: usize) -> Result<MonomialMap, PellError> {
    let images = generator_monomials(d)?
        .iter()
        .map(Character::to_monomial)
        .collect();
    Ok(MonomialMap::new(
        Alphabet::indexed("u", 3 * d - 1),
        Alphabet::ypq(d),
        images,
    )?)
}

/// `y_i, p_i, q_j ↦` monomials in the `u`s, inverting [`generator_map`].
pub fn inverse_generator_map(d: usize) -> Result<MonomialMap, PellError> {
    check_dim(d)?;
    let n = 3 * d - 1;
    let us = Alphabet::indexed("u", n);
    // 1-based (index, exponent) pairs
    let mono = |entries: &[(usize, i64)]| {
        let mut e = vec![0i64; n];
        for &(k, v) in entries {
            e[k - 1] += v;
        }
        Monomial::new(us.clone(), e).expect("length n")
    };
    let mut images = Vec::with_capacity(n);
    if d == 1 {
        images.push(mono(&[(1, 1), (2, -1)]));
        images.push(mono(&[(2, -1)]));
        return Ok(MonomialMap::new(Alphabet::ypq(1), us, images)?);
    }
    // y
    images.push(mono(&[(1, 1), (1 + 2 * d, 1), (d + 1, -1)]));
    for i in 2..d {
        images.push(mono(&[(i, 1), (i + 2 * d, 1), (i - 1 + 2 * d, -1), (i + d, -1)]));
    }
    images.push(mono(&[(d, 1), (2 * d, -1), (d - 1 + 2 * d, -1)]));
    // p
    images.push(mono(&[(d + 1, -1)]));
    for i in 2..d {
        images.push(mono(&[(i + d, -1), (i - 1 + 2 * d, -1)]));
    }
    images.push(mono(&[(2 * d, -1), (3 * d - 1, -1)]));
    // q
    images.push(mono(&[(d + 2, -1), (d + 1, -1)]));
    for i in 2..d {
        images.push(mono(&[(i + d, -1), (i + d + 1, -1), (i - 1 + 2 * d, -1)]));
    }
    Ok(MonomialMap::new(Alphabet::ypq(d), us, images)?)
}

/// The u-equations of `Δ(Σ_d)`.
///
/// For `d ≥ 2` the nine cases are instantiated literally. Terms naming an
/// edge ray `e_k − e_{k+1}` with `k` outside `1..d` are dropped; at `d = 2`
/// the cases for `i = 2d + 1` and `i = 3d − 1` then coincide. For `d = 1`
/// the system is `u_1 + u_2 − 1, u_2 + u_1 − 1`.
pub fn build_u_equations(d: usize) -> Result<UEquationSystem, PellError> {
    check_dim(d)?;
    if d == 1 {
        return Ok(UEquationSystem::from_products(vec![vec![1], vec![0]])?);
    }
    #[derive(Clone, Copy)]
    enum Term {
        At(usize),
        Edge(usize),
    }
    use Term::{At, Edge};
    let mut cases: Vec<(usize, Vec<Term>)> = Vec::new();
    cases.push((1, vec![At(d + 1), At(d + 2)]));
    for i in 2..d {
        cases.push((i, vec![At(i + d), At(i + d + 1), Edge(i - 1)]));
    }
    cases.push((d, vec![Edge(d - 1), At(2 * d)]));
    cases.push((d + 1, vec![At(1), Edge(1)]));
    for j in 1..d.saturating_sub(1) {
        cases.push((j + d + 1, vec![At(j), At(j + 1), Edge(j + 1)]));
    }
    cases.push((2 * d, vec![At(d - 1), At(d)]));
    cases.push((1 + 2 * d, vec![At(d + 1), At(2), Edge(2)]));
    for j in 2..d.saturating_sub(1) {
        cases.push((j + 2 * d, vec![Edge(j - 1), At(j + d), At(j + 1), Edge(j + 1)]));
    }
    cases.push((3 * d - 1, vec![At(d), Edge(d - 2), At(2 * d - 1)]));

    let n = 3 * d - 1;
    let mut products: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, terms) in cases {
        let mut vars: Vec<usize> = terms
            .into_iter()
            .filter_map(|t| match t {
                At(k) => Some(k - 1),
                Edge(k) => RayKind::Edge(k).index(d),
            })
            .collect();
        vars.sort_unstable();
        if let Some(prev) = products.insert(i - 1, vars.clone()) {
            if prev != vars {
                return Err(PellError::ConflictingCases(i));
            }
        }
    }
    let products = (0..n)
        .map(|i| products.remove(&i).ok_or(PellError::MissingEquation(i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(UEquationSystem::from_products(products)?)
}

/// Compatibility of two rays of `Σ_d` from the coplanarity rules.
///
/// Rays among `±e_k, ±e_{k+1}, e_k − e_{k+1}` lie in one plane and are
/// compatible iff adjacent in the cyclic order
/// `e_k, e_{k+1}, −e_k, −e_{k+1}, e_k − e_{k+1}`; consecutive edge rays are
/// incompatible; every other pair is compatible.
pub fn compatibility(i: usize, j: usize, d: usize) -> bool {
    assert!(i != j && i < 3 * d - 1 && j < 3 * d - 1);
    let (a, b) = (RayKind::of_index(d, i), RayKind::of_index(d, j));
    use RayKind::{Edge, Neg, Pos};
    match (a, b) {
        (Pos(x), Neg(y)) | (Neg(y), Pos(x)) if x == y => return false,
        (Edge(x), Edge(y)) => return x.abs_diff(y) != 1,
        _ => {}
    }
    for k in 1..d {
        let plane = [Pos(k), Pos(k + 1), Neg(k), Neg(k + 1), Edge(k)];
        let (Some(pa), Some(pb)) = (
            plane.iter().position(|&r| r == a),
            plane.iter().position(|&r| r == b),
        ) else {
            continue;
        };
        let gap = pa.abs_diff(pb);
        return gap == 1 || gap == plane.len() - 1;
    }
    true
}

/// Everything derived from the pellytope in one dimension.
#[derive(Clone, Debug)]
pub struct PellModel {
    d: usize,
    fan: SimplicialFan,
    m: IntMatrix,
    minv: IntMatrix,
    generators: Vec<Character>,
    uequations: UEquationSystem,
}

impl PellModel {
    pub fn new(d: usize) -> Result<Self, PellError> {
        let fan = build_fan(d)?;
        let m = build_m(d)?;
        let minv = closed_form_minv(d)?;
        if !minv.mat_mul(&m)?.is_identity() || !m.mat_mul(&minv)?.is_identity() {
            return Err(PellError::InverseMismatch);
        }
        Ok(PellModel {
            d,
            fan,
            m,
            minv,
            generators: minimal_generators(d)?,
            uequations: build_u_equations(d)?,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of rays, generators, and u-variables: `3d − 1`.
    pub fn num_vars(&self) -> usize {
        3 * self.d - 1
    }

    pub fn fan(&self) -> &SimplicialFan {
        &self.fan
    }

    pub fn m(&self) -> &IntMatrix {
        &self.m
    }

    pub fn minv(&self) -> &IntMatrix {
        &self.minv
    }

    pub fn generators(&self) -> &[Character] {
        &self.generators
    }

    pub fn uequations(&self) -> &UEquationSystem {
        &self.uequations
    }

    /// `(a, b, c) · M_d`: the tropical values of `chi` at the ray generators.
    pub fn ray_values(&self, chi: &Character) -> Result<IntVec, PellError> {
        Ok(self.m.left_mul(&chi.exponents())?)
    }

    pub fn is_bounded(&self, chi: &Character) -> Result<bool, PellError> {
        Ok(!self.ray_values(chi)?.iter().any(Signed::is_negative))
    }

    /// Multiplicities `λ` with `chi = ∏ u_i^{λ_i}`, all nonnegative.
    pub fn factor_character(&self, chi: &Character) -> Result<IntVec, PellError> {
        let lambda = self.ray_values(chi)?;
        if lambda.iter().any(Signed::is_negative) {
            return Err(PellError::NotBounded);
        }
        Ok(lambda)
    }

    /// `∏ u_i^{λ_i}` as a character.
    pub fn character_of(&self, lambda: &IntVec) -> Result<Character, PellError> {
        Character::from_exponents(self.d, &self.minv.left_mul(lambda)?)
    }
}

/// `R_i ∘ f̃` with denominators cleared and `p, q` eliminated; zero exactly
/// when the equation holds on the Pellspace.
pub fn u_equation_residue(d: usize, system: &UEquationSystem, i: usize) -> Result<SparsePoly, PellError> {
    let map = generator_map(d)?;
    let (numerator, _) = system.polynomial(i).substitute_monomials(&map)?;
    Ok(numerator.reduce_pq(d)?)
}
