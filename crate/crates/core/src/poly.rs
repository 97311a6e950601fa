//! Sparse multivariate polynomials over ℚ, Laurent monomials, and monomial
//! maps between named alphabets.
//!
//! Polynomials only carry nonnegative exponents. Laurent behaviour lives at
//! the boundary: [`Monomial`] may have negative exponents, and
//! [`SparsePoly::substitute_monomials`] returns a numerator polynomial
//! together with a denominator monomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{rat_string, IntVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("negative exponent on {var}; clear denominators first")]
    NegativeExponent { var: String },
    #[error("exponent vector has length {found}, alphabet has {expected} variables")]
    BadExponentLength { expected: usize, found: usize },
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
}

/// Ordered list of variable names, cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[String]>);

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Alphabet(names.into_iter().map(Into::into).collect())
    }

    /// `prefix1, …, prefixN`.
    pub fn indexed(prefix: &str, n: usize) -> Self {
        Alphabet::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    /// The `(y, p, q)` alphabet of dimension `d`: `y1..yd, p1..pd, q1..q(d-1)`.
    pub fn ypq(d: usize) -> Self {
        let y = (1..=d).map(|i| format!("y{i}"));
        let p = (1..=d).map(|i| format!("p{i}"));
        let q = (1..d).map(|i| format!("q{i}"));
        Alphabet::new(y.chain(p).chain(q))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    fn check_same(&self, other: &Alphabet) -> Result<(), PolyError> {
        if self == other {
            Ok(())
        } else {
            Err(PolyError::AlphabetMismatch {
                left: self.0.to_vec(),
                right: other.0.to_vec(),
            })
        }
    }
}

/// Exponent vector with graded lexicographic order (total degree first,
/// then lexicographic).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<i64>);

impl Exponent {
    pub fn new(exps: Vec<i64>) -> Self {
        Exponent(exps)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Laurent monomial `x^e` over an alphabet, exponents of any sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    vars: Alphabet,
    exps: Vec<i64>,
}

impl Monomial {
    pub fn new(vars: Alphabet, exps: Vec<i64>) -> Result<Self, PolyError> {
        if exps.len() != vars.len() {
            return Err(PolyError::BadExponentLength {
                expected: vars.len(),
                found: exps.len(),
            });
        }
        Ok(Monomial { vars, exps })
    }

    pub fn one(vars: Alphabet) -> Self {
        let n = vars.len();
        Monomial {
            vars,
            exps: vec![0; n],
        }
    }

    pub fn var(vars: Alphabet, index: usize) -> Self {
        let mut m = Monomial::one(vars);
        m.exps[index] = 1;
        m
    }

    pub fn from_int_vec(vars: Alphabet, exps: &IntVec) -> Result<Self, PolyError> {
        let small = exps
            .to_i64s()
            .ok_or_else(|| PolyError::Json("exponent out of range".into()))?;
        Monomial::new(vars, small)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.vars
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exps
    }

    pub fn to_int_vec(&self) -> IntVec {
        IntVec::from_i64s(&self.exps)
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        self.vars.check_same(&other.vars)?;
        Ok(Monomial {
            vars: self.vars.clone(),
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial {
            vars: self.vars.clone(),
            exps: self.exps.iter().map(|e| e * k).collect(),
        }
    }

    pub fn inverse(&self) -> Monomial {
        self.pow(-1)
    }

    /// Evaluates at a point with nonzero coordinates wherever the exponent is negative.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.exps.len());
        self.exps
            .iter()
            .zip(point)
            .fold(BigRational::one(), |acc, (&e, x)| acc * rat_pow(x, e))
    }

    /// Splits into (positive part, negative part as a positive monomial).
    pub fn numerator_denominator(&self) -> (Monomial, Monomial) {
        let num = self.exps.iter().map(|&e| e.max(0)).collect();
        let den = self.exps.iter().map(|&e| (-e).max(0)).collect();
        (
            Monomial {
                vars: self.vars.clone(),
                exps: num,
            },
            Monomial {
                vars: self.vars.clone(),
                exps: den,
            },
        )
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.numerator_denominator();
        let num_s = power_product(&self.vars, &num.exps);
        let den_s = power_product(&self.vars, &den.exps);
        match (num_s.is_empty(), den_s.is_empty()) {
            (true, true) => write!(f, "1"),
            (false, true) => write!(f, "{num_s}"),
            (true, false) => write!(f, "1/({den_s})"),
            (false, false) => write!(f, "{num_s}/({den_s})"),
        }
    }
}

fn power_product(vars: &Alphabet, exps: &[i64]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| {
            if e == 1 {
                vars.names()[i].clone()
            } else {
                format!("{}^{}", vars.names()[i], e)
            }
        })
        .collect();
    parts.join("*")
}

pub(crate) fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Sparse polynomial with rational coefficients and nonnegative exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Alphabet,
    terms: BTreeMap<Exponent, BigRational>,
}

impl SparsePoly {
    pub fn zero(vars: Alphabet) -> Self {
        SparsePoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Alphabet, c: BigRational) -> Self {
        let n = vars.len();
        let mut p = SparsePoly::zero(vars);
        p.add_term(Exponent::zero(n), c);
        p
    }

    pub fn one(vars: Alphabet) -> Self {
        SparsePoly::constant(vars, BigRational::one())
    }

    pub fn var(vars: Alphabet, index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        let mut p = SparsePoly::zero(vars);
        p.add_term(Exponent(e), BigRational::one());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, collecting like terms.
    pub fn from_terms(
        vars: Alphabet,
        terms: impl IntoIterator<Item = (Vec<i64>, BigRational)>,
    ) -> Result<Self, PolyError> {
        let mut p = SparsePoly::zero(vars);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(PolyError::BadExponentLength {
                    expected: p.vars.len(),
                    found: e.len(),
                });
            }
            if let Some(i) = e.iter().position(|&x| x < 0) {
                return Err(PolyError::NegativeExponent {
                    var: p.vars.names()[i].clone(),
                });
            }
            p.add_term(Exponent(e), c);
        }
        Ok(p)
    }

    /// `1 + m_1 + m_2 + …` style helper: sum of monomials with coefficient 1.
    pub fn sum_of_monomials(vars: Alphabet, exps: &[Vec<i64>]) -> Result<Self, PolyError> {
        SparsePoly::from_terms(vars, exps.iter().map(|e| (e.clone(), BigRational::one())))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, exps: &[i64]) -> BigRational {
        self.terms
            .get(&Exponent(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exponent vectors of the nonzero terms (the Newton polytope support).
    pub fn support(&self) -> Vec<IntVec> {
        self.terms.keys().map(|e| IntVec::from_i64s(&e.0)).collect()
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.vars.check_same(&other.vars)?;
        let mut out = SparsePoly::zero(self.vars.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<SparsePoly, PolyError> {
        self.vars.check_same(&m.vars)?;
        let shift = Exponent(m.exps.clone());
        let mut out = SparsePoly::zero(self.vars.clone());
        for (e, c) in &self.terms {
            let shifted = e.add(&shift);
            if let Some(i) = shifted.0.iter().position(|&x| x < 0) {
                return Err(PolyError::NegativeExponent {
                    var: self.vars.names()[i].clone(),
                });
            }
            out.add_term(shifted, c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.vars.clone());
        for _ in 0..k {
            acc = acc.mul(self).expect("same alphabet");
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars.len());
        self.terms
            .iter()
            .map(|(e, c)| c * rat_pow_product(point, &e.0))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Ring homomorphism `x_i ↦ images[i]`, all images over `target`.
    pub fn substitute_polys(
        &self,
        images: &[SparsePoly],
        target: &Alphabet,
    ) -> Result<SparsePoly, PolyError> {
        if images.len() != self.vars.len() {
            return Err(PolyError::BadExponentLength {
                expected: self.vars.len(),
                found: images.len(),
            });
        }
        for img in images {
            target.check_same(&img.vars)?;
        }
        let mut power_cache: BTreeMap<(usize, i64), SparsePoly> = BTreeMap::new();
        let mut out = SparsePoly::zero(target.clone());
        for (e, c) in &self.terms {
            let mut term = SparsePoly::constant(target.clone(), c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let power = power_cache
                    .entry((i, k))
                    .or_insert_with(|| images[i].pow(k as u32));
                term = term.mul(power)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Pushes a polynomial through a monomial map and clears denominators.
    ///
    /// Returns `(numerator, denominator)` with `self ∘ φ = numerator / denominator`,
    /// where the denominator is the smallest monomial that makes every term
    /// polynomial.
    pub fn substitute_monomials(
        &self,
        map: &MonomialMap,
    ) -> Result<(SparsePoly, Monomial), PolyError> {
        self.vars.check_same(&map.source)?;
        let n = map.target.len();
        let images: Vec<(Vec<i64>, BigRational)> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut exps = vec![0i64; n];
                for (i, &k) in e.0.iter().enumerate() {
                    if k != 0 {
                        for (slot, img) in exps.iter_mut().zip(&map.images[i].exps) {
                            *slot += k * img;
                        }
                    }
                }
                (exps, c.clone())
            })
            .collect();
        let mut shift = vec![0i64; n];
        for (exps, _) in &images {
            for (s, &x) in shift.iter_mut().zip(exps) {
                *s = (*s).min(x);
            }
        }
        let numerator = SparsePoly::from_terms(
            map.target.clone(),
            images.into_iter().map(|(exps, c)| {
                (
                    exps.iter().zip(&shift).map(|(x, s)| x - s).collect(),
                    c,
                )
            }),
        )?;
        let denominator = Monomial {
            vars: map.target.clone(),
            exps: shift.iter().map(|s| -s).collect(),
        };
        Ok((numerator, denominator))
    }

    /// Eliminates `p_i` and `q_j` from a polynomial over [`Alphabet::ypq`],
    /// returning its canonical representative over `y1..yd`.
    pub fn reduce_pq(&self, d: usize) -> Result<SparsePoly, PolyError> {
        self.vars.check_same(&Alphabet::ypq(d))?;
        if let Some((e, _)) = self.terms.iter().find(|(e, _)| e.0.iter().any(|&x| x < 0)) {
            let i = e.0.iter().position(|&x| x < 0).unwrap_or_default();
            return Err(PolyError::NegativeExponent {
                var: self.vars.names()[i].clone(),
            });
        }
        let ypq = self.vars.clone();
        // q_j first, into an alphabet that still carries y and p
        let q_images: Vec<SparsePoly> = (0..ypq.len())
            .map(|v| {
                if v >= 2 * d {
                    let j = v - 2 * d;
                    pq_definition(&ypq, d, Symbol::Q(j))
                } else {
                    SparsePoly::var(ypq.clone(), v)
                }
            })
            .collect();
        let without_q = self.substitute_polys(&q_images, &ypq)?;
        let ys = Alphabet::indexed("y", d);
        let p_images: Vec<SparsePoly> = (0..ypq.len())
            .map(|v| {
                if v < d {
                    SparsePoly::var(ys.clone(), v)
                } else if v < 2 * d {
                    pq_definition(&ys, d, Symbol::P(v - d))
                } else {
                    // no q left after the first pass
                    SparsePoly::zero(ys.clone())
                }
            })
            .collect();
        without_q.substitute_polys(&p_images, &ys)
    }

    /// Multivariate division by a single divisor in graded lex order.
    /// Returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &SparsePoly) -> Result<(SparsePoly, SparsePoly), PolyError> {
        self.vars.check_same(&divisor.vars)?;
        let (lead_e, lead_c) = divisor
            .terms
            .iter()
            .next_back()
            .map(|(e, c)| (e.clone(), c.clone()))
            .expect("division by the zero polynomial");
        let mut quotient = SparsePoly::zero(self.vars.clone());
        let mut remainder = SparsePoly::zero(self.vars.clone());
        let mut work = self.clone();
        while let Some((e, c)) = work.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if lead_e.divides(&e) {
                let qe = e.sub(&lead_e);
                let qc = &c / &lead_c;
                quotient.add_term(qe.clone(), qc.clone());
                let mut step = SparsePoly::zero(self.vars.clone());
                for (de, dc) in &divisor.terms {
                    step.add_term(de.add(&qe), dc * &qc);
                }
                work = work.sub(&step)?;
            } else {
                work.terms.remove(&e);
                remainder.add_term(e, c);
            }
        }
        Ok((quotient, remainder))
    }

    /// `{"vars": [...], "terms": [{"exp": [...], "coeff": "num/den"}]}`, terms in
    /// descending graded lexicographic order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(e, c)| json!({"exp": e.0, "coeff": rat_string(c)}))
            .collect();
        json!({"vars": self.vars.names(), "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<SparsePoly, PolyError> {
        let bad = |m: &str| PolyError::Json(m.to_string());
        let vars = v["vars"]
            .as_array()
            .ok_or_else(|| bad("missing vars"))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("var not a string")))
            .collect::<Result<Vec<_>, _>>()?;
        let terms = v["terms"].as_array().ok_or_else(|| bad("missing terms"))?;
        let parsed = terms
            .iter()
            .map(|t| {
                let exp = t["exp"]
                    .as_array()
                    .ok_or_else(|| bad("missing exp"))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad("exponent not an integer")))
                    .collect::<Result<Vec<_>, _>>()?;
                let coeff = t["coeff"].as_str().ok_or_else(|| bad("coeff not a string"))?;
                let coeff = parse_rat(coeff).ok_or_else(|| bad("bad rational"))?;
                Ok((exp, coeff))
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        SparsePoly::from_terms(Alphabet::new(vars), parsed)
    }
}

fn rat_pow_product(point: &[BigRational], exps: &[i64]) -> BigRational {
    exps.iter()
        .zip(point)
        .filter(|(&e, _)| e != 0)
        .fold(BigRational::one(), |acc, (&e, x)| acc * rat_pow(x, e))
}

/// Parses `num/den` or a bare integer.
pub fn parse_rat(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s.trim().parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

enum Symbol {
    P(usize),
    Q(usize),
}

/// `p_i = 1 + y_i` or `q_j = 1 + y_j + y_j y_{j+1}` over an alphabet whose
/// first `d` variables are the `y`s.
fn pq_definition(vars: &Alphabet, d: usize, sym: Symbol) -> SparsePoly {
    let n = vars.len();
    let unit = |idx: &[usize]| {
        let mut e = vec![0i64; n];
        for &i in idx {
            e[i] += 1;
        }
        e
    };
    let exps = match sym {
        Symbol::P(i) => vec![unit(&[]), unit(&[i])],
        Symbol::Q(j) => {
            debug_assert!(j + 1 < d);
            vec![unit(&[]), unit(&[j]), unit(&[j, j + 1])]
        }
    };
    SparsePoly::sum_of_monomials(vars.clone(), &exps).expect("valid exponents")
}

/// Product of a list of polynomials over a shared alphabet. The empty
/// product is the constant 1.
pub fn poly_product(vars: &Alphabet, factors: &[SparsePoly]) -> Result<SparsePoly, PolyError> {
    factors
        .iter()
        .try_fold(SparsePoly::one(vars.clone()), |acc, f| acc.mul(f))
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().enumerate() {
            let mono = power_product(&self.vars, &e.0);
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{abs}*{mono}")?,
            }
        }
        Ok(())
    }
}

/// Sends each source variable to a Laurent monomial over the target alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    source: Alphabet,
    target: Alphabet,
    images: Vec<Monomial>,
}

impl MonomialMap {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Monomial>) -> Result<Self, PolyError> {
        if images.len() != source.len() {
            return Err(PolyError::BadExponentLength {
                expected: source.len(),
                found: images.len(),
            });
        }
        for m in &images {
            target.check_same(&m.vars)?;
        }
        Ok(MonomialMap {
            source,
            target,
            images,
        })
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn images(&self) -> &[Monomial] {
        &self.images
    }

    /// Image of a Laurent monomial over the source alphabet.
    pub fn apply(&self, m: &Monomial) -> Result<Monomial, PolyError> {
        self.source.check_same(&m.vars)?;
        let mut out = Monomial::one(self.target.clone());
        for (img, &k) in self.images.iter().zip(&m.exps) {
            if k != 0 {
                out = out.mul(&img.pow(k))?;
            }
        }
        Ok(out)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &MonomialMap) -> Result<MonomialMap, PolyError> {
        let images = self
            .images
            .iter()
            .map(|m| next.apply(m))
            .collect::<Result<Vec<_>, _>>()?;
        MonomialMap::new(self.source.clone(), next.target.clone(), images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn y2() -> Alphabet {
        Alphabet::indexed("y", 2)
    }

    fn lin(vars: &Alphabet, terms: &[(&[i64], i64)]) -> SparsePoly {
        SparsePoly::from_terms(vars.clone(), terms.iter().map(|(e, c)| (e.to_vec(), r(*c)))).unwrap()
    }

    #[test]
    fn pellytope_product_in_two_variables() {
        let v = y2();
        let factors = [
            lin(&v, &[(&[0, 0], 1), (&[1, 0], 1)]),
            lin(&v, &[(&[0, 0], 1), (&[0, 1], 1)]),
            lin(&v, &[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1)]),
        ];
        let p = poly_product(&v, &factors).unwrap();
        // frozen from an independent symbolic expansion
        let expected = lin(
            &v,
            &[
                (&[2, 2], 1),
                (&[2, 1], 2),
                (&[2, 0], 1),
                (&[1, 2], 1),
                (&[1, 1], 3),
                (&[1, 0], 2),
                (&[0, 1], 1),
                (&[0, 0], 1),
            ],
        );
        assert_eq!(p, expected);
        assert_eq!(p.num_terms(), 8);
    }

    #[test]
    fn empty_product_is_one() {
        let v = y2();
        assert_eq!(poly_product(&v, &[]).unwrap(), SparsePoly::one(v));
    }

    #[test]
    fn difference_of_squares() {
        let v = Alphabet::indexed("y", 1);
        let a = lin(&v, &[(&[0], 1), (&[1], 1)]);
        let b = lin(&v, &[(&[0], 1), (&[1], -1)]);
        assert_eq!(a.mul(&b).unwrap(), lin(&v, &[(&[0], 1), (&[2], -1)]));
    }

    #[test]
    fn alphabet_mismatch() {
        let a = SparsePoly::one(y2());
        let b = SparsePoly::one(Alphabet::indexed("x", 2));
        assert!(matches!(a.mul(&b), Err(PolyError::AlphabetMismatch { .. })));
        assert!(poly_product(&y2(), &[b]).is_err());
    }

    #[test]
    fn reduce_pq_examples() {
        let v = Alphabet::ypq(3);
        // p1 - 1 - y1
        let p = lin(&v, &[(&[0, 0, 0, 1, 0, 0, 0, 0], 1), (&[0; 8], -1), (&[1, 0, 0, 0, 0, 0, 0, 0], -1)]);
        assert!(p.reduce_pq(3).unwrap().is_zero());
        // q1 - y1 p2 - 1
        let q = lin(
            &v,
            &[
                (&[0, 0, 0, 0, 0, 0, 1, 0], 1),
                (&[1, 0, 0, 0, 1, 0, 0, 0], -1),
                (&[0; 8], -1),
            ],
        );
        assert!(q.reduce_pq(3).unwrap().is_zero());
        // y3 stays y3
        let y3 = SparsePoly::var(v.clone(), 2);
        assert_eq!(
            y3.reduce_pq(3).unwrap(),
            SparsePoly::var(Alphabet::indexed("y", 3), 2)
        );
        assert!(SparsePoly::zero(v.clone()).reduce_pq(3).unwrap().is_zero());
    }

    #[test]
    fn reduce_pq_rejects_wrong_alphabet() {
        assert!(SparsePoly::one(y2()).reduce_pq(2).is_err());
    }

    #[test]
    fn zero_identity() {
        let v = y2();
        assert!(SparsePoly::zero(v.clone()).is_zero());
        let y1 = SparsePoly::var(v.clone(), 0);
        assert!(y1.sub(&y1).unwrap().is_zero());
        assert!(!y1.is_zero());
    }

    #[test]
    fn substitution_of_constant() {
        let u = Alphabet::indexed("u", 2);
        let t = Alphabet::indexed("y", 1);
        let map = MonomialMap::new(
            u.clone(),
            t.clone(),
            vec![Monomial::var(t.clone(), 0), Monomial::var(t.clone(), 0).inverse()],
        )
        .unwrap();
        let (num, den) = SparsePoly::one(u.clone()).substitute_monomials(&map).unwrap();
        assert_eq!(num, SparsePoly::one(t.clone()));
        assert!(den.is_one());
        // u1 + u2 = y + 1/y = (y^2 + 1)/y
        let p = SparsePoly::var(u.clone(), 0).add(&SparsePoly::var(u, 1)).unwrap();
        let (num, den) = p.substitute_monomials(&map).unwrap();
        assert_eq!(num, lin(&t, &[(&[2], 1), (&[0], 1)]));
        assert_eq!(den.exponents(), &[1]);
    }

    #[test]
    fn division() {
        let v = y2();
        let a = lin(&v, &[(&[0, 0], 1), (&[1, 0], 1)]);
        let b = lin(&v, &[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1)]);
        let prod = a.mul(&b).unwrap();
        let (q, rem) = prod.div_rem(&b).unwrap();
        assert_eq!(q, a);
        assert!(rem.is_zero());
        let (_, rem) = b.div_rem(&a).unwrap();
        assert!(!rem.is_zero());
    }

    #[test]
    fn json_round_trip_and_display() {
        let v = y2();
        let p = lin(&v, &[(&[0, 0], -1), (&[1, 1], 3), (&[0, 1], 1)]);
        let j = p.to_json();
        assert_eq!(j["terms"][0]["exp"], json!([1, 1]));
        assert_eq!(j["terms"][0]["coeff"], json!("3/1"));
        assert_eq!(SparsePoly::from_json(&j).unwrap(), p);
        assert_eq!(p.to_string(), "3*y1*y2 + y2 - 1");
    }

    #[test]
    fn monomial_display() {
        let v = Alphabet::ypq(2);
        let m = Monomial::new(v, vec![1, 0, 0, 1, -1]).unwrap();
        assert_eq!(m.to_string(), "y1*p2/(q1)");
    }

    fn small_poly() -> impl Strategy<Value = SparsePoly> {
        proptest::collection::vec(((0i64..3, 0i64..3), -3i64..4), 0..5).prop_map(|terms| {
            SparsePoly::from_terms(
                y2(),
                terms.into_iter().map(|((a, b), c)| (vec![a, b], r(c))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_commutes_and_associates(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn division_recovers_factor(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            let (q, rem) = a.mul(&b).unwrap().div_rem(&b).unwrap();
            prop_assert!(rem.is_zero());
            prop_assert_eq!(q, a);
        }

        #[test]
        fn json_round_trip(a in small_poly()) {
            prop_assert_eq!(SparsePoly::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
