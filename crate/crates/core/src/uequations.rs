//! Systems of u-equations `R_i = u_i + ∏_{j ≁ i} u_j^{a_ij} − 1`.
//!
//! Variables are indexed from 0 internally. Text and JSON output use the
//! conventional 1-based labels `u1, u2, …`.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::rank;
use crate::poly::{rat_pow, Alphabet, SparsePoly};
use crate::polyhedra::FlagComplex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UEquationError {
    #[error("u_{i} appears in R_{j} but u_{j} does not appear in R_{i}")]
    Asymmetric { i: usize, j: usize },
    #[error("exponent of u_{j} in R_{i} must be positive")]
    NonPositiveExponent { i: usize, j: usize },
    #[error("equation {i} refers to variable {j}, out of range")]
    BadIndex { i: usize, j: usize },
    #[error("u_{0} appears in its own product")]
    SelfReference(usize),
    #[error("point has {found} coordinates, system has {expected} variables")]
    PointLength { expected: usize, found: usize },
    #[error("malformed u-equation JSON: {0}")]
    Json(String),
}

/// One factor `u_j^a` of a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub var: usize,
    pub exp: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UEquationSystem {
    products: Vec<Vec<Factor>>,
}

impl UEquationSystem {
    /// Checks positivity of exponents and symmetry of the incompatibility
    /// relation. Products are sorted by variable.
    pub fn new(products: Vec<Vec<Factor>>) -> Result<Self, UEquationError> {
        let n = products.len();
        let mut sorted = products;
        for (i, prod) in sorted.iter_mut().enumerate() {
            prod.sort();
            for f in prod.iter() {
                if f.var >= n {
                    return Err(UEquationError::BadIndex { i, j: f.var });
                }
                if f.var == i {
                    return Err(UEquationError::SelfReference(i));
                }
                if f.exp == 0 {
                    return Err(UEquationError::NonPositiveExponent { i, j: f.var });
                }
            }
        }
        let system = UEquationSystem { products: sorted };
        for i in 0..n {
            for f in &system.products[i] {
                if !system.involves(f.var, i) {
                    return Err(UEquationError::Asymmetric { i, j: f.var });
                }
            }
        }
        Ok(system)
    }

    /// All exponents 1.
    pub fn from_products(products: Vec<Vec<usize>>) -> Result<Self, UEquationError> {
        UEquationSystem::new(
            products
                .into_iter()
                .map(|p| p.into_iter().map(|var| Factor { var, exp: 1 }).collect())
                .collect(),
        )
    }

    pub fn empty() -> Self {
        UEquationSystem {
            products: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn product(&self, i: usize) -> &[Factor] {
        &self.products[i]
    }

    pub fn products(&self) -> &[Vec<Factor>] {
        &self.products
    }

    /// Whether `u_j` appears in `R_i`'s product.
    pub fn involves(&self, i: usize, j: usize) -> bool {
        self.products[i].iter().any(|f| f.var == j)
    }

    pub fn non_edges(&self) -> BTreeSet<(usize, usize)> {
        self.products
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.iter().map(move |f| (i.min(f.var), i.max(f.var))))
            .collect()
    }

    pub fn flag_complex(&self) -> FlagComplex {
        FlagComplex::new(self.len(), self.non_edges())
    }

    /// Disjoint union; `other`'s variables are shifted past `self`'s.
    pub fn product_with(&self, other: &UEquationSystem) -> UEquationSystem {
        let shift = self.len();
        let mut products = self.products.clone();
        products.extend(other.products.iter().map(|p| {
            p.iter()
                .map(|f| Factor {
                    var: f.var + shift,
                    exp: f.exp,
                })
                .collect()
        }));
        UEquationSystem { products }
    }

    /// Renames variable `k` to `perm[k]`.
    pub fn relabel(&self, perm: &[usize]) -> UEquationSystem {
        let mut products = vec![Vec::new(); self.len()];
        for (i, p) in self.products.iter().enumerate() {
            let mut mapped: Vec<Factor> = p
                .iter()
                .map(|f| Factor {
                    var: perm[f.var],
                    exp: f.exp,
                })
                .collect();
            mapped.sort();
            products[perm[i]] = mapped;
        }
        UEquationSystem { products }
    }

    fn check_point(&self, point: &[BigRational]) -> Result<(), UEquationError> {
        if point.len() != self.len() {
            return Err(UEquationError::PointLength {
                expected: self.len(),
                found: point.len(),
            });
        }
        Ok(())
    }

    fn monomial_value(&self, i: usize, point: &[BigRational]) -> BigRational {
        self.products[i]
            .iter()
            .fold(BigRational::one(), |acc, f| acc * rat_pow(&point[f.var], f.exp as i64))
    }

    /// `R_i` evaluated at every equation.
    pub fn residues(&self, point: &[BigRational]) -> Result<Vec<BigRational>, UEquationError> {
        self.check_point(point)?;
        Ok((0..self.len())
            .map(|i| &point[i] + self.monomial_value(i, point) - BigRational::one())
            .collect())
    }

    pub fn is_solution(&self, point: &[BigRational]) -> Result<bool, UEquationError> {
        Ok(self.residues(point)?.iter().all(Zero::is_zero))
    }

    /// Jacobian `∂R_i/∂u_j` at a point.
    pub fn jacobian(&self, point: &[BigRational]) -> Result<Vec<Vec<BigRational>>, UEquationError> {
        self.check_point(point)?;
        let n = self.len();
        let mut jac = vec![vec![BigRational::zero(); n]; n];
        for (i, row) in jac.iter_mut().enumerate() {
            row[i] = BigRational::one();
            for f in &self.products[i] {
                let others = self.products[i]
                    .iter()
                    .filter(|g| g.var != f.var)
                    .fold(BigRational::one(), |acc, g| acc * rat_pow(&point[g.var], g.exp as i64));
                let derivative = BigRational::from_integer(f.exp.into())
                    * rat_pow(&point[f.var], f.exp as i64 - 1)
                    * others;
                row[f.var] = &row[f.var] + derivative;
            }
        }
        Ok(jac)
    }

    pub fn jacobian_rank(&self, point: &[BigRational]) -> Result<usize, UEquationError> {
        Ok(rank(&self.jacobian(point)?))
    }

    /// `R_i` as a polynomial over `u1..un`.
    pub fn polynomial(&self, i: usize) -> SparsePoly {
        let vars = Alphabet::indexed("u", self.len());
        let mut lin = vec![0i64; self.len()];
        lin[i] = 1;
        let mut prod = vec![0i64; self.len()];
        for f in &self.products[i] {
            prod[f.var] += f.exp as i64;
        }
        SparsePoly::from_terms(
            vars.clone(),
            [
                (lin, BigRational::one()),
                (prod, BigRational::one()),
                (vec![0; self.len()], -BigRational::one()),
            ],
        )
        .expect("nonnegative exponents")
    }

    /// `{"equations": [{"i": idx, "product": [{"j": idx, "a": exp}]}]}` with
    /// 1-based indices. Callers add their own context keys.
    pub fn to_json(&self) -> Value {
        let eqs: Vec<Value> = self
            .products
            .iter()
            .enumerate()
            .map(|(i, p)| {
                json!({
                    "i": i + 1,
                    "product": p.iter().map(|f| json!({"j": f.var + 1, "a": f.exp})).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "equations": eqs })
    }

    pub fn from_json(v: &Value) -> Result<Self, UEquationError> {
        let bad = |m: &str| UEquationError::Json(m.to_string());
        let eqs = v["equations"].as_array().ok_or_else(|| bad("missing equations"))?;
        let mut products = vec![Vec::new(); eqs.len()];
        for e in eqs {
            let i = e["i"].as_u64().ok_or_else(|| bad("missing i"))? as usize;
            if i == 0 || i > eqs.len() {
                return Err(bad("equation index out of range"));
            }
            let factors = e["product"]
                .as_array()
                .ok_or_else(|| bad("missing product"))?
                .iter()
                .map(|f| {
                    let j = f["j"].as_u64().ok_or_else(|| bad("missing j"))? as usize;
                    let a = f["a"].as_u64().ok_or_else(|| bad("missing a"))? as u32;
                    if j == 0 {
                        return Err(bad("index 0"));
                    }
                    Ok(Factor { var: j - 1, exp: a })
                })
                .collect::<Result<Vec<_>, _>>()?;
            products[i - 1] = factors;
        }
        UEquationSystem::new(products)
    }
}

impl fmt::Display for UEquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.products.iter().enumerate() {
            let prod: Vec<String> = p
                .iter()
                .map(|g| {
                    if g.exp == 1 {
                        format!("u{}", g.var + 1)
                    } else {
                        format!("u{}^{}", g.var + 1, g.exp)
                    }
                })
                .collect();
            let prod = if prod.is_empty() { "1".to_string() } else { prod.join("*") };
            writeln!(f, "u{} + {} - 1", i + 1, prod)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn line() -> UEquationSystem {
        UEquationSystem::from_products(vec![vec![1], vec![0]]).unwrap()
    }

    #[test]
    fn asymmetric_system_rejected() {
        assert_eq!(
            UEquationSystem::from_products(vec![vec![1], vec![]]),
            Err(UEquationError::Asymmetric { i: 0, j: 1 })
        );
        assert!(UEquationSystem::from_products(vec![vec![0]]).is_err());
    }

    #[test]
    fn line_system_residues_and_rank() {
        let s = line();
        let half = vec![r(1, 2), r(1, 2)];
        assert!(s.is_solution(&half).unwrap());
        assert_eq!(s.jacobian_rank(&half).unwrap(), 1);
        assert_eq!(s.residues(&[r(0, 1), r(0, 1)]).unwrap(), vec![r(-1, 1), r(-1, 1)]);
    }

    #[test]
    fn product_of_lines() {
        let sq = line().product_with(&line());
        assert_eq!(
            sq,
            UEquationSystem::from_products(vec![vec![1], vec![0], vec![3], vec![2]]).unwrap()
        );
        assert_eq!(line().product_with(&UEquationSystem::empty()), line());
        assert_eq!(sq.to_string(), "u1 + u2 - 1\nu2 + u1 - 1\nu3 + u4 - 1\nu4 + u3 - 1\n");
    }

    #[test]
    fn json_round_trip() {
        let sq = line().product_with(&line());
        let j = sq.to_json();
        assert_eq!(j["equations"][2], json!({"i": 3, "product": [{"j": 4, "a": 1}]}));
        assert_eq!(UEquationSystem::from_json(&j).unwrap(), sq);
    }

    #[test]
    fn polynomial_form() {
        assert_eq!(line().polynomial(0).to_string(), "u1 + u2 - 1");
    }
}
