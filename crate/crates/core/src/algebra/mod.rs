//! Perron-Frobenius data of substitution matrices and integer linear algebra.

pub mod field;
pub mod matrix;
pub mod poly;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

pub use field::{is_pisot, AlgebraicReal, NumberField, NumberFieldElement};
pub use matrix::{eventual_rank, IntMatrix, RankField};
pub use poly::PolynomialQ;

use crate::error::{Error, Precondition, Result};
use crate::subst::{Substitution, Symbol};

/// Dilation and tile lengths of a primitive substitution matrix.
#[derive(Clone, Debug)]
pub struct PerronData {
    pub lambda: AlgebraicReal,
    pub degree: usize,
    /// Absolute value of the field norm.
    pub norm: BigInt,
    /// Field norm with sign, `(-1)^d` times the constant coefficient.
    pub signed_norm: BigInt,
    pub determinant: BigInt,
    pub unimodular: bool,
    pub pisot: bool,
    pub irreducible_charpoly: bool,
    pub charpoly: PolynomialQ,
    pub lengths: Vec<NumberFieldElement>,
    pub field: NumberField,
}

impl PerronData {
    pub fn lambda_f64(&self) -> f64 {
        self.field.generator_f64()
    }

    pub fn minimal_polynomial_ints(&self) -> Vec<BigInt> {
        self.lambda
            .minimal_polynomial()
            .integer_coeffs()
            .expect("minimal polynomial has integer coefficients")
    }

    pub fn lengths_f64(&self) -> Vec<f64> {
        self.lengths.iter().map(|w| self.field.to_f64(w)).collect()
    }

    pub fn norm_is_odd(&self) -> bool {
        self.norm.is_odd()
    }

    pub fn to_json(&self) -> Value {
        let ints: Vec<String> = self
            .minimal_polynomial_ints()
            .iter()
            .map(|c| c.to_string())
            .collect();
        let (lo, hi) = self.lambda.interval();
        json!({
            "minimal_polynomial": ints.iter().map(|s| s.parse::<i64>().map(Value::from).unwrap_or(Value::from(s.clone()))).collect::<Vec<_>>(),
            "minimal_polynomial_text": self.lambda.minimal_polynomial().to_string(),
            "lambda_approx": self.lambda_f64(),
            "isolating_interval": [lo.to_string(), hi.to_string()],
            "degree": self.degree,
            "norm": self.norm.to_string(),
            "signed_norm": self.signed_norm.to_string(),
            "determinant": self.determinant.to_string(),
            "unimodular": self.unimodular,
            "pisot": self.pisot,
            "irreducible_charpoly": self.irreducible_charpoly,
            "charpoly": self.charpoly.to_string(),
            "lengths": self.lengths.iter().map(|w| w.coord_strings()).collect::<Vec<_>>(),
            "lengths_approx": self.lengths_f64(),
        })
    }
}

fn primitive_matrix(m: &IntMatrix) -> bool {
    let n = m.nrows();
    if n == 0 || !m.is_square() {
        return false;
    }
    let bound = (n - 1) * (n - 1) + 1;
    let pattern = IntMatrix::from_rows(
        m.rows()
            .iter()
            .map(|r| r.iter().map(|x| BigInt::from(u8::from(!x.is_zero()))).collect())
            .collect(),
    );
    let mut p = pattern.clone();
    for _ in 0..bound {
        if p.is_positive() {
            return true;
        }
        p = p.mul(&pattern);
        // keep entries boolean
        p = IntMatrix::from_rows(
            p.rows()
                .iter()
                .map(|r| r.iter().map(|x| BigInt::from(u8::from(!x.is_zero()))).collect())
                .collect(),
        );
    }
    p.is_positive()
}

/// Exact Perron-Frobenius data of a primitive nonnegative matrix.
pub fn perron_data(m: &IntMatrix) -> Result<PerronData> {
    if !primitive_matrix(m) {
        return Err(Precondition::NotPrimitive("matrix".into()).into());
    }
    let charpoly = m.charpoly();
    let sf = charpoly.squarefree();
    let (lo, hi) = field::isolate_largest_real_root(&sf)
        .ok_or_else(|| Error::Internal("primitive matrix without real eigenvalue".into()))?;
    let minpoly = field::minimal_polynomial_of_root(&sf, &lo, &hi)?;
    let degree = minpoly.degree().unwrap_or(0);
    let lambda = if degree == 1 {
        let r = -minpoly.coeff(0);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        AlgebraicReal::new(minpoly.clone(), &r - &half, &r + half)?
    } else {
        AlgebraicReal::new(minpoly.clone(), lo, hi)?
    };
    let ints = minpoly
        .integer_coeffs()
        .ok_or_else(|| Error::Internal(format!("non-integral minimal polynomial {minpoly}")))?;
    let c0 = ints[0].clone();
    let signed_norm = if degree % 2 == 0 { c0.clone() } else { -c0.clone() };
    let norm = c0.abs();
    let field = NumberField::new(lambda.clone());
    let pisot = if lambda.cmp_rational(&BigRational::one()) == Ordering::Greater {
        is_pisot(&lambda)?
    } else {
        false
    };

    // left eigenvector: w (M - lambda I) = 0
    let n = m.nrows();
    let t = field.generator_element();
    let a: Vec<Vec<NumberFieldElement>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = field.rational(BigRational::from_integer(m.get(i, j).clone()));
                    if i == j {
                        field.sub(&e, &t)
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let lengths = field
        .left_kernel_vector(&a)
        .ok_or_else(|| Error::Internal("Perron eigenspace is not one dimensional".into()))?;
    for (i, w) in lengths.iter().enumerate() {
        if field.sign(w) != Ordering::Greater {
            return Err(Error::Internal(format!("tile length {i} is not positive")));
        }
    }
    Ok(PerronData {
        irreducible_charpoly: degree == n,
        determinant: m.determinant(),
        unimodular: norm.is_one(),
        lambda,
        degree,
        norm,
        signed_norm,
        pisot,
        charpoly,
        lengths,
        field,
    })
}

/// Outcome of the eventual-rank bound for substitutions commuting with a letter
/// involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionBound {
    pub block_ok: bool,
    pub evrank_q: usize,
    pub evrank_f2_sum: usize,
    pub bound_2d: usize,
    pub norm_odd: bool,
    pub certified: bool,
}

impl InvolutionBound {
    pub fn to_json(&self) -> Value {
        json!({
            "block_ok": self.block_ok,
            "evrank_Q": self.evrank_q,
            "evrank_F2_X_plus_Y": self.evrank_f2_sum,
            "bound_2d": self.bound_2d,
            "norm_odd": self.norm_odd,
            "certified": self.certified,
        })
    }
}

/// Check a letter involution against `s` and evaluate the rank bound for its
/// abelianization. `iota[i]` is the partner of letter `i`.
pub fn involution_block_bound(
    s: &Substitution,
    iota: &[Symbol],
    perron: &PerronData,
) -> Result<InvolutionBound> {
    let n = s.size();
    if iota.len() != n {
        return Err(Precondition::BadInvolution("length differs from alphabet".into()).into());
    }
    for (i, j) in iota.iter().enumerate() {
        if j.index() >= n || iota[j.index()].index() != i {
            return Err(Precondition::BadInvolution(format!(
                "{} is not mapped back to itself",
                s.name_of(Symbol(i))
            ))
            .into());
        }
        if j.index() == i {
            return Err(Precondition::BadInvolution(format!(
                "{} is a fixed point",
                s.name_of(Symbol(i))
            ))
            .into());
        }
    }
    for i in 0..n {
        let mapped: Vec<Symbol> = s.rule(Symbol(i)).iter().map(|c| iota[c.index()]).collect();
        if &mapped != s.rule(iota[i]) {
            return Err(Precondition::BadInvolution(format!(
                "does not commute with the rule for {}",
                s.name_of(Symbol(i))
            ))
            .into());
        }
    }
    let m = s.abelianization();
    // pair order: representatives first, then their partners
    let reps: Vec<usize> = (0..n).filter(|&i| iota[i].index() > i).collect();
    let mut perm = reps.clone();
    perm.extend(reps.iter().map(|&i| iota[i].index()));
    let p = m.permuted(&perm);
    let h = reps.len();
    let x = p.block(0..h, 0..h);
    let y = p.block(0..h, h..n);
    let block_ok = p.block(h..n, 0..h) == y && p.block(h..n, h..n) == x;
    let evrank_q = eventual_rank(&m, RankField::Rationals);
    let evrank_f2_sum = eventual_rank(&x.add(&y), RankField::Gf2);
    let d = perron.degree;
    let norm_odd = perron.norm_is_odd();
    Ok(InvolutionBound {
        block_ok,
        evrank_q,
        evrank_f2_sum,
        bound_2d: 2 * d,
        norm_odd,
        certified: block_ok && norm_odd && evrank_f2_sum >= d && evrank_q >= 2 * d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(rules: &[(&str, &str)]) -> Substitution {
        Substitution::from_rules("t", rules).unwrap()
    }

    #[test]
    fn fibonacci_perron_data() {
        let p = perron_data(&sub(&[("a", "ab"), ("b", "a")]).abelianization()).unwrap();
        assert_eq!(p.minimal_polynomial_ints(), vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(p.degree, 2);
        assert!(p.norm.is_one() && p.unimodular && p.pisot && p.irreducible_charpoly);
        let l = p.lengths_f64();
        assert!((l[0] - 1.0).abs() < 1e-12 && (l[1] - 0.6180339887498949).abs() < 1e-12);
    }

    #[test]
    fn thue_morse_perron_data() {
        let p = perron_data(&sub(&[("a", "ab"), ("b", "ba")]).abelianization()).unwrap();
        assert_eq!(p.lambda.as_rational(), Some(BigRational::from_integer(2.into())));
        assert_eq!(p.degree, 1);
        assert_eq!(p.norm, BigInt::from(2));
        assert!(!p.unimodular && p.pisot && !p.irreducible_charpoly);
        assert_eq!(p.determinant, BigInt::from(0));
    }

    #[test]
    fn scalar_perron_data() {
        let p = perron_data(&IntMatrix::from_i64(&[vec![3]])).unwrap();
        assert_eq!(p.degree, 1);
        assert_eq!(p.norm, BigInt::from(3));
        assert_eq!(p.signed_norm, BigInt::from(3));
    }

    #[test]
    fn non_primitive_rejected() {
        assert!(perron_data(&IntMatrix::from_i64(&[vec![1, 0], vec![0, 1]])).is_err());
    }

    #[test]
    fn involution_bounds() {
        let tm = sub(&[("a", "ab"), ("b", "ba")]);
        let p = perron_data(&tm.abelianization()).unwrap();
        let b = involution_block_bound(&tm, &[Symbol(1), Symbol(0)], &p).unwrap();
        assert!(b.block_ok && !b.certified);
        assert_eq!(b.evrank_q, 1);

        let abb = sub(&[("a", "abb"), ("b", "baa")]);
        let p = perron_data(&abb.abelianization()).unwrap();
        let b = involution_block_bound(&abb, &[Symbol(1), Symbol(0)], &p).unwrap();
        assert!(b.block_ok && b.certified);
        assert_eq!((b.evrank_q, b.bound_2d), (2, 2));

        let fib = sub(&[("a", "ab"), ("b", "a")]);
        let p = perron_data(&fib.abelianization()).unwrap();
        assert!(involution_block_bound(&fib, &[Symbol(1), Symbol(0)], &p).is_err());
        assert!(involution_block_bound(&tm, &[Symbol(0), Symbol(1)], &p).is_err());
    }
}
