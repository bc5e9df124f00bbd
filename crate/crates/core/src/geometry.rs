//! Exact tile geometry: points of `Q(λ)` stored as integer coordinates over one
//! common denominator, so offsets hash and compare cheaply.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::algebra::{NumberField, NumberFieldElement, PerronData};
use crate::error::{Error, Result};
use crate::subst::{Substitution, Symbol, Word};

/// Power-basis numerators; the value is `sum c[k] λ^k / denom`.
pub type Coords = Vec<i128>;

#[derive(Clone, Debug)]
pub struct Geometry {
    pub d: usize,
    pub denom: i128,
    /// Monic minimal polynomial coefficients, low to high, without the leading 1.
    minpoly: Vec<i128>,
    powers: Vec<f64>,
    field: NumberField,
    pub rules: Vec<Word>,
    pub lengths: Vec<Coords>,
    pub lengths_f64: Vec<f64>,
    /// Left end of each child of the inflated tile, relative to its left end.
    pub child_offsets: Vec<Vec<Coords>>,
    pub max_length: f64,
    pub min_length: f64,
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::Internal("coordinate does not fit in 128 bits".into()))
}

pub fn add(a: &[i128], b: &[i128]) -> Coords {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).expect("offset coordinate overflow"))
        .collect()
}

pub fn sub(a: &[i128], b: &[i128]) -> Coords {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(*y).expect("offset coordinate overflow"))
        .collect()
}

pub fn neg(a: &[i128]) -> Coords {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[i128]) -> bool {
    a.iter().all(|&x| x == 0)
}

impl Geometry {
    pub fn new(s: &Substitution, p: &PerronData) -> Result<Self> {
        let d = p.degree;
        let mut denom = BigInt::from(1);
        for w in &p.lengths {
            for c in w.coords() {
                denom = denom.lcm(c.denom());
            }
        }
        let lengths = p
            .lengths
            .iter()
            .map(|w| {
                w.coords()
                    .iter()
                    .map(|c| to_i128(&(c.numer() * (&denom / c.denom()))))
                    .collect::<Result<Coords>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let ints = p.minimal_polynomial_ints();
        let minpoly = ints[..d].iter().map(to_i128).collect::<Result<Vec<_>>>()?;
        let lam = p.lambda_f64();
        let powers = (0..d).map(|k| lam.powi(k as i32)).collect();
        let mut g = Geometry {
            d,
            denom: to_i128(&denom)?,
            minpoly,
            powers,
            field: p.field.clone(),
            rules: s.rules().to_vec(),
            lengths,
            lengths_f64: p.lengths_f64(),
            child_offsets: Vec::new(),
            max_length: 0.0,
            min_length: 0.0,
        };
        g.max_length = g.lengths_f64.iter().cloned().fold(0.0, f64::max);
        g.min_length = g.lengths_f64.iter().cloned().fold(f64::INFINITY, f64::min);
        g.child_offsets = s
            .rules()
            .iter()
            .map(|r| {
                let mut pos = g.zero();
                let mut out = Vec::with_capacity(r.len());
                for c in r {
                    out.push(pos.clone());
                    pos = add(&pos, &g.lengths[c.0]);
                }
                out
            })
            .collect();
        // sanity: the children of each inflated tile fill it exactly
        for (i, r) in s.rules().iter().enumerate() {
            let end = add(g.child_offsets[i].last().unwrap(), &g.lengths[r.last().unwrap().0]);
            if end != g.mul_lambda(&g.lengths[i]) {
                return Err(Error::Internal("tile lengths are not an eigenvector".into()));
            }
        }
        Ok(g)
    }

    pub fn zero(&self) -> Coords {
        vec![0; self.d]
    }

    pub fn length(&self, c: Symbol) -> &Coords {
        &self.lengths[c.0]
    }

    pub fn mul_lambda(&self, a: &[i128]) -> Coords {
        let d = self.d;
        let top = a[d - 1];
        let mut out = vec![0i128; d];
        for k in 0..d {
            let shifted = if k > 0 { a[k - 1] } else { 0 };
            let carry = top.checked_mul(self.minpoly[k]).expect("offset coordinate overflow");
            out[k] = shifted.checked_sub(carry).expect("offset coordinate overflow");
        }
        out
    }

    pub fn value(&self, a: &[i128]) -> f64 {
        a.iter().zip(&self.powers).map(|(c, p)| *c as f64 * p).sum::<f64>() / self.denom as f64
    }

    pub fn to_element(&self, a: &[i128]) -> NumberFieldElement {
        let dn = BigInt::from(self.denom);
        NumberFieldElement::from_coords(
            a.iter()
                .map(|c| BigRational::new(BigInt::from(*c), dn.clone()))
                .collect(),
        )
    }

    /// Exact sign under the real embedding.
    pub fn sign(&self, a: &[i128]) -> Ordering {
        let mut val = 0.0;
        let mut mag = 0.0;
        for (c, p) in a.iter().zip(&self.powers) {
            let t = *c as f64 * p;
            val += t;
            mag += t.abs();
        }
        if mag == 0.0 {
            return Ordering::Equal;
        }
        if val.abs() > mag * 1e-9 {
            return if val > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let e = self.to_element(a);
        if e.is_zero() {
            Ordering::Equal
        } else {
            self.field.sign(&e)
        }
    }

    pub fn cmp(&self, a: &[i128], b: &[i128]) -> Ordering {
        self.sign(&sub(a, b))
    }

    pub fn one(&self) -> Coords {
        let mut c = self.zero();
        c[0] = self.denom;
        c
    }

    /// Coordinates of `e`, if they fit over the common denominator.
    pub fn from_element(&self, e: &NumberFieldElement) -> Option<Coords> {
        let dn = BigRational::from_integer(BigInt::from(self.denom));
        e.coords()
            .iter()
            .chain(std::iter::repeat(&BigRational::from_integer(BigInt::from(0))))
            .take(self.d)
            .map(|c| {
                let x = c * &dn;
                if x.is_integer() {
                    x.to_integer().to_i128()
                } else {
                    None
                }
            })
            .collect()
    }

    /// `a / (1 - λ^k)`: the fixed point of `x ↦ λ^k x + a`.
    pub fn fixed_point_of_affine(&self, a: &[i128], k: usize) -> Option<Coords> {
        let mut p = self.one();
        for _ in 0..k {
            p = self.mul_lambda(&p);
        }
        let den = self.to_element(&sub(&self.one(), &p));
        let inv = self.field.inv(&den)?;
        self.from_element(&self.field.mul(&self.to_element(a), &inv))
    }

    /// Exact coordinates as reduced rationals.
    pub fn coord_strings(&self, a: &[i128]) -> Vec<String> {
        let dn = BigInt::from(self.denom);
        a.iter()
            .map(|c| BigRational::new(BigInt::from(*c), dn.clone()).to_string())
            .collect()
    }

    pub fn format(&self, a: &[i128]) -> String {
        if self.d == 1 {
            return self.coord_strings(a).remove(0);
        }
        format!("[{}]", self.coord_strings(a).join(","))
    }

    /// Positions of the letters of `w` laid end to end from 0, plus the end point.
    pub fn positions(&self, w: &[Symbol]) -> Vec<Coords> {
        let mut pos = self.zero();
        let mut out = Vec::with_capacity(w.len() + 1);
        for c in w {
            out.push(pos.clone());
            pos = add(&pos, &self.lengths[c.0]);
        }
        out.push(pos);
        out
    }
}

/// Length in `Q(λ)` of a word, as an exact element.
pub fn word_length(g: &Geometry, w: &[Symbol]) -> NumberFieldElement {
    let mut total = g.zero();
    for c in w {
        total = add(&total, &g.lengths[c.0]);
    }
    g.to_element(&total)
}
