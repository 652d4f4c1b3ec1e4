//! Dense polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational;

/// `coeffs[k]` is the coefficient of x^k; never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalPoly {
    #[serde(with = "rational::serde_vec")]
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// x^k.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        Self { coeffs }
    }

    /// Σ c_k x^(k+1): the coefficient list of a polynomial vanishing at 0.
    pub fn from_linear_up(coeffs: Vec<BigRational>) -> Self {
        let mut all = Vec::with_capacity(coeffs.len() + 1);
        all.push(BigRational::zero());
        all.extend(coeffs);
        Self::new(all)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn at_one(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational::to_f64).collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// ∫₀ˣ p, with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / BigInt::from(k + 1));
        }
        Self::new(coeffs)
    }

    /// ∫₀¹ p.
    pub fn integrate_unit(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (k, c)| acc + c / BigInt::from(k + 1))
    }

    /// p(s·x + t).
    pub fn affine_compose(&self, s: &BigRational, t: &BigRational) -> Self {
        let inner = Self::new(vec![t.clone(), s.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * &inner) + &Self::constant(c.clone()))
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = rational::format(c);
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn paper_p() -> RationalPoly {
        RationalPoly::new(vec![int(0), ratio(21, 20), ratio(-1, 20)])
    }

    #[test]
    fn antiderivative_examples() {
        let q = RationalPoly::new(vec![int(0), ratio(9, 10)]);
        assert_eq!(q.antiderivative(), RationalPoly::new(vec![int(0), int(0), ratio(9, 20)]));
        assert_eq!(RationalPoly::zero().antiderivative(), RationalPoly::zero());
        assert_eq!(RationalPoly::monomial(2).antiderivative(), RationalPoly::monomial(3).scale(&ratio(1, 3)));
    }

    #[test]
    fn integrate_unit_examples() {
        assert_eq!(RationalPoly::monomial(1).integrate_unit(), ratio(1, 2));
        assert_eq!(RationalPoly::one().integrate_unit(), int(1));
        let dp = paper_p().derivative();
        assert_eq!(dp, RationalPoly::new(vec![ratio(21, 20), ratio(-1, 10)]));
        assert_eq!((&dp * &dp).integrate_unit(), ratio(1201, 1200));
    }

    #[test]
    fn affine_compose_examples() {
        let sq = RationalPoly::monomial(2);
        assert_eq!(sq.affine_compose(&int(2), &int(1)), RationalPoly::from_ints(&[1, 4, 4]));
        let p = paper_p();
        assert_eq!(p.affine_compose(&int(1), &int(0)), p);
        // 1 - θ₂(1 - x)/θ₁ with θ₁ = θ₂ is the identity map.
        let (t1, t2) = (ratio(1, 2), ratio(1, 2));
        let s = &t2 / &t1;
        assert_eq!(p.affine_compose(&s, &(int(1) - &s)), p);
    }

    #[test]
    fn normalization_and_display() {
        let p = RationalPoly::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(RationalPoly::zero().degree(), None);
        assert_eq!(paper_p().to_string(), "(21/20)x + (-1/20)x^2");
        assert_eq!(paper_p().at_one(), int(1));
    }

    #[test]
    fn serde_as_strings() {
        let json = serde_json::to_string(&paper_p()).unwrap();
        assert_eq!(json, r#"["0","21/20","-1/20"]"#);
        assert_eq!(serde_json::from_str::<RationalPoly>(&json).unwrap(), paper_p());
    }

    fn small_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec((-20i64..=20, 1i64..=9), 0..6)
            .prop_map(|v| RationalPoly::new(v.into_iter().map(|(n, d)| ratio(n, d)).collect()))
    }

    fn small_ratio() -> impl Strategy<Value = BigRational> {
        (-9i64..=9, 1i64..=7).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn derivative_inverts_antiderivative(p in small_poly()) {
            prop_assert_eq!(p.antiderivative().derivative(), p);
        }

        #[test]
        fn unit_integral_is_bilinear_and_symmetric(p in small_poly(), q in small_poly(), r in small_poly(), c in small_ratio()) {
            let ip = |a: &RationalPoly, b: &RationalPoly| (a * b).integrate_unit();
            prop_assert_eq!(ip(&p, &q), ip(&q, &p));
            let lhs = ip(&(&p + &r.scale(&c)), &q);
            prop_assert_eq!(lhs, ip(&p, &q) + c * ip(&r, &q));
        }

        #[test]
        fn affine_compose_is_a_ring_map(p in small_poly(), q in small_poly(), s in small_ratio(), t in small_ratio()) {
            prop_assert_eq!((&p * &q).affine_compose(&s, &t), &p.affine_compose(&s, &t) * &q.affine_compose(&s, &t));
            prop_assert_eq!((&p + &q).affine_compose(&s, &t), &p.affine_compose(&s, &t) + &q.affine_compose(&s, &t));
        }

        #[test]
        fn eval_matches_composition(p in small_poly(), s in small_ratio(), t in small_ratio(), x in small_ratio()) {
            prop_assert_eq!(p.affine_compose(&s, &t).eval(&x), p.eval(&(&s * &x + &t)));
        }
    }
}
