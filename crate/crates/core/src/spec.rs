//! The mollifier parameters (ϑ₁, ϑ₂, P, Q) and the integer lengths they
//! induce at a given modulus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RationalPoly;
use crate::rational::{self, ratio};

/// ψ₁ of length y₁ = q^ϑ₁ weighted by P, ψ₂ of length y₂ = q^ϑ₂ weighted
/// by Q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MollifierSpec {
    #[serde(with = "rational::serde_str")]
    pub theta1: BigRational,
    #[serde(with = "rational::serde_str")]
    pub theta2: BigRational,
    pub p: RationalPoly,
    pub q: RationalPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_for_lengths: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecWarning {
    /// ϑ₂ < ϑ₁ < 1/2 fails; the second-moment formula is applied anyway.
    OutsideSecondMomentRange,
}

impl SpecWarning {
    pub fn message(&self) -> &'static str {
        match self {
            SpecWarning::OutsideSecondMomentRange => {
                "outside the second-moment hypothesis theta2 < theta1 < 1/2; main terms are evaluated at the boundary"
            }
        }
    }
}

impl MollifierSpec {
    /// Builds and validates; violations are collected into one error.
    pub fn new(theta1: BigRational, theta2: BigRational, p: RationalPoly, q: RationalPoly) -> Result<Self> {
        let spec = Self { theta1, theta2, p, q, q_for_lengths: None };
        spec.validate()?;
        Ok(spec)
    }

    /// ϑ₁ = ϑ₂ = 1/2, P = (21/20)x − (1/20)x², Q = (9/10)x.
    pub fn paper() -> Self {
        Self {
            theta1: ratio(1, 2),
            theta2: ratio(1, 2),
            p: RationalPoly::from_linear_up(vec![ratio(21, 20), ratio(-1, 20)]),
            q: RationalPoly::from_linear_up(vec![ratio(9, 10)]),
            q_for_lengths: None,
        }
    }

    /// ϑ₁ = ϑ₂ = 1/2, P = x, Q = 0.
    pub fn is_baseline() -> Self {
        Self {
            theta1: ratio(1, 2),
            theta2: ratio(1, 2),
            p: RationalPoly::monomial(1),
            q: RationalPoly::zero(),
            q_for_lengths: None,
        }
    }

    pub fn with_thetas(mut self, theta1: BigRational, theta2: BigRational) -> Result<Self> {
        self.theta1 = theta1;
        self.theta2 = theta2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_modulus(mut self, q: u64) -> Self {
        self.q_for_lengths = Some(q);
        self
    }

    /// Hard violations as an error; soft ones as warnings.
    pub fn validate(&self) -> Result<Vec<SpecWarning>> {
        let mut problems = Vec::new();
        if !self.p.coeff(0).is_zero() {
            problems.push(format!("P(0) must be 0, got {}", rational::format(&self.p.coeff(0))));
        }
        if !self.q.coeff(0).is_zero() {
            problems.push(format!("Q(0) must be 0, got {}", rational::format(&self.q.coeff(0))));
        }
        let one = BigRational::one();
        for (name, t) in [("theta1", &self.theta1), ("theta2", &self.theta2)] {
            if !t.is_positive() || *t >= one {
                problems.push(format!("{name} must lie in (0, 1), got {}", rational::format(t)));
            }
        }
        if self.theta2 > self.theta1 {
            problems.push(format!(
                "theta2 must not exceed theta1, got theta1 = {}, theta2 = {}",
                rational::format(&self.theta1),
                rational::format(&self.theta2)
            ));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(self.warnings())
    }

    pub fn warnings(&self) -> Vec<SpecWarning> {
        let half = ratio(1, 2);
        if self.theta2 < self.theta1 && self.theta1 < half {
            Vec::new()
        } else {
            vec![SpecWarning::OutsideSecondMomentRange]
        }
    }

    /// (y₁, y₂) = (⌊q^ϑ₁⌋, ⌊q^ϑ₂⌋) at `q`, computed exactly.
    pub fn lengths(&self, q: u64) -> Result<(u64, u64)> {
        Ok((floor_power(q, &self.theta1)?, floor_power(q, &self.theta2)?))
    }

    /// Number of P and Q coefficients from x¹ upward.
    pub fn degrees(&self) -> (usize, usize) {
        (self.p.degree().unwrap_or(0), self.q.degree().unwrap_or(0))
    }
}

/// ⌊q^(a/b)⌋ for q >= 1 and 0 <= a/b: the largest y with y^b <= q^a.
pub fn floor_power(q: u64, exponent: &BigRational) -> Result<u64> {
    if q == 0 || exponent.is_negative() {
        return Err(Error::Domain(format!("floor_power needs q >= 1 and a nonnegative exponent, got q = {q}")));
    }
    let a = exponent.numer().to_u32().ok_or_else(|| Error::Domain("exponent numerator too large".into()))?;
    let b = exponent.denom().to_u32().ok_or_else(|| Error::Domain("exponent denominator too large".into()))?;
    let target = BigInt::from(q).pow(a);
    let fits = |y: u64| BigInt::from(y).pow(b) <= target;
    // Float guess, then exact correction.
    let guess = (q as f64).powf(a as f64 / b as f64).floor();
    let mut y = if guess.is_finite() && guess < u64::MAX as f64 { guess as u64 } else { u64::MAX / 2 };
    while y > 0 && !fits(y) {
        y -= 1;
    }
    while fits(y + 1) {
        y += 1;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn presets_validate() {
        assert_eq!(MollifierSpec::paper().validate().unwrap(), vec![SpecWarning::OutsideSecondMomentRange]);
        assert!(MollifierSpec::is_baseline().validate().is_ok());
        let inside = MollifierSpec::paper().with_thetas(ratio(2, 5), ratio(1, 5)).unwrap();
        assert!(inside.warnings().is_empty());
    }

    #[test]
    fn violations_are_collected() {
        let mut s = MollifierSpec::paper();
        s.p = RationalPoly::from_ints(&[1, 1]);
        s.theta2 = ratio(3, 4);
        match s.validate() {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 2, "{v:?}"),
            other => panic!("expected validation error, got {other:?}"),
        }
        assert!(MollifierSpec::paper().with_thetas(int(1), ratio(1, 2)).is_err());
        assert!(MollifierSpec::paper().with_thetas(ratio(1, 2), int(0)).is_err());
    }

    #[test]
    fn exact_lengths() {
        assert_eq!(floor_power(13, &ratio(3, 10)).unwrap(), 2);
        assert_eq!(floor_power(101, &ratio(1, 2)).unwrap(), 10);
        assert_eq!(floor_power(100, &ratio(1, 2)).unwrap(), 10);
        assert_eq!(floor_power(10007, &ratio(1, 4)).unwrap(), 10);
        assert_eq!(floor_power(10000, &ratio(1, 4)).unwrap(), 10);
        assert_eq!(floor_power(9999, &ratio(1, 4)).unwrap(), 9);
        assert_eq!(floor_power(7, &int(0)).unwrap(), 1);
        assert_eq!(floor_power(1, &ratio(1, 3)).unwrap(), 1);
    }

    #[test]
    fn json_round_trip() {
        let s = MollifierSpec::paper().with_modulus(101);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains(r#""theta1":"1/2""#));
        assert_eq!(serde_json::from_str::<MollifierSpec>(&json).unwrap(), s);
    }
}
