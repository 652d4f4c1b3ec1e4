//! Main terms of the mollified moments, exactly over the rationals.
//!
//! With P̃(x) = P(1 − ϑ₂(1 − x)/ϑ₁) and Q₁(x) = ∫₀ˣ Q:
//!
//! * first moment  s₁ = P(1) + (ϑ₂/2) Q₁(1)
//! * second moment λ  = P(1)² + ϑ₁⁻¹∫P'² − ϑ₂P(1)Q₁(1) + 2ϑ₂∫P̃Q + (ϑ₂/ϑ₁)∫P̃'Q
//!   + ϑ₂²∫(1−x)Q² + (ϑ₂/2)∫(1−x)²Q'² − (ϑ₂²/4)Q₁(1)² + (ϑ₂/4)∫Q²
//!
//! and the pieces λ splits into: the ψ₁ baseline, the cross term with ψ₂,
//! and the |ψ₂|² term. All integrals are over [0, 1].

mod numeric;
mod shifted;

pub use numeric::{moments_numeric, NUMERIC_TOL};

pub use shifted::{
    shifted_i, shifted_i_monomial, shifted_j1, shifted_j2, t_average, DerivativeMethod, ShiftedMomentResult,
    ShiftedQuadrature,
};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RationalPoly;
use crate::rational::{self, int, ratio};
use crate::spec::MollifierSpec;

/// The nine terms of λ in the order written in the module docs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaTerms(#[serde(with = "rational::serde_vec")] pub Vec<BigRational>);

impl LambdaTerms {
    pub fn total(&self) -> BigRational {
        self.0.iter().fold(BigRational::zero(), |acc, t| acc + t)
    }
}

/// P(1 − ϑ₂(1 − x)/ϑ₁).
pub fn p_tilde(p: &RationalPoly, theta1: &BigRational, theta2: &BigRational) -> RationalPoly {
    let s = theta2 / theta1;
    let t = BigRational::one() - &s;
    p.affine_compose(&s, &t)
}

pub fn s1_main(spec: &MollifierSpec) -> BigRational {
    spec.p.at_one() + &spec.theta2 / int(2) * spec.q.antiderivative().at_one()
}

pub fn lambda_terms(spec: &MollifierSpec) -> LambdaTerms {
    let (t1, t2) = (&spec.theta1, &spec.theta2);
    let (p, q) = (&spec.p, &spec.q);
    let p1 = p.at_one();
    let q1_1 = q.antiderivative().at_one();
    let dp = p.derivative();
    let dq = q.derivative();
    let pt = p_tilde(p, t1, t2);
    let dpt = p_tilde(&dp, t1, t2);
    let one_minus_x = RationalPoly::from_ints(&[1, -1]);
    let half = ratio(1, 2);
    let quarter = ratio(1, 4);

    LambdaTerms(vec![
        &p1 * &p1,
        (&dp * &dp).integrate_unit() / t1,
        -(t2 * &p1 * &q1_1),
        int(2) * t2 * (&pt * q).integrate_unit(),
        t2 / t1 * (&dpt * q).integrate_unit(),
        t2 * t2 * (&one_minus_x * &(q * q)).integrate_unit(),
        t2 * &half * (&(&one_minus_x * &one_minus_x) * &(&dq * &dq)).integrate_unit(),
        -(t2 * t2 * &quarter * &q1_1 * &q1_1),
        t2 * &quarter * (q * q).integrate_unit(),
    ])
}

pub fn lambda_exact(spec: &MollifierSpec) -> BigRational {
    lambda_terms(spec).total()
}

/// s₁² / λ.
pub fn proportion(spec: &MollifierSpec) -> Result<BigRational> {
    let lambda = lambda_exact(spec);
    if lambda.is_zero() {
        return Err(Error::Degenerate("second-moment main term vanishes; the mollifier is zero".into()));
    }
    let s1 = s1_main(spec);
    Ok(&s1 * &s1 / lambda)
}

/// Unshifted main terms attached to ψ₂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryTerms {
    /// First moment of L ψ₂.
    #[serde(with = "rational::serde_str")]
    pub first: BigRational,
    /// Cross moment |L|² ψ₁ ψ̄₂.
    #[serde(with = "rational::serde_str")]
    pub cross: BigRational,
    /// |L ψ₂|².
    #[serde(with = "rational::serde_str")]
    pub second: BigRational,
}

pub fn corollary_terms(spec: &MollifierSpec) -> CorollaryTerms {
    let (t1, t2) = (&spec.theta1, &spec.theta2);
    let (p, q) = (&spec.p, &spec.q);
    let q1_1 = q.antiderivative().at_one();
    let half = ratio(1, 2);
    let quarter = ratio(1, 4);
    let one_minus_x = RationalPoly::from_ints(&[1, -1]);
    let dq = q.derivative();

    let first = t2 * &half * &q1_1;
    let cross = -(t2 * &half * p.at_one() * &q1_1)
        + t2 * (&p_tilde(p, t1, t2) * q).integrate_unit()
        + t2 / (int(2) * t1) * (&p_tilde(&p.derivative(), t1, t2) * q).integrate_unit();
    let second = t2 * t2 * (&one_minus_x * &(q * q)).integrate_unit()
        + t2 * &half * (&(&one_minus_x * &one_minus_x) * &(&dq * &dq)).integrate_unit()
        - t2 * t2 * &quarter * &q1_1 * &q1_1
        + t2 * &quarter * (q * q).integrate_unit();
    CorollaryTerms { first, cross, second }
}

/// ψ₁-only moments (P(1), P(1)² + ϑ₁⁻¹∫P'²).
pub fn is_baseline(p: &RationalPoly, theta1: &BigRational) -> (BigRational, BigRational) {
    let p1 = p.at_one();
    let dp = p.derivative();
    let second = &p1 * &p1 + (&dp * &dp).integrate_unit() / theta1;
    (p1, second)
}
