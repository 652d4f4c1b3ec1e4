//! Exact term-by-term integration of the main terms, written against plain
//! coefficient vectors so it shares no code with the library's polynomial
//! type.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients from x⁰ upward.
pub type Coeffs = Vec<BigRational>;

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn at_one(p: &[BigRational]) -> BigRational {
    p.iter().fold(BigRational::zero(), |acc, c| acc + c)
}

pub fn deriv(p: &[BigRational]) -> Coeffs {
    p.iter().enumerate().skip(1).map(|(k, c)| c * r(k as i64)).collect()
}

pub fn mul(a: &[BigRational], b: &[BigRational]) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// ∫₀¹ p = Σ c_k/(k+1).
pub fn integral(p: &[BigRational]) -> BigRational {
    p.iter().enumerate().fold(BigRational::zero(), |acc, (k, c)| acc + c / r(k as i64 + 1))
}

/// p(a + b x) by Horner's rule on polynomials.
pub fn compose_affine(p: &[BigRational], a: &BigRational, b: &BigRational) -> Coeffs {
    let lin = vec![a.clone(), b.clone()];
    let mut acc: Coeffs = Vec::new();
    for c in p.iter().rev() {
        acc = mul(&acc, &lin);
        if acc.is_empty() {
            acc.push(BigRational::zero());
        }
        acc[0] += c;
    }
    acc
}

/// (s₁, λ) for P, Q vanishing at 0, from the nine main terms.
pub fn s1_lambda(t1: &BigRational, t2: &BigRational, p: &[BigRational], q: &[BigRational]) -> (BigRational, BigRational) {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let quarter = &half * &half;
    let one_minus_x = vec![r(1), r(-1)];
    // P(1 − (ϑ₂/ϑ₁)(1 − x)) as a polynomial in x.
    let ratio = t2 / t1;
    let shift_a = BigRational::one() - &ratio;
    let p_shift = compose_affine(p, &shift_a, &ratio);
    let dp_shift = compose_affine(&deriv(p), &shift_a, &ratio);
    let (dp, dq) = (deriv(p), deriv(q));
    let p1 = at_one(p);
    let q1 = integral(q);
    let s1 = &p1 + t2 * &half * &q1;
    let terms = [
        &p1 * &p1,
        integral(&mul(&dp, &dp)) / t1,
        -(t2 * &p1 * &q1),
        r(2) * t2 * integral(&mul(&p_shift, q)),
        &ratio * integral(&mul(&dp_shift, q)),
        t2 * t2 * integral(&mul(&one_minus_x, &mul(q, q))),
        t2 * &half * integral(&mul(&mul(&one_minus_x, &one_minus_x), &mul(&dq, &dq))),
        -(t2 * t2 * &quarter * &q1 * &q1),
        t2 * &quarter * integral(&mul(q, q)),
    ];
    let lambda = terms.iter().fold(BigRational::zero(), |acc, t| acc + t);
    (s1, lambda)
}
