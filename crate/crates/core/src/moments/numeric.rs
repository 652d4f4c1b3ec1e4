//! Floating-point evaluation of s₁ and the nine λ terms by adaptive
//! quadrature, independent of the exact polynomial algebra: P, Q and
//! their derivatives are evaluated pointwise from f64 coefficients and
//! every integral, Q₁(1) included, is computed numerically.

use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::spec::MollifierSpec;

/// Absolute target handed to the integrator per integral.
pub const NUMERIC_TOL: f64 = 1e-14;

struct Profile {
    coeffs: Vec<f64>,
}

impl Profile {
    fn value(&self, x: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum()
    }

    fn slope(&self, x: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c * x.powi(k as i32 - 1)).sum()
    }
}

fn integrate(f: impl Fn(f64) -> f64) -> Result<f64> {
    let out = quadrature::integrate(f, 0.0, 1.0, NUMERIC_TOL);
    if !out.integral.is_finite() || out.error_estimate > 1e3 * NUMERIC_TOL.max(out.integral.abs() * 1e-13) {
        return Err(Error::Accuracy(format!("adaptive quadrature error estimate {:e}", out.error_estimate)));
    }
    Ok(out.integral)
}

/// (s₁, [λ terms in the same order as `lambda_terms`]).
pub fn moments_numeric(spec: &MollifierSpec) -> Result<(f64, [f64; 9])> {
    let (t1, t2) = (to_f64(&spec.theta1), to_f64(&spec.theta2));
    let p = Profile { coeffs: spec.p.to_f64_coeffs() };
    let q = Profile { coeffs: spec.q.to_f64_coeffs() };
    let shift = |x: f64| 1.0 - t2 * (1.0 - x) / t1;
    let p1 = p.value(1.0);
    let q1 = integrate(|x| q.value(x))?;
    let s1 = p1 + t2 / 2.0 * q1;
    let terms = [
        p1 * p1,
        integrate(|x| p.slope(x).powi(2))? / t1,
        -t2 * p1 * q1,
        2.0 * t2 * integrate(|x| p.value(shift(x)) * q.value(x))?,
        t2 / t1 * integrate(|x| p.slope(shift(x)) * q.value(x))?,
        t2 * t2 * integrate(|x| (1.0 - x) * q.value(x).powi(2))?,
        t2 / 2.0 * integrate(|x| (1.0 - x).powi(2) * q.slope(x).powi(2))?,
        -t2 * t2 / 4.0 * q1 * q1,
        t2 / 4.0 * integrate(|x| q.value(x).powi(2))?,
    ];
    Ok((s1, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headline_terms() {
        let (s1, t) = moments_numeric(&MollifierSpec::paper()).unwrap();
        assert!((s1 - 89.0 / 80.0).abs() < 1e-14);
        let total: f64 = t.iter().sum();
        assert!((total - 69665.0 / 19200.0).abs() < 1e-13);
        assert!((t[1] - 1201.0 / 600.0).abs() < 1e-13);
    }
}
