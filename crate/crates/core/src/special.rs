//! Complex log-gamma for the Γ-ratios in the smoothing kernels.

use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1)) for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// log Γ(z) for Re z > 0, up to an additive multiple of 2πi.
///
/// Shifts z to |z| >= 15 with the recurrence, then applies the Stirling
/// series. Only exp(ln_gamma) is used downstream, so the branch does not
/// matter.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0, "ln_gamma called at Re z = {}", z.re);
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!((gamma(c(0.5)).re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(5.0)).re - 24.0).abs() < 1e-12);
        assert!((ln_gamma(c(0.25)).re - 1.288_022_524_698_077_5).abs() < 1e-14);
        for x in [0.1, 0.3, 0.75, 1.7, 3.3, 12.0] {
            let r = (ln_gamma(c(x)).re - statrs::function::gamma::ln_gamma(x)).abs();
            assert!(r < 1e-13, "x = {x}: {r}");
        }
    }

    #[test]
    fn recurrence_and_reflection_off_axis() {
        let pi = std::f64::consts::PI;
        for (re, im) in [(0.25, 3.0), (1.1, -7.5), (0.6, 20.0), (1.7, 0.4)] {
            let z = Complex64::new(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "recurrence at {z}");
            // Γ(z) Γ(1 - z) = π / sin(πz), evaluated as Γ(1-z) = Γ(2-z)/(1-z).
            let one_minus = gamma(Complex64::new(2.0, 0.0) - z) / (Complex64::new(1.0, 0.0) - z);
            let refl = gamma(z) * one_minus;
            let expect = pi / (z * pi).sin();
            assert!((refl - expect).norm() <= 1e-11 * expect.norm(), "reflection at {z}");
        }
    }
}
