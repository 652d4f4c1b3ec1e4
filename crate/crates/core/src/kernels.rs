//! Smoothing kernels defined by vertical-line integrals:
//!
//! * `V(x)  = (1/2πi) ∫_(σ) e^{s²} x^{-s} ds/s`
//! * `W±(x) = (1/2πi) ∫_(σ) G(s) g±(s) x^{-s} ds/s`, with `G(s) = e^{s²} p(s)`,
//!   `p(s) = ((α+β)² - 4s²)/(α+β)²`, and `g±` the Γ-ratios of the even
//!   gamma factor.
//!
//! All three are evaluated by Gauss–Legendre quadrature on the truncated line
//! `Re(s) = σ`, `|Im(s)| <= T`. For x >= 1 the line `Re(s) = σ₀` is used
//! directly. For x < 1 the factor `x^{-s}` is huge on that line and the
//! quadrature would lose every digit to cancellation. There the line is
//! moved left of the pole at s = 0, which picks up the residue `G(0) g(0)`:
//! to `Re(s) = -σ₀` for V, and for W to a line strictly between 0 and the
//! first Γ pole at `Re(s) = -1/2 + max(|α|, |β|)`.
//!
//! When α + β = 0 the polynomial factor p(s) is dropped (p ≡ 1).
//!
//! [`mellin_profile`] evaluates the Mellin pair behind `P[h]`, `Q[h]`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    V,
    WPlus,
    WMinus,
}

/// Parameters of one kernel evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub alpha: f64,
    pub beta: f64,
    /// σ₀ of the right-hand line.
    pub contour_re: f64,
    pub truncation_t: f64,
    pub node_count: usize,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self { kind: KernelKind::V, alpha: 0.0, beta: 0.0, contour_re: 2.0, truncation_t: 10.0, node_count: 400 }
    }
}

impl KernelSpec {
    pub fn v() -> Self {
        Self::default()
    }

    pub fn w_plus(alpha: f64, beta: f64) -> Self {
        Self { kind: KernelKind::WPlus, alpha, beta, ..Self::default() }
    }

    pub fn w_minus(alpha: f64, beta: f64) -> Self {
        Self { kind: KernelKind::WMinus, alpha, beta, ..Self::default() }
    }

    pub fn with_contour(self, contour_re: f64) -> Self {
        Self { contour_re, ..self }
    }

    pub fn with_truncation(self, truncation_t: f64) -> Self {
        Self { truncation_t, ..self }
    }

    pub fn with_nodes(self, node_count: usize) -> Self {
        Self { node_count, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.contour_re > 0.0) {
            return Err(Error::Domain(format!("contour abscissa must be positive, got {}", self.contour_re)));
        }
        if !(self.truncation_t >= 8.0) {
            return Err(Error::Domain(format!("truncation height must be >= 8, got {}", self.truncation_t)));
        }
        if self.node_count < 200 {
            return Err(Error::Domain(format!("need at least 200 nodes, got {}", self.node_count)));
        }
        if self.kind != KernelKind::V && (self.alpha.abs() >= 0.25 || self.beta.abs() >= 0.25) {
            return Err(Error::Domain(format!(
                "W kernels need |α|, |β| < 1/4, got α = {}, β = {}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }

    fn cache_key(&self) -> (KernelKind, [u64; 4], usize) {
        (
            self.kind,
            [self.alpha.to_bits(), self.beta.to_bits(), self.contour_re.to_bits(), self.truncation_t.to_bits()],
            self.node_count,
        )
    }
}

/// G(s) g(s) / s without the x^{-s} factor.
fn integrand_weight(spec: &KernelSpec, s: Complex64) -> Complex64 {
    let gauss = (s * s).exp();
    match spec.kind {
        KernelKind::V => gauss / s,
        KernelKind::WPlus | KernelKind::WMinus => {
            let sum = spec.alpha + spec.beta;
            let p = if sum == 0.0 { Complex64::new(1.0, 0.0) } else { (sum * sum - 4.0 * s * s) / (sum * sum) };
            gauss * p * gamma_ratio(spec, s) / s
        }
    }
}

/// g±_{α,β}(s).
fn gamma_ratio(spec: &KernelSpec, s: Complex64) -> Complex64 {
    let (a, b) = (spec.alpha, spec.beta);
    let denom = ln_gamma(Complex64::new((0.5 + a) / 2.0, 0.0)) + ln_gamma(Complex64::new((0.5 + b) / 2.0, 0.0));
    let (sa, sb) = match spec.kind {
        KernelKind::WPlus => (a, b),
        KernelKind::WMinus => (-a, -b),
        KernelKind::V => unreachable!("V has no gamma factor"),
    };
    let num = ln_gamma((0.5 + sa + s) / 2.0) + ln_gamma((0.5 + sb + s) / 2.0);
    (num - denom).exp()
}

/// Real abscissae of the poles of G(s) g(s) / s.
fn singularities(spec: &KernelSpec) -> Vec<f64> {
    match spec.kind {
        KernelKind::V => vec![0.0],
        KernelKind::WPlus => vec![0.0, -0.5 - spec.alpha, -0.5 - spec.beta],
        KernelKind::WMinus => vec![0.0, -0.5 + spec.alpha, -0.5 + spec.beta],
    }
}

/// Precomputed quadrature on one vertical line.
#[derive(Clone, Debug)]
struct LineRule {
    /// (s_k, w_k · G(s_k) g(s_k) / s_k / 2π)
    points: Vec<(Complex64, Complex64)>,
    residue: f64,
}

impl LineRule {
    /// Composite Gauss–Legendre on `Re(s) = sigma`, `|t| <= T`.
    ///
    /// Panels are at most half a unit wide and never wider than the distance
    /// from their inner edge to the nearest singularity, so the rule stays
    /// spectrally accurate when the line passes close to s = 0 or to a Γ
    /// pole. Each panel gets at least 16 nodes and the total is at least
    /// `node_count`.
    fn new(spec: &KernelSpec, sigma: f64, residue: f64) -> Self {
        let t_max = spec.truncation_t;
        let gap = singularities(spec).iter().map(|p| (sigma - p).abs()).fold(f64::INFINITY, f64::min);
        let mut edges = vec![0.0];
        let mut t = 0.0;
        while t < t_max {
            let width = 0.5f64.min(gap.hypot(t)).min(t_max - t);
            t += width;
            edges.push(if t_max - t < 1e-12 { t_max } else { t });
        }
        let panels = 2 * (edges.len() - 1);
        let order = 16.max(spec.node_count.div_ceil(panels));
        let rule = GaussLegendre::cached(order);
        let mut points = Vec::with_capacity(panels * order);
        for pair in edges.windows(2) {
            for (lo, hi) in [(pair[0], pair[1]), (-pair[1], -pair[0])] {
                for (y, w) in rule.on(lo, hi) {
                    let s = Complex64::new(sigma, y);
                    points.push((s, integrand_weight(spec, s) * (w / (2.0 * std::f64::consts::PI))));
                }
            }
        }
        Self { points, residue }
    }

    fn eval(&self, ln_x: f64) -> Complex64 {
        let mut acc = Complex64::new(self.residue, 0.0);
        for &(s, w) in &self.points {
            acc += w * (-s * ln_x).exp();
        }
        acc
    }
}

/// A kernel with both contour rules built, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Kernel {
    spec: KernelSpec,
    right: LineRule,
    left: LineRule,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        let (left_sigma, residue) = match spec.kind {
            KernelKind::V => (-spec.contour_re, 1.0),
            KernelKind::WPlus | KernelKind::WMinus => {
                let gap = 0.5 - spec.alpha.abs().max(spec.beta.abs());
                (-0.5 * gap, gamma_ratio(&spec, Complex64::new(0.0, 0.0)).re)
            }
        };
        Ok(Self {
            right: LineRule::new(&spec, spec.contour_re, 0.0),
            left: LineRule::new(&spec, left_sigma, residue),
            spec,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Residue G(0) g(0) picked up when the line crosses s = 0.
    pub fn residue_at_zero(&self) -> f64 {
        self.left.residue
    }

    /// Value at x > 0 (the imaginary part vanishes by symmetry and is
    /// dropped).
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("kernel argument must be positive and finite, got {x}")));
        }
        Ok(self.eval_ln(x.ln()))
    }

    /// Value at x = e^{ln_x}.
    pub fn eval_ln(&self, ln_x: f64) -> f64 {
        let z = if ln_x >= 0.0 { self.right.eval(ln_x) } else { self.left.eval(ln_x) };
        debug_assert!(z.im.abs() <= 1e-9 * z.re.abs().max(1.0), "kernel imaginary residue {}", z.im);
        z.re
    }

    /// Value computed on the right line only, whatever the size of x.
    ///
    /// Accurate only where e^{σ₀²} x^{-σ₀} is moderate; exposed to check
    /// the two lines against each other.
    pub fn eval_right_line(&self, x: f64) -> f64 {
        self.right.eval(x.ln()).re
    }

    /// Value computed on the left line plus the residue at s = 0.
    pub fn eval_left_line(&self, x: f64) -> f64 {
        self.left.eval(x.ln()).re
    }
}

/// V(x) by contour quadrature.
pub fn kernel_v(x: f64, spec: &KernelSpec) -> Result<f64> {
    if spec.kind != KernelKind::V {
        return Err(Error::Domain("kernel_v needs a V spec".into()));
    }
    Kernel::new(*spec)?.eval(x)
}

/// W±_{α,β}(x) by contour quadrature.
pub fn kernel_w(x: f64, spec: &KernelSpec) -> Result<f64> {
    if spec.kind == KernelKind::V {
        return Err(Error::Domain("kernel_w needs a W± spec".into()));
    }
    Kernel::new(*spec)?.eval(x)
}

/// Kernel values on a uniform grid in log x with four-point Lagrange
/// interpolation. Arguments outside the grid fall back to quadrature.
#[derive(Clone, Debug)]
pub struct KernelTable {
    kernel: Kernel,
    ln_min: f64,
    step: f64,
    values: Vec<f64>,
}

/// Default grid: log x in [-16, 16] at spacing 1/128.
pub const TABLE_LN_RANGE: (f64, f64) = (-16.0, 16.0);
pub const TABLE_STEPS_PER_UNIT: usize = 128;

impl KernelTable {
    pub fn new(spec: KernelSpec, ln_min: f64, ln_max: f64, steps_per_unit: usize) -> Result<Self> {
        use rayon::prelude::*;
        let kernel = Kernel::new(spec)?;
        let step = 1.0 / steps_per_unit as f64;
        let n = ((ln_max - ln_min) / step).ceil() as usize + 1;
        let values = (0..n).into_par_iter().map(|i| kernel.eval_ln(ln_min + i as f64 * step)).collect();
        Ok(Self { kernel, ln_min, step, values })
    }

    /// Shared table for `spec` on the default grid. Concurrent callers
    /// either find the finished table or build their own; the first insert
    /// wins and every caller sees identical values.
    pub fn cached(spec: KernelSpec) -> Result<Arc<KernelTable>> {
        type Cache = RwLock<HashMap<(KernelKind, [u64; 4], usize), Arc<KernelTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = spec.cache_key();
        if let Some(t) = cache.read().expect("kernel cache poisoned").get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(KernelTable::new(spec, TABLE_LN_RANGE.0, TABLE_LN_RANGE.1, TABLE_STEPS_PER_UNIT)?);
        Ok(cache.write().expect("kernel cache poisoned").entry(key).or_insert(table).clone())
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_ln(x.ln())
    }

    pub fn eval_ln(&self, ln_x: f64) -> f64 {
        let pos = (ln_x - self.ln_min) / self.step;
        let i = pos.floor() as isize;
        if i < 1 || i as usize + 2 >= self.values.len() {
            return self.kernel.eval_ln(ln_x);
        }
        let i = i as usize;
        let t = pos - i as f64;
        let (f0, f1, f2, f3) = (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        // Lagrange nodes at -1, 0, 1, 2.
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3
    }
}

/// Result of [`mellin_profile`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileValue {
    pub value: f64,
    /// Set when h > y, where the integral vanishes identically.
    pub beyond_support: bool,
}

/// (1/2πi) ∫_(2) y^u h^{-u} u^{-(i+1)} du for 1 <= h, y > 1.
///
/// For h <= y the line is closed to the left onto a circle around the only
/// pole, u = 0, and the circle integral is done with the trapezoidal rule
/// (spectrally accurate for this periodic analytic integrand). The radius
/// sits at the saddle point i / log(y/h). For h > y the line closes to the
/// right and the integral is 0.
pub fn mellin_profile(i: u32, y: f64, h: f64) -> Result<ProfileValue> {
    if i == 0 {
        return Err(Error::Domain("profile index must be >= 1".into()));
    }
    if !(y > 1.0) || !(h >= 1.0) {
        return Err(Error::Domain(format!("need y > 1 and h >= 1, got y = {y}, h = {h}")));
    }
    if h > y {
        return Ok(ProfileValue { value: 0.0, beyond_support: true });
    }
    let ell = (y / h).ln();
    let radius = if ell > 0.0 { (i as f64 / ell).min(1e6) } else { 1.0 };
    let n = 32 + 2 * i as usize;
    let mut acc = 0.0;
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let u = Complex64::from_polar(radius, theta);
        acc += ((u * ell).exp() * u.powi(-(i as i32))).re;
    }
    Ok(ProfileValue { value: acc / n as f64, beyond_support: false })
}
