//! Shifted moments I(α), J₁(α, β), J₂(α, β) as main terms per φ⁺(q).
//!
//! J₁ and J₂ are mixed derivatives ∂ₐ∂_b at a = b = 0 of integrals over
//! (t, x, u, v). The integrands are written once, generic over
//! [`Scalar`]; evaluating them on [`Jet11`] gives the derivative exactly,
//! evaluating them on `f64` feeds the finite-difference cross-check.
//!
//! Every factor y₁^z, y₂^z, q^z is carried through its logarithm:
//! log y₁ = ϑ₁L, log y₂ = ϑ₂L, L = log q.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{poly_eval, Jet11, Scalar};
use crate::quadrature::GaussLegendre;
use crate::rational::to_f64;
use crate::spec::MollifierSpec;

/// Largest |α|, |β| accepted, in units of 1/log q.
pub const SHIFT_LIMIT: f64 = 10.0;

/// Step and node-doubling tolerance of the derivative cross-checks.
pub const FD_STEP: f64 = 1e-3;
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedQuadrature {
    /// Nodes per axis for one- and two-dimensional integrals.
    pub low_dim_nodes: usize,
    /// Nodes per axis for integrals of dimension three and up.
    pub high_dim_nodes: usize,
    /// Re-run with doubled nodes and fail if the value moves by more than
    /// [`CONVERGENCE_TOL`].
    pub check_convergence: bool,
}

impl Default for ShiftedQuadrature {
    fn default() -> Self {
        Self { low_dim_nodes: 64, high_dim_nodes: 32, check_convergence: true }
    }
}

impl ShiftedQuadrature {
    fn doubled(self) -> Self {
        Self { low_dim_nodes: 2 * self.low_dim_nodes, high_dim_nodes: 2 * self.high_dim_nodes, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Jet,
    Richardson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedMomentResult {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
    pub method: DerivativeMethod,
    pub quadrature: ShiftedQuadrature,
    /// |value(2n nodes) − value(n nodes)| when the check ran.
    pub refinement_delta: Option<f64>,
}

/// ∫₀¹ e^{−c(1−x)} x^k dx.
///
/// Power series in c while |c| < k + 1 (terms decrease monotonically),
/// otherwise the recurrence I_k = (1 − k I_{k−1}) / c, which is stable once
/// k <= |c|.
pub fn shifted_i_monomial(k: usize, c: f64) -> f64 {
    if c.abs() < (k + 1) as f64 {
        shifted_i_series(k, c)
    } else {
        shifted_i_closed(k, c)
    }
}

fn shifted_i_series(k: usize, c: f64) -> f64 {
    // Σ_j (−c)^j k!/(j+k+1)!
    let mut term = 1.0 / (k + 1) as f64;
    let mut sum = term;
    for j in 1..200 {
        term *= -c / (j + k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn shifted_i_closed(k: usize, c: f64) -> f64 {
    let mut acc = -(-c).exp_m1() / c;
    for j in 1..=k {
        acc = (1.0 - j as f64 * acc) / c;
    }
    acc
}

/// ϑ₂ ∫₀¹ e^{−c(1−x)} Q(x) dx − (ϑ₂/2) Q₁(1) with c = α log y₂.
pub fn shifted_i(spec: &MollifierSpec, alpha_log_y2: f64) -> f64 {
    let theta2 = to_f64(&spec.theta2);
    let integral: f64 = spec
        .q
        .to_f64_coeffs()
        .iter()
        .enumerate()
        .map(|(k, qk)| qk * shifted_i_monomial(k, alpha_log_y2))
        .sum();
    theta2 * integral - theta2 / 2.0 * to_f64(&spec.q.antiderivative().at_one())
}

/// ∫₀¹ e^{−k t} dt by Gauss–Legendre with `nodes` points.
pub fn t_average(k: f64, nodes: usize) -> f64 {
    t_average_generic(k, &GaussLegendre::cached(nodes))
}

fn t_average_generic<S: Scalar>(k: S, rule: &GaussLegendre) -> S {
    let mut acc = S::constant(0.0);
    for (t, w) in rule.on(0.0, 1.0) {
        acc += (-k.scale(t)).exp().scale(w);
    }
    acc
}

/// Everything the integrands need, in floating point.
struct Context {
    theta1: f64,
    theta2: f64,
    log_q: f64,
    alpha: f64,
    beta: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    q1: Vec<f64>,
}

impl Context {
    fn new(spec: &MollifierSpec, q: u64, alpha: f64, beta: f64) -> Result<Self> {
        if q < 3 {
            return Err(Error::Domain(format!("shifted moments need q >= 3, got {q}")));
        }
        let log_q = (q as f64).ln();
        let limit = SHIFT_LIMIT / log_q;
        if !(alpha.abs() <= limit && beta.abs() <= limit) {
            return Err(Error::Domain(format!(
                "shifts must satisfy |α|, |β| <= {SHIFT_LIMIT}/log q = {limit:.6}, got α = {alpha}, β = {beta}"
            )));
        }
        spec.validate()?;
        Ok(Self {
            theta1: to_f64(&spec.theta1),
            theta2: to_f64(&spec.theta2),
            log_q,
            alpha,
            beta,
            p: spec.p.to_f64_coeffs(),
            q: spec.q.to_f64_coeffs(),
            q1: spec.q.antiderivative().to_f64_coeffs(),
        })
    }

    /// exp(e · log y₂) · ∫₀¹ (q y₂^s)^{−(α+β)t} dt · (1 + ϑ₂ s).
    fn j2_weight<S: Scalar>(&self, e: S, s: S, t_rule: &GaussLegendre) -> S {
        let l2 = self.theta2 * self.log_q;
        let w = S::constant(1.0) + s.scale(self.theta2);
        let k = w.scale((self.alpha + self.beta) * self.log_q);
        e.scale(l2).exp() * t_average_generic(k, t_rule) * w
    }

    fn j1<S: Scalar + Send + Sync>(&self, a: S, b: S, quad: ShiftedQuadrature) -> S {
        let (t1, t2, lq) = (self.theta1, self.theta2, self.log_q);
        let (al, be) = (self.alpha, self.beta);
        let (l1, l2) = (t1 * lq, t2 * lq);
        let hi = GaussLegendre::cached(quad.high_dim_nodes);
        let lo = GaussLegendre::cached(quad.low_dim_nodes);
        let one = S::constant(1.0);
        let base = |x: f64| 1.0 - t2 * (1.0 - x) / t1;

        // (ϑ₂/ϑ₁) ∫∫∫_{0<=u<=x} y₁^{βa} y₂^{αb−βu} (q y₁^a y₂^{b−u})^{−(α+β)t}
        //   (1 + ϑ₁a + ϑ₂(b−u)) P(base(x) + a) Q(x − u + b)
        let cells: Vec<S> = hi
            .on(0.0, 1.0)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(x, wx)| {
                let px = poly_eval(&self.p, S::constant(base(x)) + a);
                let mut acc = S::constant(0.0);
                for (u, wu) in hi.on(0.0, x) {
                    let w = one + a.scale(t1) + (b - S::constant(u)).scale(t2);
                    let expo = a.scale(be * l1) + b.scale(al * l2) - S::constant(be * u * l2);
                    let tavg = t_average_generic(w.scale((al + be) * lq), &hi);
                    acc += (expo.exp() * tavg * w * px * poly_eval(&self.q, S::constant(x - u) + b)).scale(wu);
                }
                acc.scale(wx)
            })
            .collect();
        let term_a = sum(cells).scale(t2 / t1);

        // −(ϑ₂/(2ϑ₁)) ∫∫ y₁^{βa} y₂^{αb} (q y₁^a y₂^b)^{−(α+β)t} (1 + ϑ₁a + ϑ₂b)
        //   P(base(x) + a) Q₁(x + b)
        let w = one + a.scale(t1) + b.scale(t2);
        let expo = a.scale(be * l1) + b.scale(al * l2);
        let outer = expo.exp() * t_average_generic(w.scale((al + be) * lq), &lo) * w;
        let mut inner = S::constant(0.0);
        for (x, wx) in lo.on(0.0, 1.0) {
            let px = poly_eval(&self.p, S::constant(base(x)) + a);
            inner += (px * poly_eval(&self.q1, S::constant(x) + b)).scale(wx);
        }
        let term_b = (outer * inner).scale(-t2 / (2.0 * t1));
        term_a + term_b
    }

    fn j2<S: Scalar + Send + Sync>(&self, a: S, b: S, quad: ShiftedQuadrature) -> S {
        let t2 = self.theta2;
        let (al, be) = (self.alpha, self.beta);
        let hi = GaussLegendre::cached(quad.high_dim_nodes);
        let lo = GaussLegendre::cached(quad.low_dim_nodes);
        let c = S::constant;
        let qq = |x: f64, shift: S| poly_eval(&self.q, c(x) + shift);
        let qq1 = |x: f64, shift: S| poly_eval(&self.q1, c(x) + shift);
        let ab = a + b;
        let cross = b.scale(al) + a.scale(be);

        // (ϑ₂/2) ∫ (1−x)² Q(x+a) Q(x+b) and (ϑ₂/4) ∫ Q₁(x+a) Q₁(x+b), same weight.
        let weight = self.j2_weight(cross, ab, &lo);
        let mut t1 = c(0.0);
        let mut t5 = c(0.0);
        for (x, wx) in lo.on(0.0, 1.0) {
            t1 += (qq(x, a) * qq(x, b)).scale(wx * (1.0 - x) * (1.0 - x));
            t5 += (qq1(x, a) * qq1(x, b)).scale(wx);
        }
        let t1 = (weight * t1).scale(t2 / 2.0);
        let t5 = (weight * t5).scale(t2 / 4.0);

        let x_nodes: Vec<(f64, f64)> = hi.on(0.0, 1.0).collect();
        // ϑ₂ ∫∫∫_{u,v<=x} weight(αb+βa−αu−βv, a+b−u−v) Q(x−u+a) Q(x−v+b)
        let t2_cells: Vec<S> = x_nodes
            .par_iter()
            .map(|&(x, wx)| {
                let mut acc = c(0.0);
                for (u, wu) in hi.on(0.0, x) {
                    let qa = qq(x - u, a);
                    for (v, wv) in hi.on(0.0, x) {
                        let e = cross - c(al * u + be * v);
                        let s = ab - c(u + v);
                        acc += (self.j2_weight(e, s, &hi) * qa * qq(x - v, b)).scale(wu * wv);
                    }
                }
                acc.scale(wx)
            })
            .collect();
        let t2_term = sum(t2_cells).scale(t2);

        // −(ϑ₂/2) ∫∫_{u<=x} weight(αb+βa−αu, a+b−u) Q(x−u+a) Q₁(x+b), and the
        // term with exponent αa+βb−βu in place of αb+βa−αu.
        let t34_cells: Vec<S> = x_nodes
            .par_iter()
            .map(|&(x, wx)| {
                let q1b = qq1(x, b);
                let own = a.scale(al) + b.scale(be);
                let mut acc = c(0.0);
                for (u, wu) in hi.on(0.0, x) {
                    let s = ab - c(u);
                    let w3 = self.j2_weight(cross - c(al * u), s, &hi);
                    let w4 = self.j2_weight(own - c(be * u), s, &hi);
                    acc += ((w3 + w4) * qq(x - u, a) * q1b).scale(wu);
                }
                acc.scale(wx)
            })
            .collect();
        let t34 = sum(t34_cells).scale(-t2 / 2.0);

        t1 + t2_term + t34 + t5
    }
}

fn sum<S: Scalar>(cells: Vec<S>) -> S {
    cells.into_iter().fold(S::constant(0.0), |acc, c| acc + c)
}

#[derive(Clone, Copy)]
enum Which {
    J1,
    J2,
}

impl Context {
    fn eval<S: Scalar + Send + Sync>(&self, which: Which, a: S, b: S, quad: ShiftedQuadrature) -> S {
        match which {
            Which::J1 => self.j1(a, b, quad),
            Which::J2 => self.j2(a, b, quad),
        }
    }

    fn jet(&self, which: Which, quad: ShiftedQuadrature) -> f64 {
        self.eval(which, Jet11::var_a(0.0), Jet11::var_b(0.0), quad).fab
    }

    /// Central second difference in (a, b), Richardson-extrapolated.
    fn richardson(&self, which: Which, quad: ShiftedQuadrature, h: f64) -> f64 {
        let d = |h: f64| {
            let f = |a: f64, b: f64| self.eval(which, a, b, quad);
            (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
        };
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }
}

fn run(
    spec: &MollifierSpec,
    q: u64,
    alpha: f64,
    beta: f64,
    quad: ShiftedQuadrature,
    method: DerivativeMethod,
    which: Which,
) -> Result<ShiftedMomentResult> {
    let ctx = Context::new(spec, q, alpha, beta)?;
    let value_at = |quad| match method {
        DerivativeMethod::Jet => ctx.jet(which, quad),
        DerivativeMethod::Richardson => ctx.richardson(which, quad, FD_STEP),
    };
    let value = value_at(quad);
    let refinement_delta = if quad.check_convergence {
        let delta = (value_at(quad.doubled()) - value).abs();
        if delta > CONVERGENCE_TOL {
            return Err(Error::Accuracy(format!(
                "quadrature not converged: doubling nodes moved the value by {delta:e}"
            )));
        }
        Some(delta)
    } else {
        None
    };
    Ok(ShiftedMomentResult { value, alpha, beta, method, quadrature: quad, refinement_delta })
}

/// J₁(α, β)/φ⁺(q): the cross moment of ψ₁ and ψ̄₂.
pub fn shifted_j1(
    spec: &MollifierSpec,
    q: u64,
    alpha: f64,
    beta: f64,
    quad: ShiftedQuadrature,
    method: DerivativeMethod,
) -> Result<ShiftedMomentResult> {
    run(spec, q, alpha, beta, quad, method, Which::J1)
}

/// J₂(α, β)/φ⁺(q): the |ψ₂|² moment.
pub fn shifted_j2(
    spec: &MollifierSpec,
    q: u64,
    alpha: f64,
    beta: f64,
    quad: ShiftedQuadrature,
    method: DerivativeMethod,
) -> Result<ShiftedMomentResult> {
    run(spec, q, alpha, beta, quad, method, Which::J2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::corollary_terms;
    use crate::poly::RationalPoly;
    use crate::rational::{int, ratio};

    const Q: u64 = 10007;

    fn shifts() -> (f64, f64) {
        let l = (Q as f64).ln();
        (1.0 / l, -0.5 / l)
    }

    fn fast() -> ShiftedQuadrature {
        ShiftedQuadrature { check_convergence: false, ..Default::default() }
    }

    #[test]
    fn i_monomial_branches_agree() {
        for k in 0..8 {
            // Overlap where the recurrence is stable and the series has not
            // yet lost digits to cancellation.
            for c in [-12.0f64, -7.5, -3.0, -1.0, 1.0, 3.0, 7.5, 12.0].into_iter().filter(|c: &f64| c.abs() >= k as f64) {
                let s = shifted_i_series(k, c);
                let r = shifted_i_closed(k, c);
                assert!((s - r).abs() < 1e-9 * s.abs().max(1e-3), "k = {k}, c = {c}: {s} vs {r}");
            }
        }
        assert!((shifted_i_monomial(1, 1.0) - (-1f64).exp()).abs() < 1e-15);
        assert!((shifted_i_monomial(0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn i_monomial_matches_quadrature() {
        let rule = GaussLegendre::new(80);
        for k in 0..10 {
            for c in [-9.0, -2.5, 0.0, 0.7, 4.0, 15.0, 30.0] {
                let direct = rule.integrate(0.0, 1.0, |x| (-c * (1.0 - x)).exp() * x.powi(k as i32));
                let got = shifted_i_monomial(k, c);
                assert!((got - direct).abs() < 1e-13 * direct.abs().max(1.0), "k = {k}, c = {c}");
            }
        }
    }

    #[test]
    fn shifted_i_examples() {
        let paper = MollifierSpec::paper();
        assert!((shifted_i(&paper, 0.0) - 9.0 / 80.0).abs() < 1e-15);
        let spec = MollifierSpec { q: RationalPoly::monomial(1), ..MollifierSpec::is_baseline() };
        let want = 1.0 / (2.0 * std::f64::consts::E) - 1.0 / 8.0;
        assert!((shifted_i(&spec, 1.0) - want).abs() < 1e-15);
        assert_eq!(shifted_i(&MollifierSpec::is_baseline(), 2.0), 0.0);
    }

    #[test]
    fn t_average_identity() {
        // log z ∫₀¹ z^{−(α+β)t} dt = (1 − z^{−(α+β)}) / (α+β).
        for z in [2.0, 10.0, Q as f64] {
            for s in [1e-3, 1e-5] {
                let lz = f64::ln(z);
                let lhs = lz * t_average(s * lz, 64);
                let rhs = -(-s * lz).exp_m1() / s;
                assert!((lhs - rhs).abs() < 1e-12 * rhs.abs(), "z = {z}, α+β = {s}");
            }
        }
    }

    #[test]
    fn zero_shift_matches_closed_forms() {
        let spec = MollifierSpec::paper();
        let c = corollary_terms(&spec);
        let j1 = shifted_j1(&spec, Q, 0.0, 0.0, Default::default(), DerivativeMethod::Jet).unwrap();
        let j2 = shifted_j2(&spec, Q, 0.0, 0.0, Default::default(), DerivativeMethod::Jet).unwrap();
        assert!((j1.value - to_f64(&c.cross)).abs() < 1e-10, "{}", j1.value);
        assert!((j2.value - to_f64(&c.second)).abs() < 1e-10, "{}", j2.value);
        assert!(j1.refinement_delta.unwrap() < CONVERGENCE_TOL);
    }

    #[test]
    fn zero_shift_closed_forms_for_other_specs() {
        let spec = MollifierSpec {
            theta1: ratio(2, 5),
            theta2: ratio(1, 4),
            p: RationalPoly::from_linear_up(vec![int(2), ratio(-1, 3), ratio(1, 7)]),
            q: RationalPoly::from_linear_up(vec![ratio(1, 2), ratio(3, 5)]),
            q_for_lengths: None,
        };
        let c = corollary_terms(&spec);
        let j1 = shifted_j1(&spec, 101, 0.0, 0.0, fast(), DerivativeMethod::Jet).unwrap();
        let j2 = shifted_j2(&spec, 101, 0.0, 0.0, fast(), DerivativeMethod::Jet).unwrap();
        assert!((j1.value - to_f64(&c.cross)).abs() < 1e-10);
        assert!((j2.value - to_f64(&c.second)).abs() < 1e-10);
    }

    #[test]
    fn vanishing_polynomials_give_zero() {
        let no_q = MollifierSpec::is_baseline();
        let no_p = MollifierSpec { p: RationalPoly::zero(), ..MollifierSpec::paper() };
        let (a, b) = shifts();
        for spec in [&no_q, &no_p] {
            assert_eq!(shifted_j1(spec, Q, a, b, fast(), DerivativeMethod::Jet).unwrap().value, 0.0);
        }
        assert_eq!(shifted_j2(&no_q, Q, a, b, fast(), DerivativeMethod::Jet).unwrap().value, 0.0);
    }

    #[test]
    fn jets_match_richardson() {
        let spec = MollifierSpec::paper();
        let (a, b) = shifts();
        for f in [shifted_j1, shifted_j2] {
            let jet = f(&spec, Q, a, b, fast(), DerivativeMethod::Jet).unwrap().value;
            let fd = f(&spec, Q, a, b, fast(), DerivativeMethod::Richardson).unwrap().value;
            assert!((jet - fd).abs() < 1e-6 * jet.abs(), "{jet} vs {fd}");
        }
    }

    #[test]
    fn j2_is_symmetric() {
        let spec = MollifierSpec::paper();
        let (a, b) = shifts();
        let ab = shifted_j2(&spec, Q, a, b, fast(), DerivativeMethod::Jet).unwrap().value;
        let ba = shifted_j2(&spec, Q, b, a, fast(), DerivativeMethod::Jet).unwrap().value;
        assert!((ab - ba).abs() < 1e-10, "{ab} vs {ba}");
    }

    #[test]
    fn shifted_values_converge() {
        let spec = MollifierSpec::paper();
        let (a, b) = shifts();
        for f in [shifted_j1, shifted_j2] {
            let r = f(&spec, Q, a, b, Default::default(), DerivativeMethod::Jet).unwrap();
            assert!(r.refinement_delta.unwrap() < CONVERGENCE_TOL);
        }
    }

    #[test]
    fn oversized_shifts_are_rejected() {
        let spec = MollifierSpec::paper();
        let big = 11.0 / (Q as f64).ln();
        assert!(matches!(shifted_j1(&spec, Q, big, 0.0, fast(), DerivativeMethod::Jet), Err(Error::Domain(_))));
    }
}
