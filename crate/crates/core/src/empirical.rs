//! Brute-force checks at small q: mollifier values, empirical moments,
//! the non-vanishing census, and oracles for the averaging estimates.
//!
//! With L = log q, y₁ = q^ϑ₁, y₂ = q^ϑ₂, P[m] = P(log(y₁/m)/log y₁) and
//! Q[m] = Q(log(y₂/m)/log y₂):
//!
//! * ψ₁(χ) = Σ_{m ≤ y₁} μ(m) χ(m) P[m] / √m
//! * ψ₂(χ) = L⁻¹ Σ_{mn ≤ y₂} Λ(m) μ(n) χ̄(m) χ(n) Q[mn] / √(mn)
//!
//! The lengths are the integer floors of q^ϑ; P[m] and Q[m] use the real
//! logarithms ϑ log q.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accum::{CompensatedComplex, CompensatedSum};
use crate::arith::{gcd, phi_plus, ArithTables};
use crate::central::{central_values_smoothed, CentralValueSet};
use crate::characters::{batch_twisted_sum, batch_twisted_sum_residues, mod_inverse, CharacterLabel, CharacterTable};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, KernelTable};
use crate::limits;
use crate::moments::{lambda_exact, s1_main};
use crate::quadrature::GaussLegendre;
use crate::rational;
use crate::spec::MollifierSpec;

/// Default absolute threshold on |L(½, χ)| for the census.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;
/// Largest modulus for the 𝒜(h, k) oracle.
pub const MAX_TWISTED_MOMENT_Q: u64 = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierValues {
    pub q: u64,
    pub spec: MollifierSpec,
    pub y1: u64,
    pub y2: u64,
    pub characters: Vec<CharacterLabel>,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
}

impl MollifierValues {
    /// ψ = ψ₁ + ψ₂ per character.
    pub fn psi(&self) -> Vec<Complex64> {
        self.psi1.iter().zip(&self.psi2).map(|(a, b)| a + b).collect()
    }
}

/// Coefficient weights P[m] (or Q[m]) for 1 <= m <= y, index m − 1.
fn profile_weights(poly: &crate::poly::RationalPoly, ln_y: f64, y: u64) -> Vec<f64> {
    let c = poly.to_f64_coeffs();
    (1..=y)
        .map(|m| {
            if ln_y == 0.0 {
                // y = 1 forces m = 1, where the argument is 1.
                crate::jet::poly_eval(&c, 1.0)
            } else {
                crate::jet::poly_eval(&c, (ln_y - (m as f64).ln()) / ln_y)
            }
        })
        .collect()
}

struct Prepared {
    table: CharacterTable,
    chars: Vec<usize>,
    y1: u64,
    y2: u64,
    arith: ArithTables,
    p_w: Vec<f64>,
    q_w: Vec<f64>,
    ln_q: f64,
}

fn prepare(q: u64, spec: &MollifierSpec) -> Result<Prepared> {
    limits::check("q", q, limits::max_q())?;
    if q < 2 {
        return Err(Error::Domain(format!("mollifier values need q >= 2, got {q}")));
    }
    spec.validate()?;
    let (y1, y2) = spec.lengths(q)?;
    if y1 < 1 || y2 < 1 {
        return Err(Error::Precondition(format!("lengths must be at least 1, got y1 = {y1}, y2 = {y2}")));
    }
    let arith = ArithTables::build(y1.max(y2) as usize)?;
    let ln_q = (q as f64).ln();
    let table = CharacterTable::new(q)?;
    let chars = table.even_primitive();
    Ok(Prepared {
        p_w: profile_weights(&spec.p, rational::to_f64(&spec.theta1) * ln_q, y1),
        q_w: profile_weights(&spec.q, rational::to_f64(&spec.theta2) * ln_q, y2),
        table,
        chars,
        y1,
        y2,
        arith,
        ln_q,
    })
}

/// ψ₁ and ψ₂ for every even primitive character, through two batched
/// character sums. χ̄(m) χ(n) = χ(n m⁻¹) folds the ψ₂ double sum into one
/// residue vector.
pub fn mollifier_values(q: u64, spec: &MollifierSpec) -> Result<MollifierValues> {
    let pr = prepare(q, spec)?;
    let coeffs1: Vec<Complex64> = (1..=pr.y1)
        .map(|m| Complex64::new(pr.arith.mobius(m as usize) as f64 * pr.p_w[m as usize - 1] / (m as f64).sqrt(), 0.0))
        .collect();
    let sum1 = batch_twisted_sum(&coeffs1, &pr.table);

    let mut residues = vec![CompensatedSum::new(); q as usize];
    for m in 2..=pr.y2 {
        let lam = pr.arith.von_mangoldt(m as usize);
        if lam == 0.0 || gcd(m, q) != 1 {
            continue;
        }
        let m_inv = mod_inverse(m % q, q).expect("unit");
        for n in 1..=pr.y2 / m {
            let mu = pr.arith.mobius(n as usize);
            if mu == 0 || gcd(n, q) != 1 {
                continue;
            }
            let w = lam * mu as f64 * pr.q_w[(m * n) as usize - 1] / ((m * n) as f64).sqrt();
            residues[((n % q) as u128 * m_inv as u128 % q as u128) as usize].add(w);
        }
    }
    let residues: Vec<Complex64> = residues.iter().map(|s| Complex64::new(s.value() / pr.ln_q, 0.0)).collect();
    let sum2 = batch_twisted_sum_residues(&residues, &pr.table);

    Ok(MollifierValues {
        q,
        spec: spec.clone(),
        y1: pr.y1,
        y2: pr.y2,
        characters: pr.chars.iter().map(|&c| pr.table.label(c).clone()).collect(),
        psi1: pr.chars.iter().map(|&c| sum1[c]).collect(),
        psi2: pr.chars.iter().map(|&c| sum2[c]).collect(),
    })
}

/// Per-character triple loop; the reference for [`mollifier_values`].
pub fn mollifier_values_naive(q: u64, spec: &MollifierSpec) -> Result<MollifierValues> {
    let pr = prepare(q, spec)?;
    let t = &pr.table;
    let (psi1, psi2) = pr
        .chars
        .iter()
        .map(|&chi| {
            let mut a = CompensatedComplex::default();
            for m in 1..=pr.y1 {
                let w = pr.arith.mobius(m as usize) as f64 * pr.p_w[m as usize - 1] / (m as f64).sqrt();
                a.add(t.value(chi, m) * w);
            }
            let mut b = CompensatedComplex::default();
            for m in 1..=pr.y2 {
                for n in 1..=pr.y2 / m {
                    let w = pr.arith.von_mangoldt(m as usize)
                        * pr.arith.mobius(n as usize) as f64
                        * pr.q_w[(m * n) as usize - 1]
                        / ((m * n) as f64).sqrt();
                    b.add(t.value(chi, m).conj() * t.value(chi, n) * w);
                }
            }
            (a.value(), b.value() / pr.ln_q)
        })
        .unzip();
    Ok(MollifierValues {
        q,
        spec: spec.clone(),
        y1: pr.y1,
        y2: pr.y2,
        characters: pr.chars.iter().map(|&c| t.label(c).clone()).collect(),
        psi1,
        psi2,
    })
}

/// Moments rescaled by P(1), as if the mollifier were normalized to a
/// leading coefficient of 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMoments {
    pub p_at_one: f64,
    pub s1_emp: f64,
    pub s1_pred: f64,
    pub s2_emp: f64,
    pub s2_pred: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub q: u64,
    pub total_even_primitive: usize,
    pub nonzero_count: usize,
    pub threshold: f64,
    pub min_abs_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<u64>,
    pub s1_emp: Option<f64>,
    pub s1_pred: Option<f64>,
    pub s2_emp: Option<f64>,
    pub s2_pred: Option<f64>,
    /// |s1_emp − s1_pred|.
    pub dev1: Option<f64>,
    /// |s2_emp − s2_pred|.
    pub dev2: Option<f64>,
    pub rel_dev1: Option<f64>,
    pub rel_dev2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<NormalizedMoments>,
}

impl CensusRecord {
    pub fn nonvanishing_fraction(&self) -> Option<f64> {
        (self.total_even_primitive > 0).then(|| self.nonzero_count as f64 / self.total_even_primitive as f64)
    }
}

/// Counts the characters with |L(½, χ)| > threshold.
pub fn nonvanishing_census(values: &CentralValueSet, threshold: f64) -> Result<CensusRecord> {
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {threshold}")));
    }
    let abs: Vec<f64> = values.values.iter().map(|v| v.norm()).collect();
    Ok(CensusRecord {
        q: values.q,
        total_even_primitive: abs.len(),
        nonzero_count: abs.iter().filter(|&&a| a > threshold).count(),
        threshold,
        min_abs_l: abs.iter().copied().reduce(f64::min),
        y1: None,
        y2: None,
        s1_emp: None,
        s1_pred: None,
        s2_emp: None,
        s2_pred: None,
        dev1: None,
        dev2: None,
        rel_dev1: None,
        rel_dev2: None,
        normalized: None,
    })
}

/// s1_emp = Re Σ⁺ L ψ / φ⁺(q), s2_emp = Σ⁺ |L ψ|² / φ⁺(q), against
/// s1_main and lambda_exact. Reporting only; nothing is asserted.
pub fn empirical_moments(
    q: u64,
    spec: &MollifierSpec,
    values: &CentralValueSet,
    threshold: f64,
) -> Result<CensusRecord> {
    if values.q != q {
        return Err(Error::Consistency(format!("central values are for q = {}, not q = {q}", values.q)));
    }
    if values.alpha != 0.0 || values.s.im != 0.0 {
        return Err(Error::Consistency("empirical moments need central values at alpha = 0".into()));
    }
    let mut record = nonvanishing_census(values, threshold)?;
    let mv = mollifier_values(q, spec)?;
    if mv.characters != values.characters {
        return Err(Error::Consistency("mollifier and central values cover different characters".into()));
    }
    let norm = rational::to_f64(&phi_plus(q));
    let psi = mv.psi();
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for (l, m) in values.values.iter().zip(&psi) {
        let lm = l * m;
        s1.add(lm.re);
        s2.add(lm.norm_sqr());
    }
    let (s1_emp, s2_emp) = (s1.value() / norm, s2.value() / norm);
    let s1_pred = rational::to_f64(&s1_main(spec));
    let s2_pred = rational::to_f64(&lambda_exact(spec));
    let p1 = rational::to_f64(&spec.p.at_one());
    record.y1 = Some(mv.y1);
    record.y2 = Some(mv.y2);
    record.s1_emp = Some(s1_emp);
    record.s1_pred = Some(s1_pred);
    record.s2_emp = Some(s2_emp);
    record.s2_pred = Some(s2_pred);
    record.dev1 = Some((s1_emp - s1_pred).abs());
    record.dev2 = Some((s2_emp - s2_pred).abs());
    record.rel_dev1 = (s1_pred != 0.0).then(|| (s1_emp - s1_pred).abs() / s1_pred.abs());
    record.rel_dev2 = (s2_pred != 0.0).then(|| (s2_emp - s2_pred).abs() / s2_pred.abs());
    record.normalized = (p1 != 0.0).then(|| NormalizedMoments {
        p_at_one: p1,
        s1_emp: s1_emp / p1,
        s1_pred: s1_pred / p1,
        s2_emp: s2_emp / (p1 * p1),
        s2_pred: s2_pred / (p1 * p1),
    });
    Ok(record)
}

/// Smoothed central values at α = 0, then [`empirical_moments`].
pub fn census(q: u64, spec: &MollifierSpec, threshold: f64) -> Result<CensusRecord> {
    empirical_moments(q, spec, &central_values_smoothed(q, 0.0)?, threshold)
}

/// CSV columns: q, total, nonzero, min_abs_L, s1_emp, s1_pred, s2_emp,
/// s2_pred, dev1, dev2. Missing values are empty fields.
pub fn write_census_csv<W: Write>(rows: &[CensusRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["q", "total", "nonzero", "min_abs_L", "s1_emp", "s1_pred", "s2_emp", "s2_pred", "dev1", "dev2"])
        .map_err(err)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.q.to_string(),
            r.total_even_primitive.to_string(),
            r.nonzero_count.to_string(),
            opt(r.min_abs_l),
            opt(r.s1_emp),
            opt(r.s1_pred),
            opt(r.s2_emp),
            opt(r.s2_pred),
            opt(r.dev1),
            opt(r.dev2),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// Brute-force 𝒜(h, k) and its diagonal main term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedMoment {
    pub brute: Complex64,
    pub main: Complex64,
    pub difference: f64,
}

/// 𝒜(h, k) = Σ⁺ L(½+α, χ) χ̄(h) χ(k) over even primitive χ, and
/// φ⁺(q) Σ*_{mk=h} m^{-½-α} V(m / q^{1.1}).
pub fn oracle_twisted_moment(h: u64, k: u64, q: u64, alpha: f64) -> Result<TwistedMoment> {
    limits::check("q (averaging oracle)", q, MAX_TWISTED_MOMENT_Q)?;
    if h == 0 || k == 0 || gcd(h, q) != 1 || gcd(k, q) != 1 {
        return Err(Error::Precondition(format!("need h, k >= 1 and gcd(hk, q) = 1, got h = {h}, k = {k}, q = {q}")));
    }
    let values = central_values_smoothed(q, alpha)?;
    let table = CharacterTable::new(q)?;
    twisted_moment_from(&values, &table, h, k, alpha)
}

fn twisted_moment_from(values: &CentralValueSet, table: &CharacterTable, h: u64, k: u64, alpha: f64) -> Result<TwistedMoment> {
    let q = values.q;
    let mut acc = CompensatedComplex::default();
    for (label, l) in values.characters.iter().zip(&values.values) {
        acc.add(l * table.value(label.index, h).conj() * table.value(label.index, k));
    }
    let brute = acc.value();
    let mut main = 0.0;
    if h.is_multiple_of(k) && gcd(h / k, q) == 1 {
        let m = (h / k) as f64;
        let v = KernelTable::cached(KernelSpec::v())?;
        let ln_x = 1.1 * (q as f64).ln();
        main = rational::to_f64(&phi_plus(q)) * (-(0.5 + alpha) * m.ln()).exp() * v.eval_ln(m.ln() - ln_x);
    }
    let main = Complex64::new(main, 0.0);
    Ok(TwistedMoment { brute, main, difference: (brute - main).norm() })
}

/// Σ_{hk ≤ y, gcd(hk, q) = 1} |𝒜(h, k) − main| / √(hk).
pub fn twisted_moment_average(q: u64, y: u64, alpha: f64) -> Result<f64> {
    limits::check("q (averaging oracle)", q, MAX_TWISTED_MOMENT_Q)?;
    let values = central_values_smoothed(q, alpha)?;
    let table = CharacterTable::new(q)?;
    let pairs: Vec<(u64, u64)> =
        (1..=y).flat_map(|h| (1..=y / h).map(move |k| (h, k))).filter(|&(h, k)| gcd(h * k, q) == 1).collect();
    let terms: Vec<f64> = pairs
        .par_iter()
        .map(|&(h, k)| Ok(twisted_moment_from(&values, &table, h, k, alpha)?.difference / ((h * k) as f64).sqrt()))
        .collect::<Result<_>>()?;
    let mut s = CompensatedSum::new();
    for t in terms {
        s.add(t);
    }
    Ok(s.value())
}

/// Brute-force sum and main term of the divisor-sum asymptotic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OraclePair {
    pub lhs: f64,
    pub rhs: f64,
}

impl OraclePair {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

fn divisor_table(k: u32, n: f64) -> Result<Vec<u64>> {
    if !(1..=4).contains(&k) {
        return Err(Error::UnsupportedParameter(format!("k must be 1, 2, 3 or 4, got {k}")));
    }
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::Domain(format!("length must be at least 1, got {n}")));
    }
    limits::check("sieve length", n.floor() as u64, limits::max_sieve())?;
    ArithTables::build(n.floor() as usize)?.divisor_dk(k)
}

/// LHS = Σ_{n ≤ y₂} d_k(n)/n (y₂/n)^z F₁(log(y₁/n)/log y₁) F₂(log(y₂/n)/log y₂)
/// and RHS = (log y₂)^k/(k−1)! ∫₀¹ y₂^{zx} (1−x)^{k−1} F₁(1 − (1−x) log y₂/log y₁) F₂(x) dx.
pub fn oracle_divisor_sum(
    k: u32,
    z: f64,
    f1: impl Fn(f64) -> f64 + Sync,
    f2: impl Fn(f64) -> f64 + Sync,
    y1: f64,
    y2: f64,
) -> Result<OraclePair> {
    if !(y2 > 1.0 && y2 <= y1) {
        return Err(Error::Precondition(format!("need 1 < y2 <= y1, got y1 = {y1}, y2 = {y2}")));
    }
    let (l1, l2) = (y1.ln(), y2.ln());
    if z.abs() > 1.0 / l1 {
        return Err(Error::Precondition(format!("need |z| <= 1/log y1 = {}, got {z}", 1.0 / l1)));
    }
    let dk = divisor_table(k, y2)?;
    let mut lhs = CompensatedSum::new();
    for n in 1..=y2.floor() as usize {
        let ln_n = (n as f64).ln();
        lhs.add(dk[n] as f64 / n as f64 * (z * (l2 - ln_n)).exp() * f1((l1 - ln_n) / l1) * f2((l2 - ln_n) / l2));
    }
    let gl = GaussLegendre::cached(32);
    let mut integral = CompensatedSum::new();
    const PANELS: usize = 8;
    for p in 0..PANELS {
        let (a, b) = (p as f64 / PANELS as f64, (p + 1) as f64 / PANELS as f64);
        integral.add(gl.integrate(a, b, |x| {
            (z * x * l2).exp() * (1.0 - x).powi(k as i32 - 1) * f1(1.0 - (1.0 - x) * l2 / l1) * f2(x)
        }));
    }
    let fact: f64 = (1..k).map(f64::from).product();
    Ok(OraclePair { lhs: lhs.value(), rhs: l2.powi(k as i32) / fact * integral.value() })
}

/// LHS = Σ_{n ≤ y} d_k(n)/n (y/n)^σ and the shape (log y)^{k−1} min{|σ|⁻¹, log y}.
pub fn oracle_divisor_bound(k: u32, sigma: f64, y: f64) -> Result<OraclePair> {
    if !(-1.0..=0.0).contains(&sigma) {
        return Err(Error::Domain(format!("sigma must lie in [-1, 0], got {sigma}")));
    }
    let dk = divisor_table(k, y)?;
    let ly = y.ln();
    let mut lhs = CompensatedSum::new();
    for n in 1..=y.floor() as usize {
        lhs.add(dk[n] as f64 / n as f64 * (sigma * (ly - (n as f64).ln())).exp());
    }
    let min = if sigma == 0.0 { ly } else { (1.0 / sigma.abs()).min(ly) };
    Ok(OraclePair { lhs: lhs.value(), rhs: ly.powi(k as i32 - 1) * min })
}

/// The constant C making LHS ≤ C·shape at k = 1 across the σ grid.
pub fn calibrate_divisor_bound(y: f64, sigmas: &[f64]) -> Result<f64> {
    sigmas.iter().map(|&s| oracle_divisor_bound(1, s, y).map(|p| p.ratio())).try_fold(0.0, |acc, r| Ok(f64::max(acc, r?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RationalPoly;
    use crate::rational::ratio;

    fn quarter_headline() -> MollifierSpec {
        MollifierSpec::paper().with_thetas(ratio(1, 4), ratio(1, 4)).unwrap()
    }

    fn assert_same(a: &MollifierValues, b: &MollifierValues, tol: f64) {
        assert_eq!(a.characters, b.characters);
        for (x, y) in a.psi1.iter().zip(&b.psi1).chain(a.psi2.iter().zip(&b.psi2)) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn batch_matches_naive() {
        for q in [5, 7, 8, 12, 13, 16, 21, 37, 45, 50] {
            for spec in [MollifierSpec::paper(), quarter_headline(), MollifierSpec::paper().with_thetas(ratio(9, 10), ratio(7, 10)).unwrap()] {
                assert_same(&mollifier_values(q, &spec).unwrap(), &mollifier_values_naive(q, &spec).unwrap(), 1e-12);
            }
        }
    }

    #[test]
    fn q13_psi2_single_term() {
        let spec = MollifierSpec::paper().with_thetas(ratio(3, 10), ratio(3, 10)).unwrap();
        let mv = mollifier_values(13, &spec).unwrap();
        assert_eq!((mv.y1, mv.y2), (2, 2));
        let table = CharacterTable::new(13).unwrap();
        let ln_y2 = 0.3 * 13f64.ln();
        let q2 = 0.9 * (ln_y2 - 2f64.ln()) / ln_y2;
        for (label, v) in mv.characters.iter().zip(&mv.psi2) {
            let want = table.value(label.index, 2).conj() * (2f64.ln() * q2 / 2f64.sqrt() / 13f64.ln());
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn short_lengths() {
        // q = 7, ϑ = 1/3 ⇒ y₁ = y₂ = ⌊7^{1/3}⌋ = 1, so ψ₂ vanishes and ψ₁ = P(1).
        let mv = mollifier_values(7, &MollifierSpec::paper().with_thetas(ratio(1, 3), ratio(1, 3)).unwrap()).unwrap();
        assert_eq!((mv.y1, mv.y2), (1, 1));
        for (a, b) in mv.psi1.iter().zip(&mv.psi2) {
            assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            assert_eq!(*b, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn conjugation() {
        let q = 41;
        let mv = mollifier_values(q, &MollifierSpec::paper()).unwrap();
        let table = CharacterTable::new(q).unwrap();
        for (i, label) in mv.characters.iter().enumerate() {
            let j = mv.characters.iter().position(|l| l.index == table.conjugate(label.index)).unwrap();
            assert!((mv.psi1[i] - mv.psi1[j].conj()).norm() < 1e-12);
            assert!((mv.psi2[i] - mv.psi2[j].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn census_small_moduli() {
        for (q, total) in [(3, 0), (5, 1), (7, 2)] {
            let r = nonvanishing_census(&central_values_smoothed(q, 0.0).unwrap(), DEFAULT_THRESHOLD).unwrap();
            assert_eq!((r.total_even_primitive, r.nonzero_count), (total, total), "q = {q}");
        }
    }

    #[test]
    fn census_totals_match_character_counts() {
        for q in [5, 8, 12, 24, 101, 105] {
            let r = census(q, &MollifierSpec::paper(), DEFAULT_THRESHOLD).unwrap();
            assert_eq!(r.total_even_primitive, CharacterTable::new(q).unwrap().even_primitive().len());
            assert!(r.nonzero_count <= r.total_even_primitive);
        }
    }

    #[test]
    fn unit_mollifier_gives_first_moment() {
        // P = x with y₁ = 1 and Q = 0 makes ψ ≡ 1.
        let spec = MollifierSpec::is_baseline().with_thetas(ratio(1, 10), ratio(1, 10)).unwrap();
        let q = 101;
        let values = central_values_smoothed(q, 0.0).unwrap();
        let r = empirical_moments(q, &spec, &values, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.y1, Some(1));
        let mean: f64 = values.values.iter().map(|v| v.re).sum::<f64>() / rational::to_f64(&phi_plus(q));
        assert!((r.s1_emp.unwrap() - mean).abs() < 1e-12);
        assert_eq!(r.s1_pred, Some(1.0));
    }

    #[test]
    fn moments_satisfy_cauchy_schwarz() {
        for q in [101, 1009] {
            let r = census(q, &quarter_headline(), DEFAULT_THRESHOLD).unwrap();
            let (s1, s2) = (r.s1_emp.unwrap(), r.s2_emp.unwrap());
            assert!(s2.is_finite() && s2 > 0.0 && s2 > s1 * s1);
            let n = r.normalized.unwrap();
            assert!((n.s1_emp - s1 / n.p_at_one).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_inputs() {
        let values = central_values_smoothed(13, 0.0).unwrap();
        assert!(matches!(empirical_moments(11, &MollifierSpec::paper(), &values, 1e-8), Err(Error::Consistency(_))));
        let shifted = central_values_smoothed(13, 0.1).unwrap();
        assert!(empirical_moments(13, &MollifierSpec::paper(), &shifted, 1e-8).is_err());
    }

    #[test]
    fn census_csv() {
        let rows = vec![census(5, &MollifierSpec::paper(), DEFAULT_THRESHOLD).unwrap()];
        let mut buf = Vec::new();
        write_census_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "q,total,nonzero,min_abs_L,s1_emp,s1_pred,s2_emp,s2_pred,dev1,dev2");
        assert!(lines.next().unwrap().starts_with("5,1,1,"));
    }

    #[test]
    fn twisted_moment_diagonal() {
        let q = 101;
        let phi = rational::to_f64(&phi_plus(q));
        // V(x) = ½ erfc(ln x / 2).
        let v = |m: f64| 0.5 * statrs::function::erf::erfc((m.ln() - 1.1 * (q as f64).ln()) / 2.0);
        let r = oracle_twisted_moment(1, 1, q, 0.0).unwrap();
        assert!((r.main.re - phi * v(1.0)).abs() < 1e-8 * phi);
        assert!((r.main.re - phi).abs() < 1e-3 * phi);
        let r = oracle_twisted_moment(2, 1, q, 0.0).unwrap();
        assert!((r.main.re - phi * v(2.0) / 2f64.sqrt()).abs() < 1e-8 * phi);
        assert_eq!(oracle_twisted_moment(1, 2, q, 0.0).unwrap().main, Complex64::new(0.0, 0.0));
        assert!(oracle_twisted_moment(101, 1, q, 0.0).is_err());
    }

    #[test]
    fn twisted_moment_average_growth() {
        // Weak form of Σ_{hk ≤ y} E₁/√(hk) ≪ (yq)^{1/2+ε}: the normalized
        // sum stays bounded as y grows.
        let q = 101;
        let c: Vec<f64> =
            [4u64, 16, 64].iter().map(|&y| twisted_moment_average(q, y, 0.0).unwrap() / ((y * q) as f64).powf(0.6)).collect();
        let cal = c[0];
        assert!(c.iter().all(|&x| x <= 2.0 * cal), "{c:?}");
    }

    #[test]
    fn divisor_sum_examples() {
        let one = |_: f64| 1.0;
        let y = 10f64.exp();
        let r = oracle_divisor_sum(1, 0.0, one, one, y, y).unwrap();
        assert!((r.rhs - 10.0).abs() < 1e-12);
        assert!((r.lhs - 10.577).abs() < 1e-3 && (r.lhs - r.rhs).abs() <= 2.0);
        let ratios: Vec<f64> = [8.0f64, 10.0, 12.0]
            .iter()
            .map(|&l| oracle_divisor_sum(2, 0.0, one, one, l.exp(), l.exp()).unwrap().ratio())
            .collect();
        assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()), "{ratios:?}");
    }

    #[test]
    fn divisor_sum_profiles() {
        // y₁ = y₂ collapses F₁'s argument to x.
        let p = RationalPoly::from_linear_up(vec![ratio(21, 20), ratio(-1, 20)]).to_f64_coeffs();
        let f = |x: f64| crate::jet::poly_eval(&p, x);
        let y = 9f64.exp();
        let a = oracle_divisor_sum(2, 0.05, f, |x| x, y, y).unwrap();
        let b = oracle_divisor_sum(2, 0.05, |x| x, f, y, y).unwrap();
        assert!((a.rhs - b.rhs).abs() < 1e-10 * a.rhs.abs());
        assert!((a.lhs - a.rhs).abs() < 9.0);
        assert!(oracle_divisor_sum(5, 0.0, f, f, y, y).is_err());
        assert!(oracle_divisor_sum(1, 0.5, f, f, y, y).is_err());
    }

    #[test]
    fn divisor_bound_shape() {
        let y = 10f64.exp();
        let r = oracle_divisor_bound(1, 0.0, y).unwrap();
        assert!((r.rhs - 10.0).abs() < 1e-12 && (r.lhs - 10.0).abs() < 1.0);
        assert!(oracle_divisor_bound(1, -1.0, y).unwrap().lhs <= 1.0);
        let sigmas: Vec<f64> = (0..=20).map(|i| -(i as f64) / 20.0).collect();
        let c = calibrate_divisor_bound(y, &sigmas).unwrap();
        for k in 1..=4 {
            let mut prev = f64::INFINITY;
            for &s in &sigmas {
                let p = oracle_divisor_bound(k, s, y).unwrap();
                assert!(p.lhs <= prev, "k = {k}, sigma = {s}");
                prev = p.lhs;
                assert!(p.ratio() <= c * 1.0000001, "k = {k}, sigma = {s}: {} > {c}", p.ratio());
            }
        }
        assert!(oracle_divisor_bound(1, 0.5, y).is_err());
    }
}
