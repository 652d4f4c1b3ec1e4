//! L(½ + α, χ) for every even primitive character mod q.
//!
//! Three independent evaluators:
//!
//! * [`central_values_smoothed`]: the symmetric incomplete-gamma functional
//!   equation, O(√q) terms per character, batched over characters.
//! * [`central_values_vkernel`]: the one-sided sum Σ χ(m) m^{-½-α} V(m/X)
//!   with X = q^{1+ε}. This is an asymptotic representation whose
//!   remainder decays like a power of q^{-ε}; at small q it is visible.
//! * [`central_values_hurwitz`]: q^{-s} Σ_a χ(a) ζ(s, a/q) with an
//!   Euler–Maclaurin Hurwitz zeta.
//!
//! [`pair_product_afe`] evaluates L(½+α, χ) L(½+β, χ̄) by the double sums
//! with W± kernels.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::accum::{CompensatedComplex, CompensatedSum};
use crate::arith::{factorize, gcd};
use crate::characters::{batch_twisted_sum, batch_twisted_sum_residues, CharacterLabel, CharacterTable};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, KernelTable};
use crate::limits;

/// Largest composite modulus accepted by the smoothed evaluator.
pub const MAX_COMPOSITE_Q: u64 = 10_000;
/// Largest modulus for the V-sum and Hurwitz oracles.
pub const MAX_ORACLE_Q: u64 = 2_000;
/// Largest modulus for the pair-product oracle.
pub const MAX_PAIR_Q: u64 = 500;
/// Smoothed-sum terms are dropped once both kernels fall below this.
pub const SMOOTHED_KERNEL_CUTOFF: f64 = 1e-15;
/// ε in X = q^{1+ε} for the V-sum.
pub const DEFAULT_V_EPSILON: f64 = 0.1;
/// The V-sum and pair sums stop at X·e^{c} with c this constant.
pub const DEFAULT_TRUNCATION_LOG: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralMethod {
    SmoothedAfe,
    VKernelSum,
    Hurwitz,
}

impl CentralMethod {
    pub fn code(self) -> u64 {
        match self {
            CentralMethod::SmoothedAfe => 0,
            CentralMethod::VKernelSum => 1,
            CentralMethod::Hurwitz => 2,
        }
    }

    pub fn from_code(code: u64) -> Result<Self> {
        match code {
            0 => Ok(CentralMethod::SmoothedAfe),
            1 => Ok(CentralMethod::VKernelSum),
            2 => Ok(CentralMethod::Hurwitz),
            _ => Err(Error::Parse(format!("unknown central-value method code {code}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CentralMethod::SmoothedAfe => "smoothed_afe",
            CentralMethod::VKernelSum => "v_kernel_sum",
            CentralMethod::Hurwitz => "hurwitz",
        }
    }
}

/// Values at s = ½ + α (or at the given s for the Hurwitz method), one per
/// even primitive character in table order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralValueSet {
    pub q: u64,
    pub alpha: f64,
    pub s: Complex64,
    pub method: CentralMethod,
    pub characters: Vec<CharacterLabel>,
    pub values: Vec<Complex64>,
    /// Root numbers ε_χ = τ(χ)/√q.
    pub epsilon: Vec<Complex64>,
}

impl CentralValueSet {
    fn empty(q: u64, s: Complex64, method: CentralMethod) -> Self {
        Self { q, alpha: s.re - 0.5, s, method, characters: Vec::new(), values: Vec::new(), epsilon: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Position of the character with table index `chi`.
    pub fn position(&self, chi: usize) -> Option<usize> {
        self.characters.iter().position(|c| c.index == chi)
    }

    /// Position of χ̄ for each entry; the set is closed under conjugation.
    pub fn conjugate_positions(&self, table: &CharacterTable) -> Vec<usize> {
        self.characters
            .iter()
            .map(|c| self.position(table.conjugate(c.index)).expect("even primitive set is closed under conjugation"))
            .collect()
    }

    /// |L(χ) − ε_χ L(χ̄)| for every entry.
    pub fn fe_residuals(&self, table: &CharacterTable) -> Vec<f64> {
        let conj = self.conjugate_positions(table);
        (0..self.len()).map(|i| (self.values[i] - self.epsilon[i] * self.values[conj[i]]).norm()).collect()
    }

    /// Largest |L_self − L_other| over characters; the sets must match.
    pub fn max_difference(&self, other: &CentralValueSet) -> Result<f64> {
        if self.q != other.q || self.characters != other.characters {
            return Err(Error::Consistency("central-value sets cover different characters".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

fn is_prime(q: u64) -> bool {
    q >= 2 && factorize(q) == vec![(q, 1)]
}

fn check_shift(q: u64, alpha: f64) -> Result<()> {
    let limit = 10.0 / (q as f64).ln();
    if !alpha.is_finite() || alpha.abs() > limit {
        return Err(Error::Domain(format!("|alpha| must be at most 10/log q = {limit:.4}, got {alpha}")));
    }
    Ok(())
}

type Setup = (CharacterTable, Vec<usize>, Vec<Complex64>);

/// Table, even primitive characters and their root numbers, or `None`
/// below q = 5 where there are none.
fn setup(q: u64) -> Result<Option<Setup>> {
    limits::check("q", q, limits::max_q())?;
    if q < 5 {
        return Ok(None);
    }
    let table = CharacterTable::new(q)?;
    let chars = table.even_primitive();
    let eps = root_numbers(&table, &chars);
    Ok(Some((table, chars, eps)))
}

/// τ(χ)/√q for the listed characters, all Gauss sums from one batched
/// transform of a ↦ e(a/q).
pub fn root_numbers(table: &CharacterTable, chars: &[usize]) -> Vec<Complex64> {
    let q = table.modulus();
    let residues: Vec<Complex64> =
        (0..q).map(|a| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a as f64 / q as f64)).collect();
    let tau = batch_twisted_sum_residues(&residues, table);
    let root_q = (q as f64).sqrt();
    chars.iter().map(|&c| tau[c] / root_q).collect()
}

fn assemble(
    q: u64,
    s: Complex64,
    method: CentralMethod,
    table: &CharacterTable,
    chars: Vec<usize>,
    epsilon: Vec<Complex64>,
    all: &[Complex64],
) -> CentralValueSet {
    CentralValueSet {
        q,
        alpha: s.re - 0.5,
        s,
        method,
        values: chars.iter().map(|&c| all[c]).collect(),
        characters: chars.iter().map(|&c| table.label(c).clone()).collect(),
        epsilon,
    }
}

/// L(½+α, χ) = Σ χ(n) n^{-s} Q(s/2, πn²/q) +
///     ε_χ (q/π)^{-α} Γ((1−s)/2)/Γ(s/2) Σ χ̄(n) n^{s−1} Q((1−s)/2, πn²/q),
/// with s = ½ + α and Q the regularized upper incomplete gamma function.
pub fn central_values_smoothed(q: u64, alpha: f64) -> Result<CentralValueSet> {
    let s = 0.5 + alpha;
    let point = Complex64::new(s, 0.0);
    if !is_prime(q) && q > MAX_COMPOSITE_Q {
        return Err(Error::Capacity { what: "composite q", value: q, cap: MAX_COMPOSITE_Q });
    }
    if q >= 2 {
        check_shift(q, alpha)?;
    }
    if alpha.abs() >= 0.5 {
        return Err(Error::Domain(format!("the smoothed evaluator needs |alpha| < 1/2, got {alpha}")));
    }
    let Some((table, chars, epsilon)) = setup(q)? else {
        return Ok(CentralValueSet::empty(q, point, CentralMethod::SmoothedAfe));
    };
    let (a1, a2) = (s / 2.0, (1.0 - s) / 2.0);
    let scale = std::f64::consts::PI / q as f64;
    let mut direct = Vec::new();
    let mut dual = Vec::new();
    for n in 1u64.. {
        let x = scale * (n * n) as f64;
        let (k1, k2) = (gamma_ur(a1, x), gamma_ur(a2, x));
        if k1 < SMOOTHED_KERNEL_CUTOFF && k2 < SMOOTHED_KERNEL_CUTOFF {
            break;
        }
        let ln_n = (n as f64).ln();
        direct.push(Complex64::new((-s * ln_n).exp() * k1, 0.0));
        dual.push(Complex64::new(((s - 1.0) * ln_n).exp() * k2, 0.0));
    }
    let factor = (-alpha * (q as f64 / std::f64::consts::PI).ln() + ln_gamma(a2) - ln_gamma(a1)).exp();
    let sum_direct = batch_twisted_sum(&direct, &table);
    let sum_dual = batch_twisted_sum(&dual, &table);
    let mut all = vec![Complex64::new(0.0, 0.0); table.len()];
    for (&c, e) in chars.iter().zip(&epsilon) {
        all[c] = sum_direct[c] + e * factor * sum_dual[table.conjugate(c)];
    }
    Ok(assemble(q, point, CentralMethod::SmoothedAfe, &table, chars, epsilon, &all))
}

/// V(x) = ½ erfc(ln x / 2) by the contour kernel, through the shared table.
fn v_table() -> Result<std::sync::Arc<KernelTable>> {
    KernelTable::cached(KernelSpec::v())
}

/// Σ_{m ≤ X e^{10}} χ(m) m^{-½-α} V(m/X), X = q^{1.1}.
pub fn central_values_vkernel(q: u64, alpha: f64) -> Result<CentralValueSet> {
    central_values_vkernel_with(q, alpha, DEFAULT_V_EPSILON, DEFAULT_TRUNCATION_LOG)
}

/// The V-sum with X = q^{1+epsilon}, truncated at m ≤ X·e^{truncation_log}.
pub fn central_values_vkernel_with(
    q: u64,
    alpha: f64,
    epsilon: f64,
    truncation_log: f64,
) -> Result<CentralValueSet> {
    limits::check("q (V-sum oracle)", q, MAX_ORACLE_Q)?;
    if !(epsilon > 0.0) || !(truncation_log > 0.0) {
        return Err(Error::Domain("epsilon and the truncation constant must be positive".into()));
    }
    if q >= 2 {
        check_shift(q, alpha)?;
    }
    let point = Complex64::new(0.5 + alpha, 0.0);
    let Some((table, chars, eps)) = setup(q)? else {
        return Ok(CentralValueSet::empty(q, point, CentralMethod::VKernelSum));
    };
    let ln_x = (1.0 + epsilon) * (q as f64).ln();
    let m_max = (ln_x + truncation_log).exp().floor() as u64;
    let v = v_table()?;
    let residues = fold_residues(q, m_max, |m| {
        let ln_m = (m as f64).ln();
        (-(0.5 + alpha) * ln_m).exp() * v.eval_ln(ln_m - ln_x)
    });
    let all = batch_twisted_sum_residues(&residues, &table);
    Ok(assemble(q, point, CentralMethod::VKernelSum, &table, chars, eps, &all))
}

/// Σ_{m ≤ m_max, m ≡ a} f(m) for every residue a mod q, in parallel
/// chunks with compensated accumulation.
fn fold_residues(q: u64, m_max: u64, f: impl Fn(u64) -> f64 + Sync) -> Vec<Complex64> {
    const CHUNK: u64 = 1 << 16;
    let chunks = m_max.div_ceil(CHUNK);
    let partial: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![CompensatedSum::new(); q as usize];
            for m in (c * CHUNK + 1)..=((c + 1) * CHUNK).min(m_max) {
                if gcd(m, q) == 1 {
                    acc[(m % q) as usize].add(f(m));
                }
            }
            acc.iter().map(CompensatedSum::value).collect()
        })
        .collect();
    (0..q as usize)
        .map(|a| {
            let mut s = CompensatedSum::new();
            for p in &partial {
                s.add(p[a]);
            }
            Complex64::new(s.value(), 0.0)
        })
        .collect()
}

/// B₂, B₄, …, B₂₀.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];
const EM_TERMS: u32 = 20;

/// ζ(s, a) for 0 < a <= 1, Re s >= 1/4, s ≠ 1, by Euler–Maclaurin after
/// 20 direct terms. The remainder is below 1e-20 for |s| <= 4.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    let mut acc = CompensatedComplex::default();
    for k in 0..EM_TERMS {
        acc.add((-s * (k as f64 + a).ln()).exp());
    }
    let n = EM_TERMS as f64 + a;
    let ln_n = n.ln();
    let pow = (-s * ln_n).exp();
    acc.add(pow * n / (s - 1.0));
    acc.add(pow * 0.5);
    // Rising factorial s(s+1)…(s+2j−2) / (2j)! times N^{-s-2j+1}.
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = pow / n;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j as f64 + 1.0;
        acc.add(rising * npow * (b / fact));
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        npow /= n * n;
    }
    acc.value()
}

/// L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q) for every even primitive χ.
pub fn central_values_hurwitz(q: u64, s: Complex64) -> Result<CentralValueSet> {
    limits::check("q (Hurwitz oracle)", q, MAX_ORACLE_Q)?;
    if !(s.re >= 0.25) || s.norm() > 4.0 || (s - 1.0).norm() < 1e-6 {
        return Err(Error::Domain(format!("Hurwitz oracle needs Re s >= 1/4, |s| <= 4, s != 1, got {s}")));
    }
    let Some((table, chars, eps)) = setup(q)? else {
        return Ok(CentralValueSet::empty(q, s, CentralMethod::Hurwitz));
    };
    let qf = q as f64;
    let residues: Vec<Complex64> = (0..q)
        .into_par_iter()
        .map(|a| if a == 0 || gcd(a, q) != 1 { Complex64::new(0.0, 0.0) } else { hurwitz_zeta(s, a as f64 / qf) })
        .collect();
    let scale = (-s * qf.ln()).exp();
    let all: Vec<Complex64> = batch_twisted_sum_residues(&residues, &table).iter().map(|z| z * scale).collect();
    Ok(assemble(q, s, CentralMethod::Hurwitz, &table, chars, eps, &all))
}

/// L(½+α, χ) L(½+β, χ̄) from the W± double sums truncated at
/// mn ≤ (q/π) e^{10}.
pub fn pair_product_afe(q: u64, table: &CharacterTable, chi: usize, alpha: f64, beta: f64) -> Result<Complex64> {
    limits::check("q (pair-product oracle)", q, MAX_PAIR_Q)?;
    if table.modulus() != q {
        return Err(Error::Consistency(format!("character table is mod {}, not mod {q}", table.modulus())));
    }
    if !table.is_even(chi) || !table.is_primitive(chi) {
        return Err(Error::Precondition(format!("character {chi} mod {q} is not even primitive")));
    }
    let w_plus = KernelTable::cached(KernelSpec::w_plus(alpha, beta))?;
    let w_minus = KernelTable::cached(KernelSpec::w_minus(alpha, beta))?;
    let chi_val: Vec<Complex64> = (0..q).map(|a| table.value(chi, a)).collect();
    let ln_scale = (std::f64::consts::PI / q as f64).ln();
    let k_max = ((q as f64 / std::f64::consts::PI).ln() + DEFAULT_TRUNCATION_LOG).exp().floor() as u64;
    // Collected in m order and summed sequentially so the result does not
    // depend on the thread schedule.
    let rows: Vec<(Complex64, Complex64)> = (1..=k_max)
        .into_par_iter()
        .filter(|&m| gcd(m, q) == 1)
        .map(|m| {
            let mut plus = CompensatedComplex::default();
            let mut minus = CompensatedComplex::default();
            let ln_m = (m as f64).ln();
            let cm = chi_val[(m % q) as usize];
            for n in 1..=k_max / m {
                let cn = chi_val[(n % q) as usize];
                if cn.norm_sqr() == 0.0 {
                    continue;
                }
                let ln_n = (n as f64).ln();
                let ln_x = ln_scale + ln_m + ln_n;
                let pair = cm * cn.conj();
                plus.add(pair * ((-(0.5 + alpha) * ln_m - (0.5 + beta) * ln_n).exp() * w_plus.eval_ln(ln_x)));
                minus.add(pair.conj() * ((-(0.5 - alpha) * ln_m - (0.5 - beta) * ln_n).exp() * w_minus.eval_ln(ln_x)));
            }
            (plus.value(), minus.value())
        })
        .collect();
    let mut plus = CompensatedComplex::default();
    let mut minus = CompensatedComplex::default();
    for (p, m) in rows {
        plus.add(p);
        minus.add(m);
    }
    let (plus, minus) = (plus.value(), minus.value());
    let factor = (-(alpha + beta) * (q as f64 / std::f64::consts::PI).ln()).exp();
    Ok(plus + minus * factor)
}

/// File name for a cached set under `dir`.
pub fn cache_path(dir: &Path, q: u64, alpha: f64, method: CentralMethod) -> PathBuf {
    dir.join(format!("central_q{q}_a{:016x}_{}.bin", alpha.to_bits(), method.name()))
}

/// Little-endian: q (u64), α (f64), method (u64), count (u64), then
/// (re, im) f64 pairs in character order.
pub fn write_cache<W: Write>(set: &CentralValueSet, mut out: W) -> Result<()> {
    if set.s.im != 0.0 {
        return Err(Error::UnsupportedParameter("only real evaluation points can be cached".into()));
    }
    out.write_all(&set.q.to_le_bytes())?;
    out.write_all(&set.alpha.to_le_bytes())?;
    out.write_all(&set.method.code().to_le_bytes())?;
    out.write_all(&(set.values.len() as u64).to_le_bytes())?;
    for v in &set.values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a cached set; character labels and root numbers are rebuilt from
/// the modulus.
pub fn read_cache<R: Read>(mut input: R) -> Result<CentralValueSet> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let q = u64::from_le_bytes(next(&mut input)?);
    let alpha = f64::from_le_bytes(next(&mut input)?);
    let method = CentralMethod::from_code(u64::from_le_bytes(next(&mut input)?))?;
    let count = u64::from_le_bytes(next(&mut input)?);
    let point = Complex64::new(0.5 + alpha, 0.0);
    let Some((table, chars, eps)) = setup(q)? else {
        return if count == 0 {
            Ok(CentralValueSet::empty(q, point, method))
        } else {
            Err(Error::Consistency(format!("cache lists {count} values but q = {q} has no even primitive characters")))
        };
    };
    if count != chars.len() as u64 {
        return Err(Error::Consistency(format!(
            "cache lists {count} values but q = {q} has {} even primitive characters",
            chars.len()
        )));
    }
    let mut values = Vec::with_capacity(chars.len());
    for _ in 0..count {
        let re = f64::from_le_bytes(next(&mut input)?);
        let im = f64::from_le_bytes(next(&mut input)?);
        values.push(Complex64::new(re, im));
    }
    Ok(CentralValueSet {
        q,
        alpha,
        s: point,
        method,
        characters: chars.iter().map(|&c| table.label(c).clone()).collect(),
        values,
        epsilon: eps,
    })
}
