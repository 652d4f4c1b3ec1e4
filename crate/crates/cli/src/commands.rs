//! One function per subcommand; each returns a serializable result and the
//! warnings raised along the way.

use mollifier_core::central::{
    central_values_hurwitz, central_values_smoothed, central_values_vkernel, CentralValueSet,
};
use mollifier_core::characters::{even_orthogonality_rhs, even_primitive_pair_sum_exact, gauss_root, CharacterTable};
use mollifier_core::empirical::{
    calibrate_divisor_bound, census, twisted_moment_average, nonvanishing_census, oracle_twisted_moment, oracle_divisor_sum, oracle_divisor_bound,
    CensusRecord,
};
use mollifier_core::kernels::{mellin_profile, Kernel, KernelSpec};
use mollifier_core::moments::{
    corollary_terms, is_baseline, lambda_exact, lambda_terms, moments_numeric, proportion, s1_main, shifted_i,
    shifted_j1, shifted_j2, CorollaryTerms, DerivativeMethod, LambdaTerms, ShiftedMomentResult, ShiftedQuadrature,
};
use mollifier_core::optimizer::{build_forms, degree_scan, is_positive_semidefinite, maximize_proportion};
use mollifier_core::optimizer::{OptimizationResult, QuadraticModel};
use mollifier_core::poly::RationalPoly;
use mollifier_core::rational::{self, to_f64};
use mollifier_core::spec::MollifierSpec;
use mollifier_core::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::args::{Command, DerivativeChoice, KernelChoice, OracleChoice, Preset, SpecArgs};

/// A command's result together with its non-fatal warnings.
pub struct Outcome {
    pub result: serde_json::Value,
    pub warnings: Vec<String>,
    pub table: Option<Table>,
}

/// Rows that can be written as CSV.
pub enum Table {
    Scan(Vec<OptimizationResult>),
    Census(Vec<CensusRecord>),
}

fn outcome<T: Serialize>(value: &T, warnings: Vec<String>, table: Option<Table>) -> Result<Outcome> {
    let result = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Outcome { result, warnings, table })
}

fn parse_list(text: &str) -> std::result::Result<Vec<BigRational>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| rational::parse(t).map_err(|e| format!("bad coefficient {t:?}: {e}")))
        .collect()
}

/// Preset, then overrides; every problem is reported at once.
pub fn validate_spec(raw: &SpecArgs) -> Result<(MollifierSpec, Vec<String>)> {
    let mut spec = match raw.preset.unwrap_or(Preset::Paper) {
        Preset::Paper => MollifierSpec::paper(),
        Preset::IsBaseline => MollifierSpec::is_baseline(),
    };
    let mut problems = Vec::new();
    for (name, text, slot) in [("theta1", &raw.theta1, &mut spec.theta1), ("theta2", &raw.theta2, &mut spec.theta2)] {
        if let Some(t) = text {
            match rational::parse(t) {
                Ok(v) => *slot = v,
                Err(e) => problems.push(format!("bad {name} {t:?}: {e}")),
            }
        }
    }
    for (text, slot) in [(&raw.p_coeffs, &mut spec.p), (&raw.q_coeffs, &mut spec.q)] {
        if let Some(t) = text {
            match parse_list(t) {
                Ok(c) if raw.from_constant => *slot = RationalPoly::new(c),
                Ok(c) => *slot = RationalPoly::from_linear_up(c),
                Err(e) => problems.push(e),
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let warnings = spec.validate()?.iter().map(|w| w.message().to_string()).collect();
    Ok((spec, warnings))
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionReport {
    pub spec: MollifierSpec,
    pub s1: String,
    pub lambda: String,
    pub proportion: String,
    pub proportion_decimal: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentsReport {
    pub spec: MollifierSpec,
    pub s1: String,
    pub lambda: String,
    pub lambda_terms: LambdaTerms,
    pub corollary: CorollaryTerms,
    /// P(1) and P(1)² + ϑ₁⁻¹∫P'² of ψ₁ alone.
    pub baseline_first: String,
    pub baseline_second: String,
    pub proportion: String,
    pub proportion_decimal: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub optimum: OptimizationResult,
    pub positive_semidefinite: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<QuadraticModel>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedReport {
    pub spec: MollifierSpec,
    pub q: u64,
    pub alpha: f64,
    pub beta: f64,
    /// I(α) per φ⁺(q).
    pub i: f64,
    pub j1: Vec<ShiftedMomentResult>,
    pub j2: Vec<ShiftedMomentResult>,
    /// Unshifted targets of I, J₁, J₂.
    pub corollary: CorollaryTerms,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub h: f64,
    pub value: f64,
    pub beyond_support: bool,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelsReport {
    pub kernel: KernelSpec,
    pub residue_at_zero: f64,
    pub values: Vec<KernelPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<ProfilePoint>>,
}

#[derive(Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OraclesReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthogonality: Option<Vec<OrthogonalityCheck>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central: Option<Vec<CentralCheck>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twisted_moment: Option<TwistedMomentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor_sum: Option<Vec<DivisorSumCheck>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor_bound: Option<Vec<DivisorBoundCheck>>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaCheck {
    pub seed: u64,
    pub samples: usize,
    /// Largest |exact − quadrature| / max(1, |exact|) over all specs.
    pub max_relative_error: f64,
    pub worst_spec: MollifierSpec,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityCheck {
    pub q: u64,
    pub pairs: usize,
    pub mismatches: usize,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralCheck {
    pub q: u64,
    pub characters: usize,
    pub smoothed_vs_hurwitz: Option<f64>,
    pub smoothed_vs_vkernel: Option<f64>,
    pub vkernel_vs_hurwitz: Option<f64>,
    pub max_fe_residual: f64,
    pub max_gauss_sum_deviation: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedMomentReport {
    pub pairs: Vec<TwistedMomentCheck>,
    pub averages: Vec<TwistedMomentAverage>,
}

/// Σ_{hk <= y} |𝒜(h, k) − main| / √(hk) at one modulus.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedMomentAverage {
    pub q: u64,
    pub y: u64,
    pub value: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedMomentCheck {
    pub q: u64,
    pub h: u64,
    pub k: u64,
    pub brute: Complex64,
    pub main: Complex64,
    pub difference: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorSumCheck {
    pub k: u32,
    pub log_y2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// The ratio should lie within 1 ± window.
    pub window: f64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorBoundCheck {
    pub k: u32,
    pub sigma: f64,
    pub log_y: f64,
    pub lhs: f64,
    pub shape: f64,
    pub ratio: f64,
    pub calibrated_constant: f64,
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Proportion { spec } => run_proportion(spec),
        Command::Moments { spec } => run_moments(spec),
        Command::Optimize { dp, dq, show_model, spec } => run_optimize(*dp, *dq, *show_model, spec),
        Command::Scan { max_dp, max_dq, spec } => run_scan(*max_dp, *max_dq, spec),
        Command::Shifted { q, alpha, beta, method, low_nodes, high_nodes, no_convergence_check, spec } => {
            let defaults = ShiftedQuadrature::default();
            let quad = ShiftedQuadrature {
                low_dim_nodes: low_nodes.unwrap_or(defaults.low_dim_nodes),
                high_dim_nodes: high_nodes.unwrap_or(defaults.high_dim_nodes),
                check_convergence: !no_convergence_check,
            };
            run_shifted(*q, *alpha, *beta, *method, quad, spec)
        }
        Command::Empirical { q, threshold, spec } => run_census(q, *threshold, true, spec),
        Command::Census { q, threshold, with_moments, spec } => run_census(q, *threshold, *with_moments, spec),
        Command::Kernels { kind, alpha, beta, x, contour, truncation, nodes, profile_order, profile_y, h } => {
            let mut k = match kind {
                KernelChoice::V => KernelSpec::v(),
                KernelChoice::WPlus => KernelSpec::w_plus(*alpha, *beta),
                KernelChoice::WMinus => KernelSpec::w_minus(*alpha, *beta),
            };
            if let Some(c) = contour {
                k = k.with_contour(*c);
            }
            if let Some(t) = truncation {
                k = k.with_truncation(*t);
            }
            if let Some(n) = nodes {
                k = k.with_nodes(*n);
            }
            run_kernels(k, x, profile_order.map(|i| (i, *profile_y, h.as_slice())))
        }
        Command::Oracles { which, q, samples, seed } => run_oracles(*which, q, *samples, *seed),
    }
}

fn run_proportion(raw: &SpecArgs) -> Result<Outcome> {
    let (spec, warnings) = validate_spec(raw)?;
    let p = proportion(&spec)?;
    let report = ProportionReport {
        s1: rational::format(&s1_main(&spec)),
        lambda: rational::format(&lambda_exact(&spec)),
        proportion: rational::format(&p),
        proportion_decimal: to_f64(&p),
        spec,
    };
    outcome(&report, warnings, None)
}

fn run_moments(raw: &SpecArgs) -> Result<Outcome> {
    let (spec, warnings) = validate_spec(raw)?;
    let p = proportion(&spec)?;
    let (first, second) = is_baseline(&spec.p, &spec.theta1);
    let report = MomentsReport {
        s1: rational::format(&s1_main(&spec)),
        lambda: rational::format(&lambda_exact(&spec)),
        lambda_terms: lambda_terms(&spec),
        corollary: corollary_terms(&spec),
        baseline_first: rational::format(&first),
        baseline_second: rational::format(&second),
        proportion: rational::format(&p),
        proportion_decimal: to_f64(&p),
        spec,
    };
    outcome(&report, warnings, None)
}

fn run_optimize(dp: usize, dq: usize, show_model: bool, raw: &SpecArgs) -> Result<Outcome> {
    let (spec, warnings) = validate_spec(raw)?;
    let model = build_forms(dp, dq, &spec.theta1, &spec.theta2)?;
    let report = OptimizeReport {
        optimum: maximize_proportion(&model)?,
        positive_semidefinite: is_positive_semidefinite(&model.m),
        model: show_model.then_some(model),
    };
    outcome(&report, warnings, None)
}

fn run_scan(max_dp: usize, max_dq: usize, raw: &SpecArgs) -> Result<Outcome> {
    let (spec, warnings) = validate_spec(raw)?;
    let rows = degree_scan(max_dp, max_dq, &spec.theta1, &spec.theta2)?;
    let out = outcome(&rows, warnings, None)?;
    Ok(Outcome { table: Some(Table::Scan(rows)), ..out })
}

fn run_shifted(
    q: u64,
    alpha: f64,
    beta: f64,
    method: DerivativeChoice,
    quad: ShiftedQuadrature,
    raw: &SpecArgs,
) -> Result<Outcome> {
    let (spec, warnings) = validate_spec(raw)?;
    let methods: &[DerivativeMethod] = match method {
        DerivativeChoice::Jet => &[DerivativeMethod::Jet],
        DerivativeChoice::Richardson => &[DerivativeMethod::Richardson],
        DerivativeChoice::Both => &[DerivativeMethod::Jet, DerivativeMethod::Richardson],
    };
    let mut j1 = Vec::new();
    let mut j2 = Vec::new();
    for &m in methods {
        j1.push(shifted_j1(&spec, q, alpha, beta, quad, m)?);
        j2.push(shifted_j2(&spec, q, alpha, beta, quad, m)?);
    }
    let log_y2 = to_f64(&spec.theta2) * (q as f64).ln();
    let report = ShiftedReport {
        i: shifted_i(&spec, alpha * log_y2),
        corollary: corollary_terms(&spec),
        q,
        alpha,
        beta,
        j1,
        j2,
        spec,
    };
    outcome(&report, warnings, None)
}

fn run_census(moduli: &[u64], threshold: f64, with_moments: bool, raw: &SpecArgs) -> Result<Outcome> {
    let (spec, warnings) = validate_spec(raw)?;
    let rows = moduli
        .iter()
        .map(|&q| {
            if with_moments {
                census(q, &spec, threshold)
            } else {
                nonvanishing_census(&central_values_smoothed(q, 0.0)?, threshold)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let out = outcome(&rows, warnings, None)?;
    Ok(Outcome { table: Some(Table::Census(rows)), ..out })
}

fn run_kernels(spec: KernelSpec, xs: &[f64], profile: Option<(u32, f64, &[f64])>) -> Result<Outcome> {
    let kernel = Kernel::new(spec)?;
    let values = xs.iter().map(|&x| Ok(KernelPoint { x, value: kernel.eval(x)? })).collect::<Result<_>>()?;
    let profile = match profile {
        Some((i, y, hs)) => Some(
            hs.iter()
                .map(|&h| {
                    let p = mellin_profile(i, y, h)?;
                    Ok(ProfilePoint { h, value: p.value, beyond_support: p.beyond_support })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let report = KernelsReport { kernel: spec, residue_at_zero: kernel.residue_at_zero(), values, profile };
    outcome(&report, Vec::new(), None)
}

/// Random spec with rational coefficients of degree <= 5.
pub fn random_spec(rng: &mut ChaCha8Rng) -> MollifierSpec {
    let mut rat = |lo: i64, hi: i64, den: i64| rational::ratio(rng.random_range(lo..=hi), rng.random_range(1..=den));
    let a = rat(1, 9, 1);
    let b = rat(1, 9, 1);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let ten = rational::int(10);
    let (theta1, theta2) = (hi / &ten, lo / &ten);
    let coeffs = |rng: &mut ChaCha8Rng| -> Vec<BigRational> {
        let d = rng.random_range(0..=5);
        (0..d).map(|_| rational::ratio(rng.random_range(-12..=12), rng.random_range(1..=6))).collect()
    };
    let p = RationalPoly::from_linear_up(coeffs(rng));
    let q = RationalPoly::from_linear_up(coeffs(rng));
    MollifierSpec { theta1, theta2, p, q, q_for_lengths: None }
}

/// |exact − quadrature| / max(1, |exact|) for λ and s₁.
pub fn lambda_discrepancy(spec: &MollifierSpec) -> Result<f64> {
    let (s1_num, terms) = moments_numeric(spec)?;
    let exact = to_f64(&lambda_exact(spec));
    let numeric: f64 = terms.iter().sum();
    let s1 = to_f64(&s1_main(spec));
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
    Ok(rel(exact, numeric).max(rel(s1, s1_num)))
}

fn run_oracles(which: OracleChoice, moduli: &[u64], samples: usize, seed: u64) -> Result<Outcome> {
    let wants = |o: OracleChoice| which == OracleChoice::All || which == o;
    let mut report = OraclesReport::default();
    let mut warnings = Vec::new();

    if wants(OracleChoice::Lambda) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = (lambda_discrepancy(&MollifierSpec::paper())?, MollifierSpec::paper());
        for _ in 0..samples {
            let spec = random_spec(&mut rng);
            let d = lambda_discrepancy(&spec)?;
            if d > worst.0 {
                worst = (d, spec);
            }
        }
        report.lambda =
            Some(LambdaCheck { seed, samples, max_relative_error: worst.0, worst_spec: worst.1 });
    }

    if wants(OracleChoice::Orthogonality) {
        let mut rows = Vec::new();
        for &q in moduli.iter().filter(|&&q| q >= 3) {
            let table = CharacterTable::new(q)?;
            let (mut pairs, mut mismatches) = (0, 0);
            for m in 1..q {
                for n in 1..q {
                    if mollifier_core::arith::gcd(m * n, q) != 1 {
                        continue;
                    }
                    pairs += 1;
                    let brute = BigRational::from_integer(even_primitive_pair_sum_exact(&table, m, n)?.into());
                    if brute != even_orthogonality_rhs(m, n, q)? {
                        mismatches += 1;
                    }
                }
            }
            rows.push(OrthogonalityCheck { q, pairs, mismatches });
        }
        report.orthogonality = Some(rows);
    }

    if wants(OracleChoice::Central) {
        let mut rows = Vec::new();
        for &q in moduli {
            rows.push(central_check(q)?);
        }
        if rows.iter().any(|r| r.smoothed_vs_vkernel.is_some_and(|d| d > 1e-6)) {
            warnings.push(
                "the one-sided V sum with X = q^1.1 carries a visible remainder at these moduli".to_string(),
            );
        }
        report.central = Some(rows);
    }

    if wants(OracleChoice::TwistedMoment) {
        let (mut pairs, mut averages) = (Vec::new(), Vec::new());
        for &q in moduli.iter().filter(|&&q| (5..=mollifier_core::empirical::MAX_TWISTED_MOMENT_Q).contains(&q)) {
            for (h, k) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
                if mollifier_core::arith::gcd(h * k, q) != 1 {
                    continue;
                }
                let r = oracle_twisted_moment(h, k, q, 0.0)?;
                pairs.push(TwistedMomentCheck { q, h, k, brute: r.brute, main: r.main, difference: r.difference });
            }
            averages.push(TwistedMomentAverage { q, y: 16, value: twisted_moment_average(q, 16, 0.0)? });
        }
        report.twisted_moment = Some(TwistedMomentReport { pairs, averages });
    }

    if wants(OracleChoice::DivisorSum) {
        let one = |_: f64| 1.0;
        let mut rows = Vec::new();
        for k in [1u32, 2] {
            for log_y2 in [8.0f64, 10.0, 12.0] {
                let y = log_y2.exp();
                let r = oracle_divisor_sum(k, 0.0, one, one, y, y)?;
                rows.push(DivisorSumCheck { k, log_y2, lhs: r.lhs, rhs: r.rhs, ratio: r.ratio(), window: 3.0 / log_y2 });
            }
        }
        report.divisor_sum = Some(rows);
    }

    if wants(OracleChoice::DivisorBound) {
        let log_y = 10.0f64;
        let sigmas: Vec<f64> = (0..=10).map(|i| -(i as f64) / 10.0).collect();
        let c = calibrate_divisor_bound(log_y.exp(), &sigmas)?;
        let mut rows = Vec::new();
        for k in 1..=4u32 {
            for &sigma in &sigmas {
                let r = oracle_divisor_bound(k, sigma, log_y.exp())?;
                rows.push(DivisorBoundCheck {
                    k,
                    sigma,
                    log_y,
                    lhs: r.lhs,
                    shape: r.rhs,
                    ratio: r.ratio(),
                    calibrated_constant: c,
                });
            }
        }
        report.divisor_bound = Some(rows);
    }

    outcome(&report, warnings, None)
}

/// Pairwise agreement of the three evaluators plus the functional-equation
/// and Gauss-sum checks at one modulus.
pub fn central_check(q: u64) -> Result<CentralCheck> {
    let smoothed = central_values_smoothed(q, 0.0)?;
    let oracle_ok = q <= mollifier_core::central::MAX_ORACLE_Q;
    let hurwitz: Option<CentralValueSet> =
        if oracle_ok { Some(central_values_hurwitz(q, Complex64::new(0.5, 0.0))?) } else { None };
    let vkernel: Option<CentralValueSet> = if oracle_ok { Some(central_values_vkernel(q, 0.0)?) } else { None };
    let diff = |a: Option<&CentralValueSet>, b: Option<&CentralValueSet>| -> Result<Option<f64>> {
        match (a, b) {
            (Some(a), Some(b)) => Ok(Some(a.max_difference(b)?)),
            _ => Ok(None),
        }
    };
    let (fe, gauss) = if smoothed.is_empty() {
        (0.0, 0.0)
    } else {
        let table = CharacterTable::new(q)?;
        let fe = smoothed.fe_residuals(&table).into_iter().fold(0.0, f64::max);
        let root_q = (q as f64).sqrt();
        let mut gauss = 0.0f64;
        for label in &smoothed.characters {
            gauss = gauss.max((gauss_root(label.index, &table)?.tau.norm() - root_q).abs());
        }
        (fe, gauss)
    };
    Ok(CentralCheck {
        q,
        characters: smoothed.len(),
        smoothed_vs_hurwitz: diff(Some(&smoothed), hurwitz.as_ref())?,
        smoothed_vs_vkernel: diff(Some(&smoothed), vkernel.as_ref())?,
        vkernel_vs_hurwitz: diff(vkernel.as_ref(), hurwitz.as_ref())?,
        max_fe_residual: fe,
        max_gauss_sum_deviation: gauss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_spec_problem_is_reported() {
        let raw = SpecArgs {
            theta1: Some("oops".into()),
            p_coeffs: Some("1,x".into()),
            ..SpecArgs::default()
        };
        match validate_spec(&raw) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 2, "{v:?}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn overrides_apply_on_top_of_the_preset() {
        let raw = SpecArgs {
            preset: Some(Preset::IsBaseline),
            theta1: Some("2/5".into()),
            theta2: Some("1/5".into()),
            ..SpecArgs::default()
        };
        let (spec, warnings) = validate_spec(&raw).unwrap();
        assert_eq!(spec.p, RationalPoly::monomial(1));
        assert_eq!(spec.theta1, rational::ratio(2, 5));
        assert!(warnings.is_empty());
    }

    #[test]
    fn constant_term_only_with_flag() {
        let raw = SpecArgs { p_coeffs: Some("0,1".into()), from_constant: true, ..SpecArgs::default() };
        assert_eq!(validate_spec(&raw).unwrap().0.p, RationalPoly::monomial(1));
        let raw = SpecArgs { p_coeffs: Some("1".into()), from_constant: true, ..SpecArgs::default() };
        assert!(matches!(validate_spec(&raw), Err(Error::Validation(_))));
    }

    #[test]
    fn random_specs_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let spec = random_spec(&mut rng);
            spec.validate().unwrap();
            assert!(lambda_discrepancy(&spec).unwrap() < 1e-10);
        }
    }
}
