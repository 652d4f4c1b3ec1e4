//! Exact maximization of s₁²/λ over polynomial coefficient vectors.
//!
//! On the basis P: x¹..x^dP, Q: x¹..x^dQ the first moment is a linear form
//! c·a and λ a quadratic form aᵀMa. The ratio (c·a)²/(aᵀMa) is maximized
//! at a = M⁻¹c with value cᵀM⁻¹c (Cauchy–Schwarz in the M inner product);
//! that a is the reported representative, so s₁ = λ = proportion there.

use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{lambda_exact, proportion, s1_main};
use crate::poly::RationalPoly;
use crate::rational::{self, ratio};
use crate::spec::MollifierSpec;

pub const MAX_DEGREE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticModel {
    pub basis: Vec<String>,
    pub dp: usize,
    pub dq: usize,
    #[serde(with = "rational::serde_str")]
    pub theta1: BigRational,
    #[serde(with = "rational::serde_str")]
    pub theta2: BigRational,
    #[serde(with = "rational::serde_vec")]
    pub c: Vec<BigRational>,
    #[serde(with = "matrix_serde")]
    pub m: Vec<Vec<BigRational>>,
}

mod matrix_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(rational::format).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|r| r.iter().map(|t| rational::parse(t).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

impl QuadraticModel {
    pub fn dim(&self) -> usize {
        self.dp + self.dq
    }

    /// The mollifier whose P, Q coefficients are `a`.
    pub fn spec_for(&self, a: &[BigRational]) -> MollifierSpec {
        assert_eq!(a.len(), self.dim(), "coefficient vector has the wrong length");
        MollifierSpec {
            theta1: self.theta1.clone(),
            theta2: self.theta2.clone(),
            p: RationalPoly::from_linear_up(a[..self.dp].to_vec()),
            q: RationalPoly::from_linear_up(a[self.dp..].to_vec()),
            q_for_lengths: None,
        }
    }

    pub fn linear(&self, a: &[BigRational]) -> BigRational {
        dot(&self.c, a)
    }

    pub fn quadratic(&self, a: &[BigRational]) -> BigRational {
        dot(a, &mat_vec(&self.m, a))
    }
}

fn dot(x: &[BigRational], y: &[BigRational]) -> BigRational {
    x.iter().zip(y).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
}

fn mat_vec(m: &[Vec<BigRational>], a: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| dot(row, a)).collect()
}

fn check_thetas(theta1: &BigRational, theta2: &BigRational) -> Result<()> {
    let ok = theta2.is_positive() && theta2 <= theta1 && *theta1 < BigRational::one();
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(vec![format!(
            "need 0 < theta2 <= theta1 < 1, got theta1 = {}, theta2 = {}",
            rational::format(theta1),
            rational::format(theta2)
        )]))
    }
}

/// Assembles c and M from s₁ and λ on basis vectors; off-diagonal entries
/// by polarization, M_ij = (λ(eᵢ + eⱼ) − λ(eᵢ) − λ(eⱼ)) / 2.
pub fn build_forms(dp: usize, dq: usize, theta1: &BigRational, theta2: &BigRational) -> Result<QuadraticModel> {
    if dp == 0 {
        return Err(Error::Validation(vec!["P needs at least one coefficient (dP >= 1)".into()]));
    }
    if dp > MAX_DEGREE || dq > MAX_DEGREE {
        return Err(Error::UnsupportedParameter(format!("degrees above {MAX_DEGREE} are not supported")));
    }
    check_thetas(theta1, theta2)?;
    let n = dp + dq;
    let basis = (1..=dp).map(|k| format!("P:x^{k}")).chain((1..=dq).map(|k| format!("Q:x^{k}"))).collect();
    let mut model = QuadraticModel {
        basis,
        dp,
        dq,
        theta1: theta1.clone(),
        theta2: theta2.clone(),
        c: Vec::new(),
        m: Vec::new(),
    };
    let unit = |i: usize| -> Vec<BigRational> {
        (0..n).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }).collect()
    };
    let diag: Vec<BigRational> = (0..n).into_par_iter().map(|i| lambda_exact(&model.spec_for(&unit(i)))).collect();
    model.c = (0..n).map(|i| s1_main(&model.spec_for(&unit(i)))).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let off: Vec<BigRational> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut v = unit(i);
            v[j] = BigRational::one();
            (lambda_exact(&model.spec_for(&v)) - &diag[i] - &diag[j]) / BigInt::from(2)
        })
        .collect();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        m[i][i] = diag[i].clone();
    }
    for (&(i, j), v) in pairs.iter().zip(off) {
        m[i][j] = v.clone();
        m[j][i] = v;
    }
    model.m = m;
    Ok(model)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub dp: usize,
    pub dq: usize,
    #[serde(with = "rational::serde_str")]
    pub theta1: BigRational,
    #[serde(with = "rational::serde_str")]
    pub theta2: BigRational,
    /// P coefficients of x¹, x², ….
    #[serde(with = "rational::serde_vec")]
    pub coeffs_p: Vec<BigRational>,
    /// Q coefficients of x¹, x², ….
    #[serde(with = "rational::serde_vec")]
    pub coeffs_q: Vec<BigRational>,
    #[serde(with = "rational::serde_str")]
    pub proportion: BigRational,
    #[serde(with = "rational::serde_str")]
    pub lambda: BigRational,
    #[serde(with = "rational::serde_str")]
    pub s1: BigRational,
    pub proportion_decimal: f64,
    pub normalization: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl OptimizationResult {
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.coeffs_p.iter().chain(&self.coeffs_q).cloned().collect()
    }

    pub fn spec(&self) -> MollifierSpec {
        MollifierSpec {
            theta1: self.theta1.clone(),
            theta2: self.theta2.clone(),
            p: RationalPoly::from_linear_up(self.coeffs_p.clone()),
            q: RationalPoly::from_linear_up(self.coeffs_q.clone()),
            q_for_lengths: None,
        }
    }
}

/// Solves M a = c exactly and returns the optimum cᵀM⁻¹c with its
/// coefficients.
pub fn maximize_proportion(model: &QuadraticModel) -> Result<OptimizationResult> {
    let (a, note) = match bareiss_solve(&model.m, &model.c) {
        Some(a) => (a, None),
        None => match min_norm_solve(&model.m, &model.c) {
            Some(a) => (a, Some("M is singular; minimal-norm solution of M a = c reported".to_string())),
            None => {
                return Err(Error::Degenerate(
                    "M is singular and c is outside its column space; the ratio is unbounded".into(),
                ))
            }
        },
    };
    let value = model.linear(&a);
    if value.is_zero() {
        return Err(Error::Degenerate("optimal first moment is zero".into()));
    }
    let spec = model.spec_for(&a);
    let recomputed = proportion(&spec)?;
    if recomputed != value {
        return Err(Error::Consistency(format!(
            "cᵀM⁻¹c = {} but the recomputed proportion is {}",
            rational::format(&value),
            rational::format(&recomputed)
        )));
    }
    Ok(OptimizationResult {
        dp: model.dp,
        dq: model.dq,
        theta1: model.theta1.clone(),
        theta2: model.theta2.clone(),
        coeffs_p: a[..model.dp].to_vec(),
        coeffs_q: a[model.dp..].to_vec(),
        lambda: lambda_exact(&spec),
        s1: s1_main(&spec),
        proportion_decimal: rational::to_f64(&value),
        proportion: value,
        normalization: "a = M^-1 c, so s1 = lambda = proportion; any rescaling gives the same ratio".into(),
        note,
    })
}

/// Clears denominators row-wise so Bareiss runs on integers.
fn integer_augmented(m: &[Vec<BigRational>], c: &[BigRational]) -> Vec<Vec<BigInt>> {
    m.iter()
        .zip(c)
        .map(|(row, ci)| {
            let entries: Vec<&BigRational> = row.iter().chain(std::iter::once(ci)).collect();
            let l = entries.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            entries.iter().map(|r| r.numer() * (&l / r.denom())).collect()
        })
        .collect()
}

/// Fraction-free elimination of [M | c]; None when M is singular.
pub fn bareiss_solve(m: &[Vec<BigRational>], c: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = c.len();
    let mut a = integer_augmented(m, c);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut rhs = BigRational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            rhs -= &x[j] * BigRational::from_integer(a[i][j].clone());
        }
        x[i] = rhs / BigRational::from_integer(a[i][i].clone());
    }
    Some(x)
}

/// Minimal-norm solution of M a = c when it is consistent.
fn min_norm_solve(m: &[Vec<BigRational>], c: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = c.len();
    // Reduced row echelon form of [M | c].
    let mut r: Vec<Vec<BigRational>> = m.iter().zip(c).map(|(row, ci)| row.iter().chain([ci]).cloned().collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&i| !r[i][col].is_zero()) else { continue };
        r.swap(row, p);
        let inv = r[row][col].recip();
        for v in r[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != row && !r[i][col].is_zero() {
                let f = r[i][col].clone();
                for j in 0..=n {
                    let d = &f * &r[row][j];
                    r[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if r[row..].iter().any(|rw| !rw[n].is_zero()) {
        return None;
    }
    let mut x0 = vec![BigRational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x0[col] = r[i][n].clone();
    }
    // Null-space basis from the free columns, then project x0 off it.
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let null: Vec<Vec<BigRational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (i, &col) in pivots.iter().enumerate() {
                v[col] = -r[i][f].clone();
            }
            v
        })
        .collect();
    if null.is_empty() {
        return Some(x0);
    }
    let k = null.len();
    let gram: Vec<Vec<BigRational>> = (0..k).map(|i| (0..k).map(|j| dot(&null[i], &null[j])).collect()).collect();
    let rhs: Vec<BigRational> = null.iter().map(|v| dot(v, &x0)).collect();
    let coef = bareiss_solve(&gram, &rhs)?;
    for (v, w) in null.iter().zip(coef) {
        for (xi, vi) in x0.iter_mut().zip(v) {
            *xi -= &w * vi;
        }
    }
    Some(x0)
}

/// Inertia check by exact symmetric-pivoted LDLᵀ: true iff no pivot is
/// negative and no zero pivot hides a nonzero off-diagonal entry.
pub fn is_positive_semidefinite(m: &[Vec<BigRational>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        // Largest remaining diagonal as pivot.
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|x, y| a[*x.1][*x.1].cmp(&a[*y.1][*y.1]))
            .expect("nonempty");
        let d = a[p][p].clone();
        if d.is_negative() {
            return false;
        }
        if d.is_zero() {
            // All remaining diagonals are <= 0 here, hence 0; PSD forces the
            // whole remaining block to vanish.
            return active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        }
        active.remove(pos);
        for &i in &active {
            let f = &a[i][p] / &d;
            for &j in &active {
                let v = &f * &a[p][j];
                a[i][j] -= v;
            }
        }
    }
    true
}

/// Optimal proportion for every 1 <= dP <= max_dp, 0 <= dQ <= max_dq,
/// ordered by (dP, dQ).
pub fn degree_scan(
    max_dp: usize,
    max_dq: usize,
    theta1: &BigRational,
    theta2: &BigRational,
) -> Result<Vec<OptimizationResult>> {
    if max_dp > MAX_DEGREE || max_dq > MAX_DEGREE {
        return Err(Error::UnsupportedParameter(format!("degrees above {MAX_DEGREE} are not supported")));
    }
    let cells: Vec<(usize, usize)> = (1..=max_dp).flat_map(|p| (0..=max_dq).map(move |q| (p, q))).collect();
    let rows: Vec<OptimizationResult> = cells
        .par_iter()
        .map(|&(p, q)| maximize_proportion(&build_forms(p, q, theta1, theta2)?))
        .collect::<Result<_>>()?;
    let at = |p: usize, q: usize| &rows[(p - 1) * (max_dq + 1) + q];
    for row in &rows {
        let smaller = [(row.dp.wrapping_sub(1), row.dq), (row.dp, row.dq.wrapping_sub(1))];
        for (p, q) in smaller {
            if (1..=max_dp).contains(&p) && q <= max_dq && at(p, q).proportion > row.proportion {
                return Err(Error::Consistency(format!(
                    "proportion decreased from ({p},{q}) to ({},{})",
                    row.dp, row.dq
                )));
            }
        }
    }
    Ok(rows)
}

/// CSV with columns dP, dQ, proportion_exact, proportion_decimal, coeffs.
pub fn write_scan_csv<W: Write>(rows: &[OptimizationResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dP", "dQ", "proportion_exact", "proportion_decimal", "coeffs"])
        .map_err(csv_err)?;
    for r in rows {
        let list = |v: &[BigRational]| v.iter().map(rational::format).collect::<Vec<_>>().join(" ");
        let coeffs = format!("P=[{}];Q=[{}]", list(&r.coeffs_p), list(&r.coeffs_q));
        w.write_record([
            r.dp.to_string(),
            r.dq.to_string(),
            rational::format(&r.proportion),
            format!("{:.12}", r.proportion_decimal),
            coeffs,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// ϑ₁ = ϑ₂ = 1/2, the headline setting.
pub fn half() -> BigRational {
    ratio(1, 2)
}
