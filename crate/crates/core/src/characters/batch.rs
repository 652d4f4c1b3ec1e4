//! Σ_m c(m) χ(m) for every character at once.
//!
//! Coefficients are folded by residue class, permuted into group-element
//! order, and transformed with one inverse DFT per cyclic factor of the
//! unit group. For prime q this is a single length-(q-1) transform over the
//! discrete-log ordering.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::CharacterTable;
use crate::accum::CompensatedComplex;

/// `coeffs[m - 1] = c(m)` for `1 <= m <= coeffs.len()`. Returns one sum per
/// character in table order; terms with gcd(m, q) > 1 drop out.
pub fn batch_twisted_sum(coeffs: &[Complex64], table: &CharacterTable) -> Vec<Complex64> {
    let q = table.modulus() as usize;
    let mut folded = vec![CompensatedComplex::default(); q];
    for (i, &c) in coeffs.iter().enumerate() {
        folded[(i + 1) % q].add(c);
    }
    let folded: Vec<Complex64> = folded.iter().map(|s| s.value()).collect();
    batch_twisted_sum_residues(&folded, table)
}

/// Same as [`batch_twisted_sum`] for coefficients already folded by
/// residue: `residues[a]` for `0 <= a < q`.
pub fn batch_twisted_sum_residues(residues: &[Complex64], table: &CharacterTable) -> Vec<Complex64> {
    let q = table.modulus() as usize;
    assert_eq!(residues.len(), q, "expected one entry per residue class");

    let mut grid = vec![Complex64::new(0.0, 0.0); table.len()];
    for (a, &c) in residues.iter().enumerate() {
        if let Some(idx) = table.element_index(a as u64) {
            grid[idx] = c;
        }
    }

    let orders: Vec<usize> = table.generators().iter().map(|g| g.order as usize).collect();
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1usize;
    for &n in orders.iter().rev() {
        if n > 1 {
            let fft = planner.plan_fft_inverse(n);
            let block = n * stride;
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for base in (0..grid.len()).step_by(block) {
                for offset in 0..stride {
                    for k in 0..n {
                        line[k] = grid[base + offset + k * stride];
                    }
                    fft.process(&mut line);
                    for k in 0..n {
                        grid[base + offset + k * stride] = line[k];
                    }
                }
            }
        }
        stride *= n;
    }
    grid
}

/// Direct O(φ(q) · M) evaluation; the reference for the batch path.
pub fn naive_twisted_sum(coeffs: &[Complex64], table: &CharacterTable) -> Vec<Complex64> {
    (0..table.len())
        .map(|chi| {
            let mut acc = CompensatedComplex::default();
            for (i, &c) in coeffs.iter().enumerate() {
                acc.add(c * table.value(chi, i as u64 + 1));
            }
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(len: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn max_rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        let scale = b.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        a.iter().zip(b).map(|(x, y)| (x - y).norm() / scale).fold(0.0, f64::max)
    }

    #[test]
    fn complete_residue_system_is_orthogonal() {
        for q in [7u64, 12, 101] {
            let t = CharacterTable::new(q).unwrap();
            let coeffs = vec![Complex64::new(1.0, 0.0); q as usize - 1];
            let sums = batch_twisted_sum(&coeffs, &t);
            for (chi, s) in sums.iter().enumerate() {
                let expect = if t.is_principal(chi) { t.len() as f64 } else { 0.0 };
                assert!((s - expect).norm() < 1e-9, "q = {q}, chi = {chi}, got {s}");
            }
        }
    }

    #[test]
    fn multiples_of_q_vanish() {
        let t = CharacterTable::new(13).unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 130];
        for m in (13..=130).step_by(13) {
            coeffs[m - 1] = Complex64::new(m as f64, 1.0);
        }
        assert!(batch_twisted_sum(&coeffs, &t).iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn empty_coefficients_give_zero() {
        let t = CharacterTable::new(11).unwrap();
        assert!(batch_twisted_sum(&[], &t).iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn fft_matches_naive_prime_and_composite() {
        for (q, seed) in [(101u64, 1u64), (97, 2), (120, 3), (64, 4), (225, 5)] {
            let t = CharacterTable::new(q).unwrap();
            let coeffs = random_coeffs(3 * q as usize + 7, seed);
            let fast = batch_twisted_sum(&coeffs, &t);
            let slow = naive_twisted_sum(&coeffs, &t);
            assert!(max_rel_diff(&fast, &slow) < 1e-9, "q = {q}");
        }
    }

    #[test]
    fn linear_and_conjugation_symmetric() {
        let t = CharacterTable::new(45).unwrap();
        let c1 = random_coeffs(200, 7);
        let c2 = random_coeffs(200, 8);
        let sum: Vec<Complex64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
        let (s1, s2, s12) = (batch_twisted_sum(&c1, &t), batch_twisted_sum(&c2, &t), batch_twisted_sum(&sum, &t));
        for chi in 0..t.len() {
            assert!((s12[chi] - s1[chi] - s2[chi]).norm() < 1e-10);
        }
        let real: Vec<Complex64> = c1.iter().map(|z| Complex64::new(z.re, 0.0)).collect();
        let s = batch_twisted_sum(&real, &t);
        for chi in 0..t.len() {
            assert!((s[t.conjugate(chi)] - s[chi].conj()).norm() < 1e-10);
        }
    }
}
