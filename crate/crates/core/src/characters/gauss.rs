use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CharacterTable;
use crate::accum::CompensatedComplex;
use crate::error::{Error, Result};

/// Gauss sum τ(χ) and root number ε_χ of an even primitive character.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussData {
    pub tau: Complex64,
    pub epsilon: Complex64,
}

/// τ(χ) = Σ_a χ(a) e(a/q) by direct summation, and ε_χ = τ(χ)/√q.
pub fn gauss_root(chi: usize, table: &CharacterTable) -> Result<GaussData> {
    if !table.is_primitive(chi) || !table.is_even(chi) {
        return Err(Error::Precondition(format!(
            "root number needs an even primitive character; character {chi} mod {} has conductor {} and is {}",
            table.modulus(),
            table.conductor(chi),
            if table.is_even(chi) { "even" } else { "odd" }
        )));
    }
    let q = table.modulus();
    let mut acc = CompensatedComplex::default();
    for a in 1..q {
        if let Some(j) = table.value_exponent(chi, a) {
            let (s, c) = (2.0 * std::f64::consts::PI * a as f64 / q as f64).sin_cos();
            acc.add(table.root_of_unity(j) * Complex64::new(c, s));
        }
    }
    let tau = acc.value();
    Ok(GaussData { tau, epsilon: tau / (q as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_mod_5() {
        let t = CharacterTable::new(5).unwrap();
        let chi = t.even_primitive()[0];
        let g = gauss_root(chi, &t).unwrap();
        assert!((g.tau.re - 5f64.sqrt()).abs() < 1e-12);
        assert!(g.tau.im.abs() < 1e-12);
    }

    #[test]
    fn even_primitive_mod_8() {
        let t = CharacterTable::new(8).unwrap();
        let chi = t.even_primitive()[0];
        let g = gauss_root(chi, &t).unwrap();
        assert!(g.tau.im.abs() < 1e-12);
        assert!((g.tau.norm() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unit_root_numbers() {
        for q in [7u64, 16, 21, 100, 997] {
            let t = CharacterTable::new(q).unwrap();
            for chi in t.even_primitive() {
                let g = gauss_root(chi, &t).unwrap();
                assert!((g.tau.norm() - (q as f64).sqrt()).abs() < 1e-10);
                assert!((g.epsilon.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_imprimitive_and_odd() {
        let t = CharacterTable::new(7).unwrap();
        assert!(matches!(gauss_root(0, &t), Err(Error::Precondition(_))));
        let odd = (0..t.len()).find(|&c| !t.is_even(c)).unwrap();
        assert!(matches!(gauss_root(odd, &t), Err(Error::Precondition(_))));
    }
}
