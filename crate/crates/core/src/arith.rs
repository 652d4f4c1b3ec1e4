//! Sieved multiplicative tables (μ, Λ, φ, least prime factor) and the
//! counting functions built on them.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::limits;

/// Multiplicative-function tables on `1..=limit`.
///
/// Index 0 is a placeholder in every table so that `mobius[n]` reads as
/// μ(n).
#[derive(Clone, Debug)]
pub struct ArithTables {
    limit: usize,
    mobius: Vec<i8>,
    von_mangoldt: Vec<f64>,
    totient: Vec<u64>,
    smallest_prime_factor: Vec<u32>,
    primes: Vec<u32>,
}

impl ArithTables {
    /// Runs a single linear sieve up to `limit`.
    pub fn build(limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Capacity { what: "sieve length", value: 0, cap: limits::max_sieve() });
        }
        limits::check("sieve length", limit as u64, limits::max_sieve())?;

        let n = limit;
        let mut spf = vec![0u32; n + 1];
        let mut mobius = vec![0i8; n + 1];
        let mut totient = vec![0u64; n + 1];
        let mut von_mangoldt = vec![0f64; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        mobius[1] = 1;
        totient[1] = 1;

        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
                mobius[i] = -1;
                totient[i] = (i - 1) as u64;
            }
            let pi = spf[i];
            for &p in &primes {
                if p > pi {
                    break;
                }
                let j = i * p as usize;
                if j > n {
                    break;
                }
                spf[j] = p;
                if p == pi {
                    mobius[j] = 0;
                    totient[j] = totient[i] * p as u64;
                } else {
                    mobius[j] = -mobius[i];
                    totient[j] = totient[i] * (p as u64 - 1);
                }
            }
        }

        for i in 2..=n {
            let p = spf[i] as usize;
            let mut m = i;
            while m % p == 0 {
                m /= p;
            }
            if m == 1 {
                von_mangoldt[i] = (p as f64).ln();
            }
        }

        Ok(Self { limit, mobius, von_mangoldt, totient, smallest_prime_factor: spf, primes })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    pub fn von_mangoldt(&self, n: usize) -> f64 {
        self.von_mangoldt[n]
    }

    pub fn totient(&self, n: usize) -> u64 {
        self.totient[n]
    }

    pub fn smallest_prime_factor(&self, n: usize) -> u32 {
        self.smallest_prime_factor[n]
    }

    pub fn mobius_table(&self) -> &[i8] {
        &self.mobius
    }

    pub fn von_mangoldt_table(&self) -> &[f64] {
        &self.von_mangoldt
    }

    pub fn totient_table(&self) -> &[u64] {
        &self.totient
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Prime factorization `(p, e)` of `n <= limit` read off the
    /// least-prime-factor table.
    pub fn factor(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.smallest_prime_factor[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    /// d_k(n) for n in `0..=limit` (entry 0 is 0), computed
    /// multiplicatively: d_k(p^e) = C(e + k - 1, k - 1).
    pub fn divisor_dk(&self, k: u32) -> Result<Vec<u64>> {
        if !(1..=4).contains(&k) {
            return Err(Error::UnsupportedParameter(format!("d_k needs 1 <= k <= 4, got k = {k}")));
        }
        let mut out = vec![0u64; self.limit + 1];
        if self.limit >= 1 {
            out[1] = 1;
        }
        for n in 2..=self.limit {
            let p = self.smallest_prime_factor[n] as usize;
            let mut m = n;
            let mut e = 0u64;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out[n] = out[m] * binomial(e + k as u64 - 1, k as u64 - 1);
        }
        Ok(out)
    }
}

/// d_k on `0..=n` without keeping the rest of the tables around.
pub fn divisor_dk(n: usize, k: u32) -> Result<Vec<u64>> {
    if !(1..=4).contains(&k) {
        return Err(Error::UnsupportedParameter(format!("d_k needs 1 <= k <= 4, got k = {k}")));
    }
    ArithTables::build(n)?.divisor_dk(k)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Trial-division factorization; fine for the moduli handled here.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mobius_of(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of primitive characters mod q, Σ_{q=dr} μ(d)φ(r).
///
/// Evaluated through the multiplicative closed form
/// φ*(p) = p - 2, φ*(p^e) = p^(e-2) (p - 1)^2 for e >= 2.
pub fn phi_star(q: u64) -> u64 {
    assert!(q >= 1, "phi_star needs q >= 1");
    let mut out: u64 = 1;
    for (p, e) in factorize(q) {
        let local = if e == 1 {
            p - 2
        } else {
            p.checked_pow(e - 2)
                .and_then(|x| x.checked_mul((p - 1) * (p - 1)))
                .expect("phi_star overflow")
        };
        out = out.checked_mul(local).expect("phi_star overflow");
    }
    out
}

/// φ⁺(q) = φ*(q) / 2, exact.
pub fn phi_plus(q: u64) -> BigRational {
    BigRational::new(BigInt::from(phi_star(q)), BigInt::from(2))
}
