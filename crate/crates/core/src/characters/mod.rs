//! Dirichlet characters modulo q.
//!
//! The unit group (Z/qZ)^* is decomposed as a product of cyclic groups, one
//! per generator: a primitive root for every odd prime power, and `-1`
//! together with `5` for 2^e (e >= 3). A character is labelled by its
//! exponent vector `(e_1, ..., e_r)` with `0 <= e_j < n_j`, and takes the
//! value `exp(2πi Σ e_j k_j / n_j)` at the group element `Π g_j^{k_j}`.
//!
//! Values are kept as exponents of a primitive N-th root of unity, where N
//! is the group exponent, so parity and conductor are decided with integer
//! arithmetic. Complex numbers appear only when a sum is formed.
//!
//! Characters and group elements share the same mixed-radix indexing
//! (generator 0 most significant), which is also the lexicographic order of
//! the exponent vectors.

mod batch;
mod gauss;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, euler_phi, factorize, gcd, mobius_of};
use crate::error::{Error, Result};
use crate::limits;

pub use batch::{batch_twisted_sum, batch_twisted_sum_residues, naive_twisted_sum};
pub use gauss::{gauss_root, GaussData};

const NOT_A_UNIT: u32 = u32::MAX;

/// One cyclic factor of the unit group: a residue mod q and its order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub residue: u64,
    pub order: u64,
}

/// A character identified by its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterLabel {
    pub index: usize,
    pub exponents: Vec<u64>,
}

/// Local data for one prime power p^e exactly dividing q.
#[derive(Clone, Debug)]
struct LocalFactor {
    p: u64,
    e: u32,
    /// Indices into `CharacterTable::generators` owned by this prime.
    generators: Vec<usize>,
}

/// The full character group mod q with parity and conductor metadata.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    modulus: u64,
    generators: Vec<Generator>,
    locals: Vec<LocalFactor>,
    group_exponent: u64,
    element_index: Vec<u32>,
    elements: Vec<u64>,
    labels: Vec<CharacterLabel>,
    even: Vec<bool>,
    conductor: Vec<u64>,
    roots: Vec<Complex64>,
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut base = b as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Smallest primitive root mod the odd prime p.
fn primitive_root_mod_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let cofactors: Vec<u64> = factorize(p - 1).into_iter().map(|(r, _)| (p - 1) / r).collect();
    (2..p)
        .find(|&g| cofactors.iter().all(|&c| pow_mod(g, c, p) != 1))
        .expect("every prime has a primitive root")
}

/// A generator of the cyclic group (Z/p^e)^* for odd p.
fn primitive_root_mod_prime_power(p: u64, e: u32) -> u64 {
    let g = primitive_root_mod_prime(p);
    if e == 1 {
        return g;
    }
    // g generates mod p^e for all e >= 2 iff g^(p-1) != 1 mod p^2.
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// x mod q with x ≡ u (mod pe) and x ≡ 1 (mod q / pe).
fn crt_lift(u: u64, pe: u64, q: u64) -> u64 {
    let rest = q / pe;
    if rest == 1 {
        return u % q;
    }
    // x = 1 + rest * t, need rest * t ≡ u - 1 (mod pe).
    let inv = mod_inverse(rest % pe, pe).expect("coprime moduli");
    let t = mul_mod((u % pe + pe - 1) % pe, inv, pe);
    (1 + rest * t) % q
}

/// Inverse of a mod m when gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl CharacterTable {
    /// Enumerates all φ(q) characters mod q.
    ///
    /// Requires 3 <= q <= the configured cap ([`limits::max_q`]).
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return Err(Error::Domain(format!(
                "modulus {q} has no even primitive characters; need q >= 3"
            )));
        }
        limits::check("modulus", q, limits::max_q())?;

        let mut generators = Vec::new();
        let mut locals = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            let mut owned = Vec::new();
            let mut push = |residue: u64, order: u64, owned: &mut Vec<usize>| {
                owned.push(generators.len());
                generators.push(Generator { residue: crt_lift(residue, pe, q), order });
            };
            if p == 2 {
                match e {
                    1 => {}
                    2 => push(3, 2, &mut owned),
                    _ => {
                        push(pe - 1, 2, &mut owned);
                        push(5, pe / 4, &mut owned);
                    }
                }
            } else {
                push(primitive_root_mod_prime_power(p, e), pe / p * (p - 1), &mut owned);
            }
            locals.push(LocalFactor { p, e, generators: owned });
        }

        let group_order = euler_phi(q) as usize;
        let group_exponent = generators.iter().fold(1, |acc, g| lcm(acc, g.order));

        // elements[idx] = Π g_j^{k_j}, generator 0 most significant.
        let mut elements: Vec<u64> = vec![1 % q];
        for g in generators.iter().rev() {
            let mut next = Vec::with_capacity(elements.len() * g.order as usize);
            let mut gk = 1 % q;
            for _ in 0..g.order {
                next.extend(elements.iter().map(|&x| mul_mod(gk, x, q)));
                gk = mul_mod(gk, g.residue, q);
            }
            elements = next;
        }
        debug_assert_eq!(elements.len(), group_order);

        let mut element_index = vec![NOT_A_UNIT; q as usize];
        for (i, &x) in elements.iter().enumerate() {
            debug_assert_eq!(element_index[x as usize], NOT_A_UNIT, "generators are not independent");
            element_index[x as usize] = i as u32;
        }

        let roots = (0..group_exponent)
            .map(|j| {
                let (s, c) = (2.0 * std::f64::consts::PI * j as f64 / group_exponent as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();

        let mut table = Self {
            modulus: q,
            generators,
            locals,
            group_exponent,
            element_index,
            elements,
            labels: Vec::with_capacity(group_order),
            even: Vec::with_capacity(group_order),
            conductor: Vec::with_capacity(group_order),
            roots,
        };

        for index in 0..group_order {
            let exponents = table.decode(index);
            table.labels.push(CharacterLabel { index, exponents });
        }
        for index in 0..group_order {
            let minus_one = table.value_exponent(index, q - 1).expect("-1 is a unit");
            table.even.push(minus_one == 0);
            let f = table.compute_conductor(index);
            table.conductor.push(f);
        }
        Ok(table)
    }

    fn decode(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.generators.len()];
        for (j, g) in self.generators.iter().enumerate().rev() {
            out[j] = index as u64 % g.order;
            index /= g.order as usize;
        }
        out
    }

    fn encode(&self, digits: &[u64]) -> usize {
        digits
            .iter()
            .zip(&self.generators)
            .fold(0usize, |acc, (&d, g)| acc * g.order as usize + d as usize)
    }

    /// Conductor from the local components: the p-part of the conductor is
    /// the least p^k such that χ is trivial on the units ≡ 1 (mod p^k) in
    /// the p-component. Those kernels are cyclic, generated by 1 + p^k
    /// (k >= 1 for odd p, k >= 2 for p = 2).
    fn compute_conductor(&self, chi: usize) -> u64 {
        let q = self.modulus;
        let exps = &self.labels[chi].exponents;
        let mut f = 1u64;
        for local in &self.locals {
            if local.generators.iter().all(|&j| exps[j] == 0) {
                continue;
            }
            let pe = local.p.pow(local.e);
            let start = if local.p == 2 { 2 } else { 1 };
            let k = (start..=local.e)
                .find(|&k| {
                    let u = crt_lift(1 + local.p.pow(k), pe, q);
                    self.value_exponent(chi, u) == Some(0)
                })
                .unwrap_or(local.e);
            f *= local.p.pow(k);
        }
        f
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// N such that every character value is an N-th root of unity.
    pub fn group_exponent(&self) -> u64 {
        self.group_exponent
    }

    /// Number of characters, φ(q).
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[CharacterLabel] {
        &self.labels
    }

    pub fn label(&self, chi: usize) -> &CharacterLabel {
        &self.labels[chi]
    }

    pub fn is_even(&self, chi: usize) -> bool {
        self.even[chi]
    }

    pub fn conductor(&self, chi: usize) -> u64 {
        self.conductor[chi]
    }

    pub fn is_primitive(&self, chi: usize) -> bool {
        self.conductor[chi] == self.modulus
    }

    pub fn is_principal(&self, chi: usize) -> bool {
        self.labels[chi].exponents.iter().all(|&e| e == 0)
    }

    /// Index of the complex-conjugate character.
    pub fn conjugate(&self, chi: usize) -> usize {
        let neg: Vec<u64> = self.labels[chi]
            .exponents
            .iter()
            .zip(&self.generators)
            .map(|(&e, g)| (g.order - e) % g.order)
            .collect();
        self.encode(&neg)
    }

    /// Group-element index of the residue class of `a`, or `None` when
    /// gcd(a, q) > 1.
    pub fn element_index(&self, a: u64) -> Option<usize> {
        match self.element_index[(a % self.modulus) as usize] {
            NOT_A_UNIT => None,
            i => Some(i as usize),
        }
    }

    /// Residue of the group element with the given index.
    pub fn element(&self, index: usize) -> u64 {
        self.elements[index]
    }

    /// j with χ(a) = exp(2πi j / N), or `None` when χ(a) = 0.
    pub fn value_exponent(&self, chi: usize, a: u64) -> Option<u64> {
        let idx = self.element_index(a)?;
        let logs = self.decode(idx);
        let n = self.group_exponent;
        let exps = &self.labels[chi].exponents;
        let mut acc = 0u64;
        for ((&e, &k), g) in exps.iter().zip(&logs).zip(&self.generators) {
            let step = n / g.order;
            acc = (acc + mul_mod(mul_mod(e, k, n), step, n)) % n;
        }
        Some(acc)
    }

    /// χ(a) as a complex number.
    pub fn value(&self, chi: usize, a: u64) -> Complex64 {
        match self.value_exponent(chi, a) {
            Some(j) => self.roots[j as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// exp(2πi j / N) for the group exponent N.
    pub fn root_of_unity(&self, j: u64) -> Complex64 {
        self.roots[(j % self.group_exponent) as usize]
    }

    /// Indices of the even primitive characters, in table order.
    pub fn even_primitive(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.even[i] && self.is_primitive(i)).collect()
    }

    pub fn primitive_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_primitive(i)).count()
    }
}

/// ½ Σ_{q=dr} μ(d)φ(r) (1[r | m-n] + 1[r | m+n]).
///
/// This equals Σ χ(m) χ̄(n) over the even primitive characters mod q. When r
/// divides both m - n and m + n the divisor contributes twice.
pub fn even_orthogonality_rhs(m: u64, n: u64, q: u64) -> Result<BigRational> {
    if q == 0 || gcd(mul_mod(m, n, q), q) != 1 {
        return Err(Error::Precondition(format!("need gcd(mn, q) = 1, got m = {m}, n = {n}, q = {q}")));
    }
    let diff = m.abs_diff(n);
    let sum = m + n;
    let mut total = BigInt::from(0);
    for r in divisors(q) {
        let mu = mobius_of(q / r);
        if mu == 0 {
            continue;
        }
        let hits = diff.is_multiple_of(r) as i64 + sum.is_multiple_of(r) as i64;
        total += BigInt::from(mu * euler_phi(r) as i64 * hits);
    }
    Ok(BigRational::new(total, BigInt::from(2)))
}

/// Coefficients of the cyclotomic polynomial Φ_n, constant term first.
pub fn cyclotomic(n: u64) -> Vec<i128> {
    assert!(n >= 1, "cyclotomic needs n >= 1");
    // Φ_n = (xⁿ − 1) / Π_{d | n, d < n} Φ_d, each division exact and monic.
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        let den = cyclotomic(d);
        num = divide_monic(&num, &den).0;
    }
    num
}

/// Quotient and remainder of a / b for monic b.
fn divide_monic(a: &[i128], b: &[i128]) -> (Vec<i128>, Vec<i128>) {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (vec![0], rem);
    }
    let mut quot = vec![0i128; rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db];
        quot[i] = c;
        if c != 0 {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
    }
    rem.truncate(db.max(1));
    (quot, rem)
}

/// Σ χ(m) χ̄(n) over the even primitive characters, in exact integer
/// arithmetic: the sum is Σ_j c_j ζ_N^j with integer counts c_j, reduced
/// modulo Φ_N to a constant.
pub fn even_primitive_pair_sum_exact(table: &CharacterTable, m: u64, n: u64) -> Result<i128> {
    let q = table.modulus();
    let big_n = table.group_exponent();
    let mut counts = vec![0i128; big_n as usize];
    for chi in table.even_primitive() {
        let (Some(a), Some(b)) = (table.value_exponent(chi, m), table.value_exponent(chi, n)) else {
            return Err(Error::Precondition(format!("need gcd(mn, q) = 1, got m = {m}, n = {n}, q = {q}")));
        };
        counts[((a + big_n - b) % big_n) as usize] += 1;
    }
    let (_, rem) = divide_monic(&counts, &cyclotomic(big_n));
    if rem.iter().skip(1).any(|&c| c != 0) {
        return Err(Error::Consistency(format!("character sum for m = {m}, n = {n} mod {q} is not rational")));
    }
    Ok(rem[0])
}
