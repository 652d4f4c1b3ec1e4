//! First-order-in-each-variable jets in two variables (a, b).
//!
//! A [`Jet11`] holds f, ∂ₐf, ∂_b f, ∂ₐ∂_b f at a point; all arithmetic
//! drops the a², b² terms, which never feed into ∂ₐ∂_b.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Values the shifted-moment integrands are generic over: plain `f64`
/// for finite differences and [`Jet11`] for exact mixed derivatives.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + AddAssign
{
    fn constant(c: f64) -> Self;
    fn exp(self) -> Self;
    fn scale(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet11 {
    pub f: f64,
    pub fa: f64,
    pub fb: f64,
    pub fab: f64,
}

impl Jet11 {
    pub const fn new(f: f64, fa: f64, fb: f64, fab: f64) -> Self {
        Self { f, fa, fb, fab }
    }

    /// The coordinate a + a₀.
    pub const fn var_a(a0: f64) -> Self {
        Self::new(a0, 1.0, 0.0, 0.0)
    }

    /// The coordinate b + b₀.
    pub const fn var_b(b0: f64) -> Self {
        Self::new(b0, 0.0, 1.0, 0.0)
    }
}

impl Add for Jet11 {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.f + r.f, self.fa + r.fa, self.fb + r.fb, self.fab + r.fab)
    }
}

impl AddAssign for Jet11 {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl Sub for Jet11 {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.f - r.f, self.fa - r.fa, self.fb - r.fb, self.fab - r.fab)
    }
}

impl Neg for Jet11 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.f, -self.fa, -self.fb, -self.fab)
    }
}

impl Mul for Jet11 {
    type Output = Self;
    fn mul(self, v: Self) -> Self {
        let u = self;
        Self::new(
            u.f * v.f,
            u.f * v.fa + u.fa * v.f,
            u.f * v.fb + u.fb * v.f,
            u.f * v.fab + u.fa * v.fb + u.fb * v.fa + u.fab * v.f,
        )
    }
}

impl Scalar for Jet11 {
    fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    fn exp(self) -> Self {
        let e = self.f.exp();
        Self::new(e, self.fa * e, self.fb * e, (self.fab + self.fa * self.fb) * e)
    }

    fn scale(self, c: f64) -> Self {
        Self::new(self.f * c, self.fa * c, self.fb * c, self.fab * c)
    }
}

/// Horner evaluation of Σ c_k x^k over any [`Scalar`].
pub fn poly_eval<S: Scalar>(coeffs: &[f64], x: S) -> S {
    coeffs.iter().rev().fold(S::constant(0.0), |acc, &c| acc * x + S::constant(c))
}
