//! Scalar abstraction over `f64` and [`Dd`], plus complex helpers that work for both.

use std::fmt::Debug;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Num;

use crate::dd::Dd;

pub type C64 = Complex<f64>;

pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Unit roundoff of the type.
    const EPS: f64;
    /// Approximate number of significant decimal digits.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;
    fn abs(self) -> Self;
    fn floor(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn pi() -> Self;
    /// Ratio of two exactly representable integers, rounded once.
    fn ratio(num: f64, den: f64) -> Self {
        Self::from_f64(num) / Self::from_f64(den)
    }
    /// 16-point Gauss–Legendre nodes and weights on [-1, 1].
    fn gl16() -> &'static [(Self, Self)];
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;
    const DIGITS: u32 = 16;
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn gl16() -> &'static [(Self, Self)] {
        static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
        NODES.get_or_init(|| gauss_legendre::<f64>(16))
    }
}

impl Real for Dd {
    const EPS: f64 = Dd::EPSILON;
    const DIGITS: u32 = 32;
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        Dd::sin_cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        Dd::atan2(self, x)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn floor(self) -> Self {
        Dd::floor(self)
    }
    fn powi(self, n: i32) -> Self {
        Dd::powi(self, n)
    }
    fn pi() -> Self {
        Dd::PI
    }
    fn gl16() -> &'static [(Self, Self)] {
        static NODES: OnceLock<Vec<(Dd, Dd)>> = OnceLock::new();
        NODES.get_or_init(|| gauss_legendre::<Dd>(16))
    }
}

/// Gauss–Legendre rule of order `n` computed by Newton iteration on `P_n` in type `T`.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut x = T::from_f64(guess);
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.to_f64().abs() < T::EPS * 4.0 {
                let (_, d) = legendre(n, x);
                dp = d;
                break;
            }
        }
        let w = T::from_f64(2.0) / ((T::one() - x * x) * dp * dp);
        out.push((x, w));
    }
    out.reverse();
    out
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_f64(k as f64);
        let p2 = ((T::from_f64(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_f64(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Complex helpers usable for any [`Real`].
pub trait CxExt<T: Real>: Sized {
    fn cexp(self) -> Self;
    /// Principal logarithm, imaginary part in (-pi, pi].
    fn cln(self) -> Self;
    fn csqrt(self) -> Self;
    fn cabs(self) -> T;
    fn carg(self) -> T;
    fn scale_by(self, k: T) -> Self;
    fn to_c64(self) -> C64;
    fn from_c64(z: C64) -> Self;
}

impl<T: Real> CxExt<T> for Complex<T> {
    #[inline]
    fn cexp(self) -> Self {
        let r = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex::new(r * c, r * s)
    }
    #[inline]
    fn cln(self) -> Self {
        Complex::new(self.cabs().ln(), self.carg())
    }
    fn csqrt(self) -> Self {
        let r = self.cabs();
        if r == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let half = T::from_f64(0.5);
        let a = ((r + self.re.abs()) * half).sqrt();
        if self.re >= T::zero() {
            Complex::new(a, self.im / (a + a))
        } else {
            let b = if self.im < T::zero() { -a } else { a };
            Complex::new(self.im.abs() / (a + a), b)
        }
    }
    #[inline]
    fn cabs(self) -> T {
        let a = self.re.abs();
        let b = self.im.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big == T::zero() {
            return T::zero();
        }
        let q = small / big;
        big * (T::one() + q * q).sqrt()
    }
    #[inline]
    fn carg(self) -> T {
        self.im.atan2(self.re)
    }
    #[inline]
    fn scale_by(self, k: T) -> Self {
        Complex::new(self.re * k, self.im * k)
    }
    #[inline]
    fn to_c64(self) -> C64 {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
    #[inline]
    fn from_c64(z: C64) -> Self {
        Complex::new(T::from_f64(z.re), T::from_f64(z.im))
    }
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl16_integrates_polynomials_exactly() {
        let rule = f64::gl16();
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-15);
        let rule = Dd::gl16();
        let mut s = Dd::ZERO;
        for &(x, w) in rule {
            s += w * x.powi(30);
        }
        let exact = Dd::from_f64(2.0) / Dd::from_f64(31.0);
        assert!((s - exact).abs().to_f64() < 1e-30);
    }

    #[test]
    fn complex_helpers_agree_with_num_complex() {
        let z = C64::new(-1.5, 0.7);
        assert!((z.cexp() - z.exp()).norm() < 1e-15);
        assert!((z.cln() - z.ln()).norm() < 1e-15);
        assert!((z.csqrt() - z.sqrt()).norm() < 1e-15);
        let zd: Complex<Dd> = Complex::from_c64(z);
        let back = zd.cln().cexp();
        assert!((back - zd).cabs().to_f64() < 1e-30);
        let r = zd.csqrt();
        assert!((r * r - zd).cabs().to_f64() < 1e-30);
    }
}
