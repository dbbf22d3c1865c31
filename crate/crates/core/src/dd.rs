//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` of two `f64` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits (about 32 decimal digits) of significand with the
//! exponent range of `f64`. Algorithms follow the classic Dekker/Knuth error-free
//! transformations; transcendental functions use argument reduction plus Taylor
//! series, refined by one Newton step where an `f64` seed is available.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: 3.141_592_653_589_793_116e0,
        lo: 1.224_646_799_147_353_207e-16,
    };
    const PI_TAIL: f64 = -2.994_769_809_718_339_666e-33;
    pub const LN_2: Dd = Dd {
        hi: 6.931_471_805_599_452_862e-1,
        lo: 2.319_046_813_846_299_558e-17,
    };
    /// Unit roundoff, 2^-104.
    pub const EPSILON: f64 = 4.930_380_657_631_324e-32;

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact ratio of two `f64` integers, correctly rounded to double-double.
    pub fn ratio(num: f64, den: f64) -> Self {
        Dd::from_f64(num) / Dd::from_f64(den)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    fn mul_pow2(self, b: f64) -> Self {
        Dd {
            hi: self.hi * b,
            lo: self.lo * b,
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (hi, lo) = quick_two_sum(hi, lo);
            Dd { hi, lo }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + Dd::from_f64(0.5)).floor()
    }

    pub fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            -((-self).floor())
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Dd::ZERO
            } else {
                Dd::from_f64(f64::NAN)
            };
        }
        let y = Dd::from_f64(self.hi.sqrt());
        y + (self - y.sqr()) / y.mul_pow2(2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / Dd::LN_2.hi).round();
        let r = (self - Dd::LN_2.mul_f64(k)).mul_pow2(1.0 / 1024.0);
        // expm1(r) by Taylor series, |r| < 3.4e-4
        let mut term = r;
        let mut sum = r;
        let mut i = 2.0;
        loop {
            term = (term * r) / Dd::from_f64(i);
            sum += term;
            if term.hi.abs() <= 1e-36 * sum.hi.abs().max(1e-300) {
                break;
            }
            i += 1.0;
            if i > 30.0 {
                break;
            }
        }
        // (1 + s)^2 - 1 = s (s + 2), applied ten times undoes the 2^-10 scaling
        for _ in 0..10 {
            sum = sum * (sum + Dd::from_f64(2.0));
        }
        let res = sum + Dd::ONE;
        ldexp(res, k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        let x = Dd::from_f64(self.hi.ln());
        x + self * (-x).exp() - Dd::ONE
    }

    /// Returns `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Self, Self) {
        if self.hi == 0.0 {
            return (Dd::ZERO, Dd::ONE);
        }
        let half_pi = Dd::PI.mul_pow2(0.5);
        let k = (self.hi / half_pi.hi).round();
        // three-term reduction x - k*pi/2
        let r = self - half_pi.mul_f64(k) - Dd::from_f64(Dd::PI_TAIL * 0.5 * k);
        let (s, c) = sin_cos_taylor(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn atan2(self, x: Dd) -> Self {
        if self.hi == 0.0 && x.hi == 0.0 {
            return Dd::ZERO;
        }
        let theta = Dd::from_f64(self.hi.atan2(x.hi));
        let (s, c) = theta.sin_cos();
        let num = self * c - x * s;
        let den = x * c + self * s;
        theta + num / den
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            Dd::ONE / acc
        } else {
            acc
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(self, digits: usize) -> String {
        if !self.is_finite() {
            return format!("{}", self.hi);
        }
        if self.hi == 0.0 {
            return "0".to_string();
        }
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        x = x * Dd::from_f64(10.0).powi(-e);
        if x.hi >= 10.0 {
            x = x.mul_f64(0.1);
            e += 1;
        } else if x.hi < 1.0 {
            x = x.mul_f64(10.0);
            e -= 1;
        }
        let mut ds = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Dd::from_f64(d)).mul_f64(10.0);
        }
        // round on the guard digit
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        out.push('.');
        for d in &ds[1..] {
            out.push((b'0' + d) as char);
        }
        out.push_str(&format!("e{e}"));
        out
    }
}

fn ldexp(x: Dd, k: i32) -> Dd {
    if k.abs() <= 1000 {
        let f = 2f64.powi(k);
        x.mul_pow2(f)
    } else {
        let half = k / 2;
        ldexp(ldexp(x, half), k - half)
    }
}

fn sin_cos_taylor(r: Dd) -> (Dd, Dd) {
    let r2 = r.sqr();
    let mut sin = r;
    let mut term = r;
    let mut i = 1.0;
    loop {
        term = -(term * r2) / Dd::from_f64((i + 1.0) * (i + 2.0));
        sin += term;
        i += 2.0;
        if term.hi.abs() < 1e-36 || i > 60.0 {
            break;
        }
    }
    let mut cos = Dd::ONE;
    let mut term = Dd::ONE;
    let mut i = 0.0;
    loop {
        term = -(term * r2) / Dd::from_f64((i + 1.0) * (i + 2.0));
        cos += term;
        i += 2.0;
        if term.hi.abs() < 1e-36 || i > 60.0 {
            break;
        }
    }
    (sin, cos)
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl PartialEq for Dd {
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, Self::FromStrRadixErr> {
        if radix != 10 {
            // only decimal input is meaningful here
            return "invalid".parse::<f64>().map(Dd::from_f64);
        }
        parse_decimal(s)
    }
}

fn parse_decimal(s: &str) -> Result<Dd, std::num::ParseFloatError> {
    let approx: f64 = s.trim().parse()?;
    let t = s.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().unwrap_or(0)),
        None => (t, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let mut acc = Dd::ZERO;
    let mut scale = 0i32;
    let mut seen_dot = false;
    for ch in mant.chars() {
        match ch {
            '.' => seen_dot = true,
            d if d.is_ascii_digit() => {
                acc = acc.mul_f64(10.0) + Dd::from_f64(f64::from(d as u8 - b'0'));
                if seen_dot {
                    scale += 1;
                }
            }
            _ => return Ok(Dd::from_f64(approx)),
        }
    }
    let mut v = acc * Dd::from_f64(10.0).powi(exp - scale);
    if neg {
        v = -v;
    }
    Ok(v)
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        write!(f, "{}", self.to_string_digits(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn arithmetic_recovers_lost_bits() {
        let a = Dd::from_f64(1.0) + Dd::from_f64(1e-20);
        let b = a - Dd::ONE;
        assert!((b.to_f64() - 1e-20).abs() < 1e-36);
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[-50.0, -1.3, -1e-5, 0.5, 1.0, 7.25, 300.0] {
            let v = Dd::from_f64(x);
            let r = v.exp().ln();
            assert!(close(r, v, 1e-30), "x={x} got {r}");
        }
        // e to 32 digits
        let e = Dd::ONE.exp();
        let want = parse_decimal("2.71828182845904523536028747135266").unwrap();
        assert!(close(e, want, 1e-31));
    }

    #[test]
    fn trig_identities() {
        for &x in &[0.1, 1.0, 3.0, 10.0, 123.456, -77.7] {
            let (s, c) = Dd::from_f64(x).sin_cos();
            let one = s.sqr() + c.sqr();
            assert!((one - Dd::ONE).abs().to_f64() < 1e-30);
            assert!((s.to_f64() - x.sin()).abs() < 1e-14);
        }
        let (s, _) = (Dd::PI / Dd::from_f64(6.0)).sin_cos();
        assert!((s - Dd::from_f64(0.5)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn atan2_and_sqrt() {
        let a = Dd::ONE.atan2(Dd::ONE);
        assert!((a - Dd::PI.mul_pow2(0.25)).abs().to_f64() < 1e-31);
        let r = Dd::from_f64(2.0).sqrt();
        assert!((r.sqr() - Dd::from_f64(2.0)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn decimal_rendering() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        assert_eq!(third.to_string_digits(10), "3.333333333e-1");
        assert_eq!(Dd::from_f64(-2.0).to_string_digits(3), "-2.00e0");
    }
}
