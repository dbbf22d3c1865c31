//! Log-gamma and Euler–Maclaurin Hurwitz zeta, generic over the scalar type.

use num_complex::Complex;

use crate::precision::{Error, Result};
use crate::real::{CxExt, Real};

/// Bernoulli numbers B_2, B_4, ..., B_30 as exact integer ratios.
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// `B_{2k}` for `k >= 1`.
pub fn bernoulli_2k<T: Real>(k: usize) -> T {
    let (n, d) = BERNOULLI[k - 1];
    T::ratio(n, d)
}

/// Number of Stirling correction terms.
pub const STIRLING_TERMS: usize = 12;
/// Number of Bernoulli correction terms in Euler–Maclaurin.
pub const EM_TERMS: usize = 12;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn near_gamma_pole<T: Real>(z: Complex<T>) -> bool {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    re <= 0.5 && im.abs() < 1e-12 && (re - re.round()).abs() < 1e-12
}

/// A logarithm of Γ(z). The real part is `ln|Γ(z)|`; the imaginary part agrees with
/// `arg Γ(z)` modulo 2π, so `exp` of the result is exactly Γ(z).
///
/// Stirling's series after shifting `z` right until `Re z >= r_min`.
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let r_min = if T::DIGITS > 16 { 25.0 } else { 15.0 };
    ln_gamma_shifted(z, r_min)
}

/// Same as [`ln_gamma`] with an explicit shift threshold; distinct thresholds give
/// independent evaluation routes.
pub fn ln_gamma_shifted<T: Real>(z: Complex<T>, r_min: f64) -> Result<Complex<T>> {
    if near_gamma_pole(z) {
        return Err(Error::Pole(format!(
            "Gamma pole at {:?}",
            (z.re.to_f64(), z.im.to_f64())
        )));
    }
    let one = Complex::new(T::one(), T::zero());
    let mut w = z;
    let mut prod = one;
    let mut log_acc = Complex::new(T::zero(), T::zero());
    let mut count = 0;
    while w.re.to_f64() < r_min {
        prod = prod * w;
        w = w + one;
        count += 1;
        if count % 8 == 0 {
            log_acc = log_acc + prod.cln();
            prod = one;
        }
    }
    if count % 8 != 0 {
        log_acc = log_acc + prod.cln();
    }
    Ok(stirling(w) - log_acc)
}

fn stirling<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::from_f64(0.5);
    let ln_z = z.cln();
    let ln_2pi = (T::pi() * T::from_f64(2.0)).ln();
    let inv = Complex::new(T::one(), T::zero()) / z;
    let inv2 = inv * inv;
    let mut series = Complex::new(T::zero(), T::zero());
    for k in (1..=STIRLING_TERMS).rev() {
        let kf = k as f64;
        let c = bernoulli_2k::<T>(k) / T::from_f64(2.0 * kf * (2.0 * kf - 1.0));
        series = series * inv2 + Complex::new(c, T::zero());
    }
    series = series * inv;
    (z - Complex::new(half, T::zero())) * ln_z - z + Complex::new(ln_2pi * half, T::zero()) + series
}

/// Euler–Maclaurin evaluation of the Hurwitz zeta function with the pole separated:
/// `zeta(s, a) = regular + pole_num / (s - 1)`.
#[derive(Clone, Copy, Debug)]
pub struct EmParts<T> {
    pub regular: Complex<T>,
    pub pole_num: Complex<T>,
    /// Bound on the truncation error plus an estimate of rounding in the head sum.
    pub err: f64,
    pub terms: usize,
}

/// Chooses the head length `M`, starting from `|s| + digits`, growing by 1.5x until the
/// first-omitted-term bound is below `target`.
pub fn hurwitz_em<T: Real>(
    s: Complex<T>,
    a: f64,
    digits: u32,
    target: f64,
    max_terms: usize,
) -> Result<EmParts<T>> {
    let sf = s.to_c64();
    let sigma = sf.re;
    let mut m = (sf.norm() + digits as f64).ceil().max(10.0) as usize;
    loop {
        let bound = em_remainder_bound(sf, a, m);
        if bound <= target {
            return Ok(em_eval(s, a, m, bound));
        }
        if m > max_terms {
            return Err(Error::Precision(format!(
                "Euler-Maclaurin needs more than {max_terms} terms at s = {sf} (sigma {sigma})"
            )));
        }
        m = (m as f64 * 1.5).ceil() as usize;
    }
}

fn em_remainder_bound(s: num_complex::Complex64, a: f64, m: usize) -> f64 {
    let j = EM_TERMS;
    let n = m as f64 + a;
    let mut poch = 1.0;
    for i in 0..=(2 * j) {
        poch *= (s + i as f64).norm();
    }
    let (bn, bd) = BERNOULLI[j];
    let b = (bn / bd).abs();
    let denom = s.re + 2.0 * j as f64 + 1.0;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    let f = factorial(2 * j + 2);
    poch * b / f * n.powf(-s.re - 2.0 * j as f64 - 1.0) * (s + (2 * j + 1) as f64).norm() / denom
}

fn em_eval<T: Real>(s: Complex<T>, a: f64, m: usize, bound: f64) -> EmParts<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let at = T::from_f64(a);
    let mut head = zero;
    let mut abs_sum = 0.0;
    let neg_s = -s;
    for k in 0..m {
        let base = T::from_f64(k as f64) + at;
        let term = (neg_s.scale_by(base.ln())).cexp();
        abs_sum += term.to_c64().norm();
        head = head + term;
    }
    let n = T::from_f64(m as f64) + at;
    let ln_n = n.ln();
    let n_neg_s = neg_s.scale_by(ln_n).cexp();
    let pole_num = n_neg_s.scale_by(n);
    let mut tail = n_neg_s.scale_by(T::from_f64(0.5));
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    let inv_n = T::one() / n;
    let mut poch = s;
    let mut pow = n_neg_s.scale_by(inv_n);
    let inv_n2 = inv_n * inv_n;
    let mut fact = T::from_f64(2.0);
    for j in 1..=EM_TERMS {
        let c = bernoulli_2k::<T>(j) / fact;
        tail = tail + (poch * pow).scale_by(c);
        let jf = j as f64;
        poch = poch * (s + one.scale_by(T::from_f64(2.0 * jf - 1.0))) * (s + one.scale_by(T::from_f64(2.0 * jf)));
        pow = pow.scale_by(inv_n2);
        fact = fact * T::from_f64((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
    }
    let rounding = abs_sum * T::EPS * 8.0;
    EmParts {
        regular: head + tail,
        pole_num,
        err: bound + rounding,
        terms: m,
    }
}

/// Complementary error function in double precision.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use num_complex::Complex64;

    #[test]
    fn ln_gamma_integer_and_half_integer() {
        let g = ln_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24f64.ln()).abs() < 1e-14);
        assert!(g.im.abs() < 1e-14);
        let g = ln_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_reflection_oracle() {
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
        for &y in &[0.3, 2.0, 17.0, 150.0] {
            let g = ln_gamma(Complex64::new(0.5, y)).unwrap();
            let want = 0.5 * (std::f64::consts::PI.ln() - (std::f64::consts::PI * y).cosh().ln());
            assert!((g.re - want).abs() < 1e-12 * (1.0 + want.abs()), "y={y}");
        }
    }

    #[test]
    fn ln_gamma_dd_matches_known_digits() {
        // ln Gamma(1/3) = 0.98542064692776706918717403697796...
        let z = Complex::new(Dd::ONE / Dd::from_f64(3.0), Dd::ZERO);
        let g = ln_gamma(z).unwrap();
        let want: Dd = num_traits::Num::from_str_radix("0.985420646927767069187174036977", 10).unwrap();
        assert!((g.re - want).abs().to_f64() < 1e-29, "{}", g.re);
    }

    #[test]
    fn ln_gamma_pole_detected() {
        assert!(matches!(ln_gamma(Complex64::new(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(ln_gamma(Complex64::new(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn ln_gamma_routes_agree() {
        let z = Complex64::new(-0.125, 20.0);
        let a = ln_gamma_shifted(z, 15.0).unwrap().exp();
        let b = ln_gamma_shifted(z, 40.0).unwrap().exp();
        assert!(((a - b) / b).norm() < 1e-12);
    }

    #[test]
    fn zeta_two_via_em() {
        let p = hurwitz_em(Complex64::new(2.0, 0.0), 1.0, 16, 1e-15, 100_000).unwrap();
        let z = p.regular + p.pole_num / Complex64::new(1.0, 0.0);
        assert!((z.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_half_via_em() {
        // zeta(1/2) = -1.4603545088095868...
        let s = Complex64::new(0.5, 0.0);
        let p = hurwitz_em(s, 1.0, 16, 1e-15, 100_000).unwrap();
        let z = p.regular + p.pole_num / (s - 1.0);
        assert!((z.re + 1.460_354_508_809_586_8).abs() < 1e-14);
    }

    #[test]
    fn zeta_first_zero() {
        let s = Complex64::new(0.5, 14.134_725_141_734_693_79);
        let p = hurwitz_em(s, 1.0, 16, 1e-15, 100_000).unwrap();
        let z = p.regular + p.pole_num / (s - 1.0);
        assert!(z.norm() < 1e-13, "{z}");
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli_2k::<f64>(1), 1.0 / 6.0);
        assert!((bernoulli_2k::<f64>(6) + 691.0 / 2730.0).abs() < 1e-16);
    }
}
