//! The deformed objects: `gamma`, `J_t`, `gamma_t`, the series `F_t` and `F~_t`.

use num_complex::{Complex, Complex64};

use crate::dd::Dd;
use crate::mellin::ls_slope;
use crate::precision::{Error, PrecisionConfig, Result, ValueWithError};
use crate::real::{CxExt, Real};
use crate::selberg::{ln_gamma_factor_in, GammaData, LFunctionSpec};
use crate::special::{erfc, ln_gamma_shifted};

/// Default cap on `|t|`.
pub const C_CAP: f64 = 4.0;
/// Half-width of the excluded wedge around the negative real axis in `j_map`.
pub const SECTOR_EPS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformParams {
    pub t: f64,
    pub c_cap: f64,
}

impl DeformParams {
    pub fn new(t: f64) -> Result<Self> {
        let p = DeformParams { t, c_cap: C_CAP };
        check_t(t)?;
        Ok(p)
    }
}

/// `t < 0`, which is all the deformed series itself needs.
pub fn check_negative(t: f64) -> Result<()> {
    if !(t < 0.0) {
        return Err(Error::Domain(format!("deformation time must be negative, got t = {t}")));
    }
    Ok(())
}

/// `t < 0` and `|t| <= C_CAP`, required wherever `J_t`, `gamma_t` or the contour form
/// of `xi_t` enter.
pub fn check_t(t: f64) -> Result<()> {
    check_negative(t)?;
    if t.abs() > C_CAP {
        return Err(Error::Domain(format!("|t| = {} exceeds the cap {C_CAP}", t.abs())));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gamma

/// `ln gamma(s)` in double precision; the imaginary part is a continuous-enough
/// representative for exponentiation.
pub fn ln_gamma_factor(spec: &LFunctionSpec, s: Complex64) -> Result<Complex64> {
    ln_gamma_factor_in::<f64>(&spec.gamma, s, false)
}

/// `ln gamma(s)` with the log-gamma shift threshold fixed by the caller; two thresholds
/// give two independent routes through Stirling's series.
pub fn ln_gamma_factor_route(g: &GammaData, s: Complex64, r_min: f64) -> Result<Complex64> {
    let mut acc = g.alpha.ln();
    let m = g.pole_order_m as f64;
    if m > 0.0 {
        acc += s.ln() * m + (s - 1.0).ln() * m;
    }
    acc += s * g.ln_q();
    for f in &g.factors {
        acc += ln_gamma_shifted(s * f.omega + f.mu, r_min)?;
    }
    Ok(acc)
}

/// `gamma(s) = alpha s^m (s-1)^m Q^s prod Gamma(omega_i s + mu_i)`, accumulated in log
/// space and exponentiated once.
pub fn gamma_factor(spec: &LFunctionSpec, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    if spec.gamma.pole_order_m > 0 && (s.norm() == 0.0 || (s - 1.0).norm() == 0.0) {
        return Ok(ValueWithError::new(Complex64::new(0.0, 0.0), 0.0));
    }
    let (v, l) = if prec.wants_dd() {
        let l = ln_gamma_factor_in::<Dd>(&spec.gamma, Complex::from_c64(s), false)?;
        (l.cexp().to_c64(), l.to_c64())
    } else {
        let l = ln_gamma_factor_in::<f64>(&spec.gamma, s, false)?;
        (l.exp(), l)
    };
    let err = v.norm() * prec.unit_roundoff() * (l.norm() + 16.0) + v.norm() * f64::EPSILON;
    ValueWithError::checked(v, err, prec.target_abs_err.max(v.norm() * 1e-12), "gamma")
}

/// Lemma-10 style growth constant `ln|gamma(x)| / x^{1.1}` at a real point.
pub fn gamma_growth_constant(spec: &LFunctionSpec, x: f64) -> Result<f64> {
    let l = ln_gamma_factor(spec, Complex64::new(x, 0.0))?;
    Ok(l.re / x.powf(1.1))
}

// ---------------------------------------------------------------------------
// J_t and gamma_t

/// `J_t(s) = s + (|t|/2) log Q + (|t|/2) sum omega_i Log(omega_i s)`, principal branch.
/// `t = 0` is the identity.
pub fn j_map(spec: &LFunctionSpec, t: f64, s: Complex64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(s);
    }
    if s.norm() == 0.0 {
        return Err(Error::Domain("J_t is undefined at s = 0".into()));
    }
    if s.arg().abs() > std::f64::consts::PI - SECTOR_EPS {
        return Err(Error::Domain(format!("s = {s} is within the branch-cut wedge of Log")));
    }
    let h = t.abs() / 2.0;
    let mut acc = s + h * spec.gamma.ln_q();
    for f in &spec.gamma.factors {
        acc += h * f.omega * (s * f.omega).ln();
    }
    Ok(acc)
}

/// `J_t'(s) = 1 + (|t|/2) sum omega_i / s`.
pub fn j_map_deriv(spec: &LFunctionSpec, t: f64, s: Complex64) -> Complex64 {
    let w: f64 = spec.gamma.factors.iter().map(|f| f.omega).sum();
    1.0 + t.abs() / 2.0 * w / s
}

/// Solves `J_t(s) = w` by Newton's method from `s = w`.
pub fn j_map_inverse(spec: &LFunctionSpec, t: f64, w: Complex64) -> Result<Complex64> {
    let mut s = w;
    for _ in 0..60 {
        let f = j_map(spec, t, s)? - w;
        let step = f / j_map_deriv(spec, t, s);
        s -= step;
        if step.norm() < 1e-15 * (1.0 + s.norm()) {
            return Ok(s);
        }
    }
    Err(Error::Convergence(format!("J_t inverse did not converge at {w}")))
}

/// `ln gamma_t(s) = ln gamma(s) + (s - J_t(s))^2 / |t|`.
pub fn ln_gamma_t(spec: &LFunctionSpec, t: f64, s: Complex64) -> Result<Complex64> {
    if t == 0.0 {
        return Err(Error::Domain("gamma_t needs t != 0".into()));
    }
    check_t(t)?;
    let d = s - j_map(spec, t, s)?;
    Ok(ln_gamma_factor(spec, s)? + d * d / t.abs())
}

pub fn gamma_t(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    if t == 0.0 {
        return Err(Error::Domain("gamma_t needs t != 0".into()));
    }
    check_t(t)?;
    let (v, l) = if prec.wants_dd() {
        let sd = Complex::<Dd>::from_c64(s);
        let j = Complex::<Dd>::from_c64(j_map(spec, t, s)?);
        let d = sd - j;
        let l = ln_gamma_factor_in::<Dd>(&spec.gamma, sd, false)? + (d * d).scale_by(Dd::ONE / Dd::from_f64(t.abs()));
        (l.cexp().to_c64(), l.to_c64())
    } else {
        let l = ln_gamma_t(spec, t, s)?;
        (l.exp(), l)
    };
    // J_t itself is evaluated in double precision
    let err = v.norm() * (f64::EPSILON * (s.norm() + 16.0) + prec.unit_roundoff() * (l.norm() + 16.0));
    ValueWithError::checked(v, err, prec.target_abs_err.max(v.norm() * 1e-12), "gamma_t")
}

// ---------------------------------------------------------------------------
// F_t

/// `|a_n| e^{-|t| log^2 n / 4} n^{-x}` summed over `n > N` is bounded by the integral of
/// the envelope `c e^{(k - x + 1)L - |t| L^2 / 4}` over `L >= log N` plus the largest
/// envelope value on `n >= N` (the envelope is unimodal in `n`).
pub fn tail_bound(spec: &LFunctionSpec, t: f64, x: f64, n: usize) -> f64 {
    let a = t.abs() / 4.0;
    let c = spec.coeffs.bound_const;
    let k = spec.coeffs.bound_exponent;
    let ln_n = (n as f64).ln();
    let l_peak = ((k - x) / (2.0 * a)).max(ln_n);
    let at_n = c * ((k - x) * l_peak - a * l_peak * l_peak).exp();
    let l0 = (k - x + 1.0) / (2.0 * a);
    let z = a.sqrt() * (ln_n - l0);
    let ln_integral = a * l0 * l0 + 0.5 * (std::f64::consts::PI / a).ln() - std::f64::consts::LN_2 + ln_erfc(z);
    at_n + c * ln_integral.exp()
}

fn ln_erfc(z: f64) -> f64 {
    if z < 25.0 {
        erfc(z).ln()
    } else {
        // erfc(z) < e^{-z^2} / (z sqrt(pi)) for z > 0
        -z * z - (z * std::f64::consts::PI.sqrt()).ln()
    }
}

/// Smallest `N` with `tail_bound(N) <= target`.
pub fn truncation_n(spec: &LFunctionSpec, t: f64, x: f64, target: f64, max_terms: usize) -> Result<usize> {
    check_negative(t)?;
    if let Some(len) = spec.finite_length() {
        return Ok(len);
    }
    let ok = |n: usize| tail_bound(spec, t, x, n) <= target;
    let mut hi = 2usize;
    while !ok(hi) {
        if hi > max_terms {
            return Err(Error::Precision(format!(
                "F_t at Re s = {x} needs more than {max_terms} terms for target {target:e}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if ok(lo) {
        return Ok(lo);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest-prime-factor table up to `n`.
fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// `F_t` truncated at a fixed length, with precomputed weights
/// `w_n = a_n e^{-|t| log^2 n / 4}`; `n^{-s}` is built multiplicatively from prime powers.
#[derive(Clone, Debug)]
pub struct DeformedSeries {
    pub t: f64,
    pub len: usize,
    /// Real part above which the truncation meets `target`.
    pub x_min: f64,
    pub target: f64,
    weights: Vec<Complex64>,
    ln_n: Vec<f64>,
    spf: Vec<u32>,
    spec: LFunctionSpec,
}

impl DeformedSeries {
    pub fn new(spec: &LFunctionSpec, t: f64, x_min: f64, target: f64, max_terms: usize) -> Result<Self> {
        let len = truncation_n(spec, t, x_min, target, max_terms)?;
        Ok(Self::with_len(spec, t, len, x_min, target))
    }

    pub fn with_len(spec: &LFunctionSpec, t: f64, len: usize, x_min: f64, target: f64) -> Self {
        let a = t.abs() / 4.0;
        let mut weights = Vec::with_capacity(len);
        let mut ln_n = Vec::with_capacity(len);
        for n in 1..=len {
            let l = (n as f64).ln();
            ln_n.push(l);
            weights.push(spec.coeff(n) * (-a * l * l).exp());
        }
        DeformedSeries {
            t,
            len,
            x_min,
            target,
            weights,
            ln_n,
            spf: spf_table(len),
            spec: spec.clone(),
        }
    }

    fn powers(&self, s: Complex64) -> Vec<Complex64> {
        let mut p = vec![Complex64::new(0.0, 0.0); self.len + 1];
        if self.len >= 1 {
            p[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=self.len {
            let q = self.spf[n] as usize;
            p[n] = if q == n {
                (-s * self.ln_n[n - 1]).exp()
            } else {
                p[q] * p[n / q]
            };
        }
        p
    }

    /// `F_t(s)` with an error estimate: truncation tail plus rounding.
    pub fn eval(&self, s: Complex64) -> (Complex64, f64) {
        let p = self.powers(s);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for n in 1..=self.len {
            let term = self.weights[n - 1] * p[n];
            acc += term;
            abs += term.norm();
        }
        (acc, self.err(s, abs))
    }

    /// `(F_t(s), F_t'(s))`.
    pub fn eval_with_deriv(&self, s: Complex64) -> (Complex64, Complex64) {
        let p = self.powers(s);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for n in 1..=self.len {
            let term = self.weights[n - 1] * p[n];
            acc += term;
            d -= term * self.ln_n[n - 1];
        }
        (acc, d)
    }

    /// `(F_t(s), F_t'(s), err)`.
    pub fn eval_full(&self, s: Complex64) -> (Complex64, Complex64, f64) {
        let p = self.powers(s);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for n in 1..=self.len {
            let term = self.weights[n - 1] * p[n];
            acc += term;
            abs += term.norm();
            d -= term * self.ln_n[n - 1];
        }
        (acc, d, self.err(s, abs))
    }

    fn err(&self, s: Complex64, abs: f64) -> f64 {
        let tail = if self.spec.finite_length().is_some() {
            0.0
        } else {
            tail_bound(&self.spec, self.t, s.re, self.len)
        };
        let depth = (self.len.max(2) as f64).log2() + 4.0;
        tail + abs * f64::EPSILON * (s.norm() * (self.len.max(2) as f64).ln() + depth)
    }

    /// `F~_t(x) = sum |w_n| n^{-x}`.
    pub fn tilde(&self, x: f64) -> f64 {
        (1..=self.len)
            .map(|n| self.weights[n - 1].norm() * (-x * self.ln_n[n - 1]).exp())
            .sum()
    }
}

/// `F_t(s)` summed term by term in type `T`.
pub fn f_t_sum_in<T: Real>(spec: &LFunctionSpec, t: f64, s: Complex<T>, len: usize) -> (Complex<T>, f64) {
    let a = T::from_f64(t.abs() / 4.0);
    let spf = spf_table(len);
    let mut ln_n = vec![T::zero(); len + 1];
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut abs = 0.0;
    for n in 1..=len {
        if n >= 2 {
            let q = spf[n] as usize;
            ln_n[n] = if q == n { T::from_f64(n as f64).ln() } else { ln_n[q] + ln_n[n / q] };
        }
        let an = spec.coeff(n);
        if an.norm() == 0.0 {
            continue;
        }
        let l = ln_n[n];
        // exp(-(a log n + s) log n)
        let e = -(s + Complex::new(a * l, T::zero())).scale_by(l);
        let term = Complex::<T>::from_c64(an) * e.cexp();
        abs += term.to_c64().norm();
        acc = acc + term;
    }
    (acc, abs)
}

/// `F_t(s) = sum a_n e^{-|t| log^2 n / 4} n^{-s}`, truncated where the tail is below
/// `target / 2`.
pub fn f_t_eval(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    check_negative(t)?;
    let len = truncation_n(spec, t, s.re, prec.target_abs_err / 2.0, prec.max_terms)?;
    let tail = if spec.finite_length().is_some() { 0.0 } else { tail_bound(spec, t, s.re, len) };
    let (v, err) = if prec.wants_dd() {
        let (v, abs) = f_t_sum_in::<Dd>(spec, t, Complex::from_c64(s), len);
        let vc = v.to_c64();
        (vc, tail + abs * Dd::EPSILON * (s.norm() * (len.max(2) as f64).ln() + 8.0) + vc.norm() * f64::EPSILON)
    } else {
        let series = DeformedSeries::with_len(spec, t, len, s.re, prec.target_abs_err);
        series.eval(s)
    };
    ValueWithError::checked(v, err, prec.target_abs_err, "F_t")
}

/// Upper bound for `F~_t(x)` from the first `n` terms plus [`tail_bound`]; usable where
/// the exact sum needs too many terms.
pub fn f_t_tilde_upper(spec: &LFunctionSpec, t: f64, x: f64, n: usize) -> f64 {
    let a = t.abs() / 4.0;
    let head: f64 = (1..=n)
        .map(|k| {
            let l = (k as f64).ln();
            spec.coeff(k).norm() * (-(a * l + x) * l).exp()
        })
        .sum();
    head * (1.0 + 1e-12) + tail_bound(spec, t, x, n)
}

/// `F~_t(x) = sum e^{-|t| log^2 n / 4} |a_n| n^{-x}`.
pub fn f_t_tilde(spec: &LFunctionSpec, t: f64, x: f64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    check_negative(t)?;
    let len = truncation_n(spec, t, x, prec.target_abs_err / 2.0, prec.max_terms)?;
    let tail = if spec.finite_length().is_some() { 0.0 } else { tail_bound(spec, t, x, len) };
    let a = t.abs() / 4.0;
    let mut acc = 0.0;
    for n in 1..=len {
        let l = (n as f64).ln();
        acc += spec.coeff(n).norm() * (-(a * l + x) * l).exp();
    }
    let err = tail + acc * f64::EPSILON * ((len.max(2) as f64).ln() * (1.0 + x.abs()) + 4.0);
    ValueWithError::checked(Complex64::new(acc, 0.0), err, prec.target_abs_err.max(acc * 1e-13), "F~_t")
}

// ---------------------------------------------------------------------------
// gamma decay diagnostics

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaDecayFit {
    /// Least-squares slope of `-ln|gamma(x + iy)|` against `y`.
    pub k_fit: f64,
    /// Sandwich constants fitted on the even-indexed samples:
    /// `exp(-k_prime y) <= |gamma| <= exp(-k_lower y)`.
    pub k_lower: f64,
    pub k_prime: f64,
    /// Largest violation of the sandwich, in log units, over all samples.
    pub max_violation: f64,
}

/// Fits the exponential decay of `|gamma(x + iy)|` over `y` in `y_range`.
pub fn gamma_decay_fit(spec: &LFunctionSpec, x: f64, y_range: (f64, f64), samples: usize) -> Result<GammaDecayFit> {
    if samples < 3 || !(y_range.1 > y_range.0) || y_range.0 <= 0.0 {
        return Err(Error::Domain("gamma_decay_fit needs at least 3 samples on a positive y range".into()));
    }
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let y = y_range.0 + (y_range.1 - y_range.0) * i as f64 / (samples - 1) as f64;
        let s = Complex64::new(x, y);
        for f in &spec.gamma.factors {
            let z = s * f.omega + f.mu;
            let k = (-z.re).round().max(0.0);
            if (z + k).norm() < 1.0 {
                return Err(Error::Domain(format!("sample {s} is within unit distance of a Gamma pole")));
            }
        }
        pts.push((y, -ln_gamma_factor(spec, s)?.re));
    }
    let k_fit = ls_slope(&pts);
    let ratios: Vec<f64> = pts.iter().step_by(2).map(|(y, l)| l / y).collect();
    let k_lower = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let k_prime = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut max_violation: f64 = 0.0;
    for (y, l) in &pts {
        max_violation = max_violation.max(k_lower * y - l).max(l - k_prime * y);
    }
    Ok(GammaDecayFit {
        k_fit,
        k_lower,
        k_prime,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selberg::{chi4, f_eval, xi_f_eval, zeta};
    use std::f64::consts::PI;

    fn p16() -> PrecisionConfig {
        PrecisionConfig::double(1e-12)
    }

    #[test]
    fn gamma_at_two() {
        let g = gamma_factor(&zeta(), Complex64::new(2.0, 0.0), &PrecisionConfig::default()).unwrap();
        assert!((g.value - 1.0 / PI).norm() < 1e-15);
    }

    #[test]
    fn gamma_growth_bound_at_five() {
        let k = gamma_growth_constant(&zeta(), 5.0).unwrap();
        let g = gamma_factor(&zeta(), Complex64::new(5.0, 0.0), &p16()).unwrap();
        assert!(g.value.norm() <= (k * 5f64.powf(1.1)).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn gamma_routes_agree() {
        let s = Complex64::new(2.0, 30.0);
        let a = ln_gamma_factor_route(&zeta().gamma, s, 15.0).unwrap().exp();
        let b = ln_gamma_factor_route(&zeta().gamma, s, 45.0).unwrap().exp();
        assert!(((a - b) / b).norm() < 1e-12);
        let c = gamma_factor(&zeta(), s, &p16()).unwrap().value;
        assert!(((a - c) / c).norm() < 1e-12);
    }

    #[test]
    fn gamma_times_f_is_xi() {
        let spec = zeta();
        let prec = PrecisionConfig::default();
        for i in 0..20 {
            let s = Complex64::new(-1.3 + 0.2 * i as f64, 2.0 + 1.7 * i as f64);
            let g = gamma_factor(&spec, s, &prec).unwrap();
            let f = f_eval(&spec, s, &prec).unwrap();
            let xi = xi_f_eval(&spec, s, &prec).unwrap();
            let tol = g.err * f.value.norm() + f.err * g.value.norm() + xi.err + 1e-13 * xi.value.norm();
            assert!((g.value * f.value - xi.value).norm() <= tol, "s={s}");
        }
    }

    #[test]
    fn j_map_examples() {
        let spec = zeta();
        let s = Complex64::new(0.3, 7.0);
        assert_eq!(j_map(&spec, 0.0, s).unwrap(), s);
        let s = Complex64::new(2.0 * PI * std::f64::consts::E, 0.0);
        assert!((j_map(&spec, -1.0, s).unwrap() - (s + 0.25)).norm() < 1e-14);
        let s = Complex64::new(-0.25, 40.0);
        let want = s + 0.25 * (s / (2.0 * PI)).ln();
        assert!((j_map(&spec, -1.0, s).unwrap() - want).norm() < 1e-14);
        assert!(matches!(j_map(&spec, -1.0, Complex64::new(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(j_map(&spec, -1.0, Complex64::new(-3.0, 1e-6)), Err(Error::Domain(_))));
    }

    #[test]
    fn j_map_depends_only_on_log_sum() {
        // for one factor, s and s' with equal Log(omega s) are equal points; use two
        // factors with omega = 1/2 and compare J(s) - s at conjugate-symmetric arguments
        let spec = chi4();
        let s = Complex64::new(0.4, 12.0);
        let d1 = j_map(&spec, -1.0, s).unwrap() - s;
        let d2 = j_map(&spec, -1.0, s.conj()).unwrap() - s.conj();
        assert!((d1 - d2.conj()).norm() < 1e-14);
    }

    #[test]
    fn j_inverse_roundtrip() {
        let spec = zeta();
        let s = Complex64::new(-0.25, 123.0);
        let w = j_map(&spec, -1.0, s).unwrap();
        assert!((j_map_inverse(&spec, -1.0, w).unwrap() - s).norm() < 1e-12);
    }

    #[test]
    fn gamma_t_examples() {
        let spec = zeta();
        let s = Complex64::new(-0.25, 40.0);
        let g = gamma_t(&spec, -1.0, s, &p16()).unwrap();
        assert!(g.value.norm() > 0.0 && g.value.norm().is_finite());
        // independent sum of log components
        let lg = 0.5f64.ln() + (s * (s - 1.0)).ln().re - 0.5 * PI.ln() * s.re
            + crate::special::ln_gamma(s / 2.0).unwrap().re;
        let d = s - (s + 0.25 * (s / (2.0 * PI)).ln());
        let want = lg + (d * d).re;
        assert!((g.value.norm().ln() - want).abs() < 1e-12 * want.abs());
        assert!((s - j_map(&spec, -1.0, s).unwrap()).im.abs() <= 2.0);
        assert!(matches!(gamma_t(&spec, 0.0, s, &p16()), Err(Error::Domain(_))));
    }

    #[test]
    fn f_t_first_term_dominance() {
        let v = f_t_eval(&zeta(), -1.0, Complex64::new(10.0, 0.0), &p16()).unwrap();
        let band = 2f64.powi(-10) * (-(2f64.ln().powi(2)) / 4.0).exp() * 3.0;
        assert!((v.value - 1.0).norm() <= band);
    }

    #[test]
    fn f_t_at_zero_matches_direct_sum() {
        let spec = zeta();
        let v = f_t_eval(&spec, -1.0, Complex64::new(0.0, 0.0), &p16()).unwrap();
        let direct: f64 = (1..=10_000).map(|n| (-(n as f64).ln().powi(2) / 4.0).exp()).sum();
        let tail = tail_bound(&spec, -1.0, 0.0, 10_000);
        assert!((v.value.re - direct).abs() <= tail + v.err + 1e-12);
    }

    #[test]
    fn truncation_for_tiny_target() {
        let spec = zeta();
        let n = truncation_n(&spec, -1.0, -0.3, 1e-30, usize::MAX / 4).unwrap();
        let l = ((n + 1) as f64).ln();
        let next = (-(l * l) / 4.0 + 0.3 * l).exp();
        assert!(next < 1e-31, "N = {n}, next term {next:e}");
        assert!(tail_bound(&spec, -1.0, -0.3, n - 1) > 1e-30);
    }

    #[test]
    fn doubling_length_stays_within_err() {
        let spec = chi4();
        let s = Complex64::new(-0.25, 77.0);
        let a = DeformedSeries::new(&spec, -1.0, -0.25, 1e-10, 10_000_000).unwrap();
        let b = DeformedSeries::with_len(&spec, -1.0, 2 * a.len, -0.25, 1e-10);
        let (va, ea) = a.eval(s);
        let (vb, _) = b.eval(s);
        assert!((va - vb).norm() <= ea);
    }

    #[test]
    fn sieve_matches_direct_terms() {
        let spec = zeta();
        let s = Complex64::new(-0.2, 150.0);
        let series = DeformedSeries::with_len(&spec, -1.0, 5000, -0.2, 1.0);
        let (a, _) = series.eval(s);
        let (b, _) = f_t_sum_in::<Dd>(&spec, -1.0, Complex::from_c64(s), 5000);
        assert!((a - b.to_c64()).norm() < 1e-11);
    }

    #[test]
    fn f_t_tilde_examples() {
        let spec = zeta();
        let loose = PrecisionConfig::double(1e-4);
        let a = f_t_tilde(&spec, -1.0, -2.0, &loose).unwrap();
        let b = f_t_eval(&spec, -1.0, Complex64::new(-2.0, 0.0), &loose).unwrap();
        assert!((a.value - b.value).norm() <= a.err + b.err + 1e-12 * a.value.norm());
        assert!(f_t_tilde_upper(&spec, -1.0, -5.0, 100_000) <= 250f64.exp());
        let m1 = f_t_tilde(&spec, -1.0, -1.0, &p16()).unwrap();
        let z0 = f_t_tilde(&spec, -1.0, 0.0, &p16()).unwrap();
        assert!(m1.value.re >= z0.value.re);
    }

    #[test]
    fn gamma_decay_examples() {
        let fit = gamma_decay_fit(&zeta(), 0.5, (20.0, 100.0), 17).unwrap();
        assert!((fit.k_fit / (PI / 4.0) - 1.0).abs() < 0.05, "{}", fit.k_fit);
        assert_eq!(fit.max_violation, 0.0);
        assert!(matches!(
            gamma_decay_fit(&zeta(), -2.0, (0.0, 10.0), 5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn t_checks() {
        assert!(DeformParams::new(-1.0).is_ok());
        assert!(DeformParams::new(0.5).is_err());
        assert!(DeformParams::new(-5.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn gamma_t_never_vanishes(x in -1.0f64..2.0, y in 10.0f64..200.0) {
            let g = gamma_t(&zeta(), -1.0, Complex64::new(x, y), &p16()).unwrap();
            proptest::prop_assert!(g.value.norm() > 0.0);
        }
    }
}
