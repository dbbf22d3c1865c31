//! Inverse Mellin kernels `psi`, the classical `Phi` and the general `Phi_F`.

use num_complex::{Complex, Complex64};

use crate::dd::Dd;
use crate::precision::{Error, PrecisionConfig, Result, ScaledValue, ValueWithError};
use crate::quad::gl_refined;
use crate::real::{CxExt, Real};
use crate::selberg::{GammaData, GammaFactor, LFunctionSpec};
use crate::special::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    ClosedForm,
    Quadrature,
}

/// `Psi(w) = P(w) * prod Gamma(omega_j w + mu_j)` with `P` a polynomial, normally
/// `w^m (w - 1)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinKernel {
    /// Polynomial coefficients in ascending order of degree.
    pub poly: Vec<Complex64>,
    pub factors: Vec<GammaFactor>,
    pub mode: KernelMode,
}

/// One term `coef * v^{expo} * exp(-v^{1/a})` of a closed-form `psi`.
#[derive(Clone, Copy, Debug)]
pub struct ClosedTerm {
    pub coef: Complex64,
    pub expo: Complex64,
}

fn pole_poly(m: u32) -> Vec<Complex64> {
    // w^m (w-1)^m
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..m {
        p = poly_mul(&p, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        p = poly_mul(&p, &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }
    p
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl MellinKernel {
    pub fn new(poly: Vec<Complex64>, factors: Vec<GammaFactor>, mode: KernelMode) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("kernel needs at least one Gamma factor".into()));
        }
        if mode == KernelMode::ClosedForm && factors.len() != 1 {
            return Err(Error::Mode(format!(
                "closed form needs exactly one Gamma factor, got {}",
                factors.len()
            )));
        }
        Ok(MellinKernel { poly, factors, mode })
    }

    /// Kernel of a spec, closed form when there is a single Gamma factor.
    pub fn from_gamma(g: &GammaData) -> Self {
        let mode = if g.factors.len() == 1 {
            KernelMode::ClosedForm
        } else {
            KernelMode::Quadrature
        };
        MellinKernel {
            poly: pole_poly(g.pole_order_m),
            factors: g.factors.clone(),
            mode,
        }
    }

    pub fn gamma_kernel(omega: f64, mu: f64, m: u32) -> Self {
        MellinKernel {
            poly: pole_poly(m),
            factors: vec![GammaFactor {
                omega,
                mu: Complex64::new(mu, 0.0),
            }],
            mode: KernelMode::ClosedForm,
        }
    }

    pub fn with_mode(mut self, mode: KernelMode) -> Result<Self> {
        if mode == KernelMode::ClosedForm && self.factors.len() != 1 {
            return Err(Error::Mode("closed form needs exactly one Gamma factor".into()));
        }
        self.mode = mode;
        Ok(self)
    }

    /// Expands `P(w) Gamma(a w + b)` as `sum_k c_k Gamma(a w + b + k)` through
    /// `w Gamma(a w + b) = Gamma(a w + b + 1)/a - (b/a) Gamma(a w + b)`, then maps each
    /// `Gamma(a w + b')` to `(1/a) v^{b'/a} exp(-v^{1/a})`.
    pub fn closed_terms(&self) -> Result<(f64, Vec<ClosedTerm>)> {
        if self.factors.len() != 1 {
            return Err(Error::Mode(format!(
                "closed form needs exactly one Gamma factor, got {}",
                self.factors.len()
            )));
        }
        let a = self.factors[0].omega;
        let b = self.factors[0].mu;
        // c[k] multiplies Gamma(a w + b + k)
        let mut c: Vec<Complex64> = Vec::new();
        for p in self.poly.iter().rev() {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck / a;
                next[k] -= ck * (b + k as f64) / a;
            }
            next[0] += p;
            c = next;
        }
        let terms = c
            .iter()
            .enumerate()
            .filter(|(_, ck)| ck.norm() != 0.0)
            .map(|(k, ck)| ClosedTerm {
                coef: ck / a,
                expo: (b + k as f64) / a,
            })
            .collect();
        Ok((a, terms))
    }

    /// Abscissa left of which all poles of `Psi` lie, per the default placement rule.
    pub fn base_abscissa(&self) -> f64 {
        let m = self
            .factors
            .iter()
            .map(|f| (1.0 - f.mu.re) / f.omega)
            .fold(f64::NEG_INFINITY, f64::max);
        (1.0 + m).max(2.0)
    }

    /// `ln Psi(w)`.
    pub fn ln_psi_cap<T: Real>(&self, w: Complex<T>) -> Result<Complex<T>> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for f in &self.factors {
            let z = w.scale_by(T::from_f64(f.omega)) + Complex::<T>::from_c64(f.mu);
            acc = acc + ln_gamma(z)?;
        }
        let mut p = Complex::new(T::zero(), T::zero());
        for c in self.poly.iter().rev() {
            p = p * w + Complex::<T>::from_c64(*c);
        }
        Ok(acc + p.cln())
    }
}

/// Closed-form `psi(v)` as `(value, log_scale)`: `psi(v) = value * exp(-log_scale)`.
pub fn psi_closed_scaled_in<T: Real>(kernel: &MellinKernel, v: T) -> Result<(Complex<T>, T)> {
    if kernel.mode != KernelMode::ClosedForm {
        return Err(Error::Mode("kernel is not in closed-form mode".into()));
    }
    if !(v.to_f64() > 0.0) {
        return Err(Error::Domain(format!("psi needs v > 0, got {}", v.to_f64())));
    }
    let (a, terms) = kernel.closed_terms()?;
    let ln_v = v.ln();
    let scale = (ln_v / T::from_f64(a)).exp();
    let mut acc = Complex::new(T::zero(), T::zero());
    for t in &terms {
        let e = Complex::<T>::from_c64(t.expo).scale_by(ln_v).cexp();
        acc = acc + Complex::<T>::from_c64(t.coef) * e;
    }
    Ok((acc, scale))
}

pub fn psi_closed_in<T: Real>(kernel: &MellinKernel, v: T) -> Result<Complex<T>> {
    let (val, scale) = psi_closed_scaled_in(kernel, v)?;
    Ok(val.scale_by((-scale).exp()))
}

/// Exact closed-form `psi(v)`; `ModeError` unless the kernel has one Gamma factor.
pub fn psi_closed(kernel: &MellinKernel, v: f64) -> Result<Complex64> {
    psi_closed_in::<f64>(kernel, v)
}

/// `-ln |psi(v)|` without underflow (closed-form kernels).
pub fn neg_log_abs_psi(kernel: &MellinKernel, v: f64) -> Result<f64> {
    let (val, scale) = psi_closed_scaled_in::<f64>(kernel, v)?;
    Ok(scale - val.norm().ln())
}

/// Abscissa for the inverse Mellin integral: the larger of the pole-clearing default and
/// the real saddle of `|Psi(c)| v^{-c}`, which removes cancellation for large `v`.
pub fn psi_abscissa(kernel: &MellinKernel, v: f64) -> f64 {
    let base = kernel.base_abscissa();
    let phase = |c: f64| -> f64 {
        kernel
            .ln_psi_cap(Complex64::new(c, 0.0))
            .map(|l| l.re)
            .unwrap_or(f64::INFINITY)
            - c * v.ln()
    };
    let slope = |c: f64| (phase(c + 1e-4) - phase(c - 1e-4)) / 2e-4;
    if slope(base) >= 0.0 {
        return base;
    }
    let mut hi = base * 2.0 + 1.0;
    while slope(hi) < 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = base;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Numerical inverse Mellin transform on a vertical line.
pub fn psi_quad_in<T: Real>(kernel: &MellinKernel, v: f64, prec: &PrecisionConfig) -> Result<(Complex<T>, f64)> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("psi needs v > 0, got {v}")));
    }
    let c = psi_abscissa(kernel, v);
    let ln_v = v.ln();
    let integrand_mag = |tau: f64| -> f64 {
        kernel
            .ln_psi_cap(Complex64::new(c, tau))
            .map(|l| (l.re - c * ln_v).exp())
            .unwrap_or(0.0)
    };
    let peak = integrand_mag(0.0);
    let decay: f64 = kernel.factors.iter().map(|f| f.omega).sum::<f64>() * std::f64::consts::FRAC_PI_2;
    // truncation height from the exponential decay of the Gamma factors
    let mut t_max = 8.0;
    loop {
        let m = integrand_mag(t_max);
        let tail = 2.0 * m / (0.5 * decay) / (2.0 * std::f64::consts::PI);
        if tail < prec.target_abs_err / 3.0 && m < peak * 1e-3 * T::EPS {
            break;
        }
        t_max *= 1.25;
        if t_max > 1e5 {
            return Err(Error::Precision("psi_quad: truncation height diverged".into()));
        }
    }
    let tail = 2.0 * integrand_mag(t_max) / (0.5 * decay) / (2.0 * std::f64::consts::PI);
    let freq = ln_v.abs()
        + kernel
            .factors
            .iter()
            .map(|f| f.omega * (f.omega * (c * c + t_max * t_max).sqrt()).max(1.0).ln())
            .sum::<f64>()
        + 1.0;
    let panels = crate::quad::panels_for(2.0 * t_max, freq, std::f64::consts::FRAC_PI_4, 2.0);
    let ct = T::from_f64(c);
    let lv = T::from_f64(v).ln();
    let f = |tau: T| -> Complex<T> {
        let w = Complex::new(ct, tau);
        match kernel.ln_psi_cap(w) {
            Ok(l) => (l - w.scale_by(lv)).cexp(),
            Err(_) => Complex::new(T::zero(), T::zero()),
        }
    };
    let r = gl_refined(&f, T::from_f64(-t_max), T::from_f64(t_max), panels);
    let inv_2pi = T::one() / (T::pi() * T::from_f64(2.0));
    let value = r.value.scale_by(inv_2pi);
    let err = (r.err + tail) / (2.0 * std::f64::consts::PI);
    Ok((value, err))
}

pub fn psi_quad(kernel: &MellinKernel, v: f64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    let dd = |v: f64| -> Result<(Complex64, f64)> {
        let (v, e) = psi_quad_in::<Dd>(kernel, v, prec)?;
        Ok((v.to_c64(), e + v.to_c64().norm() * f64::EPSILON))
    };
    let (val, e) = if prec.wants_dd() {
        dd(v)?
    } else {
        let (val, e) = psi_quad_in::<f64>(kernel, v, prec)?;
        // cancellation against the integrand size: escalate
        if e > prec.target_abs_err { dd(v)? } else { (val, e) }
    };
    ValueWithError::checked(val, e, prec.target_abs_err, "psi_quad")
}

/// Empirical exponent `delta` in `|psi(v)| <= exp(-v^delta)`: the largest value
/// consistent with every sample `v > 1`, i.e. the minimum of `ln(-ln|psi(v)|) / ln v`.
pub fn fit_decay_delta(kernel: &MellinKernel, vs: &[f64]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &v in vs.iter().filter(|&&v| v > 1.0) {
        let y = neg_log_abs_psi(kernel, v)?;
        if y <= 0.0 {
            return Err(Error::Domain(format!("psi does not decay at v = {v}")));
        }
        best = best.min(y.ln() / v.ln());
    }
    if !best.is_finite() {
        return Err(Error::Domain("no samples above v = 1 to fit".into()));
    }
    Ok(best)
}

pub(crate) fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Phi

/// `Phi(u)` by direct summation of the classical theta-type series, in log-scaled form
/// (the common factor `exp(-pi e^{4u})` is pulled out).
pub fn phi_zeta_scaled_in<T: Real>(u: T, prec: &PrecisionConfig) -> Result<(Complex<T>, f64, T)> {
    let uf = u.to_f64();
    if uf < -2.0 {
        return Err(Error::Domain(format!(
            "phi_zeta refuses u = {uf} < -2; use the even extension"
        )));
    }
    let pi = T::pi();
    let e4 = (u * T::from_f64(4.0)).exp();
    let e5 = (u * T::from_f64(5.0)).exp();
    let e9 = (u * T::from_f64(9.0)).exp();
    let lead = pi * e4;
    let two = T::from_f64(2.0);
    let three = T::from_f64(3.0);
    let mut acc = T::zero();
    let mut abs_acc = 0.0;
    let mut n = 1usize;
    let lead_f = lead.to_f64();
    loop {
        let nf = T::from_f64(n as f64);
        let n2 = nf * nf;
        let poly = two * pi * pi * n2 * n2 * e9 - three * pi * n2 * e5;
        let expo = -(lead * (n2 - T::one()));
        let term = poly * expo.exp();
        acc += term;
        abs_acc += term.to_f64().abs();
        // remaining terms are dominated by a geometric series once the exponent wins
        let nn = (n + 1) as f64;
        let next_bound = 2.0 * std::f64::consts::PI.powi(2) * nn.powi(4) * (9.0 * uf).exp()
            * (-lead_f * (nn * nn - 1.0)).exp();
        let ratio = (-lead_f * (2.0 * nn + 1.0)).exp() * ((nn + 1.0) / nn).powi(4);
        if n >= 2 && ratio < 0.5 && next_bound / (1.0 - ratio) < T::EPS * 0.1 * abs_acc.max(1e-300) {
            break;
        }
        n += 1;
        if n > prec.max_terms {
            return Err(Error::Precision(format!(
                "phi_zeta at u = {uf} needs more than {} terms",
                prec.max_terms
            )));
        }
    }
    let four = T::from_f64(4.0);
    let val = Complex::new(acc * four, T::zero());
    let err = 4.0 * abs_acc * T::EPS * 4.0;
    Ok((val, err, lead))
}

/// Log-scaled `Phi(u)`; with `even_extension` negative `u` is answered by `Phi(-u)`.
pub fn phi_zeta_scaled(u: f64, prec: &PrecisionConfig, even_extension: bool) -> Result<ScaledValue> {
    let u = if even_extension && u < 0.0 { -u } else { u };
    if prec.wants_dd() {
        let (v, e, s) = phi_zeta_scaled_in::<Dd>(Dd::from_f64(u), prec)?;
        Ok(ScaledValue {
            value: v.to_c64(),
            err: e,
            log_scale: s.to_f64(),
        })
    } else {
        let (v, e, s) = phi_zeta_scaled_in::<f64>(u, prec)?;
        Ok(ScaledValue {
            value: v,
            err: e,
            log_scale: s,
        })
    }
}

/// `Phi(u)`; real output.
pub fn phi_zeta(u: f64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    let s = phi_zeta_scaled(u, prec, false)?;
    let v = s.unscaled();
    ValueWithError::checked(v.value, v.err, prec.target_abs_err, "phi_zeta")
}

/// `Phi` with the even extension for `u < 0`.
pub fn phi_zeta_even(u: f64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    let s = phi_zeta_scaled(u, prec, true)?;
    let v = s.unscaled();
    ValueWithError::checked(v.value, v.err, prec.target_abs_err, "phi_zeta")
}

/// `Phi(u)` truncated to exactly `terms` terms, for stability studies.
pub fn phi_zeta_terms_in<T: Real>(u: T, terms: usize) -> T {
    let pi = T::pi();
    let e4 = (u * T::from_f64(4.0)).exp();
    let e5 = (u * T::from_f64(5.0)).exp();
    let e9 = (u * T::from_f64(9.0)).exp();
    let mut acc = T::zero();
    for n in 1..=terms {
        let nf = T::from_f64(n as f64);
        let n2 = nf * nf;
        let poly = T::from_f64(2.0) * pi * pi * n2 * n2 * e9 - T::from_f64(3.0) * pi * n2 * e5;
        acc += poly * (-(pi * n2 * e4)).exp();
    }
    acc * T::from_f64(4.0)
}

/// `Phi_F(u) = 2 alpha e^u sum a_n psi(n e^{2u} / Q)` in log-scaled form.
///
/// Closed-form kernels factor out `exp(-v_1^{1/a})`; quadrature kernels have scale 0.
pub fn phi_f_scaled_in<T: Real>(
    spec: &LFunctionSpec,
    u: T,
    prec: &PrecisionConfig,
) -> Result<(Complex<T>, f64, T)> {
    let kernel = MellinKernel::from_gamma(&spec.gamma);
    let base = (u * T::from_f64(2.0) - spec.gamma.ln_q_in::<T>()).exp();
    let target = prec.target_abs_err;
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut abs_acc = 0.0;
    let mut err_acc = 0.0;
    let mut decreasing = 0;
    let mut prev = f64::INFINITY;
    let (scale, closed) = match kernel.mode {
        KernelMode::ClosedForm => {
            let (a, _) = kernel.closed_terms()?;
            ((base.ln() / T::from_f64(a)).exp(), true)
        }
        KernelMode::Quadrature => (T::zero(), false),
    };
    let prefactor_ln = (Complex::<T>::from_c64(spec.gamma.alpha) * Complex::new(T::from_f64(2.0), T::zero())).cln()
        + Complex::new(u, T::zero());
    let pre_mag = prefactor_ln.re.to_f64().exp();
    let limit = spec.finite_length().unwrap_or(usize::MAX);
    let mut n = 1usize;
    loop {
        if n > limit {
            break;
        }
        let a_n = spec.coeff(n);
        let v = base * T::from_f64(n as f64);
        let (psi_val, psi_err, bound) = if closed {
            let (val, sc) = psi_closed_scaled_in(&kernel, v)?;
            let rel = (-(sc - scale)).exp();
            let p = val.scale_by(rel);
            let m = p.to_c64().norm();
            (p, m * T::EPS * 8.0, m)
        } else {
            let (p, e) = psi_quad_in::<T>(&kernel, v.to_f64(), &prec.with_target((target / 10.0).max(1e-300)))?;
            let m = p.to_c64().norm() + e;
            (p, e, m)
        };
        let term_bound = bound * spec.coeff_bound(n as f64);
        if a_n.norm() != 0.0 {
            let t = Complex::<T>::from_c64(a_n) * psi_val;
            acc = acc + t;
            abs_acc += t.to_c64().norm();
            err_acc += psi_err * a_n.norm();
        }
        if term_bound <= prev {
            decreasing += 1;
        } else {
            decreasing = 0;
        }
        prev = term_bound;
        let scaled_target = if closed {
            // relative cutoff in scaled units
            (abs_acc.max(1e-300)) * T::EPS * 0.01
        } else {
            target / (3.0 * pre_mag.max(1e-300))
        };
        if (decreasing >= 3 && term_bound < scaled_target) || (decreasing >= 1 && term_bound == 0.0) {
            break;
        }
        n += 1;
        if n > prec.max_terms {
            return Err(Error::Precision(format!(
                "phi_F at u = {} needs more than {} terms",
                u.to_f64(),
                prec.max_terms
            )));
        }
    }
    let pre = prefactor_ln.cexp();
    let val = pre * acc;
    let err = pre_mag * (err_acc + abs_acc * T::EPS * 4.0);
    Ok((val, err, scale))
}

pub fn phi_f_scaled(spec: &LFunctionSpec, u: f64, prec: &PrecisionConfig) -> Result<ScaledValue> {
    prec.validate()?;
    let (v, e, s) = if prec.wants_dd() {
        let (v, e, s) = phi_f_scaled_in::<Dd>(spec, Dd::from_f64(u), prec)?;
        (v.to_c64(), e, s.to_f64())
    } else {
        phi_f_scaled_in::<f64>(spec, u, prec)?
    };
    Ok(ScaledValue {
        value: v,
        err: e,
        log_scale: s,
    })
}

pub fn phi_f(spec: &LFunctionSpec, u: f64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    let s = phi_f_scaled(spec, u, prec)?;
    let v = s.unscaled();
    ValueWithError::checked(v.value, v.err, prec.target_abs_err, "phi_F")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selberg::{chi4, zeta};

    fn p16() -> PrecisionConfig {
        PrecisionConfig::double(1e-12)
    }

    #[test]
    fn closed_form_examples() {
        let k = MellinKernel::gamma_kernel(1.0, 0.0, 0);
        assert!((psi_closed(&k, 1.0).unwrap().re - (-1f64).exp()).abs() < 1e-16);
        let k = MellinKernel::gamma_kernel(0.5, 0.0, 0);
        assert!((psi_closed(&k, 2.0).unwrap().re - 2.0 * (-4f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn zeta_kernel_expansion() {
        // w(w-1)Gamma(w/2) = 4 Gamma(w/2+2) - 6 Gamma(w/2+1)
        let k = MellinKernel::from_gamma(&zeta().gamma);
        let v: f64 = 1.7;
        let want = (8.0 * v.powi(4) - 12.0 * v * v) * (-v * v).exp();
        assert!((psi_closed(&k, v).unwrap().re - want).abs() < 1e-14 * want.abs());
        let k = MellinKernel::from_gamma(&chi4().gamma);
        assert!((psi_closed(&k, v).unwrap().re - 2.0 * v * (-v * v).exp()).abs() < 1e-15);
    }

    #[test]
    fn linear_prefactor_matches_quadrature() {
        // w Gamma(w/2)
        let k = MellinKernel::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![GammaFactor { omega: 0.5, mu: Complex64::new(0.0, 0.0) }],
            KernelMode::ClosedForm,
        )
        .unwrap();
        let c = psi_closed(&k, 1.3).unwrap();
        let q = psi_quad(&k, 1.3, &p16()).unwrap();
        assert!((c - q.value).norm() < 1e-10);
    }

    #[test]
    fn mode_error_for_two_factors() {
        let f = GammaFactor { omega: 0.5, mu: Complex64::new(0.0, 0.0) };
        assert!(matches!(
            MellinKernel::new(vec![Complex64::new(1.0, 0.0)], vec![f, f], KernelMode::ClosedForm),
            Err(Error::Mode(_))
        ));
        let k = MellinKernel::new(vec![Complex64::new(1.0, 0.0)], vec![f, f], KernelMode::Quadrature).unwrap();
        assert!(matches!(psi_closed(&k, 1.0), Err(Error::Mode(_))));
    }

    #[test]
    fn quad_matches_gamma_closed_form() {
        let k = MellinKernel::gamma_kernel(1.0, 0.0, 0).with_mode(KernelMode::Quadrature).unwrap();
        let q = psi_quad(&k, 0.7, &p16()).unwrap();
        assert!((q.value.re - (-0.7f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn quad_matches_closed_on_preset_kernels() {
        for spec in [zeta(), chi4()] {
            let k = MellinKernel::from_gamma(&spec.gamma);
            for &v in &[0.1, 0.7, 1.0, 2.0, 5.0, 10.0] {
                let c = psi_closed(&k, v).unwrap();
                let q = psi_quad(&k, v, &p16()).unwrap();
                assert!((c - q.value).norm() <= 1e-10 + q.err, "{} v={v}", spec.name);
            }
        }
    }

    #[test]
    fn zeta_kernel_decay_at_ten() {
        let k = MellinKernel::from_gamma(&zeta().gamma);
        let vs: Vec<f64> = (2..=20).map(|i| 2.5 * i as f64).collect();
        let delta = fit_decay_delta(&k, &vs).unwrap();
        assert!(delta > 0.0);
        let q = psi_quad(&k, 10.0, &p16()).unwrap();
        assert!(q.value.norm() <= (-(10f64.powf(delta))).exp() + q.err);
        // saddle abscissa gives relative accuracy far below the absolute target
        let c = psi_closed(&k, 10.0).unwrap();
        assert!(((q.value - c) / c).norm() < 1e-8);
    }

    #[test]
    fn two_factor_kernel_duplication_oracle() {
        // Gamma(w/2) Gamma(w/2 + 1/2) = 2^{1-w} sqrt(pi) Gamma(w)  =>  psi = 2 sqrt(pi) e^{-2v}
        let k = MellinKernel::new(
            vec![Complex64::new(1.0, 0.0)],
            vec![
                GammaFactor { omega: 0.5, mu: Complex64::new(0.0, 0.0) },
                GammaFactor { omega: 0.5, mu: Complex64::new(0.5, 0.0) },
            ],
            KernelMode::Quadrature,
        )
        .unwrap();
        let q = psi_quad(&k, 1.5, &p16()).unwrap();
        let want = 2.0 * std::f64::consts::PI.sqrt() * (-3f64).exp();
        assert!((q.value.re - want).abs() < 1e-10);
    }

    #[test]
    fn phi_zeta_examples() {
        let prec = PrecisionConfig::default();
        let a = phi_zeta(0.3, &prec).unwrap();
        let b = phi_zeta(-0.3, &prec).unwrap();
        assert!((a.value - b.value).norm() <= a.err + b.err + 1e-30);
        let far = phi_zeta_scaled(2.0, &prec, false).unwrap();
        let log10 = (far.value.norm().ln() - far.log_scale) / std::f64::consts::LN_10;
        assert!(log10 < -100.0);
        assert!(matches!(phi_zeta(-2.5, &prec), Err(Error::Domain(_))));
        assert!(phi_zeta_even(-2.5, &prec).is_ok());
    }

    #[test]
    fn phi_zero_stable_to_25_digits() {
        let u = Dd::ZERO;
        let a = phi_zeta_terms_in::<Dd>(u, 20);
        let b = phi_zeta_terms_in::<Dd>(u, 50);
        let c = phi_zeta_terms_in::<Dd>(u, 100);
        assert!(a > Dd::ZERO);
        assert!(((a - c) / c).abs().to_f64() < 1e-25);
        assert!(((b - c) / c).abs().to_f64() < 1e-25);
        let (v, _, s) = phi_zeta_scaled_in::<Dd>(u, &PrecisionConfig::default()).unwrap();
        let direct = v.re * (-s).exp();
        assert!(((direct - c) / c).abs().to_f64() < 1e-25);
    }

    #[test]
    fn phi_f_matches_phi_zeta() {
        let prec = PrecisionConfig::default();
        for i in 0..=20 {
            let u = -0.5 + 0.1 * i as f64;
            let a = phi_f_scaled(&zeta(), u, &prec).unwrap();
            let b = phi_zeta_scaled(u, &prec, false).unwrap();
            assert!(a.rel_diff(&b) < 1e-12, "u={u}: {}", a.rel_diff(&b));
        }
        let v = phi_f(&zeta(), 1.5, &p16()).unwrap();
        assert!(v.value.norm() < 1e-30);
    }

    #[test]
    fn phi_f_conjugate_symmetry() {
        let prec = PrecisionConfig::default();
        for spec in [zeta(), chi4()] {
            for &u in &[0.05, 0.2, 0.45, 0.8] {
                let a = phi_f(&spec, -u, &prec).unwrap();
                let b = phi_f(&spec, u, &prec).unwrap();
                assert!((a.value - b.value.conj()).norm() <= a.err + b.err + 1e-25, "{} u={u}", spec.name);
            }
        }
    }

    #[test]
    fn decay_is_increasing_and_superlinear() {
        for spec in [zeta(), chi4()] {
            let k = MellinKernel::from_gamma(&spec.gamma);
            let vals: Vec<f64> = (1..=50).map(|v| neg_log_abs_psi(&k, v as f64).unwrap()).collect();
            for w in vals.windows(2) {
                assert!(w[1] > w[0], "{}", spec.name);
            }
            for i in 3..49 {
                assert!(vals[i + 1] / (i + 2) as f64 > vals[i] / (i + 1) as f64);
            }
        }
    }
}
