//! `xi_t` by the Fourier and contour routes, the rescaled `h(s) = xi_t(J_t(s)) / gamma_t(s)`,
//! the pieces `B_{t,n}` and the approximation residual.

use std::sync::Mutex;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::deform::{check_t, gamma_t, j_map, ln_gamma_t, DeformedSeries};
use crate::mellin::phi_f_scaled_in;
use crate::precision::{Error, PrecisionConfig, Result, ValueWithError};
use crate::quad::{adaptive_edges, gl_edges, gl_refined_edges};
use crate::real::{CxExt, Real};
use crate::selberg::{f_eval_in, ln_gamma_factor_in, relative_residual, xi_f_eval_in, LFunctionSpec};

/// Height below which `J_t`-composed evaluations are refused.
pub const Y_MIN: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Fourier,
    Contour,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePlan {
    pub contour_abscissa: f64,
    pub half_height: f64,
    pub panel_count: usize,
    /// Fourier cutoff `U`; zero for contour plans.
    pub u_cutoff: f64,
    /// Largest panel width used.
    pub step_bound: f64,
}

/// A quadrature result with its plan.
#[derive(Clone, Copy, Debug)]
pub struct RouteValue {
    pub value: ValueWithError,
    pub plan: QuadraturePlan,
    pub route: Route,
}

fn first_error(slot: &Mutex<Option<Error>>, e: Error) {
    let mut g = slot.lock().unwrap();
    if g.is_none() {
        *g = Some(e);
    }
}

fn take_error(slot: Mutex<Option<Error>>) -> Result<()> {
    match slot.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn max_width(edges: &[f64]) -> f64 {
    edges.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn omega_sum(spec: &LFunctionSpec) -> f64 {
    spec.gamma.factors.iter().map(|f| f.omega).sum()
}

// ---------------------------------------------------------------------------
// Gaussian line integrals

/// `(1/sqrt(pi|t|)) int G(c + iv) exp(offset + (z0 - c - iv)^2 / |t|) dv` where `G` is
/// `gamma` or `gamma F`.
struct LineIntegral {
    z0: Complex64,
    c: f64,
    offset: Complex64,
    with_f: bool,
}

struct LineResult {
    value: Complex64,
    err: f64,
    plan: QuadraturePlan,
}

fn line_integral<T: Real>(spec: &LFunctionSpec, t: f64, li: &LineIntegral, prec: &PrecisionConfig) -> Result<LineResult> {
    let at = t.abs();
    let norm_ln = -0.5 * (std::f64::consts::PI * at).ln();
    let k = std::f64::consts::FRAC_PI_2 * omega_sum(spec);
    let v0 = li.z0.im;
    let target = prec.target_abs_err;
    // log-magnitude of the weight exp(ln gamma + offset + gaussian), double precision
    let ln_weight = |v: f64| -> Result<f64> {
        let w = Complex64::new(li.c, v);
        let d = li.z0 - w;
        let lg = ln_gamma_factor_in::<f64>(&spec.gamma, w, false)?;
        Ok(lg.re + li.offset.re + (d * d).re / at + norm_ln)
    };
    let center = ln_weight(v0)?;
    let f_center = if li.with_f {
        let p = prec.with_target(1e-3);
        let w = Complex64::new(li.c, v0);
        match f_eval_in::<f64>(spec, w, &p) {
            Ok((v, _)) => v.norm(),
            Err(_) => 1.0,
        }
    } else {
        1.0
    };
    let f_max = if li.with_f { 10.0 * (1.0 + f_center) } else { 1.0 };
    let need = (center + f_max.ln() - target.ln()).max(1.0) + 5.0;
    let half = k * at + (at * need + (k * at / 2.0).powi(2)).sqrt();
    let (lo, hi) = (v0 - half, v0 + half);
    let tail = {
        let ends = ln_weight(lo)?.exp() + ln_weight(hi)?.exp();
        ends * f_max * at / (2.0 * half - k * at).max(0.1)
    };
    let omega_data: Vec<(f64, f64)> = spec.gamma.factors.iter().map(|f| (f.omega, f.mu.norm())).collect();
    let cross = 2.0 * (li.z0.re - li.c).abs() / at;
    let with_f = li.with_f;
    let c = li.c;
    let q = spec.gamma.big_q;
    let rate = |v: f64| -> f64 {
        let r = (c * c + v * v).sqrt();
        let g: f64 = omega_data.iter().map(|&(o, m)| o * (o * r + m).max(1.0).ln()).sum();
        let f = if with_f { 0.5 * (r / (q * q).min(1.0)).max(1.0).ln() + 1.0 } else { 0.0 };
        g + f + cross + 1.0
    };
    // 16-point panels; double precision tolerates coarser panels than double-double
    let (max_phase, width_cap) = if T::DIGITS > 16 {
        (std::f64::consts::FRAC_PI_4, at.sqrt() / 2.0)
    } else {
        (std::f64::consts::PI, 1.5 * at.sqrt())
    };
    let edges = adaptive_edges(lo, hi, rate, max_phase, width_cap);
    // total weight, which scales the per-node error of F
    let weight_total = {
        let wf = |v: f64| Complex64::new(ln_weight(v).map(|l| l.exp()).unwrap_or(0.0), 0.0);
        gl_edges(&wf, &edges).value.re
    };
    let f_floor = if T::DIGITS > 16 { 1e-30 } else { 1e-14 };
    let f_target = (target / (3.0 * weight_total.max(1e-300))).clamp(f_floor, 1e-3);
    let fprec = prec.with_target(f_target);
    let err_slot = Mutex::new(None);
    let at_t = T::from_f64(at);
    let z0 = Complex::<T>::from_c64(li.z0);
    let off = Complex::<T>::from_c64(li.offset);
    let norm_t = T::from_f64(norm_ln);
    let ct = T::from_f64(c);
    let pole_near = |w: Complex64| spec.has_pole() && (w - 1.0).norm() < 0.5;
    let integrand = |v: T| -> Complex<T> {
        let w = Complex::new(ct, v);
        let wc = w.to_c64();
        let d = z0 - w;
        let gauss = (d * d).scale_by(T::one() / at_t) + off + Complex::new(norm_t, T::zero());
        let r: Result<Complex<T>> = (|| {
            if with_f && pole_near(wc) {
                let (xi, _) = xi_f_eval_in::<T>(spec, w, &fprec)?;
                return Ok(xi * gauss.cexp());
            }
            let lg = ln_gamma_factor_in::<T>(&spec.gamma, w, false)?;
            let e = (lg + gauss).cexp();
            if with_f {
                let (f, _) = f_eval_in::<T>(spec, w, &fprec)?;
                Ok(e * f)
            } else {
                Ok(e)
            }
        })();
        match r {
            Ok(v) => v,
            Err(e) => {
                first_error(&err_slot, e);
                Complex::new(T::zero(), T::zero())
            }
        }
    };
    let edges_t: Vec<T> = edges.iter().map(|&e| T::from_f64(e)).collect();
    let r = gl_refined_edges(&integrand, &edges_t);
    take_error(err_slot)?;
    let f_err = if with_f { f_target * weight_total * 1.5 } else { 0.0 };
    let err = r.err + tail + f_err + r.value.to_c64().norm() * f64::EPSILON;
    Ok(LineResult {
        value: r.value.to_c64(),
        err,
        plan: QuadraturePlan {
            contour_abscissa: c,
            half_height: half,
            panel_count: 2 * (edges.len() - 1),
            u_cutoff: 0.0,
            step_bound: max_width(&edges) / 2.0,
        },
    })
}

// ---------------------------------------------------------------------------
// Fourier route

fn fourier_in<T: Real>(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<RouteValue> {
    let target = prec.target_abs_err;
    let x = s.re;
    let y = s.im;
    let tilt = (2.0 * x - 1.0).abs();
    let a = omega_sum(spec);
    let phi_prec = prec.with_target(1e-300_f64.max(target * 1e-3));
    // log of the integrand envelope, double precision
    let ln_env = |u: f64| -> f64 {
        match phi_f_scaled_in::<f64>(spec, u, &phi_prec) {
            Ok((v, _, sc)) => t * u * u - sc + tilt * u + v.norm().max(1e-300).ln(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let goal = (target / 6.0).ln();
    let mut u_max = 0.25;
    while !(ln_env(u_max) < goal && ln_env(u_max + 0.05) < ln_env(u_max)) {
        u_max += 0.02;
        if u_max > 6.0 {
            return Err(Error::Precision("Fourier cutoff did not converge".into()));
        }
    }
    let tail = 2.0 * ln_env(u_max).exp();
    let q = spec.gamma.big_q;
    let rate = |u: f64| -> f64 {
        2.0 * y.abs() + tilt + 2.0 * t.abs() * u + (2.0 / a) * ((2.0 * u).exp() / q).powf(1.0 / a) + 2.0
    };
    let edges = adaptive_edges(0.0, u_max, rate, std::f64::consts::FRAC_PI_4, 0.1);
    let err_slot = Mutex::new(None);
    let tt = T::from_f64(t);
    let two_s_minus_1 = Complex::<T>::from_c64(2.0 * s - 1.0);
    let integrand = |u: T| -> Complex<T> {
        match phi_f_scaled_in::<T>(spec, u, &phi_prec) {
            Ok((v, _, sc)) => {
                let base = tt * u * u - sc;
                let e = two_s_minus_1.scale_by(u);
                let plus = (e + Complex::new(base, T::zero())).cexp();
                let minus = (-e + Complex::new(base, T::zero())).cexp();
                v * plus + v.conj() * minus
            }
            Err(e) => {
                first_error(&err_slot, e);
                Complex::new(T::zero(), T::zero())
            }
        }
    };
    let edges_t: Vec<T> = edges.iter().map(|&e| T::from_f64(e)).collect();
    let r = gl_refined_edges(&integrand, &edges_t);
    take_error(err_slot)?;
    let value = r.value.to_c64();
    // Phi_F carries a relative error of a few units of roundoff
    let err = r.err + tail + r.abs_integral * T::EPS * 64.0 + value.norm() * f64::EPSILON;
    let plan = QuadraturePlan {
        contour_abscissa: 0.0,
        half_height: 0.0,
        panel_count: 2 * (edges.len() - 1),
        u_cutoff: u_max,
        step_bound: max_width(&edges) / 2.0,
    };
    if r.abs_integral * T::EPS > target {
        let lost = (r.abs_integral / value.norm().max(1e-300)).log10();
        return Err(Error::Precision(format!(
            "Fourier route at {s}: cancellation loses {lost:.1} digits of {}",
            prec.working_digits
        )));
    }
    Ok(RouteValue {
        value: ValueWithError::checked(value, err, target, "xi_t (Fourier)")?,
        plan,
        route: Route::Fourier,
    })
}

/// `xi_t(s) = int e^{t u^2} Phi_F(u) e^{(2s-1)u} du`, integrated over `u >= 0` using
/// `Phi_F(-u) = conj Phi_F(u)`.
pub fn xi_t_fourier(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    xi_t_fourier_plan(spec, t, s, prec).map(|r| r.value)
}

pub fn xi_t_fourier_plan(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<RouteValue> {
    prec.validate()?;
    check_t(t)?;
    if prec.wants_dd() {
        fourier_in::<Dd>(spec, t, s, prec)
    } else {
        fourier_in::<f64>(spec, t, s, prec)
    }
}

// ---------------------------------------------------------------------------
// Contour route

/// Abscissa of the contour route.
pub const CONTOUR_C: f64 = 2.0;

/// Decimal digits by which the contour integrand exceeds the result at `Re s = x`.
pub fn contour_headroom_digits(t: f64, x: f64) -> f64 {
    (x - CONTOUR_C).powi(2) / t.abs() * std::f64::consts::LOG10_E
}

/// `xi_t(s) = (1/sqrt(pi|t|)) int xi^F(2 + iv) e^{(s - 2 - iv)^2 / |t|} dv`.
pub fn xi_t_contour(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    xi_t_contour_plan(spec, t, s, prec).map(|r| r.value)
}

pub fn xi_t_contour_plan(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<RouteValue> {
    prec.validate()?;
    check_t(t)?;
    let head = contour_headroom_digits(t, s.re);
    let digits = if prec.wants_dd() { Dd::DIGITS } else { f64::DIGITS };
    if head + 3.0 > digits as f64 {
        return Err(Error::Precision(format!(
            "contour route at Re s = {} needs {head:.1} digits of headroom, working precision has {digits}",
            s.re
        )));
    }
    let li = LineIntegral {
        z0: s,
        c: CONTOUR_C,
        offset: Complex64::new(0.0, 0.0),
        with_f: true,
    };
    let r = if prec.wants_dd() {
        line_integral::<Dd>(spec, t, &li, prec)?
    } else {
        line_integral::<f64>(spec, t, &li, prec)?
    };
    Ok(RouteValue {
        value: ValueWithError::checked(r.value, r.err, prec.target_abs_err, "xi_t (contour)")?,
        plan: r.plan,
        route: Route::Contour,
    })
}

/// Route selection: Fourier for `|Re s - 1/2| <= 3`, contour otherwise.
pub fn xi_t_eval(spec: &LFunctionSpec, t: f64, s: Complex64, route: Route, prec: &PrecisionConfig) -> Result<RouteValue> {
    match route {
        Route::Fourier => xi_t_fourier_plan(spec, t, s, prec),
        Route::Contour => xi_t_contour_plan(spec, t, s, prec),
        Route::Auto => {
            if (s.re - 0.5).abs() <= 3.0 {
                xi_t_fourier_plan(spec, t, s, prec)
            } else {
                xi_t_contour_plan(spec, t, s, prec)
            }
        }
    }
}

/// `|xi_t(s) - conj xi_t(1 - conj s)| / max(|xi_t(s)|, 10^-digits)`.
pub fn xi_t_fe_residual(spec: &LFunctionSpec, t: f64, s: Complex64, route: Route, prec: &PrecisionConfig) -> Result<f64> {
    let a = xi_t_eval(spec, t, s, route, prec)?.value;
    let b = xi_t_eval(spec, t, 1.0 - s.conj(), route, prec)?.value;
    let floor = 10f64.powi(-(prec.working_digits as i32));
    Ok(relative_residual(a.value, b.value.conj(), floor))
}

// ---------------------------------------------------------------------------
// Saddle-point route

/// `xi_t(w) e^{-log_scale}` by the contour through `Re w`, in double precision. With
/// `log_scale = ln gamma_t(s)` and `w = J_t(s)` the integrand carries no cancellation.
pub fn xi_t_scaled(
    spec: &LFunctionSpec,
    t: f64,
    w: Complex64,
    log_scale: Complex64,
    prec: &PrecisionConfig,
) -> Result<ValueWithError> {
    prec.validate()?;
    check_t(t)?;
    let li = LineIntegral {
        z0: w,
        c: w.re,
        offset: -log_scale,
        with_f: true,
    };
    let r = line_integral::<f64>(spec, t, &li, prec)?;
    ValueWithError::checked(r.value, r.err, prec.target_abs_err, "xi_t (saddle)")
}

fn check_height(s: Complex64) -> Result<()> {
    if s.im < Y_MIN {
        return Err(Error::PoleProximity(format!(
            "Im s = {} is below the pole-region floor {Y_MIN}",
            s.im
        )));
    }
    Ok(())
}

/// `h(s) = xi_t(J_t(s)) / gamma_t(s)`.
pub fn h_eval(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    check_t(t)?;
    check_height(s)?;
    let j = j_map(spec, t, s)?;
    let l = ln_gamma_t(spec, t, s)?;
    xi_t_scaled(spec, t, j, l, prec)
}

// ---------------------------------------------------------------------------
// B_{t,n}

/// Rightmost pole of `gamma` on the real axis, if any.
pub fn rightmost_gamma_pole(spec: &LFunctionSpec) -> Option<f64> {
    let m = spec.gamma.pole_order_m;
    let mut best: Option<f64> = None;
    for f in &spec.gamma.factors {
        if f.mu.im != 0.0 {
            continue;
        }
        for k in 0..4 {
            let p = -(f.mu.re + k as f64) / f.omega;
            // s^m cancels a simple pole at zero
            if m > 0 && p.abs() < 1e-12 {
                continue;
            }
            best = Some(best.map_or(p, |b: f64| b.max(p)));
            break;
        }
    }
    best
}

/// `B_{t,n}(s) / gamma_t(s)`, integrated along `Re z = Re J_t(s) + (|t|/2) log n`.
pub fn b_tn_over_gamma_t(spec: &LFunctionSpec, t: f64, n: usize, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    prec.validate()?;
    check_t(t)?;
    check_height(s)?;
    if n == 0 {
        return Err(Error::Domain("B_{t,n} needs n >= 1".into()));
    }
    let j = j_map(spec, t, s)?;
    let ln_n = (n as f64).ln();
    let c = j.re + t.abs() / 2.0 * ln_n;
    if let Some(p) = rightmost_gamma_pole(spec) {
        if c <= p {
            return Err(Error::PoleCrossing(format!(
                "moving the contour from Re z = 2 to {c} crosses the pole at {p}"
            )));
        }
    }
    let lgt = ln_gamma_t(spec, t, s)?;
    let li = LineIntegral {
        z0: Complex64::new(c, j.im),
        c,
        offset: -lgt - j * ln_n - t.abs() / 4.0 * ln_n * ln_n,
        with_f: false,
    };
    let r = line_integral::<f64>(spec, t, &li, prec)?;
    ValueWithError::checked(r.value, r.err, prec.target_abs_err, "B_{t,n}")
}

/// `B_{t,n}(s)`; underflows to zero at large heights, where the ratio form is used instead.
pub fn b_tn(spec: &LFunctionSpec, t: f64, n: usize, s: Complex64, prec: &PrecisionConfig) -> Result<ValueWithError> {
    let r = b_tn_over_gamma_t(spec, t, n, s, prec)?;
    let g = gamma_t(spec, t, s, &PrecisionConfig::double(f64::MAX))?;
    Ok(ValueWithError::new(r.value * g.value, r.err * g.value.norm() + g.err * r.value.norm()))
}

/// `|B_{t,n}(s) / (gamma_t(s) e^{-|t| log^2 n / 4} n^{-s}) - 1|`.
pub fn lemma5_ratio_deviation(spec: &LFunctionSpec, t: f64, n: usize, s: Complex64, prec: &PrecisionConfig) -> Result<f64> {
    let r = b_tn_over_gamma_t(spec, t, n, s, prec)?;
    let ln_n = (n as f64).ln();
    let main = (-(t.abs() / 4.0) * ln_n * ln_n - s * ln_n).exp();
    Ok((r.value / main - 1.0).norm())
}

// ---------------------------------------------------------------------------
// Residual

/// `|h(s) - F_t(s)|`.
pub fn theorem4_residual(spec: &LFunctionSpec, t: f64, s: Complex64, prec: &PrecisionConfig) -> Result<f64> {
    let h = h_eval(spec, t, s, prec)?;
    let series = DeformedSeries::new(spec, t, s.re, prec.target_abs_err / 2.0, prec.max_terms)?;
    let (f, _) = series.eval(s);
    Ok((h.value - f).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selberg::{chi4, zeta};

    fn p16() -> PrecisionConfig {
        PrecisionConfig::double(1e-12)
    }

    #[test]
    fn fourier_real_on_critical_line() {
        let prec = PrecisionConfig::default().with_target(1e-15);
        let v = xi_t_fourier(&zeta(), -1.0, Complex64::new(0.5, 20.0), &prec).unwrap();
        assert!(v.value.im.abs() <= v.err.max(1e-30));
        let c = xi_t_fourier(&zeta(), -1.0, Complex64::new(0.5, 0.0), &prec).unwrap();
        assert!(c.value.re > 0.0 && c.value.im.abs() <= c.err);
    }

    #[test]
    fn routes_agree() {
        let spec = zeta();
        for &(t, s) in &[(-1.0, Complex64::new(0.3, 20.0)), (-0.5, Complex64::new(0.3, 25.0))] {
            let g = gamma_t(&spec, t, s, &p16()).unwrap().value.norm();
            let prec = PrecisionConfig::default().with_target(1e-10 * g);
            let a = xi_t_fourier(&spec, t, s, &prec).unwrap();
            let b = xi_t_contour(&spec, t, s, &prec).unwrap();
            assert!((a.value - b.value).norm() <= a.err + b.err, "t={t} s={s}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn contour_functional_equation() {
        let spec = zeta();
        let s = Complex64::new(0.4, 15.0);
        let prec = PrecisionConfig::default().with_target(1e-15);
        let r = xi_t_fe_residual(&spec, -1.0, s, Route::Contour, &prec).unwrap();
        assert!(r <= 1e-8, "{r}");
    }

    #[test]
    fn contour_refuses_far_right() {
        let r = xi_t_contour(&zeta(), -1.0, Complex64::new(30.0, 5.0), &PrecisionConfig::default());
        assert!(matches!(r, Err(Error::Precision(_))));
    }

    #[test]
    fn saddle_route_matches_contour() {
        // xi_t(w) at a moderate height by both routes
        let spec = chi4();
        let w = Complex64::new(0.6, 18.0);
        let l = crate::deform::ln_gamma_factor(&spec, w).unwrap();
        let g = l.exp().norm();
        let a = xi_t_scaled(&spec, -1.0, w, l, &p16()).unwrap();
        let b = xi_t_contour(&spec, -1.0, w, &PrecisionConfig::default().with_target(1e-11 * g)).unwrap();
        assert!((a.value * l.exp() - b.value).norm() <= a.err * g + b.err + 1e-10 * g);
    }

    #[test]
    fn b_tn_main_term() {
        let spec = zeta();
        for n in 1..=3 {
            let lo = lemma5_ratio_deviation(&spec, -1.0, n, Complex64::new(-0.25, 30.0), &p16()).unwrap();
            let hi = lemma5_ratio_deviation(&spec, -1.0, n, Complex64::new(-0.25, 60.0), &p16()).unwrap();
            assert!(hi < lo, "n={n}: {lo} {hi}");
        }
    }

    #[test]
    fn b_sum_reconstructs_h() {
        let spec = zeta();
        let t = -1.0;
        let s = Complex64::new(-0.25, 50.0);
        let h = h_eval(&spec, t, s, &p16()).unwrap();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut last = f64::INFINITY;
        for n in 1..=3000 {
            let b = b_tn_over_gamma_t(&spec, t, n, s, &PrecisionConfig::double(1e-13)).unwrap();
            acc += spec.coeff(n) * b.value;
            last = b.value.norm();
        }
        let tail = crate::deform::tail_bound(&spec, t, s.re, 3000);
        assert!(last < 1e-5, "{last}");
        assert!((acc - h.value).norm() < 1e-4 + tail, "{acc} vs {}", h.value);
    }

    #[test]
    fn pole_floor() {
        assert!(matches!(
            h_eval(&zeta(), -1.0, Complex64::new(0.0, 5.0), &p16()),
            Err(Error::PoleProximity(_))
        ));
    }

    #[test]
    fn residual_is_small_at_height() {
        let r = theorem4_residual(&zeta(), -1.0, Complex64::new(-0.25, 60.0), &p16()).unwrap();
        assert!(r < 0.1, "{r}");
    }
}
