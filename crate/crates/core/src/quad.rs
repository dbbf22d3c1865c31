//! Composite Gauss–Legendre quadrature on equal panels.

use num_complex::Complex;

use crate::parallel::par_map_range;
use crate::real::{CxExt, Real};

#[derive(Clone, Copy, Debug)]
pub struct PanelSum<T> {
    pub value: Complex<T>,
    /// Integral of the modulus, the scale against which rounding is judged.
    pub abs_integral: f64,
    pub max_abs: f64,
    pub nodes: usize,
}

/// Integrates `f` over `[a, b]` with `panels` equal 16-point panels.
pub fn gl_panels<T, F>(f: &F, a: T, b: T, panels: usize) -> PanelSum<T>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    let rule = T::gl16();
    let h = (b - a) / T::from_f64(panels as f64);
    let half = h * T::from_f64(0.5);
    let parts = par_map_range(panels, |p| {
        let mid = a + h * T::from_f64(p as f64 + 0.5);
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut abs_acc = 0.0;
        let mut max_abs: f64 = 0.0;
        for &(x, w) in rule {
            let v = f(mid + half * x);
            let m = v.to_c64().norm();
            abs_acc += m * w.to_f64();
            max_abs = max_abs.max(m);
            acc = acc + v.scale_by(w);
        }
        (acc.scale_by(half), abs_acc * half.to_f64().abs(), max_abs)
    });
    let mut value = Complex::new(T::zero(), T::zero());
    let mut abs_integral = 0.0;
    let mut max_abs: f64 = 0.0;
    for (v, a, m) in parts {
        value = value + v;
        abs_integral += a;
        max_abs = max_abs.max(m);
    }
    PanelSum {
        value,
        abs_integral,
        max_abs,
        nodes: panels * rule.len(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Refined<T> {
    pub value: Complex<T>,
    /// `|I_P - I_2P|` plus a rounding estimate.
    pub err: f64,
    pub abs_integral: f64,
    pub max_abs: f64,
    pub nodes: usize,
}

/// Evaluates with `panels` and `2 * panels` panels and reports the finer value with
/// their difference as the discretisation error estimate.
pub fn gl_refined<T, F>(f: &F, a: T, b: T, panels: usize) -> Refined<T>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    let coarse = gl_panels(f, a, b, panels);
    let fine = gl_panels(f, a, b, 2 * panels);
    let diff = (fine.value - coarse.value).to_c64().norm();
    let rounding = fine.abs_integral * T::EPS * (fine.nodes as f64).sqrt() * 4.0;
    Refined {
        value: fine.value,
        err: diff + rounding,
        abs_integral: fine.abs_integral,
        max_abs: fine.max_abs,
        nodes: coarse.nodes + fine.nodes,
    }
}

/// Integrates over consecutive panels `[edges[i], edges[i+1]]`.
pub fn gl_edges<T, F>(f: &F, edges: &[T]) -> PanelSum<T>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    let rule = T::gl16();
    let panels = edges.len().saturating_sub(1);
    let parts = par_map_range(panels, |p| {
        let half = (edges[p + 1] - edges[p]) * T::from_f64(0.5);
        let mid = edges[p] + half;
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut abs_acc = 0.0;
        let mut max_abs: f64 = 0.0;
        for &(x, w) in rule {
            let v = f(mid + half * x);
            let m = v.to_c64().norm();
            abs_acc += m * w.to_f64();
            max_abs = max_abs.max(m);
            acc = acc + v.scale_by(w);
        }
        (acc.scale_by(half), abs_acc * half.to_f64().abs(), max_abs)
    });
    let mut value = Complex::new(T::zero(), T::zero());
    let mut abs_integral = 0.0;
    let mut max_abs: f64 = 0.0;
    for (v, a, m) in parts {
        value = value + v;
        abs_integral += a;
        max_abs = max_abs.max(m);
    }
    PanelSum {
        value,
        abs_integral,
        max_abs,
        nodes: panels * rule.len(),
    }
}

/// [`gl_edges`] on the given panels and on their halves; the halved result is reported.
pub fn gl_refined_edges<T, F>(f: &F, edges: &[T]) -> Refined<T>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    let mut fine_edges = Vec::with_capacity(2 * edges.len());
    for w in edges.windows(2) {
        fine_edges.push(w[0]);
        fine_edges.push((w[0] + w[1]) * T::from_f64(0.5));
    }
    if let Some(&last) = edges.last() {
        fine_edges.push(last);
    }
    let coarse = gl_edges(f, edges);
    let fine = gl_edges(f, &fine_edges);
    let diff = (fine.value - coarse.value).to_c64().norm();
    let rounding = fine.abs_integral * T::EPS * (fine.nodes as f64).sqrt() * 4.0;
    Refined {
        value: fine.value,
        err: diff + rounding,
        abs_integral: fine.abs_integral,
        max_abs: fine.max_abs,
        nodes: coarse.nodes + fine.nodes,
    }
}

/// Panel edges on `[a, b]` where the width at `x` is `min(max_phase / rate(x), max_width)`.
pub fn adaptive_edges<R: Fn(f64) -> f64>(a: f64, b: f64, rate: R, max_phase: f64, max_width: f64) -> Vec<f64> {
    let mut edges = vec![a];
    let mut x = a;
    while x < b {
        // the rate is evaluated at both ends of the trial panel
        let mut h = max_width.min(max_phase / rate(x).max(1e-300));
        while h > 1e-9 && max_phase / rate((x + h).min(b)).max(1e-300) < h {
            h *= 0.5;
        }
        x = (x + h).min(b);
        edges.push(x);
    }
    edges
}

/// Panel count so that each panel spans at most `max_phase` radians of a phase that
/// advances at `freq` radians per unit length, and at most `max_width` in length.
pub fn panels_for(len: f64, freq: f64, max_phase: f64, max_width: f64) -> usize {
    let by_phase = if freq > 0.0 { len * freq / max_phase } else { 0.0 };
    let by_width = len / max_width;
    by_phase.max(by_width).ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use num_complex::Complex64;

    #[test]
    fn oscillatory_integral() {
        // int_0^1 e^{i 40 x} dx
        let f = |x: f64| Complex64::new(0.0, 40.0 * x).exp();
        let n = panels_for(1.0, 40.0, std::f64::consts::FRAC_PI_4, 1.0);
        let r = gl_refined(&f, 0.0, 1.0, n);
        let want = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - want).norm() < 1e-14);
        assert!(r.err < 1e-12);
    }

    #[test]
    fn adaptive_panels_on_steep_decay() {
        // int_0^1 100 e^{-100 x} dx = 1 - e^{-100}
        let f = |x: f64| Complex64::new(100.0 * (-100.0 * x).exp(), 0.0);
        let edges = adaptive_edges(0.0, 1.0, |_| 100.0, 1.0, 0.5);
        let r = gl_refined_edges(&f, &edges);
        assert!((r.value.re - 1.0).abs() < 1e-14);
        assert!(r.err < 1e-12);
    }

    #[test]
    fn gaussian_in_dd() {
        let f = |x: Dd| Complex::new((-(x * x)).exp(), Dd::ZERO);
        let r = gl_refined(&f, Dd::from_f64(-9.0), Dd::from_f64(9.0), 12);
        let want = Dd::PI.sqrt();
        assert!((r.value.re - want).abs().to_f64() < 1e-30);
    }
}
