//! Vertical almost-periods of `F_t`: shifts `tau` with `|F_t(s + i tau) - F_t(s)| < eps`
//! on a strip.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deform::{check_negative, truncation_n, DeformedSeries};
use crate::parallel::par_map_range;
use crate::precision::{Error, PrecisionConfig, Result};
use crate::selberg::LFunctionSpec;
use crate::zerofind::Rect;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub tau: f64,
    pub epsilon: f64,
    pub strip: Rect,
    pub sup_sampled: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ShiftOptions {
    /// Smallest shift considered; `0` means the first scan step.
    pub tau_min: f64,
    /// Scan step; `0` picks the smaller of `0.1 / log N_dom` and the step over which the
    /// dominant-term bound can move by at most `eps / 4`.
    pub step: f64,
    /// Verification grid density used by the search.
    pub grid_density: f64,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        ShiftOptions {
            tau_min: 0.0,
            step: 0.0,
            grid_density: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftCheck {
    pub sup_sampled: f64,
    /// Lipschitz padding from the grid spacing and sampled derivative, plus series error.
    pub padding: f64,
    pub pass: bool,
}

const GRID_DX: f64 = 0.01;
const GRID_DY: f64 = 0.25;
/// Scan steps evaluated per batch before looking for accepted runs.
const CHUNK: usize = 2048;
const BATCH: usize = 16;

fn series_for(spec: &LFunctionSpec, t: f64, strip: &Rect, epsilon: f64, prec: &PrecisionConfig) -> Result<DeformedSeries> {
    DeformedSeries::new(spec, t, strip.x_lo, (epsilon * 1e-3).min(1e-8), prec.max_terms)
}

fn grid(strip: &Rect, density: f64) -> Vec<Complex64> {
    let nx = ((strip.width() / (GRID_DX / density)).ceil() as usize).max(1);
    let ny = ((strip.height() / (GRID_DY / density)).ceil() as usize).max(1);
    let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            pts.push(Complex64::new(
                strip.x_lo + strip.width() * i as f64 / nx as f64,
                strip.y_lo + strip.height() * j as f64 / ny as f64,
            ));
        }
    }
    pts
}

fn check_with(series: &DeformedSeries, strip: &Rect, tau: f64, epsilon: f64, density: f64) -> ShiftCheck {
    let pts = grid(strip, density);
    let shift = Complex64::new(0.0, tau);
    let rows = par_map_range(pts.len(), |k| {
        let s = pts[k];
        let (a, da, ea) = series.eval_full(s + shift);
        let (b, db, eb) = series.eval_full(s);
        ((a - b).norm(), (da - db).norm(), ea + eb)
    });
    let sup = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let dmax = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let emax = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    // every strip point lies within half a cell diagonal of a grid point
    let dx = GRID_DX / density;
    let dy = GRID_DY / density;
    let padding = 0.5 * dx.hypot(dy) * dmax + emax;
    ShiftCheck {
        sup_sampled: sup,
        padding,
        pass: sup + padding < epsilon,
    }
}

/// Sup of `|F_t(s + i tau) - F_t(s)|` over a grid of `strip` with spacing
/// `0.01 x 0.25` divided by `grid_density`.
pub fn verify_shift(
    spec: &LFunctionSpec,
    t: f64,
    strip: &Rect,
    tau: f64,
    epsilon: f64,
    grid_density: f64,
    prec: &PrecisionConfig,
) -> Result<ShiftCheck> {
    check_negative(t)?;
    if !(tau > 0.0) || !(grid_density > 0.0) {
        return Err(Error::Domain(format!("need tau > 0 and grid density > 0, got {tau}, {grid_density}")));
    }
    let series = series_for(spec, t, strip, epsilon, prec)?;
    Ok(check_with(&series, strip, tau, epsilon, grid_density))
}

/// Dominant terms `c_n = |a_n| e^{-|t| log^2 n / 4} n^{-x_lo}` for `n <= N_dom` together
/// with `log n`. The terms past `N_dom` sum to less than `eps / 4`.
pub fn dominant_terms(spec: &LFunctionSpec, t: f64, x_lo: f64, epsilon: f64, max_terms: usize) -> Result<Vec<(f64, f64)>> {
    let n_dom = truncation_n(spec, t, x_lo, epsilon / 4.0, max_terms)?;
    let a = t.abs() / 4.0;
    Ok((1..=n_dom)
        .map(|n| {
            let l = (n as f64).ln();
            (spec.coeff(n).norm() * (-a * l * l - x_lo * l).exp(), l)
        })
        .filter(|&(c, _)| c > 0.0)
        .collect())
}

/// `sum c_n |n^{-i tau} - 1|` on `tau_0 + k step`, `k < len`, via the phasor recurrence
/// `n^{-i (tau + step)} = n^{-i tau} n^{-i step}`.
fn partial_bounds(terms: &[(f64, f64)], tau0: f64, step: f64, len: usize) -> Vec<f64> {
    let mut z: Vec<Complex64> = terms.iter().map(|&(_, l)| Complex64::from_polar(1.0, -tau0 * l)).collect();
    let rot: Vec<Complex64> = terms.iter().map(|&(_, l)| Complex64::from_polar(1.0, -step * l)).collect();
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 && k % 256 == 0 {
            // drift control
            let tau = tau0 + step * k as f64;
            for (zi, &(_, l)) in z.iter_mut().zip(terms) {
                *zi = Complex64::from_polar(1.0, -tau * l);
            }
        }
        out.push(terms.iter().zip(&z).map(|(&(c, _), zi)| c * (zi - one).norm()).sum());
        for (zi, r) in z.iter_mut().zip(&rot) {
            *zi *= r;
        }
    }
    out
}

/// Up to `count` shifts in `(0, tau_max]`, increasing, each verified on the search grid.
/// Runs of consecutive scan points whose dominant-term bound is below `eps / 2` are
/// represented by their best point.
#[allow(clippy::too_many_arguments)]
pub fn find_shifts(
    spec: &LFunctionSpec,
    t: f64,
    strip: &Rect,
    epsilon: f64,
    tau_max: f64,
    count: usize,
    opts: &ShiftOptions,
    prec: &PrecisionConfig,
) -> Result<Vec<ShiftRecord>> {
    check_negative(t)?;
    if !(epsilon > 0.0) || !tau_max.is_finite() || !(tau_max > 0.0) {
        return Err(Error::Domain(format!("need eps > 0 and finite tau_max > 0, got {epsilon}, {tau_max}")));
    }
    let terms = dominant_terms(spec, t, strip.x_lo, epsilon, prec.max_terms)?;
    let ln_max = terms.iter().map(|&(_, l)| l).fold(0.0, f64::max);
    let slope: f64 = terms.iter().map(|&(c, l)| c * l).sum();
    let step = if opts.step > 0.0 {
        opts.step
    } else {
        (0.1 / ln_max.max(1.0)).min(epsilon / (4.0 * slope.max(1e-300)))
    };
    let tau_start = if opts.tau_min > 0.0 { opts.tau_min } else { step };
    if tau_start > tau_max {
        return Err(Error::Domain(format!("tau_min {tau_start} exceeds tau_max {tau_max}")));
    }
    let series = series_for(spec, t, strip, epsilon, prec)?;
    let total = ((tau_max - tau_start) / step).floor() as usize + 1;

    let mut found: Vec<ShiftRecord> = Vec::new();
    let mut best = (f64::NAN, f64::INFINITY);
    let mut best_bound = (tau_start, f64::INFINITY);
    // current run of candidates: (tau, bound) of its best point
    let mut run: Option<(f64, f64)> = None;
    let verify = |tau: f64, found: &mut Vec<ShiftRecord>, best: &mut (f64, f64)| {
        let c = check_with(&series, strip, tau, epsilon, opts.grid_density);
        if c.sup_sampled < best.1 {
            *best = (tau, c.sup_sampled);
        }
        if c.pass {
            found.push(ShiftRecord {
                tau,
                epsilon,
                strip: *strip,
                sup_sampled: c.sup_sampled,
            });
        }
    };

    let mut k0 = 0;
    while k0 < total && found.len() < count {
        let chunks = (total - k0).div_ceil(CHUNK).min(BATCH);
        let base = k0;
        let parts = par_map_range(chunks, |c| {
            let lo = k0 + c * CHUNK;
            let len = CHUNK.min(total - lo);
            partial_bounds(&terms, tau_start + step * lo as f64, step, len)
        });
        for (c, part) in parts.into_iter().enumerate() {
            for (i, p) in part.into_iter().enumerate() {
                let tau = tau_start + step * (base + c * CHUNK + i) as f64;
                if p < best_bound.1 {
                    best_bound = (tau, p);
                }
                if p < epsilon / 2.0 {
                    run = match run {
                        Some((bt, bp)) if bp <= p => Some((bt, bp)),
                        _ => Some((tau, p)),
                    };
                } else if let Some((bt, _)) = run.take() {
                    verify(bt, &mut found, &mut best);
                    if found.len() >= count {
                        break;
                    }
                }
            }
            if found.len() >= count {
                break;
            }
        }
        k0 = (base + chunks * CHUNK).min(total);
    }
    if found.len() < count {
        if let Some((bt, _)) = run.take() {
            verify(bt, &mut found, &mut best);
        }
    }
    if found.is_empty() {
        if best.0.is_nan() {
            verify(best_bound.0, &mut found, &mut best);
        }
        return Err(Error::NoShiftFound {
            best_tau: best.0,
            best_sup: best.1,
        });
    }
    found.truncate(count);
    Ok(found)
}
