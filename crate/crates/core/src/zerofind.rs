//! Argument-principle zero counting, Newton refinement, Rouché certification of `xi_t`
//! zeros from `F_t` zeros, and the off-line witness search.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::almostperiod::{find_shifts, ShiftOptions};
use crate::deform::{check_negative, check_t, j_map, j_map_deriv, DeformedSeries};
use crate::parallel::{par_map, par_map_range};
use crate::precision::{Error, PrecisionConfig, Result, ValueWithError};
use crate::selberg::LFunctionSpec;
use crate::xieval::{h_eval, Y_MIN};

/// An analytic function evaluated with an error estimate.
pub type Analytic<'a> = dyn Fn(Complex64) -> Result<ValueWithError> + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(x_lo < x_hi && y_lo < y_hi) {
            return Err(Error::Config(format!(
                "degenerate rectangle [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"
            )));
        }
        Ok(Rect { x_lo, x_hi, y_lo, y_hi })
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_lo && z.re <= self.x_hi && z.im >= self.y_lo && z.im <= self.y_hi
    }

    /// Grown by `d` on every side (shrunk for negative `d`).
    pub fn grown(&self, d: f64) -> Rect {
        Rect {
            x_lo: self.x_lo - d,
            x_hi: self.x_hi + d,
            y_lo: self.y_lo - d,
            y_hi: self.y_hi + d,
        }
    }

    fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    /// Counter-clockwise boundary point at arclength `p`.
    fn boundary_point(&self, p: f64) -> Complex64 {
        let (w, h) = (self.width(), self.height());
        let p = p.rem_euclid(self.perimeter());
        if p < w {
            Complex64::new(self.x_lo + p, self.y_lo)
        } else if p < w + h {
            Complex64::new(self.x_hi, self.y_lo + (p - w))
        } else if p < 2.0 * w + h {
            Complex64::new(self.x_hi - (p - w - h), self.y_hi)
        } else {
            Complex64::new(self.x_lo, self.y_hi - (p - 2.0 * w - h))
        }
    }

    /// Arclength positions of the corners.
    fn corners(&self) -> [f64; 4] {
        let (w, h) = (self.width(), self.height());
        [0.0, w, w + h, 2.0 * w + h]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroMethod {
    Newton,
    /// Newton did not converge inside the cell; the cell center is reported.
    Unrefined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub center: Complex64,
    pub residual: f64,
    pub newton_steps: usize,
    pub method: ZeroMethod,
    /// Newton step sizes in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub step_log: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedZero {
    pub disk_center: Complex64,
    pub disk_radius: f64,
    pub delta: f64,
    pub sup_residual: f64,
    pub claim: String,
    /// `J_t(disk_center)` and a radius covering `J_t` of the disk.
    pub xi_center: Complex64,
    pub xi_radius: f64,
    /// Circle samples used in the final pass.
    pub samples: usize,
    pub t: f64,
}

impl CertifiedZero {
    /// The `J_t`-image disk lies right of the critical line with room to spare.
    pub fn off_line(&self) -> bool {
        self.xi_center.re - 0.5 >= 2.0 * self.xi_radius
    }
}

pub const CLAIM: &str = "xi_t has >= 1 zero in J_t-image neighborhood";

// ---------------------------------------------------------------------------
// Counting

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Initial spacing of boundary samples.
    pub spacing: f64,
    /// Segments are refined while the phase changes by this much or more.
    pub max_phase_step: f64,
    pub min_spacing: f64,
    pub max_points: usize,
    pub jitter: f64,
    pub max_jitter: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            spacing: 0.05,
            max_phase_step: PI / 4.0,
            min_spacing: 1e-9,
            max_points: 2_000_000,
            jitter: 1e-3,
            max_jitter: 5,
        }
    }
}

enum Boundary {
    Winding(i64),
    NearZero(Complex64),
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn eval_point(f: &Analytic, z: Complex64) -> Result<(Complex64, bool)> {
    let v = f(z)?;
    let small = v.value.norm() <= 2.0 * v.err || v.value.norm() == 0.0;
    Ok((v.value, small))
}

fn winding(f: &Analytic, rect: &Rect, opts: &CountOptions) -> Result<Boundary> {
    let per = rect.perimeter();
    let mut ps: Vec<f64> = Vec::new();
    let corners = rect.corners();
    let lens = [rect.width(), rect.height(), rect.width(), rect.height()];
    for e in 0..4 {
        let n = (lens[e] / opts.spacing).ceil().max(4.0) as usize;
        for i in 0..n {
            ps.push(corners[e] + lens[e] * i as f64 / n as f64);
        }
    }
    let first = par_map(&ps, |&p| eval_point(f, rect.boundary_point(p)));
    let mut vals = Vec::with_capacity(ps.len());
    for (p, r) in ps.iter().zip(first) {
        let (v, small) = r?;
        if small {
            return Ok(Boundary::NearZero(rect.boundary_point(*p)));
        }
        vals.push(v);
    }
    loop {
        let n = ps.len();
        let mut mids = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            let d = wrap(vals[j].arg() - vals[i].arg());
            if d.abs() >= opts.max_phase_step {
                let pj = if j == 0 { ps[0] + per } else { ps[j] };
                if pj - ps[i] < opts.min_spacing {
                    return Ok(Boundary::NearZero(rect.boundary_point(ps[i])));
                }
                mids.push((i, 0.5 * (ps[i] + pj)));
            }
        }
        if mids.is_empty() {
            break;
        }
        if n + mids.len() > opts.max_points {
            return Err(Error::Precision(format!(
                "argument principle needs more than {} boundary points",
                opts.max_points
            )));
        }
        let new_vals = par_map(&mids, |&(_, p)| eval_point(f, rect.boundary_point(p)));
        let mut merged_p = Vec::with_capacity(n + mids.len());
        let mut merged_v = Vec::with_capacity(n + mids.len());
        let mut k = 0;
        for i in 0..n {
            merged_p.push(ps[i]);
            merged_v.push(vals[i]);
            if k < mids.len() && mids[k].0 == i {
                let (v, small) = match &new_vals[k] {
                    Ok(x) => *x,
                    Err(e) => return Err(e.clone()),
                };
                if small {
                    return Ok(Boundary::NearZero(rect.boundary_point(mids[k].1)));
                }
                merged_p.push(mids[k].1.rem_euclid(per));
                merged_v.push(v);
                k += 1;
            }
        }
        // a midpoint of the closing segment may have wrapped past zero
        let mut idx: Vec<usize> = (0..merged_p.len()).collect();
        idx.sort_by(|&a, &b| merged_p[a].partial_cmp(&merged_p[b]).unwrap());
        ps = idx.iter().map(|&i| merged_p[i]).collect();
        vals = idx.iter().map(|&i| merged_v[i]).collect();
    }
    let n = ps.len();
    let total: f64 = (0..n).map(|i| wrap(vals[(i + 1) % n].arg() - vals[i].arg())).sum();
    let w = total / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 0.05 {
        return Err(Error::Precision(format!("winding number {w} is not near an integer")));
    }
    Ok(Boundary::Winding(r as i64))
}

/// Result of a count: the number of zeros and the rectangle actually used, which may be
/// jittered off the requested one.
#[derive(Clone, Copy, Debug)]
pub struct Count {
    pub zeros: usize,
    pub rect: Rect,
}

/// Winding number of `f` along the boundary of `rect`; boundary zeros trigger edge
/// jitter by `+-jitter` before giving up.
pub fn count_zeros_in(f: &Analytic, rect: &Rect, opts: &CountOptions) -> Result<Count> {
    let mut last = None;
    for k in 0..=opts.max_jitter {
        let d = if k == 0 {
            0.0
        } else {
            let m = k.div_ceil(2) as f64;
            if k % 2 == 1 { m * opts.jitter } else { -m * opts.jitter }
        };
        let r = rect.grown(d);
        match winding(f, &r, opts)? {
            Boundary::Winding(w) if w >= 0 => return Ok(Count { zeros: w as usize, rect: r }),
            Boundary::Winding(w) => {
                return Err(Error::Precision(format!("negative winding number {w}: f has poles")))
            }
            Boundary::NearZero(z) => last = Some(z),
        }
    }
    Err(Error::BoundaryZero(format!(
        "f is indistinguishable from zero near the boundary at {}",
        last.unwrap_or_default()
    )))
}

pub fn count_zeros(f: &Analytic, rect: &Rect, prec: &PrecisionConfig) -> Result<usize> {
    prec.validate()?;
    count_zeros_in(f, rect, &CountOptions::default()).map(|c| c.zeros)
}

/// Oracle count: uniform boundary sampling at fixed `spacing`, no adaptivity.
pub fn phase_scan_count(f: &Analytic, rect: &Rect, spacing: f64) -> Result<i64> {
    let n = (rect.perimeter() / spacing).ceil() as usize;
    let per = rect.perimeter();
    let vals = par_map_range(n, |i| f(rect.boundary_point(per * i as f64 / n as f64)).map(|v| v.value));
    let mut args = Vec::with_capacity(n);
    for v in vals {
        args.push(v?.arg());
    }
    let total: f64 = (0..n).map(|i| wrap(args[(i + 1) % n] - args[i])).sum();
    Ok((total / (2.0 * PI)).round() as i64)
}

// ---------------------------------------------------------------------------
// Locating

#[derive(Clone, Copy, Debug)]
pub struct LocateOptions {
    pub count: CountOptions,
    /// Residual required of a located zero.
    pub tol: f64,
    pub max_newton: usize,
    pub max_depth: usize,
    /// Step of the four-point difference derivative.
    pub fd_step: f64,
}

impl Default for LocateOptions {
    fn default() -> Self {
        LocateOptions {
            count: CountOptions::default(),
            tol: 1e-10,
            max_newton: 60,
            max_depth: 40,
            fd_step: 1e-4,
        }
    }
}

fn derivative(f: &Analytic, z: Complex64, h: f64) -> Result<Complex64> {
    let hc = Complex64::new(h, 0.0);
    let a = f(z - 2.0 * hc)?.value;
    let b = f(z - hc)?.value;
    let c = f(z + hc)?.value;
    let d = f(z + 2.0 * hc)?.value;
    Ok((a - 8.0 * b + 8.0 * c - d) / (12.0 * h))
}

/// Newton's method with a four-point difference derivative. Returns the final point,
/// its residual and the step log.
pub fn newton(f: &Analytic, start: Complex64, opts: &LocateOptions) -> Result<(Complex64, f64, Vec<f64>, bool)> {
    let mut z = start;
    let mut log = Vec::new();
    let mut fz = f(z)?.value;
    for _ in 0..opts.max_newton {
        let d = derivative(f, z, opts.fd_step)?;
        if d.norm() == 0.0 {
            break;
        }
        let step = fz / d;
        z -= step;
        log.push(step.norm());
        fz = f(z)?.value;
        if step.norm() < 1e-14 * (1.0 + z.norm()) || (fz.norm() <= opts.tol * 1e-3 && step.norm() < 1e-10) {
            return Ok((z, fz.norm(), log, true));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            break;
        }
    }
    let ok = fz.norm() <= opts.tol;
    Ok((z, fz.norm(), log, ok))
}

fn refine_single(f: &Analytic, rect: &Rect, opts: &LocateOptions) -> Result<Option<ZeroRecord>> {
    let c = rect.center();
    let q = Complex64::new(rect.width() / 4.0, rect.height() / 4.0);
    let starts = [c, c - q, c + q, c + q.conj(), c - q.conj()];
    let allowed = rect.grown(0.25 * rect.width().min(rect.height()));
    for s in starts {
        let (z, res, log, ok) = newton(f, s, opts)?;
        if ok && res <= opts.tol && allowed.contains(z) {
            return Ok(Some(ZeroRecord {
                center: z,
                residual: res,
                newton_steps: log.len(),
                method: ZeroMethod::Newton,
                step_log: log,
            }));
        }
    }
    Ok(None)
}

fn split(rect: &Rect, k: usize) -> Vec<Rect> {
    // off-center split lines make zeros on them unlikely; k moves them further
    let fx = 0.5 + 0.0123 * (1.0 + k as f64);
    let fy = 0.5 - 0.0171 * (1.0 + k as f64);
    let xm = rect.x_lo + fx * rect.width();
    let ym = rect.y_lo + fy * rect.height();
    let aspect = rect.height() / rect.width();
    if aspect > 2.0 {
        vec![
            Rect { y_hi: ym, ..*rect },
            Rect { y_lo: ym, ..*rect },
        ]
    } else if aspect < 0.5 {
        vec![
            Rect { x_hi: xm, ..*rect },
            Rect { x_lo: xm, ..*rect },
        ]
    } else {
        vec![
            Rect { x_hi: xm, y_hi: ym, ..*rect },
            Rect { x_lo: xm, y_hi: ym, ..*rect },
            Rect { x_hi: xm, y_lo: ym, ..*rect },
            Rect { x_lo: xm, y_lo: ym, ..*rect },
        ]
    }
}

fn locate_rec(f: &Analytic, rect: Rect, n: usize, depth: usize, opts: &LocateOptions) -> Result<Vec<ZeroRecord>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        if let Some(z) = refine_single(f, &rect, opts)? {
            return Ok(vec![z]);
        }
    }
    if depth >= opts.max_depth || rect.width().max(rect.height()) < 1e-10 {
        let c = rect.center();
        let res = f(c)?.value.norm();
        return Ok(vec![ZeroRecord {
            center: c,
            residual: res,
            newton_steps: 0,
            method: ZeroMethod::Unrefined,
            step_log: Vec::new(),
        }; n]);
    }
    let mut co = opts.count;
    co.spacing = co.spacing.min(rect.width().min(rect.height()) / 4.0);
    co.max_jitter = 0;
    for k in 0..6 {
        let kids = split(&rect, k);
        let counts: Vec<Result<Count>> = par_map(&kids, |r| count_zeros_in(f, r, &co));
        if counts.iter().any(|c| matches!(c, Err(Error::BoundaryZero(_)))) {
            continue;
        }
        let mut cs = Vec::new();
        for c in counts {
            cs.push(c?.zeros);
        }
        if cs.iter().sum::<usize>() != n {
            continue;
        }
        let parts: Vec<Result<Vec<ZeroRecord>>> = par_map(&(0..kids.len()).collect::<Vec<_>>(), |&i| {
            locate_rec(f, kids[i], cs[i], depth + 1, opts)
        });
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        return Ok(out);
    }
    Err(Error::BoundaryZero(format!("could not split {rect:?} away from zeros")))
}

/// Zeros of `f` in `rect`, sorted by imaginary part.
pub fn locate_zeros_in(f: &Analytic, rect: &Rect, opts: &LocateOptions) -> Result<Vec<ZeroRecord>> {
    let c = count_zeros_in(f, rect, &opts.count)?;
    let mut zs = locate_rec(f, c.rect, c.zeros, 0, opts)?;
    zs.sort_by(|a, b| {
        a.center
            .im
            .partial_cmp(&b.center.im)
            .unwrap()
            .then(a.center.re.partial_cmp(&b.center.re).unwrap())
    });
    Ok(zs)
}

pub fn locate_zeros(f: &Analytic, rect: &Rect, prec: &PrecisionConfig) -> Result<Vec<ZeroRecord>> {
    prec.validate()?;
    let opts = LocateOptions {
        tol: prec.target_abs_err.max(1e-10),
        max_newton: prec.max_refine,
        ..Default::default()
    };
    locate_zeros_in(f, rect, &opts)
}

/// `F_t` zeros in `rect`: counting uses a series accurate to `1e-8`, Newton one accurate
/// to the requested target.
pub fn f_t_zeros(spec: &LFunctionSpec, t: f64, rect: &Rect, prec: &PrecisionConfig) -> Result<Vec<ZeroRecord>> {
    check_negative(t)?;
    let x_min = rect.x_lo - 0.01;
    let fine = DeformedSeries::new(spec, t, x_min, (prec.target_abs_err / 10.0).max(1e-12), prec.max_terms)?;
    let coarse = DeformedSeries::new(spec, t, x_min, 1e-6, prec.max_terms)?;
    let fc = |s: Complex64| -> Result<ValueWithError> {
        let (v, e) = coarse.eval(s);
        Ok(ValueWithError::new(v, e))
    };
    let ff = |s: Complex64| -> Result<ValueWithError> {
        let (v, e) = fine.eval(s);
        Ok(ValueWithError::new(v, e))
    };
    let opts = LocateOptions {
        tol: prec.target_abs_err.max(1e-10),
        ..Default::default()
    };
    let c = count_zeros_in(&fc, rect, &opts.count)?;
    let coarse_zeros = locate_rec(&fc, c.rect, c.zeros, 0, &LocateOptions { tol: 1e-6, ..opts })?;
    // polish with the accurate series
    let polished: Vec<Result<ZeroRecord>> = par_map(&coarse_zeros, |z| {
        let (p, res, log, ok) = newton(&ff, z.center, &opts)?;
        if ok && (p - z.center).norm() < 1e-3 {
            Ok(ZeroRecord {
                center: p,
                residual: res,
                newton_steps: z.newton_steps + log.len(),
                method: ZeroMethod::Newton,
                step_log: log,
            })
        } else {
            Ok(ZeroRecord { method: ZeroMethod::Unrefined, ..z.clone() })
        }
    });
    let mut out = Vec::new();
    for p in polished {
        out.push(p?);
    }
    out.sort_by(|a, b| a.center.im.partial_cmp(&b.center.im).unwrap());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Rouché

#[derive(Clone, Copy, Debug)]
pub struct RoucheOptions {
    pub min_samples: usize,
    pub max_samples: usize,
    /// Relative stabilisation required of `delta` and of the sup between doublings.
    pub stabilize: f64,
    /// Certify only when `sup < margin * delta`.
    pub margin: f64,
}

impl Default for RoucheOptions {
    fn default() -> Self {
        RoucheOptions {
            min_samples: 128,
            max_samples: 4096,
            stabilize: 0.01,
            margin: 0.9,
        }
    }
}

/// `(F_t, F_t', err F_t, h, err h)` at one circle point.
type CircleSample = (Complex64, Complex64, f64, Complex64, f64);

struct CircleStats {
    min_f: f64,
    max_df: f64,
    max_diff: f64,
    max_ddiff: f64,
    winding: i64,
}

fn circle_samples(
    f_t: &(dyn Fn(Complex64) -> (Complex64, Complex64, f64) + Sync),
    h: &Analytic,
    center: Complex64,
    r: f64,
    angles: &[f64],
) -> Result<Vec<CircleSample>> {
    let vals = par_map(angles, |&a| -> Result<CircleSample> {
        let z = center + r * Complex64::from_polar(1.0, a);
        let (f, df, fe) = f_t(z);
        let hv = h(z)?;
        Ok((f, df, fe, hv.value, hv.err))
    });
    vals.into_iter().collect()
}

fn circle_stats(fs: &[CircleSample], r: f64) -> CircleStats {
    let m = fs.len();
    let spacing = 2.0 * PI * r / m as f64;
    let diffs: Vec<Complex64> = fs.iter().map(|v| v.3 - v.0).collect();
    let winding: f64 = (0..m).map(|k| wrap(fs[(k + 1) % m].0.arg() - fs[k].0.arg())).sum::<f64>() / (2.0 * PI);
    CircleStats {
        min_f: fs.iter().map(|v| v.0.norm() - v.2).fold(f64::INFINITY, f64::min),
        max_df: fs.iter().map(|v| v.1.norm()).fold(0.0, f64::max),
        max_diff: fs.iter().zip(&diffs).map(|(v, d)| d.norm() + v.4 + v.2).fold(0.0, f64::max),
        // derivative of h - F_t along the circle from consecutive samples
        max_ddiff: (0..m).map(|k| (diffs[(k + 1) % m] - diffs[k]).norm() / spacing).fold(0.0, f64::max),
        winding: winding.round() as i64,
    }
}

/// Rouché comparison of `h` against `F_t` on the circle `|s - center| = r`. Samples are
/// doubled (reusing earlier ones) until the sampled minimum of `|F_t|` and maximum of
/// `|h - F_t|` move by less than the stabilisation tolerance; the returned `delta` and
/// `sup` then carry padding of one sample spacing times the sampled derivatives.
pub fn rouche_compare(
    f_t: &(dyn Fn(Complex64) -> (Complex64, Complex64, f64) + Sync),
    h: &Analytic,
    center: Complex64,
    r: f64,
    opts: &RoucheOptions,
) -> Result<(f64, f64, usize)> {
    let mut m = opts.min_samples;
    let angles: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let mut fs = circle_samples(f_t, h, center, r, &angles)?;
    let mut prev = circle_stats(&fs, r);
    if prev.winding != 1 {
        return Err(Error::Margin {
            sup: prev.max_diff,
            delta: prev.min_f,
            detail: format!("circle of radius {r} winds {} times around zero of F_t", prev.winding),
        });
    }
    let stable = |a: f64, b: f64| (a - b).abs() <= opts.stabilize * a.abs().max(b.abs()).max(1e-300);
    loop {
        let mid: Vec<f64> = (0..m).map(|k| 2.0 * PI * (k as f64 + 0.5) / m as f64).collect();
        let new = circle_samples(f_t, h, center, r, &mid)?;
        fs = fs.into_iter().zip(new).flat_map(|(a, b)| [a, b]).collect();
        m *= 2;
        let cur = circle_stats(&fs, r);
        if (stable(prev.min_f, cur.min_f) && stable(prev.max_diff, cur.max_diff)) || m >= opts.max_samples {
            let pad = 2.0 * PI * r / m as f64;
            return Ok((cur.min_f - pad * cur.max_df, cur.max_diff + pad * cur.max_ddiff, m));
        }
        prev = cur;
    }
}

/// Certifies that `h = xi_t(J_t) / gamma_t` has a zero inside the circle of radius `r`
/// around the `F_t` zero `rho`.
pub fn rouche_certify(
    spec: &LFunctionSpec,
    t: f64,
    rho: &ZeroRecord,
    r: f64,
    prec: &PrecisionConfig,
) -> Result<CertifiedZero> {
    check_t(t)?;
    let series = DeformedSeries::new(spec, t, rho.center.re - r - 0.01, 1e-10, prec.max_terms)?;
    let hprec = PrecisionConfig::double(1e-10);
    let h = |s: Complex64| h_eval(spec, t, s, &hprec);
    certify_with(spec, t, &series, &h, rho.center, r, &RoucheOptions::default())
}

/// [`rouche_certify`] against an arbitrary comparison function.
pub fn certify_with(
    spec: &LFunctionSpec,
    t: f64,
    series: &DeformedSeries,
    h: &Analytic,
    center: Complex64,
    r: f64,
    opts: &RoucheOptions,
) -> Result<CertifiedZero> {
    if center.im - r < Y_MIN {
        return Err(Error::PoleProximity(format!(
            "circle around {center} reaches below the pole-region floor {Y_MIN}"
        )));
    }
    let ft = |z: Complex64| series.eval_full(z);
    let (delta, sup, samples) = rouche_compare(&ft, h, center, r, opts)?;
    if !(delta > 0.0 && sup < opts.margin * delta) {
        return Err(Error::Margin {
            sup,
            delta,
            detail: format!("radius {r} at {center}"),
        });
    }
    let xi_center = j_map(spec, t, center)?;
    let jd = (0..64)
        .map(|k| j_map_deriv(spec, t, center + r * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0)).norm())
        .fold(0.0, f64::max);
    Ok(CertifiedZero {
        disk_center: center,
        disk_radius: r,
        delta,
        sup_residual: sup,
        claim: CLAIM.to_string(),
        xi_center,
        // max |J_t'| on the circle bounds it on the disk; 1% slack for the sampling
        xi_radius: r * jd * 1.01,
        samples,
        t,
    })
}

// ---------------------------------------------------------------------------
// Pairing

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroPair {
    pub f_zero: ZeroRecord,
    /// Zero of `h` in the `s`-plane, i.e. the pre-image of a `xi_t` zero under `J_t`.
    pub xi_preimage: Option<ZeroRecord>,
    pub xi_zero: Option<Complex64>,
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowCount {
    pub rect: Rect,
    pub h_zeros: usize,
    pub paired: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub pairs: Vec<ZeroPair>,
    /// `h` zeros in the strip with no `F_t` partner.
    pub unmatched_xi: Vec<ZeroRecord>,
    pub windows: Vec<WindowCount>,
}

impl Pairing {
    pub fn h_count(&self) -> usize {
        self.windows.iter().map(|w| w.h_zeros).sum()
    }
}

/// Half-side of the square searched for an `h` zero around each `F_t` zero.
pub const PAIR_RADIUS: f64 = 0.02;
const WINDOW_HEIGHT: f64 = 10.0;

fn h_opts() -> LocateOptions {
    LocateOptions {
        tol: 1e-8,
        count: CountOptions { spacing: 0.1, ..Default::default() },
        ..Default::default()
    }
}

/// The `h` zero nearest to `z` in the square of half-side [`PAIR_RADIUS`], if any.
fn partner(f: &Analytic, z: Complex64) -> Result<Option<ZeroRecord>> {
    let r = PAIR_RADIUS;
    let sq = Rect::new(z.re - r, z.re + r, z.im - r, z.im + r)?;
    let mut opts = h_opts();
    opts.count.spacing = r / 4.0;
    let c = count_zeros_in(f, &sq, &opts.count)?;
    if c.zeros == 0 {
        return Ok(None);
    }
    if c.zeros == 1 {
        let (w, res, log, ok) = newton(f, z, &opts)?;
        if ok && c.rect.contains(w) {
            return Ok(Some(ZeroRecord {
                center: w,
                residual: res,
                newton_steps: log.len(),
                method: ZeroMethod::Newton,
                step_log: log,
            }));
        }
    }
    let zs = locate_rec(f, c.rect, c.zeros, 0, &opts)?;
    Ok(zs.into_iter().min_by(|a, b| {
        let da = (a.center - z).norm();
        let db = (b.center - z).norm();
        da.partial_cmp(&db)
            .unwrap()
            .then((a.center.im - z.im).abs().partial_cmp(&(b.center.im - z.im).abs()).unwrap())
    }))
}

/// `F_t` zeros in `strip` paired with zeros of `h = xi_t(J_t) / gamma_t` nearby, plus
/// per-window counts of `h` zeros that expose any `xi_t` zero without a partner.
pub fn pair_zeros(spec: &LFunctionSpec, t: f64, strip: &Rect, prec: &PrecisionConfig) -> Result<Pairing> {
    pair_zeros_with(spec, t, strip, prec, &mut |_| {})
}

pub fn pair_zeros_with(
    spec: &LFunctionSpec,
    t: f64,
    strip: &Rect,
    prec: &PrecisionConfig,
    log: &mut dyn FnMut(&str),
) -> Result<Pairing> {
    check_t(t)?;
    if strip.y_lo - PAIR_RADIUS < Y_MIN {
        return Err(Error::PoleProximity(format!("strip starts below {Y_MIN}")));
    }
    let f_zeros = f_t_zeros(spec, t, strip, prec)?;
    log(&format!("{} F_t zeros", f_zeros.len()));
    let hprec = PrecisionConfig::double(1e-10);
    let h = |s: Complex64| h_eval(spec, t, s, &hprec);

    let mut pairs: Vec<ZeroPair> = Vec::with_capacity(f_zeros.len());
    for fz in &f_zeros {
        let mut p = partner(&h, fz.center)?;
        // one xi_t zero cannot serve two F_t zeros
        if let Some(z) = &p {
            if pairs
                .iter()
                .any(|q| q.xi_preimage.as_ref().is_some_and(|w| (w.center - z.center).norm() < 1e-7))
            {
                p = None;
            }
        }
        pairs.push(match p {
            Some(z) => ZeroPair {
                f_zero: fz.clone(),
                xi_zero: Some(j_map(spec, t, z.center)?),
                distance: Some((z.center - fz.center).norm()),
                xi_preimage: Some(z),
            },
            None => ZeroPair {
                f_zero: fz.clone(),
                xi_preimage: None,
                xi_zero: None,
                distance: None,
            },
        });
    }

    let n_windows = (strip.height() / WINDOW_HEIGHT).ceil().max(1.0) as usize;
    let hw = strip.height() / n_windows as f64;
    let mut windows = Vec::with_capacity(n_windows);
    let mut unmatched_xi = Vec::new();
    let opts = h_opts();
    for i in 0..n_windows {
        let rect = Rect {
            y_lo: strip.y_lo + hw * i as f64,
            y_hi: strip.y_lo + hw * (i + 1) as f64,
            ..*strip
        };
        let c = count_zeros_in(&h, &rect, &opts.count)?;
        let inside: Vec<Complex64> = pairs
            .iter()
            .filter_map(|p| p.xi_preimage.as_ref().map(|z| z.center))
            .filter(|z| c.rect.contains(*z))
            .collect();
        log(&format!(
            "window [{:.2}, {:.2}]: {} h zeros, {} paired",
            c.rect.y_lo,
            c.rect.y_hi,
            c.zeros,
            inside.len()
        ));
        if c.zeros > inside.len() {
            for z in locate_rec(&h, c.rect, c.zeros, 0, &opts)? {
                if !inside.iter().any(|w| (w - z.center).norm() < 1e-6) {
                    unmatched_xi.push(z);
                }
            }
        }
        windows.push(WindowCount {
            rect: c.rect,
            h_zeros: c.zeros,
            paired: inside.len(),
        });
    }
    Ok(Pairing {
        pairs,
        unmatched_xi,
        windows,
    })
}

// ---------------------------------------------------------------------------
// Witness

#[derive(Clone, Copy, Debug)]
pub struct WitnessOptions {
    pub strip: (f64, f64),
    pub window: f64,
    /// Highest `y` scanned in a strip before widening leftward.
    pub y_max: f64,
    /// Number of leftward widenings.
    pub widenings: usize,
    pub radius: f64,
    /// Shift search bound used when the margin fails.
    pub shift_tau_max: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            strip: (-0.3, -0.2),
            window: 25.0,
            y_max: 600.0,
            widenings: 2,
            radius: 0.02,
            shift_tau_max: 200.0,
        }
    }
}

/// Smallest height where the `J_t` image of `Re s = x` lies right of `1/2 + gap`.
pub fn clearing_height(spec: &LFunctionSpec, t: f64, x: f64, gap: f64) -> Result<f64> {
    let f = |y: f64| -> Result<f64> { Ok(j_map(spec, t, Complex64::new(x, y))?.re - 0.5 - gap) };
    let mut lo = Y_MIN;
    if f(lo)? >= 0.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Domain(format!("J_t image of Re s = {x} never clears the critical line")));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Tries radius `r`, shrinking on a collision with another zero and growing once on a
/// margin failure.
fn certify_zero(spec: &LFunctionSpec, t: f64, z: &ZeroRecord, r0: f64, prec: &PrecisionConfig) -> Result<CertifiedZero> {
    let mut r = r0;
    let mut grown = false;
    for _ in 0..6 {
        match rouche_certify(spec, t, z, r, prec) {
            Ok(c) => return Ok(c),
            Err(Error::Margin { detail, sup, delta }) => {
                if detail.contains("winds") {
                    r *= 0.5;
                } else if !grown && sup < 3.0 * delta {
                    r *= 2.0;
                    grown = true;
                } else {
                    return Err(Error::Margin { sup, delta, detail });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Margin {
        sup: f64::NAN,
        delta: f64::NAN,
        detail: "radius adjustments exhausted".into(),
    })
}

/// A Rouché-certified zero of `xi_t` lying right of the critical line.
pub fn newman_witness(spec: &LFunctionSpec, t: f64, prec: &PrecisionConfig) -> Result<CertifiedZero> {
    newman_witness_with(spec, t, prec, &WitnessOptions::default(), &mut |_| {})
}

pub fn newman_witness_with(
    spec: &LFunctionSpec,
    t: f64,
    prec: &PrecisionConfig,
    opts: &WitnessOptions,
    log: &mut dyn FnMut(&str),
) -> Result<CertifiedZero> {
    check_t(t)?;
    let width = opts.strip.1 - opts.strip.0;
    let mut attempts = Vec::new();
    for widen in 0..=opts.widenings {
        let x_lo = opts.strip.0 - width * widen as f64;
        let x_hi = x_lo + width;
        let y_start = clearing_height(spec, t, x_lo, 0.0)?.max(Y_MIN + 1.0);
        let mut y = y_start;
        while y < opts.y_max {
            let rect = Rect::new(x_lo, x_hi, y, y + opts.window)?;
            log(&format!("scanning [{x_lo}, {x_hi}] x [{y:.1}, {:.1}]", y + opts.window));
            let zeros = f_t_zeros(spec, t, &rect, prec)?;
            for z in zeros.iter().filter(|z| z.method == ZeroMethod::Newton) {
                let img = j_map(spec, t, z.center)?;
                if img.re - 0.5 < 4.0 * opts.radius {
                    continue;
                }
                log(&format!("F_t zero at {} (J_t image {img})", z.center));
                match certify_zero(spec, t, z, opts.radius, prec) {
                    Ok(c) if c.off_line() => return Ok(c),
                    Ok(c) => attempts.push(format!("{}: image disk touches the critical line", c.disk_center)),
                    Err(Error::Margin { sup, delta, .. }) => {
                        log(&format!("margin failed: sup {sup:.3e} vs delta {delta:.3e}"));
                        attempts.push(format!("{}: sup {sup:.3e} >= 0.9 delta {delta:.3e}", z.center));
                        // climb: a shifted copy of this zero sits higher where h is closer to F_t
                        if let Some(c) = climb(spec, t, z, &rect, delta, opts, prec, log)? {
                            return Ok(c);
                        }
                    }
                    Err(e) => attempts.push(format!("{}: {e}", z.center)),
                }
            }
            y += opts.window;
        }
    }
    Err(Error::WitnessNotFound(format!(
        "no certified off-line zero for t = {t}; attempts: {}",
        if attempts.is_empty() { "none".to_string() } else { attempts.join("; ") }
    )))
}

#[allow(clippy::too_many_arguments)]
fn climb(
    spec: &LFunctionSpec,
    t: f64,
    z: &ZeroRecord,
    rect: &Rect,
    delta: f64,
    opts: &WitnessOptions,
    prec: &PrecisionConfig,
    log: &mut dyn FnMut(&str),
) -> Result<Option<CertifiedZero>> {
    let eps = delta.abs() / 3.0;
    if !(eps > 0.0) {
        return Ok(None);
    }
    let local = Rect::new(z.center.re - 0.05, z.center.re + 0.05, z.center.im - 0.5, z.center.im + 0.5)?;
    let sopts = ShiftOptions {
        tau_min: 1.0,
        ..Default::default()
    };
    let shifts = match find_shifts(spec, t, &local, eps, opts.shift_tau_max, 1, &sopts, prec) {
        Ok(s) => s,
        Err(Error::NoShiftFound { best_sup, .. }) => {
            log(&format!("no almost-period within tau <= {} (best sup {best_sup:.3e})", opts.shift_tau_max));
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    for sh in shifts {
        let target = z.center + Complex64::new(0.0, sh.tau);
        let r = Rect::new(rect.x_lo, rect.x_hi, target.im - 0.5, target.im + 0.5)?;
        for w in f_t_zeros(spec, t, &r, prec)? {
            if (w.center - target).norm() < 0.1 {
                if let Ok(c) = certify_zero(spec, t, &w, opts.radius, prec) {
                    if c.off_line() {
                        return Ok(Some(c));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selberg::zeta;

    fn poly(s: Complex64) -> Result<ValueWithError> {
        let v = (s - Complex64::new(1.0, 1.0)) * (s - Complex64::new(2.0, 2.0));
        Ok(ValueWithError::new(v, 1e-15))
    }

    #[test]
    fn polynomial_count_and_roots() {
        let r = Rect::new(0.0, 3.0, 0.0, 3.0).unwrap();
        let prec = PrecisionConfig::double(1e-12);
        assert_eq!(count_zeros(&poly, &r, &prec).unwrap(), 2);
        let zs = locate_zeros(&poly, &r, &prec).unwrap();
        assert_eq!(zs.len(), 2);
        assert!((zs[0].center - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        assert!((zs[1].center - Complex64::new(2.0, 2.0)).norm() < 1e-12);
        assert!(zs.iter().all(|z| z.method == ZeroMethod::Newton));
    }

    #[test]
    fn newton_converges_quadratically() {
        let opts = LocateOptions::default();
        let (_, _, log, ok) = newton(&poly, Complex64::new(1.3, 0.8), &opts).unwrap();
        assert!(ok);
        // the last steps shrink quadratically up to a curvature constant
        let k = log.len();
        assert!(k >= 3);
        let (a, b) = (log[k - 3], log[k - 2]);
        assert!(b <= 10.0 * a * a, "{log:?}");
    }

    #[test]
    fn boundary_zero_jitters_then_fails() {
        // zero exactly on the edge is moved inside or outside by the jitter
        let f = |s: Complex64| Ok(ValueWithError::new(s - Complex64::new(1.0, 0.5), 1e-15));
        let r = Rect::new(1.0, 2.0, 0.0, 1.0).unwrap();
        let c = count_zeros_in(&f, &r, &CountOptions::default()).unwrap();
        assert_eq!(c.zeros, 1);
        assert!(c.rect != r);
        // a function that vanishes on a whole edge cannot be jittered away
        let g = |s: Complex64| Ok(ValueWithError::new(Complex64::new(0.0, 0.0) * s, 1e-15));
        assert!(matches!(
            count_zeros_in(&g, &r, &CountOptions::default()),
            Err(Error::BoundaryZero(_))
        ));
    }

    #[test]
    fn f_t_zero_free_right_half() {
        let spec = zeta();
        let series = DeformedSeries::new(&spec, -1.0, 5.0, 1e-12, 1_000_000).unwrap();
        let f = |s: Complex64| {
            let (v, e) = series.eval(s);
            Ok(ValueWithError::new(v, e))
        };
        let r = Rect::new(5.0, 6.0, 0.0, 50.0).unwrap();
        assert_eq!(count_zeros(&f, &r, &PrecisionConfig::double(1e-12)).unwrap(), 0);
    }

    #[test]
    fn subdivision_additivity() {
        let spec = zeta();
        let series = DeformedSeries::new(&spec, -1.0, -0.5, 1e-9, 1_000_000).unwrap();
        let f = |s: Complex64| {
            let (v, e) = series.eval(s);
            Ok(ValueWithError::new(v, e))
        };
        let opts = CountOptions::default();
        let whole = count_zeros_in(&f, &Rect::new(-0.5, 0.5, 100.0, 130.0).unwrap(), &opts).unwrap();
        let a = count_zeros_in(&f, &Rect::new(-0.5, 0.5, 100.0, 117.3).unwrap(), &opts).unwrap();
        let b = count_zeros_in(&f, &Rect::new(-0.5, 0.5, 117.3, 130.0).unwrap(), &opts).unwrap();
        assert_eq!(whole.zeros, a.zeros + b.zeros);
    }

    #[test]
    fn self_comparison_always_certifies() {
        let spec = zeta();
        let t = -1.0;
        let rect = Rect::new(-0.21, -0.19, 103.5, 104.5).unwrap();
        let zs = f_t_zeros(&spec, t, &rect, &PrecisionConfig::double(1e-12)).unwrap();
        assert!(!zs.is_empty());
        let series = DeformedSeries::new(&spec, t, -0.35, 1e-12, 10_000_000).unwrap();
        let same = |s: Complex64| {
            let (v, _) = series.eval(s);
            Ok(ValueWithError::new(v, 0.0))
        };
        let c = certify_with(&spec, t, &series, &same, zs[0].center, 0.02, &RoucheOptions::default()).unwrap();
        assert!(c.sup_residual < 1e-9, "{}", c.sup_residual);
        assert!(c.delta > 0.0);
    }

    #[test]
    fn tiny_radius_fails_margin() {
        let spec = zeta();
        let rect = Rect::new(-0.21, -0.19, 103.5, 104.5).unwrap();
        let zs = f_t_zeros(&spec, -1.0, &rect, &PrecisionConfig::double(1e-12)).unwrap();
        let r = rouche_certify(&spec, -1.0, &zs[0], 1e-6, &PrecisionConfig::double(1e-12));
        assert!(matches!(r, Err(Error::Margin { .. })), "{r:?}");
    }

    #[test]
    fn witness_rejects_positive_t() {
        assert!(matches!(
            newman_witness(&zeta(), 0.5, &PrecisionConfig::double(1e-12)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn clearing_height_for_zeta() {
        let y = clearing_height(&zeta(), -1.0, -0.3, 0.0).unwrap();
        let j = j_map(&zeta(), -1.0, Complex64::new(-0.3, y)).unwrap();
        assert!((j.re - 0.5).abs() < 1e-9);
    }
}
