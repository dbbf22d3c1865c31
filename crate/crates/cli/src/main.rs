use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use xideform::deform::{f_t_eval, gamma_factor, gamma_t, j_map};
use xideform::mellin::{phi_f, psi_closed, psi_quad, MellinKernel};
use xideform::selberg::{f_eval, load_spec, xi_f_eval, LFunctionSpec};
use xideform::xieval::{b_tn, xi_t_eval, Route, RouteValue};
use xideform::zerofind::{f_t_zeros, newman_witness_with, pair_zeros, CertifiedZero, Pairing, Rect, WitnessOptions, ZeroRecord};
use xideform::{Error, PrecisionConfig, ValueWithError};
use xideform_cli::acceptance;
use xideform_cli::cache::{Cache, ZeroKind, TOOL_VERSION};
use xideform_cli::figure::FigureData;
use xideform_cli::output::{zeros_csv, OutputSet};

#[derive(Parser)]
#[command(name = "xideform", version, about = "Heat-flow deformed L-functions: evaluation, zeros, certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one quantity at a point.
    Eval(EvalArgs),
    /// Zeros of F_t and/or xi_t in a strip, as CSV (cached).
    Zeros(RegionArgs),
    /// Pair each F_t zero with the nearby xi_t zero.
    Correspond(RegionArgs),
    /// Search for and certify an off-line zero of xi_t.
    Witness(WitnessArgs),
    /// Two-panel SVG of F_t zeros and xi_t zeros, plus the two CSVs (cached).
    Figure(RegionArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Preset name (zeta, chi4) or path to a JSON spec.
    #[arg(long, default_value = "zeta")]
    spec: String,
    /// Deformation parameter.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    t: f64,
    /// Working digits, 16 or 34. Defaults to 34 for `eval` and 16 elsewhere.
    #[arg(long)]
    digits: Option<u32>,
    /// Target absolute error.
    #[arg(long, default_value_t = 1e-12)]
    target: f64,
}

impl Common {
    fn prec(&self, default_digits: u32) -> xideform::Result<PrecisionConfig> {
        PrecisionConfig::new(self.digits.unwrap_or(default_digits), self.target)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    F,
    Xi,
    Ft,
    Xit,
    Jmap,
    Gamma,
    Gammat,
    Phi,
    Psi,
    Btn,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RouteArg {
    Fourier,
    Contour,
    Auto,
    Both,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    what: What,
    /// Point such as `0.3+20i`, `-0.25-4i`, `10` or `2i`.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,
    /// Argument of Phi_F.
    #[arg(long, allow_negative_numbers = true)]
    u: Option<f64>,
    /// Argument of psi.
    #[arg(long)]
    v: Option<f64>,
    /// Index of B_{t,n}.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Which {
    Ft,
    Xi,
    Both,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    common: Common,
    /// Real range `a:b` of the strip.
    #[arg(long, default_value = "-0.3:-0.2", allow_hyphen_values = true)]
    strip: String,
    #[arg(long, default_value_t = 30.0)]
    ymin: f64,
    #[arg(long, default_value_t = 200.0)]
    ymax: f64,
    /// Which zeros `zeros` reports.
    #[arg(long, value_enum, default_value = "ft")]
    which: Which,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    common: Common,
    /// Where to write the certificate JSON; defaults to `<spec>_t<t>_witness.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Height budget of the strip scan.
    #[arg(long)]
    ymax: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Criteria to run, e.g. `--only 1,2,8`; all when omitted.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

enum Failure {
    Usage(String),
    Numeric(Error),
    Io(std::io::Error),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Zeros(a) => cmd_zeros(a),
        Cmd::Correspond(a) => cmd_correspond(a),
        Cmd::Witness(a) => cmd_witness(a),
        Cmd::Figure(a) => cmd_figure(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                Error::WitnessNotFound(_) => 4,
                _ => 3,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: IoError: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Failed(m)) => {
            eprintln!("{m}");
            ExitCode::from(3)
        }
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`, with optional exponents in either part.
fn parse_complex(text: &str) -> Res<Complex64> {
    let bad = || Failure::Usage(format!("cannot parse complex number {text:?}"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    let im = im.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn fmt_c(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn print_value(label: &str, v: &ValueWithError) {
    println!("{label}value = {}", fmt_c(v.value));
    println!("{label}err = {:e}", v.err);
}

fn print_route(v: &RouteValue) {
    let label = format!("{:?}: ", v.route).to_lowercase();
    print_value(&label, &v.value);
    println!(
        "{label}plan = {} panels, abscissa {}, half-height {}",
        v.plan.panel_count, v.plan.contour_abscissa, v.plan.half_height
    );
}

fn cmd_eval(a: EvalArgs) -> Res<()> {
    let spec = load_spec(&a.common.spec)?;
    let prec = a.common.prec(34)?;
    let t = a.common.t;
    let need_s = || -> Res<Complex64> {
        parse_complex(a.s.as_deref().ok_or_else(|| Failure::Usage("--s is required".into()))?)
    };
    let mut route_used = "none".to_string();
    let v: ValueWithError = match a.what {
        What::F => f_eval(&spec, need_s()?, &prec)?,
        What::Xi => xi_f_eval(&spec, need_s()?, &prec)?,
        What::Ft => f_t_eval(&spec, t, need_s()?, &prec)?,
        What::Jmap => ValueWithError::new(j_map(&spec, t, need_s()?)?, 0.0),
        What::Gamma => gamma_factor(&spec, need_s()?, &prec)?,
        What::Gammat => gamma_t(&spec, t, need_s()?, &prec)?,
        What::Phi => phi_f(&spec, a.u.ok_or_else(|| Failure::Usage("--u is required".into()))?, &prec)?,
        What::Psi => {
            let v = a.v.ok_or_else(|| Failure::Usage("--v is required".into()))?;
            let k = MellinKernel::from_gamma(&spec.gamma);
            let q = psi_quad(&k, v, &prec)?;
            println!("closed = {}", fmt_c(psi_closed(&k, v)?));
            route_used = "quadrature".into();
            q
        }
        What::Btn => {
            let n = a.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
            b_tn(&spec, t, n, need_s()?, &prec)?
        }
        What::Xit => {
            let s = need_s()?;
            if a.route == RouteArg::Both {
                let f = xi_t_eval(&spec, t, s, Route::Fourier, &prec)?;
                let c = xi_t_eval(&spec, t, s, Route::Contour, &prec)?;
                print_route(&f);
                print_route(&c);
                let d = (f.value.value - c.value.value).norm();
                let bound = f.value.err + c.value.err;
                println!("agreement: |diff| = {d:e}, err sum = {bound:e}, agree = {}", d <= bound);
                println!("digits = {}", prec.working_digits);
                return Ok(());
            }
            let route = match a.route {
                RouteArg::Fourier => Route::Fourier,
                RouteArg::Contour => Route::Contour,
                _ => Route::Auto,
            };
            let r = xi_t_eval(&spec, t, s, route, &prec)?;
            route_used = format!("{:?}", r.route).to_lowercase();
            r.value
        }
    };
    print_value("", &v);
    println!("route = {route_used}");
    println!("digits = {}", prec.working_digits);
    Ok(())
}

fn region(a: &RegionArgs) -> Res<Rect> {
    let (lo, hi) = a
        .strip
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("--strip must be a:b, got {:?}", a.strip)))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad strip bound {x:?}")));
    Ok(Rect::new(p(lo)?, p(hi)?, a.ymin, a.ymax)?)
}

fn stem(spec: &LFunctionSpec, t: f64) -> String {
    format!("{}_t{}", spec.name, t)
}

/// F_t zeros, from the cache when possible.
fn cached_f_zeros(cache: &Cache, spec: &LFunctionSpec, t: f64, rect: &Rect, prec: &PrecisionConfig) -> Res<Vec<ZeroRecord>> {
    if let Some(e) = cache.load(spec, t, rect, prec, ZeroKind::Ft) {
        return Ok(e.zeros);
    }
    let z = f_t_zeros(spec, t, rect, prec)?;
    cache.store(&Cache::entry(spec, t, rect, prec, ZeroKind::Ft, z.clone()), spec, prec)?;
    Ok(z)
}

/// F_t zeros and `h` zeros, from the cache when both are present.
fn cached_pair(cache: &Cache, spec: &LFunctionSpec, t: f64, rect: &Rect, prec: &PrecisionConfig) -> Res<(Vec<ZeroRecord>, Vec<ZeroRecord>)> {
    if let (Some(f), Some(x)) = (
        cache.load(spec, t, rect, prec, ZeroKind::Ft),
        cache.load(spec, t, rect, prec, ZeroKind::XiPreimage),
    ) {
        return Ok((f.zeros, x.zeros));
    }
    let p = pair_zeros(spec, t, rect, prec)?;
    let (f, x) = split_pairing(&p);
    cache.store(&Cache::entry(spec, t, rect, prec, ZeroKind::Ft, f.clone()), spec, prec)?;
    cache.store(&Cache::entry(spec, t, rect, prec, ZeroKind::XiPreimage, x.clone()), spec, prec)?;
    Ok((f, x))
}

fn split_pairing(p: &Pairing) -> (Vec<ZeroRecord>, Vec<ZeroRecord>) {
    let f = p.pairs.iter().map(|q| q.f_zero.clone()).collect();
    let mut x: Vec<ZeroRecord> = p
        .pairs
        .iter()
        .filter_map(|q| q.xi_preimage.clone())
        .chain(p.unmatched_xi.iter().cloned())
        .collect();
    x.sort_by(|a, b| a.center.im.total_cmp(&b.center.im).then(a.center.re.total_cmp(&b.center.re)));
    (f, x)
}

fn report(paths: Vec<PathBuf>) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_zeros(a: RegionArgs) -> Res<()> {
    let spec = load_spec(&a.common.spec)?;
    let prec = a.common.prec(16)?;
    let t = a.common.t;
    let rect = region(&a)?;
    let cache = Cache::from_env();
    let mut out = OutputSet::new();
    let stem = stem(&spec, t);
    if a.which == Which::Ft {
        let f = cached_f_zeros(&cache, &spec, t, &rect, &prec)?;
        out.write(a.out.join(format!("{stem}_ft_zeros.csv")), &zeros_csv(f.iter().map(|z| (z.center, z))))?;
    } else {
        let (f, x) = cached_pair(&cache, &spec, t, &rect, &prec)?;
        let fig = FigureData::from_zeros(&spec, t, &rect, f, x)?;
        if a.which == Which::Both {
            out.write(a.out.join(format!("{stem}_ft_zeros.csv")), &fig.f_csv())?;
        }
        out.write(a.out.join(format!("{stem}_xi_zeros.csv")), &fig.xi_csv())?;
    }
    report(out.commit());
    Ok(())
}

fn cmd_correspond(a: RegionArgs) -> Res<()> {
    let spec = load_spec(&a.common.spec)?;
    let prec = a.common.prec(16)?;
    let t = a.common.t;
    let rect = region(&a)?;
    let p = pair_zeros(&spec, t, &rect, &prec)?;
    let mut csv = String::from("f_re,f_im,xi_pre_re,xi_pre_im,xi_re,xi_im,distance\n");
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for q in &p.pairs {
        let pre = q.xi_preimage.as_ref().map(|z| z.center);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            q.f_zero.center.re,
            q.f_zero.center.im,
            opt(pre.map(|z| z.re)),
            opt(pre.map(|z| z.im)),
            opt(q.xi_zero.map(|z| z.re)),
            opt(q.xi_zero.map(|z| z.im)),
            opt(q.distance)
        ));
    }
    for z in &p.unmatched_xi {
        let w = j_map(&spec, t, z.center)?;
        csv.push_str(&format!(",,{},{},{},{},\n", z.center.re, z.center.im, w.re, w.im));
    }
    println!("{:>24}  {:>24}  {:>10}", "F_t zero", "h zero", "distance");
    for q in &p.pairs {
        let h = q.xi_preimage.as_ref().map(|z| format!("{:.6}", z.center)).unwrap_or("-".into());
        let d = q.distance.map(|d| format!("{d:.3e}")).unwrap_or("-".into());
        println!("{:>24}  {h:>24}  {d:>10}", format!("{:.6}", q.f_zero.center));
    }
    println!(
        "{} F_t zeros, {} h zeros counted, {} without F_t partner",
        p.pairs.len(),
        p.h_count(),
        p.unmatched_xi.len()
    );
    let mut out = OutputSet::new();
    out.write(a.out.join(format!("{}_correspond.csv", stem(&spec, t))), &csv)?;
    report(out.commit());
    Ok(())
}

#[derive(Serialize)]
struct WitnessReport<'a> {
    certificate: &'a CertifiedZero,
    off_line: bool,
    spec_name: &'a str,
    spec_hash: String,
    working_digits: u32,
    target_abs_err: f64,
    tool_version: &'static str,
}

fn cmd_witness(a: WitnessArgs) -> Res<()> {
    let spec = load_spec(&a.common.spec)?;
    let prec = a.common.prec(16)?;
    let t = a.common.t;
    let mut opts = WitnessOptions::default();
    if let Some(y) = a.ymax {
        opts.y_max = y;
    }
    let c = newman_witness_with(&spec, t, &prec, &opts, &mut |m| eprintln!("{m}"))?;
    let rep = WitnessReport {
        certificate: &c,
        off_line: c.off_line(),
        spec_name: &spec.name,
        spec_hash: spec.spec_hash(),
        working_digits: prec.working_digits,
        target_abs_err: prec.target_abs_err,
        tool_version: TOOL_VERSION,
    };
    let json = serde_json::to_string_pretty(&rep).map_err(|e| Failure::Io(std::io::Error::other(e)))? + "\n";
    let path = a.out.unwrap_or_else(|| PathBuf::from(format!("{}_witness.json", stem(&spec, t))));
    let mut out = OutputSet::new();
    out.write(path, &json)?;
    println!("{}: F_t has a zero in the disk |s - {:.8}| <= {:e}", spec.name, c.disk_center, c.disk_radius);
    println!(
        "Rouche margin: sup |h - F_t| = {:.4e} < delta = {:.4e} on {} circle samples",
        c.sup_residual, c.delta, c.samples
    );
    println!("{} at t = {}: within {:e} of {:.8}", c.claim, t, c.xi_radius, c.xi_center);
    println!("off the critical line: {}", c.off_line());
    report(out.commit());
    Ok(())
}

fn cmd_figure(a: RegionArgs) -> Res<()> {
    let spec = load_spec(&a.common.spec)?;
    let prec = a.common.prec(16)?;
    let t = a.common.t;
    let rect = region(&a)?;
    let cache = Cache::from_env();
    let (f, x) = cached_pair(&cache, &spec, t, &rect, &prec)?;
    let fig = FigureData::from_zeros(&spec, t, &rect, f, x)?;
    let stem = stem(&spec, t);
    let dir: &Path = &a.out;
    let mut out = OutputSet::new();
    out.write(dir.join(format!("{stem}_ft_zeros.csv")), &fig.f_csv())?;
    out.write(dir.join(format!("{stem}_xi_zeros.csv")), &fig.xi_csv())?;
    out.write(dir.join(format!("{stem}_figure.svg")), &fig.svg())?;
    report(out.commit());
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Res<()> {
    let results = acceptance::run(&a.only, &mut |r| println!("{}", r.line()));
    let failed: Vec<u8> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!("{} passed, {} failed", results.len() - failed.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Failed(format!("failed criteria: {failed:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let ok = |s: &str| parse_complex(s).ok().unwrap();
        assert_eq!(ok("-0.25+40i"), Complex64::new(-0.25, 40.0));
        assert_eq!(ok("0.3-2i"), Complex64::new(0.3, -2.0));
        assert_eq!(ok("10"), Complex64::new(10.0, 0.0));
        assert_eq!(ok("2i"), Complex64::new(0.0, 2.0));
        assert_eq!(ok("-i"), Complex64::new(0.0, -1.0));
        assert_eq!(ok("1e-3+1e2i"), Complex64::new(1e-3, 100.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+xi").is_err());
    }
}
