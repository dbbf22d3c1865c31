//! Two-panel zero plot: `F_t` zeros in a strip, and `xi_t` zeros with the `J_t` image
//! of the strip outlined.

use std::fmt::Write as _;

use num_complex::Complex64;
use xideform::deform::j_map;
use xideform::selberg::LFunctionSpec;
use xideform::zerofind::{Pairing, Rect, ZeroRecord};
use xideform::Result;

use crate::cache::TOOL_VERSION;
use crate::output::zeros_csv;

#[derive(Clone, Debug)]
pub struct FigureData {
    pub spec_name: String,
    pub t: f64,
    pub strip: Rect,
    pub f_zeros: Vec<ZeroRecord>,
    /// `h` zeros in the `s`-plane; `xi_zeros[i] = J_t(xi_preimages[i].center)`.
    pub xi_preimages: Vec<ZeroRecord>,
    pub xi_zeros: Vec<Complex64>,
    /// Closed polyline `J_t(boundary of strip)`.
    pub strip_image: Vec<Complex64>,
}

const IMAGE_SAMPLES: usize = 400;

/// `J_t` applied to the strip boundary, traversed counter-clockwise.
pub fn strip_image(spec: &LFunctionSpec, t: f64, strip: &Rect, samples: usize) -> Result<Vec<Complex64>> {
    let mut pts = Vec::with_capacity(2 * samples + 5);
    let n = samples.max(2);
    for i in 0..=n {
        let y = strip.y_lo + strip.height() * i as f64 / n as f64;
        pts.push(j_map(spec, t, Complex64::new(strip.x_hi, y))?);
    }
    for i in 0..=n {
        let y = strip.y_hi - strip.height() * i as f64 / n as f64;
        pts.push(j_map(spec, t, Complex64::new(strip.x_lo, y))?);
    }
    pts.push(pts[0]);
    Ok(pts)
}

impl FigureData {
    pub fn from_zeros(
        spec: &LFunctionSpec,
        t: f64,
        strip: &Rect,
        f_zeros: Vec<ZeroRecord>,
        mut xi_preimages: Vec<ZeroRecord>,
    ) -> Result<Self> {
        xi_preimages.sort_by(|a, b| a.center.im.partial_cmp(&b.center.im).unwrap());
        let xi_zeros = xi_preimages
            .iter()
            .map(|z| j_map(spec, t, z.center))
            .collect::<Result<Vec<_>>>()?;
        Ok(FigureData {
            spec_name: spec.name.clone(),
            t,
            strip: *strip,
            f_zeros,
            xi_preimages,
            xi_zeros,
            strip_image: strip_image(spec, t, strip, IMAGE_SAMPLES)?,
        })
    }

    pub fn from_pairing(spec: &LFunctionSpec, t: f64, strip: &Rect, p: &Pairing) -> Result<Self> {
        let f_zeros = p.pairs.iter().map(|q| q.f_zero.clone()).collect();
        let xi = p
            .pairs
            .iter()
            .filter_map(|q| q.xi_preimage.clone())
            .chain(p.unmatched_xi.iter().cloned())
            .collect();
        Self::from_zeros(spec, t, strip, f_zeros, xi)
    }

    pub fn f_csv(&self) -> String {
        zeros_csv(self.f_zeros.iter().map(|z| (z.center, z)))
    }

    /// `xi_t` zeros in the `xi`-plane; residual is that of `h` at the pre-image.
    pub fn xi_csv(&self) -> String {
        zeros_csv(self.xi_zeros.iter().copied().zip(&self.xi_preimages))
    }

    pub fn svg(&self) -> String {
        let (w, h) = (900.0, 640.0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, "<!-- xideform {TOOL_VERSION} -->");
        let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

        let pad_x = 0.25 * self.strip.width();
        let left = Panel {
            x0: 60.0,
            y0: 40.0,
            w: 360.0,
            h: 540.0,
            re: (self.strip.x_lo - pad_x, self.strip.x_hi + pad_x),
            im: (self.strip.y_lo, self.strip.y_hi),
        };
        let title = format!("zeros of F_t, {} t = {}", self.spec_name, self.t);
        left.frame(&mut out, &title);
        left.polyline(
            &mut out,
            &[
                Complex64::new(self.strip.x_lo, self.strip.y_lo),
                Complex64::new(self.strip.x_hi, self.strip.y_lo),
                Complex64::new(self.strip.x_hi, self.strip.y_hi),
                Complex64::new(self.strip.x_lo, self.strip.y_hi),
                Complex64::new(self.strip.x_lo, self.strip.y_lo),
            ],
            "#888",
        );
        for z in &self.f_zeros {
            left.dot(&mut out, z.center, "#c0392b");
        }

        let re_lo = self.strip_image.iter().map(|z| z.re).fold(0.5, f64::min);
        let re_hi = self.strip_image.iter().map(|z| z.re).fold(0.5, f64::max);
        let im_lo = self.strip_image.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
        let im_hi = self.strip_image.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.25 * (re_hi - re_lo).max(0.05);
        let right = Panel {
            x0: 500.0,
            y0: 40.0,
            w: 360.0,
            h: 540.0,
            re: (re_lo - pad, re_hi + pad),
            im: (im_lo, im_hi),
        };
        right.frame(&mut out, &format!("zeros of xi_t and J_t(strip), t = {}", self.t));
        right.vline(&mut out, 0.5);
        right.polyline(&mut out, &self.strip_image, "#888");
        for z in &self.xi_zeros {
            right.dot(&mut out, *z, "#2c3e50");
        }
        out.push_str("</svg>\n");
        out
    }
}

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    re: (f64, f64),
    im: (f64, f64),
}

impl Panel {
    fn map(&self, z: Complex64) -> (f64, f64) {
        let x = self.x0 + self.w * (z.re - self.re.0) / (self.re.1 - self.re.0);
        let y = self.y0 + self.h * (1.0 - (z.im - self.im.0) / (self.im.1 - self.im.0));
        (x, y)
    }

    fn frame(&self, out: &mut String, title: &str) {
        let _ = writeln!(
            out,
            r#"<g><rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            self.x0, self.y0, self.w, self.h
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{title}</text>"#, self.x0, self.y0 - 12.0);
        let yb = self.y0 + self.h + 16.0;
        let _ = writeln!(out, r#"<text x="{}" y="{yb}">{:.3}</text>"#, self.x0, self.re.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{yb}" text-anchor="end">{:.3}</text>"#,
            self.x0 + self.w,
            self.re.1
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{:.1}</text>"#,
            self.x0 - 4.0,
            self.y0 + self.h,
            self.im.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{:.1}</text></g>"#,
            self.x0 - 4.0,
            self.y0 + 10.0,
            self.im.1
        );
    }

    fn polyline(&self, out: &mut String, pts: &[Complex64], color: &str) {
        let mut d = String::new();
        for (i, z) in pts.iter().enumerate() {
            let (x, y) = self.map(*z);
            let _ = write!(d, "{}{x:.2},{y:.2}", if i == 0 { "" } else { " " });
        }
        let _ = writeln!(out, r#"<polyline points="{d}" fill="none" stroke="{color}"/>"#);
    }

    fn vline(&self, out: &mut String, re: f64) {
        let (x, _) = self.map(Complex64::new(re, 0.0));
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#aaa" stroke-dasharray="4 3"/>"##,
            self.y0,
            self.y0 + self.h
        );
    }

    fn dot(&self, out: &mut String, z: Complex64, color: &str) {
        let (x, y) = self.map(z);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use xideform::selberg::zeta;
    use xideform::zerofind::ZeroMethod;

    fn rec(z: Complex64) -> ZeroRecord {
        ZeroRecord {
            center: z,
            residual: 0.0,
            newton_steps: 1,
            method: ZeroMethod::Newton,
            step_log: vec![],
        }
    }

    #[test]
    fn svg_has_two_panels_and_points() {
        let strip = Rect::new(-0.3, -0.2, 30.0, 200.0).unwrap();
        let f = vec![rec(Complex64::new(-0.25, 104.0))];
        let x = vec![rec(Complex64::new(-0.24, 104.01))];
        let d = FigureData::from_zeros(&zeta(), -1.0, &strip, f, x).unwrap();
        let svg = d.svg();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("J_t(strip)"));
        assert_eq!(d.xi_csv().lines().count(), 2);
        // the image outline is closed
        assert_eq!(d.strip_image.first(), d.strip_image.last());
    }
}
