//! On-disk cache of zero lists keyed by spec, `t`, region and precision.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use xideform::selberg::LFunctionSpec;
use xideform::zerofind::{CertifiedZero, Rect, ZeroRecord};
use xideform::PrecisionConfig;

use crate::output::write_atomic;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "XIDEFORM_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Zeros of `F_t`.
    Ft,
    /// Zeros of `h = xi_t(J_t) / gamma_t`, the `s`-plane pre-images of `xi_t` zeros.
    XiPreimage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCacheEntry {
    pub spec_hash: String,
    pub t: f64,
    pub region: Rect,
    pub working_digits: u32,
    pub target_abs_err: f64,
    pub kind: ZeroKind,
    pub zeros: Vec<ZeroRecord>,
    pub certificates: Vec<CertifiedZero>,
    pub tool_version: String,
}

pub struct Cache {
    pub dir: PathBuf,
}

impl Cache {
    /// `$XIDEFORM_CACHE_DIR`, else `.xideform-cache` in the working directory.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".xideform-cache"));
        Cache { dir }
    }

    fn key(spec: &LFunctionSpec, t: f64, region: &Rect, prec: &PrecisionConfig, kind: ZeroKind) -> String {
        let text = format!(
            "{}|{}|{}|{}|{}|{}|{}|{}|{:?}",
            spec.spec_hash(),
            t.to_bits(),
            region.x_lo.to_bits(),
            region.x_hi.to_bits(),
            region.y_lo.to_bits(),
            region.y_hi.to_bits(),
            prec.working_digits,
            prec.target_abs_err.to_bits(),
            kind
        );
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A hit needs an exact match of every key field and of the tool version.
    pub fn load(
        &self,
        spec: &LFunctionSpec,
        t: f64,
        region: &Rect,
        prec: &PrecisionConfig,
        kind: ZeroKind,
    ) -> Option<ZeroCacheEntry> {
        let text = std::fs::read_to_string(self.path(&Self::key(spec, t, region, prec, kind))).ok()?;
        let e: ZeroCacheEntry = serde_json::from_str(&text).ok()?;
        let hit = e.spec_hash == spec.spec_hash()
            && e.t.to_bits() == t.to_bits()
            && e.region == *region
            && e.working_digits == prec.working_digits
            && e.target_abs_err.to_bits() == prec.target_abs_err.to_bits()
            && e.kind == kind
            && e.tool_version == TOOL_VERSION;
        hit.then_some(e)
    }

    pub fn store(&self, entry: &ZeroCacheEntry, spec: &LFunctionSpec, prec: &PrecisionConfig) -> std::io::Result<()> {
        let key = Self::key(spec, entry.t, &entry.region, prec, entry.kind);
        let text = serde_json::to_string_pretty(entry).map_err(std::io::Error::other)?;
        write_atomic(&self.path(&key), &text)
    }

    pub fn entry(
        spec: &LFunctionSpec,
        t: f64,
        region: &Rect,
        prec: &PrecisionConfig,
        kind: ZeroKind,
        zeros: Vec<ZeroRecord>,
    ) -> ZeroCacheEntry {
        ZeroCacheEntry {
            spec_hash: spec.spec_hash(),
            t,
            region: *region,
            working_digits: prec.working_digits,
            target_abs_err: prec.target_abs_err,
            kind,
            zeros,
            certificates: Vec::new(),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use xideform::selberg::{chi4, zeta};
    use xideform::zerofind::ZeroMethod;

    #[test]
    fn hit_requires_exact_key() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache { dir: dir.path().to_path_buf() };
        let prec = PrecisionConfig::default();
        let r = Rect::new(-0.3, -0.2, 30.0, 40.0).unwrap();
        let z = ZeroRecord {
            center: Complex64::new(-0.25, 35.0),
            residual: 1e-13,
            newton_steps: 4,
            method: ZeroMethod::Newton,
            step_log: vec![],
        };
        let e = Cache::entry(&zeta(), -1.0, &r, &prec, ZeroKind::Ft, vec![z]);
        cache.store(&e, &zeta(), &prec).unwrap();
        assert_eq!(cache.load(&zeta(), -1.0, &r, &prec, ZeroKind::Ft), Some(e.clone()));
        assert!(cache.load(&chi4(), -1.0, &r, &prec, ZeroKind::Ft).is_none());
        assert!(cache.load(&zeta(), -0.5, &r, &prec, ZeroKind::Ft).is_none());
        assert!(cache.load(&zeta(), -1.0, &r, &prec.with_target(1e-10), ZeroKind::Ft).is_none());
        assert!(cache.load(&zeta(), -1.0, &r, &prec, ZeroKind::XiPreimage).is_none());
        // stale tool versions are ignored
        let mut old = e;
        old.tool_version = "0.0.0".into();
        cache.store(&old, &zeta(), &prec).unwrap();
        assert!(cache.load(&zeta(), -1.0, &r, &prec, ZeroKind::Ft).is_none());
    }
}
