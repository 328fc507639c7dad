//! Run configuration: JSON file, `key=value` overrides, resolved copy.

use crate::dirac::ScanWindow;
use crate::discretize::DiscretizationParams;
use crate::error::{Error, Result};
use crate::varform::{FormQuadrature, DEFAULT_TRUNC_TOL};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub count: usize,
    pub seed0: u64,
    pub modes: usize,
    pub amplitude: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            count: 100,
            seed0: 1,
            modes: 8,
            amplitude: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Number of RBF centers.
    #[serde(rename = "N")]
    pub n: usize,
    /// Multiquadric shape parameter, relative to sqrt(area/pi) like the spacings.
    pub eps: f64,
    /// Boundary collocation nodes; 0 means N.
    #[serde(rename = "M_bnd")]
    pub m_bnd: usize,
    /// Interior collocation spacing relative to sqrt(area/pi).
    #[serde(rename = "M_int_h")]
    pub m_int_h: f64,
    /// [lo, hi, step]; null picks [0.9 sqrt(2 pi/area), 1.1 perimeter/area].
    #[serde(rename = "E_scan")]
    pub e_scan: Option<[f64; 3]>,
    pub accept_tol: f64,
    pub trunc_tol: f64,
    /// Band outside the boundary for centers, relative to sqrt(area/pi).
    pub center_margin: f64,
    pub center_seed: u64,
    pub form_quad: FormQuadrature,
    pub sweep: SweepConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n: 280,
            eps: 5.0,
            m_bnd: 0,
            m_int_h: 0.035,
            e_scan: None,
            accept_tol: 1e-6,
            trunc_tol: DEFAULT_TRUNC_TOL,
            center_margin: 0.3,
            center_seed: 1,
            form_quad: FormQuadrature::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Apply `key=value` overrides (dotted keys reach into `sweep` and
    /// `form_quad`). Values are parsed as JSON.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut v = serde_json::to_value(self)?;
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            let value: Value = serde_json::from_str(raw).map_err(|_| Error::Config(format!("bad value in `{o}`")))?;
            let mut slot = &mut v;
            for part in key.split('.') {
                slot = slot
                    .as_object_mut()
                    .and_then(|m| m.get_mut(part))
                    .ok_or_else(|| Error::Config(format!("unknown config key `{key}`")))?;
            }
            *slot = value;
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn discretization(&self) -> DiscretizationParams {
        DiscretizationParams {
            n_centers: self.n,
            eps: self.eps,
            interior_h: self.m_int_h,
            n_boundary: self.m_bnd,
            center_margin: self.center_margin,
            seed: self.center_seed,
        }
    }

    pub fn scan_window(&self, area: f64, perimeter: f64) -> ScanWindow {
        match self.e_scan {
            Some([lo, hi, step]) => ScanWindow { lo, hi, step },
            None => ScanWindow {
                lo: 0.9 * (2.0 * std::f64::consts::PI / area).sqrt(),
                hi: 1.1 * perimeter / area,
                step: 0.02 * (std::f64::consts::PI / area).sqrt().min(1.0),
            },
        }
    }

    /// Hash of everything that affects a sweep record. The domain count is
    /// left out so a finished sweep can be extended.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v["sweep"]["count"] = Value::Null;
        let text = v.to_string();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn write_resolved(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(dir.join("resolved_config.json"), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_unknown_keys() {
        let c = SolverConfig::default()
            .with_overrides(&["N=250".into(), "sweep.count=7".into(), "E_scan=[1,2,0.01]".into()])
            .unwrap();
        assert_eq!(c.n, 250);
        assert_eq!(c.sweep.count, 7);
        assert_eq!(c.e_scan, Some([1.0, 2.0, 0.01]));
        assert!(SolverConfig::default().with_overrides(&["nope=1".into()]).is_err());
        assert!(serde_json::from_str::<SolverConfig>(r#"{"N": 100, "extra": 1}"#).is_err());
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c: SolverConfig = serde_json::from_str(r#"{"N": 120, "sweep": {"count": 3, "seed0": 9, "modes": 4, "amplitude": 0.1}}"#).unwrap();
        assert_eq!(c.n, 120);
        assert_eq!(c.eps, 5.0);
        assert_eq!(c.sweep.seed0, 9);
    }
}
