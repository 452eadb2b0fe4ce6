//! Run configuration: a TOML file, overridden by command-line flags.
//!
//! Unset physical parameters fall back to the baseline defaults of the model
//! (ω₀ = Ω_a = 1, g = 1e-4, γ = 0.5e-4, ℰ = 0.05e-4). The rotation is given by
//! exactly one of `delta`, `velocity` or `geometry`; none means Δ = 0.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ringjc::analysis::{default_delta_grid, default_grid, linear_grid, symmetric_grid, Method, SweepOptions};
use ringjc::field::{coupling_magnitude, xi_correction, DipoleConfig, RingGeometry, Units};
use ringjc::hilbert::{HilbertConfig, SigmaYConvention};
use ringjc::PhysicalParams;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub rotation: RotationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Units>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole: Option<DipoleConfig>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub slope: SlopeSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_atom: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive_amp: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Velocity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
}

/// Δ = −v_R·k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Velocity {
    pub v_r: f64,
    pub k: f64,
}

/// Ring of radius R spinning at Ω_rot, probed on mode n. The circumference
/// defaults to 2πR. ω₀ = c|k| is used when `params.omega0` is unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub omega_rot: f64,
    pub radius: f64,
    pub mode_index: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circumference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_section: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub sigma_y: SigmaYConvention,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { n_max: 5, threads: None, sigma_y: SigmaYConvention::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub points: usize,
    /// Ω̃ range; defaults to ±3√2g.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    /// Empty means no solver path, which is rejected.
    pub methods: Vec<Method>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { points: 401, range: None, methods: vec![Method::Analytic] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeSection {
    pub points: usize,
    /// Δ half-width; defaults to 2e-6·Ω_a.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

impl Default for SlopeSection {
    fn default() -> Self {
        Self { points: 21, half_width: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Structured,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Everything a command needs, with defaults and derivations applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: PhysicalParams,
    pub hilbert: HilbertConfig,
    pub threads: Option<usize>,
    pub grid: Vec<f64>,
    pub method: Method,
    pub delta_grid: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Resolved {
    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions { hilbert: self.hilbert, threads: self.threads }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::usage(msg)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| config_err(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let base = PhysicalParams::baseline();
        let units = self.units.unwrap_or_default();
        let r = &self.rotation;
        let given = [r.delta.is_some(), r.velocity.is_some(), r.geometry.is_some()].iter().filter(|b| **b).count();
        if given > 1 {
            return Err(config_err("rotation: give exactly one of `delta`, `velocity` or `geometry`"));
        }

        let mut omega0 = self.params.omega0;
        let (mut delta, mut v_r, mut omega_rot, mut ring) = (0.0, 0.0, 0.0, None);
        if let Some(d) = r.delta {
            delta = d;
        } else if let Some(v) = r.velocity {
            if v.v_r.abs() >= units.c {
                return Err(config_err("rotation.velocity.v_r: must be below the speed of light"));
            }
            delta = -v.v_r * v.k;
            v_r = v.v_r;
        } else if let Some(g) = r.geometry {
            let l = g.circumference.unwrap_or(2.0 * std::f64::consts::PI * g.radius);
            let geom = RingGeometry::with_circumference(g.radius, l, g.cross_section.unwrap_or(1.0), g.mode_index, g.omega_rot, units.c)
                .map_err(|e| config_err(format!("rotation.geometry: {e}")))?;
            delta = geom.rotation_detuning();
            v_r = geom.linear_speed();
            omega_rot = g.omega_rot;
            omega0 = omega0.or(Some(geom.rest_frequency()));
            ring = Some(geom);
        }

        let omega0 = omega0.unwrap_or(base.omega0);
        let omega_atom = self.params.omega_atom.unwrap_or(omega0);
        let mut g = self.params.g;
        let mut xi = self.params.xi;
        if let Some(dip) = &self.dipole {
            dip.validate().map_err(|e| config_err(format!("dipole: {e}")))?;
            if g.is_none() {
                let geom = ring.ok_or_else(|| config_err("dipole: deriving g needs a `rotation.geometry` section"))?;
                let gm = coupling_magnitude(dip, omega_atom, geom.wavenumber(), geom.volume(), &units)
                    .map_err(|e| config_err(format!("dipole: {e}")))?;
                g = Some(gm);
            }
            if xi.is_none() {
                xi = Some(xi_correction(dip, v_r, omega_rot));
            }
        }

        let params = PhysicalParams {
            omega0,
            omega_atom,
            delta,
            g: g.unwrap_or(base.g),
            xi: xi.unwrap_or(0.0),
            gamma: self.params.gamma.unwrap_or(base.gamma),
            drive_amp: self.params.drive_amp.unwrap_or(base.drive_amp),
            drive_detuning: 0.0,
        };
        params.validate().map_err(|e| config_err(format!("params: {e}")))?;

        let mut hilbert = HilbertConfig::new(self.solver.n_max).map_err(|e| config_err(format!("solver.n_max: {e}")))?;
        hilbert.sigma_y = self.solver.sigma_y;
        if self.solver.threads == Some(0) {
            return Err(config_err("solver.threads: must be at least 1"));
        }

        let method = match self.sweep.methods.as_slice() {
            [] => return Err(config_err("sweep.methods: at least one of analytic, numeric is required")),
            m if m.iter().any(|x| x.numeric()) && m.iter().any(|x| x.analytic()) => Method::Both,
            m if m.iter().any(|x| x.numeric()) => Method::Numeric,
            _ => Method::Analytic,
        };
        if self.sweep.points == 0 {
            return Err(config_err("sweep.points: must be positive"));
        }
        let grid = match self.sweep.range {
            None if self.sweep.points == 401 => default_grid(&params),
            None => symmetric_grid(3.0 * std::f64::consts::SQRT_2 * params.g, self.sweep.points),
            Some([lo, hi]) if lo < hi || (lo == hi && self.sweep.points == 1) => linear_grid(lo, hi, self.sweep.points),
            Some(_) => return Err(config_err("sweep.range: lower bound must be below upper bound")),
        };
        if self.slope.points < 2 {
            return Err(config_err("slope.points: need at least 2"));
        }
        let delta_grid = match self.slope.half_width {
            None if self.slope.points == 21 => default_delta_grid(&params),
            None => symmetric_grid(2e-6 * params.omega_atom.abs(), self.slope.points),
            Some(w) if w > 0.0 => symmetric_grid(w, self.slope.points),
            Some(_) => return Err(config_err("slope.half_width: must be positive")),
        };

        Ok(Resolved {
            params,
            hilbert,
            threads: self.solver.threads,
            grid,
            method,
            delta_grid,
            out: self.output.path.clone(),
            format: self.output.format,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_to_baseline() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.params, PhysicalParams::baseline());
        assert_eq!(r.grid.len(), 401);
        assert_eq!(r.method, Method::Analytic);
        assert_eq!(r.hilbert.n_max, 5);
    }

    #[test]
    fn rotation_sources() {
        let c = RunConfig::from_toml("[rotation]\nvelocity = { v_r = 1e-3, k = -1e-2 }\n").unwrap();
        assert!((c.resolve().unwrap().params.delta - 1e-5).abs() < 1e-20);

        let c = RunConfig::from_toml("[rotation]\ndelta = 1e-5\nvelocity = { v_r = 1e-3, k = 1.0 }\n").unwrap();
        assert!(c.resolve().unwrap_err().message.contains("exactly one"));

        let c = RunConfig::from_toml(
            "[params]\nomega_atom = 1.0\n[rotation.geometry]\nomega_rot = 1e-6\nradius = 1.0\nmode_index = 1\n",
        )
        .unwrap();
        let r = c.resolve().unwrap();
        assert!((r.params.delta + 1e-6).abs() < 1e-18);
        assert!((r.params.omega0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "[params]\ngamma = -1.0\n",
            "[solver]\nn_max = 0\n",
            "[sweep]\npoints = 5\nmethods = []\n",
            "[sweep]\npoints = 5\nrange = [1.0, -1.0]\nmethods = [\"analytic\"]\n",
            "[nonsense]\nx = 1\n",
        ] {
            let e = RunConfig::from_toml(text).and_then(|c| c.resolve());
            assert!(e.is_err(), "{text}");
        }
    }

    #[test]
    fn dipole_needs_geometry() {
        let text = "[dipole]\ndipole_moment = [0.0, 0.0, 1e-3]\npolarization = [0.0, 0.0, 1.0]\ntangent = [1.0, 0.0, 0.0]\n\
                    electron_mass = 1.0\ncharge = 1.0\nposition = 0.0\n";
        assert!(RunConfig::from_toml(text).unwrap().resolve().is_err());
        let with_geom = format!("{text}[rotation.geometry]\nomega_rot = 0.0\nradius = 1.0\nmode_index = 3\n");
        let r = RunConfig::from_toml(&with_geom).unwrap().resolve().unwrap();
        assert!(r.params.g > 0.0 && r.params.xi == 0.0);
    }
}
