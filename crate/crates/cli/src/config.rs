use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use slugflow::cone::ConeOptions;
use slugflow::ModelPair;

use crate::CliError;

/// Flat configuration for `solve`; every key is optional and unknown keys
/// are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Corey mobility ratio `M₀` and its concentration factor `m`.
    pub m0: f64,
    pub m: f64,
    /// Langmuir capacity and affinity.
    pub gamma: f64,
    pub beta: f64,
    pub t_inj: f64,
    /// Physical grid on `[0, x_max] × [0, t_max]`.
    pub nx: usize,
    pub nt: usize,
    pub x_max: f64,
    pub t_max: f64,
    /// Lagrange grid on `[0, phi_max] × [0, x_max]`.
    pub lagrange_nphi: usize,
    pub lagrange_nx: usize,
    pub phi_max: f64,
    /// Points of `zeta_front.csv`, log-spaced on `[x_A/100, 100 x_A]`.
    pub front_points: usize,
    /// Multiplies every characteristic-family size.
    pub family_scale: f64,
    pub root_tol: f64,
    pub ode_rtol: f64,
    pub quad_tol: f64,
    /// Samples of the curved front checked for admissibility.
    pub shock_samples: usize,
    /// Viscosities of the finite-volume comparison (empty: skipped).
    pub fv_eps: Vec<f64>,
    /// `Δx / ε`.
    pub fv_dx_ratio: f64,
    pub fv_snapshots: usize,
    pub output_dir: PathBuf,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            m0: 1.0,
            m: 1.0,
            gamma: 2.0,
            beta: 1.0,
            t_inj: 1.0,
            nx: 201,
            nt: 121,
            x_max: 6.0,
            t_max: 6.0,
            lagrange_nphi: 121,
            lagrange_nx: 121,
            phi_max: 6.0,
            front_points: 200,
            family_scale: 1.0,
            root_tol: 1e-12,
            ode_rtol: 1e-9,
            quad_tol: 1e-10,
            shock_samples: 32,
            fv_eps: Vec::new(),
            fv_dx_ratio: 1.0,
            fv_snapshots: 4,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}` {msg}"))
}

impl SolveConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let pos = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(bad(name, format!("must be positive, got {v}"))) };
        pos("t_inj", self.t_inj)?;
        for (name, v) in [("m0", self.m0), ("gamma", self.gamma), ("beta", self.beta)] {
            pos(name, v)?;
        }
        if !(self.m >= 0.0 && self.m.is_finite()) {
            return Err(bad("m", format!("must be non-negative, got {}", self.m)));
        }
        for (name, v) in [
            ("x_max", self.x_max),
            ("t_max", self.t_max),
            ("phi_max", self.phi_max),
            ("family_scale", self.family_scale),
            ("root_tol", self.root_tol),
            ("ode_rtol", self.ode_rtol),
            ("quad_tol", self.quad_tol),
            ("fv_dx_ratio", self.fv_dx_ratio),
        ] {
            pos(name, v)?;
        }
        for (name, n) in [("nx", self.nx), ("nt", self.nt), ("lagrange_nphi", self.lagrange_nphi), ("lagrange_nx", self.lagrange_nx)] {
            if n < 2 {
                return Err(bad(name, format!("must be at least 2, got {n}")));
            }
        }
        if self.fv_snapshots == 0 {
            return Err(bad("fv_snapshots", "must be at least 1"));
        }
        if let Some(e) = self.fv_eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(bad("fv_eps", format!("entries must be positive, got {e}")));
        }
        self.model().map(|_| ())
    }

    pub fn model(&self) -> Result<ModelPair, CliError> {
        ModelPair::new(self.m0, self.m, self.gamma, self.beta).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn cone_options(&self) -> ConeOptions {
        let mut o = ConeOptions::scaled(self.family_scale);
        o.sign_tol = self.root_tol;
        o.chars.rtol = self.ode_rtol;
        o
    }

    /// The effective configuration, verbatim as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }
}
