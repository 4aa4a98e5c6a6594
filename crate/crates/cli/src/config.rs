//! Run configuration: a flat TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sigma_core::estimates::{EstimateConstants, EstimateInputs, FeasibilityScan, GradientEstimateConfig};
use sigma_core::grid::{DiscRegion, Grid2D};
use sigma_core::solver::{FlowConfig, SeedKind};
use sigma_core::LabError;

use crate::error::ConfigError;

/// Audits understood by `audit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AuditKind {
    Kato,
    Bochner,
    Hopf,
    Polar,
    EpsRegularity,
    GradientEstimate,
    Maximizer,
    FeasibilityScan,
}

impl AuditKind {
    pub fn name(self) -> &'static str {
        match self {
            AuditKind::Kato => "kato",
            AuditKind::Bochner => "bochner",
            AuditKind::Hopf => "hopf",
            AuditKind::Polar => "polar",
            AuditKind::EpsRegularity => "eps-regularity",
            AuditKind::GradientEstimate => "gradient-estimate",
            AuditKind::Maximizer => "maximizer",
            AuditKind::FeasibilityScan => "feasibility-scan",
        }
    }
}

/// Refinement families of `convergence`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `L^inf` residual of the Weitzenboeck identity on an analytic pair.
    Weitzenboeck,
    /// `L^inf` error of the centered derivative on a trigonometric field.
    Derivative,
    /// `L^2` norm of `d T / d zbar` on the relaxed equivariant solution.
    Hopf,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Weitzenboeck => "weitzenboeck",
            Family::Derivative => "derivative",
            Family::Hopf => "hopf",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Grid points per side.
    pub n: usize,
    /// Target is the unit sphere of `R^q`.
    pub q: usize,
    pub seed: SeedKind,
    /// TOML integers are signed, so a file holds seeds up to `i64::MAX`;
    /// `--seed-rng` takes any `u64`.
    pub rng_seed: u64,
    /// Flow steps; unset means the stability bound.
    pub step_map: Option<f64>,
    pub step_spinor: Option<f64>,
    pub max_iters: usize,
    /// Flow stopping tolerance. The polar audit also reads it as the
    /// residual scale of the audited fields.
    pub residual_tol: f64,
    pub audits: Vec<AuditKind>,
    pub constants: EstimateInputs,
    /// Largest residual accepted by the Bochner audit.
    pub eps_res: f64,
    pub polar_center: (f64, f64),
    pub polar_radii: Vec<f64>,
    pub eps_center: (f64, f64),
    pub eps_radius: f64,
    pub eps_nested: Vec<f64>,
    /// Unset means a ball of radius 0.45 around the last basis vector.
    pub gradient: Option<GradientEstimateConfig>,
    pub feasibility: FeasibilityScan,
    pub grids: Vec<usize>,
    pub families: Vec<Family>,
    /// Directory with `phi.csv` and optionally `psi.csv` for `audit`.
    pub fields: Option<PathBuf>,
    /// Output directory. Not echoed in the manifest.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 64,
            q: 3,
            seed: SeedKind::Geodesic { k: 1 },
            rng_seed: 0,
            step_map: None,
            step_spinor: None,
            max_iters: 20_000,
            residual_tol: 1e-6,
            audits: Vec::new(),
            constants: EstimateInputs::default(),
            eps_res: 1e-4,
            polar_center: (0.5, 0.5),
            polar_radii: vec![0.1, 0.15, 0.2],
            eps_center: (0.5, 0.5),
            eps_radius: 0.2,
            eps_nested: vec![1.0, 0.5, 0.25],
            gradient: None,
            feasibility: FeasibilityScan::default(),
            grids: vec![32, 64, 128],
            families: vec![Family::Weitzenboeck, Family::Derivative, Family::Hopf],
            fields: None,
            out: None,
        }
    }
}

/// Command-line values that replace file values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    /// `--grid`: one size for `simulate`/`audit`, a list for `convergence`.
    pub grid: Vec<usize>,
    pub seed_rng: Option<u64>,
    pub audits: Option<Vec<AuditKind>>,
    pub tol: Option<f64>,
    pub fields: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

fn lab(field: &str, e: LabError) -> ConfigError {
    err(field, e.to_string())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Applies `o`; `grid_list` selects whether `--grid` fills `grids`
    /// (convergence) or `n`.
    pub fn apply(&mut self, o: &Overrides, grid_list: bool) -> Result<(), ConfigError> {
        if grid_list {
            if !o.grid.is_empty() {
                self.grids = o.grid.clone();
            }
        } else {
            match o.grid[..] {
                [] => {}
                [n] => self.n = n,
                _ => return Err(err("grid", "expects a single size for this command")),
            }
        }
        if let Some(s) = o.seed_rng {
            self.rng_seed = s;
        }
        if let Some(a) = &o.audits {
            self.audits = a.clone();
        }
        if let Some(t) = o.tol {
            self.residual_tol = t;
        }
        if o.fields.is_some() {
            self.fields = o.fields.clone();
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2D, ConfigError> {
        Grid2D::new(self.n).map_err(|e| lab("n", e))
    }

    /// Flow parameters with unset steps at their bounds.
    pub fn flow_config(&self, h: f64) -> FlowConfig {
        let mut f = FlowConfig::at_bounds(h, self.max_iters, self.residual_tol);
        if let Some(s) = self.step_map {
            f.step_map = s;
        }
        if let Some(s) = self.step_spinor {
            f.step_spinor = s;
        }
        f
    }

    pub fn estimate_constants(&self) -> Result<EstimateConstants, ConfigError> {
        EstimateConstants::new(self.constants).map_err(|e| lab("constants", e))
    }

    pub fn gradient_config(&self) -> GradientEstimateConfig {
        self.gradient
            .clone()
            .unwrap_or_else(|| GradientEstimateConfig::around_pole(self.q))
    }

    /// Checks every field against the preconditions of the stages that read
    /// it. An infeasible gradient configuration is not rejected here; the
    /// audit reports it.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let grid = self.grid()?;
        let h = grid.h();
        if self.q < 3 {
            return Err(err("q", format!("target dimension q = {} must be >= 3", self.q)));
        }
        if let Some(s) = self.step_map {
            let b = FlowConfig::map_step_bound(h);
            if !(s > 0.0 && s <= b) {
                return Err(err("step_map", format!("{s} must lie in (0, h^2/8 = {b}]")));
            }
        }
        if let Some(s) = self.step_spinor {
            let b = FlowConfig::spinor_step_bound(h);
            if !(s > 0.0 && s <= b) {
                return Err(err("step_spinor", format!("{s} must lie in (0, h^2/4 = {b}]")));
            }
        }
        if self.max_iters == 0 {
            return Err(err("max_iters", "must be >= 1"));
        }
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(err("residual_tol", format!("{} must be > 0", self.residual_tol)));
        }
        let constants = self.estimate_constants()?;
        if !(self.eps_res > 0.0) {
            return Err(err("eps_res", format!("{} must be > 0", self.eps_res)));
        }
        if self.polar_radii.is_empty() {
            return Err(err("polar_radii", "needs at least one radius"));
        }
        if let Some(r) = self.polar_radii.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
            return Err(err("polar_radii", format!("radius {r} must be > 0")));
        }
        if !(self.polar_center.0.is_finite() && self.polar_center.1.is_finite()) {
            return Err(err("polar_center", "must be finite"));
        }
        let disc = DiscRegion::new(self.eps_center, self.eps_radius).map_err(|e| lab("eps_radius", e))?;
        for &f in &self.eps_nested {
            if !(f > 0.0 && f <= 1.0) {
                return Err(err("eps_nested", format!("shrink factor {f} must lie in (0, 1]")));
            }
            disc.shrink(f).map_err(|e| lab("eps_nested", e))?;
        }
        match self.gradient_config().validate(self.q, &constants) {
            Ok(_) | Err(LabError::Infeasible { .. }) => {}
            Err(e) => return Err(lab("gradient", e)),
        }
        self.feasibility.validate().map_err(|e| lab("feasibility", e))?;
        if self.grids.is_empty() {
            return Err(err("grids", "needs at least one size"));
        }
        for &n in &self.grids {
            Grid2D::new(n).map_err(|e| lab("grids", e))?;
        }
        Ok(())
    }
}

/// `--out`, then the config file, then `SIGMA_LAB_OUT`, then
/// `./sigma-lab-out`.
pub fn resolve_out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out
        .clone()
        .or_else(|| std::env::var_os("SIGMA_LAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sigma-lab-out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_tables_and_partial_keys() {
        let cfg = RunConfig::from_toml_str(
            r#"
n = 32
audits = ["kato", "eps-regularity"]
polar_center = [0.25, 0.5]

[seed]
kind = "perturbed-geodesic"
k = 2
amplitude = 0.05

[constants]
delta3 = 0.2

[gradient]
d1 = 7.0

[feasibility]
d1 = { min = 1.0, max = 2.0, steps = 3 }
"#,
        )
        .unwrap();
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.seed, SeedKind::PerturbedGeodesic { k: 2, amplitude: 0.05 });
        assert_eq!(cfg.audits, vec![AuditKind::Kato, AuditKind::EpsRegularity]);
        assert_eq!(cfg.constants.delta3, 0.2);
        assert_eq!(cfg.constants.delta4, 0.5);
        assert_eq!(cfg.gradient.as_ref().unwrap().d1, 7.0);
        assert_eq!(cfg.gradient.as_ref().unwrap().a, 0.4);
        assert_eq!(cfg.feasibility.d1.steps, 3);
        assert_eq!(cfg.polar_center, (0.25, 0.5));
        // infeasible d1 is left to the audit
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::from_toml_str("nn = 3"), Err(ConfigError::Parse(_))));
        assert!(RunConfig::from_toml_str("[seed]\nkind = \"spiral\"").is_err());
    }

    #[test]
    fn field_level_errors() {
        let field_of = |cfg: RunConfig| match cfg.validate() {
            Err(ConfigError::Field { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        let base = RunConfig::default();
        assert_eq!(field_of(RunConfig { n: 4, ..base.clone() }), "n");
        assert_eq!(field_of(RunConfig { q: 1, ..base.clone() }), "q");
        assert_eq!(field_of(RunConfig { step_map: Some(1.0), ..base.clone() }), "step_map");
        assert_eq!(field_of(RunConfig { residual_tol: 0.0, ..base.clone() }), "residual_tol");
        assert_eq!(field_of(RunConfig { polar_radii: vec![], ..base.clone() }), "polar_radii");
        assert_eq!(field_of(RunConfig { eps_nested: vec![1.5], ..base.clone() }), "eps_nested");
        assert_eq!(field_of(RunConfig { grids: vec![32, 5], ..base.clone() }), "grids");
        let mut c = base.clone();
        c.constants.delta4 = -1.0;
        assert_eq!(field_of(c), "constants");
        let mut c = base.clone();
        c.gradient = Some(GradientEstimateConfig { a: 0.6, ..Default::default() });
        assert_eq!(field_of(c), "gradient");
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        let o = Overrides {
            grid: vec![32],
            seed_rng: Some(9),
            audits: Some(vec![AuditKind::Hopf]),
            tol: Some(1e-8),
            ..Default::default()
        };
        c.apply(&o, false).unwrap();
        assert_eq!((c.n, c.rng_seed, c.residual_tol), (32, 9, 1e-8));
        assert_eq!(c.audits, vec![AuditKind::Hopf]);
        let o = Overrides {
            grid: vec![16, 8],
            ..Default::default()
        };
        assert!(c.clone().apply(&o, false).is_err());
        c.apply(&o, true).unwrap();
        assert_eq!(c.grids, vec![16, 8]);
    }

    #[test]
    fn out_dir_precedence() {
        let c = RunConfig {
            out: Some("a".into()),
            ..Default::default()
        };
        assert_eq!(resolve_out_dir(&c), PathBuf::from("a"));
    }
}
