//! The four subcommands. Each one validates, computes, then writes every
//! output file at the end of the run.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use sigma_core::clifford::{weitzenboeck_residual, SpinorField};
use sigma_core::estimates::{
    bochner_audit, epsilon_regularity_probe, feasibility_scan, gradient_estimate_audit, hopf_audit,
    hopf_differential, kato_audit, maximizer_diagnostic, polar_identity_audit, AuditReport, EpsRegEntry, FeasibilityReport,
    Location, Table, CHECK_FRACTION,
};
use sigma_core::grid::{derivative, Axis, DiscRegion, Field, Grid2D};
use sigma_core::io;
use sigma_core::solver::{run_flow, seed, FlowConfig, SeedKind};
use sigma_core::sphere::{el_residuals, energy, project_spinor, MapField};
use sigma_core::LabError;

use crate::config::{resolve_out_dir, AuditKind, Family, RunConfig};
use crate::error::{CliError, ConfigError, EXIT_AUDIT_FAILURE, EXIT_NOT_CONVERGED, EXIT_OK};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Versions {
    pub sigma_lab: &'static str,
    pub sigma_core: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RngInfo {
    pub generator: &'static str,
    pub seed: u64,
}

/// Record of one run. Everything except `timings` is a deterministic
/// function of the configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RunConfig,
    pub versions: Versions,
    pub rng: RngInfo,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    /// Every file written to the output directory, this manifest included.
    pub files: Vec<String>,
    pub pass: bool,
    pub status: String,
    pub exit_code: i32,
    pub notes: Vec<String>,
}

/// Files of one run, held in memory until the end of the run.
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    timings: BTreeMap<String, f64>,
    notes: Vec<String>,
    clock: Instant,
}

impl Outputs {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            timings: BTreeMap::new(),
            notes: Vec::new(),
            clock: Instant::now(),
        }
    }

    /// Closes the current stage.
    fn lap(&mut self, stage: &str) {
        self.timings.insert(stage.to_string(), self.clock.elapsed().as_secs_f64());
        self.clock = Instant::now();
    }

    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("plain data serializes");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> sigma_core::Result<()>) -> Result<(), CliError> {
        let mut bytes = Vec::new();
        write(&mut bytes)?;
        self.add(name, bytes);
        Ok(())
    }

    fn finish(mut self, command: &str, cfg: &RunConfig, pass: bool, status: &str, exit_code: i32) -> Result<RunManifest, CliError> {
        let dir = resolve_out_dir(cfg);
        let mut files: Vec<String> = self.files.iter().map(|(n, _)| n.clone()).collect();
        files.push(MANIFEST.to_string());
        self.lap("write");
        let manifest = RunManifest {
            command: command.to_string(),
            config: cfg.clone(),
            versions: Versions {
                sigma_lab: env!("CARGO_PKG_VERSION"),
                sigma_core: sigma_core::VERSION,
            },
            rng: RngInfo {
                generator: "ChaCha8",
                seed: cfg.rng_seed,
            },
            timings: self.timings,
            files,
            pass,
            status: status.to_string(),
            exit_code,
            notes: self.notes,
        };
        let out_err = |path: &Path, e: std::io::Error| CliError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(&dir).map_err(|e| out_err(&dir, e))?;
        for (name, bytes) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, bytes).map_err(|e| out_err(&p, e))?;
        }
        let p = dir.join(MANIFEST);
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("plain data serializes");
        bytes.push(b'\n');
        std::fs::write(&p, bytes).map_err(|e| out_err(&p, e))?;
        Ok(manifest)
    }
}

type RatioGetter = fn(&EpsRegEntry) -> Option<f64>;

fn seed_fields(cfg: &RunConfig, grid: Grid2D) -> Result<(MapField, SpinorField), CliError> {
    seed(&cfg.seed, grid, cfg.q, cfg.rng_seed).map_err(|e| match e {
        LabError::InvalidSeed(m) => CliError::Config(ConfigError::Field {
            field: "seed".into(),
            message: m,
        }),
        e => CliError::Lab(e),
    })
}

#[derive(Serialize)]
struct FlowSummary {
    converged: bool,
    iterations: usize,
    step_map: f64,
    step_spinor: f64,
    residual_tol: f64,
    initial_energy: f64,
    final_energy: f64,
    residual_map_l2: f64,
    residual_spinor_l2: f64,
    residual_linf: f64,
}

/// Seed, flow, and write `phi.csv`, `psi.csv`, `trace.csv`, `energy.json`
/// and `flow.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let mut out = Outputs::new();
    let grid = cfg.grid()?;
    let (phi, psi) = seed_fields(cfg, grid)?;
    out.lap("seed");
    let flow = cfg.flow_config(grid.h());
    let outcome = run_flow(phi, psi, &flow)?;
    out.lap("flow");
    let res = el_residuals(&outcome.phi, &outcome.psi)?;
    let e = energy(&outcome.phi, &outcome.psi)?;
    let records = &outcome.trace.records;
    let summary = FlowSummary {
        converged: outcome.converged,
        iterations: outcome.iterations,
        step_map: flow.step_map,
        step_spinor: flow.step_spinor,
        residual_tol: flow.residual_tol,
        initial_energy: records.first().map_or(f64::NAN, |r| r.energy),
        final_energy: e.total,
        residual_map_l2: res.map_l2,
        residual_spinor_l2: res.spinor_l2,
        residual_linf: res.linf,
    };
    out.csv("phi.csv", |w| io::write_field_csv(outcome.phi.field(), w))?;
    out.csv("psi.csv", |w| io::write_spinor_csv(&outcome.psi, w))?;
    out.csv("trace.csv", |w| io::write_trace_csv(&outcome.trace, w))?;
    out.json("energy.json", &e);
    out.json("flow.json", &summary);
    if outcome.converged {
        out.finish("simulate", cfg, true, "ok", EXIT_OK)
    } else {
        out.notes.push(format!(
            "flow stopped after {} iterations with residual L2 ({:e}, {:e})",
            outcome.iterations, res.map_l2, res.spinor_l2
        ));
        out.finish("simulate", cfg, false, "not-converged", EXIT_NOT_CONVERGED)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl ErrorRecord {
    fn from_lab(e: &LabError) -> Self {
        let mut d = BTreeMap::new();
        let kind = match e {
            LabError::Infeasible { dtilde } => {
                d.insert("dtilde".into(), *dtilde);
                "infeasible"
            }
            LabError::RangeViolation { distance, radius, x, y } => {
                d.extend([("distance", *distance), ("radius", *radius), ("x", *x), ("y", *y)].map(|(k, v)| (k.into(), v)));
                "range-violation"
            }
            LabError::ResidualTooLarge { residual, limit } => {
                d.extend([("residual", *residual), ("limit", *limit)].map(|(k, v)| (k.into(), v)));
                "residual-too-large"
            }
            LabError::ChartBoundary { radius } => {
                d.insert("radius".into(), *radius);
                "chart-boundary"
            }
            LabError::InvalidConstants(_) => "invalid-constants",
            LabError::InvalidRegion(_) => "invalid-region",
            LabError::Mismatch(_) => "mismatch",
            LabError::ImaginaryPart { value, .. } => {
                d.insert("value".into(), *value);
                "imaginary-part"
            }
            _ => "other",
        };
        Self {
            kind: kind.into(),
            message: e.to_string(),
            details: d,
        }
    }
}

/// One line of `audits.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditEntry {
    pub name: String,
    pub pass: bool,
    pub worst_margin: Option<f64>,
    pub location: Option<Location>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

impl AuditEntry {
    fn from_report(r: &AuditReport) -> Self {
        Self {
            name: r.name.clone(),
            pass: r.pass,
            worst_margin: Some(r.worst_margin),
            location: Some(r.location),
            tolerance: Some(r.tolerance),
            metrics: r.metrics.clone(),
            error: None,
        }
    }

    fn failed(kind: AuditKind, e: &LabError) -> Self {
        Self {
            name: kind.name().into(),
            pass: false,
            worst_margin: None,
            location: None,
            tolerance: None,
            metrics: BTreeMap::new(),
            error: Some(ErrorRecord::from_lab(e)),
        }
    }
}

#[derive(Serialize)]
struct AuditFile<'a> {
    pass: bool,
    audits: &'a [AuditEntry],
}

fn margins_table(margins: &Field<f64>) -> Table {
    Table {
        header: vec!["x".into(), "y".into(), "margin".into()],
        rows: margins.grid().points().map(|(k, x, y)| vec![x, y, margins.value(k)]).collect(),
    }
}

/// Reads `phi.csv` and, if present, `psi.csv` from `dir`.
fn load_fields(dir: &Path) -> Result<(MapField, SpinorField), CliError> {
    let phi = io::load_map(&dir.join("phi.csv"))?;
    let psi_path = dir.join("psi.csv");
    let psi = if psi_path.exists() {
        io::load_spinor(&psi_path)?
    } else {
        SpinorField::zeros(*phi.grid(), phi.q())
    };
    phi.check_spinor(&psi)?;
    Ok((phi, psi))
}

/// Result of one audit: the `audits.json` entry plus its side files.
struct AuditRun {
    entry: AuditEntry,
    files: Vec<(String, Table)>,
    json: Option<(String, serde_json::Value)>,
}

fn run_one(kind: AuditKind, cfg: &RunConfig, phi: &MapField, psi: &SpinorField) -> Result<AuditRun, LabError> {
    let constants = sigma_core::estimates::EstimateConstants::new(cfg.constants)?;
    let margins_file = format!("margins_{}.csv", kind.name().replace('-', "_"));
    let with_margins = |r: AuditReport| {
        let files = r.margins.as_ref().map(|m| vec![(margins_file.clone(), margins_table(m))]).unwrap_or_default();
        AuditRun {
            entry: AuditEntry::from_report(&r),
            files,
            json: None,
        }
    };
    Ok(match kind {
        AuditKind::Kato => with_margins(kato_audit(phi, psi)?),
        AuditKind::Bochner => with_margins(bochner_audit(phi, psi, &constants, cfg.eps_res)?),
        AuditKind::GradientEstimate => with_margins(gradient_estimate_audit(phi, psi, &cfg.gradient_config(), &constants)?),
        AuditKind::Hopf => with_margins(hopf_audit(phi, psi)?),
        AuditKind::Polar => {
            let r = polar_identity_audit(phi, psi, cfg.polar_center, &cfg.polar_radii, cfg.residual_tol)?;
            let files = r.table.clone().map(|t| vec![("polar.csv".to_string(), t)]).unwrap_or_default();
            AuditRun {
                entry: AuditEntry::from_report(&r),
                files,
                json: None,
            }
        }
        AuditKind::EpsRegularity => {
            let disc = DiscRegion::new(cfg.eps_center, cfg.eps_radius)?;
            let rep = epsilon_regularity_probe(phi, psi, &disc, &cfg.eps_nested)?;
            let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
            let table = Table {
                header: ["shrink", "radius", "sup_dphi", "ratio1", "ratio2"].map(String::from).to_vec(),
                rows: rep
                    .entries
                    .iter()
                    .map(|e| vec![e.shrink, e.radius, e.sup_dphi, nan(e.ratio1), nan(e.ratio2)])
                    .collect(),
            };
            // probe only: bounded ratios are reported, not judged
            let mut report = AuditReport::new("eps-regularity", 0.0, Location::Radius { r: rep.radius }, 0.0)
                .with_metric("energy", rep.energy)
                .with_metric("dphi_l2", rep.dphi_l2)
                .with_metric("psi_l4_sq", rep.psi_l4_sq);
            let ratios: [(&str, RatioGetter); 2] =
                [("max_ratio1", |e| e.ratio1), ("max_ratio2", |e| e.ratio2)];
            for (key, get) in ratios {
                if let Some(v) = rep.entries.iter().filter_map(get).reduce(f64::max) {
                    report = report.with_metric(key, v);
                }
            }
            AuditRun {
                entry: AuditEntry::from_report(&report),
                files: vec![("eps_regularity.csv".into(), table)],
                json: None,
            }
        }
        AuditKind::Maximizer => {
            let g = cfg.gradient_config();
            let m = maximizer_diagnostic(phi, psi, &g, &constants)?;
            // informational: the margin is the distance of the argmax to the
            // unchecked outer ring
            let loc = m.point.map_or(Location::Nowhere {}, |(x, y)| Location::Point { x, y });
            let report = AuditReport::new("maximizer", CHECK_FRACTION * g.a - m.r, loc, 0.0)
                .with_metric("value", m.value)
                .with_metric("r", m.r)
                .with_metric("edge_value", m.edge_value)
                .with_metric("degenerate", m.degenerate as u8 as f64);
            let mut entry = AuditEntry::from_report(&report);
            entry.pass = m.degenerate || m.interior;
            AuditRun {
                entry,
                files: Vec::new(),
                json: None,
            }
        }
        AuditKind::FeasibilityScan => {
            let rep = feasibility_scan(&cfg.feasibility)?;
            AuditRun {
                entry: feasibility_entry(&rep),
                files: Vec::new(),
                json: Some(("feasibility.json".into(), serde_json::to_value(&rep).expect("plain data"))),
            }
        }
    })
}

fn feasibility_entry(rep: &FeasibilityReport) -> AuditEntry {
    let margin = rep.closest.map_or(f64::NEG_INFINITY, |t| t.margin);
    let mut r = AuditReport::new("feasibility-scan", margin, Location::Nowhere {}, 0.0)
        .with_metric("tuples_checked", rep.tuples_checked as f64)
        .with_metric("feasible_count", rep.feasible_count as f64);
    r.pass = rep.any_feasible();
    AuditEntry::from_report(&r)
}

/// Runs the selected audits on fields read from `cfg.fields` or, without
/// it, on the configured seed; writes `audits.json` plus per-audit CSVs.
pub fn cmd_audit(cfg: &RunConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let mut out = Outputs::new();
    let (phi, psi) = match &cfg.fields {
        Some(dir) => {
            let (phi, psi) = load_fields(dir)?;
            if phi.grid().n() != cfg.n || phi.q() != cfg.q {
                out.notes.push(format!(
                    "fields are n = {}, q = {}; config values n = {}, q = {} ignored",
                    phi.grid().n(),
                    phi.q(),
                    cfg.n,
                    cfg.q
                ));
            }
            (phi, psi)
        }
        None => seed_fields(cfg, cfg.grid()?)?,
    };
    out.lap("load");
    let mut kinds: Vec<AuditKind> = Vec::new();
    for &k in &cfg.audits {
        if kinds.contains(&k) {
            out.notes.push(format!("audit {} listed twice, run once", k.name()));
        } else {
            kinds.push(k);
        }
    }
    let mut entries = Vec::new();
    for kind in kinds {
        match run_one(kind, cfg, &phi, &psi) {
            Ok(run) => {
                for (name, table) in &run.files {
                    out.csv(name, |w| io::write_table_csv(table, w))?;
                }
                if let Some((name, v)) = &run.json {
                    out.json(name, v);
                }
                entries.push(run.entry);
            }
            Err(e) => entries.push(AuditEntry::failed(kind, &e)),
        }
        out.lap(kind.name());
    }
    let pass = entries.iter().all(|e| e.pass);
    out.json("audits.json", &AuditFile { pass, audits: &entries });
    if pass {
        out.finish("audit", cfg, true, "ok", EXIT_OK)
    } else {
        out.finish("audit", cfg, false, "audit-failure", EXIT_AUDIT_FAILURE)
    }
}

/// Per-family refinement data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyTable {
    pub family: String,
    pub grids: Vec<usize>,
    pub errors: Vec<f64>,
    /// `None` on the first row.
    pub orders: Vec<Option<f64>>,
    /// Least-squares slope of `-log error` against `log n`; needs two grids.
    pub fitted_order: Option<f64>,
}

fn pair_orders(grids: &[usize], errors: &[f64]) -> Vec<Option<f64>> {
    (0..grids.len())
        .map(|i| {
            (i > 0).then(|| (errors[i - 1] / errors[i]).ln() / (grids[i] as f64 / grids[i - 1] as f64).ln())
        })
        .collect()
}

fn fitted_order(grids: &[usize], errors: &[f64]) -> Option<f64> {
    if grids.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = grids.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(num / den)
}

/// Analytic pair with nonzero Weitzenboeck curvature term.
fn weitzenboeck_error(g: Grid2D, q: usize) -> Result<f64, LabError> {
    let phi = MapField::retract(Field::from_fn(g, q, |x, y, o| {
        let (a, b) = (2.0 * PI * x, 2.0 * PI * y);
        o[0] = a.cos();
        o[1] = a.sin();
        o[2] = 0.5 * b.sin();
    }))?;
    let raw = SpinorField::from_fn(g, q, |x, y, o| {
        for (m, z) in o.iter_mut().enumerate() {
            let t = 0.4 * m as f64;
            *z = Complex64::new((2.0 * PI * x + t).cos(), (2.0 * PI * y - t).sin());
        }
    });
    Ok(weitzenboeck_residual(&phi, &project_spinor(&phi, &raw))?.residual_linf)
}

fn derivative_error(g: Grid2D) -> f64 {
    let f = Field::scalar_from_fn(g, |x, y| (2.0 * PI * x).sin() * (4.0 * PI * y).cos());
    let exact = Field::scalar_from_fn(g, |x, y| 2.0 * PI * (2.0 * PI * x).cos() * (4.0 * PI * y).cos());
    derivative(&f, Axis::X).sub(&exact).norm_linf()
}

/// Hopf defect of the equivariant solution relaxed on `g` with steps at
/// their bounds; `None` when the flow did not reach the tolerance.
fn hopf_error(cfg: &RunConfig, g: Grid2D) -> Result<Option<f64>, CliError> {
    let (phi, psi) = seed(&SeedKind::Equivariant { k: 1 }, g, cfg.q, cfg.rng_seed)?;
    let flow = FlowConfig::at_bounds(g.h(), cfg.max_iters, cfg.residual_tol);
    let out = run_flow(phi, psi, &flow)?;
    if !out.converged {
        return Ok(None);
    }
    Ok(Some(hopf_differential(&out.phi, &out.psi)?.defect_l2))
}

/// Runs the refinement families over `cfg.grids` (sorted, deduplicated)
/// and writes `convergence.csv` and `convergence.json`.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let mut out = Outputs::new();
    let mut grids = cfg.grids.clone();
    grids.sort_unstable();
    grids.dedup();
    if grids != cfg.grids {
        out.notes.push(format!("grid list {:?} sorted and deduplicated to {grids:?}", cfg.grids));
    }
    let mut tables = Vec::new();
    let mut converged = true;
    for &fam in &cfg.families {
        let mut errors = Vec::new();
        for &n in &grids {
            let g = Grid2D::new(n)?;
            let e = match fam {
                Family::Weitzenboeck => weitzenboeck_error(g, cfg.q)?,
                Family::Derivative => derivative_error(g),
                Family::Hopf => match hopf_error(cfg, g)? {
                    Some(e) => e,
                    None => {
                        converged = false;
                        out.notes.push(format!("hopf family: flow not converged on n = {n}"));
                        f64::NAN
                    }
                },
            };
            errors.push(e);
        }
        out.lap(fam.name());
        tables.push(FamilyTable {
            family: fam.name().into(),
            orders: pair_orders(&grids, &errors),
            fitted_order: fitted_order(&grids, &errors),
            grids: grids.clone(),
            errors,
        });
    }
    let mut text = String::from("family,n,error,order\n");
    for t in &tables {
        for ((n, e), o) in t.grids.iter().zip(&t.errors).zip(&t.orders) {
            let order = o.map_or("NA".to_string(), |o| format!("{o:.16e}"));
            text.push_str(&format!("{},{n},{e:.16e},{order}\n", t.family));
        }
    }
    out.add("convergence.csv", text.into_bytes());
    out.json("convergence.json", &tables);
    if converged {
        out.finish("convergence", cfg, true, "ok", EXIT_OK)
    } else {
        out.finish("convergence", cfg, false, "not-converged", EXIT_NOT_CONVERGED)
    }
}

/// Writes `feasibility.json`; the run fails when no scanned tuple is
/// feasible.
pub fn cmd_feasibility_scan(cfg: &RunConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let mut out = Outputs::new();
    let rep = feasibility_scan(&cfg.feasibility)?;
    out.lap("scan");
    out.json("feasibility.json", &rep);
    if rep.any_feasible() {
        out.finish("feasibility-scan", cfg, true, "ok", EXIT_OK)
    } else {
        out.notes.push(format!("none of {} tuples is feasible", rep.tuples_checked));
        out.finish("feasibility-scan", cfg, false, "infeasible", EXIT_AUDIT_FAILURE)
    }
}
