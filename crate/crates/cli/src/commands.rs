//! Subcommand bodies. Each returns the serialized result plus an exit code.

use std::f64::consts::PI;

use lattice_guide_core::{
    decay_rate, dispersion_roots_with, f_beta_2d, fd_residual, find_gaps, find_guided_modes,
    mode_profile, oracle_eigenfrequencies, sigma_points, w_points, BandScan, Error, GuidedMode,
    LatticeField, LatticeParams, SpectralGap,
};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::RunConfig;
use crate::output::{cell, cell_list, cell_opt, num, num_opt, nums, obj, Table};

/// Radius of the profile behind the `residual` column when `--profile` is absent.
pub const RESIDUAL_K: usize = 20;
pub const ORACLE_GRID: usize = 400;
pub const DISPERSION_GRID: usize = 16;
pub const FD_RESIDUAL_TOL: f64 = 1e-6;
pub const OUTER_RING_TOL: f64 = 1e-6;
pub const QUADRATURE_TOL: f64 = 1e-8;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CLASSIFICATION: i32 = 3;
pub const EXIT_GAP_INDEX: i32 = 4;
pub const EXIT_BANDS: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

const MODE_HEADER: [&str; 9] = [
    "beta",
    "gap_index",
    "gap_type",
    "omega_b",
    "omega_t",
    "mode_omega",
    "mode_lambda",
    "F_value",
    "residual",
];

pub struct Outcome {
    pub json: Value,
    pub table: Table,
    pub code: i32,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn ok(json: Value, table: Table) -> Self {
        Self {
            json,
            table,
            code: 0,
            diagnostics: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
    pub payload: Option<Value>,
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::ClassificationViolation {
                omega_b,
                omega_t,
                edge_b,
                edge_t,
                w_count,
            } => CmdError {
                code: EXIT_CLASSIFICATION,
                message,
                payload: Some(obj([
                    ("error", Value::from("ClassificationViolation")),
                    ("omega_b", num(omega_b)),
                    ("omega_t", num(omega_t)),
                    ("edge_flags", Value::from(vec![edge_b, edge_t])),
                    ("w_count", Value::from(w_count)),
                ])),
            },
            Error::NonPositiveParameter { .. }
            | Error::NonFinite { .. }
            | Error::EmptyWindow { .. } => CmdError {
                code: EXIT_CONFIG,
                message,
                payload: None,
            },
            _ => CmdError {
                code: EXIT_OTHER,
                message,
                payload: None,
            },
        }
    }
}

fn config_error(message: String) -> CmdError {
    CmdError {
        code: EXIT_CONFIG,
        message,
        payload: None,
    }
}

fn params_json(p: &LatticeParams, with_beta: bool) -> Value {
    let mut v = obj([
        ("a1", num(p.a1())),
        ("a2", num(p.a2())),
        ("a3", num(p.a3())),
        ("mu", num(p.mu())),
    ]);
    if with_beta {
        v.as_object_mut()
            .expect("object")
            .insert("beta".into(), num(p.beta()));
    }
    v
}

fn window_json(cfg: &RunConfig) -> Value {
    obj([
        ("omega_min", num(cfg.window.lo())),
        ("omega_max", num(cfg.window.hi())),
    ])
}

fn gap_json(g: &SpectralGap) -> Value {
    obj([
        ("index", Value::from(g.index)),
        ("gap_type", Value::from(g.gap_type.label())),
        ("omega_b", num(g.omega_b)),
        ("omega_t", num(g.omega_t)),
        ("lambda_b", num(g.lambda_b())),
        ("lambda_t", num(g.lambda_t())),
        ("omega0", num_opt(g.omega0())),
        (
            "edge_flags",
            Value::from(vec![g.edge_flags.0, g.edge_flags.1]),
        ),
        ("w_inside", nums(&g.w_inside)),
    ])
}

fn field_json(f: &LatticeField) -> Value {
    let side = f.side();
    let rows: Vec<Value> = f.values().chunks(side).map(nums).collect();
    obj([
        ("K", Value::from(f.radius())),
        ("u00", num(f.center())),
        ("values", Value::Array(rows)),
    ])
}

fn scan(cfg: &RunConfig, p: &LatticeParams) -> Result<BandScan, CmdError> {
    Ok(find_gaps(p, &cfg.window, cfg.resolution)?)
}

fn select_gaps(cfg: &RunConfig, scan: &BandScan) -> Result<Vec<SpectralGap>, CmdError> {
    match cfg.gap {
        None => Ok(scan.gaps.clone()),
        Some(i) => scan
            .gaps
            .iter()
            .find(|g| g.index == i)
            .map(|g| vec![g.clone()])
            .ok_or_else(|| CmdError {
                code: EXIT_GAP_INDEX,
                message: format!(
                    "gap index {i} does not exist ({} gap(s) in the window)",
                    scan.gaps.len()
                ),
                payload: None,
            }),
    }
}

pub fn gaps(cfg: &RunConfig) -> Result<Outcome, CmdError> {
    let p = &cfg.params;
    let scan = scan(cfg, p)?;
    let sigma = sigma_points(p, &cfg.window);
    let w = w_points(p, &cfg.window);
    let intervals = |v: &[lattice_guide_core::Interval]| {
        Value::Array(
            v.iter()
                .map(|b| {
                    obj([
                        ("omega_lo", num(b.lo)),
                        ("omega_hi", num(b.hi)),
                        ("lambda_lo", num(b.lo * b.lo)),
                        ("lambda_hi", num(b.hi * b.hi)),
                    ])
                })
                .collect(),
        )
    };
    let json = obj([
        ("command", Value::from("gaps")),
        ("params", params_json(p, true)),
        ("window", window_json(cfg)),
        ("resolution", num(scan.resolution)),
        ("bands", intervals(&scan.bands)),
        (
            "gaps",
            Value::Array(scan.gaps.iter().map(gap_json).collect()),
        ),
        (
            "embedded_points",
            Value::Array(
                scan.embedded_points
                    .iter()
                    .map(|&x| obj([("omega", num(x)), ("lambda", num(x * x))]))
                    .collect(),
            ),
        ),
        ("truncated", intervals(&scan.truncated)),
        (
            "sigma_points",
            obj([
                ("sigma1", nums(&sigma.sigma1)),
                ("sigma2", nums(&sigma.sigma2)),
                ("sigma3", nums(&sigma.sigma3)),
            ]),
        ),
        ("w_points", nums(&w)),
    ]);
    let mut table = Table::new(&[
        "beta",
        "gap_index",
        "gap_type",
        "omega_b",
        "omega_t",
        "lambda_b",
        "lambda_t",
        "w_inside",
    ]);
    for g in &scan.gaps {
        table.push(vec![
            cell(p.beta()),
            g.index.to_string(),
            g.gap_type.label().into(),
            cell(g.omega_b),
            cell(g.omega_t),
            cell(g.lambda_b()),
            cell(g.lambda_t()),
            cell_list(&g.w_inside),
        ]);
    }
    Ok(Outcome::ok(json, table))
}

struct ModeRecord {
    gap: SpectralGap,
    mode: GuidedMode,
    residual: Result<f64, String>,
    profile: Option<(LatticeField, Result<f64, String>)>,
}

fn profile_and_residual(
    mode: &GuidedMode,
    p: &LatticeParams,
    k: usize,
) -> Result<(LatticeField, f64), String> {
    let field = mode_profile(mode, p, k).map_err(|e| e.to_string())?;
    let r = fd_residual(&field, mode.omega, p).map_err(|e| e.to_string())?;
    Ok((field, r))
}

pub fn eigen(cfg: &RunConfig) -> Result<Outcome, CmdError> {
    let p = &cfg.params;
    let scan = scan(cfg, p)?;
    let selected = select_gaps(cfg, &scan)?;
    let mut pairs = Vec::new();
    for g in &selected {
        for m in find_guided_modes(p, g)? {
            pairs.push((g.clone(), m));
        }
    }
    let records: Vec<ModeRecord> = pairs
        .into_par_iter()
        .map(|(gap, mode)| {
            let k = cfg.profile.unwrap_or(RESIDUAL_K);
            match profile_and_residual(&mode, p, k) {
                Ok((field, r)) => {
                    let profile = cfg.profile.map(|_| {
                        let rho = decay_rate(&field).map_err(|e| e.to_string());
                        (field, rho)
                    });
                    ModeRecord {
                        gap,
                        mode,
                        residual: Ok(r),
                        profile,
                    }
                }
                Err(e) => ModeRecord {
                    gap,
                    mode,
                    residual: Err(e.clone()),
                    profile: None,
                },
            }
        })
        .collect();

    let mut header = MODE_HEADER.to_vec();
    header.push("decay_rate");
    let mut table = Table::new(&header);
    let mut diagnostics = Vec::new();
    let mut modes = Vec::new();
    for r in &records {
        let rho = r
            .profile
            .as_ref()
            .and_then(|(_, rho)| rho.as_ref().ok().copied());
        let mut errors: Vec<String> = Vec::new();
        if let Err(e) = &r.residual {
            errors.push(format!("residual: {e}"));
        }
        if let Some((_, Err(e))) = &r.profile {
            errors.push(format!("decay_rate: {e}"));
        }
        for e in &errors {
            diagnostics.push(format!("mode at omega = {}: {e}", r.mode.omega));
        }
        modes.push(obj([
            ("gap_index", Value::from(r.gap.index)),
            ("gap_type", Value::from(r.gap.gap_type.label())),
            ("omega_b", num(r.gap.omega_b)),
            ("omega_t", num(r.gap.omega_t)),
            ("omega", num(r.mode.omega)),
            ("lambda", num(r.mode.lambda)),
            ("F_value", num(r.mode.f_value)),
            ("near_coincident", Value::from(r.mode.near_coincident)),
            ("residual", num_opt(r.residual.as_ref().ok().copied())),
            ("residual_K", Value::from(cfg.profile.unwrap_or(RESIDUAL_K))),
            ("decay_rate", num_opt(rho)),
            (
                "profile",
                r.profile
                    .as_ref()
                    .map_or(Value::Null, |(f, _)| field_json(f)),
            ),
            (
                "errors",
                Value::Array(errors.into_iter().map(Value::from).collect()),
            ),
        ]));
        table.push(vec![
            cell(p.beta()),
            r.gap.index.to_string(),
            r.gap.gap_type.label().into(),
            cell(r.gap.omega_b),
            cell(r.gap.omega_t),
            cell(r.mode.omega),
            cell(r.mode.lambda),
            cell(r.mode.f_value),
            cell_opt(r.residual.as_ref().ok().copied()),
            cell_opt(rho),
        ]);
    }
    let json = obj([
        ("command", Value::from("eigen")),
        ("params", params_json(p, true)),
        ("window", window_json(cfg)),
        ("modes", Value::Array(modes)),
    ]);
    Ok(Outcome {
        json,
        table,
        code: 0,
        diagnostics,
    })
}

struct BandRow {
    beta: f64,
    scan: Option<BandScan>,
    modes: Vec<Vec<GuidedMode>>,
    errors: Vec<String>,
}

fn band_row(cfg: &RunConfig, beta: f64) -> BandRow {
    let mut row = BandRow {
        beta,
        scan: None,
        modes: Vec::new(),
        errors: Vec::new(),
    };
    let p = match cfg.params.with_beta(beta) {
        Ok(p) => p,
        Err(e) => {
            row.errors.push(e.to_string());
            return row;
        }
    };
    let scan = match find_gaps(&p, &cfg.window, cfg.resolution) {
        Ok(s) => s,
        Err(e) => {
            row.errors.push(e.to_string());
            return row;
        }
    };
    for g in &scan.gaps {
        match find_guided_modes(&p, g) {
            Ok(m) => row.modes.push(m),
            Err(e) => {
                row.errors.push(format!("gap {}: {e}", g.index));
                row.modes.push(Vec::new());
            }
        }
    }
    row.scan = Some(scan);
    row
}

pub fn bands(cfg: &RunConfig) -> Result<Outcome, CmdError> {
    let n = cfg.beta_samples;
    if n < 2 {
        return Err(config_error(format!(
            "beta_samples must be at least 2, got {n}"
        )));
    }
    let betas: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                PI
            } else {
                PI * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let rows: Vec<BandRow> = betas.par_iter().map(|&b| band_row(cfg, b)).collect();

    let mut header = MODE_HEADER.to_vec();
    header.push("errors");
    let mut table = Table::new(&header);
    let mut json_rows = Vec::new();
    let mut failed = 0;
    for row in &rows {
        if !row.errors.is_empty() {
            failed += 1;
        }
        let errors = row.errors.join("; ");
        let empty = || vec![String::new(); 4];
        let mut gaps_json = Vec::new();
        let mut pushed = false;
        if let Some(scan) = &row.scan {
            for (g, modes) in scan.gaps.iter().zip(&row.modes) {
                let lead = vec![
                    cell(row.beta),
                    g.index.to_string(),
                    g.gap_type.label().to_string(),
                    cell(g.omega_b),
                    cell(g.omega_t),
                ];
                if modes.is_empty() {
                    let mut r = lead.clone();
                    r.extend(empty());
                    r.push(errors.clone());
                    table.push(r);
                }
                for m in modes {
                    let mut r = lead.clone();
                    r.extend([
                        cell(m.omega),
                        cell(m.lambda),
                        cell(m.f_value),
                        String::new(),
                    ]);
                    r.push(errors.clone());
                    table.push(r);
                }
                pushed = true;
                gaps_json.push(obj([
                    ("index", Value::from(g.index)),
                    ("gap_type", Value::from(g.gap_type.label())),
                    ("omega_b", num(g.omega_b)),
                    ("omega_t", num(g.omega_t)),
                    (
                        "modes",
                        Value::Array(
                            modes
                                .iter()
                                .map(|m| {
                                    obj([
                                        ("omega", num(m.omega)),
                                        ("lambda", num(m.lambda)),
                                        ("F_value", num(m.f_value)),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                ]));
            }
        }
        if !pushed {
            let mut r = vec![cell(row.beta)];
            r.extend(vec![String::new(); 4]);
            r.extend(empty());
            r.push(errors.clone());
            table.push(r);
        }
        let band_edges = row.scan.as_ref().map_or(Vec::new(), |s| {
            s.bands.iter().map(|b| nums(&[b.lo, b.hi])).collect()
        });
        json_rows.push(obj([
            ("beta", num(row.beta)),
            ("bands", Value::Array(band_edges)),
            ("gaps", Value::Array(gaps_json)),
            (
                "errors",
                Value::Array(row.errors.iter().map(|e| Value::from(e.as_str())).collect()),
            ),
        ]));
    }
    let json = obj([
        ("command", Value::from("bands")),
        ("params", params_json(&cfg.params, false)),
        ("window", window_json(cfg)),
        ("beta_samples", Value::from(n)),
        ("rows", Value::Array(json_rows)),
        ("failed_rows", Value::from(failed)),
    ]);
    let mut out = Outcome::ok(json, table);
    for row in rows.iter().filter(|r| !r.errors.is_empty()) {
        out.diagnostics
            .push(format!("beta = {}: {}", row.beta, row.errors.join("; ")));
    }
    // At least 90% of the rows must succeed.
    if 10 * (n - failed) < 9 * n {
        out.code = EXIT_BANDS;
        out.diagnostics
            .push(format!("{failed} of {n} beta rows failed"));
    }
    Ok(out)
}

pub fn dispersion(cfg: &RunConfig) -> Result<Outcome, CmdError> {
    let p = &cfg.params;
    let points: Vec<(f64, f64)> = match (cfg.xi, cfg.eta) {
        (Some(x), Some(e)) => vec![(x, e)],
        (None, None) => {
            let n = cfg.grid.unwrap_or(DISPERSION_GRID);
            if n == 0 {
                return Err(config_error("dispersion grid must be at least 1".into()));
            }
            let step = 2.0 * PI / n as f64;
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (step * i as f64, step * j as f64)))
                .collect()
        }
        _ => return Err(config_error("--xi and --eta must be given together".into())),
    };
    let rows: Vec<_> = points
        .par_iter()
        .map(|&(xi, eta)| dispersion_roots_with(xi, eta, p, &cfg.window, cfg.resolution, 1e-10))
        .collect();
    let mut table = Table::new(&["xi", "eta", "roots", "degenerate"]);
    let mut json_rows = Vec::new();
    for (&(xi, eta), roots) in points.iter().zip(&rows) {
        let regular: Vec<f64> = roots
            .iter()
            .filter(|r| !r.degenerate)
            .map(|r| r.omega)
            .collect();
        let degenerate: Vec<f64> = roots
            .iter()
            .filter(|r| r.degenerate)
            .map(|r| r.omega)
            .collect();
        table.push(vec![
            cell(xi),
            cell(eta),
            cell_list(&regular),
            cell_list(&degenerate),
        ]);
        json_rows.push(obj([
            ("xi", num(xi)),
            ("eta", num(eta)),
            ("roots", nums(&regular)),
            ("degenerate", nums(&degenerate)),
        ]));
    }
    let json = obj([
        ("command", Value::from("dispersion")),
        ("params", params_json(p, true)),
        ("window", window_json(cfg)),
        ("rows", Value::Array(json_rows)),
    ]);
    Ok(Outcome::ok(json, table))
}

struct Check {
    gap: SpectralGap,
    mode: GuidedMode,
    oracle_omega: Option<f64>,
    delta_omega: Option<f64>,
    fd_residual: Option<f64>,
    outer_ring_fraction: Option<f64>,
    decay_rate: Option<f64>,
    f_2d: Option<f64>,
    quadrature_gap: Option<f64>,
    failures: Vec<String>,
}

fn verify_mode(
    cfg: &RunConfig,
    gap: &SpectralGap,
    mode: &GuidedMode,
    oracle: &Result<Vec<f64>, String>,
) -> Check {
    let p = &cfg.params;
    let mut c = Check {
        gap: gap.clone(),
        mode: mode.clone(),
        oracle_omega: None,
        delta_omega: None,
        fd_residual: None,
        outer_ring_fraction: None,
        decay_rate: None,
        f_2d: None,
        quadrature_gap: None,
        failures: Vec::new(),
    };
    match oracle {
        Ok(found) => {
            let nearest = found
                .iter()
                .copied()
                .min_by(|a, b| (a - mode.omega).abs().total_cmp(&(b - mode.omega).abs()));
            match nearest {
                Some(w) => {
                    let d = (w - mode.omega).abs();
                    c.oracle_omega = Some(w);
                    c.delta_omega = Some(d);
                    if d > cfg.verify_tol {
                        c.failures
                            .push(format!("delta_omega = {d:e} exceeds {:e}", cfg.verify_tol));
                    }
                }
                None => c.failures.push(format!(
                    "delta_omega: oracle found no eigenfrequency at K = {}",
                    cfg.k
                )),
            }
        }
        Err(e) => c.failures.push(format!("delta_omega: oracle failed: {e}")),
    }
    match mode_profile(mode, p, cfg.k) {
        Ok(field) => {
            match fd_residual(&field, mode.omega, p) {
                Ok(r) => {
                    c.fd_residual = Some(r);
                    if !(r <= FD_RESIDUAL_TOL) {
                        c.failures
                            .push(format!("fd_residual = {r:e} exceeds {FD_RESIDUAL_TOL:e}"));
                    }
                }
                Err(e) => c.failures.push(format!("fd_residual: {e}")),
            }
            let outer = field.outer_ring_fraction();
            c.outer_ring_fraction = Some(outer);
            if !(outer < OUTER_RING_TOL) {
                c.failures.push(format!(
                    "outer_ring_fraction = {outer:e} is not below {OUTER_RING_TOL:e}: profile truncated at K = {}",
                    cfg.k
                ));
            }
            match decay_rate(&field) {
                Ok(rho) => {
                    c.decay_rate = Some(rho);
                    if !(rho < 1.0) {
                        c.failures
                            .push(format!("decay_rate = {rho:e} is not below 1"));
                    }
                }
                Err(e) => c.failures.push(format!("decay_rate: {e}")),
            }
        }
        Err(e) => c.failures.push(format!("profile: {e}")),
    }
    match f_beta_2d(mode.omega, p) {
        Ok(f2) => {
            let d = (mode.f_value - f2).abs() / mode.f_value.abs().max(1.0);
            c.f_2d = Some(f2);
            c.quadrature_gap = Some(d);
            if !(d <= QUADRATURE_TOL) {
                c.failures
                    .push(format!("quadrature_gap = {d:e} exceeds {QUADRATURE_TOL:e}"));
            }
        }
        Err(e) => c.failures.push(format!("quadrature_gap: {e}")),
    }
    c
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CmdError> {
    let p = &cfg.params;
    let grid = cfg.grid.unwrap_or(ORACLE_GRID);
    if grid < 100 {
        return Err(config_error(format!(
            "oracle grid must be at least 100, got {grid}"
        )));
    }
    let scan = scan(cfg, p)?;
    let selected = select_gaps(cfg, &scan)?;
    let mut checks = Vec::new();
    for g in &selected {
        let modes = find_guided_modes(p, g)?;
        if modes.is_empty() {
            continue;
        }
        let oracle = oracle_eigenfrequencies(p, g, cfg.k, grid).map_err(|e| e.to_string());
        for m in &modes {
            checks.push(verify_mode(cfg, g, m, &oracle));
        }
    }
    let passed = checks.iter().all(|c| c.failures.is_empty());
    let note = checks.is_empty().then_some("no modes, nothing to verify");

    let mut header = MODE_HEADER.to_vec();
    header.extend([
        "oracle_omega",
        "delta_omega",
        "outer_ring_fraction",
        "decay_rate",
        "F_2d",
        "quadrature_gap",
        "failures",
    ]);
    let mut table = Table::new(&header);
    let mut json_checks = Vec::new();
    let mut diagnostics = Vec::new();
    for c in &checks {
        for f in &c.failures {
            diagnostics.push(format!(
                "gap {} mode at omega = {}: {f}",
                c.gap.index, c.mode.omega
            ));
        }
        table.push(vec![
            cell(p.beta()),
            c.gap.index.to_string(),
            c.gap.gap_type.label().into(),
            cell(c.gap.omega_b),
            cell(c.gap.omega_t),
            cell(c.mode.omega),
            cell(c.mode.lambda),
            cell(c.mode.f_value),
            cell_opt(c.fd_residual),
            cell_opt(c.oracle_omega),
            cell_opt(c.delta_omega),
            cell_opt(c.outer_ring_fraction),
            cell_opt(c.decay_rate),
            cell_opt(c.f_2d),
            cell_opt(c.quadrature_gap),
            c.failures.join("; "),
        ]);
        json_checks.push(obj([
            ("gap_index", Value::from(c.gap.index)),
            ("gap_type", Value::from(c.gap.gap_type.label())),
            ("omega_b", num(c.gap.omega_b)),
            ("omega_t", num(c.gap.omega_t)),
            ("mode_omega", num(c.mode.omega)),
            ("mode_lambda", num(c.mode.lambda)),
            ("F_value", num(c.mode.f_value)),
            ("oracle_omega", num_opt(c.oracle_omega)),
            ("delta_omega", num_opt(c.delta_omega)),
            ("fd_residual", num_opt(c.fd_residual)),
            ("outer_ring_fraction", num_opt(c.outer_ring_fraction)),
            ("decay_rate", num_opt(c.decay_rate)),
            ("F_2d", num_opt(c.f_2d)),
            ("quadrature_gap", num_opt(c.quadrature_gap)),
            ("passed", Value::from(c.failures.is_empty())),
            (
                "failures",
                Value::Array(c.failures.iter().map(|f| Value::from(f.as_str())).collect()),
            ),
        ]));
    }
    if let Some(n) = note {
        diagnostics.push(n.to_string());
    }
    let json = obj([
        ("command", Value::from("verify")),
        ("params", params_json(p, true)),
        ("window", window_json(cfg)),
        ("K", Value::from(cfg.k)),
        ("grid", Value::from(grid)),
        (
            "tolerances",
            obj([
                ("delta_omega", num(cfg.verify_tol)),
                ("fd_residual", num(FD_RESIDUAL_TOL)),
                ("outer_ring_fraction", num(OUTER_RING_TOL)),
                ("quadrature_gap", num(QUADRATURE_TOL)),
            ]),
        ),
        ("checks", Value::Array(json_checks)),
        ("passed", Value::from(passed)),
        ("note", note.map_or(Value::Null, Value::from)),
    ]);
    Ok(Outcome {
        json,
        table,
        code: if passed { 0 } else { EXIT_VERIFY },
        diagnostics,
    })
}
