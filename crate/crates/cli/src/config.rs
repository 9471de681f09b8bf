//! Run configuration: built-in defaults, a `key = value` file, then flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lattice_guide_core::{default_resolution, FrequencyWindow, LatticeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Edge lengths a1,a2,a3.
    #[arg(long, global = true, value_name = "A1,A2,A3")]
    pub a: Option<String>,
    /// Quasi-momentum along the defect line, in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Defect weight.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Lower end of the frequency window (exclusive).
    #[arg(long = "omega-min", global = true, allow_hyphen_values = true)]
    pub omega_min: Option<f64>,
    /// Upper end of the frequency window.
    #[arg(long = "omega-max", global = true, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    /// Band-scan resolution in omega.
    #[arg(long, global = true)]
    pub resolution: Option<f64>,
    /// Restrict to one gap index.
    #[arg(long, global = true)]
    pub gap: Option<usize>,
    /// Attach mode profiles of this radius.
    #[arg(long, global = true, value_name = "K")]
    pub profile: Option<usize>,
    /// Truncation radius of the lattice oracle.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    /// Oracle scan points per gap; (xi, eta) points per axis for `dispersion`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Number of beta samples in [0, pi] for `bands`.
    #[arg(long = "beta-samples", global = true)]
    pub beta_samples: Option<usize>,
    /// Single xi for `dispersion`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Single eta for `dispersion`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: LatticeParams,
    pub window: FrequencyWindow,
    pub resolution: f64,
    pub verify_tol: f64,
    pub gap: Option<usize>,
    pub profile: Option<usize>,
    pub k: usize,
    pub grid: Option<usize>,
    pub beta_samples: usize,
    pub xi: Option<f64>,
    pub eta: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_A: [f64; 3] = [1.0, 1.0, 2.0];
pub const DEFAULT_MU: f64 = 0.5;
pub const DEFAULT_K: usize = 40;
pub const DEFAULT_BETA_SAMPLES: usize = 33;
pub const DEFAULT_VERIFY_TOL: f64 = 1e-3;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn parse_triple(s: &str) -> Result<[f64; 3], ConfigError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return err(format!(
            "expected three comma-separated edge lengths, got `{s}`"
        ));
    }
    let mut a = [0.0; 3];
    for (slot, part) in a.iter_mut().zip(parts) {
        *slot = part
            .parse()
            .map_err(|_| ConfigError(format!("invalid edge length `{part}`")))?;
    }
    Ok(a)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError(format!("invalid value `{v}` for `{key}`")))
}

/// Reads a flat `key = value` file into flag form. Keys match the long flag
/// names; `_` and `-` are interchangeable.
pub fn read_config_file(path: &Path) -> Result<Flags, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Flags, ConfigError> {
    let mut entries = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("config line {}: expected key = value", n + 1));
        };
        entries.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    let mut f = Flags::default();
    for (k, v) in &entries {
        match k.as_str() {
            "a" => f.a = Some(v.clone()),
            "beta" => f.beta = Some(parse_num(k, v)?),
            "mu" => f.mu = Some(parse_num(k, v)?),
            "omega-min" => f.omega_min = Some(parse_num(k, v)?),
            "omega-max" => f.omega_max = Some(parse_num(k, v)?),
            "resolution" => f.resolution = Some(parse_num(k, v)?),
            "gap" => f.gap = Some(parse_num(k, v)?),
            "profile" => f.profile = Some(parse_num(k, v)?),
            "K" | "k" => f.k = Some(parse_num(k, v)?),
            "grid" => f.grid = Some(parse_num(k, v)?),
            "beta-samples" => f.beta_samples = Some(parse_num(k, v)?),
            "xi" => f.xi = Some(parse_num(k, v)?),
            "eta" => f.eta = Some(parse_num(k, v)?),
            "format" => {
                f.format = Some(
                    Format::from_str(v, true)
                        .map_err(|_| ConfigError(format!("unknown format `{v}`")))?,
                )
            }
            "out" => f.out = Some(PathBuf::from(v)),
            _ => return err(format!("unknown config key `{k}`")),
        }
    }
    Ok(f)
}

/// Fills every unset field of `hi` from `lo`.
pub fn overlay(hi: Flags, lo: Flags) -> Flags {
    Flags {
        a: hi.a.or(lo.a),
        beta: hi.beta.or(lo.beta),
        mu: hi.mu.or(lo.mu),
        omega_min: hi.omega_min.or(lo.omega_min),
        omega_max: hi.omega_max.or(lo.omega_max),
        resolution: hi.resolution.or(lo.resolution),
        gap: hi.gap.or(lo.gap),
        profile: hi.profile.or(lo.profile),
        k: hi.k.or(lo.k),
        grid: hi.grid.or(lo.grid),
        beta_samples: hi.beta_samples.or(lo.beta_samples),
        xi: hi.xi.or(lo.xi),
        eta: hi.eta.or(lo.eta),
        format: hi.format.or(lo.format),
        out: hi.out.or(lo.out),
        config: hi.config.or(lo.config),
    }
}

impl RunConfig {
    pub fn resolve(flags: Flags, env_tol: Option<&str>) -> Result<Self, ConfigError> {
        let flags = match &flags.config {
            Some(path) => overlay(flags.clone(), read_config_file(path)?),
            None => flags,
        };
        let a = match &flags.a {
            Some(s) => parse_triple(s)?,
            None => DEFAULT_A,
        };
        let params = LatticeParams::new(
            a,
            flags.mu.unwrap_or(DEFAULT_MU),
            flags.beta.unwrap_or(PI / 2.0),
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        let window = FrequencyWindow::new(
            flags.omega_min.unwrap_or(0.0),
            flags.omega_max.unwrap_or(PI),
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        let resolution = flags
            .resolution
            .unwrap_or_else(|| default_resolution(&params));
        if !(resolution > 0.0 && resolution.is_finite()) {
            return err(format!("resolution must be positive, got {resolution}"));
        }
        let verify_tol = match env_tol {
            Some(s) => parse_num::<f64>("LATTICE_GUIDE_TOL", s.trim())?,
            None => DEFAULT_VERIFY_TOL,
        };
        if !(verify_tol > 0.0 && verify_tol.is_finite()) {
            return err(format!(
                "LATTICE_GUIDE_TOL must be positive, got {verify_tol}"
            ));
        }
        let k = flags.k.unwrap_or(DEFAULT_K);
        if k == 0 {
            return err("K must be at least 1");
        }
        if flags.profile == Some(0) {
            return err("profile radius must be at least 1");
        }
        let beta_samples = flags.beta_samples.unwrap_or(DEFAULT_BETA_SAMPLES);
        for (name, v) in [("xi", flags.xi), ("eta", flags.eta)] {
            if v.is_some_and(|x| !x.is_finite()) {
                return err(format!("{name} must be finite"));
            }
        }
        Ok(Self {
            params,
            window,
            resolution,
            verify_tol,
            gap: flags.gap,
            profile: flags.profile,
            k,
            grid: flags.grid,
            beta_samples,
            xi: flags.xi,
            eta: flags.eta,
            format: flags.format.unwrap_or(Format::Json),
            out: flags.out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_and_comments() {
        let f =
            parse_config("# comment\na = 1,1,1\nomega_max=6.0 # trailing\nformat = csv\n").unwrap();
        assert_eq!(f.a.as_deref(), Some("1,1,1"));
        assert_eq!(f.omega_max, Some(6.0));
        assert_eq!(f.format, Some(Format::Csv));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("just text").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file = parse_config("mu = 0.3\nbeta = 1.0").unwrap();
        let flags = Flags {
            mu: Some(0.7),
            ..Flags::default()
        };
        let merged = overlay(flags, file);
        assert_eq!(merged.mu, Some(0.7));
        assert_eq!(merged.beta, Some(1.0));
    }

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Flags::default(), None).unwrap();
        assert_eq!(c.params.periods(), DEFAULT_A);
        assert_eq!(c.params.mu(), DEFAULT_MU);
        assert_eq!(c.window.hi(), PI);
        assert_eq!(c.k, DEFAULT_K);
        assert_eq!(c.verify_tol, DEFAULT_VERIFY_TOL);
    }

    #[test]
    fn invalid_values() {
        let bad = |f: Flags| RunConfig::resolve(f, None).is_err();
        assert!(bad(Flags {
            a: Some("1,1".into()),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            omega_max: Some(0.0),
            ..Flags::default()
        }));
        assert!(bad(Flags {
            resolution: Some(-1.0),
            ..Flags::default()
        }));
        assert!(RunConfig::resolve(Flags::default(), Some("0")).is_err());
    }
}
