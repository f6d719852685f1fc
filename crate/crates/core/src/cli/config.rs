//! JSON run configuration and its merge with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::ExperimentInput;
use crate::constants::PhysicalConstants;
use crate::ns_series::DEFAULT_K;
use crate::operator_oracle::{default_oracle_grid, GridKind, RadialGrid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Levels,
    Ns,
    Bound,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Levels => "levels",
            CommandKind::Ns => "ns",
            CommandKind::Bound => "bound",
            CommandKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Integer list: `[1, 2, 3]` in JSON, or `"1..3"`, `"1,2,3"` as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntListRepr", into = "Vec<i64>")]
pub struct IntList(pub Vec<i64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum IntListRepr {
    List(Vec<i64>),
    One(i64),
    Text(String),
}

impl TryFrom<IntListRepr> for IntList {
    type Error = String;

    fn try_from(r: IntListRepr) -> Result<Self, String> {
        match r {
            IntListRepr::List(v) => Ok(IntList(v)),
            IntListRepr::One(v) => Ok(IntList(vec![v])),
            IntListRepr::Text(s) => s.parse(),
        }
    }
}

impl From<IntList> for Vec<i64> {
    fn from(l: IntList) -> Self {
        l.0
    }
}

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: i64 = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
                let b: i64 = b.trim().parse().map_err(|_| format!("bad range end in {part:?}"))?;
                if b < a {
                    return Err(format!("empty range {part:?}"));
                }
                if b - a > 10_000 {
                    return Err(format!("range {part:?} too long"));
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| format!("bad integer {part:?}"))?);
            }
        }
        Ok(IntList(out))
    }
}

impl fmt::Display for IntList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Option<usize>,
    pub rho_max: Option<f64>,
    /// Stretch of the sinh grid; 0 selects a uniform grid.
    pub kappa: Option<f64>,
}

/// Contents of a `--config` file. Every field is optional; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: Option<u32>,
    pub command: Option<CommandKind>,
    pub n: Option<IntList>,
    pub l: Option<IntList>,
    pub beta: Option<Vec<f64>>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub grid: Option<GridConfig>,
    pub alpha: Option<f64>,
    pub t: Option<f64>,
    pub experiment: Option<ExperimentInput>,
    pub oracle: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
    /// Path to a constants table replacing the bundled one.
    pub constants: Option<PathBuf>,
    /// Subset of verification checks to run.
    pub checks: Option<Vec<String>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
        if let Some(v) = cfg.schema_version {
            if v != SCHEMA_VERSION {
                return Err(format!("schema_version {v} unsupported (expected {SCHEMA_VERSION})"));
            }
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Strength of the noncommutativity as given by the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Alpha(f64),
    T(f64),
}

/// Constants source; a broken file is kept as an error so that `verify`
/// can report it as a failed check instead of a usage error.
#[derive(Debug, Clone)]
pub enum ConstantsSource {
    Bundled(PhysicalConstants),
    File(PathBuf, Result<PhysicalConstants, String>),
}

impl ConstantsSource {
    pub fn get(&self) -> Result<&PhysicalConstants, String> {
        match self {
            ConstantsSource::Bundled(c) => Ok(c),
            ConstantsSource::File(_, Ok(c)) => Ok(c),
            ConstantsSource::File(p, Err(e)) => Err(format!("{}: {e}", p.display())),
        }
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: CommandKind,
    pub n: Vec<u32>,
    pub l: Option<Vec<u32>>,
    pub beta: Option<Vec<f64>>,
    pub k: usize,
    pub grid: RadialGrid,
    pub strength: Option<Strength>,
    pub experiment: Option<ExperimentInput>,
    pub oracle: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub precision: usize,
    pub constants: ConstantsSource,
    pub checks: Option<Vec<String>>,
}

pub const DEFAULT_SEED: u64 = 20_120_101;
pub const DEFAULT_PRECISION: usize = 15;

fn to_u32_list(name: &str, v: &[i64], min: i64) -> Result<Vec<u32>, String> {
    if v.is_empty() {
        return Err(format!("{name} list is empty"));
    }
    v.iter()
        .map(|&x| {
            if x < min || x > u32::MAX as i64 {
                Err(format!("{name}={x} out of range (need >= {min})"))
            } else {
                Ok(x as u32)
            }
        })
        .collect()
}

fn check_finite_nonneg(name: &str, x: f64) -> Result<(), String> {
    if !x.is_finite() || x < 0.0 {
        return Err(format!("{name} must be finite and >= 0, got {x}"));
    }
    Ok(())
}

/// Flags as parsed by clap, before merging.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<CommandKind>,
    pub n: Option<IntList>,
    pub l: Option<IntList>,
    pub beta: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub grid_points: Option<usize>,
    pub rho_max: Option<f64>,
    pub alpha: Option<f64>,
    pub t: Option<f64>,
    pub rel_uncertainty: Option<f64>,
    pub frequency_hz: Option<f64>,
    pub oracle: bool,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
    pub constants: Option<PathBuf>,
    pub checks: Option<Vec<String>>,
}

impl Settings {
    pub fn resolve(cfg: RunConfig, o: Overrides) -> Result<Self, String> {
        let command = o
            .command
            .or(cfg.command)
            .ok_or("no command given (levels, ns, bound or verify)")?;

        let n_raw = o.n.or(cfg.n).map(|l| l.0);
        let n = match n_raw {
            Some(v) => to_u32_list("n", &v, 1)?,
            None => match command {
                CommandKind::Levels => (3..=6).collect(),
                _ => vec![1],
            },
        };
        let l = match o.l.or(cfg.l) {
            Some(v) => Some(to_u32_list("l", &v.0, 0)?),
            None => None,
        };
        let beta = o.beta.or(cfg.beta);
        if let Some(b) = &beta {
            if b.is_empty() {
                return Err("beta list is empty".into());
            }
            for &x in b {
                check_finite_nonneg("beta", x)?;
            }
        }
        let k = o.k.or(cfg.k).unwrap_or(DEFAULT_K);
        if k < 10 {
            return Err(format!("K must be >= 10, got {k}"));
        }

        let gcfg = cfg.grid.unwrap_or_default();
        let base = default_oracle_grid();
        let kind = match gcfg.kappa {
            Some(0.0) => GridKind::Uniform,
            Some(k) => GridKind::Sinh { kappa: k },
            None => base.kind,
        };
        let grid = RadialGrid::new(
            o.rho_max.or(gcfg.rho_max).unwrap_or(base.rho_max),
            o.grid_points.or(gcfg.points).unwrap_or(base.points),
            kind,
        )
        .map_err(|e| format!("grid: {e}"))?;

        let alpha = o.alpha.or(if o.t.is_some() { None } else { cfg.alpha });
        let t = o.t.or(if o.alpha.is_some() { None } else { cfg.t });
        let strength = match (alpha, t) {
            (Some(_), Some(_)) => return Err("give either alpha or t, not both".into()),
            (Some(a), None) => {
                check_finite_nonneg("alpha", a)?;
                Some(Strength::Alpha(a))
            }
            (None, Some(t)) => {
                check_finite_nonneg("t", t)?;
                Some(Strength::T(t))
            }
            (None, None) => None,
        };

        let mut experiment = cfg.experiment;
        if let Some(u) = o.rel_uncertainty {
            experiment = Some(experiment.unwrap_or_default().with_uncertainty(u));
        }
        if let Some(f) = o.frequency_hz {
            let mut e = experiment.ok_or("--frequency needs an uncertainty")?;
            e.frequency_hz = f;
            experiment = Some(e);
        }
        if let Some(e) = &experiment {
            e.validate().map_err(|e| format!("experiment: {e}"))?;
        }

        let precision = o.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
        if !(1..=17).contains(&precision) {
            return Err(format!("precision must be in 1..=17, got {precision}"));
        }

        let constants = match o.constants.or(cfg.constants) {
            None => ConstantsSource::Bundled(PhysicalConstants::codata2018()),
            Some(p) => {
                let loaded = PhysicalConstants::from_path(&p).map_err(|e| e.to_string());
                ConstantsSource::File(p, loaded)
            }
        };

        let checks = o.checks.or(cfg.checks);
        if let Some(c) = &checks {
            for name in c {
                if !super::verify::CHECK_NAMES.contains(&name.as_str()) {
                    return Err(format!(
                        "unknown check {name:?}; known: {}",
                        super::verify::CHECK_NAMES.join(", ")
                    ));
                }
            }
        }

        Ok(Self {
            command,
            n,
            l,
            beta,
            k,
            grid,
            strength,
            experiment,
            oracle: o.oracle || cfg.oracle.unwrap_or(false),
            format: o.format.or(cfg.format).unwrap_or_default(),
            out: o.out.or(cfg.out),
            seed: o.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            precision,
            constants,
            checks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_lists() {
        assert_eq!("3..5".parse::<IntList>().unwrap().0, vec![3, 4, 5]);
        assert_eq!("1,4..=5".parse::<IntList>().unwrap().0, vec![1, 4, 5]);
        assert!("5..3".parse::<IntList>().is_err());
        assert!("x".parse::<IntList>().is_err());
        let c = RunConfig::from_json(r#"{"n": "2..3", "l": [2], "K": 100}"#).unwrap();
        assert_eq!(c.n.unwrap().0, vec![2, 3]);
        assert_eq!(c.k, Some(100));
    }

    #[test]
    fn rejects_unknown_keys_with_position() {
        let e = RunConfig::from_json("{\n  \"n\": [1],\n  \"bogus\": 1\n}").unwrap_err();
        assert!(e.contains("line 3"), "{e}");
        assert!(e.contains("bogus"), "{e}");
        let e = RunConfig::from_json("{\n \"n\": [1,,]\n}").unwrap_err();
        assert!(e.contains("line 2, column"), "{e}");
    }

    #[test]
    fn flags_override_config() {
        let cfg = RunConfig::from_json(r#"{"command": "ns", "K": 100, "t": 1.0}"#).unwrap();
        let o = Overrides {
            k: Some(300),
            alpha: Some(2.0),
            ..Default::default()
        };
        let s = Settings::resolve(cfg, o).unwrap();
        assert_eq!(s.command, CommandKind::Ns);
        assert_eq!(s.k, 300);
        assert_eq!(s.strength, Some(Strength::Alpha(2.0)));
    }

    #[test]
    fn validation_errors() {
        let bad = [
            r#"{"command": "ns", "K": 5}"#,
            r#"{"command": "ns", "n": [0]}"#,
            r#"{"command": "ns", "beta": [-1.0]}"#,
            r#"{"command": "ns", "alpha": 1.0, "t": 1.0}"#,
            r#"{"command": "ns", "precision": 0}"#,
            r#"{"command": "verify", "checks": ["nope"]}"#,
            r#"{"command": "bound", "experiment": {"frequency_hz": 1.0, "rel_uncertainty": 0.0}}"#,
            r#"{"schema_version": 9, "command": "ns"}"#,
        ];
        for text in bad {
            let r = RunConfig::from_json(text).and_then(|c| Settings::resolve(c, Overrides::default()));
            assert!(r.is_err(), "{text}");
        }
        assert!(Settings::resolve(RunConfig::default(), Overrides::default()).is_err());
    }
}
