//! The `levels`, `ns` and `bound` commands.

use serde_json::{Map, Value};

use super::config::{Settings, Strength};
use super::output::{document, json_num, Cell, Table};
use super::CliError;
use crate::bounds::{bound_from_uncertainty, round_trip};
use crate::constants::PhysicalConstants;
use crate::corrections::{delta_e1_assembled, delta_e1_closed, delta_e1_effective};
use crate::hydrogen::QuantumState;
use crate::nc_model::NcParameters;
use crate::ns_series::s_ns;
use crate::operator_oracle::s_ns_oracle;
use crate::Error;

/// Relative tolerance of the three-route agreement flag.
pub const LEVELS_AGREEMENT: f64 = 1e-8;

pub const LEVELS_COLUMNS: &[&str] = &[
    "n",
    "l",
    "status",
    "bracket",
    "delta_e1_per_t2",
    "t",
    "delta_e1",
    "max_rel_diff",
    "agree",
];

pub const NS_COLUMNS: &[&str] = &[
    "n",
    "beta",
    "S_ns",
    "error",
    "S_over_n2",
    "flagged",
    "oracle",
    "oracle_error",
    "agree",
    "delta_e_ns_per_t",
];

pub const BOUND_COLUMNS: &[&str] = &[
    "rel_uncertainty",
    "coefficient",
    "t_bound",
    "hbar_sqrt_theta2_bound_m2",
    "alpha_bound",
    "bohr_radius_m",
    "planck_length_m",
];

pub struct Output {
    pub document: String,
    pub summary: String,
    pub success: bool,
}

fn constants(s: &Settings) -> Result<&PhysicalConstants, CliError> {
    s.constants.get().map_err(CliError::Usage)
}

fn nc_parameters(s: &Settings) -> Result<Option<NcParameters>, CliError> {
    let c = constants(s)?;
    let p = match s.strength {
        None => return Ok(None),
        Some(Strength::Alpha(a)) => NcParameters::from_alpha(a, c.planck_length_m, c.bohr_radius_m),
        Some(Strength::T(t)) => NcParameters::from_t(t, c.planck_length_m, c.bohr_radius_m),
    };
    p.map(Some).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn levels(s: &Settings) -> Result<Output, CliError> {
    let t = nc_parameters(s)?.map_or(1.0, |p| p.t());
    let mut table = Table::new("levels", LEVELS_COLUMNS);
    table.meta.insert("t".into(), json_num(t, 15));
    let mut divergent = 0;
    let mut disagree = 0;
    for &n in &s.n {
        let ls: Vec<u32> = match &s.l {
            Some(ls) => ls.iter().copied().filter(|&l| l < n).collect(),
            None => (0..n).collect(),
        };
        for l in ls {
            let state = QuantumState::nl(n as i64, l as i64).map_err(|e| CliError::Usage(e.to_string()))?;
            let closed = match delta_e1_closed(state) {
                Ok(r) => r,
                Err(Error::DivergentCorrection { .. }) => {
                    divergent += 1;
                    table.push(vec![
                        n.into(),
                        l.into(),
                        "divergent".into(),
                        Cell::Missing,
                        Cell::Missing,
                        t.into(),
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                    ]);
                    continue;
                }
                Err(e) => return Err(CliError::Compute(e)),
            };
            let assembled = delta_e1_assembled(state).map_err(CliError::Compute)?;
            let effective = delta_e1_effective(state).map_err(CliError::Compute)?;
            let diff = [assembled.value, effective.value]
                .iter()
                .map(|v| ((v - closed.value) / closed.value).abs())
                .fold(0.0, f64::max);
            let agree = diff <= LEVELS_AGREEMENT;
            if !agree {
                disagree += 1;
            }
            table.push(vec![
                n.into(),
                l.into(),
                "ok".into(),
                closed.bracket().into(),
                closed.value.into(),
                t.into(),
                (closed.value * t * t + 0.0).into(),
                diff.into(),
                agree.into(),
            ]);
        }
    }
    if table.rows.is_empty() {
        return Err(CliError::Usage("no valid (n, l) pairs in the requested ranges".into()));
    }
    let summary = format!(
        "levels: {} rows, {} divergent (l < 2), {} without three-route agreement",
        table.rows.len(),
        divergent,
        disagree
    );
    Ok(Output {
        document: table.render(s.format, s.precision),
        summary,
        success: true,
    })
}

pub fn ns(s: &Settings) -> Result<Output, CliError> {
    let betas = match (&s.beta, nc_parameters(s)?) {
        (Some(b), _) => b.clone(),
        (None, Some(p)) => vec![p.beta()],
        (None, None) => vec![0.0],
    };
    let mut table = Table::new("ns", NS_COLUMNS);
    table.meta.insert("K".into(), Value::from(s.k));
    if s.oracle {
        let mut g = Map::new();
        g.insert("points".into(), Value::from(s.grid.points));
        g.insert("rho_max".into(), json_num(s.grid.rho_max, 15));
        table.meta.insert("grid".into(), Value::Object(g));
    }
    let mut lines = Vec::new();
    for &n in &s.n {
        for &beta in &betas {
            let r = s_ns(beta, n, s.k).map_err(CliError::Compute)?;
            let nf = n as f64;
            let oracle = if s.oracle && beta > 0.0 {
                Some(s_ns_oracle(beta, n, &s.grid).map_err(CliError::Compute)?)
            } else {
                None
            };
            let agree = oracle.as_ref().map(|o| (o.value - r.value).abs() <= o.error + r.error);
            lines.push(format!(
                "n={n} beta={beta}: S = {:.8} +- {:.1e}{}",
                r.value,
                r.error,
                match &oracle {
                    Some(o) => format!(", oracle {:.8} +- {:.1e}", o.value, o.error),
                    None => String::new(),
                }
            ));
            table.push(vec![
                n.into(),
                beta.into(),
                r.value.into(),
                r.error.into(),
                (r.value / (nf * nf)).into(),
                r.flagged.into(),
                oracle.as_ref().map(|o| o.value).into(),
                oracle.as_ref().map(|o| o.error).into(),
                agree.map_or(Cell::Missing, Cell::Bool),
                (r.value / (6f64.sqrt() * nf.powi(5))).into(),
            ]);
        }
    }
    Ok(Output {
        document: table.render(s.format, s.precision),
        summary: lines.join("\n"),
        success: true,
    })
}

pub fn bound(s: &Settings) -> Result<Output, CliError> {
    let input = s
        .experiment
        .clone()
        .ok_or_else(|| CliError::Usage("bound needs an experiment input (--rel-uncertainty or config)".into()))?;
    let c = constants(s)?;
    let b = bound_from_uncertainty(&input, c).map_err(|e| CliError::Usage(e.to_string()))?;
    let rt = round_trip(&input, &b, c).map_err(CliError::Compute)?;
    let d = s.precision;
    let document = match s.format {
        super::config::Format::Csv => {
            let mut t = Table::new("bound", BOUND_COLUMNS);
            t.push(vec![
                b.rel_uncertainty.into(),
                b.coefficient.into(),
                b.t_bound.into(),
                b.hbar_sqrt_theta2_bound_m2.into(),
                b.alpha_bound.into(),
                b.bohr_radius_m.into(),
                b.planck_length_m.into(),
            ]);
            t.render(s.format, d)
        }
        super::config::Format::Json => {
            let mut body = Map::new();
            for (k, v) in [
                ("rel_uncertainty", b.rel_uncertainty),
                ("coefficient", b.coefficient),
                ("t_bound", b.t_bound),
                ("hbar_sqrt_theta2_bound_m2", b.hbar_sqrt_theta2_bound_m2),
                ("alpha_bound", b.alpha_bound),
                ("bohr_radius_m", b.bohr_radius_m),
                ("planck_length_m", b.planck_length_m),
            ] {
                body.insert(k.into(), json_num(v, 15));
            }
            body.insert("constants_label".into(), Value::from(b.constants_label.as_str()));
            let mut meta = Map::new();
            let mut exp = Map::new();
            exp.insert("frequency_hz".into(), json_num(input.frequency_hz, 16));
            exp.insert("rel_uncertainty".into(), json_num(input.rel_uncertainty, 15));
            exp.insert("source".into(), Value::from(input.source.as_str()));
            meta.insert("experiment".into(), Value::Object(exp));
            let mut r = Map::new();
            r.insert("via_t".into(), json_num(rt.via_t, 3));
            r.insert("via_alpha".into(), json_num(rt.via_alpha, 3));
            r.insert("frequency_defect".into(), json_num(rt.frequency_defect, 3));
            meta.insert("round_trip".into(), Value::Object(r));
            document("bound", meta, "bound", Value::Object(body))
        }
    };
    let summary = format!(
        "relative uncertainty {:e} (coefficient {:.5})\n  hbar*sqrt<theta^2> <= {:.2e} m^2\n  alpha <= {:.2e}",
        b.rel_uncertainty, b.coefficient, b.hbar_sqrt_theta2_bound_m2, b.alpha_bound
    );
    Ok(Output {
        document,
        summary,
        success: true,
    })
}
