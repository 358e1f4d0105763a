//! Evaluation of a [`RunConfig`]: grid expansion, per-point closed-form and
//! brute-force coherence, requested tables, checks and the summary file.
//!
//! Table layouts (one header row, floats with 12 significant digits):
//!
//! * `total`: `s_<obs>...`, `C_closed`, `C_brute`, `err_budget`
//! * `subsystems`: `s_<obs>...`, `subsystem`, `size`, `C_closed`, `C_brute`
//! * `identities`: `s_<obs>...`, `identity`, `method`, `lhs`, `rhs`, `residual`
//! * `limits`: `family`, `N`, `n`, `limit`
//!
//! `s_<obs>` columns follow the order of the accelerated observers in the
//! scenario. `C_brute` is empty wherever the truncation cap or the memory
//! budget rejects the brute-force route. `err_budget` bounds
//! `|C_closed − C_brute|`: the series error of the closed form plus, where a
//! brute-force value exists, its truncation budget.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{RunConfig, TableKind};
use super::table::{Cell, Table};
use crate::analysis::{
    closed_coherence, closed_subsystem_coherence, subsystem_coherence_map, Subsystem,
    DISTRIBUTION_BRUTE_THRESHOLD, DISTRIBUTION_CLOSED_THRESHOLD, GLOBALITY_THRESHOLD,
    ORACLE_THRESHOLD,
};
use crate::coherence::{freezing_limit, l1_coherence, CoherenceValue};
use crate::rindler::AccelerationParameter;
use crate::states::{scenario_density, Family, ScenarioConfig};
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "UNRUH_COHERENCE_OUT";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub config_hash: String,
    pub checks: Vec<CheckResult>,
    pub tables: Vec<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: Summary,
    pub summary_path: PathBuf,
    /// Checks that were requested but had nothing to act on.
    pub skipped: Vec<String>,
}

struct SubsystemRow {
    subsystem: Subsystem,
    closed: f64,
    brute: Option<f64>,
}

struct PointResult {
    params: Vec<f64>,
    closed: CoherenceValue,
    brute: Option<CoherenceValue>,
    subsystems: Vec<SubsystemRow>,
}

impl PointResult {
    fn proper(&self, parties: usize) -> impl Iterator<Item = &SubsystemRow> {
        self.subsystems
            .iter()
            .filter(move |r| r.subsystem.len() < parties)
    }

    fn pairs(&self) -> impl Iterator<Item = &SubsystemRow> {
        self.subsystems.iter().filter(|r| r.subsystem.len() == 2)
    }
}

/// Every combination of sweep values, first axis outermost; explicit points;
/// or the configured scenario alone. Each entry lists one `s` per accelerated
/// observer, in scenario order.
fn grid(cfg: &RunConfig) -> Vec<Vec<f64>> {
    let base: Vec<(String, f64)> = cfg
        .scenario
        .observers()
        .iter()
        .filter_map(|o| o.motion.parameter().map(|s| (o.name.clone(), s.value())))
        .collect();
    let assign = |over: &BTreeMap<String, f64>| -> Vec<f64> {
        base.iter()
            .map(|(name, s)| over.get(name).copied().unwrap_or(*s))
            .collect()
    };
    if !cfg.points.is_empty() {
        return cfg.points.iter().map(assign).collect();
    }
    let mut combos = vec![BTreeMap::new()];
    for axis in &cfg.sweep {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.insert(axis.observer.clone(), v);
                    c
                })
            })
            .collect();
    }
    combos.iter().map(assign).collect()
}

fn subsets(names: &[String], upto: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for k in 1..=upto.min(names.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| names[i].clone()).collect());
            let Some(pos) = (0..k).rev().find(|&p| idx[p] < names.len() - k + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

fn evaluate(cfg: &RunConfig, params: &[f64]) -> Result<PointResult> {
    let s = params
        .iter()
        .map(|&v| AccelerationParameter::new(v))
        .collect::<Result<Vec<_>>>()?;
    let scenario = cfg.scenario.with_accelerations(&s)?;
    let parties = scenario.parties();
    let closed = closed_coherence(&scenario, &cfg.tolerance)?;

    let names = scenario.region_i_modes();
    let mut wanted = subsets(&names, cfg.checks.subsystem_size);
    wanted.push(names.clone());
    if cfg.checks.distribution && cfg.checks.subsystem_size < 2 {
        wanted.extend(subsets(&names, 2).into_iter().filter(|s| s.len() == 2));
    }

    let (brute, brute_map) = if cfg.checks.brute_force {
        match scenario_density(&scenario) {
            Ok(rho) => {
                let total = l1_coherence(&rho)?;
                let upto = wanted
                    .iter()
                    .map(Vec::len)
                    .filter(|&k| k < parties)
                    .max()
                    .unwrap_or(1);
                (Some(total), Some(subsystem_coherence_map(&rho, upto)?))
            }
            Err(Error::Resource(_)) => (None, None),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    let mut subsystems = Vec::with_capacity(wanted.len());
    for subset in wanted {
        let mut key = subset.clone();
        key.sort();
        let closed_v = if subset.len() == parties {
            closed.value
        } else {
            closed_subsystem_coherence(&scenario, &subset, &cfg.tolerance)?.value
        };
        let brute_v = if subset.len() == parties {
            brute.map(|b| b.value)
        } else {
            brute_map
                .as_ref()
                .and_then(|m| m.get(&key))
                .map(|v| v.value)
        };
        subsystems.push(SubsystemRow {
            subsystem: subset,
            closed: closed_v,
            brute: brute_v,
        });
    }

    Ok(PointResult {
        params: params.to_vec(),
        closed,
        brute,
        subsystems,
    })
}

fn param_columns(scenario: &ScenarioConfig) -> Vec<String> {
    scenario
        .observers()
        .iter()
        .filter(|o| o.motion.parameter().is_some())
        .map(|o| format!("s_{}", o.name))
        .collect()
}

fn with_params(params: &[f64], rest: Vec<Cell>) -> Vec<Cell> {
    params.iter().map(|&v| Cell::Num(v)).chain(rest).collect()
}

fn total_table(cfg: &RunConfig, points: &[PointResult]) -> Table {
    let mut cols = param_columns(&cfg.scenario);
    cols.extend(["C_closed", "C_brute", "err_budget"].map(String::from));
    let mut table = Table::new(cols);
    for p in points {
        let budget = p.closed.error_budget + p.brute.map_or(0.0, |b| b.error_budget);
        table.push(with_params(
            &p.params,
            vec![
                Cell::Num(p.closed.value),
                Cell::opt(p.brute.map(|b| b.value)),
                Cell::Num(budget),
            ],
        ));
    }
    table
}

fn subsystem_table(cfg: &RunConfig, points: &[PointResult]) -> Table {
    let mut cols = param_columns(&cfg.scenario);
    cols.extend(["subsystem", "size", "C_closed", "C_brute"].map(String::from));
    let mut table = Table::new(cols);
    for p in points {
        for row in &p.subsystems {
            table.push(with_params(
                &p.params,
                vec![
                    Cell::Text(row.subsystem.join("+")),
                    Cell::Int(row.subsystem.len() as i64),
                    Cell::Num(row.closed),
                    Cell::opt(row.brute),
                ],
            ));
        }
    }
    table
}

/// `(identity, method, lhs, rhs)` for one point.
fn identity_rows(cfg: &RunConfig, p: &PointResult) -> Vec<(&'static str, &'static str, f64, f64)> {
    let parties = cfg.scenario.parties();
    let mut rows = Vec::new();
    match cfg.scenario.family() {
        Family::Ghz => {
            let closed = p.proper(parties).map(|r| r.closed).fold(0.0, f64::max);
            rows.push(("ghz_globality", "closed_form", closed, 0.0));
            if p.brute.is_some() {
                let brute = p
                    .proper(parties)
                    .filter_map(|r| r.brute)
                    .fold(0.0, f64::max);
                rows.push(("ghz_globality", "brute_force", brute, 0.0));
            }
        }
        Family::W => {
            let closed: f64 = p.pairs().map(|r| r.closed).sum();
            rows.push(("w_distribution", "closed_form", closed, p.closed.value));
            if let Some(total) = p.brute {
                let brute: f64 = p.pairs().filter_map(|r| r.brute).sum();
                rows.push(("w_distribution", "brute_force", brute, total.value));
            }
        }
    }
    rows
}

fn identity_table(cfg: &RunConfig, points: &[PointResult]) -> Table {
    let mut cols = param_columns(&cfg.scenario);
    cols.extend(["identity", "method", "lhs", "rhs", "residual"].map(String::from));
    let mut table = Table::new(cols);
    for p in points {
        for (identity, method, lhs, rhs) in identity_rows(cfg, p) {
            table.push(with_params(
                &p.params,
                vec![
                    Cell::Text(identity.into()),
                    Cell::Text(method.into()),
                    Cell::Num(lhs),
                    Cell::Num(rhs),
                    Cell::Num((lhs - rhs).abs()),
                ],
            ));
        }
    }
    table
}

/// Infinite-acceleration limits for `n = 0..=N` accelerated observers.
pub fn limits_table(family: Family, parties: usize, accelerated: &[usize]) -> Result<Table> {
    let mut table = Table::new(["family", "N", "n", "limit"]);
    for &n in accelerated {
        table.push(vec![
            Cell::Text(family.to_string()),
            Cell::Int(parties as i64),
            Cell::Int(n as i64),
            Cell::Num(freezing_limit(family, parties, n)?),
        ]);
    }
    Ok(table)
}

fn max_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

/// Largest increase of the closed-form total along any single sweep axis
/// with the other coordinates held fixed.
fn max_axis_increment(cfg: &RunConfig, points: &[PointResult]) -> Option<f64> {
    let lens: Vec<usize> = cfg.sweep.iter().map(|a| a.values.len()).collect();
    let mut worst: Option<f64> = None;
    for (axis, &len) in lens.iter().enumerate() {
        if len < 2 {
            continue;
        }
        let stride: usize = lens[axis + 1..].iter().product();
        for (i, p) in points.iter().enumerate() {
            if (i / stride) % len == len - 1 {
                continue;
            }
            let d = points[i + stride].closed.value - p.closed.value;
            worst = Some(worst.map_or(d, |w| w.max(d)));
        }
    }
    worst
}

fn checks(cfg: &RunConfig, points: &[PointResult]) -> (Vec<CheckResult>, Vec<String>) {
    let parties = cfg.scenario.parties();
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |name: &str, residual: Option<f64>, threshold: f64, strict: bool| match residual
    {
        Some(residual) => out.push(CheckResult {
            name: name.into(),
            residual,
            threshold,
            pass: if strict {
                residual < threshold
            } else {
                residual <= threshold
            },
        }),
        None => skipped.push(name.to_string()),
    };
    if cfg.checks.oracle && cfg.checks.brute_force {
        let r = max_of(
            points
                .iter()
                .filter_map(|p| p.brute.map(|b| (p.closed.value - b.value).abs())),
        );
        push("oracle", r, ORACLE_THRESHOLD, false);
    }
    if cfg.checks.globality && cfg.checks.brute_force {
        let r = max_of(points.iter().filter(|p| p.brute.is_some()).map(|p| {
            p.proper(parties)
                .filter_map(|r| r.brute)
                .fold(0.0, f64::max)
        }));
        push("ghz_globality", r, GLOBALITY_THRESHOLD, false);
    }
    if cfg.checks.distribution {
        let closed = max_of(points.iter().map(|p| {
            let pairs: f64 = p.pairs().map(|r| r.closed).sum();
            (pairs - p.closed.value).abs()
        }));
        push(
            "w_distribution_closed",
            closed,
            DISTRIBUTION_CLOSED_THRESHOLD,
            false,
        );
        if cfg.checks.brute_force {
            let brute = max_of(points.iter().filter_map(|p| {
                let total = p.brute?.value;
                let pairs: f64 = p.pairs().filter_map(|r| r.brute).sum();
                Some((pairs - total).abs())
            }));
            push(
                "w_distribution_brute",
                brute,
                DISTRIBUTION_BRUTE_THRESHOLD,
                false,
            );
        }
    }
    if cfg.checks.monotonicity {
        push("monotonicity", max_axis_increment(cfg, points), 0.0, true);
    }
    (out, skipped)
}

/// Directory for outputs: explicit override, then `output_dir` from the
/// config (relative to the config file), then the environment variable, then
/// the config file's directory.
pub fn resolve_out_dir(cfg: &RunConfig, config_path: &Path, out: Option<&Path>) -> PathBuf {
    let base = config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    if let Some(o) = out {
        return o.to_path_buf();
    }
    if let Some(d) = &cfg.output_dir {
        return base.join(d);
    }
    if let Some(env) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    base
}

pub fn config_hash(source: &[u8]) -> String {
    format!("{:x}", Sha256::digest(source))
}

/// Evaluates the config; writes tables (unless `tables` is false) and the
/// summary into `out_dir`.
pub fn execute(cfg: &RunConfig, source: &[u8], out_dir: &Path, tables: bool) -> Result<RunOutcome> {
    let grid = grid(cfg);
    let points = grid
        .par_iter()
        .map(|params| evaluate(cfg, params))
        .collect::<Result<Vec<_>>>()?;

    let (checks, skipped) = checks(cfg, &points);
    let mut written = Vec::new();
    if tables {
        for spec in &cfg.outputs {
            let table = match spec.table {
                TableKind::Total => total_table(cfg, &points),
                TableKind::Subsystems => subsystem_table(cfg, &points),
                TableKind::Identities => identity_table(cfg, &points),
                TableKind::Limits => {
                    let n = cfg.scenario.parties();
                    limits_table(cfg.scenario.family(), n, &(0..=n).collect::<Vec<_>>())?
                }
            };
            table.write(&out_dir.join(&spec.path), spec.format)?;
            written.push(spec.path.clone());
        }
    }

    let summary = Summary {
        config_hash: config_hash(source),
        checks,
        tables: written,
    };
    let summary_path = out_dir.join(&cfg.summary);
    if let Some(parent) = summary_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    std::fs::write(&summary_path, json)?;
    Ok(RunOutcome {
        summary,
        summary_path,
        skipped,
    })
}
