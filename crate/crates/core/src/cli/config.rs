//! Run configuration: a TOML file describing one scenario, an optional sweep
//! or list of fixed points, requested output tables, checks and tolerances.
//!
//! ```toml
//! output_dir = "out"
//!
//! [scenario]
//! family = "w"
//! observers = [
//!     { name = "A" },
//!     { name = "B", s = 1.0 },
//!     { name = "C", a = 2.0, omega = 0.5 },
//! ]
//!
//! [[sweep]]
//! observer = "B"
//! min = 0.0
//! max = 2.0
//! step = 0.5
//!
//! [[output]]
//! table = "total"
//! format = "csv"
//! path = "total.csv"
//! ```
//!
//! Instead of `observers`, `parties = N` with `accelerated = [s, ...]` names
//! the parties `A, B, ...` and accelerates the trailing ones.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use toml::Spanned;

use super::table::Format;
use crate::coherence::SeriesTolerance;
use crate::rindler::{
    acceleration_parameter, AccelerationParameter, PhysicalAcceleration, TruncationPolicy,
};
use crate::states::{default_mode_names, Family, Observer, ScenarioConfig, DEFAULT_MEMORY_BUDGET};

/// A parse or validation failure, anchored to a line of the config file when
/// the offending item can be located.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output_dir: Option<String>,
    summary: Option<String>,
    scenario: Spanned<RawScenario>,
    #[serde(default)]
    sweep: Vec<Spanned<RawAxis>>,
    #[serde(default)]
    points: Vec<Spanned<BTreeMap<String, Spanned<f64>>>>,
    #[serde(default)]
    output: Vec<Spanned<RawOutput>>,
    tolerances: Option<Spanned<RawTolerances>>,
    checks: Option<Spanned<RawChecks>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    family: String,
    parties: Option<usize>,
    accelerated: Option<Vec<f64>>,
    observers: Option<Vec<Spanned<RawObserver>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObserver {
    name: String,
    s: Option<f64>,
    a: Option<f64>,
    omega: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    observer: String,
    min: f64,
    max: f64,
    step: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    table: TableKind,
    format: Format,
    path: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    epsilon_trunc: Option<f64>,
    rel_tol: Option<f64>,
    hard_cap: Option<u32>,
    max_terms: Option<u64>,
    memory_budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChecks {
    brute_force: Option<bool>,
    oracle: Option<bool>,
    globality: Option<bool>,
    distribution: Option<bool>,
    monotonicity: Option<bool>,
    subsystem_size: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Total,
    Subsystems,
    Identities,
    Limits,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Total => "total",
            TableKind::Subsystems => "subsystems",
            TableKind::Identities => "identities",
            TableKind::Limits => "limits",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub observer: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub table: TableKind,
    pub format: Format,
    pub path: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub brute_force: bool,
    pub oracle: bool,
    pub globality: bool,
    pub distribution: bool,
    pub monotonicity: bool,
    /// Largest proper subsystem enumerated; defaults to 2.
    pub subsystem_size: usize,
}

/// A validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub sweep: Vec<Axis>,
    /// Explicit parameter sets (observer name → s), used when no sweep is given.
    pub points: Vec<BTreeMap<String, f64>>,
    pub outputs: Vec<OutputSpec>,
    pub tolerance: SeriesTolerance,
    pub checks: Checks,
    pub output_dir: Option<PathBuf>,
    pub summary: String,
}

/// 1-based line of a byte offset.
fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err<T>(
        &self,
        span: std::ops::Range<usize>,
        message: impl Into<String>,
    ) -> Result<T, ConfigError> {
        Err(ConfigError {
            line: Some(line_of(self.source, span.start)),
            message: message.into(),
        })
    }
}

fn axis_values(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| min + i as f64 * step).collect()
}

impl RunConfig {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(source).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of(source, s.start)),
            message: e.message().to_string(),
        })?;
        let ctx = Ctx { source };

        let (tol, policy, budget) = match &raw.tolerances {
            None => (
                SeriesTolerance::default(),
                TruncationPolicy::default(),
                DEFAULT_MEMORY_BUDGET,
            ),
            Some(t) => {
                let span = t.span();
                let t = t.get_ref();
                let tol = match SeriesTolerance::new(
                    t.rel_tol.unwrap_or(SeriesTolerance::DEFAULT_REL_TOL),
                    t.max_terms.unwrap_or(SeriesTolerance::DEFAULT_MAX_TERMS),
                ) {
                    Ok(v) => v,
                    Err(e) => return ctx.err(span, e.to_string()),
                };
                let policy = match TruncationPolicy::new(
                    t.epsilon_trunc.unwrap_or(TruncationPolicy::DEFAULT_EPSILON),
                    t.hard_cap.unwrap_or(TruncationPolicy::DEFAULT_HARD_CAP),
                ) {
                    Ok(v) => v,
                    Err(e) => return ctx.err(span, e.to_string()),
                };
                (
                    tol,
                    policy,
                    t.memory_budget.unwrap_or(DEFAULT_MEMORY_BUDGET),
                )
            }
        };

        let scenario_span = raw.scenario.span();
        let sc = raw.scenario.get_ref();
        let family: Family = match sc.family.parse() {
            Ok(f) => f,
            Err(e) => return ctx.err(scenario_span, e.to_string()),
        };
        let observers = match (&sc.observers, sc.parties) {
            (Some(list), parties) => {
                if let Some(n) = parties {
                    if n != list.len() {
                        return ctx.err(
                            scenario_span,
                            format!("parties = {n} but {} observers listed", list.len()),
                        );
                    }
                }
                if sc.accelerated.is_some() {
                    return ctx.err(
                        scenario_span,
                        "`accelerated` cannot be combined with `observers`",
                    );
                }
                let mut out = Vec::with_capacity(list.len());
                for o in list {
                    out.push(observer_from(&ctx, o)?);
                }
                out
            }
            (None, Some(parties)) => {
                let accelerated = sc.accelerated.clone().unwrap_or_default();
                if accelerated.len() > parties {
                    return ctx.err(
                        scenario_span,
                        format!(
                            "{} accelerated observers among {parties} parties",
                            accelerated.len()
                        ),
                    );
                }
                let inertial = parties - accelerated.len();
                let mut out = Vec::with_capacity(parties);
                for (i, name) in default_mode_names(parties).into_iter().enumerate() {
                    if i < inertial {
                        out.push(Observer::inertial(name));
                    } else {
                        match AccelerationParameter::new(accelerated[i - inertial]) {
                            Ok(s) => out.push(Observer::accelerated(name, s)),
                            Err(e) => return ctx.err(scenario_span, e.to_string()),
                        }
                    }
                }
                out
            }
            (None, None) => {
                return ctx.err(
                    scenario_span,
                    "scenario needs either `observers` or `parties`",
                )
            }
        };
        let scenario = match ScenarioConfig::new(family, observers, policy) {
            Ok(s) => s.with_memory_budget(budget),
            Err(e) => return ctx.err(scenario_span, e.to_string()),
        };

        let accelerated: Vec<&str> = scenario
            .observers()
            .iter()
            .filter(|o| o.motion.parameter().is_some())
            .map(|o| o.name.as_str())
            .collect();

        if raw.sweep.len() > 2 {
            return ctx.err(raw.sweep[2].span(), "at most two sweep axes are supported");
        }
        let mut sweep = Vec::new();
        for axis in &raw.sweep {
            let span = axis.span();
            let a = axis.get_ref();
            if !accelerated.contains(&a.observer.as_str()) {
                return ctx.err(
                    span,
                    format!("sweep axis `{}` is not an accelerated observer", a.observer),
                );
            }
            if sweep.iter().any(|s: &Axis| s.observer == a.observer) {
                return ctx.err(span, format!("observer `{}` swept twice", a.observer));
            }
            if a.step.is_nan() || a.step <= 0.0 || !a.step.is_finite() {
                return ctx.err(span, format!("sweep step must be positive, got {}", a.step));
            }
            if a.min.is_nan()
                || a.max.is_nan()
                || a.min < 0.0
                || a.max < a.min
                || !a.max.is_finite()
            {
                return ctx.err(
                    span,
                    format!(
                        "sweep range needs 0 <= min <= max, got [{}, {}]",
                        a.min, a.max
                    ),
                );
            }
            sweep.push(Axis {
                observer: a.observer.clone(),
                values: axis_values(a.min, a.max, a.step),
            });
        }

        if !raw.points.is_empty() && !sweep.is_empty() {
            return ctx.err(
                raw.points[0].span(),
                "`points` and `sweep` are mutually exclusive",
            );
        }
        let mut points = Vec::new();
        for p in &raw.points {
            let mut point = BTreeMap::new();
            for (name, s) in p.get_ref() {
                if !accelerated.contains(&name.as_str()) {
                    return ctx.err(s.span(), format!("`{name}` is not an accelerated observer"));
                }
                if let Err(e) = AccelerationParameter::new(*s.get_ref()) {
                    return ctx.err(s.span(), e.to_string());
                }
                point.insert(name.clone(), *s.get_ref());
            }
            points.push(point);
        }

        let mut outputs = Vec::new();
        for o in &raw.output {
            let spec = o.get_ref();
            if spec.path.trim().is_empty() {
                return ctx.err(o.span(), "output path is empty");
            }
            if outputs.iter().any(|x: &OutputSpec| x.path == spec.path) {
                return ctx.err(o.span(), format!("output path `{}` used twice", spec.path));
            }
            outputs.push(OutputSpec {
                table: spec.table,
                format: spec.format,
                path: spec.path.clone(),
            });
        }

        let proper = scenario.parties() - 1;
        let checks = match &raw.checks {
            None => Checks {
                brute_force: true,
                oracle: true,
                globality: family == Family::Ghz,
                distribution: family == Family::W,
                monotonicity: true,
                subsystem_size: 2.min(proper),
            },
            Some(c) => {
                let span = c.span();
                let c = c.get_ref();
                let subsystem_size = c.subsystem_size.unwrap_or(2.min(proper));
                if subsystem_size == 0 || subsystem_size > proper {
                    return ctx.err(
                        span,
                        format!("subsystem_size must lie in [1, {proper}], got {subsystem_size}"),
                    );
                }
                let globality = c.globality.unwrap_or(family == Family::Ghz);
                let distribution = c.distribution.unwrap_or(family == Family::W);
                if globality && family != Family::Ghz {
                    return ctx.err(span, "the globality check applies to GHZ scenarios only");
                }
                if distribution && family != Family::W {
                    return ctx.err(span, "the distribution check applies to W scenarios only");
                }
                Checks {
                    brute_force: c.brute_force.unwrap_or(true),
                    oracle: c.oracle.unwrap_or(true),
                    globality,
                    distribution,
                    monotonicity: c.monotonicity.unwrap_or(true),
                    subsystem_size,
                }
            }
        };

        Ok(Self {
            scenario,
            sweep,
            points,
            outputs,
            tolerance: tol,
            checks,
            output_dir: raw.output_dir.map(PathBuf::from),
            summary: raw.summary.unwrap_or_else(|| "summary.json".into()),
        })
    }
}

fn observer_from(ctx: &Ctx<'_>, o: &Spanned<RawObserver>) -> Result<Observer, ConfigError> {
    let span = o.span();
    let o = o.get_ref();
    match (o.s, o.a, o.omega) {
        (None, None, None) => Ok(Observer::inertial(o.name.clone())),
        (Some(s), None, None) => match AccelerationParameter::new(s) {
            Ok(s) => Ok(Observer::accelerated(o.name.clone(), s)),
            Err(e) => ctx.err(span, e.to_string()),
        },
        (None, Some(a), Some(omega)) => {
            match acceleration_parameter(PhysicalAcceleration { a, omega }) {
                Ok(c) => Ok(Observer::accelerated(o.name.clone(), c.s)),
                Err(e) => ctx.err(span, e.to_string()),
            }
        }
        _ => ctx.err(
            span,
            format!(
                "observer `{}` needs either `s` or both `a` and `omega`",
                o.name
            ),
        ),
    }
}
