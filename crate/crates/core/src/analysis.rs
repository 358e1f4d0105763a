//! Subsystem coherence maps and the structural checks built on them: GHZ
//! coherence is purely global, W coherence is a sum of pair coherences.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::coherence::{
    bipartite_w_coherence, closed_ghz_coherence, closed_w_coherence, l1_coherence, series_f,
    CoherenceValue, Method, PairKind, SeriesTolerance,
};
use crate::fock::{partial_trace, DensityOperator};
use crate::rindler::{AccelerationParameter, TruncationLevel};
use crate::states::{scenario_density, Family, Motion, ScenarioConfig};
use crate::{Error, Result};

/// Threshold for "no coherence" in GHZ subsystems.
pub const GLOBALITY_THRESHOLD: f64 = 1e-12;
/// Threshold on the closed-form W distribution residual.
pub const DISTRIBUTION_CLOSED_THRESHOLD: f64 = 1e-9;
/// Threshold on the brute-force W distribution residual.
pub const DISTRIBUTION_BRUTE_THRESHOLD: f64 = 1e-6;
/// Threshold on `|closed form − brute force|`.
pub const ORACLE_THRESHOLD: f64 = 1e-6;

/// Mode names of a subsystem, sorted.
pub type Subsystem = Vec<String>;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Brute-force coherence of every subsystem with at most `upto` modes.
pub fn subsystem_coherence_map(
    rho: &DensityOperator,
    upto: usize,
) -> Result<BTreeMap<Subsystem, CoherenceValue>> {
    let names: Vec<String> = rho.mode_names().map(str::to_string).collect();
    if upto == 0 || upto > names.len() {
        return Err(Error::Argument(format!(
            "subset size bound must lie in [1, {}], got {upto}",
            names.len()
        )));
    }
    let subsets: Vec<Vec<String>> = (1..=upto)
        .flat_map(|k| combinations(names.len(), k))
        .map(|idx| idx.into_iter().map(|i| names[i].clone()).collect())
        .collect();
    let values = subsets
        .par_iter()
        .map(|subset| {
            let reduced = partial_trace(rho, subset)?;
            l1_coherence(&reduced)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(subsets
        .into_iter()
        .zip(values)
        .map(|(mut subset, v)| {
            subset.sort();
            (subset, v)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalityCheck {
    /// Largest coherence found in a proper subsystem.
    pub residual: f64,
    pub worst: Option<Subsystem>,
    pub subsets_checked: usize,
}

impl GlobalityCheck {
    pub fn passes(&self) -> bool {
        self.residual <= GLOBALITY_THRESHOLD
    }
}

/// Maximum brute-force coherence over proper subsystems of a GHZ scenario,
/// of size up to `max_size` (default: all proper subsystems).
pub fn check_ghz_globality(
    cfg: &ScenarioConfig,
    max_size: Option<usize>,
) -> Result<GlobalityCheck> {
    if cfg.family() != Family::Ghz {
        return Err(Error::Argument(
            "globality check needs a GHZ scenario".into(),
        ));
    }
    let rho = scenario_density(cfg)?;
    let proper = cfg.parties() - 1;
    let upto = max_size.unwrap_or(proper).clamp(1, proper);
    let map = subsystem_coherence_map(&rho, upto)?;
    let (worst, residual) =
        map.iter()
            .map(|(k, v)| (k, v.value))
            .fold((None, 0.0f64), |(wk, wv), (k, v)| {
                if v > wv {
                    (Some(k.clone()), v)
                } else {
                    (wk, wv)
                }
            });
    Ok(GlobalityCheck {
        residual,
        worst,
        subsets_checked: map.len(),
    })
}

fn pair_kind(
    a: Motion,
    b: Motion,
) -> (
    PairKind,
    Option<AccelerationParameter>,
    Option<AccelerationParameter>,
) {
    match (a, b) {
        (Motion::Accelerated(x), Motion::Accelerated(y)) => (PairKind::AccAcc, Some(x), Some(y)),
        (Motion::Accelerated(x), Motion::Inertial) | (Motion::Inertial, Motion::Accelerated(x)) => {
            (PairKind::AccInertial, Some(x), None)
        }
        (Motion::Inertial, Motion::Inertial) => (PairKind::InertialInertial, None, None),
    }
}

/// Closed-form total coherence of the scenario.
pub fn closed_coherence(cfg: &ScenarioConfig, tol: &SeriesTolerance) -> Result<CoherenceValue> {
    let params = cfg.accelerations();
    match cfg.family() {
        Family::Ghz => closed_ghz_coherence(&params, tol),
        Family::W => closed_w_coherence(cfg.parties(), &params, tol),
    }
}

/// Closed-form coherence of the subsystem on the given region-I mode names.
///
/// GHZ: zero for every proper subsystem. W: the sum of the pair coherences
/// inside the subsystem, since every off-diagonal element links two kets
/// that differ in exactly two modes.
pub fn closed_subsystem_coherence<S: AsRef<str>>(
    cfg: &ScenarioConfig,
    modes: &[S],
    tol: &SeriesTolerance,
) -> Result<CoherenceValue> {
    let region_i = cfg.region_i_modes();
    let mut members = Vec::with_capacity(modes.len());
    for m in modes {
        let m = m.as_ref();
        let idx = region_i
            .iter()
            .position(|n| n == m)
            .ok_or_else(|| Error::Argument(format!("unknown mode `{m}`")))?;
        if !members.contains(&idx) {
            members.push(idx);
        }
    }
    if members.is_empty() {
        return Err(Error::Argument("empty subsystem".into()));
    }
    members.sort_unstable();
    if members.len() == cfg.parties() {
        return closed_coherence(cfg, tol);
    }
    match cfg.family() {
        Family::Ghz => Ok(CoherenceValue {
            value: 0.0,
            method: Method::ClosedForm,
            error_budget: 0.0,
        }),
        Family::W => {
            let observers = cfg.observers();
            let mut value = 0.0;
            let mut error_budget = 0.0;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let (kind, si, sj) = pair_kind(observers[i].motion, observers[j].motion);
                    let c = bipartite_w_coherence(kind, cfg.parties(), si, sj, tol)?;
                    value += c.value;
                    error_budget += c.error_budget;
                }
            }
            Ok(CoherenceValue {
                value,
                method: Method::ClosedForm,
                error_budget,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionResiduals {
    /// `|Σ_pairs C_pair − C_total|` from the closed forms.
    pub closed_form: f64,
    /// The same from brute-force density operators, `None` when the
    /// scenario exceeds the truncation cap or memory budget.
    pub brute_force: Option<f64>,
    pub closed_total: f64,
    pub closed_pair_sum: f64,
    pub brute_total: Option<f64>,
    pub brute_pair_sum: Option<f64>,
}

impl DistributionResiduals {
    pub fn passes(&self) -> bool {
        self.closed_form <= DISTRIBUTION_CLOSED_THRESHOLD
            && self
                .brute_force
                .is_none_or(|r| r <= DISTRIBUTION_BRUTE_THRESHOLD)
    }
}

/// Closed-form `(pair sum, total)` for a W scenario.
pub fn closed_w_distribution(cfg: &ScenarioConfig, tol: &SeriesTolerance) -> Result<(f64, f64)> {
    if cfg.family() != Family::W {
        return Err(Error::Argument(
            "distribution check needs a W scenario".into(),
        ));
    }
    let observers = cfg.observers();
    let mut pair_sum = 0.0;
    for i in 0..observers.len() {
        for j in (i + 1)..observers.len() {
            let (kind, si, sj) = pair_kind(observers[i].motion, observers[j].motion);
            pair_sum += bipartite_w_coherence(kind, cfg.parties(), si, sj, tol)?.value;
        }
    }
    let total = closed_coherence(cfg, tol)?.value;
    Ok((pair_sum, total))
}

/// Brute-force `(pair sum, total)` from an already built region-I operator.
pub fn brute_w_distribution(rho: &DensityOperator) -> Result<(f64, f64)> {
    let map = subsystem_coherence_map(rho, 2)?;
    let pair_sum = map
        .iter()
        .filter(|(k, _)| k.len() == 2)
        .map(|(_, v)| v.value)
        .sum();
    Ok((pair_sum, l1_coherence(rho)?.value))
}

/// Residuals of "total W coherence equals the sum over all pairs".
pub fn check_w_distribution(
    cfg: &ScenarioConfig,
    tol: &SeriesTolerance,
) -> Result<DistributionResiduals> {
    let (closed_pair_sum, closed_total) = closed_w_distribution(cfg, tol)?;
    let brute = match scenario_density(cfg) {
        Ok(rho) => Some(brute_w_distribution(&rho)?),
        Err(Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(DistributionResiduals {
        closed_form: (closed_pair_sum - closed_total).abs(),
        brute_force: brute.map(|(p, t)| (p - t).abs()),
        closed_total,
        closed_pair_sum,
        brute_total: brute.map(|(_, t)| t),
        brute_pair_sum: brute.map(|(p, _)| p),
    })
}

/// Family, party count and number of accelerated observers for a sweep in
/// which all accelerated observers share one parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepTemplate {
    pub family: Family,
    pub parties: usize,
    pub accelerated: usize,
}

impl SweepTemplate {
    pub fn closed_at(
        &self,
        s: AccelerationParameter,
        tol: &SeriesTolerance,
    ) -> Result<CoherenceValue> {
        let params = vec![s; self.accelerated];
        match self.family {
            Family::Ghz => closed_ghz_coherence(&params, tol),
            Family::W => closed_w_coherence(self.parties, &params, tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicitySweep {
    /// `(s, closed-form coherence)`.
    pub rows: Vec<(f64, f64)>,
    pub strictly_decreasing: bool,
}

impl MonotonicitySweep {
    /// Largest step-to-step increase; negative when strictly decreasing.
    pub fn max_increment(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Closed-form coherence along an ascending grid of equal acceleration
/// parameters.
pub fn monotonicity_sweep(
    template: SweepTemplate,
    grid: &[f64],
    tol: &SeriesTolerance,
) -> Result<MonotonicitySweep> {
    if grid.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("grid must be strictly ascending".into()));
    }
    if template.accelerated > template.parties || template.parties < 2 {
        return Err(Error::Argument(format!(
            "invalid counts: {} accelerated among {} parties",
            template.accelerated, template.parties
        )));
    }
    let rows = grid
        .iter()
        .map(|&s| {
            let v = template.closed_at(AccelerationParameter::new(s)?, tol)?;
            Ok((s, v.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(MonotonicitySweep {
        rows,
        strictly_decreasing,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub truncation: Vec<(String, TruncationLevel)>,
    /// Series terms used for each accelerated observer's attenuation factor.
    pub series_terms: Vec<(String, u64)>,
    pub nnz: usize,
    pub trace: f64,
}

/// Brute-force and closed-form coherence of one scenario and its subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub scenario: ScenarioConfig,
    pub total: CoherenceValue,
    pub closed_form: CoherenceValue,
    pub subsystems: BTreeMap<Subsystem, CoherenceValue>,
    pub residuals: BTreeMap<String, f64>,
    pub diagnostics: Diagnostics,
}

pub fn coherence_report(
    cfg: &ScenarioConfig,
    upto: usize,
    tol: &SeriesTolerance,
) -> Result<CoherenceReport> {
    let rho = scenario_density(cfg)?;
    let total = l1_coherence(&rho)?;
    let closed_form = closed_coherence(cfg, tol)?;
    let proper = upto.min(cfg.parties() - 1).max(1);
    let subsystems = subsystem_coherence_map(&rho, proper)?;

    let mut residuals = BTreeMap::new();
    residuals.insert(
        "oracle".to_string(),
        (closed_form.value - total.value).abs(),
    );
    match cfg.family() {
        Family::Ghz => {
            let worst = subsystems.values().map(|v| v.value).fold(0.0, f64::max);
            residuals.insert("ghz_globality".to_string(), worst);
        }
        Family::W => {
            let (pairs, closed_total) = closed_w_distribution(cfg, tol)?;
            residuals.insert(
                "w_distribution_closed".to_string(),
                (pairs - closed_total).abs(),
            );
            if proper >= 2 {
                let brute_pairs: f64 = subsystems
                    .iter()
                    .filter(|(k, _)| k.len() == 2)
                    .map(|(_, v)| v.value)
                    .sum();
                residuals.insert(
                    "w_distribution_brute".to_string(),
                    (brute_pairs - total.value).abs(),
                );
            }
        }
    }

    let series_terms = cfg
        .observers()
        .iter()
        .filter_map(|o| o.motion.parameter().map(|s| (o.name.clone(), s)))
        .map(|(name, s)| Ok((name, series_f(s, tol)?.terms)))
        .collect::<Result<Vec<_>>>()?;

    Ok(CoherenceReport {
        scenario: cfg.clone(),
        total,
        closed_form,
        subsystems,
        residuals,
        diagnostics: Diagnostics {
            truncation: cfg.truncation_levels(),
            series_terms,
            nnz: rho.nnz(),
            trace: rho.trace(),
        },
    })
}
