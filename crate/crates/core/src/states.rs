//! Initial GHZ/W states and the scenario pipeline that turns them into
//! region-I density operators.

use std::collections::BTreeSet;
use std::fmt;

use crate::fock::{
    reduce_over_environment, DensityOperator, ModeLabel, Occupation, OccupationKet, PureState,
    Region,
};
use crate::rindler::{
    region_i_name, transform_mode, truncation_level, AccelerationParameter, TruncationLevel,
    TruncationPolicy,
};
use crate::{Error, Result};

/// Default guard on the number of stored density-matrix entries.
pub const DEFAULT_MEMORY_BUDGET: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Ghz,
    W,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Ghz => "ghz",
            Family::W => "w",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(Family::Ghz),
            "w" => Ok(Family::W),
            other => Err(Error::Config(format!("unknown state family `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Motion {
    Inertial,
    Accelerated(AccelerationParameter),
}

impl Motion {
    pub fn parameter(self) -> Option<AccelerationParameter> {
        match self {
            Motion::Inertial => None,
            Motion::Accelerated(s) => Some(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observer {
    pub name: String,
    pub motion: Motion,
}

impl Observer {
    pub fn inertial(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            motion: Motion::Inertial,
        }
    }

    pub fn accelerated(name: impl Into<String>, s: AccelerationParameter) -> Self {
        Self {
            name: name.into(),
            motion: Motion::Accelerated(s),
        }
    }
}

/// Default party names: `A`, `B`, ... for up to 26 parties, `O1`..`ON` beyond.
pub fn default_mode_names(parties: usize) -> Vec<String> {
    if parties <= 26 {
        (0..parties)
            .map(|i| char::from(b'A' + i as u8).to_string())
            .collect()
    } else {
        (1..=parties).map(|i| format!("O{i}")).collect()
    }
}

/// One state family shared by `N` observers, each inertial or accelerated.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    family: Family,
    observers: Vec<Observer>,
    policy: TruncationPolicy,
    memory_budget: usize,
}

impl ScenarioConfig {
    pub fn new(family: Family, observers: Vec<Observer>, policy: TruncationPolicy) -> Result<Self> {
        if observers.len() < 2 {
            return Err(Error::Config(format!(
                "a scenario needs at least 2 parties, got {}",
                observers.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for o in &observers {
            if o.name.is_empty() || o.name.ends_with("_I") || o.name.ends_with("_II") {
                return Err(Error::Config(format!(
                    "observer name `{}` is empty or uses a reserved Rindler suffix",
                    o.name
                )));
            }
            if !seen.insert(o.name.as_str()) {
                return Err(Error::Config(format!("duplicate observer `{}`", o.name)));
            }
        }
        Ok(Self {
            family,
            observers,
            policy,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        })
    }

    /// `parties` observers with default names, the trailing ones accelerated
    /// with the given parameters.
    pub fn trailing(family: Family, parties: usize, accelerations: &[f64]) -> Result<Self> {
        Self::trailing_with_policy(family, parties, accelerations, TruncationPolicy::default())
    }

    pub fn trailing_with_policy(
        family: Family,
        parties: usize,
        accelerations: &[f64],
        policy: TruncationPolicy,
    ) -> Result<Self> {
        if accelerations.len() > parties {
            return Err(Error::Config(format!(
                "{} accelerated observers among {parties} parties",
                accelerations.len()
            )));
        }
        let inertial = parties - accelerations.len();
        let observers = default_mode_names(parties)
            .into_iter()
            .enumerate()
            .map(|(i, name)| {
                if i < inertial {
                    Ok(Observer::inertial(name))
                } else {
                    Ok(Observer::accelerated(
                        name,
                        AccelerationParameter::new(accelerations[i - inertial])?,
                    ))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(family, observers, policy)
    }

    pub fn with_memory_budget(mut self, entries: usize) -> Self {
        self.memory_budget = entries;
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parties(&self) -> usize {
        self.observers.len()
    }

    pub fn observers(&self) -> &[Observer] {
        &self.observers
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn memory_budget(&self) -> usize {
        self.memory_budget
    }

    /// Acceleration parameters of the accelerated observers, in observer order.
    pub fn accelerations(&self) -> Vec<AccelerationParameter> {
        self.observers
            .iter()
            .filter_map(|o| o.motion.parameter())
            .collect()
    }

    pub fn accelerated_count(&self) -> usize {
        self.accelerations().len()
    }

    /// Mode names of the region-I operator produced by [`scenario_density`].
    pub fn region_i_modes(&self) -> Vec<String> {
        self.observers
            .iter()
            .map(|o| match o.motion {
                Motion::Inertial => o.name.clone(),
                Motion::Accelerated(_) => region_i_name(&o.name),
            })
            .collect()
    }

    /// Truncation level per accelerated observer.
    pub fn truncation_levels(&self) -> Vec<(String, TruncationLevel)> {
        self.observers
            .iter()
            .filter_map(|o| {
                o.motion
                    .parameter()
                    .map(|s| (o.name.clone(), truncation_level(s, &self.policy)))
            })
            .collect()
    }

    /// A copy with every accelerated observer's parameter replaced, in order.
    pub fn with_accelerations(&self, params: &[AccelerationParameter]) -> Result<Self> {
        if params.len() != self.accelerated_count() {
            return Err(Error::Argument(format!(
                "expected {} acceleration parameters, got {}",
                self.accelerated_count(),
                params.len()
            )));
        }
        let mut out = self.clone();
        let mut it = params.iter();
        for o in &mut out.observers {
            if let Motion::Accelerated(s) = &mut o.motion {
                *s = *it.next().expect("length checked");
            }
        }
        Ok(out)
    }

    /// Estimated size of the region-I operator: `(dimension, stored entries)`.
    pub fn size_estimate(&self) -> (f64, f64) {
        let levels = self.truncation_levels();
        let n = levels.len() as i32;
        let inertial = (self.parties() as i32) - n;
        let dimension = 2f64.powi(inertial)
            * levels
                .iter()
                .map(|(_, l)| f64::from(l.n_max) + 2.0)
                .product::<f64>();
        let sectors: f64 = levels
            .iter()
            .map(|(_, l)| f64::from(l.n_max) + 1.0)
            .product();
        let support = match self.family {
            Family::Ghz => 2.0,
            Family::W => self.parties() as f64,
        };
        (dimension, sectors * support * support)
    }
}

fn minkowski_modes(names: &[String]) -> Vec<ModeLabel> {
    names.iter().map(ModeLabel::minkowski).collect()
}

fn check_parties(parties: usize) -> Result<()> {
    if parties < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 parties, got {parties}"
        )));
    }
    Ok(())
}

/// `(|0…0⟩ + |1…1⟩)/√2` on the given Minkowski modes.
pub fn ghz_state_on(names: &[String]) -> Result<PureState> {
    check_parties(names.len())?;
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let n = names.len();
    PureState::new(
        minkowski_modes(names),
        [
            (OccupationKet::vacuum(n), amp),
            (OccupationKet::new(std::iter::repeat_n(1, n)), amp),
        ],
        TruncationPolicy::default(),
    )
}

/// `N`-partite GHZ state on default mode names.
pub fn ghz_state(parties: usize) -> Result<PureState> {
    check_parties(parties)?;
    ghz_state_on(&default_mode_names(parties))
}

/// `N^{-1/2} Σ_k |0…1_k…0⟩` on the given Minkowski modes.
pub fn w_state_on(names: &[String]) -> Result<PureState> {
    check_parties(names.len())?;
    let n = names.len();
    let amp = (n as f64).sqrt().recip();
    let terms = (0..n).map(|k| {
        let occ: Vec<Occupation> = (0..n).map(|i| Occupation::from(i == k)).collect();
        (OccupationKet::from(occ), amp)
    });
    PureState::new(minkowski_modes(names), terms, TruncationPolicy::default())
}

/// `N`-partite W state on default mode names.
pub fn w_state(parties: usize) -> Result<PureState> {
    check_parties(parties)?;
    w_state_on(&default_mode_names(parties))
}

/// The untransformed initial state of a scenario.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<PureState> {
    let names: Vec<String> = cfg.observers.iter().map(|o| o.name.clone()).collect();
    match cfg.family {
        Family::Ghz => ghz_state_on(&names),
        Family::W => w_state_on(&names),
    }
}

/// The full state on region-I, inertial and region-II modes, before tracing.
pub fn scenario_state(cfg: &ScenarioConfig) -> Result<PureState> {
    check_budget(cfg)?;
    let mut psi = initial_state(cfg)?;
    for o in &cfg.observers {
        if let Motion::Accelerated(s) = o.motion {
            psi = transform_mode(&psi, &o.name, s, &cfg.policy)?;
        }
    }
    Ok(psi)
}

fn check_budget(cfg: &ScenarioConfig) -> Result<()> {
    for (name, level) in cfg.truncation_levels() {
        if level.capped {
            return Err(Error::Resource(format!(
                "observer `{name}` needs more than {} Fock levels to reach a tail of {:e}",
                cfg.policy.hard_cap(),
                cfg.policy.epsilon_trunc()
            )));
        }
    }
    let (dimension, entries) = cfg.size_estimate();
    if entries > cfg.memory_budget as f64 {
        return Err(Error::Resource(format!(
            "region-I operator of dimension {dimension:.0} needs ~{entries:.0} entries, budget is {}",
            cfg.memory_budget
        )));
    }
    Ok(())
}

/// Region-I density operator: initial state, Unruh substitution of every
/// accelerated observer, then trace over all region-II modes.
pub fn scenario_density(cfg: &ScenarioConfig) -> Result<DensityOperator> {
    let psi = scenario_state(cfg)?;
    let env: Vec<String> = psi
        .modes()
        .iter()
        .filter(|m| m.region() == Region::RindlerII)
        .map(|m| m.name().to_string())
        .collect();
    if env.is_empty() {
        return Ok(DensityOperator::projector(&psi));
    }
    reduce_over_environment(&psi, &env)
}
