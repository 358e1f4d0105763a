//! Sparse Fock-basis algebra over an ordered list of bosonic modes.
//!
//! Every state in this crate has real amplitudes, so kets map to `f64` and
//! density operators are real symmetric. Storage is ordered (`BTreeMap`) so
//! that iteration, and therefore every floating-point reduction built on it,
//! is deterministic. Amplitudes are dropped only when exactly zero; the only
//! source of truncation is the [`TruncationPolicy`] applied when a mode is
//! expanded, and the discarded probability is carried along as `tail_mass`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use smallvec::SmallVec;

use crate::rindler::TruncationPolicy;
use crate::{Error, Result};

/// Occupation number of a single mode.
pub type Occupation = u16;

/// Which family of modes a label refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Minkowski,
    RindlerI,
    RindlerII,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    name: String,
    region: Region,
}

impl ModeLabel {
    pub fn new(name: impl Into<String>, region: Region) -> Self {
        Self {
            name: name.into(),
            region,
        }
    }

    pub fn minkowski(name: impl Into<String>) -> Self {
        Self::new(name, Region::Minkowski)
    }

    pub fn rindler_i(name: impl Into<String>) -> Self {
        Self::new(name, Region::RindlerI)
    }

    pub fn rindler_ii(name: impl Into<String>) -> Self {
        Self::new(name, Region::RindlerII)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn region(&self) -> Region {
        self.region
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Occupation numbers, one per mode of the owning state or operator.
///
/// Kets order lexicographically by their occupation vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationKet(SmallVec<[Occupation; 8]>);

impl OccupationKet {
    pub fn new(occupations: impl IntoIterator<Item = Occupation>) -> Self {
        Self(occupations.into_iter().collect())
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(SmallVec::from_elem(0, modes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, mode: usize) -> Occupation {
        self.0[mode]
    }

    pub fn as_slice(&self) -> &[Occupation] {
        &self.0
    }

    /// Sub-ket on the given mode positions, in the order given.
    pub fn project(&self, positions: &[usize]) -> Self {
        Self(positions.iter().map(|&i| self.0[i]).collect())
    }

    /// Total excitation number.
    pub fn excitations(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    fn concat(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Self(out)
    }
}

impl From<Vec<Occupation>> for OccupationKet {
    fn from(v: Vec<Occupation>) -> Self {
        Self(SmallVec::from_vec(v))
    }
}

impl From<&[Occupation]> for OccupationKet {
    fn from(v: &[Occupation]) -> Self {
        Self(SmallVec::from_slice(v))
    }
}

impl<const N: usize> From<[Occupation; N]> for OccupationKet {
    fn from(v: [Occupation; N]) -> Self {
        Self(v.into_iter().collect())
    }
}

impl fmt::Display for OccupationKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("⟩")
    }
}

pub(crate) fn validate_modes(modes: &[ModeLabel]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for m in modes {
        if m.name.is_empty() {
            return Err(Error::Config("empty mode name".into()));
        }
        if !seen.insert(m.name.as_str()) {
            return Err(Error::Config(format!("duplicate mode name `{}`", m.name)));
        }
    }
    Ok(())
}

fn mode_position(modes: &[ModeLabel], name: &str) -> Option<usize> {
    modes.iter().position(|m| m.name == name)
}

/// Resolve a set of mode names to positions, sorted by position.
fn resolve_positions<S: AsRef<str>>(modes: &[ModeLabel], names: &[S]) -> Result<Vec<usize>> {
    let mut positions = BTreeSet::new();
    for name in names {
        let name = name.as_ref();
        let pos = mode_position(modes, name)
            .ok_or_else(|| Error::Argument(format!("unknown mode `{name}`")))?;
        positions.insert(pos);
    }
    Ok(positions.into_iter().collect())
}

fn complement(count: usize, positions: &[usize]) -> Vec<usize> {
    (0..count).filter(|i| !positions.contains(i)).collect()
}

/// Sparse real superposition of occupation kets.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    modes: Vec<ModeLabel>,
    amplitudes: BTreeMap<OccupationKet, f64>,
    policy: TruncationPolicy,
    tail_mass: f64,
}

impl PureState {
    /// Builds a state from `(ket, amplitude)` terms. Repeated kets are summed,
    /// exact zeros dropped.
    pub fn new(
        modes: Vec<ModeLabel>,
        terms: impl IntoIterator<Item = (OccupationKet, f64)>,
        policy: TruncationPolicy,
    ) -> Result<Self> {
        validate_modes(&modes)?;
        let mut amplitudes = BTreeMap::new();
        for (ket, amp) in terms {
            if ket.len() != modes.len() {
                return Err(Error::Config(format!(
                    "ket {ket} has {} entries for {} modes",
                    ket.len(),
                    modes.len()
                )));
            }
            if !amp.is_finite() {
                return Err(Error::Config(format!("non-finite amplitude on {ket}")));
            }
            *amplitudes.entry(ket).or_insert(0.0) += amp;
        }
        amplitudes.retain(|_, a| *a != 0.0);
        Ok(Self {
            modes,
            amplitudes,
            policy,
            tail_mass: 0.0,
        })
    }

    /// A single basis ket with amplitude one.
    pub fn basis(modes: Vec<ModeLabel>, ket: OccupationKet) -> Result<Self> {
        Self::new(modes, [(ket, 1.0)], TruncationPolicy::default())
    }

    pub(crate) fn from_parts(
        modes: Vec<ModeLabel>,
        amplitudes: BTreeMap<OccupationKet, f64>,
        policy: TruncationPolicy,
        tail_mass: f64,
    ) -> Self {
        debug_assert!(amplitudes.values().all(|a| *a != 0.0));
        Self {
            modes,
            amplitudes,
            policy,
            tail_mass,
        }
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        mode_position(&self.modes, name)
    }

    pub fn amplitudes(&self) -> &BTreeMap<OccupationKet, f64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, ket: &OccupationKet) -> f64 {
        self.amplitudes.get(ket).copied().unwrap_or(0.0)
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Squared norm, with compensated summation (states after several
    /// transforms hold ~10⁵ small terms).
    pub fn norm_sqr(&self) -> f64 {
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for a in self.amplitudes.values() {
            let x = a * a;
            let t = sum + x;
            carry += if sum.abs() >= x {
                (sum - t) + x
            } else {
                (x - t) + sum
            };
            sum = t;
        }
        sum + carry
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Probability discarded by truncation while building this state.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// The same state with modes permuted into the order given by `names`.
    pub fn reorder<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        if names.len() != self.modes.len() {
            return Err(Error::Argument(format!(
                "reorder needs all {} modes, got {}",
                self.modes.len(),
                names.len()
            )));
        }
        let mut positions = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let pos = self
                .mode_index(name)
                .ok_or_else(|| Error::Argument(format!("unknown mode `{name}`")))?;
            if positions.contains(&pos) {
                return Err(Error::Argument(format!("mode `{name}` listed twice")));
            }
            positions.push(pos);
        }
        let modes = positions.iter().map(|&p| self.modes[p].clone()).collect();
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(k, &a)| (k.project(&positions), a))
            .collect();
        Ok(Self::from_parts(
            modes,
            amplitudes,
            self.policy,
            self.tail_mass,
        ))
    }
}

/// `a ⊗ b` on the concatenated mode list.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    let mut modes = a.modes.clone();
    modes.extend(b.modes.iter().cloned());
    validate_modes(&modes)?;
    let mut amplitudes = BTreeMap::new();
    for (ka, &ca) in &a.amplitudes {
        for (kb, &cb) in &b.amplitudes {
            let amp = ca * cb;
            if amp != 0.0 {
                amplitudes.insert(ka.concat(kb), amp);
            }
        }
    }
    let tail_mass = a.tail_mass + b.tail_mass - a.tail_mass * b.tail_mass;
    Ok(PureState::from_parts(
        modes, amplitudes, a.policy, tail_mass,
    ))
}

/// Sparse real symmetric operator over occupation kets.
///
/// Both `(a, b)` and `(b, a)` are stored for off-diagonal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    modes: Vec<ModeLabel>,
    entries: BTreeMap<(OccupationKet, OccupationKet), f64>,
    policy: TruncationPolicy,
    tail_mass: f64,
    group_rank: usize,
}

impl DensityOperator {
    /// `|psi⟩⟨psi|`, built by direct outer product.
    pub fn projector(psi: &PureState) -> Self {
        let mut entries = BTreeMap::new();
        for (ka, &ca) in &psi.amplitudes {
            for (kb, &cb) in &psi.amplitudes {
                entries.insert((ka.clone(), kb.clone()), ca * cb);
            }
        }
        Self {
            modes: psi.modes.clone(),
            entries,
            policy: psi.policy,
            tail_mass: psi.tail_mass,
            group_rank: psi.len().max(1),
        }
    }

    /// Builds an operator from explicit entries; repeated keys are summed.
    /// Fails unless the result is exactly symmetric.
    pub fn from_entries(
        modes: Vec<ModeLabel>,
        entries: impl IntoIterator<Item = ((OccupationKet, OccupationKet), f64)>,
        policy: TruncationPolicy,
    ) -> Result<Self> {
        validate_modes(&modes)?;
        let mut map: BTreeMap<(OccupationKet, OccupationKet), f64> = BTreeMap::new();
        for ((a, b), v) in entries {
            if a.len() != modes.len() || b.len() != modes.len() {
                return Err(Error::Config(format!(
                    "entry ({a}, {b}) does not match {} modes",
                    modes.len()
                )));
            }
            *map.entry((a, b)).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        for ((a, b), v) in &map {
            let mirror = map.get(&(b.clone(), a.clone())).copied().unwrap_or(0.0);
            if mirror != *v {
                return Err(Error::Config(format!("entry ({a}, {b}) is not symmetric")));
            }
        }
        Ok(Self {
            modes,
            entries: map,
            policy,
            tail_mass: 0.0,
            group_rank: 1,
        })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn mode_names(&self) -> impl Iterator<Item = &str> {
        self.modes.iter().map(|m| m.name())
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        mode_position(&self.modes, name)
    }

    pub fn entries(&self) -> &BTreeMap<(OccupationKet, OccupationKet), f64> {
        &self.entries
    }

    pub fn entry(&self, row: &OccupationKet, col: &OccupationKet) -> f64 {
        // BTreeMap<(K, K), V> cannot be queried with borrowed halves.
        self.entries
            .get(&(row.clone(), col.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Probability discarded by truncation upstream of this operator.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Largest number of system kets any single environment sector
    /// contributed. Bounds the coherence lost per unit of discarded mass.
    pub fn group_rank(&self) -> usize {
        self.group_rank
    }

    pub fn trace(&self) -> f64 {
        trace(self)
    }

    pub fn diagonal(&self) -> impl Iterator<Item = (&OccupationKet, f64)> {
        self.entries
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|((a, _), &v)| (a, v))
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries
            .iter()
            .all(|((a, b), v)| self.entries.get(&(b.clone(), a.clone())) == Some(v))
    }

    /// Every ket that appears in a stored entry, sorted.
    pub fn support(&self) -> Vec<OccupationKet> {
        let kets: BTreeSet<&OccupationKet> = self.entries.keys().map(|(a, _)| a).collect();
        kets.into_iter().cloned().collect()
    }

    /// Dense matrix on the given kets (entries outside the list ignored).
    pub fn dense_block(&self, basis: &[OccupationKet]) -> Vec<Vec<f64>> {
        basis
            .iter()
            .map(|a| basis.iter().map(|b| self.entry(a, b)).collect())
            .collect()
    }

    /// Largest entrywise difference against an operator on the same modes.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.modes != other.modes {
            return Err(Error::Argument(
                "operators live on different mode lists".into(),
            ));
        }
        let mut worst = 0.0f64;
        for (k, v) in &self.entries {
            let w = other.entries.get(k).copied().unwrap_or(0.0);
            worst = worst.max((v - w).abs());
        }
        for (k, w) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(w.abs());
            }
        }
        Ok(worst)
    }
}

/// Sum of the diagonal entries.
pub fn trace(rho: &DensityOperator) -> f64 {
    rho.diagonal().map(|(_, v)| v).sum()
}

/// Traces out every mode not named in `keep`. The result keeps the original
/// relative mode order.
pub fn partial_trace<S: AsRef<str>>(rho: &DensityOperator, keep: &[S]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::Argument(
            "partial trace needs a nonempty keep set".into(),
        ));
    }
    let kept = resolve_positions(&rho.modes, keep)?;
    if kept.len() == rho.modes.len() {
        return Ok(rho.clone());
    }
    let traced = complement(rho.modes.len(), &kept);
    let mut entries: BTreeMap<(OccupationKet, OccupationKet), f64> = BTreeMap::new();
    for ((a, b), &v) in &rho.entries {
        if traced.iter().all(|&i| a.get(i) == b.get(i)) {
            *entries
                .entry((a.project(&kept), b.project(&kept)))
                .or_insert(0.0) += v;
        }
    }
    entries.retain(|_, v| *v != 0.0);
    Ok(DensityOperator {
        modes: kept.iter().map(|&i| rho.modes[i].clone()).collect(),
        entries,
        policy: rho.policy,
        tail_mass: rho.tail_mass,
        group_rank: rho.group_rank,
    })
}

/// `Tr_env |psi⟩⟨psi|` without forming the full outer product.
///
/// Amplitudes are grouped by their environment sub-ket; each group adds the
/// outer product of its system sub-vector.
pub fn reduce_over_environment<S: AsRef<str>>(
    psi: &PureState,
    env: &[S],
) -> Result<DensityOperator> {
    if env.is_empty() {
        return Err(Error::Argument("environment set is empty".into()));
    }
    let env_pos = resolve_positions(&psi.modes, env)?;
    let sys_pos = complement(psi.modes.len(), &env_pos);
    if sys_pos.is_empty() {
        return Err(Error::Argument(
            "tracing out every mode leaves no system".into(),
        ));
    }

    let mut groups: BTreeMap<OccupationKet, Vec<(OccupationKet, f64)>> = BTreeMap::new();
    for (ket, &amp) in &psi.amplitudes {
        groups
            .entry(ket.project(&env_pos))
            .or_default()
            .push((ket.project(&sys_pos), amp));
    }

    let mut entries: BTreeMap<(OccupationKet, OccupationKet), f64> = BTreeMap::new();
    let mut group_rank = 1;
    for block in groups.values() {
        group_rank = group_rank.max(block.len());
        for (a, ca) in block {
            for (b, cb) in block {
                *entries.entry((a.clone(), b.clone())).or_insert(0.0) += ca * cb;
            }
        }
    }
    entries.retain(|_, v| *v != 0.0);

    Ok(DensityOperator {
        modes: sys_pos.iter().map(|&i| psi.modes[i].clone()).collect(),
        entries,
        policy: psi.policy,
        tail_mass: psi.tail_mass,
        group_rank,
    })
}
