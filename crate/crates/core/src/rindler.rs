//! Minkowski-to-Rindler mode substitution for uniformly accelerated observers.
//!
//! A Minkowski vacuum seen by a Rindler observer is the two-mode squeezed state
//!
//! ```text
//! |0⟩_M = sech(s) Σ_n tanh^n(s) |n⟩_I |n⟩_II
//! |1⟩_M = sech²(s) Σ_n tanh^n(s) √(n+1) |n+1⟩_I |n⟩_II
//! ```
//!
//! where `sinh(s) = (exp(2πω/a) − 1)^{-1/2}`. Both sums are cut at a single
//! `n_max` per accelerated mode, sized so that the heavier one-particle tail
//! stays below the policy's `epsilon_trunc`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::fock::{ModeLabel, Occupation, OccupationKet, PureState, Region};
use crate::{Error, Result};

/// Dimensionless squeezing parameter `s ≥ 0`, finite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AccelerationParameter(f64);

impl AccelerationParameter {
    pub const ZERO: Self = Self(0.0);

    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::Argument(format!(
                "acceleration parameter must be finite and nonnegative, got {s}"
            )));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inertial(self) -> bool {
        self.0 == 0.0
    }
}

/// Proper acceleration `a` and mode frequency `omega`, natural units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalAcceleration {
    pub a: f64,
    pub omega: f64,
}

/// Result of converting a physical acceleration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvertedAcceleration {
    pub s: AccelerationParameter,
    /// `exp(2πω/a)` overflowed; `s` is reported as exactly zero.
    pub underflow: bool,
}

/// `s = asinh((exp(2πω/a) − 1)^{-1/2})`.
pub fn acceleration_parameter(phys: PhysicalAcceleration) -> Result<ConvertedAcceleration> {
    let PhysicalAcceleration { a, omega } = phys;
    if !(a > 0.0 && a.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Argument(format!(
            "acceleration and frequency must be positive and finite (a = {a}, omega = {omega})"
        )));
    }
    let excess = (2.0 * PI * omega / a).exp_m1();
    if !excess.is_finite() {
        return Ok(ConvertedAcceleration {
            s: AccelerationParameter::ZERO,
            underflow: true,
        });
    }
    let sinh_s = excess.sqrt().recip();
    Ok(ConvertedAcceleration {
        s: AccelerationParameter(sinh_s.asinh()),
        underflow: false,
    })
}

/// Admitted tail probability per accelerated mode and a hard cap on `n_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    epsilon_trunc: f64,
    hard_cap: u32,
}

impl TruncationPolicy {
    pub const DEFAULT_EPSILON: f64 = 1e-10;
    pub const DEFAULT_HARD_CAP: u32 = 5000;
    /// Largest cap representable with one Fock level of headroom.
    pub const MAX_HARD_CAP: u32 = Occupation::MAX as u32 - 1;

    pub fn new(epsilon_trunc: f64, hard_cap: u32) -> Result<Self> {
        if !(epsilon_trunc > 0.0 && epsilon_trunc < 1.0) {
            return Err(Error::Config(format!(
                "epsilon_trunc must lie in (0, 1), got {epsilon_trunc}"
            )));
        }
        if hard_cap == 0 || hard_cap > Self::MAX_HARD_CAP {
            return Err(Error::Config(format!(
                "hard_cap must lie in [1, {}], got {hard_cap}",
                Self::MAX_HARD_CAP
            )));
        }
        Ok(Self {
            epsilon_trunc,
            hard_cap,
        })
    }

    pub fn epsilon_trunc(&self) -> f64 {
        self.epsilon_trunc
    }

    pub fn hard_cap(&self) -> u32 {
        self.hard_cap
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            epsilon_trunc: Self::DEFAULT_EPSILON,
            hard_cap: Self::DEFAULT_HARD_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationLevel {
    pub n_max: u32,
    /// Discarded one-particle probability at `n_max`.
    pub tail: f64,
    /// The hard cap bound before the tail dropped below `epsilon_trunc`.
    pub capped: bool,
}

/// Discarded probability of the vacuum expansion: `tanh^{2(n_max+1)}(s)`.
pub fn vacuum_tail(s: AccelerationParameter, n_max: u32) -> f64 {
    let q = s.0.tanh().powi(2);
    q.powf(f64::from(n_max) + 1.0)
}

/// Discarded probability of the one-particle expansion,
/// `Σ_{n>n_max} (n+1) tanh^{2n}(s) sech⁴(s)`, summed in closed form.
pub fn one_particle_tail(s: AccelerationParameter, n_max: u32) -> f64 {
    let q = s.0.tanh().powi(2);
    let sech2 = s.0.cosh().powi(2).recip();
    one_particle_tail_from(q.powf(f64::from(n_max) + 1.0), q, sech2, n_max)
}

// With 1 − q = sech², Σ_{n>N}(n+1)qⁿ/cosh⁴ = q^{N+1}[(N+2)sech² + q].
fn one_particle_tail_from(q_pow: f64, q: f64, sech2: f64, n_max: u32) -> f64 {
    q_pow * ((f64::from(n_max) + 2.0) * sech2 + q)
}

/// Smallest `n_max` whose one-particle tail is within `epsilon_trunc`,
/// capped at the policy's hard cap.
pub fn truncation_level(s: AccelerationParameter, policy: &TruncationPolicy) -> TruncationLevel {
    let q = s.0.tanh().powi(2);
    let sech2 = s.0.cosh().powi(2).recip();
    let mut q_pow = q;
    let mut n_max = 0u32;
    loop {
        let tail = one_particle_tail_from(q_pow, q, sech2, n_max);
        if tail <= policy.epsilon_trunc {
            return TruncationLevel {
                n_max,
                tail,
                capped: false,
            };
        }
        if n_max >= policy.hard_cap {
            return TruncationLevel {
                n_max,
                tail,
                capped: true,
            };
        }
        n_max += 1;
        q_pow *= q;
    }
}

fn check_regions(mode_i: &ModeLabel, mode_ii: &ModeLabel) -> Result<()> {
    if mode_i.region() != Region::RindlerI || mode_ii.region() != Region::RindlerII {
        return Err(Error::Config(format!(
            "Unruh pair needs (RindlerI, RindlerII) modes, got ({:?}, {:?})",
            mode_i.region(),
            mode_ii.region()
        )));
    }
    Ok(())
}

/// Coefficients of the truncated vacuum expansion, index `n` for `|n⟩_I|n⟩_II`.
fn vacuum_coefficients(s: AccelerationParameter, n_max: u32) -> Vec<f64> {
    let (t, c) = (s.0.tanh(), s.0.cosh());
    (0..=n_max).map(|n| t.powi(n as i32) / c).collect()
}

/// Coefficients of the one-particle expansion, index `n` for `|n+1⟩_I|n⟩_II`.
fn one_particle_coefficients(s: AccelerationParameter, n_max: u32) -> Vec<f64> {
    let (t, c2) = (s.0.tanh(), s.0.cosh().powi(2));
    (0..=n_max)
        .map(|n| t.powi(n as i32) * f64::from(n + 1).sqrt() / c2)
        .collect()
}

fn pair_state(
    mode_i: ModeLabel,
    mode_ii: ModeLabel,
    policy: &TruncationPolicy,
    offset: Occupation,
    coefficients: Vec<f64>,
    tail: f64,
) -> Result<PureState> {
    check_regions(&mode_i, &mode_ii)?;
    let amplitudes: BTreeMap<_, _> = coefficients
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0.0)
        .map(|(n, c)| {
            let n = n as Occupation;
            (OccupationKet::from([n + offset, n]), c)
        })
        .collect();
    Ok(PureState::from_parts(
        vec![mode_i, mode_ii],
        amplitudes,
        *policy,
        tail,
    ))
}

/// The Minkowski vacuum as a truncated two-mode squeezed state.
pub fn unruh_vacuum(
    s: AccelerationParameter,
    policy: &TruncationPolicy,
    mode_i: ModeLabel,
    mode_ii: ModeLabel,
) -> Result<PureState> {
    check_regions(&mode_i, &mode_ii)?;
    let level = truncation_level(s, policy);
    let coefficients = vacuum_coefficients(s, level.n_max);
    pair_state(
        mode_i,
        mode_ii,
        policy,
        0,
        coefficients,
        vacuum_tail(s, level.n_max),
    )
}

/// The Minkowski single-particle state in the Rindler basis.
pub fn unruh_one_particle(
    s: AccelerationParameter,
    policy: &TruncationPolicy,
    mode_i: ModeLabel,
    mode_ii: ModeLabel,
) -> Result<PureState> {
    check_regions(&mode_i, &mode_ii)?;
    let level = truncation_level(s, policy);
    let coefficients = one_particle_coefficients(s, level.n_max);
    pair_state(mode_i, mode_ii, policy, 1, coefficients, level.tail)
}

/// Name of the region-I mode derived from a Minkowski mode.
pub fn region_i_name(mode: &str) -> String {
    format!("{mode}_I")
}

/// Name of the region-II mode derived from a Minkowski mode.
pub fn region_ii_name(mode: &str) -> String {
    format!("{mode}_II")
}

/// Substitutes the Minkowski mode `mode` by its Rindler pair.
///
/// The region-I mode takes the original position; the region-II mode is
/// appended at the end of the mode list. Every ket must hold 0 or 1
/// excitations in `mode`.
pub fn transform_mode(
    psi: &PureState,
    mode: &str,
    s: AccelerationParameter,
    policy: &TruncationPolicy,
) -> Result<PureState> {
    let pos = psi
        .mode_index(mode)
        .ok_or_else(|| Error::Argument(format!("unknown mode `{mode}`")))?;
    let label = &psi.modes()[pos];
    if label.region() != Region::Minkowski {
        return Err(Error::Config(format!(
            "mode `{mode}` is {:?}, only Minkowski modes can be transformed",
            label.region()
        )));
    }

    let mut modes = psi.modes().to_vec();
    modes[pos] = ModeLabel::rindler_i(region_i_name(mode));
    modes.push(ModeLabel::rindler_ii(region_ii_name(mode)));
    crate::fock::validate_modes(&modes)?;

    let level = truncation_level(s, policy);
    let vacuum = vacuum_coefficients(s, level.n_max);
    let one = one_particle_coefficients(s, level.n_max);
    let vac_tail = vacuum_tail(s, level.n_max);

    let mut amplitudes = BTreeMap::new();
    let mut discarded = 0.0;
    for (ket, &amp) in psi.amplitudes() {
        let (coefficients, offset, tail) = match ket.get(pos) {
            0 => (&vacuum, 0, vac_tail),
            1 => (&one, 1, level.tail),
            n => {
                return Err(Error::Unsupported(format!(
                    "occupation {n} in mode `{mode}`; only 0 and 1 can be expanded"
                )))
            }
        };
        discarded += amp * amp * tail;
        for (n, &c) in coefficients.iter().enumerate() {
            let value = amp * c;
            if value == 0.0 {
                continue;
            }
            let n = n as Occupation;
            let mut occ: Vec<Occupation> = ket.as_slice().to_vec();
            occ[pos] = n + offset;
            occ.push(n);
            amplitudes.insert(OccupationKet::from(occ), value);
        }
    }

    // Substitution images of distinct kets are orthogonal, so the removed
    // probability adds up linearly across kets.
    let tail_mass = psi.tail_mass() + discarded;
    Ok(PureState::from_parts(modes, amplitudes, *policy, tail_mass))
}
