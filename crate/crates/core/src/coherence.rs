//! l1-norm coherence: brute force on density operators, closed-form series
//! expressions, and their infinite-acceleration limits.
//!
//! Every closed form is built from one attenuation factor per accelerated
//! observer,
//!
//! ```text
//! f(s) = sech³(s) Σ_{m≥0} √(m+1) tanh^{2m}(s)
//! ```
//!
//! which decreases from `f(0) = 1` to `√π/2` as `s → ∞`. For moderate `s` the
//! series is summed directly with a rigorous ratio bound on the tail. Past
//! [`ASYMPTOTIC_THRESHOLD`] the number of terms grows like `cosh²(s)`, so the
//! sum is instead evaluated as `Li_{-1/2}(tanh² s) / tanh² s` through the
//! expansion of the polylogarithm around unit argument.

use std::f64::consts::PI;

use crate::fock::{DensityOperator, Region};
use crate::rindler::AccelerationParameter;
use crate::states::Family;
use crate::{Error, Result};

/// `Γ(3/2) = √π/2`, the limit of `f(s)`.
pub const SQRT_PI_OVER_2: f64 = 0.886_226_925_452_758_f64;

/// Above this acceleration parameter `series_f` switches to the
/// polylogarithm expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTolerance {
    rel_tol: f64,
    max_terms: u64,
}

impl SeriesTolerance {
    pub const DEFAULT_REL_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_TERMS: u64 = 50_000_000;

    pub fn new(rel_tol: f64, max_terms: u64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::Config("max_terms must be positive".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    ClosedForm,
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceValue {
    pub value: f64,
    pub method: Method,
    /// Bound on the deviation from the untruncated value.
    pub error_budget: f64,
}

/// Sum of `|ρ_ij|` over off-diagonal entries in the occupation basis.
///
/// The error budget bounds the coherence carried by the discarded
/// truncation tail: an environment sector with `d` system kets and weight
/// `p` contributes at most `(d − 1) p`.
pub fn l1_coherence(rho: &DensityOperator) -> Result<CoherenceValue> {
    if let Some(m) = rho.modes().iter().find(|m| m.region() == Region::RindlerII) {
        return Err(Error::Contract(format!(
            "mode `{}` lies in Rindler region II and must be traced out first",
            m.name()
        )));
    }
    let value = rho
        .entries()
        .iter()
        .filter(|((a, b), _)| a != b)
        .map(|(_, v)| v.abs())
        .fold((0.0f64, 0.0f64), |(sum, carry), x| {
            let t = sum + x;
            (
                t,
                carry
                    + if sum >= x {
                        (sum - t) + x
                    } else {
                        (x - t) + sum
                    },
            )
        });
    let value = value.0 + value.1;
    let error_budget = (rho.group_rank().saturating_sub(1)) as f64 * rho.tail_mass();
    Ok(CoherenceValue {
        value,
        method: Method::BruteForce,
        error_budget,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesRoute {
    Direct,
    Asymptotic,
}

/// A value of `f(s)`. The true value lies in `[value − abs_error, value + abs_error]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub abs_error: f64,
    pub terms: u64,
    pub route: SeriesRoute,
}

/// `f(s)`, by direct summation up to [`ASYMPTOTIC_THRESHOLD`] and by the
/// polylogarithm expansion beyond it.
pub fn series_f(s: AccelerationParameter, tol: &SeriesTolerance) -> Result<SeriesValue> {
    if s.value() > ASYMPTOTIC_THRESHOLD {
        Ok(series_f_asymptotic(s))
    } else {
        series_f_direct(s, tol)
    }
}

/// `sech(s)` without overflow for large `s`.
fn sech(s: f64) -> f64 {
    let t = (-s).exp();
    2.0 * t / (1.0 + t * t)
}

/// Direct partial sums of `Σ √(m+1) x^m`, `x = tanh²(s)`.
///
/// After term `M` the remaining terms are majorised by a geometric series of
/// ratio `q = x √((M+2)/(M+1))`; summation stops once
/// `term(M+1)/(1 − q) ≤ rel_tol · partial`.
pub fn series_f_direct(s: AccelerationParameter, tol: &SeriesTolerance) -> Result<SeriesValue> {
    let x = s.value().tanh().powi(2);
    let scale = sech(s.value()).powi(3);

    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    let mut x_pow = 1.0f64;
    let mut m: u64 = 0;
    loop {
        let term = ((m + 1) as f64).sqrt() * x_pow;
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
        let partial = sum + compensation;

        let next = m + 1;
        x_pow = if next.is_multiple_of(64) {
            x.powf(next as f64)
        } else {
            x_pow * x
        };
        let ratio = x * ((next + 1) as f64 / next as f64).sqrt();
        let next_term = ((next + 1) as f64).sqrt() * x_pow;
        let tail = if next_term == 0.0 {
            0.0
        } else if ratio < 1.0 {
            next_term / (1.0 - ratio)
        } else {
            f64::INFINITY
        };

        if tail <= tol.rel_tol * partial {
            return Ok(SeriesValue {
                value: scale * partial,
                abs_error: scale * tail,
                terms: next,
                route: SeriesRoute::Direct,
            });
        }
        if next >= tol.max_terms {
            return Err(Error::Convergence {
                terms: next,
                achieved: tail / partial,
            });
        }
        m = next;
    }
}

/// `f(s)` from `Σ √(m+1) x^m = Li_{-1/2}(x)/x` and
///
/// ```text
/// Li_{-1/2}(e^μ) = Γ(3/2)(−μ)^{-3/2} + Σ_k ζ(−1/2 − k) μ^k / k!,   |μ| < 2π.
/// ```
///
/// Everything is written in `t = exp(−2s)`, so that `μ = −4 atanh(t)` and the
/// leading term is `Γ(3/2) (t / atanh t)^{3/2} / (1+t)³` after the `sech³`
/// prefactor, which stays finite for arbitrarily large `s`.
pub fn series_f_asymptotic(s: AccelerationParameter) -> SeriesValue {
    let t = (-2.0 * s.value()).exp();
    let atanh_t = t.atanh();
    let x = ((1.0 - t) / (1.0 + t)).powi(2);
    let mu = -4.0 * atanh_t;
    let sech3 = (2.0 * t.sqrt() / (1.0 + t)).powi(3);

    let ratio = if t == 0.0 { 1.0 } else { t / atanh_t };
    let singular = SQRT_PI_OVER_2 * ratio.powf(1.5) / (1.0 + t).powi(3);

    let coefficients = polylog_neg_half_coefficients();
    let mut regular = 0.0;
    let mut mu_pow = 1.0;
    let mut terms = 0;
    let mut remainder = 0.0;
    for (k, c) in coefficients.iter().enumerate() {
        let term = c * mu_pow;
        regular += term;
        terms = k as u64 + 1;
        mu_pow *= mu;
        remainder = (coefficients.get(k + 1).copied().unwrap_or(0.0) * mu_pow).abs();
        if remainder <= 1e-18 * regular.abs().max(1e-300) {
            break;
        }
    }
    let value = (singular + sech3 * regular) / x;
    // The omitted coefficients shrink at least geometrically with ratio |μ|/2π.
    let abs_error = 2.0 * sech3 * remainder / x + 16.0 * f64::EPSILON * value;
    SeriesValue {
        value,
        abs_error,
        terms,
        route: SeriesRoute::Asymptotic,
    }
}

/// `ζ(−1/2 − k)/k!` for `k = 0, 1, ...`, from the reflection formula
/// `ζ(1 − z) = 2 (2π)^{−z} cos(πz/2) Γ(z) ζ(z)` at `z = k + 3/2`.
fn polylog_neg_half_coefficients() -> [f64; 40] {
    let mut out = [0.0; 40];
    let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    // Γ(z)/k! (2π)^{-z}, updated incrementally.
    let mut gamma_over_fact = SQRT_PI_OVER_2 * (2.0 * PI).powf(-1.5);
    for (k, slot) in out.iter_mut().enumerate() {
        let z = k as f64 + 1.5;
        let cos = match k % 4 {
            0 | 1 => -half_sqrt2,
            _ => half_sqrt2,
        };
        *slot = 2.0 * cos * gamma_over_fact * zeta(z);
        gamma_over_fact *= z / ((k + 1) as f64 * 2.0 * PI);
    }
    out
}

/// Riemann zeta for real `x > 1` by Euler–Maclaurin summation.
pub(crate) fn zeta(x: f64) -> f64 {
    debug_assert!(x > 1.0);
    const N: f64 = 16.0;
    // B_{2j} / (2j)!
    const B_OVER_FACT: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
        -3617.0 / 10_670_622_842_880_000.0,
    ];
    let head: f64 = (1..16).map(|n| (n as f64).powf(-x)).sum();
    let mut total = head + N.powf(1.0 - x) / (x - 1.0) + 0.5 * N.powf(-x);
    // Rising factorial x(x+1)…(x+2j−2) times N^{−x−2j+1}.
    let mut factor = x * N.powf(-x - 1.0);
    for (j, b) in B_OVER_FACT.iter().enumerate() {
        total += b * factor;
        let a = x + 2.0 * j as f64 + 1.0;
        factor *= a * (a + 1.0) / (N * N);
    }
    total
}

fn attenuations(
    params: &[AccelerationParameter],
    tol: &SeriesTolerance,
) -> Result<Vec<SeriesValue>> {
    params.iter().map(|&s| series_f(s, tol)).collect()
}

/// Product of `f(s_i)` over the accelerated observers.
pub fn closed_ghz_coherence(
    params: &[AccelerationParameter],
    tol: &SeriesTolerance,
) -> Result<CoherenceValue> {
    let fs = attenuations(params, tol)?;
    let value: f64 = fs.iter().map(|f| f.value).product();
    let upper: f64 = fs.iter().map(|f| f.value + f.abs_error).product();
    Ok(CoherenceValue {
        value,
        method: Method::ClosedForm,
        error_budget: upper - value,
    })
}

fn w_formula(parties: usize, fs: &[f64]) -> f64 {
    let n = fs.len();
    let inertial = (parties - n) as f64;
    let mut pairs = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            pairs += fs[i] * fs[j];
        }
    }
    let singles: f64 = fs.iter().sum();
    2.0 * (pairs + inertial * singles + inertial * (inertial - 1.0) / 2.0) / parties as f64
}

fn check_w_counts(parties: usize, accelerated: usize) -> Result<()> {
    if parties < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 parties, got {parties}"
        )));
    }
    if accelerated > parties {
        return Err(Error::Argument(format!(
            "{accelerated} accelerated observers among {parties} parties"
        )));
    }
    Ok(())
}

/// `(2/N)[Σ_{i<j} f_i f_j + (N−n) Σ_i f_i + (N−n)(N−n−1)/2]`.
pub fn closed_w_coherence(
    parties: usize,
    params: &[AccelerationParameter],
    tol: &SeriesTolerance,
) -> Result<CoherenceValue> {
    check_w_counts(parties, params.len())?;
    let fs = attenuations(params, tol)?;
    let values: Vec<f64> = fs.iter().map(|f| f.value).collect();
    let uppers: Vec<f64> = fs.iter().map(|f| f.value + f.abs_error).collect();
    let value = w_formula(parties, &values);
    Ok(CoherenceValue {
        value,
        method: Method::ClosedForm,
        error_budget: w_formula(parties, &uppers) - value,
    })
}

/// Which of a W pair's two parties are accelerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairKind {
    AccAcc,
    AccInertial,
    InertialInertial,
}

/// Closed-form coherence of one two-party reduction of an `N`-partite W state.
pub fn bipartite_w_coherence(
    kind: PairKind,
    parties: usize,
    s_i: Option<AccelerationParameter>,
    s_j: Option<AccelerationParameter>,
    tol: &SeriesTolerance,
) -> Result<CoherenceValue> {
    check_w_counts(parties, 0)?;
    let missing = |which: &str| Error::Argument(format!("{kind:?} pair needs {which}"));
    let weight = 2.0 / parties as f64;
    let (value, upper) = match kind {
        PairKind::AccAcc => {
            let fi = series_f(s_i.ok_or_else(|| missing("s_i"))?, tol)?;
            let fj = series_f(s_j.ok_or_else(|| missing("s_j"))?, tol)?;
            (
                weight * fi.value * fj.value,
                weight * (fi.value + fi.abs_error) * (fj.value + fj.abs_error),
            )
        }
        PairKind::AccInertial => {
            let fi = series_f(s_i.ok_or_else(|| missing("s_i"))?, tol)?;
            (weight * fi.value, weight * (fi.value + fi.abs_error))
        }
        PairKind::InertialInertial => (weight, weight),
    };
    Ok(CoherenceValue {
        value,
        method: Method::ClosedForm,
        error_budget: upper - value,
    })
}

/// Coherence in the limit where all `n` accelerated observers reach infinite
/// acceleration: every `f` replaced by `√π/2`.
pub fn freezing_limit(family: Family, parties: usize, accelerated: usize) -> Result<f64> {
    if parties < 2 || accelerated > parties {
        return Err(Error::Argument(format!(
            "invalid counts: {accelerated} accelerated among {parties} parties"
        )));
    }
    Ok(match family {
        Family::Ghz => SQRT_PI_OVER_2.powi(accelerated as i32),
        Family::W => w_formula(parties, &vec![SQRT_PI_OVER_2; accelerated]),
    })
}

/// [`freezing_limit`] wrapped as a coherence value.
pub fn limit_coherence(
    family: Family,
    parties: usize,
    accelerated: usize,
) -> Result<CoherenceValue> {
    Ok(CoherenceValue {
        value: freezing_limit(family, parties, accelerated)?,
        method: Method::Limit,
        error_budget: 0.0,
    })
}
