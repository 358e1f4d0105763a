//! Library results against independent evaluations: a 30-digit brute force
//! computed outside this crate, hand-rolled dense reductions, and property
//! checks on random inputs.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use proptest::prelude::*;
use unruh_coherence::analysis::{
    closed_coherence, closed_subsystem_coherence, subsystem_coherence_map,
};
use unruh_coherence::coherence::{
    closed_ghz_coherence, closed_w_coherence, freezing_limit, l1_coherence, series_f,
    SeriesTolerance,
};
use unruh_coherence::fock::{
    partial_trace, reduce_over_environment, tensor_product, DensityOperator, ModeLabel,
    OccupationKet, PureState,
};
use unruh_coherence::rindler::{
    one_particle_tail, transform_mode, truncation_level, unruh_one_particle, unruh_vacuum,
    vacuum_tail, AccelerationParameter, TruncationPolicy,
};
use unruh_coherence::states::{initial_state, scenario_density, Family, Observer, ScenarioConfig};

fn s(v: f64) -> AccelerationParameter {
    AccelerationParameter::new(v).unwrap()
}

fn tol() -> SeriesTolerance {
    SeriesTolerance::default()
}

// Region-I coherences from an exact-arithmetic Unruh expansion at 30 digits,
// cut far beyond 1e-25 of discarded weight.
struct Frozen {
    family: Family,
    accelerations: &'static [f64],
    parties: usize,
    total: f64,
    pairs: &'static [((usize, usize), f64)],
}

const FROZEN: &[Frozen] = &[
    Frozen {
        family: Family::Ghz,
        parties: 3,
        accelerations: &[0.5, 1.0],
        total: 0.926_003_107_001_586_6,
        pairs: &[((0, 1), 0.0), ((0, 2), 0.0), ((1, 2), 0.0)],
    },
    Frozen {
        family: Family::W,
        parties: 3,
        accelerations: &[0.5, 1.0],
        total: 1.900_626_654_555_976_7,
        pairs: &[
            ((0, 1), 0.653_981_408_858_760_3),
            ((0, 2), 0.629_309_841_029_492),
            ((1, 2), 0.617_335_404_667_724_4),
        ],
    },
    Frozen {
        family: Family::Ghz,
        parties: 4,
        accelerations: &[0.4, 0.9],
        total: 0.939_180_016_457_727_7,
        pairs: &[((0, 1), 0.0), ((2, 3), 0.0)],
    },
    Frozen {
        family: Family::W,
        parties: 4,
        accelerations: &[0.4, 0.9],
        total: 2.908_151_090_030_174_5,
        pairs: &[
            ((0, 1), 0.5),
            ((0, 2), 0.493_650_688_183_973_8),
            ((0, 3), 0.475_629_852_716_681_5),
            ((1, 2), 0.493_650_688_183_973_8),
            ((1, 3), 0.475_629_852_716_681_5),
            ((2, 3), 0.469_590_008_228_863_9),
        ],
    },
];

#[test]
fn brute_force_matches_high_precision_reference() {
    for case in FROZEN {
        let cfg = ScenarioConfig::trailing(case.family, case.parties, case.accelerations).unwrap();
        let rho = scenario_density(&cfg).unwrap();
        let c = l1_coherence(&rho).unwrap();
        assert!(
            (c.value - case.total).abs() <= c.error_budget + 1e-12,
            "{} N={} {:?}: {} vs {} (budget {:e})",
            case.family,
            case.parties,
            case.accelerations,
            c.value,
            case.total,
            c.error_budget
        );
        let names = cfg.region_i_modes();
        let map = subsystem_coherence_map(&rho, 2).unwrap();
        for &((i, j), expect) in case.pairs {
            let mut key = vec![names[i].clone(), names[j].clone()];
            key.sort();
            let got = map[&key].value;
            assert!(
                (got - expect).abs() <= 1e-9,
                "pair {key:?}: {got} vs {expect}"
            );
        }
    }
}

#[test]
fn closed_forms_match_high_precision_reference() {
    for case in FROZEN {
        let cfg = ScenarioConfig::trailing(case.family, case.parties, case.accelerations).unwrap();
        let got = closed_coherence(&cfg, &tol()).unwrap();
        assert!(
            (got.value - case.total).abs() <= got.error_budget + 1e-13,
            "{} vs {} (budget {:e})",
            got.value,
            case.total,
            got.error_budget
        );
        let names = cfg.region_i_modes();
        for &((i, j), expect) in case.pairs {
            let got = closed_subsystem_coherence(&cfg, &[&names[i], &names[j]], &tol()).unwrap();
            assert!(
                (got.value - expect).abs() <= got.error_budget + 1e-13,
                "{} vs {expect}",
                got.value
            );
        }
        // A tighter series tolerance closes the gap to the reference.
        let fine = SeriesTolerance::new(1e-15, 50_000_000).unwrap();
        let got = closed_coherence(&cfg, &fine).unwrap().value;
        assert!((got - case.total).abs() <= 1e-13, "{got} vs {}", case.total);
    }
}

#[test]
fn unruh_coefficients_follow_the_expansion() {
    let policy = TruncationPolicy::default();
    for v in [0.3, 1.0, 1.7] {
        let (t, c) = (f64::tanh(v), f64::cosh(v));
        let vac = unruh_vacuum(
            s(v),
            &policy,
            ModeLabel::rindler_i("x"),
            ModeLabel::rindler_ii("x"),
        )
        .unwrap();
        let one = unruh_one_particle(
            s(v),
            &policy,
            ModeLabel::rindler_i("x"),
            ModeLabel::rindler_ii("x"),
        )
        .unwrap();
        let n_max = truncation_level(s(v), &policy).n_max as u16;
        for n in 0..=n_max {
            let a = vac.amplitude(&OccupationKet::from([n, n]));
            let b = one.amplitude(&OccupationKet::from([n + 1, n]));
            let ea = t.powi(n.into()) / c;
            let eb = t.powi(n.into()) * f64::from(n + 1).sqrt() / (c * c);
            assert!(
                (a - ea).abs() <= 1e-15 * ea.max(1e-300) + 1e-300,
                "vacuum n={n}"
            );
            assert!(
                (b - eb).abs() <= 1e-14 * eb,
                "one-particle n={n}: {b} vs {eb}"
            );
        }
        assert_eq!(vac.len(), usize::from(n_max) + 1);
        assert_eq!(one.len(), usize::from(n_max) + 1);
    }
}

/// Dense `Tr_env |ψ⟩⟨ψ|` with explicit index arithmetic.
fn dense_reduce(psi: &PureState, keep: &[usize]) -> BTreeMap<(Vec<u16>, Vec<u16>), f64> {
    let kets: Vec<(&OccupationKet, f64)> = psi.amplitudes().iter().map(|(k, &a)| (k, a)).collect();
    let env: Vec<usize> = (0..psi.modes().len())
        .filter(|i| !keep.contains(i))
        .collect();
    let pick =
        |k: &OccupationKet, idx: &[usize]| idx.iter().map(|&i| k.get(i)).collect::<Vec<u16>>();
    let mut out = BTreeMap::new();
    for &(ka, ca) in &kets {
        for &(kb, cb) in &kets {
            if pick(ka, &env) == pick(kb, &env) {
                *out.entry((pick(ka, keep), pick(kb, keep))).or_insert(0.0) += ca * cb;
            }
        }
    }
    out.retain(|_, v| *v != 0.0);
    out
}

fn sparse_as_map(rho: &DensityOperator) -> BTreeMap<(Vec<u16>, Vec<u16>), f64> {
    rho.entries()
        .iter()
        .map(|((a, b), &v)| ((a.as_slice().to_vec(), b.as_slice().to_vec()), v))
        .collect()
}

fn max_map_diff(
    a: &BTreeMap<(Vec<u16>, Vec<u16>), f64>,
    b: &BTreeMap<(Vec<u16>, Vec<u16>), f64>,
) -> f64 {
    let mut worst = 0.0f64;
    for (k, v) in a {
        worst = worst.max((v - b.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            worst = worst.max(v.abs());
        }
    }
    worst
}

fn mode_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i}")).collect()
}

/// Random normalized real states on up to 6 modes with up to 5 quanta per mode.
fn arb_state() -> impl Strategy<Value = PureState> {
    (1usize..=6).prop_flat_map(|modes| {
        prop::collection::vec(
            (prop::collection::vec(0u16..=5, modes), -1.0f64..1.0),
            1..12,
        )
        .prop_map(move |terms| {
            let labels = mode_names(modes)
                .into_iter()
                .map(ModeLabel::minkowski)
                .collect();
            let norm: f64 = terms
                .iter()
                .map(|(_, a)| a * a)
                .sum::<f64>()
                .sqrt()
                .max(1e-3);
            PureState::new(
                labels,
                terms
                    .into_iter()
                    .map(|(k, a)| (OccupationKet::from(k), a / norm)),
                TruncationPolicy::default(),
            )
            .unwrap()
        })
    })
}

fn arb_qubit_state(modes: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec(-1.0f64..1.0, 1 << modes).prop_filter_map("nonzero", move |amps| {
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        let labels = mode_names(modes)
            .into_iter()
            .map(ModeLabel::minkowski)
            .collect();
        let terms = amps.into_iter().enumerate().map(|(i, a)| {
            let ket: Vec<u16> = (0..modes).map(|m| ((i >> m) & 1) as u16).collect();
            (OccupationKet::from(ket), a / norm)
        });
        Some(PureState::new(labels, terms, TruncationPolicy::default()).unwrap())
    })
}

fn subset_of(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<bool>(), n).prop_filter_map("nonempty", |mask| {
        let keep: Vec<usize> = mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect();
        (!keep.is_empty()).then_some(keep)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_norms_multiply(a in arb_state(), b in arb_state()) {
        let renamed = PureState::new(
            b.modes().iter().map(|m| ModeLabel::minkowski(format!("r{}", m.name()))).collect(),
            b.amplitudes().iter().map(|(k, &a)| (k.clone(), a)),
            TruncationPolicy::default(),
        ).unwrap();
        let ab = tensor_product(&a, &renamed).unwrap();
        prop_assert!((ab.norm_sqr() - a.norm_sqr() * renamed.norm_sqr()).abs() <= 1e-13);
    }

    #[test]
    fn reduction_matches_dense_projector_trace(psi in arb_state(), mask in prop::collection::vec(any::<bool>(), 6)) {
        let n = psi.modes().len();
        let keep: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
        prop_assume!(!keep.is_empty() && keep.len() < n);
        let names = mode_names(n);
        let keep_names: Vec<&str> = keep.iter().map(|&i| names[i].as_str()).collect();
        let env_names: Vec<&str> = (0..n).filter(|i| !keep.contains(i)).map(|i| names[i].as_str()).collect();

        let dense = dense_reduce(&psi, &keep);
        let grouped = reduce_over_environment(&psi, &env_names).unwrap();
        let traced = partial_trace(&DensityOperator::projector(&psi), &keep_names).unwrap();
        prop_assert!(max_map_diff(&dense, &sparse_as_map(&grouped)) <= 1e-13);
        prop_assert!(max_map_diff(&dense, &sparse_as_map(&traced)) <= 1e-13);
    }

    #[test]
    fn partial_traces_compose(psi in arb_state(), outer in subset_of(6), inner_mask in prop::collection::vec(any::<bool>(), 6)) {
        let n = psi.modes().len();
        let outer: Vec<usize> = outer.into_iter().filter(|&i| i < n).collect();
        prop_assume!(!outer.is_empty());
        let inner: Vec<usize> = outer.iter().copied().filter(|&i| inner_mask[i]).collect();
        prop_assume!(!inner.is_empty());
        let names = mode_names(n);
        let pick = |idx: &[usize]| idx.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
        let rho = DensityOperator::projector(&psi);
        let two_step = partial_trace(&partial_trace(&rho, &pick(&outer)).unwrap(), &pick(&inner)).unwrap();
        let one_step = partial_trace(&rho, &pick(&inner)).unwrap();
        prop_assert!(two_step.max_abs_diff(&one_step).unwrap() <= 1e-13);
    }

    #[test]
    fn transforms_lose_at_most_epsilon_per_mode(psi in arb_qubit_state(3), sb in 0.0f64..2.0, sc in 0.0f64..2.0) {
        let policy = TruncationPolicy::default();
        let once = transform_mode(&psi, "m1", s(sb), &policy).unwrap();
        let twice = transform_mode(&once, "m2", s(sc), &policy).unwrap();
        prop_assert!(1.0 - once.norm_sqr() <= policy.epsilon_trunc() + 1e-14);
        prop_assert!(1.0 - twice.norm_sqr() <= 2.0 * policy.epsilon_trunc() + 1e-14);
        prop_assert!((1.0 - twice.norm_sqr() - twice.tail_mass()).abs() <= 1e-13);
    }

    #[test]
    fn transform_order_does_not_matter(psi in arb_qubit_state(3), sb in 0.0f64..1.5, sc in 0.0f64..1.5) {
        let policy = TruncationPolicy::default();
        let bc = transform_mode(&transform_mode(&psi, "m1", s(sb), &policy).unwrap(), "m2", s(sc), &policy).unwrap();
        let cb = transform_mode(&transform_mode(&psi, "m2", s(sc), &policy).unwrap(), "m1", s(sb), &policy).unwrap();
        let order: Vec<String> = bc.modes().iter().map(|m| m.name().to_string()).collect();
        let cb = cb.reorder(&order).unwrap();
        prop_assert_eq!(bc.len(), cb.len());
        for (k, a) in bc.amplitudes() {
            prop_assert!((a - cb.amplitude(k)).abs() <= 1e-15);
        }
    }

    #[test]
    fn swapping_accelerations_permutes_modes(family in prop::sample::select(vec![Family::Ghz, Family::W]), s1 in 0.0f64..1.2, s2 in 0.0f64..1.2) {
        let a = ScenarioConfig::trailing(family, 3, &[s1, s2]).unwrap();
        let b = ScenarioConfig::trailing(family, 3, &[s2, s1]).unwrap();
        let ra = scenario_density(&a).unwrap();
        let rb = scenario_density(&b).unwrap();
        let swap = |k: &OccupationKet| OccupationKet::from([k.get(0), k.get(2), k.get(1)]);
        prop_assert_eq!(ra.nnz(), rb.nnz());
        for ((x, y), v) in ra.entries() {
            prop_assert!((v - rb.entry(&swap(x), &swap(y))).abs() <= 1e-15);
        }
    }

    #[test]
    fn scenario_densities_are_physical(family in prop::sample::select(vec![Family::Ghz, Family::W]), parties in 2usize..=4, sv in prop::collection::vec(0.0f64..1.0, 1..=2)) {
        prop_assume!(sv.len() <= parties);
        let cfg = ScenarioConfig::trailing(family, parties, &sv).unwrap();
        let rho = scenario_density(&cfg).unwrap();
        prop_assert!(rho.is_symmetric());
        prop_assert!(rho.diagonal().all(|(_, d)| d >= 0.0));
        prop_assert!((1.0 - rho.trace()).abs() <= rho.tail_mass() + 1e-13);
        prop_assert!(rho.tail_mass() <= sv.len() as f64 * cfg.policy().epsilon_trunc());
    }

    #[test]
    fn reduced_blocks_are_positive(family in prop::sample::select(vec![Family::Ghz, Family::W]), parties in 2usize..=3, sv in 0.0f64..1.5) {
        let policy = TruncationPolicy::new(1e-4, 5000).unwrap();
        let cfg = ScenarioConfig::trailing_with_policy(family, parties, &[sv], policy).unwrap();
        let rho = scenario_density(&cfg).unwrap();
        let basis: Vec<OccupationKet> = rho.support().into_iter().take(64).collect();
        let block = rho.dense_block(&basis);
        let m = DMatrix::from_fn(basis.len(), basis.len(), |i, j| block[i][j]);
        let min = m.symmetric_eigenvalues().min();
        prop_assert!(min >= -1e-12, "min eigenvalue {}", min);
    }

    #[test]
    fn expansion_sums_reach_one_within_tails(v in 0.05f64..3.0) {
        let level = truncation_level(s(v), &TruncationPolicy::default());
        let q = f64::tanh(v).powi(2);
        let c2 = 1.0 / f64::cosh(v).powi(2);
        let (mut vac, mut one, mut p) = (0.0, 0.0, 1.0);
        for n in 0..=level.n_max {
            vac += c2 * p;
            one += c2 * c2 * f64::from(n + 1) * p;
            p *= q;
        }
        let vt = vacuum_tail(s(v), level.n_max);
        let ot = one_particle_tail(s(v), level.n_max);
        prop_assert!((1.0 - vac - vt).abs() <= 1e-12);
        prop_assert!((1.0 - one - ot).abs() <= 1e-12);
        prop_assert!(ot <= TruncationPolicy::DEFAULT_EPSILON);
    }

    #[test]
    fn attenuation_is_bounded_and_decreasing(a in 0.0f64..8.0, d in 0.01f64..2.0) {
        let fa = series_f(s(a), &tol()).unwrap().value;
        let fb = series_f(s(a + d), &tol()).unwrap().value;
        prop_assert!(fa <= 1.0 + 1e-15);
        prop_assert!(fb > std::f64::consts::PI.sqrt() / 2.0);
        prop_assert!(fb < fa);
    }

    #[test]
    fn closed_values_stay_above_their_limits(parties in 2usize..=8, sv in prop::collection::vec(0.0f64..6.0, 1..=8)) {
        prop_assume!(sv.len() <= parties);
        let params: Vec<_> = sv.iter().map(|&v| s(v)).collect();
        let ghz = closed_ghz_coherence(&params, &tol()).unwrap().value;
        let w = closed_w_coherence(parties, &params, &tol()).unwrap().value;
        prop_assert!(ghz > freezing_limit(Family::Ghz, parties, sv.len()).unwrap());
        prop_assert!(w > freezing_limit(Family::W, parties, sv.len()).unwrap());
        prop_assert!(ghz <= 1.0 + 1e-15);
        prop_assert!(w <= parties as f64 - 1.0 + 1e-12);
    }
}

#[test]
fn inertial_scenarios_reproduce_the_initial_projector() {
    for family in [Family::Ghz, Family::W] {
        let observers = vec![
            Observer::inertial("A"),
            Observer::accelerated("B", AccelerationParameter::ZERO),
            Observer::inertial("C"),
        ];
        let cfg = ScenarioConfig::new(family, observers, TruncationPolicy::default()).unwrap();
        let rho = scenario_density(&cfg).unwrap();
        let reference = DensityOperator::projector(&initial_state(&cfg).unwrap());
        assert_eq!(sparse_as_map(&rho), sparse_as_map(&reference));
    }
}

#[test]
fn w_subsystem_structure_on_the_grid() {
    let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
    for &w in &grid {
        for &r in &grid {
            let cfg = ScenarioConfig::trailing(Family::W, 3, &[w, r]).unwrap();
            let rho = scenario_density(&cfg).unwrap();
            let map = subsystem_coherence_map(&rho, 2).unwrap();
            for (k, v) in &map {
                match k.len() {
                    1 => assert!(v.value <= 1e-12, "{k:?} at ({w},{r})"),
                    _ => assert!(v.value > 1e-3, "{k:?} at ({w},{r})"),
                }
            }
        }
    }
}
