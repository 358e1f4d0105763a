//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use unruh_coherence::analysis::{
    check_ghz_globality, check_w_distribution, closed_w_distribution, monotonicity_sweep,
    SweepTemplate, DISTRIBUTION_BRUTE_THRESHOLD, DISTRIBUTION_CLOSED_THRESHOLD,
    GLOBALITY_THRESHOLD, ORACLE_THRESHOLD,
};
use unruh_coherence::coherence::{
    closed_ghz_coherence, closed_w_coherence, l1_coherence, series_f, SeriesTolerance,
};
use unruh_coherence::rindler::{
    one_particle_tail, truncation_level, vacuum_tail, AccelerationParameter, TruncationPolicy,
};
use unruh_coherence::states::{scenario_density, Family, ScenarioConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const GRID: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];

fn s(v: f64) -> AccelerationParameter {
    AccelerationParameter::new(v).unwrap()
}

fn tol() -> SeriesTolerance {
    SeriesTolerance::new(1e-10, SeriesTolerance::DEFAULT_MAX_TERMS).unwrap()
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::new(1e-10, TruncationPolicy::DEFAULT_HARD_CAP).unwrap()
}

fn scenario(family: Family, parties: usize, accelerations: &[f64]) -> ScenarioConfig {
    ScenarioConfig::trailing_with_policy(family, parties, accelerations, policy()).unwrap()
}

fn closed(cfg: &ScenarioConfig) -> f64 {
    let params = cfg.accelerations();
    match cfg.family() {
        Family::Ghz => closed_ghz_coherence(&params, &tol()).unwrap().value,
        Family::W => {
            closed_w_coherence(cfg.parties(), &params, &tol())
                .unwrap()
                .value
        }
    }
}

/// Largest |closed − brute| over a list of scenarios.
fn oracle_residual(cases: &[ScenarioConfig]) -> f64 {
    cases
        .iter()
        .map(|cfg| {
            let brute = l1_coherence(&scenario_density(cfg).unwrap()).unwrap();
            (closed(cfg) - brute.value).abs()
        })
        .fold(0.0, f64::max)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid_oracle(family: Family) -> Outcome {
    let start = Instant::now();
    let cases: Vec<_> = GRID
        .iter()
        .flat_map(|&w| GRID.iter().map(move |&r| scenario(family, 3, &[w, r])))
        .collect();
    let worst = oracle_residual(&cases);
    check(
        worst <= ORACLE_THRESHOLD,
        format!(
            "max |closed - brute| = {worst:.3e} over 25 points in {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn c1() -> Outcome {
    grid_oracle(Family::Ghz)
}

fn c2() -> Outcome {
    grid_oracle(Family::W)
}

fn c3() -> Outcome {
    let sets: [(usize, &[f64]); 3] = [(4, &[0.4, 0.9]), (5, &[0.9, 1.3]), (4, &[0.4, 0.9, 1.3])];
    let cases: Vec<_> = [Family::Ghz, Family::W]
        .into_iter()
        .flat_map(|f| sets.iter().map(move |&(n, acc)| scenario(f, n, acc)))
        .collect();
    let worst = oracle_residual(&cases);
    check(
        worst <= ORACLE_THRESHOLD,
        format!("max |closed - brute| = {worst:.3e} over (4,2), (5,2), (4,3), both families"),
    )
}

fn c4() -> Outcome {
    let pi = std::f64::consts::PI;
    let ghz = closed_ghz_coherence(&[s(6.0), s(6.0)], &tol())
        .unwrap()
        .value;
    let w = closed_w_coherence(3, &[s(6.0), s(6.0)], &tol())
        .unwrap()
        .value;
    let f = series_f(s(6.0), &tol()).unwrap().value;
    let d = [
        (ghz - pi / 4.0).abs(),
        (w - (pi + 4.0 * pi.sqrt()) / 6.0).abs(),
        (f - (pi / 4.0).sqrt()).abs(),
    ];
    check(
        d.iter().all(|&x| x <= 1e-3),
        format!(
            "GHZ {:.3e}, W {:.3e}, f {:.3e} from the limits",
            d[0], d[1], d[2]
        ),
    )
}

fn c5() -> Outcome {
    let mut worst = 0.0f64;
    for (n, k) in [(3, 2), (4, 2)] {
        for v in [0.0, 0.5, 1.0, 2.0] {
            let cfg = scenario(Family::Ghz, n, &vec![v; k]);
            worst = worst.max(check_ghz_globality(&cfg, None).unwrap().residual);
        }
    }
    check(
        worst <= GLOBALITY_THRESHOLD,
        format!("largest proper-subsystem coherence {worst:.3e}"),
    )
}

fn c6() -> Outcome {
    let mut closed_worst = 0.0f64;
    for (w, r) in [(0.0, 0.0), (10.0, 10.0), (10.0, 1.0), (0.5, 5.0)] {
        for n in [3, 5] {
            let (pairs, total) =
                closed_w_distribution(&scenario(Family::W, n, &[w, r]), &tol()).unwrap();
            closed_worst = closed_worst.max((pairs - total).abs());
        }
    }
    let mut brute_worst = 0.0f64;
    let mut brute_points = 0;
    for &w in &GRID {
        for &r in &GRID {
            let res = check_w_distribution(&scenario(Family::W, 3, &[w, r]), &tol()).unwrap();
            closed_worst = closed_worst.max(res.closed_form);
            if let Some(b) = res.brute_force {
                brute_worst = brute_worst.max(b);
                brute_points += 1;
            }
        }
    }
    check(
        closed_worst <= DISTRIBUTION_CLOSED_THRESHOLD
            && brute_points == GRID.len() * GRID.len()
            && brute_worst <= DISTRIBUTION_BRUTE_THRESHOLD,
        format!(
            "closed-form residual {closed_worst:.3e}, brute-force residual {brute_worst:.3e} on {brute_points} points"
        ),
    )
}

fn c7() -> Outcome {
    // Closed forms are held to 1e-15 absolute. The brute-force W operator is
    // built from the amplitude 1/√N, whose square is not 1/N in binary, so
    // it is held to 1e-15 relative to the anchor.
    let mut closed_worst = 0.0f64;
    let mut brute_worst = 0.0f64;
    for n in 2..=8 {
        for (family, expect) in [(Family::Ghz, 1.0), (Family::W, (n - 1) as f64)] {
            let inertial = scenario(family, n, &[]);
            let zeros = scenario(family, n, &vec![0.0; n.min(3)]);
            for cfg in [inertial, zeros] {
                let brute = l1_coherence(&scenario_density(&cfg).unwrap())
                    .unwrap()
                    .value;
                closed_worst = closed_worst.max((closed(&cfg) - expect).abs());
                brute_worst = brute_worst.max((brute - expect).abs() / expect);
            }
        }
    }
    check(
        closed_worst <= 1e-15 && brute_worst <= 1e-15,
        format!("closed-form deviation {closed_worst:.3e}, brute-force relative deviation {brute_worst:.3e} for N = 2..8"),
    )
}

fn c8() -> Outcome {
    let grid: Vec<f64> = (0..=12).map(|i| 0.25 * f64::from(i)).collect();
    let mut templates = Vec::new();
    for parties in 2..=6 {
        for accelerated in 1..=parties {
            for family in [Family::Ghz, Family::W] {
                templates.push(SweepTemplate {
                    family,
                    parties,
                    accelerated,
                });
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for t in &templates {
        let sweep = monotonicity_sweep(*t, &grid, &tol()).unwrap();
        worst = worst.max(sweep.max_increment());
        if !sweep.strictly_decreasing {
            failures.push(format!("{}({},{})", t.family, t.parties, t.accelerated));
        }
    }
    let f: Vec<f64> = grid
        .iter()
        .map(|&v| series_f(s(v), &tol()).unwrap().value)
        .collect();
    let f_ok = f.windows(2).all(|w| w[1] < w[0]);
    check(
        failures.is_empty() && f_ok,
        format!(
            "{} (N, n) templates, largest step change {worst:.3e}{}",
            templates.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(", not decreasing: {failures:?}")
            }
        ),
    )
}

fn c9() -> Outcome {
    let one = s(1.0);
    let by_n: Vec<f64> = (3..=8)
        .map(|n| closed_w_coherence(n, &[one, one], &tol()).unwrap().value)
        .collect();
    let by_k: Vec<f64> = (1..=4)
        .map(|k| closed_w_coherence(8, &vec![one; k], &tol()).unwrap().value)
        .collect();
    let up = by_n.windows(2).all(|w| w[1] > w[0]);
    let down = by_k.windows(2).all(|w| w[1] < w[0]);
    check(
        up && down,
        format!("increasing in N = 3..8: {up}, decreasing in n = 1..4: {down}"),
    )
}

fn c10() -> Outcome {
    let mut worst = 0.0f64;
    let mut inside = true;
    for v in [0.5, 1.0, 2.0, 4.0] {
        let level = truncation_level(s(v), &policy());
        let q = v.tanh().powi(2);
        let c2 = 1.0 / v.cosh().powi(2);
        let (mut vac, mut one, mut p) = (0.0f64, 0.0f64, 1.0f64);
        for n in 0..=level.n_max {
            vac += c2 * p;
            one += c2 * c2 * f64::from(n + 1) * p;
            p *= q;
        }
        let vt = vacuum_tail(s(v), level.n_max);
        let ot = one_particle_tail(s(v), level.n_max);
        // The truncated sums fall short of one by exactly the tail, up to rounding.
        let slack = 1e-12;
        inside &= 1.0 - vac <= vt + slack
            && 1.0 - one <= ot + slack
            && vac <= 1.0 + slack
            && one <= 1.0 + slack;
        worst = worst
            .max((1.0 - vac - vt).abs())
            .max((1.0 - one - ot).abs());
    }
    check(
        inside,
        format!("max |1 - partial - tail| = {worst:.3e} for s in {{0.5, 1, 2, 4}}"),
    )
}

const DETERMINISM_CONFIG: &str = r#"
[scenario]
family = "w"
observers = [{ name = "A" }, { name = "B", s = 0.0 }, { name = "C", s = 0.0 }]

[[sweep]]
observer = "B"
min = 0.0
max = 1.0
step = 0.25

[[sweep]]
observer = "C"
min = 0.0
max = 1.0
step = 0.5

[[output]]
table = "total"
format = "csv"
path = "total.csv"

[[output]]
table = "subsystems"
format = "json"
path = "tables/subsystems.json"

[[output]]
table = "identities"
format = "csv"
path = "identities.csv"
"#;

fn run_cli(config: &Path, out: &Path, threads: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_unruh-coherence"))
        .args(["--threads", threads, "run"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).into_owned())
    }
}

fn c11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("run.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    run_cli(&config, &first, "1")?;
    run_cli(&config, &second, "3")?;
    let files = [
        "total.csv",
        "tables/subsystems.json",
        "identities.csv",
        "summary.json",
    ];
    let mut differing = Vec::new();
    for f in files {
        let a = std::fs::read(first.join(f)).map_err(|e| format!("{f}: {e}"))?;
        let b = std::fs::read(second.join(f)).map_err(|e| format!("{f}: {e}"))?;
        if a != b {
            differing.push(f);
        }
    }
    check(
        differing.is_empty(),
        format!(
            "{} files compared across two runs, differing: {differing:?}",
            files.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence, tripartite GHZ grid", c1),
        ("oracle equivalence, tripartite W grid", c2),
        ("oracle equivalence, N-partite", c3),
        ("freezing limits at s = 6", c4),
        ("GHZ globality", c5),
        ("W distribution identity", c6),
        ("zero-acceleration anchors", c7),
        ("monotonicity in s", c8),
        ("W trends in N and n", c9),
        ("expansion normalization tails", c10),
        ("CLI determinism", c11),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
