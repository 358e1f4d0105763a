// Tripartite GHZ state with Bob and Charlie accelerated: build the region-I
// density operator, measure its coherence, and compare against the closed
// form. Every proper subsystem carries no coherence at all.
//
// ```bash
// cargo run --example ghz_pipeline
// ```

use unruh_coherence::analysis::{closed_coherence, subsystem_coherence_map};
use unruh_coherence::coherence::{l1_coherence, SeriesTolerance};
use unruh_coherence::rindler::{AccelerationParameter, TruncationPolicy};
use unruh_coherence::states::{scenario_density, Family, Observer, ScenarioConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScenarioConfig::new(
        Family::Ghz,
        vec![
            Observer::inertial("Alice"),
            Observer::accelerated("Bob", AccelerationParameter::new(0.8)?),
            Observer::accelerated("Charlie", AccelerationParameter::new(1.4)?),
        ],
        TruncationPolicy::default(),
    )?;
    let rho = scenario_density(&cfg)?;
    println!("modes: {:?}", rho.mode_names().collect::<Vec<_>>());
    println!("stored entries: {}, trace: {:.12}", rho.nnz(), rho.trace());

    let brute = l1_coherence(&rho)?;
    let closed = closed_coherence(&cfg, &SeriesTolerance::default())?;
    println!(
        "brute force  {:.12} (budget {:.1e})",
        brute.value, brute.error_budget
    );
    println!(
        "closed form  {:.12} (budget {:.1e})",
        closed.value, closed.error_budget
    );
    assert!((brute.value - closed.value).abs() <= brute.error_budget + closed.error_budget + 1e-12);

    for (subset, c) in subsystem_coherence_map(&rho, 2)? {
        println!("  C({}) = {:.3e}", subset.join(","), c.value);
        assert!(c.value <= 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
