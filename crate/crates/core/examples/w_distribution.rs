// Tripartite W state: the total coherence equals the sum of its three pair
// coherences at any acceleration. The brute force runs where the truncation
// stays small, the closed forms everywhere.
//
// ```bash
// cargo run --example w_distribution
// ```

use unruh_coherence::analysis::{check_w_distribution, closed_subsystem_coherence};
use unruh_coherence::coherence::SeriesTolerance;
use unruh_coherence::states::{Family, ScenarioConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tol = SeriesTolerance::default();
    println!(
        "{:>5} {:>5} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10}",
        "w", "r", "C_AB", "C_AC", "C_BC", "C_ABC", "closed res", "brute res"
    );
    for (w, r) in [
        (0.0, 0.0),
        (0.5, 1.0),
        (2.0, 2.0),
        (10.0, 1.0),
        (10.0, 10.0),
    ] {
        let cfg = ScenarioConfig::trailing(Family::W, 3, &[w, r])?;
        let names = cfg.region_i_modes();
        let mut pairs = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            pairs.push(closed_subsystem_coherence(&cfg, &[&names[i], &names[j]], &tol)?.value);
        }
        let res = check_w_distribution(&cfg, &tol)?;
        println!(
            "{w:>5} {r:>5} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>10.1e} {:>10}",
            pairs[0],
            pairs[1],
            pairs[2],
            res.closed_total,
            res.closed_form,
            res.brute_force
                .map_or("skipped".to_string(), |b| format!("{b:.1e}"))
        );
        assert!(res.passes());
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
