// Closed-form coherence of N-partite states with n equally accelerated
// observers, and the values it freezes at under infinite acceleration.
//
// ```bash
// cargo run --example npartite_trends
// ```

use unruh_coherence::analysis::SweepTemplate;
use unruh_coherence::coherence::{freezing_limit, SeriesTolerance};
use unruh_coherence::rindler::AccelerationParameter;
use unruh_coherence::states::Family;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tol = SeriesTolerance::default();
    let s = AccelerationParameter::new(1.0)?;

    println!("W at s = 1, n = 2");
    let mut last = 0.0;
    for parties in 3..=8 {
        let c = SweepTemplate {
            family: Family::W,
            parties,
            accelerated: 2,
        }
        .closed_at(s, &tol)?
        .value;
        println!(
            "  N = {parties}: {c:.9}  (limit {:.9})",
            freezing_limit(Family::W, parties, 2)?
        );
        assert!(c > last);
        last = c;
    }

    println!("W at s = 1, N = 8");
    let mut last = f64::INFINITY;
    for n in 1..=4 {
        let c = SweepTemplate {
            family: Family::W,
            parties: 8,
            accelerated: n,
        }
        .closed_at(s, &tol)?
        .value;
        println!("  n = {n}: {c:.9}");
        assert!(c < last);
        last = c;
    }

    println!("GHZ limits");
    for n in 1..=3 {
        let at_six = SweepTemplate {
            family: Family::Ghz,
            parties: 3,
            accelerated: n,
        }
        .closed_at(AccelerationParameter::new(6.0)?, &tol)?
        .value;
        let limit = freezing_limit(Family::Ghz, 3, n)?;
        println!("  n = {n}: s = 6 gives {at_six:.7}, limit {limit:.7}");
        assert!((at_six - limit).abs() < 1e-3);
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
