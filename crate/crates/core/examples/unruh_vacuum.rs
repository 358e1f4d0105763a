// The Minkowski vacuum and one-particle state as seen from Rindler region I,
// truncated at the level where the dropped weight falls below the policy.
//
// ```bash
// cargo run --example unruh_vacuum
// ```

use unruh_coherence::fock::{DensityOperator, ModeLabel};
use unruh_coherence::rindler::{
    truncation_level, unruh_one_particle, unruh_vacuum, AccelerationParameter, TruncationPolicy,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let policy = TruncationPolicy::default();
    println!(
        "{:>5} {:>6} {:>14} {:>14} {:>12}",
        "s", "n_max", "1-|vac|^2", "1-|one|^2", "<n_I>"
    );
    for s in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let s = AccelerationParameter::new(s)?;
        let level = truncation_level(s, &policy);
        let vac = unruh_vacuum(
            s,
            &policy,
            ModeLabel::rindler_i("k_I"),
            ModeLabel::rindler_ii("k_II"),
        )?;
        let one = unruh_one_particle(
            s,
            &policy,
            ModeLabel::rindler_i("k_I"),
            ModeLabel::rindler_ii("k_II"),
        )?;

        let rho = DensityOperator::projector(&vac);
        let mean: f64 = rho.diagonal().map(|(k, p)| f64::from(k.get(0)) * p).sum();
        println!(
            "{:>5} {:>6} {:>14.3e} {:>14.3e} {:>12.6}",
            s.value(),
            level.n_max,
            1.0 - vac.norm_sqr(),
            1.0 - one.norm_sqr(),
            mean
        );
        // Thermal occupation: sinh²(s).
        assert!((mean - s.value().sinh().powi(2)).abs() < 1e-8);
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
