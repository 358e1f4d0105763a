// From proper acceleration and mode frequency to the squeezing parameter,
// and the resulting GHZ coherence with one accelerated observer.
//
// ```bash
// cargo run --example physical_acceleration
// ```

use std::f64::consts::PI;

use unruh_coherence::coherence::{closed_ghz_coherence, SeriesTolerance};
use unruh_coherence::rindler::{acceleration_parameter, PhysicalAcceleration};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tol = SeriesTolerance::default();
    let omega = 1.0;
    println!("{:>10} {:>10} {:>12}", "a/omega", "s", "C_GHZ");
    for ratio in [0.1, 1.0, 2.0 * PI, 20.0, 100.0, 1e4] {
        let conv = acceleration_parameter(PhysicalAcceleration {
            a: ratio * omega,
            omega,
        })?;
        let c = closed_ghz_coherence(&[conv.s], &tol)?;
        println!("{ratio:>10.4} {:>10.6} {:>12.9}", conv.s.value(), c.value);
    }

    // Far below a ~ omega the exponent overflows and the observer is
    // effectively inertial.
    let tiny = acceleration_parameter(PhysicalAcceleration {
        a: 1e-3,
        omega: 1.0,
    })?;
    assert!(tiny.underflow && tiny.s.is_inertial());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
