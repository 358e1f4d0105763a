// Figure tables and a config-driven run, written to a scratch directory.
//
// ```bash
// cargo run --example figure_export
// ```

use unruh_coherence::cli::config::RunConfig;
use unruh_coherence::cli::figures::{figure_table, FigureId};
use unruh_coherence::cli::run::execute;
use unruh_coherence::cli::table::Format;
use unruh_coherence::coherence::SeriesTolerance;

const CONFIG: &str = r#"
[scenario]
family = "ghz"
observers = [
    { name = "Alice" },
    { name = "Bob", s = 0.0 },
    { name = "Charlie", a = 6.283185307179586, omega = 1.0 },
]

[[sweep]]
observer = "Bob"
min = 0.0
max = 1.5
step = 0.5

[[output]]
table = "total"
format = "csv"
path = "bob_sweep.csv"

[[output]]
table = "limits"
format = "json"
path = "limits.json"
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;

    for id in [FigureId::Fig3, FigureId::Fig4b] {
        let path = dir.path().join(format!("{id}.csv"));
        figure_table(id, &SeriesTolerance::default())?.write(&path, Format::Csv)?;
        println!(
            "{}:\n{}",
            path.display(),
            std::fs::read_to_string(&path)?
                .lines()
                .take(5)
                .collect::<Vec<_>>()
                .join("\n")
        );
    }

    let cfg = RunConfig::parse(CONFIG)?;
    let outcome = execute(&cfg, CONFIG.as_bytes(), dir.path(), true)?;
    println!(
        "{}",
        std::fs::read_to_string(dir.path().join("bob_sweep.csv"))?
    );
    for c in &outcome.summary.checks {
        println!(
            "{:<16} {:.3e} {}",
            c.name,
            c.residual,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    assert!(outcome.summary.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
