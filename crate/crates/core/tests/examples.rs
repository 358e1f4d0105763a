macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(unruh_vacuum, unruh_vacuum_runs, "unruh_vacuum.rs");
example!(
    physical_acceleration,
    physical_acceleration_runs,
    "physical_acceleration.rs"
);
example!(ghz_pipeline, ghz_pipeline_runs, "ghz_pipeline.rs");
example!(w_distribution, w_distribution_runs, "w_distribution.rs");
example!(npartite_trends, npartite_trends_runs, "npartite_trends.rs");
example!(figure_export, figure_export_runs, "figure_export.rs");
