macro_rules! example_test {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(filter_profile, "filter_profile.rs", filter_profile_runs);
example_test!(solve_diagonal, "solve_diagonal.rs", solve_diagonal_runs);
example_test!(compare_methods, "compare_methods.rs", compare_methods_runs);
example_test!(jordan_infinite, "jordan_infinite.rs", jordan_infinite_runs);
example_test!(feast_convergence, "feast_convergence.rs", feast_convergence_runs);
example_test!(desk_sweep, "desk_sweep.rs", desk_sweep_runs);
example_test!(verify_checks, "verify_checks.rs", verify_checks_runs);
example_test!(problem_io, "problem_io.rs", problem_io_runs);
example_test!(half_contour, "half_contour.rs", half_contour_runs);
