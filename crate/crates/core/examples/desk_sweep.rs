// A small (L, M) sweep with LM fixed on a real symmetric pencil, printed as
// the CSV the `bench` subcommand writes.

use contour_eigs::harness::{run_experiment, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::parse(
        "problem = symmetric:150,12
region = ellipse:0,0,1,0.1
N = 32
sweep = 32x1,16x2,8x4
methods = ss_hankel,ss_rr,ss_arnoldi,ss_beyn
half_contour = true
seed = 4
",
    )?;
    let report = run_experiment(&cfg)?;
    print!("{}", report.csv(cfg.timing));
    // block Arnoldi has no rank truncation and breaks down once L exceeds
    // the filtered rank; those rows carry the error instead of results
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        println!("{} L={} M={}: {}", row.method, row.l, row.m, row.error.as_deref().unwrap_or(""));
    }
    for row in report.rows.iter().filter(|r| ["ss_rr", "ss_beyn"].contains(&r.method.name())) {
        assert!(row.oracle_match, "{row:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
