// For a real pencil and a contour symmetric about the real axis, only the
// upper half of the quadrature points need a factorization.

use contour_eigs::contour::{build_rule, ContourRegion, RuleKind};
use contour_eigs::dense::C64;
use contour_eigs::forge::{gen_symmetric_dense, SymmetricSpec};
use contour_eigs::moments::factorize_points_with;
use contour_eigs::solvers::{solve_with, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (pencil, _) = gen_symmetric_dense(&SymmetricSpec::standard(200, 10), 5)?;
    let region = ContourRegion::ellipse(C64::new(0.0, 0.0), 1.0, 0.1)?;
    let rule = build_rule(region, RuleKind::Trapezoidal, 32)?;
    let cfg = SolverConfig {
        l: 16,
        m: 2,
        ..SolverConfig::default()
    };
    let mut values = Vec::new();
    for half in [false, true] {
        let f = factorize_points_with(&pencil, &rule, half)?;
        let r = solve_with(&f, &cfg)?;
        println!(
            "half_contour = {half:<5}  factorizations {:>2}  t_lu {:.3}s  found {}",
            f.factors().len(),
            r.timing.t_lu.as_secs_f64(),
            r.inside().count()
        );
        values.push(r.inside_values());
    }
    let gap = values[0].iter().zip(&values[1]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("largest eigenvalue difference {gap:.2e}");
    assert!(gap < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
