// FEAST residual history when one eigenvalue sits just outside the contour
// where |f| = 0.1: each iteration gains about one digit.

use contour_eigs::contour::{ContourRegion, RuleKind};
use contour_eigs::forge::gen_hermitian;
use contour_eigs::solvers::{solve_feast, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut eigs = vec![-0.5, -0.1, 0.3, 0.65, 9f64.powf(1.0 / 16.0)];
    eigs.extend((0..15).map(|i| 3.0 + 0.2 * i as f64));
    let (pencil, _) = gen_hermitian(&eigs, 2)?;
    let cfg = SolverConfig {
        l: 4,
        n: 16,
        rule: RuleKind::Trapezoidal,
        max_feast_iters: 20,
        feast_tol: 1e-12,
        ..SolverConfig::default()
    };
    let r = solve_feast(&pencil, &ContourRegion::unit_circle(), &cfg)?;
    for (i, res) in r.residual_history.iter().enumerate() {
        println!("iteration {:>2}: worst residual {:.3e}", i + 1, res);
    }
    assert!(r.converged);
    assert_eq!(r.inside().count(), 4);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
