// A pencil with a Jordan block and infinite eigenvalues (singular B).
// The in-region finite eigenvalues come out; the infinite ones never do.

use contour_eigs::contour::ContourRegion;
use contour_eigs::forge::{gen_weierstrass, JordanSpec};
use contour_eigs::solvers::{solve_ss_hankel, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec: JordanSpec = "(0.3,0,2);(0.5,0,1);(2.5,0.5,1);INF,2".parse()?;
    let (pencil, truth) = gen_weierstrass(&spec, 11)?;
    println!("n = {}, finite part r = {}, eta = {}", pencil.dim(), truth.finite_dim(), truth.eta());
    let cfg = SolverConfig {
        l: 2,
        m: 2,
        n: 32,
        ..SolverConfig::default()
    };
    let r = solve_ss_hankel(&pencil, &ContourRegion::unit_circle(), &cfg)?;
    for p in r.inside() {
        println!("lambda = {:.10}  residual = {:.2e}", p.value, p.residual);
    }
    let vals = r.inside_values();
    assert_eq!(vals.len(), 3);
    // a double defective eigenvalue is only accurate to about sqrt(eps)
    assert_eq!(vals.iter().filter(|v| (v.re - 0.3).abs() < 1e-6).count(), 2);
    assert_eq!(vals.iter().filter(|v| (v.re - 0.5).abs() < 1e-10).count(), 1);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
