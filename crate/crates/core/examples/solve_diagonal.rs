// The smallest possible run: A = diag(0.5, 3), B = I, unit disk.

use contour_eigs::contour::ContourRegion;
use contour_eigs::dense::ComplexMatrix;
use contour_eigs::moments::MatrixPencil;
use contour_eigs::solvers::{solve_ss_rr, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 3.0]]);
    let pencil = MatrixPencil::standard(a)?;
    let cfg = SolverConfig {
        l: 2,
        m: 1,
        n: 16,
        ..SolverConfig::default()
    };
    let r = solve_ss_rr(&pencil, &ContourRegion::unit_circle(), &cfg)?;
    for p in r.inside() {
        println!("lambda = {:.15}  residual = {:.2e}", p.value, p.residual);
    }
    let inside = r.inside_values();
    assert_eq!(inside.len(), 1);
    assert!((inside[0].re - 0.5).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
