// Write a generated pencil with its ground truth to a file, read it back
// and solve it.

use contour_eigs::contour::ContourRegion;
use contour_eigs::forge::{gen_weierstrass, JordanSpec};
use contour_eigs::harness::{load_problem, save_problem};
use contour_eigs::solvers::{solve_ss_beyn, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec: JordanSpec = "(0.25,0.1,1);(-0.4,0,1);(3,0,1);INF,1".parse()?;
    let (pencil, truth) = gen_weierstrass(&spec, 8)?;
    let dir = std::env::temp_dir().join(format!("contour-eigs-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("pencil.txt");
    save_problem(&path, &pencil, Some(&truth))?;
    let (loaded, loaded_truth) = load_problem(&path)?;
    std::fs::remove_dir_all(&dir)?;
    assert_eq!(loaded.a(), pencil.a());
    assert_eq!(loaded_truth.as_ref().map(|t| t.finite_pairs.len()), Some(3));

    let cfg = SolverConfig {
        l: 2,
        m: 2,
        ..SolverConfig::default()
    };
    let r = solve_ss_beyn(&loaded, &ContourRegion::unit_circle(), &cfg)?;
    for p in r.inside() {
        println!("lambda = {:.12}  residual = {:.2e}", p.value, p.residual);
    }
    assert_eq!(r.inside().count(), 2);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
