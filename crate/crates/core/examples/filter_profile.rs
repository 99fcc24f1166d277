// Magnitude of the quadrature filter along the real axis for a few N.

use contour_eigs::contour::{build_rule, filter_profile, ContourRegion, RuleKind};
use contour_eigs::dense::C64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let xs: Vec<C64> = [0.0, 0.5, 0.9, 1.1, 1.5, 2.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    println!("{:>6} {:>12} {:>12} {:>12}", "x", "N=4", "N=16", "N=32");
    let profiles = [4, 16, 32]
        .iter()
        .map(|&n| filter_profile(&build_rule(ContourRegion::unit_circle(), RuleKind::Trapezoidal, n)?, &xs))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, x) in xs.iter().enumerate() {
        println!(
            "{:>6.2} {:>12.3e} {:>12.3e} {:>12.3e}",
            x.re, profiles[0].magnitudes[i], profiles[1].magnitudes[i], profiles[2].magnitudes[i]
        );
    }
    // shifted nodes on the unit circle: f(x) = 1/(1 + x^N); outside the
    // circle the sum cancels down from O(1) terms, so compare absolutely
    let expect = 1.0 / (1.0 + 1.5f64.powi(32));
    assert!((profiles[2].magnitudes[4] - expect).abs() <= 1e-15);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
