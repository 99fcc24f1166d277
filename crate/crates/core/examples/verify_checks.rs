// The verification suite, once as configured and once with a broken rule.

use contour_eigs::harness::{verify_suite, VerifyConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let report = verify_suite(&VerifyConfig {
        seeds: vec![1, 2],
        ..VerifyConfig::default()
    });
    print!("{report}");
    assert!(report.all_passed());

    let broken = verify_suite(&VerifyConfig {
        seeds: vec![1],
        zero_weight: Some(5),
        ..VerifyConfig::default()
    });
    print!("{broken}");
    assert!(!broken.all_passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
