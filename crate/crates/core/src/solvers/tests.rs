use super::*;
use crate::dense::{lu_factor, lu_solve, ZERO};
use rand::Rng;

fn toy() -> MatrixPencil {
    MatrixPencil::standard(ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 3.0]])).unwrap()
}

fn cfg(method: Method, l: usize, m: usize, n: usize) -> SolverConfig {
    SolverConfig {
        method,
        l,
        m,
        n,
        seed: 5,
        ..Default::default()
    }
}

/// `A = X·diag(d)·X⁻¹` with `X = I + 0.2·G`.
fn similar(d: &[C64], seed: u64) -> MatrixPencil {
    let n = d.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = ComplexMatrix::from_fn(n, n, |i, j| {
        let g = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.2;
        if i == j {
            g + 1.0
        } else {
            g
        }
    });
    let xd = x.matmul(&ComplexMatrix::from_diag(d));
    let xt = lu_solve(&lu_factor(&x.adjoint()).unwrap(), &xd.adjoint()).unwrap();
    MatrixPencil::standard(xt.adjoint()).unwrap()
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn check_result_invariants(p: &MatrixPencil, r: &EigenResult) {
    assert!(r.rank <= r.max_rank);
    for pair in &r.pairs {
        assert!((norm2(&pair.vector) - 1.0).abs() <= 1e-12);
        let again = residuals(p, &[(pair.value, pair.vector.clone())])[0];
        assert!((again - pair.residual).abs() <= 1e-13);
    }
}

#[test]
fn hankel_on_diagonal_toy() {
    let p = toy();
    let r = solve_ss_hankel(&p, &ContourRegion::unit_circle(), &cfg(Method::SsHankel, 1, 2, 16)).unwrap();
    let inside = r.inside_values();
    assert_eq!(inside.len(), 1);
    assert!((inside[0] - C64::new(0.5, 0.0)).norm() <= 1e-10);
    assert!(r.pairs.iter().all(|x| x.inside || !ContourRegion::unit_circle().contains(x.value)));
    check_result_invariants(&p, &r);
}

#[test]
fn rr_on_diagonal_toy() {
    let p = toy();
    let r = solve_ss_rr(&p, &ContourRegion::unit_circle(), &cfg(Method::SsRr, 1, 2, 16)).unwrap();
    let inside: Vec<&ApproxPair> = r.inside().collect();
    assert_eq!(inside.len(), 1);
    assert!((inside[0].value - C64::new(0.5, 0.0)).norm() <= 1e-12);
    assert!(inside[0].residual <= 1e-12);
    check_result_invariants(&p, &r);
}

#[test]
fn feast_full_subspace_converges_at_once() {
    let p = toy();
    let r = solve_feast(&p, &ContourRegion::unit_circle(), &cfg(Method::Feast, 2, 1, 16)).unwrap();
    assert!(r.converged);
    assert_eq!(r.iterations, 1);
    assert!(r.max_inside_residual().unwrap() <= 1e-12);
    check_result_invariants(&p, &r);
}

#[test]
fn feast_one_vector_needs_a_second_pass() {
    let p = toy();
    let r = solve_feast(&p, &ContourRegion::unit_circle(), &cfg(Method::Feast, 1, 1, 16)).unwrap();
    assert!(r.converged);
    assert_eq!(r.residual_history.len(), r.iterations);
    assert!(r.iterations >= 2);
}

#[test]
fn feast_rejects_non_hermitian() {
    let p = MatrixPencil::standard(ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 3.0]])).unwrap();
    assert!(matches!(
        solve_feast(&p, &ContourRegion::unit_circle(), &cfg(Method::Feast, 2, 1, 16)),
        Err(Error::NotHermitianDefinite)
    ));
}

#[test]
fn arnoldi_on_diagonal_toy() {
    let p = toy();
    let r = solve_ss_arnoldi(&p, &ContourRegion::unit_circle(), &cfg(Method::SsArnoldi, 1, 2, 16)).unwrap();
    assert_eq!(r.rank, 2);
    assert!(r.pairs.iter().any(|x| (x.value - C64::new(0.5, 0.0)).norm() <= 1e-8));
    check_result_invariants(&p, &r);
}

#[test]
fn arnoldi_single_step_equals_untruncated_beyn() {
    let d: Vec<C64> = [0.1, -0.4, 0.35, 2.0, -3.0, 4.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    let p = similar(&d, 9);
    let region = ContourRegion::unit_circle();
    let mut c = cfg(Method::SsArnoldi, 1, 1, 32);
    c.rank_cutoff = 0.0;
    let a = solve_ss_arnoldi(&p, &region, &c).unwrap();
    let b = solve_beyn(&p, &region, &c).unwrap();
    assert_eq!(a.pairs.len(), 1);
    assert_eq!(b.pairs.len(), 1);
    assert!((a.pairs[0].value - b.pairs[0].value).norm() <= 1e-10);
}

#[test]
fn arnoldi_breakdown_is_reported() {
    // a start block wider than the filtered rank makes W₀ rank deficient
    let p = toy();
    let mut c = cfg(Method::SsArnoldi, 2, 1, 16);
    c.m = 1;
    assert!(solve_ss_arnoldi(&p, &ContourRegion::unit_circle(), &c).is_ok());
    let p3 = MatrixPencil::standard(ComplexMatrix::from_diag(&[C64::new(0.5, 0.0), C64::new(5.0, 0.0), C64::new(6.0, 0.0)])).unwrap();
    let c = cfg(Method::SsArnoldi, 3, 1, 32);
    assert!(matches!(
        solve_ss_arnoldi(&p3, &ContourRegion::unit_circle(), &c),
        Err(Error::ArnoldiBreakdown { step: 0, .. })
    ));
}

#[test]
fn beyn_truncates_to_one() {
    let p = toy();
    let mut c = cfg(Method::Beyn, 2, 1, 16);
    c.rank_cutoff = 1e-6;
    let r = solve_beyn(&p, &ContourRegion::unit_circle(), &c).unwrap();
    assert_eq!(r.rank, 1);
    assert_eq!(r.pairs.len(), 1);
    assert!((r.pairs[0].value - C64::new(0.5, 0.0)).norm() <= 1e-7);
}

#[test]
fn beyn_undersized_block_is_saturated() {
    let d: Vec<C64> = [0.2, -0.3, 4.0, -5.0, 6.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    let p = similar(&d, 3);
    let r = solve_beyn(&p, &ContourRegion::unit_circle(), &cfg(Method::Beyn, 1, 1, 32)).unwrap();
    assert_eq!(r.pairs.len(), 1);
    assert!(r.saturated());
    let r = solve_beyn(&p, &ContourRegion::unit_circle(), &cfg(Method::Beyn, 4, 1, 32)).unwrap();
    assert!(!r.saturated());
    assert_eq!(r.inside_values().len(), 2);
}

#[test]
fn ss_beyn_with_one_moment_is_beyn() {
    let d: Vec<C64> = [0.2, -0.3, 0.1, 2.5, -2.5, 3.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    let p = similar(&d, 4);
    let region = ContourRegion::unit_circle();
    let c = cfg(Method::Beyn, 4, 1, 32);
    let a = solve_beyn(&p, &region, &c).unwrap();
    let b = solve_ss_beyn(&p, &region, &c).unwrap();
    assert_eq!(a.pairs.len(), b.pairs.len());
    for (x, y) in a.pairs.iter().zip(&b.pairs) {
        assert!((x.value - y.value).norm() <= 1e-12);
    }
}

#[test]
fn projection_methods_agree_on_standard_problem() {
    let d: Vec<C64> = [0.2, -0.3, 0.1, 0.55, 3.5, -3.5, 3.0, 4.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    let p = similar(&d, 12);
    let region = ContourRegion::unit_circle();
    let c = cfg(Method::SsRr, 4, 1, 32);
    let rr = sorted(solve_ss_rr(&p, &region, &c).unwrap().inside_values());
    let beyn = sorted(solve_beyn(&p, &region, &c).unwrap().inside_values());
    let c2 = cfg(Method::SsBeyn, 2, 3, 32);
    let ssb = sorted(solve_ss_beyn(&p, &region, &c2).unwrap().inside_values());
    assert_eq!(rr.len(), 4);
    for ((a, b), c) in rr.iter().zip(&beyn).zip(&ssb) {
        assert!((a - b).norm() <= 1e-9);
        assert!((a - c).norm() <= 1e-9);
    }
}

#[test]
fn jordan_block_through_hankel() {
    let a = ComplexMatrix::from_real_rows(&[
        &[0.3, 1.0, 0.0, 0.0],
        &[0.0, 0.3, 0.0, 0.0],
        &[0.0, 0.0, 3.0, 0.0],
        &[0.0, 0.0, 0.0, -2.5],
    ]);
    let p = MatrixPencil::standard(a).unwrap();
    let r = solve_ss_hankel(&p, &ContourRegion::unit_circle(), &cfg(Method::SsHankel, 2, 2, 32)).unwrap();
    let inside = r.inside_values();
    assert_eq!(inside.len(), 2);
    for v in inside {
        assert!((v - C64::new(0.3, 0.0)).norm() <= 1e-6);
    }
}

#[test]
fn every_method_keeps_result_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 30;
    let g = random_block(n, n, false, &mut rng);
    let a = g.add(&g.transpose()).scale(C64::new(0.3, 0.0));
    let p = MatrixPencil::standard(a).unwrap();
    let region = ContourRegion::circle(ZERO, 1.0).unwrap();
    for method in Method::ALL {
        let r = solve(&p, &region, &cfg(method, 6, 2, 32)).unwrap();
        check_result_invariants(&p, &r);
        assert_eq!(r.method, method);
        assert!(r.timing.t_total >= r.timing.t_lu + r.timing.t_solve);
        assert_eq!(r.timing.t_other, r.timing.t_total - r.timing.t_lu - r.timing.t_solve);
    }
}

#[test]
fn residual_and_selection_helpers() {
    let p = toy();
    let exact = residuals(&p, &[(C64::new(0.5, 0.0), vec![C64::new(1.0, 0.0), ZERO])]);
    assert!(exact[0] <= 1e-14);
    // perturbed vector: residual is ε‖(A − λI)u‖ to first order
    let eps = 1e-6;
    let r = residuals(&p, &[(C64::new(0.5, 0.0), vec![C64::new(1.0, 0.0), C64::new(eps, 0.0)])])[0];
    assert!((r - eps * 2.5).abs() <= 1e-12);

    let mk = |v: f64| ApproxPair {
        value: C64::new(v, 0.0),
        vector: vec![],
        residual: 0.0,
        inside: false,
    };
    let mut pairs = vec![mk(0.0), mk(1.0), mk(1.02)];
    let region = ContourRegion::unit_circle();
    select_in_region(&mut pairs, &region, 0.0);
    assert_eq!(pairs.iter().map(|p| p.inside).collect::<Vec<_>>(), vec![true, false, false]);
    select_in_region(&mut pairs, &region, 0.05);
    assert_eq!(pairs.iter().map(|p| p.inside).collect::<Vec<_>>(), vec![true, true, true]);
}

#[test]
fn config_validation_and_method_names() {
    assert!(SolverConfig::default().validate().is_ok());
    let bad = SolverConfig {
        l: 0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
    let bad = SolverConfig {
        rank_cutoff: 1.0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
    for m in Method::ALL {
        assert_eq!(m.name().parse::<Method>().unwrap(), m);
    }
    assert!("qz".parse::<Method>().is_err());
}
