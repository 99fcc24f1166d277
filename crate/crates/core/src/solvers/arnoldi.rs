use super::{finish_pairs, lift, start_blocks, Clock, EigenResult, Method, SolverConfig};
use crate::dense::{eig_dense, lu_factor, lu_solve, qr_orthonormalize, ComplexMatrix, LinalgError};
use crate::error::{Error, Result};
use crate::moments::{compute_moments, refine_subspace_timed, PointFactorizations};

/// Block SS–Arnoldi. Multiplication by the filtered operator is carried by
/// per-node coefficient blocks `α_{k,j}`, so `W_k = Σ_j ω_j Y_j α_{k,j}`.
/// No rank truncation: the Ritz problem always has size LM.
pub fn ss_arnoldi_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    let mut clock = Clock::start();
    let pencil = f.pencil();
    let (l, m) = (config.l, config.m);
    if l * m > pencil.dim() {
        return Err(Error::InvalidConfig(format!(
            "block Arnoldi needs L·M ≤ n, got {}·{} > {}",
            l,
            m,
            pencil.dim()
        )));
    }
    let (v, _) = start_blocks(pencil.dim(), config);
    let (v, t_refine) = refine_subspace_timed(f, &v, config.refine)?;
    clock.solve += t_refine;

    let stack = compute_moments(f, &v, 0)?;
    clock.solve += stack.solve_time();
    let ys = stack.solutions();
    let rule = f.rule();
    let nodes = rule.points();
    let weights = rule.weights();

    let (w1, r) = qr_orthonormalize(stack.block(0)).map_err(|e| breakdown(e, 0))?;
    let r_inv = inverse(&r)?;
    let mut ws = vec![w1];
    let mut alphas: Vec<Vec<ComplexMatrix>> = vec![vec![r_inv; nodes.len()]];
    let mut h = ComplexMatrix::zeros(l * m, l * m);

    for k in 1..=m {
        let mut alpha_t: Vec<ComplexMatrix> = alphas[k - 1].iter().zip(nodes).map(|(a, &z)| a.scale(z)).collect();
        let mut wt = ComplexMatrix::zeros(pencil.dim(), l);
        for ((y, a), &w) in ys.iter().zip(&alpha_t).zip(weights) {
            wt.axpy(w, &y.matmul(a));
        }
        for i in 1..=k {
            let hik = ws[i - 1].adjoint_matmul(&wt);
            for (at, ai) in alpha_t.iter_mut().zip(&alphas[i - 1]) {
                *at = at.sub(&ai.matmul(&hik));
            }
            wt = wt.sub(&ws[i - 1].matmul(&hik));
            h.set_block((i - 1) * l, (k - 1) * l, &hik);
        }
        if k == m {
            // W_{M+1} and H_{M+1,M} do not enter the Ritz problem
            break;
        }
        let (wk1, hk1) = qr_orthonormalize(&wt).map_err(|e| breakdown(e, k))?;
        h.set_block(k * l, (k - 1) * l, &hk1);
        let hk1_inv = inverse(&hk1)?;
        alphas.push(alpha_t.iter().map(|a| a.matmul(&hk1_inv)).collect());
        ws.push(wk1);
    }

    let refs: Vec<&ComplexMatrix> = ws.iter().collect();
    let basis = ComplexMatrix::hcat(&refs);
    let raw = lift(&basis, eig_dense(&h)?);
    let pairs = finish_pairs(pencil, rule.region(), config.region_margin, raw);

    Ok(EigenResult {
        method: Method::SsArnoldi,
        pairs,
        rank: l * m,
        max_rank: l * m,
        timing: clock.finish(f),
        iterations: 1,
        converged: true,
        residual_history: Vec::new(),
    })
}

fn breakdown(e: LinalgError, step: usize) -> Error {
    match e {
        LinalgError::RankDeficient { column } => Error::ArnoldiBreakdown { step, column },
        other => other.into(),
    }
}

fn inverse(r: &ComplexMatrix) -> Result<ComplexMatrix> {
    let f = lu_factor(r)?;
    Ok(lu_solve(&f, &ComplexMatrix::identity(r.rows()))?)
}
