use super::{finish_pairs, lift, start_blocks, truncated_svd, Clock, EigenResult, Method, SolverConfig};
use crate::dense::{eig_reduced_gep, ComplexMatrix};
use crate::error::{Error, Result};
use crate::moments::{compute_moments, PointFactorizations};

/// FEAST subspace iteration with Rayleigh–Ritz on `span(Ŝ₀)`. Stops when
/// the largest in-region residual drops below `feast_tol`; otherwise returns
/// the last iterate with `converged = false`.
pub fn feast_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    let pencil = f.pencil();
    if !pencil.is_hermitian_definite() {
        return Err(Error::NotHermitianDefinite);
    }
    if config.m > 1 {
        log::debug!("feast uses a single moment; ignoring M = {}", config.m);
    }
    let mut clock = Clock::start();
    let n = pencil.dim();
    let (v0, _) = start_blocks(n, config);
    let mut v = v0.clone();
    let mut history = Vec::new();
    let mut converged = false;
    let mut pairs = Vec::new();
    let mut rank = 0;
    let mut iterations = 0;

    for it in 1..=config.max_feast_iters {
        iterations = it;
        let stack = compute_moments(f, &v, 0)?;
        clock.solve += stack.solve_time();
        let t = truncated_svd(stack.block(0), config.rank_cutoff)?;
        let u = &t.u;
        let a_red = u.adjoint_matmul(&pencil.a().matmul(u));
        let b_red = u.adjoint_matmul(&pencil.apply_b(u));
        let raw = lift(u, eig_reduced_gep(&a_red, &b_red)?);
        pairs = finish_pairs(pencil, f.rule().region(), config.region_margin, raw);
        rank = t.sigma.len();

        let worst = pairs.iter().filter(|p| p.inside).map(|p| p.residual).fold(0.0, f64::max);
        history.push(worst);
        if worst < config.feast_tol {
            converged = true;
            break;
        }

        let width = pairs.len().max(config.l);
        let mut next = ComplexMatrix::zeros(n, width);
        for (j, p) in pairs.iter().enumerate() {
            next.col_mut(j).copy_from_slice(&p.vector);
        }
        for j in pairs.len()..width {
            next.col_mut(j).copy_from_slice(v0.col(j));
        }
        v = next;
    }

    Ok(EigenResult {
        method: Method::Feast,
        pairs,
        rank,
        max_rank: config.l,
        timing: clock.finish(f),
        iterations,
        converged,
        residual_history: history,
    })
}
