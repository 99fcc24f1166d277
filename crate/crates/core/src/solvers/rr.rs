use super::{finish_pairs, lift, start_blocks, truncated_svd, Clock, EigenResult, Method, SolverConfig};
use crate::dense::eig_reduced_gep;
use crate::error::Result;
use crate::moments::{compute_moments, refine_subspace_timed, PointFactorizations};

/// Block SS–RR: Rayleigh–Ritz for `(A, B)` on the range of `Ŝ`.
pub fn ss_rr_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    let mut clock = Clock::start();
    let pencil = f.pencil();
    let (v, _) = start_blocks(pencil.dim(), config);
    let (v, t_refine) = refine_subspace_timed(f, &v, config.refine)?;
    clock.solve += t_refine;

    let stack = compute_moments(f, &v, config.m - 1)?;
    clock.solve += stack.solve_time();
    let t = truncated_svd(&stack.s_hat(config.m)?, config.rank_cutoff)?;
    let u = &t.u;
    let a_red = u.adjoint_matmul(&pencil.a().matmul(u));
    let b_red = u.adjoint_matmul(&pencil.apply_b(u));
    let raw = lift(u, eig_reduced_gep(&a_red, &b_red)?);
    let pairs = finish_pairs(pencil, f.rule().region(), config.region_margin, raw);

    Ok(EigenResult {
        method: Method::SsRr,
        pairs,
        rank: t.sigma.len(),
        max_rank: config.l * config.m,
        timing: clock.finish(f),
        iterations: 1,
        converged: true,
        residual_history: Vec::new(),
    })
}
