use super::{finish_pairs, lift, scale_columns_inv, start_blocks, truncated_svd, Clock, EigenResult, Method, SolverConfig};
use crate::dense::eig_dense;
use crate::error::Result;
use crate::moments::{assemble_hankel, block_moments, compute_moments, refine_subspace_timed, PointFactorizations};

/// Block SS–Hankel: Petrov–Galerkin on the block Hankel pair.
pub fn ss_hankel_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    let mut clock = Clock::start();
    let pencil = f.pencil();
    let m = config.m;
    let (v, vt) = start_blocks(pencil.dim(), config);
    let vt = if config.hankel_vtilde_equals_v { v.clone() } else { vt };
    let (v, t_refine) = refine_subspace_timed(f, &v, config.refine)?;
    clock.solve += t_refine;

    let stack = compute_moments(f, &v, 2 * m - 1)?;
    clock.solve += stack.solve_time();
    let mu = block_moments(&vt, &stack, 2 * m - 1)?;
    let (h, h_shift) = assemble_hankel(&mu, m)?;

    let t = truncated_svd(&h, config.rank_cutoff)?;
    let mut hw = h_shift.matmul(&t.w);
    scale_columns_inv(&mut hw, &t.sigma);
    let reduced = t.u.adjoint_matmul(&hw);

    let mut basis = stack.s_hat(m)?.matmul(&t.w);
    scale_columns_inv(&mut basis, &t.sigma);
    let raw = lift(&basis, eig_dense(&reduced)?);
    let pairs = finish_pairs(pencil, f.rule().region(), config.region_margin, raw);

    Ok(EigenResult {
        method: Method::SsHankel,
        pairs,
        rank: t.sigma.len(),
        max_rank: config.l * m,
        timing: clock.finish(f),
        iterations: 1,
        converged: true,
        residual_history: Vec::new(),
    })
}
