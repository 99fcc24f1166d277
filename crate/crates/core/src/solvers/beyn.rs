use super::{finish_pairs, lift, scale_columns_inv, start_blocks, truncated_svd, Clock, EigenResult, Method, SolverConfig};
use crate::dense::{eig_dense, ComplexMatrix};
use crate::error::Result;
use crate::moments::{compute_moments, refine_subspace_timed, PointFactorizations};

/// Beyn's method: `U₀ᴴŜ₁W₀Σ₀⁻¹` from the SVD of `Ŝ₀`. Uses M = 1 whatever
/// the configuration says.
pub fn beyn_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    if config.m > 1 {
        log::warn!("beyn uses a single moment; ignoring M = {}", config.m);
    }
    let mut r = projected(f, config, 1)?;
    r.method = Method::Beyn;
    Ok(r)
}

/// Block SS–Beyn: `U₁ᴴŜ₊W₁Σ₁⁻¹` from the SVD of `Ŝ = [Ŝ₀, …, Ŝ_{M−1}]`.
pub fn ss_beyn_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    projected(f, config, config.m)
}

fn projected(f: &PointFactorizations<'_>, config: &SolverConfig, m: usize) -> Result<EigenResult> {
    let mut clock = Clock::start();
    let pencil = f.pencil();
    let (v, _) = start_blocks(pencil.dim(), config);
    let (v, t_refine) = refine_subspace_timed(f, &v, config.refine)?;
    clock.solve += t_refine;

    let stack = compute_moments(f, &v, m)?;
    clock.solve += stack.solve_time();
    let t = truncated_svd(&stack.s_hat(m)?, config.rank_cutoff)?;
    let reduced = reduce(&t.u, &stack.s_plus(m)?, &t.w, &t.sigma);
    let raw = lift(&t.u, eig_dense(&reduced)?);
    let pairs = finish_pairs(pencil, f.rule().region(), config.region_margin, raw);

    Ok(EigenResult {
        method: Method::SsBeyn,
        pairs,
        rank: t.sigma.len(),
        max_rank: config.l * m,
        timing: clock.finish(f),
        iterations: 1,
        converged: true,
        residual_history: Vec::new(),
    })
}

/// `Uᴴ·X·W·Σ⁻¹`.
fn reduce(u: &ComplexMatrix, x: &ComplexMatrix, w: &ComplexMatrix, sigma: &[f64]) -> ComplexMatrix {
    let mut xw = x.matmul(w);
    scale_columns_inv(&mut xw, sigma);
    u.adjoint_matmul(&xw)
}
