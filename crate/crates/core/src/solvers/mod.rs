//! The contour-integral eigensolvers.
//!
//! Every solver works on a [`PointFactorizations`] so that a driver can
//! factor `z_jB − A` once and run several methods on it; the `solve_*`
//! wrappers do the factoring themselves.

mod arnoldi;
mod beyn;
mod feast;
mod hankel;
mod rr;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contour::{build_rule, ContourRegion, RuleKind};
use crate::dense::{norm2, svd, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::moments::{factorize_points_with, random_block, MatrixPencil, PointFactorizations};

pub use arnoldi::ss_arnoldi_with;
pub use beyn::{beyn_with, ss_beyn_with};
pub use feast::feast_with;
pub use hankel::ss_hankel_with;
pub use rr::ss_rr_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SsHankel,
    SsRr,
    Feast,
    SsArnoldi,
    Beyn,
    SsBeyn,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::SsHankel,
        Method::SsRr,
        Method::Feast,
        Method::SsArnoldi,
        Method::Beyn,
        Method::SsBeyn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SsHankel => "ss_hankel",
            Method::SsRr => "ss_rr",
            Method::Feast => "feast",
            Method::SsArnoldi => "ss_arnoldi",
            Method::Beyn => "beyn",
            Method::SsBeyn => "ss_beyn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Block width L.
    pub l: usize,
    /// Moment degree M.
    pub m: usize,
    /// Quadrature points N.
    pub n: usize,
    pub rule: RuleKind,
    /// Relative singular value cutoff δ; 0 keeps every nonzero value.
    pub rank_cutoff: f64,
    pub max_feast_iters: usize,
    pub feast_tol: f64,
    pub seed: u64,
    /// Filter applications ℓ; the seed block is refined `ℓ − 1` times.
    pub refine: usize,
    /// Draw complex rather than real start blocks.
    pub complex_start: bool,
    /// Use `Ṽ = V` in SS–Hankel instead of an independent test block.
    pub hankel_vtilde_equals_v: bool,
    /// Factor only upper-half-plane nodes when the pencil is real.
    pub half_contour: bool,
    /// Relative axis growth applied when flagging pairs as inside.
    pub region_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::SsRr,
            l: 8,
            m: 2,
            n: 32,
            rule: RuleKind::Trapezoidal,
            rank_cutoff: 1e-14,
            max_feast_iters: 20,
            feast_tol: 1e-12,
            seed: 0,
            refine: 1,
            complex_start: false,
            hankel_vtilde_equals_v: false,
            half_contour: false,
            region_margin: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.l == 0 || self.m == 0 {
            return bad(format!("L and M must be positive (L = {}, M = {})", self.l, self.m));
        }
        if self.n < 2 {
            return bad(format!("N must be at least 2, got {}", self.n));
        }
        if !(0.0..1.0).contains(&self.rank_cutoff) {
            return bad(format!("rank cutoff must lie in [0, 1), got {}", self.rank_cutoff));
        }
        if self.refine == 0 {
            return bad("refinement count must be at least 1".into());
        }
        if self.max_feast_iters == 0 || self.feast_tol <= 0.0 {
            return bad("FEAST needs a positive iteration budget and tolerance".into());
        }
        Ok(())
    }

    pub fn with_method(&self, method: Method) -> Self {
        Self {
            method,
            ..self.clone()
        }
    }
}

/// One approximate eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxPair {
    pub value: C64,
    /// Unit 2-norm.
    pub vector: Vec<C64>,
    /// `‖Ax − λBx‖₂`.
    pub residual: f64,
    pub inside: bool,
}

/// Wall-clock phases. `t_other` is defined as `t_total − t_lu − t_solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Timing {
    pub t_lu: Duration,
    pub t_solve: Duration,
    pub t_other: Duration,
    pub t_total: Duration,
}

impl Timing {
    pub fn new(t_lu: Duration, t_solve: Duration, t_total: Duration) -> Self {
        let t_total = t_total.max(t_lu + t_solve);
        Self {
            t_lu,
            t_solve,
            t_other: t_total - t_lu - t_solve,
            t_total,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub method: Method,
    pub pairs: Vec<ApproxPair>,
    /// Numerical rank m̂ of the truncated basis.
    pub rank: usize,
    /// Largest rank the method could have reached (L for single-moment
    /// methods, LM otherwise). A rank equal to this may mean the subspace
    /// was too small.
    pub max_rank: usize,
    pub timing: Timing,
    pub iterations: usize,
    pub converged: bool,
    /// Largest in-region residual per FEAST iteration.
    pub residual_history: Vec<f64>,
}

impl EigenResult {
    pub fn inside(&self) -> impl Iterator<Item = &ApproxPair> {
        self.pairs.iter().filter(|p| p.inside)
    }

    pub fn inside_values(&self) -> Vec<C64> {
        self.inside().map(|p| p.value).collect()
    }

    pub fn saturated(&self) -> bool {
        self.rank == self.max_rank
    }

    pub fn max_inside_residual(&self) -> Option<f64> {
        self.inside().map(|p| p.residual).reduce(f64::max)
    }
}

/// Runs `config.method` on the pencil.
pub fn solve(pencil: &MatrixPencil, region: &ContourRegion, config: &SolverConfig) -> Result<EigenResult> {
    config.validate()?;
    let rule = build_rule(*region, config.rule, config.n)?;
    let f = factorize_points_with(pencil, &rule, config.half_contour)?;
    solve_with(&f, config)
}

/// Runs `config.method` on existing factorizations. `config.n` and
/// `config.rule` are taken from the factorizations.
pub fn solve_with(f: &PointFactorizations<'_>, config: &SolverConfig) -> Result<EigenResult> {
    config.validate()?;
    match config.method {
        Method::SsHankel => ss_hankel_with(f, config),
        Method::SsRr => ss_rr_with(f, config),
        Method::Feast => feast_with(f, config),
        Method::SsArnoldi => ss_arnoldi_with(f, config),
        Method::Beyn => beyn_with(f, config),
        Method::SsBeyn => ss_beyn_with(f, config),
    }
}

macro_rules! method_entry {
    ($name:ident, $method:expr) => {
        pub fn $name(pencil: &MatrixPencil, region: &ContourRegion, config: &SolverConfig) -> Result<EigenResult> {
            solve(pencil, region, &config.with_method($method))
        }
    };
}

method_entry!(solve_ss_hankel, Method::SsHankel);
method_entry!(solve_ss_rr, Method::SsRr);
method_entry!(solve_feast, Method::Feast);
method_entry!(solve_ss_arnoldi, Method::SsArnoldi);
method_entry!(solve_beyn, Method::Beyn);
method_entry!(solve_ss_beyn, Method::SsBeyn);

/// `‖Ax − λBx‖₂` for each pair.
pub fn residuals(pencil: &MatrixPencil, pairs: &[(C64, Vec<C64>)]) -> Vec<f64> {
    pairs.iter().map(|(l, x)| residual(pencil, *l, x)).collect()
}

fn residual(pencil: &MatrixPencil, lambda: C64, x: &[C64]) -> f64 {
    let ax = pencil.a().matvec(x);
    let bx = if pencil.flags().b_is_identity {
        x.to_vec()
    } else {
        pencil.b().matvec(x)
    };
    let r: Vec<C64> = ax.iter().zip(&bx).map(|(a, b)| a - lambda * b).collect();
    norm2(&r)
}

/// Sets each pair's `inside` flag; `margin` grows (or, negative, shrinks)
/// both axes relatively.
pub fn select_in_region(pairs: &mut [ApproxPair], region: &ContourRegion, margin: f64) {
    for p in pairs {
        p.inside = region.contains_with_margin(p.value, margin);
    }
}

struct Clock {
    start: Instant,
    solve: Duration,
}

impl Clock {
    fn start() -> Self {
        Self {
            start: Instant::now(),
            solve: Duration::ZERO,
        }
    }

    fn finish(&self, f: &PointFactorizations<'_>) -> Timing {
        Timing::new(f.lu_time(), self.solve, f.lu_time() + self.start.elapsed())
    }
}

/// Start blocks `V` and, from the same stream, `Ṽ`.
fn start_blocks(n: usize, config: &SolverConfig) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let v = random_block(n, config.l, config.complex_start, &mut rng);
    let vt = random_block(n, config.l, config.complex_start, &mut rng);
    (v, vt)
}

/// Leading singular triplets with `σ_i/σ_1 ≥ δ`.
struct Truncated {
    u: ComplexMatrix,
    sigma: Vec<f64>,
    w: ComplexMatrix,
}

fn truncated_svd(m: &ComplexMatrix, cutoff: f64) -> Result<Truncated> {
    let s = svd(m)?;
    let r = s.numerical_rank(cutoff);
    if r == 0 {
        return Err(Error::RankCollapse);
    }
    let (u, sigma, w) = s.truncate(r);
    Ok(Truncated { u, sigma, w })
}

/// `X·diag(σ)⁻¹`.
fn scale_columns_inv(x: &mut ComplexMatrix, sigma: &[f64]) {
    for (j, &s) in sigma.iter().enumerate() {
        let inv = 1.0 / s;
        for z in x.col_mut(j) {
            *z *= inv;
        }
    }
}

/// Normalizes, computes residuals and flags membership; pairs come back
/// sorted by real then imaginary part.
fn finish_pairs(
    pencil: &MatrixPencil,
    region: &ContourRegion,
    margin: f64,
    raw: Vec<(C64, Vec<C64>)>,
) -> Vec<ApproxPair> {
    let mut pairs: Vec<ApproxPair> = raw
        .into_iter()
        .map(|(value, mut vector)| {
            let nrm = norm2(&vector);
            if nrm > 0.0 {
                for z in &mut vector {
                    *z /= nrm;
                }
            }
            let residual = residual(pencil, value, &vector);
            ApproxPair {
                value,
                vector,
                residual,
                inside: false,
            }
        })
        .collect();
    select_in_region(&mut pairs, region, margin);
    pairs.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    pairs
}

/// Lifts reduced eigenvectors: `x_i = basis · t_i`.
fn lift(basis: &ComplexMatrix, pairs: Vec<crate::dense::EigPair>) -> Vec<(C64, Vec<C64>)> {
    pairs
        .into_iter()
        .map(|p| (p.value, basis.matvec(&p.vector)))
        .collect()
}

#[cfg(test)]
mod tests;
