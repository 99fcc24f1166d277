//! Quadrature-point factorizations, the moment blocks `Ŝ_k` and everything
//! built directly from them.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::contour::QuadratureRule;
use crate::dense::{householder_qr, lu_factor, lu_solve, ComplexMatrix, LinalgError, LuFactorization, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PencilFlags {
    pub hermitian_a: bool,
    pub hpd_b: bool,
    pub b_is_identity: bool,
}

/// The pair `(A, B)` of `Ax = λBx`.
#[derive(Debug, Clone)]
pub struct MatrixPencil {
    a: ComplexMatrix,
    b: ComplexMatrix,
    flags: PencilFlags,
}

impl MatrixPencil {
    /// Builds a pencil and detects its structure flags.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        check_shapes(&a, &b)?;
        let b_is_identity = b == ComplexMatrix::identity(b.rows());
        let flags = PencilFlags {
            hermitian_a: is_hermitian(&a),
            hpd_b: b_is_identity || (is_hermitian(&b) && cholesky_succeeds(&b)),
            b_is_identity,
        };
        Ok(Self { a, b, flags })
    }

    /// `Ax = λx`.
    pub fn standard(a: ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        Self::new(a, ComplexMatrix::identity(n))
    }

    /// Builds a pencil with claimed flags, each of which is verified.
    pub fn with_flags(a: ComplexMatrix, b: ComplexMatrix, flags: PencilFlags) -> Result<Self> {
        let p = Self::new(a, b)?;
        if flags.hermitian_a && !p.flags.hermitian_a {
            return Err(Error::FlagMismatch { flag: "hermitian_a" });
        }
        if flags.hpd_b && !p.flags.hpd_b {
            return Err(Error::FlagMismatch { flag: "hpd_b" });
        }
        if flags.b_is_identity && !p.flags.b_is_identity {
            return Err(Error::FlagMismatch { flag: "b_is_identity" });
        }
        Ok(p)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn flags(&self) -> PencilFlags {
        self.flags
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real()
    }

    pub fn is_hermitian_definite(&self) -> bool {
        self.flags.hermitian_a && self.flags.hpd_b
    }

    pub fn apply_b(&self, x: &ComplexMatrix) -> ComplexMatrix {
        if self.flags.b_is_identity {
            x.clone()
        } else {
            self.b.matmul(x)
        }
    }

    /// `zB − A`.
    pub fn shifted(&self, z: C64) -> ComplexMatrix {
        let mut m = self.b.scale(z);
        m.axpy(C64::new(-1.0, 0.0), &self.a);
        m
    }
}

fn check_shapes(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        }
        .into());
    }
    if a.shape() != b.shape() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.shape(),
            found: b.shape(),
        }
        .into());
    }
    Ok(())
}

fn is_hermitian(m: &ComplexMatrix) -> bool {
    m.sub(&m.adjoint()).norm_max() <= HERMITIAN_TOL * m.norm_max()
}

fn cholesky_succeeds(m: &ComplexMatrix) -> bool {
    let n = m.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

/// Standard-normal `n×l` block; real unless `complex` is set.
pub fn random_block(n: usize, l: usize, complex: bool, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, l, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
        C64::new(re, im)
    })
}

/// How the solution at a node is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    /// Solve with the stored factorization.
    Factor(usize),
    /// Node is the conjugate of a factored node on a real pencil:
    /// `(z̄B − A)⁻¹ y = conj((zB − A)⁻¹ conj(y))`.
    Conjugate { factor: usize, partner: usize },
}

/// LU factorizations of `z_jB − A` for every node of a rule.
#[derive(Debug)]
pub struct PointFactorizations<'p> {
    pencil: &'p MatrixPencil,
    rule: QuadratureRule,
    factors: Vec<LuFactorization>,
    sources: Vec<PointSource>,
    recip_conds: Vec<f64>,
    lu_time: Duration,
}

impl<'p> PointFactorizations<'p> {
    pub fn pencil(&self) -> &'p MatrixPencil {
        self.pencil
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn factors(&self) -> &[LuFactorization] {
        &self.factors
    }

    pub fn sources(&self) -> &[PointSource] {
        &self.sources
    }

    /// Reciprocal condition estimate per stored factorization.
    pub fn recip_conds(&self) -> &[f64] {
        &self.recip_conds
    }

    pub fn lu_time(&self) -> Duration {
        self.lu_time
    }

    /// Whether conjugate symmetry halved the number of factorizations.
    pub fn is_half_contour(&self) -> bool {
        self.factors.len() < self.rule.len()
    }

    /// `Y_j = (z_jB − A)⁻¹ rhs` for every node, in node order, together with
    /// the time spent in triangular solves.
    pub fn solve_all(&self, rhs: &ComplexMatrix) -> Result<(Vec<ComplexMatrix>, Duration)> {
        let start = Instant::now();
        let rhs_real = rhs.is_real();
        let rhs_conj = if self.is_half_contour() && !rhs_real {
            Some(rhs.conj())
        } else {
            None
        };
        let direct: Vec<ComplexMatrix> = self
            .factors
            .par_iter()
            .map(|f| lu_solve(f, rhs))
            .collect::<Result<_, _>>()?;
        let conj_solves: Vec<Option<ComplexMatrix>> = self
            .sources
            .par_iter()
            .map(|s| match (s, &rhs_conj) {
                (PointSource::Conjugate { factor, .. }, Some(rc)) => lu_solve(&self.factors[*factor], rc).map(|y| Some(y.conj())),
                _ => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        let ys = self
            .sources
            .iter()
            .zip(conj_solves)
            .map(|(s, cs)| match (s, cs) {
                (PointSource::Factor(i), _) => direct[*i].clone(),
                (PointSource::Conjugate { .. }, Some(y)) => y,
                (PointSource::Conjugate { factor, .. }, None) => direct[*factor].conj(),
            })
            .collect();
        Ok((ys, start.elapsed()))
    }

    /// `Σ_j ω_j (z_jB − A)⁻¹ B X`, the filtered operator applied once.
    pub fn apply_filter(&self, x: &ComplexMatrix) -> Result<(ComplexMatrix, Duration)> {
        let bx = self.pencil.apply_b(x);
        let (ys, t) = self.solve_all(&bx)?;
        let mut s = ComplexMatrix::zeros(x.rows(), x.cols());
        for (y, &w) in ys.iter().zip(self.rule.weights()) {
            s.axpy(w, y);
        }
        Ok((s, t))
    }
}

/// Factorizes `z_jB − A` at every node.
pub fn factorize_points<'p>(pencil: &'p MatrixPencil, rule: &QuadratureRule) -> Result<PointFactorizations<'p>> {
    factorize_points_with(pencil, rule, false)
}

/// Like [`factorize_points`]; with `half_contour` set, a real pencil and a
/// rule closed under conjugation, only nodes with `Im z ≥ 0` are factored.
pub fn factorize_points_with<'p>(
    pencil: &'p MatrixPencil,
    rule: &QuadratureRule,
    half_contour: bool,
) -> Result<PointFactorizations<'p>> {
    let n = rule.len();
    let pairing = if half_contour && pencil.is_real() {
        rule.conjugate_pairs()
    } else {
        None
    };
    if half_contour && pairing.is_none() {
        log::info!("half-contour shortcut not applicable; factoring all {n} nodes");
    }
    let mut sources = vec![PointSource::Factor(0); n];
    let mut nodes = Vec::with_capacity(n);
    match &pairing {
        Some(p) => {
            let mut owners: Vec<(usize, Option<usize>)> = p.pairs.iter().map(|&(u, l)| (u, Some(l))).collect();
            owners.extend(p.real_nodes.iter().map(|&r| (r, None)));
            owners.sort_unstable();
            for (u, lower) in owners {
                let fi = nodes.len();
                nodes.push(u);
                sources[u] = PointSource::Factor(fi);
                if let Some(l) = lower {
                    sources[l] = PointSource::Conjugate { factor: fi, partner: u };
                }
            }
        }
        None => {
            for (j, s) in sources.iter_mut().enumerate() {
                *s = PointSource::Factor(j);
                nodes.push(j);
            }
        }
    }

    let start = Instant::now();
    let results: Vec<std::result::Result<LuFactorization, LinalgError>> = nodes
        .par_iter()
        .map(|&j| lu_factor(&pencil.shifted(rule.points()[j])))
        .collect();
    let lu_time = start.elapsed();

    let mut factors = Vec::with_capacity(nodes.len());
    for (res, &j) in results.into_iter().zip(&nodes) {
        match res {
            Ok(f) if f.rcond() > 0.0 => factors.push(f),
            Ok(_) | Err(LinalgError::SingularMatrix { .. }) => {
                return Err(Error::QuadraturePointHitsSpectrum {
                    index: j,
                    point: rule.points()[j],
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
    let recip_conds = factors.iter().map(|f| f.rcond()).collect();
    Ok(PointFactorizations {
        pencil,
        rule: rule.clone(),
        factors,
        sources,
        recip_conds,
        lu_time,
    })
}

/// `Ŝ_0..Ŝ_degree` with the per-node solutions they were summed from.
#[derive(Debug, Clone)]
pub struct MomentStack {
    blocks: Vec<ComplexMatrix>,
    solutions: Vec<ComplexMatrix>,
    block_width: usize,
    solve_time: Duration,
}

impl MomentStack {
    pub fn degree(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn block(&self, k: usize) -> &ComplexMatrix {
        &self.blocks[k]
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// `Y_j = (z_jB − A)⁻¹BV` in node order.
    pub fn solutions(&self) -> &[ComplexMatrix] {
        &self.solutions
    }

    pub fn solve_time(&self) -> Duration {
        self.solve_time
    }

    /// `Ŝ = [Ŝ_0, …, Ŝ_{m−1}]`.
    pub fn s_hat(&self, m: usize) -> Result<ComplexMatrix> {
        self.require(m.saturating_sub(1))?;
        let refs: Vec<&ComplexMatrix> = self.blocks[..m].iter().collect();
        Ok(ComplexMatrix::hcat(&refs))
    }

    /// `Ŝ_+ = [Ŝ_1, …, Ŝ_m]`.
    pub fn s_plus(&self, m: usize) -> Result<ComplexMatrix> {
        self.require(m)?;
        let refs: Vec<&ComplexMatrix> = self.blocks[1..=m].iter().collect();
        Ok(ComplexMatrix::hcat(&refs))
    }

    fn require(&self, needed: usize) -> Result<()> {
        if needed > self.degree() {
            return Err(Error::InsufficientDegree {
                needed,
                available: self.degree(),
            });
        }
        Ok(())
    }
}

/// `Ŝ_k = Σ_j ω_j z_j^k (z_jB − A)⁻¹BV` for `k = 0..=degree`, summed in
/// ascending node order.
pub fn compute_moments(f: &PointFactorizations<'_>, v: &ComplexMatrix, degree: usize) -> Result<MomentStack> {
    let n = f.pencil.dim();
    if v.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, v.cols()),
            found: v.shape(),
        }
        .into());
    }
    let bv = f.pencil.apply_b(v);
    let (solutions, solve_time) = f.solve_all(&bv)?;
    let blocks = moments_from_solutions(f.rule(), &solutions, n, v.cols(), degree);
    Ok(MomentStack {
        blocks,
        solutions,
        block_width: v.cols(),
        solve_time,
    })
}

pub(crate) fn moments_from_solutions(
    rule: &QuadratureRule,
    solutions: &[ComplexMatrix],
    n: usize,
    l: usize,
    degree: usize,
) -> Vec<ComplexMatrix> {
    let mut blocks = vec![ComplexMatrix::zeros(n, l); degree + 1];
    for (block_k, k) in blocks.iter_mut().zip(0..) {
        for ((y, &w), &z) in solutions.iter().zip(rule.weights()).zip(rule.points()) {
            block_k.axpy(w * z.powu(k), y);
        }
    }
    blocks
}

/// `μ̂_k = ṼᴴŜ_k` for `k = 0..=upto`.
pub fn block_moments(vtilde: &ComplexMatrix, stack: &MomentStack, upto: usize) -> Result<Vec<ComplexMatrix>> {
    stack.require(upto)?;
    Ok(stack.blocks[..=upto].iter().map(|s| vtilde.adjoint_matmul(s)).collect())
}

/// Block Hankel pair: block `(i, j)` of `H` is `μ̂_{i+j}`, of `H_<` is
/// `μ̂_{i+j+1}`.
pub fn assemble_hankel(moments: &[ComplexMatrix], m: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if m == 0 || moments.len() < 2 * m {
        return Err(Error::InsufficientDegree {
            needed: 2 * m.max(1) - 1,
            available: moments.len().saturating_sub(1),
        });
    }
    let l = moments[0].rows();
    let mut h = ComplexMatrix::zeros(l * m, l * m);
    let mut hs = ComplexMatrix::zeros(l * m, l * m);
    for i in 0..m {
        for j in 0..m {
            h.set_block(i * l, j * l, &moments[i + j]);
            hs.set_block(i * l, j * l, &moments[i + j + 1]);
        }
    }
    Ok((h, hs))
}

/// Applies the filtered operator `ell − 1` times to `V`, re-orthonormalizing
/// after each pass.
pub fn refine_subspace(f: &PointFactorizations<'_>, v: &ComplexMatrix, ell: usize) -> Result<ComplexMatrix> {
    refine_subspace_timed(f, v, ell).map(|(x, _)| x)
}

pub(crate) fn refine_subspace_timed(
    f: &PointFactorizations<'_>,
    v: &ComplexMatrix,
    ell: usize,
) -> Result<(ComplexMatrix, Duration)> {
    if ell == 0 {
        return Err(Error::InvalidConfig("refinement count must be at least 1".into()));
    }
    let mut x = v.clone();
    let mut solve_time = Duration::ZERO;
    for _ in 1..ell {
        let (s, t) = f.apply_filter(&x)?;
        solve_time += t;
        x = if s.rows() >= s.cols() {
            householder_qr(&s)?.0
        } else {
            s
        };
    }
    Ok((x, solve_time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_rule, filter_eval, ContourRegion, RuleKind};
    use crate::dense::ZERO;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_toy() -> MatrixPencil {
        MatrixPencil::standard(ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 3.0]])).unwrap()
    }

    fn unit(n: usize) -> QuadratureRule {
        build_rule(ContourRegion::unit_circle(), RuleKind::Trapezoidal, n).unwrap()
    }

    #[test]
    fn pencil_flags_detected() {
        let p = diag_toy();
        assert!(p.flags().hermitian_a && p.flags().hpd_b && p.flags().b_is_identity);
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let p = MatrixPencil::new(a.clone(), ComplexMatrix::identity(2)).unwrap();
        assert!(!p.flags().hermitian_a);
        let claimed = PencilFlags {
            hermitian_a: true,
            ..Default::default()
        };
        assert!(matches!(
            MatrixPencil::with_flags(a, ComplexMatrix::identity(2), claimed),
            Err(Error::FlagMismatch { flag: "hermitian_a" })
        ));
        let indefinite = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let p = MatrixPencil::new(ComplexMatrix::identity(2), indefinite).unwrap();
        assert!(!p.flags().hpd_b);
    }

    #[test]
    fn diagonal_factorizations() {
        let p = diag_toy();
        let f = factorize_points(&p, &unit(4)).unwrap();
        assert_eq!(f.factors().len(), 4);
        assert!(f.recip_conds().iter().all(|&r| r > 0.1));
    }

    #[test]
    fn node_on_spectrum_is_reported() {
        let r = unit(4);
        let z = r.points()[1];
        let p = MatrixPencil::standard(ComplexMatrix::from_diag(&[z, C64::new(3.0, 0.0)])).unwrap();
        match factorize_points(&p, &r) {
            Err(Error::QuadraturePointHitsSpectrum { index, point }) => {
                assert_eq!(index, 1);
                assert_eq!(point, z);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagonal_moments_match_filter() {
        let p = diag_toy();
        let r = unit(16);
        let f = factorize_points(&p, &r).unwrap();
        let s = compute_moments(&f, &ComplexMatrix::identity(2), 1).unwrap();
        // half-step nodes: f(λ) = 1/(1 + λ¹⁶)
        let f05 = 1.0 / (1.0 + 0.5f64.powi(16));
        let f3 = 1.0 / (1.0 + 3f64.powi(16));
        assert!((s.block(0)[(0, 0)].re - f05).abs() < 1e-14);
        assert!((s.block(0)[(1, 1)].re - f3).abs() < 1e-15);
        assert!((s.block(0)[(0, 0)].re - 0.999_984_7).abs() < 1e-7);
        assert!((s.block(0)[(1, 1)].re - 2.32e-8).abs() < 1e-10);
        assert!(s.block(0)[(0, 1)].norm() < 1e-15);
        for (i, lam) in [(0, 0.5), (1, 3.0)] {
            let fl = filter_eval(&r, C64::new(lam, 0.0)).unwrap();
            assert!((s.block(1)[(i, i)] - fl * lam).norm() < 1e-14 * (1.0 + fl.norm()));
        }
    }

    #[test]
    fn zero_start_gives_zero_moments() {
        let p = diag_toy();
        let f = factorize_points(&p, &unit(8)).unwrap();
        let s = compute_moments(&f, &ComplexMatrix::zeros(2, 1), 3).unwrap();
        assert!(s.blocks().iter().all(|b| b.norm_max() == 0.0));
    }

    #[test]
    fn moment_views_and_degree_checks() {
        let p = diag_toy();
        let f = factorize_points(&p, &unit(8)).unwrap();
        let s = compute_moments(&f, &ComplexMatrix::identity(2), 2).unwrap();
        assert_eq!(s.s_hat(2).unwrap().shape(), (2, 4));
        assert_eq!(s.s_plus(2).unwrap().shape(), (2, 4));
        assert!(matches!(s.s_plus(3), Err(Error::InsufficientDegree { needed: 3, available: 2 })));
        assert!(matches!(
            block_moments(&ComplexMatrix::identity(2), &s, 3),
            Err(Error::InsufficientDegree { .. })
        ));
        let mu = block_moments(&ComplexMatrix::identity(2), &s, 2).unwrap();
        for k in 0..=2 {
            assert_eq!(&mu[k], s.block(k));
        }
        assert!(matches!(
            compute_moments(&f, &ComplexMatrix::identity(3), 1),
            Err(Error::Linalg(LinalgError::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn hermitian_gram_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_block(12, 12, true, &mut rng);
        let p = MatrixPencil::standard(g.add(&g.adjoint()).scale(C64::new(0.1, 0.0))).unwrap();
        let r = build_rule(ContourRegion::circle(ZERO, 0.8).unwrap(), RuleKind::Trapezoidal, 32).unwrap();
        let f = factorize_points(&p, &r).unwrap();
        let v = random_block(12, 3, false, &mut rng);
        let s = compute_moments(&f, &v, 0).unwrap();
        let mu0 = &block_moments(&v, &s, 0).unwrap()[0];
        assert!(mu0.sub(&mu0.adjoint()).norm_max() <= 1e-12 * mu0.norm_max().max(1e-300));
    }

    #[test]
    fn hankel_layout() {
        let mu: Vec<ComplexMatrix> = (1..=4).map(|k| ComplexMatrix::from_real_rows(&[&[k as f64]])).collect();
        let (h, hs) = assemble_hankel(&mu, 2).unwrap();
        assert_eq!(h, ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 3.0]]));
        assert_eq!(hs, ComplexMatrix::from_real_rows(&[&[2.0, 3.0], &[3.0, 4.0]]));
        let (h1, hs1) = assemble_hankel(&mu, 1).unwrap();
        assert_eq!(h1, mu[0]);
        assert_eq!(hs1, mu[1]);
        assert!(assemble_hankel(&mu[..3], 2).is_err());
    }

    #[test]
    fn refine_single_pass_is_identity() {
        let p = diag_toy();
        let f = factorize_points(&p, &unit(8)).unwrap();
        let v = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        assert_eq!(refine_subspace(&f, &v, 1).unwrap(), v);
        assert!(refine_subspace(&f, &v, 0).is_err());
    }

    #[test]
    fn refine_damps_outside_direction() {
        // the e₂ component shrinks by |f(3)/f(0.5)| per pass
        let p = diag_toy();
        let r = unit(8);
        let f = factorize_points(&p, &r).unwrap();
        let ratio = (filter_eval(&r, C64::new(3.0, 0.0)).unwrap() / filter_eval(&r, C64::new(0.5, 0.0)).unwrap()).norm();
        let v = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        for ell in 2..=3 {
            let x = refine_subspace(&f, &v, ell).unwrap();
            let got = x[(1, 0)].norm() / x[(0, 0)].norm();
            let want = ratio.powi(ell as i32 - 1);
            assert!((got / want - 1.0).abs() < 1e-8, "ell {ell}: {got} vs {want}");
        }
    }

    #[test]
    fn half_contour_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20;
        let a = random_block(n, n, false, &mut rng);
        let b = random_block(n, n, false, &mut rng).add(&ComplexMatrix::identity(n).scale(C64::new(6.0, 0.0)));
        let p = MatrixPencil::new(a, b).unwrap();
        let r = build_rule(ContourRegion::ellipse(C64::new(0.1, 0.0), 0.6, 0.3).unwrap(), RuleKind::Trapezoidal, 16).unwrap();
        let full = factorize_points(&p, &r).unwrap();
        let half = factorize_points_with(&p, &r, true).unwrap();
        assert!(half.is_half_contour());
        assert_eq!(half.factors().len(), 8);
        for complex in [false, true] {
            let v = random_block(n, 3, complex, &mut rng);
            let sf = compute_moments(&full, &v, 3).unwrap();
            let sh = compute_moments(&half, &v, 3).unwrap();
            for k in 0..=3 {
                let d = sf.block(k).sub(sh.block(k)).norm_fro();
                assert!(d <= 1e-12 * sf.block(k).norm_fro(), "k {k} complex {complex}");
            }
        }
    }

    #[test]
    fn moments_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 15;
        let p = MatrixPencil::standard(random_block(n, n, true, &mut rng)).unwrap();
        let r = unit(16);
        let v = random_block(n, 2, false, &mut rng);
        let f1 = factorize_points(&p, &r).unwrap();
        let f2 = factorize_points(&p, &r).unwrap();
        let a = compute_moments(&f1, &v, 4).unwrap();
        let b = compute_moments(&f2, &v, 4).unwrap();
        for k in 0..=4 {
            assert_eq!(a.block(k), b.block(k));
        }
    }
}
