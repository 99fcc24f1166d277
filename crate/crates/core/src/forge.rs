//! Test pencils with known spectral structure, and an independent dense
//! oracle.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::contour::ContourRegion;
use crate::dense::{eig_dense_select, lu_factor, lu_solve, ComplexMatrix, C64, ONE};
use crate::error::{Error, Result};
use crate::moments::MatrixPencil;

/// Multiplicity clustering tolerance of the oracle.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Below this reciprocal condition B counts as singular for the oracle.
const ORACLE_RCOND_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigen {
    Finite(C64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigen: Eigen,
    pub size: usize,
}

impl JordanBlock {
    pub fn finite(value: C64, size: usize) -> Self {
        Self {
            eigen: Eigen::Finite(value),
            size,
        }
    }

    pub fn infinite(size: usize) -> Self {
        Self {
            eigen: Eigen::Infinite,
            size,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `Q = P̃ = I`: the pencil is its own canonical form.
    Identity,
    /// Random real `Q`, `P̃` with 2-norm condition number `cond`.
    Random { cond: f64 },
}

impl Default for Transform {
    fn default() -> Self {
        Transform::Random { cond: 10.0 }
    }
}

impl Transform {
    fn cond(self) -> Option<f64> {
        match self {
            Transform::Identity => None,
            Transform::Random { cond } => Some(cond),
        }
    }
}

/// Spectral structure of a regular pencil: Jordan blocks for finite
/// eigenvalues and nilpotent blocks for infinite ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JordanSpec {
    pub blocks: Vec<JordanBlock>,
    pub transform: Transform,
}

impl JordanSpec {
    pub fn new(blocks: Vec<JordanBlock>) -> Self {
        Self {
            blocks,
            transform: Transform::default(),
        }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Total size of the finite blocks.
    pub fn finite_dim(&self) -> usize {
        self.finite_blocks().map(|b| b.size).sum()
    }

    /// Largest infinite block, or 1 when there is none.
    pub fn eta(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.eigen == Eigen::Infinite)
            .map(|b| b.size)
            .max()
            .unwrap_or(1)
    }

    pub fn infinite_block_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.eigen == Eigen::Infinite).count()
    }

    fn finite_blocks(&self) -> impl Iterator<Item = &JordanBlock> {
        self.blocks.iter().filter(|b| b.eigen != Eigen::Infinite)
    }

    /// Finite blocks first, then infinite ones; the order of the generated
    /// canonical form.
    pub fn canonical_order(&self) -> Vec<JordanBlock> {
        let mut out: Vec<JordanBlock> = self.finite_blocks().copied().collect();
        out.extend(self.blocks.iter().filter(|b| b.eigen == Eigen::Infinite));
        out
    }

    fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::BadSpec("no blocks".into()));
        }
        if let Some(b) = self.blocks.iter().find(|b| b.size == 0) {
            return Err(Error::BadSpec(format!("block {:?} has size 0", b.eigen)));
        }
        if let Some(c) = self.transform.cond() {
            if !(c >= 1.0 && c.is_finite()) {
                return Err(Error::BadSpec(format!("transform condition must be ≥ 1, got {c}")));
            }
        }
        for b in &self.blocks {
            if let Eigen::Finite(v) = b.eigen {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::BadSpec(format!("non-finite eigenvalue {v}")));
                }
            }
        }
        Ok(())
    }
}

/// `(re,im,size)` for finite blocks and `INF,size` for infinite ones,
/// separated by `;`.
impl fmt::Display for JordanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            match b.eigen {
                Eigen::Finite(v) => write!(f, "({},{},{})", v.re, v.im, b.size)?,
                Eigen::Infinite => write!(f, "INF,{}", b.size)?,
            }
        }
        Ok(())
    }
}

impl FromStr for JordanSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for item in s.split(|c: char| c == ';' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let inner = item.trim().trim_start_matches('(').trim_end_matches(')');
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            let bad = || Error::BadSpec(format!("cannot parse block `{item}`"));
            let size = |t: &str| t.parse::<usize>().map_err(|_| bad());
            let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
            match parts.as_slice() {
                [inf, n] if inf.eq_ignore_ascii_case("inf") => blocks.push(JordanBlock::infinite(size(n)?)),
                [re, im, n] => blocks.push(JordanBlock::finite(C64::new(num(re)?, num(im)?), size(n)?)),
                _ => return Err(bad()),
            }
        }
        let spec = JordanSpec::new(blocks);
        spec.validate()?;
        Ok(spec)
    }
}

/// A distinct finite eigenvalue of a generated pencil.
#[derive(Debug, Clone)]
pub struct FinitePair {
    pub value: C64,
    /// Algebraic multiplicity.
    pub multiplicity: usize,
    /// One eigenvector per Jordan block (columns of Q).
    pub vectors: ComplexMatrix,
}

/// Transforms with `P̃ᴴ(zB − A)Q` equal to the canonical form.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub q: ComplexMatrix,
    /// `Q^{−H}`, so that `Q̃ᴴQ = I`.
    pub q_tilde: ComplexMatrix,
    pub p_tilde: ComplexMatrix,
    /// Blocks in canonical order (finite first).
    pub blocks: Vec<JordanBlock>,
    pub finite_pairs: Vec<FinitePair>,
}

impl GroundTruth {
    /// Assembles truth from transforms and blocks in canonical order.
    pub fn from_parts(
        q: ComplexMatrix,
        q_tilde: ComplexMatrix,
        p_tilde: ComplexMatrix,
        blocks: Vec<JordanBlock>,
    ) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.size).sum();
        for (name, m) in [("Q", &q), ("Q~", &q_tilde), ("P~", &p_tilde)] {
            if m.shape() != (n, n) {
                return Err(Error::BadSpec(format!(
                    "{name} is {}x{}, blocks need {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let mut seen_infinite = false;
        for b in &blocks {
            match b.eigen {
                Eigen::Infinite => seen_infinite = true,
                Eigen::Finite(_) if seen_infinite => {
                    return Err(Error::BadSpec("finite block after an infinite one".into()));
                }
                Eigen::Finite(_) => {}
            }
        }
        let mut finite_pairs: Vec<FinitePair> = Vec::new();
        let mut offset = 0;
        for blk in &blocks {
            if let Eigen::Finite(v) = blk.eigen {
                let x = q.columns(offset, offset + 1);
                match finite_pairs.iter_mut().find(|f| f.value == v) {
                    Some(f) => {
                        f.multiplicity += blk.size;
                        f.vectors = ComplexMatrix::hcat(&[&f.vectors, &x]);
                    }
                    None => finite_pairs.push(FinitePair {
                        value: v,
                        multiplicity: blk.size,
                        vectors: x,
                    }),
                }
            }
            offset += blk.size;
        }
        Ok(Self {
            q,
            q_tilde,
            p_tilde,
            blocks,
            finite_pairs,
        })
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn finite_dim(&self) -> usize {
        self.blocks.iter().filter(|b| b.eigen != Eigen::Infinite).map(|b| b.size).sum()
    }

    pub fn eta(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.eigen == Eigen::Infinite)
            .map(|b| b.size)
            .max()
            .unwrap_or(1)
    }

    /// `zB_c − A_c = ⊕(zI − J(λ_i)) ⊕ ⊕(zJ(0) − I)`.
    pub fn canonical_shifted(&self, z: C64) -> ComplexMatrix {
        let (ac, bc) = canonical_pair(&self.blocks);
        let mut m = bc.scale(z);
        m.axpy(-ONE, &ac);
        m
    }

    /// `C = Q_{1:r} J_{1:r} Q̃_{1:r}ᴴ`, the finite part of the pencil as a
    /// standard operator.
    pub fn filtered_operator(&self) -> ComplexMatrix {
        let r = self.finite_dim();
        let (ac, _) = canonical_pair(&self.blocks);
        let j = ac.submatrix(0, r, 0, r);
        let q = self.q.columns(0, r);
        let qt = self.q_tilde.columns(0, r);
        q.matmul(&j).matmul(&qt.adjoint())
    }

    /// `Q_Ω Q̃_Ωᴴ` over the finite blocks whose eigenvalue lies in `region`.
    pub fn spectral_projector(&self, region: &ContourRegion) -> ComplexMatrix {
        let n = self.dim();
        let mut p = ComplexMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            if let Eigen::Finite(v) = b.eigen {
                if region.contains(v) {
                    let q = self.q.columns(offset, offset + b.size);
                    let qt = self.q_tilde.columns(offset, offset + b.size);
                    p = p.add(&q.matmul(&qt.adjoint()));
                }
            }
            offset += b.size;
        }
        p
    }

    /// Finite eigenvalues inside `region`, with multiplicity.
    pub fn inside(&self, region: &ContourRegion) -> Vec<C64> {
        let mut out = Vec::new();
        for p in &self.finite_pairs {
            if region.contains(p.value) {
                out.extend(std::iter::repeat_n(p.value, p.multiplicity));
            }
        }
        out
    }
}

fn canonical_pair(blocks: &[JordanBlock]) -> (ComplexMatrix, ComplexMatrix) {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    let mut o = 0;
    for blk in blocks {
        for i in 0..blk.size {
            match blk.eigen {
                Eigen::Finite(v) => {
                    a[(o + i, o + i)] = v;
                    b[(o + i, o + i)] = ONE;
                    if i + 1 < blk.size {
                        a[(o + i, o + i + 1)] = ONE;
                    }
                }
                Eigen::Infinite => {
                    a[(o + i, o + i)] = ONE;
                    if i + 1 < blk.size {
                        b[(o + i, o + i + 1)] = ONE;
                    }
                }
            }
        }
        o += blk.size;
    }
    (a, b)
}

/// Generators draw from their own ChaCha stream so that a solver seeded with
/// the same value gets an unrelated start block.
fn forge_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xf0_26e);
    rng
}

/// Builds `A = P·A_c·Q̃ᴴ`, `B = P·B_c·Q̃ᴴ` with `P = P̃^{−H}`, `Q̃ = Q^{−H}`,
/// so that `P̃ᴴ(zB − A)Q = zB_c − A_c` exactly in exact arithmetic.
pub fn gen_weierstrass(spec: &JordanSpec, seed: u64) -> Result<(MatrixPencil, GroundTruth)> {
    spec.validate()?;
    let n = spec.dim();
    let blocks = spec.canonical_order();
    let (ac, bc) = canonical_pair(&blocks);
    let (q, q_tilde, p_tilde, p) = match spec.transform.cond() {
        None => {
            let i = ComplexMatrix::identity(n);
            (i.clone(), i.clone(), i.clone(), i)
        }
        Some(cond) => {
            let mut rng = forge_rng(seed);
            let tq = ConditionedTransform::draw(n, cond, &mut rng);
            let tp = ConditionedTransform::draw(n, cond, &mut rng);
            // Q̃ = Q^{−H} and P = P̃^{−H} share the singular vectors of Q, P̃
            (tq.matrix(), tq.inverse_adjoint(), tp.matrix(), tp.inverse_adjoint())
        }
    };
    let a = p.matmul(&ac).matmul(&q_tilde.adjoint());
    let b = p.matmul(&bc).matmul(&q_tilde.adjoint());
    let pencil = MatrixPencil::new(a, b)?;
    Ok((pencil, GroundTruth::from_parts(q, q_tilde, p_tilde, blocks)?))
}

/// Parameters of [`gen_ring_spectrum`]: simple eigenvalues at controlled
/// distances from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSpec {
    pub n: usize,
    /// Count of eigenvalues with modulus below `inside_radius`.
    pub inside: usize,
    pub inside_radius: f64,
    /// Moduli of eigenvalues placed individually (typically just outside the
    /// unit circle).
    pub near: Vec<f64>,
    /// Modulus range for the remaining eigenvalues.
    pub far: (f64, f64),
    pub cond: f64,
}

impl RingSpec {
    pub fn new(n: usize, inside: usize) -> Self {
        Self {
            n,
            inside,
            inside_radius: 0.7,
            near: Vec::new(),
            far: (3.0, 5.0),
            cond: 10.0,
        }
    }
}

/// Diagonalizable pencil with eigenvalues at random angles on the rings of
/// `spec`, returned with the eigenvalues in generation order.
pub fn gen_ring_spectrum(spec: &RingSpec, seed: u64) -> Result<(MatrixPencil, GroundTruth)> {
    let fixed = spec.inside + spec.near.len();
    if fixed > spec.n {
        return Err(Error::BadSpec(format!("{fixed} placed eigenvalues exceed n = {}", spec.n)));
    }
    if !(spec.far.0 <= spec.far.1 && spec.inside_radius > 0.0) {
        return Err(Error::BadSpec("bad ring radii".into()));
    }
    let mut rng = forge_rng(seed ^ 0x5eed_0000);
    let at = |r: f64, rng: &mut ChaCha8Rng| C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
    let mut values = Vec::with_capacity(spec.n);
    for _ in 0..spec.inside {
        // sqrt keeps the points uniform over the disk
        let r = spec.inside_radius * rng.random::<f64>().sqrt();
        values.push(at(r, &mut rng));
    }
    for &r in &spec.near {
        values.push(at(r, &mut rng));
    }
    for _ in fixed..spec.n {
        let r = if spec.far.0 < spec.far.1 {
            rng.random_range(spec.far.0..spec.far.1)
        } else {
            spec.far.0
        };
        values.push(at(r, &mut rng));
    }
    let blocks = values.into_iter().map(|v| JordanBlock::finite(v, 1)).collect();
    let jspec = JordanSpec::new(blocks).with_transform(Transform::Random { cond: spec.cond });
    gen_weierstrass(&jspec, seed)
}

/// `U·diag(s)·Wᴴ` with random real orthogonal U, W and `s` log-spaced in
/// `[1, cond]`.
struct ConditionedTransform {
    u: RealMatrix,
    s: Vec<f64>,
    w: RealMatrix,
}

impl ConditionedTransform {
    fn draw(n: usize, cond: f64, rng: &mut impl Rng) -> Self {
        let u = RealMatrix::random_orthogonal(n, rng);
        let w = RealMatrix::random_orthogonal(n, rng);
        let s = (0..n)
            .map(|i| if n > 1 { cond.powf(i as f64 / (n - 1) as f64) } else { 1.0 })
            .collect();
        Self { u, s, w }
    }

    fn matrix(&self) -> ComplexMatrix {
        self.u.scale_cols(&self.s).matmul_t(&self.w).to_complex()
    }

    /// `(U S Wᵀ)^{−T} = U S⁻¹ Wᵀ`.
    fn inverse_adjoint(&self) -> ComplexMatrix {
        let inv: Vec<f64> = self.s.iter().map(|x| 1.0 / x).collect();
        self.u.scale_cols(&inv).matmul_t(&self.w).to_complex()
    }
}

/// Column-major real matrix for the generators; keeps the n = O(500)
/// constructions out of complex arithmetic.
#[derive(Clone)]
struct RealMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    fn zeros(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            data: vec![0.0; n * m],
        }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n..(j + 1) * self.n]
    }

    /// Q factor of a Gaussian matrix (twice-iterated modified Gram–Schmidt).
    fn random_orthogonal(n: usize, rng: &mut impl Rng) -> Self {
        let mut q = Self::zeros(n, n);
        for x in q.data.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        for j in 0..n {
            for _ in 0..2 {
                for k in 0..j {
                    let (left, right) = q.data.split_at_mut(j * n);
                    let qk = &left[k * n..(k + 1) * n];
                    let qj = &mut right[..n];
                    let d: f64 = qk.iter().zip(qj.iter()).map(|(a, b)| a * b).sum();
                    for (x, &y) in qj.iter_mut().zip(qk) {
                        *x -= d * y;
                    }
                }
            }
            let nrm = q.col(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in q.col_mut(j) {
                *x /= nrm;
            }
        }
        q
    }

    fn scale_cols(&self, s: &[f64]) -> Self {
        let mut out = self.clone();
        for (j, &sj) in s.iter().enumerate() {
            for x in out.col_mut(j) {
                *x *= sj;
            }
        }
        out
    }

    fn diag(d: &[f64]) -> Self {
        let mut out = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            out.data[i * d.len() + i] = x;
        }
        out
    }

    fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.m, rhs.n);
        let mut out = Self::zeros(self.n, rhs.m);
        for j in 0..rhs.m {
            let oc = &mut out.data[j * self.n..(j + 1) * self.n];
            for (k, &b) in rhs.col(j).iter().enumerate() {
                if b != 0.0 {
                    for (o, &a) in oc.iter_mut().zip(self.col(k)) {
                        *o += a * b;
                    }
                }
            }
        }
        out
    }

    fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.m, self.n);
        for j in 0..self.m {
            for i in 0..self.n {
                out.data[i * self.m + j] = self.data[j * self.n + i];
            }
        }
        out
    }

    /// `self · rhsᵀ`.
    fn matmul_t(&self, rhs: &Self) -> Self {
        self.matmul(&rhs.transpose())
    }

    fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.m, |i, j| C64::new(self.data[j * self.n + i], 0.0))
    }
}

/// Parameters of [`gen_symmetric_dense`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricSpec {
    pub n: usize,
    /// Eigenvalues drawn uniformly in `inside`.
    pub inside_count: usize,
    pub inside: (f64, f64),
    /// Remaining eigenvalues have magnitude uniform in this range and a
    /// random sign.
    pub outside_spread: (f64, f64),
}

impl SymmetricSpec {
    /// `n` eigenvalues, `m` of them in [−1, 1], the rest in ±[1.5, 5].
    pub fn standard(n: usize, m: usize) -> Self {
        Self {
            n,
            inside_count: m,
            inside: (-1.0, 1.0),
            outside_spread: (1.5, 5.0),
        }
    }
}

/// Real symmetric `A` and symmetric positive definite `B = RᵀR` (`cond(R) ≤
/// √10`) with `B⁻¹A = R⁻¹QΛQᵀR` for a random orthogonal Q.
pub fn gen_symmetric_dense(spec: &SymmetricSpec, seed: u64) -> Result<(MatrixPencil, GroundTruth)> {
    let SymmetricSpec {
        n,
        inside_count: m,
        inside,
        outside_spread,
    } = *spec;
    if m > n || n == 0 {
        return Err(Error::BadSpec(format!("need 0 < n and m ≤ n, got n = {n}, m = {m}")));
    }
    if !(inside.0 < inside.1 && 0.0 <= outside_spread.0 && outside_spread.0 < outside_spread.1) {
        return Err(Error::BadSpec("empty eigenvalue interval".into()));
    }
    let mut rng = forge_rng(seed);
    let mut lambda: Vec<f64> = (0..m).map(|_| rng.random_range(inside.0..inside.1)).collect();
    lambda.extend((m..n).map(|_| {
        let mag = rng.random_range(outside_spread.0..outside_spread.1);
        if rng.random::<bool>() {
            mag
        } else {
            -mag
        }
    }));

    let q = RealMatrix::random_orthogonal(n, &mut rng);
    let q1 = RealMatrix::random_orthogonal(n, &mut rng);
    let q2 = RealMatrix::random_orthogonal(n, &mut rng);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..10f64.sqrt())).collect();
    let s_inv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
    let r = q1.scale_cols(&s).matmul_t(&q2);
    let r_inv = q2.scale_cols(&s_inv).matmul_t(&q1);

    let rt = r.transpose();
    let b = rt.matmul(&r);
    let qlq = q.matmul(&RealMatrix::diag(&lambda)).matmul_t(&q);
    let a = rt.matmul(&qlq).matmul(&r);

    let a = symmetrize(&a).to_complex();
    let b = symmetrize(&b).to_complex();

    // eigenvectors X = R⁻¹Q; P̃ = X and Q̃ = X^{−T} = RᵀQ
    let x = r_inv.matmul(&q).to_complex();
    let x_inv_t = rt.matmul(&q).to_complex();
    let blocks: Vec<JordanBlock> = lambda.iter().map(|&l| JordanBlock::finite(C64::new(l, 0.0), 1)).collect();
    let pencil = MatrixPencil::new(a, b)?;
    Ok((pencil, GroundTruth::from_parts(x.clone(), x_inv_t, x, blocks)?))
}

/// Real symmetric standard problem `A = QΛQᵀ`, `B = I`.
pub fn gen_hermitian(eigenvalues: &[f64], seed: u64) -> Result<(MatrixPencil, GroundTruth)> {
    let n = eigenvalues.len();
    if n == 0 || eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadSpec("need at least one finite eigenvalue".into()));
    }
    let mut rng = forge_rng(seed);
    let q = RealMatrix::random_orthogonal(n, &mut rng);
    let a = symmetrize(&q.scale_cols(eigenvalues).matmul_t(&q)).to_complex();
    let qc = q.to_complex();
    let blocks = eigenvalues.iter().map(|&l| JordanBlock::finite(C64::new(l, 0.0), 1)).collect();
    let pencil = MatrixPencil::standard(a)?;
    Ok((pencil, GroundTruth::from_parts(qc.clone(), qc.clone(), qc, blocks)?))
}

fn symmetrize(m: &RealMatrix) -> RealMatrix {
    let t = m.transpose();
    let mut out = m.clone();
    for (o, &x) in out.data.iter_mut().zip(&t.data) {
        *o = 0.5 * (*o + x);
    }
    out
}

/// One distinct eigenvalue found by the oracle.
#[derive(Debug, Clone)]
pub struct OracleEigen {
    pub value: C64,
    pub multiplicity: usize,
    /// Unit eigenvector; from ground truth when B is singular.
    pub vector: Vec<C64>,
}

impl OracleEigen {
    /// Expands clusters into a flat list with repeats.
    pub fn flatten(list: &[OracleEigen]) -> Vec<C64> {
        list.iter()
            .flat_map(|o| std::iter::repeat_n(o.value, o.multiplicity))
            .collect()
    }
}

/// In-region eigenvalues of the pencil, independently of the contour
/// solvers: a dense eigensolve of `B⁻¹A` when B is nonsingular, the ground
/// truth otherwise.
pub fn dense_oracle(pencil: &MatrixPencil, region: &ContourRegion, truth: Option<&GroundTruth>) -> Result<Vec<OracleEigen>> {
    dense_oracle_with_tol(pencil, region, truth, CLUSTER_TOL)
}

pub fn dense_oracle_with_tol(
    pencil: &MatrixPencil,
    region: &ContourRegion,
    truth: Option<&GroundTruth>,
    cluster_tol: f64,
) -> Result<Vec<OracleEigen>> {
    let nonsingular = match lu_factor(pencil.b()) {
        Ok(f) if f.rcond() >= ORACLE_RCOND_MIN => Some(f),
        _ => None,
    };
    let mut found: Vec<(C64, Vec<C64>)> = match (nonsingular, truth) {
        (Some(f), _) => {
            let c = if pencil.flags().b_is_identity {
                pencil.a().clone()
            } else {
                lu_solve(&f, pencil.a())?
            };
            eig_dense_select(&c, |l| region.contains(l))?
                .into_iter()
                .filter(|p| region.contains(p.value))
                .map(|p| (p.value, p.vector))
                .collect()
        }
        (None, Some(t)) => t
            .finite_pairs
            .iter()
            .filter(|p| region.contains(p.value))
            .flat_map(|p| {
                let mut v = p.vectors.col(0).to_vec();
                let nrm = crate::dense::norm2(&v);
                v.iter_mut().for_each(|z| *z /= nrm);
                std::iter::repeat_n((p.value, v), p.multiplicity)
            })
            .collect(),
        (None, None) => return Err(Error::SingularBWithoutTruth),
    };
    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let mut out: Vec<OracleEigen> = Vec::new();
    let mut sums: Vec<C64> = Vec::new();
    for (value, vector) in found {
        match out.iter().position(|o| (o.value - value).norm() <= cluster_tol) {
            Some(i) => {
                out[i].multiplicity += 1;
                sums[i] += value;
            }
            None => {
                out.push(OracleEigen {
                    value,
                    multiplicity: 1,
                    vector,
                });
                sums.push(value);
            }
        }
    }
    for (o, s) in out.iter_mut().zip(sums) {
        o.value = s / o.multiplicity as f64;
    }
    Ok(out)
}
