use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::LinalgError;

/// Relative pivot threshold: a pivot below `PIVOT_TOL * ‖M‖_max` is singular.
const PIVOT_TOL: f64 = 1e-14;

/// Partial-pivoted LU factorization `P·M = L·U`, with L and U packed into one
/// matrix (unit diagonal of L implicit).
#[derive(Debug, Clone)]
pub struct LuFactorization {
    factors: ComplexMatrix,
    /// Row swapped with row `k` at elimination step `k`.
    pivots: Vec<usize>,
    source_dim: usize,
    rcond: f64,
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.source_dim
    }

    pub fn factors(&self) -> &ComplexMatrix {
        &self.factors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Estimated reciprocal condition number in the 1-norm.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn lower(&self) -> ComplexMatrix {
        let n = self.source_dim;
        ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.factors[(i, j)],
            std::cmp::Ordering::Equal => ONE,
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn upper(&self) -> ComplexMatrix {
        let n = self.source_dim;
        ComplexMatrix::from_fn(n, n, |i, j| if i <= j { self.factors[(i, j)] } else { ZERO })
    }

    /// Rebuilds the factored matrix as `Pᵀ·L·U`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut lu = self.lower().matmul(&self.upper());
        for k in (0..self.source_dim).rev() {
            let p = self.pivots[k];
            if p != k {
                swap_rows(&mut lu, k, p);
            }
        }
        lu
    }

    fn solve_in_place(&self, x: &mut [C64]) {
        let n = self.source_dim;
        let f = &self.factors;
        for (k, &p) in self.pivots.iter().enumerate() {
            if p != k {
                x.swap(k, p);
            }
        }
        for k in 0..n {
            let xk = x[k];
            if xk != ZERO {
                let col = &f.col(k)[k + 1..];
                for (xi, &l) in x[k + 1..].iter_mut().zip(col) {
                    *xi -= l * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let col = f.col(k);
            x[k] /= col[k];
            let xk = x[k];
            if xk != ZERO {
                for (xi, &u) in x[..k].iter_mut().zip(&col[..k]) {
                    *xi -= u * xk;
                }
            }
        }
    }

    fn solve_adjoint_in_place(&self, x: &mut [C64]) {
        let n = self.source_dim;
        let f = &self.factors;
        // Uᴴ w = b (lower triangular)
        for k in 0..n {
            let col = f.col(k);
            let mut s = x[k];
            for (xi, u) in x[..k].iter().zip(&col[..k]) {
                s -= u.conj() * xi;
            }
            x[k] = s / col[k].conj();
        }
        // Lᴴ v = w (unit upper triangular)
        for k in (0..n).rev() {
            let col = f.col(k);
            let mut s = x[k];
            for (xi, l) in x[k + 1..].iter().zip(&col[k + 1..]) {
                s -= l.conj() * xi;
            }
            x[k] = s;
        }
        for k in (0..n).rev() {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
        }
    }
}

fn swap_rows(m: &mut ComplexMatrix, a: usize, b: usize) {
    for j in 0..m.cols() {
        let col = m.col_mut(j);
        col.swap(a, b);
    }
}

pub fn lu_factor(m: &ComplexMatrix) -> Result<LuFactorization, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let anorm_max = m.norm_max();
    let anorm_one = m.norm_one();
    let threshold = PIVOT_TOL * anorm_max;
    let mut a = m.clone();
    let mut pivots = Vec::with_capacity(n);

    for k in 0..n {
        let (p, pmag) = a.col(k)[k..]
            .iter()
            .enumerate()
            .map(|(i, z)| (i + k, z.norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag <= threshold || pmag == 0.0 {
            return Err(LinalgError::SingularMatrix { column: k });
        }
        pivots.push(p);
        if p != k {
            swap_rows(&mut a, k, p);
        }
        let inv = ONE / a[(k, k)];
        for z in &mut a.col_mut(k)[k + 1..] {
            *z *= inv;
        }
        // rank-1 update of the trailing block, column by column
        let data = a.as_mut_slice();
        let (left, right) = data.split_at_mut((k + 1) * n);
        let lcol = &left[k * n + k + 1..(k + 1) * n];
        for j in 0..n - k - 1 {
            let col = &mut right[j * n..(j + 1) * n];
            let akj = col[k];
            if akj == ZERO {
                continue;
            }
            for (d, &l) in col[k + 1..].iter_mut().zip(lcol) {
                *d -= l * akj;
            }
        }
    }

    let mut lu = LuFactorization {
        factors: a,
        pivots,
        source_dim: n,
        rcond: 0.0,
    };
    lu.rcond = if n == 0 {
        1.0
    } else {
        let inv_norm = estimate_inverse_norm_one(&lu);
        if inv_norm > 0.0 && anorm_one > 0.0 {
            1.0 / (anorm_one * inv_norm)
        } else {
            0.0
        }
    };
    Ok(lu)
}

pub fn lu_solve(f: &LuFactorization, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if rhs.rows() != f.source_dim {
        return Err(LinalgError::DimensionMismatch {
            expected: (f.source_dim, rhs.cols()),
            found: rhs.shape(),
        });
    }
    let mut x = rhs.clone();
    for j in 0..x.cols() {
        f.solve_in_place(x.col_mut(j));
    }
    Ok(x)
}

/// Solves `Mᴴ X = RHS` with the factorization of `M`.
pub fn lu_solve_adjoint(
    f: &LuFactorization,
    rhs: &ComplexMatrix,
) -> Result<ComplexMatrix, LinalgError> {
    if rhs.rows() != f.source_dim {
        return Err(LinalgError::DimensionMismatch {
            expected: (f.source_dim, rhs.cols()),
            found: rhs.shape(),
        });
    }
    let mut x = rhs.clone();
    for j in 0..x.cols() {
        f.solve_adjoint_in_place(x.col_mut(j));
    }
    Ok(x)
}

/// Hager–Higham estimate of `‖M⁻¹‖₁`.
fn estimate_inverse_norm_one(f: &LuFactorization) -> f64 {
    let n = f.source_dim;
    let norm1 = |v: &[C64]| v.iter().map(|z| z.norm()).sum::<f64>();
    let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for iter in 0..5 {
        f.solve_in_place(&mut x);
        let new_est = norm1(&x);
        if iter > 0 && new_est <= est {
            break;
        }
        est = new_est;
        let mut xi: Vec<C64> = x
            .iter()
            .map(|z| {
                let a = z.norm();
                if a > 0.0 {
                    z / a
                } else {
                    ONE
                }
            })
            .collect();
        f.solve_adjoint_in_place(&mut xi);
        let (j, zmax) = xi
            .iter()
            .enumerate()
            .map(|(i, z)| (i, z.norm()))
            .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if j == last_j || (iter > 0 && zmax <= est / n as f64) {
            break;
        }
        last_j = j;
        x = vec![ZERO; n];
        x[j] = ONE;
    }
    // alternating test vector guards against the estimator's blind spots
    let mut alt: Vec<C64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            C64::new(s * (1.0 + t), 0.0)
        })
        .collect();
    f.solve_in_place(&mut alt);
    est.max(2.0 * norm1(&alt) / (3.0 * n as f64))
}
