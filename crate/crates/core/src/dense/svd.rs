use super::matrix::{dotc, norm2, ComplexMatrix, C64, ONE, ZERO};
use super::LinalgError;

pub const SVD_MAX_SWEEPS: usize = 30;

/// Thin SVD `M = U·diag(σ)·Vᴴ` with `k = min(rows, cols)` singular triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    /// Number of singular values with `σ_i / σ_1 ≥ cutoff` (and `σ_i > 0`).
    pub fn numerical_rank(&self, cutoff: f64) -> usize {
        let s1 = match self.singular_values.first() {
            Some(&s) if s > 0.0 => s,
            _ => return 0,
        };
        self.singular_values
            .iter()
            .take_while(|&&s| s > 0.0 && s / s1 >= cutoff)
            .count()
    }

    /// Leading `r` triplets as `(U_r, σ_r, V_r)`.
    pub fn truncate(&self, r: usize) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
        (
            self.u.columns(0, r),
            self.singular_values[..r].to_vec(),
            self.v.columns(0, r),
        )
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            for z in us.col_mut(j) {
                *z *= s;
            }
        }
        us.matmul(&self.v.adjoint())
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult, LinalgError> {
    if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        let t = jacobi_tall(&m.adjoint())?;
        Ok(SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

fn jacobi_tall(m: &ComplexMatrix) -> Result<SvdResult, LinalgError> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    let tol = f64::EPSILON * (rows.max(1) as f64).sqrt();

    let mut converged = cols < 2;
    let mut off = 0.0;
    for _sweep in 0..SVD_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        off = 0.0f64;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = {
                    let ap = a.col(p);
                    let aq = a.col(q);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = ZERO;
                    for (x, y) in ap.iter().zip(aq) {
                        al += x.norm_sqr();
                        be += y.norm_sqr();
                        ga += x.conj() * y;
                    }
                    (al, be, ga)
                };
                let g = gamma.norm();
                if alpha == 0.0 || beta == 0.0 || g == 0.0 {
                    continue;
                }
                let rel = g / (alpha.sqrt() * beta.sqrt());
                off = off.max(rel);
                if rel <= tol {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut a, p, q, c, s, phase);
                rotate_pair(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(LinalgError::SvdNoConvergence {
            sweeps: SVD_MAX_SWEEPS,
            off_diagonal: off,
        });
    }

    let norms: Vec<f64> = (0..cols).map(|j| norm2(a.col(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut vs = ComplexMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    let mut null_cols = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        vs.col_mut(dst).copy_from_slice(v.col(src));
        if s > f64::MIN_POSITIVE * 1e8 {
            let inv = 1.0 / s;
            for (d, &x) in u.col_mut(dst).iter_mut().zip(a.col(src)) {
                *d = x * inv;
            }
        } else {
            null_cols.push(dst);
        }
    }
    complete_orthonormal(&mut u, &null_cols);

    Ok(SvdResult {
        u,
        singular_values: sigma,
        v: vs,
    })
}

/// Applies the plane rotation mixing columns p and q:
/// `x_p ← c x_p − s e^{−iφ} x_q`, `x_q ← s x_p + c e^{−iφ} x_q`.
fn rotate_pair(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let rows = m.rows();
    let data = m.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * rows);
    let xp = &mut lo[p * rows..(p + 1) * rows];
    let xq = &mut hi[..rows];
    let ph = phase.conj();
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bt = *b * ph;
        let na = *a * c - bt * s;
        let nb = *a * s + bt * c;
        *a = na;
        *b = nb;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every
/// other column.
fn complete_orthonormal(u: &mut ComplexMatrix, targets: &[usize]) {
    if targets.is_empty() {
        return;
    }
    let rows = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !targets.contains(j)).collect();
    for &t in targets {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..rows {
            let mut cand = vec![ZERO; rows];
            cand[e] = ONE;
            for _ in 0..2 {
                for &j in &filled {
                    let col = u.col(j);
                    let d = dotc(col, &cand);
                    for (x, &y) in cand.iter_mut().zip(col) {
                        *x -= y * d;
                    }
                }
            }
            let nrm = norm2(&cand);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
            if nrm > 0.7 {
                break;
            }
        }
        if let Some((nrm, cand)) = best {
            for (d, x) in u.col_mut(t).iter_mut().zip(cand) {
                *d = x / nrm;
            }
        }
        filled.push(t);
    }
}
