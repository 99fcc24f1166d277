use super::matrix::{dotc, norm2, ComplexMatrix, C64, ZERO};
use super::LinalgError;

const RANK_TOL: f64 = 1e-14;

/// Householder QR returning the thin factors `(Q, R)`, Q of size rows×cols.
/// Never fails on rank deficiency; see [`qr_orthonormalize`] for the checked
/// variant.
pub fn householder_qr(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(LinalgError::TooFewRows { rows, cols });
    }
    let mut a = m.clone();
    let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(cols);

    for k in 0..cols {
        let x = &a.col(k)[k..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm2(&v);
        if vnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // apply I - 2 v vᴴ to the trailing columns
        for j in k..cols {
            let col = &mut a.col_mut(j)[k..];
            let s = dotc(&v, col) * 2.0;
            for (c, &vi) in col.iter_mut().zip(&v) {
                *c -= vi * s;
            }
        }
        reflectors.push(v);
    }

    let r = ComplexMatrix::from_fn(cols, cols, |i, j| if i <= j { a[(i, j)] } else { ZERO });
    let mut q = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        q[(j, j)] = C64::new(1.0, 0.0);
    }
    for k in (0..cols).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for j in 0..cols {
            let col = &mut q.col_mut(j)[k..];
            let s = dotc(v, col) * 2.0;
            for (c, &vi) in col.iter_mut().zip(v) {
                *c -= vi * s;
            }
        }
    }
    Ok((q, r))
}

/// Householder QR with rank checking: fails with `RankDeficient` when a
/// diagonal entry of R drops below `1e-14·‖M‖` (Frobenius norm, an upper
/// bound on the spectral norm).
pub fn qr_orthonormalize(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    let (q, r) = householder_qr(m)?;
    let threshold = RANK_TOL * m.norm_fro();
    for k in 0..r.cols() {
        let d = r[(k, k)].norm();
        if d <= threshold || d == 0.0 {
            return Err(LinalgError::RankDeficient { column: k });
        }
    }
    Ok((q, r))
}
