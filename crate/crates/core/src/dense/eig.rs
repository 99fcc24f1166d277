use super::lu::{lu_factor, lu_solve};
use super::matrix::{dotc, norm2, ComplexMatrix, C64, ONE, ZERO};
use super::LinalgError;

/// Largest dimension accepted by the dense eigensolver.
pub const DENSE_CAP: usize = 4096;

const REDUCED_RCOND_MIN: f64 = 1e-12;
const INVERSE_ITERATIONS: usize = 3;

#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: C64,
    /// Unit 2-norm eigenvector.
    pub vector: Vec<C64>,
}

/// All eigenpairs of a square matrix.
///
/// Eigenvalues come from Hessenberg reduction followed by single-shift
/// complex QR; eigenvectors from inverse iteration on the Hessenberg form,
/// transformed back. A defective eigenvalue gets one (repeated) vector per
/// copy.
pub fn eig_dense(m: &ComplexMatrix) -> Result<Vec<EigPair>, LinalgError> {
    eig_dense_select(m, |_| true)
}

/// Like [`eig_dense`], computing vectors only where `want_vector(λ)` holds;
/// the remaining pairs carry an empty vector.
pub fn eig_dense_select(
    m: &ComplexMatrix,
    want_vector: impl Fn(C64) -> bool,
) -> Result<Vec<EigPair>, LinalgError> {
    let n = check_input(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (h, q) = hessenberg(m, true);
    let q = q.expect("requested accumulation");
    let values = hessenberg_qr(h.clone())?;
    let hnorm = h.norm_fro().max(f64::MIN_POSITIVE);
    Ok(values
        .into_iter()
        .map(|value| {
            let vector = if want_vector(value) {
                let y = inverse_iteration(&h, value, hnorm);
                let mut x = q.matvec(&y);
                let nrm = norm2(&x);
                for z in &mut x {
                    *z /= nrm;
                }
                x
            } else {
                Vec::new()
            };
            EigPair { value, vector }
        })
        .collect())
}

pub fn eigvals_dense(m: &ComplexMatrix) -> Result<Vec<C64>, LinalgError> {
    let n = check_input(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (h, _) = hessenberg(m, false);
    hessenberg_qr(h)
}

/// Solves the small generalized problem `A_red t = θ B_red t` by LU of
/// `B_red` and a standard eigensolve of `B_red⁻¹ A_red`.
pub fn eig_reduced_gep(a_red: &ComplexMatrix, b_red: &ComplexMatrix) -> Result<Vec<EigPair>, LinalgError> {
    check_input(a_red)?;
    check_input(b_red)?;
    if a_red.shape() != b_red.shape() {
        return Err(LinalgError::DimensionMismatch {
            expected: a_red.shape(),
            found: b_red.shape(),
        });
    }
    if a_red.rows() == 0 {
        return Ok(Vec::new());
    }
    let f = lu_factor(b_red).map_err(|e| match e {
        LinalgError::SingularMatrix { .. } => LinalgError::SingularReducedB { rcond: 0.0 },
        other => other,
    })?;
    if f.rcond() < REDUCED_RCOND_MIN {
        return Err(LinalgError::SingularReducedB { rcond: f.rcond() });
    }
    let x = lu_solve(&f, a_red)?;
    eig_dense(&x)
}

fn check_input(m: &ComplexMatrix) -> Result<usize, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() > DENSE_CAP {
        return Err(LinalgError::TooLarge {
            dim: m.rows(),
            cap: DENSE_CAP,
        });
    }
    Ok(m.rows())
}

/// Householder reduction `M = Q H Qᴴ` with H upper Hessenberg.
fn hessenberg(m: &ComplexMatrix, accumulate: bool) -> (ComplexMatrix, Option<ComplexMatrix>) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = accumulate.then(|| ComplexMatrix::identity(n));
    let mut w = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let x = &h.col(k)[k + 1..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let mut v = x.to_vec();
        v[0] += phase * xnorm;
        let vnorm = norm2(&v);
        for z in &mut v {
            *z /= vnorm;
        }
        // left: rows k+1.. of columns k..
        for j in k..n {
            let col = &mut h.col_mut(j)[k + 1..];
            let s = dotc(&v, col) * 2.0;
            for (c, &vi) in col.iter_mut().zip(&v) {
                *c -= vi * s;
            }
        }
        h.col_mut(k)[k + 2..].iter_mut().for_each(|z| *z = ZERO);
        apply_right(&mut h, &v, k + 1, &mut w);
        if let Some(q) = q.as_mut() {
            apply_right(q, &v, k + 1, &mut w);
        }
    }
    (h, q)
}

/// `X[:, off..] ← X[:, off..] (I − 2 v vᴴ)`.
fn apply_right(x: &mut ComplexMatrix, v: &[C64], off: usize, w: &mut [C64]) {
    let rows = x.rows();
    let w = &mut w[..rows];
    w.iter_mut().for_each(|z| *z = ZERO);
    for (j, &vj) in v.iter().enumerate() {
        for (wi, &xi) in w.iter_mut().zip(x.col(off + j)) {
            *wi += xi * vj;
        }
    }
    for (j, &vj) in v.iter().enumerate() {
        let s = vj.conj() * 2.0;
        for (xi, &wi) in x.col_mut(off + j).iter_mut().zip(w.iter()) {
            *xi -= wi * s;
        }
    }
}

/// Rotation `[c, s; −s̄, c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, ONE);
    }
    let an = a.norm();
    let nrm = an.hypot(b.norm());
    (an / nrm, (a / an) * b.conj() / nrm)
}

fn rotate_rows(h: &mut ComplexMatrix, p: usize, c: f64, s: C64, cols: std::ops::RangeInclusive<usize>) {
    for j in cols {
        let x = h[(p, j)];
        let y = h[(p + 1, j)];
        h[(p, j)] = x * c + s * y;
        h[(p + 1, j)] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(h: &mut ComplexMatrix, p: usize, c: f64, s: C64, rows: std::ops::RangeInclusive<usize>) {
    for i in rows {
        let x = h[(i, p)];
        let y = h[(i, p + 1)];
        h[(i, p)] = x * c + s.conj() * y;
        h[(i, p + 1)] = -s * x + y * c;
    }
}

fn eig2x2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    // recover the smaller root from the product for accuracy
    let det = a * d - b * c;
    if l1.norm() >= l2.norm() {
        let l2b = if l1 != ZERO { det / l1 } else { l2 };
        (l1, l2b)
    } else {
        let l1b = if l2 != ZERO { det / l2 } else { l1 };
        (l1b, l2)
    }
}

/// Eigenvalues of an upper Hessenberg matrix via single-shift complex QR
/// with Wilkinson shifts. Only the active window is updated.
fn hessenberg_qr(mut h: ComplexMatrix) -> Result<Vec<C64>, LinalgError> {
    let n = h.rows();
    let mut eig = vec![ZERO; n];
    let hnorm = h.norm_fro();
    let eps = f64::EPSILON;
    let max_total = 100 * n.max(1);
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n as isize - 1;

    while hi >= 0 {
        let hiu = hi as usize;
        let mut l = hiu;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hiu {
            eig[hiu] = h[(hiu, hiu)];
            hi -= 1;
            iter = 0;
            continue;
        }
        if l + 1 == hiu {
            let (l1, l2) = eig2x2(h[(l, l)], h[(l, hiu)], h[(hiu, l)], h[(hiu, hiu)]);
            eig[l] = l1;
            eig[hiu] = l2;
            hi -= 2;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(LinalgError::EigNoConvergence { index: hiu });
        }

        let shift = if iter % 10 == 0 {
            let mut s = h[(hiu, hiu - 1)].re.abs();
            if hiu >= 2 {
                s += h[(hiu - 1, hiu - 2)].re.abs();
            }
            h[(hiu, hiu)] + C64::new(0.75 * s, 0.0)
        } else {
            let d = h[(hiu, hiu)];
            let (l1, l2) = eig2x2(h[(hiu - 1, hiu - 1)], h[(hiu - 1, hiu)], h[(hiu, hiu - 1)], d);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        let (c, s) = givens(h[(l, l)] - shift, h[(l + 1, l)]);
        rotate_rows(&mut h, l, c, s, l..=hiu);
        rotate_cols(&mut h, l, c, s, l..=(l + 2).min(hiu));
        for k in l + 1..hiu {
            let (c, s) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rotate_rows(&mut h, k, c, s, (k - 1)..=hiu);
            h[(k + 1, k - 1)] = ZERO;
            rotate_cols(&mut h, k, c, s, l..=(k + 2).min(hiu));
        }
    }
    Ok(eig)
}

/// Inverse iteration on the Hessenberg matrix for the eigenvalue `lambda`.
fn inverse_iteration(h: &ComplexMatrix, lambda: C64, hnorm: f64) -> Vec<C64> {
    let n = h.rows();
    let tiny = f64::EPSILON * hnorm;
    // Hessenberg LU of (H − λI) with adjacent-row pivoting
    let mut u = h.clone();
    for i in 0..n {
        u[(i, i)] -= lambda;
    }
    let mut swapped = vec![false; n];
    let mut mult = vec![ZERO; n];
    for k in 0..n {
        if k + 1 < n {
            let below = u[(k + 1, k)];
            if below.norm() > u[(k, k)].norm() {
                swapped[k] = true;
                for j in k..n {
                    let t = u[(k, j)];
                    u[(k, j)] = u[(k + 1, j)];
                    u[(k + 1, j)] = t;
                }
            }
            if u[(k, k)].norm() < tiny {
                u[(k, k)] = C64::new(tiny.max(f64::MIN_POSITIVE), 0.0);
            }
            let m = u[(k + 1, k)] / u[(k, k)];
            mult[k] = m;
            u[(k + 1, k)] = ZERO;
            if m != ZERO {
                for j in k + 1..n {
                    let t = u[(k, j)];
                    u[(k + 1, j)] -= m * t;
                }
            }
        } else if u[(k, k)].norm() < tiny {
            u[(k, k)] = C64::new(tiny.max(f64::MIN_POSITIVE), 0.0);
        }
    }

    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + ((i as f64 * 0.618_033_988_75).fract() - 0.5) * 0.5, 0.0))
        .collect();
    for _ in 0..INVERSE_ITERATIONS {
        for k in 0..n.saturating_sub(1) {
            if swapped[k] {
                x.swap(k, k + 1);
            }
            let xk = x[k];
            x[k + 1] -= mult[k] * xk;
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= u[(k, j)] * x[j];
            }
            x[k] = s / u[(k, k)];
        }
        let nrm = norm2(&x);
        if nrm == 0.0 || !nrm.is_finite() {
            break;
        }
        for z in &mut x {
            *z /= nrm;
        }
    }
    x
}
