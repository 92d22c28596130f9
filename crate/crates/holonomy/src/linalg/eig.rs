//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Normal matrices at d ≤ ~32 do not need anything heavier, and Jacobi
//! keeps the eigenvector basis orthonormal to machine precision, which the
//! exponential/logarithm routines rely on.
//!
//! Sort convention: ascending real eigenvalue; every eigenvector is phased
//! so that its largest-magnitude component (lowest index on ties) is real
//! positive. Degenerate clusters use a gap threshold of 1e-10.

use num_complex::Complex64;

use crate::error::{HolonomyError, Result};
use crate::linalg::matrix::ComplexMatrix;

/// Gap below which neighboring eigenvalues count as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-10;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Diagonalize a Hermitian matrix. `herm_tol` bounds the accepted
/// Hermiticity defect of the input.
pub fn eig_hermitian(m: &ComplexMatrix, herm_tol: f64) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(HolonomyError::Validation(format!(
            "eig_hermitian needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > herm_tol {
        return Err(HolonomyError::Validation(format!(
            "matrix is not Hermitian: ‖M − M†‖_F = {defect:.3e} > {herm_tol:.3e}"
        )));
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(HermitianEig { eigenvalues: vec![0.0; n], eigenvectors: v });
    }

    let stop = 1e-15 * scale * n as f64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| (a[(k, k)].re, v.column(k)))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (k, (lambda, mut col)) in pairs.into_iter().enumerate() {
        fix_phase(&mut col);
        eigenvalues.push(lambda);
        eigenvectors.set_column(k, &col);
    }
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

/// Zero out a[p, q] with a unitary 2x2 rotation; accumulate into v.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let beta = a[(p, q)];
    let bmag = beta.norm();
    if bmag < 1e-300 {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let mid = 0.5 * (alpha + gamma);
    let half_diff = 0.5 * (alpha - gamma);
    let r = (half_diff * half_diff + bmag * bmag).sqrt();
    // larger eigenvalue of the 2x2 block, with the cancellation-free form
    // of (lambda2 - alpha)
    let l2_minus_alpha = if half_diff > 0.0 {
        bmag * bmag / (r + half_diff)
    } else {
        r - half_diff
    };
    let _lambda2 = mid + r;
    // eigenvector for lambda2: (beta, l2_minus_alpha); orthogonal partner
    // for lambda1: (-(l2_minus_alpha), conj(beta))
    let nrm = (bmag * bmag + l2_minus_alpha * l2_minus_alpha).sqrt();
    let j_pp = Complex64::new(-l2_minus_alpha / nrm, 0.0);
    let j_qp = beta.conj() / nrm;
    let j_pq = beta / nrm;
    let j_qq = Complex64::new(l2_minus_alpha / nrm, 0.0);

    let n = a.rows();
    // A <- A J (columns p, q)
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * j_pp + aiq * j_qp;
        a[(i, q)] = aip * j_pq + aiq * j_qq;
    }
    // A <- J† A (rows p, q)
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = j_pp.conj() * apj + j_qp.conj() * aqj;
        a[(q, j)] = j_pq.conj() * apj + j_qq.conj() * aqj;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V <- V J
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * j_pp + viq * j_qp;
        v[(i, q)] = vip * j_pq + viq * j_qq;
    }
}

/// Rotate a vector's global phase so its largest-magnitude component
/// (lowest index on ties) is real positive.
pub fn fix_phase(col: &mut [Complex64]) {
    let mut imax = 0;
    let mut best = 0.0f64;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            imax = i;
        }
    }
    if best == 0.0 {
        return;
    }
    let phase = col[imax].conj() / best;
    for z in col.iter_mut() {
        *z *= phase;
    }
}

/// Group indices of an ascending eigenvalue list into degenerate clusters.
pub fn degenerate_clusters(eigenvalues: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &lam) in eigenvalues.iter().enumerate() {
        match clusters.last_mut() {
            Some(cluster) if lam - eigenvalues[*cluster.last().unwrap()] < gap => {
                cluster.push(k);
            }
            _ => clusters.push(vec![k]),
        }
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(e: &HermitianEig) -> ComplexMatrix {
        let n = e.eigenvalues.len();
        let mut d = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            d[(k, k)] = c(e.eigenvalues[k], 0.0);
        }
        e.eigenvectors.mul(&d).mul(&e.eigenvectors.adjoint())
    }

    #[test]
    fn diagonal_input_sorted() {
        let m = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let e = eig_hermitian(&m, 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0, 1.0, 3.0]);
        // eigenvectors e2, e3, e1 with positive-real phase
        assert!((e.eigenvectors[(1, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((e.eigenvectors[(2, 1)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((e.eigenvectors[(0, 2)] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pauli_x_convention() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&m, 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2.0f64.sqrt();
        // (e1 - e2)/sqrt(2) then (e1 + e2)/sqrt(2), first component positive
        assert!((e.eigenvectors[(0, 0)] - c(s, 0.0)).norm() < 1e-14);
        assert!((e.eigenvectors[(1, 0)] - c(-s, 0.0)).norm() < 1e-14);
        assert!((e.eigenvectors[(0, 1)] - c(s, 0.0)).norm() < 1e-14);
        assert!((e.eigenvectors[(1, 1)] - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [2usize, 3, 4, 6] {
            let mut m = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = c(next(), next());
                }
            }
            let m = m.hermitian_part();
            let e = eig_hermitian(&m, 1e-10).unwrap();
            assert!(reconstruct(&e).distance(&m) < 1e-12);
            assert!(e.eigenvectors.unitarity_defect() < 1e-12);
            for k in 1..n {
                assert!(e.eigenvalues[k] >= e.eigenvalues[k - 1]);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(eig_hermitian(&m, 1e-10).is_err());
    }
}
