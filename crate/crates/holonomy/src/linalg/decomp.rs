//! Exponentials, logarithms, polar factors, and frame orthonormalization.
//!
//! All routines go through the Jacobi eigensolver: the matrices here are
//! normal (Hermitian, anti-Hermitian, or unitary), where the spectral route
//! preserves structure exactly — a unitary comes out unitary up to rounding,
//! which the ordered-product machinery downstream depends on.

use num_complex::Complex64;

use crate::error::{HolonomyError, Result};
use crate::linalg::eig::{degenerate_clusters, eig_hermitian, fix_phase};
use crate::linalg::matrix::ComplexMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// exp(M) for anti-Hermitian M, via the eigendecomposition of iM.
///
/// The result is unitary within ~1e-14.
pub fn expm_antihermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(HolonomyError::Validation(format!(
            "expm needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.anti_hermiticity_defect();
    if defect > 1e-10 {
        return Err(HolonomyError::Validation(format!(
            "matrix is not anti-Hermitian: ‖M + M†‖_F = {defect:.3e}"
        )));
    }
    // iM is Hermitian; exp(M) = V exp(-i Λ) V†.
    let h = m.scale(c(0.0, 1.0)).hermitian_part();
    let eig = eig_hermitian(&h, 1e-9)?;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| Complex64::from_polar(1.0, -lam))
        .collect();
    Ok(eig
        .eigenvectors
        .mul(&ComplexMatrix::diag(&phases))
        .mul(&eig.eigenvectors.adjoint()))
}

/// exp(S) for Hermitian S (used by the holonomy ODE stepper, where the
/// generator Ṗ is Hermitian rather than anti-Hermitian).
pub fn expm_hermitian(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(s, 1e-9)?;
    let exps: Vec<Complex64> = eig.eigenvalues.iter().map(|&lam| c(lam.exp(), 0.0)).collect();
    Ok(eig
        .eigenvectors
        .mul(&ComplexMatrix::diag(&exps))
        .mul(&eig.eigenvectors.adjoint()))
}

/// Principal logarithm of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryLog {
    /// Anti-Hermitian L with exp(L) = U.
    pub matrix: ComplexMatrix,
    /// Set when some eigenvalue of U lies within 1e-6 of −1, i.e. an
    /// eigenphase sits on the branch cut. The caller decides the remedy.
    pub branch_cut: bool,
}

/// Anti-Hermitian principal logarithm of a unitary U, eigenphases in
/// (−π, π]. See [`logm_unitary_branch`] for the shifted-branch variant.
pub fn logm_unitary_principal(u: &ComplexMatrix) -> Result<UnitaryLog> {
    logm_unitary_branch(u, 0.0)
}

/// Logarithm of a unitary with eigenphases taken in (−π + delta, π + delta].
///
/// A unitary is normal, so its Hermitian and anti-Hermitian parts commute:
/// diagonalize (U + U†)/2, then split degenerate clusters with
/// (U − U†)/(2i) projected into them.
pub fn logm_unitary_branch(u: &ComplexMatrix, delta: f64) -> Result<UnitaryLog> {
    if !u.is_square() {
        return Err(HolonomyError::Validation("logm needs a square matrix".into()));
    }
    let defect = u.unitarity_defect();
    if defect > 1e-8 {
        return Err(HolonomyError::Validation(format!(
            "matrix is not unitary: ‖U†U − 𝟙‖_F = {defect:.3e}"
        )));
    }
    let n = u.rows();
    let h_cos = u.hermitian_part();
    let h_sin = u.anti_hermitian_part().scale(c(0.0, -1.0)).hermitian_part();

    let eig = eig_hermitian(&h_cos, 1e-9)?;
    let mut basis = eig.eigenvectors;
    for cluster in degenerate_clusters(&eig.eigenvalues, 1e-8) {
        if cluster.len() < 2 {
            continue;
        }
        let w = basis.select_columns(&cluster);
        let block = w.adjoint().mul(&h_sin).mul(&w).hermitian_part();
        let sub = eig_hermitian(&block, 1e-8)?;
        let refined = w.mul(&sub.eigenvectors);
        for (jj, &j) in cluster.iter().enumerate() {
            basis.set_column(j, &refined.column(jj));
        }
    }

    let mut branch_cut = false;
    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    for k in 0..n {
        let col = basis.column(k);
        // Rayleigh quotient gives the unitary eigenvalue for this vector.
        let mut mu = c(0.0, 0.0);
        for i in 0..n {
            let mut uw = c(0.0, 0.0);
            for j in 0..n {
                uw += u[(i, j)] * col[j];
            }
            mu += col[i].conj() * uw;
        }
        let mu = mu / mu.norm();
        if (mu + c(1.0, 0.0)).norm() <= 1e-6 {
            branch_cut = true;
        }
        let mut theta = mu.arg();
        if theta <= -std::f64::consts::PI + delta {
            theta += 2.0 * std::f64::consts::PI;
        }
        pairs.push((theta, col));
    }

    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut log = ComplexMatrix::zeros(n, n);
    for (theta, mut col) in pairs {
        fix_phase(&mut col);
        for i in 0..n {
            for j in 0..n {
                log[(i, j)] += c(0.0, theta) * col[i] * col[j].conj();
            }
        }
    }
    Ok(UnitaryLog { matrix: log.anti_hermitian_part(), branch_cut })
}

/// Unitary factor of the polar decomposition M = Q·(M†M)^{1/2}; the closest
/// unitary to M in Frobenius norm.
pub fn polar_unitary_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(HolonomyError::Validation("polar factor needs a square matrix".into()));
    }
    let gram = m.adjoint().mul(m).hermitian_part();
    let eig = eig_hermitian(&gram, 1e-6)?;
    let sigma_min = eig.eigenvalues[0].max(0.0).sqrt();
    if sigma_min <= 1e-12 {
        return Err(HolonomyError::Singular(format!(
            "smallest singular value {sigma_min:.3e} ≤ 1e-12"
        )));
    }
    let inv_sqrt: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| c(1.0 / lam.sqrt(), 0.0))
        .collect();
    let gram_inv_sqrt = eig
        .eigenvectors
        .mul(&ComplexMatrix::diag(&inv_sqrt))
        .mul(&eig.eigenvectors.adjoint());
    Ok(m.mul(&gram_inv_sqrt))
}

/// Orthonormalize columns by modified Gram–Schmidt with reorthogonalization.
///
/// The implied R factor has a real positive diagonal, so the output is
/// deterministic and leaves already-orthonormal input unchanged.
pub fn orthonormalize_columns(columns: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = columns.rows();
    let l = columns.cols();
    if l > d {
        return Err(HolonomyError::Validation(format!(
            "cannot orthonormalize {l} columns in dimension {d}"
        )));
    }
    let gram = columns.adjoint().mul(columns).hermitian_part();
    let geig = eig_hermitian(&gram, 1e-8)?;
    let sigma_min = geig.eigenvalues[0].max(0.0).sqrt();
    if sigma_min <= 1e-10 {
        return Err(HolonomyError::Singular(format!(
            "columns are linearly dependent: smallest singular value {sigma_min:.3e}"
        )));
    }

    let mut q = columns.clone();
    for k in 0..l {
        let mut w = q.column(k);
        for _ in 0..2 {
            for j in 0..k {
                let qj = q.column(j);
                let overlap: Complex64 =
                    qj.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for i in 0..d {
                    w[i] -= overlap * qj[i];
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(HolonomyError::Singular(
                "column collapsed during orthonormalization".into(),
            ));
        }
        for z in w.iter_mut() {
            *z /= norm;
        }
        q.set_column(k, &w);
    }
    Ok(q)
}
