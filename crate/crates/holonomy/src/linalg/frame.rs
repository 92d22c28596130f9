//! Orthonormal frames and rank-ℓ projectors.

use crate::error::{HolonomyError, Result};
use crate::linalg::decomp::orthonormalize_columns;
use crate::linalg::matrix::ComplexMatrix;

/// Default orthonormality tolerance for a frame, ‖V†V − 𝟙‖_F.
pub const FRAME_TOL: f64 = 1e-10;

/// A d×ℓ column-orthonormal array spanning an ℓ-dimensional subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    columns: ComplexMatrix,
}

impl Frame {
    /// Wrap columns that are already orthonormal within [`FRAME_TOL`].
    pub fn new(columns: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(columns, FRAME_TOL)
    }

    /// Wrap columns that are orthonormal within `tol` (the propagation
    /// layer allows a slightly looser 1e-9 for integrated frames).
    pub fn with_tolerance(columns: ComplexMatrix, tol: f64) -> Result<Self> {
        if columns.cols() > columns.rows() {
            return Err(HolonomyError::Validation(format!(
                "frame rank {} exceeds dimension {}",
                columns.cols(),
                columns.rows()
            )));
        }
        let defect = columns.unitarity_defect();
        if defect > tol {
            return Err(HolonomyError::Validation(format!(
                "frame columns not orthonormal: ‖V†V − 𝟙‖_F = {defect:.3e} > {tol:.3e}"
            )));
        }
        Ok(Self { columns })
    }

    /// Orthonormalize arbitrary independent columns into a frame
    /// (QR with real positive diagonal convention).
    pub fn orthonormalize(columns: &ComplexMatrix) -> Result<Self> {
        Ok(Self { columns: orthonormalize_columns(columns)? })
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    /// Subspace rank ℓ.
    pub fn rank(&self) -> usize {
        self.columns.cols()
    }

    pub fn columns(&self) -> &ComplexMatrix {
        &self.columns
    }

    /// The rank-ℓ projector V V† onto the spanned subspace.
    pub fn projector(&self) -> Projector {
        let p = self.columns.mul(&self.columns.adjoint()).hermitian_part();
        Projector { matrix: p }
    }

    /// ‖self − other‖_F of the column arrays (not gauge invariant).
    pub fn distance(&self, other: &Frame) -> f64 {
        self.columns.distance(&other.columns)
    }
}

/// A Hermitian idempotent d×d matrix of rank ℓ.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
}

impl Projector {
    /// Validate an explicit matrix as a projector.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(HolonomyError::Validation("projector must be square".into()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > 1e-12 {
            return Err(HolonomyError::Validation(format!(
                "projector not Hermitian: defect {herm:.3e}"
            )));
        }
        let idem = matrix.mul(&matrix).distance(&matrix);
        if idem > 1e-10 {
            return Err(HolonomyError::Validation(format!(
                "projector not idempotent: ‖P² − P‖_F = {idem:.3e}"
            )));
        }
        let tr = matrix.trace();
        let rank = tr.re.round();
        if (tr.re - rank).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(HolonomyError::Validation(format!(
                "projector trace {tr} is not a near-integer rank"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }

    /// ‖P − Q‖_F; gauge-invariant distance between subspaces.
    pub fn distance(&self, other: &Projector) -> f64 {
        self.matrix.distance(&other.matrix)
    }
}

/// P(t) = Σ_i |ψ_i⟩⟨ψ_i| for the frame's columns.
pub fn projector_from_frame(frame: &Frame) -> Projector {
    frame.projector()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_basis_vector_projector() {
        let cols = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap();
        let f = Frame::new(cols).unwrap();
        let p = f.projector();
        assert!((p.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.matrix()[(1, 1)].norm() < 1e-15);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn complete_frame_gives_identity() {
        let f = Frame::new(ComplexMatrix::identity(3)).unwrap();
        let p = f.projector();
        assert!(p.matrix().distance(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn mixed_frame_projector_blocks() {
        let s = 1.0 / 2.0f64.sqrt();
        let cols = ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(0.0, 0.0)],
            vec![c(s, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let f = Frame::new(cols).unwrap();
        let p = f.projector();
        for (i, j, want) in [
            (0usize, 0usize, 0.5),
            (0, 1, 0.5),
            (1, 0, 0.5),
            (1, 1, 0.5),
            (2, 2, 1.0),
        ] {
            assert!((p.matrix()[(i, j)] - c(want, 0.0)).norm() < 1e-14);
        }
        // direct multiplication oracle: idempotence
        let pp = p.matrix().mul(p.matrix());
        assert!(pp.distance(p.matrix()) < 1e-14);
    }

    #[test]
    fn projector_gauge_invariance() {
        // right-multiplying the frame by an ℓ×ℓ unitary leaves P unchanged
        use crate::linalg::decomp::expm_antihermitian;
        let s = 1.0 / 2.0f64.sqrt();
        let cols = ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(0.0, 0.0)],
            vec![c(0.0, s), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let f = Frame::new(cols.clone()).unwrap();
        let g = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.3), c(0.5, -0.2)],
            vec![c(-0.5, -0.2), c(0.0, -0.1)],
        ])
        .unwrap();
        let u = expm_antihermitian(&g).unwrap();
        let rotated = Frame::new(cols.mul(&u)).unwrap();
        assert!(f.projector().distance(&rotated.projector()) < 1e-12);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let cols = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(Frame::new(cols).is_err());
    }

    #[test]
    fn projector_validation_catches_non_idempotent() {
        let m = ComplexMatrix::diag(&[c(0.5, 0.0), c(0.5, 0.0)]);
        assert!(Projector::from_matrix(m).is_err());
    }
}
