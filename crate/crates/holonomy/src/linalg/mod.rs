//! Dense complex linear algebra sized for small quantum systems.

mod decomp;
mod eig;
mod frame;
mod matrix;

pub use decomp::{
    expm_antihermitian, expm_hermitian, logm_unitary_branch, logm_unitary_principal,
    orthonormalize_columns, polar_unitary_factor, UnitaryLog,
};
pub use eig::{degenerate_clusters, eig_hermitian, fix_phase, HermitianEig, DEGENERACY_GAP};
pub use frame::{projector_from_frame, Frame, Projector, FRAME_TOL};
pub use matrix::ComplexMatrix;
