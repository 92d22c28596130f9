//! Schrödinger propagation of full unitaries and of ℓ-frames on a uniform
//! time grid.
//!
//! The stepper is an exponential midpoint rule: one Hamiltonian evaluation
//! per step at t_k + h/2,
//!
//!   U(t_{k+1}) = exp(−i·h·H(t_k + h/2)) · U(t_k),
//!
//! which is order 2 and norm-preserving per step up to the expm tolerance.
//! The accumulated unitary is snapped back to its polar factor every
//! [`REUNITARIZE_EVERY`] steps to hold rounding drift below 1e-9.

use crate::error::{HolonomyError, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::linalg::{
    expm_antihermitian, polar_unitary_factor, projector_from_frame, ComplexMatrix, Frame,
    Projector,
};
use num_complex::Complex64;

/// Re-unitarization cadence for long products of step exponentials.
pub const REUNITARIZE_EVERY: usize = 256;

/// Default number of integration steps.
pub const DEFAULT_STEPS: usize = 4096;

/// Default cyclicity tolerance on ‖P(T) − P(0)‖_F.
pub const DEFAULT_CYCLIC_TOL: f64 = 1e-6;

/// Uniform grid t_k = k·T/N on [0, T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    duration: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(duration: f64, steps: usize) -> Result<Self> {
        if duration <= 0.0 || !duration.is_finite() {
            return Err(HolonomyError::Validation(format!(
                "grid duration must be positive and finite, got {duration}"
            )));
        }
        if steps < 16 {
            return Err(HolonomyError::Validation(format!(
                "grid needs at least 16 steps, got {steps}"
            )));
        }
        Ok(Self { duration, steps })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size h = T/N.
    pub fn h(&self) -> f64 {
        self.duration / self.steps as f64
    }

    /// Node t_k, k in 0..=N.
    pub fn node(&self, k: usize) -> f64 {
        self.duration * k as f64 / self.steps as f64
    }

    /// Midpoint t_k + h/2 of step k, k in 0..N.
    pub fn midpoint(&self, k: usize) -> f64 {
        self.duration * (k as f64 + 0.5) / self.steps as f64
    }

    /// Same window with twice the steps.
    pub fn refined(&self) -> Self {
        Self { duration: self.duration, steps: self.steps * 2 }
    }
}

/// Frames, projectors, and Hamiltonian samples along one propagation.
#[derive(Debug, Clone)]
pub struct FrameTrajectory {
    pub grid: TimeGrid,
    /// ψ-frames at nodes t_0..t_N.
    pub frames: Vec<Frame>,
    /// Projectors P(t_k) = ψ(t_k)ψ(t_k)†.
    pub projectors: Vec<Projector>,
    /// H(t_k) at nodes.
    pub h_nodes: Vec<ComplexMatrix>,
    /// H(t_k + h/2) at step midpoints.
    pub h_midpoints: Vec<ComplexMatrix>,
    /// ‖P(T) − P(0)‖_F.
    pub cyclicity_defect: f64,
}

impl FrameTrajectory {
    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    pub fn rank(&self) -> usize {
        self.frames[0].rank()
    }
}

/// Integrate iU̇ = H(t)U from U(0) = 𝟙, returning the unitary at every node.
pub fn propagate_unitary(spec: &HamiltonianSpec, grid: &TimeGrid) -> Result<Vec<ComplexMatrix>> {
    let d = spec.dim();
    let h = grid.h();
    let mut u = ComplexMatrix::identity(d);
    let mut out = Vec::with_capacity(grid.steps() + 1);
    out.push(u.clone());
    for k in 0..grid.steps() {
        let hm = spec.eval(grid.midpoint(k))?;
        let generator = hm.scale(Complex64::new(0.0, -h));
        let step = expm_antihermitian(&generator.anti_hermitian_part())?;
        u = step.mul(&u);
        if (k + 1) % REUNITARIZE_EVERY == 0 {
            u = polar_unitary_factor(&u)?;
        }
        out.push(u.clone());
    }
    Ok(out)
}

/// Propagate an initial frame with the same stepping as
/// [`propagate_unitary`], filling projectors and Hamiltonian samples.
pub fn propagate_frame(
    spec: &HamiltonianSpec,
    frame0: &Frame,
    grid: &TimeGrid,
) -> Result<FrameTrajectory> {
    if frame0.dim() != spec.dim() {
        return Err(HolonomyError::Validation(format!(
            "frame dimension {} does not match Hamiltonian dimension {}",
            frame0.dim(),
            spec.dim()
        )));
    }
    if (grid.duration() - spec.duration()).abs() > 1e-12 * spec.duration() {
        return Err(HolonomyError::GridMismatch(format!(
            "grid duration {} does not match scenario duration {}",
            grid.duration(),
            spec.duration()
        )));
    }
    let unitaries = propagate_unitary(spec, grid)?;
    let mut frames = Vec::with_capacity(unitaries.len());
    let mut projectors = Vec::with_capacity(unitaries.len());
    for u in &unitaries {
        let f = Frame::with_tolerance(u.mul(frame0.columns()), 1e-9)?;
        projectors.push(projector_from_frame(&f));
        frames.push(f);
    }
    let mut h_nodes = Vec::with_capacity(grid.steps() + 1);
    for k in 0..=grid.steps() {
        h_nodes.push(spec.eval(grid.node(k))?);
    }
    let mut h_midpoints = Vec::with_capacity(grid.steps());
    for k in 0..grid.steps() {
        h_midpoints.push(spec.eval(grid.midpoint(k))?);
    }
    let cyclicity_defect = projectors[grid.steps()].distance(&projectors[0]);
    Ok(FrameTrajectory { grid: *grid, frames, projectors, h_nodes, h_midpoints, cyclicity_defect })
}

/// True iff the trajectory's projector closes on itself within `tol`
/// (inclusive comparison).
pub fn check_cyclic(traj: &FrameTrajectory, tol: f64) -> bool {
    traj.cyclicity_defect <= tol
}
