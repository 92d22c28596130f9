//! Evolution, holonomy, and dynamic operators, and their ℓ×ℓ matrix forms.
//!
//! The evolution operator Û(t) = Σ_j |ψ_j(t)⟩⟨ψ_j(0)| factors exactly as
//! Û(t) = Γ̂(t)·D̂(t), where Γ̂ solves d/dt Γ̂ = Ṗ Γ̂ (a path-only object) and
//! D̂ is the reverse-time-ordered exponential of the Hamiltonian matrix
//! elements F_ij = −i⟨ψ_i|H|ψ_j⟩ embedded on the initial frame. For cyclic
//! evolution the same factorization holds for the ℓ×ℓ transformation
//! matrices, U(T) = Γ(T)·D(T), with Γ(T) computed through an independent
//! gauge-frame route.
//!
//! Discretization conventions, shared by every ordered product here:
//! step j uses the averaged sample (M_j + M_{j+1})/2, which approximates the
//! midpoint value to O(h²); time ordering puts later factors leftmost and
//! reverse time ordering puts them rightmost. All products are order 2.

use num_complex::Complex64;

use crate::error::{HolonomyError, Result};
use crate::linalg::{
    expm_antihermitian, expm_hermitian, logm_unitary_branch, polar_unitary_factor,
    ComplexMatrix, Frame,
};
use crate::propagation::{check_cyclic, FrameTrajectory, TimeGrid, REUNITARIZE_EVERY};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// How to integrate the holonomy operator Γ̂.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolonomyMethod {
    /// Γ̂(t_k) = P(t_k)···P(t_1)·P(0): the projector-product limit.
    /// Manifestly gauge-free and path-only; the default.
    ProjectorProduct,
    /// Midpoint integration of dΓ̂/dt = Ṗ Γ̂ with projection onto P(t_{k+1}).
    /// Cross-check for the projector product.
    MidpointOde,
}

/// Gauge-frame interpolation schedule g(t) in V(t) = exp(g(t)·L).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeSchedule {
    /// g(t) = t/T.
    Linear,
    /// g(t) = 3(t/T)² − 2(t/T)³.
    Smoothstep,
}

impl GaugeSchedule {
    pub fn name(&self) -> &'static str {
        match self {
            GaugeSchedule::Linear => "linear",
            GaugeSchedule::Smoothstep => "smoothstep",
        }
    }

    fn g(&self, u: f64) -> f64 {
        match self {
            GaugeSchedule::Linear => u,
            GaugeSchedule::Smoothstep => u * u * (3.0 - 2.0 * u),
        }
    }

    /// dg/dt at u = t/T, including the 1/T factor.
    fn g_dot(&self, u: f64, duration: f64) -> f64 {
        match self {
            GaugeSchedule::Linear => 1.0 / duration,
            GaugeSchedule::Smoothstep => 6.0 * u * (1.0 - u) / duration,
        }
    }
}

/// Û, Γ̂, D̂ sampled at the grid nodes (all d×d, rank ℓ).
#[derive(Debug, Clone)]
pub struct OperatorTrajectory {
    pub grid: TimeGrid,
    pub u_hat: Vec<ComplexMatrix>,
    pub gamma_hat: Vec<ComplexMatrix>,
    pub d_hat: Vec<ComplexMatrix>,
}

/// A smooth basis φ(t) = ψ(t)·V(t) of P(t) that closes on the initial frame.
#[derive(Debug, Clone)]
pub struct GaugeFrame {
    pub grid: TimeGrid,
    pub phi_frames: Vec<Frame>,
    /// ℓ×ℓ unitaries V(t_k), with V(0) = 𝟙 exactly.
    pub v: Vec<ComplexMatrix>,
    pub schedule: GaugeSchedule,
    /// Generator L = log U(T)† of the interpolation.
    pub generator: ComplexMatrix,
    /// Set when the branch of the logarithm was shifted away from an
    /// eigenphase of U(T) near π.
    pub branch_shifted: bool,
    /// ‖φ(T) − ψ(0)‖_F.
    pub closure_residual: f64,
}

/// ℓ×ℓ matrix forms on the grid plus the cycle matrices.
#[derive(Debug, Clone)]
pub struct MatrixForms {
    /// Connection A(t_k) = ⟨φ̇_i|φ_j⟩, anti-Hermitian.
    pub a: Vec<ComplexMatrix>,
    /// F(t_k) = −i⟨ψ_i|H|ψ_j⟩, anti-Hermitian.
    pub f: Vec<ComplexMatrix>,
    /// K(t_k) = −i⟨φ_i|H|φ_j⟩ (diagnostic for the inseparable classic route).
    pub k: Vec<ComplexMatrix>,
    /// Path-ordered exponential of A over the cycle.
    pub gamma_t: ComplexMatrix,
    /// Reverse-time-ordered exponential of F over the cycle.
    pub d_t: ComplexMatrix,
    /// Transformation matrix U(T)_ij = ⟨ψ_i(0)|Û(T)|ψ_j(0)⟩.
    pub u_t: ComplexMatrix,
}

/// Û(t_k) = ψ(t_k)·ψ(0)†.
pub fn evolution_operator(traj: &FrameTrajectory) -> Vec<ComplexMatrix> {
    let psi0_dag = traj.frames[0].columns().adjoint();
    traj.frames.iter().map(|f| f.columns().mul(&psi0_dag)).collect()
}

/// U(t)_ij = ⟨ψ_i(0)|ψ_j(t)⟩, the ℓ×ℓ transformation matrix at a node.
pub fn transformation_matrix(traj: &FrameTrajectory, k: usize) -> ComplexMatrix {
    traj.frames[0].columns().adjoint().mul(traj.frames[k].columns())
}

/// Ṗ(t_k) = −i[H(t_k), P(t_k)], exactly Hermitian by symmetrization.
pub fn projector_derivative(traj: &FrameTrajectory) -> Vec<ComplexMatrix> {
    traj.h_nodes
        .iter()
        .zip(&traj.projectors)
        .map(|(h, p)| h.commutator(p.matrix()).scale(c(0.0, -1.0)).hermitian_part())
        .collect()
}

/// Integrate the holonomy operator Γ̂ along the trajectory.
///
/// Both methods maintain a d×ℓ carrier X_k with Γ̂(t_k) = X_k·ψ(0)†. The
/// stored samples re-unitarize the ℓ×ℓ core C_k = ψ(t_k)†X_k through its
/// polar factor, so each sample is a partial isometry from P(0) onto P(t_k);
/// the running carrier itself is re-based every [`REUNITARIZE_EVERY`] steps.
pub fn holonomy_operator(
    traj: &FrameTrajectory,
    method: HolonomyMethod,
) -> Result<Vec<ComplexMatrix>> {
    let n = traj.grid.steps();
    let h = traj.grid.h();
    let psi0 = traj.frames[0].columns().clone();
    let psi0_dag = psi0.adjoint();
    let mut x = psi0.clone();
    let mut out = Vec::with_capacity(n + 1);
    out.push(traj.projectors[0].matrix().clone());
    for k in 0..n {
        match method {
            HolonomyMethod::ProjectorProduct => {
                // X <- P(t_{k+1}) X, applied through the thin frame
                let next = traj.frames[k + 1].columns();
                x = next.mul(&next.adjoint().mul(&x));
            }
            HolonomyMethod::MidpointOde => {
                let p_avg = traj.projectors[k]
                    .matrix()
                    .add(traj.projectors[k + 1].matrix())
                    .scale_re(0.5);
                let p_dot = traj.h_midpoints[k]
                    .commutator(&p_avg)
                    .scale(c(0.0, -1.0))
                    .hermitian_part();
                x = expm_hermitian(&p_dot.scale_re(h))?.mul(&x);
                let next = traj.frames[k + 1].columns();
                x = next.mul(&next.adjoint().mul(&x));
            }
        }
        let core = traj.frames[k + 1].columns().adjoint().mul(&x);
        let core_unitary = polar_unitary_factor(&core)?;
        out.push(traj.frames[k + 1].columns().mul(&core_unitary).mul(&psi0_dag));
        if (k + 1) % REUNITARIZE_EVERY == 0 {
            x = traj.frames[k + 1].columns().mul(&core_unitary);
        }
    }
    Ok(out)
}

/// Anti-Hermitian F(t_k) = −i·ψ(t_k)†·H(t_k)·ψ(t_k) at every node.
pub fn f_samples(traj: &FrameTrajectory) -> Vec<ComplexMatrix> {
    traj.frames
        .iter()
        .zip(&traj.h_nodes)
        .map(|(psi, h)| {
            psi.columns()
                .adjoint()
                .mul(h)
                .mul(psi.columns())
                .scale(c(0.0, -1.0))
                .anti_hermitian_part()
        })
        .collect()
}

/// F at step midpoints: the frame is advanced a half step with the stored
/// midpoint Hamiltonian, ψ̃ = exp(−i(h/2)H(t_k+h/2))·ψ(t_k), and F is read
/// off there. Exact for one-parameter Hamiltonians, and piecewise
/// coefficients with grid-aligned jumps stay order 2 because a midpoint
/// never sits on a discontinuity.
pub fn f_midpoint_samples(traj: &FrameTrajectory) -> Result<Vec<ComplexMatrix>> {
    let n = traj.grid.steps();
    let h = traj.grid.h();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let half = expm_antihermitian(
            &traj.h_midpoints[k]
                .scale(c(0.0, -0.5 * h))
                .anti_hermitian_part(),
        )?;
        let mid = half.mul(traj.frames[k].columns());
        out.push(
            mid.adjoint()
                .mul(&traj.h_midpoints[k])
                .mul(&mid)
                .scale(c(0.0, -1.0))
                .anti_hermitian_part(),
        );
    }
    Ok(out)
}

/// Dynamic operator samples: the ℓ×ℓ matrices D(t_k) and their embeddings
/// D̂(t_k) = ψ(0)·D(t_k)·ψ(0)†.
#[derive(Debug, Clone)]
pub struct DynamicOperator {
    pub d_hat: Vec<ComplexMatrix>,
    /// ℓ×ℓ reverse-ordered products D(t_k).
    pub d_matrix: Vec<ComplexMatrix>,
    /// F(t_k) at every node.
    pub f: Vec<ComplexMatrix>,
}

/// Build D(t_k) = exp(F̃_0 h)·exp(F̃_1 h)···exp(F̃_{k−1} h) (reverse time
/// ordering: later factors on the right, F̃ sampled at step midpoints) and
/// embed on the initial frame.
pub fn dynamic_operator(traj: &FrameTrajectory) -> Result<DynamicOperator> {
    let n = traj.grid.steps();
    let h = traj.grid.h();
    let l = traj.rank();
    let f = f_samples(traj);
    let f_mid = f_midpoint_samples(traj)?;
    let psi0 = traj.frames[0].columns();
    let psi0_dag = psi0.adjoint();
    let mut d = ComplexMatrix::identity(l);
    let mut d_matrix = Vec::with_capacity(n + 1);
    let mut d_hat = Vec::with_capacity(n + 1);
    d_matrix.push(d.clone());
    d_hat.push(traj.projectors[0].matrix().clone());
    for fk in f_mid.iter() {
        let step = expm_antihermitian(&fk.scale_re(h))?;
        d = d.mul(&step);
        d_matrix.push(d.clone());
        d_hat.push(psi0.mul(&d).mul(&psi0_dag));
    }
    Ok(DynamicOperator { d_hat, d_matrix, f })
}

/// D̂†(t_k) from its own time-ordered product (later factors leftmost),
/// exp(−F̃_{k−1}h)···exp(−F̃_0 h) embedded on the initial frame. Used to
/// check the adjoint identity against [`dynamic_operator`].
pub fn dynamic_operator_adjoint(traj: &FrameTrajectory) -> Result<Vec<ComplexMatrix>> {
    let n = traj.grid.steps();
    let h = traj.grid.h();
    let f_mid = f_midpoint_samples(traj)?;
    let psi0 = traj.frames[0].columns();
    let psi0_dag = psi0.adjoint();
    let mut d_dag = ComplexMatrix::identity(traj.rank());
    let mut out = Vec::with_capacity(n + 1);
    out.push(traj.projectors[0].matrix().clone());
    for fk in f_mid.iter() {
        let step = expm_antihermitian(&fk.scale_re(-h))?;
        d_dag = step.mul(&d_dag);
        out.push(psi0.mul(&d_dag).mul(&psi0_dag));
    }
    Ok(out)
}

/// max_k ‖Û(t_k) − Γ̂(t_k)·D̂(t_k)‖_F.
pub fn separation_residual(ops: &OperatorTrajectory) -> Result<f64> {
    if ops.u_hat.len() != ops.gamma_hat.len() || ops.u_hat.len() != ops.d_hat.len() {
        return Err(HolonomyError::GridMismatch(format!(
            "operator sample counts differ: {} / {} / {}",
            ops.u_hat.len(),
            ops.gamma_hat.len(),
            ops.d_hat.len()
        )));
    }
    let mut worst = 0.0f64;
    for ((u, g), d) in ops.u_hat.iter().zip(&ops.gamma_hat).zip(&ops.d_hat) {
        worst = worst.max(u.distance(&g.mul(d)));
    }
    Ok(worst)
}

/// Build the gauge frame φ(t) = ψ(t)·exp(g(t)·L) with L = log U(T)†.
///
/// Requires a cyclic trajectory. When U(T) carries an eigenphase within
/// 1e-6 of π, the logarithm branch is shifted to (−π + 1e-3, π + 1e-3] and
/// the frame is flagged, keeping the interpolation deterministic.
pub fn build_gauge_frame(
    traj: &FrameTrajectory,
    schedule: GaugeSchedule,
    cyclic_tol: f64,
) -> Result<GaugeFrame> {
    if !check_cyclic(traj, cyclic_tol) {
        return Err(HolonomyError::Precondition(format!(
            "trajectory is not cyclic: defect {:.3e} > {:.3e}",
            traj.cyclicity_defect, cyclic_tol
        )));
    }
    let n = traj.grid.steps();
    let duration = traj.grid.duration();
    let u_t = transformation_matrix(traj, n);
    let principal = logm_unitary_branch(&u_t.adjoint(), 0.0)?;
    let (log, branch_shifted) = if principal.branch_cut {
        (logm_unitary_branch(&u_t.adjoint(), 1e-3)?, true)
    } else {
        (principal, false)
    };
    let l = log.matrix;

    let rank = traj.rank();
    let mut v = Vec::with_capacity(n + 1);
    let mut phi_frames = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let g = schedule.g(traj.grid.node(k) / duration);
        let vk = if g == 0.0 {
            ComplexMatrix::identity(rank)
        } else {
            expm_antihermitian(&l.scale_re(g))?
        };
        let phi = Frame::with_tolerance(traj.frames[k].columns().mul(&vk), 1e-9)?;
        v.push(vk);
        phi_frames.push(phi);
    }
    let closure_residual = phi_frames[n].distance(&traj.frames[0]);
    Ok(GaugeFrame {
        grid: traj.grid,
        phi_frames,
        v,
        schedule,
        generator: l,
        branch_shifted,
        closure_residual,
    })
}

/// Connection samples A(t_k) = V̇†V − V†FV with the analytic derivative
/// V̇ = g′(t)·L·V (no frame finite differences).
pub fn connection_matrix(gauge: &GaugeFrame, f: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let duration = gauge.grid.duration();
    let mut out = Vec::with_capacity(gauge.v.len());
    for (k, vk) in gauge.v.iter().enumerate() {
        let u = gauge.grid.node(k) / duration;
        let g_dot = gauge.schedule.g_dot(u, duration);
        // V̇†V = −g′·L because V commutes with its generator
        let a = gauge
            .generator
            .scale_re(-g_dot)
            .sub(&vk.adjoint().mul(&f[k]).mul(vk))
            .anti_hermitian_part();
        out.push(a);
    }
    out
}

/// Γ(T) = exp(Ā_{N−1}h)···exp(Ā_1 h)·exp(Ā_0 h): the path-ordered
/// exponential of the connection, later factors leftmost.
pub fn matrix_holonomy(a: &[ComplexMatrix], grid: &TimeGrid) -> Result<ComplexMatrix> {
    ordered_exponential(a, grid.h())
}

/// Time-ordered product of averaged single-step exponentials, later factors
/// on the left.
pub fn ordered_exponential(samples: &[ComplexMatrix], h: f64) -> Result<ComplexMatrix> {
    let l = samples[0].rows();
    let mut acc = ComplexMatrix::identity(l);
    for w in samples.windows(2) {
        let bar = w[0].add(&w[1]).scale_re(0.5);
        acc = expm_antihermitian(&bar.scale_re(h))?.mul(&acc);
    }
    Ok(acc)
}

/// ‖U(T) − Γ(T)·D(T)‖_F for the cycle matrices.
pub fn matrix_separation_residual(forms: &MatrixForms) -> f64 {
    forms.u_t.distance(&forms.gamma_t.mul(&forms.d_t))
}

/// max over interior nodes of ‖Γ̂†(t_k)·(Γ̂(t_{k+1}) − Γ̂(t_{k−1}))/(2h)‖_F.
///
/// Zero in the continuum: the holonomy operator parallel-transports the
/// subspace. The same functional applied to Û is the negative control that
/// exposes the dynamical content.
pub fn parallel_transport_residual(samples: &[ComplexMatrix], grid: &TimeGrid) -> f64 {
    let h = grid.h();
    let mut worst = 0.0f64;
    for k in 1..samples.len() - 1 {
        let diff = samples[k + 1].sub(&samples[k - 1]).scale_re(1.0 / (2.0 * h));
        worst = worst.max(samples[k].adjoint().mul(&diff).frobenius_norm());
    }
    worst
}

/// K(t_k) = −i⟨φ_i|H|φ_j⟩ in the gauge frame.
pub fn k_samples(gauge: &GaugeFrame, h_nodes: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    gauge
        .phi_frames
        .iter()
        .zip(h_nodes)
        .map(|(phi, h)| {
            phi.columns()
                .adjoint()
                .mul(h)
                .mul(phi.columns())
                .scale(c(0.0, -1.0))
                .anti_hermitian_part()
        })
        .collect()
}

/// Integrate the classic (inseparable) transformation-matrix equation
/// U̇ = (A + K)U by ordered product and return ‖U_integrated(T) − U(T)‖_F.
///
/// This validates that the route through the gauge frame reproduces the
/// evolution even though A and K cannot be factored apart inside it.
pub fn inseparable_form_diagnostic(
    a: &[ComplexMatrix],
    k: &[ComplexMatrix],
    grid: &TimeGrid,
    u_t: &ComplexMatrix,
) -> Result<f64> {
    let sum: Vec<ComplexMatrix> = a.iter().zip(k).map(|(ak, kk)| ak.add(kk)).collect();
    let integrated = ordered_exponential(&sum, grid.h())?;
    Ok(integrated.distance(u_t))
}

/// ‖U(T) − exp(∫A)·exp(∫K)‖_F: the naive factorization that is only valid
/// when A and K commute at all time pairs. Serves as the negative control
/// for the ordered route.
pub fn unordered_split_residual(
    a: &[ComplexMatrix],
    k: &[ComplexMatrix],
    grid: &TimeGrid,
    u_t: &ComplexMatrix,
) -> Result<f64> {
    let int_a = trapezoid_integral(a, grid.h());
    let int_k = trapezoid_integral(k, grid.h());
    let split = expm_antihermitian(&int_a.anti_hermitian_part())?
        .mul(&expm_antihermitian(&int_k.anti_hermitian_part())?);
    Ok(split.distance(u_t))
}

fn trapezoid_integral(samples: &[ComplexMatrix], h: f64) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(samples[0].rows(), samples[0].cols());
    for w in samples.windows(2) {
        acc = acc.add(&w[0].add(&w[1]).scale_re(0.5 * h));
    }
    acc
}

/// Assemble Û, Γ̂, D̂ samples for a trajectory.
pub fn operator_trajectory(
    traj: &FrameTrajectory,
    method: HolonomyMethod,
) -> Result<(OperatorTrajectory, DynamicOperator)> {
    let u_hat = evolution_operator(traj);
    let gamma_hat = holonomy_operator(traj, method)?;
    let dynamic = dynamic_operator(traj)?;
    Ok((
        OperatorTrajectory { grid: traj.grid, u_hat, gamma_hat, d_hat: dynamic.d_hat.clone() },
        dynamic,
    ))
}

/// Assemble the ℓ×ℓ matrix forms for a cyclic trajectory.
pub fn matrix_forms(
    traj: &FrameTrajectory,
    gauge: &GaugeFrame,
    dynamic: &DynamicOperator,
) -> Result<MatrixForms> {
    let a = connection_matrix(gauge, &dynamic.f);
    let k = k_samples(gauge, &traj.h_nodes);
    let gamma_t = matrix_holonomy(&a, &traj.grid)?;
    let d_t = dynamic.d_matrix.last().unwrap().clone();
    let u_t = transformation_matrix(traj, traj.grid.steps());
    Ok(MatrixForms { a, f: dynamic.f.clone(), k, gamma_t, d_t, u_t })
}
