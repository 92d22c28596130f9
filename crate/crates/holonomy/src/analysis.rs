//! Physics-level checks built on the separation machinery: purely-holonomic
//! verdicts, loop composition, Abelian and adiabatic special cases, and the
//! one-parameter-Hamiltonian gate designer.

use num_complex::Complex64;

use crate::engine::{
    f_samples, holonomy_operator, operator_trajectory, transformation_matrix, HolonomyMethod,
};
use crate::error::{HolonomyError, Result};
use crate::hamiltonian::{spectral_decompose, Coefficient, HamiltonianSpec, HamiltonianTerm};
use crate::linalg::{ComplexMatrix, Frame};
use crate::propagation::{check_cyclic, propagate_frame, FrameTrajectory, TimeGrid};
use crate::scenario::{scenario_from_parts, Scenario, Tolerances};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Reduce a phase to the representative in (−π, π].
pub fn reduce_phase(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = x.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Outcome of the purely-holonomic test on D(T).
#[derive(Debug, Clone, Copy)]
pub struct HolonomicVerdict {
    pub is_purely_holonomic: bool,
    /// Global phase α with D†(T) ≈ e^{iα}𝟙, in (−π, π].
    pub alpha: f64,
    /// False when trace(D†) is too small to define α.
    pub alpha_defined: bool,
    /// ‖D†(T) − e^{iα}𝟙‖_F.
    pub residual: f64,
    pub tolerance: f64,
}

/// A cyclic evolution is purely holonomic iff D†(T) is proportional to the
/// identity. The verdict fits the best global phase from the trace.
pub fn purely_holonomic_check(d_t: &ComplexMatrix, tol: f64) -> Result<HolonomicVerdict> {
    let defect = d_t.unitarity_defect();
    if defect > 1e-7 {
        return Err(HolonomyError::Validation(format!(
            "D(T) is not unitary: defect {defect:.3e}"
        )));
    }
    let l = d_t.rows();
    let d_dag = d_t.adjoint();
    let tr = d_dag.trace();
    if tr.norm() <= 1e-9 {
        // traceless D† cannot be proportional to the identity
        let residual = d_dag.distance(&ComplexMatrix::identity(l));
        return Ok(HolonomicVerdict {
            is_purely_holonomic: false,
            alpha: 0.0,
            alpha_defined: false,
            residual,
            tolerance: tol,
        });
    }
    let alpha = tr.arg();
    let target = ComplexMatrix::identity(l).scale(Complex64::from_polar(1.0, alpha));
    let residual = d_dag.distance(&target);
    Ok(HolonomicVerdict {
        is_purely_holonomic: residual <= tol,
        alpha,
        alpha_defined: true,
        residual,
        tolerance: tol,
    })
}

/// The cycle-level data of one propagated segment, everything loop
/// composition needs.
#[derive(Debug, Clone)]
pub struct SegmentRun {
    pub initial_frame: Frame,
    pub final_frame: Frame,
    /// ℓ×ℓ reverse-ordered D(T) of the segment, in frame-label basis.
    pub d_t: ComplexMatrix,
    /// ℓ×ℓ Γ̂(T) expressed on the segment's initial frame (the holonomy
    /// matrix when the segment closes on itself).
    pub gamma_t: ComplexMatrix,
    /// ℓ×ℓ transport core ψ(T)†·Γ̂(T)·ψ(0) between the segment's own end
    /// frames; these multiply across adjacent segments.
    pub gamma_transport: ComplexMatrix,
    /// ℓ×ℓ transformation matrix U(T).
    pub u_t: ComplexMatrix,
}

/// Run a trajectory down to its cycle matrices.
pub fn segment_run(traj: &FrameTrajectory) -> Result<SegmentRun> {
    let (ops, dynamic) = operator_trajectory(traj, HolonomyMethod::ProjectorProduct)?;
    let psi0 = traj.frames[0].columns();
    let psi_t = traj.frames.last().unwrap().columns();
    let gamma_hat_t = ops.gamma_hat.last().unwrap();
    Ok(SegmentRun {
        initial_frame: traj.frames[0].clone(),
        final_frame: traj.frames.last().unwrap().clone(),
        d_t: dynamic.d_matrix.last().unwrap().clone(),
        gamma_t: psi0.adjoint().mul(gamma_hat_t).mul(psi0),
        gamma_transport: psi_t.adjoint().mul(gamma_hat_t).mul(psi0),
        u_t: transformation_matrix(traj, traj.grid.steps()),
    })
}

/// Composition of two adjacent segments.
#[derive(Debug, Clone)]
pub struct Composition {
    /// D†(T₁+T₂) = D†₂ · D†₁ from the group property of the
    /// reverse-ordered product.
    pub d_dagger_total: ComplexMatrix,
    /// ‖frame₂(0) − frame₁(T₁)‖_F.
    pub frame_mismatch: f64,
    /// Purely-holonomic verdict on the composed dynamics.
    pub verdict: HolonomicVerdict,
}

/// Compose two segment runs. The second segment must start on the first
/// segment's final frame (within 1e-7), so that the frame labels carry
/// through and the ℓ×ℓ dynamics matrices multiply directly.
pub fn compose_segments(
    seg1: &SegmentRun,
    seg2: &SegmentRun,
    verdict_tol: f64,
) -> Result<Composition> {
    let frame_mismatch = seg2.initial_frame.distance(&seg1.final_frame);
    if frame_mismatch > 1e-7 {
        return Err(HolonomyError::Precondition(format!(
            "segment 2 initial frame differs from segment 1 final frame by {frame_mismatch:.3e}"
        )));
    }
    let d_dagger_total = seg2.d_t.adjoint().mul(&seg1.d_t.adjoint());
    let verdict = purely_holonomic_check(&d_dagger_total.adjoint(), verdict_tol)?;
    Ok(Composition { d_dagger_total, frame_mismatch, verdict })
}

/// Phases of a cyclic ray evolution (ℓ = 1).
#[derive(Debug, Clone, Copy)]
pub struct AaPhase {
    /// arg⟨ψ(0)|ψ(T)⟩ in (−π, π].
    pub total: f64,
    /// −∫⟨ψ(t)|H(t)|ψ(t)⟩dt (unreduced).
    pub dynamic: f64,
    /// total − dynamic, reduced to (−π, π].
    pub geometric: f64,
    /// The same geometric phase read off the 1×1 holonomy matrix.
    pub geometric_from_holonomy: f64,
}

/// Total, dynamic, and geometric phase of a cyclic ℓ=1 trajectory.
pub fn aa_phase(traj: &FrameTrajectory, cyclic_tol: f64) -> Result<AaPhase> {
    if traj.rank() != 1 {
        return Err(HolonomyError::Precondition(format!(
            "phase split needs a one-dimensional frame, got rank {}",
            traj.rank()
        )));
    }
    if !check_cyclic(traj, cyclic_tol) {
        return Err(HolonomyError::Precondition(format!(
            "trajectory is not cyclic: defect {:.3e}",
            traj.cyclicity_defect
        )));
    }
    let overlap = transformation_matrix(traj, traj.grid.steps())[(0, 0)];
    let total = overlap.arg();

    // ⟨ψ|H|ψ⟩ samples at nodes, integrated by the trapezoid rule
    let h = traj.grid.h();
    let energies: Vec<f64> = traj
        .frames
        .iter()
        .zip(&traj.h_nodes)
        .map(|(f, hm)| f.columns().adjoint().mul(hm).mul(f.columns())[(0, 0)].re)
        .collect();
    let mut integral = 0.0;
    for w in energies.windows(2) {
        integral += 0.5 * (w[0] + w[1]) * h;
    }
    let dynamic = -integral;
    let geometric = reduce_phase(total - dynamic);

    let gamma = holonomy_operator(traj, HolonomyMethod::ProjectorProduct)?;
    let psi0 = traj.frames[0].columns();
    let gamma_11 = psi0.adjoint().mul(gamma.last().unwrap()).mul(psi0)[(0, 0)];
    Ok(AaPhase { total, dynamic, geometric, geometric_from_holonomy: gamma_11.arg() })
}

/// Adiabatic-reduction diagnostics for a sweep that starts on an eigenspace.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticDiagnostic {
    /// max_k max_ij |F_ij(t_k) + i·E(t_k)·δ_ij|.
    pub f_deviation: f64,
    /// ‖U(T) − e^{−i∫E dt}·Γ(T)‖_F.
    pub reduction_residual: f64,
    /// ∫₀ᵀ E(t) dt of the tracked level.
    pub energy_integral: f64,
}

/// Track the instantaneous eigenvalue of the followed level and report how
/// far the evolution is from the adiabatic form U(T) = e^{−i∫E}Γ(T).
/// Purely diagnostic: no pass/fail.
pub fn adiabatic_diagnostic(
    spec: &HamiltonianSpec,
    frame0: &Frame,
    grid: &TimeGrid,
) -> Result<AdiabaticDiagnostic> {
    let l = frame0.rank();
    // frame0 must span an eigenspace of H(0)
    let h0 = spec.eval(0.0)?;
    let block = frame0.columns().adjoint().mul(&h0).mul(frame0.columns());
    let invariance = h0
        .mul(frame0.columns())
        .distance(&frame0.columns().mul(&block));
    if invariance > 1e-8 {
        return Err(HolonomyError::Precondition(format!(
            "initial frame does not span an eigenspace of H(0): residual {invariance:.3e}"
        )));
    }
    let e_mean = block.trace().re / l as f64;
    let degeneracy = block.distance(&ComplexMatrix::identity(l).scale_re(e_mean));
    if degeneracy > 1e-8 {
        return Err(HolonomyError::Precondition(format!(
            "initial frame spans a non-degenerate block: spread {degeneracy:.3e}"
        )));
    }

    let traj = propagate_frame(spec, frame0, grid)?;

    // eigenvalue tracking by subspace overlap, guarded against crossings;
    // the walk interleaves nodes and step midpoints so consecutive
    // Hamiltonians stay close
    let mut tracked = frame0.columns().clone();
    let mut track_through = |hk: &ComplexMatrix| -> Result<f64> {
        let sd = spectral_decompose(hk)?;
        let d = hk.rows();
        let mut weights: Vec<(usize, f64)> = (0..d)
            .map(|mindex| {
                let v = sd.eigenvectors.columns().column(mindex);
                let mut w = 0.0;
                for j in 0..l {
                    let col = tracked.column(j);
                    let overlap: Complex64 =
                        v.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                    w += overlap.norm_sqr();
                }
                (mindex, w)
            })
            .collect();
        weights.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let selected: Vec<usize> = weights[..l].iter().map(|(i, _)| *i).collect();
        let rejected: Vec<usize> = weights[l..].iter().map(|(i, _)| *i).collect();
        for &s in &selected {
            for &r in &rejected {
                if (sd.eigenvalues[s] - sd.eigenvalues[r]).abs() < 1e-8 {
                    return Err(HolonomyError::Tracking(format!(
                        "levels {s} and {r} cross within 1e-8 (gap {:.3e})",
                        (sd.eigenvalues[s] - sd.eigenvalues[r]).abs()
                    )));
                }
            }
        }
        let e: f64 =
            selected.iter().map(|&i| sd.eigenvalues[i]).sum::<f64>() / l as f64;
        tracked = sd.eigenvectors.columns().select_columns(&selected);
        Ok(e)
    };
    let mut node_energies = Vec::with_capacity(grid.steps() + 1);
    let mut midpoint_energies = Vec::with_capacity(grid.steps());
    node_energies.push(track_through(&traj.h_nodes[0])?);
    for k in 0..grid.steps() {
        midpoint_energies.push(track_through(&traj.h_midpoints[k])?);
        node_energies.push(track_through(&traj.h_nodes[k + 1])?);
    }

    let f = f_samples(&traj);
    let mut f_deviation = 0.0f64;
    for (fk, &ek) in f.iter().zip(&node_energies) {
        let target = ComplexMatrix::identity(l).scale(c(0.0, -ek));
        f_deviation = f_deviation.max(fk.sub(&target).max_abs());
    }

    // midpoint quadrature pairs with the midpoint propagator: for an
    // exactly commuting sweep the accumulated phase matches to rounding
    let h = grid.h();
    let energy_integral: f64 = midpoint_energies.iter().map(|&e| e * h).sum();

    let u_t = transformation_matrix(&traj, grid.steps());
    let gamma_hat = holonomy_operator(&traj, HolonomyMethod::ProjectorProduct)?;
    let psi0 = traj.frames[0].columns();
    let gamma_t = psi0.adjoint().mul(gamma_hat.last().unwrap()).mul(psi0);
    let reduction_residual = u_t.distance(
        &gamma_t.scale(Complex64::from_polar(1.0, -energy_integral)),
    );
    Ok(AdiabaticDiagnostic { f_deviation, reduction_residual, energy_integral })
}

/// A purely holonomic two-level gate driven by H(t) = ω(t)·𝓗 on a
/// three-level system.
#[derive(Debug, Clone)]
pub struct GateDesign {
    /// Shifted spectrum (𝓔₀ = 0, 𝓔₁, 𝓔₂) in label order.
    pub energies: [f64; 3],
    /// Winding number N ≠ 0 of the cyclicity condition.
    pub winding: i64,
    /// Branch integer m of the dynamics condition.
    pub branch: i64,
    /// |a₁|² = m/N − 𝓔₁/(𝓔₂ − 𝓔₁), strictly inside (0, 1).
    pub amp_a1_sq: f64,
    pub phase_a1: f64,
    pub phase_a2: f64,
    /// Pulse area θ_T = 2πN/(𝓔₂ − 𝓔₁) = ∫₀ᵀ ω(t)dt.
    pub pulse_area: f64,
    /// Runnable scenario document (Hamiltonian terms + initial frame).
    pub scenario: Scenario,
    /// Predicted gate diag(1, e^{−i2πN𝓔₁/(𝓔₂−𝓔₁)}) on {ψ₁(0), ψ₂(0)}.
    pub predicted_u: ComplexMatrix,
    /// Set when the predicted gate is the identity: valid but trivial.
    pub trivial: bool,
}

/// |a₁|² from the winding and branch integers; the design is feasible iff
/// this lies strictly inside (0, 1).
pub fn gate_amplitude(e1: f64, e2: f64, winding: i64, branch: i64) -> f64 {
    branch as f64 / winding as f64 - e1 / (e2 - e1)
}

/// Design a purely holonomic gate from a 3×3 Hermitian generator.
///
/// `anchor` chooses which eigenvalue (index in ascending order) becomes the
/// zero level 𝓔₀ carrying ψ₁(0); the remaining two, ascending, become
/// (𝓔₁, 𝓔₂). The `profile` is scaled so its area over `duration` equals the
/// pulse area θ_T; the default choice is a constant profile on T = 1.
#[allow(clippy::too_many_arguments)]
pub fn design_one_parameter_gate(
    generator: &ComplexMatrix,
    anchor: usize,
    winding: i64,
    branch: i64,
    phase_a1: f64,
    phase_a2: f64,
    profile: &Coefficient,
    duration: f64,
    steps: usize,
) -> Result<GateDesign> {
    if generator.rows() != 3 || generator.cols() != 3 {
        return Err(HolonomyError::Validation(
            "gate designer needs a 3x3 Hermitian generator".into(),
        ));
    }
    if anchor > 2 {
        return Err(HolonomyError::Validation(format!(
            "anchor index {anchor} out of range 0..=2"
        )));
    }
    let sd = spectral_decompose(generator)?;
    for w in sd.eigenvalues.windows(2) {
        if (w[1] - w[0]).abs() <= 1e-8 {
            return Err(HolonomyError::Validation(format!(
                "generator eigenvalues {} and {} are not distinct",
                w[0], w[1]
            )));
        }
    }
    if winding == 0 {
        return Err(HolonomyError::Infeasible(
            "winding N = 0 would make the evolution or its holonomy trivial".into(),
        ));
    }

    let others: Vec<usize> = (0..3).filter(|&i| i != anchor).collect();
    let e0_raw = sd.eigenvalues[anchor];
    let e1 = sd.eigenvalues[others[0]] - e0_raw;
    let e2 = sd.eigenvalues[others[1]] - e0_raw;

    let amp = gate_amplitude(e1, e2, winding, branch);
    if !(amp > 0.0 && amp < 1.0) {
        return Err(HolonomyError::Infeasible(format!(
            "|a1|^2 = m/N − E1/(E2−E1) = {branch}/{winding} − {e1}/{} = {amp} \
             must lie strictly in (0, 1)",
            e2 - e1
        )));
    }
    let pulse_area = 2.0 * std::f64::consts::PI * winding as f64 / (e2 - e1);

    let a1 = Complex64::from_polar(amp.sqrt(), phase_a1);
    let a2 = Complex64::from_polar((1.0 - amp).sqrt(), phase_a2);
    let v0 = sd.eigenvectors.columns().column(anchor);
    let v1 = sd.eigenvectors.columns().column(others[0]);
    let v2 = sd.eigenvectors.columns().column(others[1]);
    // computational frame: ψ₁(0) = v₀, ψ₂(0) = a₂* v₁ − a₁* v₂;
    // the dark companion ψ₀(0) = a₁ v₁ + a₂ v₂ stays orthogonal throughout
    let mut frame_cols = ComplexMatrix::zeros(3, 2);
    for i in 0..3 {
        frame_cols[(i, 0)] = v0[i];
        frame_cols[(i, 1)] = a2.conj() * v1[i] - a1.conj() * v2[i];
    }
    let frame = Frame::new(frame_cols)?;

    let shifted = generator.sub(&ComplexMatrix::identity(3).scale_re(e0_raw));
    let area = profile.integral(duration);
    if area.abs() < 1e-12 {
        return Err(HolonomyError::Infeasible(
            "pulse profile has zero area and cannot be scaled to the target".into(),
        ));
    }
    let coefficient = profile.scaled(pulse_area / area);
    coefficient.validate(duration)?;
    let spec = HamiltonianSpec::new(
        3,
        duration,
        vec![HamiltonianTerm { coefficient, matrix: shifted.hermitian_part() }],
    )?;
    let scenario = scenario_from_parts(&spec, &frame, steps, Tolerances::default());

    let gate_phase =
        -2.0 * std::f64::consts::PI * winding as f64 * e1 / (e2 - e1);
    let predicted_u = ComplexMatrix::diag(&[
        c(1.0, 0.0),
        Complex64::from_polar(1.0, gate_phase),
    ]);
    let trivial = predicted_u.distance(&ComplexMatrix::identity(2)) < 1e-12;

    Ok(GateDesign {
        energies: [0.0, e1, e2],
        winding,
        branch,
        amp_a1_sq: amp,
        phase_a1,
        phase_a2,
        pulse_area,
        scenario,
        predicted_u,
        trivial,
    })
}

/// Full-pipeline verification of a gate design. Failures surface as report
/// fields, never as errors.
#[derive(Debug, Clone)]
pub struct GateVerification {
    pub report: crate::report::SeparationReport,
    /// ‖U(T) − e^{iφ}·predicted‖_F after fitting the global phase φ.
    pub gate_error: f64,
    pub gate_fit_phase: f64,
    /// gate_error ≤ 1e-5.
    pub gate_matches: bool,
    /// The purely-holonomic verdict held.
    pub holonomic_ok: bool,
}

/// Gate-match tolerance used by [`verify_gate_design`].
pub const GATE_MATCH_TOL: f64 = 1e-5;

/// Propagate a design's scenario and compare against its predicted gate.
pub fn verify_gate_design(design: &GateDesign, steps: Option<usize>) -> Result<GateVerification> {
    let validated = design.scenario.validate(steps)?;
    let run = crate::report::run_pipeline(&validated, crate::report::RunOptions::default())?;
    let u_t = &run.forms_u_t;
    let fit = design.predicted_u.adjoint().mul(u_t).trace();
    let gate_fit_phase = if fit.norm() > 1e-12 { fit.arg() } else { 0.0 };
    let gate_error = u_t.distance(
        &design.predicted_u.scale(Complex64::from_polar(1.0, gate_fit_phase)),
    );
    let gate_matches = gate_error <= GATE_MATCH_TOL;
    let holonomic_ok = run.report.verdict.is_purely_holonomic;
    Ok(GateVerification {
        report: run.report,
        gate_error,
        gate_fit_phase,
        gate_matches,
        holonomic_ok,
    })
}
