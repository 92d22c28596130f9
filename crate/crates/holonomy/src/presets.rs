//! Ready-made scenarios: the standard suite used by the examples, the test
//! batteries, and the acceptance run.

use num_complex::Complex64;

use crate::analysis::{design_one_parameter_gate, GateDesign};
use crate::error::Result;
use crate::hamiltonian::{spectral_decompose, Coefficient, HamiltonianSpec, HamiltonianTerm};
use crate::linalg::{ComplexMatrix, Frame};
use crate::scenario::{scenario_from_parts, Scenario, Tolerances};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// d = 3 stationary eigenbasis: constant diag(0, 1, 2), frame (e₁, e₂),
/// period 2π. The subspace never moves.
pub fn stationary_three_level(steps: usize) -> Scenario {
    let spec = HamiltonianSpec::new(
        3,
        TWO_PI,
        vec![HamiltonianTerm {
            coefficient: Coefficient::Constant { value: 1.0 },
            matrix: ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]),
        }],
    )
    .expect("static spec");
    let frame = Frame::new(ComplexMatrix::identity(3).select_columns(&[0, 1])).unwrap();
    scenario_from_parts(&spec, &frame, steps, Tolerances::default())
}

/// Spin-½ ray at polar angle θ precessing under H = (ω/2)σ_z for one full
/// period T = 2π/ω. Cyclic, with geometric phase −π(1−cosθ).
pub fn precession(theta: f64, omega: f64, steps: usize) -> Scenario {
    let spec = HamiltonianSpec::new(
        2,
        TWO_PI / omega,
        vec![HamiltonianTerm {
            coefficient: Coefficient::Constant { value: 1.0 },
            matrix: ComplexMatrix::diag(&[c(omega / 2.0, 0.0), c(-omega / 2.0, 0.0)]),
        }],
    )
    .expect("static spec");
    let frame = Frame::new(
        ComplexMatrix::from_rows(&[
            vec![c((theta / 2.0).cos(), 0.0)],
            vec![c((theta / 2.0).sin(), 0.0)],
        ])
        .unwrap(),
    )
    .unwrap();
    scenario_from_parts(&spec, &frame, steps, Tolerances::default())
}

/// The same precession loop traversed at a linearly growing rate
/// (s(t) = T(t/T)²): identical path of P(t), different evolution details.
pub fn precession_ramped(theta: f64, omega: f64, steps: usize) -> Scenario {
    let duration = TWO_PI / omega;
    let spec = HamiltonianSpec::new(
        2,
        duration,
        vec![HamiltonianTerm {
            coefficient: Coefficient::Linear { offset: 0.0, slope: 2.0 / duration },
            matrix: ComplexMatrix::diag(&[c(omega / 2.0, 0.0), c(-omega / 2.0, 0.0)]),
        }],
    )
    .expect("static spec");
    let frame = Frame::new(
        ComplexMatrix::from_rows(&[
            vec![c((theta / 2.0).cos(), 0.0)],
            vec![c((theta / 2.0).sin(), 0.0)],
        ])
        .unwrap(),
    )
    .unwrap();
    scenario_from_parts(&spec, &frame, steps, Tolerances::default())
}

/// The purely holonomic two-level gate on a three-level system with
/// spectrum (0, 1, 3), winding N = 1, branch m = 1 and a constant pulse.
/// Predicted gate: diag(1, −1).
pub fn supplement_gate(steps: usize) -> GateDesign {
    design_one_parameter_gate(
        &ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]),
        0,
        1,
        1,
        0.0,
        0.0,
        &Coefficient::Constant { value: 1.0 },
        1.0,
        steps,
    )
    .expect("the (0,1,3), N=1, m=1 design is feasible")
}

/// The same gate driven by an equal-area half-sine pulse instead of the
/// constant one. Only the pulse area enters the gate.
pub fn supplement_gate_sinusoid(steps: usize) -> GateDesign {
    design_one_parameter_gate(
        &ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]),
        0,
        1,
        1,
        0.0,
        0.0,
        &Coefficient::Sinusoid { amplitude: 1.0, frequency: std::f64::consts::PI, phase: 0.0 },
        1.0,
        steps,
    )
    .expect("profile change keeps the design feasible")
}

/// The supplement gate with its pulse area detuned by 1%: the cyclicity
/// breaks and the dynamics no longer cancels. The cyclicity tolerance is
/// widened so the pipeline still reaches the (failing) verdict.
pub fn supplement_gate_detuned(steps: usize) -> Scenario {
    let design = supplement_gate(steps);
    let mut scenario = design.scenario;
    for term in &mut scenario.terms {
        term.coefficient = term.coefficient.scaled(1.01);
    }
    scenario.tolerances.cyclicity = 0.2;
    scenario
}

/// One-parameter segment H(t) = (area/T)·M on [0, T] from an explicit
/// frame; building block for loop-composition scenarios.
pub fn one_parameter_segment(
    matrix: ComplexMatrix,
    frame: &Frame,
    pulse_area: f64,
    duration: f64,
    steps: usize,
) -> Result<Scenario> {
    let spec = HamiltonianSpec::new(
        matrix.rows(),
        duration,
        vec![HamiltonianTerm {
            coefficient: Coefficient::Constant { value: pulse_area / duration },
            matrix,
        }],
    )?;
    Ok(scenario_from_parts(&spec, frame, steps, Tolerances::default()))
}

/// Generic smooth cyclic 3-level scenario with ℓ = 2 and genuinely
/// non-commuting dynamics.
///
/// Built in a rotating frame: H(t) = R(t)·H₀·R(t)† with R = e^{−i·diag(0,1,2)t}
/// expands into constant and sinusoid terms, while the frame follows
/// χ̇ = −i·H_eff·χ with the constant H_eff = H₀ − diag(0,1,2). Starting on
/// two eigenvectors of H_eff makes the subspace exactly cyclic at T = 2π
/// per period. H_eff is assembled from an explicit spectrum whose tracked
/// pair sits 0.3 apart (closer than π/T), which keeps the cycle genuinely
/// non-Abelian: U(T) has distinct eigenphases and the dynamics matrix does
/// not commute with the holonomy.
pub fn rotating_three_level(periods: usize, steps: usize) -> Scenario {
    let mixer = ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(0.30, 0.15), c(-0.22, 0.08)],
        vec![c(-0.30, 0.15), c(0.0, 0.0), c(0.19, -0.11)],
        vec![c(0.22, 0.08), c(-0.19, -0.11), c(0.0, 0.0)],
    ])
    .unwrap();
    let q = crate::linalg::expm_antihermitian(&mixer.anti_hermitian_part())
        .expect("static mixer is anti-Hermitian");
    let h_eff = q
        .mul(&ComplexMatrix::diag(&[c(-0.1, 0.0), c(0.1, 0.0), c(0.6, 0.0)]))
        .mul(&q.adjoint())
        .hermitian_part();
    let h0 = h_eff.add(&ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]));
    let duration = TWO_PI * periods as f64;

    let mut terms = Vec::new();
    // diagonal of H₀ is rotation-invariant
    let mut diag = ComplexMatrix::zeros(3, 3);
    for j in 0..3 {
        diag[(j, j)] = h0[(j, j)];
    }
    terms.push(HamiltonianTerm { coefficient: Coefficient::Constant { value: 1.0 }, matrix: diag });
    // each off-diagonal pair rotates at frequency k − j
    for j in 0..3usize {
        for k in (j + 1)..3 {
            let z = h0[(j, k)];
            let omega = (k - j) as f64;
            let mut x = ComplexMatrix::zeros(3, 3);
            x[(j, k)] = c(1.0, 0.0);
            x[(k, j)] = c(1.0, 0.0);
            let mut y = ComplexMatrix::zeros(3, 3);
            y[(j, k)] = c(0.0, 1.0);
            y[(k, j)] = c(0.0, -1.0);
            terms.push(HamiltonianTerm {
                coefficient: Coefficient::Sinusoid {
                    amplitude: z.norm(),
                    frequency: omega,
                    phase: z.arg() + std::f64::consts::FRAC_PI_2,
                },
                matrix: x,
            });
            terms.push(HamiltonianTerm {
                coefficient: Coefficient::Sinusoid {
                    amplitude: z.norm(),
                    frequency: omega,
                    phase: z.arg(),
                },
                matrix: y,
            });
        }
    }
    let spec = HamiltonianSpec::new(3, duration, terms).expect("static spec");

    let eig = spectral_decompose(&h_eff).expect("effective Hamiltonian is Hermitian");
    let frame = Frame::new(eig.eigenvectors.columns().select_columns(&[0, 1])).unwrap();
    scenario_from_parts(&spec, &frame, steps, Tolerances::default())
}

/// Generic non-cyclic scenario: two incommensurate terms, ℓ = 2 in d = 3.
pub fn noncyclic_random(steps: usize) -> Scenario {
    let m1 = ComplexMatrix::from_rows(&[
        vec![c(0.40, 0.0), c(0.25, 0.15), c(0.00, -0.30)],
        vec![c(0.25, -0.15), c(-0.20, 0.0), c(0.35, 0.00)],
        vec![c(0.00, 0.30), c(0.35, 0.00), c(0.10, 0.0)],
    ])
    .unwrap();
    let m2 = ComplexMatrix::from_rows(&[
        vec![c(-0.10, 0.0), c(0.00, 0.20), c(0.15, 0.05)],
        vec![c(0.00, -0.20), c(0.30, 0.0), c(-0.10, 0.10)],
        vec![c(0.15, -0.05), c(-0.10, -0.10), c(-0.25, 0.0)],
    ])
    .unwrap();
    let spec = HamiltonianSpec::new(
        3,
        2.0,
        vec![
            HamiltonianTerm { coefficient: Coefficient::Constant { value: 1.0 }, matrix: m1 },
            HamiltonianTerm {
                coefficient: Coefficient::Sinusoid {
                    amplitude: 0.8,
                    frequency: 1.3,
                    phase: 0.4,
                },
                matrix: m2,
            },
        ],
    )
    .expect("static spec");
    let raw = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.2), c(1.0, 0.0)],
        vec![c(0.1, 0.0), c(-0.3, 0.1)],
    ])
    .unwrap();
    let frame = Frame::orthonormalize(&raw).unwrap();
    scenario_from_parts(&spec, &frame, steps, Tolerances::default())
}

/// Two-level avoided-crossing sweep ε(t)σ_z + g·σ_x with
/// ε(t) = cos(2πt/τ): the field returns to its start, the gap never closes
/// below 2g, and slower sweeps track the ground level better.
pub fn avoided_crossing(tau: f64, coupling: f64, steps: usize) -> Scenario {
    let sigma_z = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
    let sigma_x = ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ])
    .unwrap();
    let spec = HamiltonianSpec::new(
        2,
        tau,
        vec![
            HamiltonianTerm {
                coefficient: Coefficient::Sinusoid {
                    amplitude: 1.0,
                    frequency: TWO_PI / tau,
                    phase: std::f64::consts::FRAC_PI_2,
                },
                matrix: sigma_z.clone(),
            },
            HamiltonianTerm {
                coefficient: Coefficient::Constant { value: coupling },
                matrix: sigma_x.clone(),
            },
        ],
    )
    .expect("static spec");
    let h0 = sigma_z.add(&sigma_x.scale_re(coupling));
    let eig = spectral_decompose(&h0).expect("sweep Hamiltonian is Hermitian");
    let frame = Frame::new(eig.eigenvectors.columns().select_columns(&[0])).unwrap();
    scenario_from_parts(&spec, &frame, steps, Tolerances::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::propagate_frame;

    #[test]
    fn suite_scenarios_validate() {
        let scenarios = [
            stationary_three_level(256),
            precession(1.0, 1.0, 256),
            precession_ramped(1.0, 1.0, 256),
            supplement_gate(256).scenario,
            rotating_three_level(1, 256),
            noncyclic_random(256),
            avoided_crossing(10.0, 0.35, 256),
        ];
        for s in scenarios {
            s.validate(None).unwrap();
        }
    }

    #[test]
    fn rotating_three_level_is_cyclic() {
        let v = rotating_three_level(1, 4096).scenario_checked();
        let traj = propagate_frame(&v.spec, &v.initial_frame, &v.grid).unwrap();
        assert!(traj.cyclicity_defect < 1e-6, "defect {}", traj.cyclicity_defect);
    }

    #[test]
    fn noncyclic_random_is_noncyclic() {
        let v = noncyclic_random(1024).scenario_checked();
        let traj = propagate_frame(&v.spec, &v.initial_frame, &v.grid).unwrap();
        assert!(traj.cyclicity_defect > 0.1, "defect {}", traj.cyclicity_defect);
    }

    #[test]
    fn detuned_gate_breaks_cyclicity() {
        let v = supplement_gate_detuned(2048).scenario_checked();
        let traj = propagate_frame(&v.spec, &v.initial_frame, &v.grid).unwrap();
        assert!(traj.cyclicity_defect > 1e-3);
        assert!(traj.cyclicity_defect < 0.2);
    }

    impl Scenario {
        fn scenario_checked(self) -> crate::scenario::ValidatedScenario {
            self.validate(None).unwrap()
        }
    }
}
