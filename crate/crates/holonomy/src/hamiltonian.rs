//! Declarative time-dependent Hamiltonians H(t) = Σ_k c_k(t)·H_k.
//!
//! Units are ħ = 1 throughout: times are dimensionless and energies carry
//! inverse time. Coefficient functions come from a fixed vocabulary so that
//! scenario files stay portable and reproducible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HolonomyError, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, Frame};

/// Scalar coefficient c(t) of one Hamiltonian term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Coefficient {
    Constant {
        value: f64,
    },
    Linear {
        offset: f64,
        slope: f64,
    },
    /// amplitude · sin(frequency·t + phase), frequency in rad/time.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// amplitude · (3u² − 2u³) with u = clamp((t − t_start)/(t_end − t_start)).
    SmoothstepRamp {
        amplitude: f64,
        t_start: f64,
        t_end: f64,
    },
    /// `values[i]` on `[breakpoints[i−1], breakpoints[i])`; breakpoints
    /// strictly increasing inside (0, T), one fewer than values.
    PiecewiseConstant {
        values: Vec<f64>,
        breakpoints: Vec<f64>,
    },
}

impl Coefficient {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Coefficient::Constant { value } => *value,
            Coefficient::Linear { offset, slope } => offset + slope * t,
            Coefficient::Sinusoid { amplitude, frequency, phase } => {
                amplitude * (frequency * t + phase).sin()
            }
            Coefficient::SmoothstepRamp { amplitude, t_start, t_end } => {
                let u = ((t - t_start) / (t_end - t_start)).clamp(0.0, 1.0);
                amplitude * u * u * (3.0 - 2.0 * u)
            }
            Coefficient::PiecewiseConstant { values, breakpoints } => {
                let mut idx = 0;
                for (i, &b) in breakpoints.iter().enumerate() {
                    if t >= b {
                        idx = i + 1;
                    }
                }
                values[idx]
            }
        }
    }

    /// Closed-form ∫₀ᵀ c(t) dt (the pulse area for one-parameter scenarios).
    pub fn integral(&self, duration: f64) -> f64 {
        match self {
            Coefficient::Constant { value } => value * duration,
            Coefficient::Linear { offset, slope } => {
                offset * duration + 0.5 * slope * duration * duration
            }
            Coefficient::Sinusoid { amplitude, frequency, phase } => {
                if frequency.abs() < 1e-300 {
                    amplitude * phase.sin() * duration
                } else {
                    amplitude / frequency
                        * (phase.cos() - (frequency * duration + phase).cos())
                }
            }
            Coefficient::SmoothstepRamp { amplitude, t_start, t_end } => {
                // ∫ 3u²−2u³ du over the ramp is (t_end−t_start)/2, then the
                // plateau contributes at full amplitude
                let ramp_span = (t_end.min(duration) - t_start).max(0.0);
                let plateau = (duration - t_end).max(0.0);
                // partial ramp: integrate u³ − u⁴/2 form analytically
                let u1 = (ramp_span / (t_end - t_start)).clamp(0.0, 1.0);
                let ramp_part =
                    (t_end - t_start) * (u1.powi(3) - 0.5 * u1.powi(4));
                amplitude * (ramp_part + plateau)
            }
            Coefficient::PiecewiseConstant { values, breakpoints } => {
                let mut total = 0.0;
                let mut left = 0.0;
                for (i, v) in values.iter().enumerate() {
                    let right = if i < breakpoints.len() { breakpoints[i] } else { duration };
                    let right = right.min(duration);
                    if right > left {
                        total += v * (right - left);
                    }
                    left = right;
                }
                total
            }
        }
    }

    /// Multiply the coefficient by a real factor.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Coefficient::Constant { value } => Coefficient::Constant { value: value * s },
            Coefficient::Linear { offset, slope } => {
                Coefficient::Linear { offset: offset * s, slope: slope * s }
            }
            Coefficient::Sinusoid { amplitude, frequency, phase } => Coefficient::Sinusoid {
                amplitude: amplitude * s,
                frequency: *frequency,
                phase: *phase,
            },
            Coefficient::SmoothstepRamp { amplitude, t_start, t_end } => {
                Coefficient::SmoothstepRamp {
                    amplitude: amplitude * s,
                    t_start: *t_start,
                    t_end: *t_end,
                }
            }
            Coefficient::PiecewiseConstant { values, breakpoints } => {
                Coefficient::PiecewiseConstant {
                    values: values.iter().map(|v| v * s).collect(),
                    breakpoints: breakpoints.clone(),
                }
            }
        }
    }

    /// Validate structural invariants against the scenario duration.
    pub fn validate(&self, duration: f64) -> Result<()> {
        if let Coefficient::PiecewiseConstant { values, breakpoints } = self {
            if values.is_empty() {
                return Err(HolonomyError::Validation(
                    "piecewise-constant coefficient needs at least one value".into(),
                ));
            }
            if breakpoints.len() + 1 != values.len() {
                return Err(HolonomyError::Validation(format!(
                    "piecewise-constant has {} values but {} breakpoints",
                    values.len(),
                    breakpoints.len()
                )));
            }
            let mut prev = 0.0;
            for &b in breakpoints {
                if b <= prev || b >= duration {
                    return Err(HolonomyError::Validation(format!(
                        "breakpoint {b} not strictly increasing inside (0, {duration})"
                    )));
                }
                prev = b;
            }
        }
        if let Coefficient::SmoothstepRamp { t_start, t_end, .. } = self {
            if t_end <= t_start {
                return Err(HolonomyError::Validation(
                    "smoothstep-ramp needs t_end > t_start".into(),
                ));
            }
        }
        let probes = 17;
        for i in 0..=probes {
            let t = duration * i as f64 / probes as f64;
            if !self.eval(t).is_finite() {
                return Err(HolonomyError::Validation(format!(
                    "coefficient evaluates non-finite at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// One coefficient-times-constant-matrix term of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct HamiltonianTerm {
    pub coefficient: Coefficient,
    pub matrix: ComplexMatrix,
}

/// H(t) = Σ_k c_k(t) · H_k over a fixed time window [0, T].
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    dim: usize,
    duration: f64,
    terms: Vec<HamiltonianTerm>,
}

impl HamiltonianSpec {
    pub fn new(dim: usize, duration: f64, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(HolonomyError::Validation("dimension must be positive".into()));
        }
        if duration <= 0.0 || !duration.is_finite() {
            return Err(HolonomyError::Validation(format!(
                "duration must be positive and finite, got {duration}"
            )));
        }
        if terms.is_empty() {
            return Err(HolonomyError::Validation(
                "Hamiltonian needs at least one term".into(),
            ));
        }
        for (k, term) in terms.iter().enumerate() {
            if term.matrix.rows() != dim || term.matrix.cols() != dim {
                return Err(HolonomyError::Validation(format!(
                    "term {k} matrix is {}x{}, expected {dim}x{dim}",
                    term.matrix.rows(),
                    term.matrix.cols()
                )));
            }
            let defect = term.matrix.hermiticity_defect();
            if defect > 1e-12 {
                return Err(HolonomyError::Validation(format!(
                    "term {k} matrix is not Hermitian: defect {defect:.3e}"
                )));
            }
            term.coefficient.validate(duration)?;
        }
        Ok(Self { dim, duration, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Evaluate H(t). Errors when t is outside [0, T].
    pub fn eval(&self, t: f64) -> Result<ComplexMatrix> {
        if !(0.0..=self.duration * (1.0 + 1e-12)).contains(&t) {
            return Err(HolonomyError::Domain(format!(
                "t = {t} outside scenario window [0, {}]",
                self.duration
            )));
        }
        let mut h = ComplexMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            let ck = term.coefficient.eval(t);
            h = h.add(&term.matrix.scale_re(ck));
        }
        Ok(h.hermitian_part())
    }

    /// The time-reversed partner: H'(t) = −H(T − t) on the same window.
    /// Propagating the original then the partner composes to the identity.
    pub fn time_reversed(&self) -> Self {
        let duration = self.duration;
        let mut terms = Vec::new();
        for term in &self.terms {
            match &term.coefficient {
                Coefficient::Constant { value } => terms.push(HamiltonianTerm {
                    coefficient: Coefficient::Constant { value: -value },
                    matrix: term.matrix.clone(),
                }),
                Coefficient::Linear { offset, slope } => terms.push(HamiltonianTerm {
                    coefficient: Coefficient::Linear {
                        offset: -(offset + slope * duration),
                        slope: *slope,
                    },
                    matrix: term.matrix.clone(),
                }),
                Coefficient::Sinusoid { amplitude, frequency, phase } => {
                    // −A sin(ω(T−t)+φ) = A sin(ωt − ωT − φ)
                    terms.push(HamiltonianTerm {
                        coefficient: Coefficient::Sinusoid {
                            amplitude: *amplitude,
                            frequency: *frequency,
                            phase: -(frequency * duration + phase),
                        },
                        matrix: term.matrix.clone(),
                    });
                }
                Coefficient::SmoothstepRamp { amplitude, t_start, t_end } => {
                    // smoothstep reflected in time is 1 − smoothstep on the
                    // mirrored window: emit a constant plus a negated ramp
                    terms.push(HamiltonianTerm {
                        coefficient: Coefficient::Constant { value: -amplitude },
                        matrix: term.matrix.clone(),
                    });
                    terms.push(HamiltonianTerm {
                        coefficient: Coefficient::SmoothstepRamp {
                            amplitude: *amplitude,
                            t_start: duration - t_end,
                            t_end: duration - t_start,
                        },
                        matrix: term.matrix.clone(),
                    });
                }
                Coefficient::PiecewiseConstant { values, breakpoints } => {
                    let values = values.iter().rev().map(|v| -v).collect();
                    let breakpoints =
                        breakpoints.iter().rev().map(|b| duration - b).collect();
                    terms.push(HamiltonianTerm {
                        coefficient: Coefficient::PiecewiseConstant { values, breakpoints },
                        matrix: term.matrix.clone(),
                    });
                }
            }
        }
        Self { dim: self.dim, duration, terms }
    }
}

/// Eigenvalues (ascending) and eigenvector frame of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Frame,
}

/// Diagonalize a Hermitian matrix with the crate-wide sort and phase
/// conventions.
pub fn spectral_decompose(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let eig = eig_hermitian(h, 1e-10)?;
    Ok(SpectralDecomposition {
        eigenvalues: eig.eigenvalues,
        eigenvectors: Frame::new(eig.eigenvectors)?,
    })
}

impl SpectralDecomposition {
    /// Σ_k E_k |v_k⟩⟨v_k|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.eigenvectors.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.columns().column(k);
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += Complex64::new(e, 0.0) * v[i] * v[j].conj();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_spec(values: &[f64], duration: f64, coeff: Coefficient) -> HamiltonianSpec {
        let d: Vec<Complex64> = values.iter().map(|&v| c(v, 0.0)).collect();
        HamiltonianSpec::new(
            values.len(),
            duration,
            vec![HamiltonianTerm { coefficient: coeff, matrix: ComplexMatrix::diag(&d) }],
        )
        .unwrap()
    }

    #[test]
    fn constant_term_evaluates_to_matrix() {
        let spec = diag_spec(&[0.0, 1.0, 3.0], 2.0, Coefficient::Constant { value: 1.0 });
        let h = spec.eval(1.3).unwrap();
        assert!((h[(2, 2)] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sinusoid_at_quarter_period() {
        let spec = diag_spec(
            &[0.0, 1.0, 3.0],
            PI,
            Coefficient::Sinusoid { amplitude: 1.0, frequency: 1.0, phase: 0.0 },
        );
        let h = spec.eval(PI / 2.0).unwrap();
        assert!(h.distance(&ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)])) < 1e-12);
    }

    #[test]
    fn two_term_sum_matches_hand_sum() {
        let m1 = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(-1.0, 0.0)],
        ])
        .unwrap();
        let m2 = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let spec = HamiltonianSpec::new(
            2,
            1.0,
            vec![
                HamiltonianTerm {
                    coefficient: Coefficient::Linear { offset: 0.2, slope: 1.5 },
                    matrix: m1.clone(),
                },
                HamiltonianTerm {
                    coefficient: Coefficient::Sinusoid {
                        amplitude: 0.7,
                        frequency: 3.0,
                        phase: 0.4,
                    },
                    matrix: m2.clone(),
                },
            ],
        )
        .unwrap();
        for i in 0..5 {
            let t = i as f64 / 4.0;
            let want = m1
                .scale_re(0.2 + 1.5 * t)
                .add(&m2.scale_re(0.7 * (3.0 * t + 0.4).sin()));
            assert!(spec.eval(t).unwrap().distance(&want) < 1e-14);
        }
    }

    #[test]
    fn eval_linear_in_terms() {
        let m1 = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let m2 = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.3, 0.1)],
            vec![c(0.3, -0.1), c(0.0, 0.0)],
        ])
        .unwrap();
        let t1 = HamiltonianTerm {
            coefficient: Coefficient::Constant { value: 0.9 },
            matrix: m1,
        };
        let t2 = HamiltonianTerm {
            coefficient: Coefficient::Sinusoid { amplitude: 1.1, frequency: 2.0, phase: 0.0 },
            matrix: m2,
        };
        let both = HamiltonianSpec::new(2, 1.0, vec![t1.clone(), t2.clone()]).unwrap();
        let only1 = HamiltonianSpec::new(2, 1.0, vec![t1]).unwrap();
        let only2 = HamiltonianSpec::new(2, 1.0, vec![t2]).unwrap();
        let t = 0.63;
        let sum = only1.eval(t).unwrap().add(&only2.eval(t).unwrap());
        assert!(both.eval(t).unwrap().distance(&sum) < 1e-15);
    }

    #[test]
    fn domain_error_outside_window() {
        let spec = diag_spec(&[1.0], 1.0, Coefficient::Constant { value: 1.0 });
        assert!(spec.eval(1.5).is_err());
        assert!(spec.eval(-0.1).is_err());
    }

    #[test]
    fn rejects_non_hermitian_term() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let r = HamiltonianSpec::new(
            2,
            1.0,
            vec![HamiltonianTerm { coefficient: Coefficient::Constant { value: 1.0 }, matrix: m }],
        );
        assert!(r.is_err());
    }

    #[test]
    fn piecewise_validation() {
        let bad = Coefficient::PiecewiseConstant {
            values: vec![1.0, 2.0],
            breakpoints: vec![1.5],
        };
        assert!(bad.validate(1.0).is_err());
        let good = Coefficient::PiecewiseConstant {
            values: vec![1.0, 2.0],
            breakpoints: vec![0.5],
        };
        assert!(good.validate(1.0).is_ok());
        assert!((good.eval(0.25) - 1.0).abs() < 1e-15);
        assert!((good.eval(0.75) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_decompose_diagonal() {
        let h = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let sd = spectral_decompose(&h).unwrap();
        assert_eq!(sd.eigenvalues, vec![0.0, 1.0, 3.0]);
        assert!(sd.reconstruct().distance(&h) < 1e-12);
    }

    #[test]
    fn spectral_decompose_random_reconstruction() {
        let mut state = 123456789u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = c(next(), next());
            }
        }
        let m = m.hermitian_part();
        let sd = spectral_decompose(&m).unwrap();
        assert!(sd.reconstruct().distance(&m) < 1e-10);
        assert!(sd.eigenvectors.columns().unitarity_defect() < 1e-10);
    }

    #[test]
    fn shift_moves_spectrum_keeps_vectors() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.4, 0.2)],
            vec![c(0.4, -0.2), c(-0.7, 0.0)],
        ])
        .unwrap();
        let sd = spectral_decompose(&m).unwrap();
        let e0 = sd.eigenvalues[0];
        let shifted = m.sub(&ComplexMatrix::identity(2).scale_re(e0));
        let sd2 = spectral_decompose(&shifted).unwrap();
        for k in 0..2 {
            assert!((sd2.eigenvalues[k] - (sd.eigenvalues[k] - e0)).abs() < 1e-12);
        }
        assert!(sd.eigenvectors.columns().distance(sd2.eigenvectors.columns()) < 1e-10);
    }

    #[test]
    fn time_reversed_coefficients_mirror() {
        let spec = HamiltonianSpec::new(
            2,
            1.0,
            vec![
                HamiltonianTerm {
                    coefficient: Coefficient::Linear { offset: 0.3, slope: 0.9 },
                    matrix: ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]),
                },
                HamiltonianTerm {
                    coefficient: Coefficient::Sinusoid {
                        amplitude: 0.5,
                        frequency: 2.0,
                        phase: 0.1,
                    },
                    matrix: ComplexMatrix::from_rows(&[
                        vec![c(0.0, 0.0), c(1.0, 0.0)],
                        vec![c(1.0, 0.0), c(0.0, 0.0)],
                    ])
                    .unwrap(),
                },
                HamiltonianTerm {
                    coefficient: Coefficient::SmoothstepRamp {
                        amplitude: 0.8,
                        t_start: 0.2,
                        t_end: 0.7,
                    },
                    matrix: ComplexMatrix::diag(&[c(0.5, 0.0), c(0.0, 0.0)]),
                },
            ],
        )
        .unwrap();
        let rev = spec.time_reversed();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let want = spec.eval(1.0 - t).unwrap().scale_re(-1.0);
            assert!(rev.eval(t).unwrap().distance(&want) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn coefficient_integrals_match_quadrature() {
        let coeffs = vec![
            Coefficient::Constant { value: 1.7 },
            Coefficient::Linear { offset: -0.3, slope: 1.1 },
            Coefficient::Sinusoid { amplitude: 0.9, frequency: 2.3, phase: 0.5 },
            Coefficient::SmoothstepRamp { amplitude: 1.2, t_start: 0.3, t_end: 1.1 },
            Coefficient::PiecewiseConstant {
                values: vec![0.5, -1.0, 2.0],
                breakpoints: vec![0.4, 1.3],
            },
        ];
        let duration = 2.0;
        let n = 200_000;
        let h = duration / n as f64;
        for coeff in coeffs {
            let mut quad = 0.0;
            for k in 0..n {
                quad += coeff.eval((k as f64 + 0.5) * h) * h;
            }
            let exact = coeff.integral(duration);
            assert!(
                (quad - exact).abs() < 1e-6,
                "{coeff:?}: quad {quad} vs exact {exact}"
            );
        }
    }
}
