//! Scenario documents: the on-disk description of a simulation run.
//!
//! A scenario is a JSON object
//!
//! ```text
//! { "dim": 3, "duration": 1.0, "steps": 4096,
//!   "terms": [ { "coefficient": {"kind": "constant", "value": 3.14},
//!                "matrix": {"re": [[..],[..],[..]], "im": [[..],[..],[..]]} } ],
//!   "initial_frame": {"re": [[..],[..],[..]], "im": [[..],[..],[..]]},
//!   "tolerances": { "cyclicity": 1e-6 } }
//! ```
//!
//! Matrices carry full real and imaginary parts, row-major; `initial_frame`
//! is d×ℓ with columns |ψ_i(0)⟩. Parsing is hand-walked over the JSON value
//! so that every error names the path to the offending field, and
//! serialization uses shortest round-trip floats, so parse ∘ serialize is
//! the identity field for field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HolonomyError, Result};
use crate::hamiltonian::{Coefficient, HamiltonianSpec, HamiltonianTerm};
use crate::linalg::{ComplexMatrix, Frame};
use crate::propagation::{TimeGrid, DEFAULT_CYCLIC_TOL, DEFAULT_STEPS};

/// Initial frames farther than this from orthonormal are rejected; below
/// it they are silently re-orthonormalized (the adjustment is reported).
pub const FRAME_ADJUST_LIMIT: f64 = 1e-6;

/// Pass thresholds used by reports and the CLI; scenario files may
/// override any field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Cyclicity gate on ‖P(T) − P(0)‖_F.
    pub cyclicity: f64,
    /// Pass threshold for separation / matrix-form residuals.
    pub residual_pass: f64,
    /// Pass threshold for the purely-holonomic verdict residual.
    pub holonomic: f64,
    /// Pass threshold for the parallel-transport residual.
    pub parallel_transport: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cyclicity: DEFAULT_CYCLIC_TOL,
            residual_pass: 1e-6,
            holonomic: 1e-4,
            parallel_transport: 1e-4,
        }
    }
}

/// Matrix payload as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixData {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut re = Vec::with_capacity(m.rows());
        let mut im = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let mut rr = Vec::with_capacity(m.cols());
            let mut ri = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                rr.push(m[(i, j)].re);
                ri.push(m[(i, j)].im);
            }
            re.push(rr);
            im.push(ri);
        }
        Self { re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        if rows == 0 || self.im.len() != rows {
            return Err(HolonomyError::Validation(
                "matrix re/im row counts differ or are empty".into(),
            ));
        }
        let cols = self.re[0].len();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            if self.re[i].len() != cols || self.im[i].len() != cols {
                return Err(HolonomyError::Validation(format!(
                    "matrix row {i} is ragged; matrices must be given in full"
                )));
            }
            for j in 0..cols {
                entries.push(Complex64::new(self.re[i][j], self.im[i][j]));
            }
        }
        ComplexMatrix::from_vec(rows, cols, entries)
    }
}

/// One serialized Hamiltonian term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermData {
    pub coefficient: Coefficient,
    pub matrix: MatrixData,
}

/// The full scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub dim: usize,
    pub duration: f64,
    pub steps: usize,
    pub terms: Vec<TermData>,
    pub initial_frame: MatrixData,
    pub tolerances: Tolerances,
}

/// A parsed and validated scenario, ready to propagate.
#[derive(Debug, Clone)]
pub struct ValidatedScenario {
    pub scenario: Scenario,
    pub spec: HamiltonianSpec,
    pub initial_frame: Frame,
    pub grid: TimeGrid,
    pub tolerances: Tolerances,
    /// ‖frame_input − frame_orthonormalized‖_F applied during validation.
    pub frame_adjustment: f64,
}

impl Scenario {
    /// Canonical serialization: compact JSON with struct field order.
    /// Whitespace in the source document never reaches this form.
    pub fn canonical_string(&self) -> String {
        serde_json::to_string(self).expect("scenario serialization cannot fail")
    }

    /// Pretty serialization for files.
    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialization");
        s.push('\n');
        s
    }

    /// FNV-1a hash of the canonical form: changes iff a semantically
    /// relevant field changes.
    pub fn digest(&self) -> String {
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in self.canonical_string().bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{hash:016x}")
    }

    /// Semantic validation; `steps_override` wins over the document value.
    pub fn validate(&self, steps_override: Option<usize>) -> Result<ValidatedScenario> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, term) in self.terms.iter().enumerate() {
            let matrix = term.matrix.to_matrix().map_err(|e| HolonomyError::Parse {
                path: format!("terms[{k}].matrix"),
                message: e.to_string(),
            })?;
            if matrix.rows() != self.dim || matrix.cols() != self.dim {
                return Err(HolonomyError::Parse {
                    path: format!("terms[{k}].matrix"),
                    message: format!(
                        "expected full {0}x{0} matrix, got {1}x{2}",
                        self.dim,
                        matrix.rows(),
                        matrix.cols()
                    ),
                });
            }
            let defect = matrix.hermiticity_defect();
            if defect > 1e-12 {
                return Err(HolonomyError::Parse {
                    path: format!("terms[{k}].matrix"),
                    message: format!("term {k} is not Hermitian: defect {defect:.3e}"),
                });
            }
            terms.push(HamiltonianTerm { coefficient: term.coefficient.clone(), matrix });
        }
        let spec = HamiltonianSpec::new(self.dim, self.duration, terms)?;

        let raw_frame = self.initial_frame.to_matrix().map_err(|e| HolonomyError::Parse {
            path: "initial_frame".into(),
            message: e.to_string(),
        })?;
        if raw_frame.rows() != self.dim {
            return Err(HolonomyError::Parse {
                path: "initial_frame".into(),
                message: format!(
                    "frame has {} rows, expected dimension {}",
                    raw_frame.rows(),
                    self.dim
                ),
            });
        }
        let defect = raw_frame.unitarity_defect();
        if defect > FRAME_ADJUST_LIMIT {
            return Err(HolonomyError::Parse {
                path: "initial_frame".into(),
                message: format!(
                    "columns are not orthonormal (defect {defect:.3e} > {FRAME_ADJUST_LIMIT:.0e})"
                ),
            });
        }
        let frame = Frame::orthonormalize(&raw_frame)?;
        let frame_adjustment = frame.columns().distance(&raw_frame);

        let steps = steps_override.unwrap_or(self.steps);
        let grid = TimeGrid::new(self.duration, steps)?;
        Ok(ValidatedScenario {
            scenario: Scenario { steps, ..self.clone() },
            spec,
            initial_frame: frame,
            grid,
            tolerances: self.tolerances,
            frame_adjustment,
        })
    }
}

/// Parse a scenario document, giving every error a path to the offending
/// field. `default_steps` replaces the schema default of 4096 when the
/// document omits `steps` (the CLI feeds HOLONOMY_DEFAULT_STEPS through
/// here).
pub fn parse_scenario(text: &str, default_steps: Option<usize>) -> Result<ValidatedScenario> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| HolonomyError::Parse {
            path: "<document>".into(),
            message: e.to_string(),
        })?;
    let obj = value.as_object().ok_or_else(|| HolonomyError::Parse {
        path: "<document>".into(),
        message: "scenario must be a JSON object".into(),
    })?;

    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "dim" | "duration" | "steps" | "terms" | "initial_frame" | "tolerances"
        ) {
            return Err(HolonomyError::Parse {
                path: key.clone(),
                message: "unknown field".into(),
            });
        }
    }

    let dim = get_usize(obj, "dim")?;
    let duration = get_f64(obj, "duration")?;
    let steps = match obj.get("steps") {
        Some(v) => as_usize(v, "steps")?,
        None => default_steps.unwrap_or(DEFAULT_STEPS),
    };

    let terms_val = obj.get("terms").ok_or_else(|| missing("terms"))?;
    let terms_arr = terms_val.as_array().ok_or_else(|| HolonomyError::Parse {
        path: "terms".into(),
        message: "expected an array".into(),
    })?;
    if terms_arr.is_empty() {
        return Err(HolonomyError::Parse {
            path: "terms".into(),
            message: "at least one term is required".into(),
        });
    }
    let mut terms = Vec::with_capacity(terms_arr.len());
    for (k, tv) in terms_arr.iter().enumerate() {
        let path = format!("terms[{k}]");
        let tobj = tv.as_object().ok_or_else(|| HolonomyError::Parse {
            path: path.clone(),
            message: "expected an object".into(),
        })?;
        let coeff_val = tobj.get("coefficient").ok_or_else(|| HolonomyError::Parse {
            path: format!("{path}.coefficient"),
            message: "missing field".into(),
        })?;
        let coefficient: Coefficient =
            serde_json::from_value(coeff_val.clone()).map_err(|e| HolonomyError::Parse {
                path: format!("{path}.coefficient"),
                message: e.to_string(),
            })?;
        let matrix = parse_matrix_data(
            tobj.get("matrix").ok_or_else(|| HolonomyError::Parse {
                path: format!("{path}.matrix"),
                message: "missing field".into(),
            })?,
            &format!("{path}.matrix"),
        )?;
        terms.push(TermData { coefficient, matrix });
    }

    let initial_frame = parse_matrix_data(
        obj.get("initial_frame").ok_or_else(|| missing("initial_frame"))?,
        "initial_frame",
    )?;

    let tolerances = match obj.get("tolerances") {
        None => Tolerances::default(),
        Some(tv) => {
            let tobj = tv.as_object().ok_or_else(|| HolonomyError::Parse {
                path: "tolerances".into(),
                message: "expected an object".into(),
            })?;
            let mut t = Tolerances::default();
            for (key, val) in tobj {
                let x = val.as_f64().ok_or_else(|| HolonomyError::Parse {
                    path: format!("tolerances.{key}"),
                    message: "expected a number".into(),
                })?;
                match key.as_str() {
                    "cyclicity" => t.cyclicity = x,
                    "residual_pass" => t.residual_pass = x,
                    "holonomic" => t.holonomic = x,
                    "parallel_transport" => t.parallel_transport = x,
                    _ => {
                        return Err(HolonomyError::Parse {
                            path: format!("tolerances.{key}"),
                            message: "unknown tolerance".into(),
                        })
                    }
                }
            }
            t
        }
    };

    let scenario = Scenario { dim, duration, steps, terms, initial_frame, tolerances };
    scenario.validate(None)
}

fn missing(field: &str) -> HolonomyError {
    HolonomyError::Parse { path: field.into(), message: "missing field".into() }
}

fn get_usize(obj: &serde_json::Map<String, serde_json::Value>, field: &str) -> Result<usize> {
    as_usize(obj.get(field).ok_or_else(|| missing(field))?, field)
}

fn as_usize(v: &serde_json::Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| HolonomyError::Parse {
        path: path.into(),
        message: "expected a non-negative integer".into(),
    })
}

fn get_f64(obj: &serde_json::Map<String, serde_json::Value>, field: &str) -> Result<f64> {
    obj.get(field)
        .ok_or_else(|| missing(field))?
        .as_f64()
        .ok_or_else(|| HolonomyError::Parse {
            path: field.into(),
            message: "expected a number".into(),
        })
}

fn parse_matrix_data(v: &serde_json::Value, path: &str) -> Result<MatrixData> {
    let obj = v.as_object().ok_or_else(|| HolonomyError::Parse {
        path: path.into(),
        message: "expected an object with re/im arrays".into(),
    })?;
    let re = parse_rows(obj.get("re"), &format!("{path}.re"))?;
    let im = parse_rows(obj.get("im"), &format!("{path}.im"))?;
    if re.len() != im.len() {
        return Err(HolonomyError::Parse {
            path: path.into(),
            message: format!("re has {} rows but im has {}", re.len(), im.len()),
        });
    }
    let cols = re.first().map(|r| r.len()).unwrap_or(0);
    for (i, row) in re.iter().chain(im.iter()).enumerate() {
        if row.len() != cols {
            return Err(HolonomyError::Parse {
                path: format!("{path}.re[{}]", i % re.len()),
                message: "ragged rows; matrices must be given in full, not triangles".into(),
            });
        }
    }
    Ok(MatrixData { re, im })
}

fn parse_rows(v: Option<&serde_json::Value>, path: &str) -> Result<Vec<Vec<f64>>> {
    let arr = v
        .ok_or_else(|| HolonomyError::Parse { path: path.into(), message: "missing field".into() })?
        .as_array()
        .ok_or_else(|| HolonomyError::Parse {
            path: path.into(),
            message: "expected an array of rows".into(),
        })?;
    let mut rows = Vec::with_capacity(arr.len());
    for (i, rv) in arr.iter().enumerate() {
        let row = rv.as_array().ok_or_else(|| HolonomyError::Parse {
            path: format!("{path}[{i}]"),
            message: "expected an array of numbers".into(),
        })?;
        let mut out = Vec::with_capacity(row.len());
        for (j, xv) in row.iter().enumerate() {
            out.push(xv.as_f64().ok_or_else(|| HolonomyError::Parse {
                path: format!("{path}[{i}][{j}]"),
                message: "expected a number".into(),
            })?);
        }
        rows.push(out);
    }
    Ok(rows)
}

/// Build a scenario document from library types.
pub fn scenario_from_parts(
    spec: &HamiltonianSpec,
    frame: &Frame,
    steps: usize,
    tolerances: Tolerances,
) -> Scenario {
    Scenario {
        dim: spec.dim(),
        duration: spec.duration(),
        steps,
        terms: spec
            .terms()
            .iter()
            .map(|t| TermData {
                coefficient: t.coefficient.clone(),
                matrix: MatrixData::from_matrix(&t.matrix),
            })
            .collect(),
        initial_frame: MatrixData::from_matrix(frame.columns()),
        tolerances,
    }
}
