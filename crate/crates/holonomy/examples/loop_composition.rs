//! Cancel dynamical phases across two loops.
//!
//! Neither loop alone is purely holonomic, but the second is engineered so
//! that the composed dynamics D†(T₁+T₂) = D†₂·D†₁ collapses to a global
//! phase: only the holonomy survives the round trip.
//!
//! ```text
//! cargo run --release --example loop_composition
//! ```

use holonomy::analysis::{
    compose_segments, design_one_parameter_gate, purely_holonomic_check, segment_run,
};
use holonomy::hamiltonian::Coefficient;
use holonomy::linalg::ComplexMatrix;
use holonomy::presets::one_parameter_segment;
use holonomy::propagation::propagate_frame;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn main() {
    // population split 0.3 comes from the N=5, m=4 design; we traverse its
    // 5π pulse as two separate loops of area π and 4π
    let base = ComplexMatrix::diag(&[c(0.0), c(1.0), c(3.0)]);
    let design = design_one_parameter_gate(
        &base, 0, 5, 4, 0.0, 0.0,
        &Coefficient::Constant { value: 1.0 }, 1.0, 4096,
    )
    .unwrap();
    let frame = design.scenario.validate(None).unwrap().initial_frame;

    let run_segment = |matrix: ComplexMatrix, frame, area: f64| {
        let doc = one_parameter_segment(matrix, frame, area, 1.0, 4096).unwrap();
        let v = doc.validate(None).unwrap();
        let traj = propagate_frame(&v.spec, &v.initial_frame, &v.grid).unwrap();
        segment_run(&traj).unwrap()
    };

    let seg1 = run_segment(base.clone(), &frame, PI);
    let v1 = purely_holonomic_check(&seg1.d_t, 1e-4).unwrap();
    println!("loop 1 (area pi):    purely holonomic = {:<5}  residual {:.3e}",
        v1.is_purely_holonomic, v1.residual);

    // the second loop carries an extra 0.1·identity energy shift, which
    // feeds only the global phase
    let shifted = base.add(&ComplexMatrix::identity(3).scale_re(0.1));
    let seg2 = run_segment(shifted, &seg1.final_frame, 4.0 * PI);
    let v2 = purely_holonomic_check(&seg2.d_t, 1e-4).unwrap();
    println!("loop 2 (area 4pi):   purely holonomic = {:<5}  residual {:.3e}",
        v2.is_purely_holonomic, v2.residual);

    let composed = compose_segments(&seg1, &seg2, 1e-4).unwrap();
    println!(
        "composed:            purely holonomic = {:<5}  residual {:.3e}",
        composed.verdict.is_purely_holonomic, composed.verdict.residual
    );
    println!(
        "global phase alpha = {:+.6} (engineered 0.1 * 4pi = {:+.6})",
        composed.verdict.alpha,
        0.1 * 4.0 * PI
    );
}
