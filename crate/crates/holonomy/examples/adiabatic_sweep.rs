//! Watch the adiabatic limit emerge on an avoided-crossing sweep.
//!
//! The field ε(t)σ_z + g·σ_x swings through the avoided crossing and back.
//! Slower sweeps keep the state on the tracked level, and the evolution
//! approaches e^{−i∫E}·Γ(T): the dynamics reduces to the accumulated
//! energy phase on top of the geometric factor.
//!
//! ```text
//! cargo run --release --example adiabatic_sweep
//! ```

use holonomy::analysis::adiabatic_diagnostic;
use holonomy::presets::avoided_crossing;

fn main() {
    let coupling = 0.35;
    println!("avoided-crossing sweep, gap 2g = {:.2}", 2.0 * coupling);
    println!("{:>8} {:>16} {:>16}", "tau", "max|F + iE|", "reduction resid");
    for tau in [2.0, 7.5, 30.0, 120.0, 480.0] {
        let scenario = avoided_crossing(tau, coupling, 4096);
        let v = scenario.validate(None).unwrap();
        let d = adiabatic_diagnostic(&v.spec, &v.initial_frame, &v.grid)
            .expect("gap never closes, tracking is safe");
        println!("{tau:>8.1} {:>16.3e} {:>16.3e}", d.f_deviation, d.reduction_residual);
    }
    println!();
    println!("past the sudden-sweep regime each slowdown cuts the residual;");
    println!("a fast sweep is nowhere near the reduction (the state leaks");
    println!("across the gap, and interference makes the fast end non-monotone)");
}
