//! Order-2 convergence of the separation residual under grid refinement.
//!
//! ```text
//! cargo run --release --example convergence_order
//! ```

use holonomy::engine::{operator_trajectory, separation_residual, HolonomyMethod};
use holonomy::presets::rotating_three_level;
use holonomy::propagation::propagate_frame;

fn main() {
    let scenario = rotating_three_level(1, 512);
    println!("{:>8} {:>16} {:>8}", "steps", "max ||U-GD||", "ratio");
    let mut previous: Option<f64> = None;
    for level in 0..5 {
        let steps = 512usize << level;
        let v = scenario.validate(Some(steps)).unwrap();
        let traj = propagate_frame(&v.spec, &v.initial_frame, &v.grid).unwrap();
        let (ops, _) = operator_trajectory(&traj, HolonomyMethod::ProjectorProduct).unwrap();
        let residual = separation_residual(&ops).unwrap();
        match previous {
            None => println!("{steps:>8} {residual:>16.6e} {:>8}", "-"),
            Some(p) => println!("{steps:>8} {residual:>16.6e} {:>8.3}", p / residual),
        }
        previous = Some(residual);
    }
    println!();
    println!("a ratio of 4 per doubling is second order; the same table is");
    println!("available from the CLI as `holonomy convergence <scenario.json>`");
}
