//! Scenario files: write, digest, reload, and trace.
//!
//! Everything the CLI consumes is a plain JSON document; this example
//! round-trips one through disk and prints the head of its CSV trace.
//!
//! ```text
//! cargo run --release --example scenario_files
//! ```

use holonomy::propagation::propagate_frame;
use holonomy::report::trace_csv;
use holonomy::scenario::parse_scenario;

fn main() -> Result<(), holonomy::HolonomyError> {
    let scenario = holonomy::presets::precession(std::f64::consts::PI / 2.0, 1.0, 256);
    let text = scenario.to_json_pretty();
    println!("document ({} bytes), digest {}", text.len(), scenario.digest());

    let path = std::env::temp_dir().join("holonomy-example-scenario.json");
    std::fs::write(&path, &text)?;
    let reloaded = parse_scenario(&std::fs::read_to_string(&path)?, None)?;
    assert_eq!(reloaded.scenario, scenario, "round trip is exact");
    println!("reloaded from {} with identical fields", path.display());

    let traj = propagate_frame(&reloaded.spec, &reloaded.initial_frame, &reloaded.grid)?;
    let csv = trace_csv(&traj);
    println!("\nfirst trace rows:");
    for line in csv.lines().take(4) {
        let short: Vec<&str> = line.split(',').take(4).collect();
        println!("  {}", short.join(", "));
    }
    println!("  ...");
    println!("\ncyclicity defect {:.3e}", traj.cyclicity_defect);
    Ok(())
}
