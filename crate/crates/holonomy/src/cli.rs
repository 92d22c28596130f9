//! Command-line driver used by the `holonomy` binary.
//!
//! Subcommands: `simulate`, `separate`, `check-holonomic`, `design-gate`,
//! `convergence`. Exit codes are a stable contract:
//!
//! * 0 — success / all checks passed
//! * 1 — semantic failure (verdict false, infeasible design, order out of range)
//! * 2 — input error (unreadable file, schema violation, bad flags, non-cyclic
//!   input where a cyclic one is required)
//! * 3 — numerical failure inside the pipeline

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::analysis::{design_one_parameter_gate, verify_gate_design};
use crate::engine::{GaugeSchedule, HolonomyMethod};
use crate::error::HolonomyError;
use crate::hamiltonian::Coefficient;
use crate::linalg::ComplexMatrix;
use crate::propagation::propagate_frame;
use crate::report::{run_pipeline, trace_csv, RunOptions};
use crate::scenario::parse_scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const USAGE: &str = "\
usage: holonomy <command> [options]

commands:
  simulate <scenario.json> --output <trace.csv> [--steps N]
      propagate the scenario and write the per-node trace
  separate <scenario.json> [--output report.json] [--steps N]
           [--method projector-product|midpoint-ode]
           [--gauge-schedule linear|smoothstep] [--tol X]
      run the full separation pipeline and write the report
  check-holonomic <scenario.json> [--steps N] [--tol X]
      decide whether the cyclic evolution is purely holonomic
  design-gate --energies E0,E1,E2 --N n --m m [--phases P1,P2]
              [--profile constant|sinusoid] [--steps N]
              [--output scenario.json] [--verify]
      build a purely holonomic gate scenario
  convergence <scenario.json> [--levels K] [--steps N]
      run the pipeline at N, 2N, ... and fit the error order

environment:
  HOLONOMY_DEFAULT_STEPS  overrides the default step count (4096) for
                          scenarios that do not set one
";

/// Parsed command-line flags shared by the subcommands.
#[derive(Debug, Default)]
struct Flags {
    positional: Vec<String>,
    steps: Option<usize>,
    tol: Option<f64>,
    method: Option<String>,
    gauge_schedule: Option<String>,
    output: Option<String>,
    levels: Option<usize>,
    energies: Option<String>,
    winding: Option<i64>,
    branch: Option<i64>,
    phases: Option<String>,
    profile: Option<String>,
    verify: bool,
}

fn parse_flags(args: &[String]) -> Result<Flags, String> {
    let mut flags = Flags::default();
    let mut it = args.iter().peekable();
    let value = |it: &mut std::iter::Peekable<std::slice::Iter<String>>,
                 name: &str|
     -> Result<String, String> {
        it.next().cloned().ok_or_else(|| format!("flag {name} needs a value"))
    };
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--steps" => {
                flags.steps = Some(
                    value(&mut it, "--steps")?
                        .parse()
                        .map_err(|e| format!("--steps: {e}"))?,
                )
            }
            "--tol" => {
                flags.tol = Some(
                    value(&mut it, "--tol")?.parse().map_err(|e| format!("--tol: {e}"))?,
                )
            }
            "--levels" => {
                flags.levels = Some(
                    value(&mut it, "--levels")?
                        .parse()
                        .map_err(|e| format!("--levels: {e}"))?,
                )
            }
            "--N" => {
                flags.winding = Some(
                    value(&mut it, "--N")?.parse().map_err(|e| format!("--N: {e}"))?,
                )
            }
            "--m" => {
                flags.branch =
                    Some(value(&mut it, "--m")?.parse().map_err(|e| format!("--m: {e}"))?)
            }
            "--method" => flags.method = Some(value(&mut it, "--method")?),
            "--gauge-schedule" => flags.gauge_schedule = Some(value(&mut it, "--gauge-schedule")?),
            "--output" => flags.output = Some(value(&mut it, "--output")?),
            "--energies" => flags.energies = Some(value(&mut it, "--energies")?),
            "--phases" => flags.phases = Some(value(&mut it, "--phases")?),
            "--profile" => flags.profile = Some(value(&mut it, "--profile")?),
            "--verify" => flags.verify = true,
            other if other.starts_with("--") => return Err(format!("unknown flag {other}")),
            other => flags.positional.push(other.to_string()),
        }
    }
    Ok(flags)
}

fn env_default_steps() -> Option<usize> {
    std::env::var("HOLONOMY_DEFAULT_STEPS").ok().and_then(|s| s.parse().ok())
}

fn exit_code_for(err: &HolonomyError) -> i32 {
    match err {
        HolonomyError::Parse { .. }
        | HolonomyError::Validation(_)
        | HolonomyError::Domain(_)
        | HolonomyError::GridMismatch(_)
        | HolonomyError::Io(_) => EXIT_INPUT,
        HolonomyError::Precondition(_) => EXIT_INPUT,
        HolonomyError::Infeasible(_) => EXIT_SEMANTIC,
        HolonomyError::Singular(_) | HolonomyError::Tracking(_) => EXIT_NUMERIC,
    }
}

fn load_scenario(
    path: &str,
    steps: Option<usize>,
) -> Result<crate::scenario::ValidatedScenario, (i32, String)> {
    let text = fs::read_to_string(Path::new(path))
        .map_err(|e| (EXIT_INPUT, format!("cannot read {path}: {e}")))?;
    let validated = parse_scenario(&text, env_default_steps())
        .map_err(|e| (exit_code_for(&e), e.to_string()))?;
    match steps {
        Some(n) => validated
            .scenario
            .validate(Some(n))
            .map_err(|e| (exit_code_for(&e), e.to_string())),
        None => Ok(validated),
    }
}

fn run_options(flags: &Flags) -> Result<RunOptions, String> {
    let method = match flags.method.as_deref() {
        None | Some("projector-product") => HolonomyMethod::ProjectorProduct,
        Some("midpoint-ode") => HolonomyMethod::MidpointOde,
        Some(other) => return Err(format!("unknown --method {other}")),
    };
    let schedule = match flags.gauge_schedule.as_deref() {
        None | Some("linear") => GaugeSchedule::Linear,
        Some("smoothstep") => GaugeSchedule::Smoothstep,
        Some(other) => return Err(format!("unknown --gauge-schedule {other}")),
    };
    Ok(RunOptions { method, schedule })
}

/// Entry point for the binary: dispatch on the subcommand.
pub fn run(args: &[String]) -> i32 {
    let Some((command, rest)) = args.split_first() else {
        eprint!("{USAGE}");
        return EXIT_INPUT;
    };
    let flags = match parse_flags(rest) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    match command.as_str() {
        "simulate" => cmd_simulate(&flags),
        "separate" => cmd_separate(&flags),
        "check-holonomic" => cmd_check_holonomic(&flags),
        "design-gate" => cmd_design_gate(&flags),
        "convergence" => cmd_convergence(&flags),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            EXIT_OK
        }
        other => {
            eprintln!("error: unknown command {other}");
            eprint!("{USAGE}");
            EXIT_INPUT
        }
    }
}

fn cmd_simulate(flags: &Flags) -> i32 {
    let [path] = &flags.positional[..] else {
        eprintln!("error: simulate needs exactly one scenario path");
        return EXIT_INPUT;
    };
    let scenario = match load_scenario(path, flags.steps) {
        Ok(s) => s,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    let traj = match propagate_frame(&scenario.spec, &scenario.initial_frame, &scenario.grid) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_NUMERIC;
        }
    };
    let csv = trace_csv(&traj);
    if let Some(out) = &flags.output {
        if let Err(e) = fs::write(out, &csv) {
            eprintln!("error: cannot write {out}: {e}");
            return EXIT_INPUT;
        }
    } else {
        print!("{csv}");
    }
    println!(
        "{{\"digest\": \"{}\", \"duration\": {:.16e}, \"steps\": {}, \
         \"cyclicity_defect\": {:.16e}, \"cyclic\": {}}}",
        scenario.scenario.digest(),
        traj.grid.duration(),
        traj.grid.steps(),
        traj.cyclicity_defect,
        traj.cyclicity_defect <= scenario.tolerances.cyclicity,
    );
    EXIT_OK
}

fn cmd_separate(flags: &Flags) -> i32 {
    let [path] = &flags.positional[..] else {
        eprintln!("error: separate needs exactly one scenario path");
        return EXIT_INPUT;
    };
    let mut scenario = match load_scenario(path, flags.steps) {
        Ok(s) => s,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    if let Some(tol) = flags.tol {
        scenario.tolerances.residual_pass = tol;
    }
    let options = match run_options(flags) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    let run = match run_pipeline(&scenario, options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_NUMERIC;
        }
    };
    let json = run.report.to_json();
    match &flags.output {
        Some(out) => {
            if let Err(e) = fs::write(out, &json) {
                eprintln!("error: cannot write {out}: {e}");
                return EXIT_INPUT;
            }
            println!(
                "separation {:.3e}  matrix {}  verdict {}",
                run.report.separation_residual,
                run.report
                    .matrix_residual
                    .map(|r| format!("{r:.3e}"))
                    .unwrap_or_else(|| "skipped".into()),
                run.report.verdict.is_purely_holonomic,
            );
        }
        None => print!("{json}"),
    }
    if run.report.all_residuals_pass() {
        EXIT_OK
    } else {
        EXIT_SEMANTIC
    }
}

fn cmd_check_holonomic(flags: &Flags) -> i32 {
    let [path] = &flags.positional[..] else {
        eprintln!("error: check-holonomic needs exactly one scenario path");
        return EXIT_INPUT;
    };
    let mut scenario = match load_scenario(path, flags.steps) {
        Ok(s) => s,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    if let Some(tol) = flags.tol {
        scenario.tolerances.holonomic = tol;
    }
    let run = match run_pipeline(&scenario, RunOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if !run.report.cyclic {
        eprintln!(
            "error: scenario is not cyclic (defect {:.3e} > {:.3e})",
            run.report.cyclicity_defect, scenario.tolerances.cyclicity
        );
        return EXIT_INPUT;
    }
    let v = &run.report.verdict;
    println!(
        "purely_holonomic: {}\nalpha: {:.16e}{}\nresidual: {:.16e}\ntolerance: {:.16e}",
        v.is_purely_holonomic,
        v.alpha,
        if v.alpha_defined { "" } else { " (undefined: traceless)" },
        v.residual,
        v.tolerance,
    );
    if v.is_purely_holonomic {
        EXIT_OK
    } else {
        EXIT_SEMANTIC
    }
}

fn parse_list(text: &str, name: &str, want: usize) -> Result<Vec<f64>, String> {
    let vals: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| format!("{name}: {e}"))?;
    if vals.len() != want {
        return Err(format!("{name}: expected {want} comma-separated values"));
    }
    Ok(vals)
}

fn cmd_design_gate(flags: &Flags) -> i32 {
    let energies = match &flags.energies {
        Some(e) => match parse_list(e, "--energies", 3) {
            Ok(v) => v,
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_INPUT;
            }
        },
        None => {
            eprintln!("error: design-gate requires --energies E0,E1,E2");
            return EXIT_INPUT;
        }
    };
    let (Some(winding), Some(branch)) = (flags.winding, flags.branch) else {
        eprintln!("error: design-gate requires --N and --m integers");
        return EXIT_INPUT;
    };
    let phases = match &flags.phases {
        None => vec![0.0, 0.0],
        Some(p) => match parse_list(p, "--phases", 2) {
            Ok(v) => v,
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_INPUT;
            }
        },
    };
    let profile = match flags.profile.as_deref() {
        None | Some("constant") => Coefficient::Constant { value: 1.0 },
        Some("sinusoid") => Coefficient::Sinusoid {
            amplitude: 1.0,
            frequency: std::f64::consts::PI,
            phase: 0.0,
        },
        Some(other) => {
            eprintln!("error: unknown --profile {other} (constant or sinusoid)");
            return EXIT_INPUT;
        }
    };
    // positional labels: E0 is the dark level; E1 < E2 span the gate pair
    let (e0, e1, e2) = (energies[0], energies[1], energies[2]);
    if e1 >= e2 {
        eprintln!("error: --energies must satisfy E1 < E2");
        return EXIT_INPUT;
    }
    let mut sorted = energies.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let anchor = sorted.iter().position(|&x| x == e0).unwrap();
    let generator = ComplexMatrix::diag(&[
        Complex64::new(e0, 0.0),
        Complex64::new(e1, 0.0),
        Complex64::new(e2, 0.0),
    ]);
    let steps = flags.steps.or_else(env_default_steps).unwrap_or(crate::propagation::DEFAULT_STEPS);
    let design = match design_one_parameter_gate(
        &generator, anchor, winding, branch, phases[0], phases[1], &profile, 1.0, steps,
    ) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let scenario_text = design.scenario.to_json_pretty();
    if let Some(out) = &flags.output {
        if let Err(e) = fs::write(out, &scenario_text) {
            eprintln!("error: cannot write {out}: {e}");
            return EXIT_INPUT;
        }
    } else {
        print!("{scenario_text}");
    }
    let u = &design.predicted_u;
    println!(
        "pulse_area: {:.16e}\namp_a1_sq: {:.16e}\npredicted_u: [[{}, {}], [{}, {}]]{}",
        design.pulse_area,
        design.amp_a1_sq,
        fmt_c(u[(0, 0)]),
        fmt_c(u[(0, 1)]),
        fmt_c(u[(1, 0)]),
        fmt_c(u[(1, 1)]),
        if design.trivial { "\nwarning: predicted gate is the identity (valid but trivial)" } else { "" },
    );
    if flags.verify {
        match verify_gate_design(&design, None) {
            Ok(v) => {
                println!(
                    "verify: gate_error {:.3e}, matches {}, purely_holonomic {}",
                    v.gate_error, v.gate_matches, v.holonomic_ok
                );
                if !(v.gate_matches && v.holonomic_ok) {
                    return EXIT_SEMANTIC;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
        }
    }
    EXIT_OK
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6e}{}{:.6e}i", z.re, if z.im >= 0.0 { "+" } else { "-" }, z.im.abs())
}

fn cmd_convergence(flags: &Flags) -> i32 {
    let [path] = &flags.positional[..] else {
        eprintln!("error: convergence needs exactly one scenario path");
        return EXIT_INPUT;
    };
    let levels = flags.levels.unwrap_or(3);
    if levels < 2 {
        eprintln!("error: --levels must be at least 2");
        return EXIT_INPUT;
    }
    let base = match load_scenario(path, flags.steps) {
        Ok(s) => s,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    let base_steps = base.grid.steps();
    let mut residuals = Vec::new();
    println!("steps,separation_residual");
    for level in 0..levels {
        let steps = base_steps << level;
        let scenario = match base.scenario.validate(Some(steps)) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
        };
        let run = match run_pipeline(&scenario, RunOptions::default()) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_NUMERIC;
            }
        };
        println!("{steps},{:.16e}", run.report.separation_residual);
        residuals.push(run.report.separation_residual);
    }
    // at the rounding floor an order fit is meaningless
    if residuals.iter().all(|&r| r < 1e-12) {
        println!("order: skipped (residuals at rounding floor)");
        return EXIT_OK;
    }
    let mut slopes = Vec::new();
    for w in residuals.windows(2) {
        if w[1] > 0.0 {
            slopes.push((w[0] / w[1]).log2());
        }
    }
    let order = slopes.iter().sum::<f64>() / slopes.len() as f64;
    println!("order: {order:.3}");
    if (1.7..=2.3).contains(&order) {
        EXIT_OK
    } else {
        eprintln!("error: fitted order {order:.3} outside [1.7, 2.3]");
        EXIT_SEMANTIC
    }
}
