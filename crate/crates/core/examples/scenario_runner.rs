// Runs the bundled scenario files the way the `sis` tool does.
//
// `cargo run --example scenario_runner [scenario.json]`

use std::path::PathBuf;

use graphon_sis::scenario::{analyze, simulate, Scenario, Tolerances};
use graphon_sis::Result;

fn bundled() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios");
    ["one_group.json", "sbm.json", "leaky_vaccine.json", "csv_kernel.json"]
        .iter()
        .map(|f| dir.join(f))
        .collect()
}

fn main() -> Result<()> {
    match std::env::args().nth(1) {
        Some(p) => run(&[p.into()]),
        None => run(&bundled()),
    }
}

fn run(paths: &[PathBuf]) -> Result<()> {
    let tol = Tolerances::from_env()?;
    for path in paths {
        let loaded = Scenario::load(path)?;
        let report = analyze(&loaded, &tol)?;
        println!("{}: R0 = {:?}, regime {:?}", path.display(), report.r0, report.regime);
        if loaded.scenario.horizon.is_some() {
            let mut csv = Vec::new();
            let summary = simulate(&loaded, &mut csv, false, &tol)?;
            println!(
                "  simulated to t = {} in {} steps, final prevalence {:.6} ({} CSV bytes)",
                summary.final_time,
                summary.steps,
                summary.final_prevalence,
                csv.len()
            );
        }
    }
    Ok(())
}
