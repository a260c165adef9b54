//! Drive the experiment runner from code: a reduced fidelity/survival
//! survey over three orbits and four ratios, printed as band grids.
//!
//! The `quasifloquet` binary runs the full nine-orbit survey from the
//! shipped configuration; this example shows the same machinery on a
//! custom configuration.
//!
//! ```bash
//! cargo run --release --example survey_tables
//! ```

use quasifloquet::runner::{
    fidelity_table, orbit_report, survival_table, ExperimentConfig, MethodChoice,
};

fn main() {
    let mut cfg = ExperimentConfig::paper_default();
    cfg.run.ratios = vec![0.01414213562373095, 0.04, 3.4, 101.3];
    cfg.run.horizons = vec![12, 120];
    cfg.seeds
        .retain(|s| ["e0", "e4", "e8"].contains(&s.name.as_str()));

    let orbits = orbit_report(&cfg, true);
    println!("orbit report ({} failures):", orbits.failures);
    for line in orbits.csv.lines() {
        println!("  {line}");
    }

    let fid = fidelity_table(&cfg, MethodChoice::FirstRecurrence, true);
    println!("\nfidelity bands (seed, ratio, horizon -> band):");
    print_bands(&fid.csv);

    let surv = survival_table(&cfg, MethodChoice::FirstRecurrence, true);
    println!("\nsurvival bands:");
    print_bands(&surv.csv);
}

fn print_bands(csv: &str) {
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let ratio: f64 = cols[2].parse().unwrap();
        let value: f64 = cols[4].parse().unwrap_or(f64::NAN);
        println!(
            "  {:<4} r={ratio:<10.4} N={:<4} {:>7.2}%  {}",
            cols[0],
            cols[3],
            100.0 * value,
            cols[5]
        );
    }
}
