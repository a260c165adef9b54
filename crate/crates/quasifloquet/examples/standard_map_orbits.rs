//! Orbits of the Chirikov standard map: recurrences, diameters, Lyapunov
//! exponents.
//!
//! ```bash
//! cargo run --release --example standard_map_orbits
//! ```

use quasifloquet::flows::{first_recurrence, orbit_stats, FlowSpec, Orbit, PhasePoint};
use std::f64::consts::PI;

fn main() {
    let flow = FlowSpec::standard_map(2.0);

    // The fixed point (0,0) and the 2-cycle (π,0) <-> (π,π) are exact.
    let origin = PhasePoint::new(0.0, 0.0);
    println!("step(0, 0)      = {:?}", flow.step(&origin).unwrap());
    let half = PhasePoint::new(PI, 0.0);
    let hop = flow.step(&half).unwrap();
    println!(
        "step(π, 0)      = ({:.3}, {:.3})  [the other half of the 2-cycle]",
        hop.theta1(),
        hop.theta2()
    );

    // Poincaré recurrence of a quasi-periodic island orbit.
    let island = PhasePoint::new(0.0, PI + 0.4);
    for eps in [1e-1, 1e-2, 1e-3] {
        let rec = first_recurrence(&flow, &island, eps, 1_000_000).unwrap();
        println!(
            "island seed, ε = {eps:<5.0e}: almost-period p = {:>4}, |φᵖ(θ)-θ| = {:.3e}",
            rec.p,
            rec.displacement_norm()
        );
    }

    // Orbit statistics across the three regions of the phase portrait.
    println!("\nseed                       p      diameter  lyapunov");
    for (label, seed, eps) in [
        ("chaotic sea (0.5, 0.5)", PhasePoint::new(0.5, 0.5), 1e-1),
        ("big island (0, π+0.4)", island, 1e-2),
        ("double island (π+0.25, 0)", PhasePoint::new(PI + 0.25, 0.0), 1e-2),
    ] {
        let stats = orbit_stats(&flow, &seed, eps, 100_000).unwrap();
        println!(
            "{label:<26} {:>5}  {:>8.3}  {:>8.4}",
            stats.p, stats.diameter, stats.lyapunov
        );
    }

    // A short stretch of the chaotic orbit, CSV-style.
    println!("\nfirst chaotic iterates (n, theta1, theta2):");
    let orbit = Orbit::generate(&flow, PhasePoint::new(0.5, 0.5), 6).unwrap();
    for (n, q) in orbit.points.iter().enumerate() {
        println!("  {n},{:.6},{:.6}", q.theta1(), q.theta2());
    }
}
