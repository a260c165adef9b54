//! The first-recurrence effective Hamiltonian: a Hermitian p-th root of
//! the monodromy over one almost-period.
//!
//! ```bash
//! cargo run --release --example first_recurrence_hamiltonian
//! ```

use quasifloquet::effham::{first_recurrence_heff, monodromy};
use quasifloquet::flows::{FlowSpec, PhasePoint};
use quasifloquet::quantum::spin_kick_system;
use std::f64::consts::PI;

fn main() {
    let flow = FlowSpec::standard_map(2.0);

    // Exact 2-cycle: the monodromy is diag(e^{-2iλ}, e^{-4πir}) and the
    // quasienergies come out in closed form, on the principal branch
    // (-π/2, π/2].
    let sys = spin_kick_system(0.1, 0.25);
    let seed = PhasePoint::new(PI, 0.0);
    let heff = first_recurrence_heff(&sys, &flow, &seed, 1e-2).unwrap();
    println!("2-cycle quasienergies: {:?}", heff.quasienergies);
    println!("  expected:            [0.1, {:.12}]", PI / 2.0);
    let m = monodromy(&sys, &flow, &seed, heff.p).unwrap();
    println!(
        "  ‖exp(-i·p·H) - M‖ = {:.2e}",
        (heff.evolution(heff.p as f64) - m).norm()
    );

    // Island orbit: p = 102 at ε = 1e-2; the construction still
    // reproduces its monodromy to rounding.
    let island = PhasePoint::new(0.0, PI + 0.4);
    for ratio in [0.04, 3.4, 104.5] {
        let sys = spin_kick_system(0.1, ratio);
        let heff = first_recurrence_heff(&sys, &flow, &island, 1e-2).unwrap();
        let m = monodromy(&sys, &flow, &island, heff.p).unwrap();
        let window = PI / heff.p as f64;
        println!(
            "\nisland orbit at ratio {ratio}: p = {}, ε-error estimate {:.1e}",
            heff.p, heff.error_estimate
        );
        println!(
            "  quasienergies {:?} (window ±{window:.4})",
            heff.quasienergies
        );
        println!(
            "  defining property: ‖exp(-i·p·H) - M‖ = {:.2e}",
            (heff.evolution(heff.p as f64) - m).norm()
        );
    }

    // Quasienergy table in the CSV export format.
    let sys = spin_kick_system(0.1, 3.4);
    let heff = first_recurrence_heff(&sys, &flow, &island, 1e-2).unwrap();
    println!("\nCSV export:\n{}", heff.csv());
}
