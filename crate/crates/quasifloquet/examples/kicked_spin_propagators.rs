//! Step unitaries of the kicked two-level spin and their products.
//!
//! ```bash
//! cargo run --release --example kicked_spin_propagators
//! ```

use quasifloquet::flows::{FlowSpec, PhasePoint};
use quasifloquet::quantum::{propagate, spin_kick_system, unitarity_defect};
use std::f64::consts::PI;

fn main() {
    let sys = spin_kick_system(0.1, 0.25);
    let flow = FlowSpec::standard_map(2.0);

    // At (π, 0) the kick points along |0>, so the step is diagonal:
    // diag(e^{-iλ}, e^{-2πir}).
    let theta = PhasePoint::new(PI, 0.0);
    let u = sys.step_unitary(&theta).unwrap();
    println!("U(π, 0) =");
    for i in 0..2 {
        println!(
            "  [{:+.4}{:+.4}i  {:+.4}{:+.4}i]",
            u[(i, 0)].re,
            u[(i, 0)].im,
            u[(i, 1)].re,
            u[(i, 1)].im
        );
    }
    println!("unitarity defect: {:.2e}", unitarity_defect(&u));

    // A generic point mixes the levels through the kick direction.
    let generic = PhasePoint::new(1.0, 2.0);
    let u = sys.step_unitary(&generic).unwrap();
    println!("\n|U(1, 2)| entries:");
    println!(
        "  [{:.4}  {:.4}]\n  [{:.4}  {:.4}]",
        u[(0, 0)].norm(),
        u[(0, 1)].norm(),
        u[(1, 0)].norm(),
        u[(1, 1)].norm()
    );

    // Products along the orbit compose: U_{m+n}(θ) = U_n(φᵐθ)·U_m(θ).
    let seed = PhasePoint::new(0.5, 0.5);
    let whole = propagate(&sys, &flow, &seed, 30).unwrap();
    let first = propagate(&sys, &flow, &seed, 12).unwrap();
    let mut mid = seed;
    for _ in 0..12 {
        mid = flow.step(&mid).unwrap();
    }
    let second = propagate(&sys, &flow, &mid, 18).unwrap();
    println!(
        "\ncomposition law over 12 + 18 chaotic steps: ‖U_30 - U_18·U_12‖ = {:.2e}",
        (whole - second * first).norm()
    );

    // Long products stay unitary without re-orthonormalization.
    let long = propagate(&sys, &flow, &seed, 100_000).unwrap();
    println!(
        "unitarity drift after 10^5 factors: {:.2e}",
        unitarity_defect(&long)
    );
}
