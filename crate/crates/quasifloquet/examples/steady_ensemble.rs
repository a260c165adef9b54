//! Steady mixed states from quasienergy initialization: copies placed
//! along an orbit swap places under one kick, so their mixture barely
//! moves, while a |0>-initialized mixture oscillates.
//!
//! ```bash
//! cargo run --release --example steady_ensemble
//! ```

use num_complex::Complex64 as C64;
use quasifloquet::effham::first_recurrence_heff;
use quasifloquet::flows::{FlowSpec, Orbit, PhasePoint};
use quasifloquet::observables::{ensemble_evolve, trace_norm, EnsembleState};
use quasifloquet::quantum::{spin_kick_system, CVector};
use std::f64::consts::PI;

fn main() {
    let flow = FlowSpec::standard_map(2.0);
    let seed = PhasePoint::new(PI + 0.25, 0.0);
    let eps = 1e-2;
    let sys = spin_kick_system(0.1, 1.0 / 3.4);

    let heff = first_recurrence_heff(&sys, &flow, &seed, eps)
        .unwrap()
        .with_orbit_states(&sys, &flow)
        .unwrap();
    let p = heff.p;
    println!("orbit almost-period p = {p}; one copy per orbit point");

    let orbit = Orbit::generate(&flow, seed, p).unwrap();
    let states = heff.orbit_states.as_ref().unwrap();
    let quasi: Vec<(PhasePoint, CVector)> = orbit
        .points
        .iter()
        .enumerate()
        .map(|(m, theta)| (*theta, states[m][0].clone()))
        .collect();
    let zero_state = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let zero: Vec<(PhasePoint, CVector)> = orbit
        .points
        .iter()
        .map(|theta| (*theta, zero_state.clone()))
        .collect();

    let quasi_series = ensemble_evolve(
        &sys,
        &flow,
        &EnsembleState::new(quasi).unwrap(),
        2 * p,
    )
    .unwrap();
    let zero_series = ensemble_evolve(
        &sys,
        &flow,
        &EnsembleState::new(zero).unwrap(),
        2 * p,
    )
    .unwrap();

    println!("\n n   population(quasi)  population(|0>)   coherence(quasi)");
    for n in (0..=2 * p).step_by(p / 2) {
        println!(
            "{n:>3}   {:>16.6}  {:>15.6}  {:>16.6}",
            quasi_series.population[n], zero_series.population[n], quasi_series.coherence[n]
        );
    }

    let drift = |series: &quasifloquet::observables::EnsembleSeries| {
        series
            .rhos
            .iter()
            .map(|rho| trace_norm(&(rho - &series.rhos[0])).unwrap())
            .fold(0.0f64, f64::max)
    };
    println!(
        "\nmax trace-norm drift over 2 almost-periods: quasienergy init {:.4}, \
         |0> init {:.4}",
        drift(&quasi_series),
        drift(&zero_series)
    );
    println!("(the quasienergy mixture is steady up to the recurrence accuracy)");
}
