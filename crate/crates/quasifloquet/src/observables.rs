//! Dynamical diagnostics comparing exact and effective propagation.
//!
//! Everything here drives the system step by step with [`propagate`]-style
//! accumulation and compares against the spectral evolution of an
//! [`EffectiveHamiltonian`]: stroboscopic fidelities sampled at multiples
//! of the almost-period, survival probabilities of quasienergy states,
//! side-by-side overlay series, interaction averages and mixed-state
//! ensembles.

use num_complex::Complex64 as C64;

use crate::effham::EffectiveHamiltonian;
use crate::error::{Error, Result};
use crate::flows::{FlowSpec, PhasePoint};
use crate::fmt;
use crate::quantum::{hermitian_eigen, CMatrix, CVector, DrivenSystem};

/// Sampling convention of the stroboscopic fidelity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StrobConvention {
    /// Compare whole almost-periods: `n·p` exact factors against
    /// `exp(-i·n·p·H)`. Exact cycles give fidelity one identically.
    #[default]
    WholePeriod,
    /// Offset variant with one extra step on both sides (`n·p + 1`),
    /// kept for comparison plots.
    OffsetByOne,
}

/// Stroboscopic fidelity samples and their mean.
#[derive(Clone, Debug)]
pub struct FidelitySeries {
    /// `F_n` for `n = 0..=n_periods`.
    pub values: Vec<f64>,
    /// Mean of the stored samples.
    pub average: f64,
}

impl FidelitySeries {
    fn from_values(values: Vec<f64>) -> Self {
        let average = values.iter().sum::<f64>() / values.len() as f64;
        Self { values, average }
    }
}

fn ensure_normalized(psi: &CVector) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Stroboscopic fidelity of the effective dynamics against the exact one,
/// sampled at every almost-period for `n_periods` periods.
pub fn stroboscopic_fidelity(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    heff: &EffectiveHamiltonian,
    psi: &CVector,
    n_periods: usize,
) -> Result<FidelitySeries> {
    stroboscopic_fidelity_with(
        sys,
        flow,
        theta0,
        heff,
        psi,
        n_periods,
        StrobConvention::WholePeriod,
    )
}

/// [`stroboscopic_fidelity`] with an explicit sampling convention.
pub fn stroboscopic_fidelity_with(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    heff: &EffectiveHamiltonian,
    psi: &CVector,
    n_periods: usize,
    convention: StrobConvention,
) -> Result<FidelitySeries> {
    ensure_normalized(psi)?;
    let p = heff.p;
    let offset = match convention {
        StrobConvention::WholePeriod => 0usize,
        StrobConvention::OffsetByOne => 1usize,
    };
    // Exact propagation advances incrementally; the effective factor is
    // rebuilt from the spectral data at each sample.
    let mut theta = *theta0;
    let mut state = psi.clone();
    let mut steps_done = 0usize;
    let mut values = Vec::with_capacity(n_periods + 1);
    for n in 0..=n_periods {
        let target = n * p + offset;
        while steps_done < target {
            state = sys.step_unitary(&theta)? * state;
            theta = flow.step(&theta)?;
            steps_done += 1;
        }
        let rewound = heff.evolution(-(target as f64)) * &state;
        let amp = psi.dotc(&rewound);
        values.push(amp.norm_sqr());
    }
    Ok(FidelitySeries::from_values(values))
}

/// Survival probability `P_n = |<state| U_n |state>|²` for `n = 0..=n_steps`.
pub fn survival_probability(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    state: &CVector,
    n_steps: usize,
) -> Result<Vec<f64>> {
    ensure_normalized(state)?;
    let mut theta = *theta0;
    let mut evolved = state.clone();
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(1.0);
    for _ in 0..n_steps {
        evolved = sys.step_unitary(&theta)? * evolved;
        theta = flow.step(&theta)?;
        values.push(state.dotc(&evolved).norm_sqr());
    }
    Ok(values)
}

/// Exact and effective survival series side by side, for overlay plots:
/// `(|<ψ|U_n|ψ>|²)_n` and `(|<ψ|e^{-i·n·H}|ψ>|²)_n`.
pub fn effective_overlay(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    heff: &EffectiveHamiltonian,
    psi: &CVector,
    n_steps: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let exact = survival_probability(sys, flow, theta0, psi, n_steps)?;
    // Effective evolution through the quasienergy amplitudes.
    let overlaps: Vec<(f64, C64)> = heff
        .quasienergies
        .iter()
        .zip(heff.states.iter())
        .map(|(chi, z)| (*chi, psi.dotc(z) * z.dotc(psi)))
        .collect();
    let effective: Vec<f64> = (0..=n_steps)
        .map(|n| {
            let amp: C64 = overlaps
                .iter()
                .map(|(chi, w)| C64::from_polar(1.0, -chi * n as f64) * w)
                .sum();
            amp.norm_sqr()
        })
        .collect();
    Ok((exact, effective))
}

/// Orbit average of the interaction operator with its eigensystem and,
/// for rank-1 kick models, the direction mixture it encodes.
#[derive(Clone, Debug)]
pub struct AverageInteraction {
    /// `V̄ = (1/p)·Σ_n V(φⁿ(θ))`.
    pub vbar: CMatrix,
    /// Eigenpairs of the average, ascending.
    pub spectrum: Vec<(f64, CVector)>,
    /// `ν_a/λ` for kick models: the probability of each kick direction.
    pub mixture: Option<Vec<f64>>,
}

/// Average the interaction along the first `p` orbit points.
pub fn average_interaction(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
) -> Result<AverageInteraction> {
    assert!(p >= 1);
    let dim = sys.dim();
    let mut vbar = CMatrix::zeros(dim, dim);
    let mut theta = *theta0;
    for _ in 0..p {
        vbar += sys.interaction_at(&theta)?;
        theta = flow.step(&theta)?;
    }
    vbar /= C64::new(p as f64, 0.0);
    let (vals, vecs) = hermitian_eigen(&vbar)?;
    let spectrum: Vec<(f64, CVector)> = vals
        .iter()
        .zip(vecs.column_iter())
        .map(|(v, col)| (*v, col.into_owned()))
        .collect();
    let mixture = sys
        .kick_strength()
        .filter(|lambda| lambda.abs() > 0.0)
        .map(|lambda| vals.iter().map(|v| v / lambda).collect());
    Ok(AverageInteraction {
        vbar,
        spectrum,
        mixture,
    })
}

/// A statistical ensemble of driven-system copies, one flow seed per copy.
#[derive(Clone, Debug)]
pub struct EnsembleState {
    pub members: Vec<(PhasePoint, CVector)>,
    /// `ρ = (1/N)·Σ |ψ><ψ|`.
    pub rho: CMatrix,
}

impl EnsembleState {
    pub fn new(members: Vec<(PhasePoint, CVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("ensemble has no members".into()));
        }
        for (_, psi) in &members {
            ensure_normalized(psi)?;
        }
        let rho = density(&members);
        Ok(Self { members, rho })
    }
}

fn density(members: &[(PhasePoint, CVector)]) -> CMatrix {
    let dim = members[0].1.len();
    let mut rho = CMatrix::zeros(dim, dim);
    for (_, psi) in members {
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += psi[i] * psi[j].conj();
            }
        }
    }
    rho / C64::new(members.len() as f64, 0.0)
}

/// Time series of an evolving ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleSeries {
    /// `<0|ρ_n|0>`.
    pub population: Vec<f64>,
    /// `|<0|ρ_n|1>|`.
    pub coherence: Vec<f64>,
    /// Density-matrix snapshots, one per step (step 0 included).
    pub rhos: Vec<CMatrix>,
}

impl EnsembleSeries {
    /// CSV export (`n,population,coherence`).
    pub fn csv(&self) -> String {
        let mut out = String::from("n,population,coherence\n");
        for (n, (pop, coh)) in self
            .population
            .iter()
            .zip(self.coherence.iter())
            .enumerate()
        {
            out.push_str(&format!("{n},{},{}\n", fmt::float(*pop), fmt::float(*coh)));
        }
        out
    }
}

/// Evolve every member with its own propagator and assemble the mixed
/// state at each step. Members are accumulated in input order so rerunning
/// is bit-identical.
pub fn ensemble_evolve(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    ensemble: &EnsembleState,
    n_steps: usize,
) -> Result<EnsembleSeries> {
    let dim = sys.dim();
    let mut thetas: Vec<PhasePoint> = ensemble.members.iter().map(|(t, _)| *t).collect();
    let mut states: Vec<CVector> = ensemble.members.iter().map(|(_, s)| s.clone()).collect();
    let mut rhos = Vec::with_capacity(n_steps + 1);
    let mut population = Vec::with_capacity(n_steps + 1);
    let mut coherence = Vec::with_capacity(n_steps + 1);
    let record = |rho: &CMatrix, population: &mut Vec<f64>, coherence: &mut Vec<f64>| {
        population.push(rho[(0, 0)].re);
        coherence.push(if dim >= 2 { rho[(0, 1)].norm() } else { 0.0 });
    };

    let pairs: Vec<(PhasePoint, CVector)> = thetas
        .iter()
        .copied()
        .zip(states.iter().cloned())
        .collect();
    let rho0 = density(&pairs);
    record(&rho0, &mut population, &mut coherence);
    rhos.push(rho0);

    for _ in 0..n_steps {
        for (theta, state) in thetas.iter_mut().zip(states.iter_mut()) {
            *state = sys.step_unitary(theta)? * &*state;
            *theta = flow.step(theta)?;
        }
        let pairs: Vec<(PhasePoint, CVector)> = thetas
            .iter()
            .copied()
            .zip(states.iter().cloned())
            .collect();
        let rho = density(&pairs);
        record(&rho, &mut population, &mut coherence);
        rhos.push(rho);
    }
    Ok(EnsembleSeries {
        population,
        coherence,
        rhos,
    })
}

/// Trace norm `‖M‖₁` of a Hermitian matrix: the sum of the absolute
/// eigenvalues.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(m)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

/// CSV export of a plain series (`n,value`).
pub fn series_csv(values: &[f64]) -> String {
    let mut out = String::from("n,value\n");
    for (n, v) in values.iter().enumerate() {
        out.push_str(&format!("{n},{}\n", fmt::float(*v)));
    }
    out
}

/// CSV export of two aligned series (`n,exact,effective`).
pub fn overlay_csv(exact: &[f64], effective: &[f64]) -> String {
    let mut out = String::from("n,exact,effective\n");
    for (n, (a, b)) in exact.iter().zip(effective.iter()).enumerate() {
        out.push_str(&format!("{n},{},{}\n", fmt::float(*a), fmt::float(*b)));
    }
    out
}
