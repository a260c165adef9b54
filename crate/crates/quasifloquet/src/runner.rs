//! Configuration-driven experiment runner.
//!
//! Reads a TOML experiment description (the built-in default reproduces
//! the standard kicked-spin survey: nine orbits, nine frequency ratios,
//! two horizons) and emits CSV tables: orbit properties, phase portraits,
//! quasienergy exports, fidelity and survival grids with classification
//! bands, overlay series and ensemble evolutions. Cells of a grid are
//! independent and run in parallel; results are assembled in configuration
//! order so reruns are byte-identical.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effham::{
    bch_high1_heff, bch_high2_heff_with_tolerance, bch_high3_heff_with_tolerance,
    bch_low_heff_with_tolerance, first_recurrence_heff_at, koopman_heff, EffectiveHamiltonian,
};
use crate::error::{Error, Result};
use crate::flows::{first_recurrence, orbit_stats_with_limit, FlowSpec, Orbit, PhasePoint};
use crate::fmt;
use crate::observables::{
    effective_overlay, ensemble_evolve, overlay_csv, stroboscopic_fidelity, survival_probability,
    EnsembleState,
};
use crate::quantum::{spin_kick_system, CVector, DrivenSystem};

/// Tangent-map iterations behind every reported Lyapunov exponent.
const LYAPUNOV_STEPS: usize = 100_000;

/// Which effective-Hamiltonian construction a run uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
pub enum MethodChoice {
    #[default]
    #[serde(rename = "froot")]
    #[value(name = "froot")]
    FirstRecurrence,
    #[serde(rename = "koopman")]
    Koopman,
    #[serde(rename = "bch-low")]
    #[value(name = "bch-low")]
    BchLow,
    #[serde(rename = "bch-high1")]
    #[value(name = "bch-high1")]
    BchHigh1,
    #[serde(rename = "bch-high2")]
    #[value(name = "bch-high2")]
    BchHigh2,
    #[serde(rename = "bch-high3")]
    #[value(name = "bch-high3")]
    BchHigh3,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// `(|0> + |1>)/√2`.
    #[default]
    Plus,
    Zero,
    One,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FlowConfig {
    pub kind: FlowKind,
    #[serde(default = "default_k")]
    pub k: f64,
}

fn default_k() -> f64 {
    2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub enum FlowKind {
    #[serde(rename = "standard-map")]
    StandardMap,
    #[serde(rename = "identity")]
    Identity,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SystemConfig {
    pub model: String,
    pub lambda: f64,
    pub dim: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RunConfig {
    pub ratios: Vec<f64>,
    pub horizons: Vec<usize>,
    pub epsilon: f64,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default = "default_recurrence_limit")]
    pub recurrence_limit: usize,
    #[serde(default = "default_portrait_steps")]
    pub portrait_steps: usize,
    /// Proximity threshold for declaring BCH resonances.
    #[serde(default = "default_resonance_tol")]
    pub resonance_tol: f64,
}

fn default_resonance_tol() -> f64 {
    crate::effham::RESONANCE_TOL
}

fn default_recurrence_limit() -> usize {
    1_000_000
}

fn default_portrait_steps() -> usize {
    2000
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct OutputConfig {
    pub directory: PathBuf,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SeedSpec {
    pub name: String,
    pub region: String,
    pub theta: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl SeedSpec {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.theta[0], self.theta[1])
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct EnsembleConfig {
    #[serde(default)]
    pub seeds: Vec<String>,
    #[serde(default = "default_ensemble_periods")]
    pub periods: usize,
    /// Frequency ratio of the ensemble run. The steady/oscillating
    /// contrast lives in the medium-frequency regime; the default is the
    /// reciprocal of the 3.4 survey ratio.
    #[serde(default = "default_ensemble_ratio")]
    pub ratio: f64,
    #[serde(default)]
    pub epsilon_overrides: HashMap<String, f64>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            seeds: Vec::new(),
            periods: default_ensemble_periods(),
            ratio: default_ensemble_ratio(),
            epsilon_overrides: HashMap::new(),
        }
    }
}

fn default_ensemble_periods() -> usize {
    2
}

fn default_ensemble_ratio() -> f64 {
    1.0 / 3.4
}

/// A complete experiment description.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ExperimentConfig {
    pub flow: FlowConfig,
    pub system: SystemConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
    pub seeds: Vec<SeedSpec>,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
}

impl ExperimentConfig {
    /// The built-in standard-map experiment shipped with the crate.
    pub fn paper_default() -> Self {
        Self::from_toml_str(include_str!("../paper.cfg"))
            .expect("the built-in configuration must parse")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("configurations always serialize")
    }

    fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("no seeds configured".into()));
        }
        if self.run.epsilon <= 0.0 {
            return Err(Error::Config("run.epsilon must be positive".into()));
        }
        for r in &self.run.ratios {
            if *r <= 0.0 {
                return Err(Error::Config(format!("ratio {r} must be positive")));
            }
        }
        for h in &self.run.horizons {
            if *h < 1 {
                return Err(Error::Config("horizons must be at least 1".into()));
            }
        }
        for seed in &self.seeds {
            if let Some(eps) = seed.epsilon {
                if eps <= 0.0 {
                    return Err(Error::Config(format!(
                        "seed {}: epsilon override must be positive",
                        seed.name
                    )));
                }
            }
        }
        if self.system.model != "spin-kick" {
            return Err(Error::Config(format!(
                "unknown system model '{}' (only 'spin-kick' is built in)",
                self.system.model
            )));
        }
        if self.system.dim != 2 {
            return Err(Error::Config("the spin-kick model is two-level".into()));
        }
        Ok(())
    }

    pub fn flow_spec(&self) -> FlowSpec {
        match self.flow.kind {
            FlowKind::StandardMap => FlowSpec::StandardMap { k: self.flow.k },
            FlowKind::Identity => FlowSpec::Identity,
        }
    }

    pub fn build_system(&self, ratio: f64) -> DrivenSystem {
        spin_kick_system(self.system.lambda, ratio)
    }

    pub fn find_seed(&self, name: &str) -> Result<&SeedSpec> {
        self.seeds
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Config(format!("unknown seed '{name}'")))
    }

    pub fn seed_epsilon(&self, seed: &SeedSpec) -> f64 {
        seed.epsilon.unwrap_or(self.run.epsilon)
    }

    pub fn initial_vector(&self) -> CVector {
        let s = 1.0 / 2.0_f64.sqrt();
        match self.run.initial_state {
            InitialState::Plus => CVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]),
            InitialState::Zero => CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            InitialState::One => CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
        }
    }
}

/// Build the configured effective Hamiltonian at one seed/ratio cell.
pub fn build_heff(
    cfg: &ExperimentConfig,
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
    method: MethodChoice,
) -> Result<EffectiveHamiltonian> {
    let rec = first_recurrence(flow, theta0, epsilon, cfg.run.recurrence_limit)?;
    match method {
        MethodChoice::FirstRecurrence => first_recurrence_heff_at(sys, flow, theta0, &rec),
        MethodChoice::Koopman => koopman_heff(sys, flow, theta0, epsilon),
        MethodChoice::BchLow => {
            bch_low_heff_with_tolerance(sys, flow, theta0, rec.p, cfg.run.resonance_tol)
        }
        MethodChoice::BchHigh1 => bch_high1_heff(sys, flow, theta0, rec.p),
        MethodChoice::BchHigh2 => {
            bch_high2_heff_with_tolerance(sys, flow, theta0, rec.p, cfg.run.resonance_tol)
        }
        MethodChoice::BchHigh3 => {
            // Natural split of the spin kick: the zero-delay kick commutes
            // along constant-polar-angle orbits; the delay phases carry
            // the O(ratio) remainder.
            let split_sys = sys.clone();
            let v_part = move |theta: &PhasePoint| {
                split_sys
                    .interaction_at(&PhasePoint::new(theta.theta1(), 0.0))
                    .expect("spin-kick interactions are defined everywhere")
            };
            bch_high3_heff_with_tolerance(sys, flow, theta0, rec.p, &v_part, cfg.run.resonance_tol)
        }
    }
}

/// Classification band of an average fidelity/probability, following the
/// survey convention: good ≥ 97%, correct ≥ 90%, middling ≥ 75%.
pub fn band_label(value: f64) -> &'static str {
    if value >= 0.97 {
        "good"
    } else if value >= 0.90 {
        "correct"
    } else if value >= 0.75 {
        "middling"
    } else {
        "bad"
    }
}

/// A finished table: CSV text plus the number of cells that failed.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub csv: String,
    pub failures: usize,
}

fn sanitize(err: &Error) -> String {
    err.to_string().replace([',', '\n'], ";")
}

fn map_rows<C: Sync, T: Send>(
    cells: &[C],
    parallel: bool,
    f: impl Fn(&C) -> T + Sync + Send,
) -> Vec<T> {
    if parallel {
        cells.par_iter().map(f).collect()
    } else {
        cells.iter().map(f).collect()
    }
}

/// Orbit-property table: one row per configured seed.
pub fn orbit_report(cfg: &ExperimentConfig, parallel: bool) -> RunReport {
    let flow = cfg.flow_spec();
    let rows = map_rows(&cfg.seeds, parallel, |seed| {
        let eps = cfg.seed_epsilon(seed);
        match orbit_stats_with_limit(
            &flow,
            &seed.point(),
            eps,
            LYAPUNOV_STEPS,
            cfg.run.recurrence_limit,
        ) {
            Ok(stats) => (
                format!(
                    "{},{},{},{},{},\n",
                    seed.name,
                    stats.p,
                    fmt::float(stats.diameter),
                    fmt::float(stats.lyapunov),
                    seed.region
                ),
                false,
            ),
            Err(e) => (
                format!("{},,,,{},{}\n", seed.name, seed.region, sanitize(&e)),
                true,
            ),
        }
    });
    let mut csv = String::from("label,p,diameter,lyapunov,region,note\n");
    let mut failures = 0;
    for (row, failed) in rows {
        csv.push_str(&row);
        failures += failed as usize;
    }
    RunReport { csv, failures }
}

/// Phase-portrait sample: `portrait_steps` flow iterates per seed.
pub fn phase_portrait(cfg: &ExperimentConfig) -> Result<String> {
    let flow = cfg.flow_spec();
    let mut csv = String::from("seed_index,n,theta1,theta2\n");
    for (index, seed) in cfg.seeds.iter().enumerate() {
        let orbit = Orbit::generate(&flow, seed.point(), cfg.run.portrait_steps)?;
        for (n, q) in orbit.points.iter().enumerate() {
            csv.push_str(&format!(
                "{index},{n},{},{}\n",
                fmt::float(q.theta1()),
                fmt::float(q.theta2())
            ));
        }
    }
    Ok(csv)
}

/// Quasienergy table of one seed at one ratio.
pub fn effham_export(
    cfg: &ExperimentConfig,
    seed_name: &str,
    ratio: f64,
    epsilon: Option<f64>,
    method: MethodChoice,
) -> Result<String> {
    let seed = cfg.find_seed(seed_name)?;
    let eps = epsilon.unwrap_or_else(|| cfg.seed_epsilon(seed));
    let flow = cfg.flow_spec();
    let sys = cfg.build_system(ratio);
    let heff = build_heff(cfg, &sys, &flow, &seed.point(), eps, method)?;
    Ok(heff.csv())
}

struct Cell {
    seed: usize,
    ratio: f64,
    horizon: usize,
}

fn grid(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for seed in 0..cfg.seeds.len() {
        for &ratio in &cfg.run.ratios {
            for &horizon in &cfg.run.horizons {
                cells.push(Cell {
                    seed,
                    ratio,
                    horizon,
                });
            }
        }
    }
    cells
}

fn table_report(header: &str, rows: Vec<(String, bool)>) -> RunReport {
    let mut csv = String::from(header);
    let mut failures = 0;
    for (row, failed) in rows {
        csv.push_str(&row);
        failures += failed as usize;
    }
    RunReport { csv, failures }
}

/// Average stroboscopic fidelity over every seed × ratio × horizon cell.
pub fn fidelity_table(cfg: &ExperimentConfig, method: MethodChoice, parallel: bool) -> RunReport {
    let flow = cfg.flow_spec();
    let psi = cfg.initial_vector();
    let cells = grid(cfg);
    let rows = map_rows(&cells, parallel, |cell| {
        let seed = &cfg.seeds[cell.seed];
        let eps = cfg.seed_epsilon(seed);
        let sys = cfg.build_system(cell.ratio);
        let outcome = build_heff(cfg, &sys, &flow, &seed.point(), eps, method).and_then(|heff| {
            stroboscopic_fidelity(&sys, &flow, &seed.point(), &heff, &psi, cell.horizon)
        });
        match outcome {
            Ok(series) => (
                format!(
                    "{},{},{},{},{},{},\n",
                    seed.name,
                    seed.region,
                    fmt::float(cell.ratio),
                    cell.horizon,
                    fmt::float(series.average),
                    band_label(series.average)
                ),
                false,
            ),
            Err(e) => (
                format!(
                    "{},{},{},{},,,{}\n",
                    seed.name,
                    seed.region,
                    fmt::float(cell.ratio),
                    cell.horizon,
                    sanitize(&e)
                ),
                true,
            ),
        }
    });
    table_report(
        "seed,region,ratio,horizon,avg_fidelity,band,note\n",
        rows,
    )
}

/// Average survival probability of the first fundamental quasienergy
/// state, sampled at every step over `horizon` almost-periods.
pub fn survival_table(cfg: &ExperimentConfig, method: MethodChoice, parallel: bool) -> RunReport {
    let flow = cfg.flow_spec();
    let cells = grid(cfg);
    let rows = map_rows(&cells, parallel, |cell| {
        let seed = &cfg.seeds[cell.seed];
        let eps = cfg.seed_epsilon(seed);
        let sys = cfg.build_system(cell.ratio);
        let outcome = build_heff(cfg, &sys, &flow, &seed.point(), eps, method).and_then(|heff| {
            let series = survival_probability(
                &sys,
                &flow,
                &seed.point(),
                &heff.states[0],
                cell.horizon * heff.p,
            )?;
            Ok(series.iter().sum::<f64>() / series.len() as f64)
        });
        match outcome {
            Ok(avg) => (
                format!(
                    "{},{},{},{},{},{},\n",
                    seed.name,
                    seed.region,
                    fmt::float(cell.ratio),
                    cell.horizon,
                    fmt::float(avg),
                    band_label(avg)
                ),
                false,
            ),
            Err(e) => (
                format!(
                    "{},{},{},{},,,{}\n",
                    seed.name,
                    seed.region,
                    fmt::float(cell.ratio),
                    cell.horizon,
                    sanitize(&e)
                ),
                true,
            ),
        }
    });
    table_report(
        "seed,region,ratio,horizon,avg_survival,band,note\n",
        rows,
    )
}

/// Exact-vs-effective overlay series for one seed at one ratio.
pub fn overlay_run(
    cfg: &ExperimentConfig,
    seed_name: &str,
    ratio: f64,
    periods: usize,
    method: MethodChoice,
) -> Result<String> {
    let seed = cfg.find_seed(seed_name)?;
    let eps = cfg.seed_epsilon(seed);
    let flow = cfg.flow_spec();
    let sys = cfg.build_system(ratio);
    let heff = build_heff(cfg, &sys, &flow, &seed.point(), eps, method)?;
    let (exact, effective) =
        effective_overlay(&sys, &flow, &seed.point(), &heff, &cfg.initial_vector(), periods * heff.p)?;
    Ok(overlay_csv(&exact, &effective))
}

/// Build the configured multi-orbit ensemble and evolve it twice: once
/// from the per-copy quasienergy states and once from `|0>` everywhere.
/// Returns the two CSV series (quasienergy-initialized, zero-initialized).
pub fn ensemble_run(cfg: &ExperimentConfig, ratio: Option<f64>) -> Result<(String, String)> {
    if cfg.ensemble.seeds.is_empty() {
        return Err(Error::Config("ensemble has no member orbits".into()));
    }
    let flow = cfg.flow_spec();
    let sys = cfg.build_system(ratio.unwrap_or(cfg.ensemble.ratio));
    let mut quasi_members: Vec<(PhasePoint, CVector)> = Vec::new();
    let mut zero_members: Vec<(PhasePoint, CVector)> = Vec::new();
    let zero = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let mut max_p = 1usize;
    for name in &cfg.ensemble.seeds {
        let seed = cfg.find_seed(name)?;
        let eps = cfg
            .ensemble
            .epsilon_overrides
            .get(name)
            .copied()
            .unwrap_or_else(|| cfg.seed_epsilon(seed));
        let rec = first_recurrence(&flow, &seed.point(), eps, cfg.run.recurrence_limit)?;
        let heff = first_recurrence_heff_at(&sys, &flow, &seed.point(), &rec)?
            .with_orbit_states(&sys, &flow)?;
        max_p = max_p.max(heff.p);
        let orbit = Orbit::generate(&flow, seed.point(), heff.p)?;
        let states = heff.orbit_states.as_ref().expect("states just attached");
        for (m, theta) in orbit.points.iter().enumerate() {
            quasi_members.push((*theta, states[m][0].clone()));
            zero_members.push((*theta, zero.clone()));
        }
    }
    let steps = cfg.ensemble.periods * max_p;
    let quasi = ensemble_evolve(&sys, &flow, &EnsembleState::new(quasi_members)?, steps)?;
    let zero = ensemble_evolve(&sys, &flow, &EnsembleState::new(zero_members)?, steps)?;
    Ok((quasi.csv(), zero.csv()))
}

/// Write a CSV next to the other outputs, creating the directory.
pub fn write_csv(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::paper_default();
        cfg.run.ratios = vec![0.04, 3.4];
        cfg.run.horizons = vec![3];
        cfg.seeds.retain(|s| ["e0", "e4", "e8"].contains(&s.name.as_str()));
        cfg.ensemble.seeds = vec!["e8".into()];
        cfg
    }

    #[test]
    fn default_config_parses_and_roundtrips() {
        let cfg = ExperimentConfig::paper_default();
        assert_eq!(cfg.seeds.len(), 9);
        assert_eq!(cfg.run.ratios.len(), 9);
        let text = cfg.to_toml_string();
        let again = ExperimentConfig::from_toml_str(&text).unwrap();
        let twice = again.to_toml_string();
        assert_eq!(text, twice, "serialize-parse-serialize must be stable");
        assert_eq!(cfg.seeds[0].name, again.seeds[0].name);
        assert_eq!(cfg.run.ratios, again.run.ratios);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = ExperimentConfig::paper_default();
        cfg.run.epsilon = -1.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::paper_default();
        cfg.seeds.clear();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::paper_default();
        cfg.system.model = "other".into();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn orbit_report_contains_expected_rows() {
        let mut cfg = ExperimentConfig::paper_default();
        cfg.seeds.retain(|s| ["e0", "e8"].contains(&s.name.as_str()));
        let report = orbit_report(&cfg, false);
        assert_eq!(report.failures, 0);
        let lines: Vec<&str> = report.csv.lines().collect();
        assert_eq!(lines[0], "label,p,diameter,lyapunov,region,note");
        assert!(lines[1].starts_with("e0,734,"));
        assert!(lines[2].starts_with("e8,26,"));
        // Island orbits report a vanishing Lyapunov exponent.
        assert!(lines[2].contains(",0.00000000000000e0,"));
    }

    #[test]
    fn orbit_report_marks_unreachable_recurrences() {
        // An accuracy no chaotic orbit reaches within the step cap: the
        // row carries the diagnostic and the run keeps going.
        let mut cfg = ExperimentConfig::paper_default();
        cfg.run.recurrence_limit = 2_000;
        cfg.seeds.retain(|s| ["e0", "e8"].contains(&s.name.as_str()));
        cfg.seeds[0].epsilon = Some(1e-6);
        let report = orbit_report(&cfg, false);
        assert_eq!(report.failures, 1);
        let lines: Vec<&str> = report.csv.lines().collect();
        assert!(lines[1].starts_with("e0,,,,"), "bad row: {}", lines[1]);
        assert!(lines[1].contains("no recurrence"));
        assert!(lines[2].starts_with("e8,26,"), "healthy row must survive");
    }

    #[test]
    fn identity_flow_reports_unit_period() {
        let mut cfg = ExperimentConfig::paper_default();
        cfg.flow.kind = FlowKind::Identity;
        cfg.seeds.truncate(1);
        let report = orbit_report(&cfg, false);
        assert!(report.csv.lines().nth(1).unwrap().starts_with("e0,1,"));
    }

    #[test]
    fn tables_are_deterministic_and_parallel_safe() {
        let cfg = small_config();
        let serial = fidelity_table(&cfg, MethodChoice::FirstRecurrence, false);
        let parallel = fidelity_table(&cfg, MethodChoice::FirstRecurrence, true);
        let again = fidelity_table(&cfg, MethodChoice::FirstRecurrence, true);
        assert_eq!(serial.csv, parallel.csv);
        assert_eq!(parallel.csv, again.csv);
        assert_eq!(serial.failures, 0);
    }

    #[test]
    fn fidelity_table_has_exact_cyclic_pattern() {
        // The exact 2-cycle earns the top band in every column.
        let mut cfg = ExperimentConfig::paper_default();
        cfg.seeds = vec![SeedSpec {
            name: "cycle".into(),
            region: "two-cycle".into(),
            theta: [std::f64::consts::PI, 0.0],
            epsilon: None,
        }];
        cfg.run.horizons = vec![12];
        let report = fidelity_table(&cfg, MethodChoice::FirstRecurrence, false);
        assert_eq!(report.failures, 0);
        for line in report.csv.lines().skip(1) {
            assert!(line.contains(",good,"), "unexpected band in {line}");
        }
    }

    #[test]
    fn survival_table_runs_clean() {
        let cfg = small_config();
        let report = survival_table(&cfg, MethodChoice::FirstRecurrence, true);
        assert_eq!(report.failures, 0);
        assert_eq!(
            report.csv.lines().count(),
            1 + cfg.seeds.len() * cfg.run.ratios.len() * cfg.run.horizons.len()
        );
    }

    #[test]
    fn phase_portrait_shape() {
        let mut cfg = ExperimentConfig::paper_default();
        cfg.run.portrait_steps = 5;
        cfg.seeds.truncate(2);
        let csv = phase_portrait(&cfg).unwrap();
        assert_eq!(csv.lines().count(), 1 + 2 * 5);
        assert!(csv.starts_with("seed_index,n,theta1,theta2\n"));
    }

    #[test]
    fn effham_export_works_for_every_method() {
        let cfg = small_config();
        for method in [
            MethodChoice::FirstRecurrence,
            MethodChoice::Koopman,
            MethodChoice::BchHigh1,
            MethodChoice::BchHigh2,
            MethodChoice::BchHigh3,
        ] {
            let csv = effham_export(&cfg, "e8", 0.04, None, method).unwrap();
            assert_eq!(csv.lines().count(), 3, "method {method:?}");
        }
    }

    #[test]
    fn ensemble_requires_members() {
        let mut cfg = small_config();
        cfg.ensemble.seeds.clear();
        assert!(matches!(ensemble_run(&cfg, None), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_seed_is_a_config_error() {
        let cfg = small_config();
        assert!(matches!(
            effham_export(&cfg, "nope", 0.04, None, MethodChoice::FirstRecurrence),
            Err(Error::Config(_))
        ));
    }
}
