//! Discrete measure-preserving dynamics on the 2-torus.
//!
//! The control parameters of the driven quantum system live on the torus
//! `T² = [0, 2π)²`. This module provides the flow maps (Chirikov standard
//! map, explicit cyclic lists, identity), orbit generation, Poincaré
//! first-recurrence search and per-orbit statistics (almost-period, mean
//! diameter, largest Lyapunov exponent).

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Default step limit for recurrence searches.
pub const DEFAULT_RECURRENCE_LIMIT: usize = 1_000_000;

/// Matching tolerance used to locate a point of a cyclic-list flow.
const CYCLIC_MATCH_TOL: f64 = 1e-9;

/// Lyapunov estimates below this value are reported as exactly zero.
const LYAPUNOV_CLAMP: f64 = 1e-3;

/// Tangent-vector renormalization interval for the Lyapunov iteration.
const LYAPUNOV_RENORM_EVERY: usize = 32;

/// Orbits longer than this are strided down for the pairwise diameter scan.
const DIAMETER_SCAN_CAP: usize = 4096;

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Reduce an angle difference into `(-π, π]`.
pub fn wrap_symmetric(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// A point of the torus, with both coordinates kept in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    theta1: f64,
    theta2: f64,
}

impl PhasePoint {
    /// Build a point, reducing both coordinates mod 2π.
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self {
            theta1: wrap_angle(theta1),
            theta2: wrap_angle(theta2),
        }
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Per-component displacement `self - other`, wrapped into `(-π, π]`.
    pub fn displacement_from(&self, other: &PhasePoint) -> [f64; 2] {
        [
            wrap_symmetric(self.theta1 - other.theta1),
            wrap_symmetric(self.theta2 - other.theta2),
        ]
    }

    /// Geodesic (wrapped Euclidean) distance on the torus.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        let [d1, d2] = self.displacement_from(other);
        d1.hypot(d2)
    }
}

/// The discrete flow driving the control parameters.
#[derive(Clone, Debug)]
pub enum FlowSpec {
    /// Chirikov standard map with stochasticity parameter `k`.
    StandardMap { k: f64 },
    /// Explicit cycle `points[i] -> points[(i+1) mod p]`; undefined elsewhere.
    CyclicList { points: Vec<PhasePoint> },
    /// Fixed control parameters.
    Identity,
}

impl FlowSpec {
    /// Convenience constructor for the standard map.
    pub fn standard_map(k: f64) -> Self {
        FlowSpec::StandardMap { k }
    }

    /// Convenience constructor for an explicit cycle.
    pub fn cyclic(points: Vec<PhasePoint>) -> Self {
        FlowSpec::CyclicList { points }
    }

    /// Index of `theta` in a cyclic list, within matching tolerance.
    fn cyclic_index(points: &[PhasePoint], theta: &PhasePoint) -> Result<usize> {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, q) in points.iter().enumerate() {
            let d = theta.distance(q);
            if d < best.1 {
                best = (i, d);
            }
        }
        if best.1 < CYCLIC_MATCH_TOL {
            Ok(best.0)
        } else {
            Err(Error::UndefinedFlowPoint {
                theta1: theta.theta1,
                theta2: theta.theta2,
            })
        }
    }

    /// One application of the flow map.
    pub fn step(&self, theta: &PhasePoint) -> Result<PhasePoint> {
        match self {
            FlowSpec::StandardMap { k } => {
                let kick = k * theta.theta2.sin();
                Ok(PhasePoint::new(
                    theta.theta1 + kick,
                    theta.theta1 + theta.theta2 + kick,
                ))
            }
            FlowSpec::CyclicList { points } => {
                let i = Self::cyclic_index(points, theta)?;
                Ok(points[(i + 1) % points.len()])
            }
            FlowSpec::Identity => Ok(*theta),
        }
    }

    /// Tangent map of the flow at `theta`, row-major.
    ///
    /// Only differentiable flow kinds are supported; the standard map has
    /// unit Jacobian determinant everywhere (it preserves `dθ¹dθ²`).
    pub fn jacobian(&self, theta: &PhasePoint) -> Result<[[f64; 2]; 2]> {
        match self {
            FlowSpec::StandardMap { k } => {
                let c = k * theta.theta2.cos();
                Ok([[1.0, c], [1.0, 1.0 + c]])
            }
            FlowSpec::Identity => Ok([[1.0, 0.0], [0.0, 1.0]]),
            FlowSpec::CyclicList { .. } => Err(Error::UnsupportedFlow(
                "cyclic-list flows have no tangent map",
            )),
        }
    }
}

/// A stored orbit segment `points[n] = φⁿ(seed)`.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub seed: PhasePoint,
    pub points: Vec<PhasePoint>,
    pub flow: FlowSpec,
}

impl Orbit {
    /// Generate the first `len` points of the orbit of `seed` (seed included).
    pub fn generate(flow: &FlowSpec, seed: PhasePoint, len: usize) -> Result<Self> {
        let mut points = Vec::with_capacity(len);
        let mut theta = seed;
        for _ in 0..len {
            points.push(theta);
            theta = flow.step(&theta)?;
        }
        Ok(Self {
            seed,
            points,
            flow: flow.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Outcome of a first-recurrence search.
#[derive(Clone, Copy, Debug)]
pub struct RecurrenceRecord {
    /// Recurrence accuracy the search was run with.
    pub epsilon: f64,
    /// Almost-period: smallest `p ≥ 1` with `d(φᵖ(θ₀), θ₀) < ε`.
    pub p: usize,
    /// Wrapped displacement `φᵖ(θ₀) − θ₀`, one component per torus angle.
    pub displacement: [f64; 2],
}

impl RecurrenceRecord {
    /// Euclidean norm of the wrapped displacement.
    pub fn displacement_norm(&self) -> f64 {
        self.displacement[0].hypot(self.displacement[1])
    }
}

/// Find the smallest `p` in `[1, n_max]` that brings the orbit back within
/// `epsilon` of its seed.
pub fn first_recurrence(
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
    n_max: usize,
) -> Result<RecurrenceRecord> {
    assert!(epsilon > 0.0, "recurrence accuracy must be positive");
    assert!(n_max >= 1, "recurrence search needs at least one step");
    let mut theta = *theta0;
    let mut min_distance = f64::INFINITY;
    for n in 1..=n_max {
        theta = flow.step(&theta)?;
        let d = theta.distance(theta0);
        if d < epsilon {
            return Ok(RecurrenceRecord {
                epsilon,
                p: n,
                displacement: theta.displacement_from(theta0),
            });
        }
        min_distance = min_distance.min(d);
    }
    Err(Error::NoRecurrence {
        n_max,
        min_distance,
    })
}

/// Per-orbit summary statistics.
#[derive(Clone, Copy, Debug)]
pub struct OrbitStats {
    /// Almost-period at the accuracy the stats were computed with.
    pub p: usize,
    /// Mean orbit diameter: average of the largest and smallest diameters
    /// of the almost-closed orbit (2π for an orbit filling the torus).
    pub diameter: f64,
    /// Largest Lyapunov exponent estimate, clamped to zero below 1e-3.
    pub lyapunov: f64,
}

/// Circular mean of a set of angles.
fn circular_mean(angles: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for a in angles {
        s += a.sin();
        c += a.cos();
    }
    wrap_angle(s.atan2(c))
}

/// Fraction of a 16×16 torus grid visited by the points.
///
/// The grid is coarse enough that one ε-orbit of a chaotic seed already
/// covers most of it, while an island loop only traces a thin band.
fn grid_occupancy(points: &[PhasePoint]) -> f64 {
    const N: usize = 16;
    let mut cells = vec![false; N * N];
    for q in points {
        let i = ((q.theta1 / TAU * N as f64) as usize).min(N - 1);
        let j = ((q.theta2 / TAU * N as f64) as usize).min(N - 1);
        cells[i * N + j] = true;
    }
    cells.iter().filter(|&&b| b).count() as f64 / (N * N) as f64
}

/// Mean diameter of an almost-closed orbit.
///
/// The orbit is unfolded around its circular centroid; the largest diameter
/// is the maximum pairwise separation of the unfolded points and the
/// smallest diameter is twice the closest approach to the centroid. An
/// orbit visiting more than half of the torus grid is reported with the
/// full-torus diameter 2π.
fn mean_diameter(points: &[PhasePoint]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    if grid_occupancy(points) > 0.5 {
        return TAU;
    }
    let c1 = circular_mean(points.iter().map(|q| q.theta1));
    let c2 = circular_mean(points.iter().map(|q| q.theta2));
    let unfolded: Vec<[f64; 2]> = points
        .iter()
        .map(|q| {
            [
                wrap_symmetric(q.theta1 - c1),
                wrap_symmetric(q.theta2 - c2),
            ]
        })
        .collect();
    let r_min = unfolded
        .iter()
        .map(|d| d[0].hypot(d[1]))
        .fold(f64::INFINITY, f64::min);
    // Pairwise scan, strided down for very long orbits.
    let stride = (unfolded.len() / DIAMETER_SCAN_CAP).max(1);
    let scan: Vec<&[f64; 2]> = unfolded.iter().step_by(stride).collect();
    let mut d_max: f64 = 0.0;
    for (i, a) in scan.iter().enumerate() {
        for b in scan.iter().skip(i + 1) {
            d_max = d_max.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    (d_max + 2.0 * r_min) / 2.0
}

/// Largest Lyapunov exponent from repeated tangent-map application with
/// periodic renormalization. Flows without a tangent map (explicit cycles)
/// are exactly periodic and report zero.
fn lyapunov_exponent(flow: &FlowSpec, theta0: &PhasePoint, n_lyap: usize) -> Result<f64> {
    if matches!(flow, FlowSpec::CyclicList { .. }) {
        return Ok(0.0);
    }
    let mut theta = *theta0;
    let mut v = [1.0_f64, 0.0_f64];
    let mut log_sum = 0.0;
    for n in 0..n_lyap {
        let j = flow.jacobian(&theta)?;
        v = [
            j[0][0] * v[0] + j[0][1] * v[1],
            j[1][0] * v[0] + j[1][1] * v[1],
        ];
        if (n + 1) % LYAPUNOV_RENORM_EVERY == 0 || n + 1 == n_lyap {
            let norm = v[0].hypot(v[1]);
            log_sum += norm.ln();
            v = [v[0] / norm, v[1] / norm];
        }
        theta = flow.step(&theta)?;
    }
    let estimate = log_sum / n_lyap as f64;
    Ok(if estimate < LYAPUNOV_CLAMP { 0.0 } else { estimate })
}

/// Almost-period, mean diameter and Lyapunov exponent of the orbit of
/// `theta0` at recurrence accuracy `epsilon`.
pub fn orbit_stats(
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
    n_lyap: usize,
) -> Result<OrbitStats> {
    orbit_stats_with_limit(flow, theta0, epsilon, n_lyap, DEFAULT_RECURRENCE_LIMIT)
}

/// [`orbit_stats`] with an explicit recurrence search cap.
pub fn orbit_stats_with_limit(
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
    n_lyap: usize,
    n_max: usize,
) -> Result<OrbitStats> {
    let rec = first_recurrence(flow, theta0, epsilon, n_max)?;
    let orbit = Orbit::generate(flow, *theta0, rec.p)?;
    let diameter = mean_diameter(&orbit.points);
    let lyapunov = lyapunov_exponent(flow, theta0, n_lyap)?;
    Ok(OrbitStats {
        p: rec.p,
        diameter,
        lyapunov,
    })
}
