//! Effective Hamiltonians for the driven system.
//!
//! Four constructions are provided, all returning an
//! [`EffectiveHamiltonian`]:
//!
//! * [`first_recurrence_heff`]: Hermitian p-th root of the monodromy over
//!   one almost-period, with quasienergies on the principal branch
//!   `(-π/p, π/p]`;
//! * [`koopman_heff`]: spectral filtering of the dense block-cyclic
//!   Koopman matrix built on the ε-orbit;
//! * [`bch_low_heff`]: low-frequency Baker-Campbell-Hausdorff expansion
//!   around the free evolution;
//! * [`bch_high1_heff`] / [`bch_high2_heff`] / [`bch_high3_heff`]: the
//!   three high-frequency expansions (first order, commuting interactions,
//!   commuting part plus small remainder).
//!
//! The module also carries the scalar BCH kernel `x ↦ x/(1-e^{-x})`, its
//! operator form on the adjoint action, and the first-order recurrence
//! defect that relates the finite-accuracy construction to the ideal one.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::flows::{
    first_recurrence, wrap_symmetric, FlowSpec, Orbit, PhasePoint, RecurrenceRecord,
    DEFAULT_RECURRENCE_LIMIT,
};
use crate::fmt;
use crate::quantum::{
    ensure_hermitian, ensure_unitary, hermitian_eigen, propagate, CMatrix, CVector,
    DrivenSystem,
};

/// Largest dense Koopman matrix order assembled by default.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Proximity of a phase to a nonzero multiple of 2π that is declared a
/// resonance by the BCH constructions.
pub const RESONANCE_TOL: f64 = 1e-6;

/// Proximity to a kernel pole that makes [`bch_kernel`] fail.
const KERNEL_POLE_TOL: f64 = 1e-8;

/// Minimum circular separation between quasienergy residue families in the
/// Koopman spectral filtering.
const RESIDUE_GAP_TOL: f64 = 1e-6;

/// Eigenvalue clustering tolerance of the unitary eigensolver.
const UNITARY_CLUSTER_TOL: f64 = 1e-8;

/// How the effective Hamiltonian was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    FirstRecurrence,
    Koopman,
    BchLow,
    BchHigh1,
    BchHigh2,
    BchHigh3,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::FirstRecurrence => "froot",
            Method::Koopman => "koopman",
            Method::BchLow => "bch-low",
            Method::BchHigh1 => "bch-high1",
            Method::BchHigh2 => "bch-high2",
            Method::BchHigh3 => "bch-high3",
        }
    }
}

/// A Hermitian generator of the stroboscopic dynamics, together with its
/// quasienergies and quasienergy states at the orbit seed.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    /// Hermitian generator; equals `Σ_i χ_i |Z_i><Z_i|`.
    pub h: CMatrix,
    /// Quasienergies (phase per step), ascending.
    pub quasienergies: Vec<f64>,
    /// Quasienergy states at `theta_ref`, one per quasienergy.
    pub states: Vec<CVector>,
    /// Orbit seed the construction was anchored at.
    pub theta_ref: PhasePoint,
    /// Almost-period used by the construction.
    pub p: usize,
    /// Recurrence accuracy, when a recurrence search was involved.
    pub epsilon: Option<f64>,
    pub method: Method,
    /// Instance of the construction's error bound (order of magnitude).
    pub error_estimate: f64,
    /// Quasienergy states at every orbit point: `orbit_states[n][i]` is the
    /// i-th state at `φⁿ(θ)`. Populated by the Koopman route or by
    /// [`EffectiveHamiltonian::with_orbit_states`].
    pub orbit_states: Option<Vec<Vec<CVector>>>,
}

impl EffectiveHamiltonian {
    /// Build the spectral data from a Hermitian generator.
    fn from_h(
        h: CMatrix,
        theta_ref: PhasePoint,
        p: usize,
        epsilon: Option<f64>,
        method: Method,
        error_estimate: f64,
    ) -> Result<Self> {
        let (vals, vecs) = hermitian_eigen(&h)?;
        let states = vecs.column_iter().map(|c| c.into_owned()).collect();
        Ok(Self {
            h,
            quasienergies: vals,
            states,
            theta_ref,
            p,
            epsilon,
            method,
            error_estimate,
            orbit_states: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// `exp(-i·steps·H)` from the stored spectral data; negative `steps`
    /// gives the inverse evolution.
    pub fn evolution(&self, steps: f64) -> CMatrix {
        let n = self.dim();
        let mut u = CMatrix::zeros(n, n);
        for (chi, z) in self.quasienergies.iter().zip(self.states.iter()) {
            let phase = C64::from_polar(1.0, -steps * chi);
            for i in 0..n {
                for j in 0..n {
                    u[(i, j)] += phase * z[i] * z[j].conj();
                }
            }
        }
        u
    }

    /// Extend the quasienergy states over the whole ε-orbit with the
    /// defining chain relation `|Z, φ(θ)> = e^{iχ} U(θ) |Z, θ>`.
    pub fn with_orbit_states(mut self, sys: &DrivenSystem, flow: &FlowSpec) -> Result<Self> {
        let mut all = Vec::with_capacity(self.p);
        all.push(self.states.clone());
        let mut theta = self.theta_ref;
        for _ in 1..self.p {
            let u = sys.step_unitary(&theta)?;
            let prev = all.last().expect("at least the seed states");
            let next: Vec<CVector> = prev
                .iter()
                .zip(self.quasienergies.iter())
                .map(|(z, chi)| &u * z * C64::from_polar(1.0, *chi))
                .collect();
            all.push(next);
            theta = flow.step(&theta)?;
        }
        self.orbit_states = Some(all);
        Ok(self)
    }

    /// Quasienergy table as CSV (`method,i,chi,re_*,im_*`).
    pub fn csv(&self) -> String {
        let dim = self.dim();
        let mut out = String::from("method,i,chi");
        for k in 0..dim {
            out.push_str(&format!(",re_{k}"));
        }
        for k in 0..dim {
            out.push_str(&format!(",im_{k}"));
        }
        out.push('\n');
        for (i, (chi, z)) in self
            .quasienergies
            .iter()
            .zip(self.states.iter())
            .enumerate()
        {
            out.push_str(&format!("{},{},{}", self.method.label(), i, fmt::float(*chi)));
            for k in 0..dim {
                out.push_str(&format!(",{}", fmt::float(z[k].re)));
            }
            for k in 0..dim {
                out.push_str(&format!(",{}", fmt::float(z[k].im)));
            }
            out.push('\n');
        }
        out
    }
}

/// Ordered product of step unitaries over one almost-period:
/// `U(φ^{p-1}(θ₀))···U(θ₀)`.
pub fn monodromy(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
) -> Result<CMatrix> {
    assert!(p >= 1, "monodromy needs at least one factor");
    propagate(sys, flow, theta0, p)
}

/// Eigendecomposition of a unitary matrix.
///
/// Splits `U = A + iB` into its commuting Hermitian and anti-Hermitian
/// parts, diagonalizes `A` by Jacobi rotations and refines degenerate
/// clusters with `B` (which separates the `e^{±iφ}` pairs that collide in
/// `A`). Eigenvalues are renormalized to unit modulus and sorted by phase;
/// eigenvectors are orthonormal, including inside degenerate clusters.
pub fn unitary_eigen(u: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    ensure_unitary(u, 1e-8)?;
    let n = u.nrows();
    let half = C64::new(0.5, 0.0);
    let a = (u + u.adjoint()) * half;
    let b = (u - u.adjoint()) * C64::new(0.0, -0.5);
    let (a_vals, mut q) = hermitian_eigen(&a)?;

    // Refine clusters of A-eigenvalues with B.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (a_vals[end] - a_vals[end - 1]).abs() <= UNITARY_CLUSTER_TOL {
            end += 1;
        }
        if end - start > 1 {
            let qc = q.columns_range(start..end).into_owned();
            let b_sub = qc.adjoint() * &b * &qc;
            let (_, r) = hermitian_eigen(&b_sub)?;
            let refined = qc * r;
            for (offset, col) in refined.column_iter().enumerate() {
                q.set_column(start + offset, &col);
            }
        }
        start = end;
    }

    // Unit-modulus eigenvalues from Rayleigh quotients.
    let mut pairs: Vec<(C64, usize)> = Vec::with_capacity(n);
    for (k, col) in q.column_iter().enumerate() {
        let uv = u * col;
        let lambda = col.dotc(&uv);
        let lambda = if lambda.norm() > 0.0 {
            lambda / lambda.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        pairs.push((lambda, k));
    }
    pairs.sort_by(|x, y| x.0.arg().total_cmp(&y.0.arg()).then(x.1.cmp(&y.1)));
    let eigenvalues: Vec<C64> = pairs.iter().map(|(l, _)| *l).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, (_, src)) in pairs.iter().enumerate() {
        vectors.set_column(dst, &q.column(*src));
    }
    crate::quantum::fix_column_phases(&mut vectors);

    let lambda_diag = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            eigenvalues[i]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let residual = (u * &vectors - &vectors * lambda_diag).norm();
    if residual > 1e-9 * n as f64 {
        return Err(Error::EigenConvergence { residual });
    }
    Ok((eigenvalues, vectors))
}

/// First-recurrence effective Hamiltonian: the Hermitian p-th root of the
/// monodromy, with each eigenphase taken on the principal branch so that
/// the quasienergies land in `(-π/p, π/p]`.
pub fn first_recurrence_heff(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
) -> Result<EffectiveHamiltonian> {
    let rec = first_recurrence(flow, theta0, epsilon, DEFAULT_RECURRENCE_LIMIT)?;
    first_recurrence_heff_at(sys, flow, theta0, &rec)
}

/// Same as [`first_recurrence_heff`] with a recurrence already in hand.
pub fn first_recurrence_heff_at(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    rec: &RecurrenceRecord,
) -> Result<EffectiveHamiltonian> {
    let m = monodromy(sys, flow, theta0, rec.p)?;
    let (lambdas, vecs) = unitary_eigen(&m)?;
    let dim = sys.dim();
    let p = rec.p as f64;
    let mut entries: Vec<(f64, CVector)> = lambdas
        .iter()
        .zip(vecs.column_iter())
        .map(|(l, v)| (wrap_symmetric(-l.arg()) / p, v.into_owned()))
        .collect();
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut h = CMatrix::zeros(dim, dim);
    for (chi, z) in &entries {
        for i in 0..dim {
            for j in 0..dim {
                h[(i, j)] += C64::new(*chi, 0.0) * z[i] * z[j].conj();
            }
        }
    }
    Ok(EffectiveHamiltonian {
        h,
        quasienergies: entries.iter().map(|(chi, _)| *chi).collect(),
        states: entries.into_iter().map(|(_, z)| z).collect(),
        theta_ref: *theta0,
        p: rec.p,
        epsilon: Some(rec.epsilon),
        method: Method::FirstRecurrence,
        error_estimate: rec.displacement_norm() / p,
        orbit_states: None,
    })
}

/// The Koopman step operator restricted to an ε-orbit: a block-cyclic
/// unitary of order `p·dim H` with the step unitaries on the block
/// subdiagonal and the wraparound block in the top-right corner.
#[derive(Clone, Debug)]
pub struct KoopmanMatrix {
    pub p: usize,
    pub dim_h: usize,
    /// `blocks[n] = U(φⁿ(θ₀))`.
    pub blocks: Vec<CMatrix>,
    pub rec: RecurrenceRecord,
}

impl KoopmanMatrix {
    pub fn order(&self) -> usize {
        self.p * self.dim_h
    }

    /// Assemble the dense matrix `Σ_n U(θ_n) ⊗ |θ_{n+1}><θ_n|`.
    pub fn assemble(&self) -> CMatrix {
        let d = self.dim_h;
        let n = self.order();
        let mut m = CMatrix::zeros(n, n);
        for (site, block) in self.blocks.iter().enumerate() {
            let dst = (site + 1) % self.p;
            for i in 0..d {
                for j in 0..d {
                    m[(dst * d + i, site * d + j)] = block[(i, j)];
                }
            }
        }
        m
    }
}

/// Build the Koopman matrix of the ε-orbit of `theta0`, refusing orders
/// beyond [`DEFAULT_DENSE_LIMIT`].
pub fn koopman_matrix(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
) -> Result<KoopmanMatrix> {
    koopman_matrix_with_limit(sys, flow, theta0, epsilon, DEFAULT_DENSE_LIMIT)
}

/// Same as [`koopman_matrix`] with an explicit dense size limit.
pub fn koopman_matrix_with_limit(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
    dense_limit: usize,
) -> Result<KoopmanMatrix> {
    let rec = first_recurrence(flow, theta0, epsilon, DEFAULT_RECURRENCE_LIMIT)?;
    let size = rec.p * sys.dim();
    if size > dense_limit {
        return Err(Error::Capacity {
            size,
            limit: dense_limit,
        });
    }
    let orbit = Orbit::generate(flow, *theta0, rec.p)?;
    let blocks = orbit
        .points
        .iter()
        .map(|theta| sys.step_unitary(theta))
        .collect::<Result<Vec<_>>>()?;
    Ok(KoopmanMatrix {
        p: rec.p,
        dim_h: sys.dim(),
        blocks,
        rec,
    })
}

/// Effective Hamiltonian from the dense Koopman route.
///
/// The `p·dim H` eigenphases of the assembled matrix fall into `dim H`
/// residue families modulo the gauge step `2π/p`; one fundamental
/// quasienergy is selected per family on the principal branch, and the
/// per-site slices of the matching eigenvector provide the quasienergy
/// states at every orbit point.
pub fn koopman_heff(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    epsilon: f64,
) -> Result<EffectiveHamiltonian> {
    let km = koopman_matrix(sys, flow, theta0, epsilon)?;
    koopman_heff_from(theta0, &km)
}

/// Spectral filtering of an already assembled Koopman matrix.
pub fn koopman_heff_from(theta0: &PhasePoint, km: &KoopmanMatrix) -> Result<EffectiveHamiltonian> {
    let dense = km.assemble();
    let (lambdas, vectors) = unitary_eigen(&dense)?;
    let d = km.dim_h;
    let p = km.p;
    let total = p * d;
    let gauge = TAU / p as f64;

    // Residues of the eigenphases modulo the gauge step.
    let phases: Vec<f64> = lambdas.iter().map(|l| wrap_symmetric(-l.arg())).collect();
    let mut order: Vec<usize> = (0..total).collect();
    let residues: Vec<f64> = phases.iter().map(|chi| chi.rem_euclid(gauge)).collect();
    order.sort_by(|&i, &j| residues[i].total_cmp(&residues[j]));

    // Split the residue circle at the d largest gaps.
    let mut gaps: Vec<(f64, usize)> = (0..total)
        .map(|k| {
            let here = residues[order[k]];
            let next = residues[order[(k + 1) % total]] + if k + 1 == total { gauge } else { 0.0 };
            (next - here, k)
        })
        .collect();
    gaps.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let min_family_gap = gaps[d.min(gaps.len()) - 1].0;
    if min_family_gap < RESIDUE_GAP_TOL {
        return Err(Error::Degeneracy(format!(
            "residue families separated by only {min_family_gap:.3e} \
             (need {RESIDUE_GAP_TOL:.0e}); quasienergies differ by a gauge multiple"
        )));
    }
    let mut boundaries: Vec<usize> = gaps[..d].iter().map(|&(_, k)| (k + 1) % total).collect();
    boundaries.sort_unstable();

    let mut families: Vec<Vec<usize>> = Vec::with_capacity(d);
    for w in 0..d {
        let begin = boundaries[w];
        let end = boundaries[(w + 1) % d];
        let mut members = Vec::new();
        let mut k = begin;
        loop {
            members.push(order[k]);
            k = (k + 1) % total;
            if k == end {
                break;
            }
        }
        families.push(members);
    }
    for fam in &families {
        if fam.len() != p {
            return Err(Error::Degeneracy(format!(
                "residue family with {} members instead of the almost-period {p}",
                fam.len()
            )));
        }
    }

    // One fundamental quasienergy per family, on the principal branch.
    let mut selected: Vec<(f64, usize)> = Vec::with_capacity(d);
    for fam in &families {
        let mut mu = C64::new(0.0, 0.0);
        for &a in fam {
            mu += lambdas[a].powu(p as u32);
        }
        let chi_fund = wrap_symmetric(-mu.arg()) / p as f64;
        let best = fam
            .iter()
            .copied()
            .min_by(|&x, &y| {
                let dx = wrap_symmetric(phases[x] - chi_fund).abs();
                let dy = wrap_symmetric(phases[y] - chi_fund).abs();
                dx.total_cmp(&dy).then(x.cmp(&y))
            })
            .expect("families are nonempty");
        selected.push((chi_fund, best));
    }
    selected.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Per-site slices of the selected eigenvectors, uniformly renormalized
    // (the slices of a Koopman eigenvector all share the same norm, so one
    // real factor per site keeps the chain relation intact).
    let mut orbit_states: Vec<Vec<CVector>> = vec![Vec::with_capacity(d); p];
    let mut quasienergies = Vec::with_capacity(d);
    for &(chi, a) in &selected {
        quasienergies.push(chi);
        let col = vectors.column(a);
        let mut slices: Vec<CVector> = (0..p)
            .map(|site| {
                let mut z = CVector::zeros(d);
                for i in 0..d {
                    z[i] = col[site * d + i];
                }
                let norm = z.norm();
                if norm > 0.0 {
                    z /= C64::new(norm, 0.0);
                }
                z
            })
            .collect();
        // One global phase so the seed slice carries the standard
        // convention; applied to the whole chain.
        let (mut best_i, mut best_mag) = (0usize, 0.0f64);
        for (i, z) in slices[0].iter().enumerate() {
            if z.norm() > best_mag + 1e-15 {
                best_mag = z.norm();
                best_i = i;
            }
        }
        if best_mag > 0.0 {
            let correction = (slices[0][best_i] / C64::new(best_mag, 0.0)).conj();
            for z in slices.iter_mut() {
                *z *= correction;
            }
        }
        for (site, z) in slices.into_iter().enumerate() {
            orbit_states[site].push(z);
        }
    }

    let states: Vec<CVector> = orbit_states[0].clone();
    let mut h = CMatrix::zeros(d, d);
    for (chi, z) in quasienergies.iter().zip(states.iter()) {
        for i in 0..d {
            for j in 0..d {
                h[(i, j)] += C64::new(*chi, 0.0) * z[i] * z[j].conj();
            }
        }
    }
    Ok(EffectiveHamiltonian {
        h,
        quasienergies,
        states,
        theta_ref: *theta0,
        p,
        epsilon: Some(km.rec.epsilon),
        method: Method::Koopman,
        error_estimate: km.rec.displacement_norm(),
        orbit_states: Some(orbit_states),
    })
}

/// The scalar Baker-Campbell-Hausdorff kernel `f(x) = x/(1-e^{-x})`,
/// analytically continued through `f(0) = 1`.
///
/// Fails within [`KERNEL_POLE_TOL`] of the nonzero poles `2πi·k`.
pub fn bch_kernel(x: C64) -> Result<C64> {
    let k = (x.im / TAU).round();
    if k != 0.0 {
        let distance = (x - C64::new(0.0, k * TAU)).norm();
        if distance < KERNEL_POLE_TOL {
            return Err(Error::KernelPole {
                pole_index: k as i64,
                distance,
            });
        }
    }
    if x.norm() < 1e-4 {
        // Bernoulli series; the truncation error is far below rounding at
        // this magnitude.
        let x2 = x * x;
        Ok(C64::new(1.0, 0.0) + x * 0.5 + x2 / 12.0 - x2 * x2 / 720.0)
    } else {
        Ok(x / (C64::new(1.0, 0.0) - (-x).exp()))
    }
}

/// Apply `f(ad_X)` (or its inverse) to `Y` for anti-Hermitian `X`.
///
/// In the eigenbasis of `X = i·S` the adjoint action is diagonal, so the
/// result is the entrywise product with `f(x_j - x_k)`.
pub fn apply_bch_ad(x: &CMatrix, y: &CMatrix, inverse: bool) -> Result<CMatrix> {
    let s = x * C64::new(0.0, -1.0); // X = i·S with S Hermitian
    ensure_hermitian(&s, 1e-10)?;
    if x.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(Error::Dimension(format!(
            "apply_bch_ad: X is {}x{} but Y is {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    let (sigma, q) = hermitian_eigen(&s)?;
    let n = sigma.len();
    let mut y_t = q.adjoint() * y * &q;
    for j in 0..n {
        for k in 0..n {
            let diff = C64::new(0.0, sigma[j] - sigma[k]);
            let factor = bch_kernel(diff).map_err(|e| match e {
                Error::KernelPole { .. } => Error::Resonance {
                    i: j,
                    j: k,
                    phase: sigma[j] - sigma[k],
                },
                other => other,
            })?;
            y_t[(j, k)] *= if inverse {
                C64::new(1.0, 0.0) / factor
            } else {
                factor
            };
        }
    }
    Ok(&q * y_t * q.adjoint())
}

/// Fail if `scale·(vals_i - vals_j)` sits within `tol` of a nonzero
/// multiple of 2π for some eigenvalue pair.
fn check_resonances(vals: &[f64], scale: f64, tol: f64) -> Result<()> {
    for i in 0..vals.len() {
        for j in 0..vals.len() {
            if i == j {
                continue;
            }
            let y = scale * (vals[i] - vals[j]);
            let k = (y / TAU).round();
            if k != 0.0 && (y - k * TAU).abs() < tol {
                return Err(Error::Resonance { i, j, phase: y });
            }
        }
    }
    Ok(())
}

/// `max_{i≠j} |f(i·scale·(vals_i - vals_j))|` by brute-force pair scan;
/// 1 when there is no pair.
fn max_kernel_gain(vals: &[f64], scale: f64) -> f64 {
    let mut best = 1.0f64;
    for i in 0..vals.len() {
        for j in 0..vals.len() {
            if i == j {
                continue;
            }
            let x = C64::new(0.0, scale * (vals[i] - vals[j]));
            if let Ok(f) = bch_kernel(x) {
                best = best.max(f.norm());
            }
        }
    }
    best
}

/// Largest spectral norm of the interaction along the orbit.
fn max_interaction_norm(interactions: &[CMatrix]) -> Result<f64> {
    let mut best = 0.0f64;
    for v in interactions {
        let (vals, _) = hermitian_eigen(v)?;
        for lam in vals {
            best = best.max(lam.abs());
        }
    }
    Ok(best)
}

/// Interaction operators along the first `p` orbit points.
fn interactions_along(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
) -> Result<Vec<CMatrix>> {
    let orbit = Orbit::generate(flow, *theta0, p)?;
    orbit
        .points
        .iter()
        .map(|theta| sys.interaction_at(theta))
        .collect()
}

/// Largest pairwise commutator norm `‖[V(θ_m), V(θ_n)]‖` along the orbit.
pub fn max_pairwise_commutator(interactions: &[CMatrix]) -> f64 {
    let mut best = 0.0f64;
    for m in 0..interactions.len() {
        for n in (m + 1)..interactions.len() {
            let c = &interactions[m] * &interactions[n] - &interactions[n] * &interactions[m];
            best = best.max(c.norm());
        }
    }
    best
}

/// Low-frequency BCH effective Hamiltonian:
/// `r·Ĥ + (1/p)·Σ_n f_{-i·p·r·Ĥ}[V_n]` with the interactions rotated into
/// the interaction picture of the free evolution.
pub fn bch_low_heff(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
) -> Result<EffectiveHamiltonian> {
    bch_low_heff_with_tolerance(sys, flow, theta0, p, RESONANCE_TOL)
}

/// [`bch_low_heff`] with an explicit resonance proximity threshold.
pub fn bch_low_heff_with_tolerance(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
    resonance_tol: f64,
) -> Result<EffectiveHamiltonian> {
    assert!(p >= 1);
    let r = sys.ratio();
    let (h_vals, q) = hermitian_eigen(sys.h_hat())?;
    check_resonances(&h_vals, p as f64 * r, resonance_tol)?;

    let interactions = interactions_along(sys, flow, theta0, p)?;
    let v_max = max_interaction_norm(&interactions)?;
    if v_max >= r {
        log::warn!(
            "low-frequency expansion with ‖V‖ = {v_max:.3e} not small against \
             the ratio {r:.3e}; the result is qualitative only"
        );
    }

    // Average of the interaction-picture kicks, in the eigenbasis of Ĥ.
    let dim = sys.dim();
    let mut avg = CMatrix::zeros(dim, dim);
    for (n, v) in interactions.iter().enumerate() {
        let v_t = q.adjoint() * v * &q;
        let phase_scale = n as f64 * r;
        for i in 0..dim {
            for j in 0..dim {
                let rot = C64::from_polar(1.0, phase_scale * (h_vals[i] - h_vals[j]));
                avg[(i, j)] += rot * v_t[(i, j)];
            }
        }
    }
    avg /= C64::new(p as f64, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            let x = C64::new(0.0, -(p as f64) * r * (h_vals[i] - h_vals[j]));
            avg[(i, j)] *= bch_kernel(x).map_err(|e| match e {
                Error::KernelPole { .. } => Error::Resonance {
                    i,
                    j,
                    phase: p as f64 * r * (h_vals[i] - h_vals[j]),
                },
                other => other,
            })?;
        }
    }
    let correction = &q * avg * q.adjoint();
    let h = sys.h_hat() * C64::new(r, 0.0) + &correction;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);

    let error_estimate = max_kernel_gain(&h_vals, p as f64 * r) * v_max * v_max;
    EffectiveHamiltonian::from_h(h, *theta0, p, None, Method::BchLow, error_estimate)
}

/// First-order high-frequency effective Hamiltonian:
/// `r·Ĥ + (1/p)·Σ_n V(φⁿ(θ))`.
pub fn bch_high1_heff(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
) -> Result<EffectiveHamiltonian> {
    assert!(p >= 1);
    let r = sys.ratio();
    let interactions = interactions_along(sys, flow, theta0, p)?;
    let dim = sys.dim();
    let mut avg = CMatrix::zeros(dim, dim);
    for v in &interactions {
        avg += v;
    }
    avg /= C64::new(p as f64, 0.0);
    let h = sys.h_hat() * C64::new(r, 0.0) + avg;
    EffectiveHamiltonian::from_h(h, *theta0, p, None, Method::BchHigh1, r * r)
}

/// High-frequency effective Hamiltonian for pairwise-commuting
/// interactions: the interaction average plus the free Hamiltonian dressed
/// through `f_{-i·ΣV}` in the kick-accumulated picture.
pub fn bch_high2_heff(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
) -> Result<EffectiveHamiltonian> {
    bch_high2_heff_with_tolerance(sys, flow, theta0, p, RESONANCE_TOL)
}

/// [`bch_high2_heff`] with an explicit resonance proximity threshold.
pub fn bch_high2_heff_with_tolerance(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
    resonance_tol: f64,
) -> Result<EffectiveHamiltonian> {
    let interactions = interactions_along(sys, flow, theta0, p)?;
    bch_high2_from(sys, theta0, p, &interactions, resonance_tol)
}

fn bch_high2_from(
    sys: &DrivenSystem,
    theta0: &PhasePoint,
    p: usize,
    interactions: &[CMatrix],
    resonance_tol: f64,
) -> Result<EffectiveHamiltonian> {
    assert!(p >= 1);
    let r = sys.ratio();
    let dim = sys.dim();
    let violation = max_pairwise_commutator(interactions);
    if violation > 1e-8 {
        log::warn!(
            "interactions along the orbit do not commute \
             (max commutator norm {violation:.3e}); proceeding anyway"
        );
    }

    let mut v_sum = CMatrix::zeros(dim, dim);
    let mut dressed_sum = CMatrix::zeros(dim, dim);
    for v in interactions {
        v_sum += v;
        // Kick accumulated up to and including this step.
        let g = crate::quantum::expm_hermitian(&v_sum, -1.0)?;
        dressed_sum += &g * sys.h_hat() * g.adjoint();
    }
    let v_avg = &v_sum / C64::new(p as f64, 0.0);
    let (nu, _) = hermitian_eigen(&v_avg)?;
    check_resonances(&nu, p as f64, resonance_tol)?;

    let x = &v_sum * C64::new(0.0, -1.0);
    let dressed = apply_bch_ad(&x, &dressed_sum, false)?;
    let h = &v_avg + dressed * C64::new(r / p as f64, 0.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let error_estimate = max_kernel_gain(&nu, p as f64) * r * r;
    EffectiveHamiltonian::from_h(h, *theta0, p, None, Method::BchHigh2, error_estimate)
}

/// High-frequency effective Hamiltonian for a split interaction
/// `V = v + W` with pairwise-commuting `v` and small `W`.
///
/// `v_part` supplies `v(θ)`; the remainder `W(θ) = V(θ) - v(θ)` is dressed
/// through `f⁻¹` before entering the commuting-part picture.
pub fn bch_high3_heff(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
    v_part: &dyn Fn(&PhasePoint) -> CMatrix,
) -> Result<EffectiveHamiltonian> {
    bch_high3_heff_with_tolerance(sys, flow, theta0, p, v_part, RESONANCE_TOL)
}

/// [`bch_high3_heff`] with an explicit resonance proximity threshold.
pub fn bch_high3_heff_with_tolerance(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    p: usize,
    v_part: &dyn Fn(&PhasePoint) -> CMatrix,
    resonance_tol: f64,
) -> Result<EffectiveHamiltonian> {
    assert!(p >= 1);
    let r = sys.ratio();
    let dim = sys.dim();
    let orbit = Orbit::generate(flow, *theta0, p)?;
    let mut commuting: Vec<CMatrix> = Vec::with_capacity(p);
    let mut remainders: Vec<CMatrix> = Vec::with_capacity(p);
    for theta in &orbit.points {
        let v_full = sys.interaction_at(theta)?;
        let v = v_part(theta);
        ensure_hermitian(&v, 1e-10)?;
        remainders.push(&v_full - &v);
        commuting.push(v);
    }
    let violation = max_pairwise_commutator(&commuting);
    if violation > 1e-8 {
        log::warn!(
            "commuting part of the split does not commute along the orbit \
             (max commutator norm {violation:.3e}); proceeding anyway"
        );
    }

    let mut v_sum = CMatrix::zeros(dim, dim);
    let mut k_sum = CMatrix::zeros(dim, dim);
    for (v, w) in commuting.iter().zip(remainders.iter()) {
        v_sum += v;
        let g = crate::quantum::expm_hermitian(&v_sum, -1.0)?;
        let dressed_h = &g * sys.h_hat() * g.adjoint();
        let dressed_w = &g * w * g.adjoint();
        let x_single = v * C64::new(0.0, -1.0);
        let w_term = apply_bch_ad(&x_single, &dressed_w, true)?;
        k_sum += dressed_h * C64::new(r, 0.0) + w_term;
    }
    let v_avg = &v_sum / C64::new(p as f64, 0.0);
    let (nu, _) = hermitian_eigen(&v_avg)?;
    check_resonances(&nu, p as f64, resonance_tol)?;

    let x = &v_sum * C64::new(0.0, -1.0);
    let dressed = apply_bch_ad(&x, &k_sum, false)?;
    let h = &v_avg + dressed * C64::new(1.0 / p as f64, 0.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let error_estimate = max_kernel_gain(&nu, p as f64) * r * r;
    EffectiveHamiltonian::from_h(h, *theta0, p, None, Method::BchHigh3, error_estimate)
}

/// First-order recurrence defect of a finite-accuracy effective
/// Hamiltonian.
#[derive(Clone, Debug)]
pub struct RecurrenceDefect {
    /// Contraction of the state-field derivative with the recurrence
    /// displacement, in the quasienergy basis: entry `(j, i)` is
    /// `<Z_j,θ| (|Z_i, φᵖ(θ)> - |Z_i, θ>)`.
    pub a_matrix: CMatrix,
    /// Same contraction after the gauge rescaling of the off-diagonal
    /// entries by `f(i·p·(χ_j - χ_i))`.
    pub rescaled: CMatrix,
    /// Reference quasienergies moved onto the smooth gauge branch (see
    /// [`recurrence_defect`]).
    pub aligned_quasienergies: Vec<f64>,
    /// Quasienergies corrected to first order in the displacement.
    pub corrected_quasienergies: Vec<f64>,
    /// Almost-period of the recurrence the defect was evaluated at.
    pub p: usize,
}

impl RecurrenceDefect {
    /// The Hermitian first-order shift `i·𝒜·ẽ/p` of the finite-accuracy
    /// Hamiltonian away from the reference one.
    pub fn hamiltonian_correction(&self) -> CMatrix {
        &self.rescaled * C64::new(0.0, 1.0 / self.p as f64)
    }

    /// Reference Hamiltonian rebuilt on the smooth gauge branch, using the
    /// seed states of `reference`.
    pub fn aligned_reference(&self, reference: &EffectiveHamiltonian) -> CMatrix {
        let dim = reference.dim();
        let mut h = CMatrix::zeros(dim, dim);
        for (chi, z) in self
            .aligned_quasienergies
            .iter()
            .zip(reference.states.iter())
        {
            for i in 0..dim {
                for j in 0..dim {
                    h[(i, j)] += C64::new(*chi, 0.0) * z[i] * z[j].conj();
                }
            }
        }
        h
    }
}

/// Estimate the first-order defect between a reference effective
/// Hamiltonian (with states over its whole orbit) and the coarser
/// recurrence `rec` of the same seed.
///
/// The state derivative is contracted only along the recurrence
/// displacement: the finite difference uses the stored state at orbit
/// index `rec.p`. When `rec` closes the stored orbit exactly the
/// difference wraps to the seed states and the defect vanishes.
///
/// The reference field carries its quasienergies on the principal branch,
/// which in general is not the branch on which the state field varies
/// slowly over the torus: transported states pick up a gauge wave
/// `e^{2πi·k·n/p_ref}` against the smooth field. Each state is therefore
/// snapped onto the gauge branch that minimizes its wraparound phase, and
/// the aligned quasienergies (`χ + 2πk/p_ref`) are reported alongside the
/// defect so residuals can be formed in one consistent gauge.
pub fn recurrence_defect(
    reference: &EffectiveHamiltonian,
    rec: &RecurrenceRecord,
) -> Result<RecurrenceDefect> {
    let orbit_states = reference
        .orbit_states
        .as_ref()
        .ok_or(Error::MissingOrbitStates { index: rec.p })?;
    if rec.p > orbit_states.len() {
        return Err(Error::MissingOrbitStates { index: rec.p });
    }
    let p_ref = orbit_states.len();
    let wrap_index = rec.p % p_ref;
    let seed = &orbit_states[0];
    let shifted = &orbit_states[wrap_index];
    let dim = reference.dim();

    // Per-state gauge alignment: pick the integer k whose gauge wave
    // cancels the bulk of the wraparound phase.
    let gauge = TAU / p_ref as f64;
    let mut aligned_quasienergies = Vec::with_capacity(dim);
    let mut adjusted: Vec<CVector> = Vec::with_capacity(dim);
    for i in 0..dim {
        let overlap = seed[i].dotc(&shifted[i]);
        if overlap.norm() < 0.8 {
            log::warn!(
                "wraparound overlap of quasienergy state {i} has modulus \
                 {:.3}; the state field mixes over one recurrence and the \
                 first-order defect is unreliable",
                overlap.norm()
            );
        }
        let mut best_k = 0i64;
        if wrap_index != 0 {
            let mut best = f64::INFINITY;
            let k_span = p_ref as i64;
            for k in -k_span..=k_span {
                let residual =
                    wrap_symmetric(overlap.arg() + gauge * k as f64 * wrap_index as f64).abs();
                if residual + 1e-15 < best {
                    best = residual;
                    best_k = k;
                }
            }
        }
        let wave = C64::from_polar(1.0, gauge * best_k as f64 * wrap_index as f64);
        adjusted.push(&shifted[i] * wave);
        aligned_quasienergies.push(reference.quasienergies[i] + gauge * best_k as f64);
    }

    let mut a = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            let diff = &adjusted[i] - &seed[i];
            a[(j, i)] = seed[j].dotc(&diff);
        }
    }

    let p = rec.p as f64;
    let chis = &aligned_quasienergies;
    let mut rescaled = a.clone();
    for j in 0..dim {
        for i in 0..dim {
            if i == j {
                continue;
            }
            let x = C64::new(0.0, p * (chis[j] - chis[i]));
            let factor = bch_kernel(x).map_err(|e| match e {
                Error::KernelPole { .. } => Error::Degeneracy(format!(
                    "quasienergies {j} and {i} are separated by a gauge multiple \
                     at p = {}: the defect rescaling has a pole",
                    rec.p
                )),
                other => other,
            })?;
            rescaled[(j, i)] *= factor;
        }
    }

    let corrected = chis
        .iter()
        .enumerate()
        .map(|(i, chi)| chi + (C64::new(0.0, 1.0) * a[(i, i)]).re / p)
        .collect();
    Ok(RecurrenceDefect {
        a_matrix: a,
        rescaled,
        aligned_quasienergies,
        corrected_quasienergies: corrected,
        p: rec.p,
    })
}

/// Rebuild the generator of `heff` with every quasienergy lifted, by
/// multiples of its own gauge step `2π/p`, onto the branch closest to the
/// matching target quasienergy. Targets are matched to states greedily by
/// overlap magnitude.
pub fn lift_to_gauge(heff: &EffectiveHamiltonian, targets: &[(f64, CVector)]) -> CMatrix {
    let dim = heff.dim();
    let gauge = TAU / heff.p as f64;
    let mut used = vec![false; targets.len()];
    let mut h = CMatrix::zeros(dim, dim);
    for (chi, z) in heff.quasienergies.iter().zip(heff.states.iter()) {
        let mut best: Option<(usize, f64)> = None;
        for (t, (_, target_state)) in targets.iter().enumerate() {
            if used[t] {
                continue;
            }
            let overlap = target_state.dotc(z).norm();
            if best.is_none_or(|(_, b)| overlap > b) {
                best = Some((t, overlap));
            }
        }
        let lifted = match best {
            Some((t, _)) => {
                used[t] = true;
                chi + gauge * ((targets[t].0 - chi) / gauge).round()
            }
            None => *chi,
        };
        for i in 0..dim {
            for j in 0..dim {
                h[(i, j)] += C64::new(lifted, 0.0) * z[i] * z[j].conj();
            }
        }
    }
    h
}

/// Gauge-aligned deviation of an effective Hamiltonian from the exact
/// monodromy it approximates.
///
/// The monodromy eigenphases are lifted to the branch closest to the
/// candidate's expectation values, so the distance is measured modulo the
/// gauge lattice `2π/p` instead of being dominated by branch mismatches.
pub fn deviation_from_monodromy(heff: &EffectiveHamiltonian, m: &CMatrix) -> Result<f64> {
    let (lambdas, vecs) = unitary_eigen(m)?;
    let dim = heff.dim();
    let p = heff.p as f64;
    let gauge = TAU / p;
    let mut aligned = CMatrix::zeros(dim, dim);
    for (lambda, v) in lambdas.iter().zip(vecs.column_iter()) {
        let base = wrap_symmetric(-lambda.arg()) / p;
        let hv = &heff.h * v;
        let target = v.dotc(&hv).re;
        let chi = base + gauge * ((target - base) / gauge).round();
        for i in 0..dim {
            for j in 0..dim {
                aligned[(i, j)] += C64::new(chi, 0.0) * v[i] * v[j].conj();
            }
        }
    }
    Ok((&heff.h - aligned).norm())
}
