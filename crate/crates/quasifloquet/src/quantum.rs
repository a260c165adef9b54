//! Finite-dimensional quantum operator algebra and step propagators.
//!
//! Matrices are dense complex `nalgebra` matrices. The Hermitian
//! eigensolver is a cyclic Jacobi iteration: the dimensions in play here
//! (a few, up to a few hundred for dense Koopman blocks) favour a robust
//! rotation scheme with a deterministic sweep order over raw speed.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::flows::{FlowSpec, PhasePoint};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Convergence threshold of the Jacobi sweeps, relative to the input norm.
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermiticity tolerance for eigensolver inputs.
const HERMITIAN_TOL: f64 = 1e-10;

/// Unitarity drift above which long products are re-orthonormalized.
const PRODUCT_DRIFT_TOL: f64 = 1e-8;
/// How often long products check their drift.
const PRODUCT_CHECK_EVERY: usize = 32_768;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// `‖M − M†‖` (Frobenius).
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖M†M − 1‖` (Frobenius).
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    (m.adjoint() * m - identity(m.nrows())).norm()
}

fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Check that `m` is Hermitian within `tol`, relative to its norm.
pub fn ensure_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let defect = hermitian_defect(m);
    if defect > tol * m.norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Check that `m` is unitary within `tol`.
pub fn ensure_unitary(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let defect = unitarity_defect(m);
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Rotate each column so its largest-magnitude component is real positive.
///
/// Quasienergy states must be reproducible across runs, so every eigenvector
/// leaves the solvers with this fixed phase.
pub(crate) fn fix_column_phases(q: &mut CMatrix) {
    for mut col in q.column_iter_mut() {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for (i, z) in col.iter().enumerate() {
            let mag = z.norm();
            if mag > best_mag + 1e-15 {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = col[best] / C64::new(best_mag, 0.0);
            let correction = phase.conj();
            for z in col.iter_mut() {
                *z *= correction;
            }
        }
    }
}

/// Eigendecomposition `H = Q diag(λ) Q†` of a Hermitian matrix by cyclic
/// Jacobi rotations.
///
/// Eigenvalues are returned ascending; eigenvectors carry the deterministic
/// phase convention of [`fix_column_phases`]. Sweeps stop once every
/// off-diagonal magnitude is below `1e-14·‖H‖`.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = ensure_square(h)?;
    ensure_hermitian(h, HERMITIAN_TOL)?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    // Work on the exactly Hermitian part so rounding noise cannot drive
    // the rotations.
    let mut a = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut q = identity(n);
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let thresh = JACOBI_OFF_TOL * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                max_off = max_off.max(a[(p, r)].norm());
            }
        }
        if max_off <= thresh {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                let mag = apr.norm();
                if mag <= thresh {
                    continue;
                }
                let phase = apr / C64::new(mag, 0.0);
                let tau = (a[(r, r)].re - a[(p, p)].re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let cs = C64::new(c, 0.0);
                let s_ph = phase * s;

                // A <- G† A G with G the identity outside rows/cols (p, r),
                // G_pp = c, G_pr = s·phase, G_rp = -s·phase*, G_rr = c.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let air = a[(i, r)];
                    a[(i, p)] = cs * aip - s_ph.conj() * air;
                    a[(i, r)] = s_ph * aip + cs * air;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let arj = a[(r, j)];
                    a[(p, j)] = cs * apj - s_ph * arj;
                    a[(r, j)] = s_ph.conj() * apj + cs * arj;
                }
                for i in 0..n {
                    let qip = q[(i, p)];
                    let qir = q[(i, r)];
                    q[(i, p)] = cs * qip - s_ph.conj() * qir;
                    q[(i, r)] = s_ph * qip + cs * qir;
                }
            }
        }
    }
    if !converged {
        let mut residual = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                residual = residual.max(a[(p, r)].norm());
            }
        }
        return Err(Error::EigenConvergence { residual });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &q.column(src));
    }
    fix_column_phases(&mut vectors);

    let lambda = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(eigenvalues[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let residual = (h * &vectors - &vectors * lambda).norm();
    if residual > 1e-10 * scale {
        return Err(Error::EigenConvergence { residual });
    }
    Ok((eigenvalues, vectors))
}

/// `exp(-i·scale·H)` for Hermitian `H`, via the eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, scale: f64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(h)?;
    let n = vals.len();
    let phases = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, -scale * vals[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(&vecs * phases * vecs.adjoint())
}

/// `exp(-iλ |w><w|) = 1 + (e^{-iλ} - 1)|w><w|` for a unit vector `w`.
pub fn kick_unitary(lambda: f64, w: &CVector) -> Result<CMatrix> {
    let norm = w.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let n = w.len();
    let coeff = C64::from_polar(1.0, -lambda) - C64::new(1.0, 0.0);
    let mut u = identity(n);
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] += coeff * w[i] * w[j].conj();
        }
    }
    Ok(u)
}

/// Conjugate a kick operator by the free evolution accumulated over the
/// angular delay `delta`: `e^{i·H₀/ω₀·Δ} W e^{-i·H₀/ω₀·Δ}`.
pub fn delayed_kick_interaction(
    w_op: &CMatrix,
    delta: f64,
    h0_over_w0: &CMatrix,
) -> Result<CMatrix> {
    ensure_hermitian(w_op, 1e-10)?;
    ensure_hermitian(h0_over_w0, 1e-10)?;
    let g = expm_hermitian(h0_over_w0, -delta)?;
    Ok(&g * w_op * g.adjoint())
}

/// The interaction operator of a driven system as a map over the torus.
#[derive(Clone)]
pub enum Interaction {
    /// Arbitrary Hermitian-valued map.
    General(Arc<dyn Fn(&PhasePoint) -> CMatrix + Send + Sync>),
    /// Rank-1 kick `λ|w(θ)><w(θ)|`; enables the closed-form exponential.
    RankOneKick {
        lambda: f64,
        direction: Arc<dyn Fn(&PhasePoint) -> CVector + Send + Sync>,
    },
}

impl std::fmt::Debug for Interaction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Interaction::General(_) => f.write_str("Interaction::General"),
            Interaction::RankOneKick { lambda, .. } => {
                write!(f, "Interaction::RankOneKick(lambda = {lambda})")
            }
        }
    }
}

/// A quantum system driven through its control parameters by a classical
/// flow: reduced free Hamiltonian, frequency ratio `ω₁/ω₀` and the
/// interaction map `θ ↦ V(θ)`.
#[derive(Clone, Debug)]
pub struct DrivenSystem {
    dim: usize,
    h_hat: CMatrix,
    ratio: f64,
    interaction: Interaction,
    free_step: CMatrix,
}

impl DrivenSystem {
    pub fn new(h_hat: CMatrix, ratio: f64, interaction: Interaction) -> Result<Self> {
        let dim = ensure_square(&h_hat)?;
        ensure_hermitian(&h_hat, 1e-12)?;
        let free_step = expm_hermitian(&h_hat, ratio)?;
        Ok(Self {
            dim,
            h_hat,
            ratio,
            interaction,
            free_step,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h_hat(&self) -> &CMatrix {
        &self.h_hat
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Cached free-evolution factor `exp(-i·(ω₁/ω₀)·Ĥ)`.
    pub fn free_step(&self) -> &CMatrix {
        &self.free_step
    }

    /// Kick strength of a rank-1 interaction, when the system has one.
    pub fn kick_strength(&self) -> Option<f64> {
        match &self.interaction {
            Interaction::RankOneKick { lambda, .. } => Some(*lambda),
            Interaction::General(_) => None,
        }
    }

    /// The interaction operator `V(θ)`.
    pub fn interaction_at(&self, theta: &PhasePoint) -> Result<CMatrix> {
        match &self.interaction {
            Interaction::General(f) => {
                let v = f(theta);
                if v.nrows() != self.dim || v.ncols() != self.dim {
                    return Err(Error::Dimension(format!(
                        "interaction returned a {}x{} matrix for a dim-{} system",
                        v.nrows(),
                        v.ncols(),
                        self.dim
                    )));
                }
                ensure_hermitian(&v, 1e-12)?;
                Ok(v)
            }
            Interaction::RankOneKick { lambda, direction } => {
                let w = direction(theta);
                let norm = w.norm();
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(Error::NotNormalized { norm });
                }
                let mut v = CMatrix::zeros(self.dim, self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        v[(i, j)] = C64::new(*lambda, 0.0) * w[i] * w[j].conj();
                    }
                }
                Ok(v)
            }
        }
    }

    /// One-step propagator `U(θ) = exp(-i·r·Ĥ)·exp(-i·V(θ))`.
    ///
    /// Rank-1 kicks use the closed-form projector exponential.
    pub fn step_unitary(&self, theta: &PhasePoint) -> Result<CMatrix> {
        let kick = match &self.interaction {
            Interaction::RankOneKick { lambda, direction } => {
                kick_unitary(*lambda, &direction(theta))?
            }
            Interaction::General(_) => expm_hermitian(&self.interaction_at(theta)?, 1.0)?,
        };
        Ok(&self.free_step * kick)
    }
}

/// Ordered product of `n` step unitaries along the orbit of `theta0`:
/// `U(φ^{n-1}(θ₀))···U(θ₀)`; `n = 0` gives the identity.
///
/// Drift away from unitarity is checked periodically; products that exceed
/// the drift tolerance are re-orthonormalized (and the event logged).
pub fn propagate(
    sys: &DrivenSystem,
    flow: &FlowSpec,
    theta0: &PhasePoint,
    n: usize,
) -> Result<CMatrix> {
    let mut acc = identity(sys.dim());
    let mut theta = *theta0;
    for k in 0..n {
        acc = sys.step_unitary(&theta)? * acc;
        theta = flow.step(&theta)?;
        if (k + 1) % PRODUCT_CHECK_EVERY == 0 {
            renormalize_if_drifted(&mut acc, k + 1);
        }
    }
    if n >= PRODUCT_CHECK_EVERY {
        renormalize_if_drifted(&mut acc, n);
    }
    Ok(acc)
}

fn renormalize_if_drifted(u: &mut CMatrix, steps: usize) {
    let defect = unitarity_defect(u);
    if defect > PRODUCT_DRIFT_TOL {
        log::warn!(
            "propagator drifted from unitarity after {steps} factors \
             (defect {defect:.3e}); applying polar correction"
        );
        // Newton-Schulz polar iteration; the drift is far inside its
        // convergence region.
        for _ in 0..4 {
            let correction = identity(u.nrows()) * C64::new(1.5, 0.0)
                - (u.adjoint() * &*u) * C64::new(0.5, 0.0);
            *u = &*u * correction;
            if unitarity_defect(u) < 1e-12 {
                break;
            }
        }
    }
}

/// Kick direction of the two-level spin model:
/// `|w(θ)> = cos θ¹ |0> + e^{i·r·θ²} sin θ¹ |1>`.
pub fn spin_kick_direction(theta: &PhasePoint, ratio: f64) -> CVector {
    CVector::from_vec(vec![
        C64::new(theta.theta1().cos(), 0.0),
        C64::from_polar(1.0, ratio * theta.theta2()) * C64::new(theta.theta1().sin(), 0.0),
    ])
}

/// Two-level kicked-spin system: `Ĥ = 2π|1><1|`, rank-1 kick of strength
/// `lambda` along [`spin_kick_direction`].
pub fn spin_kick_system(lambda: f64, ratio: f64) -> DrivenSystem {
    let mut h_hat = CMatrix::zeros(2, 2);
    h_hat[(1, 1)] = C64::new(std::f64::consts::TAU, 0.0);
    let direction = Arc::new(move |theta: &PhasePoint| spin_kick_direction(theta, ratio));
    DrivenSystem::new(
        h_hat,
        ratio,
        Interaction::RankOneKick { lambda, direction },
    )
    .expect("2π|1><1| is Hermitian")
}

/// Default kick strength of the spin model.
pub const SPIN_KICK_LAMBDA: f64 = 0.1;

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use rand::Rng;

    /// Random Hermitian matrix with entries of order one.
    pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
        let raw = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        (&raw + raw.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Random unitary matrix from the eigenvectors of a random Hermitian.
    pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
        let h = random_hermitian(rng, n);
        let (_, q) = hermitian_eigen(&h).unwrap();
        let phases = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &q * phases * q.adjoint()
    }
}
