//! Steady-state covariance from `AV + VAᵀ = −D`.
//!
//! The production path solves the 64×64 Kronecker-sum system directly. The
//! oracle integrates `dV/dt = AV + VAᵀ + D` in the time domain and shares no
//! code with it beyond the matrix types.

use nalgebra::DMatrix;

use super::compensated::Accumulator;
use super::{CovarianceMatrix, GaussianError};
use crate::dynamics::{stability, DiffusionMatrix, DriftMatrix, Mat8, DIM};

/// Residual bound, relative to `max(‖D‖_F, 1)` in units of ω_m.
pub const RESIDUAL_TOL: f64 = 1e-10;

const MAX_REFINEMENTS: usize = 6;

/// Largest residual accepted for `v`: [`RESIDUAL_TOL`] plus the floor set by
/// rounding `V` to f64, `DIM·ε·‖A‖_F·‖V‖_F`. The floor only matters when `V`
/// is huge (e.g. 300 GHz circuits near zero detuning, `‖V‖ ~ 10⁷`).
pub fn residual_tolerance(a: &DriftMatrix, d: &DiffusionMatrix, v: &CovarianceMatrix) -> f64 {
    let floor = DIM as f64 * f64::EPSILON * a.normalized().norm() * v.matrix().norm();
    RESIDUAL_TOL * d.matrix().norm().max(1.0) + floor
}

/// `AV + VAᵀ + D` with every entry accumulated in compensated arithmetic, so
/// it is exact up to one final rounding even when the terms cancel heavily.
fn residual_matrix(a: &Mat8, d: &Mat8, v: &Mat8) -> Mat8 {
    Mat8::from_fn(|i, j| {
        let mut acc = Accumulator::default();
        for l in 0..DIM {
            acc.add_prod(a[(i, l)], v[(l, j)]);
            acc.add_prod(v[(i, l)], a[(j, l)]);
        }
        acc.add(d[(i, j)]);
        acc.value()
    })
}

/// Frobenius norm of `AV + VAᵀ + D`, in units of ω_m.
pub fn lyapunov_residual(a: &DriftMatrix, d: &DiffusionMatrix, v: &CovarianceMatrix) -> f64 {
    residual_matrix(a.normalized(), &d.matrix(), v.matrix()).norm()
}

/// Solves the Lyapunov equation for a stable drift matrix.
pub fn solve_lyapunov(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
) -> Result<CovarianceMatrix, GaussianError> {
    let report = stability(a)?;
    if !report.stable {
        return Err(GaussianError::Unstable {
            max_real_eig: report.max_real_eig_over_omega_m(a.omega_m()),
        });
    }

    let an = a.normalized();
    let n = DIM * DIM;
    // column-major vec: vec(AV) = (I⊗A) vec V, vec(VAᵀ) = (A⊗I) vec V
    let mut op = DMatrix::<f64>::zeros(n, n);
    for j in 0..DIM {
        for i in 0..DIM {
            let row = i + DIM * j;
            for l in 0..DIM {
                op[(row, l + DIM * j)] += an[(i, l)];
                op[(row, i + DIM * l)] += an[(j, l)];
            }
        }
    }
    let dn = d.matrix();
    let rhs = DMatrix::from_column_slice(n, 1, (-dn).as_slice());

    let lu = op.lu();
    let x = lu.solve(&rhs).ok_or(GaussianError::Singular)?;
    let mut v = Mat8::from_column_slice(x.as_slice());
    if v.iter().any(|z| !z.is_finite()) {
        return Err(GaussianError::Singular);
    }
    // iterative refinement; with the residual formed to twice the working
    // precision this converges to a V that is accurate entrywise, not just
    // backward stable
    for _ in 0..MAX_REFINEMENTS {
        let r = residual_matrix(an, &dn, &v);
        let r = DMatrix::from_column_slice(n, 1, (-r).as_slice());
        let Some(dx) = lu.solve(&r) else { break };
        let dv = Mat8::from_column_slice(dx.as_slice());
        if !dv.iter().all(|z| z.is_finite()) {
            break;
        }
        v += dv;
        if dv.amax() <= f64::EPSILON * v.amax() {
            break;
        }
    }

    let v = CovarianceMatrix::from_matrix(v);
    let residual = lyapunov_residual(a, d, &v);
    let tolerance = residual_tolerance(a, d, &v);
    if residual > tolerance {
        return Err(GaussianError::IllConditioned {
            residual,
            tolerance,
        });
    }
    Ok(v)
}

/// Time grid for [`integrate_covariance_oracle`], in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Give up if the integral has not settled by this time.
    pub horizon: f64,
    /// Base Runge–Kutta step.
    pub step: f64,
}

impl OracleSettings {
    /// A horizon of 10⁷ and a step of 10⁻³ mechanical periods / 2π.
    pub fn for_omega_m(omega_m: f64) -> Self {
        Self {
            horizon: 1.0e7 / omega_m,
            step: 1.0e-3 / omega_m,
        }
    }
}

/// `V = ∫₀^∞ e^{As} D e^{Aᵀs} ds`, integrated from `V(0) = 0`.
///
/// One classical RK4 step of length `step` gives `V(h)` and the propagator
/// `M(h) = e^{Ah}`. The flow property `V(2t) = V(t) + M(t) V(t) M(t)ᵀ`,
/// `M(2t) = M(t)²` then doubles the integration time until the propagator
/// has decayed and `V` stops changing.
pub fn integrate_covariance_oracle(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    settings: OracleSettings,
) -> Result<CovarianceMatrix, GaussianError> {
    let an = *a.normalized();
    let dn = d.matrix();
    let h = settings.step * a.omega_m();
    let horizon = settings.horizon * a.omega_m();

    let rhs = |v: &Mat8| an * v + v * an.transpose() + dn;
    let zero = Mat8::zeros();
    let k1 = rhs(&zero);
    let k2 = rhs(&(k1 * (h / 2.0)));
    let k3 = rhs(&(k2 * (h / 2.0)));
    let k4 = rhs(&(k3 * h));
    let mut v = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

    let ah = an * h;
    let ah2 = ah * ah;
    let ah3 = ah2 * ah;
    let mut m = Mat8::identity() + ah + ah2 / 2.0 + ah3 / 6.0 + ah3 * ah / 24.0;

    let mut t = h;
    while t <= horizon {
        let increment = m * v * m.transpose();
        v += increment;
        m = m * m;
        t *= 2.0;
        let scale = v.amax().max(1.0);
        if m.amax() < 1e-9 && increment.amax() <= 1e-15 * scale {
            return Ok(CovarianceMatrix::from_matrix(v));
        }
    }
    Err(GaussianError::NotConverged { horizon })
}
