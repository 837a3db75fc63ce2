use super::{compensated, BipartiteCm, GaussianError, VACUUM_VARIANCE};

/// Relative floor separating rounding noise from a genuinely unphysical
/// negative radicand or squared symplectic eigenvalue.
const DUST: f64 = 1e-12;

/// Smallest symplectic eigenvalue `η⁻` of the partially transposed two-mode
/// covariance matrix.
///
/// With `Σ = det V1 + det V2 − 2 det V3`, `η⁻² = (Σ − √(Σ² − 4 det V))/2`.
/// The difference is evaluated as `2 det V / (Σ + √(Σ² − 4 det V))`, which
/// keeps full precision when `η⁻` is small.
pub fn min_symplectic_eigenvalue_pt(b: &BipartiteCm) -> Result<f64, GaussianError> {
    // Σ and det V are formed to twice the working precision: for large
    // covariances both are differences of terms ~‖V‖² or ~‖V‖⁴
    let sigma2 = compensated::det2_sum(&[(1.0, &b.v1), (1.0, &b.v2), (-2.0, &b.v3)]);
    let det2 = compensated::det4(&b.assembled());
    let (sigma, det) = (sigma2.0 + sigma2.1, det2.0 + det2.1);
    let scale = sigma * sigma;

    let mut radicand = compensated::discriminant(sigma2, det2);
    if radicand < -DUST * scale.max(1.0) {
        return Err(GaussianError::Unphysical(format!(
            "negative radicand {radicand:.3e} (Σ = {sigma:.6e}, det = {det:.6e})"
        )));
    }
    radicand = radicand.max(0.0);

    let denom = sigma + radicand.sqrt();
    if denom.is_nan() || denom <= 0.0 {
        return Err(GaussianError::Unphysical(format!("Σ = {sigma:.6e}")));
    }
    let mut eta_sq = 2.0 * det / denom;
    if eta_sq < -DUST * sigma.abs().max(1.0) {
        return Err(GaussianError::Unphysical(format!("η⁻² = {eta_sq:.3e}")));
    }
    eta_sq = eta_sq.max(0.0);
    Ok(eta_sq.sqrt())
}

/// `E_N = max(0, −ln(2η⁻))`.
pub fn log_negativity(b: &BipartiteCm) -> Result<f64, GaussianError> {
    let eta = min_symplectic_eigenvalue_pt(b)?;
    // det V3 ≥ 0 implies separability for any physical two-mode state; this
    // keeps product and classically correlated states at exactly zero
    let (hi, lo) = compensated::det2_sum(&[(1.0, &b.v3)]);
    if hi + lo >= 0.0 {
        return Ok(0.0);
    }
    // 2η⁻ compared against twice the vacuum variance, i.e. 1
    let ratio = eta / VACUUM_VARIANCE;
    Ok((-ratio.ln()).max(0.0))
}
