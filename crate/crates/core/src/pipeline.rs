//! One grid point through the whole chain: operating point, drift and
//! diffusion, stability, covariance and negativities.

use crate::dynamics::{
    diffusion_matrix, drift_matrix, stability, DiffusionMatrix, DriftMatrix, StabilityReport,
};
use crate::gaussian::{
    bipartition_negativity, lyapunov_residual, solve_lyapunov, Bipartition, CovarianceMatrix,
    GaussianError, PHYSICALITY_TOL,
};
use crate::model::{steady_state, OperatingPoint, SystemParams};

/// Effective detunings in units of ω_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    pub delta_c: f64,
    pub delta_w: [f64; 2],
}

impl Detunings {
    /// `Δ_w1 = −Δ_w2 = delta_w`.
    pub fn opposed(delta_c: f64, delta_w: f64) -> Self {
        Self {
            delta_c,
            delta_w: [delta_w, -delta_w],
        }
    }
}

/// Steady-state quantities of a stable point.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyCovariance {
    pub covariance: CovarianceMatrix,
    /// `‖AV + VAᵀ + D‖_F` in units of ω_m.
    pub residual: f64,
    /// Smallest eigenvalue of `V + (i/2)Ω`.
    pub min_uncertainty_eig: f64,
    /// Negativity per requested bipartition, in request order.
    pub negativity: Vec<(Bipartition, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub params: SystemParams,
    pub operating_point: OperatingPoint,
    pub drift: DriftMatrix,
    pub diffusion: DiffusionMatrix,
    pub stability: StabilityReport,
    /// `None` when the point is unstable.
    pub steady: Option<SteadyCovariance>,
}

impl PointReport {
    pub fn omega_m(&self) -> f64 {
        self.params.omega_m
    }

    pub fn negativity(&self, pair: Bipartition) -> Option<f64> {
        self.steady
            .as_ref()?
            .negativity
            .iter()
            .find(|(p, _)| *p == pair)
            .map(|(_, e)| *e)
    }
}

/// Runs the chain. Instability is a finding and is reported with
/// `steady = None`; numerical failures are errors.
pub fn evaluate_point(
    params: &SystemParams,
    detunings: Detunings,
    pairs: &[Bipartition],
) -> Result<PointReport, GaussianError> {
    let wm = params.omega_m;
    let op = steady_state(
        params,
        detunings.delta_c * wm,
        detunings.delta_w.map(|x| x * wm),
    );
    let drift = drift_matrix(params, &op);
    let diffusion = diffusion_matrix(params, &op);
    let report = stability(&drift)?;

    let steady = if report.stable {
        let covariance = solve_lyapunov(&drift, &diffusion)?;
        let min_uncertainty_eig = covariance.min_uncertainty_eigenvalue();
        if min_uncertainty_eig < -PHYSICALITY_TOL {
            return Err(GaussianError::Unphysical(format!(
                "steady state violates the uncertainty relation (min eig {min_uncertainty_eig:.3e})"
            )));
        }
        let negativity = pairs
            .iter()
            .map(|&pair| Ok((pair, bipartition_negativity(&covariance, pair)?)))
            .collect::<Result<Vec<_>, GaussianError>>()?;
        Some(SteadyCovariance {
            residual: lyapunov_residual(&drift, &diffusion, &covariance),
            covariance,
            min_uncertainty_eig,
            negativity,
        })
    } else {
        None
    };

    Ok(PointReport {
        params: *params,
        operating_point: op,
        drift,
        diffusion,
        stability: report,
        steady,
    })
}
