//! Linearized fluctuation dynamics: drift matrix, diffusion matrix and
//! stability of the fixed point.
//!
//! Quadratures are ordered `(δq, δp, δX_c, δY_c, δX_w1, δY_w1, δX_w2, δY_w2)`.
//! Both matrices are stored in units of ω_m so that their entries are O(1);
//! [`DriftMatrix::to_si`] and [`DiffusionMatrix::to_si`] recover rad/s.

use nalgebra::{Complex, SMatrix, Schur};
use thiserror::Error;

use crate::model::{OperatingPoint, SystemParams};

pub const DIM: usize = 8;
pub type Mat8 = SMatrix<f64, DIM, DIM>;

/// Quadrature indices.
pub mod quad {
    pub const Q: usize = 0;
    pub const P: usize = 1;
    pub const X_C: usize = 2;
    pub const Y_C: usize = 3;
    pub const X_W1: usize = 4;
    pub const Y_W1: usize = 5;
    pub const X_W2: usize = 6;
    pub const Y_W2: usize = 7;
}

/// A fixed point counts as stable only when every eigenvalue of the drift
/// matrix has real part below `-STABILITY_MARGIN · ω_m`.
pub const STABILITY_MARGIN: f64 = 1e-9;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("drift matrix has non-finite entries")]
    NonFinite,
    #[error("eigenvalue iteration did not converge")]
    EigenFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    a: Mat8,
    omega_m: f64,
}

impl DriftMatrix {
    /// Wraps a drift matrix given in rad/s.
    pub fn from_si(a: Mat8, omega_m: f64) -> Self {
        Self {
            a: a / omega_m,
            omega_m,
        }
    }

    /// Wraps a drift matrix already expressed in units of `omega_m`.
    pub fn from_normalized(a: Mat8, omega_m: f64) -> Self {
        Self { a, omega_m }
    }

    pub fn normalized(&self) -> &Mat8 {
        &self.a
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn to_si(&self) -> Mat8 {
        self.a * self.omega_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix {
    diag: [f64; DIM],
    omega_m: f64,
}

impl DiffusionMatrix {
    pub fn from_normalized_diagonal(diag: [f64; DIM], omega_m: f64) -> Self {
        Self { diag, omega_m }
    }

    pub fn diagonal(&self) -> &[f64; DIM] {
        &self.diag
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    /// Dense form, in units of ω_m.
    pub fn matrix(&self) -> Mat8 {
        Mat8::from_diagonal(&self.diag.into())
    }

    pub fn to_si(&self) -> Mat8 {
        self.matrix() * self.omega_m
    }
}

/// Drift matrix of the linearized Langevin equations.
pub fn drift_matrix(p: &SystemParams, op: &OperatingPoint) -> DriftMatrix {
    use quad::*;
    let wm = p.omega_m;
    let mut a = Mat8::zeros();

    a[(Q, P)] = 1.0;
    a[(P, Q)] = -1.0;
    a[(P, P)] = -p.kappa_m() / wm;

    let cavities = [
        (X_C, p.kappa_c, op.delta_c, op.g_c),
        (X_W1, p.kappa_w[0], op.delta_w[0], op.g_w[0]),
        (X_W2, p.kappa_w[1], op.delta_w[1], op.g_w[1]),
    ];
    for (x, kappa, delta, g) in cavities {
        let y = x + 1;
        a[(x, x)] = -kappa / wm;
        a[(y, y)] = -kappa / wm;
        a[(x, y)] = delta / wm;
        a[(y, x)] = -delta / wm;
        // radiation pressure on the membrane and the membrane's back-action
        a[(P, x)] = g / wm;
        a[(y, Q)] = g / wm;
    }
    DriftMatrix::from_normalized(a, wm)
}

/// Diagonal diffusion matrix. The optical bath is taken at zero occupation.
pub fn diffusion_matrix(p: &SystemParams, op: &OperatingPoint) -> DiffusionMatrix {
    let wm = p.omega_m;
    let km = p.kappa_m() / wm;
    let kc = p.kappa_c / wm;
    let kw = [0, 1].map(|j| p.kappa_w[j] / wm * (2.0 * op.n_w[j] + 1.0));
    DiffusionMatrix::from_normalized_diagonal(
        [
            0.0,
            km * (2.0 * op.n_mech + 1.0),
            kc,
            kc,
            kw[0],
            kw[0],
            kw[1],
            kw[1],
        ],
        wm,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// Spectral abscissa, rad/s.
    pub max_real_eig: f64,
    /// Eigenvalues of the drift matrix, rad/s.
    pub eigenvalues: [Complex<f64>; DIM],
}

impl StabilityReport {
    pub fn max_real_eig_over_omega_m(&self, omega_m: f64) -> f64 {
        self.max_real_eig / omega_m
    }
}

/// Spectral stability test: all eigenvalues strictly in the left half-plane,
/// with a margin of [`STABILITY_MARGIN`]·ω_m.
pub fn stability(a: &DriftMatrix) -> Result<StabilityReport, DynamicsError> {
    let eig = normalized_eigenvalues(a.normalized())?;
    let abscissa = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let wm = a.omega_m();
    Ok(StabilityReport {
        stable: abscissa < -STABILITY_MARGIN,
        max_real_eig: abscissa * wm,
        eigenvalues: eig.map(|z| z * wm),
    })
}

fn normalized_eigenvalues(a: &Mat8) -> Result<[Complex<f64>; DIM], DynamicsError> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(DynamicsError::NonFinite);
    }
    let schur =
        Schur::try_new(*a, f64::EPSILON, SCHUR_MAX_ITER).ok_or(DynamicsError::EigenFailure)?;
    let eig = schur.complex_eigenvalues();
    let mut out = [Complex::new(0.0, 0.0); DIM];
    for (o, z) in out.iter_mut().zip(eig.iter()) {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(DynamicsError::EigenFailure);
        }
        *o = *z;
    }
    Ok(out)
}
