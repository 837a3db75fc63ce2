//! Gaussian steady states: covariance matrices, bipartite reduction and
//! logarithmic negativity.
//!
//! Quadratures follow `X = (a + a†)/√2`, `Y = (a − a†)/(i√2)`, so `[X, Y] = i`,
//! the vacuum variance is [`VACUUM_VARIANCE`] and a covariance matrix is
//! physical iff `V + (i/2)Ω ⪰ 0`.

mod compensated;
mod lyapunov;
mod negativity;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen};
use thiserror::Error;

use crate::dynamics::{DynamicsError, Mat8, DIM};

pub use lyapunov::{
    integrate_covariance_oracle, lyapunov_residual, residual_tolerance, solve_lyapunov,
    OracleSettings, RESIDUAL_TOL,
};
pub use negativity::{log_negativity, min_symplectic_eigenvalue_pt};

/// Variance of each vacuum quadrature.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Tolerance on the smallest eigenvalue of `V + (i/2)Ω`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("drift matrix is not stable (max Re λ = {max_real_eig:.6e} ω_m)")]
    Unstable { max_real_eig: f64 },
    #[error("Lyapunov system is singular")]
    Singular,
    #[error("Lyapunov residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    IllConditioned { residual: f64, tolerance: f64 },
    #[error("covariance integral did not converge within the horizon ({horizon:.3e} / ω_m)")]
    NotConverged { horizon: f64 },
    #[error("bipartition needs two distinct subsystems, got {0} twice")]
    SameSubsystem(Subsystem),
    #[error("covariance matrix is unphysical ({0})")]
    Unphysical(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Symmetric 8×8 covariance matrix of the quadrature fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    v: Mat8,
}

impl CovarianceMatrix {
    /// Takes the symmetric part of `m`.
    pub fn from_matrix(m: Mat8) -> Self {
        Self {
            v: (m + m.transpose()) * 0.5,
        }
    }

    pub fn matrix(&self) -> &Mat8 {
        &self.v
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.v[(i, j)]
    }

    /// Smallest eigenvalue of `V + (i/2)Ω`; non-negative for a physical state.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        min_uncertainty_eigenvalue(&DMatrix::from_column_slice(DIM, DIM, self.v.as_slice()))
    }

    pub fn check_physical(&self) -> Result<(), GaussianError> {
        let lo = self.min_uncertainty_eigenvalue();
        if lo < -PHYSICALITY_TOL {
            Err(GaussianError::Unphysical(format!(
                "min eig of V + iΩ/2 is {lo:.3e}"
            )))
        } else {
            Ok(())
        }
    }
}

/// Symplectic form `⊕ [[0, 1], [−1, 0]]` on `n` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Smallest eigenvalue of the Hermitian matrix `V + (i/2)Ω`, computed from
/// its real symmetric embedding `[[V, −Ω/2], [Ω/2, V]]`.
///
/// The eigensolver alone is only good to `ε‖V‖`, which is several 10⁻⁹ for
/// the largest covariances met in practice. Each returned eigenvalue is
/// therefore replaced by the Rayleigh quotient of its eigenvector evaluated
/// in compensated arithmetic, which is accurate to `O(ε²‖V‖²/gap)`.
pub(crate) fn min_uncertainty_eigenvalue(v: &DMatrix<f64>) -> f64 {
    let n = v.nrows();
    let k = symplectic_form(n / 2) * 0.5;
    let mut real = DMatrix::zeros(2 * n, 2 * n);
    real.view_mut((0, 0), (n, n)).copy_from(v);
    real.view_mut((n, n), (n, n)).copy_from(v);
    real.view_mut((0, n), (n, n)).copy_from(&(-&k));
    real.view_mut((n, 0), (n, n)).copy_from(&k);
    let eig = SymmetricEigen::new(real.clone());
    eig.eigenvectors
        .column_iter()
        .map(|u| rayleigh_quotient(&real, u.as_slice()))
        .fold(f64::INFINITY, f64::min)
}

fn rayleigh_quotient(h: &DMatrix<f64>, u: &[f64]) -> f64 {
    let m = u.len();
    let mut num = compensated::Accumulator::default();
    for i in 0..m {
        let mut row = compensated::Accumulator::default();
        for (j, uj) in u.iter().enumerate() {
            row.add_prod(h[(i, j)], *uj);
        }
        let (hi, lo) = row.parts();
        num.add_prod(u[i], hi);
        num.add_prod(u[i], lo);
    }
    let mut den = compensated::Accumulator::default();
    for x in u {
        den.add_prod(*x, *x);
    }
    num.value() / den.value()
}

/// One of the four bosonic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    Mecha,
    Opto,
    Micro1,
    Micro2,
}

impl Subsystem {
    pub const ALL: [Subsystem; 4] = [Self::Mecha, Self::Opto, Self::Micro1, Self::Micro2];

    /// Row/column indices of the mode's two quadratures.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Self::Mecha => (0, 1),
            Self::Opto => (2, 3),
            Self::Micro1 => (4, 5),
            Self::Micro2 => (6, 7),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Mecha => "Mecha",
            Self::Opto => "Opto",
            Self::Micro1 => "Micro1",
            Self::Micro2 => "Micro2",
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Subsystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| {
                format!("unknown subsystem `{s}` (expected Mecha, Opto, Micro1 or Micro2)")
            })
    }
}

/// An ordered pair of distinct subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    first: Subsystem,
    second: Subsystem,
}

impl Bipartition {
    /// All six pairs in a fixed order.
    pub const ALL: [Bipartition; 6] = [
        Self::new_unchecked(Subsystem::Mecha, Subsystem::Opto),
        Self::new_unchecked(Subsystem::Mecha, Subsystem::Micro1),
        Self::new_unchecked(Subsystem::Mecha, Subsystem::Micro2),
        Self::new_unchecked(Subsystem::Opto, Subsystem::Micro1),
        Self::new_unchecked(Subsystem::Opto, Subsystem::Micro2),
        Self::new_unchecked(Subsystem::Micro1, Subsystem::Micro2),
    ];

    pub const MICRO: Bipartition = Self::new_unchecked(Subsystem::Micro1, Subsystem::Micro2);

    pub(crate) const fn new_unchecked(first: Subsystem, second: Subsystem) -> Self {
        Self { first, second }
    }

    pub fn new(first: Subsystem, second: Subsystem) -> Result<Self, GaussianError> {
        if first == second {
            return Err(GaussianError::SameSubsystem(first));
        }
        Ok(Self { first, second })
    }

    pub fn first(&self) -> Subsystem {
        self.first
    }

    pub fn second(&self) -> Subsystem {
        self.second
    }

    pub fn swapped(&self) -> Self {
        Self {
            first: self.second,
            second: self.first,
        }
    }

    /// `Opto_Micro1` style label.
    pub fn label(&self) -> String {
        format!("{}_{}", self.first, self.second)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.first, self.second)
    }
}

impl FromStr for Bipartition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('_')
            .ok_or_else(|| format!("bipartition `{s}` must look like `Opto_Micro1`"))?;
        Bipartition::new(a.parse()?, b.parse()?).map_err(|e| e.to_string())
    }
}

/// Reduced two-mode covariance matrix `[[V1, V3], [V3ᵀ, V2]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteCm {
    pub v1: Matrix2<f64>,
    pub v2: Matrix2<f64>,
    pub v3: Matrix2<f64>,
}

impl BipartiteCm {
    pub fn assembled(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.v1);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.v2);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.v3);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&self.v3.transpose());
        m
    }

    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let m = self.assembled();
        min_uncertainty_eigenvalue(&DMatrix::from_column_slice(4, 4, m.as_slice()))
    }
}

/// Keeps the rows and columns of two modes, `s1` first.
pub fn reduce_bipartite(
    v: &CovarianceMatrix,
    s1: Subsystem,
    s2: Subsystem,
) -> Result<BipartiteCm, GaussianError> {
    if s1 == s2 {
        return Err(GaussianError::SameSubsystem(s1));
    }
    let block = |a: Subsystem, b: Subsystem| {
        let (i0, i1) = a.indices();
        let (j0, j1) = b.indices();
        Matrix2::new(v.get(i0, j0), v.get(i0, j1), v.get(i1, j0), v.get(i1, j1))
    };
    Ok(BipartiteCm {
        v1: block(s1, s1),
        v2: block(s2, s2),
        v3: block(s1, s2),
    })
}

/// Logarithmic negativity of one bipartition of a full covariance matrix.
pub fn bipartition_negativity(
    v: &CovarianceMatrix,
    pair: Bipartition,
) -> Result<f64, GaussianError> {
    log_negativity(&reduce_bipartite(v, pair.first(), pair.second())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thermal_product(n: [f64; 4]) -> CovarianceMatrix {
        let mut diag = [0.0; DIM];
        for (k, nk) in n.iter().enumerate() {
            diag[2 * k] = nk + VACUUM_VARIANCE;
            diag[2 * k + 1] = nk + VACUUM_VARIANCE;
        }
        CovarianceMatrix::from_matrix(Mat8::from_diagonal(&diag.into()))
    }

    #[test]
    fn vacuum_sits_on_the_uncertainty_boundary() {
        let v = thermal_product([0.0; 4]);
        assert!(v.min_uncertainty_eigenvalue().abs() < 1e-15);
        assert!(v.check_physical().is_ok());
    }

    #[test]
    fn sub_vacuum_state_is_rejected() {
        let mut m = *thermal_product([0.0; 4]).matrix();
        m[(4, 4)] = 0.3;
        m[(5, 5)] = 0.3;
        let v = CovarianceMatrix::from_matrix(m);
        assert!((v.min_uncertainty_eigenvalue() + 0.2).abs() < 1e-12);
        assert!(matches!(
            v.check_physical(),
            Err(GaussianError::Unphysical(_))
        ));
    }

    #[test]
    fn from_matrix_symmetrizes() {
        let mut m = Mat8::identity();
        m[(0, 3)] = 1.0;
        let v = CovarianceMatrix::from_matrix(m);
        assert_eq!(v.get(0, 3), 0.5);
        assert_eq!(v.get(3, 0), 0.5);
    }

    #[test]
    fn reduction_extracts_blocks_in_order() {
        let m = Mat8::from_fn(|i, j| (10 * i.min(j) + i.max(j)) as f64);
        let v = CovarianceMatrix::from_matrix(m);
        let b = reduce_bipartite(&v, Subsystem::Micro2, Subsystem::Opto).unwrap();
        assert_eq!(b.v1, Matrix2::new(66.0, 67.0, 67.0, 77.0));
        assert_eq!(b.v2, Matrix2::new(22.0, 23.0, 23.0, 33.0));
        assert_eq!(b.v3, Matrix2::new(26.0, 36.0, 27.0, 37.0));
        assert_eq!(b.assembled(), b.assembled().transpose());
    }

    #[test]
    fn decoupled_reduction_has_no_cross_block() {
        let v = thermal_product([1.0, 0.0, 2.0, 3.0]);
        for pair in Bipartition::ALL {
            let b = reduce_bipartite(&v, pair.first(), pair.second()).unwrap();
            assert_eq!(b.v3, Matrix2::zeros());
        }
    }

    #[test]
    fn identical_subsystems_are_rejected() {
        let v = thermal_product([0.0; 4]);
        assert_eq!(
            reduce_bipartite(&v, Subsystem::Opto, Subsystem::Opto),
            Err(GaussianError::SameSubsystem(Subsystem::Opto))
        );
        assert!(Bipartition::new(Subsystem::Micro1, Subsystem::Micro1).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for pair in Bipartition::ALL {
            assert_eq!(pair.label().parse::<Bipartition>().unwrap(), pair);
            assert_eq!(
                pair.swapped().label().parse::<Bipartition>().unwrap(),
                pair.swapped()
            );
        }
        assert_eq!(Bipartition::MICRO.label(), "Micro1_Micro2");
        assert!("Opto_Opto".parse::<Bipartition>().is_err());
        assert!("Opto-Micro1".parse::<Bipartition>().is_err());
        assert!("Optics_Micro1".parse::<Bipartition>().is_err());
    }
}
