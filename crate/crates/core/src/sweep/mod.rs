//! Declarative one-dimensional parameter sweeps.

mod presets;
pub mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::constants::TWO_PI;
use crate::gaussian::Bipartition;
use crate::model::{ParamError, SystemParams};
use crate::pipeline::{evaluate_point, Detunings};

pub use presets::{preset, Figure, DEFAULT_GRID, FIG6_PAIRS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid start {start} must be below stop {stop}")]
    EmptyRange { start: f64, stop: f64 },
    #[error("grid bounds must be finite")]
    NonFinite,
    #[error("no bipartitions requested")]
    NoBipartitions,
    #[error("at {axis} = {value}: {source}")]
    Params {
        axis: Axis,
        value: f64,
        source: ParamError,
    },
}

/// The single parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Microwave detuning `Δ_w1`, in units of ω_m.
    DeltaW,
    /// Optical detuning `Δ_c`, in units of ω_m.
    DeltaC,
    /// Bath temperature, K.
    Temperature,
    /// Both capacitor gaps, m.
    Gap,
    /// Optical drive power, W.
    PowerC,
    /// Both microwave drive powers, W.
    PowerW,
    /// Both microwave resonance frequencies `ω_w/2π`, Hz.
    MicroFrequency,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Self::DeltaW,
        Self::DeltaC,
        Self::Temperature,
        Self::Gap,
        Self::PowerC,
        Self::PowerW,
        Self::MicroFrequency,
    ];

    /// Column name used in tabular output; carries the unit.
    pub fn name(self) -> &'static str {
        match self {
            Self::DeltaW => "delta_w_over_omega_m",
            Self::DeltaC => "delta_c_over_omega_m",
            Self::Temperature => "temperature_k",
            Self::Gap => "gap_m",
            Self::PowerC => "power_c_w",
            Self::PowerW => "power_w_w",
            Self::MicroFrequency => "micro_freq_hz",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|a| a.name()).collect();
                format!("unknown axis `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Linear grid with both end points included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(SpecError::NonFinite);
        }
        if self.count < 2 {
            return Err(SpecError::TooFewPoints(self.count));
        }
        if self.start >= self.stop {
            return Err(SpecError::EmptyRange {
                start: self.start,
                stop: self.stop,
            });
        }
        Ok(())
    }

    /// `i`-th node. A grid symmetric about zero yields nodes that are exact
    /// negatives of each other.
    pub fn value(&self, i: usize) -> f64 {
        let last = (self.count - 1) as f64;
        let i = i as f64;
        (self.start * (last - i) + self.stop * i) / last
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Curve identifier, e.g. `9GHz`.
    pub label: String,
    pub base: SystemParams,
    /// Optical detuning in units of ω_m, unless it is the swept axis.
    pub delta_c: f64,
    /// Microwave detunings in units of ω_m, unless swept.
    pub delta_w: [f64; 2],
    /// Enforce `Δ_w2 = −Δ_w1` at every point.
    pub tie_micro_detunings: bool,
    pub axis: Axis,
    pub grid: Grid,
    pub bipartitions: Vec<Bipartition>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        self.grid.validate()?;
        if self.bipartitions.is_empty() {
            return Err(SpecError::NoBipartitions);
        }
        for value in [self.grid.start, self.grid.stop] {
            self.point(value)
                .0
                .validate()
                .map_err(|source| SpecError::Params {
                    axis: self.axis,
                    value,
                    source,
                })?;
        }
        Ok(())
    }

    pub fn with_grid_count(mut self, count: usize) -> Self {
        self.grid.count = count;
        self
    }

    /// Parameters and detunings at one axis value.
    pub fn point(&self, value: f64) -> (SystemParams, Detunings) {
        let mut p = self.base;
        let mut det = Detunings {
            delta_c: self.delta_c,
            delta_w: self.delta_w,
        };
        match self.axis {
            Axis::DeltaW => det.delta_w[0] = value,
            Axis::DeltaC => det.delta_c = value,
            Axis::Temperature => p.temperature = value,
            Axis::Gap => p.gap_d = [value; 2],
            Axis::PowerC => p.power_c = value,
            Axis::PowerW => p.power_w = [value; 2],
            Axis::MicroFrequency => p.omega_w = [TWO_PI * value; 2],
        }
        if self.tie_micro_detunings {
            det.delta_w[1] = -det.delta_w[0];
        }
        (p, det)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    /// In ω_m units for detuning axes, SI otherwise.
    pub axis_value: f64,
    pub stable: bool,
    /// NaN when the eigenvalue computation itself failed.
    pub max_real_eig_over_omega_m: f64,
    /// Aligned with [`SweepSpec::bipartitions`]; `None` unless stable and solved.
    pub negativity: Vec<Option<f64>>,
    pub g_c_over_omega_m: f64,
    pub g_w_over_omega_m: [f64; 2],
    pub min_uncertainty_eig: Option<f64>,
    pub lyapunov_residual: Option<f64>,
    /// Numerical failure at this point, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Serial,
    #[default]
    Parallel,
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SpecError> {
    run_sweep_with(spec, Parallelism::Parallel)
}

pub fn run_sweep_with(
    spec: &SweepSpec,
    parallelism: Parallelism,
) -> Result<Vec<SweepRow>, SpecError> {
    spec.validate()?;
    let rows = match parallelism {
        Parallelism::Serial => (0..spec.grid.count)
            .map(|i| evaluate_row(spec, i))
            .collect(),
        Parallelism::Parallel => (0..spec.grid.count)
            .into_par_iter()
            .map(|i| evaluate_row(spec, i))
            .collect(),
    };
    Ok(rows)
}

fn evaluate_row(spec: &SweepSpec, index: usize) -> SweepRow {
    let axis_value = spec.grid.value(index);
    let (params, det) = spec.point(axis_value);
    let wm = params.omega_m;
    let mut row = SweepRow {
        index,
        axis_value,
        stable: false,
        max_real_eig_over_omega_m: f64::NAN,
        negativity: vec![None; spec.bipartitions.len()],
        g_c_over_omega_m: f64::NAN,
        g_w_over_omega_m: [f64::NAN; 2],
        min_uncertainty_eig: None,
        lyapunov_residual: None,
        error: None,
    };
    if let Err(e) = params.validate() {
        row.error = Some(e.to_string());
        return row;
    }
    match evaluate_point(&params, det, &spec.bipartitions) {
        Ok(report) => {
            let op = &report.operating_point;
            row.g_c_over_omega_m = op.g_c / wm;
            row.g_w_over_omega_m = op.g_w.map(|g| g / wm);
            row.stable = report.stability.stable;
            row.max_real_eig_over_omega_m = report.stability.max_real_eig / wm;
            if let Some(steady) = report.steady {
                row.negativity = steady.negativity.iter().map(|(_, e)| Some(*e)).collect();
                row.min_uncertainty_eig = Some(steady.min_uncertainty_eig);
                row.lyapunov_residual = Some(steady.residual);
            }
        }
        Err(e) => {
            // keep couplings and stability so the row still says where it failed
            let op =
                crate::model::steady_state(&params, det.delta_c * wm, det.delta_w.map(|x| x * wm));
            row.g_c_over_omega_m = op.g_c / wm;
            row.g_w_over_omega_m = op.g_w.map(|g| g / wm);
            if let Ok(s) = crate::dynamics::stability(&crate::dynamics::drift_matrix(&params, &op))
            {
                row.stable = s.stable;
                row.max_real_eig_over_omega_m = s.max_real_eig / wm;
            }
            row.error = Some(e.to_string());
        }
    }
    row
}
