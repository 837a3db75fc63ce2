//! Physical parameters and the semiclassical operating point.
//!
//! All inputs are SI. Angular frequencies and damping rates are in rad/s;
//! damping rates are amplitude (half-width) decay rates, so an experimental
//! FWHM linewidth corresponds to `2κ`.

use thiserror::Error;

use crate::constants::{C, HBAR, K_B, TWO_PI};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must lie strictly between 0 and 1, got {value}")]
    RatioOutOfRange { name: &'static str, value: f64 },
    #[error("temperature must be non-negative, got {0} K")]
    NegativeTemperature(f64),
}

/// Laboratory parameters of the optoelectromechanical system.
///
/// Index `j` of the two-element arrays refers to microwave circuit `j + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Mechanical angular frequency ω_m, rad/s.
    pub omega_m: f64,
    /// Mechanical quality factor; the mechanical damping is `omega_m / q_factor`.
    pub q_factor: f64,
    /// Effective mechanical mass, kg.
    pub mass: f64,
    /// Optical drive wavelength, m. The cavity frequency is taken as `2πc/λ`.
    pub lambda_drive: f64,
    /// Optical cavity length, m.
    pub cavity_length: f64,
    /// Optical damping rate κ_c, rad/s.
    pub kappa_c: f64,
    /// Optical drive power, W.
    pub power_c: f64,
    /// Microwave angular resonance frequencies, rad/s.
    pub omega_w: [f64; 2],
    /// Microwave damping rates, rad/s.
    pub kappa_w: [f64; 2],
    /// Microwave drive powers, W.
    pub power_w: [f64; 2],
    /// Equilibrium capacitor gaps, m.
    pub gap_d: [f64; 2],
    /// Capacitance participation ratios `C_d / C_Σ`.
    pub mu: [f64; 2],
    /// Environment temperature, K.
    pub temperature: f64,
}

impl SystemParams {
    /// The reference experimental set: 10 MHz, 10 ng membrane with Q = 5×10⁴,
    /// a 1 mm cavity driven at 1550 nm, 30 mW on every drive, κ_c = 0.08 ω_m,
    /// κ_w = 0.02 ω_m, 100 nm gaps, μ = 0.008 and 15 mK. Both microwave circuits
    /// sit at 9 GHz.
    pub fn reference() -> Self {
        let omega_m = TWO_PI * 10.0e6;
        Self {
            omega_m,
            q_factor: 5.0e4,
            mass: 10.0e-12,
            lambda_drive: 1550.0e-9,
            cavity_length: 1.0e-3,
            kappa_c: 0.08 * omega_m,
            power_c: 30.0e-3,
            omega_w: [TWO_PI * 9.0e9; 2],
            kappa_w: [0.02 * omega_m; 2],
            power_w: [30.0e-3; 2],
            gap_d: [100.0e-9; 2],
            mu: [0.008; 2],
            temperature: 15.0e-3,
        }
    }

    pub fn with_micro_frequencies_hz(mut self, f1: f64, f2: f64) -> Self {
        self.omega_w = [TWO_PI * f1, TWO_PI * f2];
        self
    }

    /// Optical cavity angular frequency `2πc/λ`, rad/s.
    pub fn omega_c(&self) -> f64 {
        TWO_PI * C / self.lambda_drive
    }

    /// Mechanical damping rate `ω_m / Q`, rad/s.
    pub fn kappa_m(&self) -> f64 {
        self.omega_m / self.q_factor
    }

    /// Checks every invariant and hands the parameters back unchanged.
    pub fn validate(self) -> Result<Self, ParamError> {
        let positive: [(&'static str, f64); 6] = [
            ("omega_m", self.omega_m),
            ("q_factor", self.q_factor),
            ("mass", self.mass),
            ("lambda_drive", self.lambda_drive),
            ("cavity_length", self.cavity_length),
            ("kappa_c", self.kappa_c),
        ];
        let per_circuit: [(&'static str, [f64; 2]); 3] = [
            ("omega_w", self.omega_w),
            ("kappa_w", self.kappa_w),
            ("gap_d", self.gap_d),
        ];
        for (name, value) in positive
            .into_iter()
            .chain(per_circuit.into_iter().flat_map(|(n, v)| v.map(|x| (n, x))))
        {
            check_positive(name, value)?;
        }
        // zero drive power is the undriven system, not an error
        let powers = [
            ("power_c", self.power_c),
            ("power_w", self.power_w[0]),
            ("power_w", self.power_w[1]),
        ];
        for (name, value) in powers {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name, value });
            }
            if value < 0.0 {
                return Err(ParamError::Negative { name, value });
            }
        }
        for value in self.mu {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name: "mu", value });
            }
            if !(value > 0.0 && value < 1.0) {
                return Err(ParamError::RatioOutOfRange { name: "mu", value });
            }
        }
        if !self.temperature.is_finite() {
            return Err(ParamError::NotFinite {
                name: "temperature",
                value: self.temperature,
            });
        }
        if self.temperature < 0.0 {
            return Err(ParamError::NegativeTemperature(self.temperature));
        }
        Ok(self)
    }

    /// Human-readable notes for parameter sets that leave the
    /// `ω_m ≪ ω_w ≪ ω_c` regime the linearized model assumes.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let min_w = self.omega_w[0].min(self.omega_w[1]);
        let max_w = self.omega_w[0].max(self.omega_w[1]);
        if self.omega_m > 0.01 * min_w {
            out.push(format!(
                "omega_m = {:.3e} rad/s exceeds 1% of the lowest microwave frequency ({:.3e} rad/s)",
                self.omega_m, min_w
            ));
        }
        if max_w > 0.01 * self.omega_c() {
            out.push(format!(
                "microwave frequency {:.3e} rad/s exceeds 1% of the optical frequency ({:.3e} rad/s)",
                max_w,
                self.omega_c()
            ));
        }
        out
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ParamError> {
    if !value.is_finite() {
        Err(ParamError::NotFinite { name, value })
    } else if value <= 0.0 {
        Err(ParamError::NonPositive { name, value })
    } else {
        Ok(())
    }
}

/// Bose–Einstein occupation `1/(exp(ħω/k_BT) − 1)`; exactly 0 at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Drive amplitudes `E = √(2Pκ/ħω)`, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveAmplitudes {
    pub e_c: f64,
    pub e_w: [f64; 2],
}

pub fn drive_amplitudes(p: &SystemParams) -> DriveAmplitudes {
    let amp = |power: f64, kappa: f64, omega: f64| (2.0 * power * kappa / (HBAR * omega)).sqrt();
    DriveAmplitudes {
        e_c: amp(p.power_c, p.kappa_c, p.omega_c()),
        e_w: [0, 1].map(|j| amp(p.power_w[j], p.kappa_w[j], p.omega_w[j])),
    }
}

/// Single-quantum couplings of the mechanics to each cavity, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareCouplings {
    pub g0_c: f64,
    pub g0_w: [f64; 2],
}

pub fn bare_couplings(p: &SystemParams) -> BareCouplings {
    let zpf = (HBAR / (p.mass * p.omega_m)).sqrt();
    BareCouplings {
        g0_c: p.omega_c() / p.cavity_length * zpf,
        g0_w: [0, 1].map(|j| p.mu[j] * p.omega_w[j] / (2.0 * p.gap_d[j]) * zpf),
    }
}

/// Steady-state amplitudes, linearized couplings and bath occupations at one
/// choice of effective detunings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Effective optical detuning, rad/s.
    pub delta_c: f64,
    /// Effective microwave detunings, rad/s.
    pub delta_w: [f64; 2],
    pub alpha_s: f64,
    pub beta_s: [f64; 2],
    /// Static mechanical displacement in zero-point units.
    pub q_s: f64,
    /// Linearized optomechanical coupling, rad/s.
    pub g_c: f64,
    /// Linearized electromechanical couplings, rad/s.
    pub g_w: [f64; 2],
    pub n_mech: f64,
    pub n_w: [f64; 2],
}

/// Fixed point of the nonlinear Langevin equations for given effective
/// detunings. Amplitudes are taken real and positive.
pub fn steady_state(p: &SystemParams, delta_c: f64, delta_w: [f64; 2]) -> OperatingPoint {
    let drive = drive_amplitudes(p);
    let bare = bare_couplings(p);

    let alpha_s = drive.e_c / p.kappa_c.hypot(delta_c);
    let beta_s = [0, 1].map(|j| drive.e_w[j] / p.kappa_w[j].hypot(delta_w[j]));
    let q_s = (bare.g0_c * alpha_s * alpha_s
        + bare.g0_w[0] * beta_s[0] * beta_s[0]
        + bare.g0_w[1] * beta_s[1] * beta_s[1])
        / p.omega_m;

    OperatingPoint {
        delta_c,
        delta_w,
        alpha_s,
        beta_s,
        q_s,
        g_c: std::f64::consts::SQRT_2 * bare.g0_c * alpha_s,
        g_w: [0, 1].map(|j| std::f64::consts::SQRT_2 * bare.g0_w[j] * beta_s[j]),
        n_mech: thermal_occupation(p.omega_m, p.temperature),
        n_w: p.omega_w.map(|w| thermal_occupation(w, p.temperature)),
    }
}

/// Drive detunings before the static radiation-pressure and electrostatic shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareDetunings {
    pub delta_0c: f64,
    pub delta_0w: [f64; 2],
}

pub fn bare_detunings(op: &OperatingPoint, p: &SystemParams) -> BareDetunings {
    let bare = bare_couplings(p);
    BareDetunings {
        delta_0c: op.delta_c + bare.g0_c * op.q_s,
        delta_0w: [0, 1].map(|j| op.delta_w[j] + bare.g0_w[j] * op.q_s),
    }
}
