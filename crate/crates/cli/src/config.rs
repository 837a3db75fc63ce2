//! Run configuration files.
//!
//! JSON, UTF-8. Every key carries its unit in its name; see `docs/config.md`.
//! Parameters are SI, detunings are in units of ω_m.

use std::fmt;

use omech_core::constants::TWO_PI;
use omech_core::{Axis, Bipartition, Detunings, Grid, ParamError, SweepSpec, SystemParams};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Grid size when `sweep.count` is absent.
pub const DEFAULT_COUNT: usize = omech_core::sweep::DEFAULT_GRID;

const REQUIRED_KEYS: &str =
    "params.{mech_freq_hz, q_factor, mass_kg, wavelength_m, cavity_length_m, \
     kappa_c_rad_s, power_c_w, micro_freq_hz, kappa_w_rad_s, power_w_w, gap_m, mu, temperature_k}, \
     operating.{delta_c_over_omega_m, delta_w1_over_omega_m}";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("empty configuration; required keys: {REQUIRED_KEYS}")]
    Empty,
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl ConfigError {
    fn invalid(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self::Invalid {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// A value given once for both microwave circuits, or once per circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerCircuit {
    Both(f64),
    Each([f64; 2]),
}

impl PerCircuit {
    pub fn values(self) -> [f64; 2] {
        match self {
            Self::Both(x) => [x; 2],
            Self::Each(v) => v,
        }
    }
}

impl Serialize for PerCircuit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Both(x) => s.serialize_f64(*x),
            Self::Each(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for PerCircuit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PerCircuit;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an array of two numbers")
            }

            fn visit_f64<E: de::Error>(self, x: f64) -> Result<PerCircuit, E> {
                Ok(PerCircuit::Both(x))
            }

            fn visit_i64<E: de::Error>(self, x: i64) -> Result<PerCircuit, E> {
                Ok(PerCircuit::Both(x as f64))
            }

            fn visit_u64<E: de::Error>(self, x: u64) -> Result<PerCircuit, E> {
                Ok(PerCircuit::Both(x as f64))
            }

            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<PerCircuit, A::Error> {
                let a = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let b = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(PerCircuit::Each([a, b]))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub mech_freq_hz: f64,
    pub q_factor: f64,
    pub mass_kg: f64,
    pub wavelength_m: f64,
    pub cavity_length_m: f64,
    pub kappa_c_rad_s: f64,
    pub power_c_w: f64,
    pub micro_freq_hz: PerCircuit,
    pub kappa_w_rad_s: PerCircuit,
    pub power_w_w: PerCircuit,
    pub gap_m: PerCircuit,
    pub mu: PerCircuit,
    pub temperature_k: f64,
}

impl ParamsConfig {
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            omega_m: TWO_PI * self.mech_freq_hz,
            q_factor: self.q_factor,
            mass: self.mass_kg,
            lambda_drive: self.wavelength_m,
            cavity_length: self.cavity_length_m,
            kappa_c: self.kappa_c_rad_s,
            power_c: self.power_c_w,
            omega_w: self.micro_freq_hz.values().map(|f| TWO_PI * f),
            kappa_w: self.kappa_w_rad_s.values(),
            power_w: self.power_w_w.values(),
            gap_d: self.gap_m.values(),
            mu: self.mu.values(),
            temperature: self.temperature_k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingConfig {
    pub delta_c_over_omega_m: f64,
    pub delta_w1_over_omega_m: f64,
    /// Absent means `−delta_w1_over_omega_m`, kept tied when sweeping `Δ_w1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_w2_over_omega_m: Option<f64>,
}

impl OperatingConfig {
    pub fn detunings(&self) -> Detunings {
        let w1 = self.delta_w1_over_omega_m;
        Detunings {
            delta_c: self.delta_c_over_omega_m,
            delta_w: [w1, self.delta_w2_over_omega_m.unwrap_or(-w1)],
        }
    }
}

/// Per-curve overrides of `params` and `operating`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mech_freq_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_length_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_c_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_c_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub micro_freq_hz: Option<PerCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_w_rad_s: Option<PerCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w_w: Option<PerCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_m: Option<PerCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<PerCircuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_c_over_omega_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_w1_over_omega_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_w2_over_omega_m: Option<f64>,
}

impl CurveConfig {
    fn apply(&self, base: &ParamsConfig, op: &OperatingConfig) -> (ParamsConfig, OperatingConfig) {
        let mut p = base.clone();
        let mut o = op.clone();
        macro_rules! over {
            ($dst:ident . $field:ident) => {
                if let Some(v) = self.$field {
                    $dst.$field = v;
                }
            };
        }
        over!(p.mech_freq_hz);
        over!(p.q_factor);
        over!(p.mass_kg);
        over!(p.wavelength_m);
        over!(p.cavity_length_m);
        over!(p.kappa_c_rad_s);
        over!(p.power_c_w);
        over!(p.micro_freq_hz);
        over!(p.kappa_w_rad_s);
        over!(p.power_w_w);
        over!(p.gap_m);
        over!(p.mu);
        over!(p.temperature_k);
        over!(o.delta_c_over_omega_m);
        over!(o.delta_w1_over_omega_m);
        if self.delta_w2_over_omega_m.is_some() {
            o.delta_w2_over_omega_m = self.delta_w2_over_omega_m;
        }
        (p, o)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Axis name as printed in the `axis_name` column.
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Bipartition labels such as `Micro1_Micro2`.
    pub pairs: Vec<String>,
    /// One curve per entry; absent means a single curve labelled `main`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveConfig>,
}

fn default_count() -> usize {
    DEFAULT_COUNT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub operating: OperatingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// Config key for a [`SystemParams`] field name.
fn key_for(field: &str) -> &'static str {
    match field {
        "omega_m" => "mech_freq_hz",
        "q_factor" => "q_factor",
        "mass" => "mass_kg",
        "lambda_drive" => "wavelength_m",
        "cavity_length" => "cavity_length_m",
        "kappa_c" => "kappa_c_rad_s",
        "power_c" => "power_c_w",
        "omega_w" => "micro_freq_hz",
        "kappa_w" => "kappa_w_rad_s",
        "power_w" => "power_w_w",
        "gap_d" => "gap_m",
        "mu" => "mu",
        _ => "temperature_k",
    }
}

fn param_error(prefix: &str, e: ParamError) -> ConfigError {
    let (name, msg) = match e {
        ParamError::NotFinite { name, .. } => (name, "must be finite".to_string()),
        ParamError::NonPositive { name, value } => {
            let value = if name.starts_with("omega") {
                value / TWO_PI
            } else {
                value
            };
            (name, format!("must be strictly positive, got {value}"))
        }
        ParamError::Negative { name, value } => {
            (name, format!("must be non-negative, got {value}"))
        }
        ParamError::RatioOutOfRange { name, value } => (
            name,
            format!("must lie strictly between 0 and 1, got {value}"),
        ),
        ParamError::NegativeTemperature(t) => {
            ("temperature", format!("must be non-negative, got {t}"))
        }
    };
    ConfigError::invalid(format!("{prefix}.{}", key_for(name)), msg)
}

fn check_finite(path: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(path, "must be finite"))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .to_params()
            .validate()
            .map_err(|e| param_error("params", e))?;
        check_finite(
            "operating.delta_c_over_omega_m",
            self.operating.delta_c_over_omega_m,
        )?;
        check_finite(
            "operating.delta_w1_over_omega_m",
            self.operating.delta_w1_over_omega_m,
        )?;
        if let Some(w2) = self.operating.delta_w2_over_omega_m {
            check_finite("operating.delta_w2_over_omega_m", w2)?;
        }
        if self.sweep.is_some() {
            self.sweep_specs()?;
        }
        Ok(())
    }

    /// Parameters and detunings of the single operating point.
    pub fn point(&self) -> (SystemParams, Detunings) {
        (self.params.to_params(), self.operating.detunings())
    }

    pub fn sweep_specs(&self) -> Result<Vec<SweepSpec>, ConfigError> {
        let Some(sw) = &self.sweep else {
            return Err(ConfigError::invalid(
                "sweep",
                "missing; this command needs a sweep block",
            ));
        };
        let axis: Axis = sw
            .axis
            .parse()
            .map_err(|e| ConfigError::invalid("sweep.axis", e))?;
        let bipartitions = sw
            .pairs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse()
                    .map_err(|e| ConfigError::invalid(format!("sweep.pairs[{i}]"), e))
            })
            .collect::<Result<Vec<Bipartition>, _>>()?;

        let main = [CurveConfig {
            label: "main".into(),
            ..Default::default()
        }];
        let curves: &[CurveConfig] = if sw.curves.is_empty() {
            &main
        } else {
            &sw.curves
        };

        let mut specs = Vec::with_capacity(curves.len());
        for (i, curve) in curves.iter().enumerate() {
            let (p, o) = curve.apply(&self.params, &self.operating);
            let prefix = if sw.curves.is_empty() {
                "params".to_string()
            } else {
                format!("sweep.curves[{i}]")
            };
            let base = p.to_params();
            // the swept key may legitimately be out of range at its base value
            if let Err(e) = base.validate() {
                let swept = matches!(
                    (&e, axis),
                    (ParamError::NegativeTemperature(_), Axis::Temperature)
                        | (ParamError::NonPositive { name: "gap_d", .. }, Axis::Gap)
                        | (
                            ParamError::NonPositive {
                                name: "omega_w",
                                ..
                            },
                            Axis::MicroFrequency
                        )
                );
                if !swept {
                    return Err(param_error(&prefix, e));
                }
            }
            let det = o.detunings();
            let spec = SweepSpec {
                label: curve.label.clone(),
                base,
                delta_c: det.delta_c,
                delta_w: det.delta_w,
                tie_micro_detunings: o.delta_w2_over_omega_m.is_none(),
                axis,
                grid: Grid::new(sw.start, sw.stop, sw.count),
                bipartitions: bipartitions.clone(),
            };
            spec.validate()
                .map_err(|e| ConfigError::invalid("sweep", e))?;
            specs.push(spec);
        }
        Ok(specs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a configuration. Errors name the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    if text.trim().is_empty() {
        return Err(ConfigError::Empty);
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Parse {
            path: if path == "." { "<root>".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const POINT: &str = r#"{
        "params": {
            "mech_freq_hz": 1e7, "q_factor": 5e4, "mass_kg": 1e-11,
            "wavelength_m": 1.55e-6, "cavity_length_m": 1e-3,
            "kappa_c_rad_s": 5026548.24574367, "power_c_w": 0.03,
            "micro_freq_hz": 9e9, "kappa_w_rad_s": 1256637.0614359174,
            "power_w_w": [0.03, 0.03], "gap_m": 1e-7, "mu": 0.008, "temperature_k": 0.015
        },
        "operating": { "delta_c_over_omega_m": 1.0, "delta_w1_over_omega_m": 0.1 }
    }"#;

    #[test]
    fn reference_point_parses_to_reference_params() {
        let cfg = parse_config(POINT).unwrap();
        let (p, det) = cfg.point();
        let r = SystemParams::reference();
        assert_eq!(p, r);
        assert_eq!(det.delta_w, [0.1, -0.1]);
    }

    #[test]
    fn empty_text_lists_required_keys() {
        let msg = parse_config("  \n").unwrap_err().to_string();
        assert!(msg.contains("params.{mech_freq_hz"));
        assert!(msg.contains("operating.{delta_c_over_omega_m"));
    }

    #[test]
    fn unknown_key_is_reported_with_path() {
        let text = POINT.replace("\"q_factor\"", "\"quality\"");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("params"), "{msg}");
        assert!(msg.contains("quality"), "{msg}");
    }

    #[test]
    fn wrong_type_is_reported_with_path() {
        let text = POINT.replace("\"mu\": 0.008", "\"mu\": \"small\"");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.starts_with("params.mu"), "{msg}");
        let text = POINT.replace("\"mu\": 0.008", "\"mu\": [0.008]");
        assert!(parse_config(&text)
            .unwrap_err()
            .to_string()
            .starts_with("params.mu"));
    }

    #[test]
    fn ratio_bound_is_enforced() {
        let text = POINT.replace("\"mu\": 0.008", "\"mu\": 2.0");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.starts_with("params.mu:"), "{msg}");
        assert!(msg.contains("between 0 and 1"), "{msg}");
        let text = POINT.replace("\"mu\": 0.008", "\"mu\": [0.008, 2.0]");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn missing_key_is_named() {
        let text = POINT.replace("\"mass_kg\": 1e-11,", "");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("mass_kg"), "{msg}");
    }

    #[test]
    fn frequency_errors_are_in_hertz() {
        let text = POINT.replace("\"mech_freq_hz\": 1e7", "\"mech_freq_hz\": -5.0");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("params.mech_freq_hz"), "{msg}");
        assert!(msg.contains("-5"), "{msg}");
    }

    #[test]
    fn round_trip() {
        let cfg = parse_config(POINT).unwrap();
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn sweep_block_defaults_count_and_ties_detunings() {
        let text = POINT.replace(
            "\"operating\"",
            r#""sweep": {"axis": "delta_w_over_omega_m", "start": -0.8, "stop": 0.8, "pairs": ["Micro1_Micro2"]},
            "operating""#,
        );
        let cfg = parse_config(&text).unwrap();
        let specs = cfg.sweep_specs().unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].grid.count, DEFAULT_COUNT);
        assert!(specs[0].tie_micro_detunings);
        assert_eq!(specs[0].label, "main");
    }

    #[test]
    fn bad_pair_label_is_reported() {
        let text = POINT.replace(
            "\"operating\"",
            r#""sweep": {"axis": "delta_w_over_omega_m", "start": 0, "stop": 1, "pairs": ["Opto_Opto"]},
            "operating""#,
        );
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.starts_with("sweep.pairs[0]"), "{msg}");
    }
}
