//! Sweep definitions reproducing the published detuning, gap and temperature
//! curves.

use std::fmt;
use std::str::FromStr;

use super::{Axis, Grid, SweepSpec};
use crate::gaussian::{Bipartition, Subsystem};
use crate::model::SystemParams;

/// Default number of grid nodes per curve.
pub const DEFAULT_GRID: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::Fig6,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Fig2a => "unequal microwave pairs, negative detuning (-0.8..0)",
            Self::Fig2b => "unequal microwave pairs, positive detuning (0.1..0.8)",
            Self::Fig3 => "equal microwave pairs at 3/9/30/300 GHz",
            Self::Fig4 => "9 GHz pair with gaps of 20/100/500 nm",
            Self::Fig5 => "temperature dependence at 3/30/300 GHz",
            Self::Fig6 => "five bipartitions at 9 GHz, kappa_c = 0.01 omega_m",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|f| f.id() == s).ok_or_else(|| {
            let ids: Vec<_> = Self::ALL.iter().map(|f| f.id()).collect();
            format!("unknown preset `{s}` (expected one of {})", ids.join(", "))
        })
    }
}

/// Bipartitions plotted in the five-curve comparison.
pub const FIG6_PAIRS: [Bipartition; 5] = [
    Bipartition::new_unchecked(Subsystem::Opto, Subsystem::Micro1),
    Bipartition::new_unchecked(Subsystem::Opto, Subsystem::Micro2),
    Bipartition::new_unchecked(Subsystem::Mecha, Subsystem::Micro1),
    Bipartition::new_unchecked(Subsystem::Mecha, Subsystem::Micro2),
    Bipartition::MICRO,
];

fn ghz_label(f: f64) -> String {
    format!("{}GHz", f / 1e9)
}

fn detuning_curve(label: String, base: SystemParams, lo: f64, hi: f64) -> SweepSpec {
    SweepSpec {
        label,
        base,
        delta_c: 1.0,
        delta_w: [0.0; 2],
        tie_micro_detunings: true,
        axis: Axis::DeltaW,
        grid: Grid::new(lo, hi, DEFAULT_GRID),
        bipartitions: vec![Bipartition::MICRO],
    }
}

/// Sweep specs for one figure, one per plotted curve.
pub fn preset(figure: Figure) -> Result<Vec<SweepSpec>, String> {
    let base = SystemParams::reference();
    let unequal = [(9e9, 3e9), (30e9, 3e9), (30e9, 9e9)];
    let specs = match figure {
        Figure::Fig2a | Figure::Fig2b => {
            let (lo, hi) = if figure == Figure::Fig2a {
                (-0.8, 0.0)
            } else {
                (0.1, 0.8)
            };
            unequal
                .into_iter()
                .map(|(f1, f2)| {
                    let label = format!("{}_{}", ghz_label(f1), ghz_label(f2));
                    detuning_curve(label, base.with_micro_frequencies_hz(f1, f2), lo, hi)
                })
                .collect()
        }
        Figure::Fig3 => [3e9, 9e9, 30e9, 300e9]
            .into_iter()
            .map(|f| {
                detuning_curve(
                    ghz_label(f),
                    base.with_micro_frequencies_hz(f, f),
                    -0.8,
                    0.8,
                )
            })
            .collect(),
        Figure::Fig4 => [20e-9, 100e-9, 500e-9]
            .into_iter()
            .map(|d| {
                let p = SystemParams {
                    gap_d: [d; 2],
                    ..base
                };
                detuning_curve(format!("{}nm", (d * 1e9).round()), p, -0.8, 0.8)
            })
            .collect(),
        Figure::Fig5 => [(3e9, -0.05), (30e9, -0.12), (300e9, -0.13)]
            .into_iter()
            .map(|(f, dw)| SweepSpec {
                label: ghz_label(f),
                base: base.with_micro_frequencies_hz(f, f),
                delta_c: 1.0,
                delta_w: [dw, -dw],
                tie_micro_detunings: true,
                axis: Axis::Temperature,
                grid: Grid::new(0.0, 20.0, DEFAULT_GRID),
                bipartitions: vec![Bipartition::MICRO],
            })
            .collect(),
        Figure::Fig6 => {
            let p = SystemParams {
                kappa_c: 0.01 * base.omega_m,
                ..base
            };
            let mut spec = detuning_curve("9GHz".into(), p, -2.0, 2.0);
            spec.bipartitions = FIG6_PAIRS.to_vec();
            vec![spec]
        }
    };
    Ok(specs)
}
