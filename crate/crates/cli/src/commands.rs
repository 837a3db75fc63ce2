//! Subcommand implementations. Each writes its report to `out` and returns
//! an error carrying the process exit code.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use omech_core::sweep::table;
use omech_core::{
    evaluate_point, preset, run_sweep, Bipartition, Figure, GaussianError, PointReport, SweepRow,
    SweepSpec,
};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 1 for usage, configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numerical(_) => 2,
            _ => 1,
        }
    }

    fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<GaussianError> for CliError {
    fn from(e: GaussianError) -> Self {
        Self::Numerical(e.to_string())
    }
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    crate::config::parse_config(&text).map_err(CliError::from)
}

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Report fields in print order; `None` renders empty / `null`.
fn eval_fields(report: &PointReport) -> Vec<(String, Option<f64>)> {
    let wm = report.omega_m();
    let op = &report.operating_point;
    let mut f = vec![
        ("G_c_over_omega_m".to_string(), Some(op.g_c / wm)),
        ("G_w1_over_omega_m".to_string(), Some(op.g_w[0] / wm)),
        ("G_w2_over_omega_m".to_string(), Some(op.g_w[1] / wm)),
        (
            "max_real_eig_over_omega_m".to_string(),
            Some(report.stability.max_real_eig_over_omega_m(wm)),
        ),
    ];
    for pair in Bipartition::ALL {
        f.push((format!("EN_{}", pair.label()), report.negativity(pair)));
    }
    f.push((
        "lyapunov_residual".to_string(),
        report.steady.as_ref().map(|s| s.residual),
    ));
    f
}

/// Single operating point: couplings, stability, all six negativities and
/// the Lyapunov residual. An unstable point is a result, not an error.
pub fn cmd_eval(
    cfg: &RunConfig,
    format: Format,
    out: &mut dyn Write,
) -> Result<PointReport, CliError> {
    let (params, det) = cfg.point();
    for w in params.regime_warnings() {
        eprintln!("warning: {w}");
    }
    let report = evaluate_point(&params, det, &Bipartition::ALL)?;
    let fields = eval_fields(&report);
    match format {
        Format::Csv => {
            writeln!(out, "stable,{}", report.stability.stable).map_err(stdout_err)?;
            for (k, v) in &fields {
                writeln!(out, "{k},{}", v.map(fmt17).unwrap_or_default()).map_err(stdout_err)?;
            }
        }
        Format::Json => {
            let mut m = Map::new();
            m.insert("stable".into(), report.stability.stable.into());
            for (k, v) in fields {
                m.insert(k, v.map_or(Value::Null, num));
            }
            let text =
                serde_json::to_string_pretty(&Value::Object(m)).expect("JSON object serializes");
            writeln!(out, "{text}").map_err(stdout_err)?;
        }
    }
    Ok(report)
}

/// Where sweep output goes.
#[derive(Debug, Clone, PartialEq)]
pub enum Destination {
    Stdout,
    /// A single curve goes to this path; several curves go to
    /// `<stem>_<label>.<ext>` next to it.
    File(PathBuf),
}

pub fn curve_path(base: &Path, label: &str, n_curves: usize, format: Format) -> PathBuf {
    if n_curves == 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| format.extension().to_string());
    base.with_file_name(format!("{stem}_{label}.{ext}"))
}

fn write_rows(
    w: &mut dyn Write,
    spec: &SweepSpec,
    rows: &[SweepRow],
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => table::write_csv(w, spec, rows),
        Format::Json => table::write_json(w, spec, rows),
    }
}

/// Runs every curve and writes it. Rows that hit a numerical failure are
/// still written; they turn the exit status into 2 afterwards.
pub fn cmd_sweep(
    specs: &[SweepSpec],
    dest: &Destination,
    format: Format,
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut failures = Vec::new();
    for spec in specs {
        for w in spec.base.regime_warnings() {
            eprintln!("warning [{}]: {w}", spec.label);
        }
        let rows =
            run_sweep(spec).map_err(|e| CliError::Usage(format!("curve {}: {e}", spec.label)))?;
        failures.extend(rows.iter().filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("{} #{}: {e}", spec.label, r.index))
        }));
        match dest {
            Destination::Stdout => {
                if specs.len() > 1 {
                    writeln!(out, "# curve: {}", spec.label).map_err(stdout_err)?;
                }
                write_rows(out, spec, &rows, format).map_err(stdout_err)?;
            }
            Destination::File(base) => {
                let path = curve_path(base, &spec.label, specs.len(), format);
                let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
                let mut w = BufWriter::new(file);
                write_rows(&mut w, spec, &rows, format)
                    .and_then(|_| w.flush())
                    .map_err(|e| CliError::io(&path, e))?;
                written.push(path);
            }
        }
    }
    if failures.is_empty() {
        Ok(written)
    } else {
        Err(CliError::Numerical(format!(
            "{} point(s) failed, first: {}",
            failures.len(),
            failures[0]
        )))
    }
}

pub fn preset_specs(name: &str) -> Result<Vec<SweepSpec>, CliError> {
    let fig: Figure = name.parse().map_err(CliError::Usage)?;
    preset(fig).map_err(CliError::Usage)
}

pub fn cmd_presets(out: &mut dyn Write) -> Result<(), CliError> {
    for fig in Figure::ALL {
        let specs = preset(fig).map_err(CliError::Usage)?;
        let labels: Vec<&str> = specs.iter().map(|s| s.label.as_str()).collect();
        writeln!(
            out,
            "{:<6} {:<58} axis={} curves={}",
            fig.id(),
            fig.description(),
            specs[0].axis,
            labels.join(",")
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

/// Runs the built-in oracle and invariant checks; fails with exit code 2 if
/// any of them does not hold.
pub fn cmd_check(out: &mut dyn Write) -> Result<(), CliError> {
    let results = crate::check::run_all();
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{tag}  {}: {}", r.name, r.detail).map_err(stdout_err)?;
        failed += usize::from(!r.passed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{failed} of {} checks failed",
            results.len()
        )))
    }
}
