use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omech_cli::commands::{self, load_config, preset_specs};
use omech_cli::{CliError, Destination, Format};

#[derive(Parser)]
#[command(
    name = "omech",
    version,
    about = "Steady-state entanglement of an optoelectromechanical system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the single operating point of a config.
    Eval {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a sweep from a preset or a config with a sweep block.
    Sweep {
        #[arg(
            long,
            value_name = "NAME",
            conflicts_with = "config",
            required_unless_present = "config"
        )]
        preset: Option<String>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Override the number of grid points.
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List the built-in presets.
    Presets,
    /// Run the built-in oracle and invariant checks.
    Check,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; several curves go to <stem>_<label>.<ext>.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

/// `--format`, then the config's output block, then the `--out` extension.
fn resolve_format(arg: Option<FormatArg>, config: Option<Format>, out: Option<&PathBuf>) -> Format {
    arg.map(Format::from).or(config).unwrap_or_else(|| {
        match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match cli.command {
        Command::Eval { config, out } => {
            let cfg = load_config(&config)?;
            if cfg.sweep.is_some() {
                return Err(CliError::Usage(format!(
                    "{}: eval takes a config without a sweep block; use `omech sweep --config`",
                    config.display()
                )));
            }
            let out_cfg = cfg.output.as_ref();
            let path = out
                .out
                .or_else(|| out_cfg.and_then(|o| o.path.clone()).map(PathBuf::from));
            let format = resolve_format(out.format, out_cfg.map(|o| o.format), path.as_ref());
            match path {
                Some(p) => {
                    let mut buf = Vec::new();
                    commands::cmd_eval(&cfg, format, &mut buf)?;
                    std::fs::write(&p, buf).map_err(|e| CliError::Io {
                        path: p.display().to_string(),
                        source: e,
                    })?;
                }
                None => {
                    commands::cmd_eval(&cfg, format, &mut lock)?;
                }
            }
        }
        Command::Sweep {
            preset,
            config,
            grid,
            out,
        } => {
            let (mut specs, out_cfg) = match (preset, config) {
                (Some(name), _) => (preset_specs(&name)?, None),
                (None, Some(path)) => {
                    let cfg = load_config(&path)?;
                    (cfg.sweep_specs()?, cfg.output)
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "either --preset or --config is required".into(),
                    ))
                }
            };
            if let Some(n) = grid {
                specs = specs.into_iter().map(|s| s.with_grid_count(n)).collect();
            }
            let path = out.out.or_else(|| {
                out_cfg
                    .as_ref()
                    .and_then(|o| o.path.clone())
                    .map(PathBuf::from)
            });
            let format = resolve_format(out.format, out_cfg.map(|o| o.format), path.as_ref());
            let dest = path.map_or(Destination::Stdout, Destination::File);
            let written = commands::cmd_sweep(&specs, &dest, format, &mut lock)?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Presets => commands::cmd_presets(&mut lock)?,
        Command::Check => commands::cmd_check(&mut lock)?,
    }
    lock.flush().map_err(|e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
