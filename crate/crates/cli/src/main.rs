use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use mter::acceptance::{run_all, KNOWN_UNATTAINABLE};
use mter::analysis::{
    compression_experiment, compression_table_csv, decay_report,
    decomposition_stability_experiment, estimate_k_sub, random_signal,
    reconstruction_stability_experiment, DecompositionSetup, FunctionKind,
};
use mter::config::{ModeName, RunConfig};
use mter::inverse::{decay_certificate, even_inverse_closed, even_inverse_spectral, Kernel};
use mter::io::{
    float_mask_to_json, kernel_to_json, parse_mask, parse_pyramid, parse_signal_csv,
    pyramid_to_json, rational_mask_to_json, signal_to_csv,
};
use mter::laurent::{Mask, NormKind};
use mter::masks::{bspline_mask, MaskFamily};
use mter::transform::{decompose, reconstruct, threshold_details};
use mter::MterError;

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl From<MterError> for CliError {
    fn from(e: MterError) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "mter",
    version,
    about = "Multiscale transforms based on even-reversible subdivision"
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized experiments (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Circle sample count (power of two, at least 1024).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bspline,
    Pseudo,
    Dd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Spectral,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Kernel,
}

impl From<Mode> for ModeName {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => ModeName::Exact,
            Mode::Kernel => ModeName::Kernel,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StabilityKind {
    Rec,
    Dec,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a catalog mask as JSON.
    Mask {
        #[arg(long, value_enum)]
        family: Family,
        /// B-spline order, pseudo-spline n, or DD order n (even).
        #[arg(long)]
        order: u32,
        /// Pseudo-spline ν (defaults to 0).
        #[arg(long)]
        nu: Option<u32>,
        /// Write floating-point coefficients instead of fractions.
        #[arg(long)]
        float: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the even-inverse kernel of a mask.
    Invert {
        #[arg(long)]
        mask: PathBuf,
        /// Residual tolerance; the config value when omitted.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a signal into a pyramid.
    Decompose {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        levels: usize,
        /// Decimation; the config value when omitted.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Store odd detail entries only.
        #[arg(long)]
        packed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a signal from a pyramid.
    Reconstruct {
        #[arg(long)]
        pyramid: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hard-threshold the details of a pyramid.
    Compress {
        #[arg(long)]
        pyramid: PathBuf,
        /// Details with |d| < eps are set to zero.
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay, stability and compression reports.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Run the acceptance criteria.
    Selftest,
}

#[derive(Subcommand)]
enum Analysis {
    /// Differences and details of a sampled function against their bounds.
    Decay {
        /// sine, gaussian_bump, poly or constant.
        #[arg(long = "fn", default_value = "sine")]
        function: String,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[arg(long, default_value_t = 2)]
        base: usize,
        /// Mask JSON; the cubic B-spline when omitted.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, value_enum)]
        decimation: Option<Mode>,
        /// Emit JSON instead of CSV.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perturbation experiments for reconstruction or decomposition.
    Stability {
        #[arg(long, value_enum)]
        mode: StabilityKind,
        /// Norm: 2 or inf (reconstruction supports inf only).
        #[arg(long, default_value = "inf")]
        p: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        len: usize,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 1e-3)]
        perturbation: f64,
        #[arg(long, value_enum)]
        decimation: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thresholding error table over a grid of eps values.
    Compress {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Comma-separated thresholds.
        #[arg(long, default_value = "1e-2,1e-3,1e-4")]
        eps_grid: String,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, value_enum)]
        decimation: Option<Mode>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes via a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| {
                    if contents.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn load_mask(path: &Path) -> CliResult<Mask<f64>> {
    Ok(parse_mask(&read_text(path)?)?.to_f64())
}

fn mask_or_cubic(path: Option<&Path>) -> CliResult<(Mask<f64>, String)> {
    match path {
        Some(p) => Ok((load_mask(p)?, mask_id(p))),
        None => Ok((bspline_mask(4)?.to_f64(), "bspline-4".into())),
    }
}

fn mask_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mask".into())
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_json(&read_text(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(samples) = cli.samples {
        config.circle_samples = samples;
    }
    config.validate()?;
    Ok(config)
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Validation(e.to_string()))
}

fn spectral(alpha: &Mask<f64>, config: &RunConfig) -> CliResult<Kernel> {
    Ok(even_inverse_spectral(
        alpha,
        config.inverse_tol,
        config.guard_threshold,
    )?)
}

fn run(cli: Cli) -> CliResult<()> {
    let config = load_config(&cli)?;
    match cli.command {
        Command::Mask {
            family,
            order,
            nu,
            float,
            out,
        } => {
            let name = match family {
                Family::Bspline => "bspline",
                Family::Pseudo => "pseudo",
                Family::Dd => "dd",
            };
            let mask = MaskFamily::from_parts(name, order, nu)?.mask()?;
            let text = if float {
                float_mask_to_json(&mask.to_f64())?
            } else {
                rational_mask_to_json(&mask)?
            };
            emit(out.as_deref(), &text)
        }
        Command::Invert {
            mask,
            tol,
            method,
            out,
        } => {
            let alpha = load_mask(&mask)?;
            let tol = tol.unwrap_or(config.inverse_tol);
            let kernel = match method {
                Method::Closed => even_inverse_closed(&alpha, tol)?,
                Method::Spectral => even_inverse_spectral(&alpha, tol, config.guard_threshold)?,
                Method::Auto => match even_inverse_closed(&alpha, tol) {
                    Ok(k) => k,
                    Err(_) => even_inverse_spectral(&alpha, tol, config.guard_threshold)?,
                },
            };
            let certificate = decay_certificate(&alpha, config.circle_samples).ok();
            emit(
                out.as_deref(),
                &kernel_to_json(&kernel, certificate.as_ref())?,
            )
        }
        Command::Decompose {
            signal,
            mask,
            levels,
            mode,
            packed,
            out,
        } => {
            let alpha = load_mask(&mask)?;
            let c = parse_signal_csv(&read_text(&signal)?)?;
            let mode = config
                .decimation_mode_named(mode.map(Into::into).unwrap_or(config.mode), &alpha)?;
            let p = decompose(&c, &alpha, levels, &mode, mask_id(&mask))?;
            emit(out.as_deref(), &pyramid_to_json(&p, packed)?)
        }
        Command::Reconstruct { pyramid, mask, out } => {
            let alpha = load_mask(&mask)?;
            let p = parse_pyramid(&read_text(&pyramid)?)?;
            emit(out.as_deref(), &signal_to_csv(&reconstruct(&p, &alpha)?))
        }
        Command::Compress { pyramid, eps, out } => {
            let p = parse_pyramid(&read_text(&pyramid)?)?;
            let t = threshold_details(&p, eps)?;
            let summary = json!({
                "eps": eps,
                "kept": t.kept,
                "total": t.total,
                "kept_fraction": t.kept_fraction(),
            });
            match out {
                Some(path) => {
                    write_atomic(&path, &pyramid_to_json(&t.pyramid, false)?)?;
                    emit(None, &summary.to_string())
                }
                None => emit(None, &pyramid_to_json(&t.pyramid, false)?),
            }
        }
        Command::Analyze { what } => analyze(what, &config),
        Command::Selftest => selftest(&config),
    }
}

fn analyze(what: Analysis, config: &RunConfig) -> CliResult<()> {
    match what {
        Analysis::Decay {
            function,
            levels,
            base,
            mask,
            decimation,
            json,
            out,
        } => {
            let function: FunctionKind = function.parse()?;
            let (alpha, _) = mask_or_cubic(mask.as_deref())?;
            let gamma = spectral(&alpha, config)?;
            let mode = config
                .decimation_mode_named(decimation.map(Into::into).unwrap_or(config.mode), &alpha)?;
            let report = decay_report(function, levels, base, &alpha, &mode, &gamma)?;
            let text = if json {
                to_json(&report)?
            } else {
                report.to_csv()
            };
            emit(out.as_deref(), &text)
        }
        Analysis::Stability {
            mode: kind,
            p,
            trials,
            mask,
            len,
            levels,
            perturbation,
            decimation,
            out,
        } => {
            let norm: NormKind = p.parse()?;
            let (alpha, id) = mask_or_cubic(mask.as_deref())?;
            let mode = config
                .decimation_mode_named(decimation.map(Into::into).unwrap_or(config.mode), &alpha)?;
            let text = match kind {
                StabilityKind::Dec => {
                    let gamma = spectral(&alpha, config)?;
                    let setup = DecompositionSetup {
                        len,
                        levels,
                        perturbation,
                        trials,
                        seed: config.seed,
                        circle_samples: config.circle_samples,
                    };
                    to_json(&decomposition_stability_experiment(
                        &alpha, &mode, &gamma, norm, setup,
                    )?)?
                }
                StabilityKind::Rec => {
                    if norm != NormKind::Inf {
                        return Err(CliError::Validation(
                            "reconstruction stability is measured in the sup norm only (--p inf)"
                                .into(),
                        ));
                    }
                    let signal = random_signal(len, config.seed);
                    let pyramid = decompose(&signal, &alpha, levels, &mode, id)?;
                    let k_sub = estimate_k_sub(&alpha, levels.max(12)).k_sub;
                    to_json(&reconstruction_stability_experiment(
                        &alpha,
                        &pyramid,
                        perturbation,
                        trials,
                        config.seed,
                        k_sub,
                    )?)?
                }
            };
            emit(out.as_deref(), &text)
        }
        Analysis::Compress {
            signal,
            mask,
            eps_grid,
            levels,
            decimation,
            json,
            out,
        } => {
            let c = parse_signal_csv(&read_text(&signal)?)?;
            let (alpha, _) = mask_or_cubic(mask.as_deref())?;
            let grid = eps_grid
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Validation(format!("eps grid entry {s:?}: {e}")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            // as many levels as leave at least two coarse values
            let levels = match levels {
                Some(j) => j,
                None => {
                    let tz = c.len().trailing_zeros() as usize;
                    if c.len().is_power_of_two() {
                        tz.saturating_sub(1)
                    } else {
                        tz
                    }
                }
            };
            let mode = config
                .decimation_mode_named(decimation.map(Into::into).unwrap_or(config.mode), &alpha)?;
            let k_sub = estimate_k_sub(&alpha, levels.max(12)).k_sub;
            let rows = compression_experiment(&c, &alpha, levels, &mode, &grid, k_sub)?;
            let text = if json {
                to_json(&rows)?
            } else {
                compression_table_csv(&rows)
            };
            emit(out.as_deref(), &text)
        }
    }
}

fn selftest(config: &RunConfig) -> CliResult<()> {
    let results = run_all(config.seed);
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let unexpected: Vec<u32> = results
        .iter()
        .filter(|r| !r.passed && !KNOWN_UNATTAINABLE.contains(&r.id))
        .map(|r| r.id)
        .collect();
    text.push_str(&format!(
        "{passed}/{} criteria passed; known unattainable: {KNOWN_UNATTAINABLE:?}\n",
        results.len()
    ));
    emit(None, &text)?;
    if unexpected.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "acceptance criteria failed: {unexpected:?}"
        )))
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.to_string();
            report(
                "validation",
                message.lines().next().unwrap_or("invalid arguments"),
            );
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(m)) => {
            report("validation", &m);
            ExitCode::from(1)
        }
        Err(CliError::Io(m)) => {
            report("io", &m);
            ExitCode::from(2)
        }
    }
}
