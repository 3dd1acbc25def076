//! Command-line front end: config files, subcommands and exit codes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::config::{compute_bounds, validate_fresnel_regime, ProblemConfig};
use crate::experiment::{operator_spectrum, run_verification, OperatorKind, VERIFY_SEED};
use crate::lifting::sample_lifted_domain;
use crate::report::{self, RunManifest};
use crate::slepian::{s_axis_spectrum, u_axis_spectrum};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LIFTED_SPECTRUM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "lifted-spectrum",
    version,
    about = "Data-space dimension of Fresnel-zone phase retrieval"
)]
pub struct Cli {
    /// JSON config; omitted values take the reference case.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override the significance threshold (dB, negative).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau_db: Option<f64>,
    /// Also write an SVG plot next to each CSV.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Where to write the run manifest. Defaults to `<out>.manifest.json`
    /// for commands with an output file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the bounds M_u, M_s and M_bar.
    Bounds,
    /// Write a singular-value spectrum as CSV.
    Spectrum {
        #[arg(long, value_enum)]
        operator: OperatorKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the normalized sinc-operator eigenvalues of one axis as CSV.
    Slepian {
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write samples of the lifted domain as CSV.
    Domain {
        #[arg(long)]
        out: PathBuf,
        /// Source-axis subdivisions; the grid has samples + 1 points.
        #[arg(long, default_value_t = 60)]
        samples: usize,
    },
    /// Run the property checks and report one line per property.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    U,
    S,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    geometry: GeometrySection,
    #[serde(default)]
    grids: GridsSection,
    #[serde(default)]
    analysis: AnalysisSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySection {
    a: Option<f64>,
    u_max: Option<f64>,
    theta_max_deg: Option<f64>,
    r_min: Option<f64>,
    r_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridsSection {
    n_x: Option<usize>,
    n_u: Option<usize>,
    n_s: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSection {
    tau_db: Option<f64>,
}

/// Failure of a CLI run, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0} propert{} failed", if *.0 == 1 { "y" } else { "ies" })]
    Property(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Property(_) => EXIT_PROPERTY,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Parse a JSON config, filling omitted values from the reference case.
pub fn parse_config(text: &str) -> Result<ProblemConfig, CliError> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
    let mut c = ProblemConfig::reference_case();
    let g = file.geometry;
    c.a = g.a.unwrap_or(c.a);
    c.r_min = g.r_min.unwrap_or(c.r_min);
    c.r_max = g.r_max.unwrap_or(c.r_max);
    c.u_max = match (g.u_max, g.theta_max_deg) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "config: geometry.theta_max_deg conflicts with geometry.u_max; give one".into(),
            ))
        }
        (Some(u), None) => u,
        (None, Some(t)) => t.to_radians().sin(),
        (None, None) => c.u_max,
    };
    c.n_x = file.grids.n_x.unwrap_or(c.n_x);
    c.n_u = file.grids.n_u.unwrap_or(c.n_u);
    c.n_s = file.grids.n_s.unwrap_or(c.n_s);
    c.tau_db = file.analysis.tau_db.unwrap_or(c.tau_db);
    Ok(c)
}

pub fn load_config(path: Option<&Path>, tau_db: Option<f64>) -> Result<ProblemConfig, CliError> {
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => ProblemConfig::reference_case(),
    };
    if let Some(t) = tau_db {
        config.tau_db = t;
    }
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

/// Apply `LIFTED_SPECTRUM_THREADS` to the dense solvers and the assembly pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    faer::set_global_parallelism(if n == 1 {
        faer::Par::Seq
    } else {
        faer::Par::rayon(n)
    });
    // Fails only if the pool was already built, in which case it stays as is.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn default_manifest(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Execute a parsed command line, printing to stdout.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let config = load_config(cli.config.as_deref(), cli.tau_db)?;
    let start = Instant::now();
    let (name, out) = match &cli.command {
        Command::Bounds => ("bounds", None),
        Command::Spectrum { out, .. } => ("spectrum", Some(out)),
        Command::Slepian { out, .. } => ("slepian", Some(out)),
        Command::Domain { out, .. } => ("domain", Some(out)),
        Command::Verify => ("verify", None),
    };
    let mut manifest = RunManifest::new(name, &config);
    for w in validate_fresnel_regime(&config) {
        eprintln!("warning: {w}");
        manifest.warnings.push(w.to_string());
    }

    let mut failed = 0;
    match &cli.command {
        Command::Bounds => {
            let b = compute_bounds(&config).map_err(|e| CliError::Config(e.to_string()))?;
            println!("{b}");
            println!(
                "m_u={} m_s={} m_bar={} (ceil {} {} {})",
                b.m_u, b.m_s, b.m_bar, b.m_u_ceil, b.m_s_ceil, b.m_bar_ceil
            );
            manifest.bounds = Some(b);
        }
        Command::Spectrum { operator, out } => {
            let s = operator_spectrum(&config, *operator)?;
            manifest.emit(out, "spectrum_csv", &report::spectrum_csv(&s))?;
            if cli.svg {
                manifest.emit(
                    &report::svg_path(out),
                    "spectrum_svg",
                    &report::spectrum_svg(&s),
                )?;
            }
            println!(
                "{}: {} values, critical index {} at {} dB",
                s.kind.label(),
                s.len(),
                s.critical_index,
                s.threshold_db
            );
            manifest.critical_index = Some(s.critical_index);
        }
        Command::Slepian { axis, out } => {
            let (s, title) = match axis {
                Axis::U => (u_axis_spectrum(&config).map_err(Error::from)?, "u axis"),
                Axis::S => (s_axis_spectrum(&config).map_err(Error::from)?, "s axis"),
            };
            manifest.emit(out, "slepian_csv", &report::slepian_csv(&s))?;
            if cli.svg {
                manifest.emit(
                    &report::svg_path(out),
                    "slepian_svg",
                    &report::slepian_svg(&s, title),
                )?;
            }
            let count = s.count_above(0.5);
            println!(
                "{title}: shannon number {} count above 0.5 {count}",
                s.shannon
            );
            manifest.shannon_number = Some(s.shannon);
            manifest.count_above_half = Some(count);
        }
        Command::Domain { out, samples } => {
            if *samples == 0 {
                return Err(CliError::Config("--samples must be positive".into()));
            }
            let d = sample_lifted_domain(&config, *samples);
            manifest.emit(out, "domain_csv", &report::domain_csv(&d, &config))?;
            if cli.svg {
                manifest.emit(
                    &report::svg_path(out),
                    "domain_svg",
                    &report::domain_svg(&d, &config),
                )?;
            }
            println!("{} samples written to {}", d.points.len(), out.display());
        }
        Command::Verify => {
            let checks = run_verification(&config, VERIFY_SEED)?;
            for c in &checks {
                println!("{c}");
            }
            failed = checks.iter().filter(|c| !c.passed).count();
            manifest.seed = Some(VERIFY_SEED);
            manifest.checks = checks;
        }
    }
    manifest.time("total", start.elapsed().as_secs_f64());
    if let Some(path) = cli
        .manifest
        .clone()
        .or_else(|| out.map(|o| default_manifest(o)))
    {
        manifest.write(&path)?;
    }
    if failed > 0 {
        return Err(CliError::Property(failed));
    }
    Ok(())
}

/// Run and map the outcome to a process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_reference_case() {
        assert_eq!(parse_config("{}").unwrap(), ProblemConfig::reference_case());
    }

    #[test]
    fn theta_converts_to_u() {
        let c = parse_config(r#"{"geometry": {"theta_max_deg": 30}}"#).unwrap();
        assert!((c.u_max - 0.5).abs() < 1e-15);
    }

    #[test]
    fn both_angle_forms_are_rejected() {
        let e = parse_config(r#"{"geometry": {"u_max": 0.5, "theta_max_deg": 30}}"#).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
        assert!(e.to_string().contains("theta_max_deg"));
    }

    #[test]
    fn unknown_keys_name_the_field() {
        let e = parse_config(r#"{"grids": {"n_y": 3}}"#).unwrap_err();
        assert!(e.to_string().contains("n_y"), "{e}");
        let e = parse_config(r#"{"solver": {}}"#).unwrap_err();
        assert!(e.to_string().contains("solver"), "{e}");
    }

    #[test]
    fn cli_parses_global_flags_after_the_subcommand() {
        let cli = Cli::try_parse_from([
            "lifted-spectrum",
            "spectrum",
            "--operator",
            "weighted",
            "--out",
            "w.csv",
            "--tau-db",
            "-30",
            "--svg",
        ])
        .unwrap();
        assert_eq!(cli.tau_db, Some(-30.0));
        assert!(cli.svg);
        assert!(matches!(
            cli.command,
            Command::Spectrum {
                operator: OperatorKind::Weighted,
                ..
            }
        ));
    }

    #[test]
    fn unknown_axis_is_a_usage_error() {
        let e = Cli::try_parse_from([
            "lifted-spectrum",
            "slepian",
            "--axis",
            "q",
            "--out",
            "x.csv",
        ])
        .unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }
}
