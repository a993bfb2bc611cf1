//! Command-line front end for the acoustic Casimir library.
//!
//! Five subcommands share one config-file grammar: `force` (one cavity, one
//! separation), `sweep` (force across a separation grid), `dos` (density of
//! modes across the band), `energy` (broadband free energy), and
//! `sphere-plane` (proximity-approximation force across a gap grid). Results
//! are CSV files written atomically, each accompanied by a `<name>.config`
//! sidecar holding the effective configuration after flag overrides;
//! rerunning the same subcommand from the sidecar reproduces the CSV byte
//! for byte.
//!
//! Exit codes: 0 on success, 2 for configuration and usage errors, 3 for
//! computation or output failures.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use acasimir::{
    casimir_force, density_scan, force_sweep, free_energy, sphere_plane_sweep, CavityConfig,
    Method, SweepRow,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Effective, EffectiveCavity, LoadedConfig, LoadedRefl, RawConfig};
use output::{render_dos, render_rows, write_atomic};

const FORCE_HEADER: [&str; 5] = ["L_m", "force_Pa", "error_Pa", "method", "warnings"];
const ENERGY_HEADER: [&str; 5] = ["L_m", "energy_J_per_m2", "error_J_per_m2", "method", "warnings"];
const SPHERE_HEADER: [&str; 5] = ["L_m", "force_N", "error_N", "method", "warnings"];

#[derive(Parser)]
#[command(name = "acasimir", version, about = "Acoustic Casimir forces under band-limited noise")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Force per unit area on a plane cavity at one separation
    Force(RunArgs),
    /// Force per unit area across a grid of separations
    Sweep(RunArgs),
    /// Density of modes across the band at one separation
    Dos(RunArgs),
    /// Broadband free energy per unit area at one separation
    Energy(RunArgs),
    /// Sphere-plane force across a grid of gaps (proximity approximation)
    #[command(name = "sphere-plane")]
    SpherePlane(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (overrides [output] path)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Computation method: adaptive, series, or mode-sum (overrides [run])
    #[arg(long)]
    method: Option<String>,
    /// Replace one config value, e.g. --override quadrature.rel_tol=1e-6
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

enum CliError {
    Config(ConfigError),
    Compute(String),
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        CliError::Config(err)
    }
}

fn compute(err: acasimir::Error) -> CliError {
    CliError::Compute(err.to_string())
}

/// Parse `argv` and run; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(&cli.cmd) {
        Ok(()) => 0,
        Err(CliError::Config(err)) => {
            eprintln!("{err}");
            2
        }
        Err(CliError::Compute(message)) => {
            eprintln!("error: {message}");
            3
        }
    }
}

fn absolutize(path: &Path) -> Result<PathBuf, CliError> {
    if path.is_absolute() {
        Ok(path.to_path_buf())
    } else {
        std::env::current_dir()
            .map(|cwd| cwd.join(path))
            .map_err(|err| CliError::Compute(format!("cannot resolve output path: {err}")))
    }
}

fn required<'a, T>(
    value: &'a Option<T>,
    cfg_file: &str,
    subcommand: &str,
    what: &str,
) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| {
        CliError::Config(ConfigError {
            file: cfg_file.to_string(),
            line: None,
            message: format!("subcommand '{subcommand}' requires {what}"),
        })
    })
}

fn single_row(separation: f64, result: acasimir::ForceResult) -> Vec<SweepRow> {
    vec![SweepRow {
        separation,
        value: result.value,
        error_estimate: result.error_estimate,
        method: result.method,
        warnings: result.warnings,
    }]
}

fn cavity_of(
    cfg: &LoadedConfig,
    separation: f64,
    refl_a: &LoadedRefl,
    refl_b: &LoadedRefl,
) -> Result<CavityConfig, CliError> {
    CavityConfig::new(separation, refl_a.spec.clone(), refl_b.spec.clone()).map_err(|err| {
        CliError::Config(ConfigError {
            file: cfg.file.clone(),
            line: None,
            message: format!("[cavity]: {err}"),
        })
    })
}

fn execute(cmd: &Cmd) -> Result<(), CliError> {
    let (name, args) = match cmd {
        Cmd::Force(args) => ("force", args),
        Cmd::Sweep(args) => ("sweep", args),
        Cmd::Dos(args) => ("dos", args),
        Cmd::Energy(args) => ("energy", args),
        Cmd::SpherePlane(args) => ("sphere-plane", args),
    };
    let mut raw = RawConfig::load(&args.config)?;
    for spec in &args.overrides {
        raw.apply_override(spec)?;
    }
    let cfg = LoadedConfig::build(raw)?;
    let method = match &args.method {
        None => cfg.method,
        Some(text) => text.parse::<Method>().map_err(|message| ConfigError {
            file: "command line".to_string(),
            line: None,
            message: format!("--method {text:?}: {message}"),
        })?,
    };
    let out = match args.out.as_ref().or(cfg.out.as_ref()) {
        Some(path) => absolutize(path)?,
        None => {
            return Err(CliError::Config(ConfigError {
                file: cfg.file.clone(),
                line: None,
                message: "no output path: set [output] path or pass --out".to_string(),
            }))
        }
    };
    let mut effective = Effective {
        band: &cfg.band,
        cavity: None,
        sphere: None,
        sweep: None,
        dos_points: None,
        settings: &cfg.settings,
        method,
        out: &out,
    };

    let csv = match cmd {
        Cmd::Force(_) | Cmd::Energy(_) => {
            let separation = *required(&cfg.separation, &cfg.file, name, "[cavity] separation_m")?;
            let refl_a = required(&cfg.refl_a, &cfg.file, name, "[cavity] refl_a")?;
            let refl_b = required(&cfg.refl_b, &cfg.file, name, "[cavity] refl_b")?;
            let cavity = cavity_of(&cfg, separation, refl_a, refl_b)?;
            effective.cavity = Some(EffectiveCavity {
                separation: Some(separation),
                refl_a: &refl_a.echo,
                refl_b: &refl_b.echo,
            });
            let (result, header) = match cmd {
                Cmd::Energy(_) => {
                    (free_energy(&cfg.band, &cavity, &cfg.settings), &ENERGY_HEADER)
                }
                _ => (casimir_force(&cfg.band, &cavity, method, &cfg.settings), &FORCE_HEADER),
            };
            render_rows(header, &single_row(separation, result.map_err(compute)?), &[])
        }
        Cmd::Sweep(_) => {
            let refl_a = required(&cfg.refl_a, &cfg.file, name, "[cavity] refl_a")?;
            let refl_b = required(&cfg.refl_b, &cfg.file, name, "[cavity] refl_b")?;
            let grid = required(&cfg.sweep, &cfg.file, name, "a [sweep] section")?;
            effective.cavity = Some(EffectiveCavity {
                separation: None,
                refl_a: &refl_a.echo,
                refl_b: &refl_b.echo,
            });
            effective.sweep = Some(grid);
            let result = force_sweep(
                &cfg.band,
                &refl_a.spec,
                &refl_b.spec,
                &grid.build(),
                method,
                &cfg.settings,
            )
            .map_err(compute)?;
            render_rows(&FORCE_HEADER, &result.rows, &result.sign_changes)
        }
        Cmd::Dos(_) => {
            let separation = *required(&cfg.separation, &cfg.file, name, "[cavity] separation_m")?;
            let refl_a = required(&cfg.refl_a, &cfg.file, name, "[cavity] refl_a")?;
            let refl_b = required(&cfg.refl_b, &cfg.file, name, "[cavity] refl_b")?;
            let points = *required(&cfg.dos_points, &cfg.file, name, "[dos] points")?;
            effective.cavity = Some(EffectiveCavity {
                separation: Some(separation),
                refl_a: &refl_a.echo,
                refl_b: &refl_b.echo,
            });
            effective.dos_points = Some(points);
            let scan = density_scan(&cfg.band, separation, &refl_a.spec, &refl_b.spec, points)
                .map_err(compute)?;
            render_dos(&scan)
        }
        Cmd::SpherePlane(_) => {
            let radius = *required(&cfg.sphere_radius, &cfg.file, name, "[sphere_plane] radius_m")?;
            let refl_sphere = required(&cfg.refl_sphere, &cfg.file, name, "[sphere_plane] refl_sphere")?;
            let refl_plane = required(&cfg.refl_plane, &cfg.file, name, "[sphere_plane] refl_plane")?;
            let grid = required(&cfg.sweep, &cfg.file, name, "a [sweep] section (gap grid)")?;
            effective.sphere = Some((radius, &refl_sphere.echo, &refl_plane.echo));
            effective.sweep = Some(grid);
            let result = sphere_plane_sweep(
                &cfg.band,
                radius,
                &refl_sphere.spec,
                &refl_plane.spec,
                &grid.build(),
                &cfg.settings,
            )
            .map_err(compute)?;
            render_rows(&SPHERE_HEADER, &result.rows, &result.sign_changes)
        }
    };

    write_atomic(&out, &csv)
        .map_err(|err| CliError::Compute(format!("cannot write {}: {err}", out.display())))?;
    let mut sidecar_name = out
        .file_name()
        .expect("write_atomic verified the file name")
        .to_os_string();
    sidecar_name.push(".config");
    let sidecar = out.with_file_name(sidecar_name);
    write_atomic(&sidecar, config::serialize_effective(&effective).as_bytes())
        .map_err(|err| CliError::Compute(format!("cannot write {}: {err}", sidecar.display())))?;
    Ok(())
}
