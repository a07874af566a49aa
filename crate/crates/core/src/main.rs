use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use superrad::calibration::{calibrate_chi0, CALIBRATION_TARGET};
use superrad::config::{parse_config, parse_config_str, ConfigFile};
use superrad::error::{create_dir, write_file};
use superrad::figures::{
    run_figure, trajectory_csv, write_sweep_artifacts, Artifacts, FigureOptions, Preset,
};
use superrad::solver::simulate;
use superrad::sweep::run_sweep;
use superrad::Error;

#[derive(Parser, Debug)]
#[command(
    name = "superrad",
    version,
    about = "Two-frequency-pumped superradiant scattering simulator"
)]
struct Cli {
    /// `key = value` config file; absent keys take the defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "N")]
    parallelism: Option<usize>,
    /// Record diagnostics every K steps.
    #[arg(long, global = true, value_name = "K", default_value_t = 10)]
    sample_every: usize,
    /// Double the backward fraction to include the mirror diagonal family.
    #[arg(long, global = true)]
    mirror_family: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single run; writes trajectory.csv.
    Simulate,
    /// Sweep described by the config's [sweep] section.
    Sweep,
    /// Run an experiment preset.
    Figure {
        #[arg(value_parser = parse_preset)]
        preset: Preset,
    },
    /// Search chi0 so the reference run hits a backward fraction.
    Calibrate {
        #[arg(long, default_value_t = CALIBRATION_TARGET)]
        target: f64,
        #[arg(long, default_value_t = 0.5)]
        chi0_min: f64,
        #[arg(long, default_value_t = 32.0)]
        chi0_max: f64,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

fn load(cli: &Cli) -> Result<ConfigFile, Error> {
    let file = match &cli.config {
        Some(p) => parse_config(p)?,
        None => parse_config_str("")?,
    };
    for w in file.sim.warnings() {
        log::warn!("{w}");
    }
    Ok(file)
}

fn figure_options(cli: &Cli, file: &ConfigFile) -> FigureOptions {
    let mut opts = FigureOptions::new(file.sim);
    opts.phi0_grid = file.sweep.phi0_grid;
    opts.values = file.sweep.values.clone();
    if let Some(p) = cli.parallelism.or(file.sweep.parallelism) {
        opts.parallelism = p;
    }
    opts.sample_every = cli.sample_every;
    opts.mirror_family = cli.mirror_family || file.sweep.mirror_family;
    opts
}

fn announce(paths: &[&Path]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let file = load(cli)?;
    match &cli.command {
        Command::Simulate => {
            let traj = simulate(&file.sim, cli.sample_every)?;
            create_dir(&cli.out)?;
            let path = cli.out.join("trajectory.csv");
            write_file(&path, &trajectory_csv(&traj))?;
            let [n00, n11, nm] = traj.final_populations();
            println!(
                "condensate = {n00}\nforward = {n11}\nbackward = {nm}\ndrift = {:e}",
                traj.max_relative_drift()
            );
            announce(&[&path]);
        }
        Command::Sweep => {
            let mut spec = file.sweep_spec();
            if let Some(p) = cli.parallelism {
                spec.parallelism = p;
            }
            spec.sample_every = cli.sample_every;
            spec.mirror_family |= cli.mirror_family;
            let res = run_sweep(&spec)?;
            create_dir(&cli.out)?;
            let art = Artifacts::in_dir(&cli.out, "sweep");
            write_sweep_artifacts(&res, spec.axis.name(), &art)?;
            announce(&[&art.csv, &art.report, &art.curve, &art.plot]);
        }
        Command::Figure { preset } => {
            let art = run_figure(*preset, &figure_options(cli, &file), &cli.out)?;
            announce(&[&art.csv, &art.report, &art.curve, &art.plot]);
        }
        Command::Calibrate {
            target,
            chi0_min,
            chi0_max,
        } => {
            let cal = calibrate_chi0(&file.sim, *target, (*chi0_min, *chi0_max), 1e-4, 60)?;
            create_dir(&cli.out)?;
            let path = cli.out.join("calibration.txt");
            write_file(&path, &cal.report())?;
            print!("{}", cal.report());
            if !cal.in_window() {
                log::warn!("calibrated run is outside the weak-pump window");
            }
            announce(&[&path]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
