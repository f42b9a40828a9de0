use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rotorfsi::checks::{run_suite, SuiteOptions};
use rotorfsi::error::Error;
use rotorfsi::harness;
use rotorfsi::io::config::presets;
use rotorfsi::io::{load_config, RunConfig};

const CONFIG_ERROR: u8 = 2;
const RUNTIME_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "rotorfsi", version, about = "Elastic rotor in a channel flow: monolithic ALE finite elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run(Common),
    /// Run once per Young's modulus in the sweep list.
    Sweep(Common),
    /// Generate the mesh and its quality report without solving.
    MeshOnly(Common),
    /// Run the property suite and report every check.
    Check {
        #[command(flatten)]
        common: Common,
        /// Scenario for the stiffness sweep check; the shipped sweep preset
        /// when omitted.
        #[arg(long)]
        sweep_config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file; `check` falls back to the shipped reference preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Stop after this many steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Mesh generator salt.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(c) => Failure::Config(c.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load(path: Option<&Path>, fallback: &str, seed: u64) -> Result<RunConfig, Failure> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?,
        None => fallback.to_string(),
    };
    let mut cfg = load_config(&text).map_err(|e| Failure::Config(e.to_string()))?;
    cfg.mesh.seed = seed;
    Ok(cfg)
}

fn required(c: &Common) -> Result<RunConfig, Failure> {
    match &c.config {
        Some(p) => load(Some(p), "", c.seed),
        None => Err(Failure::Config("--config is required".into())),
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run(c) => {
            let cfg = required(&c)?;
            let out = harness::run(&cfg, &c.out, c.steps, None)?;
            let last = out.probe.samples.last();
            println!(
                "{} steps, {} snapshots, final tip |ud| {:.6e}, output in {}",
                out.reports.len(),
                out.vtk_files.len(),
                last.map_or(0.0, |s| s.magnitude()),
                c.out.display()
            );
        }
        Command::Sweep(c) => {
            let cfg = required(&c)?;
            if cfg.sweep_e.is_empty() {
                return Err(Failure::Config("sweep.e: the sweep list is empty".into()));
            }
            let out = harness::sweep(&cfg, &c.out, c.steps)?;
            for (e, r) in &out.runs {
                match r {
                    Ok(series) => {
                        let last = series.samples.last().map_or(0.0, |s| s.magnitude());
                        println!("E = {e:e}: final tip |ud| {last:.6e}");
                    }
                    Err(err) => println!("E = {e:e}: failed: {err}"),
                }
            }
            if out.failures() > 0 {
                return Err(Failure::Runtime(format!("{} of {} runs failed", out.failures(), out.runs.len())));
            }
        }
        Command::MeshOnly(c) => {
            let cfg = required(&c)?;
            print!("{}", harness::mesh_only(&cfg, &c.out)?);
        }
        Command::Check { common, sweep_config } => {
            let cfg = load(common.config.as_deref(), presets::TABLE1, common.seed)?;
            let sweep = load(sweep_config.as_deref(), presets::SWEEP, common.seed)?;
            let opts = SuiteOptions {
                sweep: Some(sweep),
                ..Default::default()
            };
            std::fs::create_dir_all(&common.out).map_err(|e| Failure::Runtime(e.to_string()))?;
            let results = run_suite(&cfg, &opts, &common.out);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            if failed > 0 {
                return Err(Failure::Runtime(format!("{failed} checks failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(CONFIG_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(RUNTIME_FAILURE)
        }
    }
}
