use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcollide::measure::blp_measure;
use qcollide::model::{full_chain_oracle, run_model, StopPolicy};
use qcollide::sweep::{
    build_spec, export_csv, merge_entries, parse_entries, parse_overrides, run_sweep,
    trace_threshold_curve, CsvPayload, OutputKind, SweepSpec,
};
use qcollide::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_INTEGRITY: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qcollide",
    version,
    about = "Collision-model qubit simulator: trajectories, backflow measures, parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single trajectory and export its per-collision records as CSV
    Run(Common),
    /// Evaluate the backflow measure over a 1-D or 2-D parameter grid
    Sweep(Common),
    /// Trace the Omega activation threshold across a temperature grid (axis1 = T)
    Threshold(ThresholdArgs),
    /// Check the iterative engine against the full-chain oracle
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct Common {
    /// Configuration file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override or add a config entry (repeatable), e.g. --set J=0.3
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation; defaults to all cores
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    common: Common,
    /// Bracket width the bisection narrows to, in strength units
    #[arg(long, default_value_t = qcollide::measure::DEFAULT_THRESHOLD_RESOLUTION)]
    resolution: f64,
}

#[derive(Args)]
struct OracleArgs {
    /// Configuration file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override or add a config entry (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Collisions to replay against the full chain (register cap: 8 direct, 7 indirect)
    #[arg(long, default_value_t = 6)]
    collisions: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Integrity { .. } => EXIT_INTEGRITY,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            })
        }
    }
}

fn load_spec(config: &Option<PathBuf>, set: &[String]) -> qcollide::Result<SweepSpec> {
    let file_entries = match config {
        Some(path) => parse_entries(&fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    let overrides = parse_overrides(set)?;
    build_spec(&merge_entries(file_entries, overrides))
}

fn with_pool<T>(
    jobs: Option<usize>,
    body: impl FnOnce() -> qcollide::Result<T> + Send,
) -> qcollide::Result<T>
where
    T: Send,
{
    match jobs {
        None => body(),
        Some(0) => Err(Error::Domain {
            name: "jobs".into(),
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        }),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?
            .install(body),
    }
}

fn dispatch(cli: Cli) -> qcollide::Result<()> {
    match cli.command {
        Command::Run(common) => {
            let spec = load_spec(&common.config, &common.set)?;
            spec.require_output(OutputKind::Trajectory)?;
            if spec.axis1.is_some() || spec.axis2.is_some() {
                return Err(Error::InvalidInput(
                    "run takes a fully fixed config; use sweep for axes".into(),
                ));
            }
            let cfg = spec.model_config_at(&[])?;
            let traj = run_model(&cfg)?;
            export_csv(&CsvPayload::Trajectory(&traj), common.out.as_deref())
        }
        Command::Sweep(common) => {
            let spec = load_spec(&common.config, &common.set)?;
            spec.require_output(OutputKind::Measure)?;
            let result = with_pool(common.jobs, || run_sweep(&spec))?;
            export_csv(&CsvPayload::Sweep(&result), common.out.as_deref())
        }
        Command::Threshold(args) => {
            let spec = load_spec(&args.common.config, &args.common.set)?;
            spec.require_output(OutputKind::Thresholds)?;
            let points = with_pool(args.common.jobs, || {
                trace_threshold_curve(&spec, args.resolution)
            })?;
            export_csv(
                &CsvPayload::Thresholds(&spec, &points),
                args.common.out.as_deref(),
            )
        }
        Command::OracleCheck(args) => {
            let spec = load_spec(&args.config, &args.set)?;
            if spec.axis1.is_some() || spec.axis2.is_some() {
                return Err(Error::InvalidInput(
                    "oracle-check takes a fully fixed config".into(),
                ));
            }
            oracle_check(&spec, args.collisions)
        }
    }
}

/// Replay `collisions` steps through both routes and compare every record
/// field. Mismatch beyond 1e-10 is an integrity failure (exit code 3).
fn oracle_check(spec: &SweepSpec, collisions: usize) -> qcollide::Result<()> {
    const TOLERANCE: f64 = 1e-10;
    let cfg = spec.model_config_at(&[])?;
    // Pin the run length so both routes produce the same number of records.
    let stop = cfg.stop();
    let cfg = {
        let mut c = cfg;
        let pinned = StopPolicy::new(collisions, stop.eps_settle(), collisions)?;
        match &mut c {
            qcollide::model::ModelConfig::Direct(d) => d.stop = pinned,
            qcollide::model::ModelConfig::Indirect(i) => i.stop = pinned,
        }
        c
    };
    let iterated = run_model(&cfg)?;
    let oracle = full_chain_oracle(&cfg, collisions)?;

    let mut max_dev = [0.0f64; 5];
    for (a, b) in iterated.records.iter().zip(oracle.records.iter()) {
        max_dev[0] = max_dev[0].max((a.dist - b.dist).abs());
        max_dev[1] = max_dev[1].max((a.d_dist - b.d_dist).abs());
        max_dev[2] = max_dev[2].max((a.sys_coherence - b.sys_coherence).abs());
        max_dev[3] = max_dev[3].max((a.env_coherence - b.env_coherence).abs());
        max_dev[4] = max_dev[4].max((a.sys_excited - b.sys_excited).abs());
    }
    let nm = blp_measure(&iterated);
    println!(
        "oracle-check: model = {}, collisions = {collisions}",
        cfg.kind().name()
    );
    for (label, dev) in ["D", "dD", "C_S", "C_R", "pop_S"].iter().zip(max_dev) {
        println!("  max |{label}| deviation: {dev:.3e}");
    }
    println!("  N over compared steps: {:.6e}", nm.total);
    let worst = max_dev.iter().cloned().fold(0.0f64, f64::max);
    if worst <= TOLERANCE {
        println!("PASS (all deviations within {TOLERANCE:.0e})");
        Ok(())
    } else {
        println!("FAIL (worst deviation {worst:.3e} exceeds {TOLERANCE:.0e})");
        Err(Error::Integrity {
            step: 0,
            detail: format!("oracle deviation {worst:.3e} exceeds {TOLERANCE:.0e}"),
        })
    }
}
