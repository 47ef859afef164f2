//! Command-line front-end: sweeps to CSV/JSON with a run manifest, single-circuit
//! compilation, and the compiler self-test.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nisq_scaling::analysis::{fidelity_sweep, resource_sweep, tech_gap_sweep};
use nisq_scaling::report::{self, Record};
use nisq_scaling::{compile, oracle, AngleSource, CircuitFamily, Device, TopologyKind};
use serde::Serialize;

use config::{ConfigFile, Format, Overrides, RunConfig, SweepKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<nisq_scaling::Error> for CliError {
    fn from(e: nisq_scaling::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "nisq-scaling", version, about = "Compilation-aware resource and fidelity sweeps")]
pub struct Cli {
    /// TOML (or JSON) configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Swap count, depth and two-qubit overhead per family, topology and size.
    Resources(SweepArgs),
    /// Total fidelity per family, topology, size and improvement factor.
    Fidelity(SweepArgs),
    /// Fidelity at a fixed size and fitted threshold size per improvement factor.
    TechGap(SweepArgs),
    /// Compile one circuit and print the metrics header and gate list.
    CompileOne(CompileOneArgs),
    /// Compile random circuits and check them against the dense-unitary oracle.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// Circuit families, e.g. `kernel-linear,ghz`.
    #[arg(long = "family", value_delimiter = ',')]
    pub families: Vec<String>,
    #[arg(long = "topology", value_delimiter = ',')]
    pub topologies: Vec<String>,
    /// Qubit counts for every selected family.
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Improvement factors.
    #[arg(long = "delta", value_delimiter = ',')]
    pub delta: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CompileOneArgs {
    pub family: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "linear")]
    pub topology: String,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Random circuits per topology.
    #[arg(long, default_value_t = 200)]
    pub circuits: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    rows: usize,
    output: String,
    wall_time_s: f64,
    config: &'a ConfigFile,
}

/// Parses `args` (including the program name) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("nisq-scaling: {e}");
            e.exit_code()
        }
    }
}

fn load_file(cli: &Cli) -> Result<ConfigFile, CliError> {
    cli.config
        .as_deref()
        .map(ConfigFile::load)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_file(cli)?;
    let (kind, sweep) = match &cli.command {
        Command::Resources(a) => (SweepKind::Resources, a),
        Command::Fidelity(a) => (SweepKind::Fidelity, a),
        Command::TechGap(a) => (SweepKind::TechGap, a),
        Command::CompileOne(a) => return compile_one(cli, &file, a, stdout),
        Command::Selftest(a) => return selftest(cli, &file, a, stdout),
    };
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format,
        workers: cli.workers,
        families: sweep.families.clone(),
        topologies: sweep.topologies.clone(),
        qubit_counts: sweep.n.clone(),
        improvement_factors: sweep.delta.clone(),
    };
    let run = config::resolve(kind, &file, &overrides)?;
    run_sweep(kind, &run, stdout)
}

fn in_pool<R: Send>(workers: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match workers {
        None => Ok(job()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}"))),
    }
}

fn run_sweep(kind: SweepKind, run: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let spec = &run.spec;
    let records: Vec<Record> = in_pool(run.workers, || -> nisq_scaling::Result<_> {
        Ok(match kind {
            SweepKind::Resources => report::resource_records(&resource_sweep(spec)?, spec.seed),
            SweepKind::Fidelity => report::fidelity_records(&fidelity_sweep(spec)?, spec.seed),
            SweepKind::TechGap => report::tech_gap_records(&tech_gap_sweep(spec)?, spec.seed),
        })
    })??;

    fs::create_dir_all(&run.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", run.out.display())))?;
    let data_path = run.out.join(format!("{}.{}", kind.name(), run.format.extension()));
    let manifest_path = run.out.join(format!("{}.manifest.json", kind.name()));
    let body = match run.format {
        Format::Csv => report::csv_string(&records),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&records).expect("records serialize");
            s.push('\n');
            s
        }
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: kind.name(),
        seed: spec.seed,
        rows: records.len(),
        output: data_path.file_name().expect("file name").to_string_lossy().into_owned(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: &run.echo,
    };
    let mut manifest_text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_text.push('\n');

    write_all_or_remove(&[(&data_path, &body), (&manifest_path, &manifest_text)])?;
    let _ = writeln!(stdout, "wrote {} rows to {}", records.len(), data_path.display());
    Ok(())
}

/// Writes each file in turn; on any failure removes everything written so far.
fn write_all_or_remove(files: &[(&Path, &str)]) -> Result<(), CliError> {
    for (i, (path, text)) in files.iter().enumerate() {
        if let Err(e) = fs::write(path, text) {
            for (written, _) in &files[..=i] {
                let _ = fs::remove_file(written);
            }
            return Err(CliError::Runtime(format!("cannot write {}: {e}", path.display())));
        }
    }
    Ok(())
}

fn compile_one(
    cli: &Cli,
    file: &ConfigFile,
    args: &CompileOneArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let family: CircuitFamily = args.family.parse().map_err(|e: nisq_scaling::Error| CliError::Config(e.to_string()))?;
    let topology: TopologyKind = args.topology.parse().map_err(|e: nisq_scaling::Error| CliError::Config(e.to_string()))?;
    family
        .validate_size(args.n)
        .map_err(|e| CliError::Config(e.to_string()))?;
    file.sabre.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let circuit = family.build(args.n, AngleSource::Seeded(seed))?;
    let device = Device::new(topology, args.n)?;
    let compiled = compile(&circuit, &device, &file.sabre)?;
    stdout
        .write_all(compiled.dump().as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn selftest(cli: &Cli, file: &ConfigFile, args: &SelftestArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    file.sabre.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let report = oracle::self_test(args.circuits, seed, &file.sabre)?;
    let _ = writeln!(
        stdout,
        "selftest: {} circuits, {} equivalent, {} coupling-respecting",
        report.circuits, report.equivalent, report.coupling_respected
    );
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Runtime("selftest failed".into()))
    }
}
