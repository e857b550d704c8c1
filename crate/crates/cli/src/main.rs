use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qfall::experiments::validation::run_validation;
use qfall::experiments::{
    run_decoherence_comparison, run_equivalence_test, run_galileo_pair, run_mass_sweep, ExperimentConfig,
    ParticleConfig, SweepSettings,
};
use qfall::states::WavepacketSpec;
use qfall::units::MassPair;
use qfall_cli::config::{parse_config, OutputSettings, ParseError, SnapshotFormat, SnapshotMode};
use qfall_cli::output::{summary, write_report};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_VALIDATE: u8 = 4;

#[derive(Parser)]
#[command(name = "qfall", version, about = "Time-of-flight statistics of quantum wavepackets in free fall")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Sectioned key-value config file; built-in defaults are used without one.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for tables and the run manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reject unknown sections and keys instead of warning.
    #[arg(long, global = true)]
    strict: bool,
    /// `none` or `strided:K`.
    #[arg(long, global = true)]
    snapshots: Option<SnapshotMode>,
    /// `csv` or `binary` (little-endian f64 quadruples t, z, re, im).
    #[arg(long, global = true)]
    snapshot_format: Option<SnapshotFormat>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Two particles dropped from matched preparations.
    Drop,
    /// Gravity versus uniformly accelerated frame.
    EpTest,
    /// Mass, state and phase sweeps with power-law fits.
    Sweep,
    /// Pure cat versus the mixture of its branches.
    Decohere,
    /// Analytic-versus-numeric oracle table.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Drop => "drop",
            Command::EpTest => "ep-test",
            Command::Sweep => "sweep",
            Command::Decohere => "decohere",
            Command::Validate => "validate",
        }
    }
}

struct Failure {
    code: u8,
    body: serde_json::Value,
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure {
            code: EXIT_CONFIG,
            body: json!({"error": "config", "message": e.to_string(), "line": e.line, "key": e.key}),
        }
    }
}

impl From<qfall::Error> for Failure {
    fn from(e: qfall::Error) -> Self {
        let mut body = json!({"error": e.kind(), "message": e.to_string()});
        match &e {
            qfall::Error::Infeasible { target, v_max } => {
                body["target"] = json!(target);
                body["v_max"] = json!(v_max);
            }
            qfall::Error::BoundaryGuard { step, probability, .. } => {
                body["step"] = json!(step);
                body["probability"] = json!(probability);
            }
            _ => {}
        }
        Failure {
            code: if e.is_config() { EXIT_CONFIG } else { EXIT_SOLVER },
            body,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_SOLVER,
            body: json!({"error": "io", "message": e.to_string()}),
        }
    }
}

fn particle(spec: qfall::Result<WavepacketSpec>, mass: f64) -> qfall::Result<ParticleConfig> {
    Ok(ParticleConfig {
        spec: spec?,
        mass: MassPair::equal(mass)?,
    })
}

/// Built-in configuration for each command when no file is given.
fn default_config(command: Command) -> qfall::Result<ExperimentConfig> {
    let mut c = ExperimentConfig::minimal();
    match command {
        Command::Drop => {
            c.particles = vec![
                particle(WavepacketSpec::gaussian(2.0, 1.0), 1.0)?,
                particle(WavepacketSpec::gaussian(2.0, 1.0), 2.0)?,
            ];
        }
        Command::Sweep => c.sweep = Some(SweepSettings::default()),
        Command::Decohere => {
            c.particles = vec![particle(WavepacketSpec::yurke_stoler(4.0, 1.0, 1.0), 1.0)?];
        }
        Command::EpTest | Command::Validate => {}
    }
    Ok(c)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (mut config, mut output, defaults, mut warnings) = match &cli.config {
        Some(path) => {
            let p = parse_config(path, cli.strict)?;
            (p.config, p.output, p.defaults, p.warnings)
        }
        None => (
            default_config(cli.command)?,
            OutputSettings::default(),
            BTreeMap::from([("config".to_string(), "built-in".to_string())]),
            Vec::new(),
        ),
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(ParseError {
                line: None,
                key: Some("threads".into()),
                message: "must be at least 1".into(),
            }
            .into());
        }
        config.threads = t;
    }
    if let Some(s) = cli.snapshots {
        output.snapshots = s;
    }
    if let Some(f) = cli.snapshot_format {
        output.snapshot_format = f;
    }
    if let SnapshotMode::Strided(k) = output.snapshots {
        config.solver.store_fields = true;
        config.solver.snapshot_stride = k;
    }
    let dir = cli
        .out
        .clone()
        .or(output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("qfall-out"));

    let report = match cli.command {
        Command::Validate => return validate(&config, cli.out.as_ref()),
        Command::Drop => run_galileo_pair(&config)?,
        Command::EpTest => run_equivalence_test(&config)?,
        Command::Sweep => run_mass_sweep(&config)?,
        Command::Decohere => run_decoherence_comparison(&config)?,
    };
    warnings.extend(report.warnings.iter().cloned());
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let files = write_report(&report, &dir, output.snapshot_format, &defaults, &warnings)?;
    print!("{}", summary(&report));
    println!("wrote {} files to {}", files.len(), dir.display());
    if cli.command == Command::EpTest && report.flags.get("equivalent") == Some(&false) {
        println!("equivalence check FAILED");
    }
    Ok(())
}

fn validate(config: &ExperimentConfig, out: Option<&PathBuf>) -> Result<(), Failure> {
    let checks = run_validation(&config.unit)?;
    let mut csv = String::from("name,value,expected,tolerance,passed\n");
    for c in &checks {
        println!(
            "{} {:<48} value={:e} expected={:e} tol={:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.expected,
            c.tolerance
        );
        csv.push_str(&format!("{},{},{},{},{}\n", c.name, c.value, c.expected, c.tolerance, c.passed));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("validate_{}.csv", config.digest())), csv)?;
    }
    if failed > 0 {
        return Err(Failure {
            code: EXIT_VALIDATE,
            body: json!({"error": "validation", "message": format!("{failed} oracle checks failed")}),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut body = f.body;
            body["command"] = json!(cli.command.name());
            body["exit_code"] = json!(f.code);
            eprintln!("{body}");
            ExitCode::from(f.code)
        }
    }
}
