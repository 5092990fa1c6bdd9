use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ramsey_noise::scenario::{run_scenario, write_artifacts, ScenarioConfig, ScenarioKind, Target};
use ramsey_noise::{Error, RamseyProtocol, Result};

#[derive(Parser)]
#[command(name = "ramsey-noise", version, about = "Repeated Ramsey measurement theory and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Override the run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of repetitions.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Override the number of cycles per repetition.
    #[arg(long, global = true)]
    cycles: Option<usize>,
    /// Output directory (default: the config's outputs.dir, else ./out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for the Monte-Carlo stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `paper` raises the default repetition count to 300.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Desk)]
    tolerance_profile: Profile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Profile {
    Desk,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form correlators for the configured noise.
    Analytic { config: PathBuf },
    /// Raw outcome series.
    Simulate { config: PathBuf },
    /// Simulated correlators against theory.
    Compare { config: PathBuf },
    /// Block-sum distributions.
    Distribution { config: PathBuf },
    /// Outcome power spectrum.
    Spectrum { config: PathBuf },
    /// Hard-coded figure and table datasets.
    Reproduce {
        /// One of the names printed by `--help`.
        #[arg(value_parser = parse_target)]
        target: Target,
        /// Optional config supplying run and analysis blocks.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_target(s: &str) -> std::result::Result<Target, String> {
    s.parse::<Target>().map_err(|_| {
        let names: Vec<&str> = Target::ALL.iter().map(|t| t.name()).collect();
        format!("unknown target '{s}'; expected one of {}", names.join(", "))
    })
}

fn load_as(path: &Path, kind: ScenarioKind) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if cfg.scenario != kind {
        return Err(Error::Config(format!(
            "config declares scenario {:?} but the {:?} subcommand was used",
            cfg.scenario, kind
        )));
    }
    cfg.scenario = kind;
    Ok(cfg)
}

fn resolve(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.command {
        Command::Analytic { config } => load_as(config, ScenarioKind::Analytic)?,
        Command::Simulate { config } => load_as(config, ScenarioKind::Simulate)?,
        Command::Compare { config } => load_as(config, ScenarioKind::Compare)?,
        Command::Distribution { config } => load_as(config, ScenarioKind::Distribution)?,
        Command::Spectrum { config } => load_as(config, ScenarioKind::Spectrum)?,
        Command::Reproduce { target, config } => {
            let mut c = match config {
                Some(p) => ScenarioConfig::load(p)?,
                None => ScenarioConfig::new(ScenarioKind::Reproduce, RamseyProtocol::default(), Default::default()),
            };
            c.scenario = ScenarioKind::Reproduce;
            c.target = Some(*target);
            if c.outputs.prefix.is_empty() {
                c.outputs.prefix = format!("{}_", target.name());
            }
            c
        }
    };
    let o = &cli.common;
    if o.tolerance_profile == Profile::Paper {
        cfg.run.repetitions = 300;
    }
    if let Some(s) = o.seed {
        cfg.run.seed = s;
    }
    if let Some(r) = o.reps {
        cfg.run.repetitions = r;
    }
    if let Some(n) = o.cycles {
        cfg.run.cycles = n;
    }
    if let Some(d) = &o.out_dir {
        cfg.outputs.dir = Some(d.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let cfg = resolve(cli)?;
    for w in cfg.simulation().validate().unwrap_or_default() {
        eprintln!("warning: {w}");
    }
    let art = run_scenario(&cfg)?;
    let dir = cfg.outputs.dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    for path in write_artifacts(&art, &dir, &cfg.outputs.prefix)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
