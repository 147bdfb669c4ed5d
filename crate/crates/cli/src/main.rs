use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsf_cli::casimir_run::{output_target, to_json, write_file, write_run, write_sweep};
use rsf_cli::{run_amplify, run_casimir, run_extract, run_fock_check, run_sweep};
use rsf_cli::{AmplifyConfig, CliError, FockCase, ScenarioConfig};

#[derive(Parser)]
#[command(name = "rsf", version, about = "Reduced-state-of-the-field scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Single Casimir run: CSV of mode functions, generators and verdicts.
    Casimir(Common),
    /// Grid of Casimir runs over the config's sweep lists.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Closed-form amplifier against kinetic integration.
    Amplify {
        #[arg(long, conflicts_with_all = ["kappa", "m"])]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        kappa: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        m: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Truncated Fock-space oracle over the catalog.
    FockCheck {
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
        #[arg(long, default_value_t = rsf_core::fock_oracle::DEFAULT_N_MAX)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generator trajectory only.
    Extract(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Identity,
    BeamSplitter,
    Squeeze,
    All,
}

impl From<CaseArg> for FockCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Identity => Self::Identity,
            CaseArg::BeamSplitter => Self::BeamSplitter,
            CaseArg::Squeeze => Self::Squeeze,
            CaseArg::All => Self::All,
        }
    }
}

fn load(common: &Common) -> Result<ScenarioConfig, CliError> {
    let mut c = ScenarioConfig::load(&common.config)?;
    if let Some(r) = common.rel_tol {
        c.rel_tol = r;
    }
    if let Some(s) = common.samples {
        c.samples = s;
    }
    Ok(c)
}

fn invariant(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Invariant(what.into()))
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Casimir(common) => {
            let config = load(&common)?;
            let report = run_casimir(&config)?;
            let (dir, prefix) = output_target(&config, common.out.as_deref());
            write_run(&report, &dir, &prefix)?;
            print!("{}", to_json(&report.summary));
            invariant(report.ok(), &report.summary.violations.join("; "))
        }
        Command::Sweep { common, jobs } => {
            let config = load(&common)?;
            let report = run_sweep(&config, jobs)?;
            let (dir, prefix) = output_target(&config, common.out.as_deref());
            write_sweep(&report, &dir, &prefix)?;
            print!("{}", to_json(&report));
            invariant(report.ok(), "at least one sweep point failed")
        }
        Command::Amplify {
            config,
            kappa,
            m,
            out,
            rel_tol,
            samples,
        } => {
            let mut c = match config {
                Some(p) => AmplifyConfig::load(&p)?,
                None => AmplifyConfig::new(kappa, m),
            };
            if let Some(r) = rel_tol {
                c.rel_tol = r;
            }
            if let Some(s) = samples {
                c.samples = s;
            }
            let report = run_amplify(&c)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            write_file(&dir.join("amplify.csv"), &report.csv)?;
            print!("{}", to_json(&report));
            invariant(report.ok, "amplifier closed form and kinetics disagree beyond 1e-8")
        }
        Command::FockCheck { case, n_max, out } => {
            let report = run_fock_check(case.into(), n_max)?;
            let text = to_json(&report);
            if let Some(dir) = out {
                write_file(&dir.join("fock_check.json"), &text)?;
            }
            print!("{text}");
            invariant(report.ok, "oracle deviation above threshold")
        }
        Command::Extract(common) => {
            let config = load(&common)?;
            let report = run_extract(&config)?;
            let (dir, prefix) = output_target(&config, common.out.as_deref());
            write_file(&dir.join(format!("{prefix}_generators.csv")), &report.csv)?;
            print!("{}", to_json(&report.summary));
            invariant(report.summary.violations.is_empty(), &report.summary.violations.join("; "))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rsf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
