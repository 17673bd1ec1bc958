//! `oqtest`: black-box testing of oracle quantum programs.
//!
//! Exit codes: 0 when the requested work succeeded (and, for `test`,
//! every round passed), 1 when a test campaign found a failure, 2 for
//! configuration or environment errors.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use oqtest_cli::config::{CampaignConfig, CountSpec, ModeChoice, PairingChoice};
use oqtest_cli::records::write_records;
use oqtest_cli::runner;

#[derive(Parser)]
#[command(
    name = "oqtest",
    version,
    about = "Black-box testing of oracle quantum programs on an embedded statevector simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a test campaign against a benchmark or mutant
    Test(TestArgs),
    /// Show the derived quantum class inventory without executing
    Plan(PlanArgs),
    /// Repetition sweep for the appended-Ry mutant families (CSV)
    Rq1(SeedOut),
    /// Timing ratio of the two output-checking procedures (CSV, informational)
    Rq2(SeedOut),
    /// Detection maps for the behavioral mutants (DOT files + CSV summary)
    Rq3(Rq3Args),
    /// Misjudgment proportions at matched phase repetition counts (CSV)
    Rq4(SeedOut),
    /// 100-round verdict counts over the full program suite (CSV)
    Rq5(Rq5Args),
}

#[derive(Args)]
struct TestArgs {
    /// Benchmark or mutant name, e.g. QAdder or Parity_P_AddZ
    #[arg(long)]
    target: Option<String>,
    /// JSON campaign config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cross-class pairing criterion
    #[arg(long)]
    pairing: Option<PairingChoice>,
    /// Misjudgment bound used by auto repetition counts
    #[arg(long)]
    alpha: Option<f64>,
    /// Basis repetitions: integer or auto(<pass probability>)
    #[arg(long)]
    ncb: Option<CountSpec>,
    /// Superposition repetitions: integer, auto(<phase gap>), or auto(min-scan)
    #[arg(long)]
    ntv: Option<CountSpec>,
    /// Inputs sampled per quantum class
    #[arg(long)]
    samples_per_class: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output checking procedure for basis inputs
    #[arg(long)]
    mode: Option<ModeChoice>,
    /// Stop a round at its first failing check (default)
    #[arg(long, overrides_with = "no_fail_fast")]
    fail_fast: bool,
    /// Run every check even after a failure
    #[arg(long)]
    no_fail_fast: bool,
    /// Independent campaign rounds
    #[arg(long)]
    rounds: Option<u64>,
    /// Write result records as CSV here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent rounds (1 = serial)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pairing: Option<PairingChoice>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    ncb: Option<CountSpec>,
    #[arg(long)]
    ntv: Option<CountSpec>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON plan here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeedOut {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Rq3Args {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Directory for per-program DOT files and the CSV summary
    #[arg(long, default_value = "rq3-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Rq5Args {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Output CSV path for per-round records
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl TestArgs {
    fn into_config(self) -> Result<(CampaignConfig, Option<PathBuf>, usize)> {
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::load(path)?,
            None => CampaignConfig::default(),
        };
        if let Some(target) = self.target {
            cfg.target = target;
        }
        if let Some(pairing) = self.pairing {
            cfg.criterion = pairing;
        }
        if let Some(alpha) = self.alpha {
            cfg.alpha = alpha;
        }
        if let Some(ncb) = self.ncb {
            cfg.n_cb = ncb;
        }
        if let Some(ntv) = self.ntv {
            cfg.n_tv = ntv;
        }
        if let Some(samples) = self.samples_per_class {
            cfg.samples_per_class = samples;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mode) = self.mode {
            cfg.check_mode = mode;
        }
        if self.no_fail_fast {
            cfg.fail_fast = false;
        } else if self.fail_fast {
            cfg.fail_fast = true;
        }
        if let Some(rounds) = self.rounds {
            cfg.rounds = rounds;
        }
        Ok((cfg, self.out, self.jobs))
    }
}

fn write_or_print(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_test(args: TestArgs) -> Result<bool> {
    let (cfg, out, jobs) = args.into_config()?;
    let (records, all_passed) = runner::run_test(&cfg, jobs)?;
    let passes = records.iter().filter(|r| r.passed()).count();
    for record in records.iter().filter(|r| !r.passed()) {
        println!(
            "FAIL {} round {}: class {} input {} ({} repetitions executed)",
            record.program, record.round, record.failing_class, record.failing_input,
            record.reps_used
        );
    }
    println!(
        "{} {}: {}/{} rounds passed",
        if all_passed { "PASS" } else { "FAIL" },
        cfg.target,
        passes,
        records.len()
    );
    if let Some(path) = out {
        write_records(&path, &records)?;
        eprintln!("records written to {}", path.display());
    }
    Ok(all_passed)
}

fn cmd_plan(args: PlanArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => CampaignConfig::load(path)?,
        None => CampaignConfig::default(),
    };
    if let Some(target) = args.target {
        cfg.target = target;
    }
    if let Some(pairing) = args.pairing {
        cfg.criterion = pairing;
    }
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    if let Some(ncb) = args.ncb {
        cfg.n_cb = ncb;
    }
    if let Some(ntv) = args.ntv {
        cfg.n_tv = ntv;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let plan = runner::build_plan(&cfg)?;
    let mut json = serde_json::to_string_pretty(&plan)?;
    json.push('\n');
    write_or_print(args.out.as_ref(), &json)
}

fn cmd_rq1(args: SeedOut) -> Result<()> {
    let rows = runner::run_rq1(args.seed)?;
    write_or_print(args.out.as_ref(), &runner::rows_to_csv(&rows)?)
}

fn cmd_rq2(args: SeedOut) -> Result<()> {
    let rows = runner::run_rq2(args.seed)?;
    write_or_print(args.out.as_ref(), &runner::rows_to_csv(&rows)?)
}

fn cmd_rq3(args: Rq3Args) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let reports = runner::run_rq3(args.seed)?;
    for report in &reports {
        let path = args.out_dir.join(format!("{}.dot", report.program));
        std::fs::write(&path, &report.dot)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = runner::rq3_summary(&reports);
    std::fs::write(args.out_dir.join("summary.csv"), runner::rows_to_csv(&summary)?)?;
    println!(
        "wrote {} detection maps and summary.csv to {}",
        reports.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_rq4(args: SeedOut) -> Result<()> {
    let rows = runner::run_rq4(args.seed)?;
    write_or_print(args.out.as_ref(), &runner::rows_to_csv(&rows)?)
}

fn cmd_rq5(args: Rq5Args) -> Result<()> {
    let (records, summaries) = runner::run_rq5(args.seed, args.jobs)?;
    if let Some(path) = &args.out {
        write_records(path, &records)?;
        eprintln!("per-round records written to {}", path.display());
    }
    print!("{}", runner::rows_to_csv(&summaries)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(args) => {
            return match cmd_test(args) {
                Ok(true) => ExitCode::from(0),
                Ok(false) => ExitCode::from(1),
                Err(err) => {
                    eprintln!("error: {err:#}");
                    ExitCode::from(2)
                }
            };
        }
        Command::Plan(args) => cmd_plan(args),
        Command::Rq1(args) => cmd_rq1(args),
        Command::Rq2(args) => cmd_rq2(args),
        Command::Rq3(args) => cmd_rq3(args),
        Command::Rq4(args) => cmd_rq4(args),
        Command::Rq5(args) => cmd_rq5(args),
    };
    match result {
        Ok(()) => ExitCode::from(0),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
