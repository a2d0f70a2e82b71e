use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use intda_core::experiments::example_report::run_worked_example;
use intda_core::experiments::sweep::{run_sweep, SweepRun};
use intda_core::experiments::verify::{run_verify, VerifyOptions};
use intda_core::experiments::{
    default_output_path, run_experiment, AggregateRow, ExperimentRun, ExperimentSpec,
    OUTPUT_DIR_ENV,
};

#[derive(Parser)]
#[command(name = "intda", version, about = "Interview-then-match simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV; overrides the spec's `output_path`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a DA-only lambda sweep described by a JSON spec with a `sweep` grid.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Balanced markets of 50 (340 replications) and 1700 (10 replications),
    /// lambda in {1/4, 1/2, 3/4}, five interview slots.
    ReplicateTable1 {
        #[arg(long, default_value_t = 2021)]
        seed: u64,
        /// Skip the 1700-agent markets.
        #[arg(long)]
        small_only: bool,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "out")]
        out_dir: PathBuf,
    },
    /// 500 DA markets of 100 per cell over the default lambda grid.
    ReplicateFigure1 {
        #[arg(long, default_value_t = 2021)]
        seed: u64,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run DA and Int-DA on the 3x4 example market and print a trace.
    ExamplePaper,
    /// Check DA and the interview scheduler against brute-force enumeration.
    Verify {
        /// Largest number of agents per side (at most 6).
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        k_prime: usize,
    },
}

fn read_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn pct(v: f64) -> String {
    if v.is_nan() {
        "    -".into()
    } else {
        format!("{:5.1}", 100.0 * v)
    }
}

/// Rank shares are over all doctors; the CSVs also carry the shares among
/// matched doctors.
fn print_summary(rows: &[AggregateRow]) {
    println!(
        "{:>5} {:>5} {:>5} {:<7} {:>5} {:>5} {:>5} {:>5} {:>5} {:>5} {:>5}",
        "n", "ld", "lh", "mech", "unm%", "1st%", "top3%", "swap%", "=DA%", "blkM%", "blkU%"
    );
    for r in rows {
        println!(
            "{:>5} {:>5.2} {:>5.2} {:<7} {} {} {} {} {} {} {}",
            r.n,
            r.lambda_d,
            r.lambda_h,
            r.mechanism.as_str(),
            pct(r.unmatched_fraction),
            pct(r.first_rank_fraction_all),
            pct(r.top3_rank_fraction_all),
            pct(r.same_partner_on_swap_fraction),
            pct(r.identical_to_da_fraction),
            pct(r.blocking_fraction_matched),
            pct(r.blocking_fraction_unmatched),
        );
    }
}

fn write_run(run: &ExperimentRun, path: &Path) -> Result<()> {
    let a = run.write(path)?;
    print_summary(&run.summary);
    println!(
        "wrote {}, {}, {}",
        a.csv.display(),
        a.summary.display(),
        a.manifest.display()
    );
    Ok(())
}

fn write_sweep(run: &SweepRun, path: &Path) -> Result<()> {
    let (csv, manifest) = run.write(path)?;
    println!("{:>5} {:>5} {:>7} {:>7}", "ld", "lh", "1st%", "swap%");
    for r in &run.rows {
        println!(
            "{:>5.2} {:>5.2} {:>7} {:>7}",
            r.lambda_d,
            r.lambda_h,
            pct(r.first_rank_fraction),
            pct(r.same_partner_on_swap_fraction)
        );
    }
    println!("wrote {}, {}", csv.display(), manifest.display());
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { spec, out } => {
            let spec = read_spec(&spec)?;
            let path = out.unwrap_or_else(|| ExperimentRun::output_path(&spec, "simulate.csv"));
            write_run(&run_experiment(&spec)?, &path)?;
        }
        Command::Sweep { spec, out } => {
            let spec = read_spec(&spec)?;
            let path = out
                .or_else(|| spec.output_path.clone())
                .unwrap_or_else(|| default_output_path("sweep.csv"));
            write_sweep(&run_sweep(&spec)?, &path)?;
        }
        Command::ReplicateTable1 {
            seed,
            small_only,
            out_dir,
        } => {
            let mut sizes = vec![(50, 340)];
            if !small_only {
                sizes.push((1700, 10));
            }
            for (n, reps) in sizes {
                let spec = ExperimentSpec::table(n, reps, seed);
                write_run(
                    &run_experiment(&spec)?,
                    &out_dir.join(format!("table1_n{n}.csv")),
                )?;
            }
        }
        Command::ReplicateFigure1 { seed, out_dir } => {
            let spec = ExperimentSpec::figure(seed);
            write_sweep(&run_sweep(&spec)?, &out_dir.join("figure1.csv"))?;
        }
        Command::ExamplePaper => {
            let report = run_worked_example()?;
            print!("{}", report.trace);
            println!("all checks passed");
        }
        Command::Verify {
            n,
            trials,
            seed,
            k,
            k_prime,
        } => {
            let mut options = VerifyOptions::new(n, trials, seed);
            options.capacities = vec![(k, k_prime)];
            let report = run_verify(&options)?;
            println!(
                "{} trials, {} stable matchings and {} pairwise-stable schedules enumerated",
                report.trials, report.stable_matchings, report.pairwise_stable_schedules
            );
            if !report.passed() {
                for f in &report.failures {
                    eprintln!("FAIL {f}");
                }
                bail!("{} check(s) failed", report.failures.len());
            }
            println!("all checks passed");
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
