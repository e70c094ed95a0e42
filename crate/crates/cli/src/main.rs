//! `rrc` command line: `bench run|summarize|compare|radar` and
//! `data info`. Exit codes: 0 success, 1 partial failures, 2 bad
//! configuration or unreadable inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rrc_cli::{campaign, config, ingest, radar, report};
use rrc_core::{average_ranks, LOSS_NAMES};

#[derive(Parser)]
#[command(name = "rrc", version, about = "Reference-classifier correction benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Campaign execution and reporting
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Dataset utilities
    #[command(subcommand)]
    Data(DataCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Run a campaign described by a config file
    Run { config: PathBuf },
    /// Write per-criterion mean-loss tables and print their means
    Summarize { results_dir: PathBuf },
    /// Friedman and pairwise signed-rank comparison per classifier kind
    Compare {
        results_dir: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Emit an average-rank radar SVG per classifier kind
    Radar { results_dir: PathBuf },
}

#[derive(Subcommand)]
enum DataCommand {
    /// Print instance count, dimensionality, classes, and imbalance
    Info { path: PathBuf },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_records(results_dir: &Path) -> Result<Vec<campaign::ResultRecord>, String> {
    let path = if results_dir.extension().is_some_and(|e| e == "csv") {
        results_dir.to_path_buf()
    } else {
        results_dir.join("results.csv")
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.display(), e))?;
    campaign::records_from_csv(&text)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Bench(BenchCommand::Run { config: path }) => {
            let text =
                fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.display(), e))?;
            let config = config::parse_config(&text).map_err(|e| e.to_string())?;
            let outcome = campaign::run_campaign(&config).map_err(|e| e.to_string())?;
            println!(
                "{} records written to {}",
                outcome.records.len(),
                config.output.display()
            );
            if outcome.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for failure in &outcome.failures {
                    eprintln!("failure: {failure}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Bench(BenchCommand::Summarize { results_dir }) => {
            let records = load_records(&results_dir)?;
            let tables = report::mean_loss_tables(&records);
            let tables_dir = results_dir.join("tables");
            fs::create_dir_all(&tables_dir).map_err(|e| e.to_string())?;
            for kt in &tables {
                for (c, name) in LOSS_NAMES.iter().enumerate() {
                    let path = tables_dir.join(format!("{}_{}.csv", kt.kind, name));
                    fs::write(&path, kt.tables[c].to_csv()).map_err(|e| e.to_string())?;
                }
            }
            print!("{}", report::render_summary(&tables));
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(BenchCommand::Compare { results_dir, alpha }) => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(format!("alpha must be in (0, 1), got {alpha}"));
            }
            let records = load_records(&results_dir)?;
            let tables = report::mean_loss_tables(&records);
            let mut partial = false;
            for kt in &tables {
                match report::compare_kind(kt, alpha) {
                    Ok(cmp) => print!("{}", report::render_comparison(&cmp, alpha)),
                    Err(message) => {
                        eprintln!("{}: {}", kt.kind, message);
                        partial = true;
                    }
                }
            }
            Ok(if partial {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Bench(BenchCommand::Radar { results_dir }) => {
            let records = load_records(&results_dir)?;
            let tables = report::mean_loss_tables(&records);
            let mut partial = false;
            for kt in &tables {
                if kt.variants.len() < 2 {
                    eprintln!("{}: radar needs at least two variants", kt.kind);
                    partial = true;
                    continue;
                }
                let ranks: Vec<Vec<f64>> = kt
                    .tables
                    .iter()
                    .map(|t| average_ranks(t).average)
                    .collect();
                let series: Vec<(String, Vec<f64>)> = kt
                    .variants
                    .iter()
                    .enumerate()
                    .map(|(v, name)| (name.clone(), ranks.iter().map(|r| r[v]).collect()))
                    .collect();
                let svg = radar::radar_svg(&kt.kind, &LOSS_NAMES, &series);
                let path = results_dir.join(format!("radar_{}.svg", kt.kind));
                fs::write(&path, svg).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            Ok(if partial {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Data(DataCommand::Info { path }) => {
            let out = ingest::load_dataset(&path).map_err(|e| e.to_string())?;
            if out.dropped_rows > 0 {
                eprintln!(
                    "warning: dropped {} rows with missing values",
                    out.dropped_rows
                );
            }
            println!("{}", out.data.summarize());
            Ok(ExitCode::SUCCESS)
        }
    }
}
