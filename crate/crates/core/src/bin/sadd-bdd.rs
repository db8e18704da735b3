use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sadd_bdd::fooling::{self, BalancedPartition, SaddMsbOracle};
use sadd_bdd::harness::{self, ExperimentConfig, LemmaMode, Target};
use sadd_bdd::sadd::SaddParams;

#[derive(Parser)]
#[command(version, about = "BDDs for the shifted addition A + (B >> D)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one diagram and print its size and width.
    Build {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "all_outputs")]
        target: Target,
        /// `canonical`, `random:<seed>` or a comma-separated variable list.
        #[arg(long, default_value = "canonical")]
        order: String,
        /// Write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = harness::DEFAULT_NODE_CAP)]
        cap: usize,
    },
    /// Random-ordering experiment; writes per-trial and summary CSV files.
    Experiment {
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 8, 16])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "all_outputs")]
        target: Target,
        /// Per-trial CSV; the summary goes next to it with a `.summary.csv` suffix.
        #[arg(long, default_value = "experiment.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = harness::DEFAULT_NODE_CAP)]
        cap: usize,
    },
    /// Check the fooling-set construction over balanced partitions.
    VerifyLemma {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "exhaustive")]
        mode: LemmaMode,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the proven bound next to the plotted series.
    Bounds {
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 8, 16])]
        n: Vec<u32>,
    },
    /// Construct and verify the fooling set for one partition, e.g. `L=a1,b1`.
    Fooling {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value = "1/2")]
        omega: String,
        /// Members checked pairwise before sub-sampling kicks in.
        #[arg(long, default_value_t = harness::MEMBER_CHECK_LIMIT)]
        max_members: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every member.
        #[arg(long)]
        list: bool,
    },
}

fn summary_path(out: &std::path::Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build {
            n,
            target,
            order,
            dot,
            cap,
        } => {
            let params = SaddParams::minimal(n)?;
            let order = harness::parse_order(&params, &order)?;
            println!("order {order}");
            let (mgr, roots) = harness::build_target(&params, order, target, cap)?;
            println!("size {}", mgr.dag_size(&roots)?);
            println!("width {}", mgr.max_width(&roots)?);
            if let Some(path) = dot {
                std::fs::write(&path, mgr.to_dot(&roots)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(true)
        }
        Command::Experiment {
            n,
            trials,
            seed,
            target,
            out,
            cap,
        } => {
            let mut config = ExperimentConfig::new(n, trials, seed, target);
            config.node_cap = cap;
            let result = harness::run_experiment(&config)?;
            harness::emit_csv(&result.records, &out)?;
            harness::emit_summary_csv(&result.summary, &summary_path(&out))?;
            print!("{}", harness::summary_csv(&result.summary));
            for s in result.summary.iter().filter(|s| s.trials_capped > 0) {
                eprintln!(
                    "n={}: {} trials exceeded the node cap",
                    s.n, s.trials_capped
                );
            }
            if target == Target::AllOutputs {
                for c in harness::compare_with_figure(&result)? {
                    println!(
                        "n={} width {} (plot {}) size {} (plot {}) within x2: {}",
                        c.n,
                        c.min_width,
                        c.reference_width,
                        c.min_size,
                        c.reference_size,
                        c.within_factor_two
                    );
                    if let Some(d) = c.diagnostic {
                        println!("  counting conventions: {d}");
                    }
                }
            }
            Ok(true)
        }
        Command::VerifyLemma {
            n,
            mode,
            samples,
            seed,
        } => {
            let report = harness::verify_lemma(n, mode, samples, seed)?;
            print!("{report}");
            Ok(report.passed())
        }
        Command::Bounds { n } => {
            println!("n,proven,plot,2^(n/2-1)");
            for b in harness::lower_bound_curve(&n) {
                let plot = b.figure.map(|v| v.to_string()).unwrap_or_default();
                println!("{},{},{},{}", b.n, b.proven, plot, b.half_exponent);
            }
            Ok(true)
        }
        Command::Fooling {
            n,
            partition,
            omega,
            max_members,
            seed,
            list,
        } => {
            let omega = fooling::parse_omega(&omega)?;
            let part = BalancedPartition::from_spec(n, &partition, omega)?;
            let fs = fooling::build_fooling_set(&part)?;
            let choice = fs.shift().expect("constructed set");
            print!("{}", choice.report.to_text());
            if list {
                print!("{}", fs.to_text());
            } else {
                println!("members {}", fs.len());
            }
            let verdict =
                fooling::verify_fooling_set_sampled(&SaddMsbOracle { n }, &fs, max_members, seed)?;
            println!(
                "valid {} (members checked {}, pairs checked {}, subsampled {})",
                verdict.valid, verdict.members_checked, verdict.pairs_checked, verdict.subsampled
            );
            if let Some(w) = verdict.witness {
                println!("witness {w:?}");
            }
            if !choice.meets_bound {
                bail!("split of {} is below n/4", choice.report.split_len());
            }
            Ok(verdict.valid)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
