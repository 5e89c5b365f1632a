use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use npp_qaoa::anneal::AnnealConfig;
use npp_qaoa::bench::{
    emit_plot, mean_by_optimizer, read_records, read_summary, run_benchmark, run_one,
    summarize, write_records, write_summary, BenchPlan, BenchRecord, Metric, OptimizerKind,
};
use npp_qaoa::qubo::{exact_best, generate_instance, NppInstance};
use npp_qaoa::{Error, Result};

/// Metaheuristic-tuned QAOA for number partitioning.
#[derive(Parser, Debug)]
#[command(name = "nppq", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a random instance as JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        min: u64,
        #[arg(long, default_value_t = 100)]
        max: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one optimizer on one instance.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        optimizer: OptimizerKind,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value_t = 10)]
        pop: usize,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long)]
        seed: u64,
        /// Also write the record as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the sizes × instances × optimizers matrix.
    Bench {
        #[arg(long, default_value = "4,8,12", value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        instances: usize,
        #[arg(long, default_value = "all")]
        optimizers: String,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value_t = 10)]
        pop: usize,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Per-(optimizer, n) means of a results file.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grouped bar chart of a summary file.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        metric: Metric,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the optimal difference, energy and R of an instance.
    SolveExact {
        #[arg(long)]
        instance: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Config(_) => 1,
        Error::Capability(_) | Error::Overflow(_) => 2,
        Error::Io(_) | Error::Parse(_) => 3,
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &PathBuf) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn execute(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Gen {
            n,
            seed,
            min,
            max,
            out,
        } => {
            let inst = generate_instance(n, seed, min, max)?;
            inst.save(&out)?;
        }
        Cmd::Run {
            instance,
            optimizer,
            layers,
            pop,
            iters,
            seed,
            csv,
        } => {
            let inst = NppInstance::load(&instance)?;
            let plan = BenchPlan {
                layers,
                population: pop,
                iterations: iters,
                ..BenchPlan::default()
            };
            let metrics = run_one(&plan, &inst, optimizer, seed)?;
            println!(
                "optimizer={optimizer} n={} best_energy={} R={} R_minus_1={} opt_gap={} evals={} samples={} wall_time_s={:.6}",
                inst.len(),
                metrics.best_energy,
                metrics.ratio,
                metrics.r_minus_1,
                metrics.opt_gap,
                metrics.evals,
                metrics.samples,
                metrics.wall_time_s
            );
            if let Some(path) = csv {
                let record = BenchRecord {
                    optimizer: optimizer.name().to_string(),
                    n: inst.len(),
                    instance_seed: inst.seed(),
                    run_seed: seed,
                    outcome: Ok(metrics),
                };
                let mut w = create(&path)?;
                write_records(std::slice::from_ref(&record), &mut w)?;
                w.flush()?;
            }
        }
        Cmd::Bench {
            sizes,
            instances,
            optimizers,
            layers,
            pop,
            iters,
            seed,
            out,
            workers,
        } => {
            if workers == 0 {
                return Err(Error::Argument("--workers must be at least 1".into()));
            }
            let plan = BenchPlan {
                sizes,
                instances,
                optimizers: OptimizerKind::parse_list(&optimizers)?,
                layers,
                population: pop,
                iterations: iters,
                master_seed: seed,
                anneal: AnnealConfig::default(),
                workers,
                ..BenchPlan::default()
            };
            let records = run_benchmark(&plan)?;
            let mut w = create(&out)?;
            write_records(&records, &mut w)?;
            w.flush()?;
            let errors = records.iter().filter(|r| r.is_error()).count();
            eprintln!("{} records written to {} ({errors} errors)", records.len(), out.display());
            for (name, mean) in mean_by_optimizer(&records) {
                eprintln!("  {name:<12} mean R-1 = {mean:.6}");
            }
        }
        Cmd::Summarize { input, out } => {
            let records = read_records(open(&input)?)?;
            let rows = summarize(&records);
            let mut w = create(&out)?;
            write_summary(&rows, &mut w)?;
            w.flush()?;
        }
        Cmd::Plot { input, metric, out } => {
            let rows = read_summary(open(&input)?)?;
            emit_plot(&rows, metric, &out)?;
        }
        Cmd::SolveExact { instance } => {
            let inst = NppInstance::load(&instance)?;
            let best = exact_best(&inst)?;
            println!("d={}", best.diff);
            println!("energy={}", best.energy);
            println!("R={}", best.ratio);
            println!("assignment={}", best.bitstring);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
