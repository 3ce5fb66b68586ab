use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::warn;

use clustbench::data::{
    euclidean_distances, impute_mean, load_csv, read_partition_file, scale_zscore, Dataset, DistanceMatrix, TruthColumn,
};
use clustbench::ensemble::{generate_ensemble, EnsembleSpec};
use clustbench::external::external_scores;
use clustbench::harness::{
    emit_reports, format_number, run_benchmark, with_threads, BenchmarkConfig, BenchmarkReport, IndexValues,
};
use clustbench::indexes::{IndexEngine, IndexParams};

#[derive(Parser)]
#[command(name = "clustbench", version, about = "Calibrated cluster validation benchmarks")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Zscore,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark described by a TOML config and write the reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `master_seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the raw internal indexes of one partition.
    Indexes {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        /// Column to drop from the features (header name or zero-based position).
        #[arg(long)]
        truth_col: Option<String>,
        #[arg(long, value_enum, default_value = "zscore")]
        scale: ScaleArg,
        #[arg(long, default_value_t = 0.1)]
        sindex_p: f64,
        #[arg(long, default_value_t = 0.1)]
        kernel_p: f64,
        #[arg(long, default_value_t = 2)]
        cvnnd_k: usize,
    },
    /// Print ARI, VI and BCubed between a partition and a reference.
    Compare {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Write the random clusterings of a calibration ensemble as CSV.
    Ensemble {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = EnsembleSpec::DEFAULT_PER_ALGORITHM)]
        per_algorithm: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        truth_col: Option<String>,
        #[arg(long, value_enum, default_value = "zscore")]
        scale: ScaleArg,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn truth_column(arg: Option<&str>) -> Option<TruthColumn> {
    arg.map(|s| match s.parse::<usize>() {
        Ok(i) => TruthColumn::Index(i),
        Err(_) => TruthColumn::Name(s.to_string()),
    })
}

fn prepare(path: &Path, truth_col: Option<&str>, scale: ScaleArg) -> Result<(Dataset, DistanceMatrix)> {
    let raw = load_csv(path, truth_column(truth_col).as_ref())?;
    let mut data = impute_mean(&raw)?;
    if let ScaleArg::Zscore = scale {
        data = scale_zscore(&data)?;
    }
    let dm = euclidean_distances(&data)?;
    Ok((data, dm))
}

/// Outcome of a subcommand that ran to the end.
enum Finished {
    Ok,
    Partial,
}

fn run(config: &Path, out: Option<PathBuf>, seed: Option<u64>, threads: Option<usize>) -> Result<Finished> {
    let mut cfg = BenchmarkConfig::from_file(config)?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    let Some(out) = out.or_else(|| cfg.output_dir.clone()) else {
        bail!("no output directory: pass --out or set output_dir in the config");
    };
    let outcome = with_threads(threads, || run_benchmark(&cfg))?;
    let report = BenchmarkReport::assemble(&cfg, outcome);
    let files = emit_reports(&report, &out)?;
    println!("wrote {} files to {}", files.len(), out.display());
    for f in &report.outcome.failures {
        eprintln!("dataset '{}' failed: {}", f.dataset, f.error);
    }
    if let Some(note) = &report.pca_note {
        warn!("{note}");
    }
    Ok(if report.outcome.is_partial() {
        Finished::Partial
    } else {
        Finished::Ok
    })
}

fn indexes(
    data: &Path,
    partition: &Path,
    truth_col: Option<&str>,
    scale: ScaleArg,
    params: IndexParams,
) -> Result<Finished> {
    let (data, dm) = prepare(data, truth_col, scale)?;
    let c = read_partition_file(partition, Some(data.n()))?;
    let v = IndexEngine::new(&data, &dm, params).evaluate(&c);
    print!("{}", IndexValues::from(&v));
    for (i, why) in v.failures() {
        eprintln!("{i}: {why}");
    }
    Ok(Finished::Ok)
}

fn compare(pred: &Path, truth: &Path) -> Result<Finished> {
    let truth = read_partition_file(truth, None).with_context(|| format!("reading {}", truth.display()))?;
    let pred = read_partition_file(pred, Some(truth.n())).with_context(|| format!("reading {}", pred.display()))?;
    let s = external_scores(&truth, &pred)?;
    for (name, v) in [
        ("ari", s.ari),
        ("vi", s.vi),
        ("neg_vi", s.neg_vi),
        ("bcubed_p", s.bcubed_p),
        ("bcubed_r", s.bcubed_r),
        ("bcubed_f", s.bcubed_f),
    ] {
        println!("{name},{}", format_number(v));
    }
    Ok(Finished::Ok)
}

fn ensemble(
    data: &Path,
    spec: EnsembleSpec,
    truth_col: Option<&str>,
    scale: ScaleArg,
    out: Option<&Path>,
) -> Result<Finished> {
    let (_, dm) = prepare(data, truth_col, scale)?;
    let members = generate_ensemble(&dm, &spec)?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(BufWriter::new(sink));
    w.write_record(members.iter().map(|m| format!("{}_{}", m.algorithm, m.replicate + 1)))?;
    let labels: Vec<Vec<usize>> = members.iter().map(|m| m.partition.one_based()).collect();
    for i in 0..dm.n() {
        w.write_record(labels.iter().map(|l| l[i].to_string()))?;
    }
    w.flush()?;
    Ok(Finished::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => run(&config, out, seed, threads),
        Command::Indexes {
            data,
            partition,
            truth_col,
            scale,
            sindex_p,
            kernel_p,
            cvnnd_k,
        } => indexes(
            &data,
            &partition,
            truth_col.as_deref(),
            scale,
            IndexParams {
                sindex_p,
                kernel_p,
                cvnnd_k,
            },
        ),
        Command::Compare { pred, truth } => compare(&pred, &truth),
        Command::Ensemble {
            data,
            k,
            per_algorithm,
            seed,
            truth_col,
            scale,
            out,
        } => ensemble(
            &data,
            EnsembleSpec {
                per_algorithm,
                k,
                master_seed: seed,
            },
            truth_col.as_deref(),
            scale,
            out.as_deref(),
        ),
    };
    match result {
        Ok(Finished::Ok) => ExitCode::SUCCESS,
        Ok(Finished::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
