use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use subregion::search::{run, Algorithm};
use subregion::QueryImage;
use subregion_cli::bench::{bench, write_csv};
use subregion_cli::eval::eval_precision;
use subregion_cli::oracle::{run_oracle, OracleOptions};
use subregion_cli::pgm::read_pgm;
use subregion_cli::pipeline::{build_index, list_pgm, ExplicitIndexSettings};
use subregion_cli::records::{parse_results, write_query_records, QueryRun};
use subregion_cli::synthetic::{generate, write_corpus, SyntheticSpec};
use subregion_cli::{CliError, CliResult, IndexFile, Layer, Settings};

#[derive(Parser)]
#[command(name = "subregion", version, about = "Top-k connected subregion search over tiled grayscale images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// TOML file of default settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long = "tile-size")]
    tile_size: Option<usize>,
    #[arg(long)]
    capacity: Option<usize>,
    /// l1 or l2.
    #[arg(long)]
    metric: Option<String>,
    /// paper-dp or safe.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn layer(&self) -> Layer {
        Layer {
            lambda: self.lambda,
            c: self.c,
            tile_size: self.tile_size,
            dim: self.dim,
            capacity: self.capacity,
            metric: self.metric.clone(),
            mode: self.mode.clone(),
            k: self.k,
            seed: self.seed,
            background: None,
        }
    }

    fn settings(&self) -> CliResult<Settings> {
        Settings::resolve(self.config.as_deref(), &self.layer())
    }

    /// Index-shaping settings given by flag or config file.
    fn explicit(&self) -> CliResult<ExplicitIndexSettings> {
        let file = match &self.config {
            Some(p) => Layer::from_file(p)?,
            None => Layer::default(),
        };
        Ok(ExplicitIndexSettings {
            metric: self.metric.is_some() || file.metric.is_some(),
            dim: self.dim.is_some() || file.dim.is_some(),
            tile_size: self.tile_size.is_some() || file.tile_size.is_some(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tile, describe, reduce and index every PGM image of a directory.
    BuildIndex {
        /// Directory of binary PGM images.
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Top-k search for one query image or a directory of them.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// linear, tars or spars.
        #[arg(long, default_value = "spars")]
        algo: String,
        /// Result records go here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave wall-clock timings out of the summary records.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a seeded synthetic corpus with ground truth.
    GenSynthetic {
        /// TOML corpus spec; the built-in 50-image corpus when omitted.
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Top-k precision of query records against ground truth.
    EvalPrecision {
        /// Query output (JSON lines).
        results: PathBuf,
        ground_truth: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Timing and counter table for a set of queries, as CSV.
    Bench {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Comma-separated list of algorithms.
        #[arg(long, default_value = "linear,tars,spars")]
        algo: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Soundness, capturability and reduction checks of the region solvers.
    OracleCheck {
        /// Comma-separated matrix shapes such as 3x3,4x4.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(std::fs::File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: p.to_path_buf(),
        source: e,
    }
}

/// A single PGM file, or every PGM in a directory, as named query grids.
fn load_queries(index: &IndexFile, path: &Path) -> CliResult<Vec<(String, QueryImage)>> {
    let files = if path.is_dir() {
        list_pgm(path)?
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(CliError::Data(format!("no query images in {}", path.display())));
    }
    files
        .into_iter()
        .map(|f| {
            let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, index.query_from_image(&read_pgm(&f)?)?))
        })
        .collect()
}

fn parse_sizes(s: &str) -> CliResult<Vec<(usize, usize)>> {
    s.split(',')
        .map(|part| {
            let (r, c) = part
                .trim()
                .split_once('x')
                .ok_or_else(|| usage(format!("size {part:?} is not ROWSxCOLS")))?;
            Ok((r.parse().map_err(usage)?, c.parse().map_err(usage)?))
        })
        .collect()
}

fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::BuildIndex { images, out, common } => {
            let settings = common.settings()?;
            let (file, report) = build_index(&images, &settings)?;
            for (path, why) in &report.skipped {
                eprintln!("warning: skipped {}: {why}", path.display());
            }
            file.save(&out)?;
            println!(
                "images {} tiles {} skipped {} energy_retained {:.6} depth {}",
                report.images,
                report.tiles,
                report.skipped.len(),
                report.energy_retained,
                report.depth
            );
            Ok(())
        }
        Command::Query {
            index,
            query,
            algo,
            out,
            no_timing,
            common,
        } => {
            let settings = common.settings()?;
            let algorithm: Algorithm = algo.parse().map_err(usage)?;
            let file = IndexFile::load(&index)?;
            let config = file.search_config(&settings, &common.explicit()?)?;
            let queries = load_queries(&file, &query)?;
            let mut w = output(out.as_deref())?;
            let index_path = index.display().to_string();
            for (name, q) in &queries {
                let outcome = run(algorithm, q, &file.index, &file.catalog, &config)?;
                write_query_records(
                    &mut w,
                    &file,
                    &QueryRun {
                        query: name,
                        index_path: &index_path,
                        algorithm,
                        config: &config,
                        outcome: &outcome,
                        with_timing: !no_timing,
                    },
                )?;
            }
            w.flush().map_err(|e| io_err(Path::new("<output>"), e))
        }
        Command::GenSynthetic { spec, out, common } => {
            let mut spec = match spec {
                Some(p) => SyntheticSpec::from_file(&p)?,
                None => SyntheticSpec::desk_default(0),
            };
            if let Some(seed) = common.seed {
                spec.seed = seed;
            }
            let corpus = generate(&spec)?;
            write_corpus(&corpus, &out)?;
            println!(
                "images {} queries {} placements {}",
                corpus.images.len(),
                corpus.queries.len(),
                corpus.truth.images.iter().map(|i| i.placements.len()).sum::<usize>()
            );
            Ok(())
        }
        Command::EvalPrecision {
            results,
            ground_truth,
            common,
        } => {
            let k = common.k.unwrap_or(5);
            let text = std::fs::read_to_string(&results).map_err(|e| io_err(&results, e))?;
            let records = parse_results(&text)?;
            let truth = subregion_cli::synthetic::GroundTruth::load(&ground_truth)?;
            let report = eval_precision(&records, &truth, k)?;
            for q in &report.per_query {
                println!("{} {}/{} {:.3}", q.query, q.true_matches, k, q.precision);
            }
            println!("precision@{k} {:.4}", report.mean);
            Ok(())
        }
        Command::Bench {
            index,
            query,
            algo,
            out,
            common,
        } => {
            let settings = common.settings()?;
            let algorithms = algo
                .split(',')
                .map(|a| a.trim().parse::<Algorithm>().map_err(usage))
                .collect::<CliResult<Vec<_>>>()?;
            let file = IndexFile::load(&index)?;
            let config = file.search_config(&settings, &common.explicit()?)?;
            let queries = load_queries(&file, &query)?;
            let rows = bench(&file, &queries, &config, &algorithms)?;
            let mut w = output(out.as_deref())?;
            write_csv(&mut w, &rows)?;
            w.flush().map_err(|e| io_err(Path::new("<output>"), e))
        }
        Command::OracleCheck { sizes, trials, common } => {
            let mut opts = OracleOptions {
                trials,
                seed: common.seed.unwrap_or(0),
                ..OracleOptions::default()
            };
            if let Some(s) = sizes {
                opts.sizes = parse_sizes(&s)?;
            }
            let report = run_oracle(&opts)?;
            print!("{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Oracle("oracle check found violations".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
