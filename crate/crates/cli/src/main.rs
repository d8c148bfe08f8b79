use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stopwords_rmt::config::{read_config_file, Entries};
use stopwords_rmt::stages::{self, FITS_FILE, SERIES_FILE};
use stopwords_rmt::{CliError, PipelineConfig};

/// Corpus-specific stop words from the spacing statistics of each word.
#[derive(Parser, Debug)]
#[command(name = "stopwords-rmt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run ingest, fit and select in one go.
    Pipeline(Common),
    /// Tokenize the corpus and write vocabulary.csv and series.csv.
    Ingest(Common),
    /// Fit every word's spacing distribution and write fits.csv.
    Fit {
        /// Spacing table to read (defaults to OUTPUT/series.csv).
        #[arg(long)]
        series: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Threshold fits.csv into the stop-word list.
    Select {
        /// Fit table to read (defaults to OUTPUT/fits.csv).
        #[arg(long)]
        fits: Option<PathBuf>,
        /// Spacing table used for dumps (defaults to the sibling of --fits).
        #[arg(long)]
        series: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// `key = value` configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus: a directory of .txt files or a JSONL file of {"id","text"}.
    #[arg(long)]
    input: Option<PathBuf>,
    /// txt-dir, jsonl or auto.
    #[arg(long)]
    input_format: Option<String>,
    #[arg(long)]
    top_n: Option<String>,
    /// Histogram bins.
    #[arg(long)]
    bins: Option<String>,
    #[arg(long)]
    max_spacing: Option<String>,
    #[arg(long)]
    percentile: Option<String>,
    /// linear or nearest-rank.
    #[arg(long)]
    percentile_method: Option<String>,
    /// article or sentence.
    #[arg(long)]
    gap_scope: Option<String>,
    #[arg(long)]
    min_articles: Option<String>,
    /// Minimum in-window spacings per fit, or auto.
    #[arg(long)]
    min_fit_samples: Option<String>,
    #[arg(long)]
    poly_degree: Option<String>,
    /// Skip the EMD detrending step.
    #[arg(long)]
    no_emd: bool,
    /// Treat digits as token characters.
    #[arg(long)]
    keep_digits: bool,
    #[arg(long)]
    threads: Option<String>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// none, flagged or a comma-separated word list.
    #[arg(long)]
    dump_histograms: Option<String>,
    /// none, flagged or a comma-separated word list.
    #[arg(long)]
    dump_unfolded: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let mut entries = match &self.config {
            Some(path) => read_config_file(path)?,
            None => Entries::new(),
        };
        let mut set = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                entries.insert(key.to_owned(), v);
            }
        };
        let path_string = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        set("input_path", path_string(&self.input));
        set("input_format", self.input_format.clone());
        set("top_n", self.top_n.clone());
        set("n_bins", self.bins.clone());
        set("max_spacing", self.max_spacing.clone());
        set("percentile", self.percentile.clone());
        set("percentile_method", self.percentile_method.clone());
        set("gap_scope", self.gap_scope.clone());
        set("min_articles", self.min_articles.clone());
        set("min_fit_samples", self.min_fit_samples.clone());
        set("poly_degree", self.poly_degree.clone());
        set("emd_enabled", self.no_emd.then(|| "false".to_owned()));
        set("keep_digits", self.keep_digits.then(|| "true".to_owned()));
        set("threads", self.threads.clone());
        set("output_dir", path_string(&self.output));
        set("dump_histograms", self.dump_histograms.clone());
        set("dump_unfolded", self.dump_unfolded.clone());
        Ok(PipelineConfig::from_entries(&entries)?)
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Pipeline(common) => {
            let cfg = common.resolve()?;
            let (i, f, s) = stages::run_pipeline(&cfg)?;
            println!("{i}\n{f}\n{s}");
        }
        Command::Ingest(common) => {
            let cfg = common.resolve()?;
            println!("{}", stages::ingest(&cfg)?);
        }
        Command::Fit { series, common } => {
            let cfg = common.resolve()?;
            let series = series.unwrap_or_else(|| cfg.output_dir.join(SERIES_FILE));
            println!("{}", stages::fit(&cfg, &series)?);
        }
        Command::Select {
            fits,
            series,
            common,
        } => {
            let cfg = common.resolve()?;
            let fits = fits.unwrap_or_else(|| cfg.output_dir.join(FITS_FILE));
            println!("{}", stages::select(&cfg, &fits, series.as_deref())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
