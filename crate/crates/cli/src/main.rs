use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ipstem::corpus::{
    ingest_raw_text, read_prefix_table, read_word_list, Delimiters, IngestOptions, TokenizerConfig,
};
use ipstem::eval::{cluster_consistency, evaluate, parse_clusters, parse_gold};
use ipstem::ip::{build_instance, export_ampl};
use ipstem::{probability_profile, FrequencyModel, Solver, Stemmer};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "ipstem", version, about = "Corpus-driven suffix stripping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a frequency model from a word list, raw text or prefix table.
    Build(BuildArgs),
    /// Stem words given as arguments, or one per line on stdin.
    Stem(StemArgs),
    /// Show the profile, program, solution and runs behind one stem.
    Explain(ExplainArgs),
    /// Write the program for one word as an AMPL model and data file.
    ExportAmpl(ExportArgs),
    /// Compare stems against a gold file.
    Eval(EvalArgs),
    /// Report how well clusters of related words conflate.
    Clusters(ClusterArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BuildInput {
    /// `word<TAB>count` lines.
    #[arg(long, value_name = "PATH")]
    word_list: Option<PathBuf>,
    /// Plain UTF-8 text to tokenize.
    #[arg(long, value_name = "PATH")]
    raw_text: Option<PathBuf>,
    /// `prefix<TAB>count` lines.
    #[arg(long, value_name = "PATH")]
    prefix_table: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelimiterKind {
    Whitespace,
    NonAlphanumeric,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: BuildInput,
    /// Where to write the model.
    #[arg(short, long)]
    output: PathBuf,
    /// Fold case at ingestion and at query time.
    #[arg(long)]
    case_fold: bool,
    /// Token delimiters for --raw-text.
    #[arg(long, value_enum, default_value = "non-alphanumeric")]
    delimiters: DelimiterKind,
    /// Source description stored in the model (defaults to the input path).
    #[arg(long)]
    source: Option<String>,
}

#[derive(Args)]
struct ModelArgs {
    /// Model file written by `build`.
    #[arg(short, long)]
    model: PathBuf,
    /// Solve by enumeration instead of the closed form.
    #[arg(long)]
    oracle: bool,
}

impl ModelArgs {
    fn solver(&self) -> Solver {
        if self.oracle {
            Solver::Exhaustive
        } else {
            Solver::Analytic
        }
    }
}

#[derive(Args)]
struct StemArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Longest word accepted, in characters.
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    words: Vec<String>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    word: String,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(short, long)]
    model: PathBuf,
    word: String,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Jsonl,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `word<TAB>stem[/stem...][<TAB>tag]` lines.
    gold: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// One comma-separated cluster per line.
    clusters: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn load_model(path: &Path) -> Result<FrequencyModel> {
    FrequencyModel::load(open(path)?)
        .with_context(|| format!("cannot load model {}", path.display()))
}

fn build(args: BuildArgs) -> Result<ExitCode> {
    let BuildInput {
        word_list,
        raw_text,
        prefix_table,
    } = args.input;
    let path = word_list
        .as_ref()
        .or(raw_text.as_ref())
        .or(prefix_table.as_ref())
        .expect("clap enforces one input");
    let source = args.source.unwrap_or_else(|| path.display().to_string());
    let opts = IngestOptions::new(source).with_case_fold(args.case_fold);
    let reader = open(path)?;
    let model = if word_list.is_some() {
        read_word_list(reader, &opts)
    } else if prefix_table.is_some() {
        read_prefix_table(reader, &opts)
    } else {
        let tokenizer = TokenizerConfig {
            delimiters: match args.delimiters {
                DelimiterKind::Whitespace => Delimiters::Whitespace,
                DelimiterKind::NonAlphanumeric => Delimiters::NonAlphanumeric,
            },
            case_fold: args.case_fold,
        };
        ingest_raw_text(reader, &tokenizer, &opts.source)
    }
    .with_context(|| format!("cannot build a model from {}", path.display()))?;

    let file = File::create(&args.output)
        .with_context(|| format!("cannot write {}", args.output.display()))?;
    let mut out = BufWriter::new(file);
    model.save(&mut out)?;
    out.flush()?;
    println!("tokens\t{}", model.total_tokens());
    println!("prefixes\t{}", model.prefix_count());
    Ok(ExitCode::SUCCESS)
}

fn check_len(word: &str, max_len: usize) -> Result<()> {
    let len = word.chars().count();
    if len > max_len {
        bail!("{word:?} has {len} characters, over the limit of {max_len}");
    }
    Ok(())
}

fn stem(args: StemArgs) -> Result<ExitCode> {
    let model = load_model(&args.model.model)?;
    let stemmer = Stemmer::new(&model).with_solver(args.model.solver());
    let words = if args.words.is_empty() {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("cannot read stdin")?;
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect()
    } else {
        args.words
    };

    let results: Vec<Result<String>> = words
        .par_iter()
        .map(|w| {
            check_len(w, args.max_len)?;
            Ok(stemmer.stem(w)?.stem)
        })
        .collect();

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut failed = false;
    for (word, result) in words.iter().zip(results) {
        match result {
            Ok(stem) => writeln!(out, "{word}\t{stem}")?,
            Err(e) => {
                eprintln!("error: {e:#}");
                failed = true;
            }
        }
    }
    out.flush()?;
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn explain(args: ExplainArgs) -> Result<ExitCode> {
    check_len(&args.word, args.max_len)?;
    let model = load_model(&args.model.model)?;
    let stemmer = Stemmer::new(&model).with_solver(args.model.solver());
    let result = stemmer.stem(&args.word)?;
    print!("{}", stemmer.explain(&result));
    Ok(ExitCode::SUCCESS)
}

fn export(args: ExportArgs) -> Result<ExitCode> {
    let model = load_model(&args.model)?;
    let profile = probability_profile(&model, &args.word)?;
    let instance = build_instance(&profile)
        .with_context(|| format!("{:?} is too short to pose a program", args.word))?;
    let text = export_ampl(&instance, profile.word());
    match args.output {
        Some(path) => std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn eval(args: EvalArgs) -> Result<ExitCode> {
    let model = load_model(&args.model.model)?;
    let stemmer = Stemmer::new(&model).with_solver(args.model.solver());
    let gold = parse_gold(open(&args.gold)?)
        .with_context(|| format!("cannot read gold file {}", args.gold.display()))?;
    let report = evaluate(&stemmer, &gold)?;
    match args.format {
        Format::Table => print!("{}", report.render_table()),
        Format::Jsonl => print!("{}", report.to_json_lines()),
    }
    Ok(ExitCode::SUCCESS)
}

fn clusters(args: ClusterArgs) -> Result<ExitCode> {
    let model = load_model(&args.model.model)?;
    let stemmer = Stemmer::new(&model).with_solver(args.model.solver());
    let clusters = parse_clusters(open(&args.clusters)?)
        .with_context(|| format!("cannot read cluster file {}", args.clusters.display()))?;
    let report = cluster_consistency(&stemmer, &clusters)?;
    match args.format {
        Format::Table => print!("{}", report.render_table()),
        Format::Jsonl => print!("{}", report.to_json_lines()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Stem(a) => stem(a),
        Command::Explain(a) => explain(a),
        Command::ExportAmpl(a) => export(a),
        Command::Eval(a) => eval(a),
        Command::Clusters(a) => clusters(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
