//! Command-line frontend: train, score, generate, eval, params.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use bagorder::io::{load_corpus, TableSet};
use bagorder::parallel::{evaluate_parallel, train_parallel};
use bagorder::report::{eval_aligned, eval_full_tsv, generation_tsv, params_aligned};
use bagorder_core::corpus::{Bag, Sentence, Vocab};
use bagorder_core::error::Error as CoreError;
use bagorder_core::eval::param_count;
use bagorder_core::scoring::{approx_score, markov_score, Order};
use bagorder_core::search::{generate, Model, SearchConfig};
use bagorder_core::tables::train;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bagorder",
    version,
    about = "Directed word-association language models and bag generation"
)]
struct Cli {
    /// Seed for randomized utilities; the regular subcommands are
    /// deterministic and ignore it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train pair and n-gram tables from a tokenized corpus.
    Train(TrainArgs),
    /// Score sentences (one per line) under a model.
    Score(ScoreArgs),
    /// Recover the best word order for a bag of words.
    Generate(GenerateArgs),
    /// Regenerate a test corpus from bags and tabulate errors.
    Eval(EvalArgs),
    /// Report stored parameter counts per model.
    Params(ParamsArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Corpus file: one pre-tokenized sentence per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Largest n-gram window to count.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Drop directed pairs farther apart than this.
    #[arg(long)]
    distance_cap: Option<u32>,
    /// Output directory for vocab.tsv, pairs.tsv, ngrams.tsv.
    #[arg(long, env = "BAGORDER_TABLES")]
    out: PathBuf,
    /// Worker threads; any count yields identical tables.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Exact n-gram Markov model.
    Exact,
    /// Approximate model over directed pair minima.
    Approx,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Exact => Model::Exact,
            ModelArg::Approx => Model::Approx,
        }
    }
}

/// Window order: an integer ≥ 2 or `full` for the whole sentence.
#[derive(Copy, Clone)]
struct OrderArg(Order);

impl FromStr for OrderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(OrderArg(Order::Full));
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 2 => Ok(OrderArg(Order::N(n))),
            _ => Err(String::from("expected an integer >= 2 or `full`")),
        }
    }
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory holding trained tables.
    #[arg(long, env = "BAGORDER_TABLES")]
    tables: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Window order (integer >= 2, or `full`).
    #[arg(long)]
    order: OrderArg,
    /// Sentence file; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Probability assigned to unseen events.
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, env = "BAGORDER_TABLES")]
    tables: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Window order (integer >= 2, or `full`).
    #[arg(long)]
    order: OrderArg,
    /// Whitespace-separated bag of words; stdin (one bag per line)
    /// when omitted.
    #[arg(long)]
    bag: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
    /// Merge condition (4): require equal word coverage. Disabling it is
    /// for demonstration only and can return suboptimal arrangements.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    condition4: bool,
    /// Keep only the best paths per level; voids the optimality guarantee.
    #[arg(long)]
    beam_width: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory holding trained tables (closed test).
    #[arg(long, env = "BAGORDER_TABLES")]
    tables: Option<PathBuf>,
    /// Test corpus (closed test).
    #[arg(long)]
    test: Option<PathBuf>,
    /// Comma-separated model labels, e.g. M2,M3,AM2,AM3,AMn.
    #[arg(long)]
    models: String,
    /// Also write the full report as TSV.
    #[arg(long)]
    tsv: Option<PathBuf>,
    /// Open test: split --corpus 80/20 by line index (every fifth line
    /// held out), train on the rest, evaluate on the held-out fifth.
    #[arg(long)]
    open: bool,
    /// Corpus to split in open mode.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Training order for open mode.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Distance cap for open-mode training.
    #[arg(long)]
    distance_cap: Option<u32>,
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
    /// Worker threads; any count yields identical output.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long, env = "BAGORDER_TABLES")]
    tables: PathBuf,
    /// Comma-separated model labels, e.g. M2,M3,AM3,AMn.
    #[arg(long)]
    models: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Score(args) => cmd_score(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Params(args) => cmd_params(args),
    }
}

/// Model label → configuration: M<k>, AM<k>, AMn.
fn parse_label(label: &str) -> Result<SearchConfig> {
    let (model, digits) = if let Some(rest) = label.strip_prefix("AM") {
        (Model::Approx, rest)
    } else if let Some(rest) = label.strip_prefix('M') {
        (Model::Exact, rest)
    } else {
        bail!("unknown model label `{label}` (expected M<k>, AM<k>, or AMn)");
    };
    if digits == "n" {
        if model == Model::Exact {
            bail!("`Mn` is not a model; the exact Markov model needs a finite order");
        }
        return Ok(SearchConfig::new(model, Order::Full));
    }
    let n: usize = digits
        .parse()
        .map_err(|_| anyhow!("bad order in model label `{label}`"))?;
    if n < 2 {
        bail!("model order must be at least 2 in `{label}`");
    }
    Ok(SearchConfig::new(model, Order::N(n)))
}

fn parse_labels(labels: &str) -> Result<Vec<SearchConfig>> {
    let configs = labels
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| parse_label(s.trim()))
        .collect::<Result<Vec<_>>>()?;
    if configs.is_empty() {
        bail!("--models must name at least one configuration");
    }
    Ok(configs)
}

fn check_floor(floor: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&floor) {
        bail!("--floor must be a probability in [0, 1]");
    }
    Ok(())
}

/// Reproducibility header on stderr: version, invocation summary, and
/// the checksums of every table file involved.
fn print_header(summary: &str, tables_dir: Option<&Path>) -> Result<()> {
    eprintln!("# bagorder {}", env!("CARGO_PKG_VERSION"));
    eprintln!("# run: {summary}");
    if let Some(dir) = tables_dir {
        for (name, hex) in TableSet::checksums(dir)? {
            eprintln!("# table {name} sha256={hex}");
        }
    }
    Ok(())
}

fn load_tables(dir: &Path, floor: f64) -> Result<TableSet> {
    let mut tables =
        TableSet::load(dir).with_context(|| format!("loading tables from {}", dir.display()))?;
    tables.pairs.set_floor(floor);
    tables.ngrams.set_floor(floor);
    Ok(tables)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    if args.order < 2 {
        bail!("--order must be at least 2");
    }
    if args.distance_cap == Some(0) {
        bail!("--distance-cap must be at least 1");
    }
    if args.threads < 1 {
        bail!("--threads must be at least 1");
    }
    let mut vocab = Vocab::new();
    let corpus = load_corpus(&args.corpus, &mut vocab)?;
    let (pairs, ngrams) = train_parallel(&corpus, args.order, args.distance_cap, args.threads);
    let tables = TableSet {
        vocab,
        pairs,
        ngrams,
    };
    tables.save(&args.out)?;
    print_header(
        &format!(
            "train corpus={} order={} distance_cap={:?} out={}",
            args.corpus.display(),
            args.order,
            args.distance_cap,
            args.out.display()
        ),
        Some(&args.out),
    )?;
    eprintln!(
        "# trained {} sentences, vocabulary {}, {} pair keys, {} padded tokens",
        corpus.len(),
        tables.vocab.size(),
        tables.pairs.distinct(),
        tables.ngrams.token_total()
    );
    Ok(())
}

fn read_lines(input: Option<&Path>) -> Result<Vec<String>> {
    match input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(text.lines().map(String::from).collect())
        }
        None => std::io::stdin()
            .lock()
            .lines()
            .collect::<std::io::Result<Vec<_>>>()
            .context("reading stdin"),
    }
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    check_floor(args.floor)?;
    let model = Model::from(args.model);
    let tables = load_tables(&args.tables, args.floor)?;
    let cfg = SearchConfig::new(model, args.order.0);
    cfg.validate(&tables.ngrams)?;
    print_header(
        &format!(
            "score tables={} model={} floor={}",
            args.tables.display(),
            cfg.label(),
            args.floor
        ),
        Some(&args.tables),
    )?;
    for line in read_lines(args.input.as_deref())? {
        let words: Vec<&str> = line.split_ascii_whitespace().collect();
        let ids: Option<Vec<_>> = words.iter().map(|w| tables.vocab.get(w)).collect();
        let joined = words.join(" ");
        match ids {
            // A sentence with out-of-vocabulary words has probability 0.
            None => println!("{joined}\t-inf"),
            Some(ids) => {
                let sentence = Sentence::new(ids);
                let score = match (model, args.order.0) {
                    (Model::Exact, Order::N(n)) => markov_score(&sentence, n, &tables.ngrams)?,
                    (Model::Exact, Order::Full) => unreachable!("validated"),
                    (Model::Approx, order) => {
                        let scored =
                            approx_score(&sentence, order, &tables.pairs, &tables.ngrams);
                        if scored.clamped {
                            eprintln!(
                                "warning: order clamped to the full window for `{joined}`"
                            );
                        }
                        scored.score
                    }
                };
                println!("{joined}\t{score}");
            }
        }
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    check_floor(args.floor)?;
    let tables = load_tables(&args.tables, args.floor)?;
    let mut cfg = SearchConfig::new(Model::from(args.model), args.order.0);
    cfg.condition4 = args.condition4;
    cfg.beam_width = args.beam_width;
    cfg.validate(&tables.ngrams)?;
    print_header(
        &format!(
            "generate tables={} model={} condition4={} beam_width={:?} floor={}",
            args.tables.display(),
            cfg.label(),
            cfg.condition4,
            cfg.beam_width,
            args.floor
        ),
        Some(&args.tables),
    )?;
    if !cfg.condition4 {
        eprintln!("warning: unsafe merge, condition (4) disabled; results may be suboptimal");
    }
    if cfg.beam_width.is_some() {
        eprintln!("warning: approximate search, beam width limits the explored paths");
    }
    let bag_lines = match &args.bag {
        Some(bag) => vec![bag.clone()],
        None => read_lines(None)?,
    };
    let mut failures = 0usize;
    for line in bag_lines {
        let mut bag = Bag::new();
        let mut unknown = None;
        for word in line.split_ascii_whitespace() {
            match tables.vocab.get(word) {
                Some(id) => bag.insert(id),
                None => {
                    unknown = Some(word.to_string());
                    break;
                }
            }
        }
        if let Some(word) = unknown {
            eprintln!("error: word `{word}` is not in the trained vocabulary");
            failures += 1;
            continue;
        }
        match generate(&bag, &cfg, &tables.pairs, &tables.ngrams) {
            Ok(result) => {
                if result.clamped {
                    eprintln!("warning: order clamped to the full window for `{line}`");
                }
                println!("{}", generation_tsv(&result, &tables.vocab));
            }
            Err(CoreError::NoArrangement { level }) => {
                eprintln!(
                    "error: bag `{line}` has no arrangement with nonzero probability \
                     (search died at level {level})"
                );
                failures += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if failures > 0 {
        bail!("{failures} bag(s) could not be arranged");
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    check_floor(args.floor)?;
    if args.threads < 1 {
        bail!("--threads must be at least 1");
    }
    let configs = parse_labels(&args.models)?;
    let (tables, test) = if args.open {
        if args.tables.is_some() || args.test.is_some() {
            bail!("--open trains in memory from --corpus; omit --tables and --test");
        }
        let corpus_path = args
            .corpus
            .as_deref()
            .ok_or_else(|| anyhow!("--open requires --corpus"))?;
        if args.order < 2 {
            bail!("--order must be at least 2");
        }
        let mut vocab = Vocab::new();
        let all = load_corpus(corpus_path, &mut vocab)?;
        // Deterministic 80/20 split by line index: every fifth sentence
        // is held out for testing.
        let (mut train_set, mut test_set) = (Vec::new(), Vec::new());
        for (i, s) in all.into_iter().enumerate() {
            if i % 5 == 4 {
                test_set.push(s);
            } else {
                train_set.push(s);
            }
        }
        let (mut pairs, mut ngrams) = train(&train_set, args.order, args.distance_cap);
        pairs.set_floor(args.floor);
        ngrams.set_floor(args.floor);
        print_header(
            &format!(
                "eval open corpus={} order={} models={} threads={} floor={}",
                corpus_path.display(),
                args.order,
                args.models,
                args.threads,
                args.floor
            ),
            None,
        )?;
        eprintln!(
            "# open 80/20 split: {} training sentences, {} test sentences",
            train_set.len(),
            test_set.len()
        );
        (
            TableSet {
                vocab,
                pairs,
                ngrams,
            },
            test_set,
        )
    } else {
        let dir = args
            .tables
            .as_deref()
            .ok_or_else(|| anyhow!("closed test requires --tables (or BAGORDER_TABLES)"))?;
        let test_path = args
            .test
            .as_deref()
            .ok_or_else(|| anyhow!("closed test requires --test"))?;
        let tables = load_tables(dir, args.floor)?;
        // Out-of-vocabulary test words intern into a local copy; their
        // zero probabilities surface as dead searches in the report.
        let mut vocab = tables.vocab.clone();
        let test = load_corpus(test_path, &mut vocab)?;
        print_header(
            &format!(
                "eval closed tables={} test={} models={} threads={} floor={}",
                dir.display(),
                test_path.display(),
                args.models,
                args.threads,
                args.floor
            ),
            Some(dir),
        )?;
        eprintln!("# closed test: {} sentences", test.len());
        (tables, test)
    };
    let report = evaluate_parallel(
        &test,
        &configs,
        &tables.pairs,
        &tables.ngrams,
        args.threads,
    )?;
    print!("{}", eval_aligned(&report));
    if let Some(path) = &args.tsv {
        fs::write(path, eval_full_tsv(&report))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_params(args: ParamsArgs) -> Result<()> {
    let configs = parse_labels(&args.models)?;
    let tables = load_tables(&args.tables, 0.0)?;
    print_header(
        &format!(
            "params tables={} models={}",
            args.tables.display(),
            args.models
        ),
        Some(&args.tables),
    )?;
    let reports = configs
        .iter()
        .map(|cfg| {
            param_count(
                cfg.model,
                cfg.order,
                &tables.pairs,
                &tables.ngrams,
                tables.vocab.size(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    print!("{}", params_aligned(&reports));
    Ok(())
}
