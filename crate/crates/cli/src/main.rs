//! `laug`: perturb annotated dialog corpora and measure how a language
//! understanding model copes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use laug::corpus::{extract_lu_examples, load_corpus_strict, to_json_string};
use laug::evalkit::{change_rates, overall_f1, EvalReport};
use laug::pipeline::{write_with_manifest, Augmenter, RunConfig};
use laug::{AugmentationRecord, Corpus, DialogActItem, Error, Method, Split};

#[derive(Parser)]
#[command(name = "laug", version, about = "Language-understanding augmentation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Perturb every user turn of a split with one method.
    Augment(AugmentArgs),
    /// Train dialogs plus round(ratio * train turns) augmented ones, split evenly over methods.
    Compose(ComposeArgs),
    /// Character, word and slot change rates of an `augment` output.
    Stats(StatsArgs),
    /// Overall F1 of a predictions file against a corpus split.
    Eval(EvalArgs),
    /// Lexicon baseline on the original test split and each augmented one.
    Baseline(BaselineArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Input corpus in the native JSON format.
    #[arg(long = "in", value_name = "CORPUS")]
    input: PathBuf,
    /// JSON run config; flags below override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// EDA edit ratio.
    #[arg(long)]
    alpha: Option<f64>,
    /// Probability of slot value replacement instead of an EDA operation.
    #[arg(long = "p-svr")]
    p_svr: Option<f64>,
    /// Per-word phonetic confusion probability.
    #[arg(long = "p-confuse")]
    p_confuse: Option<f64>,
    /// Per-pair liaison probability.
    #[arg(long = "p-liaison")]
    p_liaison: Option<f64>,
    /// Fuzzy threshold for finding values again after speech recognition noise.
    #[arg(long = "sr-threshold")]
    sr_threshold: Option<f64>,
    /// Paraphrase service URL; the offline template generator is used otherwise.
    #[arg(long = "tp-endpoint", value_name = "URL")]
    tp_endpoint: Option<String>,
    /// Candidates requested per paraphrased turn.
    #[arg(long = "tp-candidates")]
    tp_candidates: Option<usize>,
    /// Preceding utterances in each LU example.
    #[arg(long = "context-window")]
    context_window: Option<usize>,
    /// Disfluency distributions file.
    #[arg(long = "sd-dist", value_name = "FILE")]
    sd_dist: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    thesaurus: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Pronunciation lexicon.
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Confusion and liaison table.
    #[arg(long, value_name = "FILE")]
    confusion: Option<PathBuf>,
    /// Unseen slot value pools.
    #[arg(long, value_name = "FILE")]
    pools: Option<PathBuf>,
}

#[derive(Args)]
struct AugmentArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, value_enum, default_value_t = SplitArg::All)]
    split: SplitArg,
    /// Write the test split with augmented user turns instead of records.
    #[arg(long = "test-set", conflicts_with = "split")]
    test_set: bool,
}

#[derive(Args)]
struct ComposeArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Comma-separated subset of wp, tp, sr, sd.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Option<Vec<Method>>,
    /// Augmented-to-original size.
    #[arg(long)]
    ratio: Option<f64>,
}

#[derive(Args)]
struct StatsArgs {
    /// The corpus the records were produced from.
    #[arg(long = "in", value_name = "CORPUS")]
    input: PathBuf,
    /// Records written by `augment`.
    #[arg(long, value_name = "FILE")]
    records: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Gold corpus.
    #[arg(long = "in", value_name = "CORPUS")]
    input: PathBuf,
    /// JSON array with one DA list per LU example of the split, in corpus order.
    #[arg(long, value_name = "FILE")]
    predictions: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    split: SplitArg,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    All,
    Train,
    Validation,
    Test,
}

impl SplitArg {
    fn splits(self) -> Vec<Split> {
        match self {
            SplitArg::All => vec![Split::Train, Split::Validation, Split::Test],
            SplitArg::Train => vec![Split::Train],
            SplitArg::Validation => vec![Split::Validation],
            SplitArg::Test => vec![Split::Test],
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn config(&self) -> laug::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Parse { origin: path.display().to_string(), message: e.to_string() })?
            }
            None => RunConfig::default(),
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        set(&mut cfg.wp.alpha, self.alpha);
        set(&mut cfg.wp.p_svr, self.p_svr);
        set(&mut cfg.sr.p_confuse, self.p_confuse);
        set(&mut cfg.sr.p_liaison, self.p_liaison);
        set(&mut cfg.sr.redetect_threshold, self.sr_threshold);
        if self.tp_endpoint.is_some() {
            cfg.tp.endpoint.clone_from(&self.tp_endpoint);
        }
        if let Some(k) = self.tp_candidates {
            cfg.tp.candidates = k;
        }
        if let Some(m) = self.context_window {
            cfg.context_window = m;
        }
        let r = &mut cfg.resources;
        for (slot, flag) in [
            (&mut r.disfluency, &self.sd_dist),
            (&mut r.thesaurus, &self.thesaurus),
            (&mut r.stopwords, &self.stopwords),
            (&mut r.lexicon, &self.lexicon),
            (&mut r.confusion, &self.confusion),
            (&mut r.pools, &self.pools),
        ] {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        Ok(cfg)
    }

    /// Corpus, config file and resource overrides, for the manifest.
    fn inputs(&self) -> Vec<&Path> {
        let mut out = vec![self.input.as_path()];
        for p in
            [&self.config, &self.sd_dist, &self.thesaurus, &self.stopwords, &self.lexicon, &self.confusion, &self.pools]
                .into_iter()
                .flatten()
        {
            out.push(p);
        }
        out
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn pretty<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}

fn augment(args: AugmentArgs) -> laug::Result<()> {
    let mut cfg = args.run.config()?;
    cfg.methods = vec![args.method];
    cfg.validate()?;
    let corpus = load_corpus_strict(&args.run.input)?;
    let aug = Augmenter::new(cfg)?;
    let bytes = if args.test_set {
        to_json_string(&aug.augmented_test_set(&corpus, args.method)?).into_bytes()
    } else {
        let mut records = Vec::new();
        for split in args.split.splits() {
            records.extend(aug.augment_split(&corpus, args.method, split)?);
        }
        eprintln!("{} records", records.len());
        pretty(&records)
    };
    write_with_manifest(&args.out, &bytes, &command_line(), &aug.config, &args.run.inputs())?;
    Ok(())
}

fn compose(args: ComposeArgs) -> laug::Result<()> {
    let mut cfg = args.run.config()?;
    if let Some(methods) = args.methods {
        cfg.methods = methods;
    }
    if let Some(ratio) = args.ratio {
        cfg.ratio = ratio;
    }
    cfg.validate()?;
    let corpus = load_corpus_strict(&args.run.input)?;
    let aug = Augmenter::new(cfg)?;
    let (composed, summary) = aug.compose(&corpus)?;
    let counts: Vec<String> = summary.per_method.iter().map(|(m, n)| format!("{m} {n}")).collect();
    eprintln!("{} train turns, {} augmented ({})", summary.train_turns, summary.target, counts.join(", "));
    write_with_manifest(
        &args.out,
        to_json_string(&composed).as_bytes(),
        &command_line(),
        &aug.config,
        &args.run.inputs(),
    )?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> laug::Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { origin: path.display().to_string(), message: e.to_string() })
}

fn report(report: EvalReport, out: Option<&Path>, inputs: &[&Path]) -> laug::Result<()> {
    print!("{}", report.to_table());
    if let Some(out) = out {
        write_with_manifest(out, report.to_json().as_bytes(), &command_line(), &RunConfig::default(), inputs)?;
    }
    Ok(())
}

fn stats(args: StatsArgs) -> laug::Result<()> {
    let corpus = load_corpus_strict(&args.input)?;
    let records: Vec<AugmentationRecord> = read_json(&args.records)?;
    let rates = change_rates(&corpus, &records)?;
    let r = EvalReport { f1: None, change_rates: Some(rates) };
    report(r, args.out.as_deref(), &[&args.input, &args.records])
}

fn eval(args: EvalArgs) -> laug::Result<()> {
    let corpus = load_corpus_strict(&args.input)?;
    let splits = args.split.splits();
    let gold: Vec<Vec<DialogActItem>> = extract_lu_examples(&corpus, 0)
        .into_iter()
        .filter(|e| corpus.dialog(&e.dialog).is_some_and(|d| splits.contains(&d.split)))
        .map(|e| e.gold)
        .collect();
    let predicted: Vec<Vec<DialogActItem>> = read_json(&args.predictions)?;
    let f1 = overall_f1(&predicted, &gold)?;
    let r = EvalReport { f1: Some(f1), change_rates: None };
    report(r, args.out.as_deref(), &[&args.input, &args.predictions])
}

fn baseline(args: BaselineArgs) -> laug::Result<()> {
    let cfg = args.run.config()?;
    cfg.validate()?;
    let corpus: Corpus = load_corpus_strict(&args.run.input)?;
    let aug = Augmenter::new(cfg)?;
    let result = aug.run_baseline(&corpus)?;
    print!("{}", result.to_table());
    if let Some(out) = &args.out {
        write_with_manifest(out, &pretty(&result), &command_line(), &aug.config, &args.run.inputs())?;
    }
    Ok(())
}

/// 2 for bad input or configuration, 3 for I/O, 1 otherwise.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Parse { .. }
        | Error::Validation(_)
        | Error::SpanBoundary { .. }
        | Error::Config { .. }
        | Error::Resource { .. }
        | Error::LengthMismatch { .. }
        | Error::UnresolvedSource { .. }
        | Error::EmptyTrain => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Augment(a) => augment(a),
        Command::Compose(a) => compose(a),
        Command::Stats(a) => stats(a),
        Command::Eval(a) => eval(a),
        Command::Baseline(a) => baseline(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
