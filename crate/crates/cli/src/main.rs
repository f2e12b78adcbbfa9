//! `transguard` command line: preprocess, postprocess, full pipeline,
//! collapse detection, and corpus evaluation.
//!
//! Exit codes: 0 success, 1 domain error (parse failure, bad input),
//! 2 usage error, 3 translator failure.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use transguard::eval::{ingest, Checker, EvalConfig};
use transguard::pipeline::{
    run_pipeline, HttpAdapter, MockProfile, MockTranslator, PipelineConfig, SubprocessAdapter,
    TranslatorAdapter,
};
use transguard::postrules::{apply_post, PruneMode, PrunePolicy};
use transguard::prerules::{apply_pre, MutationRecord, PreConfig, Rule};
use transguard::token::{Direction, Language};
use transguard::{classify, parse_unit, parse_unit_lenient, run_eval, CollapseConfig, Error};

const EXIT_DOMAIN: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_TRANSLATOR: i32 = 3;

#[derive(Parser)]
#[command(
    name = "transguard",
    version,
    about = "Rule-based pre/post-processing around an external code translator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the pre-rules (focal extraction, for->while, array->List, arr rename) to a source file.
    Preprocess(PreprocessArgs),
    /// Prune extraneous clauses from a translation against its source.
    Postprocess(PostprocessArgs),
    /// Run preprocess -> translate -> postprocess end to end.
    Pipeline(PipelineArgs),
    /// Classify a translator output into the collapse taxonomy.
    DetectCollapse(DetectCollapseArgs),
    /// Evaluate the pipeline over a corpus directory.
    Eval(EvalArgs),
}

/// Flags shared by every transforming subcommand. A `--config` JSON file may
/// supply the same keys; explicit flags win.
#[derive(Args, Default)]
struct CommonOpts {
    /// Translation direction: j2p or p2j.
    #[arg(long)]
    direction: Option<String>,
    /// Focal method name.
    #[arg(long)]
    focal: Option<String>,
    /// Comma-separated rules (r1,r2,r3a,r3b,r4) or `all`.
    #[arg(long)]
    rules: Option<String>,
    /// Minimum count of pattern-matching parameters before the rename rule fires.
    #[arg(long)]
    arr_threshold: Option<usize>,
    /// Clause pruning mode: count or match.
    #[arg(long)]
    prune_mode: Option<String>,
    /// JSON config file whose keys mirror these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerate unparsable input (fall back to opaque items).
    #[arg(long)]
    lenient: bool,
    /// Rewrite every for loop, not only complex ones.
    #[arg(long)]
    all_loops: bool,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    direction: Option<String>,
    focal: Option<String>,
    rules: Option<String>,
    arr_threshold: Option<usize>,
    prune_mode: Option<String>,
    lenient: Option<bool>,
    all_loops: Option<bool>,
}

/// Fully resolved settings: file config overlaid with flags.
struct Settings {
    direction: Direction,
    focal: String,
    rules: BTreeSet<Rule>,
    arr_threshold: usize,
    prune: PrunePolicy,
    lenient: bool,
    all_loops: bool,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Source file, or `-` for standard input.
    file: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
    /// Write output here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the mutation records as JSON to this path.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct PostprocessArgs {
    /// Translated file to prune, or `-` for standard input.
    file: PathBuf,
    /// The source file the translation came from.
    #[arg(long)]
    source: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Source file, or `-` for standard input.
    file: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    translator: TranslatorOpts,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    records: Option<PathBuf>,
    /// Emit the full pipeline result as JSON instead of the final text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TranslatorOpts {
    /// External translator command (input on stdin, direction as final argument).
    #[arg(long, conflicts_with_all = ["translator_url", "mock"])]
    translator_cmd: Option<String>,
    /// Translator HTTP endpoint (POST body, X-Direction header).
    #[arg(long, conflicts_with = "mock")]
    translator_url: Option<String>,
    /// Built-in mock profile (identity, perfect, additional_context, ...).
    #[arg(long)]
    mock: Option<String>,
    /// Seed for the mock's deterministic noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DetectCollapseArgs {
    /// Translator output file, or `-` for standard input.
    file: PathBuf,
    /// Language of the text: java or python.
    #[arg(long)]
    lang: String,
    /// Original source method to compare structure against.
    #[arg(long)]
    original: Option<PathBuf>,
    /// Emit the full verdict as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Corpus root containing java/ and python/ subdirectories.
    root: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    translator: TranslatorOpts,
    /// Report format: json, csv, or md.
    #[arg(long, default_value = "md")]
    report: String,
    /// Worker thread count.
    #[arg(long)]
    workers: Option<usize>,
    /// External compile-check command (translation on stdin, exit 0 = good).
    #[arg(long)]
    checker_cmd: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Translator(_) | Error::FixtureMiss(_) => EXIT_TRANSLATOR,
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Preprocess(args) => preprocess(args),
        Command::Postprocess(args) => postprocess(args),
        Command::Pipeline(args) => pipeline(args),
        Command::DetectCollapse(args) => detect_collapse(args),
        Command::Eval(args) => eval(args),
    }
}

// ---------------------------------------------------------------------------
// Settings resolution
// ---------------------------------------------------------------------------

fn resolve(common: &CommonOpts) -> Result<Settings, Error> {
    let file: FileConfig = match &common.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => FileConfig::default(),
    };
    let direction = common
        .direction
        .clone()
        .or(file.direction)
        .ok_or_else(|| Error::Config("missing --direction (j2p or p2j)".into()))?;
    let rules_text = common
        .rules
        .clone()
        .or(file.rules)
        .unwrap_or_else(|| "all".into());
    let prune_text = common
        .prune_mode
        .clone()
        .or(file.prune_mode)
        .unwrap_or_else(|| "count".into());
    Ok(Settings {
        direction: Direction::from_str(&direction)?,
        focal: common
            .focal
            .clone()
            .or(file.focal)
            .unwrap_or_else(|| "f_gold".into()),
        rules: parse_rules(&rules_text)?,
        arr_threshold: common.arr_threshold.or(file.arr_threshold).unwrap_or(1),
        prune: PrunePolicy {
            mode: PruneMode::from_str(&prune_text)?,
            normalize: true,
        },
        lenient: common.lenient || file.lenient.unwrap_or(false),
        all_loops: common.all_loops || file.all_loops.unwrap_or(false),
    })
}

fn parse_rules(text: &str) -> Result<BTreeSet<Rule>, Error> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(Rule::all());
    }
    text.split(',')
        .map(|part| Rule::from_str(part.trim()))
        .collect()
}

fn parse_lang(text: &str) -> Result<Language, Error> {
    match text.to_ascii_lowercase().as_str() {
        "java" => Ok(Language::Java),
        "python" | "py" => Ok(Language::Python),
        other => Err(Error::Config(format!("unknown language `{other}`"))),
    }
}

impl Settings {
    fn pre_config(&self) -> PreConfig {
        let mut pre = PreConfig::new(self.direction);
        pre.rules = self.rules.clone();
        pre.arr_threshold = self.arr_threshold;
        pre.all_loops = self.all_loops;
        pre.focal_name = self.focal.clone();
        pre
    }

    fn pipeline_config(&self) -> PipelineConfig {
        let mut config = PipelineConfig::new(self.direction);
        config.focal_name = self.focal.clone();
        config.rules = self.rules.clone();
        config.arr_threshold = self.arr_threshold;
        config.all_loops = self.all_loops;
        config.prune = self.prune;
        config.lenient = self.lenient;
        config
    }
}

fn build_adapter(opts: &TranslatorOpts) -> Result<Box<dyn TranslatorAdapter>, Error> {
    if let Some(cmd) = &opts.translator_cmd {
        return Ok(Box::new(SubprocessAdapter::new(cmd)));
    }
    if let Some(url) = &opts.translator_url {
        return Ok(Box::new(HttpAdapter::new(url.clone())));
    }
    let profile = match &opts.mock {
        Some(name) => MockProfile::from_str(name)?,
        None => MockProfile::Identity,
    };
    Ok(Box::new(MockTranslator::new(profile, opts.seed)))
}

// ---------------------------------------------------------------------------
// IO helpers (standard output carries only the payload; logs go to stderr)
// ---------------------------------------------------------------------------

fn read_input(path: &Path) -> Result<String, Error> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn emit(output: Option<&PathBuf>, payload: &str) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, payload)?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn write_records(path: Option<&PathBuf>, records: &[MutationRecord]) -> Result<(), Error> {
    if let Some(path) = path {
        std::fs::write(path, serde_json::to_string_pretty(records)? + "\n")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn preprocess(args: PreprocessArgs) -> Result<i32, Error> {
    let settings = resolve(&args.common)?;
    let text = read_input(&args.file)?;
    let lang = settings.direction.source_lang();
    let unit = if settings.lenient {
        parse_unit_lenient(&text, lang)
    } else {
        parse_unit(&text, lang)?
    };
    let (out, records) = apply_pre(&unit, &settings.pre_config());
    for record in &records {
        if !record.notes.is_empty() {
            eprintln!("{:?}: {}", record.rule, record.notes);
        }
    }
    write_records(args.records.as_ref(), &records)?;
    emit(args.output.as_ref(), &out)?;
    Ok(0)
}

fn postprocess(args: PostprocessArgs) -> Result<i32, Error> {
    let settings = resolve(&args.common)?;
    let translated = read_input(&args.file)?;
    let source = std::fs::read_to_string(&args.source)?;
    let (out, records) = apply_post(&source, &translated, settings.direction, &settings.prune);
    for record in &records {
        if !record.notes.is_empty() {
            eprintln!("{:?}: {}", record.rule, record.notes);
        }
    }
    write_records(args.records.as_ref(), &records)?;
    emit(args.output.as_ref(), &out)?;
    Ok(0)
}

fn pipeline(args: PipelineArgs) -> Result<i32, Error> {
    let settings = resolve(&args.common)?;
    let text = read_input(&args.file)?;
    let adapter = build_adapter(&args.translator)?;
    let result = run_pipeline(&text, &settings.pipeline_config(), adapter.as_ref())?;
    write_records(args.records.as_ref(), &result.records)?;
    if args.json {
        emit(
            args.output.as_ref(),
            &(serde_json::to_string_pretty(&result)? + "\n"),
        )?;
    } else if let Some(post) = &result.postprocessed {
        emit(args.output.as_ref(), post)?;
    }
    if let Some(failure) = &result.failure {
        eprintln!("translator failure: {failure}");
        return Ok(EXIT_TRANSLATOR);
    }
    Ok(0)
}

fn detect_collapse(args: DetectCollapseArgs) -> Result<i32, Error> {
    let text = read_input(&args.file)?;
    let lang = parse_lang(&args.lang)?;
    let original = match &args.original {
        Some(path) => {
            let source = std::fs::read_to_string(path)?;
            let other = match lang {
                Language::Java => Language::Python,
                Language::Python => Language::Java,
            };
            parse_unit_lenient(&source, other).methods().next().cloned()
        }
        None => None,
    };
    let verdict = classify(&text, lang, original.as_ref(), &CollapseConfig::default());
    if args.json {
        emit(None, &(serde_json::to_string_pretty(&verdict)? + "\n"))?;
    } else if verdict.clean {
        println!("clean");
    } else {
        for class in &verdict.classes {
            println!("{class:?}");
        }
    }
    Ok(0)
}

fn eval(args: EvalArgs) -> Result<i32, Error> {
    let settings = resolve(&args.common)?;
    let adapter = build_adapter(&args.translator)?;
    let (cases, warnings) = ingest(&args.root)?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    let mut config = EvalConfig::new(settings.direction);
    config.pipeline = settings.pipeline_config();
    config.workers = args.workers;
    if let Some(cmd) = args.checker_cmd {
        config.checker = Checker::ExternalCompile { cmd };
    }
    let report = run_eval(&cases, &config, adapter.as_ref());
    let payload = match args.report.as_str() {
        "json" => report.to_json(),
        "csv" => report.to_csv(),
        "md" | "markdown" => report.to_markdown(),
        other => return Err(Error::Config(format!("unknown report format `{other}`"))),
    };
    emit(args.output.as_ref(), &payload)?;
    Ok(0)
}
