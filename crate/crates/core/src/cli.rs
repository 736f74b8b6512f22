//! The `dss` command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::data::{load_csv, save_csv, AttributeSchema, Dataset, MissingPolicy};
use crate::error::{Error, Result};
use crate::eval::{confusion, roc_csv, roc_points, roc_svg, ConfusionMatrix, EvalReport};
use crate::logit::{fit_with, ClassificationTable, FitOptions, FittedLogitModel, ModelArtifact, ModelSpec, ModelTerm};
use crate::service::{self, Artifacts};
use crate::stats::{screen_univariate, ScreeningReport};
use crate::stepwise::{forward_select, goodness_of_fit, InteractionPool, SelectionTrace};
use crate::synth::{default_paper_spec, generate, GeneratorSpec, XorShift64Star};
use crate::tree::{build_tree, render_rules, RuleTree, TreeArtifact, TreeOptions};

/// Environment variable that takes precedence over `--out`.
pub const OUTPUT_DIR_ENV: &str = "DSS_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "dss", version, about = "Decision support for categorical outcome inference")]
pub struct Cli {
    /// Worker threads for candidate fits (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset and its schema.
    Gen(GenArgs),
    /// Univariate chi-square screening of every predictor.
    Screen(ScreenArgs),
    /// Fit a baseline-category logit model.
    Fit(FitArgs),
    /// Forward selection of main effects, then interactions.
    Select(SelectArgs),
    /// Build the fixed-order rule tree.
    Tree(TreeArgs),
    /// Render a tree's rules as text and JSON.
    Rules(RulesArgs),
    /// Predict one profile with the model and the rules.
    Predict(PredictArgs),
    /// Evaluate saved artifacts on labelled data.
    Evaluate(EvaluateArgs),
    /// Generate or load, screen, select, fit, build rules and evaluate.
    Pipeline(PipelineArgs),
    /// Serve the artifacts over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Schema JSON; defaults to the built-in youth survey schema.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MissingArg::Fail)]
    pub missing: MissingArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MissingArg {
    Fail,
    Skip,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory; overridden by DSS_OUTPUT_DIR.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    /// Generator specification JSON; defaults to the built-in spec.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value_t = 0.20)]
    pub alpha: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Comma-separated terms, e.g. "Gender,Province,Gender*Province".
    #[arg(long, conflicts_with = "trace")]
    pub terms: Option<String>,
    /// Take the final model of a selection trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum InteractionsArg {
    /// Main effects only.
    None,
    /// All pairs over the selected and screened attributes.
    Pairs,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Tolerance of the screening step that feeds the candidate pool.
    #[arg(long, default_value_t = 0.20)]
    pub screen_alpha: f64,
    #[arg(long, value_enum, default_value_t = InteractionsArg::Pairs)]
    pub interactions: InteractionsArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Comma-separated split order.
    #[arg(long, conflicts_with = "trace")]
    pub order: Option<String>,
    /// Use the attribute order of a selection trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_support: u64,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Also emit rules for empty cells.
    #[arg(long)]
    pub include_backoff: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Directory with schema.json, model.json and tree.json.
    #[arg(long)]
    pub artifacts: PathBuf,
    /// Profile as a JSON object of attribute: level.
    #[arg(long, conflicts_with = "profile_file")]
    pub profile: Option<String>,
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub artifacts: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = MissingArg::Fail)]
    pub missing: MissingArg,
    /// Number of disjoint evaluation subsets.
    #[arg(long, default_value_t = 4)]
    pub subsets: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Generate data from the built-in generator instead of loading it.
    #[arg(long, conflicts_with = "data")]
    pub gen_default: bool,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MissingArg::Fail)]
    pub missing: MissingArg,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Records to generate with --gen-default.
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0.20)]
    pub screen_alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    pub select_alpha: f64,
    #[arg(long, value_enum, default_value_t = InteractionsArg::Pairs)]
    pub interactions: InteractionsArg,
    /// Smallest node that is still split.
    #[arg(long, default_value_t = 25)]
    pub min_support: u64,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub subsets: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Without artifacts every endpoint answers 503.
    #[arg(long)]
    pub artifacts: Option<PathBuf>,
}

/// Parses `argv`, runs the command and maps the outcome to an exit code:
/// 0 success, 2 validation error, 1 runtime failure.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Screen(a) => cmd_screen(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Select(a) => cmd_select(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Rules(a) => cmd_rules(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Pipeline(a) => cmd_pipeline(a).map(|_| ()),
        Command::Serve(a) => cmd_serve(a),
    }
}

fn out_dir(args: &OutArgs) -> Result<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| args.out.clone());
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Reads an input file, reporting a missing one as a usage error.
fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::InvalidArgument(format!("input file {} not found", path.display())),
        _ => Error::Io(e),
    })
}

fn load_schema(path: Option<&Path>) -> Result<AttributeSchema> {
    match path {
        Some(p) => AttributeSchema::from_json(&read_input(p)?),
        None => Ok(AttributeSchema::youth_survey()),
    }
}

fn policy(m: MissingArg) -> MissingPolicy {
    match m {
        MissingArg::Fail => MissingPolicy::Fail,
        MissingArg::Skip => MissingPolicy::Skip,
    }
}

fn load_data(path: &Path, schema: &AttributeSchema, missing: MissingArg) -> Result<Dataset> {
    read_input(path)?;
    let report = load_csv(path, schema, policy(missing))?;
    if report.skipped > 0 {
        eprintln!("skipped {} rows with missing values", report.skipped);
    }
    Ok(report.dataset)
}

fn load_data_args(a: &DataArgs) -> Result<Dataset> {
    let schema = load_schema(a.schema.as_deref())?;
    load_data(&a.data, &schema, a.missing)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let spec = match &a.spec {
        Some(p) => {
            let mut spec = GeneratorSpec::from_json(&read_input(p)?)?;
            spec.seed = a.seed;
            spec.n = a.n;
            spec
        }
        None => default_paper_spec(a.seed, a.n),
    };
    let data = generate(&spec)?;
    let dir = out_dir(&a.out)?;
    save_csv(&data, &dir.join("data.csv"))?;
    write(&dir, "schema.json", &format!("{}\n", data.schema().to_json_pretty()))?;
    println!("wrote {} records to {}", data.len(), dir.join("data.csv").display());
    Ok(())
}

fn cmd_screen(a: ScreenArgs) -> Result<()> {
    let data = load_data_args(&a.input)?;
    let report = screen_univariate(&data, a.alpha)?;
    let csv = report.to_csv();
    write(&out_dir(&a.out)?, "screening.csv", &csv)?;
    print!("{csv}");
    Ok(())
}

fn spec_from_trace(path: &Path) -> Result<(SelectionTrace, ModelSpec)> {
    let trace: SelectionTrace = serde_json::from_str(&read_input(path)?)?;
    let spec = trace.final_spec.clone();
    Ok((trace, spec))
}

fn classification(model: &FittedLogitModel, data: &Dataset) -> Result<ClassificationTable> {
    let predicted = data
        .records()
        .iter()
        .map(|r| model.classify(r))
        .collect::<Result<Vec<_>>>()?;
    ClassificationTable::from_labels(
        data.schema().class_attribute().levels.clone(),
        &data.class_labels(),
        &predicted,
    )
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let data = load_data_args(&a.input)?;
    let spec = match (&a.terms, &a.trace) {
        (Some(t), None) => ModelSpec::parse(t)?,
        (None, Some(p)) => spec_from_trace(p)?.1,
        _ => return Err(Error::InvalidArgument("give exactly one of --terms or --trace".into())),
    };
    for t in spec.terms() {
        t.check(data.schema())?;
    }
    let model = fit_with(&data, &spec, &FitOptions::default())?;
    let dir = out_dir(&a.out)?;
    write(&dir, "model.json", &to_json(&model.to_artifact())?)?;
    println!("deviance {} with {} parameters, converged: {}", model.deviance, model.n_params, model.converged);
    if model.separation_warning {
        eprintln!("warning: estimates suggest quasi-complete separation");
    }
    match goodness_of_fit(&model, &data) {
        Ok(g) => println!(
            "goodness of fit: deviance {} on {} df, p = {}",
            g.deviance, g.residual_df, g.p_value
        ),
        Err(e) => println!("goodness of fit unavailable: {e}"),
    }
    print!("{}", classification(&model, &data)?.render());
    Ok(())
}

fn run_selection(
    data: &Dataset,
    alpha: f64,
    screen_alpha: f64,
    interactions: InteractionsArg,
) -> Result<(ScreeningReport, SelectionTrace)> {
    let screening = screen_univariate(data, screen_alpha)?;
    let screened = screening.significant_attributes();
    let pool = match interactions {
        InteractionsArg::None => InteractionPool::None,
        InteractionsArg::Pairs => InteractionPool::PairsOf(screened.clone()),
    };
    let trace = forward_select(data, &screened, &pool, alpha, &FitOptions::default())?;
    Ok((screening, trace))
}

fn cmd_select(a: SelectArgs) -> Result<()> {
    let data = load_data_args(&a.input)?;
    let (_, trace) = run_selection(&data, a.alpha, a.screen_alpha, a.interactions)?;
    let dir = out_dir(&a.out)?;
    let json = to_json(&trace)?;
    write(&dir, "trace.json", &json)?;
    write(&dir, "trace.csv", &trace.to_csv())?;
    print!("{json}");
    Ok(())
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn write_rules(dir: &Path, tree: &RuleTree, include_backoff: bool) -> Result<usize> {
    let rules = tree.extract_rules(include_backoff);
    let texts: Vec<_> = rules.iter().map(|r| r.text()).collect();
    write(dir, "rules.txt", &render_rules(&texts))?;
    write(dir, "rules.json", &to_json(&rules)?)?;
    Ok(rules.len())
}

fn cmd_tree(a: TreeArgs) -> Result<()> {
    let data = load_data_args(&a.input)?;
    let order = match (&a.order, &a.trace) {
        (Some(o), None) => split_list(o),
        (None, Some(p)) => spec_from_trace(p)?.0.tree_order(),
        _ => return Err(Error::InvalidArgument("give exactly one of --order or --trace".into())),
    };
    let opts = TreeOptions {
        min_support: a.min_support,
        max_depth: a.max_depth,
    };
    let tree = build_tree(&data, &order, opts)?;
    let dir = out_dir(&a.out)?;
    write(&dir, "tree.json", &format!("{}\n", tree.to_json()?))?;
    println!("{} leaves, depth {}", tree.leaves().len(), tree.depth());
    Ok(())
}

fn cmd_rules(a: RulesArgs) -> Result<()> {
    let schema = load_schema(a.schema.as_deref())?;
    let tree = RuleTree::from_json(&read_input(&a.tree)?, &schema)?;
    let n = write_rules(&out_dir(&a.out)?, &tree, a.include_backoff)?;
    println!("{n} rules");
    Ok(())
}

fn load_artifacts(dir: &Path) -> Result<Artifacts> {
    for name in ["schema.json", "model.json", "tree.json"] {
        if !dir.join(name).exists() {
            return Err(Error::InvalidArgument(format!(
                "artifact {} not found",
                dir.join(name).display()
            )));
        }
    }
    Artifacts::load(dir)
}

fn field_errors(errs: Vec<service::FieldError>) -> Error {
    let msg = errs
        .iter()
        .map(|e| format!("{}: {}", e.field, e.message))
        .collect::<Vec<_>>()
        .join("; ");
    Error::InvalidArgument(msg)
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let artifacts = load_artifacts(&a.artifacts)?;
    let text = match (&a.profile, &a.profile_file) {
        (Some(p), None) => p.clone(),
        (None, Some(f)) => read_input(f)?,
        _ => return Err(Error::InvalidArgument("give exactly one of --profile or --profile-file".into())),
    };
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let response = artifacts.predict(&value).map_err(field_errors)?;
    println!("{}", serde_json::to_string(&response)?);
    Ok(())
}

/// Splits record indices into `k` disjoint, seeded, near-equal subsets.
fn seeded_subsets(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    XorShift64Star::new(seed).shuffle(&mut idx);
    (0..k).map(|j| idx[j * n / k..(j + 1) * n / k].to_vec()).collect()
}

struct Evaluation {
    rules: EvalReport,
    model: EvalReport,
    rules_matrix: ConfusionMatrix,
    model_matrix: ConfusionMatrix,
    agreement: f64,
}

fn evaluate(artifacts: &ArtifactsRef, data: &Dataset, subsets: usize, seed: u64) -> Result<Evaluation> {
    if subsets == 0 || subsets > data.len() {
        return Err(Error::InvalidArgument(format!(
            "--subsets must lie in 1..={}",
            data.len()
        )));
    }
    let labels = data.schema().class_attribute().levels.clone();
    let observed = data.class_labels();
    let by_rules = data
        .records()
        .iter()
        .map(|r| artifacts.tree.classify_rule(r).map(|m| m.class))
        .collect::<Result<Vec<_>>>()?;
    let by_model = data
        .records()
        .iter()
        .map(|r| artifacts.model.classify(r))
        .collect::<Result<Vec<_>>>()?;
    let parts = seeded_subsets(data.len(), subsets, seed);
    let per_subset = |pred: &[usize]| -> Result<Vec<(String, ConfusionMatrix)>> {
        parts
            .iter()
            .enumerate()
            .map(|(i, part)| {
                let o: Vec<usize> = part.iter().map(|&j| observed[j]).collect();
                let p: Vec<usize> = part.iter().map(|&j| pred[j]).collect();
                Ok((format!("Data Set {}", i + 1), confusion(&labels, &o, &p)?))
            })
            .collect()
    };
    let agree = by_rules.iter().zip(&by_model).filter(|(a, b)| a == b).count();
    Ok(Evaluation {
        rules: EvalReport::from_matrices(per_subset(&by_rules)?)?,
        model: EvalReport::from_matrices(per_subset(&by_model)?)?,
        rules_matrix: confusion(&labels, &observed, &by_rules)?,
        model_matrix: confusion(&labels, &observed, &by_model)?,
        agreement: agree as f64 / data.len() as f64,
    })
}

struct ArtifactsRef<'a> {
    model: &'a FittedLogitModel,
    tree: &'a RuleTree,
}

fn write_evaluation(dir: &Path, ev: &Evaluation) -> Result<()> {
    write(dir, "eval.csv", &ev.rules.measures_csv())?;
    write(dir, "eval_collapses.csv", &ev.rules.collapses_csv())?;
    write(dir, "eval_model.csv", &ev.model.measures_csv())?;
    write(dir, "eval_model_collapses.csv", &ev.model.collapses_csv())?;
    let roc = roc_points(&ev.rules);
    write(dir, "roc.csv", &roc_csv(&roc))?;
    write(dir, "roc.svg", &roc_svg(&roc))?;
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let schema = load_schema(Some(&a.artifacts.join("schema.json")))?;
    let model: ModelArtifact = serde_json::from_str(&read_input(&a.artifacts.join("model.json"))?)?;
    let model = FittedLogitModel::from_artifact(model, &schema)?;
    let tree: TreeArtifact = serde_json::from_str(&read_input(&a.artifacts.join("tree.json"))?)?;
    let tree = RuleTree::from_artifact(tree, &schema)?;
    let data = load_data(&a.data, &schema, a.missing)?;
    let ev = evaluate(&ArtifactsRef { model: &model, tree: &tree }, &data, a.subsets, a.seed)?;
    let dir = out_dir(&a.out)?;
    write_evaluation(&dir, &ev)?;
    print!("{}", ev.rules.measures_csv());
    Ok(())
}

fn majority_rate(train: &Dataset, test: &Dataset) -> f64 {
    let k = train.schema().n_classes();
    let mut counts = vec![0usize; k];
    for y in train.class_labels() {
        counts[y] += 1;
    }
    let majority = (0..k).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap_or(0);
    let hits = test.class_labels().iter().filter(|&&y| y == majority).count();
    hits as f64 / test.len() as f64
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Headline numbers of a pipeline run, as written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineSummary {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub screened: Vec<String>,
    pub main_effect_order: Vec<String>,
    pub interactions: Vec<ModelTerm>,
    pub tree_order: Vec<String>,
    pub final_terms: Vec<ModelTerm>,
    pub deviance: f64,
    pub n_params: usize,
    pub converged: bool,
    pub goodness_of_fit: serde_json::Value,
    pub leaves: usize,
    pub rules: usize,
    pub majority_baseline: f64,
    pub rules_accuracy: f64,
    pub model_accuracy: f64,
    pub agreement: f64,
    pub rules_classification: ClassificationTable,
    pub model_classification: ClassificationTable,
    pub roc_above_diagonal: usize,
    pub roc_points: usize,
}

/// Runs the full analysis and writes every artifact plus `manifest.json`.
pub fn cmd_pipeline(a: PipelineArgs) -> Result<PipelineSummary> {
    if !(0.0..1.0).contains(&a.test_fraction) || a.test_fraction == 0.0 {
        return Err(Error::InvalidArgument("--test-fraction must lie in (0, 1)".into()));
    }
    let data = match (&a.data, a.gen_default) {
        (None, true) => generate(&default_paper_spec(a.seed, a.n))?,
        (Some(p), false) => {
            let schema = load_schema(a.schema.as_deref())?;
            load_data(p, &schema, a.missing)?
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --gen-default or --data".into())),
    };
    let dir = out_dir(&a.out)?;
    let schema = data.schema().clone();

    // the split stream is decoupled from the generator stream
    let mut idx: Vec<usize> = (0..data.len()).collect();
    XorShift64Star::new(a.seed.wrapping_add(1)).shuffle(&mut idx);
    let n_test = ((data.len() as f64) * a.test_fraction).round() as usize;
    let (test_idx, train_idx) = idx.split_at(n_test);
    let mut train_idx = train_idx.to_vec();
    let mut test_idx = test_idx.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let train = data.subset(&train_idx);
    let test = data.subset(&test_idx);
    if train.is_empty() || test.is_empty() {
        return Err(Error::InvalidArgument("split leaves an empty training or test set".into()));
    }

    let (screening, trace) = run_selection(&train, a.select_alpha, a.screen_alpha, a.interactions)?;
    let model = fit_with(&train, &trace.final_spec, &FitOptions::default())?;
    let gof = match goodness_of_fit(&model, &train) {
        Ok(g) => serde_json::to_value(g)?,
        Err(e) => json!({ "error": e.to_string() }),
    };
    let order = trace.tree_order();
    let tree = build_tree(
        &train,
        &order,
        TreeOptions {
            min_support: a.min_support,
            max_depth: a.max_depth,
        },
    )?;
    let ev = evaluate(&ArtifactsRef { model: &model, tree: &tree }, &test, a.subsets, a.seed)?;

    write(&dir, "schema.json", &format!("{}\n", schema.to_json_pretty()))?;
    save_csv(&train, &dir.join("train.csv"))?;
    save_csv(&test, &dir.join("test.csv"))?;
    write(&dir, "screening.csv", &screening.to_csv())?;
    write(&dir, "trace.json", &to_json(&trace)?)?;
    write(&dir, "trace.csv", &trace.to_csv())?;
    write(&dir, "model.json", &to_json(&model.to_artifact())?)?;
    write(&dir, "tree.json", &format!("{}\n", tree.to_json()?))?;
    let n_rules = write_rules(&dir, &tree, false)?;
    write_evaluation(&dir, &ev)?;

    let roc = roc_points(&ev.rules);
    let labels = schema.class_attribute().levels.clone();
    let summary = PipelineSummary {
        seed: a.seed,
        n_train: train.len(),
        n_test: test.len(),
        screened: screening.significant_attributes(),
        main_effect_order: trace.main_effect_order(),
        interactions: trace.accepted_interactions(),
        tree_order: order,
        final_terms: trace.final_spec.terms().to_vec(),
        deviance: model.deviance,
        n_params: model.n_params,
        converged: model.converged,
        goodness_of_fit: gof,
        leaves: tree.leaves().len(),
        rules: n_rules,
        majority_baseline: majority_rate(&train, &test),
        rules_accuracy: ev.rules_matrix.accuracy()?,
        model_accuracy: ev.model_matrix.accuracy()?,
        agreement: ev.agreement,
        rules_classification: ClassificationTable::from_counts(labels.clone(), ev.rules_matrix.counts.clone())?,
        model_classification: ClassificationTable::from_counts(labels, ev.model_matrix.counts.clone())?,
        roc_above_diagonal: roc.above,
        roc_points: roc.points.len(),
    };
    write(&dir, "summary.json", &to_json(&summary)?)?;
    write_manifest(&dir)?;
    println!(
        "rules accuracy {:.4}, model accuracy {:.4}, majority baseline {:.4}; artifacts in {}",
        summary.rules_accuracy,
        summary.model_accuracy,
        summary.majority_baseline,
        dir.display()
    );
    Ok(summary)
}

/// Lists every file in `dir` except the manifest itself, with sha256 and size.
fn write_manifest(dir: &Path) -> Result<()> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name == "manifest.json" || !entry.file_type()?.is_file() {
            continue;
        }
        let bytes = std::fs::read(entry.path())?;
        files.insert(name, json!({ "sha256": sha256_hex(&bytes), "bytes": bytes.len() }));
    }
    write(dir, "manifest.json", &to_json(&json!({ "files": files }))?)
}

fn cmd_serve(a: ServeArgs) -> Result<()> {
    let artifacts = match &a.artifacts {
        Some(dir) => Some(Arc::new(load_artifacts(dir)?)),
        None => {
            eprintln!("warning: no --artifacts given; every endpoint will answer 503");
            None
        }
    };
    let addr = std::net::SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    eprintln!("listening on http://{addr}");
    rt.block_on(service::serve(addr, artifacts))
}
