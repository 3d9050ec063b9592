//! The `qmm` command-line front end.
//!
//! Every subcommand reads plain files and writes text to standard output
//! or into an output directory. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, no findings that need attention |
//! | 1 | `validate` found warnings only |
//! | 2 | `validate` found errors, or the inputs are inconsistent with the model |
//! | 3 | an input file is unreadable or does not parse |

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use walkdir::WalkDir;

use qmm_core::checkers::{parse_bindings, run_checkers, Assessment, Corpus};
use qmm_core::docgen::{generate_guideline, parse_views, slug, View};
use qmm_core::dsl::parse_model;
use qmm_core::model::ModelCounts;
use qmm_core::profile::{merge_manual, parse_manual_scores, values_from_results, QualityProfile};
use qmm_core::validate::{
    build_glossary, check_contradictions, check_coverage, check_omissions, validate_structure, ImpactSet,
};
use qmm_core::{Code, Diagnostic, QualityModel, ValidationReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_WARNINGS: u8 = 1;
pub const EXIT_ERRORS: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qmm", version, about = "Activity-based quality model toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check model integrity, coverage, contradictions and omissions
    Validate(ValidateArgs),
    /// Print element counts, optionally as a difference to a base model
    Stats(StatsArgs),
    /// Generate guideline documents for views of the model
    Guideline(GuidelineArgs),
    /// Run the bound checkers over a corpus
    Assess(AssessArgs),
    /// Combine checker results and manual scores into a quality profile
    Profile(ProfileArgs),
    /// Print the glossary of entity and attribute names
    Glossary(GlossaryArgs),
    /// Print the atomic impact matrix and the top-level lifted matrix
    Matrix(ModelArg),
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Quality model file (.qmm)
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Entity/activity pairs that must be related; an empty file checks all top-level pairs
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Impact set from another source, compared for contradictions
    #[arg(long)]
    pub external: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Report the difference to this base model
    #[arg(long)]
    pub diff_base: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GuidelineArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// View definitions; one document of the whole model when omitted
    #[arg(long)]
    pub view: Option<PathBuf>,
    /// Directory for the documents; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Source file or directory to analyze (repeatable)
    #[arg(long)]
    pub corpus: Vec<PathBuf>,
    /// Checker bindings
    #[arg(long)]
    pub bindings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Directory for findings.tsv and results.tsv; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Review scores for MANUAL and SEMI facts
    #[arg(long)]
    pub manual_scores: Option<PathBuf>,
    /// Write the profile to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GlossaryArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Alias list, one `alias term` pair per line
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
}

/// A failure with its exit code. Errors without one exit with
/// [`EXIT_INPUT`].
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn fail<T>(exit: u8, message: impl Into<String>) -> Result<T> {
    Err(Failure {
        exit,
        message: message.into(),
    }
    .into())
}

/// Exit code for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.downcast_ref::<Failure>().map_or(EXIT_INPUT, |f| f.exit)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn render_diags(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

/// Fails with [`EXIT_INPUT`] when `diags` holds errors.
fn reject_errors(what: &Path, diags: &[Diagnostic]) -> Result<()> {
    if diags.iter().any(Diagnostic::is_error) {
        return fail(
            EXIT_INPUT,
            format!("{} does not parse\n{}", what.display(), render_diags(diags).trim_end()),
        );
    }
    Ok(())
}

/// Parses the model. Syntax errors fail; other diagnostics are returned
/// for the caller to report.
fn load_model(path: &Path) -> Result<(QualityModel, Vec<Diagnostic>)> {
    let text = read(path)?;
    let (model, diags) = parse_model(&path.display().to_string(), &text);
    let syntax: Vec<Diagnostic> = diags.iter().filter(|d| d.code == Code::SyntaxError).cloned().collect();
    reject_errors(path, &syntax)?;
    Ok((model, diags))
}

/// Parses the model and requires it to be free of errors.
fn load_valid_model(path: &Path) -> Result<QualityModel> {
    let (model, diags) = load_model(path)?;
    let mut report = ValidationReport::new(diags);
    report.merge(validate_structure(&model));
    if report.error_count() > 0 {
        return fail(
            EXIT_ERRORS,
            format!("{} is not a valid model\n{}", path.display(), report.render().trim_end()),
        );
    }
    Ok(model)
}

/// Whitespace-separated word pairs, `#` comments allowed.
fn parse_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = read(path)?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = words[..] else {
            return fail(
                EXIT_INPUT,
                format!("{}:{}: expected two names, found `{line}`", path.display(), i + 1),
            );
        };
        pairs.push((a.to_string(), b.to_string()));
    }
    Ok(pairs)
}

/// Reads every corpus path. Directories are walked recursively and their
/// files named relative to the directory; hidden entries are skipped.
pub fn load_corpus(paths: &[PathBuf]) -> Result<Corpus> {
    let mut files = Vec::new();
    for root in paths {
        if root.is_file() {
            files.push((root.display().to_string(), read(root)?));
            continue;
        }
        if !root.is_dir() {
            return fail(EXIT_INPUT, format!("corpus path {} does not exist", root.display()));
        }
        let walker = WalkDir::new(root)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
        for entry in walker {
            let entry = entry.with_context(|| format!("cannot walk {}", root.display()))?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
            let name = rel.to_string_lossy().replace('\\', "/");
            files.push((name, read(entry.path())?));
        }
    }
    Ok(Corpus::from_texts(files))
}

fn assess(model: &QualityModel, args: &CorpusArgs, err: &mut dyn Write) -> Result<Assessment> {
    let bindings = match &args.bindings {
        Some(path) => {
            let (bindings, diags) = parse_bindings(&path.display().to_string(), &read(path)?);
            reject_errors(path, &diags)?;
            bindings
        }
        None => Vec::new(),
    };
    let corpus = load_corpus(&args.corpus)?;
    err.write_all(render_diags(&corpus.diagnostics).as_bytes())?;
    run_checkers(model, &bindings, &corpus).or_else(|e| fail(EXIT_ERRORS, e.to_string()))
}

/// Runs a parsed command line, writing results to `out` and notes to
/// `err`. Returns the exit code of a completed run.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Stats(a) => cmd_stats(&a, out),
        Command::Guideline(a) => cmd_guideline(&a, out, err),
        Command::Assess(a) => cmd_assess(&a, out, err),
        Command::Profile(a) => cmd_profile(&a, out, err),
        Command::Glossary(a) => cmd_glossary(&a, out),
        Command::Matrix(a) => cmd_matrix(&a, out),
    }
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<u8> {
    let (model, diags) = load_model(&args.model.model)?;
    let mut report = ValidationReport::new(diags);
    report.merge(validate_structure(&model));
    report.merge(check_omissions(&model));

    if let Some(path) = &args.pairs {
        match check_coverage(&model, &parse_pairs(path)?) {
            Ok(r) => report.merge(r),
            Err(e) => return fail(EXIT_ERRORS, format!("{}: {e}", path.display())),
        }
    }

    let mut external = Vec::new();
    for path in &args.external {
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
        let (set, diags) = ImpactSet::parse(&name, &path.display().to_string(), &read(path)?);
        reject_errors(path, &diags)?;
        external.push(set);
    }
    if !external.is_empty() {
        report.merge(check_contradictions(&model, &external));
    }

    out.write_all(report.render().as_bytes())?;
    Ok(if report.error_count() > 0 {
        EXIT_ERRORS
    } else if report.warning_count() > 0 {
        EXIT_WARNINGS
    } else {
        EXIT_OK
    })
}

/// Count lines in the order entities, attributes, facts, activities,
/// impacts, then the total.
pub fn render_counts(c: &ModelCounts) -> String {
    format!(
        "entities   {}\nattributes {}\nfacts      {}\nactivities {}\nimpacts    {}\ntotal      {}\n",
        c.entities,
        c.attributes,
        c.facts,
        c.activities,
        c.impacts,
        c.total()
    )
}

fn signed(n: usize, base: usize) -> String {
    let d = n as i64 - base as i64;
    if d >= 0 {
        format!("+{d}")
    } else {
        d.to_string()
    }
}

/// Difference summary: facts with their new entities and attributes,
/// impacts, and activities when they changed.
pub fn render_count_diff(model: &ModelCounts, base: &ModelCounts) -> String {
    let mut s = format!(
        "{} facts ({} entities, {} attributes), {} impacts\n",
        signed(model.facts, base.facts),
        signed(model.entities, base.entities),
        signed(model.attributes, base.attributes),
        signed(model.impacts, base.impacts),
    );
    if model.activities != base.activities {
        s.push_str(&format!("{} activities\n", signed(model.activities, base.activities)));
    }
    s
}

pub fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<u8> {
    let counts = load_valid_model(&args.model.model)?.counts();
    out.write_all(render_counts(&counts).as_bytes())?;
    if let Some(base) = &args.diff_base {
        let base = load_valid_model(base)?.counts();
        writeln!(out)?;
        out.write_all(render_count_diff(&counts, &base).as_bytes())?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_guideline(args: &GuidelineArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let model = load_valid_model(&args.model.model)?;
    let views = match &args.view {
        Some(path) => {
            let (views, diags) = parse_views(&path.display().to_string(), &read(path)?);
            reject_errors(path, &diags)?;
            views
        }
        None => vec![View::all(model.name())],
    };
    let mut docs: BTreeMap<String, String> = BTreeMap::new();
    let mut order = Vec::new();
    for view in &views {
        let (doc, diags) = match generate_guideline(&model, view) {
            Ok(d) => d,
            Err(e) => return fail(EXIT_ERRORS, format!("view `{}`: {e}", view.name)),
        };
        err.write_all(render_diags(&diags).as_bytes())?;
        let file = format!("{}.md", slug(&view.name));
        if docs.insert(file.clone(), doc).is_some() {
            return fail(EXIT_ERRORS, format!("two views map to the file name {file}"));
        }
        order.push(file);
    }
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for file in &order {
                let path = dir.join(file);
                fs::write(&path, &docs[file]).with_context(|| format!("cannot write {}", path.display()))?;
                writeln!(out, "{}", path.display())?;
            }
        }
        None => {
            for (i, file) in order.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                out.write_all(docs[file].as_bytes())?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_assess(args: &AssessArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let model = load_valid_model(&args.model.model)?;
    let assessment = assess(&model, &args.corpus, err)?;
    let results = assessment.render_results();
    let findings = assessment.render_findings();
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for (name, body) in [("results.tsv", &results), ("findings.tsv", &findings)] {
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
            }
            out.write_all(results.as_bytes())?;
        }
        None => {
            out.write_all(results.as_bytes())?;
            writeln!(out)?;
            out.write_all(findings.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_profile(args: &ProfileArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let model = load_valid_model(&args.model.model)?;
    let assessment = assess(&model, &args.corpus, err)?;
    let mut values = values_from_results(&model, &assessment.results);
    if let Some(path) = &args.manual_scores {
        let (scores, diags) = parse_manual_scores(&path.display().to_string(), &read(path)?);
        reject_errors(path, &diags)?;
        values = merge_manual(&model, &values, &scores).or_else(|e| fail(EXIT_ERRORS, e.to_string()))?;
    }
    let text = QualityProfile::compute(&model, values).render(&model);
    match &args.out {
        Some(path) => fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

/// Reads `alias term` lines.
fn parse_synonyms(path: &Path) -> Result<Vec<(String, String)>> {
    parse_pairs(path)
}

pub fn cmd_glossary(args: &GlossaryArgs, out: &mut dyn Write) -> Result<u8> {
    let (model, diags) = load_model(&args.model.model)?;
    reject_errors(&args.model.model, &diags)?;
    let synonyms = match &args.synonyms {
        Some(p) => parse_synonyms(p)?,
        None => Vec::new(),
    };
    out.write_all(build_glossary(&model, &synonyms).render().as_bytes())?;
    Ok(EXIT_OK)
}

pub fn render_matrices(model: &QualityModel) -> String {
    format!(
        "Impact matrix\n\n{}\nLifted matrix\n\n{}",
        model.impact_matrix().render(),
        model.top_level_lifted_matrix().render()
    )
}

pub fn cmd_matrix(args: &ModelArg, out: &mut dyn Write) -> Result<u8> {
    let model = load_valid_model(&args.model)?;
    out.write_all(render_matrices(&model).as_bytes())?;
    Ok(EXIT_OK)
}
