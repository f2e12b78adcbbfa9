//! Corpus evaluation: run the pipeline with rules off and on over every
//! case, judge per-case success, tag error categories, and emit the
//! aggregate report (category percentages, applicability-gated per-rule
//! success rates).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::collapse::CollapseClass;
use crate::error::{Error, Result};
use crate::parse::parse_unit_lenient;
use crate::pipeline::{run_pipeline, PipelineConfig, PipelineResult, TranslatorAdapter};
use crate::postrules::align_conditionals;
use crate::prerules::Rule;
use crate::token::Direction;

pub const WORKERS_ENV: &str = "TRANSGUARD_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    AdditionalContext,
    LoopConversion,
    TypeSensitivity,
    ExtraConstraints,
    Miscellaneous,
    MostlyCorrect,
}

impl Category {
    pub fn all() -> [Category; 6] {
        [
            Category::AdditionalContext,
            Category::LoopConversion,
            Category::TypeSensitivity,
            Category::ExtraConstraints,
            Category::Miscellaneous,
            Category::MostlyCorrect,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::AdditionalContext => "Additional Context",
            Category::LoopConversion => "Loop Conversion",
            Category::TypeSensitivity => "Type Sensitivity",
            Category::ExtraConstraints => "Extra Constraints",
            Category::Miscellaneous => "Miscellaneous",
            Category::MostlyCorrect => "(Mostly) Correct",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub id: String,
    pub java_path: Option<PathBuf>,
    pub python_path: Option<PathBuf>,
    pub focal_name: String,
    /// Hand labels per direction, from labels.json; absent means derive.
    pub labels: BTreeMap<Direction, Vec<Category>>,
}

impl CorpusCase {
    pub fn source_path(&self, direction: Direction) -> Option<&PathBuf> {
        match direction {
            Direction::J2p => self.java_path.as_ref(),
            Direction::P2j => self.python_path.as_ref(),
        }
    }
}

#[derive(Debug, Deserialize, Default)]
struct LabelsFile {
    #[serde(default)]
    j2p: BTreeMap<String, Vec<Category>>,
    #[serde(default)]
    p2j: BTreeMap<String, Vec<Category>>,
}

/// Load a corpus from `<root>/{java,python}/<id>.<ext>` plus an optional
/// `labels.json`. Malformed entries are reported in the second return
/// value, never fatal.
pub fn ingest(root: &Path) -> Result<(Vec<CorpusCase>, Vec<String>)> {
    let mut ids: BTreeMap<String, (Option<PathBuf>, Option<PathBuf>)> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (sub, ext, side) in [("java", "java", 0usize), ("python", "py", 1)] {
        let dir = root.join(sub);
        let Ok(entries) = std::fs::read_dir(&dir) else {
            continue;
        };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some(ext) {
                if path.is_file() {
                    warnings.push(format!("ignored {}", path.display()));
                }
                continue;
            }
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                warnings.push(format!("unreadable file name {}", path.display()));
                continue;
            };
            let slot = ids.entry(stem.to_string()).or_default();
            if side == 0 {
                slot.0 = Some(path);
            } else {
                slot.1 = Some(path);
            }
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptyCorpus(root.to_path_buf()));
    }
    let labels: LabelsFile = match std::fs::read_to_string(root.join("labels.json")) {
        Ok(text) => {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("labels.json: {e}")))?
        }
        Err(_) => LabelsFile::default(),
    };
    let cases = ids
        .into_iter()
        .map(|(id, (java_path, python_path))| {
            let mut map = BTreeMap::new();
            if let Some(tags) = labels.j2p.get(&id) {
                map.insert(Direction::J2p, tags.clone());
            }
            if let Some(tags) = labels.p2j.get(&id) {
                map.insert(Direction::P2j, tags.clone());
            }
            CorpusCase {
                id,
                java_path,
                python_path,
                focal_name: "f_gold".to_string(),
                labels: map,
            }
        })
        .collect();
    Ok((cases, warnings))
}

// ---------------------------------------------------------------------------
// Judging
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeOutcome {
    Success,
    Fail,
    NotApplicable,
    CheckerError,
}

/// How "the translation is good" is decided.
#[derive(Debug, Clone, Default)]
pub enum Checker {
    /// Parse validity of the target text plus a clean collapse verdict
    /// (proxy for "compiles").
    #[default]
    Internal,
    /// User-supplied compile command: translation on stdin, exit 0 = good.
    ExternalCompile { cmd: String },
}

fn internal_ok(result: &PipelineResult, direction: Direction) -> bool {
    if result.failure.is_some() {
        return false;
    }
    let Some(verdict) = &result.verdict else {
        return false;
    };
    if !verdict.clean {
        return false;
    }
    let Some(text) = &result.postprocessed else {
        return false;
    };
    parse_unit_lenient(text, direction.target_lang())
        .methods()
        .next()
        .is_some()
}

fn checker_ok(result: &PipelineResult, direction: Direction, checker: &Checker) -> Result<bool> {
    match checker {
        Checker::Internal => Ok(internal_ok(result, direction)),
        Checker::ExternalCompile { cmd } => {
            if result.failure.is_some() {
                return Ok(false);
            }
            let Some(text) = &result.postprocessed else {
                return Ok(false);
            };
            let mut parts = cmd.split_whitespace();
            let program = parts
                .next()
                .ok_or_else(|| Error::Checker("empty compile command".into()))?;
            let mut child = std::process::Command::new(program)
                .args(parts)
                .stdin(std::process::Stdio::piped())
                .stdout(std::process::Stdio::null())
                .stderr(std::process::Stdio::null())
                .spawn()
                .map_err(|e| Error::Checker(format!("spawn `{program}`: {e}")))?;
            child
                .stdin
                .take()
                .expect("stdin piped")
                .write_all(text.as_bytes())
                .map_err(|e| Error::Checker(format!("write: {e}")))?;
            let status = child
                .wait()
                .map_err(|e| Error::Checker(format!("wait: {e}")))?;
            Ok(status.success())
        }
    }
}

/// Behavioural similarity proxy: number of order-aligned conditionals whose
/// clause count matches the (pre-processed) source.
fn similarity(result: &PipelineResult, direction: Direction) -> i64 {
    let Some(src_text) = &result.preprocessed else {
        return -1;
    };
    let Some(dst_text) = &result.postprocessed else {
        return -1;
    };
    let src_unit = parse_unit_lenient(src_text, direction.source_lang());
    let dst_unit = parse_unit_lenient(dst_text, direction.target_lang());
    let (Some(src), Some(dst)) = (src_unit.methods().next(), dst_unit.methods().next()) else {
        return -1;
    };
    let alignment = align_conditionals(src, dst);
    let matching = alignment
        .pairs
        .iter()
        .filter(|p| p.src.count() == p.dst.count())
        .count() as i64;
    matching - alignment.unmatched_dst as i64
}

/// Compare a vanilla run (`before`, rules off) with a mutated run
/// (`after`, rules on). Success means the mutations turned a bad
/// translation good, or made a good one behave more like the source.
pub fn judge_success(
    before: &PipelineResult,
    after: &PipelineResult,
    direction: Direction,
    checker: &Checker,
) -> JudgeOutcome {
    let any_applied = after.records.iter().any(|r| r.applied);
    if !any_applied {
        return JudgeOutcome::NotApplicable;
    }
    let before_ok = match checker_ok(before, direction, checker) {
        Ok(ok) => ok,
        Err(_) => return JudgeOutcome::CheckerError,
    };
    let after_ok = match checker_ok(after, direction, checker) {
        Ok(ok) => ok,
        Err(_) => return JudgeOutcome::CheckerError,
    };
    if !after_ok {
        return JudgeOutcome::Fail;
    }
    if !before_ok {
        return JudgeOutcome::Success;
    }
    if similarity(after, direction) > similarity(before, direction) {
        JudgeOutcome::Success
    } else {
        JudgeOutcome::Fail
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: Category,
    pub count: usize,
    pub pct: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleRow {
    pub rule: Rule,
    pub applicable: usize,
    pub success: usize,
    /// `None` when the rule was never applicable ("n/a").
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRow {
    pub id: String,
    pub labels: Vec<Category>,
    pub derived: bool,
    pub outcome: JudgeOutcome,
    pub rules_applicable: Vec<Rule>,
    pub rules_applied: Vec<Rule>,
    pub collapse_before: Vec<CollapseClass>,
    pub collapse_after: Vec<CollapseClass>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub direction: Direction,
    pub total: usize,
    pub rows: Vec<CategoryRow>,
    pub rules: Vec<RuleRow>,
    pub cases: Vec<CaseRow>,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub pipeline: PipelineConfig,
    /// Worker bound; falls back to TRANSGUARD_WORKERS, then 4.
    pub workers: Option<usize>,
    pub checker: Checker,
}

impl EvalConfig {
    pub fn new(direction: Direction) -> Self {
        EvalConfig {
            pipeline: PipelineConfig::new(direction),
            workers: None,
            checker: Checker::Internal,
        }
    }

    fn worker_count(&self, cases: usize) -> usize {
        let configured = self
            .workers
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()));
        configured.unwrap_or(4).clamp(1, cases.max(1))
    }
}

/// Tag a case from observed behaviour when no hand labels exist. Single
/// label, first match wins, so derived percentages sum to 100%.
fn derive_category(row: &CaseRow) -> Category {
    if row.rules_applied.contains(&Rule::R1Context) {
        Category::AdditionalContext
    } else if row.rules_applied.contains(&Rule::R2Loop) {
        Category::LoopConversion
    } else if row.rules_applied.contains(&Rule::R3aArrayList)
        || row.rules_applied.contains(&Rule::R3bArrRename)
    {
        Category::TypeSensitivity
    } else if row.rules_applied.contains(&Rule::R4Prune) {
        Category::ExtraConstraints
    } else if !row.collapse_before.is_empty() || row.error.is_some() {
        Category::Miscellaneous
    } else {
        Category::MostlyCorrect
    }
}

fn eval_one(case: &CorpusCase, config: &EvalConfig, adapter: &dyn TranslatorAdapter) -> CaseRow {
    let direction = config.pipeline.direction;
    let mut row = CaseRow {
        id: case.id.clone(),
        labels: Vec::new(),
        derived: false,
        outcome: JudgeOutcome::NotApplicable,
        rules_applicable: Vec::new(),
        rules_applied: Vec::new(),
        collapse_before: Vec::new(),
        collapse_after: Vec::new(),
        error: None,
    };
    let Some(path) = case.source_path(direction) else {
        row.error = Some("no source file for direction".into());
        row.labels = vec![Category::Miscellaneous];
        return row;
    };
    let source = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            row.error = Some(format!("read {}: {e}", path.display()));
            row.labels = vec![Category::Miscellaneous];
            return row;
        }
    };
    let mut vanilla = config.pipeline.clone();
    vanilla.rules.clear();
    vanilla.focal_name = case.focal_name.clone();
    let mut mutated = config.pipeline.clone();
    mutated.focal_name = case.focal_name.clone();

    let before = match run_pipeline(&source, &vanilla, adapter) {
        Ok(result) => result,
        Err(e) => {
            row.error = Some(format!("pipeline: {e}"));
            row.labels = vec![Category::Miscellaneous];
            return row;
        }
    };
    let after = match run_pipeline(&source, &mutated, adapter) {
        Ok(result) => result,
        Err(e) => {
            row.error = Some(format!("pipeline: {e}"));
            row.labels = vec![Category::Miscellaneous];
            return row;
        }
    };
    row.rules_applicable = after
        .records
        .iter()
        .filter(|r| r.applicable)
        .map(|r| r.rule)
        .collect();
    row.rules_applicable.sort_unstable();
    row.rules_applicable.dedup();
    row.rules_applied = after
        .records
        .iter()
        .filter(|r| r.applied)
        .map(|r| r.rule)
        .collect();
    row.rules_applied.sort_unstable();
    row.rules_applied.dedup();
    if let Some(v) = &before.verdict {
        row.collapse_before = v.classes.iter().copied().collect();
    }
    if let Some(f) = &before.failure {
        row.error = Some(format!("translator (vanilla): {f}"));
    }
    if let Some(v) = &after.verdict {
        row.collapse_after = v.classes.iter().copied().collect();
    }
    row.outcome = judge_success(&before, &after, direction, &config.checker);
    match case.labels.get(&direction) {
        Some(tags) if !tags.is_empty() => row.labels = tags.clone(),
        _ => {
            row.derived = true;
            row.labels = vec![derive_category(&row)];
        }
    }
    row
}

/// Evaluate a corpus. Cases run in parallel under the worker bound; the
/// report is ordered by case id and deterministic for a given adapter seed.
pub fn run_eval(
    cases: &[CorpusCase],
    config: &EvalConfig,
    adapter: &dyn TranslatorAdapter,
) -> EvalReport {
    let direction = config.pipeline.direction;
    let relevant: Vec<&CorpusCase> = cases
        .iter()
        .filter(|c| c.source_path(direction).is_some())
        .collect();
    let workers = config.worker_count(relevant.len());
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<CaseRow>>> = Mutex::new(vec![None; relevant.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= relevant.len() {
                    break;
                }
                let row = eval_one(relevant[i], config, adapter);
                if let Some(slot) = rows.lock().expect("poisoned").get_mut(i) {
                    *slot = Some(row);
                }
            });
        }
    });
    let mut case_rows: Vec<CaseRow> = rows
        .into_inner()
        .expect("poisoned")
        .into_iter()
        .flatten()
        .collect();
    case_rows.sort_by(|a, b| a.id.cmp(&b.id));

    let total = case_rows.len();
    let rows = Category::all()
        .into_iter()
        .map(|category| {
            let count = case_rows
                .iter()
                .filter(|c| c.labels.contains(&category))
                .count();
            let pct = if total == 0 {
                0.0
            } else {
                count as f64 * 100.0 / total as f64
            };
            CategoryRow {
                category,
                count,
                pct,
            }
        })
        .collect();
    let rules = [
        Rule::R1Context,
        Rule::R2Loop,
        Rule::R3aArrayList,
        Rule::R3bArrRename,
        Rule::R4Prune,
    ]
    .into_iter()
    .map(|rule| {
        let gated: Vec<&CaseRow> = case_rows
            .iter()
            .filter(|c| {
                c.rules_applicable.contains(&rule) && c.outcome != JudgeOutcome::CheckerError
            })
            .collect();
        let applicable = gated.len();
        let success = gated
            .iter()
            .filter(|c| c.outcome == JudgeOutcome::Success)
            .count();
        let rate = (applicable > 0).then(|| success as f64 / applicable as f64);
        RuleRow {
            rule,
            applicable,
            success,
            rate,
        }
    })
    .collect();
    EvalReport {
        direction,
        total,
        rows,
        rules,
        cases: case_rows,
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,name,count,value\n");
        for row in &self.rows {
            out.push_str(&format!(
                "category,{},{},{:.1}\n",
                row.category.label(),
                row.count,
                row.pct
            ));
        }
        for rule in &self.rules {
            let rate = rule
                .rate
                .map(|r| format!("{:.3}", r))
                .unwrap_or_else(|| "n/a".to_string());
            out.push_str(&format!(
                "rule,{:?},{}/{},{rate}\n",
                rule.rule, rule.success, rule.applicable
            ));
        }
        out
    }

    /// Aligned text table mirroring the error-pattern table rows.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "| Error Pattern | {} ({} cases) |\n|---|---|\n",
            self.direction, self.total
        ));
        for row in &self.rows {
            out.push_str(&format!("| {} | {:.0}% |\n", row.category.label(), row.pct));
        }
        out.push_str("\n| Rule | Applicable | Success | Rate |\n|---|---|---|---|\n");
        for rule in &self.rules {
            let rate = rule
                .rate
                .map(|r| format!("{:.0}%", r * 100.0))
                .unwrap_or_else(|| "n/a".to_string());
            out.push_str(&format!(
                "| {:?} | {} | {} | {rate} |\n",
                rule.rule, rule.applicable, rule.success
            ));
        }
        out
    }
}
