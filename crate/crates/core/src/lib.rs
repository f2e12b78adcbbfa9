//! Rule-based program mutation around an external ML code translator.
//!
//! The library pre-processes Java/Python focal methods before translation
//! (context removal, for-to-while rewriting, array-to-List conversion,
//! `arr` parameter renaming), post-processes translator output (pruning of
//! appended logical clauses), detects degenerate "collapse" output, and
//! evaluates the whole pipeline over a corpus.

pub mod collapse;
pub mod cond;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod parse;
pub mod pipeline;
pub mod postrules;
pub mod prerules;
pub mod render;
pub mod token;

pub use collapse::{classify, CollapseClass, CollapseConfig, CollapseVerdict};
pub use cond::{parse_condition, CondChain, CondOp};
pub use error::{Error, Result};
pub use eval::{
    ingest, judge_success, run_eval, Category, Checker, EvalConfig, EvalReport, JudgeOutcome,
};
pub use parse::{parse_method, parse_unit, parse_unit_lenient, MethodUnit, SyntaxUnit};
pub use pipeline::{
    run_pipeline, AdapterKind, HttpAdapter, MockProfile, MockTranslator, PipelineConfig,
    PipelineResult, SubprocessAdapter, TranslatorAdapter,
};
pub use postrules::{
    align_conditionals, apply_post, prune_extra_clauses, CondAlignment, CondKind, CondPair,
    PruneMode, PrunePolicy,
};
pub use prerules::{
    apply_pre, array_params_to_list, detect_complex_for, extract_focal, for_to_while,
    rename_arr_params, MutationRecord, PreConfig, Rule,
};
pub use render::{render_method, render_unit};
pub use token::{tokenize, tokenize_lenient, Direction, Language, Span, Token, TokenKind};
