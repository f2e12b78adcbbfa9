//! Preprocess -> translate -> postprocess orchestration. The translator
//! itself is external: a subprocess, an HTTP endpoint, or the built-in
//! mock used for tests and offline evaluation.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collapse::{classify, CollapseConfig, CollapseVerdict};
use crate::error::{Error, Result};
use crate::parse::{parse_unit, parse_unit_lenient};
use crate::postrules::{apply_post, PrunePolicy};
use crate::prerules::{
    apply_pre, default_arr_pattern, has_complex_for, MutationRecord, PreConfig, Rule,
};
use crate::token::{render_tokens, tokenize_lenient, Direction, Language, Token, TokenKind};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdapterKind {
    Subprocess,
    Http,
    Mock,
}

/// External translator contract: method text in, translated text out.
/// Adapters are stateless between calls and tolerate concurrent use.
pub trait TranslatorAdapter: Send + Sync {
    fn translate(&self, input: &str, direction: Direction) -> Result<String>;
    fn kind(&self) -> AdapterKind;
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub direction: Direction,
    pub focal_name: String,
    pub rules: BTreeSet<Rule>,
    pub arr_threshold: usize,
    pub all_loops: bool,
    pub prune: PrunePolicy,
    pub collapse: CollapseConfig,
    pub lenient: bool,
}

impl PipelineConfig {
    pub fn new(direction: Direction) -> Self {
        PipelineConfig {
            direction,
            focal_name: "f_gold".to_string(),
            rules: Rule::all(),
            arr_threshold: 1,
            all_loops: false,
            prune: PrunePolicy::default(),
            collapse: CollapseConfig::default(),
            lenient: false,
        }
    }

    pub fn pre_config(&self) -> PreConfig {
        let mut pre = PreConfig::new(self.direction);
        pre.rules = self.rules.clone();
        pre.arr_threshold = self.arr_threshold;
        pre.all_loops = self.all_loops;
        pre.focal_name = self.focal_name.clone();
        pre
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub preprocess_ms: u128,
    pub translate_ms: u128,
    pub postprocess_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineResult {
    pub input: String,
    pub preprocessed: Option<String>,
    pub raw_translation: Option<String>,
    pub postprocessed: Option<String>,
    pub records: Vec<MutationRecord>,
    pub verdict: Option<CollapseVerdict>,
    /// Set when the translator itself failed (exit code, timeout,
    /// transport); the later stages are then absent.
    pub failure: Option<String>,
    #[serde(skip)]
    pub timings: StageTimings,
}

/// Run one source file through the full pipeline.
pub fn run_pipeline(
    source: &str,
    config: &PipelineConfig,
    adapter: &dyn TranslatorAdapter,
) -> Result<PipelineResult> {
    let src_lang = config.direction.source_lang();
    let unit = if config.lenient {
        parse_unit_lenient(source, src_lang)
    } else {
        parse_unit(source, src_lang)?
    };
    let original = unit
        .find_method(&config.focal_name)
        .cloned()
        .or_else(|| unit.methods().next().cloned());

    let mut result = PipelineResult {
        input: source.to_string(),
        preprocessed: None,
        raw_translation: None,
        postprocessed: None,
        records: Vec::new(),
        verdict: None,
        failure: None,
        timings: StageTimings::default(),
    };

    let t0 = Instant::now();
    let (pre_text, mut records) = apply_pre(&unit, &config.pre_config());
    result.timings.preprocess_ms = t0.elapsed().as_millis();
    result.preprocessed = Some(pre_text.clone());

    let t1 = Instant::now();
    let raw = match adapter.translate(&pre_text, config.direction) {
        Ok(text) => text,
        Err(e) => {
            result.timings.translate_ms = t1.elapsed().as_millis();
            result.records = records;
            result.failure = Some(e.to_string());
            return Ok(result);
        }
    };
    result.timings.translate_ms = t1.elapsed().as_millis();
    result.raw_translation = Some(raw.clone());

    let verdict = classify(
        &raw,
        config.direction.target_lang(),
        original.as_ref(),
        &config.collapse,
    );
    let collapsed = !verdict.clean;
    result.verdict = Some(verdict);

    let t2 = Instant::now();
    if config.rules.contains(&Rule::R4Prune) {
        if collapsed {
            let mut record = MutationRecord::new(Rule::R4Prune);
            record.notes = "rule skipped: raw translation is a collapse".into();
            records.push(record);
            result.postprocessed = Some(raw);
        } else {
            let (post, post_records) = apply_post(&pre_text, &raw, config.direction, &config.prune);
            records.extend(post_records);
            result.postprocessed = Some(post);
        }
    } else {
        result.postprocessed = Some(raw);
    }
    result.timings.postprocess_ms = t2.elapsed().as_millis();
    result.records = records;
    Ok(result)
}

// ---------------------------------------------------------------------------
// Subprocess adapter
// ---------------------------------------------------------------------------

/// Protocol: method text on stdin (UTF-8), direction as the final argument
/// token (`j2p`/`p2j`), translation on stdout, exit 0 = success.
pub struct SubprocessAdapter {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl SubprocessAdapter {
    pub fn new(cmd: &str) -> Self {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next().unwrap_or_default();
        SubprocessAdapter {
            program,
            args: parts.collect(),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

impl TranslatorAdapter for SubprocessAdapter {
    fn kind(&self) -> AdapterKind {
        AdapterKind::Subprocess
    }

    fn translate(&self, input: &str, direction: Direction) -> Result<String> {
        let mut child = std::process::Command::new(&self.program)
            .args(&self.args)
            .arg(direction.to_string())
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .stderr(std::process::Stdio::piped())
            .spawn()
            .map_err(|e| Error::Translator(format!("spawn `{}`: {e}", self.program)))?;
        child
            .stdin
            .take()
            .expect("stdin piped")
            .write_all(input.as_bytes())
            .map_err(|e| Error::Translator(format!("write stdin: {e}")))?;
        let deadline = Instant::now() + self.timeout;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) => {
                    if Instant::now() >= deadline {
                        let _ = child.kill();
                        let _ = child.wait();
                        return Err(Error::Translator(format!(
                            "timeout after {:?}",
                            self.timeout
                        )));
                    }
                    std::thread::sleep(Duration::from_millis(5));
                }
                Err(e) => return Err(Error::Translator(format!("wait: {e}"))),
            }
        };
        let mut stdout = String::new();
        if let Some(mut pipe) = child.stdout.take() {
            use std::io::Read;
            let _ = pipe.read_to_string(&mut stdout);
        }
        if !status.success() {
            let mut stderr = String::new();
            if let Some(mut pipe) = child.stderr.take() {
                use std::io::Read;
                let _ = pipe.read_to_string(&mut stderr);
            }
            return Err(Error::Translator(format!(
                "exit status {}: {}",
                status
                    .code()
                    .map_or("signal".to_string(), |c| c.to_string()),
                stderr.trim()
            )));
        }
        Ok(stdout)
    }
}

// ---------------------------------------------------------------------------
// HTTP adapter
// ---------------------------------------------------------------------------

/// Protocol: POST, body = method text, header `X-Direction: j2p|p2j`,
/// 200 = success with body = translation.
pub struct HttpAdapter {
    pub url: String,
    pub timeout: Duration,
}

impl HttpAdapter {
    pub fn new(url: impl Into<String>) -> Self {
        HttpAdapter {
            url: url.into(),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

impl TranslatorAdapter for HttpAdapter {
    fn kind(&self) -> AdapterKind {
        AdapterKind::Http
    }

    fn translate(&self, input: &str, direction: Direction) -> Result<String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| Error::Translator(format!("http client: {e}")))?;
        let response = client
            .post(&self.url)
            .header("X-Direction", direction.to_string())
            .body(input.to_string())
            .send()
            .map_err(|e| Error::Translator(format!("http: {e}")))?;
        if !response.status().is_success() {
            return Err(Error::Translator(format!(
                "http status {}",
                response.status()
            )));
        }
        response
            .text()
            .map_err(|e| Error::Translator(format!("http body: {e}")))
    }
}

// ---------------------------------------------------------------------------
// Mock adapter
// ---------------------------------------------------------------------------

/// Error-injection profiles named after the observed error categories. Each
/// profile corrupts the fixture translation when the input shows that
/// category's trigger, and returns it untouched otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MockProfile {
    /// Echo the input back.
    Identity,
    /// Fixture ground-truth translation.
    Perfect,
    /// Surrounding context (main/class) makes the model emit import spam.
    AdditionalContext,
    /// A complex for loop derails the translation into number spam.
    LoopConversion,
    /// Array-typed or `arr`-named parameters yield comma spam.
    TypeSensitivity,
    /// p2j conditions gain an appended clause not in the source.
    ExtraConstraints,
    /// Unconditional SPACETOKEN artifacts (no rule repairs these).
    Miscellaneous,
    /// Unconditional collapse shapes.
    CollapseImport,
    CollapseNumber,
    CollapseComma,
    CollapseSpacetoken,
    /// All trigger-based corruptions at once.
    All,
}

impl std::str::FromStr for MockProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "identity" => MockProfile::Identity,
            "perfect" => MockProfile::Perfect,
            "additional_context" => MockProfile::AdditionalContext,
            "loop_conversion" => MockProfile::LoopConversion,
            "type_sensitivity" => MockProfile::TypeSensitivity,
            "extra_constraints" => MockProfile::ExtraConstraints,
            "miscellaneous" => MockProfile::Miscellaneous,
            "collapse_import" => MockProfile::CollapseImport,
            "collapse_number" => MockProfile::CollapseNumber,
            "collapse_comma" => MockProfile::CollapseComma,
            "collapse_spacetoken" => MockProfile::CollapseSpacetoken,
            "all" => MockProfile::All,
            other => return Err(Error::Config(format!("unknown mock profile `{other}`"))),
        })
    }
}

pub struct MockTranslator {
    pub profile: MockProfile,
    pub seed: u64,
    /// Minimum count of `arr*` parameters before the p2j type trigger fires.
    pub arr_trigger: usize,
    table: HashMap<(Direction, String), String>,
}

impl MockTranslator {
    pub fn new(profile: MockProfile, seed: u64) -> Self {
        MockTranslator {
            profile,
            seed,
            arr_trigger: 1,
            table: HashMap::new(),
        }
    }

    pub fn identity() -> Self {
        MockTranslator::new(MockProfile::Identity, 0)
    }

    /// Register a ground-truth translation, keyed on the token-normalized
    /// input text.
    pub fn insert(&mut self, direction: Direction, input: &str, output: &str) {
        self.table.insert(
            (direction, normalize_key(input, direction.source_lang())),
            output.to_string(),
        );
    }

    fn lookup(&self, input: &str, direction: Direction) -> Result<String> {
        let key = normalize_key(input, direction.source_lang());
        self.table
            .get(&(direction, key))
            .cloned()
            .ok_or_else(|| Error::FixtureMiss(first_line(input)))
    }

    fn rng_for(&self, input: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(input.as_bytes()))
    }
}

fn normalize_key(input: &str, lang: Language) -> String {
    render_tokens(&tokenize_lenient(input, lang))
}

fn first_line(text: &str) -> String {
    text.lines().next().unwrap_or_default().to_string()
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

// Trigger predicates evaluated on the (possibly preprocessed) input text.

fn trigger_context(input: &str, lang: Language) -> bool {
    let unit = parse_unit_lenient(input, lang);
    unit.methods().count() > 1
        || unit.items.iter().any(|item| match item {
            crate::parse::Item::Other(o) => !o.tokens.is_empty(),
            crate::parse::Item::Method(_) => false,
        })
}

fn trigger_complex_loop(input: &str, lang: Language) -> bool {
    lang == Language::Java
        && parse_unit_lenient(input, lang)
            .methods()
            .any(has_complex_for)
}

fn trigger_types(input: &str, lang: Language, arr_trigger: usize) -> bool {
    let unit = parse_unit_lenient(input, lang);
    match lang {
        Language::Java => unit.methods().any(|m| {
            m.params
                .iter()
                .any(|p| p.tokens.iter().any(|t| t.is(TokenKind::Punct, "[")))
        }),
        Language::Python => {
            let pattern = default_arr_pattern();
            unit.methods().any(|m| {
                m.params
                    .iter()
                    .filter(|p| pattern.is_match(&p.name))
                    .count()
                    >= arr_trigger
            })
        }
    }
}

fn trigger_conditional(input: &str, lang: Language) -> bool {
    tokenize_lenient(input, lang)
        .iter()
        .any(|t| t.is(TokenKind::Keyword, "while") || t.is(TokenKind::Keyword, "if"))
}

// Collapse shapes matching the default detector thresholds.

fn import_spam(lang: Language) -> String {
    match lang {
        Language::Python => {
            "import numpy\nimport numpy\nimport stream\nimport numpy\nimport numpy\n".to_string()
        }
        Language::Java => "import java . util . stream ; import java . util . stream ; import java . util . stream ;\n".to_string(),
    }
}

fn number_spam(lang: Language) -> String {
    let nums =
        "3 , 7 , 11 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14 , 14";
    match lang {
        Language::Python => format!("sample = [ {nums} ]\n"),
        Language::Java => format!("int [ ] sample = {{ {nums} }} ;\n"),
    }
}

fn comma_spam(lang: Language) -> String {
    let noise = "',' ',' ',' ',' ',' ',' ',' ',' ',' ',' ',' ','";
    match lang {
        Language::Python => format!("def {noise}\n"),
        Language::Java => format!("static {noise}\n"),
    }
}

fn spacetoken_spam(lang: Language) -> String {
    match lang {
        Language::Python => {
            "def SPACETOKEN f ( param1 SPACETOKEN , param2 SPACETOKEN ) :\n\treturn param1\n"
                .to_string()
        }
        Language::Java => {
            "static SPACETOKEN int f ( int param1 SPACETOKEN , int param2 SPACETOKEN ) { return param1 ; }\n"
                .to_string()
        }
    }
}

const JUNK_CLAUSES: &[&str] = &[
    "x % 10 == 0",
    "n % 2 == 0",
    "i % 10 == 0",
    "x * x < n",
    "n > - 1",
];

/// Append `&& ( junk )` to the first if/while condition of a Java text.
fn append_clause(text: &str, rng: &mut ChaCha8Rng) -> String {
    let tokens = tokenize_lenient(text, Language::Java);
    let mut head = None;
    for (i, tok) in tokens.iter().enumerate() {
        if (tok.is(TokenKind::Keyword, "while") || tok.is(TokenKind::Keyword, "if"))
            && tokens
                .get(i + 1)
                .is_some_and(|t| t.is(TokenKind::Punct, "("))
        {
            head = Some(i + 1);
            break;
        }
    }
    let Some(open) = head else {
        return text.to_string();
    };
    let Some(close) = crate::parse::find_matching(&tokens, open) else {
        return text.to_string();
    };
    let junk = JUNK_CLAUSES.choose(rng).expect("non-empty");
    let mut out: Vec<Token> = tokens[..close].to_vec();
    out.push(Token::synth(TokenKind::Operator, "&&"));
    out.push(Token::synth(TokenKind::Punct, "("));
    out.extend(tokenize_lenient(junk, Language::Java));
    out.push(Token::synth(TokenKind::Punct, ")"));
    out.extend(tokens[close..].iter().cloned());
    render_tokens(&out)
}

impl TranslatorAdapter for MockTranslator {
    fn kind(&self) -> AdapterKind {
        AdapterKind::Mock
    }

    fn translate(&self, input: &str, direction: Direction) -> Result<String> {
        let src = direction.source_lang();
        let dst = direction.target_lang();
        match self.profile {
            MockProfile::Identity => Ok(input.to_string()),
            MockProfile::Perfect => self.lookup(input, direction),
            MockProfile::CollapseImport => Ok(import_spam(dst)),
            MockProfile::CollapseNumber => Ok(number_spam(dst)),
            MockProfile::CollapseComma => Ok(comma_spam(dst)),
            MockProfile::CollapseSpacetoken => Ok(spacetoken_spam(dst)),
            MockProfile::Miscellaneous => Ok(spacetoken_spam(dst)),
            MockProfile::AdditionalContext => {
                if trigger_context(input, src) {
                    Ok(import_spam(dst))
                } else {
                    self.lookup(input, direction)
                }
            }
            MockProfile::LoopConversion => {
                if trigger_complex_loop(input, src) {
                    Ok(number_spam(dst))
                } else {
                    self.lookup(input, direction)
                }
            }
            MockProfile::TypeSensitivity => {
                if trigger_types(input, src, self.arr_trigger) {
                    Ok(comma_spam(dst))
                } else {
                    self.lookup(input, direction)
                }
            }
            MockProfile::ExtraConstraints => {
                let base = self.lookup(input, direction)?;
                if direction == Direction::P2j && trigger_conditional(input, src) {
                    Ok(append_clause(&base, &mut self.rng_for(input)))
                } else {
                    Ok(base)
                }
            }
            MockProfile::All => {
                if trigger_context(input, src) {
                    return Ok(import_spam(dst));
                }
                if trigger_complex_loop(input, src) {
                    return Ok(number_spam(dst));
                }
                if trigger_types(input, src, self.arr_trigger) {
                    return Ok(comma_spam(dst));
                }
                let base = self.lookup(input, direction)?;
                if direction == Direction::P2j && trigger_conditional(input, src) {
                    return Ok(append_clause(&base, &mut self.rng_for(input)));
                }
                Ok(base)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::CollapseClass;
    use crate::token::tokenize;

    fn norm(text: &str, lang: Language) -> String {
        render_tokens(&tokenize(text, lang).unwrap())
    }

    #[test]
    fn identity_pipeline_is_identity() {
        let src = "def f_gold ( x ) :\n\treturn x\n";
        let config = PipelineConfig::new(Direction::P2j);
        let result = run_pipeline(src, &config, &MockTranslator::identity()).unwrap();
        // No rule applies, the mock echoes, pruning is a no-op.
        assert_eq!(result.postprocessed.as_deref(), Some(src));
        assert!(result.records.iter().all(|r| !r.applied));
    }

    #[test]
    fn appended_clause_is_pruned() {
        let src = "def f_gold ( x ) :\n\twhile x != 0 :\n\t\tx = x - 1\n\treturn x\n";
        let gold = "static int f_gold ( int x ) { while ( x != 0 ) { x = x - 1 ; } return x ; }";
        let mut mock = MockTranslator::new(MockProfile::ExtraConstraints, 7);
        mock.insert(Direction::P2j, src, gold);
        let config = PipelineConfig::new(Direction::P2j);

        let raw = mock.translate(src, Direction::P2j).unwrap();
        let raw_cond = crate::parse::parse_method(&raw, Language::Java).unwrap();
        let _ = raw_cond; // parses with the junk clause present
        assert!(raw.contains("&&"), "mock did not corrupt: {raw}");

        let result = run_pipeline(src, &config, &mock).unwrap();
        assert_eq!(
            norm(result.postprocessed.as_deref().unwrap(), Language::Java),
            norm(gold, Language::Java)
        );
    }

    #[test]
    fn collapse_skips_postprocess() {
        let src = "def f_gold ( x ) :\n\treturn x\n";
        let mock = MockTranslator::new(MockProfile::CollapseComma, 0);
        let config = PipelineConfig::new(Direction::P2j);
        let result = run_pipeline(src, &config, &mock).unwrap();
        let verdict = result.verdict.unwrap();
        assert!(verdict.classes.contains(&CollapseClass::CommaSpam));
        let r4 = result
            .records
            .iter()
            .find(|r| r.rule == Rule::R4Prune)
            .expect("r4 record");
        assert!(!r4.applied);
        assert!(r4.notes.contains("collapse"));
    }

    #[test]
    fn translator_failure_is_captured() {
        let src = "def f_gold ( x ) :\n\treturn x\n";
        let adapter = SubprocessAdapter::new("false");
        let config = PipelineConfig::new(Direction::P2j);
        let result = run_pipeline(src, &config, &adapter).unwrap();
        assert!(result.failure.is_some());
        assert!(result.raw_translation.is_none());
        assert!(result.postprocessed.is_none());
    }

    #[test]
    fn subprocess_protocol() {
        let adapter = SubprocessAdapter::new("cat -");
        // `cat -` ignores the direction argument? No: it would try to read
        // a file named j2p. Use a shell echo instead.
        let _ = adapter;
        let adapter = SubprocessAdapter {
            program: "sh".into(),
            args: vec!["-c".into(), "cat".into(), "sh".into()],
            timeout: Duration::from_secs(5),
        };
        let out = adapter.translate("x = 1\n", Direction::J2p).unwrap();
        assert_eq!(out, "x = 1\n");
    }

    #[test]
    fn subprocess_timeout() {
        let adapter = SubprocessAdapter {
            program: "sh".into(),
            args: vec!["-c".into(), "sleep 5".into()],
            timeout: Duration::from_millis(100),
        };
        let err = adapter.translate("x", Direction::J2p).unwrap_err();
        assert!(matches!(err, Error::Translator(_)));
        assert!(err.to_string().contains("timeout"));
    }

    #[test]
    fn http_adapter_round_trip() {
        use std::io::{BufRead, BufReader, Read, Write};
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            assert!(line.starts_with("POST"));
            let mut content_length = 0usize;
            let mut direction = String::new();
            loop {
                let mut header = String::new();
                reader.read_line(&mut header).unwrap();
                let header = header.trim().to_string();
                if header.is_empty() {
                    break;
                }
                let lower = header.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    content_length = v.trim().parse().unwrap();
                }
                if let Some(v) = lower.strip_prefix("x-direction:") {
                    direction = v.trim().to_string();
                }
            }
            let mut body = vec![0u8; content_length];
            reader.read_exact(&mut body).unwrap();
            assert_eq!(direction, "j2p");
            let reply = format!("translated: {}", String::from_utf8_lossy(&body));
            let response = format!(
                "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                reply.len(),
                reply
            );
            stream.write_all(response.as_bytes()).unwrap();
        });
        let adapter = HttpAdapter::new(format!("http://{addr}/translate"));
        let out = adapter.translate("int x ;", Direction::J2p).unwrap();
        assert_eq!(out, "translated: int x ;");
        server.join().unwrap();
    }

    #[test]
    fn http_error_status_is_failure() {
        use std::io::Write;
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let response = "HTTP/1.1 500 Internal Server Error\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";
            stream.write_all(response.as_bytes()).unwrap();
        });
        let adapter = HttpAdapter::new(format!("http://{addr}/translate"));
        let err = adapter.translate("x", Direction::J2p).unwrap_err();
        assert!(matches!(err, Error::Translator(_)));
        server.join().unwrap();
    }

    #[test]
    fn mock_is_deterministic() {
        let src = "def f_gold ( x ) :\n\twhile x != 0 :\n\t\tx = x - 1\n\treturn x\n";
        let gold = "static int f_gold ( int x ) { while ( x != 0 ) { x = x - 1 ; } return x ; }";
        let make = || {
            let mut mock = MockTranslator::new(MockProfile::ExtraConstraints, 42);
            mock.insert(Direction::P2j, src, gold);
            mock
        };
        let a = make().translate(src, Direction::P2j).unwrap();
        let b = make().translate(src, Direction::P2j).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mock_fixture_miss() {
        let mock = MockTranslator::new(MockProfile::Perfect, 0);
        let err = mock
            .translate("def unknown ( ) :\n\tpass\n", Direction::P2j)
            .unwrap_err();
        assert!(matches!(err, Error::FixtureMiss(_)));
    }

    #[test]
    fn context_trigger_fires_on_class_wrapper() {
        let with_ctx = "class GFG { static int f_gold ( int n ) { return n ; } }";
        assert!(trigger_context(with_ctx, Language::Java));
        let bare = "static int f_gold ( int n ) { return n ; }";
        assert!(!trigger_context(bare, Language::Java));
    }

    #[test]
    fn collapse_shapes_match_detector() {
        let config = CollapseConfig::default();
        for lang in [Language::Java, Language::Python] {
            let checks = [
                (import_spam(lang), CollapseClass::ImportSpam),
                (number_spam(lang), CollapseClass::NumberSpam),
                (comma_spam(lang), CollapseClass::CommaSpam),
                (spacetoken_spam(lang), CollapseClass::SpacetokenSpam),
            ];
            for (text, class) in checks {
                let verdict = classify(&text, lang, None, &config);
                assert!(
                    verdict.classes.contains(&class),
                    "{lang:?} {class:?}: {text}"
                );
            }
        }
    }

    #[test]
    fn perfect_profile_end_to_end_no_post_mutation() {
        let src = "def f_gold ( a , b ) :\n\tif a > b :\n\t\treturn a\n\treturn b\n";
        let gold = "static int f_gold ( int a , int b ) { if ( a > b ) { return a ; } return b ; }";
        let mut mock = MockTranslator::new(MockProfile::Perfect, 0);
        mock.insert(Direction::P2j, src, gold);
        let config = PipelineConfig::new(Direction::P2j);
        let result = run_pipeline(src, &config, &mock).unwrap();
        assert!(result.verdict.unwrap().clean);
        assert_eq!(result.postprocessed.as_deref(), Some(gold));
        assert!(result.records.iter().all(|r| !r.applied));
    }
}
