//! The four-stage pipeline run: conceptualize (search + reasoner), sketch
//! (solve + compile + emit + verify), color (generator), review (reviewer
//! plus an in-process re-verification). Every stage persists its artifacts
//! under the run directory and appends a ledger entry.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Duration;

use chrono::{SecondsFormat, Utc};

use super::clients::{call_bounded, serialize_facts, ToolClients};
use super::{
    select_backend, Backend, PipelineError, PipelineLedger, ReviewReport, Stage, StageTrace,
};
use crate::canvas::{compile, emit_html_text_layer, emit_svg, CanvasIR};
use crate::digest::sha256_hex;
use crate::layers::Image;
use crate::layout::solve;
use crate::scene::{canonical_serialize, parse_records, validate, SceneRecord};
use crate::verify::{verify_canvas, VerificationReport};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub out_dir: PathBuf,
    /// Per client call; each call gets one retry.
    pub timeout: Duration,
    pub style_prompt: String,
    /// Overrides the record's layout seed when set.
    pub seed: Option<u64>,
}

impl PipelineConfig {
    pub fn new(out_dir: impl Into<PathBuf>) -> PipelineConfig {
        PipelineConfig {
            out_dir: out_dir.into(),
            timeout: Duration::from_secs(60),
            style_prompt: "flat illustration faithful to the sketch geometry".to_string(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub record: SceneRecord,
    pub sketch_ir: CanvasIR,
    pub backends: BTreeSet<Backend>,
    pub image: Image,
    pub verification: VerificationReport,
    pub review: ReviewReport,
    pub ledger: PipelineLedger,
}

impl PipelineResult {
    /// The run is good when both the deterministic verifier and the
    /// reviewer accept the result.
    pub fn accepted(&self) -> bool {
        self.verification.passed() && self.review.passed()
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true)
}

fn fail(stage: Stage, cause: impl ToString) -> PipelineError {
    PipelineError::StageFailure { stage, cause: cause.to_string() }
}

/// Writes artifacts into the run directory and records their digests.
struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    fn write(&self, name: &str, bytes: &[u8]) -> Result<(String, String), PipelineError> {
        std::fs::write(self.dir.join(name), bytes)?;
        Ok((name.to_string(), sha256_hex(bytes)))
    }
}

struct TraceBuilder {
    stage: Stage,
    started_at: String,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    artifacts: Vec<String>,
    tool_calls: Vec<String>,
}

impl TraceBuilder {
    fn start(stage: Stage) -> TraceBuilder {
        TraceBuilder {
            stage,
            started_at: now(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            artifacts: Vec::new(),
            tool_calls: Vec::new(),
        }
    }

    fn input(&mut self, name: &str, digest: String) {
        self.inputs.insert(name.to_string(), digest);
    }

    fn artifact(&mut self, named_digest: (String, String)) {
        self.artifacts.push(named_digest.0.clone());
        self.outputs.insert(named_digest.0, named_digest.1);
    }

    fn call(&mut self, line: String) {
        self.tool_calls.push(line);
    }

    fn finish(self) -> StageTrace {
        StageTrace {
            stage: self.stage,
            input_digests: self.inputs,
            output_digests: self.outputs,
            artifacts: self.artifacts,
            tool_calls: self.tool_calls,
            started_at: self.started_at,
            finished_at: now(),
        }
    }
}

/// Execute all four stages against the given clients. A failed review is a
/// result, not an error; errors mean a stage could not produce its
/// artifacts at all.
pub fn run_pipeline(
    request: &str,
    clients: &ToolClients,
    config: &PipelineConfig,
) -> Result<PipelineResult, PipelineError> {
    std::fs::create_dir_all(&config.out_dir)?;
    let ws = Workspace { dir: config.out_dir.clone() };
    let mut ledger = PipelineLedger::default();
    let request_digest = sha256_hex(request.as_bytes());

    // Conceptualize: retrieve facts, reason them into a validated record.
    let mut trace = TraceBuilder::start(Stage::Conceptualize);
    trace.input("request", request_digest.clone());
    let facts = {
        let client = clients.search.clone();
        let query = request.to_string();
        call_bounded(Stage::Conceptualize, config.timeout, move || client.search(&query))?
    };
    trace.call(format!("search -> {} fact(s)", facts.len()));
    let record_bytes = {
        let client = clients.reasoner.clone();
        let req = request.to_string();
        let facts = facts.clone();
        call_bounded(Stage::Conceptualize, config.timeout, move || {
            client.conceptualize(&req, &facts)
        })?
    };
    trace.call(format!("reasoner -> {} byte(s)", record_bytes.len()));
    let mut record =
        parse_records(&record_bytes).map_err(|e| fail(Stage::Conceptualize, e))?;
    record.request_digest = request_digest;
    if let Some(seed) = config.seed {
        record.canvas.seed = seed;
    }
    let validation = validate(&record);
    if !validation.is_clean() {
        let issues: Vec<String> = validation.issues.iter().map(|i| i.to_string()).collect();
        return Err(fail(Stage::Conceptualize, issues.join("; ")));
    }
    trace.artifact(ws.write("facts.jsonl", &serialize_facts(&facts))?);
    let record_artifact = ws.write("record.scene.jsonl", &canonical_serialize(&record))?;
    let record_digest = record_artifact.1.clone();
    trace.artifact(record_artifact);
    ledger.entries.push(trace.finish());

    // Sketch: lay out, compile, emit, and gate on structural verification.
    let mut trace = TraceBuilder::start(Stage::Sketch);
    trace.input("record.scene.jsonl", record_digest.clone());
    let backends = select_backend(&record);
    let solution = solve(&record).map_err(|e| fail(Stage::Sketch, e))?;
    trace.call(format!("solve -> {} iteration(s)", solution.iterations_used));
    let ir = compile(&record, &solution).map_err(|e| fail(Stage::Sketch, e))?;
    let gate = verify_canvas(&ir, &record);
    if !gate.passed() {
        let broken: Vec<&str> =
            gate.failed_categories().iter().map(|c| c.name()).collect();
        return Err(fail(
            Stage::Sketch,
            format!("compiled sketch fails verification: {}", broken.join(", ")),
        ));
    }
    trace.artifact(ws.write("layout.json", &solution.to_json_bytes())?);
    let svg_bytes = emit_svg(&ir);
    let svg_digest = sha256_hex(&svg_bytes);
    trace.artifact(ws.write("sketch.svg", &svg_bytes)?);
    let text_bytes = if backends.contains(&Backend::HtmlText) && !record.texts.is_empty() {
        let bytes = emit_html_text_layer(&record).map_err(|e| fail(Stage::Sketch, e))?;
        trace.artifact(ws.write("text.html", &bytes)?);
        Some(bytes)
    } else {
        None
    };
    ledger.entries.push(trace.finish());

    // Color: hand the sketch artifacts to the image generator.
    let mut trace = TraceBuilder::start(Stage::Color);
    trace.input("sketch.svg", svg_digest);
    if let Some(bytes) = &text_bytes {
        trace.input("text.html", sha256_hex(bytes));
    }
    let image = {
        let client = clients.generator.clone();
        let svg = svg_bytes.clone();
        let text = text_bytes.clone();
        let prompt = config.style_prompt.clone();
        call_bounded(Stage::Color, config.timeout, move || {
            client.generate(&svg, text.as_deref(), &prompt)
        })?
    };
    trace.call(format!("generator -> {}x{} image", image.width, image.height));
    let png = image.encode_png().map_err(|e| fail(Stage::Color, e))?;
    let png_artifact = ws.write("generated.png", &png)?;
    let png_digest = png_artifact.1.clone();
    trace.artifact(png_artifact);
    ledger.entries.push(trace.finish());

    // Review: reviewer verdict plus an in-process re-verification, so the
    // deterministic half never depends on a mock.
    let mut trace = TraceBuilder::start(Stage::Review);
    trace.input("generated.png", png_digest);
    trace.input("record.scene.jsonl", record_digest);
    let review = {
        let client = clients.reviewer.clone();
        let img = image.clone();
        let rec = record.clone();
        call_bounded(Stage::Review, config.timeout, move || client.review(&img, &rec))?
    };
    trace.call(format!(
        "reviewer -> {} ({} finding(s))",
        if review.passed() { "pass" } else { "fail" },
        review.findings.len()
    ));
    let verification = verify_canvas(&ir, &record);
    trace.artifact(ws.write("verify.report.json", &verification.to_json_bytes())?);
    trace.artifact(ws.write("review.json", &super::serialize_review(&review))?);
    ledger.entries.push(trace.finish());

    std::fs::write(ws.dir.join("ledger.jsonl"), ledger.to_jsonl_bytes())?;
    Ok(PipelineResult { record, sketch_ir: ir, backends, image, verification, review, ledger })
}
