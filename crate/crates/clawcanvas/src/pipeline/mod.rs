//! The conceptualize → sketch → color → review orchestrator over pluggable
//! tool clients, with a provenance ledger and stage-level failure
//! attribution. Everything here runs offline against fixture-backed mocks;
//! real clients are an extension point behind the same traits.

mod clients;
mod run;

pub use clients::{
    fixtures_root_from_env, ClientError, GeneratorClient, MockClients, ReasonerClient,
    ReviewerClient, SearchClient, ToolClients,
};
pub use run::{run_pipeline, PipelineConfig, PipelineResult};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde_json::Value;
use thiserror::Error;

use crate::canvas::CanvasIR;
use crate::scene::SceneRecord;
use crate::verify::verify_canvas;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Conceptualize,
    Sketch,
    Color,
    Review,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Conceptualize, Stage::Sketch, Stage::Color, Stage::Review];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Conceptualize => "conceptualize",
            Stage::Sketch => "sketch",
            Stage::Color => "color",
            Stage::Review => "review",
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage {stage}: {cause}", stage = .stage.name())]
    StageFailure { stage: Stage, cause: String },
    #[error("stage {stage}: client call timed out twice", stage = .0.name())]
    ClientTimeout(Stage),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Backend selection

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Backend {
    SvgComposition,
    HtmlText,
    Physics,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::SvgComposition => "svg_composition",
            Backend::HtmlText => "html_text",
            Backend::Physics => "physics",
        }
    }
}

/// Pick rendering backends for a validated record. Text-heavy records (more
/// than 120 characters in total or at least three text specs) get the HTML
/// text layer; any object gets SVG composition; a `physics` entry in the
/// config line requests the physics annotator. At least one backend is
/// always selected.
pub fn select_backend(record: &SceneRecord) -> BTreeSet<Backend> {
    let mut set = BTreeSet::new();
    let total_chars: usize = record.texts.iter().map(|t| t.content.chars().count()).sum();
    if total_chars > 120 || record.texts.len() >= 3 {
        set.insert(Backend::HtmlText);
    }
    if !record.objects.is_empty() {
        set.insert(Backend::SvgComposition);
    }
    if record.canvas.extra.contains_key("physics") {
        set.insert(Backend::Physics);
    }
    if set.is_empty() {
        set.insert(if record.texts.is_empty() {
            Backend::SvgComposition
        } else {
            Backend::HtmlText
        });
    }
    set
}

// ---------------------------------------------------------------------------
// Review reports

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingCategory {
    Factual,
    Structural,
    Visual,
}

impl FindingCategory {
    pub fn name(self) -> &'static str {
        match self {
            FindingCategory::Factual => "factual",
            FindingCategory::Structural => "structural",
            FindingCategory::Visual => "visual",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub category: FindingCategory,
    pub detail: String,
    /// Referenced ids: fact claims, node ids, or text ids.
    pub refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReviewReport {
    pub verdict: Verdict,
    pub findings: Vec<Finding>,
}

impl ReviewReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Error)]
#[error("malformed review report: {0}")]
pub struct ReviewParseError(String);

pub fn parse_review(bytes: &[u8]) -> Result<ReviewReport, ReviewParseError> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| ReviewParseError(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| ReviewParseError("not an object".into()))?;
    let verdict = match obj.get("verdict").and_then(Value::as_str) {
        Some("pass") => Verdict::Pass,
        Some("fail") => Verdict::Fail,
        _ => return Err(ReviewParseError("verdict must be pass or fail".into())),
    };
    let mut findings = Vec::new();
    for f in obj.get("findings").and_then(Value::as_array).into_iter().flatten() {
        let fo = f.as_object().ok_or_else(|| ReviewParseError("finding not an object".into()))?;
        let category = match fo.get("category").and_then(Value::as_str) {
            Some("factual") => FindingCategory::Factual,
            Some("structural") => FindingCategory::Structural,
            Some("visual") => FindingCategory::Visual,
            _ => return Err(ReviewParseError("unknown finding category".into())),
        };
        let detail = fo
            .get("detail")
            .and_then(Value::as_str)
            .ok_or_else(|| ReviewParseError("finding needs a detail string".into()))?
            .to_string();
        let refs = fo
            .get("refs")
            .and_then(Value::as_array)
            .map(|a| {
                a.iter()
                    .map(|v| {
                        v.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| ReviewParseError("refs must be strings".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?
            .unwrap_or_default();
        findings.push(Finding { category, detail, refs });
    }
    if verdict == Verdict::Fail && findings.is_empty() {
        return Err(ReviewParseError("failed review must carry a finding".into()));
    }
    Ok(ReviewReport { verdict, findings })
}

pub fn serialize_review(report: &ReviewReport) -> Vec<u8> {
    let findings: Vec<Value> = report
        .findings
        .iter()
        .map(|f| {
            serde_json::json!({
                "category": f.category.name(),
                "detail": f.detail,
                "refs": f.refs,
            })
        })
        .collect();
    let doc = serde_json::json!({
        "findings": findings,
        "verdict": if report.passed() { "pass" } else { "fail" },
    });
    let mut bytes = doc.to_string().into_bytes();
    bytes.push(b'\n');
    bytes
}

// ---------------------------------------------------------------------------
// Ledger

#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub stage: Stage,
    pub input_digests: BTreeMap<String, String>,
    pub output_digests: BTreeMap<String, String>,
    /// Paths relative to the run directory.
    pub artifacts: Vec<String>,
    pub tool_calls: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineLedger {
    pub entries: Vec<StageTrace>,
}

impl PipelineLedger {
    /// All four stages, in pipeline order.
    pub fn is_complete(&self) -> bool {
        self.entries.len() == Stage::ALL.len()
            && self.entries.iter().zip(Stage::ALL).all(|(e, s)| e.stage == s)
    }

    pub fn entry(&self, stage: Stage) -> Option<&StageTrace> {
        self.entries.iter().find(|e| e.stage == stage)
    }

    /// `ledger.jsonl`: one entry per line, alphabetical keys.
    pub fn to_jsonl_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for entry in &self.entries {
            let line = serde_json::json!({
                "artifacts": entry.artifacts,
                "finished_at": entry.finished_at,
                "input_digests": entry.input_digests,
                "output_digests": entry.output_digests,
                "stage": entry.stage.name(),
                "started_at": entry.started_at,
                "tool_calls": entry.tool_calls,
            });
            out.extend_from_slice(line.to_string().as_bytes());
            out.push(b'\n');
        }
        out
    }

    /// Every ledgered artifact exists under `dir` and hashes to its recorded
    /// digest.
    pub fn artifacts_match(&self, dir: &std::path::Path) -> bool {
        self.entries.iter().all(|entry| {
            entry.artifacts.iter().all(|rel| {
                let recorded = entry.output_digests.get(rel);
                match (recorded, std::fs::read(dir.join(rel))) {
                    (Some(digest), Ok(bytes)) => crate::digest::sha256_hex(&bytes) == *digest,
                    _ => false,
                }
            })
        })
    }
}

// ---------------------------------------------------------------------------
// Failure attribution

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attribution {
    Conceptualize,
    Sketch,
    Color,
    Inconclusive,
}

impl Attribution {
    pub fn name(self) -> &'static str {
        match self {
            Attribution::Conceptualize => "conceptualize",
            Attribution::Sketch => "sketch",
            Attribution::Color => "color",
            Attribution::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("ledger is missing stages; cannot attribute")]
pub struct LedgerIncomplete;

/// Trace a failed review to the stage that caused it.
///
/// Precedence: a factual finding that references a fact absent from the
/// record, or that disputes a recorded fact, points at conceptualize (bad
/// retrieved context). Otherwise a sketch that no longer verifies against
/// the record points at sketch (bad generated structure). Otherwise any
/// structural or visual finding over a clean sketch points at color (bad
/// rendering). Anything else is inconclusive.
pub fn attribute_failure(
    ledger: &PipelineLedger,
    review: &ReviewReport,
    record: &SceneRecord,
    sketch_ir: &CanvasIR,
) -> Result<Attribution, LedgerIncomplete> {
    if !ledger.is_complete() {
        return Err(LedgerIncomplete);
    }
    let claims: BTreeSet<&str> = record.facts.iter().map(|f| f.claim.as_str()).collect();
    for finding in &review.findings {
        if finding.category != FindingCategory::Factual {
            continue;
        }
        let absent = finding.refs.iter().any(|r| !claims.contains(r.as_str()));
        let disputed = !finding.refs.is_empty()
            && finding.detail.to_lowercase().contains("contradict");
        if absent || disputed {
            return Ok(Attribution::Conceptualize);
        }
    }
    if !verify_canvas(sketch_ir, record).passed() {
        return Ok(Attribution::Sketch);
    }
    let rendering_finding = review.findings.iter().any(|f| {
        matches!(f.category, FindingCategory::Structural | FindingCategory::Visual)
    });
    if rendering_finding {
        return Ok(Attribution::Color);
    }
    Ok(Attribution::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canvas::compile;
    use crate::layout::solve;
    use crate::scene::parse_records;

    fn record_with(texts: &[(usize, &str)], objects: usize, physics: bool) -> SceneRecord {
        let mut lines = String::new();
        let physics_field = if physics { ",\"physics\":{\"type\":\"jet\"}" } else { "" };
        lines.push_str(&format!("{{\"kind\":\"config\",\"seed\":1{physics_field}}}\n"));
        for i in 0..objects {
            lines.push_str(&format!("{{\"kind\":\"object\",\"id\":\"o{i}\"}}\n"));
        }
        for (i, (len, _)) in texts.iter().enumerate() {
            let content = "x".repeat(*len);
            lines.push_str(&format!(
                "{{\"kind\":\"text\",\"id\":\"t{i}\",\"content\":\"{content}\",\
                 \"size_class\":\"caption\",\"alignment\":\"left\",\
                 \"region\":[0.1,{},0.5,0.05]}}\n",
                0.1 + 0.1 * i as f64
            ));
        }
        parse_records(lines.as_bytes()).unwrap()
    }

    #[test]
    fn backend_rules() {
        let objects_only = record_with(&[], 5, false);
        assert_eq!(
            select_backend(&objects_only).into_iter().collect::<Vec<_>>(),
            vec![Backend::SvgComposition]
        );

        let menu = record_with(&[(10, ""), (10, ""), (10, ""), (10, ""), (10, ""), (10, "")], 0, false);
        assert_eq!(
            select_backend(&menu).into_iter().collect::<Vec<_>>(),
            vec![Backend::HtmlText]
        );

        let mixed = record_with(&[(200, "")], 2, false);
        assert_eq!(
            select_backend(&mixed).into_iter().collect::<Vec<_>>(),
            vec![Backend::SvgComposition, Backend::HtmlText]
        );

        let jet = record_with(&[], 1, true);
        assert!(select_backend(&jet).contains(&Backend::Physics));

        let single_caption = record_with(&[(12, "")], 0, false);
        assert_eq!(
            select_backend(&single_caption).into_iter().collect::<Vec<_>>(),
            vec![Backend::HtmlText]
        );
    }

    #[test]
    fn review_report_round_trip_and_invariant() {
        let report = ReviewReport {
            verdict: Verdict::Fail,
            findings: vec![Finding {
                category: FindingCategory::Visual,
                detail: "one apple looks like a pear".to_string(),
                refs: vec!["apple#1".to_string()],
            }],
        };
        let bytes = serialize_review(&report);
        assert_eq!(parse_review(&bytes).unwrap(), report);

        let bad = b"{\"findings\":[],\"verdict\":\"fail\"}";
        assert!(parse_review(bad).is_err());
    }

    fn full_ledger() -> PipelineLedger {
        PipelineLedger {
            entries: Stage::ALL
                .iter()
                .map(|&stage| StageTrace {
                    stage,
                    input_digests: BTreeMap::new(),
                    output_digests: BTreeMap::new(),
                    artifacts: Vec::new(),
                    tool_calls: Vec::new(),
                    started_at: "t0".to_string(),
                    finished_at: "t1".to_string(),
                })
                .collect(),
        }
    }

    fn verified_pair() -> (SceneRecord, CanvasIR) {
        let record = parse_records(
            concat!(
                "{\"kind\":\"config\",\"seed\":3}\n",
                "{\"kind\":\"object\",\"id\":\"apple\",\"count\":3}\n",
                "{\"kind\":\"fact\",\"claim\":\"the 2030 hosts include Madrid\",",
                "\"source_uri\":\"https://example.org/hosts\",",
                "\"retrieved_at\":\"2026-01-05T00:00:00Z\"}\n",
            )
            .as_bytes(),
        )
        .unwrap();
        let ir = compile(&record, &solve(&record).unwrap()).unwrap();
        (record, ir)
    }

    fn failing_review(category: FindingCategory, detail: &str, refs: &[&str]) -> ReviewReport {
        ReviewReport {
            verdict: Verdict::Fail,
            findings: vec![Finding {
                category,
                detail: detail.to_string(),
                refs: refs.iter().map(|s| s.to_string()).collect(),
            }],
        }
    }

    #[test]
    fn factual_finding_with_unknown_fact_blames_conceptualize() {
        let (record, ir) = verified_pair();
        let review = failing_review(
            FindingCategory::Factual,
            "the canvas references a host city never retrieved",
            &["the 2030 hosts include Lyon"],
        );
        let got = attribute_failure(&full_ledger(), &review, &record, &ir).unwrap();
        assert_eq!(got, Attribution::Conceptualize);
    }

    #[test]
    fn factual_finding_disputing_a_recorded_fact_blames_conceptualize() {
        let (record, ir) = verified_pair();
        let review = failing_review(
            FindingCategory::Factual,
            "rendered banner contradicts the retrieved host list",
            &["the 2030 hosts include Madrid"],
        );
        let got = attribute_failure(&full_ledger(), &review, &record, &ir).unwrap();
        assert_eq!(got, Attribution::Conceptualize);
    }

    #[test]
    fn broken_sketch_blames_sketch_even_with_visual_findings() {
        let (record, mut ir) = verified_pair();
        ir.nodes.retain(|n| n.id != "apple#2");
        let review = failing_review(FindingCategory::Visual, "only two apples visible", &[]);
        let got = attribute_failure(&full_ledger(), &review, &record, &ir).unwrap();
        assert_eq!(got, Attribution::Sketch);
    }

    #[test]
    fn visual_finding_over_clean_sketch_blames_color() {
        let (record, ir) = verified_pair();
        let review = failing_review(FindingCategory::Visual, "apples rendered as pears", &[]);
        let got = attribute_failure(&full_ledger(), &review, &record, &ir).unwrap();
        assert_eq!(got, Attribution::Color);
    }

    #[test]
    fn unanchored_factual_grumbling_is_inconclusive() {
        let (record, ir) = verified_pair();
        let review = failing_review(FindingCategory::Factual, "something feels off", &[]);
        let got = attribute_failure(&full_ledger(), &review, &record, &ir).unwrap();
        assert_eq!(got, Attribution::Inconclusive);
    }

    #[test]
    fn attribution_requires_a_complete_ledger() {
        let (record, ir) = verified_pair();
        let review = failing_review(FindingCategory::Visual, "x", &[]);
        let mut ledger = full_ledger();
        ledger.entries.pop();
        assert_eq!(
            attribute_failure(&ledger, &review, &record, &ir),
            Err(LedgerIncomplete)
        );
    }

    #[test]
    fn ledger_lines_are_ordered_and_alphabetical() {
        let ledger = full_ledger();
        assert!(ledger.is_complete());
        let text = String::from_utf8(ledger.to_jsonl_bytes()).unwrap();
        let stages: Vec<String> = text
            .lines()
            .map(|l| {
                let v: Value = serde_json::from_str(l).unwrap();
                v["stage"].as_str().unwrap().to_string()
            })
            .collect();
        assert_eq!(stages, ["conceptualize", "sketch", "color", "review"]);
        assert!(text.starts_with("{\"artifacts\":[]"));
    }
}
