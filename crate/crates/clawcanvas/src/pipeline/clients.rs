//! Tool client interfaces and the fixture-backed mocks that let the whole
//! pipeline run offline. A mock reads canned responses from a case
//! directory: `facts.jsonl`, `record.scene.jsonl`, `generated.png`,
//! `review.json`. A missing file is a client failure.

use std::path::PathBuf;
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Duration;

use serde_json::Value;
use thiserror::Error;

use super::{parse_review, PipelineError, ReviewReport, Stage};
use crate::layers::Image;
use crate::scene::{KnowledgeFact, SceneRecord};

#[derive(Debug, Error, Clone)]
pub enum ClientError {
    #[error("fixture `{0}` missing")]
    Missing(String),
    #[error("{0}")]
    Malformed(String),
}

pub trait SearchClient: Send + Sync {
    fn search(&self, query: &str) -> Result<Vec<KnowledgeFact>, ClientError>;
}

pub trait ReasonerClient: Send + Sync {
    /// Returns serialized scene-record bytes for the request.
    fn conceptualize(
        &self,
        request: &str,
        facts: &[KnowledgeFact],
    ) -> Result<Vec<u8>, ClientError>;
}

pub trait GeneratorClient: Send + Sync {
    fn generate(
        &self,
        sketch_svg: &[u8],
        text_layer: Option<&[u8]>,
        style_prompt: &str,
    ) -> Result<Image, ClientError>;
}

pub trait ReviewerClient: Send + Sync {
    fn review(&self, image: &Image, record: &SceneRecord) -> Result<ReviewReport, ClientError>;
}

#[derive(Clone)]
pub struct ToolClients {
    pub search: Arc<dyn SearchClient>,
    pub reasoner: Arc<dyn ReasonerClient>,
    pub generator: Arc<dyn GeneratorClient>,
    pub reviewer: Arc<dyn ReviewerClient>,
}

impl ToolClients {
    /// Wire all four roles to one fixture directory.
    pub fn mock(fixture_dir: impl Into<PathBuf>) -> ToolClients {
        let mock = Arc::new(MockClients::new(fixture_dir));
        ToolClients {
            search: mock.clone(),
            reasoner: mock.clone(),
            generator: mock.clone(),
            reviewer: mock,
        }
    }
}

/// Run a client call on a worker thread, bounded by `timeout`, with one
/// retry on either failure or timeout. A timed-out worker is abandoned.
pub(super) fn call_bounded<T: Send + 'static>(
    stage: Stage,
    timeout: Duration,
    f: impl Fn() -> Result<T, ClientError> + Send + Clone + 'static,
) -> Result<T, PipelineError> {
    let mut last: Option<PipelineError> = None;
    for _ in 0..2 {
        let (tx, rx) = mpsc::channel();
        let call = f.clone();
        std::thread::spawn(move || {
            let _ = tx.send(call());
        });
        match rx.recv_timeout(timeout) {
            Ok(Ok(value)) => return Ok(value),
            Ok(Err(e)) => last = Some(PipelineError::StageFailure { stage, cause: e.to_string() }),
            Err(_) => last = Some(PipelineError::ClientTimeout(stage)),
        }
    }
    Err(last.expect("two attempts always set an error"))
}

/// Fixture-backed implementation of all four clients.
pub struct MockClients {
    dir: PathBuf,
}

impl MockClients {
    pub fn new(dir: impl Into<PathBuf>) -> MockClients {
        MockClients { dir: dir.into() }
    }

    fn read(&self, name: &str) -> Result<Vec<u8>, ClientError> {
        std::fs::read(self.dir.join(name)).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                ClientError::Missing(name.to_string())
            } else {
                ClientError::Malformed(format!("{name}: {e}"))
            }
        })
    }
}

/// One fact per line: `{"claim":..,"retrieved_at":..,"source_uri":..}`;
/// a `kind` field, if present, must be `fact`.
pub(super) fn parse_facts(bytes: &[u8], origin: &str) -> Result<Vec<KnowledgeFact>, ClientError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| ClientError::Malformed(format!("{origin}: {e}")))?;
    let mut facts = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| ClientError::Malformed(format!("{origin}:{}: {reason}", idx + 1));
        let value: Value = serde_json::from_str(line).map_err(|e| bad(&e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| bad("not an object"))?;
        if let Some(kind) = obj.get("kind") {
            if kind.as_str() != Some("fact") {
                return Err(bad("kind must be `fact`"));
            }
        }
        let field = |name: &str| {
            obj.get(name)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("missing `{name}`")))
        };
        facts.push(KnowledgeFact {
            claim: field("claim")?,
            source_uri: field("source_uri")?,
            retrieved_at: field("retrieved_at")?,
            extra: Default::default(),
        });
    }
    Ok(facts)
}

pub(super) fn serialize_facts(facts: &[KnowledgeFact]) -> Vec<u8> {
    let mut out = Vec::new();
    for fact in facts {
        let line = serde_json::json!({
            "claim": fact.claim,
            "kind": "fact",
            "retrieved_at": fact.retrieved_at,
            "source_uri": fact.source_uri,
        });
        out.extend_from_slice(line.to_string().as_bytes());
        out.push(b'\n');
    }
    out
}

impl SearchClient for MockClients {
    fn search(&self, _query: &str) -> Result<Vec<KnowledgeFact>, ClientError> {
        parse_facts(&self.read("facts.jsonl")?, "facts.jsonl")
    }
}

impl ReasonerClient for MockClients {
    fn conceptualize(
        &self,
        _request: &str,
        _facts: &[KnowledgeFact],
    ) -> Result<Vec<u8>, ClientError> {
        self.read("record.scene.jsonl")
    }
}

impl GeneratorClient for MockClients {
    fn generate(
        &self,
        _sketch_svg: &[u8],
        _text_layer: Option<&[u8]>,
        _style_prompt: &str,
    ) -> Result<Image, ClientError> {
        let bytes = self.read("generated.png")?;
        Image::decode(&bytes).map_err(|e| ClientError::Malformed(format!("generated.png: {e}")))
    }
}

impl ReviewerClient for MockClients {
    fn review(&self, _image: &Image, _record: &SceneRecord) -> Result<ReviewReport, ClientError> {
        parse_review(&self.read("review.json")?)
            .map_err(|e| ClientError::Malformed(format!("review.json: {e}")))
    }
}

/// Directory holding mock fixture cases, from `CLAWCANVAS_FIXTURES`.
pub fn fixtures_root_from_env() -> Option<PathBuf> {
    std::env::var_os("CLAWCANVAS_FIXTURES").map(PathBuf::from)
}
