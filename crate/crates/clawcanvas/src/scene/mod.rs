//! Structured scene records (`*.scene.jsonl`).
//!
//! A record is the machine-readable contract between the reasoning client and
//! the canvas toolchain: which objects appear (and how many), which text must
//! render, which spatial relations must hold, and which knowledge facts back
//! those decisions. The format is line-delimited JSON so a cognitive layer can
//! stream-append lines; parsing canonicalizes order so that any two records
//! with the same content serialize to identical bytes.

mod canonical;
mod parse;
mod validate;

pub use canonical::canonical_serialize;
pub use parse::{parse_records, ParseError};
pub use validate::{validate, Axis, ValidationIssue, ValidationReport};

use std::collections::BTreeMap;

use serde_json::Value;

use crate::color::Color;

/// Extra JSON fields found on a line, preserved verbatim through
/// canonicalization so richer upstream layers can round-trip their data.
pub type ExtraFields = BTreeMap<String, Value>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneRecord {
    pub canvas: CanvasConfig,
    pub objects: Vec<ObjectSpec>,
    pub texts: Vec<TextSpec>,
    pub relations: Vec<RelationConstraint>,
    pub facts: Vec<KnowledgeFact>,
    /// Hex content digest of the originating user request ("" when unknown).
    pub request_digest: String,
}

impl SceneRecord {
    /// Canonical JSONL bytes; see [`canonical_serialize`].
    pub fn canonical_bytes(&self) -> Vec<u8> {
        canonical_serialize(self)
    }

    /// Total object instances after count expansion.
    pub fn total_instances(&self) -> u32 {
        self.objects.iter().map(|o| o.count).sum()
    }

    /// Expected node tally per class label (labels may repeat across specs).
    pub fn label_counts(&self) -> BTreeMap<&str, u32> {
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for obj in &self.objects {
            *counts.entry(obj.class_label.as_str()).or_insert(0) += obj.count;
        }
        counts
    }

    pub fn object(&self, id: &str) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| o.id == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanvasConfig {
    pub width: u32,
    pub height: u32,
    pub seed: u64,
    pub background: Option<Color>,
    pub extra: ExtraFields,
}

impl Default for CanvasConfig {
    fn default() -> Self {
        Self {
            width: 1024,
            height: 1024,
            seed: 0,
            background: None,
            extra: ExtraFields::new(),
        }
    }
}

impl CanvasConfig {
    pub fn min_dim(&self) -> f64 {
        f64::from(self.width.min(self.height))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    /// Bounding-box edge as a fraction of min(canvas width, height).
    pub fn edge_ratio(&self) -> f64 {
        match self {
            SizeClass::Small => 0.08,
            SizeClass::Medium => 0.14,
            SizeClass::Large => 0.22,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "small" => Some(SizeClass::Small),
            "medium" => Some(SizeClass::Medium),
            "large" => Some(SizeClass::Large),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ShapeHint {
    Rect,
    Ellipse,
    Polygon,
}

impl ShapeHint {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeHint::Rect => "rect",
            ShapeHint::Ellipse => "ellipse",
            ShapeHint::Polygon => "polygon",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "rect" => Some(ShapeHint::Rect),
            "ellipse" => Some(ShapeHint::Ellipse),
            "polygon" => Some(ShapeHint::Polygon),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSpec {
    pub id: String,
    pub class_label: String,
    pub count: u32,
    pub color: Option<Color>,
    pub size_class: Option<SizeClass>,
    pub shape_hint: Option<ShapeHint>,
    /// Normalized center pin in [0,1]^2; only allowed when count == 1.
    pub explicit_position: Option<(f64, f64)>,
    pub extra: ExtraFields,
}

impl ObjectSpec {
    pub fn effective_size(&self) -> SizeClass {
        self.size_class.unwrap_or(SizeClass::Medium)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TextSizeClass {
    Title,
    Subtitle,
    Body,
    Caption,
}

impl TextSizeClass {
    /// Fixed pixel font size for deterministic text layers.
    pub fn font_px(&self) -> u32 {
        match self {
            TextSizeClass::Title => 64,
            TextSizeClass::Subtitle => 40,
            TextSizeClass::Body => 24,
            TextSizeClass::Caption => 16,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TextSizeClass::Title => "title",
            TextSizeClass::Subtitle => "subtitle",
            TextSizeClass::Body => "body",
            TextSizeClass::Caption => "caption",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "title" => Some(TextSizeClass::Title),
            "subtitle" => Some(TextSizeClass::Subtitle),
            "body" => Some(TextSizeClass::Body),
            "caption" => Some(TextSizeClass::Caption),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Alignment {
    Left,
    Center,
    Right,
}

impl Alignment {
    pub fn name(&self) -> &'static str {
        match self {
            Alignment::Left => "left",
            Alignment::Center => "center",
            Alignment::Right => "right",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "left" => Some(Alignment::Left),
            "center" => Some(Alignment::Center),
            "right" => Some(Alignment::Right),
            _ => None,
        }
    }
}

/// Normalized rectangle in the unit square: (x, y, w, h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextSpec {
    pub id: String,
    pub content: String,
    pub size_class: TextSizeClass,
    pub alignment: Alignment,
    pub region: UnitRect,
    /// Hierarchy depth; 0 = top level.
    pub level: u32,
    pub extra: ExtraFields,
}

/// Canonical relation kinds. `right_of` and `below` are accepted on the wire
/// but normalized to mirrored `left_of`/`above` at parse time, which halves
/// the solver's case analysis without changing the satisfying-placement set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    LeftOf,
    Above,
    Occludes,
    Inside,
    Near,
}

impl RelationKind {
    pub fn name(&self) -> &'static str {
        match self {
            RelationKind::LeftOf => "left_of",
            RelationKind::Above => "above",
            RelationKind::Occludes => "occludes",
            RelationKind::Inside => "inside",
            RelationKind::Near => "near",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationConstraint {
    pub kind: RelationKind,
    pub subject: String,
    pub object: String,
    pub extra: ExtraFields,
}

impl RelationConstraint {
    /// Key used for canonical ordering and diagnostics, e.g. `left_of(a,b)`.
    pub fn describe(&self) -> String {
        format!("{}({},{})", self.kind.name(), self.subject, self.object)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeFact {
    pub claim: String,
    pub source_uri: String,
    /// RFC 3339 UTC timestamp text ("" when unknown).
    pub retrieved_at: String,
    pub extra: ExtraFields,
}
