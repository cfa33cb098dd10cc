//! Structural verification of a canvas against its record, plus canvas
//! diffing. This is the deterministic half of review: everything here is
//! checkable from the IR alone, no rendered pixels involved.

use std::collections::{BTreeMap, BTreeSet};

use crate::canvas::{CanvasIR, CanvasNode, NodeKind};
use crate::scene::{ObjectSpec, RelationKind, SceneRecord};

/// Boundary tolerance in pixels; covers the 2-decimal serialization round
/// trip of emitted SVG.
const EPS: f64 = 1.0;
/// Slack on size-class area comparisons.
const SIZE_SLACK: f64 = 0.10;
/// Minimum occlusion overlap as a fraction of the occluder area.
const MIN_OCCLUSION_OVERLAP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    Count,
    Color,
    Position,
    Size,
    MultiCount,
    Text,
    ZOrder,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Count,
        Category::Color,
        Category::Position,
        Category::Size,
        Category::MultiCount,
        Category::Text,
        Category::ZOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Count => "count",
            Category::Color => "color",
            Category::Position => "position",
            Category::Size => "size",
            Category::MultiCount => "multi_count",
            Category::Text => "text",
            Category::ZOrder => "z_order",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub category: Category,
    pub passed: bool,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// One entry per category, in [`Category::ALL`] order.
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, category: Category) -> &Check {
        self.checks.iter().find(|c| c.category == category).unwrap()
    }

    pub fn failed_categories(&self) -> Vec<Category> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.category).collect()
    }

    /// `*.report.json`: alphabetical keys, stable check order.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let checks: Vec<serde_json::Value> = self
            .checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "category": c.category.name(),
                    "diagnostic": c.diagnostic,
                    "status": if c.passed { "pass" } else { "fail" },
                })
            })
            .collect();
        let doc = serde_json::json!({
            "checks": checks,
            "overall": if self.passed() { "pass" } else { "fail" },
        });
        let mut bytes = doc.to_string().into_bytes();
        bytes.push(b'\n');
        bytes
    }

    /// Human-readable table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<12} {:<6} diagnostic\n", "category", "status");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<12} {:<6} {}\n",
                c.category.name(),
                if c.passed { "pass" } else { "FAIL" },
                c.diagnostic
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed() { "pass" } else { "FAIL" }
        ));
        out
    }
}

/// Check a canvas against its record across the seven structural categories.
/// Labels the record does not mention (e.g. annotation twins) are ignored.
pub fn verify_canvas(ir: &CanvasIR, record: &SceneRecord) -> VerificationReport {
    let nodes = ir.flat_nodes();
    let checks = Category::ALL
        .iter()
        .map(|&category| {
            let (passed, diagnostic) = match category {
                Category::Count => check_count(&nodes, record),
                Category::Color => check_color(&nodes, record),
                Category::Position => check_position(&nodes, record),
                Category::Size => check_size(&nodes, record),
                Category::MultiCount => check_multi_count(&nodes, record),
                Category::Text => check_text(&nodes, record),
                Category::ZOrder => check_z_order(&nodes, record),
            };
            Check { category, passed, diagnostic }
        })
        .collect();
    VerificationReport { checks }
}

fn spec_of_node<'a>(record: &'a SceneRecord, node: &CanvasNode) -> Option<&'a ObjectSpec> {
    let label = node.label.as_deref()?;
    let spec_id = node.id.split_once('#').map_or(node.id.as_str(), |(id, _)| id);
    record
        .object(spec_id)
        .filter(|o| o.class_label == label)
        .or_else(|| record.objects.iter().find(|o| o.class_label == label))
}

fn nodes_of<'a>(nodes: &[&'a CanvasNode], spec_id: &str) -> Vec<&'a CanvasNode> {
    let prefix = format!("{spec_id}#");
    nodes
        .iter()
        .filter(|n| n.id == spec_id || n.id.starts_with(&prefix))
        .copied()
        .collect()
}

fn tally<'a>(nodes: &[&'a CanvasNode]) -> BTreeMap<&'a str, u32> {
    let mut found: BTreeMap<&str, u32> = BTreeMap::new();
    for node in nodes {
        if let Some(label) = node.label.as_deref() {
            *found.entry(label).or_insert(0) += 1;
        }
    }
    found
}

fn count_mismatches(nodes: &[&CanvasNode], record: &SceneRecord) -> Vec<String> {
    let found = tally(nodes);
    record
        .label_counts()
        .into_iter()
        .filter_map(|(label, expected)| {
            let got = found.get(label).copied().unwrap_or(0);
            (got != expected).then(|| format!("{label}: expected {expected}, found {got}"))
        })
        .collect()
}

fn check_count(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    let mismatches = count_mismatches(nodes, record);
    if mismatches.is_empty() {
        (true, format!("{} label(s) at spec counts", record.label_counts().len()))
    } else {
        (false, mismatches.join("; "))
    }
}

fn check_multi_count(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    if record.label_counts().len() < 2 {
        return (true, "fewer than two labels; nothing to cross-check".to_string());
    }
    let mismatches = count_mismatches(nodes, record);
    if mismatches.is_empty() {
        (true, "joint tally across labels matches".to_string())
    } else {
        (false, format!("joint tally broken: {}", mismatches.join("; ")))
    }
}

fn check_color(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    let mut offenders = Vec::new();
    for node in nodes {
        if node.label.is_none() {
            continue;
        }
        let Some(spec) = spec_of_node(record, node) else { continue };
        if let Some(expected) = spec.color {
            if node.color != Some(expected) {
                offenders.push(format!(
                    "{}: expected {}, found {}",
                    node.id,
                    expected.name(),
                    node.color.map(|c| c.name()).unwrap_or("none")
                ));
            }
        }
    }
    if offenders.is_empty() {
        (true, "all declared colors match".to_string())
    } else {
        (false, offenders.join("; "))
    }
}

fn check_position(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    let near_limit = 0.25 * record.canvas.min_dim();
    let mut offenders = Vec::new();
    for rel in &record.relations {
        let subjects = nodes_of(nodes, &rel.subject);
        let objects = nodes_of(nodes, &rel.object);
        for a in &subjects {
            for b in &objects {
                let (Some(ba), Some(bb)) = (a.bbox(), b.bbox()) else { continue };
                let ok = match rel.kind {
                    RelationKind::LeftOf => {
                        ba.center().x < bb.center().x + EPS && ba.max_x() < bb.min_x() + EPS
                    }
                    RelationKind::Above => {
                        ba.center().y < bb.center().y + EPS && ba.max_y() < bb.min_y() + EPS
                    }
                    RelationKind::Inside => {
                        ba.min_x() > bb.min_x() - EPS
                            && ba.max_x() < bb.max_x() + EPS
                            && ba.min_y() > bb.min_y() - EPS
                            && ba.max_y() < bb.max_y() + EPS
                    }
                    RelationKind::Near => ba.center().distance(&bb.center()) <= near_limit + EPS,
                    // The z half of occlusion is the z_order category's job.
                    RelationKind::Occludes => {
                        ba.intersection_area(&bb)
                            >= MIN_OCCLUSION_OVERLAP * ba.area() - EPS * (ba.w + ba.h)
                    }
                };
                if !ok {
                    offenders.push(format!("{} ({} vs {})", rel.describe(), a.id, b.id));
                }
            }
        }
    }
    if offenders.is_empty() {
        (true, format!("{} relation(s) hold", record.relations.len()))
    } else {
        (false, offenders.join("; "))
    }
}

fn check_size(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    let min_dim = record.canvas.min_dim();
    let mut offenders = Vec::new();
    for node in nodes {
        if node.label.is_none() {
            continue;
        }
        let Some(spec) = spec_of_node(record, node) else { continue };
        let Some(bbox) = node.bbox() else { continue };
        let edge = spec.effective_size().edge_ratio() * min_dim;
        let expected = edge * edge;
        if (bbox.area() - expected).abs() > SIZE_SLACK * expected {
            offenders.push(format!(
                "{}: area {:.0} outside {:.0} +/- 10 %",
                node.id,
                bbox.area(),
                expected
            ));
        }
    }
    if offenders.is_empty() {
        (true, "all node areas match their size classes".to_string())
    } else {
        (false, offenders.join("; "))
    }
}

fn check_text(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    let mut offenders = Vec::new();
    for spec in &record.texts {
        let found = nodes.iter().find(|n| n.id == spec.id);
        match found.and_then(|n| n.text_content()) {
            Some(content) if content == spec.content => {}
            Some(_) => offenders.push(format!("{}: content differs", spec.id)),
            None => offenders.push(format!("{}: text node missing", spec.id)),
        }
    }
    if offenders.is_empty() {
        (true, format!("{} text(s) verbatim", record.texts.len()))
    } else {
        (false, offenders.join("; "))
    }
}

fn check_z_order(nodes: &[&CanvasNode], record: &SceneRecord) -> (bool, String) {
    let mut offenders = Vec::new();
    for rel in &record.relations {
        if rel.kind != RelationKind::Occludes {
            continue;
        }
        for a in nodes_of(nodes, &rel.subject) {
            for b in nodes_of(nodes, &rel.object) {
                if a.z <= b.z {
                    offenders.push(format!(
                        "{}: z {} !> {} ({} vs {})",
                        rel.describe(),
                        a.z,
                        b.z,
                        a.id,
                        b.id
                    ));
                }
            }
        }
    }
    if offenders.is_empty() {
        (true, "paint order respects occlusion".to_string())
    } else {
        (false, offenders.join("; "))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeDiff {
    pub added: Vec<String>,
    pub removed: Vec<String>,
    /// Center (or text anchor) displaced by more than one pixel.
    pub moved: Vec<String>,
    pub recolored: Vec<String>,
    pub retexted: Vec<String>,
}

impl NodeDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
            && self.removed.is_empty()
            && self.moved.is_empty()
            && self.recolored.is_empty()
            && self.retexted.is_empty()
    }
}

/// Structural diff of two canvases keyed by node id.
pub fn diff_canvases(a: &CanvasIR, b: &CanvasIR) -> NodeDiff {
    fn by_id<'x>(ir: &'x CanvasIR) -> BTreeMap<&'x str, &'x CanvasNode> {
        let mut map = BTreeMap::new();
        for node in ir.flat_nodes() {
            map.entry(node.id.as_str()).or_insert(node);
        }
        map
    }
    fn position(node: &CanvasNode) -> Option<crate::geom::Point> {
        match &node.kind {
            NodeKind::Text { anchor, .. } => Some(*anchor),
            _ => node.bbox().map(|b| b.center()),
        }
    }

    let left = by_id(a);
    let right = by_id(b);
    let ids: BTreeSet<&str> = left.keys().chain(right.keys()).copied().collect();

    let mut diff = NodeDiff::default();
    for id in ids {
        match (left.get(id), right.get(id)) {
            (None, Some(_)) => diff.added.push(id.to_string()),
            (Some(_), None) => diff.removed.push(id.to_string()),
            (Some(x), Some(y)) => {
                if let (Some(px), Some(py)) = (position(x), position(y)) {
                    if px.distance(&py) > 1.0 {
                        diff.moved.push(id.to_string());
                    }
                }
                if x.color != y.color {
                    diff.recolored.push(id.to_string());
                }
                if x.text_content() != y.text_content() {
                    diff.retexted.push(id.to_string());
                }
            }
            (None, None) => unreachable!(),
        }
    }
    diff
}
