//! Deterministic generators and mutation helpers for tests. Everything here
//! is seeded; the same seed always yields the same artifact.
//!
//! `random_record` builds records that are satisfiable by construction:
//! relation chains stay within a fraction of the canvas span, containment
//! and occlusion only link single-instance specs, and nothing links a
//! pinned spec. That keeps the solver honest — if it fails on one of these,
//! the solver is wrong, not the input.

use std::collections::BTreeSet;

use crate::canvas::{CanvasIR, CanvasNode, NodeKind};
use crate::color::{Color, PALETTE};
use crate::geom::{Point, Rect};
use crate::layers::{EditOp, Layer, LayerDoc, Origin, Payload};
use crate::rng::SplitMix64;
use crate::scene::{parse_records, RelationKind, SceneRecord, SizeClass};
use crate::verify::Category;

const LABELS: [&str; 10] =
    ["apple", "bowl", "cup", "lamp", "book", "vase", "chair", "plant", "ball", "box"];

const TEXT_POOL: [&str; 8] = [
    "Fresh Market",
    "two for one",
    "滕王阁序",
    "落霞与孤鹜齐飞, 秋水共长天一色",
    "menu & prices <today>",
    "Aisle 7",
    "春眠不觉晓 处处闻啼鸟",
    "grand opening",
];

fn json_str(s: &str) -> String {
    serde_json::Value::from(s).to_string()
}

/// A random scene record with up to 8 specs, 12 instances, and 6 relations,
/// constructed so a sound solver always finds a placement.
pub fn random_record(seed: u64) -> SceneRecord {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0001);
    let dims = [512u32, 768, 1024];
    let width = dims[rng.below(3) as usize];
    let height = dims[rng.below(3) as usize];
    let min_dim = f64::from(width.min(height));

    let n = 1 + rng.below(8) as usize;
    let mut pool: Vec<&str> = LABELS.to_vec();
    for i in 0..n {
        let j = i + rng.below((pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    let labels: Vec<&str> = pool[..n].to_vec();

    let mut counts = vec![1u32; n];
    let mut budget = 12 - n as u32;
    for count in counts.iter_mut() {
        let extra = rng.below(3).min(u64::from(budget)) as u32;
        *count += extra;
        budget -= extra;
    }

    let mut sizes = Vec::with_capacity(n);
    let mut larges = 0;
    for _ in 0..n {
        let size = match rng.below(4) {
            0 => SizeClass::Small,
            1 | 2 => SizeClass::Medium,
            _ if larges < 2 => {
                larges += 1;
                SizeClass::Large
            }
            _ => SizeClass::Medium,
        };
        sizes.push(size);
    }
    let colors: Vec<Option<Color>> = (0..n)
        .map(|_| (rng.below(3) > 0).then(|| PALETTE[rng.below(10) as usize]))
        .collect();

    // Relations: forward index order only, each pair once; containment,
    // occlusion, and nearness claim both endpoints exclusively; axis chains
    // keep their summed widths under 70 % of the span.
    let mut relations: Vec<(RelationKind, usize, usize)> = Vec::new();
    let mut used_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut rel_count = vec![0u32; n];
    let mut locked = vec![false; n];
    let mut x_members: BTreeSet<usize> = BTreeSet::new();
    let mut y_members: BTreeSet<usize> = BTreeSet::new();
    // Count-weighted: a banded level must fit all of a spec's instances in
    // one row of the cross axis.
    let width_of = |i: usize| f64::from(counts[i]) * sizes[i].edge_ratio() * min_dim;
    let span_budget = 0.7 * 0.92 * min_dim;

    if n >= 2 {
        let wanted = rng.below(7) as usize;
        for _ in 0..(wanted * 3) {
            if relations.len() >= wanted {
                break;
            }
            let i = rng.below(n as u64) as usize;
            let j = rng.below(n as u64) as usize;
            let (i, j) = if i < j { (i, j) } else if j < i { (j, i) } else { continue };
            if used_pairs.contains(&(i, j)) {
                continue;
            }
            let kind = match rng.below(10) {
                0..=2 => RelationKind::LeftOf,
                3..=5 => RelationKind::Above,
                6 | 7 => RelationKind::Near,
                8 => RelationKind::Inside,
                _ => RelationKind::Occludes,
            };
            let exclusive_ok = counts[i] == 1
                && counts[j] == 1
                && rel_count[i] == 0
                && rel_count[j] == 0;
            let accepted = match kind {
                RelationKind::LeftOf | RelationKind::Above => {
                    let members = if kind == RelationKind::LeftOf {
                        &mut x_members
                    } else {
                        &mut y_members
                    };
                    let mut all = members.clone();
                    all.insert(i);
                    all.insert(j);
                    let total: f64 = all.iter().map(|&k| width_of(k)).sum();
                    if total <= span_budget
                        && !locked[i]
                        && !locked[j]
                        && rel_count[i] < 3
                        && rel_count[j] < 3
                    {
                        *members = all;
                        relations.push((kind, i, j));
                        true
                    } else {
                        false
                    }
                }
                RelationKind::Near | RelationKind::Occludes => {
                    if exclusive_ok {
                        relations.push((kind, i, j));
                        locked[i] = true;
                        locked[j] = true;
                        true
                    } else {
                        false
                    }
                }
                RelationKind::Inside => {
                    // Child must be strictly smaller; subject is the child.
                    let (child, parent) = (i, j);
                    if exclusive_ok && sizes[child].edge_ratio() < sizes[parent].edge_ratio() {
                        relations.push((kind, child, parent));
                        locked[i] = true;
                        locked[j] = true;
                        true
                    } else {
                        false
                    }
                }
            };
            if accepted {
                used_pairs.insert((i, j));
                rel_count[i] += 1;
                rel_count[j] += 1;
            }
        }
    }

    // A pinned spec only when it has no relations to fight.
    let pinned = (rng.below(4) == 0)
        .then(|| {
            (0..n).find(|&i| counts[i] == 1 && rel_count[i] == 0)
        })
        .flatten();

    let mut lines = String::new();
    let background = if rng.below(2) == 0 { ",\"background\":\"white\"" } else { "" };
    lines.push_str(&format!(
        "{{\"kind\":\"config\",\"width\":{width},\"height\":{height},\"seed\":{}{background}}}\n",
        rng.below(10_000)
    ));
    for i in 0..n {
        let mut fields = vec![format!("\"id\":{}", json_str(labels[i]))];
        if counts[i] != 1 {
            fields.push(format!("\"count\":{}", counts[i]));
        }
        if let Some(color) = colors[i] {
            fields.push(format!("\"color\":\"{}\"", color.name()));
        }
        fields.push(format!("\"size_class\":\"{}\"", sizes[i].name()));
        if rng.below(3) == 0 {
            fields.push(format!(
                "\"shape_hint\":\"{}\"",
                ["rect", "ellipse", "polygon"][rng.below(3) as usize]
            ));
        }
        if pinned == Some(i) {
            fields.push(format!(
                "\"explicit_position\":[{:.3},{:.3}]",
                rng.range_f64(0.2, 0.8),
                rng.range_f64(0.2, 0.8)
            ));
        }
        lines.push_str(&format!("{{\"kind\":\"object\",{}}}\n", fields.join(",")));
    }
    for (kind, i, j) in &relations {
        lines.push_str(&format!(
            "{{\"kind\":\"relation\",\"rel\":\"{}\",\"subject\":{},\"object\":{}}}\n",
            kind.name(),
            json_str(labels[*i]),
            json_str(labels[*j])
        ));
    }
    let n_texts = rng.below(3);
    for t in 0..n_texts {
        let content = TEXT_POOL[rng.below(TEXT_POOL.len() as u64) as usize];
        lines.push_str(&format!(
            "{{\"kind\":\"text\",\"id\":\"t{t}\",\"content\":{},\"size_class\":\"{}\",\
             \"alignment\":\"{}\",\"level\":{},\"region\":[0.05,{:.2},0.9,0.1]}}\n",
            json_str(content),
            ["title", "subtitle", "body", "caption"][rng.below(4) as usize],
            ["left", "center", "right"][rng.below(3) as usize],
            rng.below(4),
            0.02 + 0.12 * t as f64,
        ));
    }
    if rng.below(3) == 0 {
        lines.push_str(
            "{\"kind\":\"fact\",\"claim\":\"the venue opened in 1972\",\
             \"source_uri\":\"https://example.org/venue\",\
             \"retrieved_at\":\"2026-03-01T00:00:00Z\"}\n",
        );
    }
    parse_records(lines.as_bytes()).expect("generated records always parse")
}

const CJK_POOL: [&str; 4] = [
    "滕王阁序",
    "落霞与孤鹜齐飞, 秋水共长天一色",
    "春眠不觉晓 处处闻啼鸟",
    "夜来风雨声 花落知多少",
];

/// A record whose payload is text: 1-4 specs in stacked non-overlapping
/// regions. The first spec is always CJK; the rest mix CJK, markup
/// characters, and plain Latin.
pub fn random_text_record(seed: u64) -> SceneRecord {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0002);
    let n = 1 + rng.below(4);
    let mut lines = String::from("{\"kind\":\"config\",\"seed\":7}\n");
    for t in 0..n {
        let content = if t == 0 {
            CJK_POOL[rng.below(CJK_POOL.len() as u64) as usize]
        } else {
            TEXT_POOL[rng.below(TEXT_POOL.len() as u64) as usize]
        };
        lines.push_str(&format!(
            "{{\"kind\":\"text\",\"id\":\"t{t}\",\"content\":{},\"size_class\":\"{}\",\
             \"alignment\":\"{}\",\"level\":{},\"region\":[0.05,{:.2},0.9,0.18]}}\n",
            json_str(content),
            ["title", "subtitle", "body", "caption"][rng.below(4) as usize],
            ["left", "center", "right"][rng.below(3) as usize],
            rng.below(4),
            0.02 + 0.24 * t as f64,
        ));
    }
    parse_records(lines.as_bytes()).expect("generated text records always parse")
}

/// A random canvas IR exercising every node kind, escapes, and groups.
pub fn random_ir(seed: u64) -> CanvasIR {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0003);
    let width = 300 + rng.below(900) as u32;
    let height = 200 + rng.below(900) as u32;
    let (w, h) = (f64::from(width), f64::from(height));
    let n = 1 + rng.below(10);
    let mut nodes = Vec::new();
    for i in 0..n {
        let id = format!("n{i}");
        let bw = rng.range_f64(8.0, 80.0);
        let bh = rng.range_f64(8.0, 80.0);
        let bbox = Rect::new(
            rng.range_f64(0.0, w - bw),
            rng.range_f64(0.0, h - bh),
            bw,
            bh,
        );
        let kind = match rng.below(4) {
            0 => NodeKind::Rect { bbox },
            1 => NodeKind::Ellipse { bbox },
            2 => {
                let k = 3 + rng.below(4) as usize;
                let points = (0..k)
                    .map(|_| Point {
                        x: rng.range_f64(0.0, w),
                        y: rng.range_f64(0.0, h),
                    })
                    .collect();
                NodeKind::Polygon { points }
            }
            _ => NodeKind::Text {
                anchor: Point {
                    x: rng.range_f64(10.0, w - 10.0),
                    y: rng.range_f64(10.0, h - 10.0),
                },
                size_class: match rng.below(4) {
                    0 => crate::scene::TextSizeClass::Title,
                    1 => crate::scene::TextSizeClass::Subtitle,
                    2 => crate::scene::TextSizeClass::Body,
                    _ => crate::scene::TextSizeClass::Caption,
                },
                alignment: match rng.below(3) {
                    0 => crate::scene::Alignment::Left,
                    1 => crate::scene::Alignment::Center,
                    _ => crate::scene::Alignment::Right,
                },
                content: TEXT_POOL[rng.below(TEXT_POOL.len() as u64) as usize].to_string(),
            },
        };
        nodes.push(CanvasNode {
            id,
            kind,
            label: (rng.below(2) == 0).then(|| {
                LABELS[rng.below(LABELS.len() as u64) as usize].to_string()
            }),
            color: (rng.below(5) < 3).then(|| PALETTE[rng.below(10) as usize]),
            z: i as i64,
        });
    }
    if nodes.len() >= 3 && rng.below(5) == 0 {
        let b = nodes.pop().unwrap();
        let a = nodes.pop().unwrap();
        let z = a.z.min(b.z);
        nodes.push(CanvasNode {
            id: format!("g{n}"),
            kind: NodeKind::Group { children: vec![a, b] },
            label: None,
            color: None,
            z,
        });
    }
    CanvasIR::new(width, height, nodes)
}

/// A layered document on a 48x48 canvas whose layer footprints never cover
/// the whole canvas, so every edit leaves a checkable unedited region.
pub fn random_layer_doc(seed: u64) -> LayerDoc {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0004);
    let n = 2 + rng.below(4);
    let layers = (0..n)
        .map(|i| {
            let alphas = [255u8, 200, 128, 60];
            let opacities = [1.0, 0.8, 0.5, 0.25];
            Layer {
                id: format!("l{i}"),
                name: format!("layer {i}"),
                z: (i as i64) * 2,
                opacity: opacities[rng.below(4) as usize],
                offset: (2 + rng.below(9) as i64, 2 + rng.below(9) as i64),
                mask: None,
                payload: Payload::Solid {
                    width: 8 + rng.below(17) as u32,
                    height: 8 + rng.below(17) as u32,
                    color: [
                        rng.below(256) as u8,
                        rng.below(256) as u8,
                        rng.below(256) as u8,
                        alphas[rng.below(4) as usize],
                    ],
                },
                origin: Origin::Decomposed,
                tint: (rng.below(4) == 0).then(|| PALETTE[rng.below(10) as usize].rgb()),
            }
        })
        .collect();
    LayerDoc { width: 48, height: 48, layers }
}

/// A random edit applicable to `doc`, bounded so footprints stay clear of
/// the canvas border.
pub fn random_edit(doc: &LayerDoc, seed: u64) -> EditOp {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0005);
    let layer_id = doc.layers[rng.below(doc.layers.len() as u64) as usize].id.clone();
    match rng.below(6) {
        0 => EditOp::Translate {
            layer_id,
            dx: rng.below(9) as i64 - 4,
            dy: rng.below(9) as i64 - 4,
        },
        1 => EditOp::SetOpacity { layer_id, value: rng.below(101) as f64 / 100.0 },
        2 => EditOp::Recolor { layer_id, target: PALETTE[rng.below(10) as usize] },
        3 => EditOp::Delete { layer_id },
        4 => EditOp::Reorder { layer_id, new_z: rng.below(12) as i64 - 2 },
        _ => EditOp::ReplacePayload {
            layer_id,
            payload: Payload::Solid {
                width: 8 + rng.below(17) as u32,
                height: 8 + rng.below(17) as u32,
                color: [
                    rng.below(256) as u8,
                    rng.below(256) as u8,
                    rng.below(256) as u8,
                    255,
                ],
            },
        },
    }
}

// ---------------------------------------------------------------------------
// Mutation suite

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    /// Remove one labeled instance node.
    Delete,
    /// Clone one labeled instance node under a fresh id.
    Duplicate,
    /// Swap the colors of two differently colored nodes.
    SwapColors,
    /// Reflect a directional relation's subject across its object's axis.
    ReflectRelation,
    /// Change one character of a text node.
    AlterChar,
    /// Swap the z values of an occluding pair.
    InvertZ,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::Delete,
        MutationKind::Duplicate,
        MutationKind::SwapColors,
        MutationKind::ReflectRelation,
        MutationKind::AlterChar,
        MutationKind::InvertZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationKind::Delete => "delete",
            MutationKind::Duplicate => "duplicate",
            MutationKind::SwapColors => "swap_colors",
            MutationKind::ReflectRelation => "reflect_relation",
            MutationKind::AlterChar => "alter_char",
            MutationKind::InvertZ => "invert_z",
        }
    }

    /// The category that must flag this mutation.
    pub fn primary_category(self) -> Category {
        match self {
            MutationKind::Delete | MutationKind::Duplicate => Category::Count,
            MutationKind::SwapColors => Category::Color,
            MutationKind::ReflectRelation => Category::Position,
            MutationKind::AlterChar => Category::Text,
            MutationKind::InvertZ => Category::ZOrder,
        }
    }

    /// Categories allowed to fail alongside the primary one.
    pub fn allowed_failures(self) -> &'static [Category] {
        match self {
            MutationKind::Delete | MutationKind::Duplicate => {
                &[Category::Count, Category::MultiCount]
            }
            MutationKind::SwapColors => &[Category::Color],
            MutationKind::ReflectRelation => &[Category::Position],
            MutationKind::AlterChar => &[Category::Text],
            MutationKind::InvertZ => &[Category::ZOrder],
        }
    }
}

/// A record satisfying every mutation's precondition: a multi-instance
/// colored spec, a second color, a directional relation, an occluding pair,
/// and a text.
pub fn mutation_fixture(seed: u64) -> SceneRecord {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0006);
    let c = rng.below(8) as usize;
    // Three distinct palette entries.
    let (c1, c2, c3) = (PALETTE[c], PALETTE[c + 1], PALETTE[(c + 2) % 10]);
    let apples = 2 + rng.below(2);
    let lines = format!(
        concat!(
            "{{\"kind\":\"config\",\"seed\":{seed},\"background\":\"white\"}}\n",
            "{{\"kind\":\"object\",\"id\":\"apple\",\"count\":{apples},",
            "\"color\":\"{c1}\",\"size_class\":\"small\"}}\n",
            "{{\"kind\":\"object\",\"id\":\"bowl\",\"color\":\"{c2}\",",
            "\"size_class\":\"large\"}}\n",
            "{{\"kind\":\"object\",\"id\":\"lid\",\"color\":\"{c3}\",",
            "\"size_class\":\"medium\"}}\n",
            "{{\"kind\":\"relation\",\"rel\":\"left_of\",\"subject\":\"apple\",",
            "\"object\":\"bowl\"}}\n",
            "{{\"kind\":\"relation\",\"rel\":\"occludes\",\"subject\":\"lid\",",
            "\"object\":\"bowl\"}}\n",
            "{{\"kind\":\"text\",\"id\":\"t0\",\"content\":\"Fruit Bowl 拼盘\",",
            "\"size_class\":\"caption\",\"alignment\":\"left\",",
            "\"region\":[0.05,0.88,0.9,0.1]}}\n",
        ),
        seed = rng.below(10_000),
        apples = apples,
        c1 = c1.name(),
        c2 = c2.name(),
        c3 = c3.name(),
    );
    parse_records(lines.as_bytes()).expect("mutation fixture always parses")
}

/// Apply one mutation to a compiled canvas. Panics if the record lacks the
/// mutation's precondition — pair with [`mutation_fixture`].
pub fn mutate(ir: &CanvasIR, record: &SceneRecord, kind: MutationKind, seed: u64) -> CanvasIR {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0007);
    let mut out = ir.clone();
    let instance_ids: Vec<String> = out
        .nodes
        .iter()
        .filter(|n| n.label.is_some() && n.id.contains('#'))
        .map(|n| n.id.clone())
        .collect();
    let pick = |rng: &mut SplitMix64, ids: &[String]| ids[rng.below(ids.len() as u64) as usize].clone();

    match kind {
        MutationKind::Delete => {
            let victim = pick(&mut rng, &instance_ids);
            out.nodes.retain(|n| n.id != victim);
        }
        MutationKind::Duplicate => {
            let source = pick(&mut rng, &instance_ids);
            let mut clone = out.nodes.iter().find(|n| n.id == source).unwrap().clone();
            clone.id = format!("{source}~dup");
            out.nodes.push(clone);
        }
        MutationKind::SwapColors => {
            let mut colored: Vec<usize> = Vec::new();
            for (idx, node) in out.nodes.iter().enumerate() {
                if node.label.is_none() || node.color.is_none() {
                    continue;
                }
                if colored.iter().all(|&c| out.nodes[c].color != node.color) {
                    colored.push(idx);
                }
            }
            let (a, b) = (colored[0], colored[1]);
            let tmp = out.nodes[a].color;
            out.nodes[a].color = out.nodes[b].color;
            out.nodes[b].color = tmp;
        }
        MutationKind::ReflectRelation => {
            let rel = record
                .relations
                .iter()
                .find(|r| matches!(r.kind, RelationKind::LeftOf | RelationKind::Above))
                .expect("fixture carries a directional relation");
            let axis_center = out
                .nodes
                .iter()
                .find(|n| n.id.starts_with(&format!("{}#", rel.object)))
                .and_then(|n| n.bbox())
                .expect("relation object is placed")
                .center();
            let prefix = format!("{}#", rel.subject);
            for node in out.nodes.iter_mut() {
                if !node.id.starts_with(&prefix) {
                    continue;
                }
                if let NodeKind::Rect { bbox } | NodeKind::Ellipse { bbox } = &mut node.kind {
                    match rel.kind {
                        RelationKind::LeftOf => {
                            let cx = 2.0 * axis_center.x - (bbox.x + bbox.w / 2.0);
                            bbox.x = cx - bbox.w / 2.0;
                        }
                        _ => {
                            let cy = 2.0 * axis_center.y - (bbox.y + bbox.h / 2.0);
                            bbox.y = cy - bbox.h / 2.0;
                        }
                    }
                }
            }
        }
        MutationKind::AlterChar => {
            let node = out
                .nodes
                .iter_mut()
                .find(|n| matches!(n.kind, NodeKind::Text { .. }))
                .expect("fixture carries a text");
            if let NodeKind::Text { content, .. } = &mut node.kind {
                let mut chars: Vec<char> = content.chars().collect();
                let i = rng.below(chars.len() as u64) as usize;
                chars[i] = if chars[i] == 'X' { 'Y' } else { 'X' };
                *content = chars.into_iter().collect();
            }
        }
        MutationKind::InvertZ => {
            let rel = record
                .relations
                .iter()
                .find(|r| r.kind == RelationKind::Occludes)
                .expect("fixture carries an occlusion");
            let find = |out: &CanvasIR, spec: &str| {
                out.nodes
                    .iter()
                    .position(|n| n.id.starts_with(&format!("{spec}#")))
                    .expect("occluding pair is placed")
            };
            let (a, b) = (find(&out, &rel.subject), find(&out, &rel.object));
            let (za, zb) = (out.nodes[a].z, out.nodes[b].z);
            out.nodes[a].z = zb;
            out.nodes[b].z = za;
        }
    }
    CanvasIR::new(out.width, out.height, out.nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canvas::compile;
    use crate::layout::{check_placement, solve};
    use crate::verify::verify_canvas;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_record(11).canonical_bytes(), random_record(11).canonical_bytes());
        assert_eq!(random_ir(11), random_ir(11));
        assert_eq!(random_layer_doc(11), random_layer_doc(11));
        let doc = random_layer_doc(11);
        assert_eq!(random_edit(&doc, 3), random_edit(&doc, 3));
    }

    #[test]
    fn generated_records_stay_within_the_documented_bounds() {
        for seed in 0..40 {
            let record = random_record(seed);
            assert!(record.objects.len() <= 8);
            assert!(record.total_instances() <= 12);
            assert!(record.relations.len() <= 6);
            assert!(crate::scene::validate(&record).is_clean());
        }
    }

    #[test]
    fn generated_records_solve_and_verify() {
        for seed in 0..25 {
            let record = random_record(seed);
            let solution = solve(&record).unwrap_or_else(|e| {
                panic!("seed {seed}: {e:?}\n{}", String::from_utf8_lossy(&record.canonical_bytes()))
            });
            assert!(check_placement(&solution, &record).unwrap().is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn every_mutation_is_flagged_in_its_own_category() {
        for seed in 0..5 {
            let record = mutation_fixture(seed);
            let solution = solve(&record).unwrap();
            let ir = compile(&record, &solution).unwrap();
            assert!(verify_canvas(&ir, &record).passed(), "baseline must verify");

            for kind in MutationKind::ALL {
                let broken = mutate(&ir, &record, kind, seed + 100);
                let report = verify_canvas(&broken, &record);
                assert!(!report.passed(), "{} went unnoticed", kind.name());
                let failed = report.failed_categories();
                assert!(
                    failed.contains(&kind.primary_category()),
                    "{}: failed {:?}",
                    kind.name(),
                    failed
                );
                for category in failed {
                    assert!(
                        kind.allowed_failures().contains(&category),
                        "{}: unexpected {} failure",
                        kind.name(),
                        category.name()
                    );
                }
            }
        }
    }

    #[test]
    fn layer_doc_generator_leaves_unedited_room() {
        for seed in 0..10 {
            let doc = random_layer_doc(seed);
            for layer in &doc.layers {
                let Payload::Solid { width, height, .. } = layer.payload else { unreachable!() };
                assert!(layer.offset.0 + i64::from(width) <= 36);
                assert!(layer.offset.1 + i64::from(height) <= 36);
            }
        }
    }
}
