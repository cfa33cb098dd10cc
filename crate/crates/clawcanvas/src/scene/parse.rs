//! Line-delimited record parsing.

use std::collections::BTreeSet;

use serde_json::{Map, Value};

use super::{
    Alignment, CanvasConfig, ExtraFields, KnowledgeFact, ObjectSpec, RelationConstraint,
    RelationKind, SceneRecord, ShapeHint, SizeClass, TextSizeClass, TextSpec, UnitRect,
};
use crate::color::Color;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: malformed JSON: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: unknown kind '{kind}'")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: field '{field}': {reason}")]
    InvalidField {
        line: usize,
        field: &'static str,
        reason: String,
    },
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("relation {relation} references unknown id '{id}'")]
    DanglingReference { relation: String, id: String },
    #[error("object '{0}' has invalid count (must be >= 1)")]
    InvalidCount(String),
    #[error("object '{0}' has invalid explicit_position (needs count 1 and coordinates in [0,1])")]
    InvalidPosition(String),
    #[error("line {0}: more than one config line")]
    MultipleConfig(usize),
    #[error("record has neither objects nor texts")]
    EmptyRecord,
}

/// Parse `*.scene.jsonl` bytes into a canonically ordered [`SceneRecord`].
///
/// Exactly one `config` line is consumed; when absent the defaults apply
/// (1024x1024, seed 0, no background). Blank lines are skipped. Unknown
/// fields on any line are kept in the entity's `extra` map.
pub fn parse_records(input: &[u8]) -> Result<SceneRecord, ParseError> {
    let text = std::str::from_utf8(input).map_err(|e| ParseError::MalformedLine {
        line: 1 + input[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        reason: "invalid UTF-8".to_string(),
    })?;

    let mut config: Option<CanvasConfig> = None;
    let mut request_digest = String::new();
    let mut objects: Vec<ObjectSpec> = Vec::new();
    let mut texts: Vec<TextSpec> = Vec::new();
    let mut relations: Vec<RelationConstraint> = Vec::new();
    let mut facts: Vec<KnowledgeFact> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(raw).map_err(|e| ParseError::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        let Value::Object(mut map) = value else {
            return Err(ParseError::MalformedLine {
                line: line_no,
                reason: "line is not a JSON object".to_string(),
            });
        };
        let kind = match map.remove("kind") {
            Some(Value::String(k)) => k,
            Some(_) => {
                return Err(ParseError::InvalidField {
                    line: line_no,
                    field: "kind",
                    reason: "must be a string".to_string(),
                })
            }
            None => {
                return Err(ParseError::MalformedLine {
                    line: line_no,
                    reason: "missing 'kind' field".to_string(),
                })
            }
        };

        match kind.as_str() {
            "config" => {
                if config.is_some() {
                    return Err(ParseError::MultipleConfig(line_no));
                }
                let (cfg, digest) = parse_config(line_no, map)?;
                config = Some(cfg);
                request_digest = digest;
            }
            "object" => objects.push(parse_object(line_no, map)?),
            "text" => texts.push(parse_text(line_no, map)?),
            "relation" => relations.push(parse_relation(line_no, map)?),
            "fact" => facts.push(parse_fact(line_no, map)?),
            other => {
                return Err(ParseError::UnknownKind {
                    line: line_no,
                    kind: other.to_string(),
                })
            }
        }
    }

    if objects.is_empty() && texts.is_empty() {
        return Err(ParseError::EmptyRecord);
    }

    // Cross-line invariants.
    let mut ids: BTreeSet<&str> = BTreeSet::new();
    for id in objects
        .iter()
        .map(|o| o.id.as_str())
        .chain(texts.iter().map(|t| t.id.as_str()))
    {
        if !ids.insert(id) {
            return Err(ParseError::DuplicateId(id.to_string()));
        }
    }
    for rel in &relations {
        for endpoint in [&rel.subject, &rel.object] {
            if !ids.contains(endpoint.as_str()) {
                return Err(ParseError::DanglingReference {
                    relation: rel.describe(),
                    id: endpoint.clone(),
                });
            }
        }
    }

    // Canonical in-memory order; serialization preserves it, so
    // parse -> serialize is a fixed point.
    objects.sort_by(|a, b| a.id.cmp(&b.id));
    texts.sort_by(|a, b| a.id.cmp(&b.id));
    relations.sort_by(|a, b| {
        (a.kind.name(), &a.subject, &a.object).cmp(&(b.kind.name(), &b.subject, &b.object))
    });
    facts.sort_by(|a, b| {
        (&a.claim, &a.source_uri, &a.retrieved_at).cmp(&(
            &b.claim,
            &b.source_uri,
            &b.retrieved_at,
        ))
    });

    Ok(SceneRecord {
        canvas: config.unwrap_or_default(),
        objects,
        texts,
        relations,
        facts,
        request_digest,
    })
}

fn take_string(
    map: &mut Map<String, Value>,
    line: usize,
    field: &'static str,
) -> Result<Option<String>, ParseError> {
    match map.remove(field) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(ParseError::InvalidField {
            line,
            field,
            reason: "must be a string".to_string(),
        }),
    }
}

fn require_string(
    map: &mut Map<String, Value>,
    line: usize,
    field: &'static str,
) -> Result<String, ParseError> {
    take_string(map, line, field)?.ok_or(ParseError::InvalidField {
        line,
        field,
        reason: "is required".to_string(),
    })
}

fn take_u64(
    map: &mut Map<String, Value>,
    line: usize,
    field: &'static str,
) -> Result<Option<u64>, ParseError> {
    match map.remove(field) {
        None => Ok(None),
        Some(Value::Number(n)) => n.as_u64().map(Some).ok_or(ParseError::InvalidField {
            line,
            field,
            reason: "must be a non-negative integer".to_string(),
        }),
        Some(_) => Err(ParseError::InvalidField {
            line,
            field,
            reason: "must be a number".to_string(),
        }),
    }
}

fn take_f64_array(
    map: &mut Map<String, Value>,
    line: usize,
    field: &'static str,
    len: usize,
) -> Result<Option<Vec<f64>>, ParseError> {
    let invalid = |reason: &str| ParseError::InvalidField {
        line,
        field,
        reason: reason.to_string(),
    };
    match map.remove(field) {
        None => Ok(None),
        Some(Value::Array(items)) => {
            if items.len() != len {
                return Err(invalid(&format!("must be an array of {len} numbers")));
            }
            let mut out = Vec::with_capacity(len);
            for item in items {
                let x = item.as_f64().ok_or_else(|| invalid("must contain numbers"))?;
                if !x.is_finite() {
                    return Err(invalid("must contain finite numbers"));
                }
                out.push(x);
            }
            Ok(Some(out))
        }
        Some(_) => Err(invalid("must be an array")),
    }
}

fn parse_color(
    map: &mut Map<String, Value>,
    line: usize,
    field: &'static str,
) -> Result<Option<Color>, ParseError> {
    match take_string(map, line, field)? {
        None => Ok(None),
        Some(name) => name.parse().map(Some).map_err(|_| ParseError::InvalidField {
            line,
            field,
            reason: format!("'{name}' is not in the palette"),
        }),
    }
}

fn parse_config(
    line: usize,
    mut map: Map<String, Value>,
) -> Result<(CanvasConfig, String), ParseError> {
    let width = take_u64(&mut map, line, "width")?.unwrap_or(1024);
    let height = take_u64(&mut map, line, "height")?.unwrap_or(1024);
    for (field, value) in [("width", width), ("height", height)] {
        if !(64..=u64::from(u32::MAX)).contains(&value) {
            return Err(ParseError::InvalidField {
                line,
                field: if field == "width" { "width" } else { "height" },
                reason: "must be an integer >= 64".to_string(),
            });
        }
    }
    let seed = take_u64(&mut map, line, "seed")?.unwrap_or(0);
    let background = parse_color(&mut map, line, "background")?;
    let request_digest = take_string(&mut map, line, "request_digest")?.unwrap_or_default();
    Ok((
        CanvasConfig {
            width: width as u32,
            height: height as u32,
            seed,
            background,
            extra: extras(map),
        },
        request_digest,
    ))
}

fn parse_object(line: usize, mut map: Map<String, Value>) -> Result<ObjectSpec, ParseError> {
    let id = require_string(&mut map, line, "id")?;
    if id.is_empty() || id.contains('#') {
        return Err(ParseError::InvalidField {
            line,
            field: "id",
            reason: "must be non-empty and must not contain '#'".to_string(),
        });
    }
    let count = match take_u64(&mut map, line, "count")?.unwrap_or(1) {
        0 => return Err(ParseError::InvalidCount(id)),
        n if n > u64::from(u32::MAX) => return Err(ParseError::InvalidCount(id)),
        n => n as u32,
    };
    let class_label = take_string(&mut map, line, "class_label")?.unwrap_or_else(|| id.clone());
    let color = parse_color(&mut map, line, "color")?;
    let size_class = match take_string(&mut map, line, "size_class")? {
        None => None,
        Some(s) => Some(SizeClass::from_name(&s).ok_or(ParseError::InvalidField {
            line,
            field: "size_class",
            reason: format!("'{s}' is not one of small|medium|large"),
        })?),
    };
    let shape_hint = match take_string(&mut map, line, "shape_hint")? {
        None => None,
        Some(s) => Some(ShapeHint::from_name(&s).ok_or(ParseError::InvalidField {
            line,
            field: "shape_hint",
            reason: format!("'{s}' is not one of rect|ellipse|polygon"),
        })?),
    };
    let explicit_position = match take_f64_array(&mut map, line, "explicit_position", 2)? {
        None => None,
        Some(xy) => {
            let (x, y) = (xy[0], xy[1]);
            if count != 1 || !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                return Err(ParseError::InvalidPosition(id));
            }
            Some((x, y))
        }
    };
    Ok(ObjectSpec {
        id,
        class_label,
        count,
        color,
        size_class,
        shape_hint,
        explicit_position,
        extra: extras(map),
    })
}

fn parse_text(line: usize, mut map: Map<String, Value>) -> Result<TextSpec, ParseError> {
    let id = require_string(&mut map, line, "id")?;
    if id.is_empty() {
        return Err(ParseError::InvalidField {
            line,
            field: "id",
            reason: "must be non-empty".to_string(),
        });
    }
    let content = require_string(&mut map, line, "content")?;
    if content.is_empty() {
        return Err(ParseError::InvalidField {
            line,
            field: "content",
            reason: "must be non-empty".to_string(),
        });
    }
    let size_class = match take_string(&mut map, line, "size_class")? {
        None => TextSizeClass::Body,
        Some(s) => TextSizeClass::from_name(&s).ok_or(ParseError::InvalidField {
            line,
            field: "size_class",
            reason: format!("'{s}' is not one of title|subtitle|body|caption"),
        })?,
    };
    let alignment = match take_string(&mut map, line, "alignment")? {
        None => Alignment::Left,
        Some(s) => Alignment::from_name(&s).ok_or(ParseError::InvalidField {
            line,
            field: "alignment",
            reason: format!("'{s}' is not one of left|center|right"),
        })?,
    };
    let region = match take_f64_array(&mut map, line, "region", 4)? {
        None => UnitRect { x: 0.0, y: 0.0, w: 1.0, h: 1.0 },
        Some(r) => {
            if r[2] <= 0.0 || r[3] <= 0.0 {
                return Err(ParseError::InvalidField {
                    line,
                    field: "region",
                    reason: "width and height must be positive".to_string(),
                });
            }
            UnitRect { x: r[0], y: r[1], w: r[2], h: r[3] }
        }
    };
    let level = match take_u64(&mut map, line, "level")?.unwrap_or(0) {
        n if n > u64::from(u32::MAX) => {
            return Err(ParseError::InvalidField {
                line,
                field: "level",
                reason: "is out of range".to_string(),
            })
        }
        n => n as u32,
    };
    Ok(TextSpec {
        id,
        content,
        size_class,
        alignment,
        region,
        level,
        extra: extras(map),
    })
}

fn parse_relation(
    line: usize,
    mut map: Map<String, Value>,
) -> Result<RelationConstraint, ParseError> {
    // The line discriminator already uses "kind", so the constraint kind
    // travels under "rel" on the wire.
    let rel = require_string(&mut map, line, "rel")?;
    let subject = require_string(&mut map, line, "subject")?;
    let object = require_string(&mut map, line, "object")?;
    if subject == object {
        return Err(ParseError::InvalidField {
            line,
            field: "subject",
            reason: "subject and object must differ".to_string(),
        });
    }
    let (kind, subject, object) = match rel.as_str() {
        "left_of" => (RelationKind::LeftOf, subject, object),
        "right_of" => (RelationKind::LeftOf, object, subject),
        "above" => (RelationKind::Above, subject, object),
        "below" => (RelationKind::Above, object, subject),
        "occludes" => (RelationKind::Occludes, subject, object),
        "inside" => (RelationKind::Inside, subject, object),
        "near" => (RelationKind::Near, subject, object),
        other => {
            return Err(ParseError::InvalidField {
                line,
                field: "rel",
                reason: format!("'{other}' is not a known relation kind"),
            })
        }
    };
    Ok(RelationConstraint {
        kind,
        subject,
        object,
        extra: extras(map),
    })
}

fn parse_fact(line: usize, mut map: Map<String, Value>) -> Result<KnowledgeFact, ParseError> {
    let claim = require_string(&mut map, line, "claim")?;
    if claim.is_empty() {
        return Err(ParseError::InvalidField {
            line,
            field: "claim",
            reason: "must be non-empty".to_string(),
        });
    }
    let source_uri = take_string(&mut map, line, "source_uri")?.unwrap_or_default();
    let retrieved_at = take_string(&mut map, line, "retrieved_at")?.unwrap_or_default();
    Ok(KnowledgeFact {
        claim,
        source_uri,
        retrieved_at,
        extra: extras(map),
    })
}

fn extras(map: Map<String, Value>) -> ExtraFields {
    map.into_iter().collect()
}
