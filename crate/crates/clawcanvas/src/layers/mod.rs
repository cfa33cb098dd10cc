//! Layered image documents: an image decomposed into ordered, independently
//! editable layers with opacity, offsets, and masks. Stored as
//! `*.layers.jsonl` — one header line, then one line per layer, back to
//! front. Payloads and masks live in external files next to the document.

mod composite;
mod image;
mod metrics;

pub use composite::{apply_edit, composite, unedited_mask, CompositeError, EditError};
pub use image::{Image, ImageError, Mask};
pub use metrics::{psnr, ssim, MetricError};

use serde_json::Value;
use thiserror::Error;

use crate::color::Color;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerDoc {
    pub width: u32,
    pub height: u32,
    /// Back to front; z strictly increasing.
    pub layers: Vec<Layer>,
}

impl LayerDoc {
    pub fn layer(&self, id: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.id == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub id: String,
    pub name: String,
    pub z: i64,
    pub opacity: f64,
    /// Canvas-space pixel offset of the payload's top-left corner.
    pub offset: (i64, i64),
    /// Relative path to a mask image; support = first channel non-zero.
    pub mask: Option<String>,
    pub payload: Payload,
    pub origin: Origin,
    /// Palette recolor applied at composite time; keeps payload files intact.
    pub tint: Option<[u8; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    /// Relative path to a PNG or raw image.
    File { path: String },
    Solid { width: u32, height: u32, color: [u8; 4] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Decomposed,
    CompiledSketch,
    Generated,
    Edited,
}

impl Origin {
    pub fn name(self) -> &'static str {
        match self {
            Origin::Decomposed => "decomposed",
            Origin::CompiledSketch => "compiled_sketch",
            Origin::Generated => "generated",
            Origin::Edited => "edited",
        }
    }

    fn from_name(name: &str) -> Option<Origin> {
        Some(match name {
            "decomposed" => Origin::Decomposed,
            "compiled_sketch" => Origin::CompiledSketch,
            "generated" => Origin::Generated,
            "edited" => Origin::Edited,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EditOp {
    Translate { layer_id: String, dx: i64, dy: i64 },
    SetOpacity { layer_id: String, value: f64 },
    Recolor { layer_id: String, target: Color },
    Delete { layer_id: String },
    Reorder { layer_id: String, new_z: i64 },
    ReplacePayload { layer_id: String, payload: Payload },
}

impl EditOp {
    pub fn layer_id(&self) -> &str {
        match self {
            EditOp::Translate { layer_id, .. }
            | EditOp::SetOpacity { layer_id, .. }
            | EditOp::Recolor { layer_id, .. }
            | EditOp::Delete { layer_id }
            | EditOp::Reorder { layer_id, .. }
            | EditOp::ReplacePayload { layer_id, .. } => layer_id,
        }
    }
}

#[derive(Debug, Error)]
pub enum LayerDocError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: field `{field}`: {reason}")]
    InvalidField { line: usize, field: String, reason: String },
    #[error("document must start with a header line")]
    MissingHeader,
    #[error("duplicate layer id `{0}`")]
    DuplicateId(String),
    #[error("layer `{0}` does not increase z over its predecessor")]
    NonMonotoneZ(String),
}

/// Canonical form: header first, layers back to front, alphabetical keys,
/// LF line endings. `parse_layerdoc` of the output reproduces the document.
pub fn serialize_layerdoc(doc: &LayerDoc) -> Vec<u8> {
    let mut out = Vec::new();
    let header = serde_json::json!({
        "height": doc.height,
        "kind": "header",
        "width": doc.width,
    });
    out.extend_from_slice(header.to_string().as_bytes());
    out.push(b'\n');
    for layer in &doc.layers {
        let mut map = serde_json::Map::new();
        map.insert("id".into(), Value::from(layer.id.clone()));
        map.insert("kind".into(), Value::from("layer"));
        if let Some(mask) = &layer.mask {
            map.insert("mask".into(), Value::from(mask.clone()));
        }
        map.insert("name".into(), Value::from(layer.name.clone()));
        map.insert("offset".into(), serde_json::json!([layer.offset.0, layer.offset.1]));
        map.insert("opacity".into(), Value::from(layer.opacity));
        map.insert("origin".into(), Value::from(layer.origin.name()));
        let payload = match &layer.payload {
            Payload::File { path } => serde_json::json!({ "path": path, "type": "file" }),
            Payload::Solid { width, height, color } => serde_json::json!({
                "color": [color[0], color[1], color[2], color[3]],
                "height": height,
                "type": "solid",
                "width": width,
            }),
        };
        map.insert("payload".into(), payload);
        if let Some(t) = layer.tint {
            map.insert("tint".into(), serde_json::json!([t[0], t[1], t[2]]));
        }
        map.insert("z".into(), Value::from(layer.z));
        out.extend_from_slice(Value::Object(map).to_string().as_bytes());
        out.push(b'\n');
    }
    out
}

pub fn parse_layerdoc(input: &[u8]) -> Result<LayerDoc, LayerDocError> {
    let text = std::str::from_utf8(input).map_err(|e| LayerDocError::MalformedLine {
        line: 0,
        reason: format!("invalid UTF-8: {e}"),
    })?;
    let mut doc: Option<LayerDoc> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw).map_err(|e| LayerDocError::MalformedLine {
            line,
            reason: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| LayerDocError::MalformedLine {
            line,
            reason: "line is not a JSON object".into(),
        })?;
        let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| {
            LayerDocError::MalformedLine { line, reason: "missing `kind`".into() }
        })?;
        match kind {
            "header" => {
                if doc.is_some() {
                    return Err(LayerDocError::MalformedLine {
                        line,
                        reason: "second header line".into(),
                    });
                }
                let width = field_u32(obj, "width", line)?;
                let height = field_u32(obj, "height", line)?;
                doc = Some(LayerDoc { width, height, layers: Vec::new() });
            }
            "layer" => {
                let doc = doc.as_mut().ok_or(LayerDocError::MissingHeader)?;
                let layer = parse_layer(obj, line)?;
                if doc.layers.iter().any(|l| l.id == layer.id) {
                    return Err(LayerDocError::DuplicateId(layer.id));
                }
                if let Some(prev) = doc.layers.last() {
                    if layer.z <= prev.z {
                        return Err(LayerDocError::NonMonotoneZ(layer.id));
                    }
                }
                doc.layers.push(layer);
            }
            other => {
                return Err(LayerDocError::MalformedLine {
                    line,
                    reason: format!("unknown kind `{other}`"),
                })
            }
        }
    }
    doc.ok_or(LayerDocError::MissingHeader)
}

fn field_u32(
    obj: &serde_json::Map<String, Value>,
    field: &str,
    line: usize,
) -> Result<u32, LayerDocError> {
    obj.get(field)
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| LayerDocError::InvalidField {
            line,
            field: field.into(),
            reason: "expected a 32-bit unsigned integer".into(),
        })
}

fn parse_layer(
    obj: &serde_json::Map<String, Value>,
    line: usize,
) -> Result<Layer, LayerDocError> {
    let invalid = |field: &str, reason: &str| LayerDocError::InvalidField {
        line,
        field: field.into(),
        reason: reason.into(),
    };
    let id = obj
        .get("id")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| invalid("id", "expected a non-empty string"))?
        .to_string();
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("name", "expected a string"))?
        .to_string();
    let z = obj
        .get("z")
        .and_then(Value::as_i64)
        .ok_or_else(|| invalid("z", "expected an integer"))?;
    let opacity = obj
        .get("opacity")
        .and_then(Value::as_f64)
        .ok_or_else(|| invalid("opacity", "expected a number"))?;
    if !(0.0..=1.0).contains(&opacity) {
        return Err(invalid("opacity", "must be within [0, 1]"));
    }
    let offset = match obj.get("offset") {
        Some(Value::Array(a)) if a.len() == 2 => {
            let dx = a[0].as_i64().ok_or_else(|| invalid("offset", "expected integers"))?;
            let dy = a[1].as_i64().ok_or_else(|| invalid("offset", "expected integers"))?;
            (dx, dy)
        }
        _ => return Err(invalid("offset", "expected [dx, dy]")),
    };
    let mask = match obj.get("mask") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(invalid("mask", "expected a path string")),
    };
    let origin = obj
        .get("origin")
        .and_then(Value::as_str)
        .and_then(Origin::from_name)
        .ok_or_else(|| {
            invalid("origin", "expected decomposed|compiled_sketch|generated|edited")
        })?;
    let tint = match obj.get("tint") {
        None => None,
        Some(Value::Array(a)) if a.len() == 3 => {
            let mut rgb = [0u8; 3];
            for (slot, v) in rgb.iter_mut().zip(a) {
                *slot = v
                    .as_u64()
                    .and_then(|n| u8::try_from(n).ok())
                    .ok_or_else(|| invalid("tint", "expected byte values"))?;
            }
            Some(rgb)
        }
        Some(_) => return Err(invalid("tint", "expected [r, g, b]")),
    };
    let payload_obj = obj
        .get("payload")
        .and_then(Value::as_object)
        .ok_or_else(|| invalid("payload", "expected an object"))?;
    let payload = match payload_obj.get("type").and_then(Value::as_str) {
        Some("file") => Payload::File {
            path: payload_obj
                .get("path")
                .and_then(Value::as_str)
                .ok_or_else(|| invalid("payload", "file payload needs `path`"))?
                .to_string(),
        },
        Some("solid") => {
            let width = field_u32(payload_obj, "width", line)?;
            let height = field_u32(payload_obj, "height", line)?;
            let color = match payload_obj.get("color") {
                Some(Value::Array(a)) if a.len() == 4 => {
                    let mut rgba = [0u8; 4];
                    for (slot, v) in rgba.iter_mut().zip(a) {
                        *slot = v
                            .as_u64()
                            .and_then(|n| u8::try_from(n).ok())
                            .ok_or_else(|| invalid("payload", "expected byte color values"))?;
                    }
                    rgba
                }
                _ => return Err(invalid("payload", "solid payload needs `color` [r,g,b,a]")),
            };
            Payload::Solid { width, height, color }
        }
        _ => return Err(invalid("payload", "expected type `file` or `solid`")),
    };
    Ok(Layer { id, name, z, opacity, offset, mask, payload, origin, tint })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn solid_layer(id: &str, z: i64, rgba: [u8; 4], w: u32, h: u32) -> Layer {
        Layer {
            id: id.to_string(),
            name: id.to_string(),
            z,
            opacity: 1.0,
            offset: (0, 0),
            mask: None,
            payload: Payload::Solid { width: w, height: h, color: rgba },
            origin: Origin::Decomposed,
            tint: None,
        }
    }

    fn fixture() -> LayerDoc {
        LayerDoc {
            width: 8,
            height: 8,
            layers: vec![
                solid_layer("bg", 0, [255, 255, 255, 255], 8, 8),
                Layer {
                    mask: Some("cup.mask.raw".to_string()),
                    offset: (2, 2),
                    tint: Some([0, 128, 0]),
                    ..solid_layer("cup", 3, [200, 30, 30, 255], 4, 4)
                },
                Layer {
                    payload: Payload::File { path: "fg.raw".to_string() },
                    opacity: 0.5,
                    origin: Origin::Generated,
                    ..solid_layer("fg", 7, [0, 0, 0, 0], 0, 0)
                },
            ],
        }
    }

    #[test]
    fn three_layer_round_trip() {
        let doc = fixture();
        let bytes = serialize_layerdoc(&doc);
        let parsed = parse_layerdoc(&bytes).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(serialize_layerdoc(&parsed), bytes);
    }

    #[test]
    fn serialized_lines_are_alphabetical() {
        let bytes = serialize_layerdoc(&fixture());
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "{\"height\":8,\"kind\":\"header\",\"width\":8}");
        let cup = lines.nth(1).unwrap();
        assert!(cup.starts_with("{\"id\":\"cup\",\"kind\":\"layer\",\"mask\":\"cup.mask.raw\""));
        assert!(cup.ends_with("\"tint\":[0,128,0],\"z\":3}"));
    }

    #[test]
    fn equal_z_is_rejected() {
        let mut doc = fixture();
        doc.layers[1].z = 0;
        let err = parse_layerdoc(&serialize_layerdoc(&doc)).unwrap_err();
        assert!(matches!(err, LayerDocError::NonMonotoneZ(id) if id == "cup"));
    }

    #[test]
    fn missing_header_is_rejected() {
        let bytes = serialize_layerdoc(&fixture());
        let text = String::from_utf8(bytes).unwrap();
        let without: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_layerdoc(without.as_bytes()), Err(LayerDocError::MissingHeader)));
        assert!(matches!(parse_layerdoc(b""), Err(LayerDocError::MissingHeader)));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut doc = fixture();
        doc.layers[2].id = "bg".to_string();
        let err = parse_layerdoc(&serialize_layerdoc(&doc)).unwrap_err();
        assert!(matches!(err, LayerDocError::DuplicateId(id) if id == "bg"));
    }

    #[test]
    fn out_of_range_opacity_is_rejected() {
        let mut doc = fixture();
        doc.layers[0].opacity = 1.5;
        let err = parse_layerdoc(&serialize_layerdoc(&doc)).unwrap_err();
        assert!(matches!(err, LayerDocError::InvalidField { field, .. } if field == "opacity"));
    }
}
