//! Alpha-over compositing, layer edits, and the unedited-region mask that
//! backs the preservation guarantee: pixels outside an edit's footprint
//! composite to byte-identical values before and after the edit.

use std::path::Path;

use thiserror::Error;

use super::image::{Image, Mask};
use super::{EditOp, Layer, LayerDoc, Payload};

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error("layer `{0}`: payload file missing")]
    MissingPayload(String),
    #[error("layer `{0}`: mask dimensions differ from payload")]
    DimensionMismatch(String),
    #[error("layer `{id}`: {reason}")]
    Malformed { id: String, reason: String },
}

#[derive(Debug, Error)]
pub enum EditError {
    #[error("no layer with id `{0}`")]
    UnknownLayer(String),
    #[error("opacity {0} outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Error)]
pub enum UneditedMaskError {
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
}

/// Integer division rounding half away from zero; all operands non-negative.
fn rha(n: u64, d: u64) -> u64 {
    (2 * n + d) / (2 * d)
}

fn resolve_payload(layer: &Layer, root: &Path) -> Result<Image, CompositeError> {
    match &layer.payload {
        Payload::Solid { width, height, color } => Ok(Image::solid(*width, *height, *color)),
        Payload::File { path } => {
            let bytes = std::fs::read(root.join(path)).map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    CompositeError::MissingPayload(layer.id.clone())
                } else {
                    CompositeError::Malformed { id: layer.id.clone(), reason: e.to_string() }
                }
            })?;
            Image::decode(&bytes)
                .map_err(|e| CompositeError::Malformed { id: layer.id.clone(), reason: e.to_string() })
        }
    }
}

fn resolve_mask(
    layer: &Layer,
    payload: &Image,
    root: &Path,
) -> Result<Option<Mask>, CompositeError> {
    let Some(path) = &layer.mask else { return Ok(None) };
    let bytes = std::fs::read(root.join(path)).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CompositeError::MissingPayload(layer.id.clone())
        } else {
            CompositeError::Malformed { id: layer.id.clone(), reason: e.to_string() }
        }
    })?;
    let img = Image::decode(&bytes)
        .map_err(|e| CompositeError::Malformed { id: layer.id.clone(), reason: e.to_string() })?;
    if !img.same_dims(payload) {
        return Err(CompositeError::DimensionMismatch(layer.id.clone()));
    }
    Ok(Some(Mask::from_image(&img)))
}

/// Un-premultiplied source-over of one source pixel onto a destination
/// pixel, at 8 bits with round-half-away-from-zero.
fn over(src_rgb: [u8; 3], sa: u64, dst: [u8; 4]) -> [u8; 4] {
    let da = u64::from(dst[3]);
    let alpha_num = sa * 255 + da * (255 - sa);
    if alpha_num == 0 {
        return [0, 0, 0, 0];
    }
    let mut out = [0u8; 4];
    for c in 0..3 {
        let num = u64::from(src_rgb[c]) * sa * 255 + u64::from(dst[c]) * da * (255 - sa);
        out[c] = rha(num, alpha_num) as u8;
    }
    out[3] = rha(alpha_num, 255) as u8;
    out
}

/// Composite back-to-front onto a transparent canvas. `root` anchors
/// relative payload and mask paths.
pub fn composite(doc: &LayerDoc, root: &Path) -> Result<Image, CompositeError> {
    let mut out = Image::new(doc.width, doc.height);
    for layer in &doc.layers {
        let payload = resolve_payload(layer, root)?;
        let mask = resolve_mask(layer, &payload, root)?;
        for py in 0..payload.height {
            let cy = layer.offset.1 + i64::from(py);
            if cy < 0 || cy >= i64::from(doc.height) {
                continue;
            }
            for px in 0..payload.width {
                let cx = layer.offset.0 + i64::from(px);
                if cx < 0 || cx >= i64::from(doc.width) {
                    continue;
                }
                if let Some(m) = &mask {
                    if !m.get(px, py) {
                        continue;
                    }
                }
                let mut src = payload.get(px, py);
                if let Some(t) = layer.tint {
                    src[..3].copy_from_slice(&t);
                }
                let sa = (f64::from(src[3]) * layer.opacity).round() as u64;
                if sa == 0 {
                    continue;
                }
                let dst = out.get(cx as u32, cy as u32);
                out.set(cx as u32, cy as u32, over([src[0], src[1], src[2]], sa, dst));
            }
        }
    }
    Ok(out)
}

/// Apply one edit, returning a new document. Untouched layers are carried
/// over verbatim, except that `Reorder` may bump later z values to restore
/// strict monotonicity.
pub fn apply_edit(doc: &LayerDoc, op: &EditOp) -> Result<LayerDoc, EditError> {
    let mut doc = doc.clone();
    let idx = doc
        .layers
        .iter()
        .position(|l| l.id == op.layer_id())
        .ok_or_else(|| EditError::UnknownLayer(op.layer_id().to_string()))?;
    match op {
        EditOp::Translate { dx, dy, .. } => {
            doc.layers[idx].offset.0 += dx;
            doc.layers[idx].offset.1 += dy;
        }
        EditOp::SetOpacity { value, .. } => {
            if !(0.0..=1.0).contains(value) {
                return Err(EditError::OutOfRange(*value));
            }
            doc.layers[idx].opacity = *value;
        }
        EditOp::Recolor { target, .. } => {
            doc.layers[idx].tint = Some(target.rgb());
        }
        EditOp::Delete { .. } => {
            doc.layers.remove(idx);
        }
        EditOp::Reorder { new_z, .. } => {
            doc.layers[idx].z = *new_z;
            doc.layers.sort_by_key(|l| l.z);
            for i in 1..doc.layers.len() {
                if doc.layers[i].z <= doc.layers[i - 1].z {
                    doc.layers[i].z = doc.layers[i - 1].z + 1;
                }
            }
        }
        EditOp::ReplacePayload { payload, .. } => {
            doc.layers[idx].payload = payload.clone();
        }
    }
    Ok(doc)
}

/// Canvas-global footprint of a layer: payload bbox intersected with mask
/// support, clipped to the canvas.
fn footprint(
    width: u32,
    height: u32,
    layer: &Layer,
    root: &Path,
) -> Result<Mask, CompositeError> {
    let payload = resolve_payload(layer, root)?;
    let mask = resolve_mask(layer, &payload, root)?;
    let mut fp = Mask::filled(width, height, false);
    for py in 0..payload.height {
        let cy = layer.offset.1 + i64::from(py);
        if cy < 0 || cy >= i64::from(height) {
            continue;
        }
        for px in 0..payload.width {
            let cx = layer.offset.0 + i64::from(px);
            if cx < 0 || cx >= i64::from(width) {
                continue;
            }
            if mask.as_ref().is_none_or(|m| m.get(px, py)) {
                fp.set(cx as u32, cy as u32, true);
            }
        }
    }
    Ok(fp)
}

/// Pixels provably unaffected by `op`: the complement of the union of the
/// target layer's pre- and post-edit footprints.
pub fn unedited_mask(
    before: &LayerDoc,
    op: &EditOp,
    root: &Path,
) -> Result<Mask, UneditedMaskError> {
    let after = apply_edit(before, op)?;
    let target = before.layer(op.layer_id()).expect("apply_edit validated the id");
    let mut touched = footprint(before.width, before.height, target, root)?;
    if let Some(post) = after.layer(op.layer_id()) {
        touched.union_with(&footprint(before.width, before.height, post, root)?);
    }
    Ok(touched.invert())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Color;
    use crate::layers::Origin;

    fn layer(id: &str, z: i64, payload: Payload) -> Layer {
        Layer {
            id: id.to_string(),
            name: id.to_string(),
            z,
            opacity: 1.0,
            offset: (0, 0),
            mask: None,
            payload,
            origin: Origin::Decomposed,
            tint: None,
        }
    }

    fn solid(id: &str, z: i64, rgba: [u8; 4], w: u32, h: u32) -> Layer {
        layer(id, z, Payload::Solid { width: w, height: h, color: rgba })
    }

    fn no_root() -> &'static Path {
        Path::new("")
    }

    #[test]
    fn single_opaque_file_layer_reproduces_payload() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_fn(6, 4, |x, y| [x as u8 * 40, y as u8 * 60, 9, 255]);
        std::fs::write(dir.path().join("p.raw"), img.encode_raw()).unwrap();
        let doc = LayerDoc {
            width: 6,
            height: 4,
            layers: vec![layer("only", 0, Payload::File { path: "p.raw".into() })],
        };
        assert_eq!(composite(&doc, dir.path()).unwrap(), img);
    }

    #[test]
    fn zero_opacity_top_layer_is_a_no_op() {
        let mut top = solid("top", 5, [0, 0, 255, 255], 4, 4);
        top.opacity = 0.0;
        let base = LayerDoc {
            width: 4,
            height: 4,
            layers: vec![solid("bg", 0, [255, 0, 0, 255], 4, 4)],
        };
        let with_top = LayerDoc { layers: vec![base.layers[0].clone(), top], ..base.clone() };
        assert_eq!(composite(&with_top, no_root()).unwrap(), composite(&base, no_root()).unwrap());
    }

    #[test]
    fn half_blue_over_red_matches_formula_oracle() {
        let mut top = solid("top", 1, [0, 0, 255, 255], 2, 1);
        top.opacity = 0.5;
        let doc = LayerDoc {
            width: 2,
            height: 1,
            layers: vec![solid("bg", 0, [255, 0, 0, 255], 2, 1), top],
        };
        let out = composite(&doc, no_root()).unwrap();

        // Independent oracle: real-valued un-premultiplied over, rounded at
        // the same two points the integer path rounds.
        let sa = (255.0_f64 * 0.5).round();
        let alpha = sa * 255.0 + 255.0 * (255.0 - sa);
        let oracle = |cs: f64, cd: f64| ((cs * sa * 255.0 + cd * 255.0 * (255.0 - sa)) / alpha)
            .round() as u8;
        let expected = [oracle(0.0, 255.0), 0, oracle(255.0, 0.0), (alpha / 255.0).round() as u8];
        for x in 0..2 {
            assert_eq!(out.get(x, 0), expected);
        }
        assert_eq!(expected, [127, 0, 128, 255]);
    }

    #[test]
    fn fully_transparent_layer_never_changes_output() {
        let base = LayerDoc {
            width: 3,
            height: 3,
            layers: vec![
                solid("bg", 0, [10, 200, 50, 255], 3, 3),
                solid("mid", 2, [0, 0, 255, 128], 2, 2),
            ],
        };
        let mut padded = base.clone();
        padded.layers.insert(1, solid("ghost", 1, [90, 90, 90, 0], 3, 3));
        assert_eq!(composite(&base, no_root()).unwrap(), composite(&padded, no_root()).unwrap());
    }

    #[test]
    fn mask_zeroes_source_outside_support() {
        let dir = tempfile::tempdir().unwrap();
        let mask = Image::from_fn(4, 1, |x, _| if x < 2 { [255, 0, 0, 255] } else { [0; 4] });
        std::fs::write(dir.path().join("m.raw"), mask.encode_raw()).unwrap();
        let mut top = solid("top", 1, [0, 255, 0, 255], 4, 1);
        top.mask = Some("m.raw".into());
        let doc = LayerDoc {
            width: 4,
            height: 1,
            layers: vec![solid("bg", 0, [255, 0, 0, 255], 4, 1), top],
        };
        let out = composite(&doc, dir.path()).unwrap();
        assert_eq!(out.get(0, 0), [0, 255, 0, 255]);
        assert_eq!(out.get(1, 0), [0, 255, 0, 255]);
        assert_eq!(out.get(2, 0), [255, 0, 0, 255]);
        assert_eq!(out.get(3, 0), [255, 0, 0, 255]);
    }

    #[test]
    fn mask_dimension_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("m.raw"), Image::new(2, 2).encode_raw()).unwrap();
        let mut top = solid("top", 0, [1, 2, 3, 255], 4, 4);
        top.mask = Some("m.raw".into());
        let doc = LayerDoc { width: 4, height: 4, layers: vec![top] };
        let err = composite(&doc, dir.path()).unwrap_err();
        assert!(matches!(err, CompositeError::DimensionMismatch(id) if id == "top"));
    }

    #[test]
    fn missing_payload_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let doc = LayerDoc {
            width: 2,
            height: 2,
            layers: vec![layer("gone", 0, Payload::File { path: "nope.raw".into() })],
        };
        let err = composite(&doc, dir.path()).unwrap_err();
        assert!(matches!(err, CompositeError::MissingPayload(id) if id == "gone"));
    }

    #[test]
    fn translate_then_inverse_restores_the_doc() {
        let doc = LayerDoc { width: 8, height: 8, layers: vec![solid("a", 0, [1, 2, 3, 4], 2, 2)] };
        let fwd = EditOp::Translate { layer_id: "a".into(), dx: 3, dy: -1 };
        let back = EditOp::Translate { layer_id: "a".into(), dx: -3, dy: 1 };
        let roundtrip = apply_edit(&apply_edit(&doc, &fwd).unwrap(), &back).unwrap();
        assert_eq!(roundtrip, doc);
    }

    #[test]
    fn edits_on_unknown_layers_fail() {
        let doc = LayerDoc { width: 2, height: 2, layers: vec![solid("a", 0, [0; 4], 1, 1)] };
        let err = apply_edit(&doc, &EditOp::Delete { layer_id: "bg".into() }).unwrap_err();
        assert!(matches!(err, EditError::UnknownLayer(id) if id == "bg"));
        let err =
            apply_edit(&doc, &EditOp::SetOpacity { layer_id: "a".into(), value: 1.5 }).unwrap_err();
        assert!(matches!(err, EditError::OutOfRange(_)));
    }

    #[test]
    fn reorder_restores_strictly_increasing_z() {
        let doc = LayerDoc {
            width: 2,
            height: 2,
            layers: vec![
                solid("a", 0, [0; 4], 1, 1),
                solid("b", 1, [0; 4], 1, 1),
                solid("c", 2, [0; 4], 1, 1),
            ],
        };
        let moved = apply_edit(&doc, &EditOp::Reorder { layer_id: "c".into(), new_z: 0 }).unwrap();
        let order: Vec<&str> = moved.layers.iter().map(|l| l.id.as_str()).collect();
        assert_eq!(order, ["a", "c", "b"]);
        for pair in moved.layers.windows(2) {
            assert!(pair[0].z < pair[1].z);
        }
    }

    #[test]
    fn recolor_changes_tint_only() {
        let doc = LayerDoc { width: 2, height: 2, layers: vec![solid("a", 0, [9, 9, 9, 200], 2, 2)] };
        let edited =
            apply_edit(&doc, &EditOp::Recolor { layer_id: "a".into(), target: Color::Green })
                .unwrap();
        assert_eq!(edited.layers[0].tint, Some([0, 128, 0]));
        assert_eq!(edited.layers[0].payload, doc.layers[0].payload);
        let out = composite(&edited, no_root()).unwrap();
        assert_eq!(out.get(0, 0)[1], rha(128 * 200 * 255, 200 * 255) as u8);
    }

    #[test]
    fn unedited_mask_covers_the_untouched_half() {
        let doc = LayerDoc {
            width: 4,
            height: 2,
            layers: vec![
                solid("bg", 0, [255, 255, 255, 255], 4, 2),
                solid("left", 1, [0, 0, 0, 255], 2, 2),
            ],
        };
        let op = EditOp::SetOpacity { layer_id: "left".into(), value: 0.25 };
        let mask = unedited_mask(&doc, &op, no_root()).unwrap();
        for y in 0..2 {
            for x in 0..4 {
                assert_eq!(mask.get(x, y), x >= 2, "({x},{y})");
            }
        }
    }

    #[test]
    fn zero_translate_masks_one_footprint() {
        let mut target = solid("t", 0, [5, 5, 5, 255], 2, 1);
        target.offset = (1, 1);
        let doc = LayerDoc { width: 4, height: 3, layers: vec![target] };
        let op = EditOp::Translate { layer_id: "t".into(), dx: 0, dy: 0 };
        let mask = unedited_mask(&doc, &op, no_root()).unwrap();
        assert_eq!(mask.count_true(), 4 * 3 - 2);
        assert!(!mask.get(1, 1));
        assert!(!mask.get(2, 1));
    }

    #[test]
    fn full_canvas_edit_leaves_nothing_unedited() {
        let doc = LayerDoc { width: 3, height: 3, layers: vec![solid("bg", 0, [1; 4], 3, 3)] };
        let op = EditOp::Recolor { layer_id: "bg".into(), target: Color::Red };
        let mask = unedited_mask(&doc, &op, no_root()).unwrap();
        assert_eq!(mask.count_true(), 0);
    }

    #[test]
    fn composites_agree_wherever_the_unedited_mask_is_true() {
        let doc = LayerDoc {
            width: 6,
            height: 6,
            layers: vec![
                solid("bg", 0, [200, 180, 160, 255], 6, 6),
                Layer { offset: (1, 1), ..solid("a", 1, [30, 60, 90, 180], 3, 3) },
                Layer { offset: (3, 2), ..solid("b", 2, [90, 30, 200, 120], 3, 3) },
            ],
        };
        let ops = [
            EditOp::Translate { layer_id: "a".into(), dx: 2, dy: 0 },
            EditOp::Delete { layer_id: "b".into() },
            EditOp::Reorder { layer_id: "a".into(), new_z: 5 },
            EditOp::SetOpacity { layer_id: "b".into(), value: 0.3 },
        ];
        let before = composite(&doc, no_root()).unwrap();
        for op in &ops {
            let after = composite(&apply_edit(&doc, op).unwrap(), no_root()).unwrap();
            let mask = unedited_mask(&doc, op, no_root()).unwrap();
            for y in 0..6 {
                for x in 0..6 {
                    if mask.get(x, y) {
                        assert_eq!(before.get(x, y), after.get(x, y), "{op:?} at ({x},{y})");
                    }
                }
            }
        }
    }
}
