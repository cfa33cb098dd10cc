//! Record + layout -> canvas IR.

use super::{CanvasIR, CanvasNode, NodeKind};
use crate::geom::{Point, Rect};
use crate::layout::LayoutSolution;
use crate::scene::{Alignment, SceneRecord, ShapeHint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("geometry of '{id}' escapes the canvas")]
    GeometryOverflow { id: String },
    #[error("layout is missing instance '{0}'")]
    MissingInstance(String),
}

/// Build the canvas IR: background rect (z = -1) when configured, one shape
/// node per placed instance (kind from the spec's shape hint, default rect),
/// one text node per text spec anchored in its region above all shapes.
pub fn compile(record: &SceneRecord, layout: &LayoutSolution) -> Result<CanvasIR, CompileError> {
    let width = f64::from(record.canvas.width);
    let height = f64::from(record.canvas.height);
    let mut nodes = Vec::new();

    if let Some(bg) = record.canvas.background {
        nodes.push(CanvasNode {
            id: "background".to_string(),
            kind: NodeKind::Rect { bbox: Rect::new(0.0, 0.0, width, height) },
            label: None,
            color: Some(bg),
            z: -1,
        });
    }

    let mut max_z: i64 = -1;
    for obj in &record.objects {
        for k in 0..obj.count {
            let instance_id = format!("{}#{k}", obj.id);
            let placement = layout
                .placement(&instance_id)
                .ok_or_else(|| CompileError::MissingInstance(instance_id.clone()))?;
            let bbox = placement.bbox;
            if bbox.min_x() < 0.0
                || bbox.min_y() < 0.0
                || bbox.max_x() > width
                || bbox.max_y() > height
            {
                return Err(CompileError::GeometryOverflow { id: instance_id });
            }
            let kind = match obj.shape_hint.unwrap_or(ShapeHint::Rect) {
                ShapeHint::Rect => NodeKind::Rect { bbox },
                ShapeHint::Ellipse => NodeKind::Ellipse { bbox },
                // Diamond inscribed in the bbox; hull equals the bbox.
                ShapeHint::Polygon => NodeKind::Polygon {
                    points: vec![
                        Point::new(bbox.x + bbox.w / 2.0, bbox.y),
                        Point::new(bbox.max_x(), bbox.y + bbox.h / 2.0),
                        Point::new(bbox.x + bbox.w / 2.0, bbox.max_y()),
                        Point::new(bbox.x, bbox.y + bbox.h / 2.0),
                    ],
                },
            };
            max_z = max_z.max(placement.z);
            nodes.push(CanvasNode {
                id: instance_id,
                kind,
                label: Some(obj.class_label.clone()),
                color: obj.color,
                z: placement.z,
            });
        }
    }

    for (idx, text) in record.texts.iter().enumerate() {
        let region = Rect::new(
            text.region.x * width,
            text.region.y * height,
            text.region.w * width,
            text.region.h * height,
        );
        if region.min_x() < 0.0
            || region.min_y() < 0.0
            || region.max_x() > width
            || region.max_y() > height
        {
            return Err(CompileError::GeometryOverflow { id: text.id.clone() });
        }
        let anchor_x = match text.alignment {
            Alignment::Left => region.min_x(),
            Alignment::Center => region.center().x,
            Alignment::Right => region.max_x(),
        };
        nodes.push(CanvasNode {
            id: text.id.clone(),
            kind: NodeKind::Text {
                anchor: Point::new(anchor_x, region.center().y),
                size_class: text.size_class,
                alignment: text.alignment,
                content: text.content.clone(),
            },
            label: None,
            color: None,
            z: max_z + 1 + idx as i64,
        });
    }

    Ok(CanvasIR::new(record.canvas.width, record.canvas.height, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::solve;
    use crate::scene::parse_records;

    fn record(lines: &str) -> SceneRecord {
        parse_records(lines.as_bytes()).unwrap()
    }

    #[test]
    fn three_apples_compile_to_three_labeled_nodes() {
        let r = record(
            "{\"kind\":\"object\",\"id\":\"apple\",\"count\":3,\"color\":\"red\"}\n",
        );
        let ir = compile(&r, &solve(&r).unwrap()).unwrap();
        let apples: Vec<_> = ir
            .flat_nodes()
            .into_iter()
            .filter(|n| n.label.as_deref() == Some("apple"))
            .collect();
        assert_eq!(apples.len(), 3);
        assert!(apples.iter().all(|n| n.color == Some(crate::Color::Red)));
    }

    #[test]
    fn background_only_record_compiles_to_single_rect() {
        let r = record(concat!(
            "{\"kind\":\"config\",\"background\":\"white\"}\n",
            "{\"kind\":\"text\",\"id\":\"t\",\"content\":\"hi\"}\n",
        ));
        let layout = solve(&r).unwrap();
        let ir = compile(&r, &layout).unwrap();
        assert_eq!(ir.nodes[0].id, "background");
        assert_eq!(ir.nodes[0].z, -1);
        assert_eq!(ir.nodes.len(), 2);
    }

    #[test]
    fn centered_title_anchors_at_region_center() {
        let r = record(concat!(
            "{\"kind\":\"text\",\"id\":\"menu\",\"content\":\"MENU\",",
            "\"size_class\":\"title\",\"alignment\":\"center\",",
            "\"region\":[0.0,0.0,1.0,0.2]}\n",
        ));
        let ir = compile(&r, &solve(&r).unwrap()).unwrap();
        let node = ir.node("menu").unwrap();
        match &node.kind {
            NodeKind::Text { anchor, .. } => {
                assert_eq!(anchor.x, 512.0);
                assert_eq!(anchor.y, 102.4);
            }
            other => panic!("expected text node, got {other:?}"),
        }
    }

    #[test]
    fn text_above_all_shapes() {
        let r = record(concat!(
            "{\"kind\":\"object\",\"id\":\"a\",\"count\":2}\n",
            "{\"kind\":\"text\",\"id\":\"t\",\"content\":\"hi\"}\n",
        ));
        let ir = compile(&r, &solve(&r).unwrap()).unwrap();
        let text_z = ir.node("t").unwrap().z;
        for node in ir.flat_nodes() {
            if node.id != "t" {
                assert!(node.z < text_z);
            }
        }
    }

    #[test]
    fn overflowing_text_region_is_a_compile_error() {
        let r = record(
            "{\"kind\":\"text\",\"id\":\"t\",\"content\":\"hi\",\"region\":[0.9,0.0,0.2,0.1]}\n",
        );
        let err = compile(&r, &solve(&r).unwrap()).unwrap_err();
        assert_eq!(err, CompileError::GeometryOverflow { id: "t".to_string() });
    }

    #[test]
    fn polygon_hint_makes_a_diamond_with_bbox_hull() {
        let r = record(
            "{\"kind\":\"object\",\"id\":\"gem\",\"shape_hint\":\"polygon\"}\n",
        );
        let layout = solve(&r).unwrap();
        let ir = compile(&r, &layout).unwrap();
        let node = ir.node("gem#0").unwrap();
        let hull = node.bbox().unwrap();
        let placed = layout.placement("gem#0").unwrap().bbox;
        assert!((hull.x - placed.x).abs() < 1e-9);
        assert!((hull.w - placed.w).abs() < 1e-9);
    }
}
