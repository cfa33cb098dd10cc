//! Small analytic physics used to draft condition sketches: reflections,
//! Hooke springs, Torricelli jets, and Archimedes flotation, plus the
//! annotation pass that splices their geometry into a canvas as extra
//! labeled nodes. Everything is pure and closed-form.

use thiserror::Error;

use crate::canvas::{CanvasIR, CanvasNode, NodeKind};
use crate::geom::{Line, Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsConfig {
    /// Gravitational acceleration, m/s²; must be positive.
    pub g: f64,
}

impl Default for PhysicsConfig {
    fn default() -> PhysicsConfig {
        PhysicsConfig { g: 9.81 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PhysicsError {
    #[error("mirror line has zero-length direction")]
    DegenerateLine,
    #[error("spring stiffness must be positive, got {0}")]
    NonpositiveStiffness(f64),
    #[error("jet geometry invalid: hole height {hole} vs surface height {surface}")]
    InvalidGeometry { hole: f64, surface: f64 },
    #[error("densities must be positive")]
    NonpositiveDensity,
    #[error("annotation `{0}` leaves the canvas")]
    GeometryOverflow(String),
    #[error("no node with id `{0}`")]
    UnknownNode(String),
}

/// Reflect a point across a line; the direction is normalized internally.
pub fn mirror_reflect(p: Point, mirror: &Line) -> Result<Point, PhysicsError> {
    let len = (mirror.direction.x * mirror.direction.x
        + mirror.direction.y * mirror.direction.y)
        .sqrt();
    if len < 1e-12 {
        return Err(PhysicsError::DegenerateLine);
    }
    let (dx, dy) = (mirror.direction.x / len, mirror.direction.y / len);
    let rel_x = p.x - mirror.point.x;
    let rel_y = p.y - mirror.point.y;
    let along = rel_x * dx + rel_y * dy;
    let foot_x = mirror.point.x + along * dx;
    let foot_y = mirror.point.y + along * dy;
    Ok(Point { x: 2.0 * foot_x - p.x, y: 2.0 * foot_y - p.y })
}

/// Hooke's law: extension = F / k, sign preserved.
pub fn spring_extension(force: f64, stiffness: f64) -> Result<f64, PhysicsError> {
    if stiffness <= 0.0 {
        return Err(PhysicsError::NonpositiveStiffness(stiffness));
    }
    Ok(force / stiffness)
}

/// Horizontal range of water jetting from a hole at height `hole_height` in
/// a tank filled to `surface_height`: Torricelli efflux times fall time,
/// which collapses to 2·sqrt(h·(H−h)) — independent of g.
pub fn jet_range(
    surface_height: f64,
    hole_height: f64,
    config: &PhysicsConfig,
) -> Result<f64, PhysicsError> {
    if !(hole_height >= 0.0 && hole_height < surface_height) || config.g <= 0.0 {
        return Err(PhysicsError::InvalidGeometry { hole: hole_height, surface: surface_height });
    }
    Ok(2.0 * (hole_height * (surface_height - hole_height)).sqrt())
}

/// Archimedes: submerged volume fraction and whether the object floats.
/// Denser-than-fluid objects sink fully submerged (fraction 1).
pub fn buoyant_fraction(rho_object: f64, rho_fluid: f64) -> Result<(f64, bool), PhysicsError> {
    if rho_object <= 0.0 || rho_fluid <= 0.0 {
        return Err(PhysicsError::NonpositiveDensity);
    }
    if rho_object <= rho_fluid {
        Ok((rho_object / rho_fluid, true))
    } else {
        Ok((1.0, false))
    }
}

/// Points along the jet's parabola, from the hole to the landing point, in
/// fall-fraction parametrization (g cancels here too).
const JET_SAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum Annotation {
    /// Mirrored twin of an existing node; the twin's label gains a
    /// `:reflection` suffix. The mirror line is in pixel space.
    Reflection { source: String, mirror: Line },
    /// Zigzag spring hanging from `anchor`, stretched by `force / stiffness`
    /// beyond `natural_length` (meters), plus a tick marking natural length.
    Spring {
        id: String,
        anchor: Point,
        force: f64,
        stiffness: f64,
        natural_length: f64,
        pixels_per_meter: f64,
    },
    /// Parabolic arc from a tank hole to the landing point.
    JetArc {
        id: String,
        hole: Point,
        surface_height: f64,
        hole_height: f64,
        pixels_per_meter: f64,
    },
    /// Horizontal waterline across a floating node's bounding box.
    Waterline { id: String, target: String, rho_object: f64, rho_fluid: f64 },
}

/// Add one physics annotation to a canvas. Existing nodes are carried over
/// untouched; only new nodes appear.
pub fn annotate_sketch(ir: &CanvasIR, annotation: &Annotation) -> Result<CanvasIR, PhysicsError> {
    let mut out = ir.clone();
    let top_z = out.flat_nodes().iter().map(|n| n.z).max().unwrap_or(0);
    let added = match annotation {
        Annotation::Reflection { source, mirror } => {
            let node = lookup(ir, source)?;
            let bbox = node
                .bbox()
                .ok_or_else(|| PhysicsError::UnknownNode(source.clone()))?;
            let center = mirror_reflect(bbox.center(), mirror)?;
            let twin_bbox = Rect::from_center(center.x, center.y, bbox.w, bbox.h);
            let kind = match &node.kind {
                NodeKind::Ellipse { .. } => NodeKind::Ellipse { bbox: twin_bbox },
                NodeKind::Polygon { points } => NodeKind::Polygon {
                    points: points
                        .iter()
                        .map(|&p| mirror_reflect(p, mirror))
                        .collect::<Result<_, _>>()?,
                },
                _ => NodeKind::Rect { bbox: twin_bbox },
            };
            vec![CanvasNode {
                id: format!("{source}:reflection"),
                kind,
                label: node.label.as_ref().map(|l| format!("{l}:reflection")),
                color: node.color,
                z: node.z,
            }]
        }
        Annotation::Spring { id, anchor, force, stiffness, natural_length, pixels_per_meter } => {
            let extension = spring_extension(*force, *stiffness)?;
            let length_px = (natural_length + extension) * pixels_per_meter;
            let natural_px = natural_length * pixels_per_meter;
            let amp = 6.0;
            let mut points = vec![*anchor];
            for k in 1..=8 {
                let off = if k % 2 == 1 { amp } else { -amp };
                points.push(Point {
                    x: anchor.x + off,
                    y: anchor.y + length_px * f64::from(k) / 9.0,
                });
            }
            points.push(Point { x: anchor.x, y: anchor.y + length_px });
            let tick_y = anchor.y + natural_px;
            vec![
                CanvasNode {
                    id: id.clone(),
                    kind: NodeKind::Polygon { points },
                    label: Some("spring".to_string()),
                    color: None,
                    z: top_z + 1,
                },
                CanvasNode {
                    id: format!("{id}:natural"),
                    kind: NodeKind::Polygon {
                        points: vec![
                            Point { x: anchor.x - 8.0, y: tick_y },
                            Point { x: anchor.x + 8.0, y: tick_y },
                        ],
                    },
                    label: Some("spring:natural".to_string()),
                    color: None,
                    z: top_z + 2,
                },
            ]
        }
        Annotation::JetArc { id, hole, surface_height, hole_height, pixels_per_meter } => {
            let range = jet_range(*surface_height, *hole_height, &PhysicsConfig::default())?;
            let points = (0..JET_SAMPLES)
                .map(|i| {
                    let f = i as f64 / (JET_SAMPLES - 1) as f64;
                    Point {
                        x: hole.x + range * f * pixels_per_meter,
                        y: hole.y + hole_height * f * f * pixels_per_meter,
                    }
                })
                .collect();
            vec![CanvasNode {
                id: id.clone(),
                kind: NodeKind::Polygon { points },
                label: Some("jet".to_string()),
                color: None,
                z: top_z + 1,
            }]
        }
        Annotation::Waterline { id, target, rho_object, rho_fluid } => {
            let (fraction, _floats) = buoyant_fraction(*rho_object, *rho_fluid)?;
            let node = lookup(ir, target)?;
            let bbox = node
                .bbox()
                .ok_or_else(|| PhysicsError::UnknownNode(target.clone()))?;
            let y = bbox.max_y() - fraction * bbox.h;
            vec![CanvasNode {
                id: id.clone(),
                kind: NodeKind::Polygon {
                    points: vec![
                        Point { x: bbox.min_x(), y },
                        Point { x: bbox.max_x(), y },
                    ],
                },
                label: Some("waterline".to_string()),
                color: Some(crate::Color::Blue),
                z: top_z + 1,
            }]
        }
    };

    let (w, h) = (f64::from(ir.width), f64::from(ir.height));
    for node in added {
        if let Some(bbox) = node.bbox() {
            if bbox.min_x() < 0.0 || bbox.min_y() < 0.0 || bbox.max_x() > w || bbox.max_y() > h {
                return Err(PhysicsError::GeometryOverflow(node.id));
            }
        }
        out.nodes.push(node);
    }
    out.nodes.sort_by(|a, b| (a.z, &a.id).cmp(&(b.z, &b.id)));
    Ok(out)
}

fn lookup<'a>(ir: &'a CanvasIR, id: &str) -> Result<&'a CanvasNode, PhysicsError> {
    ir.node(id).ok_or_else(|| PhysicsError::UnknownNode(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::verify::diff_canvases;

    fn vertical_mirror() -> Line {
        Line { point: Point { x: 0.0, y: 0.0 }, direction: Point { x: 0.0, y: 1.0 } }
    }

    #[test]
    fn reflection_across_the_y_axis_negates_x() {
        let p = mirror_reflect(Point { x: 3.0, y: 2.0 }, &vertical_mirror()).unwrap();
        assert!((p.x + 3.0).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn points_on_the_mirror_are_fixed() {
        let p = mirror_reflect(Point { x: 0.0, y: 7.5 }, &vertical_mirror()).unwrap();
        assert!((p.x).abs() < 1e-12 && (p.y - 7.5).abs() < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution_and_preserves_distance() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..50 {
            let p = Point { x: rng.range_f64(-50.0, 50.0), y: rng.range_f64(-50.0, 50.0) };
            let mirror = Line {
                point: Point { x: rng.range_f64(-10.0, 10.0), y: rng.range_f64(-10.0, 10.0) },
                direction: Point { x: rng.range_f64(-1.0, 1.0), y: rng.range_f64(0.1, 1.0) },
            };
            let q = mirror_reflect(p, &mirror).unwrap();
            let back = mirror_reflect(q, &mirror).unwrap();
            assert!((back.x - p.x).abs() < 1e-12 && (back.y - p.y).abs() < 1e-12);

            // The midpoint of p and its image is the foot on the mirror, so
            // both sit at equal distance from the line.
            let foot = Point { x: (p.x + q.x) / 2.0, y: (p.y + q.y) / 2.0 };
            let on_line = mirror_reflect(foot, &mirror).unwrap();
            assert!(foot.distance(&on_line) < 1e-9);
            assert!((foot.distance(&p) - foot.distance(&q)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_direction_is_degenerate() {
        let line = Line { point: Point { x: 0.0, y: 0.0 }, direction: Point { x: 0.0, y: 0.0 } };
        assert_eq!(
            mirror_reflect(Point { x: 1.0, y: 1.0 }, &line),
            Err(PhysicsError::DegenerateLine)
        );
    }

    #[test]
    fn hooke_closed_form_and_linearity() {
        assert_eq!(spring_extension(10.0, 200.0).unwrap(), 0.05);
        assert_eq!(spring_extension(0.0, 123.0).unwrap(), 0.0);
        assert_eq!(spring_extension(-4.0, 8.0).unwrap(), -0.5);
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let f = rng.range_f64(-100.0, 100.0);
            let k = rng.range_f64(1.0, 500.0);
            let once = spring_extension(f, k).unwrap();
            let twice = spring_extension(2.0 * f, k).unwrap();
            assert!((twice - 2.0 * once).abs() < 1e-12);
        }
        assert!(matches!(
            spring_extension(1.0, 0.0),
            Err(PhysicsError::NonpositiveStiffness(_))
        ));
    }

    #[test]
    fn jet_range_matches_numeric_projectile_integration() {
        let cfg = PhysicsConfig::default();
        let closed = jet_range(1.0, 0.5, &cfg).unwrap();
        assert!((closed - 1.0).abs() < 1e-12);

        // Explicit Euler with end-of-flight interpolation, step 1e-5 s.
        let g = cfg.g;
        let v = (2.0 * g * (1.0 - 0.5)).sqrt();
        let dt = 1e-5;
        let (mut x, mut y, mut vy) = (0.0, 0.5, 0.0);
        loop {
            let ny = y + vy * dt;
            if ny <= 0.0 {
                let frac = y / (y - ny);
                x += v * dt * frac;
                break;
            }
            y = ny;
            vy -= g * dt;
            x += v * dt;
        }
        assert!((closed - x).abs() < 1e-4, "closed {closed} vs integrated {x}");
    }

    #[test]
    fn jet_range_edge_cases_and_g_independence() {
        let base = jet_range(2.0, 0.7, &PhysicsConfig { g: 9.81 }).unwrap();
        for g in [1.0, 25.0] {
            assert_eq!(jet_range(2.0, 0.7, &PhysicsConfig { g }).unwrap(), base);
        }
        assert_eq!(jet_range(1.0, 0.0, &PhysicsConfig::default()).unwrap(), 0.0);
        assert!(jet_range(1.0, 1.0, &PhysicsConfig::default()).is_err());
        assert!(jet_range(1.0, -0.1, &PhysicsConfig::default()).is_err());
    }

    #[test]
    fn jet_range_peaks_at_half_the_surface_height() {
        let cfg = PhysicsConfig::default();
        let surface = 3.0;
        let mut best = (0.0, 0.0);
        for i in 1..10_000 {
            let h = surface * i as f64 / 10_000.0;
            let r = jet_range(surface, h, &cfg).unwrap();
            if r > best.1 {
                best = (h, r);
            }
        }
        assert!((best.0 - surface / 2.0).abs() < surface / 1_000.0);
        assert!((best.1 - surface).abs() < 1e-3);
    }

    #[test]
    fn buoyancy_closed_forms() {
        assert_eq!(buoyant_fraction(917.0, 1000.0).unwrap(), (0.917, true));
        assert_eq!(buoyant_fraction(500.0, 500.0).unwrap(), (1.0, true));
        assert_eq!(buoyant_fraction(7850.0, 1000.0).unwrap(), (1.0, false));
        assert_eq!(buoyant_fraction(0.0, 1.0), Err(PhysicsError::NonpositiveDensity));
        assert_eq!(buoyant_fraction(1.0, -2.0), Err(PhysicsError::NonpositiveDensity));
    }

    fn base_ir() -> CanvasIR {
        CanvasIR::new(
            400,
            300,
            vec![CanvasNode {
                id: "cup#0".to_string(),
                kind: NodeKind::Rect { bbox: Rect::new(40.0, 100.0, 40.0, 40.0) },
                label: Some("cup".to_string()),
                color: Some(crate::Color::Red),
                z: 0,
            }],
        )
    }

    #[test]
    fn reflection_annotation_mirrors_the_source_center() {
        let ir = base_ir();
        let mirror = Line {
            point: Point { x: 200.0, y: 0.0 },
            direction: Point { x: 0.0, y: 1.0 },
        };
        let annotated = annotate_sketch(
            &ir,
            &Annotation::Reflection { source: "cup#0".to_string(), mirror },
        )
        .unwrap();

        let twin = annotated.node("cup#0:reflection").unwrap();
        assert_eq!(twin.label.as_deref(), Some("cup:reflection"));
        let src_center = ir.node("cup#0").unwrap().bbox().unwrap().center();
        let expected = mirror_reflect(src_center, &mirror).unwrap();
        let got = twin.bbox().unwrap().center();
        assert!((got.x - expected.x).abs() < 1e-9 && (got.y - expected.y).abs() < 1e-9);

        let diff = diff_canvases(&ir, &annotated);
        assert_eq!(diff.added, vec!["cup#0:reflection".to_string()]);
        assert!(diff.removed.is_empty() && diff.moved.is_empty() && diff.recolored.is_empty());
    }

    #[test]
    fn jet_arc_runs_from_hole_to_landing_point() {
        let ir = base_ir();
        let hole = Point { x: 100.0, y: 50.0 };
        let annotated = annotate_sketch(
            &ir,
            &Annotation::JetArc {
                id: "jet".to_string(),
                hole,
                surface_height: 1.0,
                hole_height: 0.5,
                pixels_per_meter: 100.0,
            },
        )
        .unwrap();
        let NodeKind::Polygon { points } = &annotated.node("jet").unwrap().kind else {
            panic!("jet arc should be a polygon")
        };
        assert_eq!(points.len(), 32);
        assert_eq!((points[0].x, points[0].y), (hole.x, hole.y));
        let range = jet_range(1.0, 0.5, &PhysicsConfig::default()).unwrap();
        let last = points[31];
        assert!((last.x - (hole.x + range * 100.0)).abs() < 1e-9);
        assert!((last.y - (hole.y + 0.5 * 100.0)).abs() < 1e-9);
    }

    #[test]
    fn zero_extension_spring_ends_at_the_natural_length_tick() {
        let ir = base_ir();
        let annotated = annotate_sketch(
            &ir,
            &Annotation::Spring {
                id: "spring".to_string(),
                anchor: Point { x: 200.0, y: 20.0 },
                force: 0.0,
                stiffness: 50.0,
                natural_length: 1.5,
                pixels_per_meter: 100.0,
            },
        )
        .unwrap();
        let NodeKind::Polygon { points } = &annotated.node("spring").unwrap().kind else {
            panic!()
        };
        let NodeKind::Polygon { points: tick } = &annotated.node("spring:natural").unwrap().kind
        else {
            panic!()
        };
        assert_eq!(points.last().unwrap().y, tick[0].y);
        assert_eq!(points.last().unwrap().y, 20.0 + 150.0);
    }

    #[test]
    fn waterline_sits_at_the_submerged_fraction() {
        let ir = base_ir();
        let annotated = annotate_sketch(
            &ir,
            &Annotation::Waterline {
                id: "wl".to_string(),
                target: "cup#0".to_string(),
                rho_object: 500.0,
                rho_fluid: 1000.0,
            },
        )
        .unwrap();
        let NodeKind::Polygon { points } = &annotated.node("wl").unwrap().kind else { panic!() };
        // bbox spans y in [100, 140]; half submerged puts the line at 120.
        assert_eq!(points[0].y, 120.0);
        assert_eq!(points[0].x, 40.0);
        assert_eq!(points[1].x, 80.0);
    }

    #[test]
    fn annotations_that_leave_the_canvas_overflow() {
        let ir = base_ir();
        let err = annotate_sketch(
            &ir,
            &Annotation::JetArc {
                id: "jet".to_string(),
                hole: Point { x: 380.0, y: 280.0 },
                surface_height: 1.0,
                hole_height: 0.5,
                pixels_per_meter: 100.0,
            },
        )
        .unwrap_err();
        assert_eq!(err, PhysicsError::GeometryOverflow("jet".to_string()));
    }

    #[test]
    fn annotations_never_touch_existing_nodes() {
        let ir = base_ir();
        let annotated = annotate_sketch(
            &ir,
            &Annotation::Waterline {
                id: "wl".to_string(),
                target: "cup#0".to_string(),
                rho_object: 917.0,
                rho_fluid: 1000.0,
            },
        )
        .unwrap();
        assert_eq!(annotated.node("cup#0"), ir.node("cup#0"));
        assert_eq!(annotated.nodes.len(), ir.nodes.len() + 1);
    }
}
