//! Independent placement oracle. Written straight from the constraint
//! semantics, deliberately not sharing predicate code with the solver.

use std::collections::{BTreeMap, BTreeSet};

use super::{LayoutSolution, Placement, SolveParams};
use crate::scene::{RelationKind, SceneRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("solution does not match record expansion: {0}")]
pub struct InstanceMismatch(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Canonical constraint key: `left_of(a,b)`, `disjoint(a#0,b#1)`,
    /// `bounds(a#0)`.
    pub constraint: String,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

pub fn check_placement(
    solution: &LayoutSolution,
    record: &SceneRecord,
) -> Result<Vec<Violation>, InstanceMismatch> {
    check_placement_with(solution, record, SolveParams::default())
}

/// Empty list iff every constraint of `record` holds for `solution`:
/// all-pairs relation semantics over expanded instances, plus pairwise
/// disjointness for instances whose specs are not linked by
/// `occludes`/`inside`, plus canvas bounds.
pub fn check_placement_with(
    solution: &LayoutSolution,
    record: &SceneRecord,
    params: SolveParams,
) -> Result<Vec<Violation>, InstanceMismatch> {
    let mut expected: BTreeSet<String> = BTreeSet::new();
    for obj in &record.objects {
        for k in 0..obj.count {
            expected.insert(format!("{}#{k}", obj.id));
        }
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for p in &solution.placements {
        if !seen.insert(p.instance_id.clone()) {
            return Err(InstanceMismatch(format!(
                "duplicate instance '{}'",
                p.instance_id
            )));
        }
    }
    if expected != seen {
        let missing: Vec<_> = expected.difference(&seen).cloned().collect();
        let surplus: Vec<_> = seen.difference(&expected).cloned().collect();
        return Err(InstanceMismatch(format!(
            "missing [{}], surplus [{}]",
            missing.join(", "),
            surplus.join(", ")
        )));
    }

    let mut violations = Vec::new();
    let width = f64::from(record.canvas.width);
    let height = f64::from(record.canvas.height);

    for p in &solution.placements {
        let b = &p.bbox;
        if b.w <= 0.0
            || b.h <= 0.0
            || b.min_x() < 0.0
            || b.min_y() < 0.0
            || b.max_x() > width
            || b.max_y() > height
        {
            violations.push(Violation {
                constraint: format!("bounds({})", p.instance_id),
                detail: format!(
                    "bbox ({:.2},{:.2},{:.2},{:.2}) escapes {width}x{height}",
                    b.x, b.y, b.w, b.h
                ),
            });
        }
    }

    let mut by_object: BTreeMap<&str, Vec<&Placement>> = BTreeMap::new();
    for p in &solution.placements {
        by_object.entry(p.object_id()).or_default().push(p);
    }
    let empty: Vec<&Placement> = Vec::new();

    let near_limit = params.near_ratio * record.canvas.min_dim();
    for rel in &record.relations {
        let subjects = by_object.get(rel.subject.as_str()).unwrap_or(&empty);
        let objects = by_object.get(rel.object.as_str()).unwrap_or(&empty);
        for a in subjects {
            for b in objects {
                let ok = match rel.kind {
                    RelationKind::LeftOf => {
                        a.bbox.center().x < b.bbox.center().x
                            && a.bbox.max_x() < b.bbox.min_x()
                    }
                    RelationKind::Above => {
                        a.bbox.center().y < b.bbox.center().y
                            && a.bbox.max_y() < b.bbox.min_y()
                    }
                    RelationKind::Inside => a.bbox.strictly_inside(&b.bbox),
                    RelationKind::Near => {
                        a.bbox.center().distance(&b.bbox.center()) <= near_limit
                    }
                    RelationKind::Occludes => {
                        a.bbox.intersection_area(&b.bbox)
                            >= params.min_occlusion_overlap * a.bbox.area()
                            && a.z > b.z
                    }
                };
                if !ok {
                    violations.push(Violation {
                        constraint: rel.describe(),
                        detail: format!(
                            "instances {} vs {}",
                            a.instance_id, b.instance_id
                        ),
                    });
                }
            }
        }
    }

    // Spec pairs excused from disjointness by an occludes/inside link.
    let mut linked: BTreeSet<(&str, &str)> = BTreeSet::new();
    for rel in &record.relations {
        if matches!(rel.kind, RelationKind::Occludes | RelationKind::Inside) {
            linked.insert((rel.subject.as_str(), rel.object.as_str()));
            linked.insert((rel.object.as_str(), rel.subject.as_str()));
        }
    }
    for (i, a) in solution.placements.iter().enumerate() {
        for b in solution.placements.iter().skip(i + 1) {
            if linked.contains(&(a.object_id(), b.object_id())) {
                continue;
            }
            if a.bbox.intersection_area(&b.bbox) > 0.0 {
                violations.push(Violation {
                    constraint: format!("disjoint({},{})", a.instance_id, b.instance_id),
                    detail: format!(
                        "overlap area {:.2}",
                        a.bbox.intersection_area(&b.bbox)
                    ),
                });
            }
        }
    }

    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::scene::parse_records;

    fn record(lines: &str) -> SceneRecord {
        parse_records(lines.as_bytes()).unwrap()
    }

    fn place(id: &str, x: f64, y: f64, w: f64, h: f64, z: i64) -> Placement {
        Placement {
            instance_id: id.to_string(),
            bbox: Rect::new(x, y, w, h),
            z,
        }
    }

    #[test]
    fn reversed_pair_violates_left_of() {
        let r = record(concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"left_of\",\"subject\":\"a\",\"object\":\"b\"}\n",
        ));
        let solution = LayoutSolution {
            placements: vec![
                place("a#0", 700.0, 100.0, 100.0, 100.0, 0),
                place("b#0", 100.0, 100.0, 100.0, 100.0, 1),
            ],
            seed: 0,
            iterations_used: 0,
        };
        let violations = check_placement(&solution, &r).unwrap();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].constraint, "left_of(a,b)");
    }

    #[test]
    fn satisfying_pair_passes() {
        let r = record(concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"left_of\",\"subject\":\"a\",\"object\":\"b\"}\n",
        ));
        let solution = LayoutSolution {
            placements: vec![
                place("a#0", 100.0, 100.0, 100.0, 100.0, 0),
                place("b#0", 300.0, 100.0, 100.0, 100.0, 1),
            ],
            seed: 0,
            iterations_used: 0,
        };
        assert!(check_placement(&solution, &r).unwrap().is_empty());
    }

    #[test]
    fn empty_record_demands_empty_solution() {
        let r = record("{\"kind\":\"text\",\"id\":\"t\",\"content\":\"hi\"}\n");
        let empty = LayoutSolution { placements: vec![], seed: 0, iterations_used: 0 };
        assert!(check_placement(&empty, &r).unwrap().is_empty());
        let stray = LayoutSolution {
            placements: vec![place("a#0", 0.0, 0.0, 10.0, 10.0, 0)],
            seed: 0,
            iterations_used: 0,
        };
        assert!(check_placement(&stray, &r).is_err());
    }

    #[test]
    fn overlap_without_link_is_flagged() {
        let r = record(concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
        ));
        let solution = LayoutSolution {
            placements: vec![
                place("a#0", 100.0, 100.0, 100.0, 100.0, 0),
                place("b#0", 150.0, 150.0, 100.0, 100.0, 1),
            ],
            seed: 0,
            iterations_used: 0,
        };
        let violations = check_placement(&solution, &r).unwrap();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].constraint, "disjoint(a#0,b#0)");
    }

    #[test]
    fn occlusion_needs_overlap_and_z() {
        let r = record(concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"occludes\",\"subject\":\"a\",\"object\":\"b\"}\n",
        ));
        // Full overlap but wrong z order.
        let solution = LayoutSolution {
            placements: vec![
                place("a#0", 120.0, 120.0, 100.0, 100.0, 0),
                place("b#0", 100.0, 100.0, 200.0, 200.0, 1),
            ],
            seed: 0,
            iterations_used: 0,
        };
        let violations = check_placement(&solution, &r).unwrap();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].constraint, "occludes(a,b)");

        let solution = LayoutSolution {
            placements: vec![
                place("a#0", 120.0, 120.0, 100.0, 100.0, 2),
                place("b#0", 100.0, 100.0, 200.0, 200.0, 1),
            ],
            seed: 0,
            iterations_used: 0,
        };
        assert!(check_placement(&solution, &r).unwrap().is_empty());
    }

    #[test]
    fn out_of_bounds_bbox_is_flagged() {
        let r = record("{\"kind\":\"object\",\"id\":\"a\"}\n");
        let solution = LayoutSolution {
            placements: vec![place("a#0", 1000.0, 10.0, 100.0, 100.0, 0)],
            seed: 0,
            iterations_used: 0,
        };
        let violations = check_placement(&solution, &r).unwrap();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].constraint, "bounds(a#0)");
    }
}
