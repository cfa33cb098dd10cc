//! Pre-solve feasibility checks.

use std::collections::BTreeMap;

use super::{RelationKind, SceneRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    /// Precedence cycle among the ids on one spatial axis.
    CyclicConstraint { axis: Axis, ids: Vec<String> },
    /// Containment cycle (`inside` digraph).
    CyclicInside { ids: Vec<String> },
    /// Occlusion cycle; z-order cannot satisfy it.
    OcclusionCycle { ids: Vec<String> },
    /// Text region escapes the unit square.
    TextRegionOverflow { id: String },
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationIssue::CyclicConstraint { axis, ids } => {
                write!(f, "cyclic {}-axis constraint among [{}]", axis.name(), ids.join(", "))
            }
            ValidationIssue::CyclicInside { ids } => {
                write!(f, "cyclic containment among [{}]", ids.join(", "))
            }
            ValidationIssue::OcclusionCycle { ids } => {
                write!(f, "cyclic occlusion among [{}]", ids.join(", "))
            }
            ValidationIssue::TextRegionOverflow { id } => {
                write!(f, "text '{id}' region escapes the unit square")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Report structural problems that would make [`crate::layout::solve`]
/// hopeless: cycles in the per-axis precedence graphs, in `inside`, or in
/// `occludes`, plus text regions that leave the unit square.
pub fn validate(record: &SceneRecord) -> ValidationReport {
    let mut issues = Vec::new();

    for (kind, make) in [
        (RelationKind::LeftOf, cyclic_axis(Axis::X) as fn(Vec<String>) -> ValidationIssue),
        (RelationKind::Above, cyclic_axis(Axis::Y)),
        (RelationKind::Inside, |ids| ValidationIssue::CyclicInside { ids }),
        (RelationKind::Occludes, |ids| ValidationIssue::OcclusionCycle { ids }),
    ] {
        issues.extend(cycles_of_kind(record, kind).into_iter().map(make));
    }

    for text in &record.texts {
        let r = &text.region;
        if r.x < 0.0 || r.y < 0.0 || r.x + r.w > 1.0 || r.y + r.h > 1.0 {
            issues.push(ValidationIssue::TextRegionOverflow { id: text.id.clone() });
        }
    }

    ValidationReport { issues }
}

fn cyclic_axis(axis: Axis) -> fn(Vec<String>) -> ValidationIssue {
    match axis {
        Axis::X => |ids| ValidationIssue::CyclicConstraint { axis: Axis::X, ids },
        Axis::Y => |ids| ValidationIssue::CyclicConstraint { axis: Axis::Y, ids },
    }
}

/// One sorted id list per strongly connected component of size > 1 in the
/// digraph restricted to `kind`.
fn cycles_of_kind(record: &SceneRecord, kind: RelationKind) -> Vec<Vec<String>> {
    let mut index_of: BTreeMap<String, usize> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for rel in record.relations.iter().filter(|r| r.kind == kind) {
        let mut node = |id: &str, names: &mut Vec<String>, adj: &mut Vec<Vec<usize>>| {
            *index_of.entry(id.to_string()).or_insert_with(|| {
                names.push(id.to_string());
                adj.push(Vec::new());
                names.len() - 1
            })
        };
        let s = node(&rel.subject, &mut names, &mut adj);
        let o = node(&rel.object, &mut names, &mut adj);
        adj[s].push(o);
    }

    let mut out: Vec<Vec<String>> = strongly_connected(&adj)
        .into_iter()
        .filter(|comp| comp.len() > 1)
        .map(|comp| {
            let mut ids: Vec<String> = comp.iter().map(|&i| names[i].clone()).collect();
            ids.sort();
            ids
        })
        .collect();
    out.sort();
    out
}

/// Iterative Tarjan; returns components in discovery order.
fn strongly_connected(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut components = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, ei)) = work.last() {
            if ei == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if ei < adj[v].len() {
                let w = adj[v][ei];
                work.last_mut().unwrap().1 += 1;
                if index[w] == usize::MAX {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
            }
        }
    }
    components
}
