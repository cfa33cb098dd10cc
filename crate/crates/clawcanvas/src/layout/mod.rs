//! Constraint layout: deterministic placement of every object instance.
//!
//! [`solve`] turns a validated record into concrete pixel boxes plus z order;
//! [`check_placement`] is a separately written oracle for the same constraint
//! semantics, used by tests and by the verifier. The two must never share
//! predicate code — agreement between them is the module's evidence of
//! correctness.

mod check;
mod solver;

pub use check::{check_placement, check_placement_with, InstanceMismatch, Violation};
pub use solver::{solve, solve_with};

use crate::geom::Rect;

/// Hard ceiling on expanded instances per record.
pub const MAX_INSTANCES: u32 = 64;

/// Solver/checker constants. Defaults are the contract; the CLI can override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveParams {
    /// `near(a,b)` holds when center distance <= near_ratio * min(canvas w,h).
    pub near_ratio: f64,
    /// `occludes(a,b)` requires overlap >= this fraction of the occluder area.
    pub min_occlusion_overlap: f64,
    /// Re-sample budget for the repair loop.
    pub repair_budget: u32,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            near_ratio: 0.25,
            min_occlusion_overlap: 0.2,
            repair_budget: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// `<object_id>#<k>`, k counting from 0 within the spec.
    pub instance_id: String,
    pub bbox: Rect,
    /// Rendering order; higher is nearer the viewer.
    pub z: i64,
}

impl Placement {
    pub fn object_id(&self) -> &str {
        match self.instance_id.split_once('#') {
            Some((id, _)) => id,
            None => &self.instance_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutSolution {
    pub placements: Vec<Placement>,
    pub seed: u64,
    pub iterations_used: u32,
}

impl LayoutSolution {
    pub fn placement(&self, instance_id: &str) -> Option<&Placement> {
        self.placements.iter().find(|p| p.instance_id == instance_id)
    }

    /// `*.layout.json`: one document, alphabetical keys, 2-decimal coordinates.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = String::from("{");
        out.push_str(&format!("\"iterations_used\":{},", self.iterations_used));
        out.push_str("\"placements\":[");
        for (i, p) in self.placements.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"h\":{:.2},\"instance_id\":{},\"w\":{:.2},\"x\":{:.2},\"y\":{:.2},\"z\":{}}}",
                p.bbox.h,
                serde_json::Value::from(p.instance_id.clone()),
                p.bbox.w,
                p.bbox.x,
                p.bbox.y,
                p.z,
            ));
        }
        out.push_str(&format!("],\"seed\":{}}}\n", self.seed));
        out.into_bytes()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("unsatisfiable after repair budget: [{}]", .0.join("; "))]
    Unsatisfiable(Vec<String>),
    #[error("{0} instances exceed the {MAX_INSTANCES}-instance limit")]
    InstanceOverflow(u32),
}
