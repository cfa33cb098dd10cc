//! Banded jitter-and-repair placement.
//!
//! Pipeline: expand counts to instances, topologically band the axis
//! precedence DAGs, jitter inside bands with the seeded PRNG, then run a
//! repair loop that re-samples the first violating instance until every
//! constraint holds or the budget dies. All fixes sample from the tightest
//! domain still known to be compatible (containment interior, occlusion box,
//! band, canvas fit), so repairs rarely fight each other.

use std::collections::{BTreeMap, BTreeSet};

use super::{LayoutSolution, Placement, SolveError, SolveParams, MAX_INSTANCES};
use crate::geom::Rect;
use crate::rng::SplitMix64;
use crate::scene::{validate, Axis, RelationKind, SceneRecord, ValidationIssue};

const MARGIN_RATIO: f64 = 0.04;
/// Pixel gap inserted wherever the checker demands a strict inequality.
const GAP: f64 = 1.0;
/// Max center offset factor for occlusion fixes; yields >= 0.3 overlap,
/// comfortably above the 0.2 the checker requires.
const OCCLUSION_ALPHA: f64 = 0.55;

pub fn solve(record: &SceneRecord) -> Result<LayoutSolution, SolveError> {
    solve_with(record, SolveParams::default())
}

pub fn solve_with(record: &SceneRecord, params: SolveParams) -> Result<LayoutSolution, SolveError> {
    // Cyclic constraint graphs are unsatisfiable outright; text-region issues
    // do not affect object placement and are left to the compiler gate.
    let cycles: Vec<String> = validate(record)
        .issues
        .iter()
        .filter(|issue| !matches!(issue, ValidationIssue::TextRegionOverflow { .. }))
        .map(|issue| issue.to_string())
        .collect();
    if !cycles.is_empty() {
        return Err(SolveError::Unsatisfiable(cycles));
    }

    let total = record.total_instances();
    if total > MAX_INSTANCES {
        return Err(SolveError::InstanceOverflow(total));
    }

    let mut state = State::new(record, params);
    state.initial_positions();

    let mut iterations = 0u32;
    while let Some(violation) = state.first_violation() {
        if iterations >= params.repair_budget {
            return Err(SolveError::Unsatisfiable(state.violation_keys()));
        }
        iterations += 1;
        state.repair(violation);
    }
    Ok(state.into_solution(iterations))
}

struct Inst {
    spec: usize,
    id: String,
    w: f64,
    h: f64,
    pinned: bool,
}

struct Viol {
    key: String,
    kind: ViolKind,
}

enum ViolKind {
    Relation { rel: usize, a: usize, b: usize },
    Overlap { a: usize, b: usize },
}

struct State<'a> {
    record: &'a SceneRecord,
    params: SolveParams,
    width: f64,
    height: f64,
    insts: Vec<Inst>,
    by_spec: Vec<Vec<usize>>,
    spec_of: BTreeMap<&'a str, usize>,
    centers: Vec<(f64, f64)>,
    band_x: Vec<Option<(f64, f64)>>,
    band_y: Vec<Option<(f64, f64)>>,
    /// Spec pairs excused from disjointness (occludes/inside links).
    linked: BTreeSet<(usize, usize)>,
    /// Containing spec, when the spec is the subject of an `inside`.
    parent_of: Vec<Option<usize>>,
    /// Occluded spec, when the spec is the subject of an `occludes`.
    occludee_of: Vec<Option<usize>>,
    /// Per-violation repair counts; drives which endpoint moves next.
    attempts: BTreeMap<String, u32>,
    rng: SplitMix64,
}

impl<'a> State<'a> {
    fn new(record: &'a SceneRecord, params: SolveParams) -> Self {
        let width = f64::from(record.canvas.width);
        let height = f64::from(record.canvas.height);
        let min_dim = record.canvas.min_dim();

        let mut insts = Vec::new();
        let mut by_spec = Vec::new();
        let mut spec_of = BTreeMap::new();
        for (s, obj) in record.objects.iter().enumerate() {
            spec_of.insert(obj.id.as_str(), s);
            let edge = obj.effective_size().edge_ratio() * min_dim;
            let mut members = Vec::new();
            for k in 0..obj.count {
                members.push(insts.len());
                insts.push(Inst {
                    spec: s,
                    id: format!("{}#{k}", obj.id),
                    w: edge,
                    h: edge,
                    pinned: obj.explicit_position.is_some(),
                });
            }
            by_spec.push(members);
        }

        let nspecs = record.objects.len();
        let mut linked = BTreeSet::new();
        let mut parent_of = vec![None; nspecs];
        let mut occludee_of = vec![None; nspecs];
        for rel in &record.relations {
            let (Some(&s), Some(&o)) = (
                spec_of.get(rel.subject.as_str()),
                spec_of.get(rel.object.as_str()),
            ) else {
                continue;
            };
            match rel.kind {
                RelationKind::Inside => {
                    linked.insert((s, o));
                    linked.insert((o, s));
                    parent_of[s].get_or_insert(o);
                }
                RelationKind::Occludes => {
                    linked.insert((s, o));
                    linked.insert((o, s));
                    occludee_of[s].get_or_insert(o);
                }
                _ => {}
            }
        }

        let n = insts.len();
        let mut state = State {
            record,
            params,
            width,
            height,
            insts,
            by_spec,
            spec_of,
            centers: vec![(0.0, 0.0); n],
            band_x: vec![None; n],
            band_y: vec![None; n],
            linked,
            parent_of,
            occludee_of,
            attempts: BTreeMap::new(),
            rng: SplitMix64::new(record.canvas.seed),
        };
        state.band_x = state.assign_bands(Axis::X);
        state.band_y = state.assign_bands(Axis::Y);
        state
    }

    fn dim(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.width,
            Axis::Y => self.height,
        }
    }

    fn ext(&self, i: usize, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.insts[i].w,
            Axis::Y => self.insts[i].h,
        }
    }

    fn center(&self, i: usize, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.centers[i].0,
            Axis::Y => self.centers[i].1,
        }
    }

    fn set_center(&mut self, i: usize, axis: Axis, v: f64) {
        match axis {
            Axis::X => self.centers[i].0 = v,
            Axis::Y => self.centers[i].1 = v,
        }
    }

    fn band(&self, i: usize, axis: Axis) -> Option<(f64, f64)> {
        match axis {
            Axis::X => self.band_x[i],
            Axis::Y => self.band_y[i],
        }
    }

    /// Center interval keeping the bbox inside the canvas.
    fn fit_range(&self, i: usize, axis: Axis) -> (f64, f64) {
        let half = self.ext(i, axis) / 2.0;
        let dim = self.dim(axis);
        if half * 2.0 >= dim {
            (dim / 2.0, dim / 2.0)
        } else {
            (half, dim - half)
        }
    }

    /// Center interval keeping the bbox inside the 4 %-margined canvas;
    /// falls back to the plain fit range for oversized boxes.
    fn preferred_range(&self, i: usize, axis: Axis) -> (f64, f64) {
        let half = self.ext(i, axis) / 2.0;
        let dim = self.dim(axis);
        let m = MARGIN_RATIO * dim;
        let (lo, hi) = (m + half, dim - m - half);
        if lo <= hi {
            (lo, hi)
        } else {
            self.fit_range(i, axis)
        }
    }

    /// Instance-level precedence DAG for one axis, leveled by longest path
    /// from a source (Kahn), then one shared center band per level over the
    /// margined span. Same-level instances carry no edges between them, so
    /// sharing a band never breaks an ordering; wide per-level bands leave
    /// the repair loop room to separate edges.
    fn assign_bands(&self, axis: Axis) -> Vec<Option<(f64, f64)>> {
        let kind = match axis {
            Axis::X => RelationKind::LeftOf,
            Axis::Y => RelationKind::Above,
        };
        let n = self.insts.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        let mut involved = vec![false; n];
        for rel in self.record.relations.iter().filter(|r| r.kind == kind) {
            let (Some(&s), Some(&o)) = (
                self.spec_of.get(rel.subject.as_str()),
                self.spec_of.get(rel.object.as_str()),
            ) else {
                continue;
            };
            for &ai in &self.by_spec[s] {
                for &bj in &self.by_spec[o] {
                    adj[ai].push(bj);
                    indeg[bj] += 1;
                    involved[ai] = true;
                    involved[bj] = true;
                }
            }
        }

        let mut level = vec![0usize; n];
        let mut max_level = 0usize;
        let mut ready: Vec<usize> =
            (0..n).filter(|&i| involved[i] && indeg[i] == 0).collect();
        while !ready.is_empty() {
            ready.sort_unstable();
            let v = ready.remove(0);
            for &w in &adj[v] {
                level[w] = level[w].max(level[v] + 1);
                max_level = max_level.max(level[w]);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }

        let mut bands = vec![None; n];
        if !(0..n).any(|i| involved[i] && !self.insts[i].pinned) {
            return bands;
        }
        let dim = self.dim(axis);
        let m = MARGIN_RATIO * dim;
        let band_width = (dim - 2.0 * m) / (max_level + 1) as f64;
        for i in 0..n {
            if involved[i] && !self.insts[i].pinned {
                let lo = m + level[i] as f64 * band_width;
                bands[i] = Some((lo, lo + band_width));
            }
        }
        bands
    }

    fn initial_positions(&mut self) {
        // Pinned first: their centers are known and everything else dodges
        // them from the start.
        for i in 0..self.insts.len() {
            if self.insts[i].pinned {
                let obj = &self.record.objects[self.insts[i].spec];
                let (px, py) = obj.explicit_position.unwrap();
                let fx = self.fit_range(i, Axis::X);
                let fy = self.fit_range(i, Axis::Y);
                self.centers[i] = (
                    (px * self.width).clamp(fx.0, fx.1),
                    (py * self.height).clamp(fy.0, fy.1),
                );
            }
        }
        for i in 0..self.insts.len() {
            if !self.insts[i].pinned {
                let spot = self.sample_spot(i, |j, this| j < i || this.insts[j].pinned);
                self.centers[i] = spot;
            }
        }
    }

    fn sample_domain(&self, i: usize, axis: Axis) -> (f64, f64) {
        let pref = self.preferred_range(i, axis);
        match self.band(i, axis) {
            Some(b) => intersect(b, pref).unwrap_or_else(|| {
                let fit = self.fit_range(i, axis);
                let c = ((b.0 + b.1) / 2.0).clamp(fit.0, fit.1);
                (c, c)
            }),
            None => pref,
        }
    }

    /// Up to eight candidate centers inside `i`'s domains; the first one
    /// clear of every relevant instance wins, else the first draw stands.
    /// `relevant` limits which instances a candidate must dodge.
    fn sample_spot(
        &mut self,
        i: usize,
        relevant: impl Fn(usize, &Self) -> bool,
    ) -> (f64, f64) {
        let dx = self.sample_domain(i, Axis::X);
        let dy = self.sample_domain(i, Axis::Y);
        let mut first = None;
        for _ in 0..8 {
            let cand = (self.rng.range_f64(dx.0, dx.1), self.rng.range_f64(dy.0, dy.1));
            if first.is_none() {
                first = Some(cand);
            }
            if self.spot_is_clear(i, cand, &relevant) {
                return cand;
            }
        }
        first.unwrap()
    }

    fn spot_is_clear(
        &self,
        target: usize,
        cand: (f64, f64),
        relevant: &impl Fn(usize, &Self) -> bool,
    ) -> bool {
        let st = self.insts[target].spec;
        for other in 0..self.insts.len() {
            if other == target
                || !relevant(other, self)
                || self.linked.contains(&(st, self.insts[other].spec))
            {
                continue;
            }
            let ox = ((cand.0 + self.insts[target].w / 2.0)
                .min(self.center(other, Axis::X) + self.insts[other].w / 2.0))
                - ((cand.0 - self.insts[target].w / 2.0)
                    .max(self.center(other, Axis::X) - self.insts[other].w / 2.0));
            let oy = ((cand.1 + self.insts[target].h / 2.0)
                .min(self.center(other, Axis::Y) + self.insts[other].h / 2.0))
                - ((cand.1 - self.insts[target].h / 2.0)
                    .max(self.center(other, Axis::Y) - self.insts[other].h / 2.0));
            if ox > 0.0 && oy > 0.0 {
                return false;
            }
        }
        true
    }

    /// Tightest center interval consistent with what is known about `i`:
    /// margined fit, then containment interior, occlusion box, and band,
    /// each applied only while the intersection stays non-empty.
    fn axis_domain(&self, i: usize, axis: Axis) -> (f64, f64) {
        let mut dom = self.preferred_range(i, axis);
        let spec = self.insts[i].spec;
        if let Some(parent) = self.parent_of[spec] {
            let half = self.ext(i, axis) / 2.0;
            let mut interior = (f64::NEG_INFINITY, f64::INFINITY);
            for &pj in &self.by_spec[parent] {
                let c = self.center(pj, axis);
                let ph = self.ext(pj, axis) / 2.0;
                interior.0 = interior.0.max(c - ph + half + GAP);
                interior.1 = interior.1.min(c + ph - half - GAP);
            }
            if let Some(x) = intersect(dom, interior) {
                dom = x;
            }
        }
        if let Some(occludee) = self.occludee_of[spec] {
            let ea = self.ext(i, axis);
            let mut boxr = (f64::NEG_INFINITY, f64::INFINITY);
            for &bj in &self.by_spec[occludee] {
                let c = self.center(bj, axis);
                let half = (ea + self.ext(bj, axis)) / 2.0 - OCCLUSION_ALPHA * ea;
                boxr.0 = boxr.0.max(c - half);
                boxr.1 = boxr.1.min(c + half);
            }
            if let Some(x) = intersect(dom, boxr) {
                dom = x;
            }
        }
        if let Some(band) = self.band(i, axis) {
            if let Some(x) = intersect(dom, band) {
                dom = x;
            }
        }
        dom
    }

    fn overlap_area(&self, a: usize, b: usize) -> f64 {
        let mut area = 1.0;
        for axis in [Axis::X, Axis::Y] {
            let (ca, cb) = (self.center(a, axis), self.center(b, axis));
            let (ha, hb) = (self.ext(a, axis) / 2.0, self.ext(b, axis) / 2.0);
            let o = ((ca + ha).min(cb + hb) - (ca - ha).max(cb - hb)).max(0.0);
            area *= o;
        }
        area
    }

    fn relation_ok(&self, kind: RelationKind, a: usize, b: usize) -> bool {
        match kind {
            RelationKind::LeftOf | RelationKind::Above => {
                let axis = if kind == RelationKind::LeftOf { Axis::X } else { Axis::Y };
                let (ca, cb) = (self.center(a, axis), self.center(b, axis));
                ca < cb && ca + self.ext(a, axis) / 2.0 < cb - self.ext(b, axis) / 2.0
            }
            RelationKind::Inside => [Axis::X, Axis::Y].into_iter().all(|axis| {
                let (ca, cb) = (self.center(a, axis), self.center(b, axis));
                let (ha, hb) = (self.ext(a, axis) / 2.0, self.ext(b, axis) / 2.0);
                cb - hb < ca - ha && ca + ha < cb + hb
            }),
            RelationKind::Near => {
                let dx = self.centers[a].0 - self.centers[b].0;
                let dy = self.centers[a].1 - self.centers[b].1;
                (dx * dx + dy * dy).sqrt()
                    <= self.params.near_ratio * self.width.min(self.height)
            }
            RelationKind::Occludes => {
                self.overlap_area(a, b)
                    >= self.params.min_occlusion_overlap * self.insts[a].w * self.insts[a].h
            }
        }
    }

    fn first_violation(&self) -> Option<Viol> {
        for (ri, rel) in self.record.relations.iter().enumerate() {
            let (Some(&s), Some(&o)) = (
                self.spec_of.get(rel.subject.as_str()),
                self.spec_of.get(rel.object.as_str()),
            ) else {
                continue;
            };
            for &a in &self.by_spec[s] {
                for &b in &self.by_spec[o] {
                    if !self.relation_ok(rel.kind, a, b) {
                        return Some(Viol {
                            key: format!(
                                "{}[{},{}]",
                                rel.describe(),
                                self.insts[a].id,
                                self.insts[b].id
                            ),
                            kind: ViolKind::Relation { rel: ri, a, b },
                        });
                    }
                }
            }
        }
        for a in 0..self.insts.len() {
            for b in (a + 1)..self.insts.len() {
                let (sa, sb) = (self.insts[a].spec, self.insts[b].spec);
                if self.linked.contains(&(sa, sb)) {
                    continue;
                }
                if self.overlap_area(a, b) > 0.0 {
                    return Some(Viol {
                        key: format!("overlap[{},{}]", self.insts[a].id, self.insts[b].id),
                        kind: ViolKind::Overlap { a, b },
                    });
                }
            }
        }
        None
    }

    /// Unique constraint keys still violated; reported on budget exhaustion.
    fn violation_keys(&self) -> Vec<String> {
        let mut keys = Vec::new();
        for rel in &self.record.relations {
            let (Some(&s), Some(&o)) = (
                self.spec_of.get(rel.subject.as_str()),
                self.spec_of.get(rel.object.as_str()),
            ) else {
                continue;
            };
            let violated = self.by_spec[s].iter().any(|&a| {
                self.by_spec[o].iter().any(|&b| !self.relation_ok(rel.kind, a, b))
            });
            if violated {
                keys.push(rel.describe());
            }
        }
        for a in 0..self.insts.len() {
            for b in (a + 1)..self.insts.len() {
                let (sa, sb) = (self.insts[a].spec, self.insts[b].spec);
                if !self.linked.contains(&(sa, sb)) && self.overlap_area(a, b) > 0.0 {
                    keys.push(format!(
                        "disjoint({},{})",
                        self.insts[a].id, self.insts[b].id
                    ));
                }
            }
        }
        keys.dedup();
        keys
    }

    fn repair(&mut self, violation: Viol) {
        let attempt = {
            let counter = self.attempts.entry(violation.key).or_insert(0);
            let n = *counter;
            *counter += 1;
            n
        };
        match violation.kind {
            ViolKind::Relation { rel, a, b } => match self.record.relations[rel].kind {
                RelationKind::LeftOf => self.fix_axis(Axis::X, a, b, attempt),
                RelationKind::Above => self.fix_axis(Axis::Y, a, b, attempt),
                RelationKind::Near => self.fix_near(a, b, attempt),
                RelationKind::Inside => self.fix_inside(a, b, attempt),
                RelationKind::Occludes => self.fix_occlusion(a, b, attempt),
            },
            ViolKind::Overlap { a, b } => self.fix_overlap(a, b, attempt),
        }
    }

    /// Move one endpoint so that a (subject) ends strictly left of / above b.
    /// Every fourth attempt moves both endpoints to the extreme ends of
    /// their own domains — the widest gap the bands allow — to break
    /// stand-offs where each endpoint blocks the other's one-sided fix.
    fn fix_axis(&mut self, axis: Axis, a: usize, b: usize, attempt: u32) {
        let sep = (self.ext(a, axis) + self.ext(b, axis)) / 2.0 + GAP;
        if attempt >= 4 && attempt % 4 == 0 && !self.insts[a].pinned && !self.insts[b].pinned {
            let da = self.axis_domain(a, axis);
            let db = self.axis_domain(b, axis);
            self.set_center(a, axis, da.0);
            self.set_center(b, axis, db.1);
            return;
        }
        let order = if attempt % 2 == 0 { [(a, true), (b, false)] } else { [(b, false), (a, true)] };
        for (target, is_subject) in order {
            if self.insts[target].pinned {
                continue;
            }
            let other = if is_subject { b } else { a };
            let limit = if is_subject {
                (f64::NEG_INFINITY, self.center(other, axis) - sep)
            } else {
                (self.center(other, axis) + sep, f64::INFINITY)
            };
            if let Some(dom) = intersect(self.axis_domain(target, axis), limit) {
                let v = self.rng.range_f64(dom.0, dom.1);
                self.set_center(target, axis, v);
                return;
            }
        }
    }

    fn fix_near(&mut self, a: usize, b: usize, attempt: u32) {
        let reach = self.params.near_ratio * self.width.min(self.height);
        // Inscribed square (shrunk 5 %) keeps any sample within the radius.
        let half = reach / std::f64::consts::SQRT_2 * 0.95;
        let order = if attempt % 2 == 0 { [a, b] } else { [b, a] };
        for target in order {
            if self.insts[target].pinned {
                continue;
            }
            let other = a + b - target;
            let mut new_center = self.centers[target];
            let mut feasible = true;
            for axis in [Axis::X, Axis::Y] {
                let c = self.center(other, axis);
                match intersect(self.fit_range(target, axis), (c - half, c + half)) {
                    Some(dom) => {
                        let v = self.rng.range_f64(dom.0, dom.1);
                        match axis {
                            Axis::X => new_center.0 = v,
                            Axis::Y => new_center.1 = v,
                        }
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                self.centers[target] = new_center;
                return;
            }
        }
    }

    fn fix_inside(&mut self, child: usize, parent: usize, attempt: u32) {
        let move_child_first = attempt % 2 == 0;
        let order = if move_child_first { [true, false] } else { [false, true] };
        for move_child in order {
            let target = if move_child { child } else { parent };
            if self.insts[target].pinned {
                continue;
            }
            let mut new_center = self.centers[target];
            let mut feasible = true;
            for axis in [Axis::X, Axis::Y] {
                let dom = if move_child {
                    let c = self.center(parent, axis);
                    let reach =
                        (self.ext(parent, axis) - self.ext(child, axis)) / 2.0 - GAP;
                    if reach < 0.0 {
                        None
                    } else {
                        intersect(self.fit_range(child, axis), (c - reach, c + reach))
                    }
                } else {
                    let c = self.center(child, axis);
                    let reach =
                        (self.ext(parent, axis) - self.ext(child, axis)) / 2.0 - GAP;
                    if reach < 0.0 {
                        None
                    } else {
                        intersect(self.fit_range(parent, axis), (c - reach, c + reach))
                    }
                };
                match dom {
                    Some(d) => {
                        let v = self.rng.range_f64(d.0, d.1);
                        match axis {
                            Axis::X => new_center.0 = v,
                            Axis::Y => new_center.1 = v,
                        }
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                self.centers[target] = new_center;
                return;
            }
        }
    }

    fn fix_occlusion(&mut self, a: usize, b: usize, attempt: u32) {
        let order = if attempt % 2 == 0 { [a, b] } else { [b, a] };
        for target in order {
            if self.insts[target].pinned {
                continue;
            }
            let other = a + b - target;
            let mut new_center = self.centers[target];
            let mut feasible = true;
            for axis in [Axis::X, Axis::Y] {
                let ea = self.ext(a, axis);
                let half = (ea + self.ext(b, axis)) / 2.0 - OCCLUSION_ALPHA * ea;
                if half <= 0.0 {
                    feasible = false;
                    break;
                }
                let c = self.center(other, axis);
                match intersect(self.fit_range(target, axis), (c - half, c + half)) {
                    Some(dom) => {
                        let v = self.rng.range_f64(dom.0, dom.1);
                        match axis {
                            Axis::X => new_center.0 = v,
                            Axis::Y => new_center.1 = v,
                        }
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                self.centers[target] = new_center;
                return;
            }
        }
    }

    fn fix_overlap(&mut self, a: usize, b: usize, attempt: u32) {
        let order = if attempt % 2 == 0 { [b, a] } else { [a, b] };
        for target in order {
            if self.insts[target].pinned {
                continue;
            }
            let spot = self.sample_spot_constrained(target);
            self.centers[target] = spot;
            return;
        }
    }

    /// Like [`sample_spot`] against all instances, but drawing from the
    /// repair-time domains (containment interior, occlusion box, band).
    fn sample_spot_constrained(&mut self, i: usize) -> (f64, f64) {
        let dx = self.axis_domain(i, Axis::X);
        let dy = self.axis_domain(i, Axis::Y);
        let mut first = None;
        for _ in 0..8 {
            let cand = (self.rng.range_f64(dx.0, dx.1), self.rng.range_f64(dy.0, dy.1));
            if first.is_none() {
                first = Some(cand);
            }
            if self.spot_is_clear(i, cand, &|_, _| true) {
                return cand;
            }
        }
        first.unwrap()
    }

    fn into_solution(self, iterations_used: u32) -> LayoutSolution {
        let n = self.insts.len();
        let mut z: Vec<i64> = (0..n as i64).collect();
        let mut edges = Vec::new();
        for rel in self.record.relations.iter().filter(|r| r.kind == RelationKind::Occludes) {
            let (Some(&s), Some(&o)) = (
                self.spec_of.get(rel.subject.as_str()),
                self.spec_of.get(rel.object.as_str()),
            ) else {
                continue;
            };
            for &a in &self.by_spec[s] {
                for &b in &self.by_spec[o] {
                    edges.push((a, b));
                }
            }
        }
        // Longest-path lift; the occludes digraph is acyclic (validated).
        for _ in 0..=n {
            let mut changed = false;
            for &(a, b) in &edges {
                if z[a] <= z[b] {
                    z[a] = z[b] + 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let placements = self
            .insts
            .iter()
            .enumerate()
            .map(|(i, inst)| Placement {
                instance_id: inst.id.clone(),
                bbox: Rect::from_center(self.centers[i].0, self.centers[i].1, inst.w, inst.h),
                z: z[i],
            })
            .collect();
        LayoutSolution {
            placements,
            seed: self.record.canvas.seed,
            iterations_used,
        }
    }
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo <= hi).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::super::check_placement;
    use super::*;
    use crate::scene::parse_records;

    fn record(lines: &str) -> SceneRecord {
        parse_records(lines.as_bytes()).unwrap()
    }

    fn solved(lines: &str) -> LayoutSolution {
        let r = record(lines);
        let solution = solve(&r).unwrap();
        assert_eq!(check_placement(&solution, &r).unwrap(), vec![]);
        solution
    }

    #[test]
    fn single_object_lands_in_bounds_and_repeats() {
        let lines = "{\"kind\":\"object\",\"id\":\"a\"}\n";
        let s1 = solved(lines);
        let s2 = solved(lines);
        assert_eq!(s1, s2);
        assert_eq!(s1.placements.len(), 1);
        let b = &s1.placements[0].bbox;
        assert!(b.min_x() >= 0.0 && b.max_x() <= 1024.0);
        assert!(b.min_y() >= 0.0 && b.max_y() <= 1024.0);
    }

    #[test]
    fn left_of_orders_centers_and_edges() {
        let s = solved(concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"left_of\",\"subject\":\"a\",\"object\":\"b\"}\n",
        ));
        let a = s.placement("a#0").unwrap();
        let b = s.placement("b#0").unwrap();
        assert!(a.bbox.center().x < b.bbox.center().x);
        assert!(a.bbox.max_x() < b.bbox.min_x());
    }

    #[test]
    fn occlusion_overlaps_and_raises_z() {
        let s = solved(concat!(
            "{\"kind\":\"object\",\"id\":\"a\",\"size_class\":\"small\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\",\"size_class\":\"large\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"occludes\",\"subject\":\"a\",\"object\":\"b\"}\n",
        ));
        let a = s.placement("a#0").unwrap();
        let b = s.placement("b#0").unwrap();
        assert!(a.z > b.z);
        assert!(a.bbox.intersection_area(&b.bbox) >= 0.2 * a.bbox.area());
    }

    #[test]
    fn containment_is_strict() {
        let s = solved(concat!(
            "{\"kind\":\"object\",\"id\":\"coin\",\"size_class\":\"small\"}\n",
            "{\"kind\":\"object\",\"id\":\"tray\",\"size_class\":\"large\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"inside\",\"subject\":\"coin\",\"object\":\"tray\"}\n",
        ));
        let coin = s.placement("coin#0").unwrap();
        let tray = s.placement("tray#0").unwrap();
        assert!(coin.bbox.strictly_inside(&tray.bbox));
    }

    #[test]
    fn near_pair_is_within_reach_yet_disjoint() {
        let s = solved(concat!(
            "{\"kind\":\"object\",\"id\":\"cup\"}\n",
            "{\"kind\":\"object\",\"id\":\"plate\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"near\",\"subject\":\"cup\",\"object\":\"plate\"}\n",
        ));
        let cup = s.placement("cup#0").unwrap();
        let plate = s.placement("plate#0").unwrap();
        assert!(cup.bbox.center().distance(&plate.bbox.center()) <= 0.25 * 1024.0);
        assert!(cup.bbox.disjoint(&plate.bbox));
    }

    #[test]
    fn explicit_position_pins_the_center() {
        let s = solved(concat!(
            "{\"kind\":\"object\",\"id\":\"sun\",\"explicit_position\":[0.5,0.25]}\n",
            "{\"kind\":\"object\",\"id\":\"sea\"}\n",
        ));
        let sun = s.placement("sun#0").unwrap();
        assert_eq!(sun.bbox.center().x, 512.0);
        assert_eq!(sun.bbox.center().y, 256.0);
    }

    #[test]
    fn sixty_five_instances_overflow() {
        let err = solve(&record(
            "{\"kind\":\"object\",\"id\":\"dot\",\"count\":65}\n",
        ))
        .unwrap_err();
        assert_eq!(err, SolveError::InstanceOverflow(65));
    }

    #[test]
    fn cyclic_record_is_unsatisfiable() {
        let err = solve(&record(concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"left_of\",\"subject\":\"a\",\"object\":\"b\"}\n",
            "{\"kind\":\"relation\",\"rel\":\"left_of\",\"subject\":\"b\",\"object\":\"a\"}\n",
        )))
        .unwrap_err();
        assert!(matches!(err, SolveError::Unsatisfiable(_)));
    }

    #[test]
    fn seeds_produce_distinct_layouts() {
        let base = concat!(
            "{\"kind\":\"object\",\"id\":\"a\"}\n",
            "{\"kind\":\"object\",\"id\":\"b\"}\n",
        );
        let mut distinct = BTreeSet::new();
        for seed in 0..10u64 {
            let lines = format!(
                "{{\"kind\":\"config\",\"seed\":{seed}}}\n{base}"
            );
            let r = record(&lines);
            let s = solve(&r).unwrap();
            distinct.insert(
                s.placements
                    .iter()
                    .map(|p| format!("{:.2},{:.2}", p.bbox.x, p.bbox.y))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
        }
        assert!(distinct.len() >= 2, "layouts degenerate across seeds");
    }

    #[test]
    fn counts_expand_to_disjoint_instances() {
        let s = solved(concat!(
            "{\"kind\":\"config\",\"seed\":3}\n",
            "{\"kind\":\"object\",\"id\":\"apple\",\"count\":3,\"size_class\":\"small\"}\n",
            "{\"kind\":\"object\",\"id\":\"pear\",\"count\":2,\"size_class\":\"small\"}\n",
        ));
        assert_eq!(s.placements.len(), 5);
        for (i, a) in s.placements.iter().enumerate() {
            for b in s.placements.iter().skip(i + 1) {
                assert!(a.bbox.disjoint(&b.bbox), "{} overlaps {}", a.instance_id, b.instance_id);
            }
        }
    }

    #[test]
    fn layout_json_is_alphabetical_two_decimal() {
        let s = solved("{\"kind\":\"object\",\"id\":\"a\"}\n");
        let text = String::from_utf8(s.to_json_bytes()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(value["placements"][0]["instance_id"] == "a#0");
        assert!(text.starts_with("{\"iterations_used\":"));
        let x = value["placements"][0]["x"].as_f64().unwrap();
        assert!((x * 100.0).round() / 100.0 == x);
    }
}
