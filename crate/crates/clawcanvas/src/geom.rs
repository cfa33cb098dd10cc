//! Shared 2D primitives. Pixel space: x grows right, y grows down.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Axis-aligned rectangle, origin at the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self { x: cx - w / 2.0, y: cy - h / 2.0, w, h }
    }

    pub fn min_x(&self) -> f64 {
        self.x
    }

    pub fn max_x(&self) -> f64 {
        self.x + self.w
    }

    pub fn min_y(&self) -> f64 {
        self.y
    }

    pub fn max_y(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Area of the intersection, 0 when the rectangles do not overlap.
    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let ox = (self.max_x().min(other.max_x()) - self.min_x().max(other.min_x())).max(0.0);
        let oy = (self.max_y().min(other.max_y()) - self.min_y().max(other.min_y())).max(0.0);
        ox * oy
    }

    /// True when the interiors are disjoint (shared edges still count as disjoint).
    pub fn disjoint(&self, other: &Rect) -> bool {
        self.intersection_area(other) <= 0.0
    }

    /// Strict containment: every edge of `self` lies strictly inside `other`.
    pub fn strictly_inside(&self, other: &Rect) -> bool {
        self.min_x() > other.min_x()
            && self.max_x() < other.max_x()
            && self.min_y() > other.min_y()
            && self.max_y() < other.max_y()
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.min_x() >= self.min_x()
            && other.max_x() <= self.max_x()
            && other.min_y() >= self.min_y()
            && other.max_y() <= self.max_y()
    }
}

/// An infinite line given by a point and a direction (normalized on use).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: Point,
    pub direction: Point,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_area_of_disjoint_rects_is_zero() {
        let a = Rect::new(0.0, 0.0, 10.0, 10.0);
        let b = Rect::new(10.0, 0.0, 10.0, 10.0);
        assert_eq!(a.intersection_area(&b), 0.0);
        assert!(a.disjoint(&b));
    }

    #[test]
    fn intersection_area_of_overlapping_rects() {
        let a = Rect::new(0.0, 0.0, 10.0, 10.0);
        let b = Rect::new(5.0, 5.0, 10.0, 10.0);
        assert_eq!(a.intersection_area(&b), 25.0);
        assert!(!a.disjoint(&b));
    }

    #[test]
    fn strict_containment_excludes_shared_edges() {
        let outer = Rect::new(0.0, 0.0, 10.0, 10.0);
        let inner = Rect::new(1.0, 1.0, 8.0, 8.0);
        let flush = Rect::new(0.0, 1.0, 8.0, 8.0);
        assert!(inner.strictly_inside(&outer));
        assert!(!flush.strictly_inside(&outer));
    }
}
