//! Planar primitives for workspace collision tests.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

/// Closed axis-aligned rectangle in workspace coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn area(&self) -> f64 {
        (self.max[0] - self.min[0]).max(0.0) * (self.max[1] - self.min[1]).max(0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    /// Exact closed-segment/closed-box intersection (Liang-Barsky clipping).
    pub fn intersects_segment(&self, a: Point, b: Point) -> bool {
        let d = [b[0] - a[0], b[1] - a[1]];
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for axis in 0..2 {
            if d[axis] == 0.0 {
                if a[axis] < self.min[axis] || a[axis] > self.max[axis] {
                    return false;
                }
                continue;
            }
            let inv = 1.0 / d[axis];
            let mut near = (self.min[axis] - a[axis]) * inv;
            let mut far = (self.max[axis] - a[axis]) * inv;
            if near > far {
                std::mem::swap(&mut near, &mut far);
            }
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

/// Workspace obstacle. Touching counts as contact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Obstacle {
    Circle { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
}

impl Obstacle {
    pub fn circle(center: Point, radius: f64) -> Self {
        Obstacle::Circle { center, radius }
    }

    pub fn rect(min: Point, max: Point) -> Self {
        Obstacle::Rect { min, max }
    }

    pub fn contains_point(&self, p: Point) -> bool {
        match *self {
            Obstacle::Circle { center, radius } => dist_sq(p, center) <= radius * radius,
            Obstacle::Rect { min, max } => Rect::new(min, max).contains(p),
        }
    }

    pub fn hits_segment(&self, a: Point, b: Point) -> bool {
        match *self {
            Obstacle::Circle { center, radius } => {
                point_segment_dist_sq(center, a, b) <= radius * radius
            }
            Obstacle::Rect { min, max } => Rect::new(min, max).intersects_segment(a, b),
        }
    }
}

fn dist_sq(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

pub fn point_segment_dist_sq(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    if len_sq == 0.0 {
        return dist_sq(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len_sq).clamp(0.0, 1.0);
    dist_sq(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_crossing_box_without_endpoints_inside() {
        let r = Rect::new([1.0, -1.0], [2.0, 1.0]);
        assert!(r.intersects_segment([0.0, 0.0], [3.0, 0.0]));
        assert!(!r.intersects_segment([0.0, 2.0], [3.0, 2.0]));
        // vertical segment grazing the edge
        assert!(r.intersects_segment([2.0, -5.0], [2.0, 5.0]));
        assert!(!r.intersects_segment([2.0001, -5.0], [2.0001, 5.0]));
    }

    #[test]
    fn circle_segment_distance() {
        let c = Obstacle::circle([0.5, 0.3], 0.29);
        assert!(!c.hits_segment([0.0, 0.0], [1.0, 0.0]));
        let c = Obstacle::circle([0.5, 0.3], 0.31);
        assert!(c.hits_segment([0.0, 0.0], [1.0, 0.0]));
        // closest point is an endpoint
        let c = Obstacle::circle([-0.5, 0.0], 0.4);
        assert!(!c.hits_segment([0.0, 0.0], [1.0, 0.0]));
    }
}
