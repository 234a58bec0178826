//! Small vector helpers on top of `nalgebra`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;

pub fn v3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Angle between two unit vectors, robust near 0 and π.
pub fn unit_angle(a: &Vec3, b: &Vec3) -> f64 {
    let c = a.cross(b).norm();
    let d = a.dot(b);
    c.atan2(d)
}

/// Diameter of a point set (exact, quadratic).
pub fn diameter(points: &[Vec3]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max((points[i] - points[j]).norm());
        }
    }
    best
}

/// Length of the bounding box diagonal; a cheap stand-in for the diameter.
pub fn bbox_diagonal(points: &[Vec3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// Closed segment `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment3 {
    pub a: Vec3,
    pub b: Vec3,
}

impl Segment3 {
    pub fn new(a: Vec3, b: Vec3) -> Self {
        Self { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        (self.b - self.a).norm() == 0.0
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.a + (self.b - self.a) * t
    }

    /// Euclidean distance between two closed segments.
    pub fn distance_to(&self, other: &Segment3) -> f64 {
        let (p, q) = closest_points(self, other);
        (p - q).norm()
    }

    pub fn distance_to_point(&self, p: &Vec3) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return (p - self.a).norm();
        }
        let t = ((p - self.a).dot(&d) / len2).clamp(0.0, 1.0);
        (p - self.at(t)).norm()
    }
}

/// Closest points between two segments (Ericson, Real-Time Collision Detection 5.1.9).
fn closest_points(s1: &Segment3, s2: &Segment3) -> (Vec3, Vec3) {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let r = s1.a - s2.a;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let tiny = 1e-300;
    let (s, t);
    if a <= tiny && e <= tiny {
        return (s1.a, s2.a);
    }
    if a <= tiny {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= tiny {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-15 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (s1.at(s), s2.at(t))
}
