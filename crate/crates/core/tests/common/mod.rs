#![allow(dead_code)]

use nestmip_core::{PieceSpec, Point, Polygon, ProblemInstance};
use proptest::prelude::*;
use rand::Rng;

/// Convex polygon with vertices on an axis-aligned ellipse.
pub fn convex_polygon(max_vertices: usize, max_radius: f64) -> impl Strategy<Value = Polygon> {
    (
        prop::collection::vec(0.0..std::f64::consts::TAU, 3..=max_vertices),
        0.3..max_radius,
        0.3..max_radius,
        -2.0..2.0f64,
        -2.0..2.0f64,
    )
        .prop_filter_map("degenerate polygon", |(mut angles, rx, ry, cx, cy)| {
            angles.sort_by(f64::total_cmp);
            angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            if angles.len() < 3 || (angles[0] + std::f64::consts::TAU - angles[angles.len() - 1]) < 0.05 {
                return None;
            }
            let pts = angles.iter().map(|t| Point::new(cx + rx * t.cos(), cy + ry * t.sin())).collect();
            Polygon::new(pts).ok().filter(|p| p.len() >= 3 && p.area() > 0.05)
        })
}

/// Piece spec from a polygon, shifted to the positive quadrant.
pub fn spec(name: &str, p: &Polygon, demand: usize) -> PieceSpec {
    let bb = p.bbox();
    PieceSpec {
        name: name.into(),
        vertices: p.vertices().iter().map(|&v| v - bb.min).collect(),
        demand,
    }
}

/// Small instance of two or three random convex pieces, one of which may be
/// duplicated.
pub fn small_instance() -> impl Strategy<Value = ProblemInstance> {
    (
        prop::collection::vec(convex_polygon(5, 1.0), 2..=3),
        any::<bool>(),
        1.0..1.6f64,
    )
        .prop_filter_map("unusable instance", |(polys, dup, extra)| {
            let mut specs: Vec<PieceSpec> = polys.iter().enumerate().map(|(k, p)| spec(&format!("p{k}"), p, 1)).collect();
            if dup && specs.len() == 2 {
                specs[0].demand = 2;
            }
            let h = polys.iter().map(|p| p.bbox().max.y - p.bbox().min.y).fold(0.0, f64::max) * extra;
            ProblemInstance::new("random", h, &specs).ok()
        })
}

/// Uniform point in a convex polygon by rejection from its bounding box.
pub fn sample_in<R: Rng>(rng: &mut R, p: &Polygon) -> Point {
    let bb = p.bbox();
    loop {
        let q = Point::new(rng.gen_range(bb.min.x..=bb.max.x), rng.gen_range(bb.min.y..=bb.max.y));
        if p.contains_convex(q, 0.0) {
            return q;
        }
    }
}

/// Signed distance-like margin of `p` inside convex `poly`: positive inside,
/// negative outside, the minimum over edges of the normalised orientation.
pub fn inside_margin(poly: &Polygon, p: Point) -> f64 {
    poly.edges()
        .map(|(a, b)| {
            let e = b - a;
            ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / e.norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Convex hull by Andrew's monotone chain, CCW, collinear points dropped.
pub fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn rect(w: f64, h: f64, demand: usize) -> PieceSpec {
    PieceSpec {
        name: format!("r{w}x{h}"),
        vertices: vec![Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)],
        demand,
    }
}

pub fn ell(demand: usize) -> PieceSpec {
    PieceSpec {
        name: "ell".into(),
        vertices: [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect(),
        demand,
    }
}

pub fn tri(a: f64, b: f64, demand: usize) -> PieceSpec {
    PieceSpec {
        name: format!("t{a}x{b}"),
        vertices: vec![Point::new(0.0, 0.0), Point::new(a, 0.0), Point::new(0.0, b)],
        demand,
    }
}
