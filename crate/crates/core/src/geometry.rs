//! Polygon primitives: orientation, normalization, convex decomposition,
//! convex Minkowski sums, no-fit polygons and a separating-axis overlap test.
//!
//! Every comparison goes through [`EPS_GEOM`]. Instances use small integer
//! coordinates, so an absolute tolerance is adequate.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Absolute geometric tolerance in instance length units.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    fn norm_inf(self) -> f64 {
        let (ax, ay) = (libm::fabs(self.x), libm::fabs(self.y));
        if ax > ay {
            ax
        } else {
            ay
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn approx_eq(self, other: Point, eps: f64) -> bool {
        libm::fabs(self.x - other.x) <= eps && libm::fabs(self.y - other.y) <= eps
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Twice the signed area of the triangle `(o, a, b)`.
pub fn orient(o: Point, a: Point, b: Point) -> f64 {
    (a - o).cross(b - o)
}

/// True when `b` lies on the line through `a` and `c` within [`EPS_GEOM`]
/// (distance to the line, approximated with the infinity norm of `c - a`).
fn nearly_collinear(a: Point, b: Point, c: Point) -> bool {
    let span = (c - a).norm_inf().max((b - a).norm_inf());
    libm::fabs(orient(a, b, c)) <= EPS_GEOM * span.max(1.0)
}

/// Shoelace signed area; positive iff the vertex list is counter-clockwise.
pub fn signed_area(vertices: &[Point]) -> Result<f64> {
    if vertices.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "{} vertices, at least 3 required",
            vertices.len()
        )));
    }
    let n = vertices.len();
    let twice: f64 = (0..n)
        .map(|k| vertices[k].cross(vertices[(k + 1) % n]))
        .sum();
    let area = twice / 2.0;
    if libm::fabs(area) <= EPS_GEOM {
        return Err(Error::DegenerateGeometry("zero signed area".into()));
    }
    Ok(area)
}

/// A closed interval, or the distinguished empty interval.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Emptiness allowing the bounds to cross by at most `eps`.
    pub fn is_empty_within(&self, eps: f64) -> bool {
        self.is_empty() && (self.lo.is_infinite() || self.hi < self.lo - eps)
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, v: f64, eps: f64) -> bool {
        !self.is_empty() && v >= self.lo - eps && v <= self.hi + eps
    }

    pub fn sum(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// Intersection; the result keeps crossed bounds (`lo > hi`) so callers
    /// can decide emptiness with a tolerance.
    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() && self.lo.is_infinite() || other.is_empty() && other.lo.is_infinite() {
            return Interval::EMPTY;
        }
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// A simple polygon with a counter-clockwise boundary and no duplicate or
/// collinear consecutive vertices.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Normalizes and validates a vertex list. Duplicate and collinear
    /// vertices are dropped and clockwise input is reversed.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGeometry(format!("non-finite vertex {p:?}")));
        }
        let mut v = normalize_ring(vertices);
        if v.len() < 3 {
            return Err(Error::InvalidGeometry(format!(
                "{} distinct non-collinear vertices, at least 3 required",
                v.len()
            )));
        }
        let area = signed_area(&v).map_err(|e| Error::InvalidGeometry(format!("{e}")))?;
        if area < 0.0 {
            v.reverse();
        }
        if !is_simple(&v) {
            return Err(Error::InvalidGeometry("self-intersecting boundary".into()));
        }
        Ok(Polygon { vertices: v })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Polygon::new(alloc::vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|k| self.vertices[k].cross(self.vertices[(k + 1) % n]))
            .sum::<f64>()
            / 2.0
    }

    /// Boundary edges `(a, b)` in counter-clockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn bbox(&self) -> BBox {
        let mut min = self.vertices[0];
        let mut max = self.vertices[0];
        for p in &self.vertices[1..] {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        BBox { min, max }
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|k| {
            let a = self.vertices[(k + n - 1) % n];
            let b = self.vertices[k];
            let c = self.vertices[(k + 1) % n];
            orient(a, b, c) >= 0.0 || nearly_collinear(a, b, c)
        })
    }

    pub fn translate(&self, d: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| p + d).collect(),
        }
    }

    /// Closed point-membership test for convex polygons.
    pub fn contains_convex(&self, p: Point, eps: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            orient(a, b, p) >= -eps * e.norm()
        })
    }

    /// True iff every vertex of `inner` lies in this (convex) polygon.
    pub fn contains_polygon_convex(&self, inner: &Polygon, eps: f64) -> bool {
        inner.vertices.iter().all(|&p| self.contains_convex(p, eps))
    }

    /// Keeps the part of this convex polygon on the right of (or on) the
    /// directed line `a → b`. Returns `None` when nothing of positive area
    /// remains.
    pub fn clip_right_of(&self, a: Point, b: Point) -> Option<Polygon> {
        let side = |p: Point| orient(a, b, p);
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 2);
        for k in 0..n {
            let p = self.vertices[k];
            let q = self.vertices[(k + 1) % n];
            let (sp, sq) = (side(p), side(q));
            if sp <= 0.0 {
                out.push(p);
            }
            if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
                let t = sp / (sp - sq);
                out.push(p + (q - p) * t);
            }
        }
        Polygon::new(out).ok()
    }
}

fn normalize_ring(vertices: Vec<Point>) -> Vec<Point> {
    let mut v: Vec<Point> = Vec::with_capacity(vertices.len());
    for p in vertices {
        if v.last().is_none_or(|q: &Point| !q.approx_eq(p, EPS_GEOM)) {
            v.push(p);
        }
    }
    while v.len() > 1 && v[0].approx_eq(v[v.len() - 1], EPS_GEOM) {
        v.pop();
    }
    // Drop collinear (and spike) vertices until stable.
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let drop = (0..n).find(|&k| nearly_collinear(v[(k + n - 1) % n], v[k], v[(k + 1) % n]));
        match drop {
            Some(k) => {
                v.remove(k);
            }
            None => return v,
        }
    }
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) - EPS_GEOM
        && p.x <= a.x.max(b.x) + EPS_GEOM
        && p.y >= a.y.min(b.y) - EPS_GEOM
        && p.y <= a.y.max(b.y) + EPS_GEOM
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let sign = |v: f64, a: Point, b: Point| {
        if libm::fabs(v) <= EPS_GEOM * (b - a).norm_inf().max(1.0) {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let d1 = sign(orient(q1, q2, p1), q1, q2);
    let d2 = sign(orient(q1, q2, p2), q1, q2);
    let d3 = sign(orient(p1, p2, q1), p1, p2);
    let d4 = sign(orient(p1, p2, q2), p1, p2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
}

fn is_simple(v: &[Point]) -> bool {
    let n = v.len();
    if n == 3 {
        return true;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// One convex part `f` of a piece (1-based index).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvexPart {
    pub polygon: Polygon,
    pub part_index: usize,
}

impl ConvexPart {
    pub fn new(polygon: Polygon, part_index: usize) -> Result<Self> {
        if !polygon.is_convex() {
            return Err(Error::InvalidGeometry(format!(
                "convex part {part_index} is not convex"
            )));
        }
        Ok(ConvexPart {
            polygon,
            part_index,
        })
    }
}

/// Steiner-point-free convex partition: ear-clipping triangulation followed
/// by Hertel–Mehlhorn merging of adjacent pieces while the union stays convex.
/// Merges are attempted lowest polygon index first, so the output is
/// deterministic.
pub fn convex_decompose(polygon: &Polygon) -> Result<Vec<ConvexPart>> {
    if polygon.is_convex() {
        return Ok(alloc::vec![ConvexPart::new(polygon.clone(), 1)?]);
    }
    let pts = polygon.vertices();
    let triangles = triangulate(pts)?;
    let merged = hertel_mehlhorn(pts, triangles);
    merged
        .into_iter()
        .enumerate()
        .map(|(k, idx)| {
            let poly = Polygon::new(idx.iter().map(|&i| pts[i]).collect())?;
            ConvexPart::new(poly, k + 1)
        })
        .collect()
}

fn point_in_triangle_closed(p: Point, a: Point, b: Point, c: Point) -> bool {
    let eps = EPS_GEOM;
    orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
}

fn triangulate(pts: &[Point]) -> Result<Vec<Vec<usize>>> {
    let mut ring: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::with_capacity(pts.len() - 2);
    while ring.len() > 3 {
        let n = ring.len();
        let ear = (0..n).find(|&k| {
            let (ia, ib, ic) = (ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]);
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            if orient(a, b, c) <= EPS_GEOM {
                return false;
            }
            ring.iter().all(|&m| {
                m == ia
                    || m == ib
                    || m == ic
                    || pts[m].approx_eq(a, EPS_GEOM)
                    || pts[m].approx_eq(b, EPS_GEOM)
                    || pts[m].approx_eq(c, EPS_GEOM)
                    || !point_in_triangle_closed(pts[m], a, b, c)
            })
        });
        let Some(k) = ear else {
            return Err(Error::InvalidGeometry(
                "triangulation failed: no ear found".into(),
            ));
        };
        tris.push(alloc::vec![ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]]);
        ring.remove(k);
    }
    tris.push(ring);
    Ok(tris)
}

fn hertel_mehlhorn(pts: &[Point], mut polys: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let convex_at = |prev: usize, at: usize, next: usize| {
        let (a, b, c) = (pts[prev], pts[at], pts[next]);
        orient(a, b, c) >= 0.0 || nearly_collinear(a, b, c)
    };
    let mut p1 = 0;
    while p1 < polys.len() {
        let mut merged = false;
        let len1 = polys[p1].len();
        for e in 0..len1 {
            let s = polys[p1][e];
            let t = polys[p1][(e + 1) % len1];
            let found = polys.iter().enumerate().skip(p1 + 1).find_map(|(k, poly)| {
                let m = poly.len();
                (0..m)
                    .find(|&q| poly[q] == t && poly[(q + 1) % m] == s)
                    .map(|q| (k, q))
            });
            let Some((p2, q)) = found else { continue };
            let second = &polys[p2];
            let m = second.len();
            // In the merged ring, `s` is preceded by its predecessor in the
            // first polygon and followed by its successor in the second.
            let s_prev = polys[p1][(e + len1 - 1) % len1];
            let s_next = second[(q + 2) % m];
            let t_prev = second[(q + m - 1) % m];
            let t_next = polys[p1][(e + 2) % len1];
            if !convex_at(s_prev, s, s_next) || !convex_at(t_prev, t, t_next) {
                continue;
            }
            let mut ring = Vec::with_capacity(len1 + m - 2);
            for step in 0..len1 {
                ring.push(polys[p1][(e + 1 + step) % len1]);
            }
            for step in 2..m {
                ring.push(second[(q + step) % m]);
            }
            polys[p1] = ring;
            polys.remove(p2);
            merged = true;
            break;
        }
        if !merged {
            p1 += 1;
        }
    }
    polys
}

fn rotate_to_lowest(v: &[Point]) -> Vec<Point> {
    let start = (0..v.len())
        .min_by(|&a, &b| {
            let (p, q) = (v[a], v[b]);
            p.y.partial_cmp(&q.y)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(p.x.partial_cmp(&q.x).unwrap_or(core::cmp::Ordering::Equal))
        })
        .unwrap_or(0);
    v[start..].iter().chain(v[..start].iter()).copied().collect()
}

/// Minkowski sum of two convex counter-clockwise polygons.
///
/// Both boundaries are rotated to start at their lowest vertex (ties broken
/// by smallest x) and merged by the sign of the cross product of the current
/// edge vectors.
pub fn convex_minkowski_sum(boundary_a: &Polygon, boundary_b: &Polygon) -> Result<Polygon> {
    if !boundary_a.is_convex() || !boundary_b.is_convex() {
        return Err(Error::InvalidGeometry(
            "Minkowski sum requires convex operands".into(),
        ));
    }
    let a = rotate_to_lowest(boundary_a.vertices());
    let b = rotate_to_lowest(boundary_b.vertices());
    let (n, m) = (a.len(), b.len());
    let mut out = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        out.push(a[i % n] + b[j % m]);
        // Once one chain is exhausted only the other may advance.
        if i >= n {
            j += 1;
            continue;
        }
        if j >= m {
            i += 1;
            continue;
        }
        let eb = a[(i + 1) % n] - a[i % n];
        let ec = b[(j + 1) % m] - b[j % m];
        let theta = eb.x * ec.y - ec.x * eb.y;
        if theta >= 0.0 {
            i += 1;
        }
        if theta <= 0.0 {
            j += 1;
        }
    }
    Polygon::new(out)
}

/// Convex no-fit polygon of `orbiting_part` around `static_part`:
/// `A ⊕ (r_B − B)`. A point `t` lies strictly inside the result iff `B`
/// translated so that its reference point sits at `t` overlaps `A`.
pub fn convex_nfp(
    static_part: &ConvexPart,
    orbiting_part: &ConvexPart,
    orbiting_ref: Point,
) -> Result<Polygon> {
    let reflected: Vec<Point> = orbiting_part
        .polygon
        .vertices()
        .iter()
        .map(|&v| orbiting_ref - v)
        .collect();
    convex_minkowski_sum(&static_part.polygon, &Polygon::new(reflected)?)
}

/// Largest separating gap over all edge normals of two convex polygons.
/// Positive values separate the polygons by at least that distance; a
/// negative value is minus the minimal penetration depth along those axes.
pub fn separation(p: &Polygon, q: &Polygon) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for poly in [p, q] {
        for (a, b) in poly.edges() {
            let e = b - a;
            let len = e.norm();
            if len <= 0.0 {
                continue;
            }
            let axis = Point::new(e.y / len, -e.x / len);
            let (pmin, pmax) = project(p, axis);
            let (qmin, qmax) = project(q, axis);
            let gap = (qmin - pmax).max(pmin - qmax);
            if gap > best {
                best = gap;
            }
        }
    }
    best
}

fn project(poly: &Polygon, axis: Point) -> (f64, f64) {
    poly.vertices()
        .iter()
        .map(|&v| v.dot(axis))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        })
}

/// True iff the interiors of two convex polygons intersect. Shared edges and
/// touching vertices are not overlap.
pub fn polygons_overlap(p: &Polygon, q: &Polygon) -> bool {
    separation(p, q) < -EPS_GEOM
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn poly(v: &[(f64, f64)]) -> Polygon {
        Polygon::new(pts(v)).unwrap()
    }

    #[test]
    fn signed_area_examples() {
        let sq = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(signed_area(&sq).unwrap(), 1.0);
        let mut cw = sq.clone();
        cw.reverse();
        assert_eq!(signed_area(&cw).unwrap(), -1.0);
        let tri = pts(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]);
        assert_eq!(signed_area(&tri).unwrap(), 6.0);
    }

    #[test]
    fn signed_area_rejects_collinear() {
        let line = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!(matches!(
            signed_area(&line),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn polygon_normalization() {
        let p = Polygon::new(pts(&[
            (0.0, 1.0),
            (1.0, 1.0),
            (1.0, 0.0),
            (0.5, 0.0),
            (0.0, 0.0),
            (0.0, 0.0),
        ]))
        .unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.area() > 0.0);
    }

    #[test]
    fn polygon_rejects_bowtie_and_points() {
        let bowtie = pts(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(matches!(
            Polygon::new(bowtie),
            Err(Error::InvalidGeometry(_))
        ));
        let dot = pts(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(Polygon::new(dot).is_err());
        let sliver = pts(&[(0.0, 0.0), (3.0, 0.0), (6.0, 0.0), (3.0, 0.0)]);
        assert!(Polygon::new(sliver).is_err());
    }

    #[test]
    fn decompose_convex_is_identity() {
        let pent = poly(&[(0.0, 0.0), (2.0, 0.0), (3.0, 1.5), (1.0, 3.0), (-1.0, 1.5)]);
        let parts = convex_decompose(&pent).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].polygon, pent);
        assert_eq!(parts[0].part_index, 1);
    }

    #[test]
    fn decompose_l_shape() {
        let l = poly(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ]);
        let parts = convex_decompose(&l).unwrap();
        assert_eq!(parts.len(), 2);
        let total: f64 = parts.iter().map(|p| p.polygon.area()).sum();
        assert!((total - 3.0).abs() < 1e-12);
        assert!(!polygons_overlap(&parts[0].polygon, &parts[1].polygon));
        for part in &parts {
            for v in part.polygon.vertices() {
                assert!(l.vertices().contains(v), "Steiner point {v:?}");
            }
        }
    }

    #[test]
    fn decompose_single_reflex_piece() {
        // Either diagonal out of the notch leaves it reflex, so without
        // Steiner points three parts are needed.
        let p = poly(&[(0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (2.0, 1.0), (0.0, 3.0)]);
        let parts = convex_decompose(&p).unwrap();
        assert_eq!(parts.len(), 3);
        let total: f64 = parts.iter().map(|c| c.polygon.area()).sum();
        assert!((total - p.area()).abs() < 1e-12);
        // A notch facing a vertex splits in two.
        let v = poly(&[(0.0, 0.0), (2.0, 1.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0)]);
        assert_eq!(convex_decompose(&v).unwrap().len(), 2);
    }

    #[test]
    fn minkowski_unit_squares() {
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let sum = convex_minkowski_sum(&sq, &sq).unwrap();
        assert_eq!(
            sum.vertices(),
            &pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)])[..]
        );
    }

    #[test]
    fn minkowski_rejects_nonconvex() {
        let l = poly(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ]);
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            convex_minkowski_sum(&l, &sq),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn minkowski_triangle_square_point_membership() {
        use rand::{Rng, SeedableRng};
        let tri = poly(&[(0.0, 0.0), (2.0, 0.0), (1.0, 2.0)]);
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let sum = convex_minkowski_sum(&tri, &sq).unwrap();
        assert!(sum.len() <= 7);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let sample_in = |rng: &mut rand::rngs::StdRng, p: &Polygon| loop {
            let bb = p.bbox();
            let q = Point::new(
                rng.gen_range(bb.min.x..=bb.max.x),
                rng.gen_range(bb.min.y..=bb.max.y),
            );
            if p.contains_convex(q, 0.0) {
                return q;
            }
        };
        for _ in 0..10_000 {
            let p = sample_in(&mut rng, &tri);
            let q = sample_in(&mut rng, &sq);
            assert!(sum.contains_convex(p + q, 1e-9));
        }
    }

    #[test]
    fn nfp_examples() {
        let a = ConvexPart::new(Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap(), 1).unwrap();
        let nfp = convex_nfp(&a, &a, Point::ORIGIN).unwrap();
        assert_eq!(
            nfp.vertices(),
            &pts(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])[..]
        );
        let wide = ConvexPart::new(Polygon::rectangle(0.0, 0.0, 2.0, 1.0).unwrap(), 1).unwrap();
        let nfp = convex_nfp(&wide, &a, Point::ORIGIN).unwrap();
        assert_eq!(
            nfp.vertices(),
            &pts(&[(-1.0, -1.0), (2.0, -1.0), (2.0, 1.0), (-1.0, 1.0)])[..]
        );
    }

    #[test]
    fn overlap_examples() {
        let a = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(!polygons_overlap(&a, &Polygon::rectangle(1.0, 0.0, 2.0, 1.0).unwrap()));
        assert!(polygons_overlap(&a, &Polygon::rectangle(0.5, 0.5, 1.5, 1.5).unwrap()));
        assert!(!polygons_overlap(&a, &Polygon::rectangle(2.0, 2.0, 3.0, 3.0).unwrap()));
    }

    #[test]
    fn interval_arithmetic() {
        let a = Interval::new(2.0, 4.0);
        let b = Interval::new(1.0, 2.0);
        assert_eq!(a.sum(&b), Interval::new(3.0, 6.0));
        assert!(a.sum(&b).intersect(&Interval::new(7.0, 8.0)).is_empty());
        assert_eq!(
            a.sum(&b).intersect(&Interval::new(5.0, 7.0)),
            Interval::new(5.0, 6.0)
        );
        assert!(Interval::EMPTY.sum(&a).is_empty());
        assert!(Interval::new(3.0, 1.0).is_empty());
    }

    #[test]
    fn clip_right_of_edge() {
        let window = Polygon::rectangle(-2.0, -2.0, 2.0, 2.0).unwrap();
        // right of the upward vertical line x = 1
        let clipped = window
            .clip_right_of(Point::new(1.0, -1.0), Point::new(1.0, 1.0))
            .unwrap();
        assert!((clipped.area() - 4.0).abs() < 1e-12);
        assert_eq!(clipped.bbox().min.x, 1.0);
        let _ = vec![0];
    }
}
