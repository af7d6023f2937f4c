//! Edge classification of convex no-fit polygons and the vertical-slice
//! partition of their complement.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Interval, Point, Polygon, EPS_GEOM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EdgeClass {
    Top,
    Bottom,
    Side,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NfpEdge {
    pub a: Point,
    pub b: Point,
    pub class: EdgeClass,
}

impl NfpEdge {
    /// `(b_x − a_x)·Δy + (a_y − b_y)·Δx + C`, non-positive on the right of the edge.
    pub fn constant(&self) -> f64 {
        self.b.y * self.a.x - self.b.x * self.a.y
    }

    pub fn lhs(&self, p: Point) -> f64 {
        (self.b.x - self.a.x) * p.y + (self.a.y - self.b.y) * p.x + self.constant()
    }
}

/// One convex no-fit polygon between part `f` of piece `i` and part `g` of
/// piece `j`, in coordinates relative to the reference point of `i`.
/// Piece and part indices are 1-based.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NfpPart {
    pub i: usize,
    pub j: usize,
    pub f: usize,
    pub g: usize,
    pub boundary: Polygon,
    pub edges: Vec<NfpEdge>,
    pub x_min: f64,
    pub x_max: f64,
}

impl NfpPart {
    pub fn top_edges(&self) -> impl Iterator<Item = (usize, &NfpEdge)> {
        self.edges_of(EdgeClass::Top)
    }

    pub fn bottom_edges(&self) -> impl Iterator<Item = (usize, &NfpEdge)> {
        self.edges_of(EdgeClass::Bottom)
    }

    fn edges_of(&self, class: EdgeClass) -> impl Iterator<Item = (usize, &NfpEdge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.class == class)
            .map(|(k, e)| (k + 1, e))
    }
}

/// Classifies every edge of a convex boundary. Piece and part indices are
/// left at zero for the caller to fill in.
pub fn classify_boundary_edges(nfp: &Polygon) -> Result<NfpPart> {
    if !nfp.is_convex() {
        return Err(Error::InvalidGeometry("no-fit polygon is not convex".into()));
    }
    let edges: Vec<NfpEdge> = nfp
        .edges()
        .map(|(a, b)| {
            let class = if a.x > b.x + EPS_GEOM {
                EdgeClass::Top
            } else if a.x < b.x - EPS_GEOM {
                EdgeClass::Bottom
            } else {
                EdgeClass::Side
            };
            NfpEdge { a, b, class }
        })
        .collect();
    let bb = nfp.bbox();
    Ok(NfpPart {
        i: 0,
        j: 0,
        f: 0,
        g: 0,
        boundary: nfp.clone(),
        edges,
        x_min: bb.min.x,
        x_max: bb.max.x,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegionKind {
    Left,
    Right,
    /// Vertical slice above top edge `k` (1-based).
    Top(usize),
    /// Vertical slice below bottom edge `k`.
    Bottom(usize),
    /// Whole half-plane on the right of edge `k`, used by the edge-based models.
    Edge(usize),
}

impl RegionKind {
    /// Suffix used in variable names.
    pub fn tag(&self) -> alloc::string::String {
        match self {
            RegionKind::Left => "l".into(),
            RegionKind::Right => "r".into(),
            RegionKind::Top(k) => format!("t{k}"),
            RegionKind::Bottom(k) => format!("b{k}"),
            RegionKind::Edge(k) => format!("e{k}"),
        }
    }

    pub fn edge_index(&self) -> Option<usize> {
        match *self {
            RegionKind::Top(k) | RegionKind::Bottom(k) | RegionKind::Edge(k) => Some(k),
            _ => None,
        }
    }
}

/// One region of the complement of an [`NfpPart`], clipped to the window.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibleSubRegion {
    pub kind: RegionKind,
    pub clip_polygon: Polygon,
    pub x_span: Interval,
}

fn check_window(part: &NfpPart, wx: Interval, wy: Interval) -> Result<()> {
    let bb = part.boundary.bbox();
    if wx.is_empty() || wy.is_empty() || !(wx.lo < bb.min.x && bb.max.x < wx.hi && wy.lo < bb.min.y && bb.max.y < wy.hi) {
        return Err(Error::InvalidWindow(format!(
            "window [{}, {}]x[{}, {}] does not strictly contain NFP {}-{} ({},{})",
            wx.lo, wx.hi, wy.lo, wy.hi, part.i, part.j, part.f, part.g
        )));
    }
    Ok(())
}

/// Vertical-slice partition: Left, Right, then one slice per top or bottom
/// edge in boundary order. Side edges get no region of their own.
pub fn build_subregions(
    part: &NfpPart,
    window_x: Interval,
    window_y: Interval,
) -> Result<Vec<FeasibleSubRegion>> {
    check_window(part, window_x, window_y)?;
    let (lo, hi) = (window_y.lo, window_y.hi);
    let mut out = Vec::with_capacity(part.edges.len() + 2);
    out.push(FeasibleSubRegion {
        kind: RegionKind::Left,
        clip_polygon: Polygon::rectangle(window_x.lo, lo, part.x_min, hi)?,
        x_span: Interval::new(window_x.lo, part.x_min),
    });
    out.push(FeasibleSubRegion {
        kind: RegionKind::Right,
        clip_polygon: Polygon::rectangle(part.x_max, lo, window_x.hi, hi)?,
        x_span: Interval::new(part.x_max, window_x.hi),
    });
    for (k, e) in part.edges.iter().enumerate() {
        let (a, b) = (e.a, e.b);
        let region = match e.class {
            EdgeClass::Top => FeasibleSubRegion {
                kind: RegionKind::Top(k + 1),
                clip_polygon: Polygon::new(alloc::vec![
                    b,
                    a,
                    Point::new(a.x, hi),
                    Point::new(b.x, hi)
                ])?,
                x_span: Interval::new(b.x, a.x),
            },
            EdgeClass::Bottom => FeasibleSubRegion {
                kind: RegionKind::Bottom(k + 1),
                clip_polygon: Polygon::new(alloc::vec![
                    Point::new(a.x, lo),
                    Point::new(b.x, lo),
                    b,
                    a
                ])?,
                x_span: Interval::new(a.x, b.x),
            },
            EdgeClass::Side => continue,
        };
        out.push(region);
    }
    Ok(out)
}

fn window_polygon(window_x: Interval, window_y: Interval) -> Result<Polygon> {
    Polygon::rectangle(window_x.lo, window_y.lo, window_x.hi, window_y.hi)
}

/// One half-plane region per boundary edge (side edges included), as used
/// by the edge-based models. These regions overlap each other.
pub fn build_edge_regions(
    part: &NfpPart,
    window_x: Interval,
    window_y: Interval,
) -> Result<Vec<FeasibleSubRegion>> {
    check_window(part, window_x, window_y)?;
    let window = window_polygon(window_x, window_y)?;
    part.edges
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let clip = window.clip_right_of(e.a, e.b).ok_or_else(|| {
                Error::InvalidWindow(format!("edge {} leaves no feasible half-plane", k + 1))
            })?;
            let bb = clip.bbox();
            Ok(FeasibleSubRegion {
                kind: RegionKind::Edge(k + 1),
                clip_polygon: clip,
                x_span: Interval::new(bb.min.x, bb.max.x),
            })
        })
        .collect()
}
