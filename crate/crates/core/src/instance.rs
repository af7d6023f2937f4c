//! Problem instances: piece types with their reference-point parameters,
//! the expanded piece list and the strip-length bounds.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{convex_decompose, ConvexPart, Point, Polygon, EPS_GEOM};

/// Raw description of one piece type, as read from a file.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PieceSpec {
    pub name: String,
    pub vertices: Vec<Point>,
    pub demand: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PieceType {
    /// 0-based position in the input order.
    pub type_id: usize,
    pub name: String,
    pub polygon: Polygon,
    pub demand: usize,
    pub area: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub convex_parts: Vec<ConvexPart>,
    pub ref_point: Point,
}

impl PieceType {
    pub fn from_spec(type_id: usize, spec: &PieceSpec) -> Result<Self> {
        if spec.demand == 0 {
            return Err(Error::InvalidInstance(format!("piece '{}' has zero demand", spec.name)));
        }
        let named = |e: Error| match e {
            Error::InvalidGeometry(m) | Error::DegenerateGeometry(m) => {
                Error::InvalidGeometry(format!("piece '{}': {m}", spec.name))
            }
            other => other,
        };
        let polygon = Polygon::new(spec.vertices.clone()).map_err(named)?;
        let convex_parts = convex_decompose(&polygon).map_err(named)?;
        let ref_point = convex_parts[0].polygon.vertices()[0];
        let bb = polygon.bbox();
        Ok(PieceType {
            type_id,
            name: spec.name.clone(),
            area: polygon.area(),
            l_min: ref_point.x - bb.min.x,
            l_max: bb.max.x - ref_point.x,
            h_min: ref_point.y - bb.min.y,
            h_max: bb.max.y - ref_point.y,
            polygon,
            demand: spec.demand,
            convex_parts,
            ref_point,
        })
    }

    pub fn length(&self) -> f64 {
        self.l_min + self.l_max
    }

    pub fn height(&self) -> f64 {
        self.h_min + self.h_max
    }

    /// Convex part `f` (1-based) translated so the reference point is the origin.
    pub fn relative_part(&self, f: usize) -> ConvexPart {
        let p = &self.convex_parts[f - 1];
        ConvexPart {
            polygon: p.polygon.translate(-self.ref_point),
            part_index: p.part_index,
        }
    }

    /// The piece outline with its reference point moved to `at`.
    pub fn placed(&self, at: Point) -> Polygon {
        self.polygon.translate(at - self.ref_point)
    }
}

/// One copy of a piece type. `index` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Piece {
    pub index: usize,
    pub type_id: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProblemInstance {
    pub name: String,
    pub height: f64,
    pub piece_types: Vec<PieceType>,
    pub pieces: Vec<Piece>,
    pub l_lb: f64,
    pub l_ub: f64,
}

impl ProblemInstance {
    /// Builds an instance: pieces are expanded by demand and ordered by
    /// non-increasing area, ties kept in type input order.
    pub fn new(name: impl Into<String>, height: f64, specs: &[PieceSpec]) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::InvalidInstance(format!("board height {height} must be positive")));
        }
        if specs.is_empty() {
            return Err(Error::InvalidInstance("instance has no pieces".into()));
        }
        let piece_types = specs
            .iter()
            .enumerate()
            .map(|(t, s)| PieceType::from_spec(t, s))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<usize> = (0..piece_types.len()).collect();
        order.sort_by(|&a, &b| {
            piece_types[b]
                .area
                .partial_cmp(&piece_types[a].area)
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let mut pieces = Vec::new();
        for t in order {
            for _ in 0..piece_types[t].demand {
                pieces.push(Piece {
                    index: pieces.len() + 1,
                    type_id: t,
                });
            }
        }
        let mut inst = ProblemInstance {
            name: name.into(),
            height,
            piece_types,
            pieces,
            l_lb: 0.0,
            l_ub: 0.0,
        };
        let (lb, ub) = compute_bounds(&inst)?;
        inst.l_lb = lb;
        inst.l_ub = ub;
        Ok(inst)
    }

    pub fn n_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Type of piece `i` (1-based).
    pub fn piece_type(&self, i: usize) -> &PieceType {
        &self.piece_types[self.pieces[i - 1].type_id]
    }

    pub fn total_area(&self) -> f64 {
        self.piece_types.iter().map(|t| t.demand as f64 * t.area).sum()
    }

    /// Back to raw specs in type order.
    pub fn specs(&self) -> Vec<PieceSpec> {
        self.piece_types
            .iter()
            .map(|t| PieceSpec {
                name: t.name.clone(),
                vertices: t.polygon.vertices().to_vec(),
                demand: t.demand,
            })
            .collect()
    }

    /// Fails when some piece cannot fit in the strip height.
    pub fn check_fits(&self) -> Result<()> {
        for t in &self.piece_types {
            if t.height() > self.height + EPS_GEOM {
                return Err(Error::InfeasibleInstance(format!(
                    "piece '{}' is {} tall, board height is {}",
                    t.name,
                    t.height(),
                    self.height
                )));
            }
        }
        Ok(())
    }
}

/// `(L_lb, L_ub)`: the longest piece or total area over height, and the sum
/// of all piece lengths.
pub fn compute_bounds(instance: &ProblemInstance) -> Result<(f64, f64)> {
    if !(instance.height > 0.0) {
        return Err(Error::InvalidInstance(format!(
            "board height {} must be positive",
            instance.height
        )));
    }
    let ub: f64 = instance
        .piece_types
        .iter()
        .map(|t| t.demand as f64 * t.length())
        .sum();
    let longest = instance
        .piece_types
        .iter()
        .map(PieceType::length)
        .fold(0.0, f64::max);
    let lb = longest.max(instance.total_area() / instance.height);
    Ok((lb, ub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rect(name: &str, w: f64, h: f64, demand: usize) -> PieceSpec {
        PieceSpec {
            name: name.into(),
            vertices: vec![Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)],
            demand,
        }
    }

    #[test]
    fn two_unit_squares() {
        let inst = ProblemInstance::new("sq", 1.0, &[rect("s", 1.0, 1.0, 2)]).unwrap();
        assert_eq!(inst.n_pieces(), 2);
        assert_eq!((inst.l_lb, inst.l_ub), (2.0, 2.0));
    }

    #[test]
    fn bounds_examples() {
        let one = ProblemInstance::new("one", 10.0, &[rect("r", 5.0, 1.0, 1)]).unwrap();
        assert_eq!((one.l_lb, one.l_ub), (5.0, 5.0));
        let two = ProblemInstance::new("two", 1.0, &[rect("a", 2.0, 0.5, 1), rect("b", 2.0, 0.5, 1)]).unwrap();
        assert_eq!((two.l_lb, two.l_ub), (2.0, 4.0));
    }

    #[test]
    fn rejects_bad_height_and_demand() {
        assert!(matches!(
            ProblemInstance::new("x", 0.0, &[rect("r", 1.0, 1.0, 1)]),
            Err(Error::InvalidInstance(_))
        ));
        assert!(ProblemInstance::new("x", 1.0, &[rect("r", 1.0, 1.0, 0)]).is_err());
    }

    #[test]
    fn invalid_geometry_names_piece() {
        let bad = PieceSpec {
            name: "bowtie".into(),
            vertices: vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            demand: 1,
        };
        match ProblemInstance::new("x", 1.0, &[bad]) {
            Err(Error::InvalidGeometry(m)) => assert!(m.contains("bowtie")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ordering_by_area_with_stable_ties() {
        let inst = ProblemInstance::new(
            "ord",
            4.0,
            &[rect("small", 1.0, 1.0, 1), rect("big", 2.0, 2.0, 2), rect("small2", 1.0, 1.0, 1)],
        )
        .unwrap();
        let types: Vec<usize> = inst.pieces.iter().map(|p| p.type_id).collect();
        assert_eq!(types, vec![1, 1, 0, 2]);
        assert_eq!(inst.pieces[3].index, 4);
    }

    #[test]
    fn reference_parameters() {
        let l = PieceSpec {
            name: "L".into(),
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 1.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 2.0),
                Point::new(0.0, 2.0),
            ],
            demand: 1,
        };
        let t = PieceType::from_spec(0, &l).unwrap();
        assert!(t.l_min >= 0.0 && t.l_max >= 0.0 && t.h_min >= 0.0 && t.h_max >= 0.0);
        assert_eq!(t.length(), 2.0);
        assert_eq!(t.height(), 2.0);
        assert!(t.convex_parts[0].polygon.vertices().contains(&t.ref_point));
        assert_eq!(t.area, 3.0);
    }

    #[test]
    fn too_tall_piece() {
        let inst = ProblemInstance::new("tall", 1.0, &[rect("r", 1.0, 2.0, 1)]).unwrap();
        assert!(matches!(inst.check_fits(), Err(Error::InfeasibleInstance(_))));
    }
}
