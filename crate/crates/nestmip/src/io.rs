//! Instance files: a canonical JSON format and a subset of the ESICUP nesting
//! XML schema. See `docs/format.md`.

use std::path::Path;

use log::warn;
use nestmip_core::{PieceSpec, Point, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum InstanceFormat {
    Json,
    Xml,
}

impl InstanceFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(InstanceFormat::Json),
            "xml" => Some(InstanceFormat::Xml),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub height: f64,
    pub pieces: Vec<PieceFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceFile {
    pub id: String,
    #[serde(default = "one")]
    pub quantity: usize,
    pub vertices: Vec<[f64; 2]>,
}

fn one() -> usize {
    1
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceFile {
            name: inst.name.clone(),
            height: inst.height,
            pieces: inst
                .specs()
                .into_iter()
                .map(|s| PieceFile {
                    id: s.name,
                    quantity: s.demand,
                    vertices: s.vertices.iter().map(|p| [p.x, p.y]).collect(),
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let specs: Vec<PieceSpec> = self
            .pieces
            .iter()
            .map(|p| PieceSpec {
                name: p.id.clone(),
                vertices: p.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect(),
                demand: p.quantity,
            })
            .collect();
        Ok(ProblemInstance::new(self.name.clone(), self.height, &specs)?)
    }
}

/// Loads an instance; the format defaults to the file extension.
pub fn load_instance(path: &Path, format: Option<InstanceFormat>) -> Result<ProblemInstance> {
    let format = format.or_else(|| InstanceFormat::from_path(path)).ok_or_else(|| Error::Format {
        path: path.into(),
        line: 0,
        message: "cannot tell the format from the extension; use .json or .xml".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let file = match format {
        InstanceFormat::Json => parse_json(&text, path)?,
        InstanceFormat::Xml => parse_esicup_xml(&text, path)?,
    };
    file.to_instance()
}

pub fn parse_json(text: &str, path: &Path) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        path: path.into(),
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn to_json(inst: &ProblemInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn save_json(inst: &ProblemInstance, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(inst) + "\n").map_err(Error::io(path))
}

/// Reads the ESICUP subset: `problem/boards` gives the board polygon (its
/// bounding-box height is `H`), `problem/lot/piece` the pieces with their
/// `quantity` and one `component` referencing a `polygons/polygon` made of
/// `lines/segment` elements.
pub fn parse_esicup_xml(text: &str, path: &Path) -> Result<InstanceFile> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Format {
        path: path.into(),
        line: e.pos().row as usize,
        message: e.to_string(),
    })?;
    let err = |node: roxmltree::Node, message: String| Error::Format {
        path: path.into(),
        line: doc.text_pos_at(node.range().start).row as usize,
        message,
    };
    let root = doc.root_element();

    let mut polygons = std::collections::HashMap::new();
    if let Some(polys) = child(root, "polygons") {
        for poly in polys.children().filter(|c| c.is_element()) {
            if !poly.has_tag_name("polygon") {
                warn!("{}: ignoring <{}> in <polygons>", path.display(), poly.tag_name().name());
                continue;
            }
            let id = poly.attribute("id").ok_or_else(|| err(poly, "polygon without id".into()))?;
            let lines = child(poly, "lines").ok_or_else(|| err(poly, format!("polygon {id} has no <lines>")))?;
            let mut segs = Vec::new();
            for seg in lines.children().filter(|c| c.has_tag_name("segment")) {
                let num = |a: &str| -> Result<f64> {
                    seg.attribute(a)
                        .ok_or_else(|| err(seg, format!("segment lacks {a}")))?
                        .trim()
                        .parse()
                        .map_err(|_| err(seg, format!("segment attribute {a} is not a number")))
                };
                let n: f64 = seg.attribute("n").and_then(|s| s.trim().parse().ok()).unwrap_or(segs.len() as f64 + 1.0);
                segs.push((n, [num("x0")?, num("y0")?]));
            }
            segs.sort_by(|a, b| a.0.total_cmp(&b.0));
            polygons.insert(id.to_string(), segs.into_iter().map(|s| s.1).collect::<Vec<_>>());
        }
    }

    let problem = child(root, "problem").ok_or_else(|| err(root, "missing <problem>".into()))?;
    for c in problem.children().filter(|c| c.is_element()) {
        if !c.has_tag_name("boards") && !c.has_tag_name("lot") {
            warn!("{}: ignoring <{}> in <problem>", path.display(), c.tag_name().name());
        }
    }
    let component_polygon = |piece: roxmltree::Node| -> Result<Vec<[f64; 2]>> {
        let comps: Vec<_> = piece.children().filter(|c| c.has_tag_name("component")).collect();
        let [comp] = comps[..] else {
            return Err(err(piece, format!("expected exactly one <component>, found {}", comps.len())));
        };
        let id = comp.attribute("idPolygon").ok_or_else(|| err(comp, "component without idPolygon".into()))?;
        let verts = polygons.get(id).ok_or_else(|| err(comp, format!("unknown polygon {id}")))?;
        let off = |a: &str| comp.attribute(a).and_then(|s| s.trim().parse::<f64>().ok()).unwrap_or(0.0);
        let (dx, dy) = (off("xOffset"), off("yOffset"));
        Ok(verts.iter().map(|&[x, y]| [x + dx, y + dy]).collect())
    };
    let quantity = |piece: roxmltree::Node| -> Result<usize> {
        match piece.attribute("quantity") {
            None => Ok(1),
            Some(q) => q.trim().parse().map_err(|_| err(piece, format!("bad quantity '{q}'"))),
        }
    };

    let boards = child(problem, "boards").ok_or_else(|| err(problem, "missing <boards>".into()))?;
    let board = child(boards, "piece").ok_or_else(|| err(boards, "no board piece".into()))?;
    let outline = component_polygon(board)?;
    let (lo, hi) = outline.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[1]), hi.max(p[1])));
    let height = hi - lo;

    let lot = child(problem, "lot").ok_or_else(|| err(problem, "missing <lot>".into()))?;
    let mut pieces = Vec::new();
    for piece in lot.children().filter(|c| c.has_tag_name("piece")) {
        if let Some(o) = child(piece, "orientation") {
            let angles: Vec<_> = o.descendants().filter_map(|d| d.attribute("angle")).collect();
            if angles.iter().any(|a| !a.trim().parse::<f64>().is_ok_and(|v| v == 0.0)) {
                warn!("{}: piece {:?} allows rotations; only the given orientation is used", path.display(), piece.attribute("id"));
            }
        }
        pieces.push(PieceFile {
            id: piece.attribute("id").unwrap_or("piece").to_string(),
            quantity: quantity(piece)?,
            vertices: component_polygon(piece)?,
        });
    }
    let name = child(root, "name")
        .and_then(|n| n.text())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_default();
    Ok(InstanceFile { name, height, pieces })
}

fn child<'a, 'i>(n: roxmltree::Node<'a, 'i>, tag: &str) -> Option<roxmltree::Node<'a, 'i>> {
    n.children().find(|c| c.has_tag_name(tag))
}

/// Instance files under `dir` (recursively), sorted by path.
pub fn instance_files(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).map_err(Error::io(&d))? {
            let p = entry.map_err(Error::io(&d))?.path();
            if p.is_dir() {
                stack.push(p);
            } else if InstanceFormat::from_path(&p).is_some() {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XML: &str = r#"<?xml version="1.0"?>
<nesting>
  <name>tiny</name>
  <problem>
    <boards>
      <piece id="board" quantity="1"><component idPolygon="b" type="0"/></piece>
    </boards>
    <lot>
      <piece id="sq" quantity="2">
        <orientation><enumeration angle="0"/></orientation>
        <component idPolygon="p" type="0" xOffset="1" yOffset="0"/>
      </piece>
    </lot>
  </problem>
  <polygons>
    <polygon id="b" nVertices="4"><lines>
      <segment n="1" x0="0" y0="0" x1="10" y1="0"/>
      <segment n="2" x0="10" y0="0" x1="10" y1="3"/>
      <segment n="3" x0="10" y0="3" x1="0" y1="3"/>
      <segment n="4" x0="0" y0="3" x1="0" y1="0"/>
    </lines></polygon>
    <polygon id="p" nVertices="3"><lines>
      <segment n="2" x0="1" y0="0" x1="0" y1="1"/>
      <segment n="1" x0="0" y0="0" x1="1" y1="0"/>
      <segment n="3" x0="0" y0="1" x1="0" y1="0"/>
    </lines></polygon>
  </polygons>
</nesting>"#;

    #[test]
    fn xml_subset() {
        let f = parse_esicup_xml(XML, Path::new("t.xml")).unwrap();
        assert_eq!(f.name, "tiny");
        assert_eq!(f.height, 3.0);
        assert_eq!(f.pieces.len(), 1);
        assert_eq!(f.pieces[0].quantity, 2);
        assert_eq!(f.pieces[0].vertices, vec![[1.0, 0.0], [2.0, 0.0], [1.0, 1.0]]);
        assert_eq!(f.to_instance().unwrap().n_pieces(), 2);
    }

    #[test]
    fn xml_errors_carry_lines() {
        let bad = XML.replace("idPolygon=\"p\"", "idPolygon=\"nope\"");
        match parse_esicup_xml(&bad, Path::new("t.xml")) {
            Err(Error::Format { line, message, .. }) => {
                assert_eq!(line, 11);
                assert!(message.contains("nope"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_esicup_xml("<a>", Path::new("t.xml")), Err(Error::Format { .. })));
    }

    #[test]
    fn json_errors_carry_lines() {
        let e = parse_json("{\n\"name\": \"x\",\n\"height\": }", Path::new("t.json")).unwrap_err();
        assert!(matches!(e, Error::Format { line: 3, .. }));
    }
}
