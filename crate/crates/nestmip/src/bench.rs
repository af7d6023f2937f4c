//! Batch runs: one results CSV per variant, a status sidecar, and an SVG per
//! solved instance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use nestmip_core::{model_stats, verify_placement, BuildOptions, ModelVariant, Placement, ProblemInstance, SolveResult, SolveStatus};

use crate::error::{Error, Result};
use crate::io::load_instance;
use crate::solve::{solve_instance, Solver};

/// Column names of the results CSV, in order.
pub const BENCH_COLUMNS: [&str; 10] = [
    "instance",
    "pieces",
    "efficiency",
    "lower_bound",
    "upper_bound",
    "gap",
    "binaries",
    "nodes",
    "simplex_iterations",
    "time_s",
];

/// Marker for values that do not exist because no solution was found.
pub const MISSING: &str = "X";

/// One results line. `None` values are written as `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance_name: String,
    pub n_pieces: usize,
    pub efficiency: Option<f64>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub gap: Option<f64>,
    pub n_binary: usize,
    pub nodes: u64,
    pub simplex_iterations: u64,
    pub time_s: f64,
}

impl BenchRow {
    pub fn from_result(inst: &ProblemInstance, n_binary: usize, r: &SolveResult) -> Self {
        let ub = r.placement.as_ref().map(|_| r.upper_bound).filter(|u| u.is_finite());
        BenchRow {
            instance_name: inst.name.clone(),
            n_pieces: inst.n_pieces(),
            efficiency: ub.map(|u| inst.total_area() / (inst.height * u)),
            lower_bound: Some(r.lower_bound).filter(|l| l.is_finite()),
            upper_bound: ub,
            gap: ub.and(r.gap()),
            n_binary,
            nodes: r.nodes,
            simplex_iterations: r.simplex_iterations,
            time_s: r.wall_time_s,
        }
    }

    fn failed(name: &str, n_pieces: usize, time_s: f64) -> Self {
        BenchRow {
            instance_name: name.into(),
            n_pieces,
            efficiency: None,
            lower_bound: None,
            upper_bound: None,
            gap: None,
            n_binary: 0,
            nodes: 0,
            simplex_iterations: 0,
            time_s,
        }
    }

    pub fn to_record(&self) -> [String; 10] {
        let opt = |v: Option<f64>| v.map_or_else(|| MISSING.to_string(), |v| v.to_string());
        [
            self.instance_name.clone(),
            self.n_pieces.to_string(),
            opt(self.efficiency),
            opt(self.lower_bound),
            opt(self.upper_bound),
            opt(self.gap),
            self.n_binary.to_string(),
            self.nodes.to_string(),
            self.simplex_iterations.to_string(),
            self.time_s.to_string(),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |col: &str, v: &str| Error::Parse { line, message: format!("column {col}: '{v}'") };
        if rec.len() != BENCH_COLUMNS.len() {
            return Err(Error::Parse { line, message: format!("expected 10 columns, found {}", rec.len()) });
        }
        let f = |k: usize| -> Result<f64> { rec[k].parse().map_err(|_| bad(BENCH_COLUMNS[k], &rec[k])) };
        let opt = |k: usize| -> Result<Option<f64>> { if &rec[k] == MISSING { Ok(None) } else { f(k).map(Some) } };
        let n = |k: usize| -> Result<u64> { rec[k].parse().map_err(|_| bad(BENCH_COLUMNS[k], &rec[k])) };
        Ok(BenchRow {
            instance_name: rec[0].to_string(),
            n_pieces: n(1)? as usize,
            efficiency: opt(2)?,
            lower_bound: opt(3)?,
            upper_bound: opt(4)?,
            gap: opt(5)?,
            n_binary: n(6)? as usize,
            nodes: n(7)?,
            simplex_iterations: n(8)?,
            time_s: f(9)?,
        })
    }
}

pub fn write_rows(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(BENCH_COLUMNS)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn read_rows(path: &Path) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(BENCH_COLUMNS) {
        return Err(Error::Parse { line: 1, message: format!("{}: unexpected header", path.display()) });
    }
    r.records().map(|rec| BenchRow::from_record(&rec?)).collect()
}

/// Per-instance outcome details kept next to the results CSV.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StatusRow {
    pub instance: String,
    pub status: String,
    /// False when the solver did not report nodes and iterations and the
    /// CSV holds placeholder zeros.
    pub counts_reported: bool,
    pub verified: Option<bool>,
    pub message: String,
}

pub fn write_status(path: &Path, rows: &[StatusRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn read_status(path: &Path) -> Result<Vec<StatusRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}

/// Path of the status sidecar for a results CSV.
pub fn status_path(csv: &Path) -> PathBuf {
    csv.with_extension("status.csv")
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub instances: Vec<PathBuf>,
    pub variants: Vec<ModelVariant>,
    pub options: BuildOptions,
    pub solver: Solver,
    pub out_dir: PathBuf,
    /// Tolerance for the placement check.
    pub verify_tol: f64,
    /// Run instances concurrently. Times are then not comparable.
    pub parallel: bool,
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub row: BenchRow,
    pub status: StatusRow,
    pub result: Option<SolveResult>,
}

/// Solves every instance under every variant and writes
/// `<out>/<variant>.csv`, `<out>/<variant>.status.csv` and
/// `<out>/<variant>/<instance>.svg`. Per-instance failures are recorded and
/// the run continues.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<(ModelVariant, Vec<BenchOutcome>)>> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(Error::io(&cfg.out_dir))?;
    if cfg.parallel {
        warn!("running instances concurrently: reported times are not comparable");
    }
    let loaded: Vec<(String, std::result::Result<ProblemInstance, String>)> = cfg
        .instances
        .iter()
        .map(|p| {
            let stem = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            (stem, load_instance(p, None).map_err(|e| e.to_string()))
        })
        .collect();
    let mut all = Vec::new();
    for &variant in &cfg.variants {
        let svg_dir = cfg.out_dir.join(variant.slug());
        std::fs::create_dir_all(&svg_dir).map_err(Error::io(&svg_dir))?;
        let outcomes: Vec<BenchOutcome> = if cfg.parallel {
            std::thread::scope(|s| {
                let handles: Vec<_> = loaded.iter().map(|(stem, inst)| s.spawn(move || run_one(cfg, variant, stem, inst))).collect();
                handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
            })
        } else {
            loaded.iter().map(|(stem, inst)| run_one(cfg, variant, stem, inst)).collect()
        };
        for (o, (_, inst)) in outcomes.iter().zip(&loaded) {
            if let (Ok(inst), Some(Some(p))) = (inst, o.result.as_ref().map(|r| r.placement.as_ref())) {
                let path = svg_dir.join(format!("{}.svg", inst.name));
                std::fs::write(&path, render_svg(inst, p)).map_err(Error::io(&path))?;
            }
        }
        let csv_path = cfg.out_dir.join(format!("{}.csv", variant.slug()));
        write_rows(&csv_path, &outcomes.iter().map(|o| o.row.clone()).collect::<Vec<_>>())?;
        write_status(&status_path(&csv_path), &outcomes.iter().map(|o| o.status.clone()).collect::<Vec<_>>())?;
        all.push((variant, outcomes));
    }
    Ok(all)
}

fn run_one(cfg: &BenchConfig, variant: ModelVariant, stem: &str, inst: &std::result::Result<ProblemInstance, String>) -> BenchOutcome {
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            return BenchOutcome {
                row: BenchRow::failed(stem, 0, 0.0),
                status: StatusRow { instance: stem.into(), status: "error".into(), counts_reported: false, verified: None, message: e.clone() },
                result: None,
            }
        }
    };
    info!("{} / {}", variant, inst.name);
    let start = Instant::now();
    let n_binary = nestmip_core::build_model(inst, variant, cfg.options).map(|b| model_stats(&b.model).n_binary);
    let solved = n_binary.map_err(crate::Error::from).and_then(|nb| Ok((nb, solve_instance(inst, variant, cfg.options, &cfg.solver)?)));
    match solved {
        Ok((nb, r)) => {
            let verified = r.placement.as_ref().map(|p| verify_placement(inst, p, cfg.verify_tol));
            let message = verified.as_ref().map_or_else(String::new, |v| v.summary());
            if verified.as_ref().is_some_and(|v| !v.is_clean()) {
                warn!("{} / {}: placement fails verification: {message}", variant, inst.name);
            }
            BenchOutcome {
                row: BenchRow::from_result(inst, nb, &r),
                status: StatusRow {
                    instance: inst.name.clone(),
                    status: r.status.as_str().into(),
                    counts_reported: r.counts_reported,
                    verified: verified.map(|v| v.is_clean()),
                    message,
                },
                result: Some(r),
            }
        }
        Err(e) => {
            warn!("{} / {}: {e}", variant, inst.name);
            BenchOutcome {
                row: BenchRow::failed(&inst.name, inst.n_pieces(), start.elapsed().as_secs_f64()),
                status: StatusRow { instance: inst.name.clone(), status: "error".into(), counts_reported: false, verified: None, message: e.to_string() },
                result: None,
            }
        }
    }
}

/// True when a status string from the sidecar counts as solved to optimality.
pub fn is_optimal(status: &str) -> bool {
    SolveStatus::parse(status) == Some(SolveStatus::Optimal)
}

/// SVG 1.1 drawing: the board as an unfilled rectangle, each piece filled at
/// half opacity with its index at the centroid. User units equal instance
/// units, with `y` pointing up.
pub fn render_svg(inst: &ProblemInstance, placement: &Placement) -> String {
    let (l, h) = (placement.length.max(f64::MIN_POSITIVE), inst.height);
    let m = 0.02 * l.max(h);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        -m,
        -m,
        l + 2.0 * m,
        h + 2.0 * m
    );
    let _ = writeln!(s, "  <title>{} L={}</title>", xml_escape(&inst.name), placement.length);
    let _ = writeln!(s, r#"  <g transform="matrix(1 0 0 -1 0 {h})">"#);
    let _ = writeln!(
        s,
        r#"    <rect x="0" y="0" width="{l}" height="{h}" fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke"/>"#
    );
    let mut labels = String::new();
    for (k, pos) in placement.positions.iter().enumerate() {
        let t = inst.piece_type(k + 1);
        let poly = t.placed(*pos);
        let pts: Vec<String> = poly.vertices().iter().map(|p| format!("{},{}", p.x, p.y)).collect();
        let hue = (t.type_id * 67) % 360;
        let _ = writeln!(
            s,
            r#"    <polygon points="{}" fill="hsl({hue},60%,55%)" fill-opacity="0.5" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke"/>"#,
            pts.join(" ")
        );
        let c = poly.vertices().iter().fold((0.0, 0.0), |a, p| (a.0 + p.x, a.1 + p.y));
        let n = poly.len() as f64;
        let _ = writeln!(
            labels,
            r#"  <text x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            c.0 / n,
            h - c.1 / n,
            0.05 * h,
            k + 1
        );
    }
    let _ = writeln!(s, "  </g>");
    s.push_str(&labels);
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
