#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use nestmip::io::load_instance;
use nestmip::Backend;
use nestmip_core::ProblemInstance;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn synthetic_paths() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(repo_root().join("data/synthetic"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

pub fn synthetic() -> Vec<ProblemInstance> {
    synthetic_paths().iter().map(|p| load_instance(p, None).unwrap()).collect()
}

/// Optimal lengths frozen from an independent MIP solver run.
pub fn frozen_optima() -> Vec<(String, f64)> {
    let mut r = csv::Reader::from_path(repo_root().join("data/synthetic/optima.csv")).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].to_string(), rec[1].parse().unwrap())
        })
        .collect()
}

/// The solver named by `NESTMIP_SOLVER_CMD`, else the bundled HiGHS script
/// when `highspy` imports.
pub fn external_backend() -> Option<Backend> {
    if let Ok(t) = std::env::var("NESTMIP_SOLVER_CMD") {
        if !t.trim().is_empty() {
            return Some(Backend::new(t));
        }
    }
    let ok = Command::new("python3").args(["-c", "import highspy"]).output().is_ok_and(|o| o.status.success());
    ok.then(|| {
        let script = repo_root().join("scripts/highs_backend.py");
        Backend::new(format!(
            "python3 {} {{model}} {{sol}} --time {{time}} --gap {{gap}} --threads {{threads}} --seed {{seed}}",
            script.display()
        ))
    })
}
