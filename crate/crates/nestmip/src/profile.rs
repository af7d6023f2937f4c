//! Performance profiles from benchmark CSVs.

use std::path::Path;

use nestmip_core::profile::{performance_profile, ModelTimes};
use nestmip_core::ProfilePoint;

use crate::bench::{is_optimal, read_rows, read_status, status_path};
use crate::error::{Error, Result};

/// Largest gap still read as solved when a CSV has no status sidecar.
pub const SOLVED_GAP: f64 = 1e-4;

/// Reads one results CSV as a model's time table. The model is named after
/// the file stem. An instance counts as solved when its sidecar status is
/// optimal or, without a sidecar, when its gap is at most [`SOLVED_GAP`].
pub fn model_times(csv: &Path) -> Result<ModelTimes> {
    let rows = read_rows(csv)?;
    let status = status_path(csv);
    let solved: Vec<bool> = if status.exists() {
        let st = read_status(&status)?;
        rows.iter()
            .map(|r| st.iter().find(|s| s.instance == r.instance_name).is_some_and(|s| is_optimal(&s.status)))
            .collect()
    } else {
        rows.iter().map(|r| r.gap.is_some_and(|g| g <= SOLVED_GAP)).collect()
    };
    let name = csv.file_stem().map_or_else(|| csv.display().to_string(), |s| s.to_string_lossy().into_owned());
    let times = rows.iter().zip(solved).map(|(r, ok)| (r.instance_name.clone(), ok.then_some(r.time_s))).collect();
    Ok((name, times))
}

/// Profile over several results CSVs. Status sidecars in the list are
/// skipped so a shell glob over a results directory works.
pub fn profile_from_csvs(csvs: &[impl AsRef<Path>], r_m: Option<f64>) -> Result<Vec<ProfilePoint>> {
    let models = csvs
        .iter()
        .map(AsRef::as_ref)
        .filter(|p| !p.to_string_lossy().ends_with(".status.csv"))
        .map(model_times)
        .collect::<Result<Vec<_>>>()?;
    Ok(performance_profile(&models, r_m)?)
}

pub fn write_profile(path: &Path, points: &[ProfilePoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["model", "tau", "rho"])?;
    for p in points {
        w.write_record([p.model.clone(), p.tau.to_string(), p.rho.to_string()])?;
    }
    w.flush().map_err(Error::io(path))
}
