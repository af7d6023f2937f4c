//! Performance profiles: per-model CDF of time ratios against the best model.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Times below this are treated as this, so a zero time cannot divide.
pub const MIN_TIME_S: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfilePoint {
    pub model: String,
    pub tau: f64,
    pub rho: f64,
}

/// Time of one model on one instance; `None` when it did not reach
/// optimality.
pub type ModelTimes = (String, Vec<(String, Option<f64>)>);

/// Time ratios `r[m][φ]`, with unsolved entries set to `r_M`. Returns the
/// ratios (instances in name order) and the `r_M` used.
pub fn time_ratios(models: &[ModelTimes], r_m: Option<f64>) -> Result<(Vec<Vec<f64>>, f64)> {
    let Some((first_name, first)) = models.first() else {
        return Err(Error::Input("no models to profile".into()));
    };
    let keys = instance_map(first_name, first)?;
    let mut tables = Vec::with_capacity(models.len());
    for (name, rows) in models {
        let map = instance_map(name, rows)?;
        if map.keys().ne(keys.keys()) {
            return Err(Error::Input(format!("model {name} was run on a different instance set than {first_name}")));
        }
        tables.push(map);
    }
    let mut ratios: Vec<Vec<Option<f64>>> = alloc::vec![Vec::with_capacity(keys.len()); models.len()];
    for inst in keys.keys() {
        let best = tables.iter().filter_map(|t| t[inst]).map(|t| t.max(MIN_TIME_S)).fold(f64::INFINITY, f64::min);
        for (m, t) in tables.iter().enumerate() {
            ratios[m].push(t[inst].map(|t| t.max(MIN_TIME_S) / best));
        }
    }
    let max_finite = ratios.iter().flatten().flatten().copied().fold(1.0, f64::max);
    let r_m = match r_m {
        None => 2.0 * max_finite,
        Some(r) if r >= max_finite && r.is_finite() => r,
        Some(r) => return Err(Error::Input(format!("r_M = {r} is below the largest observed ratio {max_finite}"))),
    };
    let full = ratios.into_iter().map(|row| row.into_iter().map(|r| r.unwrap_or(r_m)).collect()).collect();
    Ok((full, r_m))
}

fn instance_map<'a>(model: &str, rows: &'a [(String, Option<f64>)]) -> Result<BTreeMap<&'a str, Option<f64>>> {
    let mut map = BTreeMap::new();
    for (inst, t) in rows {
        if let Some(t) = t {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(Error::Input(format!("model {model}, instance {inst}: invalid time {t}")));
            }
        }
        if map.insert(inst.as_str(), *t).is_some() {
            return Err(Error::Input(format!("model {model} lists instance {inst} twice")));
        }
    }
    Ok(map)
}

/// `ρ_m(τ) = |{φ : r_{φ,m} ≤ τ}| / |Φ|`, evaluated at τ = 1, every observed
/// ratio and `r_M`. Points are grouped by model, τ ascending.
pub fn performance_profile(models: &[ModelTimes], r_m: Option<f64>) -> Result<Vec<ProfilePoint>> {
    let (ratios, r_m) = time_ratios(models, r_m)?;
    let mut taus: Vec<f64> = ratios.iter().flatten().copied().collect();
    taus.push(1.0);
    taus.push(r_m);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut out = Vec::with_capacity(taus.len() * models.len());
    for ((name, _), row) in models.iter().zip(&ratios) {
        let n = row.len().max(1) as f64;
        for &tau in &taus {
            let hits = row.iter().filter(|&&r| r <= tau).count();
            out.push(ProfilePoint { model: name.clone(), tau, rho: hits as f64 / n });
        }
    }
    Ok(out)
}
