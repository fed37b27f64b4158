use std::fs;
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{
    realize, replication_rng, series_terms, support_region, Method, SeriesTruncation,
    SimulationOptions,
};
use super::grid::{ladder_offsets, GridSpec};
use crate::error::{Error, Result};
use crate::model::FieldModel;

pub const CSV_HEADER: [&str; 6] = ["t", "replication", "m_t", "seed", "method", "level"];

/// Run metadata stored next to a dataset CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub model_digest: String,
    pub alpha: f64,
    pub grid: GridSpec,
    pub method: Method,
    /// Grid points in each window of the ladder.
    pub grid_points: Vec<u128>,
    pub distinct_offsets: usize,
    pub truncation: Option<SeriesTruncation>,
}

/// `M_t` for every replication and every scale of the ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximaDataset {
    pub meta: DatasetMeta,
    /// `values[r][j]` is `M_{t_j}` in replication `r`.
    pub values: Vec<Vec<f64>>,
}

impl MaximaDataset {
    /// Builds a dataset from raw values, checking shape and invariants.
    pub fn new(meta: DatasetMeta, values: Vec<Vec<f64>>) -> Result<Self> {
        let w = meta.grid.t_ladder.len();
        if values.len() != meta.grid.replications {
            return Err(Error::Dataset(format!(
                "expected {} replications, found {}",
                meta.grid.replications,
                values.len()
            )));
        }
        for (r, row) in values.iter().enumerate() {
            if row.len() != w {
                return Err(Error::Dataset(format!(
                    "replication {r} has {} scales, expected {w}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Dataset(format!(
                    "replication {r} has a non-finite or negative maximum"
                )));
            }
            if row.windows(2).any(|p| p[0] > p[1]) {
                return Err(Error::Dataset(format!(
                    "replication {r}: maxima decrease along the ladder"
                )));
            }
        }
        Ok(Self { meta, values })
    }

    pub fn t_ladder(&self) -> &[f64] {
        &self.meta.grid.t_ladder
    }

    pub fn replications(&self) -> usize {
        self.values.len()
    }

    /// All replications of `M_{t_j}`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        let method = self.meta.method.to_string();
        let seed = self.meta.grid.seed.to_string();
        let level = self.meta.grid.level.to_string();
        for (r, row) in self.values.iter().enumerate() {
            for (t, m) in self.t_ladder().iter().zip(row) {
                w.write_record([
                    t.to_string(),
                    r.to_string(),
                    m.to_string(),
                    seed.clone(),
                    method.clone(),
                    level.clone(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn meta_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("plain data") + "\n"
    }

    /// Writes `path` and its metadata sidecar.
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        fs::write(meta_path(path), self.meta_json())?;
        Ok(())
    }

    /// Reads a dataset CSV and its metadata sidecar.
    pub fn read(path: &Path) -> Result<Self> {
        let csv_text = fs::read_to_string(path)?;
        let meta_file = meta_path(path);
        let meta_text = fs::read_to_string(&meta_file).map_err(|e| {
            Error::Dataset(format!("cannot read metadata {}: {e}", meta_file.display()))
        })?;
        let meta: DatasetMeta = serde_json::from_str(&meta_text)?;
        Self::from_csv(&csv_text, meta)
    }

    pub fn from_csv(text: &str, meta: DatasetMeta) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header = rdr.headers()?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::Dataset(format!(
                "unexpected header {:?}, expected {}",
                header.iter().collect::<Vec<_>>(),
                CSV_HEADER.join(",")
            )));
        }
        let ladder = &meta.grid.t_ladder;
        let mut values = vec![vec![f64::NAN; ladder.len()]; meta.grid.replications];
        let mut seen = 0usize;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| Error::Dataset(format!("row {}: bad {what}", line + 2));
            let t: f64 = rec[0].parse().map_err(|_| bad("t"))?;
            let r: usize = rec[1].parse().map_err(|_| bad("replication"))?;
            let m: f64 = rec[2].parse().map_err(|_| bad("m_t"))?;
            let j = ladder
                .iter()
                .position(|&x| x == t)
                .ok_or_else(|| bad("t (not in ladder)"))?;
            if r >= values.len() || !values[r][j].is_nan() {
                return Err(bad("replication (out of range or duplicate)"));
            }
            if rec[4].parse::<Method>()? != meta.method || rec[5] != meta.grid.level.to_string() {
                return Err(bad("method/level (disagrees with metadata)"));
            }
            values[r][j] = m;
            seen += 1;
        }
        if seen != ladder.len() * meta.grid.replications {
            return Err(Error::Dataset(format!(
                "expected {} rows, found {seen}",
                ladder.len() * meta.grid.replications
            )));
        }
        Self::new(meta, values)
    }
}

/// Sidecar path `<csv>.meta.json`.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Partial maxima over the nested windows of `grid`, one field realization
/// per replication. Replication `r` uses stream `r` of the master seed, so
/// the result does not depend on scheduling.
pub fn partial_maxima(
    model: &FieldModel,
    grid: &GridSpec,
    opts: &SimulationOptions,
) -> Result<MaximaDataset> {
    let set = ladder_offsets(&model.spec, &grid.t_ladder, grid.level, opts.point_budget)?;
    super::field::preflight(model, &set, grid.level, opts)?;
    let windows = set.windows();
    let one = |r: usize| -> Result<Vec<f64>> {
        let mut rng = replication_rng(grid.seed, r as u64);
        let (vals, _) = realize(model, &set, opts, &mut rng)?;
        let mut best = vec![0.0f64; windows];
        for (v, &w) in vals.iter().zip(&set.first_window) {
            best[w] = best[w].max(v.abs());
        }
        for j in 1..windows {
            best[j] = best[j].max(best[j - 1]);
        }
        Ok(best)
    };
    #[cfg(feature = "parallel")]
    let values = (0..grid.replications)
        .into_par_iter()
        .map(one)
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let values = (0..grid.replications)
        .map(one)
        .collect::<Result<Vec<_>>>()?;

    let truncation = match opts.method {
        Method::Cell => None,
        Method::Series => {
            let (lo, hi) = support_region(model, &set.offsets);
            let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
            Some(series_terms(model, vol, opts))
        }
    };
    let meta = DatasetMeta {
        model_digest: model.digest().to_string(),
        alpha: model.alpha,
        grid: grid.clone(),
        method: opts.method,
        grid_points: set.grid_points.clone(),
        distinct_offsets: set.len(),
        truncation,
    };
    MaximaDataset::new(meta, values)
}
