//! Synthetic data, CSV ingestion, and standardized train/test splits.

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::network::Dataset;
use crate::network::NetworkParams;
use crate::rng::{stream, streams, Gaussian};
use crate::structure::{check_minimal, StructureTolerances};

/// Upper bound on redraws of the true network. Continuous draws are minimal
/// with probability one, so this is never reached in practice.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSpec {
    pub d: usize,
    pub h_star: usize,
    pub n: usize,
    pub sigma2: f64,
    pub seed: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self { d: 5, h_star: 3, n: 2000, sigma2: 1.0, seed: 0 }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.h_star == 0 || self.n == 0 {
            return Err(Error::InvalidArgument(format!(
                "simulation needs d, H*, n ≥ 1 (got {}, {}, {})",
                self.d, self.h_star, self.n
            )));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma2 {} must be ≥ 0", self.sigma2)));
        }
        Ok(())
    }
}

/// Draws a minimal true network with i.i.d. standard normal parameters and a
/// dataset `Y = f(X) + ε` with standard normal inputs and `ε ~ N(0, σ²)`.
pub fn simulate_dataset(spec: &SimSpec) -> Result<(Dataset, NetworkParams)> {
    spec.validate()?;
    let mut g = Gaussian::new(stream(spec.seed, streams::TRUE_PARAMS));
    let mut theta = vec![0.0; spec.h_star * (spec.d + 2) + 1];
    let mut truth = None;
    for _ in 0..MAX_REDRAWS {
        g.fill(&mut theta, 1.0);
        let p = NetworkParams::from_vec(spec.d, spec.h_star, theta.clone())?;
        if check_minimal(&p, StructureTolerances::default()).minimal {
            truth = Some(p);
            break;
        }
    }
    let truth = truth.ok_or_else(|| Error::InvalidArgument("could not draw a minimal network".into()))?;

    let mut gx = Gaussian::new(stream(spec.seed, streams::INPUTS));
    let mut x = vec![0.0; spec.n * spec.d];
    gx.fill(&mut x, 1.0);
    let mut noise = Gaussian::new(stream(spec.seed, streams::NOISE));
    let sigma = spec.sigma2.sqrt();
    let y = x
        .chunks(spec.d)
        .map(|row| {
            let e = noise.sample();
            truth.forward_unchecked(row) + sigma * e
        })
        .collect();
    Ok((Dataset::new(spec.d, x, y)?, truth))
}

/// Numeric CSV with a header row. Every non-target column becomes a feature,
/// in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCsv {
    pub data: Dataset,
    pub feature_names: Vec<String>,
    pub target_name: String,
}

pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    Ok(load_csv_with_names(path, target_column)?.data)
}

pub fn load_csv_with_names(path: impl AsRef<Path>, target_column: &str) -> Result<LoadedCsv> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let target = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::UnknownColumn(target_column.to_string()))?;
    let d = headers.len() - 1;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, record) in reader.records().enumerate() {
        // header is line 1
        let line = k + 2;
        let record =
            record.map_err(|e| Error::MalformedCsv { row: line, column: "-".into(), message: e.to_string() })?;
        if record.len() != headers.len() {
            return Err(Error::MalformedCsv {
                row: line,
                column: "-".into(),
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let value: f64 =
                cell.trim().parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| Error::MalformedCsv {
                    row: line,
                    column: headers[j].clone(),
                    message: format!("{cell:?} is not a finite number"),
                })?;
            if j == target {
                y.push(value);
            } else {
                x.push(value);
            }
        }
    }
    let mut feature_names = headers.clone();
    let target_name = feature_names.remove(target);
    Ok(LoadedCsv { data: Dataset::new(d, x, y)?, feature_names, target_name })
}

/// Writes `x1..xd,y` with a header row.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=data.d()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (row, y) in data.rows().zip(data.y()) {
        w.write_record(row.iter().chain(std::iter::once(y)).map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a simulated dataset as CSV plus a JSON sidecar with the true network.
pub fn export_simulation(data: &Dataset, truth: &NetworkParams, csv_path: &Path, json_path: &Path) -> Result<()> {
    write_csv(data, csv_path)?;
    std::fs::write(json_path, truth.to_json()?)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { test_fraction: 0.25, seed: 0 }
    }
}

/// Per-column affine maps fitted on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub x_mean: Vec<f64>,
    pub x_scale: Vec<f64>,
    pub y_mean: f64,
    pub y_scale: f64,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub warnings: Vec<String>,
}

fn mean_and_scale(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl Standardizer {
    fn fit(train: &Dataset, train_idx: Vec<usize>, test_idx: Vec<usize>) -> Self {
        let mut warnings = Vec::new();
        let mut x_mean = Vec::with_capacity(train.d());
        let mut x_scale = Vec::with_capacity(train.d());
        for j in 0..train.d() {
            let (m, mut s) = mean_and_scale(&train.rows().map(|r| r[j]).collect::<Vec<_>>());
            if !(s > 0.0) {
                warnings.push(format!("feature {j} is constant on the training split; scale set to 1"));
                s = 1.0;
            }
            x_mean.push(m);
            x_scale.push(s);
        }
        let (y_mean, mut y_scale) = mean_and_scale(train.y());
        if !(y_scale > 0.0) {
            warnings.push("target is constant on the training split; scale set to 1".into());
            y_scale = 1.0;
        }
        Self { x_mean, x_scale, y_mean, y_scale, train_idx, test_idx, warnings }
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let x = data
            .x()
            .chunks(data.d().max(1))
            .flat_map(|row| row.iter().zip(self.x_mean.iter().zip(&self.x_scale)).map(|(v, (m, s))| (v - m) / s))
            .collect();
        let y = data.y().iter().map(|v| (v - self.y_mean) / self.y_scale).collect();
        Dataset::new(data.d(), x, y)
    }

    /// Maps a standardized prediction back to the original target scale.
    pub fn unscale_y(&self, y: f64) -> f64 {
        y * self.y_scale + self.y_mean
    }
}

/// Random split without replacement; the test set has `floor(test_fraction·n)` rows.
/// Features and target of both parts are standardized with training statistics.
pub fn split_standardize(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset, Standardizer)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("test fraction {} must lie in (0, 1)", spec.test_fraction)));
    }
    let n = data.n();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 rows to split, got {n}")));
    }
    let n_test = ((spec.test_fraction * n as f64).floor() as usize).clamp(1, n - 2);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream(spec.seed, streams::SPLIT));
    let test_idx = idx[..n_test].to_vec();
    let train_idx = idx[n_test..].to_vec();
    let raw_train = data.subset(&train_idx);
    let raw_test = data.subset(&test_idx);
    let st = Standardizer::fit(&raw_train, train_idx, test_idx);
    let train = st.apply(&raw_train)?;
    let test = st.apply(&raw_test)?;
    Ok((train, test, st))
}
