//! Experiment drivers behind the `nodeprune` binary.
//!
//! Each driver reads an [`ExperimentConfig`], runs its replicates on a rayon
//! pool with one RNG stream per replicate, and writes every output file from
//! the calling thread after all replicates finish. Output bytes therefore do
//! not depend on the thread count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    export_simulation, load_csv_with_names, simulate_dataset, split_standardize, SimSpec, SplitSpec, Standardizer,
};
use crate::error::{Error, Result};
use crate::network::{empirical_risk, Dataset, NetworkParams};
use crate::optimizer::{initial_params, prox_gradient_fit, TrainConfig};
use crate::penalty::PenaltySpec;
use crate::rng::replicate_seed;
use crate::selection::{two_step_fit, GridSpec, SelectionResult};
use crate::structure::distance_to_embedded_reference;
use crate::svg::{emit_histogram_svg, render_grouped_bars, CountsByMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Fit,
    ExperimentSim,
    ExperimentReal,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub replicates: usize,
    /// Master seed; replicate seeds derive from it.
    pub seed: u64,
    pub sim: SimSpec,
    pub grids: GridSpec,
    pub train: TrainConfig,
    pub split: SplitSpec,
    /// Node count of the oversized network.
    #[serde(rename = "H")]
    pub h: usize,
    pub output_dir: PathBuf,
    /// Also fit the unpenalized full network.
    pub include_erm: bool,
    pub csv_path: Option<PathBuf>,
    pub target_column: String,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::ExperimentSim,
            replicates: 20,
            seed: 2024,
            sim: SimSpec::default(),
            grids: GridSpec::simulation(),
            train: TrainConfig::default(),
            split: SplitSpec::default(),
            h: 8,
            output_dir: PathBuf::from("out"),
            include_erm: false,
            csv_path: None,
            target_column: "MEDV".into(),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Boston-housing style defaults at desk scale.
    pub fn real_defaults() -> Self {
        Self {
            mode: Mode::ExperimentReal,
            replicates: 5,
            grids: GridSpec::boston(),
            h: 50,
            include_erm: true,
            ..Self::default()
        }
    }

    /// Switches to the full-size experiment for the current mode: 100
    /// datasets of n = 5000 with H* = 10 and H = 20 for simulations, 50 splits
    /// with H = 50 for real data. Training always runs 10000 epochs at lr 0.01.
    pub fn apply_full_scale(&mut self) {
        self.train.epochs = 10_000;
        self.train.learning_rate = 0.01;
        self.train.rel_tol = 0.0;
        self.grids.gamma = 2.0;
        match self.mode {
            Mode::ExperimentReal => {
                self.replicates = 50;
                self.h = 50;
                self.grids = GridSpec::boston();
                self.split.test_fraction = 0.25;
                self.include_erm = true;
            }
            _ => {
                self.replicates = 100;
                self.sim = SimSpec { d: 5, h_star: 10, n: 5000, sigma2: 1.0, seed: self.sim.seed };
                self.h = 20;
                self.grids = GridSpec::simulation();
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be ≥ 1".into()));
        }
        if self.h == 0 {
            return Err(Error::InvalidArgument("H must be ≥ 1".into()));
        }
        if matches!(self.mode, Mode::ExperimentSim | Mode::Simulate) || self.csv_path.is_none() {
            self.sim.validate()?;
            if self.mode != Mode::Simulate && self.h < self.sim.h_star {
                return Err(Error::InvalidArgument(format!("H = {} is smaller than H* = {}", self.h, self.sim.h_star)));
            }
        }
        self.grids.validate()?;
        self.train.validate()
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = self.threads {
            b = b.num_threads(k);
        }
        b.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
    }

    fn write_config(&self, extra: serde_json::Value) -> Result<()> {
        let report = serde_json::json!({ "config": self, "notes": extra });
        std::fs::write(self.output_dir.join("config.json"), serde_json::to_string_pretty(&report)?)?;
        Ok(())
    }
}

/// One replicate of the simulation study. Optional fields are empty when the
/// replicate failed; `error` then holds the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub replicate: usize,
    pub seed: u64,
    pub n: usize,
    pub h_star: usize,
    pub gl_zeta: Option<f64>,
    pub gl_nodes: Option<usize>,
    pub gl_distance: Option<f64>,
    pub gl_risk: Option<f64>,
    pub agl_lambda: Option<f64>,
    pub agl_nodes: Option<usize>,
    pub agl_distance: Option<f64>,
    pub agl_risk: Option<f64>,
    pub agl_minimal: Option<bool>,
    pub error: String,
}

/// One train/test split of the real-data study. Errors are mean squared
/// errors on the original target scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealRow {
    pub split: usize,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub initial_train_err: Option<f64>,
    pub gl_zeta: Option<f64>,
    pub gl_nodes: Option<usize>,
    pub gl_train_err: Option<f64>,
    pub gl_test_err: Option<f64>,
    pub agl_lambda: Option<f64>,
    pub agl_nodes: Option<usize>,
    pub agl_train_err: Option<f64>,
    pub agl_test_err: Option<f64>,
    pub erm_train_err: Option<f64>,
    pub erm_test_err: Option<f64>,
    pub error: String,
}

/// Runs one simulation replicate from its own seed.
pub fn run_sim_replicate(cfg: &ExperimentConfig, replicate: usize, seed: u64) -> SimRow {
    let mut row = SimRow {
        replicate,
        seed,
        n: cfg.sim.n,
        h_star: cfg.sim.h_star,
        gl_zeta: None,
        gl_nodes: None,
        gl_distance: None,
        gl_risk: None,
        agl_lambda: None,
        agl_nodes: None,
        agl_distance: None,
        agl_risk: None,
        agl_minimal: None,
        error: String::new(),
    };
    let run = || -> Result<(SelectionResult, NetworkParams)> {
        let (data, truth) = simulate_dataset(&SimSpec { seed, ..cfg.sim })?;
        let train = TrainConfig { seed, ..cfg.train.clone() };
        Ok((two_step_fit(&data, cfg.h, &cfg.grids, &train)?, truth))
    };
    match run() {
        Ok((res, truth)) => {
            row.gl_zeta = Some(res.gl_choice.reg);
            row.gl_nodes = Some(res.gl_choice.fit.nonzero_nodes);
            row.gl_distance = distance_to_embedded_reference(&res.gl_choice.fit.params, &truth).ok();
            row.gl_risk = Some(res.gl_choice.fit.final_risk);
            row.agl_lambda = Some(res.agl_choice.reg);
            row.agl_nodes = Some(res.selected_nodes);
            row.agl_distance = distance_to_embedded_reference(&res.agl_choice.fit.params, &truth).ok();
            row.agl_risk = Some(res.agl_choice.fit.final_risk);
            row.agl_minimal = Some(res.minimality.minimal);
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[m] } else { 0.5 * (values[m - 1] + values[m]) })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn histogram(values: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

fn mode_of(hist: &BTreeMap<usize, usize>) -> Option<usize> {
    // smallest count value among the most frequent ones
    hist.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(k, _)| *k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub replicates: usize,
    pub failed: usize,
    pub gl_hist: BTreeMap<usize, usize>,
    pub agl_hist: BTreeMap<usize, usize>,
    pub gl_median_nodes: Option<f64>,
    pub agl_median_nodes: Option<f64>,
    pub agl_mode_nodes: Option<usize>,
    pub gl_mode_nodes: Option<usize>,
    /// Fraction of successful replicates whose AGL fit has exactly H* nodes.
    pub agl_exact_fraction: Option<f64>,
    pub gl_exact_fraction: Option<f64>,
    pub gl_median_distance: Option<f64>,
    pub agl_median_distance: Option<f64>,
}

pub fn summarize_sim(rows: &[SimRow]) -> SimSummary {
    let ok: Vec<&SimRow> = rows.iter().filter(|r| r.error.is_empty()).collect();
    let gl: Vec<usize> = ok.iter().filter_map(|r| r.gl_nodes).collect();
    let agl: Vec<usize> = ok.iter().filter_map(|r| r.agl_nodes).collect();
    let exact = |nodes: fn(&SimRow) -> Option<usize>| {
        (!ok.is_empty()).then(|| ok.iter().filter(|r| nodes(r) == Some(r.h_star)).count() as f64 / ok.len() as f64)
    };
    let gl_hist = histogram(gl.iter().copied());
    let agl_hist = histogram(agl.iter().copied());
    SimSummary {
        replicates: rows.len(),
        failed: rows.len() - ok.len(),
        gl_median_nodes: median(&mut gl.iter().map(|&x| x as f64).collect::<Vec<_>>()),
        agl_median_nodes: median(&mut agl.iter().map(|&x| x as f64).collect::<Vec<_>>()),
        gl_mode_nodes: mode_of(&gl_hist),
        agl_mode_nodes: mode_of(&agl_hist),
        gl_hist,
        agl_hist,
        agl_exact_fraction: exact(|r| r.agl_nodes),
        gl_exact_fraction: exact(|r| r.gl_nodes),
        gl_median_distance: median(&mut ok.iter().filter_map(|r| r.gl_distance).collect::<Vec<_>>()),
        agl_median_distance: median(&mut ok.iter().filter_map(|r| r.agl_distance).collect::<Vec<_>>()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSummary {
    pub splits: usize,
    pub failed: usize,
    pub gl_hist: BTreeMap<usize, usize>,
    pub agl_hist: BTreeMap<usize, usize>,
    pub gl_median_nodes: Option<f64>,
    pub agl_median_nodes: Option<f64>,
    pub gl_mean_train_err: Option<f64>,
    pub gl_mean_test_err: Option<f64>,
    pub agl_mean_train_err: Option<f64>,
    pub agl_mean_test_err: Option<f64>,
    pub erm_mean_train_err: Option<f64>,
    pub erm_mean_test_err: Option<f64>,
}

pub fn summarize_real(rows: &[RealRow]) -> RealSummary {
    let ok: Vec<&RealRow> = rows.iter().filter(|r| r.error.is_empty()).collect();
    let col = |f: fn(&RealRow) -> Option<f64>| mean(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
    let gl: Vec<usize> = ok.iter().filter_map(|r| r.gl_nodes).collect();
    let agl: Vec<usize> = ok.iter().filter_map(|r| r.agl_nodes).collect();
    RealSummary {
        splits: rows.len(),
        failed: rows.len() - ok.len(),
        gl_median_nodes: median(&mut gl.iter().map(|&x| x as f64).collect::<Vec<_>>()),
        agl_median_nodes: median(&mut agl.iter().map(|&x| x as f64).collect::<Vec<_>>()),
        gl_hist: histogram(gl.into_iter()),
        agl_hist: histogram(agl.into_iter()),
        gl_mean_train_err: col(|r| r.gl_train_err),
        gl_mean_test_err: col(|r| r.gl_test_err),
        agl_mean_train_err: col(|r| r.agl_train_err),
        agl_mean_test_err: col(|r| r.agl_test_err),
        erm_mean_train_err: col(|r| r.erm_train_err),
        erm_mean_test_err: col(|r| r.erm_test_err),
    }
}

fn write_rows<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn nodes_histogram(gl: &BTreeMap<usize, usize>, agl: &BTreeMap<usize, usize>) -> CountsByMethod {
    BTreeMap::from([("Adaptive Group Lasso".to_string(), agl.clone()), ("Group Lasso".to_string(), gl.clone())])
}

/// Files written by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub results_csv: PathBuf,
    pub summary_json: PathBuf,
    pub plots: Vec<PathBuf>,
    pub failed: usize,
    pub total: usize,
}

fn finish_sim(cfg: &ExperimentConfig, rows: &[SimRow]) -> Result<ExperimentOutput> {
    let dir = &cfg.output_dir;
    let results_csv = dir.join("results.csv");
    write_rows(rows, &results_csv)?;
    let summary = summarize_sim(&read_rows::<SimRow>(&results_csv)?);
    let summary_json = dir.join("summary.json");
    write_json(&summary, &summary_json)?;
    let mut plots = Vec::new();
    if !summary.agl_hist.is_empty() || !summary.gl_hist.is_empty() {
        let p = dir.join("histogram.svg");
        emit_histogram_svg(
            &nodes_histogram(&summary.gl_hist, &summary.agl_hist),
            "Selected hidden nodes per replicate",
            &p,
        )?;
        plots.push(p);
    }
    Ok(ExperimentOutput { results_csv, summary_json, plots, failed: summary.failed, total: rows.len() })
}

/// Simulation study: one simulated dataset per replicate, the two-step fit,
/// and the Group-Lasso-only selection (its first step) for comparison.
pub fn cmd_experiment_sim(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let rows: Vec<SimRow> = cfg.pool()?.install(|| {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|r| run_sim_replicate(cfg, r, replicate_seed(cfg.seed, r as u64)))
            .collect()
    });
    cfg.write_config(serde_json::json!({ "standardized": false }))?;
    let out = finish_sim(cfg, &rows)?;
    if out.failed == out.total {
        return Err(Error::AllReplicatesFailed(out.total));
    }
    Ok(out)
}

fn raw_mse(params: &NetworkParams, data: &Dataset, raw: &Dataset, st: &Standardizer) -> f64 {
    data.rows()
        .zip(raw.y())
        .map(|(x, y)| {
            let r = st.unscale_y(params.forward_unchecked(x)) - y;
            r * r
        })
        .sum::<f64>()
        / data.n() as f64
}

/// Runs one train/test split of the real-data study.
pub fn run_real_split(cfg: &ExperimentConfig, data: &Dataset, split: usize, seed: u64) -> RealRow {
    let mut row = RealRow {
        split,
        seed,
        n_train: 0,
        n_test: 0,
        initial_train_err: None,
        gl_zeta: None,
        gl_nodes: None,
        gl_train_err: None,
        gl_test_err: None,
        agl_lambda: None,
        agl_nodes: None,
        agl_train_err: None,
        agl_test_err: None,
        erm_train_err: None,
        erm_test_err: None,
        error: String::new(),
    };
    let mut run = || -> Result<()> {
        let (train, test, st) = split_standardize(data, &SplitSpec { seed, ..cfg.split })?;
        let raw_train = data.subset(&st.train_idx);
        let raw_test = data.subset(&st.test_idx);
        row.n_train = train.n();
        row.n_test = test.n();
        let tc = TrainConfig { seed, ..cfg.train.clone() };
        let res = two_step_fit(&train, cfg.h, &cfg.grids, &tc)?;
        let init = initial_params(train.d(), cfg.h, seed);
        row.initial_train_err = Some(empirical_risk(&init, &train)? * st.y_scale * st.y_scale);
        let gl = &res.gl_choice.fit.params;
        let agl = &res.agl_choice.fit.params;
        row.gl_zeta = Some(res.gl_choice.reg);
        row.gl_nodes = Some(res.gl_choice.fit.nonzero_nodes);
        row.gl_train_err = Some(raw_mse(gl, &train, &raw_train, &st));
        row.gl_test_err = Some(raw_mse(gl, &test, &raw_test, &st));
        row.agl_lambda = Some(res.agl_choice.reg);
        row.agl_nodes = Some(res.selected_nodes);
        row.agl_train_err = Some(raw_mse(agl, &train, &raw_train, &st));
        row.agl_test_err = Some(raw_mse(agl, &test, &raw_test, &st));
        if cfg.include_erm {
            let erm = prox_gradient_fit(&train, &init, &PenaltySpec::none(cfg.h), &tc)?;
            row.erm_train_err = Some(raw_mse(&erm.params, &train, &raw_train, &st));
            row.erm_test_err = Some(raw_mse(&erm.params, &test, &raw_test, &st));
        }
        Ok(())
    };
    if let Err(e) = run() {
        row.error = e.to_string();
    }
    row
}

fn finish_real(cfg: &ExperimentConfig, rows: &[RealRow]) -> Result<ExperimentOutput> {
    let dir = &cfg.output_dir;
    let results_csv = dir.join("results.csv");
    write_rows(rows, &results_csv)?;
    let summary = summarize_real(&read_rows::<RealRow>(&results_csv)?);
    let summary_json = dir.join("summary.json");
    write_json(&summary, &summary_json)?;
    let mut plots = Vec::new();
    if !summary.agl_hist.is_empty() || !summary.gl_hist.is_empty() {
        let p = dir.join("nodes_hist.svg");
        emit_histogram_svg(
            &nodes_histogram(&summary.gl_hist, &summary.agl_hist),
            "Selected hidden nodes per split",
            &p,
        )?;
        plots.push(p);
        let mut groups = vec![
            ("AGL".to_string(), vec![summary.agl_mean_train_err, summary.agl_mean_test_err]),
            ("GL".to_string(), vec![summary.gl_mean_train_err, summary.gl_mean_test_err]),
        ];
        if summary.erm_mean_train_err.is_some() {
            groups.push(("ERM".to_string(), vec![summary.erm_mean_train_err, summary.erm_mean_test_err]));
        }
        let groups: Vec<(String, Vec<f64>)> =
            groups.into_iter().map(|(n, v)| (n, v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())).collect();
        let p = dir.join("errors.svg");
        std::fs::write(&p, render_grouped_bars(&groups, &["train", "test"], "Mean squared error", "MSE")?)?;
        plots.push(p);
    }
    Ok(ExperimentOutput { results_csv, summary_json, plots, failed: summary.failed, total: rows.len() })
}

/// Real-data study: random train/test splits of a CSV dataset, standardized
/// with training statistics, with GL, AGL and optionally ERM fits per split.
pub fn cmd_experiment_real(cfg: &ExperimentConfig, csv_path: &Path, target_column: &str) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let loaded = load_csv_with_names(csv_path, target_column)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let rows: Vec<RealRow> = cfg.pool()?.install(|| {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|s| run_real_split(cfg, &loaded.data, s, replicate_seed(cfg.seed, s as u64)))
            .collect()
    });
    cfg.write_config(serde_json::json!({
        "standardized": true,
        "features": loaded.feature_names,
        "target": loaded.target_name,
    }))?;
    let out = finish_real(cfg, &rows)?;
    if out.failed == out.total {
        return Err(Error::AllReplicatesFailed(out.total));
    }
    Ok(out)
}

/// Writes `data.csv` and `true_params.json` for one simulated dataset.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<(PathBuf, PathBuf)> {
    cfg.sim.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let (data, truth) = simulate_dataset(&cfg.sim)?;
    let csv_path = cfg.output_dir.join("data.csv");
    let json_path = cfg.output_dir.join("true_params.json");
    export_simulation(&data, &truth, &csv_path, &json_path)?;
    Ok((csv_path, json_path))
}

/// Runs the two-step fit once, on `csv_path` if configured and on a simulated
/// dataset otherwise. Writes `selection.json`, `aic_trace.csv` and the
/// objective traces of both chosen fits.
pub fn cmd_fit(cfg: &ExperimentConfig) -> Result<SelectionResult> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let data = match &cfg.csv_path {
        Some(p) => load_csv_with_names(p, &cfg.target_column)?.data,
        None => simulate_dataset(&cfg.sim)?.0,
    };
    let tc = TrainConfig { seed: cfg.seed, ..cfg.train.clone() };
    let res = cfg.pool()?.install(|| two_step_fit(&data, cfg.h, &cfg.grids, &tc))?;
    let dir = &cfg.output_dir;
    write_json(&res, &dir.join("selection.json"))?;
    std::fs::write(dir.join("aic_trace.csv"), res.aic_trace_csv())?;
    std::fs::write(dir.join("gl_objective.csv"), res.gl_choice.fit.trace_csv())?;
    std::fs::write(dir.join("agl_objective.csv"), res.agl_choice.fit.trace_csv())?;
    std::fs::write(dir.join("agl_params.json"), res.agl_choice.fit.params.to_json()?)?;
    Ok(res)
}

/// Rebuilds `summary.json` and the plots from an existing `results.csv`.
pub fn cmd_report(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let path = cfg.output_dir.join("results.csv");
    if !path.is_file() {
        return Err(Error::MissingFile(path));
    }
    let header = csv::Reader::from_path(&path)?.headers()?.clone();
    if header.iter().any(|h| h == "split") {
        finish_real(cfg, &read_rows::<RealRow>(&path)?)
    } else {
        finish_sim(cfg, &read_rows::<SimRow>(&path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_mode() {
        assert_eq!(median(&mut []), None);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        let h = histogram([3, 4, 4, 3, 5].into_iter());
        assert_eq!(mode_of(&h), Some(3));
    }

    #[test]
    fn config_json_defaults_and_validation() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"replicates": 3, "H": 4}"#).unwrap();
        assert_eq!(cfg.replicates, 3);
        assert_eq!(cfg.h, 4);
        assert_eq!(cfg.train.epochs, 10_000);
        assert!(ExperimentConfig { replicates: 0, ..Default::default() }.validate().is_err());
        assert!(ExperimentConfig { h: 2, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn full_scale_settings() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_full_scale();
        assert_eq!((cfg.replicates, cfg.sim.n, cfg.sim.h_star, cfg.h), (100, 5000, 10, 20));
        let mut real = ExperimentConfig::real_defaults();
        real.apply_full_scale();
        assert_eq!((real.replicates, real.h), (50, 50));
        assert_eq!(real.grids, GridSpec::boston());
    }

    #[test]
    fn summary_counts_failures() {
        let ok = SimRow {
            replicate: 0,
            seed: 1,
            n: 10,
            h_star: 2,
            gl_zeta: Some(0.1),
            gl_nodes: Some(3),
            gl_distance: Some(1.0),
            gl_risk: Some(1.0),
            agl_lambda: Some(0.1),
            agl_nodes: Some(2),
            agl_distance: Some(0.5),
            agl_risk: Some(1.1),
            agl_minimal: Some(true),
            error: String::new(),
        };
        let bad = SimRow { replicate: 1, error: "boom".into(), agl_nodes: None, gl_nodes: None, ..ok.clone() };
        let s = summarize_sim(&[ok, bad]);
        assert_eq!((s.replicates, s.failed), (2, 1));
        assert_eq!(s.agl_exact_fraction, Some(1.0));
        assert_eq!(s.gl_exact_fraction, Some(0.0));
        assert_eq!(s.agl_hist, BTreeMap::from([(2, 1)]));
    }
}
