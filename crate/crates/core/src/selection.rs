//! The two-step estimator: Group Lasso over a regularizer grid, adaptive
//! weights from the chosen fit, then Adaptive Group Lasso over a second grid.
//! AIC picks the regularizer at each step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Dataset, NetworkParams};
use crate::optimizer::{initial_params, prox_gradient_fit, FitReport, TrainConfig};
use crate::penalty::{adaptive_weights, PenaltySpec, DEFAULT_ZERO_TOL};
use crate::structure::{check_minimal, strip_zero_nodes, MinimalityReport, StructureTolerances};

/// Floor applied to the residual risk inside the logarithm.
const RISK_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub gl_grid: Vec<f64>,
    pub agl_grid: Vec<f64>,
    pub gamma: f64,
}

impl GridSpec {
    /// Regularizer grid and γ of the synthetic-data study.
    pub fn simulation() -> Self {
        let grid = vec![0.001, 0.005, 0.01, 0.025, 0.05, 0.075, 0.1];
        Self { gl_grid: grid.clone(), agl_grid: grid, gamma: 2.0 }
    }

    /// Regularizer grid and γ of the Boston housing study.
    pub fn boston() -> Self {
        let grid = vec![0.1, 0.3, 0.5, 0.7, 1.0];
        Self { gl_grid: grid.clone(), agl_grid: grid, gamma: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("gl_grid", &self.gl_grid), ("agl_grid", &self.agl_grid)] {
            if grid.is_empty() {
                return Err(Error::InvalidArgument(format!("{name} is empty")));
            }
            if let Some(x) = grid.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidArgument(format!("{name} entry {x} must be > 0")));
            }
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("gamma {} must be > 0", self.gamma)));
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::simulation()
    }
}

/// One row of an AIC trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub reg: f64,
    pub aic: f64,
    pub nonzero_nodes: usize,
    pub risk: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepChoice {
    pub reg: f64,
    pub fit: FitReport,
    pub aic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub gl_choice: StepChoice,
    pub agl_choice: StepChoice,
    pub gl_aic_trace: Vec<GridPoint>,
    pub agl_aic_trace: Vec<GridPoint>,
    pub adaptive_weights: Vec<f64>,
    pub frozen: Vec<bool>,
    pub selected_nodes: usize,
    pub minimality: MinimalityReport,
    pub warnings: Vec<String>,
}

impl SelectionResult {
    /// AIC traces as CSV with columns `step,reg,aic,nonzero_nodes,risk`.
    pub fn aic_trace_csv(&self) -> String {
        let mut out = String::from("step,reg,aic,nonzero_nodes,risk\n");
        for (step, trace) in [("gl", &self.gl_aic_trace), ("agl", &self.agl_aic_trace)] {
            for p in trace {
                out.push_str(&format!("{step},{},{},{},{}\n", p.reg, p.aic, p.nonzero_nodes, p.risk));
            }
        }
        out
    }
}

/// Number of free parameters of a fit: every coordinate of a surviving node
/// group, plus the output bias.
pub fn parameter_count(params: &NetworkParams, nonzero_nodes: usize) -> usize {
    params.group_len() * nonzero_nodes + 1
}

/// `n·ln(max(risk, 1e-12)) + 2k`.
pub fn aic(fit: &FitReport, n: usize) -> f64 {
    let k = parameter_count(&fit.params, fit.nonzero_nodes);
    n as f64 * fit.final_risk.max(RISK_FLOOR).ln() + 2.0 * k as f64
}

/// Runs one fit per regularizer and returns the AIC-minimizing one plus the
/// full trace. Ties go to the larger regularizer. Diverged fits are recorded
/// but never chosen.
pub fn select_by_aic(
    data: &Dataset,
    init: &NetworkParams,
    base: &PenaltySpec,
    grid: &[f64],
    cfg: &TrainConfig,
    step: &'static str,
    warnings: &mut Vec<String>,
) -> Result<(StepChoice, Vec<GridPoint>)> {
    let fits: Vec<FitReport> =
        grid.par_iter().map(|&reg| prox_gradient_fit(data, init, &base.with_reg(reg)?, cfg)).collect::<Result<_>>()?;
    let trace: Vec<GridPoint> = grid
        .iter()
        .zip(&fits)
        .map(|(&reg, fit)| GridPoint {
            reg,
            aic: aic(fit, data.n()),
            nonzero_nodes: fit.nonzero_nodes,
            risk: fit.final_risk,
            diverged: fit.diverged,
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, p) in trace.iter().enumerate() {
        if p.diverged || !p.aic.is_finite() {
            warnings.push(format!("{step}: fit at reg={} diverged and was excluded", p.reg));
            continue;
        }
        best = match best {
            Some(b) if trace[b].aic < p.aic || (trace[b].aic == p.aic && trace[b].reg > p.reg) => Some(b),
            _ => Some(i),
        };
    }
    let i = best.ok_or(Error::AllDiverged(step))?;
    let choice =
        StepChoice { reg: trace[i].reg, aic: trace[i].aic, fit: fits.into_iter().nth(i).expect("index within grid") };
    Ok((choice, trace))
}

/// Step 1 alone: Group Lasso over `grid` from `init`, chosen by AIC.
pub fn group_lasso_step(
    data: &Dataset,
    init: &NetworkParams,
    grid: &[f64],
    cfg: &TrainConfig,
    warnings: &mut Vec<String>,
) -> Result<(StepChoice, Vec<GridPoint>)> {
    let base = PenaltySpec::group_lasso(init.h(), grid[0])?;
    select_by_aic(data, init, &base, grid, cfg, "group lasso", warnings)
}

/// The full two-step estimator. Step 1 starts every grid point from the same
/// seeded initialization (`cfg.seed`); Step 2 warm-starts from the chosen
/// Step-1 estimate with its zero groups frozen.
pub fn two_step_fit(data: &Dataset, h: usize, grids: &GridSpec, cfg: &TrainConfig) -> Result<SelectionResult> {
    if h == 0 {
        return Err(Error::InvalidArgument("H must be ≥ 1".into()));
    }
    grids.validate()?;
    cfg.validate()?;
    let init = initial_params(data.d(), h, cfg.seed);
    let mut warnings = Vec::new();

    let (gl_choice, gl_aic_trace) = group_lasso_step(data, &init, &grids.gl_grid, cfg, &mut warnings)?;

    let (weights, frozen) = adaptive_weights(&gl_choice.fit.params, grids.gamma, DEFAULT_ZERO_TOL)?;
    let mut warm = gl_choice.fit.params.clone();
    for (i, _) in frozen.iter().enumerate().filter(|(_, f)| **f) {
        warm.group_mut(i).iter_mut().for_each(|x| *x = 0.0);
    }
    let base = PenaltySpec::adaptive(grids.agl_grid[0], weights.clone(), frozen.clone(), grids.gamma)?;
    let (agl_choice, agl_aic_trace) =
        select_by_aic(data, &warm, &base, &grids.agl_grid, cfg, "adaptive group lasso", &mut warnings)?;

    let pruned = strip_zero_nodes(&agl_choice.fit.params, 0.0);
    let minimality = check_minimal(&pruned, StructureTolerances::default());
    Ok(SelectionResult {
        selected_nodes: agl_choice.fit.nonzero_nodes,
        gl_choice,
        agl_choice,
        gl_aic_trace,
        agl_aic_trace,
        adaptive_weights: weights,
        frozen,
        minimality,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkParams;

    fn fit_with(risk: f64, nonzero: usize, d: usize, h: usize) -> FitReport {
        FitReport {
            params: NetworkParams::zeros(d, h),
            initial_risk: risk,
            objective_trace: vec![],
            risk_trace: vec![],
            final_risk: risk,
            final_penalty: 0.0,
            nonzero_nodes: nonzero,
            epochs_run: 0,
            diverged: false,
        }
    }

    #[test]
    fn aic_examples() {
        // k = (d+2)·nonzero + 1; d = 3 → 5 per node
        let a = aic(&fit_with(0.7, 2, 3, 4), 50);
        let b = aic(&fit_with(0.7, 3, 3, 4), 50);
        assert!((b - a - 10.0).abs() < 1e-12);
        let c = aic(&fit_with(0.35, 2, 3, 4), 50);
        assert!((a - c - 50.0 * 2f64.ln()).abs() < 1e-10);
        // d = 2, one node: k = 4 + 1 = 5
        assert_eq!(aic(&fit_with(1.0, 1, 2, 3), 100), 10.0);
        assert!(aic(&fit_with(0.0, 0, 2, 3), 10).is_finite());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::simulation().validate().is_ok());
        assert!(GridSpec { gl_grid: vec![], ..GridSpec::simulation() }.validate().is_err());
        assert!(GridSpec { agl_grid: vec![0.1, 0.0], ..GridSpec::simulation() }.validate().is_err());
        assert!(GridSpec { gamma: 0.0, ..GridSpec::simulation() }.validate().is_err());
        assert_eq!(GridSpec::boston().gl_grid, vec![0.1, 0.3, 0.5, 0.7, 1.0]);
    }
}
