//! Full-batch proximal gradient descent.
//!
//! Each epoch takes a gradient step on the empirical risk, applies block
//! soft-thresholding to every non-frozen node group and, when a box radius is
//! configured, clips every coordinate to `[-W, W]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{risk_and_gradient_into, Dataset, NetworkParams};
use crate::penalty::{group_norms, penalty_value, shrink_in_place, PenaltySpec};
use crate::rng::{stream, streams, Gaussian};

/// Consecutive epochs below `rel_tol` before an early stop.
const PATIENCE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub box_w: Option<f64>,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 10_000, learning_rate: 0.01, box_w: None, rel_tol: 0.0, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be ≥ 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate {} must be > 0", self.learning_rate)));
        }
        if let Some(w) = self.box_w {
            if !(w > 0.0) {
                return Err(Error::InvalidArgument(format!("box radius {w} must be > 0")));
            }
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("rel_tol {} must be ≥ 0", self.rel_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: NetworkParams,
    pub initial_risk: f64,
    /// Penalized objective after each epoch.
    pub objective_trace: Vec<f64>,
    /// Empirical risk after each epoch.
    pub risk_trace: Vec<f64>,
    pub final_risk: f64,
    pub final_penalty: f64,
    pub nonzero_nodes: usize,
    pub epochs_run: usize,
    pub diverged: bool,
}

impl FitReport {
    pub fn final_objective(&self) -> f64 {
        self.final_risk + self.final_penalty
    }

    /// Trace as CSV with columns `epoch,risk,penalty,objective`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("epoch,risk,penalty,objective\n");
        for (e, (r, o)) in self.risk_trace.iter().zip(&self.objective_trace).enumerate() {
            out.push_str(&format!("{},{r},{},{o}\n", e + 1, o - r));
        }
        out
    }
}

/// Random starting point with i.i.d. `N(0, σ)` entries, `σ = 1/√d`, drawn from
/// the initialization stream of `seed`.
pub fn initial_params(d: usize, h: usize, seed: u64) -> NetworkParams {
    let mut g = Gaussian::new(stream(seed, streams::INIT));
    let mut theta = vec![0.0; h * (d + 2) + 1];
    g.fill(&mut theta, 1.0 / (d.max(1) as f64).sqrt());
    NetworkParams::from_vec(d, h, theta).expect("Gaussian draws are finite")
}

/// Clips every coordinate to `[-w, w]`.
pub fn project_linf(params: &NetworkParams, w: f64) -> Result<NetworkParams> {
    if !(w > 0.0) {
        return Err(Error::InvalidArgument(format!("box radius {w} must be > 0")));
    }
    let mut out = params.clone();
    clip(out.as_mut_slice(), w);
    Ok(out)
}

fn clip(theta: &mut [f64], w: f64) {
    theta.iter_mut().for_each(|x| *x = x.clamp(-w, w));
}

pub fn prox_gradient_fit(
    data: &Dataset,
    init: &NetworkParams,
    spec: &PenaltySpec,
    cfg: &TrainConfig,
) -> Result<FitReport> {
    cfg.validate()?;
    spec.validate(init.h())?;
    if data.n() == 0 {
        return Err(Error::EmptyDataset);
    }
    if data.d() != init.d() {
        return Err(Error::Shape(format!("network expects d={} but dataset has {} columns", init.d(), data.d())));
    }
    let norms = group_norms(init);
    if let Some(i) = (0..init.h()).find(|&i| spec.frozen[i] && norms[i] > 0.0) {
        return Err(Error::FrozenGroupNonzero(i, norms[i]));
    }

    let lr = cfg.learning_rate;
    let h = init.h();
    let g = init.group_len();
    let mut params = init.clone();
    let mut last_good = params.clone();
    let mut grad = vec![0.0; params.len()];
    let mut objective_trace = Vec::with_capacity(cfg.epochs);
    let mut risk_trace = Vec::with_capacity(cfg.epochs);
    let mut diverged = false;
    let mut calm = 0;

    let mut risk = risk_and_gradient_into(&params, data, &mut grad);
    let initial_risk = risk;
    if !risk.is_finite() {
        diverged = true;
    }
    let mut epochs_run = 0;
    while !diverged && epochs_run < cfg.epochs {
        let theta = params.as_mut_slice();
        for i in 0..h {
            let block = &mut theta[i * g..(i + 1) * g];
            match spec.threshold(i, lr) {
                None => block.iter_mut().for_each(|x| *x = 0.0),
                Some(t) => {
                    for (x, dx) in block.iter_mut().zip(&grad[i * g..(i + 1) * g]) {
                        *x -= lr * dx;
                    }
                    shrink_in_place(block, t);
                }
            }
        }
        theta[h * g] -= lr * grad[h * g];
        if let Some(w) = cfg.box_w {
            clip(theta, w);
        }
        epochs_run += 1;

        let prev_objective = objective_trace.last().copied();
        risk = risk_and_gradient_into(&params, data, &mut grad);
        let penalty = penalty_value(&params, spec)?;
        let objective = risk + penalty;
        if !objective.is_finite() || params.as_slice().iter().any(|x| !x.is_finite()) {
            diverged = true;
            break;
        }
        objective_trace.push(objective);
        risk_trace.push(risk);
        last_good.as_mut_slice().copy_from_slice(params.as_slice());

        if cfg.rel_tol > 0.0 {
            if let Some(prev) = prev_objective {
                let change = (prev - objective).abs() / prev.abs().max(f64::MIN_POSITIVE);
                calm = if change < cfg.rel_tol { calm + 1 } else { 0 };
                if calm >= PATIENCE {
                    break;
                }
            }
        }
    }

    let params = last_good;
    let final_risk = risk_trace.last().copied().unwrap_or(initial_risk);
    let final_penalty = if diverged && risk_trace.is_empty() { f64::NAN } else { penalty_value(&params, spec)? };
    let nonzero_nodes = group_norms(&params).iter().filter(|&&n| n > 0.0).count();
    Ok(FitReport {
        params,
        initial_risk,
        objective_trace,
        risk_trace,
        final_risk,
        final_penalty,
        nonzero_nodes,
        epochs_run,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{empirical_risk, forward};
    use crate::penalty::PenaltyKind;

    fn toy_data(n: usize, seed: u64) -> Dataset {
        let truth = NetworkParams::from_parts(&[vec![1.5, -1.0]], &[2.0], &[0.3], 0.5).unwrap();
        let mut g = Gaussian::new(stream(seed, 99));
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![g.sample(), g.sample()]).collect();
        let y = rows.iter().map(|x| forward(&truth, x).unwrap() + 0.1 * g.sample()).collect();
        Dataset::from_rows(&rows, y).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig { epochs: 0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { learning_rate: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { box_w: Some(-1.0), ..Default::default() }.validate().is_err());
        let d = TrainConfig::default();
        assert_eq!((d.epochs, d.learning_rate, d.box_w, d.rel_tol), (10_000, 0.01, None, 0.0));
    }

    #[test]
    fn projection_cases() {
        let p = NetworkParams::from_parts(&[vec![2.0]], &[-3.0], &[0.5], 0.2).unwrap();
        let q = project_linf(&p, 1.0).unwrap();
        assert_eq!(q.as_slice(), &[1.0, -1.0, 0.5, 0.2]);
        assert_eq!(project_linf(&q, 1.0).unwrap(), q);
        assert_eq!(project_linf(&p, 5.0).unwrap(), p);
        assert!(project_linf(&p, 0.0).is_err());
    }

    #[test]
    fn plain_descent_reduces_risk() {
        let data = toy_data(100, 1);
        let init = initial_params(2, 3, 7);
        let cfg = TrainConfig { epochs: 300, ..Default::default() };
        let fit = prox_gradient_fit(&data, &init, &PenaltySpec::none(3), &cfg).unwrap();
        assert!(!fit.diverged);
        assert_eq!(fit.epochs_run, 300);
        assert_eq!(fit.objective_trace.len(), 300);
        assert!(fit.final_risk <= fit.initial_risk);
        assert_eq!(fit.nonzero_nodes, 3);
        assert_eq!(fit.final_risk, empirical_risk(&fit.params, &data).unwrap());
    }

    #[test]
    fn huge_penalty_kills_every_node_and_fits_the_mean() {
        let data = toy_data(80, 2);
        let init = initial_params(2, 3, 3);
        let spec = PenaltySpec::group_lasso(3, 1e3).unwrap();
        let cfg = TrainConfig { epochs: 2000, ..Default::default() };
        let fit = prox_gradient_fit(&data, &init, &spec, &cfg).unwrap();
        assert_eq!(fit.nonzero_nodes, 0);
        assert!(fit.params.as_slice()[..9].iter().all(|&x| x == 0.0));
        let mean = data.y().iter().sum::<f64>() / data.n() as f64;
        assert!((fit.params.b2() - mean).abs() < 1e-4, "{} vs {mean}", fit.params.b2());
    }

    #[test]
    fn frozen_groups_stay_zero() {
        let data = toy_data(60, 4);
        let mut init = initial_params(2, 3, 5);
        init.group_mut(1).iter_mut().for_each(|x| *x = 0.0);
        let spec = PenaltySpec::adaptive(0.01, vec![1.0, 0.0, 1.0], vec![false, true, false], 2.0).unwrap();
        let fit = prox_gradient_fit(&data, &init, &spec, &TrainConfig { epochs: 200, ..Default::default() }).unwrap();
        assert!(fit.params.group(1).iter().all(|&x| x.to_bits() == 0));
        assert_eq!(spec.kind, PenaltyKind::AdaptiveGroupLasso);
    }

    #[test]
    fn frozen_nonzero_init_rejected() {
        let data = toy_data(10, 4);
        let init = initial_params(2, 2, 5);
        let spec = PenaltySpec::adaptive(0.01, vec![1.0, 0.0], vec![false, true], 2.0).unwrap();
        assert!(matches!(
            prox_gradient_fit(&data, &init, &spec, &TrainConfig::default()),
            Err(Error::FrozenGroupNonzero(1, _))
        ));
    }

    #[test]
    fn divergence_is_flagged() {
        let data = toy_data(50, 5);
        let init = initial_params(2, 3, 1);
        let cfg = TrainConfig { epochs: 500, learning_rate: 1e6, ..Default::default() };
        let fit = prox_gradient_fit(&data, &init, &PenaltySpec::none(3), &cfg).unwrap();
        assert!(fit.diverged);
        assert!(fit.epochs_run < 500);
        assert!(fit.params.as_slice().iter().all(|x| x.is_finite()));
        assert!(fit.objective_trace.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn box_projection_is_respected() {
        let data = toy_data(50, 6);
        let init = project_linf(&initial_params(2, 3, 2), 0.3).unwrap();
        let cfg = TrainConfig { epochs: 200, box_w: Some(0.3), learning_rate: 0.05, ..Default::default() };
        let fit = prox_gradient_fit(&data, &init, &PenaltySpec::group_lasso(3, 0.01).unwrap(), &cfg).unwrap();
        assert!(fit.params.max_abs() <= 0.3);
    }

    #[test]
    fn early_stop_and_determinism() {
        let data = toy_data(40, 8);
        let init = initial_params(2, 2, 9);
        let cfg = TrainConfig { epochs: 50_000, rel_tol: 1e-9, learning_rate: 0.05, ..Default::default() };
        let spec = PenaltySpec::group_lasso(2, 0.01).unwrap();
        let a = prox_gradient_fit(&data, &init, &spec, &cfg).unwrap();
        let b = prox_gradient_fit(&data, &init, &spec, &cfg).unwrap();
        assert!(a.epochs_run < 50_000);
        assert_eq!(a, b);
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let data = toy_data(20, 1);
        let fit = prox_gradient_fit(
            &data,
            &initial_params(2, 2, 1),
            &PenaltySpec::group_lasso(2, 0.1).unwrap(),
            &TrainConfig { epochs: 3, ..Default::default() },
        )
        .unwrap();
        let csv = fit.trace_csv();
        assert!(csv.starts_with("epoch,risk,penalty,objective\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
