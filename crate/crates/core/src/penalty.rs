//! Group penalties and their proximal map.
//!
//! Both penalties sum a per-node weight times the Euclidean norm of the node
//! group; the output bias `b2` is never penalized. The Adaptive Group Lasso
//! weights are `‖w_i^GL‖^(-γ)`; nodes that the first stage set to zero are
//! frozen instead of receiving an infinite weight, which realizes the
//! `0/0 = 0` convention exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{l2, NetworkParams, NodeGroup};

pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    None,
    GroupLasso,
    AdaptiveGroupLasso,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub reg: f64,
    pub weights: Vec<f64>,
    pub frozen: Vec<bool>,
    pub gamma: f64,
}

impl PenaltySpec {
    /// No penalty: plain empirical risk minimization.
    pub fn none(h: usize) -> Self {
        Self { kind: PenaltyKind::None, reg: 0.0, weights: vec![1.0; h], frozen: vec![false; h], gamma: 1.0 }
    }

    pub fn group_lasso(h: usize, reg: f64) -> Result<Self> {
        let spec =
            Self { kind: PenaltyKind::GroupLasso, reg, weights: vec![1.0; h], frozen: vec![false; h], gamma: 1.0 };
        spec.validate(h)?;
        Ok(spec)
    }

    pub fn adaptive(reg: f64, weights: Vec<f64>, frozen: Vec<bool>, gamma: f64) -> Result<Self> {
        let h = weights.len();
        let spec = Self { kind: PenaltyKind::AdaptiveGroupLasso, reg, weights, frozen, gamma };
        spec.validate(h)?;
        Ok(spec)
    }

    /// Same weights and frozen set, different regularizer.
    pub fn with_reg(&self, reg: f64) -> Result<Self> {
        let spec = Self { reg, ..self.clone() };
        spec.validate(self.weights.len())?;
        Ok(spec)
    }

    pub fn h(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self, h: usize) -> Result<()> {
        if self.weights.len() != h || self.frozen.len() != h {
            return Err(Error::Shape(format!(
                "penalty has {} weights and {} frozen flags for H={h}",
                self.weights.len(),
                self.frozen.len()
            )));
        }
        if !(self.reg >= 0.0 && self.reg.is_finite()) {
            return Err(Error::InvalidArgument(format!("regularizer {} must be finite and ≥ 0", self.reg)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("gamma {} must be > 0", self.gamma)));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("adaptive weight {w} must be finite and ≥ 0")));
        }
        if self.kind == PenaltyKind::GroupLasso
            && (self.weights.iter().any(|&w| w != 1.0) || self.frozen.iter().any(|&f| f))
        {
            return Err(Error::InvalidArgument("group lasso requires unit weights and no frozen groups".into()));
        }
        Ok(())
    }

    /// Prox threshold of node `i` for step size `lr`; `None` for frozen nodes.
    pub(crate) fn threshold(&self, i: usize, lr: f64) -> Option<f64> {
        if self.frozen[i] {
            None
        } else if self.kind == PenaltyKind::None {
            Some(0.0)
        } else {
            Some(lr * self.reg * self.weights[i])
        }
    }
}

/// Euclidean norm of every node group.
pub fn group_norms(params: &NetworkParams) -> Vec<f64> {
    (0..params.h()).map(|i| l2(params.group(i))).collect()
}

/// `reg · Σ weights[i]·‖w_i‖` over non-frozen nodes.
pub fn penalty_value(params: &NetworkParams, spec: &PenaltySpec) -> Result<f64> {
    spec.validate(params.h())?;
    let norms = group_norms(params);
    let mut total = 0.0;
    for (i, &norm) in norms.iter().enumerate() {
        if spec.frozen[i] {
            if norm > 0.0 {
                return Err(Error::FrozenGroupNonzero(i, norm));
            }
            continue;
        }
        total += spec.weights[i] * norm;
    }
    Ok(match spec.kind {
        PenaltyKind::None => 0.0,
        _ => spec.reg * total,
    })
}

/// Adaptive weights `‖w_i‖^(-γ)` from a first-stage fit. Nodes whose norm is
/// at most `zero_tol` get weight 0 and are frozen.
pub fn adaptive_weights(gl_params: &NetworkParams, gamma: f64, zero_tol: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma {gamma} must be > 0")));
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("zero_tol {zero_tol} must be ≥ 0")));
    }
    Ok(group_norms(gl_params)
        .into_iter()
        .map(|norm| if norm > zero_tol { (norm.powf(-gamma), false) } else { (0.0, true) })
        .unzip())
}

/// Proximal map of `threshold·‖·‖`: shrinks the group toward zero by
/// `threshold` in norm and returns exact zeros once it gets there.
pub fn block_soft_threshold(group: &NodeGroup, threshold: f64) -> Result<NodeGroup> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} must be ≥ 0")));
    }
    let mut out = group.clone();
    shrink_in_place(&mut out.values, threshold);
    Ok(out)
}

/// Returns true when the group ended at zero.
pub(crate) fn shrink_in_place(values: &mut [f64], threshold: f64) -> bool {
    if threshold == 0.0 {
        return values.iter().all(|&x| x == 0.0);
    }
    let norm = l2(values);
    if norm <= threshold {
        values.iter_mut().for_each(|x| *x = 0.0);
        true
    } else {
        let scale = 1.0 - threshold / norm;
        values.iter_mut().for_each(|x| *x *= scale);
        false
    }
}
