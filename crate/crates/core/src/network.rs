//! One-hidden-layer tanh networks, datasets and the squared-error risk.
//!
//! Parameters are stored node-major: the flat vector is
//! `(w_1, ..., w_H, b2)` where `w_i = (u[i,0..d], v[i], b1[i])`. Every group
//! operation (norms, prox, pruning) therefore works on a contiguous slice, and
//! the Euclidean distance between two parameter vectors is the plain norm of
//! their difference, `b2` included.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    d: usize,
    h: usize,
    theta: Vec<f64>,
}

/// The `d + 2` parameters attached to one hidden node, laid out as
/// `(u[i,:], v[i], b1[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGroup {
    pub node_index: usize,
    pub values: Vec<f64>,
}

impl NodeGroup {
    pub fn norm(&self) -> f64 {
        l2(&self.values)
    }
}

pub(crate) fn l2(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_finite(what: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

impl NetworkParams {
    pub fn zeros(d: usize, h: usize) -> Self {
        Self { d, h, theta: vec![0.0; h * (d + 2) + 1] }
    }

    /// Builds parameters from a node-major flat vector of length `h*(d+2)+1`.
    pub fn from_vec(d: usize, h: usize, theta: Vec<f64>) -> Result<Self> {
        let want = h * (d + 2) + 1;
        if theta.len() != want {
            return Err(Error::Shape(format!(
                "parameter vector has length {}, expected {want} for d={d}, H={h}",
                theta.len()
            )));
        }
        check_finite("network parameters", &theta)?;
        Ok(Self { d, h, theta })
    }

    /// Builds parameters from `u` (H rows of length d), `v`, `b1` and `b2`.
    pub fn from_parts(u: &[Vec<f64>], v: &[f64], b1: &[f64], b2: f64) -> Result<Self> {
        let h = u.len();
        let d = u.first().map_or(0, Vec::len);
        if v.len() != h || b1.len() != h {
            return Err(Error::Shape(format!("u has {h} rows but v has {} and b1 has {} entries", v.len(), b1.len())));
        }
        let mut theta = Vec::with_capacity(h * (d + 2) + 1);
        for (i, row) in u.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Shape(format!("u row {i} has length {}, expected {d}", row.len())));
            }
            theta.extend_from_slice(row);
            theta.push(v[i]);
            theta.push(b1[i]);
        }
        theta.push(b2);
        Self::from_vec(d, h, theta)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn group_len(&self) -> usize {
        self.d + 2
    }

    /// The node-major flat parameter vector.
    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn group(&self, i: usize) -> &[f64] {
        let g = self.group_len();
        &self.theta[i * g..(i + 1) * g]
    }

    pub(crate) fn group_mut(&mut self, i: usize) -> &mut [f64] {
        let g = self.group_len();
        &mut self.theta[i * g..(i + 1) * g]
    }

    pub fn node_group(&self, i: usize) -> NodeGroup {
        NodeGroup { node_index: i, values: self.group(i).to_vec() }
    }

    /// Replaces the group of node `group.node_index`.
    pub fn set_node_group(&mut self, group: &NodeGroup) -> Result<()> {
        if group.node_index >= self.h || group.values.len() != self.group_len() {
            return Err(Error::Shape(format!(
                "group for node {} with {} values does not fit d={}, H={}",
                group.node_index,
                group.values.len(),
                self.d,
                self.h
            )));
        }
        check_finite("node group", &group.values)?;
        self.group_mut(group.node_index).copy_from_slice(&group.values);
        Ok(())
    }

    pub fn u_row(&self, i: usize) -> &[f64] {
        &self.group(i)[..self.d]
    }

    pub fn v(&self, i: usize) -> f64 {
        self.group(i)[self.d]
    }

    pub fn b1(&self, i: usize) -> f64 {
        self.group(i)[self.d + 1]
    }

    pub fn b2(&self) -> f64 {
        self.theta[self.theta.len() - 1]
    }

    pub fn set_b2(&mut self, b2: f64) {
        let last = self.theta.len() - 1;
        self.theta[last] = b2;
    }

    pub fn u(&self) -> Vec<Vec<f64>> {
        (0..self.h).map(|i| self.u_row(i).to_vec()).collect()
    }

    pub fn v_vec(&self) -> Vec<f64> {
        (0..self.h).map(|i| self.v(i)).collect()
    }

    pub fn b1_vec(&self) -> Vec<f64> {
        (0..self.h).map(|i| self.b1(i)).collect()
    }

    /// Negates the whole group of node `i`. Since tanh is odd the
    /// input-output map is unchanged.
    pub fn sign_flip(&mut self, i: usize) {
        for x in self.group_mut(i) {
            *x = -*x;
        }
    }

    /// Returns the network whose node `k` is node `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.h];
        if perm.len() != self.h || perm.iter().any(|&p| p >= self.h || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{}", self.h)));
        }
        Ok(self.select_nodes(perm))
    }

    /// Keeps the listed nodes (in the given order) and `b2`.
    pub fn select_nodes(&self, nodes: &[usize]) -> Self {
        let mut theta = Vec::with_capacity(nodes.len() * self.group_len() + 1);
        for &i in nodes {
            theta.extend_from_slice(self.group(i));
        }
        theta.push(self.b2());
        Self { d: self.d, h: nodes.len(), theta }
    }

    /// Embeds `self` into a wider network with `h` nodes, padding with zero nodes.
    pub fn padded(&self, h: usize) -> Result<Self> {
        if h < self.h {
            return Err(Error::InvalidArgument(format!("cannot pad {} nodes down to {h}", self.h)));
        }
        let mut out = Self::zeros(self.d, h);
        let n = self.h * self.group_len();
        out.theta[..n].copy_from_slice(&self.theta[..n]);
        out.set_b2(self.b2());
        Ok(out)
    }

    /// Euclidean distance between the vectorized parameters.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.d != other.d || self.h != other.h {
            return Err(Error::Shape(format!(
                "cannot compare networks with (d, H) = ({}, {}) and ({}, {})",
                self.d, self.h, other.d, other.h
            )));
        }
        Ok(self.theta.iter().zip(&other.theta).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        self.theta.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Checks the ℓ∞ box constraint `|θ_j| ≤ w` for every coordinate.
    pub fn check_box(&self, w: f64) -> Result<()> {
        if self.max_abs() <= w {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("parameter magnitude {} exceeds box radius {w}", self.max_abs())))
        }
    }

    pub(crate) fn forward_unchecked(&self, x: &[f64]) -> f64 {
        let mut out = self.b2();
        for i in 0..self.h {
            let g = self.group(i);
            let z = g[..self.d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + g[self.d + 1];
            out += g[self.d] * z.tanh();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ParamsJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ParamsJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

/// On-disk JSON form: `{"d", "H", "u", "v", "b1", "b2"}` with `u` as H rows of length d.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsJson {
    pub d: usize,
    #[serde(rename = "H")]
    pub h: usize,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: f64,
}

impl From<&NetworkParams> for ParamsJson {
    fn from(p: &NetworkParams) -> Self {
        Self { d: p.d, h: p.h, u: p.u(), v: p.v_vec(), b1: p.b1_vec(), b2: p.b2() }
    }
}

impl TryFrom<ParamsJson> for NetworkParams {
    type Error = Error;

    fn try_from(raw: ParamsJson) -> Result<Self> {
        if raw.u.len() != raw.h {
            return Err(Error::Shape(format!("\"H\" is {} but u has {} rows", raw.h, raw.u.len())));
        }
        if let Some((i, row)) = raw.u.iter().enumerate().find(|(_, r)| r.len() != raw.d) {
            return Err(Error::Shape(format!("u row {i} has length {}, expected d={}", row.len(), raw.d)));
        }
        if raw.h == 0 && raw.v.is_empty() && raw.b1.is_empty() {
            return Self::from_vec(raw.d, 0, vec![raw.b2]);
        }
        Self::from_parts(&raw.u, &raw.v, &raw.b1, raw.b2)
    }
}

impl Serialize for NetworkParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ParamsJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NetworkParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ParamsJson::deserialize(d)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

/// Paired inputs and targets. Inputs are stored row-major, `n × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(d: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() * d {
            return Err(Error::Shape(format!("{} input values do not form {} rows of width {d}", x.len(), y.len())));
        }
        check_finite("inputs", &x)?;
        check_finite("targets", &y)?;
        Ok(Self { d, x, y })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.len() != y.len() {
            return Err(Error::Shape(format!("{} input rows but {} targets", rows.len(), y.len())));
        }
        if let Some(k) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::Shape(format!("row {k} has length {}, expected {d}", rows[k].len())));
        }
        Self::new(d, rows.concat(), y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.x[k * self.d..(k + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n()).map(move |k| self.row(k))
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut x = Vec::with_capacity(idx.len() * self.d);
        let mut y = Vec::with_capacity(idx.len());
        for &k in idx {
            x.extend_from_slice(self.row(k));
            y.push(self.y[k]);
        }
        Self { d: self.d, x, y }
    }
}

fn check_pair(params: &NetworkParams, data: &Dataset) -> Result<()> {
    if data.n() == 0 {
        return Err(Error::EmptyDataset);
    }
    if params.d() != data.d() {
        return Err(Error::Shape(format!("network expects d={} but dataset has {} columns", params.d(), data.d())));
    }
    Ok(())
}

/// `v·tanh(u·x + b1) + b2`.
pub fn forward(params: &NetworkParams, x: &[f64]) -> Result<f64> {
    if x.len() != params.d() {
        return Err(Error::Shape(format!("input has length {}, network expects {}", x.len(), params.d())));
    }
    Ok(params.forward_unchecked(x))
}

/// Mean squared residual `(1/n) Σ (Y_k - f(X_k))²`.
pub fn empirical_risk(params: &NetworkParams, data: &Dataset) -> Result<f64> {
    check_pair(params, data)?;
    let sum: f64 = data
        .rows()
        .zip(data.y())
        .map(|(x, y)| {
            let r = y - params.forward_unchecked(x);
            r * r
        })
        .sum();
    Ok(sum / data.n() as f64)
}

/// Gradient of [`empirical_risk`] with respect to every parameter, in the
/// same node-major layout as the parameters.
pub fn risk_gradient(params: &NetworkParams, data: &Dataset) -> Result<NetworkParams> {
    check_pair(params, data)?;
    let mut grad = NetworkParams::zeros(params.d(), params.h());
    risk_and_gradient_into(params, data, grad.as_mut_slice());
    Ok(grad)
}

/// Writes the risk gradient into `grad` and returns the risk. Callers have
/// already validated shapes.
pub(crate) fn risk_and_gradient_into(params: &NetworkParams, data: &Dataset, grad: &mut [f64]) -> f64 {
    let d = params.d();
    let h = params.h();
    let g = d + 2;
    let n = data.n();
    grad.iter_mut().for_each(|x| *x = 0.0);
    let theta = params.as_slice();
    // A zero group has zero output and, since u = 0 and b1 = 0 give tanh(0) = 0,
    // an exactly zero gradient; skipping it changes nothing.
    let live: Vec<usize> = (0..h).filter(|&i| theta[i * g..(i + 1) * g].iter().any(|&w| w != 0.0)).collect();
    let mut act = vec![0.0; live.len()];
    let mut risk = 0.0;
    for (x, &y) in data.rows().zip(data.y()) {
        let mut f = params.b2();
        for (a, &i) in act.iter_mut().zip(&live) {
            let w = &theta[i * g..(i + 1) * g];
            let z = w[..d].iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + w[d + 1];
            *a = z.tanh();
            f += w[d] * *a;
        }
        let r = y - f;
        risk += r * r;
        // dR/df for this sample, before the 1/n scaling
        let s = -2.0 * r;
        for (&t, &i) in act.iter().zip(&live) {
            let v = theta[i * g + d];
            let dz = s * v * (1.0 - t * t);
            let gi = &mut grad[i * g..(i + 1) * g];
            for (gj, xj) in gi[..d].iter_mut().zip(x) {
                *gj += dz * xj;
            }
            gi[d] += s * t;
            gi[d + 1] += dz;
        }
        grad[h * g] += s;
    }
    let inv = 1.0 / n as f64;
    grad.iter_mut().for_each(|x| *x *= inv);
    risk * inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Gaussian};

    fn random_params(d: usize, h: usize, seed: u64) -> NetworkParams {
        let mut g = Gaussian::new(stream(seed, 0));
        let mut theta = vec![0.0; h * (d + 2) + 1];
        g.fill(&mut theta, 1.0);
        NetworkParams::from_vec(d, h, theta).unwrap()
    }

    #[test]
    fn zero_network_outputs_zero() {
        let p = NetworkParams::zeros(3, 4);
        assert_eq!(forward(&p, &[1.0, -2.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn dead_hidden_unit_leaves_output_bias() {
        let p = NetworkParams::from_parts(&[vec![0.0, 0.0]], &[3.0], &[0.0], 0.5).unwrap();
        assert_eq!(forward(&p, &[7.0, -1.0]).unwrap(), 0.5);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let p = NetworkParams::zeros(3, 2);
        assert!(matches!(forward(&p, &[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn risk_of_constant_predictor() {
        let p = NetworkParams::zeros(1, 2);
        let data = Dataset::from_rows(&[vec![1.0], vec![-4.0]], vec![0.0, 2.0]).unwrap();
        assert_eq!(empirical_risk(&p, &data).unwrap(), 2.0);
    }

    #[test]
    fn empty_dataset_rejected() {
        let p = NetworkParams::zeros(2, 1);
        let data = Dataset::new(2, vec![], vec![]).unwrap();
        assert!(matches!(empirical_risk(&p, &data), Err(Error::EmptyDataset)));
        assert!(matches!(risk_gradient(&p, &data), Err(Error::EmptyDataset)));
    }

    #[test]
    fn perfect_fit_has_zero_risk_and_gradient() {
        let p = random_params(3, 4, 9);
        let rows: Vec<Vec<f64>> = (0..6).map(|k| vec![k as f64 * 0.3, -1.0, 0.5 * k as f64]).collect();
        let y = rows.iter().map(|x| forward(&p, x).unwrap()).collect();
        let data = Dataset::from_rows(&rows, y).unwrap();
        assert_eq!(empirical_risk(&p, &data).unwrap(), 0.0);
        assert!(risk_gradient(&p, &data).unwrap().as_slice().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn sign_flip_and_permutation_preserve_output() {
        let p = random_params(4, 5, 3);
        let mut q = p.permuted(&[3, 0, 4, 1, 2]).unwrap();
        q.sign_flip(2);
        q.sign_flip(0);
        for k in 0..20 {
            let x: Vec<f64> = (0..4).map(|j| ((k * 7 + j * 3) as f64).sin()).collect();
            let a = forward(&p, &x).unwrap();
            let b = forward(&q, &x).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn permutation_validated() {
        let p = NetworkParams::zeros(1, 3);
        assert!(p.permuted(&[0, 0, 1]).is_err());
        assert!(p.permuted(&[0, 1]).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = random_params(2, 3, 5);
        let s = p.to_json().unwrap();
        assert_eq!(NetworkParams::from_json(&s).unwrap(), p);

        let bad_rows = r#"{"d":2,"H":2,"u":[[1,2]],"v":[1,2],"b1":[0,0],"b2":0}"#;
        assert!(matches!(NetworkParams::from_json(bad_rows), Err(Error::Shape(_))));
        let bad_width = r#"{"d":2,"H":1,"u":[[1]],"v":[1],"b1":[0],"b2":0}"#;
        assert!(matches!(NetworkParams::from_json(bad_width), Err(Error::Shape(_))));
        let bad_v = r#"{"d":1,"H":1,"u":[[1]],"v":[1,3],"b1":[0],"b2":0}"#;
        assert!(matches!(NetworkParams::from_json(bad_v), Err(Error::Shape(_))));
    }

    #[test]
    fn non_finite_parameters_rejected() {
        assert!(matches!(NetworkParams::from_vec(1, 1, vec![f64::NAN, 0.0, 0.0, 0.0]), Err(Error::NonFinite(_))));
        assert!(Dataset::new(1, vec![f64::INFINITY], vec![0.0]).is_err());
    }

    #[test]
    fn layout_accessors() {
        let p = NetworkParams::from_parts(&[vec![1.0, 2.0], vec![3.0, 4.0]], &[5.0, 6.0], &[7.0, 8.0], 9.0).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 2.0, 5.0, 7.0, 3.0, 4.0, 6.0, 8.0, 9.0]);
        assert_eq!(p.u_row(1), &[3.0, 4.0]);
        assert_eq!(p.v(0), 5.0);
        assert_eq!(p.b1(1), 8.0);
        assert_eq!(p.b2(), 9.0);
        assert_eq!(p.node_group(1).values, vec![3.0, 4.0, 6.0, 8.0]);
        let padded = p.padded(3).unwrap();
        assert_eq!(padded.group(2), &[0.0; 4]);
        assert_eq!(padded.b2(), 9.0);
    }

    #[test]
    fn box_check() {
        let p = NetworkParams::from_parts(&[vec![1.0]], &[-2.5], &[0.0], 0.0).unwrap();
        assert!(p.check_box(2.5).is_ok());
        assert!(p.check_box(2.0).is_err());
    }
}
