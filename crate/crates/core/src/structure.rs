//! Structural analysis of tanh networks: minimality, node counts, merging of
//! redundant nodes, and distance to the orbit of a reference network.
//!
//! A network is minimal iff every node has a nonzero input weight row, a
//! nonzero output weight, and no two nodes share `(u[i,:], b1[i])` up to sign.
//! Equal-function parameterizations of a minimal network differ only by node
//! permutations and sign flips. A sign flip negates the node's whole group
//! `(u[i,:], v[i], b1[i])`; negating only `(u, b1)` would change the function.

use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{Error, Result};
use crate::network::{l2, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureTolerances {
    /// Norms at or below this count as zero.
    pub zero_tol: f64,
    /// Two nodes are sign duplicates when `(u, b1)` agree up to sign within this distance.
    pub dup_tol: f64,
}

impl Default for StructureTolerances {
    fn default() -> Self {
        Self { zero_tol: 1e-8, dup_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    ZeroUColumn,
    ZeroVEntry,
    SignDuplicatePair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounts {
    pub zero: usize,
    pub non_significant: usize,
    pub nonzero: usize,
}

/// `(u[i,:], b1[i])`, the part of a group that determines the hidden unit's
/// response shape.
fn input_part(params: &NetworkParams, i: usize) -> impl Iterator<Item = f64> + '_ {
    params.u_row(i).iter().copied().chain(std::iter::once(params.b1(i)))
}

/// Smallest of `‖a − b‖` and `‖a + b‖` over the input parts, and the sign
/// (+1 or −1) that attains it.
fn signed_input_gap(params: &NetworkParams, i: usize, j: usize) -> (f64, f64) {
    let (mut same, mut flip) = (0.0, 0.0);
    for (a, b) in input_part(params, i).zip(input_part(params, j)) {
        same += (a - b) * (a - b);
        flip += (a + b) * (a + b);
    }
    if same <= flip {
        (same.sqrt(), 1.0)
    } else {
        (flip.sqrt(), -1.0)
    }
}

fn is_non_significant(params: &NetworkParams, i: usize, zero_tol: f64) -> bool {
    l2(params.u_row(i)) <= zero_tol || params.v(i).abs() <= zero_tol
}

pub fn check_minimal(params: &NetworkParams, tol: StructureTolerances) -> MinimalityReport {
    let mut violations = Vec::new();
    for i in 0..params.h() {
        if l2(params.u_row(i)) <= tol.zero_tol {
            violations.push(Violation { kind: ViolationKind::ZeroUColumn, nodes: vec![i] });
        }
        if params.v(i).abs() <= tol.zero_tol {
            violations.push(Violation { kind: ViolationKind::ZeroVEntry, nodes: vec![i] });
        }
    }
    for i in 0..params.h() {
        for j in i + 1..params.h() {
            if signed_input_gap(params, i, j).0 <= tol.dup_tol {
                violations.push(Violation { kind: ViolationKind::SignDuplicatePair, nodes: vec![i, j] });
            }
        }
    }
    MinimalityReport { minimal: violations.is_empty(), violations }
}

pub fn count_nodes(params: &NetworkParams, tol: StructureTolerances) -> NodeCounts {
    let zero = (0..params.h()).filter(|&i| l2(params.group(i)) <= tol.zero_tol).count();
    let non_significant = (0..params.h()).filter(|&i| is_non_significant(params, i, tol.zero_tol)).count();
    NodeCounts { zero, non_significant, nonzero: params.h() - zero }
}

/// Indices of nodes whose group norm exceeds `zero_tol`.
pub fn nonzero_nodes(params: &NetworkParams, zero_tol: f64) -> Vec<usize> {
    (0..params.h()).filter(|&i| l2(params.group(i)) > zero_tol).collect()
}

/// The network restricted to its nonzero nodes.
pub fn strip_zero_nodes(params: &NetworkParams, zero_tol: f64) -> NetworkParams {
    params.select_nodes(&nonzero_nodes(params, zero_tol))
}

/// Merges redundant nodes while keeping the input-output map.
///
/// Non-significant nodes are removed: a node with `u[i,:] = 0` contributes the
/// constant `v[i]·tanh(b1[i])`, which moves into `b2`. The remaining nodes are
/// grouped greedily: the lowest-index unassigned node represents every later
/// node whose `(u, b1)` matches its own up to sign within `dup_tol`, and its
/// output weight becomes `Σ ± v` (minus for flipped members). Absorbed slots
/// become zero nodes. A representative whose merged `v` cancels to zero is
/// removed too.
#[allow(clippy::needless_range_loop)]
pub fn canonical_reduce(params: &NetworkParams, tol: StructureTolerances) -> NetworkParams {
    let mut out = params.clone();
    let d = params.d();
    let h = params.h();
    let mut b2 = params.b2();
    let mut alive = vec![true; h];

    for i in 0..h {
        if is_non_significant(params, i, tol.zero_tol) {
            if l2(params.u_row(i)) <= tol.zero_tol {
                b2 += params.v(i) * params.b1(i).tanh();
            }
            alive[i] = false;
            out.group_mut(i).iter_mut().for_each(|x| *x = 0.0);
        }
    }

    for i in 0..h {
        if !alive[i] {
            continue;
        }
        let mut v = params.v(i);
        for j in i + 1..h {
            if !alive[j] {
                continue;
            }
            let (gap, sign) = signed_input_gap(params, i, j);
            if gap <= tol.dup_tol {
                v += sign * params.v(j);
                alive[j] = false;
                out.group_mut(j).iter_mut().for_each(|x| *x = 0.0);
            }
        }
        alive[i] = false;
        if v.abs() <= tol.zero_tol {
            out.group_mut(i).iter_mut().for_each(|x| *x = 0.0);
        } else {
            out.group_mut(i)[d] = v;
        }
    }
    out.set_b2(b2);
    out
}

fn squared_gap(a: &[f64], b: &[f64], sign: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - sign * y) * (x - sign * y)).sum()
}

fn squared_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Cost of placing reference node `r` into candidate slot `c`, with the
/// better of the two signs.
pub(crate) fn pair_cost(candidate: &[f64], reference: &[f64]) -> f64 {
    squared_gap(candidate, reference, 1.0).min(squared_gap(candidate, reference, -1.0))
}

/// Sums matched pair costs in reference order, then unmatched candidate
/// norms in slot order, then the output-bias gap.
pub(crate) fn embedding_cost(candidate: &NetworkParams, reference: &NetworkParams, slot_of_ref: &[usize]) -> f64 {
    let mut used = vec![false; candidate.h()];
    let mut total = 0.0;
    for (r, &c) in slot_of_ref.iter().enumerate() {
        used[c] = true;
        total += pair_cost(candidate.group(c), reference.group(r));
    }
    for (c, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
        total += squared_norm(candidate.group(c));
    }
    let db = candidate.b2() - reference.b2();
    total + db * db
}

/// Distance from `candidate` to the finite set of `H`-node networks obtained
/// by embedding the minimal `reference` (zero padding, any node permutation,
/// any per-node sign flip). Solved exactly as an assignment problem.
pub fn distance_to_embedded_reference(candidate: &NetworkParams, reference: &NetworkParams) -> Result<f64> {
    if candidate.d() != reference.d() {
        return Err(Error::Shape(format!("candidate has d={} but reference has d={}", candidate.d(), reference.d())));
    }
    if candidate.h() < reference.h() {
        return Err(Error::Shape(format!(
            "candidate has {} nodes, fewer than the reference's {}",
            candidate.h(),
            reference.h()
        )));
    }
    let report = check_minimal(reference, StructureTolerances::default());
    if !report.minimal {
        return Err(Error::NonMinimalReference(format!("{:?}", report.violations)));
    }
    let h = candidate.h();
    let cost: Vec<Vec<f64>> = (0..h)
        .map(|r| {
            (0..h)
                .map(|c| {
                    if r < reference.h() {
                        pair_cost(candidate.group(c), reference.group(r))
                    } else {
                        squared_norm(candidate.group(c))
                    }
                })
                .collect()
        })
        .collect();
    let slots = assignment::solve(&cost);
    Ok(embedding_cost(candidate, reference, &slots[..reference.h()]).sqrt())
}
