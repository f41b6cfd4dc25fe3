//! Execution plans, their costs, and the plan runner.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{merged_id, Network, NetworkError, SocketedNetwork};
use crate::tensor::{Tensor, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("step {index} is invalid: {reason}")]
    InvalidStep { index: usize, reason: String },
    #[error("plan leaves {0} vertices, or a vertex with a loop")]
    Incomplete(usize),
    #[error("vertex {0} has no tensor bound")]
    Unbound(VertexId),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// An execution: the sets contracted at each step, in order.
///
/// Step sets name vertices of the network current at that step; the result
/// of a contraction is named by [`merged_id`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionPlan {
    pub steps: Vec<Vec<VertexId>>,
}

/// The rooted contraction tree of a plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanTree {
    Leaf(VertexId),
    Node(Vec<PlanTree>),
}

impl PlanTree {
    pub fn leaf(id: impl Into<VertexId>) -> PlanTree {
        PlanTree::Leaf(id.into())
    }

    pub fn node(children: Vec<PlanTree>) -> PlanTree {
        PlanTree::Node(children)
    }

    pub fn pair(a: PlanTree, b: PlanTree) -> PlanTree {
        PlanTree::Node(vec![a, b])
    }

    /// The id of the vertex this subtree contracts to.
    pub fn result_id(&self) -> VertexId {
        match self {
            PlanTree::Leaf(v) => v.clone(),
            PlanTree::Node(c) => {
                let ids: Vec<VertexId> = c.iter().map(PlanTree::result_id).collect();
                merged_id(ids.iter())
            }
        }
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<VertexId>) {
        match self {
            PlanTree::Leaf(v) => out.push(v.clone()),
            PlanTree::Node(c) => c.iter().for_each(|t| t.collect_leaves(out)),
        }
    }

    fn post_order(&self, steps: &mut Vec<Vec<VertexId>>) -> VertexId {
        match self {
            PlanTree::Leaf(v) => v.clone(),
            PlanTree::Node(c) => {
                let ids: Vec<VertexId> = c.iter().map(|t| t.post_order(steps)).collect();
                let id = merged_id(ids.iter());
                steps.push(ids);
                id
            }
        }
    }
}

impl fmt::Display for PlanTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanTree::Leaf(v) => write!(f, "{v}"),
            PlanTree::Node(c) => {
                f.write_str("(")?;
                for (i, t) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl ExecutionPlan {
    pub fn new(steps: Vec<Vec<VertexId>>) -> Self {
        ExecutionPlan { steps }
    }

    pub fn empty() -> Self {
        ExecutionPlan::default()
    }

    /// The post-order step list of a tree.
    pub fn from_tree(tree: &PlanTree) -> Self {
        let mut steps = Vec::new();
        tree.post_order(&mut steps);
        ExecutionPlan { steps }
    }

    /// Post-order steps of several trees, one after another.
    pub fn from_forest(trees: &[PlanTree]) -> Self {
        let mut steps = Vec::new();
        for t in trees {
            t.post_order(&mut steps);
        }
        ExecutionPlan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The contraction tree over the vertices of `d`.
    pub fn tree(&self, d: &Network) -> Result<PlanTree, ExecError> {
        let mut live: BTreeMap<VertexId, PlanTree> =
            d.vertex_ids().into_iter().map(|v| (v.clone(), PlanTree::Leaf(v))).collect();
        for (index, step) in self.steps.iter().enumerate() {
            let mut children = Vec::new();
            for v in step {
                let t = live.remove(v).ok_or_else(|| ExecError::InvalidStep {
                    index,
                    reason: format!("{v} is not a current vertex"),
                })?;
                children.push(t);
            }
            live.insert(merged_id(step.iter()), PlanTree::Node(children));
        }
        if live.len() != 1 {
            return Err(ExecError::Incomplete(live.len()));
        }
        Ok(live.into_values().next().unwrap())
    }
}

/// Costs of one execution.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub per_step_cost: Vec<u64>,
    pub max_cost: u64,
    pub total_work: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amortized_cost: Option<u64>,
}

impl CostReport {
    pub fn from_steps(per_step_cost: Vec<u64>) -> Self {
        CostReport {
            max_cost: per_step_cost.iter().copied().max().unwrap_or(0),
            total_work: per_step_cost.iter().fold(0u64, |a, &c| a.saturating_add(c)),
            per_step_cost,
            amortized_cost: None,
        }
    }
}

/// Contracts one step after checking it, returning the step's cost.
fn apply_step(d: &Network, step: &[VertexId], index: usize) -> Result<(Network, u64), ExecError> {
    let invalid = |reason: String| ExecError::InvalidStep { index, reason };
    let set: BTreeSet<&VertexId> = step.iter().collect();
    if set.is_empty() {
        return Err(invalid("empty step".into()));
    }
    if set.len() != step.len() {
        return Err(invalid("a vertex appears twice".into()));
    }
    for v in step {
        if d.vertex(v).is_none() {
            return Err(invalid(format!("{v} is not a current vertex")));
        }
    }
    if step.len() == 1 && !d.has_loop(&step[0]) {
        return Err(invalid(format!("singleton {} has no loop", step[0])));
    }
    let cost = d.contraction_cost(step)?;
    Ok((d.contract(step)?, cost))
}

fn finish(d: &Network) -> Result<VertexId, ExecError> {
    let ids = d.vertex_ids();
    if ids.len() != 1 || d.has_loop(&ids[0]) {
        return Err(ExecError::Incomplete(ids.len()));
    }
    Ok(ids.into_iter().next().unwrap())
}

/// Runs `plan` on a bound network, returning `T(d)` and the step costs.
pub fn run(d: &Network, plan: &ExecutionPlan) -> Result<(Tensor, CostReport), ExecError> {
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(NetworkError::Invalid(violations).into());
    }
    for (id, v) in d.vertices() {
        if v.tensor.is_none() {
            return Err(ExecError::Unbound(id.clone()));
        }
    }
    let mut cur = d.clone();
    let mut costs = Vec::with_capacity(plan.len());
    for (i, step) in plan.steps.iter().enumerate() {
        let (next, c) = apply_step(&cur, step, i)?;
        cur = next;
        costs.push(c);
    }
    let last = finish(&cur)?;
    let t = cur.vertex(&last).unwrap().tensor.as_deref().unwrap().clone();
    Ok((t, CostReport::from_steps(costs)))
}

/// Step costs of `plan` without touching tensor data.
pub fn plan_cost(d: &Network, plan: &ExecutionPlan) -> Result<CostReport, ExecError> {
    let mut cur = d.skeleton();
    let mut costs = Vec::with_capacity(plan.len());
    for (i, step) in plan.steps.iter().enumerate() {
        let (next, c) = apply_step(&cur, step, i)?;
        cur = next;
        costs.push(c);
    }
    finish(&cur)?;
    Ok(CostReport::from_steps(costs))
}

/// The amortized cost `a(T)` of a plan for a socketed network.
///
/// A node whose subtrees hold no socket vertex costs 1. A node with exactly
/// one socket-bearing child `y` costs the larger of its own volume and the
/// volume at `y`. Any other node costs its contraction cost.
pub fn amortized_cost(s: &SocketedNetwork, plan: &ExecutionPlan) -> Result<u64, ExecError> {
    let mut cur = s.network.skeleton();
    let mut socketed: BTreeMap<VertexId, bool> = cur
        .vertex_ids()
        .into_iter()
        .map(|v| {
            let is = s.is_socket(&v);
            (v, is)
        })
        .collect();
    let mut best = 0u64;
    for (i, step) in plan.steps.iter().enumerate() {
        let flagged: Vec<&VertexId> = step.iter().filter(|v| socketed.get(*v) == Some(&true)).collect();
        let child_volume = flagged.first().map(|v| cur.vertex_volume(v));
        let (next, cost) = apply_step(&cur, step, i)?;
        let id = merged_id(step.iter());
        let node = match flagged.len() {
            0 => 1,
            1 => next.vertex_volume(&id).max(child_volume.unwrap()),
            _ => cost,
        };
        best = best.max(node);
        for v in step {
            socketed.remove(v);
        }
        socketed.insert(id, !flagged.is_empty());
        cur = next;
    }
    finish(&cur)?;
    Ok(best)
}

/// Step costs plus the amortized cost, for a socketed network.
pub fn socketed_report(s: &SocketedNetwork, plan: &ExecutionPlan) -> Result<CostReport, ExecError> {
    let mut r = plan_cost(&s.network, plan)?;
    r.amortized_cost = Some(amortized_cost(s, plan)?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldKind;
    use crate::tensor::Mode;

    const Q: FieldKind = FieldKind::Rational;

    fn mat(i: &str, j: &str, n: usize, m: usize, data: &[i64]) -> Tensor {
        Tensor::from_i64(vec![Mode::new(i, n), Mode::new(j, m)], Q, data).unwrap()
    }

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn chain() -> Network {
        let mut d = Network::new();
        d.add_vertex("A", mat("i", "j", 2, 3, &[1, 2, 3, 4, 5, 6])).unwrap();
        d.add_vertex("B", mat("j", "k", 3, 4, &(0..12).collect::<Vec<_>>())).unwrap();
        d.add_vertex("C", mat("k", "l", 4, 5, &(0..20).map(|x| x % 3).collect::<Vec<_>>())).unwrap();
        d.set_boundary(["i", "l"]);
        d
    }

    #[test]
    fn run_matches_value() {
        let d = chain();
        let plan = ExecutionPlan::new(vec![vec![v("A"), v("B")], vec![v("A+B"), v("C")]]);
        let (t, r) = run(&d, &plan).unwrap();
        assert_eq!(t, d.value().unwrap());
        assert_eq!(r.per_step_cost, vec![24, 40]);
        assert_eq!(r.max_cost, 40);
        assert_eq!(r.total_work, 64);
        assert_eq!(plan_cost(&d, &plan).unwrap(), r);
    }

    #[test]
    fn empty_plan_on_single_vertex() {
        let mut d = Network::new();
        let t = mat("a", "b", 2, 2, &[1, 2, 3, 4]);
        d.add_vertex("T", t.clone()).unwrap();
        d.set_boundary(["a", "b"]);
        let (got, r) = run(&d, &ExecutionPlan::empty()).unwrap();
        assert_eq!(got, t);
        assert_eq!(r.max_cost, 0);
    }

    #[test]
    fn invalid_steps_are_reported() {
        let d = chain();
        let bad = ExecutionPlan::new(vec![vec![v("A")]]);
        assert!(matches!(run(&d, &bad), Err(ExecError::InvalidStep { index: 0, .. })));
        let partial = ExecutionPlan::new(vec![vec![v("A"), v("B")]]);
        assert_eq!(run(&d, &partial).unwrap_err(), ExecError::Incomplete(2));
        let ghost = ExecutionPlan::new(vec![vec![v("A"), v("Z")]]);
        assert!(matches!(run(&d, &ghost), Err(ExecError::InvalidStep { .. })));
    }

    #[test]
    fn loop_singleton_step() {
        let mut d = Network::new();
        d.add_vertex("A", mat("x", "x2", 2, 2, &[1, 2, 3, 4])).unwrap();
        d.add_vertex("B", mat("x2", "y", 2, 1, &[1, 1])).unwrap();
        d.set_boundary(["y"]);
        let mut e = Network::new();
        let t = Tensor::from_i64(vec![Mode::new("l", 3)], Q, &[1, 2, 3]).unwrap();
        e.add_vertex("L", t).unwrap();
        let (s, r) = run(&e, &ExecutionPlan::new(vec![vec![v("L")]])).unwrap();
        assert_eq!(s, Tensor::scalar(Q.from_i64(6)));
        assert_eq!(r.max_cost, 3);
        assert!(run(&e, &ExecutionPlan::empty()).is_err());
    }

    #[test]
    fn trees_round_trip() {
        let d = chain();
        let tree = PlanTree::pair(PlanTree::pair(PlanTree::leaf("A"), PlanTree::leaf("B")), PlanTree::leaf("C"));
        let plan = ExecutionPlan::from_tree(&tree);
        assert_eq!(plan.steps, vec![vec![v("A"), v("B")], vec![v("A+B"), v("C")]]);
        assert_eq!(plan.tree(&d).unwrap(), tree);
        assert_eq!(tree.to_string(), "((A B) C)");
        assert_eq!(tree.result_id(), v("A+B+C"));
    }

    #[test]
    fn amortized_cases() {
        let mut d = chain();
        d.set_boundary(["l"]);
        d.add_mode("s", 2).unwrap();
        let mut net = Network::new();
        for (id, vx) in d.vertices() {
            net.add_vertex(id.clone(), vx.tensor.as_deref().unwrap().clone()).unwrap();
        }
        net.add_placeholder("X", &["i".into()]).unwrap();
        net.set_boundary(["l"]);
        let s = SocketedNetwork::new(net, vec![v("X")], vec!["l".into()]).unwrap();
        // ((X A) B) C : every node has exactly one socket side
        let tree = PlanTree::pair(
            PlanTree::pair(PlanTree::pair(PlanTree::leaf("X"), PlanTree::leaf("A")), PlanTree::leaf("B")),
            PlanTree::leaf("C"),
        );
        let plan = ExecutionPlan::from_tree(&tree);
        // volumes: X=2, X+A=3, +B=4, +C=5
        assert_eq!(amortized_cost(&s, &plan).unwrap(), 5);
        let r = socketed_report(&s, &plan).unwrap();
        assert!(r.amortized_cost.unwrap() <= r.max_cost);
        // (X ((A B) C)) : the non-socket subtree costs 1 per node
        let tree = PlanTree::pair(
            PlanTree::leaf("X"),
            PlanTree::pair(PlanTree::pair(PlanTree::leaf("A"), PlanTree::leaf("B")), PlanTree::leaf("C")),
        );
        assert_eq!(amortized_cost(&s, &ExecutionPlan::from_tree(&tree)).unwrap(), 5);
    }
}
