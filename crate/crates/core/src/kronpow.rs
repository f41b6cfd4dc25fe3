//! Kronecker powers of socketed networks and lifted executions.
//!
//! Copy `c` of a core vertex `v` is named `v#c` and copy `c` of a mode `e`
//! is `e#c`. Socket vertices keep their names and carry the modes of all
//! copies, copy 1 outermost.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::execution::{amortized_cost, plan_cost, ExecError, ExecutionPlan, PlanTree};
use crate::network::{realize, BaseTensor, MapSpec, Network, NetworkError, SocketedNetwork};
use crate::tensor::{Mode, ModeId, Tensor, TensorError, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KronError {
    #[error("plan is not an execution of the realization: {0}")]
    NotARealization(ExecError),
    #[error("decomposition does not reproduce the base tensor: {0}")]
    BadDecomposition(String),
    #[error("k must be positive")]
    ZeroPower,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// A lifted execution with the bound it is guaranteed to meet.
#[derive(Clone, Debug)]
pub struct LiftedPlan {
    pub network: SocketedNetwork,
    pub plan: ExecutionPlan,
    /// `a^(k-1) * c` for the base plan.
    pub claimed_bound: u64,
    /// Amortized cost `a` of the base plan.
    pub amortized: u64,
    /// Max-step cost `c` of the base plan.
    pub base_cost: u64,
    pub k: usize,
}

impl LiftedPlan {
    /// Max-step cost of the lifted plan, replayed structurally.
    pub fn measured_cost(&self) -> Result<u64, ExecError> {
        Ok(plan_cost(&self.network.network, &self.plan)?.max_cost)
    }
}

pub fn copy_vertex(v: &VertexId, c: usize) -> VertexId {
    VertexId(format!("{v}#{c}"))
}

pub fn copy_mode(e: &ModeId, c: usize) -> ModeId {
    ModeId(format!("{e}#{c}"))
}

/// `k` disjoint copies of the core, sharing one socket vertex per input.
pub fn power_network(s: &SocketedNetwork, k: usize) -> Result<SocketedNetwork, KronError> {
    if k == 0 {
        return Err(KronError::ZeroPower);
    }
    let d = &s.network;
    let mut out = Network::new();
    for c in 1..=k {
        for (id, v) in d.vertices() {
            if s.is_socket(id) {
                continue;
            }
            let new_id = copy_vertex(id, c);
            match &v.tensor {
                Some(t) => out.add_vertex(new_id, t.renamed(|m| copy_mode(m, c))?)?,
                None => {
                    for m in &v.modes {
                        out.add_mode(copy_mode(m, c), d.mode_length(m).unwrap())?;
                    }
                    let modes: Vec<ModeId> = v.modes.iter().map(|m| copy_mode(m, c)).collect();
                    out.add_placeholder(new_id, &modes)?;
                }
            }
        }
    }
    for socket in &s.sockets {
        let modes: Vec<ModeId> = (1..=k)
            .flat_map(|c| d.vertex(socket).unwrap().modes.iter().map(move |m| copy_mode(m, c)))
            .collect();
        out.add_placeholder(socket.clone(), &modes)?;
    }
    let output: Vec<ModeId> = (1..=k).flat_map(|c| s.output.iter().map(move |m| copy_mode(m, c))).collect();
    out.set_boundary(output.iter().cloned());
    Ok(SocketedNetwork::new(out, s.sockets.clone(), output)?)
}

/// The map `A^(⊗k)` with an explicit base tensor (copies of `T̂(A)` side by side).
pub fn power_spec(spec: &MapSpec, k: usize) -> Result<MapSpec, KronError> {
    if k == 0 {
        return Err(KronError::ZeroPower);
    }
    let base = spec.base_tensor()?;
    let mut acc: Option<Tensor> = None;
    for c in 1..=k {
        let copy = base.renamed(|m| copy_mode(m, c))?;
        acc = Some(match acc {
            None => copy,
            Some(a) => a.outer(&copy)?,
        });
    }
    let rename = |modes: &[Mode]| -> Vec<Mode> {
        (1..=k)
            .flat_map(|c| modes.iter().map(move |m| Mode::new(copy_mode(&m.id, c), m.length)))
            .collect()
    };
    Ok(MapSpec {
        name: format!("{}^{k}", spec.name),
        inputs: spec.inputs.iter().map(|s| rename(s)).collect(),
        output: rename(&spec.output),
        base: BaseTensor::Explicit(acc.unwrap()),
    })
}

enum Lifted {
    Replicated(Vec<PlanTree>),
    Single(PlanTree),
}

fn lift_tree(t: &PlanTree, sockets: &BTreeSet<VertexId>, k: usize) -> Lifted {
    match t {
        PlanTree::Leaf(v) if sockets.contains(v) => Lifted::Single(t.clone()),
        PlanTree::Leaf(v) => Lifted::Replicated((1..=k).map(|c| PlanTree::Leaf(copy_vertex(v, c))).collect()),
        PlanTree::Node(children) => {
            let lifted: Vec<Lifted> = children.iter().map(|c| lift_tree(c, sockets, k)).collect();
            let singles: Vec<&PlanTree> = lifted
                .iter()
                .filter_map(|l| match l {
                    Lifted::Single(t) => Some(t),
                    _ => None,
                })
                .collect();
            let reps: Vec<&Vec<PlanTree>> = lifted
                .iter()
                .filter_map(|l| match l {
                    Lifted::Replicated(r) => Some(r),
                    _ => None,
                })
                .collect();
            match singles.len() {
                0 => Lifted::Replicated(
                    (0..k)
                        .map(|c| PlanTree::Node(reps.iter().map(|r| r[c].clone()).collect()))
                        .collect(),
                ),
                1 if reps.is_empty() => Lifted::Single(PlanTree::Node(vec![singles[0].clone()])),
                1 => {
                    let mut acc = singles[0].clone();
                    for c in 0..k {
                        let mut group = vec![acc];
                        group.extend(reps.iter().map(|r| r[c].clone()));
                        acc = PlanTree::Node(group);
                    }
                    Lifted::Single(acc)
                }
                _ => {
                    let mut group: Vec<PlanTree> = singles.into_iter().cloned().collect();
                    for r in reps {
                        group.extend(r.iter().cloned());
                    }
                    Lifted::Single(PlanTree::Node(group))
                }
            }
        }
    }
}

/// Lifts an execution of `s` to one of its `k`-th Kronecker power.
pub fn lift(s: &SocketedNetwork, plan: &ExecutionPlan, k: usize) -> Result<LiftedPlan, KronError> {
    if k == 0 {
        return Err(KronError::ZeroPower);
    }
    let base = plan_cost(&s.network, plan).map_err(KronError::NotARealization)?;
    let a = amortized_cost(s, plan).map_err(KronError::NotARealization)?;
    let tree = plan.tree(&s.network).map_err(KronError::NotARealization)?;
    let sockets: BTreeSet<VertexId> = s.sockets.iter().cloned().collect();
    let root = match lift_tree(&tree, &sockets, k) {
        Lifted::Single(t) => t,
        Lifted::Replicated(copies) => {
            let mut it = copies.into_iter();
            let first = it.next().unwrap();
            it.fold(first, PlanTree::pair)
        }
    };
    let network = power_network(s, k)?;
    let claimed = a.saturating_pow(k as u32 - 1).saturating_mul(base.max_cost);
    Ok(LiftedPlan {
        network,
        plan: ExecutionPlan::from_tree(&root),
        claimed_bound: claimed,
        amortized: a,
        base_cost: base.max_cost,
        k,
    })
}

/// The bound `max(r, m)^k * min(r, m)` for a rank-`r` star execution.
pub fn low_rank_bound(r: u64, m: u64, k: usize) -> u64 {
    r.max(m).saturating_pow(k as u32).saturating_mul(r.min(m))
}

/// A star realization from a rank decomposition, lifted to power `k`.
///
/// `factors` holds one tensor per socket (inputs, then the output unless the
/// map is a form) over that socket's modes plus a shared mode `rank`.
pub fn low_rank_execution(spec: &MapSpec, factors: &[Tensor], k: usize) -> Result<LiftedPlan, KronError> {
    let mut sockets = spec.inputs.clone();
    if !spec.output.is_empty() {
        sockets.push(spec.output.clone());
    }
    if factors.len() != sockets.len() {
        return Err(KronError::BadDecomposition(format!(
            "expected {} factors, got {}",
            sockets.len(),
            factors.len()
        )));
    }
    let rank_id = ModeId::from("rank");
    let mut core = Network::new();
    for (i, (f, socket)) in factors.iter().zip(&sockets).enumerate() {
        let mut want: Vec<ModeId> = socket.iter().map(|m| m.id.clone()).collect();
        want.push(rank_id.clone());
        want.sort();
        let mut have = f.mode_ids();
        have.sort();
        if want != have {
            return Err(KronError::BadDecomposition(format!("factor {i} has the wrong modes")));
        }
        core.add_vertex(format!("F{}", i + 1), f.clone())
            .map_err(|e| KronError::BadDecomposition(e.to_string()))?;
    }
    core.set_boundary(spec.all_modes().into_iter().map(|m| m.id));
    let s = match realize(spec, &core) {
        Ok(s) => s,
        Err(NetworkError::ValueMismatch) => {
            return Err(KronError::BadDecomposition("star value differs from the base tensor".into()))
        }
        Err(e) => return Err(e.into()),
    };
    let mut parts: Vec<PlanTree> = s
        .sockets
        .iter()
        .enumerate()
        .map(|(i, x)| PlanTree::pair(PlanTree::Leaf(x.clone()), PlanTree::leaf(format!("F{}", i + 1))))
        .collect();
    let first = parts.remove(0);
    let mut tree = parts.into_iter().fold(first, PlanTree::pair);
    if !spec.output.is_empty() {
        tree = PlanTree::pair(tree, PlanTree::leaf(format!("F{}", sockets.len())));
    }
    lift(&s, &ExecutionPlan::from_tree(&tree), k)
}
