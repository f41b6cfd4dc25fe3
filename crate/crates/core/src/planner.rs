//! Contraction planning.
//!
//! [`optimal_plan`] solves the minimum-cost recurrence exactly over
//! connected vertex subsets (bitmasks), [`greedy_plan`] repeatedly joins the
//! cheapest adjacent pair, and [`normalize`] rewrites any plan into binary
//! steps over adjacent vertices without raising its cost.
//!
//! All strategies first contract vertices carrying loops on their own, then
//! plan each connected component separately and finally join the component
//! results in ascending order of volume.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::execution::{plan_cost, CostReport, ExecError, ExecutionPlan, PlanTree};
use crate::network::{Network, Violation};
use crate::tensor::{ModeId, VertexId};

/// Default vertex cap for the exact strategy.
pub const DEFAULT_EXACT_BOUND: usize = 18;

/// Hard cap on the exact strategy regardless of configuration.
pub const MAX_EXACT_BOUND: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// The largest single step cost.
    MaxStep,
    /// The sum of step costs.
    TotalWork,
}

#[derive(Clone, Debug)]
pub struct PlanRequest {
    pub network: Network,
    pub strategy: Strategy,
    pub objective: Objective,
    pub exact_bound: usize,
}

impl PlanRequest {
    pub fn new(network: Network) -> Self {
        PlanRequest {
            network,
            strategy: Strategy::Exact,
            objective: Objective::MaxStep,
            exact_bound: DEFAULT_EXACT_BOUND,
        }
    }

    pub fn strategy(mut self, s: Strategy) -> Self {
        self.strategy = s;
        self
    }

    pub fn objective(mut self, o: Objective) -> Self {
        self.objective = o;
        self
    }

    pub fn exact_bound(mut self, b: usize) -> Self {
        self.exact_bound = b;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("component with {0} vertices exceeds the exact bound")]
    TooLarge(usize),
    #[error("degenerate network: {0:?}")]
    DegenerateNetwork(Vec<Violation>),
    #[error("network has no vertices")]
    Empty,
    #[error("invalid plan: {0}")]
    InvalidPlan(#[from] ExecError),
}

/// Plans with the requested strategy.
pub fn plan(req: &PlanRequest) -> Result<(ExecutionPlan, CostReport), PlanError> {
    match req.strategy {
        Strategy::Exact => optimal_plan(req),
        Strategy::Greedy => greedy_plan(req),
    }
}

/// A minimum-cost plan for the requested objective.
pub fn optimal_plan(req: &PlanRequest) -> Result<(ExecutionPlan, CostReport), PlanError> {
    let bound = req.exact_bound.min(MAX_EXACT_BOUND);
    build_plan(&req.network, |h| {
        if h.len() > bound {
            return Err(PlanError::TooLarge(h.len()));
        }
        Ok(exact_tree(h, req.objective))
    })
}

/// A plan joining the cheapest adjacent pair at each step.
pub fn greedy_plan(req: &PlanRequest) -> Result<(ExecutionPlan, CostReport), PlanError> {
    build_plan(&req.network, |h| Ok(greedy_tree(h)))
}

/// The loop-free structure of one connected component.
struct Hyper {
    ids: Vec<VertexId>,
    /// (length, incidence mask, on the boundary)
    modes: Vec<(u128, u128, bool)>,
}

impl Hyper {
    fn len(&self) -> usize {
        self.ids.len()
    }

    fn touching(&self, s: u128) -> u128 {
        self.modes
            .iter()
            .filter(|(_, inc, _)| inc & s != 0)
            .fold(1u128, |a, (l, _, _)| a.saturating_mul(*l))
    }

    /// Cost of contracting the results of `u` and `v` with each other.
    fn join_cost(&self, u: u128, v: u128) -> u128 {
        self.modes
            .iter()
            .filter(|(_, inc, b)| {
                inc & (u | v) != 0 && (*b || (inc & !u != 0 && inc & !v != 0))
            })
            .fold(1u128, |a, (l, _, _)| a.saturating_mul(*l))
    }
}

fn build_plan(
    d: &Network,
    mut component_tree: impl FnMut(&Hyper) -> Result<PlanTree, PlanError>,
) -> Result<(ExecutionPlan, CostReport), PlanError> {
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(PlanError::DegenerateNetwork(violations));
    }
    if d.vertex_count() == 0 {
        return Err(PlanError::Empty);
    }
    let mut cur = d.skeleton();
    let mut steps = Vec::new();
    for v in d.vertex_ids() {
        if d.has_loop(&v) {
            cur = cur.contract(std::slice::from_ref(&v)).map_err(ExecError::from)?;
            steps.push(vec![v]);
        }
    }
    let mut results: Vec<(u128, VertexId)> = Vec::new();
    for comp in cur.components() {
        let h = hyper(&cur, &comp);
        let tree = component_tree(&h)?;
        let id = tree.result_id();
        steps.extend(ExecutionPlan::from_tree(&tree).steps);
        let leaves = mask_of(&h, &tree);
        let volume = h
            .modes
            .iter()
            .filter(|(_, inc, b)| inc & leaves != 0 && *b)
            .fold(1u128, |a, (l, _, _)| a.saturating_mul(*l));
        results.push((volume, id));
    }
    results.sort();
    let mut it = results.into_iter();
    let (_, mut acc) = it.next().unwrap();
    for (_, next) in it {
        let step = vec![acc, next];
        acc = crate::network::merged_id(step.iter());
        steps.push(step);
    }
    let plan = ExecutionPlan::new(steps);
    let report = plan_cost(d, &plan)?;
    Ok((plan, report))
}

/// Restricts `d` to the vertices `comp`; modes leaving the component count as boundary.
fn hyper(d: &Network, comp: &[VertexId]) -> Hyper {
    let index = |v: &VertexId| comp.iter().position(|c| c == v);
    let mut modes = Vec::new();
    for (e, &len) in d.modes() {
        let mut inc = 0u128;
        let mut outside = false;
        for v in d.incident_vertices(e) {
            match index(&v) {
                Some(i) => inc |= 1 << i,
                None => outside = true,
            }
        }
        if inc != 0 {
            modes.push((len as u128, inc, outside || d.boundary().contains(e)));
        }
    }
    Hyper {
        ids: comp.to_vec(),
        modes,
    }
}

fn mask_of(h: &Hyper, t: &PlanTree) -> u128 {
    t.leaves()
        .iter()
        .map(|v| 1u128 << h.ids.iter().position(|x| x == v).unwrap())
        .fold(0, |a, b| a | b)
}

fn exact_tree(h: &Hyper, objective: Objective) -> PlanTree {
    let n = h.len();
    if n == 1 {
        return PlanTree::Leaf(h.ids[0].clone());
    }
    let full = (1usize << n) - 1;
    let mut adj = vec![0usize; n];
    for (_, inc, _) in &h.modes {
        let inc = *inc as usize;
        for (i, a) in adj.iter_mut().enumerate() {
            if inc >> i & 1 == 1 {
                *a |= inc & !(1 << i);
            }
        }
    }
    let mut connected = vec![false; full + 1];
    for s in 1..=full {
        if s.count_ones() == 1 {
            connected[s] = true;
            continue;
        }
        let mut rest = s;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let t = s & !(1 << i);
            if connected[t] && adj[i] & t != 0 {
                connected[s] = true;
                break;
            }
        }
    }
    let inner: Vec<u128> = (0..=full)
        .map(|s| {
            h.modes
                .iter()
                .filter(|(_, inc, b)| !*b && *inc & !(s as u128) == 0)
                .fold(1u128, |a, (l, _, _)| a.saturating_mul(*l))
        })
        .collect();
    let mut best = vec![u128::MAX; full + 1];
    let mut split = vec![0usize; full + 1];
    for s in 1..=full {
        if !connected[s] {
            continue;
        }
        if s.count_ones() == 1 {
            best[s] = 0;
            continue;
        }
        let touching = h.touching(s as u128);
        let exact_division = touching != u128::MAX;
        let low = s & s.wrapping_neg();
        let mut u = 0usize;
        loop {
            u = ((u | !s).wrapping_add(1)) & s;
            if u == s || u == 0 {
                break;
            }
            if u & low == 0 {
                continue;
            }
            let v = s & !u;
            if !connected[u] || !connected[v] {
                continue;
            }
            let cost = if exact_division {
                touching / (inner[u] * inner[v])
            } else {
                h.join_cost(u as u128, v as u128)
            };
            let value = match objective {
                Objective::MaxStep => best[u].max(best[v]).max(cost),
                Objective::TotalWork => best[u].saturating_add(best[v]).saturating_add(cost),
            };
            if value < best[s] {
                best[s] = value;
                split[s] = u;
            }
        }
    }
    fn rebuild(h: &Hyper, split: &[usize], s: usize) -> PlanTree {
        if s.count_ones() == 1 {
            return PlanTree::Leaf(h.ids[s.trailing_zeros() as usize].clone());
        }
        let u = split[s];
        PlanTree::pair(rebuild(h, split, u), rebuild(h, split, s & !u))
    }
    rebuild(h, &split, full)
}

fn greedy_tree(h: &Hyper) -> PlanTree {
    struct Part {
        mask: u128,
        tree: PlanTree,
        id: VertexId,
    }
    let mut parts: Vec<Part> = h
        .ids
        .iter()
        .enumerate()
        .map(|(i, v)| Part {
            mask: 1 << i,
            tree: PlanTree::Leaf(v.clone()),
            id: v.clone(),
        })
        .collect();
    let result_modes = |m: u128| -> u128 {
        // bitmask over mode indices (at most 128 modes tracked per pair check)
        let mut out = 0u128;
        for (k, (_, inc, b)) in h.modes.iter().enumerate() {
            if inc & m != 0 && (*b || inc & !m != 0) {
                out |= 1 << k;
            }
        }
        out
    };
    let use_bits = h.modes.len() <= 128;
    while parts.len() > 1 {
        let mut best: Option<(u128, &VertexId, &VertexId, usize, usize)> = None;
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let (a, b) = (&parts[i], &parts[j]);
                let adjacent = if use_bits {
                    result_modes(a.mask) & result_modes(b.mask) != 0
                } else {
                    h.modes.iter().any(|(_, inc, _)| inc & a.mask != 0 && inc & b.mask != 0)
                };
                if !adjacent {
                    continue;
                }
                let cost = h.join_cost(a.mask, b.mask);
                let (x, y) = if a.id <= b.id { (&a.id, &b.id) } else { (&b.id, &a.id) };
                let better = match &best {
                    None => true,
                    Some((c, bx, by, _, _)) => (cost, x, y) < (*c, *bx, *by),
                };
                if better {
                    best = Some((cost, x, y, i, j));
                }
            }
        }
        let (i, j) = match best {
            Some((_, _, _, i, j)) => (i, j),
            None => (0, 1),
        };
        let b = parts.remove(j);
        let a = parts.remove(i);
        let (first, second) = if a.id <= b.id { (a, b) } else { (b, a) };
        let tree = PlanTree::pair(first.tree, second.tree);
        let id = tree.result_id();
        parts.insert(
            i,
            Part {
                mask: first.mask | second.mask,
                tree,
                id,
            },
        );
    }
    parts.pop().unwrap().tree
}

/// Rewrites a valid plan into binary steps over adjacent vertices.
///
/// Each step of the result touches a subset of the modes of the original
/// step it came from, so the maximum step cost never increases. Vertices
/// that only meet through an outer product are postponed until an adjacent
/// partner appears; on disconnected networks the leftovers are joined at the
/// end.
pub fn normalize(plan: &ExecutionPlan, d: &Network) -> Result<ExecutionPlan, PlanError> {
    plan_cost(d, plan)?;
    let tree = plan.tree(d)?;
    let ids = d.vertex_ids();
    if ids.len() > 128 {
        return Err(PlanError::TooLarge(ids.len()));
    }
    let all: Vec<VertexId> = ids.clone();
    let h = Hyper {
        modes: d
            .modes()
            .iter()
            .map(|(e, &l)| {
                let inc = d
                    .incident_vertices(e)
                    .iter()
                    .map(|v| 1u128 << all.iter().position(|x| x == v).unwrap())
                    .fold(0, |a, b| a | b);
                (l as u128, inc, d.boundary().contains(e))
            })
            .collect(),
        ids,
    };
    let mut parts = normalize_node(&h, &tree);
    while parts.len() > 1 {
        let b = parts.remove(1);
        let a = parts.remove(0);
        parts.insert(0, (a.0 | b.0, PlanTree::pair(a.1, b.1)));
    }
    Ok(ExecutionPlan::from_tree(&parts.pop().unwrap().1))
}

fn result_mode_set(h: &Hyper, m: u128) -> BTreeSet<usize> {
    h.modes
        .iter()
        .enumerate()
        .filter(|(_, (_, inc, b))| inc & m != 0 && (*b || inc & !m != 0))
        .map(|(k, _)| k)
        .collect()
}

/// Pairwise non-adjacent parts whose joint contraction gives this node.
fn normalize_node(h: &Hyper, t: &PlanTree) -> Vec<(u128, PlanTree)> {
    match t {
        PlanTree::Leaf(v) => {
            let i = h.ids.iter().position(|x| x == v).unwrap();
            vec![(1 << i, t.clone())]
        }
        PlanTree::Node(c) if c.len() == 1 => {
            let mut inner = normalize_node(h, &c[0]);
            if inner.len() == 1 {
                let (m, sub) = inner.pop().unwrap();
                vec![(m, PlanTree::Node(vec![sub]))]
            } else {
                inner
            }
        }
        PlanTree::Node(c) => {
            let mut parts: Vec<(u128, PlanTree)> = c.iter().flat_map(|x| normalize_node(h, x)).collect();
            loop {
                let sets: Vec<BTreeSet<usize>> = parts.iter().map(|(m, _)| result_mode_set(h, *m)).collect();
                let mut best: Option<(u128, usize, usize)> = None;
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        if sets[i].is_disjoint(&sets[j]) {
                            continue;
                        }
                        let cost = h.join_cost(parts[i].0, parts[j].0);
                        if best.map_or(true, |(c, _, _)| cost < c) {
                            best = Some((cost, i, j));
                        }
                    }
                }
                let Some((_, i, j)) = best else {
                    return parts;
                };
                let b = parts.remove(j);
                let a = parts.remove(i);
                parts.insert(i, (a.0 | b.0, PlanTree::pair(a.1, b.1)));
            }
        }
    }
}

/// Mode ids of a network touched by a plan step; used in diagnostics.
pub fn step_modes(d: &Network, step: &[VertexId]) -> Vec<ModeId> {
    let mut out: BTreeSet<ModeId> = BTreeSet::new();
    for v in step {
        if let Some(x) = d.vertex(v) {
            out.extend(x.modes.iter().cloned());
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::run;
    use crate::field::FieldKind;
    use crate::tensor::{Mode, Tensor};
    use proptest::prelude::*;

    const Q: FieldKind = FieldKind::Rational;

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn mat(i: &str, j: &str, n: usize, m: usize) -> Tensor {
        let data: Vec<i64> = (0..(n * m) as i64).map(|x| x % 5 + 1).collect();
        Tensor::from_i64(vec![Mode::new(i, n), Mode::new(j, m)], Q, &data).unwrap()
    }

    fn chain() -> Network {
        let mut d = Network::new();
        d.add_vertex("A", mat("i", "j", 2, 3)).unwrap();
        d.add_vertex("B", mat("j", "k", 3, 4)).unwrap();
        d.add_vertex("C", mat("k", "l", 4, 5)).unwrap();
        d.set_boundary(["i", "l"]);
        d
    }

    fn triangle(n: usize) -> Network {
        let mut d = Network::new();
        d.add_vertex("A", mat("a", "b", n, n)).unwrap();
        d.add_vertex("B", mat("b", "c", n, n)).unwrap();
        d.add_vertex("C", mat("c", "a", n, n)).unwrap();
        d
    }

    #[test]
    fn chain_optimum() {
        let (p, r) = optimal_plan(&PlanRequest::new(chain())).unwrap();
        assert_eq!(p.steps, vec![vec![v("A"), v("B")], vec![v("A+B"), v("C")]]);
        assert_eq!(r.max_cost, 40);
        let (_, g) = greedy_plan(&PlanRequest::new(chain())).unwrap();
        assert!(g.max_cost <= 60);
    }

    #[test]
    fn single_vertex_and_pairs() {
        let mut d = Network::new();
        d.add_vertex("T", mat("x", "y", 2, 2)).unwrap();
        d.set_boundary(["x", "y"]);
        let (p, r) = optimal_plan(&PlanRequest::new(d)).unwrap();
        assert!(p.is_empty());
        assert_eq!(r.max_cost, 0);
        let mut d = Network::new();
        d.add_vertex("A", mat("x", "y", 2, 3)).unwrap();
        d.add_vertex("B", mat("y", "z", 3, 2)).unwrap();
        d.set_boundary(["x", "z"]);
        let (p, _) = greedy_plan(&PlanRequest::new(d)).unwrap();
        assert_eq!(p.steps, vec![vec![v("A"), v("B")]]);
    }

    #[test]
    fn loops_and_components() {
        let mut d = chain();
        d.add_vertex("L", Tensor::from_i64(vec![Mode::new("q", 3), Mode::new("w", 2)], Q, &[1; 6]).unwrap())
            .unwrap();
        d.add_boundary("w");
        let (p, r) = optimal_plan(&PlanRequest::new(d.clone())).unwrap();
        assert_eq!(p.steps[0], vec![v("L")]);
        let (t, _) = run(&d, &p).unwrap();
        assert_eq!(t, d.value().unwrap());
        assert_eq!(r.max_cost, 40);
    }

    #[test]
    fn exact_refuses_beyond_bound() {
        let req = PlanRequest::new(chain()).exact_bound(2);
        assert_eq!(optimal_plan(&req).unwrap_err(), PlanError::TooLarge(3));
    }

    #[test]
    fn normalize_splits_and_fixes_adjacency() {
        let d = triangle(3);
        let three = ExecutionPlan::new(vec![vec![v("A"), v("B"), v("C")]]);
        let n = normalize(&three, &d).unwrap();
        assert!(n.steps.iter().all(|s| s.len() == 2));
        assert!(plan_cost(&d, &n).unwrap().max_cost <= plan_cost(&d, &three).unwrap().max_cost);

        let mut path = Network::new();
        path.add_vertex("A", mat("a", "b", 2, 2)).unwrap();
        path.add_vertex("B", mat("b", "c", 2, 2)).unwrap();
        path.add_vertex("C", mat("c", "d", 2, 2)).unwrap();
        let outer = ExecutionPlan::new(vec![vec![v("A"), v("C")], vec![v("A+C"), v("B")]]);
        let n = normalize(&outer, &path).unwrap();
        let mut cur = path.clone();
        for s in &n.steps {
            assert!(cur.adjacent(&s[0], &s[1]));
            cur = cur.contract(s).unwrap();
        }
        assert!(plan_cost(&path, &n).unwrap().max_cost <= plan_cost(&path, &outer).unwrap().max_cost);
        let good = ExecutionPlan::new(vec![vec![v("A"), v("B")], vec![v("A+B"), v("C")]]);
        assert_eq!(normalize(&good, &path).unwrap(), good);
    }

    fn random_network(seed: u64) -> Network {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = FieldKind::prime(101).unwrap();
        let nv = rng.gen_range(2..=5);
        let nm = rng.gen_range(1..=6);
        let lengths: Vec<usize> = (0..nm).map(|_| rng.gen_range(1..=3)).collect();
        let mut incid: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in 0..nm {
            let mut any = false;
            for inc in incid.iter_mut() {
                if rng.gen_bool(0.5) {
                    inc.push(e);
                    any = true;
                }
            }
            if !any {
                incid[rng.gen_range(0..nv)].push(e);
            }
        }
        let mut d = Network::new();
        for (k, inc) in incid.iter().enumerate() {
            let modes: Vec<Mode> = inc.iter().map(|&e| Mode::new(format!("e{e}"), lengths[e])).collect();
            let t = Tensor::from_fn(modes, f, |_| f.from_i64(rng.gen_range(0..101))).unwrap();
            d.add_vertex(format!("v{k}"), t).unwrap();
        }
        for e in 0..nm {
            if rng.gen_bool(0.3) {
                d.add_boundary(format!("e{e}"));
            }
        }
        d
    }

    proptest! {
        #[test]
        fn plans_compute_the_value(seed in 0u64..10_000) {
            let d = random_network(seed);
            let want = d.value().unwrap();
            let (p, r) = optimal_plan(&PlanRequest::new(d.clone())).unwrap();
            prop_assert_eq!(run(&d, &p).unwrap().0, want.clone());
            let (g, gr) = greedy_plan(&PlanRequest::new(d.clone())).unwrap();
            prop_assert_eq!(run(&d, &g).unwrap().0, want);
            prop_assert!(gr.max_cost >= r.max_cost);
            let (_, tw) = optimal_plan(&PlanRequest::new(d.clone()).objective(Objective::TotalWork)).unwrap();
            prop_assert!(tw.total_work <= gr.total_work);
        }

        #[test]
        fn normalize_never_raises_cost(seed in 0u64..10_000) {
            let d = random_network(seed);
            let (g, gr) = greedy_plan(&PlanRequest::new(d.clone())).unwrap();
            let n = normalize(&g, &d).unwrap();
            let nr = plan_cost(&d, &n).unwrap();
            prop_assert!(nr.max_cost <= gr.max_cost);
            prop_assert_eq!(run(&d, &n).unwrap().0, d.value().unwrap());
        }
    }
}
