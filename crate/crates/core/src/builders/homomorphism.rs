use std::collections::{BTreeSet, HashMap, HashSet};

use super::{assemble, Axis, BuildError, Built, IoLayout};
use crate::field::{FieldKind, Scalar};
use crate::network::{contract_tensors, realize, MapSpec, Network};
use crate::oracle::OracleSpec;
use crate::pattern::PatternGraph;
use crate::planner::{plan, PlanRequest};
use crate::tensor::{Mode, ModeId, Tensor};

fn socket_mode(k: usize, v: usize) -> ModeId {
    ModeId(format!("s{}_{}", k + 1, v))
}

fn reject_isolated(p: &PatternGraph) -> Result<(), BuildError> {
    let iso = p.isolated();
    if iso.is_empty() {
        Ok(())
    } else {
        Err(BuildError::BadParams(format!("pattern has isolated vertices {iso:?}")))
    }
}

/// The P-form `sum_σ prod_S X^S[σ|S]` with one diagonal vertex per pattern vertex.
///
/// The plan comes from the planner (exact below its vertex bound).
pub fn pform_network(p: &PatternGraph, n: usize, field: FieldKind) -> Result<(MapSpec, Built), BuildError> {
    if n == 0 {
        return Err(BuildError::BadParams("n must be positive".into()));
    }
    if p.edge_count() == 0 {
        return Err(BuildError::BadParams("pattern has no edges".into()));
    }
    reject_isolated(p)?;
    let spec = MapSpec::from_oracle(OracleSpec::PForm { pattern: p.clone(), n }, field);
    let mut core = Network::new();
    let one = field.one();
    let zero = field.zero();
    for v in 0..p.vertex_count() {
        let modes: Vec<Mode> = p
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(&v))
            .map(|(k, _)| Mode::new(socket_mode(k, v), n))
            .collect();
        let diag = Tensor::from_fn(modes, field, |idx| {
            if idx.windows(2).all(|w| w[0] == w[1]) {
                one.clone()
            } else {
                zero.clone()
            }
        })?;
        core.add_vertex(format!("D{v}"), diag)?;
    }
    core.set_boundary(spec.all_modes().into_iter().map(|m| m.id));
    let network = realize(&spec, &core)?;
    let (plan, _) = plan(&PlanRequest::new(network.network.clone())).map_err(|e| BuildError::BadParams(e.to_string()))?;
    let layout = IoLayout {
        inputs: spec
            .inputs
            .iter()
            .map(|s| s.iter().map(|m| Axis::new(m.clone(), vec![m.clone()])).collect())
            .collect(),
        output: Vec::new(),
    };
    let built = assemble(
        format!("pform<{},{n}>", pattern_label(p)),
        network,
        plan,
        layout,
        None,
        Some(OracleSpec::PForm { pattern: p.clone(), n }),
        field,
    )?;
    Ok((spec, built))
}

fn pattern_label(p: &PatternGraph) -> String {
    format!("{}v{}e{}u", p.vertex_count(), p.edge_count(), p.uniformity())
}

/// An unrooted tree whose leaves `0..leaves` are the pattern's hyperedges.
///
/// Internal nodes are numbered from `leaves` and have degree three.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BranchDecomposition {
    pub leaves: usize,
    pub edges: Vec<(usize, usize)>,
    pub width: usize,
    /// Whether the width is proven minimal.
    pub exact: bool,
}

fn vertex_masks(p: &PatternGraph) -> Result<Vec<u64>, BuildError> {
    if p.vertex_count() > 64 {
        return Err(BuildError::BadParams("at most 64 pattern vertices".into()));
    }
    Ok(p.edges().iter().map(|e| e.iter().fold(0u64, |m, &v| m | 1 << v)).collect())
}

/// Middle-set sizes of every tree edge, in the order of `edges`.
fn edge_mids(nodes: usize, edges: &[(usize, usize)], masks: &[u64]) -> Vec<usize> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let own = |x: usize| masks.get(x).copied().unwrap_or(0);
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; nodes];
    let mut parent_edge = vec![usize::MAX; nodes];
    parent[0] = 0;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &(y, e) in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                parent_edge[y] = e;
                order.push(y);
            }
        }
    }
    let mut down: Vec<u64> = (0..nodes).map(own).collect();
    for &x in order.iter().skip(1).rev() {
        down[parent[x]] |= down[x];
    }
    let mut up = vec![0u64; nodes];
    let mut mids = vec![0usize; edges.len()];
    for &x in order.iter().skip(1) {
        let p = parent[x];
        let mut u = up[p] | own(p);
        for &(y, _) in &adj[p] {
            if y != x && y != parent[p] || (p == 0 && y != x) {
                u |= down[y];
            }
        }
        up[x] = u;
        mids[parent_edge[x]] = (down[x] & u).count_ones() as usize;
    }
    mids
}

impl BranchDecomposition {
    pub fn node_count(&self) -> usize {
        if self.leaves <= 1 {
            self.leaves
        } else {
            2 * self.leaves - 2
        }
    }

    /// Checks the tree shape against a pattern and recomputes the width.
    pub fn validate(&self, p: &PatternGraph) -> Result<usize, BuildError> {
        let bad = |m: &str| Err(BuildError::InvalidDecomposition(m.into()));
        if self.leaves != p.edge_count() {
            return bad("leaf count differs from the hyperedge count");
        }
        let nodes = self.node_count();
        if self.edges.len() + 1 != nodes.max(1) {
            return bad("wrong number of tree edges");
        }
        let mut degree = vec![0usize; nodes];
        for &(a, b) in &self.edges {
            if a >= nodes || b >= nodes || a == b {
                return bad("edge endpoint out of range");
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        for (x, &d) in degree.iter().enumerate() {
            let want = if x < self.leaves { 1 } else { 3 };
            if nodes > 1 && d != want {
                return bad("leaves need degree 1 and internal nodes degree 3");
            }
        }
        let mut seen = vec![false; nodes];
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            for &(a, b) in &self.edges {
                if a == x {
                    stack.push(b);
                } else if b == x {
                    stack.push(a);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("tree is disconnected");
        }
        let masks = vertex_masks(p)?;
        Ok(edge_mids(nodes, &self.edges, &masks).into_iter().max().unwrap_or(0))
    }
}

/// Hyperedge counts up to which every tree is enumerated.
pub const EXACT_LEAF_BOUND: usize = 10;
const SEARCH_BUDGET: u64 = 1 << 24;

/// A minimum-width branch decomposition.
///
/// Exhaustive over all unrooted cubic trees for at most
/// [`EXACT_LEAF_BOUND`] hyperedges. Beyond that a budgeted split search
/// tries increasing widths; `exact` is set only when every smaller width
/// was refuted within budget.
pub fn branch_decomposition_search(p: &PatternGraph) -> Result<BranchDecomposition, BuildError> {
    let masks = vertex_masks(p)?;
    let m = masks.len();
    if m == 0 {
        return Err(BuildError::BadParams("pattern has no edges".into()));
    }
    let (edges, exact) = match m {
        1 => (Vec::new(), true),
        2 => (vec![(0, 1)], true),
        _ if m <= EXACT_LEAF_BOUND => (enumerate_best(&masks), true),
        _ => split_search(&masks)?,
    };
    let mut bd = BranchDecomposition {
        leaves: m,
        edges,
        width: 0,
        exact,
    };
    bd.width = bd.validate(p)?;
    Ok(bd)
}

fn enumerate_best(masks: &[u64]) -> Vec<(usize, usize)> {
    struct Search<'a> {
        masks: &'a [u64],
        m: usize,
        edges: Vec<(usize, usize)>,
        best: usize,
        best_edges: Vec<(usize, usize)>,
    }
    impl Search<'_> {
        fn width(&self, leaves: usize) -> usize {
            let nodes = self.m + leaves - 2;
            let mut local: Vec<u64> = self.masks[..leaves].to_vec();
            local.resize(nodes, 0);
            // Internal nodes sit at ids m.., so remap them down past the present leaves.
            let edges: Vec<(usize, usize)> = self
                .edges
                .iter()
                .map(|&(a, b)| (self.remap(a, leaves), self.remap(b, leaves)))
                .collect();
            edge_mids(2 * leaves - 2, &edges, &local).into_iter().max().unwrap_or(0)
        }
        fn remap(&self, x: usize, leaves: usize) -> usize {
            if x >= self.m {
                x - self.m + leaves
            } else {
                x
            }
        }
        fn go(&mut self, i: usize) {
            let w = self.width(i);
            if w >= self.best {
                return;
            }
            if i == self.m {
                self.best = w;
                self.best_edges = self.edges.clone();
                return;
            }
            let fresh = self.m + i - 2;
            for e in 0..self.edges.len() {
                let (u, v) = self.edges[e];
                self.edges[e] = (u, fresh);
                self.edges.push((fresh, v));
                self.edges.push((fresh, i));
                self.go(i + 1);
                self.edges.pop();
                self.edges.pop();
                self.edges[e] = (u, v);
            }
        }
    }
    let m = masks.len();
    let mut s = Search {
        masks,
        m,
        edges: vec![(0, m), (1, m), (2, m)],
        best: usize::MAX,
        best_edges: Vec::new(),
    };
    s.go(3);
    s.best_edges
}

struct Splitter<'a> {
    masks: &'a [u64],
    all: u64,
    width: usize,
    budget: u64,
    failed: HashSet<u64>,
    splits: HashMap<u64, (u64, u64)>,
    /// Every edge set whose middle set has at most `width` vertices, when small enough to list.
    family: Option<(Vec<u64>, HashSet<u64>)>,
}

const FAMILY_LIMIT: usize = 1 << 22;

/// Lists all edge sets with at most `w` middle vertices by labelling each
/// vertex inside, outside or middle.
fn small_mid_sets(masks: &[u64], w: usize) -> Option<Vec<u64>> {
    let used = masks.iter().fold(0u64, |a, &b| a | b);
    let verts: Vec<usize> = (0..64).filter(|v| used >> v & 1 == 1).collect();
    if verts.len() > 13 {
        return None;
    }
    let mut seen = HashSet::new();
    let mut labels = vec![0u8; verts.len()];
    loop {
        let mut middle = 0u64;
        let mut inside = 0u64;
        let mut outside = 0u64;
        for (&v, &l) in verts.iter().zip(&labels) {
            match l {
                0 => middle |= 1 << v,
                1 => inside |= 1 << v,
                _ => outside |= 1 << v,
            }
        }
        if middle.count_ones() as usize <= w {
            let (mut forced, mut free, mut clash) = (0u64, 0u64, false);
            for (e, &m) in masks.iter().enumerate() {
                let (i, o) = (m & inside != 0, m & outside != 0);
                clash |= i && o;
                if i {
                    forced |= 1 << e;
                } else if !o {
                    free |= 1 << e;
                }
            }
            if !clash {
                let mut sub = free;
                loop {
                    seen.insert(forced | sub);
                    if seen.len() > FAMILY_LIMIT {
                        return None;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
            }
        }
        let mut j = 0;
        while j < labels.len() && labels[j] == 2 {
            labels[j] = 0;
            j += 1;
        }
        if j == labels.len() {
            break;
        }
        labels[j] += 1;
    }
    let mut v: Vec<u64> = seen.into_iter().collect();
    v.sort_unstable();
    Some(v)
}

impl Splitter<'_> {
    fn vertices(&self, set: u64) -> u64 {
        let mut v = 0;
        let mut s = set;
        while s != 0 {
            v |= self.masks[s.trailing_zeros() as usize];
            s &= s - 1;
        }
        v
    }

    fn mid(&self, set: u64) -> usize {
        (self.vertices(set) & self.vertices(self.all & !set)).count_ones() as usize
    }

    /// `Some(true)` if `set` has a decomposition below its parent edge of the target width.
    fn decomposable(&mut self, set: u64) -> Option<bool> {
        if set.count_ones() == 1 || self.splits.contains_key(&set) {
            return Some(true);
        }
        if self.failed.contains(&set) {
            return Some(false);
        }
        let low = set & set.wrapping_neg();
        let rest = set & !low;
        let half = set.count_ones() as i64 / 2;
        let mut candidates = Vec::new();
        let use_list = self
            .family
            .as_ref()
            .is_some_and(|(list, _)| (list.len() as u64) < 1u64 << rest.count_ones());
        if use_list {
            let (list, members) = self.family.as_ref().unwrap();
            let cost = list.len() as u64;
            if self.budget < cost {
                self.budget = 0;
                return None;
            }
            self.budget -= cost;
            for &a in list {
                if a & !set != 0 || a & low == 0 || a == set {
                    continue;
                }
                let b = set & !a;
                if members.contains(&b) {
                    let balance = (a.count_ones() as i64 - half).abs();
                    candidates.push((balance, self.mid(a).max(self.mid(b)), a));
                }
            }
        } else {
            let mut sub = rest;
            loop {
                if self.budget == 0 {
                    return None;
                }
                self.budget -= 1;
                let a = sub | low;
                if a != set {
                    let b = set & !a;
                    let (ma, mb) = (self.mid(a), self.mid(b));
                    if ma <= self.width && mb <= self.width {
                        let balance = (a.count_ones() as i64 - half).abs();
                        candidates.push((balance, ma.max(mb), a));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        candidates.sort_unstable();
        for (_, _, a) in candidates {
            let b = set & !a;
            if self.decomposable(a)? && self.decomposable(b)? {
                self.splits.insert(set, (a, b));
                return Some(true);
            }
        }
        self.failed.insert(set);
        Some(false)
    }

    fn tree(&self, set: u64, next: &mut usize, edges: &mut Vec<(usize, usize)>) -> usize {
        if set.count_ones() == 1 {
            return set.trailing_zeros() as usize;
        }
        let (a, b) = self.splits[&set];
        let x = *next;
        *next += 1;
        let ta = self.tree(a, next, edges);
        let tb = self.tree(b, next, edges);
        edges.push((x, ta));
        edges.push((x, tb));
        x
    }
}

fn split_search(masks: &[u64]) -> Result<(Vec<(usize, usize)>, bool), BuildError> {
    let m = masks.len();
    if m > 63 {
        return Err(BuildError::BadParams("at most 63 hyperedges".into()));
    }
    let all = (1u64 << m) - 1;
    let mut s = Splitter {
        masks,
        all,
        width: 0,
        budget: 0,
        failed: HashSet::new(),
        splits: HashMap::new(),
        family: None,
    };
    let floor = (0..m).map(|e| s.mid(1 << e)).max().unwrap_or(0);
    let ceiling = masks.iter().fold(0u64, |a, &b| a | b).count_ones() as usize;
    let mut exact = true;
    for w in floor..=ceiling {
        s.width = w;
        s.budget = SEARCH_BUDGET;
        s.failed.clear();
        s.splits.clear();
        s.family = small_mid_sets(masks, w).map(|list| {
            let members = list.iter().copied().collect();
            (list, members)
        });
        match s.decomposable(all) {
            Some(true) => {
                let (a, b) = s.splits[&all];
                let mut next = m;
                let mut edges = Vec::new();
                let ta = s.tree(a, &mut next, &mut edges);
                let tb = s.tree(b, &mut next, &mut edges);
                edges.push((ta, tb));
                let relabel: BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).filter(|&x| x >= m).collect();
                // The root split consumed one id; close the gap.
                let map: HashMap<usize, usize> = relabel.iter().enumerate().map(|(i, &x)| (x, m + i)).collect();
                let edges = edges
                    .into_iter()
                    .map(|(a, b)| (*map.get(&a).unwrap_or(&a), *map.get(&b).unwrap_or(&b)))
                    .collect();
                return Ok((edges, exact));
            }
            Some(false) => {}
            None => exact = false,
        }
    }
    Err(BuildError::BadParams("no branch decomposition found".into()))
}

/// Result of evaluating a P-form along a branch decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Scalar,
    /// Largest order of any tensor produced during the evaluation.
    pub max_order: usize,
}

/// Evaluates a graph P-form bottom-up along `bd`; every produced tensor
/// lives on the middle set of a tree edge.
pub fn branchwidth_evaluation(
    p: &PatternGraph,
    bd: &BranchDecomposition,
    hosts: &[Tensor],
) -> Result<Evaluation, BuildError> {
    if p.uniformity() != 2 {
        return Err(BuildError::BadParams("branchwidth evaluation needs a graph pattern".into()));
    }
    reject_isolated(p)?;
    bd.validate(p)?;
    let m = p.edge_count();
    if hosts.len() != m {
        return Err(BuildError::BadParams(format!("expected {m} host tensors, got {}", hosts.len())));
    }
    let vertex = |v: usize| ModeId(format!("v{v}"));
    let mut leaf_tensors = Vec::with_capacity(m);
    let mut n = None;
    for (k, (e, h)) in p.edges().iter().zip(hosts).enumerate() {
        let mut want: Vec<ModeId> = e.iter().map(|&v| socket_mode(k, v)).collect();
        want.sort();
        let mut have = h.mode_ids();
        have.sort();
        if want != have {
            return Err(BuildError::BadParams(format!("host {} must have modes {want:?}", k + 1)));
        }
        for md in h.modes() {
            if *n.get_or_insert(md.length) != md.length {
                return Err(BuildError::BadParams("host modes must share one length".into()));
            }
        }
        let renamed = h.renamed(|id| {
            let v: usize = id.as_str().rsplit('_').next().unwrap().parse().unwrap();
            vertex(v)
        })?;
        leaf_tensors.push(renamed);
    }
    let n = n.unwrap_or(1);
    let masks = vertex_masks(p)?;
    let nodes = bd.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for &(a, b) in &bd.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    struct Walk<'a> {
        adj: &'a [Vec<usize>],
        leaves: &'a [Tensor],
        masks: &'a [u64],
        all_vertices: u64,
        n: usize,
        max_order: usize,
    }
    impl Walk<'_> {
        fn side(&self, x: usize, from: usize) -> u64 {
            let mut v = self.masks.get(x).copied().unwrap_or(0);
            for &y in &self.adj[x] {
                if y != from {
                    v |= self.side(y, x);
                }
            }
            v
        }
        fn modes(&self, mask: u64) -> Vec<Mode> {
            (0..64).filter(|v| mask >> v & 1 == 1).map(|v| Mode::new(format!("v{v}"), self.n)).collect()
        }
        /// Tensor of the side of `x` away from `from`, on the middle set `keep`.
        fn reduce(&mut self, parts: &[&Tensor], keep: u64) -> Result<Tensor, BuildError> {
            let mut present = 0u64;
            for t in parts {
                for md in t.modes() {
                    present |= 1 << md.id.as_str()[1..].parse::<u32>().unwrap();
                }
            }
            let t = contract_tensors(parts, &self.modes(present), &self.modes(present & keep))?;
            self.max_order = self.max_order.max(t.order());
            Ok(t)
        }
        fn eval(&mut self, x: usize, from: usize, outside: u64) -> Result<Tensor, BuildError> {
            let inside = self.side(x, from);
            let keep = inside & outside;
            if x < self.leaves.len() {
                let leaf = &self.leaves[x];
                return self.reduce(&[leaf], keep);
            }
            let kids: Vec<usize> = self.adj[x].iter().copied().filter(|&y| y != from).collect();
            let (a, b) = (kids[0], kids[1]);
            let (sa, sb) = (self.side(a, x), self.side(b, x));
            let ta = self.eval(a, x, outside | sb)?;
            let tb = self.eval(b, x, outside | sa)?;
            self.reduce(&[&ta, &tb], keep)
        }
    }
    let mut walk = Walk {
        adj: &adj,
        leaves: &leaf_tensors,
        masks: &masks,
        all_vertices: masks.iter().fold(0, |a, &b| a | b),
        n,
        max_order: 0,
    };
    let value = if bd.edges.is_empty() {
        walk.reduce(&[&leaf_tensors[0]], 0)?
    } else {
        let (x, y) = bd.edges[0];
        let (sx, sy) = (walk.side(x, y), walk.side(y, x));
        let tx = walk.eval(x, y, sy)?;
        let ty = walk.eval(y, x, sx)?;
        walk.reduce(&[&tx, &ty], 0)?
    };
    debug_assert!(walk.all_vertices != 0);
    Ok(Evaluation {
        value: value.get(&[]),
        max_order: walk.max_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::evaluate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hosts(p: &PatternGraph, n: usize, field: FieldKind, seed: u64) -> Vec<Tensor> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sockets, _) = crate::oracle::socket_modes(&OracleSpec::PForm { pattern: p.clone(), n });
        sockets
            .into_iter()
            .map(|m| Tensor::from_fn(m, field, |_| field.from_i64(rng.gen_range(-3..=3))).unwrap())
            .collect()
    }

    #[test]
    fn complete_graph_widths() {
        for (v, w) in [(3, 2), (4, 3), (5, 4)] {
            let bd = branch_decomposition_search(&PatternGraph::complete(v, 2).unwrap()).unwrap();
            assert_eq!(bd.width, w, "K{v}");
            assert!(bd.exact);
        }
    }

    #[test]
    fn larger_cliques_use_the_split_search() {
        for (v, w) in [(6, 4), (7, 5)] {
            let p = PatternGraph::complete(v, 2).unwrap();
            let bd = branch_decomposition_search(&p).unwrap();
            assert_eq!(bd.width, w, "K{v}");
            assert!(bd.exact, "K{v}");
            assert_eq!(bd.validate(&p).unwrap(), w);
        }
    }

    #[test]
    fn small_shapes() {
        let path = PatternGraph::path(5).unwrap();
        assert_eq!(branch_decomposition_search(&path).unwrap().width, 2);
        let star = PatternGraph::graph(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(branch_decomposition_search(&star).unwrap().width, 1);
        let cycle = PatternGraph::cycle(6).unwrap();
        assert_eq!(branch_decomposition_search(&cycle).unwrap().width, 2);
        let k2 = PatternGraph::complete(2, 2).unwrap();
        let bd = branch_decomposition_search(&k2).unwrap();
        assert_eq!((bd.width, bd.edges.len()), (0, 0));
        let hyper = PatternGraph::complete(4, 3).unwrap();
        assert_eq!(branch_decomposition_search(&hyper).unwrap().width, 4);
    }

    #[test]
    fn evaluation_matches_oracle() {
        let field = FieldKind::Rational;
        for p in [
            PatternGraph::complete(3, 2).unwrap(),
            PatternGraph::complete(4, 2).unwrap(),
            PatternGraph::path(4).unwrap(),
            PatternGraph::cycle(5).unwrap(),
            PatternGraph::complete(2, 2).unwrap(),
        ] {
            let bd = branch_decomposition_search(&p).unwrap();
            let h = hosts(&p, 3, field, p.edge_count() as u64);
            let ev = branchwidth_evaluation(&p, &bd, &h).unwrap();
            let want = evaluate(&OracleSpec::PForm { pattern: p.clone(), n: 3 }, &h).unwrap();
            assert_eq!(ev.value, want.get(&[]));
            assert!(ev.max_order <= bd.width);
        }
    }

    #[test]
    fn invalid_decompositions() {
        let p = PatternGraph::complete(3, 2).unwrap();
        let mut bd = branch_decomposition_search(&p).unwrap();
        bd.edges.pop();
        assert!(matches!(bd.validate(&p), Err(BuildError::InvalidDecomposition(_))));
        let h = hosts(&p, 2, FieldKind::Rational, 0);
        assert!(branchwidth_evaluation(&p, &bd, &h).is_err());
    }

    #[test]
    fn pform_network_matches_oracle() {
        let field = FieldKind::Prime(101);
        for p in [PatternGraph::complete(3, 2).unwrap(), PatternGraph::complete(4, 3).unwrap()] {
            let (_, b) = pform_network(&p, 2, field).unwrap();
            let h = hosts(&p, 2, field, 7);
            let (got, _) = b.evaluate(&h).unwrap();
            assert_eq!(Some(got), b.oracle_value(&h).unwrap());
        }
    }

    #[test]
    fn isolated_vertices_rejected() {
        let p = PatternGraph::graph(3, &[(0, 1)]).unwrap();
        assert!(pform_network(&p, 2, FieldKind::Rational).is_err());
    }
}
