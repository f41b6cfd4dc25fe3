//! Socket trees, flattening ranks and socket-width certificates.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{branch_decomposition_search, BuildError};
use crate::field::FieldKind;
use crate::network::{MapSpec, NetworkError};
use crate::pattern::PatternGraph;
use crate::tensor::{matrix_rank, Mode, ModeId, Tensor, TensorError};

/// Largest coarse tensor that certificates will materialize.
pub const COARSE_LIMIT: u128 = 1 << 24;
/// Largest leaf count for exhaustive tree enumeration.
pub const MAX_LEAVES: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LowerBoundError {
    #[error("{0} sockets exceed the enumeration bound of {MAX_LEAVES}")]
    TooManyLeaves(usize),
    #[error("coarse tensor has {0} entries, above the bound")]
    TooLarge(u128),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Turns the output socket into one more input socket.
pub fn formify(spec: &MapSpec) -> MapSpec {
    if spec.is_form() {
        return spec.clone();
    }
    let mut inputs = spec.inputs.clone();
    inputs.push(spec.output.clone());
    MapSpec {
        name: format!("form({})", spec.name),
        inputs,
        output: Vec::new(),
        base: spec.base.clone(),
    }
}

/// Names of the coarse modes: `E1..El`, then `E'` for the output.
pub fn socket_names(spec: &MapSpec) -> Vec<String> {
    let mut names: Vec<String> = (1..=spec.inputs.len()).map(|k| format!("E{k}")).collect();
    if !spec.is_form() {
        names.push("E'".into());
    }
    names
}

fn sockets(spec: &MapSpec) -> Vec<&Vec<Mode>> {
    let mut s: Vec<&Vec<Mode>> = spec.inputs.iter().collect();
    if !spec.is_form() {
        s.push(&spec.output);
    }
    s
}

/// `T(A)`: one mode per socket, each socket's modes flattened in listed order.
pub fn coarse_tensor(spec: &MapSpec) -> Result<Tensor, LowerBoundError> {
    let volume = spec.base_volume();
    if volume > COARSE_LIMIT {
        return Err(LowerBoundError::TooLarge(volume));
    }
    let base = spec.base_tensor()?;
    let order: Vec<ModeId> = spec.all_modes().into_iter().map(|m| m.id).collect();
    let flat = base.permuted(&order)?;
    let modes: Vec<Mode> = socket_names(spec)
        .into_iter()
        .zip(sockets(spec))
        .map(|(name, s)| Mode::new(name, s.iter().map(|m| m.length).product()))
        .collect();
    Ok(Tensor::from_scalars(modes, flat.field(), flat.scalars())?)
}

/// An unrooted tree with leaves `0..leaves` (the sockets) and internal
/// nodes of degree three numbered from `leaves`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocketTree {
    pub leaves: usize,
    pub edges: Vec<(usize, usize)>,
    /// Flattening rank per edge, once computed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edge_widths: Vec<usize>,
}

impl SocketTree {
    fn nodes(&self) -> usize {
        if self.leaves <= 2 {
            self.leaves
        } else {
            2 * self.leaves - 2
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Leaves on the `b` side of edge `(a, b)`, as a bit mask.
    pub fn side(&self, edge: usize) -> u64 {
        let (a, b) = self.edges[edge];
        let adj = self.adjacency();
        let mut mask = 0u64;
        let mut stack = vec![(b, a)];
        while let Some((x, from)) = stack.pop() {
            if x < self.leaves {
                mask |= 1 << x;
            }
            for &y in &adj[x] {
                if y != from {
                    stack.push((y, x));
                }
            }
        }
        mask
    }

    /// The edge's bipartition, normalized to the side without leaf 0.
    pub fn bipartition(&self, edge: usize) -> u64 {
        let all = (1u64 << self.leaves) - 1;
        let s = self.side(edge);
        if s & 1 == 1 {
            all & !s
        } else {
            s
        }
    }

    /// Renders the tree rooted at leaf 0's neighbour, with socket names.
    pub fn render(&self, names: &[String]) -> String {
        fn go(t: &SocketTree, adj: &[Vec<usize>], x: usize, from: usize, names: &[String], out: &mut String) {
            if x < t.leaves {
                out.push_str(&names[x]);
                return;
            }
            out.push('(');
            let mut first = true;
            for &y in &adj[x] {
                if y == from {
                    continue;
                }
                if !first {
                    out.push(' ');
                }
                first = false;
                go(t, adj, y, x, names, out);
            }
            out.push(')');
        }
        let adj = self.adjacency();
        let mut out = String::new();
        match self.leaves {
            0 => {}
            1 => out.push_str(&names[0]),
            2 => out.push_str(&format!("({} {})", names[0], names[1])),
            _ => {
                let root = adj[0][0];
                out.push('(');
                out.push_str(&names[0]);
                for &y in &adj[root] {
                    if y != 0 {
                        out.push(' ');
                        go(self, &adj, y, root, names, &mut out);
                    }
                }
                out.push(')');
            }
        }
        out
    }
}

/// Every unrooted leaf-labelled cubic tree on `leaves` leaves, each once.
///
/// Leaf `i` is inserted by subdividing one edge of a tree on leaves
/// `0..i`, so the count is `(2 leaves - 5)!!`.
pub fn enumerate_socket_trees(leaves: usize) -> Result<Vec<SocketTree>, LowerBoundError> {
    if leaves > MAX_LEAVES {
        return Err(LowerBoundError::TooManyLeaves(leaves));
    }
    let tree = |edges: Vec<(usize, usize)>| SocketTree {
        leaves,
        edges,
        edge_widths: Vec::new(),
    };
    match leaves {
        0 | 1 => return Ok(vec![tree(Vec::new())]),
        2 => return Ok(vec![tree(vec![(0, 1)])]),
        _ => {}
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; leaves];
    loop {
        let mut edges = vec![(0, leaves), (1, leaves), (2, leaves)];
        for i in 3..leaves {
            let fresh = leaves + i - 2;
            let (u, v) = edges[choice[i]];
            edges[choice[i]] = (u, fresh);
            edges.push((fresh, v));
            edges.push((fresh, i));
        }
        out.push(tree(edges));
        // Mixed-radix increment: position i ranges over the 2i - 3 edges present.
        let mut i = leaves - 1;
        loop {
            if i < 3 {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < 2 * i - 3 {
                break;
            }
            choice[i] = 0;
            i -= 1;
        }
    }
}

fn bipartition_rank(coarse: &Tensor, names: &[String], side: u64) -> Result<usize, LowerBoundError> {
    let rows: Vec<ModeId> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| side >> i & 1 == 1)
        .map(|(_, n)| ModeId::from(n))
        .collect();
    Ok(matrix_rank(&coarse.flatten(&rows)?)?)
}

/// Flattening ranks of every edge of `t`.
pub fn edge_ranks(coarse: &Tensor, names: &[String], t: &SocketTree) -> Result<Vec<usize>, LowerBoundError> {
    (0..t.edges.len())
        .map(|e| bipartition_rank(coarse, names, t.bipartition(e)))
        .collect()
}

/// Max over edges of the flattening rank of `T(A)`.
pub fn tree_width(spec: &MapSpec, t: &SocketTree) -> Result<usize, LowerBoundError> {
    let coarse = coarse_tensor(spec)?;
    let names = socket_names(spec);
    if t.leaves != names.len() {
        return Err(NetworkError::SocketMismatch("tree leaves differ from the sockets".into()).into());
    }
    Ok(edge_ranks(&coarse, &names, t)?.into_iter().max().unwrap_or(1))
}

/// An exact socket-width value with the tree achieving it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthCertificate {
    pub version: u32,
    pub map_id: String,
    pub field: FieldKind,
    pub socket_width: usize,
    pub sockets: Vec<String>,
    pub witness_tree: SocketTree,
    /// The witness in parenthesized leaf notation.
    pub witness: String,
    pub trees_examined: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_tree_log: Option<Vec<(String, usize)>>,
}

impl fmt::Display for WidthCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map {} over {}", self.map_id, self.field)?;
        writeln!(f, "socket-width {}", self.socket_width)?;
        writeln!(f, "witness {} (of {} trees)", self.witness, self.trees_examined)?;
        write!(f, "edge ranks {:?}", self.witness_tree.edge_widths)
    }
}

/// `w(A)`: the minimum over socket trees of the maximum flattening rank.
///
/// All bipartition ranks are computed in parallel up front; trees are then
/// scanned in enumeration order, so the witness is the first minimal tree.
pub fn socket_width(spec: &MapSpec, log: bool) -> Result<WidthCertificate, LowerBoundError> {
    let names = socket_names(spec);
    let trees = enumerate_socket_trees(names.len())?;
    let coarse = coarse_tensor(spec)?;
    let leaves = names.len();
    let sides: Vec<u64> = if leaves >= 2 {
        (1..(1u64 << leaves) - 1).filter(|s| s & 1 == 0).collect()
    } else {
        Vec::new()
    };
    let ranks: BTreeMap<u64, usize> = sides
        .par_iter()
        .map(|&s| bipartition_rank(&coarse, &names, s).map(|r| (s, r)))
        .collect::<Result<_, _>>()?;
    let mut best: Option<(usize, SocketTree)> = None;
    let mut per_tree = Vec::new();
    for t in &trees {
        let widths: Vec<usize> = (0..t.edges.len()).map(|e| ranks[&t.bipartition(e)]).collect();
        let w = widths.iter().copied().max().unwrap_or(1);
        if log {
            per_tree.push((t.render(&names), w));
        }
        if best.as_ref().map_or(true, |(b, _)| w < *b) {
            let mut t = t.clone();
            t.edge_widths = widths;
            best = Some((w, t));
        }
    }
    let (width, witness_tree) = best.expect("at least one tree");
    Ok(WidthCertificate {
        version: 1,
        map_id: spec.name.clone(),
        field: spec.field(),
        socket_width: width,
        witness: witness_tree.render(&names),
        sockets: names,
        witness_tree,
        trees_examined: trees.len(),
        per_tree_log: log.then_some(per_tree),
    })
}

/// An edge whose smaller side holds between `⌈L/3⌉` and fewer than `2L/3` leaves.
pub fn balanced_edge(t: &SocketTree) -> Option<usize> {
    let all = t.leaves as u32;
    (0..t.edges.len())
        .map(|e| {
            let s = t.side(e).count_ones();
            (s.min(all - s), e)
        })
        .max_by_key(|&(s, e)| (s, std::cmp::Reverse(e)))
        .map(|(_, e)| e)
}

/// Families with a closed-form socket-width lower bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Permanent(usize),
    Determinant(usize),
    PForm(PatternGraph, usize),
    Kruskal { l: usize, n: usize, r: usize },
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The lower-bound formula for a family: `C(n, ⌈n/3⌉)`, `n^bw(P)`, or
/// `max(n^l, n^⌈l/2⌉ r)`.
pub fn closed_form_bound(family: &Family) -> Result<u64, LowerBoundError> {
    Ok(match family {
        Family::Permanent(n) | Family::Determinant(n) => binomial(*n as u64, (*n as u64).div_ceil(3)),
        Family::PForm(p, n) => {
            let bw = branch_decomposition_search(p)?.width;
            (*n as u64).saturating_pow(bw as u32)
        }
        Family::Kruskal { l, n, r } => {
            let n = *n as u64;
            n.saturating_pow(*l as u32)
                .max(n.saturating_pow(l.div_ceil(2) as u32).saturating_mul(*r as u64))
        }
    })
}
