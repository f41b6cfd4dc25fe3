//! Pattern (hyper)graphs for P-linear forms and branch decompositions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("hyperedge {0:?} does not have exactly {1} distinct vertices")]
    BadEdge(Vec<usize>, usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("duplicate hyperedge {0:?}")]
    DuplicateEdge(Vec<usize>),
    #[error("need v >= k >= 2")]
    BadUniformity,
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

/// A k-uniform hypergraph on vertices `0..v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGraph {
    vertices: usize,
    uniformity: usize,
    edges: Vec<Vec<usize>>,
}

impl PatternGraph {
    /// Hyperedges are stored sorted, in the order given.
    pub fn new(vertices: usize, uniformity: usize, edges: Vec<Vec<usize>>) -> Result<Self, PatternError> {
        if uniformity < 2 || vertices < uniformity {
            return Err(PatternError::BadUniformity);
        }
        let mut seen = BTreeSet::new();
        let mut sorted = Vec::with_capacity(edges.len());
        for e in edges {
            let set: BTreeSet<usize> = e.iter().copied().collect();
            if set.len() != uniformity || e.len() != uniformity {
                return Err(PatternError::BadEdge(e, uniformity));
            }
            if let Some(&v) = set.iter().find(|&&v| v >= vertices) {
                return Err(PatternError::BadVertex(v));
            }
            let s: Vec<usize> = set.into_iter().collect();
            if !seen.insert(s.clone()) {
                return Err(PatternError::DuplicateEdge(s));
            }
            sorted.push(s);
        }
        Ok(PatternGraph {
            vertices,
            uniformity,
            edges: sorted,
        })
    }

    /// A graph (k = 2) from an edge list.
    pub fn graph(vertices: usize, edges: &[(usize, usize)]) -> Result<Self, PatternError> {
        PatternGraph::new(vertices, 2, edges.iter().map(|&(a, b)| vec![a, b]).collect())
    }

    /// All k-subsets of `0..v`, in lexicographic order.
    pub fn complete(v: usize, k: usize) -> Result<Self, PatternError> {
        let mut edges = Vec::new();
        let mut comb: Vec<usize> = (0..k).collect();
        if k <= v {
            loop {
                edges.push(comb.clone());
                let Some(i) = (0..k).rev().find(|&i| comb[i] < v - k + i) else {
                    break;
                };
                comb[i] += 1;
                for j in i + 1..k {
                    comb[j] = comb[j - 1] + 1;
                }
            }
        }
        PatternGraph::new(v, k, edges)
    }

    pub fn path(v: usize) -> Result<Self, PatternError> {
        let edges: Vec<(usize, usize)> = (1..v).map(|i| (i - 1, i)).collect();
        PatternGraph::graph(v, &edges)
    }

    pub fn cycle(v: usize) -> Result<Self, PatternError> {
        let edges: Vec<(usize, usize)> = (0..v).map(|i| (i, (i + 1) % v)).collect();
        PatternGraph::graph(v, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn uniformity(&self) -> usize {
        self.uniformity
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices lying in no hyperedge.
    pub fn isolated(&self) -> Vec<usize> {
        (0..self.vertices)
            .filter(|v| !self.edges.iter().any(|e| e.contains(v)))
            .collect()
    }
}

/// Edge-list text: one hyperedge per line as whitespace-separated vertex
/// labels; `#` starts a comment. An optional `vertices N` line fixes the
/// vertex count, which otherwise is one more than the largest label.
impl FromStr for PatternGraph {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, PatternError> {
        let mut edges = Vec::new();
        let mut declared = None;
        for (ln, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace().peekable();
            if words.peek() == Some(&"vertices") {
                words.next();
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| PatternError::Parse(ln + 1, "expected a vertex count".into()))?;
                declared = Some(n);
                continue;
            }
            let e: Result<Vec<usize>, _> = words.map(str::parse).collect();
            edges.push(e.map_err(|_| PatternError::Parse(ln + 1, format!("bad label in {line:?}")))?);
        }
        let k = edges.first().map_or(2, Vec::len);
        let v = declared.unwrap_or_else(|| edges.iter().flatten().max().map_or(0, |m| m + 1));
        PatternGraph::new(v, k, edges)
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.vertices)?;
        for e in &self.edges {
            let words: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", words.join(" "))?;
        }
        Ok(())
    }
}
