//! Hypergraph tensor networks.
//!
//! A [`Network`] is a set of vertices, each carrying a tensor (or an unset
//! placeholder), joined by modes that act as hyperedges. Modes on the
//! boundary stay free; every other mode is summed over. [`Network::value`]
//! is the literal reference semantics, while [`Network::contract`] replaces a
//! vertex subset by the value of the subnetwork it induces using a strided
//! kernel.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::field::{dispatch, FieldError, FieldKind, Scalar};
use crate::oracle::{self, OracleSpec};
use crate::tensor::{advance, Dense, Entries, Mode, ModeId, Tensor, TensorError, VertexId};

/// Largest number of index positions [`Network::value`] will sum over.
pub const VALUE_POSITION_LIMIT: u128 = 1 << 24;

/// Largest base-tensor volume for which [`realize`] checks the core's value.
pub const REALIZE_CHECK_LIMIT: usize = 1 << 20;

/// One violated network invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A mode incident to no vertex.
    Degenerate(ModeId),
    /// A vertex whose tensor does not match its incident modes.
    ShapeMismatch(VertexId),
    /// A vertex listing a mode the network does not declare.
    UnknownMode(VertexId, ModeId),
    /// A vertex listing the same mode twice.
    RepeatedMode(VertexId, ModeId),
    /// A boundary entry that is not a declared mode.
    UnknownBoundary(ModeId),
    /// A mode declared with length zero.
    ZeroLength(ModeId),
    /// Two bound vertices over different fields.
    FieldMismatch(VertexId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("empty vertex subset")]
    EmptySubset,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("vertex {0} has no tensor bound")]
    Unbound(VertexId),
    #[error("invalid network: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("more than 2^24 positions to sum")]
    TooLarge,
    #[error("socket mismatch: {0}")]
    SocketMismatch(String),
    #[error("the core network does not evaluate to the base tensor")]
    ValueMismatch,
    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("input {0} does not match its socket's modes")]
    ShapeMismatch(usize),
    #[error("mode {0}: conflicting lengths")]
    ModeLength(ModeId),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{0}")]
    Other(String),
}

/// A vertex: its incident modes and, once bound, its tensor.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub modes: Vec<ModeId>,
    pub tensor: Option<Arc<Tensor>>,
}

/// A tensor network.
#[derive(Clone, Debug, Default)]
pub struct Network {
    modes: BTreeMap<ModeId, usize>,
    vertices: BTreeMap<VertexId, Vertex>,
    boundary: BTreeSet<ModeId>,
}

/// The vertex id given to the result of contracting `ids`.
///
/// Ids are treated as `+`-joined sets of atoms; the result is the sorted
/// union of atoms, so the same set of original vertices always gets the
/// same name.
pub fn merged_id<'a>(ids: impl IntoIterator<Item = &'a VertexId>) -> VertexId {
    let atoms: BTreeSet<&str> = ids.into_iter().flat_map(|v| v.as_str().split('+')).collect();
    VertexId(atoms.into_iter().collect::<Vec<_>>().join("+"))
}

impl Network {
    pub fn new() -> Self {
        Network::default()
    }

    /// Assembles a network without checking it; see [`Network::validate`].
    pub fn from_parts(
        modes: BTreeMap<ModeId, usize>,
        vertices: BTreeMap<VertexId, Vertex>,
        boundary: BTreeSet<ModeId>,
    ) -> Self {
        Network {
            modes,
            vertices,
            boundary,
        }
    }

    /// Declares a mode, or checks the length of an existing one.
    pub fn add_mode(&mut self, id: impl Into<ModeId>, length: usize) -> Result<(), NetworkError> {
        let id = id.into();
        match self.modes.get(&id) {
            Some(&l) if l != length => Err(NetworkError::ModeLength(id)),
            _ => {
                self.modes.insert(id, length);
                Ok(())
            }
        }
    }

    /// Adds a vertex carrying `tensor`; its modes are declared as needed.
    pub fn add_vertex(&mut self, id: impl Into<VertexId>, tensor: Tensor) -> Result<(), NetworkError> {
        let id = id.into();
        if self.vertices.contains_key(&id) {
            return Err(NetworkError::DuplicateVertex(id));
        }
        for m in tensor.modes() {
            self.add_mode(m.id.clone(), m.length)?;
        }
        self.vertices.insert(
            id,
            Vertex {
                modes: tensor.mode_ids(),
                tensor: Some(Arc::new(tensor)),
            },
        );
        Ok(())
    }

    /// Adds a vertex without a tensor over already-declared modes.
    pub fn add_placeholder(&mut self, id: impl Into<VertexId>, modes: &[ModeId]) -> Result<(), NetworkError> {
        let id = id.into();
        if self.vertices.contains_key(&id) {
            return Err(NetworkError::DuplicateVertex(id));
        }
        for m in modes {
            if !self.modes.contains_key(m) {
                return Err(NetworkError::Invalid(vec![Violation::UnknownMode(id, m.clone())]));
            }
        }
        self.vertices.insert(
            id,
            Vertex {
                modes: modes.to_vec(),
                tensor: None,
            },
        );
        Ok(())
    }

    pub fn add_boundary(&mut self, id: impl Into<ModeId>) {
        self.boundary.insert(id.into());
    }

    pub fn set_boundary<I: Into<ModeId>>(&mut self, ids: impl IntoIterator<Item = I>) {
        self.boundary = ids.into_iter().map(Into::into).collect();
    }

    /// Binds (or replaces) the tensor of an existing vertex.
    pub fn bind_vertex(&mut self, id: &VertexId, tensor: Tensor) -> Result<(), NetworkError> {
        let lengths = &self.modes;
        let v = self
            .vertices
            .get_mut(id)
            .ok_or_else(|| NetworkError::UnknownVertex(id.clone()))?;
        let want: BTreeSet<&ModeId> = v.modes.iter().collect();
        let have: BTreeSet<&ModeId> = tensor.modes().iter().map(|m| &m.id).collect();
        let lengths_ok = tensor.modes().iter().all(|m| lengths.get(&m.id) == Some(&m.length));
        if want != have || !lengths_ok {
            return Err(NetworkError::Invalid(vec![Violation::ShapeMismatch(id.clone())]));
        }
        v.tensor = Some(Arc::new(tensor));
        Ok(())
    }

    pub fn modes(&self) -> &BTreeMap<ModeId, usize> {
        &self.modes
    }

    pub fn mode_length(&self, id: &ModeId) -> Option<usize> {
        self.modes.get(id).copied()
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, Vertex> {
        &self.vertices
    }

    pub fn vertex(&self, id: &VertexId) -> Option<&Vertex> {
        self.vertices.get(id)
    }

    pub fn vertex_ids(&self) -> Vec<VertexId> {
        self.vertices.keys().cloned().collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn boundary(&self) -> &BTreeSet<ModeId> {
        &self.boundary
    }

    /// `I(e)`: the vertices incident to mode `e`.
    pub fn incident_vertices(&self, e: &ModeId) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|(_, v)| v.modes.contains(e))
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Mode id -> incident vertex ids, for every declared mode.
    pub fn incidence(&self) -> BTreeMap<ModeId, BTreeSet<VertexId>> {
        let mut inc: BTreeMap<ModeId, BTreeSet<VertexId>> =
            self.modes.keys().map(|m| (m.clone(), BTreeSet::new())).collect();
        for (id, v) in &self.vertices {
            for m in &v.modes {
                inc.entry(m.clone()).or_default().insert(id.clone());
            }
        }
        inc
    }

    /// Non-boundary modes incident to `v` and to no other vertex.
    pub fn loops_at(&self, v: &VertexId) -> Vec<ModeId> {
        let Some(vx) = self.vertices.get(v) else {
            return Vec::new();
        };
        vx.modes
            .iter()
            .filter(|m| !self.boundary.contains(*m))
            .filter(|m| self.vertices.iter().all(|(id, o)| id == v || !o.modes.contains(m)))
            .cloned()
            .collect()
    }

    pub fn has_loop(&self, v: &VertexId) -> bool {
        !self.loops_at(v).is_empty()
    }

    /// Whether two vertices share a mode.
    pub fn adjacent(&self, u: &VertexId, v: &VertexId) -> bool {
        match (self.vertices.get(u), self.vertices.get(v)) {
            (Some(a), Some(b)) => a.modes.iter().any(|m| b.modes.contains(m)),
            _ => false,
        }
    }

    /// True when every vertex carries a tensor.
    pub fn is_bound(&self) -> bool {
        self.vertices.values().all(|v| v.tensor.is_some())
    }

    /// The same structure with every tensor removed.
    pub fn skeleton(&self) -> Network {
        let mut s = self.clone();
        for v in s.vertices.values_mut() {
            v.tensor = None;
        }
        s
    }

    /// The field shared by all bound vertices, if any are bound.
    pub fn field(&self) -> Option<FieldKind> {
        self.vertices.values().find_map(|v| v.tensor.as_ref().map(|t| t.field()))
    }

    /// Checks every network invariant and lists the violations.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (id, &len) in &self.modes {
            if len == 0 {
                out.push(Violation::ZeroLength(id.clone()));
            }
        }
        let mut touched = BTreeSet::new();
        let field = self.field();
        for (vid, v) in &self.vertices {
            let mut seen = BTreeSet::new();
            for m in &v.modes {
                if !self.modes.contains_key(m) {
                    out.push(Violation::UnknownMode(vid.clone(), m.clone()));
                }
                if !seen.insert(m) {
                    out.push(Violation::RepeatedMode(vid.clone(), m.clone()));
                }
                touched.insert(m.clone());
            }
            if let Some(t) = &v.tensor {
                let have: BTreeSet<&ModeId> = t.modes().iter().map(|m| &m.id).collect();
                let lengths_ok = t.modes().iter().all(|m| self.modes.get(&m.id) == Some(&m.length));
                if have != seen || !lengths_ok || t.order() != v.modes.len() {
                    out.push(Violation::ShapeMismatch(vid.clone()));
                }
                if Some(t.field()) != field {
                    out.push(Violation::FieldMismatch(vid.clone()));
                }
            }
        }
        for id in self.modes.keys() {
            if !touched.contains(id) {
                out.push(Violation::Degenerate(id.clone()));
            }
        }
        for b in &self.boundary {
            if !self.modes.contains_key(b) {
                out.push(Violation::UnknownBoundary(b.clone()));
            }
        }
        out
    }

    fn check(&self) -> Result<(), NetworkError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(NetworkError::Invalid(v))
        }
    }

    fn subset(&self, w: &[VertexId]) -> Result<BTreeSet<VertexId>, NetworkError> {
        if w.is_empty() {
            return Err(NetworkError::EmptySubset);
        }
        let set: BTreeSet<VertexId> = w.iter().cloned().collect();
        for v in &set {
            if !self.vertices.contains_key(v) {
                return Err(NetworkError::UnknownVertex(v.clone()));
            }
        }
        Ok(set)
    }

    /// `E(D[W])`: modes incident to some vertex of `w`.
    fn subset_modes(&self, w: &BTreeSet<VertexId>) -> BTreeSet<ModeId> {
        w.iter().flat_map(|v| self.vertices[v].modes.iter().cloned()).collect()
    }

    /// `B(D[W])`: boundary modes of `D` touching `w`, plus modes leaving `w`.
    fn subset_boundary(&self, w: &BTreeSet<VertexId>, edges: &BTreeSet<ModeId>) -> BTreeSet<ModeId> {
        edges
            .iter()
            .filter(|e| {
                self.boundary.contains(*e)
                    || self
                        .vertices
                        .iter()
                        .any(|(id, v)| !w.contains(id) && v.modes.contains(e))
            })
            .cloned()
            .collect()
    }

    /// The induced subnetwork `D[W]`.
    pub fn induced(&self, w: &[VertexId]) -> Result<Network, NetworkError> {
        let w = self.subset(w)?;
        let edges = self.subset_modes(&w);
        let boundary = self.subset_boundary(&w, &edges);
        Ok(Network {
            modes: edges.iter().map(|e| (e.clone(), self.modes[e])).collect(),
            vertices: w.iter().map(|v| (v.clone(), self.vertices[v].clone())).collect(),
            boundary,
        })
    }

    /// Cost of contracting `w`: the product of the lengths of all modes of `D[W]`.
    pub fn contraction_cost(&self, w: &[VertexId]) -> Result<u64, NetworkError> {
        let w = self.subset(w)?;
        Ok(self
            .subset_modes(&w)
            .iter()
            .fold(1u64, |acc, e| acc.saturating_mul(self.modes[e] as u64)))
    }

    /// `D/W`: replaces `w` by a single vertex carrying `T(D[W])`.
    ///
    /// When any absorbed vertex is unbound the new vertex is unbound too, so
    /// structural replays work on placeholder networks.
    pub fn contract(&self, w: &[VertexId]) -> Result<Network, NetworkError> {
        let set = self.subset(w)?;
        let edges = self.subset_modes(&set);
        let out = self.subset_boundary(&set, &edges);
        let new_id = merged_id(set.iter());
        if !set.contains(&new_id) && self.vertices.contains_key(&new_id) {
            return Err(NetworkError::DuplicateVertex(new_id));
        }
        let tensor = if set.iter().all(|v| self.vertices[v].tensor.is_some()) {
            let tensors: Vec<&Tensor> = set
                .iter()
                .map(|v| self.vertices[v].tensor.as_deref().unwrap())
                .collect();
            let all: Vec<Mode> = edges.iter().map(|e| Mode::new(e.clone(), self.modes[e])).collect();
            let out_modes: Vec<Mode> = out.iter().map(|e| Mode::new(e.clone(), self.modes[e])).collect();
            Some(Arc::new(contract_tensors(&tensors, &all, &out_modes)?))
        } else {
            None
        };
        let mut vertices = self.vertices.clone();
        for v in &set {
            vertices.remove(v);
        }
        vertices.insert(
            new_id,
            Vertex {
                modes: out.iter().cloned().collect(),
                tensor,
            },
        );
        let modes = self
            .modes
            .iter()
            .filter(|(e, _)| !edges.contains(*e) || out.contains(*e))
            .map(|(e, &l)| (e.clone(), l))
            .collect();
        Ok(Network {
            modes,
            vertices,
            boundary: self.boundary.clone(),
        })
    }

    /// `T(D)` by direct summation over every index position.
    ///
    /// This is the reference semantics: it shares no code with the
    /// contraction kernel and refuses more than 2^24 positions.
    pub fn value(&self) -> Result<Tensor, NetworkError> {
        self.check()?;
        for (id, v) in &self.vertices {
            if v.tensor.is_none() {
                return Err(NetworkError::Unbound(id.clone()));
            }
        }
        let field = self
            .field()
            .ok_or_else(|| NetworkError::Other("a network with no vertices has no value".into()))?;
        let all: Vec<(&ModeId, usize)> = self.modes.iter().map(|(e, &l)| (e, l)).collect();
        let positions = all.iter().fold(1u128, |acc, (_, l)| acc.saturating_mul(*l as u128));
        if positions > VALUE_POSITION_LIMIT {
            return Err(NetworkError::TooLarge);
        }
        let slot = |id: &ModeId| all.iter().position(|(e, _)| *e == id).unwrap();
        let factors: Vec<(&Tensor, Vec<usize>)> = self
            .vertices
            .values()
            .map(|v| {
                let t = v.tensor.as_deref().unwrap();
                (t, t.modes().iter().map(|m| slot(&m.id)).collect())
            })
            .collect();
        let out_modes: Vec<Mode> = self
            .boundary
            .iter()
            .map(|e| Mode::new(e.clone(), self.modes[e]))
            .collect();
        let out_slots: Vec<usize> = self.boundary.iter().map(|e| slot(e)).collect();
        let mut out: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        let lengths: Vec<usize> = all.iter().map(|(_, l)| *l).collect();
        let mut j = vec![0usize; all.len()];
        loop {
            let mut term = field.one();
            for (t, slots) in &factors {
                let idx: Vec<usize> = slots.iter().map(|&s| j[s]).collect();
                term = term.mul(&t.get(&idx))?;
            }
            let key: Vec<usize> = out_slots.iter().map(|&s| j[s]).collect();
            let acc = out.entry(key).or_insert_with(|| field.zero());
            *acc = acc.add(&term)?;
            if !advance(&mut j, &lengths) {
                break;
            }
        }
        let data: Vec<Scalar> = out.into_values().collect();
        Ok(Tensor::from_scalars(out_modes, field, data)?)
    }

    /// Vertex sets of the connected components, each sorted, in order of
    /// their smallest vertex id.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let ids = self.vertex_ids();
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut comps = Vec::new();
        for start in &ids {
            if seen.contains(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start.clone()];
            seen.insert(start.clone());
            while let Some(u) = stack.pop() {
                comp.insert(u.clone());
                for v in &ids {
                    if !seen.contains(v) && self.adjacent(&u, v) {
                        seen.insert(v.clone());
                        stack.push(v.clone());
                    }
                }
            }
            comps.push(comp.into_iter().collect());
        }
        comps
    }

    /// Product of the lengths of a vertex's modes.
    pub fn vertex_volume(&self, v: &VertexId) -> u64 {
        self.vertices[v]
            .modes
            .iter()
            .fold(1u64, |acc, m| acc.saturating_mul(self.modes[m] as u64))
    }
}

/// Contracts `tensors` over the modes `all`, keeping `out` (a subset of `all`).
pub(crate) fn contract_tensors(tensors: &[&Tensor], all: &[Mode], out: &[Mode]) -> Result<Tensor, NetworkError> {
    let field = tensors[0].field();
    for t in tensors {
        if t.field() != field {
            return Err(FieldError::KindMismatch(field, t.field()).into());
        }
    }
    let entries = dispatch!(field, r => contract_kernel(r, tensors, all, out));
    Ok(Tensor::from_entries(out.to_vec(), entries)?)
}

fn stride_table(modes: &[Mode], all: &[Mode]) -> Vec<usize> {
    let lengths: Vec<usize> = modes.iter().map(|m| m.length).collect();
    let own = crate::tensor::strides(&lengths);
    all.iter()
        .map(|a| modes.iter().position(|m| m.id == a.id).map_or(0, |k| own[k]))
        .collect()
}

fn contract_kernel<R: Dense>(r: &R, tensors: &[&Tensor], all: &[Mode], out: &[Mode]) -> Entries {
    let n = all.len();
    let lengths: Vec<usize> = all.iter().map(|m| m.length).collect();
    let views: Vec<&[R::Elem]> = tensors.iter().map(|t| r.view(&t.entries)).collect();
    let tstr: Vec<Vec<usize>> = tensors.iter().map(|t| stride_table(t.modes(), all)).collect();
    let ostr = stride_table(out, all);
    let out_volume: usize = out.iter().map(|m| m.length).product();
    let mut acc = vec![r.zero(); out_volume];
    let mut idx = vec![0usize; n];
    let mut offs = vec![0usize; tensors.len()];
    let mut oo = 0usize;
    'outer: loop {
        let mut p = views[0][offs[0]].clone();
        for t in 1..views.len() {
            p = r.mul(&p, &views[t][offs[t]]);
        }
        r.add_assign(&mut acc[oo], &p);
        let mut k = n;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lengths[k] {
                for (o, s) in offs.iter_mut().zip(&tstr) {
                    *o += s[k];
                }
                oo += ostr[k];
                break;
            }
            let back = lengths[k] - 1;
            for (o, s) in offs.iter_mut().zip(&tstr) {
                *o -= back * s[k];
            }
            oo -= back * ostr[k];
            idx[k] = 0;
        }
    }
    r.wrap(acc)
}

/// Where `T̂(A)` comes from.
#[derive(Clone, Debug)]
pub enum BaseTensor {
    Explicit(Tensor),
    Oracle(OracleSpec, FieldKind),
}

/// A multilinear map given by its sockets and base tensor `T̂(A)`.
#[derive(Clone, Debug)]
pub struct MapSpec {
    pub name: String,
    pub inputs: Vec<Vec<Mode>>,
    pub output: Vec<Mode>,
    pub base: BaseTensor,
}

impl MapSpec {
    /// The map computed by a brute-force oracle, over `field`.
    pub fn from_oracle(o: OracleSpec, field: FieldKind) -> MapSpec {
        let (inputs, output) = oracle::socket_modes(&o);
        MapSpec {
            name: o.name(),
            inputs,
            output,
            base: BaseTensor::Oracle(o, field),
        }
    }

    pub fn is_form(&self) -> bool {
        self.output.is_empty()
    }

    pub fn field(&self) -> FieldKind {
        match &self.base {
            BaseTensor::Explicit(t) => t.field(),
            BaseTensor::Oracle(_, f) => *f,
        }
    }

    /// All modes of `T̂(A)`: the input sockets followed by the output socket.
    pub fn all_modes(&self) -> Vec<Mode> {
        self.inputs.iter().flatten().chain(&self.output).cloned().collect()
    }

    pub fn base_volume(&self) -> u128 {
        self.all_modes().iter().fold(1u128, |a, m| a.saturating_mul(m.length as u128))
    }

    /// Materializes `T̂(A)`.
    pub fn base_tensor(&self) -> Result<Tensor, NetworkError> {
        let t = match &self.base {
            BaseTensor::Explicit(t) => t.clone(),
            BaseTensor::Oracle(o, f) => oracle::base_tensor(o, *f).map_err(|e| NetworkError::Other(e.to_string()))?,
        };
        let all = self.all_modes();
        let want: BTreeSet<(&ModeId, usize)> = all.iter().map(|m| (&m.id, m.length)).collect();
        let have: BTreeSet<(&ModeId, usize)> = t.modes().iter().map(|m| (&m.id, m.length)).collect();
        if want.len() != all.len() || want != have {
            return Err(NetworkError::SocketMismatch("sockets do not cover the base tensor".into()));
        }
        Ok(t)
    }

    /// Checks that the sockets are nonempty and pairwise disjoint.
    pub fn check_sockets(&self) -> Result<(), NetworkError> {
        let mut seen = BTreeSet::new();
        for (k, s) in self.inputs.iter().enumerate() {
            if s.is_empty() {
                return Err(NetworkError::SocketMismatch(format!("input socket {k} is empty")));
            }
        }
        for m in self.all_modes() {
            if !seen.insert(m.id.clone()) {
                return Err(NetworkError::SocketMismatch(format!("mode {} is in two sockets", m.id)));
            }
        }
        Ok(())
    }
}

/// A network realizing a multilinear map: one socket vertex per input.
#[derive(Clone, Debug)]
pub struct SocketedNetwork {
    pub network: Network,
    pub sockets: Vec<VertexId>,
    pub output: Vec<ModeId>,
}

impl SocketedNetwork {
    /// Wraps a network whose socket vertices are already present, checking the invariants.
    pub fn new(network: Network, sockets: Vec<VertexId>, output: Vec<ModeId>) -> Result<Self, NetworkError> {
        let s = SocketedNetwork {
            network,
            sockets,
            output,
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<(), NetworkError> {
        let bad = |m: String| Err(NetworkError::SocketMismatch(m));
        let out: BTreeSet<&ModeId> = self.output.iter().collect();
        if out.len() != self.output.len() || out != self.network.boundary().iter().collect() {
            return bad("boundary differs from the output modes".into());
        }
        let socket_set: BTreeSet<&VertexId> = self.sockets.iter().collect();
        if socket_set.len() != self.sockets.len() {
            return bad("a socket vertex is listed twice".into());
        }
        let mut seen = BTreeSet::new();
        for s in &self.sockets {
            let v = self
                .network
                .vertex(s)
                .ok_or_else(|| NetworkError::UnknownVertex(s.clone()))?;
            if v.modes.is_empty() {
                return bad(format!("socket vertex {s} has no modes"));
            }
            for m in &v.modes {
                if !seen.insert(m.clone()) {
                    return bad(format!("mode {m} is shared by two sockets"));
                }
                if out.contains(m) {
                    return bad(format!("socket mode {m} is on the boundary"));
                }
                let core_touch = self
                    .network
                    .vertices()
                    .iter()
                    .any(|(id, o)| !socket_set.contains(id) && o.modes.contains(m));
                if !core_touch {
                    return bad(format!("socket mode {m} touches no core vertex"));
                }
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.sockets.len()
    }

    pub fn is_socket(&self, v: &VertexId) -> bool {
        self.sockets.contains(v)
    }

    /// The modes of input socket `k`, in the socket vertex's listed order.
    pub fn socket_modes(&self, k: usize) -> Vec<Mode> {
        let v = self.network.vertex(&self.sockets[k]).expect("socket vertex");
        v.modes
            .iter()
            .map(|m| Mode::new(m.clone(), self.network.mode_length(m).unwrap()))
            .collect()
    }

    pub fn output_modes(&self) -> Vec<Mode> {
        self.output
            .iter()
            .map(|m| Mode::new(m.clone(), self.network.mode_length(m).unwrap()))
            .collect()
    }

    /// The network without its socket vertices, socket modes back on the boundary.
    pub fn core(&self) -> Network {
        let mut n = self.network.skeleton();
        let socket_modes: Vec<ModeId> = (0..self.arity())
            .flat_map(|k| self.socket_modes(k).into_iter().map(|m| m.id))
            .collect();
        let mut vertices = n.vertices.clone();
        for s in &self.sockets {
            vertices.remove(s);
        }
        for (id, v) in vertices.iter_mut() {
            v.tensor = self.network.vertex(id).unwrap().tensor.clone();
        }
        n.vertices = vertices;
        for m in socket_modes {
            n.boundary.insert(m);
        }
        n
    }

    /// Binds the socket vertices, producing a plain network.
    pub fn bind(&self, inputs: &[Tensor]) -> Result<Network, NetworkError> {
        if inputs.len() != self.arity() {
            return Err(NetworkError::ArityMismatch {
                expected: self.arity(),
                got: inputs.len(),
            });
        }
        let mut n = self.network.clone();
        for (k, (s, t)) in self.sockets.iter().zip(inputs).enumerate() {
            n.bind_vertex(s, t.clone()).map_err(|_| NetworkError::ShapeMismatch(k))?;
        }
        Ok(n)
    }
}

/// Attaches one socket vertex per input socket of `spec` to `core`.
///
/// Socket vertices are named `X1`, `X2`, ... (prefixed with `_` on a clash).
/// The core's value is compared against `T̂(A)` when the base tensor has at
/// most [`REALIZE_CHECK_LIMIT`] entries.
pub fn realize(spec: &MapSpec, core: &Network) -> Result<SocketedNetwork, NetworkError> {
    spec.check_sockets()?;
    let core_violations = core.validate();
    if !core_violations.is_empty() {
        return Err(NetworkError::Invalid(core_violations));
    }
    let want: BTreeSet<(ModeId, usize)> = spec.all_modes().into_iter().map(|m| (m.id, m.length)).collect();
    let have: BTreeSet<(ModeId, usize)> = core
        .boundary()
        .iter()
        .map(|m| (m.clone(), core.mode_length(m).unwrap()))
        .collect();
    if want != have {
        return Err(NetworkError::SocketMismatch("core boundary differs from the sockets".into()));
    }
    if core.is_bound() && spec.base_volume() <= REALIZE_CHECK_LIMIT as u128 {
        let expected = spec.base_tensor()?;
        let plan = crate::planner::greedy_plan(&crate::planner::PlanRequest::new(core.clone()))
            .map_err(|e| NetworkError::Other(e.to_string()))?
            .0;
        let (got, _) = crate::execution::run(core, &plan).map_err(|e| NetworkError::Other(e.to_string()))?;
        if got != expected {
            return Err(NetworkError::ValueMismatch);
        }
    }
    let mut network = core.clone();
    let mut sockets = Vec::new();
    for (k, socket) in spec.inputs.iter().enumerate() {
        let mut id = VertexId(format!("X{}", k + 1));
        while network.vertex(&id).is_some() {
            id = VertexId(format!("_{}", id.0));
        }
        let ids: Vec<ModeId> = socket.iter().map(|m| m.id.clone()).collect();
        network.add_placeholder(id.clone(), &ids)?;
        sockets.push(id);
    }
    network.set_boundary(spec.output.iter().map(|m| m.id.clone()));
    SocketedNetwork::new(network, sockets, spec.output.iter().map(|m| m.id.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldKind = FieldKind::Rational;

    fn mat(i: &str, j: &str, n: usize, m: usize, data: &[i64]) -> Tensor {
        Tensor::from_i64(vec![Mode::new(i, n), Mode::new(j, m)], Q, data).unwrap()
    }

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn triangle(n: usize) -> Network {
        let ones = vec![1; n * n];
        let mut d = Network::new();
        d.add_vertex("A", mat("a", "b", n, n, &ones)).unwrap();
        d.add_vertex("B", mat("b", "c", n, n, &ones)).unwrap();
        d.add_vertex("C", mat("c", "a", n, n, &ones)).unwrap();
        d
    }

    fn product() -> Network {
        let mut d = Network::new();
        d.add_vertex("A", mat("i", "k", 2, 2, &[1, 2, 3, 4])).unwrap();
        d.add_vertex("B", mat("k", "j", 2, 2, &[5, 6, 7, 8])).unwrap();
        d.set_boundary(["i", "j"]);
        d
    }

    #[test]
    fn value_of_matrix_product() {
        assert_eq!(product().value().unwrap(), mat("i", "j", 2, 2, &[19, 22, 43, 50]));
    }

    #[test]
    fn value_of_triangle() {
        assert_eq!(triangle(3).value().unwrap(), Tensor::scalar(Q.from_i64(27)));
    }

    #[test]
    fn single_vertex_value_is_its_tensor() {
        let mut d = Network::new();
        let t = mat("x", "y", 2, 3, &[1, 2, 3, 4, 5, 6]);
        d.add_vertex("T", t.clone()).unwrap();
        d.set_boundary(["x", "y"]);
        assert_eq!(d.value().unwrap(), t);
    }

    #[test]
    fn validation_reports() {
        assert!(product().validate().is_empty());
        let mut d = product();
        d.add_mode("z", 2).unwrap();
        assert_eq!(d.validate(), vec![Violation::Degenerate("z".into())]);
        let mut parts = product();
        parts.vertices.get_mut(&vid("A")).unwrap().modes = vec!["i".into()];
        assert!(parts.validate().contains(&Violation::ShapeMismatch(vid("A"))));
    }

    #[test]
    fn induced_boundary_rule() {
        let d = triangle(2);
        let single = d.induced(&[vid("A")]).unwrap();
        assert_eq!(single.boundary().len(), 2);
        let two = d.induced(&[vid("A"), vid("B")]).unwrap();
        let b: Vec<&str> = two.boundary().iter().map(|m| m.as_str()).collect();
        assert_eq!(b, vec!["a", "c"]);
        assert_eq!(two.vertex_count(), 2);
        let whole = product().induced(&product().vertex_ids()).unwrap();
        assert_eq!(whole.boundary(), product().boundary());
        assert_eq!(d.induced(&[]).unwrap_err(), NetworkError::EmptySubset);
    }

    #[test]
    fn contraction_and_costs() {
        let d = triangle(4);
        assert_eq!(d.contraction_cost(&d.vertex_ids()).unwrap(), 64);
        let all = d.contract(&d.vertex_ids()).unwrap();
        assert_eq!(all.vertex_count(), 1);
        assert_eq!(all.vertex_ids(), vec![vid("A+B+C")]);
        let t = all.vertex(&vid("A+B+C")).unwrap().tensor.clone().unwrap();
        assert_eq!(*t, d.value().unwrap());
        let mut s = Network::new();
        s.add_vertex("V", mat("p", "q", 2, 3, &[0; 6])).unwrap();
        s.set_boundary(["p", "q"]);
        assert_eq!(s.contraction_cost(&[vid("V")]).unwrap(), 6);
        let same = s.contract(&[vid("V")]).unwrap();
        assert_eq!(same.value().unwrap(), s.value().unwrap());
    }

    #[test]
    fn contraction_keeps_value_and_boundary() {
        let d = product();
        let c = d.contract(&[vid("A"), vid("B")]).unwrap();
        assert_eq!(c.boundary(), d.boundary());
        assert!(c.validate().is_empty());
        assert_eq!(c.value().unwrap(), d.value().unwrap());
    }

    #[test]
    fn loops_and_merged_ids() {
        let mut d = Network::new();
        d.add_vertex("A", mat("l", "x", 2, 2, &[1, 0, 0, 1])).unwrap();
        d.add_vertex("B", mat("x", "y", 2, 2, &[1, 2, 3, 4])).unwrap();
        d.set_boundary(["y"]);
        assert_eq!(d.loops_at(&vid("A")), vec![ModeId::from("l")]);
        assert!(!d.has_loop(&vid("B")));
        assert_eq!(merged_id([&vid("b+c"), &vid("a")]), vid("a+b+c"));
    }

    #[test]
    fn unbound_value_is_refused() {
        let mut d = product();
        d.add_mode("z", 2).unwrap();
        d.add_placeholder("X", &["z".into(), "i".into()]).unwrap();
        assert!(matches!(d.value(), Err(NetworkError::Unbound(_))));
    }

    #[test]
    fn components_split() {
        let mut d = product();
        d.add_vertex("C", mat("u", "v", 1, 1, &[1])).unwrap();
        assert_eq!(d.components(), vec![vec![vid("A"), vid("B")], vec![vid("C")]]);
    }
}
