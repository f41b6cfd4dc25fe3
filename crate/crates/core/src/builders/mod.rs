//! Concrete network constructions with their prescribed plans.
//!
//! Every builder returns a [`Built`]: a socketed network, an execution plan,
//! the cost bound the construction guarantees, and an [`IoLayout`] mapping
//! the logical inputs and output (as the oracle sees them) onto the padded
//! bit-level modes of the network.

mod fourier;
mod homomorphism;
mod kruskal;
mod matmul;
mod ryser;
mod yates;

use serde::Deserialize;
use thiserror::Error;

pub use fourier::{convolution_network, fft_network, wht_network};
pub use homomorphism::{
    branch_decomposition_search, branchwidth_evaluation, pform_network, BranchDecomposition, Evaluation,
};
pub use kruskal::kruskal_network;
pub use matmul::{matmul_network, rect_matmul_network, strassen_components, strassen_network, STRASSEN_C, STRASSEN_D};
pub use ryser::ryser_network;
pub use yates::{yates_network, yates_preset};

pub use crate::pattern::PatternGraph;

use crate::execution::{run, socketed_report, CostReport, ExecError, ExecutionPlan};
use crate::kronpow::KronError;
use crate::field::{FieldError, FieldKind, Scalar};
use crate::network::{Network, NetworkError, SocketedNetwork};
use crate::oracle::{self, Group, OracleError, OracleSpec};
use crate::pattern::PatternError;
use crate::tensor::{Mode, ModeId, Tensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("no primitive 2^{0}-th root of unity in {1}")]
    NoRoot(u32, FieldKind),
    #[error("2 is not invertible in {0}")]
    CharTwo(FieldKind),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid branch decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("Strassen reconstruction check failed")]
    StrassenCheck,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Kron(#[from] KronError),
}

/// One logical axis of a socket and the network modes that encode it.
///
/// The network modes are read as mixed-radix digits, most significant
/// first. Digit values at or beyond the logical length are padding and
/// carry zeros. A pad axis has no logical mode and is pinned to index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    pub logical: Option<Mode>,
    pub modes: Vec<Mode>,
}

impl Axis {
    pub fn new(logical: Mode, modes: Vec<Mode>) -> Self {
        Axis {
            logical: Some(logical),
            modes,
        }
    }

    pub fn pad(modes: Vec<Mode>) -> Self {
        Axis { logical: None, modes }
    }

    fn capacity(&self) -> usize {
        self.modes.iter().map(|m| m.length).product()
    }

    fn logical_len(&self) -> usize {
        self.logical.as_ref().map_or(1, |m| m.length)
    }

    /// Writes the digits of `value` into `out` (most significant first).
    fn digits(&self, mut value: usize, out: &mut [usize]) {
        for (d, m) in out.iter_mut().zip(&self.modes).rev() {
            *d = value % m.length;
            value /= m.length;
        }
    }

    fn value(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.modes).fold(0, |acc, (d, m)| acc * m.length + d)
    }
}

/// Logical-to-network mapping of every socket.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IoLayout {
    pub inputs: Vec<Vec<Axis>>,
    pub output: Vec<Axis>,
}

fn axis_modes(axes: &[Axis]) -> Vec<Mode> {
    axes.iter().flat_map(|a| a.modes.iter().cloned()).collect()
}

fn logical_modes(axes: &[Axis]) -> Vec<Mode> {
    axes.iter().filter_map(|a| a.logical.clone()).collect()
}

impl IoLayout {
    /// Logical modes of each input socket.
    pub fn logical_inputs(&self) -> Vec<Vec<Mode>> {
        self.inputs.iter().map(|s| logical_modes(s)).collect()
    }

    pub fn logical_output(&self) -> Vec<Mode> {
        logical_modes(&self.output)
    }

    /// Maps a logical input tensor onto the network modes of socket `k`.
    pub fn embed(&self, k: usize, logical: &Tensor) -> Result<Tensor, BuildError> {
        let axes = self
            .inputs
            .get(k)
            .ok_or_else(|| BuildError::BadParams(format!("no input socket {k}")))?;
        let ids: Vec<ModeId> = logical_modes(axes).into_iter().map(|m| m.id).collect();
        let x = logical.permuted(&ids).map_err(|_| {
            BuildError::BadParams(format!("input {k} must have modes {:?}", logical_modes(axes)))
        })?;
        for (have, want) in x.modes().iter().zip(logical_modes(axes)) {
            if *have != want {
                return Err(BuildError::BadParams(format!("input {k}: mode {} has the wrong length", have.id)));
            }
        }
        let field = x.field();
        let zero = field.zero();
        let spans: Vec<usize> = axes.iter().map(|a| a.modes.len()).collect();
        Ok(Tensor::from_fn(axis_modes(axes), field, |idx| {
            let mut logical_idx = Vec::with_capacity(ids.len());
            let mut at = 0;
            for (a, &span) in axes.iter().zip(&spans) {
                let v = a.value(&idx[at..at + span]);
                at += span;
                if v >= a.logical_len() {
                    return zero.clone();
                }
                if a.logical.is_some() {
                    logical_idx.push(v);
                }
            }
            x.get(&logical_idx)
        })?)
    }

    /// Restricts a network value to the logical output.
    pub fn readout(&self, value: &Tensor) -> Result<Tensor, BuildError> {
        let net_ids: Vec<ModeId> = axis_modes(&self.output).into_iter().map(|m| m.id).collect();
        let v = value.permuted(&net_ids)?;
        let logical = logical_modes(&self.output);
        let mut net_idx = vec![0usize; net_ids.len()];
        Ok(Tensor::from_fn(logical, value.field(), |idx| {
            let mut at = 0;
            let mut li = 0;
            for a in &self.output {
                let span = a.modes.len();
                let val = if a.logical.is_some() {
                    li += 1;
                    idx[li - 1]
                } else {
                    0
                };
                a.digits(val, &mut net_idx[at..at + span]);
                at += span;
            }
            v.get(&net_idx)
        })?)
    }

    fn check(&self) -> Result<(), BuildError> {
        for a in self.inputs.iter().flatten().chain(&self.output) {
            if a.logical_len() > a.capacity() {
                return Err(BuildError::BadParams("axis capacity below its logical length".into()));
            }
        }
        Ok(())
    }
}

/// A constructed network with its plan, bound, layout and reference map.
#[derive(Clone, Debug)]
pub struct Built {
    pub name: String,
    pub network: SocketedNetwork,
    pub plan: ExecutionPlan,
    pub layout: IoLayout,
    /// The construction's guaranteed bound on the plan's max-step cost.
    pub bound: Option<u64>,
    pub oracle: Option<OracleSpec>,
    pub field: FieldKind,
}

impl Built {
    /// Structural cost report of the prescribed plan, amortized cost included.
    pub fn cost(&self) -> Result<CostReport, BuildError> {
        Ok(socketed_report(&self.network, &self.plan)?)
    }

    /// Binds logical inputs to the socket vertices.
    pub fn bind(&self, inputs: &[Tensor]) -> Result<Network, BuildError> {
        if inputs.len() != self.layout.inputs.len() {
            return Err(NetworkError::ArityMismatch {
                expected: self.layout.inputs.len(),
                got: inputs.len(),
            }
            .into());
        }
        let embedded: Vec<Tensor> = inputs
            .iter()
            .enumerate()
            .map(|(k, x)| self.layout.embed(k, x))
            .collect::<Result<_, _>>()?;
        Ok(self.network.bind(&embedded)?)
    }

    /// Runs the prescribed plan on logical inputs and reads out the logical result.
    pub fn evaluate(&self, inputs: &[Tensor]) -> Result<(Tensor, CostReport), BuildError> {
        let d = self.bind(inputs)?;
        let (t, report) = run(&d, &self.plan)?;
        Ok((self.layout.readout(&t)?, report))
    }

    /// The reference value of the map on logical inputs.
    pub fn oracle_value(&self, inputs: &[Tensor]) -> Result<Option<Tensor>, BuildError> {
        match &self.oracle {
            Some(o) => Ok(Some(oracle::evaluate(o, inputs)?)),
            None => Ok(None),
        }
    }
}

fn assemble(
    name: String,
    network: SocketedNetwork,
    plan: ExecutionPlan,
    layout: IoLayout,
    bound: Option<u64>,
    oracle: Option<OracleSpec>,
    field: FieldKind,
) -> Result<Built, BuildError> {
    layout.check()?;
    crate::execution::plan_cost(&network.network, &plan)?;
    Ok(Built {
        name,
        network,
        plan,
        layout,
        bound,
        oracle,
        field,
    })
}

/// Number of binary digits used for a logical length (at least one).
pub(crate) fn bits_for(n: usize) -> usize {
    let mut b = 1;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

pub(crate) fn bit_modes(ids: &[ModeId]) -> Vec<Mode> {
    ids.iter().map(|id| Mode::new(id.clone(), 2)).collect()
}

pub(crate) fn ids(prefix: &str, count: usize) -> Vec<ModeId> {
    (1..=count).map(|t| ModeId(format!("{prefix}{t}"))).collect()
}

/// The identity matrix over two modes of equal length.
pub(crate) fn identity(a: &ModeId, b: &ModeId, len: usize, field: FieldKind) -> Tensor {
    let one = field.one();
    let zero = field.zero();
    Tensor::from_fn(vec![Mode::new(a.clone(), len), Mode::new(b.clone(), len)], field, |i| {
        if i[0] == i[1] {
            one.clone()
        } else {
            zero.clone()
        }
    })
    .expect("identity")
}

/// The unit vector selecting index 0 of a mode.
pub(crate) fn selector(a: &ModeId, len: usize, field: FieldKind) -> Tensor {
    let one = field.one();
    let zero = field.zero();
    Tensor::from_fn(vec![Mode::new(a.clone(), len)], field, |i| {
        if i[0] == 0 {
            one.clone()
        } else {
            zero.clone()
        }
    })
    .expect("selector")
}

pub(crate) fn constant(modes: Vec<Mode>, value: &Scalar) -> Tensor {
    let field = value.kind();
    Tensor::from_fn(modes, field, |_| value.clone()).expect("constant")
}

/// Parameters of a named generator, as read from a network file or the CLI.
#[derive(Clone, Debug, Default, Deserialize, serde::Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    /// `cyclic` or `xor`, for convolutions.
    pub group: Option<String>,
    /// `zeta`, `mobius` or `hadamard`, or explicit rows, for Yates.
    pub base: Option<serde_json::Value>,
    /// Edge-list text, or `K<v>` / `K<v>^<k>` / `P<v>` / `C<v>`, for P-forms.
    pub pattern: Option<String>,
    /// A root of unity for the FFT (defaults to the smallest primitive one).
    pub root: Option<String>,
}

impl GeneratorParams {
    fn need(&self, v: Option<usize>, name: &str) -> Result<usize, BuildError> {
        v.ok_or_else(|| BuildError::BadParams(format!("missing parameter {name}")))
    }
}

/// Reads a pattern from edge-list text or a shorthand such as `K4`, `K4^3`, `P4`, `C5`.
pub fn parse_pattern(text: &str) -> Result<PatternGraph, BuildError> {
    let t = text.trim();
    let num = |s: &str| s.parse::<usize>().map_err(|_| BuildError::BadParams(format!("bad pattern {t:?}")));
    if let Some(rest) = t.strip_prefix('K') {
        let (v, k) = match rest.split_once('^') {
            Some((v, k)) => (num(v)?, num(k)?),
            None => (num(rest)?, 2),
        };
        return Ok(PatternGraph::complete(v, k)?);
    }
    if let Some(rest) = t.strip_prefix('P') {
        return Ok(PatternGraph::path(num(rest)?)?);
    }
    if let Some(rest) = t.strip_prefix('C') {
        return Ok(PatternGraph::cycle(num(rest)?)?);
    }
    Ok(t.parse()?)
}

/// Names accepted by [`build`].
pub const GENERATORS: [&str; 10] = [
    "strassen",
    "matmul",
    "rect_matmul",
    "fft",
    "wht",
    "conv",
    "yates",
    "kruskal",
    "ryser",
    "pform",
];

/// Builds a named generator.
pub fn build(name: &str, p: &GeneratorParams, field: FieldKind) -> Result<Built, BuildError> {
    match name {
        "strassen" => strassen_network(field),
        "matmul" => matmul_network(p.need(p.n, "n")?, field),
        "rect_matmul" => {
            let n = p.need(p.n, "n")?;
            rect_matmul_network(n, p.r.unwrap_or(n), p.m.unwrap_or(n), field)
        }
        "fft" => {
            let root = p.root.as_deref().map(|r| field.parse_scalar(r)).transpose()?;
            fft_network(p.need(p.k, "k")? as u32, field, root)
        }
        "wht" => wht_network(p.need(p.k, "k")? as u32, field),
        "conv" => {
            let k = p.need(p.k, "k")? as u32;
            let group = match p.group.as_deref().unwrap_or("cyclic") {
                "cyclic" => Group::Cyclic(1 << k),
                "xor" => Group::Xor(k),
                g => return Err(BuildError::BadParams(format!("unknown group {g:?}"))),
            };
            convolution_network(group, field)
        }
        "yates" => {
            let k = p.need(p.k, "k")?;
            let base = match &p.base {
                None => yates_preset("zeta", field)?,
                Some(serde_json::Value::String(s)) => yates_preset(s, field)?,
                Some(serde_json::Value::Array(rows)) => {
                    let mut data = Vec::new();
                    let cols = rows.first().and_then(|r| r.as_array()).map_or(0, Vec::len);
                    for row in rows {
                        let row = row.as_array().filter(|r| r.len() == cols).ok_or_else(|| {
                            BuildError::BadParams("base rows must be arrays of equal length".into())
                        })?;
                        for e in row {
                            let text = match e {
                                serde_json::Value::String(s) => s.clone(),
                                other => other.to_string(),
                            };
                            data.push(field.parse_scalar(&text)?);
                        }
                    }
                    crate::tensor::Matrix::from_scalars(rows.len(), cols, field, data)?
                }
                Some(_) => return Err(BuildError::BadParams("base must be a preset name or rows".into())),
            };
            yates_network(&base, k)
        }
        "kruskal" => {
            let n = p.need(p.n, "n")?;
            kruskal_network(p.need(p.l, "l")?, n, p.r.unwrap_or(n), field)
        }
        "ryser" => ryser_network(p.need(p.n, "n")?, field),
        "pform" => {
            let pattern = parse_pattern(p.pattern.as_deref().unwrap_or("K3"))?;
            Ok(pform_network(&pattern, p.need(p.n, "n")?, field)?.1)
        }
        other => Err(BuildError::UnknownGenerator(other.into())),
    }
}
