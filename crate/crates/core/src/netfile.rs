//! The textual network file format and the plan file format.
//!
//! ```json
//! { "version": 1, "field": "gf:17",
//!   "modes": [{"id": "i", "length": 2}],
//!   "vertices": [{"id": "A", "modes": ["i"], "tensor": ["1", "2"]}],
//!   "boundary": ["i"],
//!   "sockets": {"inputs": [["i"]], "output": []},
//!   "generator": {"generator": "fft", "params": {"k": 3}} }
//! ```
//!
//! A vertex tensor is a row-major list of scalars over the vertex's listed
//! modes, a generator reference `{"generator": name, "params": {...}}`
//! whose realized core value is placed on the listed modes in order, or
//! `null` for a socket placeholder. The optional top-level `generator`
//! records the builder a file was produced by.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{self, BuildError, Built, GeneratorParams};
use crate::execution::ExecutionPlan;
use crate::field::{FieldError, FieldKind};
use crate::network::{Network, NetworkError, SocketedNetwork};
use crate::tensor::{Mode, ModeId, Tensor, TensorError, VertexId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub id: ModeId,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRef {
    pub generator: String,
    #[serde(default)]
    pub params: GeneratorParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TensorEntry {
    Literal(Vec<serde_json::Value>),
    Generator(GeneratorRef),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: VertexId,
    pub modes: Vec<ModeId>,
    pub tensor: Option<TensorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocketsEntry {
    pub inputs: Vec<Vec<ModeId>>,
    pub output: Vec<ModeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldKind>,
    pub modes: Vec<ModeEntry>,
    pub vertices: Vec<VertexEntry>,
    pub boundary: Vec<ModeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sockets: Option<SocketsEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorRef>,
}

/// A parsed file: the network, and its socketed form when sockets are declared.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub network: Network,
    pub socketed: Option<SocketedNetwork>,
    pub field: Option<FieldKind>,
    pub generator: Option<GeneratorRef>,
}

impl Loaded {
    /// Rebuilds the recorded generator, if any.
    pub fn rebuild(&self) -> Result<Option<Built>, FileError> {
        let Some(g) = &self.generator else { return Ok(None) };
        let field = g
            .field
            .or(self.field)
            .ok_or_else(|| FileError::Invalid("generator metadata without a field".into()))?;
        Ok(Some(builders::build(&g.generator, &g.params, field)?))
    }
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<NetworkFile, FileError> {
        let f: NetworkFile = serde_json::from_str(text)?;
        if f.version != FORMAT_VERSION {
            return Err(FileError::Version(f.version));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// Describes a network, optionally with its sockets.
    pub fn from_network(d: &Network, sockets: Option<&SocketedNetwork>) -> NetworkFile {
        let modes = d
            .modes()
            .iter()
            .map(|(id, &length)| ModeEntry { id: id.clone(), length })
            .collect();
        let vertices = d
            .vertices()
            .iter()
            .map(|(id, v)| VertexEntry {
                id: id.clone(),
                modes: v.modes.clone(),
                tensor: v.tensor.as_ref().map(|t| {
                    let t = t.permuted(&v.modes).expect("vertex tensor over its modes");
                    TensorEntry::Literal(
                        t.scalars()
                            .iter()
                            .map(|x| serde_json::Value::String(x.to_string()))
                            .collect(),
                    )
                }),
            })
            .collect();
        let sockets = sockets.map(|s| SocketsEntry {
            inputs: (0..s.arity())
                .map(|k| s.socket_modes(k).into_iter().map(|m| m.id).collect())
                .collect(),
            output: s.output_modes().into_iter().map(|m| m.id).collect(),
        });
        NetworkFile {
            version: FORMAT_VERSION,
            field: d.field(),
            modes,
            vertices,
            boundary: d.boundary().iter().cloned().collect(),
            sockets,
            generator: None,
        }
    }

    /// Describes a built network and records how to rebuild it.
    pub fn from_built(b: &Built, generator: &str, params: &GeneratorParams) -> NetworkFile {
        let mut f = NetworkFile::from_network(&b.network.network, Some(&b.network));
        f.field = Some(b.field);
        f.generator = Some(GeneratorRef {
            generator: generator.to_string(),
            params: params.clone(),
            field: Some(b.field),
        });
        f
    }

    /// Assembles and validates the network.
    pub fn load(&self) -> Result<Loaded, FileError> {
        if self.version != FORMAT_VERSION {
            return Err(FileError::Version(self.version));
        }
        let mut d = Network::new();
        for m in &self.modes {
            d.add_mode(m.id.clone(), m.length)?;
        }
        let mut placeholders = Vec::new();
        for v in &self.vertices {
            let mut shape = Vec::with_capacity(v.modes.len());
            for m in &v.modes {
                let len = d
                    .mode_length(m)
                    .ok_or_else(|| FileError::Invalid(format!("vertex {}: undeclared mode {m}", v.id)))?;
                shape.push(Mode::new(m.clone(), len));
            }
            match &v.tensor {
                None => {
                    d.add_placeholder(v.id.clone(), &v.modes)?;
                    placeholders.push(v.id.clone());
                }
                Some(TensorEntry::Literal(data)) => {
                    let field = self
                        .field
                        .ok_or_else(|| FileError::Invalid("literal tensors need a top-level field".into()))?;
                    let scalars = data
                        .iter()
                        .map(|x| match x {
                            serde_json::Value::String(s) => field.parse_scalar(s),
                            serde_json::Value::Number(n) => field.parse_scalar(&n.to_string()),
                            other => Err(FieldError::Parse(other.to_string())),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    d.add_vertex(v.id.clone(), Tensor::from_scalars(shape, field, scalars)?)?;
                }
                Some(TensorEntry::Generator(g)) => {
                    let field = g
                        .field
                        .or(self.field)
                        .ok_or_else(|| FileError::Invalid(format!("vertex {}: generator needs a field", v.id)))?;
                    let t = generator_tensor(g, field, &shape)?;
                    d.add_vertex(v.id.clone(), t)?;
                }
            }
        }
        d.set_boundary(self.boundary.iter().cloned());
        let violations = d.validate();
        if !violations.is_empty() {
            return Err(NetworkError::Invalid(violations).into());
        }
        let socketed = match &self.sockets {
            None => {
                if !placeholders.is_empty() {
                    return Err(FileError::Invalid("placeholder vertices without a sockets section".into()));
                }
                None
            }
            Some(s) => {
                let mut order = Vec::new();
                for (k, group) in s.inputs.iter().enumerate() {
                    let want: BTreeSet<&ModeId> = group.iter().collect();
                    let hit: Vec<&VertexId> = placeholders
                        .iter()
                        .filter(|p| d.vertex(p).unwrap().modes.iter().collect::<BTreeSet<_>>() == want)
                        .collect();
                    match hit.as_slice() {
                        [v] => order.push((*v).clone()),
                        _ => return Err(FileError::Invalid(format!("socket {}: no unique placeholder", k + 1))),
                    }
                }
                if order.len() != placeholders.len() {
                    return Err(FileError::Invalid("placeholder vertex not named by any socket".into()));
                }
                Some(SocketedNetwork::new(d.clone(), order, s.output.clone())?)
            }
        };
        Ok(Loaded {
            network: d,
            socketed,
            field: self.field,
            generator: self.generator.clone(),
        })
    }
}

fn generator_tensor(g: &GeneratorRef, field: FieldKind, shape: &[Mode]) -> Result<Tensor, FileError> {
    let b = builders::build(&g.generator, &g.params, field)?;
    let s = &b.network;
    let order: Vec<Mode> = (0..s.arity()).flat_map(|k| s.socket_modes(k)).chain(s.output_modes()).collect();
    let lengths = |m: &[Mode]| m.iter().map(|x| x.length).collect::<Vec<_>>();
    if lengths(&order) != lengths(shape) {
        return Err(FileError::Invalid(format!(
            "generator {} has modes of lengths {:?}, vertex lists {:?}",
            g.generator,
            lengths(&order),
            lengths(shape)
        )));
    }
    let value = s.core().value()?;
    let ids: Vec<ModeId> = order.iter().map(|m| m.id.clone()).collect();
    let value = value.permuted(&ids)?;
    let mut it = shape.iter();
    Ok(value.renamed(|_| it.next().unwrap().id.clone())?)
}

pub fn parse_plan(text: &str) -> Result<ExecutionPlan, FileError> {
    Ok(serde_json::from_str(text)?)
}

pub fn plan_to_json(plan: &ExecutionPlan) -> String {
    serde_json::to_string(plan).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::run;

    #[test]
    fn literal_network_round_trip() {
        let text = r#"{"version": 1, "field": "rational",
            "modes": [{"id": "i", "length": 2}, {"id": "k", "length": 2}, {"id": "j", "length": 2}],
            "vertices": [
                {"id": "A", "modes": ["i", "k"], "tensor": [1, 2, 3, 4]},
                {"id": "B", "modes": ["k", "j"], "tensor": ["5", "6", "7", "8"]}],
            "boundary": ["i", "j"]}"#;
        let f = NetworkFile::parse(text).unwrap();
        let d = f.load().unwrap().network;
        let v = d.value().unwrap().permuted(&["i".into(), "j".into()]).unwrap();
        let want: Vec<String> = ["19", "22", "43", "50"].iter().map(|s| s.to_string()).collect();
        assert_eq!(v.scalars().iter().map(|s| s.to_string()).collect::<Vec<_>>(), want);
        let again = NetworkFile::parse(&NetworkFile::from_network(&d, None).to_json()).unwrap();
        assert_eq!(again.load().unwrap().network.value().unwrap(), d.value().unwrap());
    }

    #[test]
    fn built_network_round_trip() {
        let params = GeneratorParams { n: Some(3), ..Default::default() };
        let b = builders::build("ryser", &params, FieldKind::Prime(101)).unwrap();
        let f = NetworkFile::from_built(&b, "ryser", &params);
        let loaded = NetworkFile::parse(&f.to_json()).unwrap().load().unwrap();
        let s = loaded.socketed.clone().unwrap();
        assert_eq!(s.sockets, b.network.sockets);
        let rebuilt = loaded.rebuild().unwrap().unwrap();
        let inputs: Vec<Tensor> = rebuilt
            .layout
            .logical_inputs()
            .into_iter()
            .enumerate()
            .map(|(k, m)| Tensor::from_fn(m, b.field, |i| b.field.from_i64((i[0] + 2 * k) as i64)).unwrap())
            .collect();
        let embedded: Vec<Tensor> = inputs.iter().enumerate().map(|(k, x)| b.layout.embed(k, x).unwrap()).collect();
        let (t, _) = run(&s.bind(&embedded).unwrap(), &b.plan).unwrap();
        assert_eq!(Some(b.layout.readout(&t).unwrap()), b.oracle_value(&inputs).unwrap());
    }

    #[test]
    fn generator_vertex_carries_core_value() {
        let text = r#"{"version": 1,
            "modes": [{"id": "a", "length": 2}, {"id": "b", "length": 2}],
            "vertices": [{"id": "Y", "modes": ["a", "b"],
                          "tensor": {"generator": "yates", "params": {"k": 1, "base": "zeta"}, "field": "rational"}}],
            "boundary": ["a", "b"]}"#;
        let d = NetworkFile::parse(text).unwrap().load().unwrap().network;
        let v = d.value().unwrap().permuted(&["a".into(), "b".into()]).unwrap();
        assert_eq!(v, Tensor::from_i64(vec![Mode::new("a", 2), Mode::new("b", 2)], FieldKind::Rational, &[1, 1, 0, 1]).unwrap());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(NetworkFile::parse(r#"{"version": 2, "modes": [], "vertices": [], "boundary": []}"#), Err(FileError::Version(2))));
        let degenerate = r#"{"version": 1, "field": "rational", "modes": [{"id": "e", "length": 2}], "vertices": [], "boundary": []}"#;
        assert!(NetworkFile::parse(degenerate).unwrap().load().is_err());
        let orphan = r#"{"version": 1, "modes": [{"id": "e", "length": 2}],
            "vertices": [{"id": "X", "modes": ["e"], "tensor": null}], "boundary": []}"#;
        assert!(NetworkFile::parse(orphan).unwrap().load().is_err());
    }

    #[test]
    fn one_entry_literal_is_not_a_generator() {
        let text = r#"{"version": 1, "field": "gf:101", "modes": [{"id": "e", "length": 1}],
            "vertices": [{"id": "A", "modes": ["e"], "tensor": ["79"]}], "boundary": ["e"]}"#;
        let d = NetworkFile::parse(text).unwrap().load().unwrap().network;
        assert_eq!(d.value().unwrap().scalars()[0].to_string(), "79");
    }

    #[test]
    fn plan_format() {
        let p = parse_plan(r#"{"steps": [["A", "B"]]}"#).unwrap();
        assert_eq!(p.steps, vec![vec![VertexId::from("A"), VertexId::from("B")]]);
        assert_eq!(plan_to_json(&p), "{\"steps\":[[\"A\",\"B\"]]}\n");
    }
}
