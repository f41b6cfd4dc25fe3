//! Brute-force reference evaluators.
//!
//! Every family is evaluated by literal summation of its defining formula.
//! Nothing here calls into the network, execution or builder code.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldError, FieldKind, Scalar};
use crate::pattern::PatternGraph;
use crate::tensor::{Matrix, Mode, ModeId, Tensor, TensorError};

/// Largest number of summation terms (or base-tensor entries) accepted.
pub const TERM_LIMIT: u128 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("input shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("more than 2^24 terms")]
    TooLarge,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    /// The cyclic group of order n.
    Cyclic(usize),
    /// The elementary abelian group of order 2^k.
    Xor(u32),
}

impl Group {
    pub fn order(self) -> usize {
        match self {
            Group::Cyclic(n) => n,
            Group::Xor(k) => 1 << k,
        }
    }

    fn op(self, a: usize, b: usize) -> usize {
        match self {
            Group::Cyclic(n) => (a + b) % n,
            Group::Xor(_) => a ^ b,
        }
    }
}

/// A multilinear map with a brute-force evaluator.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleSpec {
    /// `C_ij = sum_k A_ik B_kj` for an n x r times r x m product.
    Matmul { n: usize, r: usize, m: usize },
    /// `y_j = sum_i root^(ij) x_i`.
    Dft { n: usize, root: Scalar },
    /// `h_t = sum_{a*b=t} f_a g_b`.
    Convolution(Group),
    /// `Y_{i_1..i_l} = sum_c prod_m A^(m)_{i_m c}` with A^(m) of shape `rows[m] x r`.
    Kruskal { rows: Vec<usize>, r: usize },
    /// `sum_sigma prod_i x_i[sigma(i)]`.
    Permanent { n: usize },
    /// `sum_sigma (-1)^(n - cycles(sigma)) prod_i x_i[sigma(i)]`.
    Determinant { n: usize },
    /// `sum_{sigma: V -> [n]} prod_S X^S[sigma|S]`.
    PForm { pattern: PatternGraph, n: usize },
    /// `y_J = sum_I x_I prod_c B[i_c, j_c]` for an s x t matrix B.
    KroneckerPower { base: Matrix, k: usize },
}

impl OracleSpec {
    pub fn name(&self) -> String {
        match self {
            OracleSpec::Matmul { n, r, m } => format!("matmul<{n},{r},{m}>"),
            OracleSpec::Dft { n, root } => format!("dft<{n},{root}>"),
            OracleSpec::Convolution(Group::Cyclic(n)) => format!("conv-cyclic<{n}>"),
            OracleSpec::Convolution(Group::Xor(k)) => format!("conv-xor<{k}>"),
            OracleSpec::Kruskal { rows, r } => format!("kruskal<{rows:?}|{r}>"),
            OracleSpec::Permanent { n } => format!("perm<{n}>"),
            OracleSpec::Determinant { n } => format!("det<{n}>"),
            OracleSpec::PForm { pattern, n } => {
                format!("pform<v={},e={},k={},n={n}>", pattern.vertex_count(), pattern.edge_count(), pattern.uniformity())
            }
            OracleSpec::KroneckerPower { base, k } => format!("kron<{}x{},{k}>", base.rows(), base.cols()),
        }
    }

    fn check(&self, field: FieldKind) -> Result<(), OracleError> {
        let bad = |s: &str| Err(OracleError::BadParams(s.into()));
        match self {
            OracleSpec::Matmul { n, r, m } if *n == 0 || *r == 0 || *m == 0 => bad("zero dimension"),
            OracleSpec::Dft { n, root } => {
                if *n == 0 {
                    bad("zero length")
                } else if root.kind() != field {
                    Err(FieldError::KindMismatch(field, root.kind()).into())
                } else {
                    Ok(())
                }
            }
            OracleSpec::Convolution(g) if g.order() == 0 => bad("empty group"),
            OracleSpec::Kruskal { rows, r } if rows.is_empty() || *r == 0 || rows.contains(&0) => {
                bad("Kruskal needs l >= 1 and positive sizes")
            }
            OracleSpec::Permanent { n } | OracleSpec::Determinant { n } if *n == 0 => bad("zero order"),
            OracleSpec::PForm { n, pattern } if *n == 0 || pattern.edge_count() == 0 => bad("empty form"),
            OracleSpec::KroneckerPower { base, k } => {
                if *k == 0 {
                    bad("k must be positive")
                } else if base.field() != field {
                    Err(FieldError::KindMismatch(field, base.field()).into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn modes(spec: &[(String, usize)]) -> Vec<Mode> {
    spec.iter().map(|(id, l)| Mode::new(id.as_str(), *l)).collect()
}

/// The input sockets and the output socket of each family, with fixed mode names.
pub fn socket_modes(o: &OracleSpec) -> (Vec<Vec<Mode>>, Vec<Mode>) {
    let s = |id: &str, l: usize| (id.to_string(), l);
    let (inputs, output): (Vec<Vec<(String, usize)>>, Vec<(String, usize)>) = match o {
        OracleSpec::Matmul { n, r, m } => (
            vec![vec![s("a_i", *n), s("a_k", *r)], vec![s("b_k", *r), s("b_j", *m)]],
            vec![s("c_i", *n), s("c_j", *m)],
        ),
        OracleSpec::Dft { n, .. } => (vec![vec![s("x", *n)]], vec![s("y", *n)]),
        OracleSpec::Convolution(g) => {
            let n = g.order();
            (vec![vec![s("f", n)], vec![s("g", n)]], vec![s("h", n)])
        }
        OracleSpec::Kruskal { rows, r } => (
            rows.iter()
                .enumerate()
                .map(|(m, &n)| vec![s(&format!("a{}_i", m + 1), n), s(&format!("a{}_r", m + 1), *r)])
                .collect(),
            rows.iter().enumerate().map(|(m, &n)| s(&format!("y{}", m + 1), n)).collect(),
        ),
        OracleSpec::Permanent { n } | OracleSpec::Determinant { n } => {
            ((1..=*n).map(|i| vec![s(&format!("x{i}"), *n)]).collect(), Vec::new())
        }
        OracleSpec::PForm { pattern, n } => (
            pattern
                .edges()
                .iter()
                .enumerate()
                .map(|(k, e)| e.iter().map(|v| s(&format!("s{}_{}", k + 1, v), *n)).collect())
                .collect(),
            Vec::new(),
        ),
        OracleSpec::KroneckerPower { base, k } => (
            vec![(1..=*k).map(|c| s(&format!("x{c}"), base.rows())).collect()],
            (1..=*k).map(|c| s(&format!("y{c}"), base.cols())).collect(),
        ),
    };
    (inputs.iter().map(|v| modes(v)).collect(), modes(&output))
}

/// Inputs rearranged to socket order for plain indexed access.
struct Inputs(Vec<Tensor>);

impl Inputs {
    fn at(&self, k: usize, idx: &[usize]) -> Scalar {
        self.0[k].get(idx)
    }
}

fn prepare(o: &OracleSpec, inputs: &[Tensor]) -> Result<(FieldKind, Inputs, Vec<Mode>), OracleError> {
    let (sockets, output) = socket_modes(o);
    if inputs.len() != sockets.len() {
        return Err(OracleError::ShapeMismatch(format!(
            "expected {} inputs, got {}",
            sockets.len(),
            inputs.len()
        )));
    }
    let field = inputs[0].field();
    o.check(field)?;
    let mut ordered = Vec::new();
    for (k, (t, socket)) in inputs.iter().zip(&sockets).enumerate() {
        if t.field() != field {
            return Err(FieldError::KindMismatch(field, t.field()).into());
        }
        let mut have: Vec<&Mode> = t.modes().iter().collect();
        let mut want: Vec<&Mode> = socket.iter().collect();
        have.sort_by(|a, b| a.id.cmp(&b.id));
        want.sort_by(|a, b| a.id.cmp(&b.id));
        if have != want {
            return Err(OracleError::ShapeMismatch(format!("input {k} must have modes {socket:?}")));
        }
        let ids: Vec<ModeId> = socket.iter().map(|m| m.id.clone()).collect();
        ordered.push(t.permuted(&ids)?);
    }
    Ok((field, Inputs(ordered), output))
}

fn check_terms(terms: u128) -> Result<(), OracleError> {
    if terms > TERM_LIMIT {
        Err(OracleError::TooLarge)
    } else {
        Ok(())
    }
}

fn add(a: &Scalar, b: &Scalar) -> Scalar {
    a.add(b).expect("kinds checked")
}

fn mul(a: &Scalar, b: &Scalar) -> Scalar {
    a.mul(b).expect("kinds checked")
}

/// Steps `idx` through `[0, len)^idx.len()` in row-major order.
fn next_index(idx: &mut [usize], len: usize) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < len {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// Steps to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for s in 0..p.len() {
        if !seen[s] {
            cycles += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = p[x];
            }
        }
    }
    cycles
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Evaluates the map on `inputs`, each carrying its socket's modes.
pub fn evaluate(o: &OracleSpec, inputs: &[Tensor]) -> Result<Tensor, OracleError> {
    let (field, x, output) = prepare(o, inputs)?;
    let zero = field.zero();
    let t = match o {
        OracleSpec::Matmul { n, r, m } => {
            check_terms((*n * *r * *m) as u128)?;
            Tensor::from_fn(output, field, |ij| {
                let mut acc = zero.clone();
                for k in 0..*r {
                    acc = add(&acc, &mul(&x.at(0, &[ij[0], k]), &x.at(1, &[k, ij[1]])));
                }
                acc
            })?
        }
        OracleSpec::Dft { n, root } => {
            check_terms((*n * *n) as u128)?;
            Tensor::from_fn(output, field, |j| {
                let mut acc = zero.clone();
                for i in 0..*n {
                    let w = root.pow((i * j[0]) as u64);
                    acc = add(&acc, &mul(&w, &x.at(0, &[i])));
                }
                acc
            })?
        }
        OracleSpec::Convolution(g) => {
            let n = g.order();
            check_terms((n * n) as u128)?;
            let mut h = vec![zero.clone(); n];
            for a in 0..n {
                for b in 0..n {
                    let t = g.op(a, b);
                    h[t] = add(&h[t], &mul(&x.at(0, &[a]), &x.at(1, &[b])));
                }
            }
            Tensor::from_scalars(output, field, h)?
        }
        OracleSpec::Kruskal { rows, r } => {
            let out_volume: u128 = rows.iter().map(|&n| n as u128).product();
            check_terms(out_volume * (*r * rows.len()) as u128)?;
            Tensor::from_fn(output, field, |i| {
                let mut acc = zero.clone();
                for c in 0..*r {
                    let mut p = field.one();
                    for (m, &im) in i.iter().enumerate() {
                        p = mul(&p, &x.at(m, &[im, c]));
                    }
                    acc = add(&acc, &p);
                }
                acc
            })?
        }
        OracleSpec::Permanent { n } | OracleSpec::Determinant { n } => {
            check_terms(factorial(*n) * *n as u128)?;
            let signed = matches!(o, OracleSpec::Determinant { .. });
            let mut sigma: Vec<usize> = (0..*n).collect();
            let mut acc = zero.clone();
            loop {
                let mut p = field.one();
                for (i, &s) in sigma.iter().enumerate() {
                    p = mul(&p, &x.at(i, &[s]));
                }
                if signed && (*n - cycle_count(&sigma)) % 2 == 1 {
                    p = p.neg();
                }
                acc = add(&acc, &p);
                if !next_permutation(&mut sigma) {
                    break;
                }
            }
            Tensor::scalar(acc)
        }
        OracleSpec::PForm { pattern, n } => {
            let v = pattern.vertex_count();
            let maps = (*n as u128).checked_pow(v as u32).ok_or(OracleError::TooLarge)?;
            check_terms(maps.saturating_mul(pattern.edge_count() as u128))?;
            let mut sigma = vec![0usize; v];
            let mut acc = zero.clone();
            loop {
                let mut p = field.one();
                for (k, e) in pattern.edges().iter().enumerate() {
                    let idx: Vec<usize> = e.iter().map(|&u| sigma[u]).collect();
                    p = mul(&p, &x.at(k, &idx));
                }
                acc = add(&acc, &p);
                if !next_index(&mut sigma, *n) {
                    break;
                }
            }
            Tensor::scalar(acc)
        }
        OracleSpec::KroneckerPower { base, k } => {
            let (s, t) = (base.rows(), base.cols());
            let terms = (s as u128 * t as u128).checked_pow(*k as u32).ok_or(OracleError::TooLarge)?;
            check_terms(terms.saturating_mul(*k as u128))?;
            Tensor::from_fn(output, field, |j| {
                let mut i = vec![0usize; *k];
                let mut acc = zero.clone();
                loop {
                    let mut p = x.at(0, &i);
                    for c in 0..*k {
                        p = mul(&p, &base.get(i[c], j[c]));
                    }
                    acc = add(&acc, &p);
                    if !next_index(&mut i, s) {
                        break;
                    }
                }
                acc
            })?
        }
    };
    Ok(t)
}

/// `T̂(A)` by evaluating the map on every combination of unit vectors.
///
/// Modes are the input sockets in order followed by the output socket.
pub fn base_tensor(o: &OracleSpec, field: FieldKind) -> Result<Tensor, OracleError> {
    o.check(field)?;
    let (sockets, output) = socket_modes(o);
    let all: Vec<Mode> = sockets.iter().flatten().chain(&output).cloned().collect();
    let volume = all.iter().fold(1u128, |a, m| a.saturating_mul(m.length as u128));
    check_terms(volume)?;
    let socket_volumes: Vec<usize> = sockets
        .iter()
        .map(|s| s.iter().map(|m| m.length).product())
        .collect();
    let out_volume: usize = output.iter().map(|m| m.length).product();
    let unit = |socket: &[Mode], pos: usize| -> Result<Tensor, OracleError> {
        let mut data = vec![field.zero(); socket.iter().map(|m| m.length).product()];
        data[pos] = field.one();
        Ok(Tensor::from_scalars(socket.to_vec(), field, data)?)
    };
    let mut data = Vec::with_capacity(volume as usize);
    let mut probe = vec![0usize; sockets.len()];
    loop {
        let inputs: Vec<Tensor> = sockets
            .iter()
            .zip(&probe)
            .map(|(s, &p)| unit(s, p))
            .collect::<Result<_, _>>()?;
        let y = evaluate(o, &inputs)?;
        let ids: Vec<ModeId> = output.iter().map(|m| m.id.clone()).collect();
        let y = y.permuted(&ids)?;
        data.extend((0..out_volume).map(|f| y.get_flat(f)));
        let mut d = probe.len();
        loop {
            if d == 0 {
                return Ok(Tensor::from_scalars(all, field, data)?);
            }
            d -= 1;
            probe[d] += 1;
            if probe[d] < socket_volumes[d] {
                break;
            }
            probe[d] = 0;
        }
    }
}
