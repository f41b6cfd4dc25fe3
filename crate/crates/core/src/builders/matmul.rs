use super::{assemble, bit_modes, bits_for, identity, ids, Axis, BuildError, Built, IoLayout};
use crate::execution::{ExecutionPlan, PlanTree};
use crate::field::FieldKind;
use crate::network::{Network, SocketedNetwork};
use crate::oracle::OracleSpec;
use crate::tensor::{Mode, ModeId, Tensor, VertexId};

/// Rank of the Strassen decomposition of the 2x2 product.
pub const STRASSEN_D: u64 = 7;
/// Side length of the base product.
pub const STRASSEN_C: u64 = 2;

/// Coefficients of `A_ik` (then `B_kj`) in the products `M_1..M_7`, indexed `2i+k`.
const ALPHA: [[i64; 4]; 7] = [
    [1, 0, 0, 1],
    [0, 0, 1, 1],
    [1, 0, 0, 0],
    [0, 0, 0, 1],
    [1, 1, 0, 0],
    [-1, 0, 1, 0],
    [0, 1, 0, -1],
];
const BETA: [[i64; 4]; 7] = [
    [1, 0, 0, 1],
    [1, 0, 0, 0],
    [0, 1, 0, -1],
    [-1, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 1, 0, 0],
    [0, 0, 1, 1],
];
/// Coefficient of `M_l` in `C_ij`, indexed `2i+j`.
const GAMMA: [[i64; 4]; 7] = [
    [1, 0, 0, 1],
    [0, 0, 1, -1],
    [0, 1, 0, 1],
    [1, 0, 1, 0],
    [-1, 1, 0, 0],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
];

fn component(table: &[[i64; 4]; 7], a: &ModeId, b: &ModeId, l: &ModeId, field: FieldKind) -> Tensor {
    let modes = vec![Mode::new(a.clone(), 2), Mode::new(b.clone(), 2), Mode::new(l.clone(), 7)];
    Tensor::from_fn(modes, field, |i| field.from_i64(table[i[2]][2 * i[0] + i[1]])).expect("component")
}

/// The Strassen tensors α(i1,k1,l), β(k2,j1,l), γ(i2,j2,l).
///
/// Checks that `sum_l α β γ` is the 2x2 matrix multiplication tensor.
pub fn strassen_components(field: FieldKind) -> Result<[Tensor; 3], BuildError> {
    let m = |s: &str| ModeId::from(s);
    let parts = [
        component(&ALPHA, &m("i1"), &m("k1"), &m("l"), field),
        component(&BETA, &m("k2"), &m("j1"), &m("l"), field),
        component(&GAMMA, &m("i2"), &m("j2"), &m("l"), field),
    ];
    let mut d = Network::new();
    for (name, t) in ["alpha", "beta", "gamma"].iter().zip(&parts) {
        d.add_vertex(*name, t.clone())?;
    }
    d.set_boundary(["i1", "k1", "k2", "j1", "i2", "j2"]);
    let one = field.one();
    let zero = field.zero();
    let want = Tensor::from_fn(
        ["i1", "k1", "k2", "j1", "i2", "j2"].iter().map(|s| Mode::new(*s, 2)).collect(),
        field,
        |i| {
            if i[0] == i[4] && i[1] == i[2] && i[3] == i[5] {
                one.clone()
            } else {
                zero.clone()
            }
        },
    )?;
    if d.value()? != want {
        return Err(BuildError::StrassenCheck);
    }
    Ok(parts)
}

fn chain(start: PlanTree, leaves: &[VertexId]) -> PlanTree {
    leaves
        .iter()
        .fold(start, |acc, v| PlanTree::pair(acc, PlanTree::leaf(v.clone())))
}

/// The core of a `2^a x 2^b` times `2^b x 2^c` product: σ Strassen copies on
/// the low bits and identity vertices carrying the remaining bits.
pub(crate) struct RectCore {
    pub network: Network,
    pub sigma: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub x_rows: Vec<ModeId>,
    pub x_inner: Vec<ModeId>,
    pub y_inner: Vec<ModeId>,
    pub y_cols: Vec<ModeId>,
    pub out_rows: Vec<ModeId>,
    pub out_cols: Vec<ModeId>,
    x_swaps: Vec<VertexId>,
    y_swaps: Vec<VertexId>,
    alphas: Vec<VertexId>,
    betas: Vec<VertexId>,
    gammas: Vec<VertexId>,
}

impl RectCore {
    pub fn new(a0: usize, b: usize, c0: usize, field: FieldKind) -> Result<Self, BuildError> {
        let sigma = b.min(a0.max(c0));
        let (a, c) = (a0.max(sigma), c0.max(sigma));
        let [alpha, beta, gamma] = strassen_components(field)?;
        let mut network = Network::new();
        let copy = |base: &str, t: usize| ModeId(format!("{base}#{t}"));
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut gammas = Vec::new();
        for t in 1..=sigma {
            for (name, tensor, list) in [
                ("alpha", &alpha, &mut alphas),
                ("beta", &beta, &mut betas),
                ("gamma", &gamma, &mut gammas),
            ] {
                let id = VertexId(format!("{name}#{t}"));
                network.add_vertex(id.clone(), tensor.renamed(|m| copy(m.as_str(), t))?)?;
                list.push(id);
            }
        }
        let strassen = |base: &str| (1..=sigma).map(|t| copy(base, t)).collect::<Vec<_>>();
        let (xr, zr) = (ids("xr", a - sigma), ids("zr", a - sigma));
        let (xk, yk) = (ids("xk", b - sigma), ids("yk", b - sigma));
        let (yc, zc) = (ids("yc", c - sigma), ids("zc", c - sigma));
        let mut swaps = [Vec::new(), Vec::new()];
        for (prefix, from, to, side) in [("ir", &xr, &zr, 0), ("ik", &xk, &yk, 0), ("ic", &yc, &zc, 1)] {
            for (t, (p, q)) in from.iter().zip(to).enumerate() {
                let id = VertexId(format!("{prefix}{}", t + 1));
                network.add_vertex(id.clone(), identity(p, q, 2, field))?;
                swaps[side].push(id);
            }
        }
        let [x_swaps, y_swaps] = swaps;
        let cat = |outer: &[ModeId], inner: Vec<ModeId>| [outer.to_vec(), inner].concat();
        let out_rows = cat(&zr, strassen("i2"));
        let out_cols = cat(&zc, strassen("j2"));
        network.set_boundary(out_rows.iter().chain(&out_cols).cloned());
        Ok(RectCore {
            network,
            sigma,
            a,
            b,
            c,
            x_rows: cat(&xr, strassen("i1")),
            x_inner: cat(&xk, strassen("k1")),
            y_inner: cat(&yk, strassen("k2")),
            y_cols: cat(&yc, strassen("j1")),
            out_rows,
            out_cols,
            x_swaps,
            y_swaps,
            alphas,
            betas,
            gammas,
        })
    }

    /// The plan tree, given subtrees producing the X and Y operands.
    pub fn tree(&self, x: PlanTree, y: PlanTree) -> PlanTree {
        let xs = chain(chain(x, &self.x_swaps), &self.alphas);
        let ys = chain(chain(y, &self.y_swaps), &self.betas);
        chain(PlanTree::pair(xs, ys), &self.gammas)
    }

    /// `d^σ c^2 2^(a+b+c-3σ)`.
    pub fn bound(&self) -> u64 {
        STRASSEN_D
            .saturating_pow(self.sigma as u32)
            .saturating_mul(STRASSEN_C * STRASSEN_C)
            .saturating_mul(1u64 << (self.a + self.b + self.c - 3 * self.sigma))
    }
}

/// An `n x r` times `r x m` product over Strassen copies, zero-padded to powers of two.
pub fn rect_matmul_network(n: usize, r: usize, m: usize, field: FieldKind) -> Result<Built, BuildError> {
    if n == 0 || r == 0 || m == 0 {
        return Err(BuildError::BadParams("matrix dimensions must be positive".into()));
    }
    let core = RectCore::new(bits_for(n), bits_for(r), bits_for(m), field)?;
    let mut network = core.network.clone();
    let x_modes = [core.x_rows.clone(), core.x_inner.clone()].concat();
    let y_modes = [core.y_inner.clone(), core.y_cols.clone()].concat();
    for id in x_modes.iter().chain(&y_modes) {
        network.add_mode(id.clone(), 2)?;
    }
    network.add_placeholder("X", &x_modes)?;
    network.add_placeholder("Y", &y_modes)?;
    let output = [core.out_rows.clone(), core.out_cols.clone()].concat();
    let network = SocketedNetwork::new(network, vec!["X".into(), "Y".into()], output)?;
    let plan = ExecutionPlan::from_tree(&core.tree(PlanTree::leaf("X"), PlanTree::leaf("Y")));
    let layout = IoLayout {
        inputs: vec![
            vec![
                Axis::new(Mode::new("a_i", n), bit_modes(&core.x_rows)),
                Axis::new(Mode::new("a_k", r), bit_modes(&core.x_inner)),
            ],
            vec![
                Axis::new(Mode::new("b_k", r), bit_modes(&core.y_inner)),
                Axis::new(Mode::new("b_j", m), bit_modes(&core.y_cols)),
            ],
        ],
        output: vec![
            Axis::new(Mode::new("c_i", n), bit_modes(&core.out_rows)),
            Axis::new(Mode::new("c_j", m), bit_modes(&core.out_cols)),
        ],
    };
    let name = if n == r && r == m {
        format!("matmul<{n}>")
    } else {
        format!("rect_matmul<{n},{r},{m}>")
    };
    assemble(
        name,
        network,
        plan,
        layout,
        Some(core.bound()),
        Some(OracleSpec::Matmul { n, r, m }),
        field,
    )
}

/// An `n x n` product along the lifted Strassen plan; bound `7^k 4` for `k = ⌈log2 n⌉`.
pub fn matmul_network(n: usize, field: FieldKind) -> Result<Built, BuildError> {
    rect_matmul_network(n, n, n, field)
}

/// The single-copy Strassen network for 2x2 products.
pub fn strassen_network(field: FieldKind) -> Result<Built, BuildError> {
    let mut b = matmul_network(2, field)?;
    b.name = "strassen".into();
    Ok(b)
}
