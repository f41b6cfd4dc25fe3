use super::{assemble, bit_modes, constant, Axis, BuildError, Built, IoLayout};
use crate::execution::{ExecutionPlan, PlanTree};
use crate::field::{primitive_root_of_unity, FieldKind, Scalar};
use crate::network::{Network, SocketedNetwork};
use crate::oracle::{Group, OracleSpec};
use crate::tensor::{Mode, ModeId, Tensor, VertexId};

fn hadamard(a: &ModeId, b: &ModeId, field: FieldKind) -> Tensor {
    Tensor::from_i64(vec![Mode::new(a.clone(), 2), Mode::new(b.clone(), 2)], field, &[1, 1, 1, -1]).expect("H2")
}

fn bits(prefix: &str, k: usize) -> Vec<ModeId> {
    (0..k).map(|j| ModeId(format!("{prefix}{j}"))).collect()
}

fn msb_first(v: &[ModeId]) -> Vec<Mode> {
    let mut r = bit_modes(v);
    r.reverse();
    r
}

/// A primitive `2^k`-th root of unity, or a check of a given one.
fn root_for(k: u32, field: FieldKind, given: Option<Scalar>) -> Result<Scalar, BuildError> {
    let n = 1u64 << k;
    if let Some(r) = given {
        if r.kind() != field || !r.pow(n).is_one() || r.pow(n / 2).is_one() {
            return Err(BuildError::BadParams(format!("{r} is not a primitive {n}-th root of unity in {field}")));
        }
        return Ok(r);
    }
    match field {
        FieldKind::Prime(p) => primitive_root_of_unity(p, n).map_err(|_| BuildError::NoRoot(k, field)),
        _ if k == 1 => Ok(field.from_i64(-1)),
        _ => Err(BuildError::NoRoot(k, field)),
    }
}

/// Decimation-in-frequency stages from input bits `xs` to output bits `us`.
///
/// Stage `s` applies a twiddle over every live mode, then H2 from bit
/// `x_(k-s)` to bit `u_(s-1)`; the output index is `sum_i u_i 2^i`.
fn dif_stages(tag: &str, xs: &[ModeId], us: &[ModeId], root: &Scalar) -> Vec<(VertexId, Tensor)> {
    let k = xs.len();
    let field = root.kind();
    let one = field.one();
    let mut out = Vec::new();
    for s in 1..=k {
        let j = k - s;
        if s >= 2 {
            let live: Vec<Mode> = bit_modes(&xs[..=j]).into_iter().chain(bit_modes(&us[..s - 1])).collect();
            let twiddle = Tensor::from_fn(live, field, |idx| {
                if idx[j] == 0 {
                    return one.clone();
                }
                let m = idx[j + 1..].iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
                root.pow((m << j) % (1u64 << k))
            })
            .expect("twiddle");
            out.push((VertexId(format!("{tag}r{s}")), twiddle));
        }
        out.push((VertexId(format!("{tag}h{s}")), hadamard(&xs[j], &us[s - 1], field)));
    }
    out
}

/// H2 on each bit, `xs[j]` to `us[j]`.
fn hadamard_stages(tag: &str, xs: &[ModeId], us: &[ModeId], field: FieldKind) -> Vec<(VertexId, Tensor)> {
    xs.iter()
        .zip(us)
        .enumerate()
        .map(|(j, (x, u))| (VertexId(format!("{tag}h{}", j + 1)), hadamard(x, u, field)))
        .collect()
}

fn sweep(start: PlanTree, stages: &[(VertexId, Tensor)]) -> PlanTree {
    stages
        .iter()
        .fold(start, |acc, (v, _)| PlanTree::pair(acc, PlanTree::leaf(v.clone())))
}

fn add_all(d: &mut Network, stages: &[(VertexId, Tensor)]) -> Result<(), BuildError> {
    for (v, t) in stages {
        d.add_vertex(v.clone(), t.clone())?;
    }
    Ok(())
}

/// The `2^k`-point DFT as k Hadamard stages with twiddles; max-step cost `2^(k+1)`.
///
/// The output bits come out reversed, which the layout absorbs by naming.
pub fn fft_network(k: u32, field: FieldKind, root: Option<Scalar>) -> Result<Built, BuildError> {
    if k == 0 || k > 24 {
        return Err(BuildError::BadParams("fft needs 1 <= k <= 24".into()));
    }
    let root = root_for(k, field, root)?;
    let ku = k as usize;
    let (xs, us) = (bits("x", ku), bits("u", ku));
    let stages = dif_stages("", &xs, &us, &root);
    let mut d = Network::new();
    add_all(&mut d, &stages)?;
    d.add_placeholder("X", &xs)?;
    d.set_boundary(us.iter().cloned());
    let network = SocketedNetwork::new(d, vec!["X".into()], us.clone())?;
    let plan = ExecutionPlan::from_tree(&sweep(PlanTree::leaf("X"), &stages));
    let n = 1usize << k;
    let layout = IoLayout {
        inputs: vec![vec![Axis::new(Mode::new("x", n), msb_first(&xs))]],
        output: vec![Axis::new(Mode::new("y", n), msb_first(&us))],
    };
    assemble(
        format!("fft<{k}>"),
        network,
        plan,
        layout,
        Some(1 << (k + 1)),
        Some(OracleSpec::Dft { n, root }),
        field,
    )
}

/// The Walsh-Hadamard transform `H2^(⊗k)`: the FFT chain without twiddles.
pub fn wht_network(k: u32, field: FieldKind) -> Result<Built, BuildError> {
    if k == 0 || k > 24 {
        return Err(BuildError::BadParams("wht needs 1 <= k <= 24".into()));
    }
    let ku = k as usize;
    let (xs, us) = (bits("x", ku), bits("u", ku));
    let stages = hadamard_stages("", &xs, &us, field);
    let mut d = Network::new();
    add_all(&mut d, &stages)?;
    d.add_placeholder("X", &xs)?;
    d.set_boundary(us.iter().cloned());
    let network = SocketedNetwork::new(d, vec!["X".into()], us.clone())?;
    let plan = ExecutionPlan::from_tree(&sweep(PlanTree::leaf("X"), &stages));
    let layout = IoLayout {
        inputs: vec![(1..=ku)
            .map(|c| Axis::new(Mode::new(format!("x{c}"), 2), bit_modes(&xs[ku - c..=ku - c])))
            .collect()],
        output: (1..=ku)
            .map(|c| Axis::new(Mode::new(format!("y{c}"), 2), bit_modes(&us[ku - c..=ku - c])))
            .collect(),
    };
    let base = crate::tensor::Matrix::from_i64(2, 2, field, &[1, 1, 1, -1])?;
    assemble(
        format!("wht<{k}>"),
        network,
        plan,
        layout,
        Some(1 << (k + 1)),
        Some(OracleSpec::KroneckerPower { base, k: ku }),
        field,
    )
}

/// Convolution over `Z_(2^k)` or `Z_2^k`: two forward transforms joined on
/// shared frequency modes, an inverse transform and a `2^-k` scaling vertex.
pub fn convolution_network(group: Group, field: FieldKind) -> Result<Built, BuildError> {
    if field.characteristic() == 2 {
        return Err(BuildError::CharTwo(field));
    }
    let k = match group {
        Group::Cyclic(n) if n >= 2 && n.is_power_of_two() => n.trailing_zeros(),
        Group::Xor(k) if k >= 1 => k,
        _ => return Err(BuildError::BadParams("convolution needs Z_(2^k) or Z_2^k with k >= 1".into())),
    };
    if k > 24 {
        return Err(BuildError::BadParams("convolution needs k <= 24".into()));
    }
    let ku = k as usize;
    let (fs, gs, us, ws) = (bits("f", ku), bits("g", ku), bits("u", ku), bits("w", ku));
    let (f_st, g_st, i_st) = match group {
        Group::Cyclic(_) => {
            let root = root_for(k, field, None)?;
            let inv = root.inv()?;
            (
                dif_stages("f", &fs, &us, &root),
                dif_stages("g", &gs, &us, &root),
                dif_stages("i", &us, &ws, &inv),
            )
        }
        Group::Xor(_) => (
            hadamard_stages("f", &fs, &us, field),
            hadamard_stages("g", &gs, &us, field),
            hadamard_stages("i", &us, &ws, field),
        ),
    };
    let mut d = Network::new();
    for st in [&f_st, &g_st, &i_st] {
        add_all(&mut d, st)?;
    }
    let scale = field.from_i64(1 << k).inv()?;
    d.add_vertex("scale", constant(bit_modes(&ws), &scale))?;
    d.add_placeholder("F", &fs)?;
    d.add_placeholder("G", &gs)?;
    d.set_boundary(ws.iter().cloned());
    let network = SocketedNetwork::new(d, vec!["F".into(), "G".into()], ws.clone())?;
    let joined = PlanTree::pair(sweep(PlanTree::leaf("F"), &f_st), sweep(PlanTree::leaf("G"), &g_st));
    let tree = PlanTree::pair(sweep(joined, &i_st), PlanTree::leaf("scale"));
    let n = 1usize << k;
    let layout = IoLayout {
        inputs: vec![
            vec![Axis::new(Mode::new("f", n), msb_first(&fs))],
            vec![Axis::new(Mode::new("g", n), msb_first(&gs))],
        ],
        output: vec![Axis::new(Mode::new("h", n), msb_first(&ws))],
    };
    assemble(
        format!("conv<{}>", group_name(group)),
        network,
        ExecutionPlan::from_tree(&tree),
        layout,
        Some(1 << (k + 1)),
        Some(OracleSpec::Convolution(group)),
        field,
    )
}

fn group_name(g: Group) -> String {
    match g {
        Group::Cyclic(n) => format!("Z{n}"),
        Group::Xor(k) => format!("Z2^{k}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::plan_cost;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(b: &Built, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<Tensor> = b
            .layout
            .logical_inputs()
            .into_iter()
            .map(|m| Tensor::from_fn(m, b.field, |_| b.field.from_i64(rng.gen_range(-20..=20))).unwrap())
            .collect();
        let (got, report) = b.evaluate(&inputs).unwrap();
        assert_eq!(Some(got), b.oracle_value(&inputs).unwrap(), "{}", b.name);
        assert!(report.max_cost <= b.bound.unwrap());
    }

    #[test]
    fn fft_matches_dft() {
        let gf17 = FieldKind::Prime(17);
        for k in 1..=4 {
            check(&fft_network(k, gf17, None).unwrap(), k as u64);
        }
        check(&fft_network(1, FieldKind::Rational, None).unwrap(), 1);
        check(&fft_network(5, FieldKind::Prime(97), None).unwrap(), 5);
    }

    #[test]
    fn fft_sweep_cost() {
        for k in 1..=8 {
            let b = fft_network(k, FieldKind::Prime(257), None).unwrap();
            assert_eq!(plan_cost(&b.network.network, &b.plan).unwrap().max_cost, 1 << (k + 1));
        }
    }

    #[test]
    fn fft_gf17_k3_root_two() {
        let f = FieldKind::Prime(17);
        let b = fft_network(3, f, Some(f.from_i64(2))).unwrap();
        let x = Tensor::from_i64(vec![Mode::new("x", 8)], f, &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        let (y, _) = b.evaluate(&[x.clone()]).unwrap();
        let want: Vec<Scalar> = (0..8u64)
            .map(|j| {
                (0..8u64).fold(f.zero(), |acc, i| {
                    acc.add(&f.from_i64(i as i64 + 1).mul(&f.from_i64(2).pow(i * j)).unwrap()).unwrap()
                })
            })
            .collect();
        assert_eq!(y.scalars(), want);
    }

    #[test]
    fn missing_roots() {
        assert_eq!(fft_network(3, FieldKind::Prime(7), None).unwrap_err(), BuildError::NoRoot(3, FieldKind::Prime(7)));
        assert!(matches!(fft_network(2, FieldKind::Rational, None), Err(BuildError::NoRoot(..))));
        let f = FieldKind::Prime(17);
        assert!(fft_network(3, f, Some(f.from_i64(4))).is_err());
    }

    #[test]
    fn wht_of_unit_vector_is_all_ones() {
        let q = FieldKind::Rational;
        let b = wht_network(3, q).unwrap();
        let modes = b.layout.logical_inputs().remove(0);
        let e1 = Tensor::from_fn(modes, q, |i| q.from_i64(i.iter().all(|&d| d == 0) as i64)).unwrap();
        let (y, _) = b.evaluate(&[e1]).unwrap();
        assert!(y.scalars().iter().all(|s| s.is_one()));
        check(&b, 3);
    }

    #[test]
    fn convolutions_match_oracle() {
        for k in 1..=4 {
            check(&convolution_network(Group::Cyclic(1 << k), FieldKind::Prime(17)).unwrap(), k as u64);
            check(&convolution_network(Group::Xor(k), FieldKind::Rational).unwrap(), k as u64);
        }
        check(&convolution_network(Group::Cyclic(2), FieldKind::Rational).unwrap(), 0);
    }

    #[test]
    fn convolution_rejections() {
        assert_eq!(
            convolution_network(Group::Xor(2), FieldKind::Prime(2)).unwrap_err(),
            BuildError::CharTwo(FieldKind::Prime(2))
        );
        assert!(matches!(
            convolution_network(Group::Cyclic(8), FieldKind::Prime(7)),
            Err(BuildError::NoRoot(3, _))
        ));
        assert!(convolution_network(Group::Cyclic(6), FieldKind::Rational).is_err());
    }
}
