use super::matmul::RectCore;
use super::{assemble, bit_modes, bits_for, constant, identity, selector, Axis, BuildError, Built, IoLayout};
use crate::execution::{ExecutionPlan, PlanTree};
use crate::field::FieldKind;
use crate::network::SocketedNetwork;
use crate::oracle::OracleSpec;
use crate::tensor::{ModeId, Mode, VertexId};

/// The Kruskal operator of `l` factors of shape `n x r`.
///
/// The factors are split into two halves whose row-wise Khatri-Rao products
/// are multiplied by the rectangular Strassen core; each factor's rank bits
/// reach the shared inner modes through identity vertices. An odd `l` is
/// padded with an all-ones factor whose output bits are pinned to 0.
pub fn kruskal_network(l: usize, n: usize, r: usize, field: FieldKind) -> Result<Built, BuildError> {
    if l == 0 || n == 0 || r == 0 {
        return Err(BuildError::BadParams("kruskal needs l, n, r >= 1".into()));
    }
    let padded = l + l % 2;
    let h = padded / 2;
    let (bn, br) = (bits_for(n), bits_for(r));
    let core = RectCore::new(h * bn, br, h * bn, field)?;
    debug_assert_eq!((core.a, core.c), (h * bn, h * bn));
    let mut d = core.network.clone();
    let mut sockets = Vec::new();
    let mut layout = IoLayout::default();
    let mut halves = [Vec::new(), Vec::new()];
    let mut boundary = Vec::new();
    let mut selectors = Vec::new();
    for m in 1..=padded {
        let (half, g) = if m <= h { (0, m - 1) } else { (1, m - h - 1) };
        let (rows, outs, inner) = if half == 0 {
            (&core.x_rows, &core.out_rows, &core.x_inner)
        } else {
            (&core.y_cols, &core.out_cols, &core.y_inner)
        };
        let rows = &rows[g * bn..(g + 1) * bn];
        let outs = &outs[g * bn..(g + 1) * bn];
        if m > l {
            let modes: Vec<Mode> = bit_modes(rows).into_iter().chain(bit_modes(inner)).collect();
            d.add_vertex("P", constant(modes, &field.one()))?;
            halves[half].push(PlanTree::leaf("P"));
            for (t, o) in outs.iter().enumerate() {
                let id = VertexId(format!("E{}", t + 1));
                d.add_vertex(id.clone(), selector(o, 2, field))?;
                selectors.push(id);
            }
            continue;
        }
        let own: Vec<ModeId> = (1..=br).map(|t| ModeId(format!("a{m}r{t}"))).collect();
        let mut part = PlanTree::leaf(format!("A{m}"));
        for (t, (o, i)) in own.iter().zip(inner).enumerate() {
            let id = VertexId(format!("I{m}_{}", t + 1));
            d.add_vertex(id.clone(), identity(o, i, 2, field))?;
            part = PlanTree::pair(part, PlanTree::leaf(id));
        }
        let socket_modes: Vec<ModeId> = rows.iter().chain(&own).cloned().collect();
        for id in &socket_modes {
            d.add_mode(id.clone(), 2)?;
        }
        d.add_placeholder(format!("A{m}"), &socket_modes)?;
        sockets.push(VertexId(format!("A{m}")));
        halves[half].push(part);
        layout.inputs.push(vec![
            Axis::new(Mode::new(format!("a{m}_i"), n), bit_modes(rows)),
            Axis::new(Mode::new(format!("a{m}_r"), r), bit_modes(&own)),
        ]);
        layout.output.push(Axis::new(Mode::new(format!("y{m}"), n), bit_modes(outs)));
        boundary.extend(outs.iter().cloned());
    }
    d.set_boundary(boundary.iter().cloned());
    let network = SocketedNetwork::new(d, sockets, boundary)?;
    let [x, y] = halves.map(|parts| parts.into_iter().reduce(PlanTree::pair).expect("non-empty half"));
    let tree = selectors
        .into_iter()
        .fold(core.tree(x, y), |acc, e| PlanTree::pair(acc, PlanTree::leaf(e)));
    assemble(
        format!("kruskal<{l},{n},{r}>"),
        network,
        ExecutionPlan::from_tree(&tree),
        layout,
        Some(core.bound()),
        Some(OracleSpec::Kruskal { rows: vec![n; l], r }),
        field,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(l: usize, n: usize, r: usize, field: FieldKind) {
        let b = kruskal_network(l, n, r, field).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64((l * 100 + n * 10 + r) as u64);
        let inputs: Vec<Tensor> = b
            .layout
            .logical_inputs()
            .into_iter()
            .map(|m| Tensor::from_fn(m, field, |_| field.from_i64(rng.gen_range(-5..=5))).unwrap())
            .collect();
        let (got, report) = b.evaluate(&inputs).unwrap();
        assert_eq!(Some(got), b.oracle_value(&inputs).unwrap(), "{}", b.name);
        assert!(report.max_cost <= b.bound.unwrap(), "{}: {} > {:?}", b.name, report.max_cost, b.bound);
    }

    #[test]
    fn matches_oracle_even_and_odd() {
        for (l, n, r) in [(1, 2, 2), (2, 2, 2), (2, 3, 5), (3, 2, 2), (3, 2, 3), (4, 2, 2), (5, 2, 2), (4, 3, 2)] {
            check(l, n, r, FieldKind::Rational);
        }
        check(3, 2, 4, FieldKind::Prime(101));
    }

    #[test]
    fn two_factors_is_a_product() {
        let b = kruskal_network(2, 4, 4, FieldKind::Rational).unwrap();
        let m = crate::builders::matmul_network(4, FieldKind::Rational).unwrap();
        assert_eq!(b.bound, m.bound);
    }
}
