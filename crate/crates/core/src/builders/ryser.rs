use super::{assemble, Axis, BuildError, Built, IoLayout};
use crate::execution::{ExecutionPlan, PlanTree};
use crate::field::FieldKind;
use crate::network::{Network, SocketedNetwork};
use crate::oracle::OracleSpec;
use crate::tensor::{Mode, ModeId, Tensor, VertexId};

/// Ryser's formula as a star on a subset mode `S` of length `2^n`.
///
/// `Q_i[S, j] = [j ∈ S]`, with `Q_1` also carrying `(-1)^(n-|S|)`.
/// Each socket is absorbed by its `Q_i` first, then the subset vectors are
/// multiplied pointwise; max-step cost `n 2^n`.
pub fn ryser_network(n: usize, field: FieldKind) -> Result<Built, BuildError> {
    if n == 0 || n > 20 {
        return Err(BuildError::BadParams("ryser needs 1 <= n <= 20".into()));
    }
    let subsets = 1usize << n;
    let mut d = Network::new();
    let mut tree: Option<PlanTree> = None;
    let mut sockets = Vec::new();
    let mut layout = IoLayout::default();
    for i in 1..=n {
        let col = ModeId(format!("c{i}"));
        let modes = vec![Mode::new("S", subsets), Mode::new(col.clone(), n)];
        let q = Tensor::from_fn(modes, field, |idx| {
            let (s, j) = (idx[0], idx[1]);
            if s >> j & 1 == 0 {
                return field.zero();
            }
            if i == 1 && (n - s.count_ones() as usize) % 2 == 1 {
                field.from_i64(-1)
            } else {
                field.one()
            }
        })?;
        let qid = VertexId(format!("Q{i}"));
        let xid = VertexId(format!("X{i}"));
        d.add_vertex(qid.clone(), q)?;
        d.add_placeholder(xid.clone(), &[col.clone()])?;
        let part = PlanTree::pair(PlanTree::leaf(xid.clone()), PlanTree::leaf(qid));
        tree = Some(match tree {
            None => part,
            Some(t) => PlanTree::pair(t, part),
        });
        sockets.push(xid);
        layout
            .inputs
            .push(vec![Axis::new(Mode::new(format!("x{i}"), n), vec![Mode::new(col, n)])]);
    }
    let network = SocketedNetwork::new(d, sockets, Vec::new())?;
    assemble(
        format!("ryser<{n}>"),
        network,
        ExecutionPlan::from_tree(&tree.unwrap()),
        layout,
        Some((n as u64) << n),
        Some(OracleSpec::Permanent { n }),
        field,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::plan_cost;

    #[test]
    fn permanent_of_ones_is_factorial() {
        let q = FieldKind::Rational;
        for n in 1..=5 {
            let b = ryser_network(n, q).unwrap();
            let inputs: Vec<Tensor> = b
                .layout
                .logical_inputs()
                .into_iter()
                .map(|m| Tensor::from_fn(m, q, |_| q.one()).unwrap())
                .collect();
            let (v, _) = b.evaluate(&inputs).unwrap();
            let fact: i64 = (1..=n as i64).product();
            assert_eq!(v.get(&[]), q.from_i64(fact));
            assert_eq!(b.oracle_value(&inputs).unwrap().unwrap().get(&[]), q.from_i64(fact));
        }
    }

    #[test]
    fn cost_is_n_two_to_the_n() {
        for n in 1..=8 {
            let b = ryser_network(n, FieldKind::Prime(101)).unwrap();
            assert_eq!(plan_cost(&b.network.network, &b.plan).unwrap().max_cost, (n as u64) << n);
        }
    }

    #[test]
    fn arbitrary_matrix() {
        let q = FieldKind::Rational;
        let b = ryser_network(3, q).unwrap();
        let rows = [[1, 2, 3], [4, 5, 6], [7, 8, 10]];
        let inputs: Vec<Tensor> = b
            .layout
            .logical_inputs()
            .into_iter()
            .zip(rows)
            .map(|(m, r)| Tensor::from_i64(m, q, &r).unwrap())
            .collect();
        let (v, _) = b.evaluate(&inputs).unwrap();
        assert_eq!(v.get(&[]), q.from_i64(463));
    }
}
