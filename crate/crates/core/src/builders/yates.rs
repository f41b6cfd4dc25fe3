use super::{assemble, Axis, BuildError, Built, IoLayout};
use crate::execution::{ExecutionPlan, PlanTree};
use crate::field::FieldKind;
use crate::kronpow::{copy_mode, lift};
use crate::network::{Network, SocketedNetwork};
use crate::oracle::OracleSpec;
use crate::tensor::{Matrix, Mode, ModeId};

/// Named 2x2 base matrices: `zeta`, `mobius`, `hadamard`.
pub fn yates_preset(name: &str, field: FieldKind) -> Result<Matrix, BuildError> {
    let data: [i64; 4] = match name {
        "zeta" => [1, 1, 0, 1],
        "mobius" => [1, -1, 0, 1],
        "hadamard" => [1, 1, 1, -1],
        other => return Err(BuildError::BadParams(format!("unknown Yates base {other:?}"))),
    };
    Ok(Matrix::from_i64(2, 2, field, &data)?)
}

/// The map `x -> x B^(⊗k)` (input indexes rows) by lifting the two-vertex
/// linear-map realization; bound `max(s,t)^k min(s,t)`.
pub fn yates_network(base: &Matrix, k: usize) -> Result<Built, BuildError> {
    if k == 0 {
        return Err(BuildError::BadParams("k must be positive".into()));
    }
    let field = base.field();
    let (s, t) = (base.rows(), base.cols());
    let mut d = Network::new();
    d.add_vertex("B", base.to_tensor("x", "y")?)?;
    d.add_placeholder("X", &[ModeId::from("x")])?;
    d.set_boundary(["y"]);
    let single = SocketedNetwork::new(d, vec!["X".into()], vec!["y".into()])?;
    let plan = ExecutionPlan::from_tree(&PlanTree::pair(PlanTree::leaf("X"), PlanTree::leaf("B")));
    let lifted = lift(&single, &plan, k)?;
    let axis = |logical: String, base: &str, c: usize, len: usize| {
        Axis::new(Mode::new(logical, len), vec![Mode::new(copy_mode(&ModeId::from(base), c), len)])
    };
    let layout = IoLayout {
        inputs: vec![(1..=k).map(|c| axis(format!("x{c}"), "x", c, s)).collect()],
        output: (1..=k).map(|c| axis(format!("y{c}"), "y", c, t)).collect(),
    };
    assemble(
        format!("yates<{s}x{t},{k}>"),
        lifted.network,
        lifted.plan,
        layout,
        Some(lifted.claimed_bound),
        Some(OracleSpec::KroneckerPower { base: base.clone(), k }),
        field,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    const Q: FieldKind = FieldKind::Rational;

    fn logical(b: &Built, data: &[i64]) -> Tensor {
        Tensor::from_i64(b.layout.logical_inputs().remove(0), Q, data).unwrap()
    }

    #[test]
    fn zeta_of_empty_set_indicator() {
        let b = yates_network(&yates_preset("zeta", Q).unwrap(), 2).unwrap();
        let (y, _) = b.evaluate(&[logical(&b, &[1, 0, 0, 0])]).unwrap();
        assert_eq!(y.scalars(), vec![Q.one(); 4]);
    }

    #[test]
    fn mobius_inverts_zeta() {
        let zeta = yates_network(&yates_preset("zeta", Q).unwrap(), 3).unwrap();
        let mobius = yates_network(&yates_preset("mobius", Q).unwrap(), 3).unwrap();
        let x = logical(&zeta, &[3, -1, 4, 1, -5, 9, 2, -6]);
        let (z, _) = zeta.evaluate(&[x.clone()]).unwrap();
        let z = z.renamed(|m| ModeId(m.as_str().replace('y', "x"))).unwrap();
        let (back, _) = mobius.evaluate(&[z]).unwrap();
        assert_eq!(back.scalars(), x.scalars());
    }

    #[test]
    fn rectangular_base_matches_oracle_and_bound() {
        let base = Matrix::from_i64(2, 3, Q, &[1, 2, 0, -1, 1, 3]).unwrap();
        for k in 1..=3 {
            let b = yates_network(&base, k).unwrap();
            let vol = 2usize.pow(k as u32);
            let x = logical(&b, &(0..vol as i64).map(|v| v * v - 3).collect::<Vec<_>>());
            let (y, report) = b.evaluate(&[x.clone()]).unwrap();
            assert_eq!(Some(y), b.oracle_value(&[x]).unwrap());
            assert_eq!(b.bound, Some(3u64.pow(k as u32) * 2));
            assert!(report.max_cost <= b.bound.unwrap());
        }
    }
}
