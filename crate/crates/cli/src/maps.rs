use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tensornet::builders::{self, parse_pattern, GeneratorParams};
use tensornet::field::{primitive_root_of_unity, FieldKind, Scalar};
use tensornet::oracle::{Group, OracleSpec};
use tensornet::tensor::{Mode, Tensor};

use crate::{invalid, Failure, Params};

pub fn generator_params(p: &Params) -> Result<GeneratorParams, Failure> {
    let base = match p.base.as_deref() {
        None => None,
        Some(b) if b.trim_start().starts_with('[') => {
            Some(serde_json::from_str(b).map_err(|e| Failure::Usage(format!("--base: {e}")))?)
        }
        Some(b) => Some(serde_json::Value::String(b.to_string())),
    };
    let pattern = match (&p.pattern, &p.pattern_file) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give --pattern or --pattern-file, not both".into())),
        (Some(t), None) => Some(t.clone()),
        (None, Some(path)) => Some(
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        ),
        (None, None) => None,
    };
    Ok(GeneratorParams {
        n: p.n,
        r: p.r,
        m: p.m,
        k: p.k,
        l: p.l,
        group: p.group.clone(),
        base,
        pattern,
        root: p.root.clone(),
    })
}

/// The canonical family name for an oracle or map name.
pub fn canonical(name: &str) -> Option<&'static str> {
    Some(match name {
        "matmul" | "mm" => "matmul",
        "dft" | "fft" => "dft",
        "conv" | "convolution" => "conv",
        "kruskal" => "kruskal",
        "perm" | "permanent" => "permanent",
        "det" | "determinant" => "determinant",
        "pform" => "pform",
        "kron" | "yates" | "wht" => "kron",
        _ => return None,
    })
}

pub fn family(o: &OracleSpec) -> &'static str {
    match o {
        OracleSpec::Matmul { .. } => "matmul",
        OracleSpec::Dft { .. } => "dft",
        OracleSpec::Convolution(_) => "conv",
        OracleSpec::Kruskal { .. } => "kruskal",
        OracleSpec::Permanent { .. } => "permanent",
        OracleSpec::Determinant { .. } => "determinant",
        OracleSpec::PForm { .. } => "pform",
        OracleSpec::KroneckerPower { .. } => "kron",
    }
}

fn need(v: Option<usize>, name: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{name}")))
}

/// A reference map from its name and parameters.
pub fn oracle_spec(name: &str, p: &Params, field: FieldKind) -> Result<OracleSpec, Failure> {
    let family = canonical(name).ok_or_else(|| Failure::Usage(format!("unknown map {name:?}")))?;
    let g = generator_params(p)?;
    Ok(match family {
        "matmul" => {
            let n = need(p.n, "n")?;
            OracleSpec::Matmul { n, r: p.r.unwrap_or(n), m: p.m.unwrap_or(n) }
        }
        "permanent" => OracleSpec::Permanent { n: need(p.n, "n")? },
        "determinant" => OracleSpec::Determinant { n: need(p.n, "n")? },
        "kruskal" => {
            let n = need(p.n, "n")?;
            OracleSpec::Kruskal { rows: vec![n; need(p.l, "l")?], r: p.r.unwrap_or(n) }
        }
        "pform" => {
            let pattern = parse_pattern(g.pattern.as_deref().unwrap_or("K3")).map_err(invalid)?;
            OracleSpec::PForm { pattern, n: need(p.n, "n")? }
        }
        "conv" => {
            let k = need(p.k, "k")? as u32;
            OracleSpec::Convolution(match p.group.as_deref().unwrap_or("cyclic") {
                "cyclic" => Group::Cyclic(1 << k),
                "xor" => Group::Xor(k),
                other => return Err(Failure::Usage(format!("unknown group {other:?}"))),
            })
        }
        "dft" => {
            let n = 1usize << need(p.k, "k")?;
            let root = match (&p.root, field) {
                (Some(r), _) => field.parse_scalar(r).map_err(invalid)?,
                (None, FieldKind::Prime(q)) => primitive_root_of_unity(q, n as u64).map_err(invalid)?,
                (None, _) if n <= 2 => field.from_i64(if n == 2 { -1 } else { 1 }),
                (None, _) => return Err(Failure::Invalid(format!("no default root of order {n} in {field}"))),
            };
            OracleSpec::Dft { n, root }
        }
        _ => builders::build("yates", &g, field)
            .map_err(invalid)?
            .oracle
            .expect("yates records its oracle"),
    })
}

pub fn random_scalar(field: FieldKind, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        FieldKind::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
        _ => field.from_i64(rng.gen_range(-9..=9)),
    }
}

pub fn random_tensor(modes: Vec<Mode>, field: FieldKind, rng: &mut ChaCha8Rng) -> Result<Tensor, Failure> {
    Tensor::from_fn(modes, field, |_| random_scalar(field, rng)).map_err(invalid)
}

fn close(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Float(x), Scalar::Float(y)) => (x - y).abs() <= 1e-9 * y.abs().max(1.0),
        _ => a == b,
    }
}

/// The first position where two tensors differ, or `None` when they agree.
pub fn first_difference(got: &Tensor, want: &Tensor) -> Result<Option<String>, Failure> {
    let want = want.canonical();
    let got = got.canonical();
    if got.modes() != want.modes() {
        return Ok(Some(format!(
            "modes differ: got {:?}, expected {:?}",
            got.mode_ids(),
            want.mode_ids()
        )));
    }
    let shape = want.shape();
    for offset in 0..want.volume() {
        let (a, b) = (got.get_flat(offset), want.get_flat(offset));
        if !close(&a, &b) {
            let mut rest = offset;
            let mut idx = vec![0; shape.len()];
            for (i, &len) in shape.iter().enumerate().rev() {
                idx[i] = rest % len;
                rest /= len;
            }
            let at: Vec<String> = want.modes().iter().zip(&idx).map(|(m, i)| format!("{}={i}", m.id)).collect();
            return Ok(Some(format!("[{}] got {a}, expected {b}", at.join(", "))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn aliases_resolve_to_families() {
        assert_eq!(canonical("perm"), Some("permanent"));
        assert_eq!(canonical("fft"), Some("dft"));
        assert_eq!(canonical("wht"), Some("kron"));
        assert_eq!(canonical("nope"), None);
        let o = oracle_spec("det", &Params { n: Some(3), ..Default::default() }, FieldKind::Rational).unwrap();
        assert_eq!(family(&o), "determinant");
    }

    #[test]
    fn dft_root_defaults() {
        let p = Params { k: Some(3), ..Default::default() };
        assert!(matches!(oracle_spec("dft", &p, FieldKind::Prime(17)), Ok(OracleSpec::Dft { n: 8, .. })));
        assert!(matches!(oracle_spec("dft", &p, FieldKind::Rational), Err(Failure::Invalid(_))));
        assert!(matches!(oracle_spec("matmul", &Params::default(), FieldKind::Rational), Err(Failure::Usage(_))));
    }

    #[test]
    fn base_accepts_rows_or_presets() {
        let rows = Params { base: Some("[[1, 1], [0, 1]]".into()), ..Default::default() };
        assert!(generator_params(&rows).unwrap().base.unwrap().is_array());
        let preset = Params { base: Some("mobius".into()), ..Default::default() };
        assert_eq!(generator_params(&preset).unwrap().base, Some(serde_json::json!("mobius")));
    }

    #[test]
    fn first_difference_names_the_position() {
        let f = FieldKind::Prime(7);
        let modes = vec![Mode::new("a", 2), Mode::new("b", 3)];
        let x = Tensor::from_i64(modes.clone(), f, &[0, 1, 2, 3, 4, 5]).unwrap();
        let y = Tensor::from_i64(modes, f, &[0, 1, 2, 3, 6, 5]).unwrap();
        assert_eq!(first_difference(&x, &x).unwrap(), None);
        assert_eq!(first_difference(&x, &y).unwrap().unwrap(), "[a=1, b=1] got 4, expected 6");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = random_tensor(vec![Mode::new("a", 4)], f, &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(t, random_tensor(vec![Mode::new("a", 4)], f, &mut rng).unwrap());
    }
}
