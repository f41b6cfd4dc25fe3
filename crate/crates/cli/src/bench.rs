use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tensornet::builders::{self, GeneratorParams};
use tensornet::field::FieldKind;

use crate::commands::Outcome;
use crate::maps::{first_difference, generator_params, random_tensor};
use crate::{invalid, Failure, Global, Params};

const DEFAULT_SWEEP: [&str; 7] = ["matmul", "fft", "wht", "conv", "yates", "ryser", "kruskal"];

#[derive(Serialize)]
struct Row {
    generator: String,
    instance: String,
    bound: Option<u64>,
    max_cost: u64,
    total_work: u64,
    amortized_cost: Option<u64>,
    bound_satisfied: Option<bool>,
    check: String,
}

/// The swept parameter, its default range, and how a value sets the parameters.
fn sweep(name: &str) -> Option<(&'static str, usize, usize)> {
    Some(match name {
        "strassen" => ("-", 1, 1),
        "matmul" | "rect_matmul" => ("k", 1, 4),
        "fft" => ("k", 1, 8),
        "wht" | "conv" | "yates" => ("k", 1, 6),
        "ryser" => ("n", 2, 7),
        "kruskal" => ("l", 2, 4),
        "pform" => ("n", 2, 4),
        _ => return None,
    })
}

fn instance(name: &str, base: &GeneratorParams, v: usize) -> GeneratorParams {
    let mut p = base.clone();
    match name {
        "matmul" => p.n = Some(1 << v),
        "rect_matmul" => {
            p.n = Some(1 << v);
            p.r = base.r.or(Some(1 << v));
            p.m = base.m.or(Some(1 << v));
        }
        "fft" | "wht" | "conv" | "yates" => p.k = Some(v),
        "ryser" | "pform" => p.n = Some(v),
        "kruskal" => {
            p.l = Some(v);
            p.n = base.n.or(Some(2));
        }
        _ => {}
    }
    p
}

fn measure(g: &Global, name: &str, params: &GeneratorParams, field: FieldKind, label: String) -> Result<Row, Failure> {
    let b = builders::build(name, params, field).map_err(invalid)?;
    let cost = b.cost().map_err(invalid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let inputs = b
        .layout
        .logical_inputs()
        .into_iter()
        .map(|m| random_tensor(m, field, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let (got, _) = b.evaluate(&inputs).map_err(invalid)?;
    let check = match b.oracle_value(&inputs).map_err(invalid)? {
        Some(want) => match first_difference(&got, &want)? {
            None => "MATCH".to_string(),
            Some(at) => format!("MISMATCH {at}"),
        },
        None => "-".to_string(),
    };
    Ok(Row {
        generator: name.to_string(),
        instance: label,
        bound: b.bound,
        max_cost: cost.max_cost,
        total_work: cost.total_work,
        amortized_cost: cost.amortized_cost,
        bound_satisfied: b.bound.map(|x| cost.max_cost <= x),
        check,
    })
}

pub fn run(g: &Global, generator: Option<&str>, p: &Params, from: Option<usize>, to: Option<usize>) -> Outcome {
    let fail = |f: Failure| (String::new(), f);
    let field = g.field.unwrap_or(FieldKind::Prime(65537));
    let names: Vec<&str> = match generator {
        Some(n) => vec![n],
        None => DEFAULT_SWEEP.to_vec(),
    };
    let base = generator_params(p).map_err(fail)?;
    let mut rows = Vec::new();
    for name in names {
        let (param, lo, hi) =
            sweep(name).ok_or_else(|| fail(Failure::Usage(format!("unknown generator {name:?}"))))?;
        let (lo, hi) = (from.unwrap_or(lo), to.unwrap_or(hi));
        for v in lo..=hi {
            let params = instance(name, &base, v);
            let label = if param == "-" { String::new() } else { format!("{param}={v}") };
            rows.push(measure(g, name, &params, field, label).map_err(fail)?);
        }
    }
    let text = if g.json {
        serde_json::to_string_pretty(&rows).unwrap() + "\n"
    } else {
        let mut s = String::new();
        writeln!(
            s,
            "{:<12} {:<8} {:>14} {:>14} {:>16} {:>14} {:<17} check",
            "generator", "instance", "bound", "max-step cost", "total work", "amortized", "bound satisfied"
        )
        .unwrap();
        let opt = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
        for r in &rows {
            let ok = match r.bound_satisfied {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            writeln!(
                s,
                "{:<12} {:<8} {:>14} {:>14} {:>16} {:>14} {:<17} {}",
                r.generator,
                r.instance,
                opt(r.bound),
                r.max_cost,
                r.total_work,
                opt(r.amortized_cost),
                ok,
                r.check
            )
            .unwrap();
        }
        s
    };
    if rows.iter().any(|r| r.check.starts_with("MISMATCH")) {
        return Err((text, Failure::Mismatch));
    }
    if rows.iter().any(|r| r.bound_satisfied == Some(false)) {
        return Err((text, Failure::Invalid("a measured cost exceeds its bound".into())));
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_set_the_swept_parameter() {
        let base = GeneratorParams { n: Some(3), ..Default::default() };
        assert_eq!(instance("matmul", &base, 3).n, Some(8));
        assert_eq!(instance("kruskal", &base, 4).l, Some(4));
        assert_eq!(instance("kruskal", &base, 4).n, Some(3));
        assert_eq!(instance("fft", &base, 5).k, Some(5));
        assert_eq!(sweep("fft"), Some(("k", 1, 8)));
        assert_eq!(sweep("unknown"), None);
    }
}
