use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use tensornet::builders::{self, branch_decomposition_search, parse_pattern, Built};
use tensornet::execution::{run, socketed_report, CostReport, ExecutionPlan};
use tensornet::field::FieldKind;
use tensornet::lowerbound::{closed_form_bound, socket_width, Family};
use tensornet::netfile::{parse_plan, plan_to_json, Loaded, NetworkFile};
use tensornet::network::{MapSpec, SocketedNetwork};
use tensornet::oracle::{self, OracleSpec};
use tensornet::planner::{self, Objective, PlanRequest, Strategy};
use tensornet::tensor::{Mode, Tensor};

use crate::maps::{canonical, family, first_difference, generator_params, oracle_spec, random_tensor};
use crate::{bench, invalid, Cli, Command, Failure, Global, ObjectiveArg, Params};

pub type Outcome = Result<String, (String, Failure)>;

pub fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let plain = |r: Result<String, Failure>| r.map_err(|f| (String::new(), f));
    match &cli.command {
        Command::Build { generator, params, out, plan_out } => {
            plain(build(g, generator, params, out.as_deref(), plan_out.as_deref()))
        }
        Command::Plan { network, greedy, objective, out } => plain(plan(g, network, *greedy, *objective, out.as_deref())),
        Command::Exec { network, plan } => plain(exec(g, network, plan.as_deref())),
        Command::Verify { network, plan, oracle, params, trials } => {
            verify(g, network, plan.as_deref(), oracle.as_deref(), params, *trials)
        }
        Command::SocketWidth { map, params, log } => plain(width(g, map, params, *log)),
        Command::Branchwidth { params } => plain(branchwidth(g, params)),
        Command::Bench { generator, params, from, to } => bench::run(g, generator.as_deref(), params, *from, *to),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    NetworkFile::parse(&read(path)?).and_then(|f| f.load()).map_err(invalid)
}

fn report_lines(out: &mut String, r: &CostReport) {
    writeln!(out, "max-step cost {}", r.max_cost).unwrap();
    writeln!(out, "total work {}", r.total_work).unwrap();
    if let Some(a) = r.amortized_cost {
        writeln!(out, "amortized cost {a}").unwrap();
    }
    writeln!(out, "per-step costs {:?}", r.per_step_cost).unwrap();
}

fn build(g: &Global, name: &str, p: &Params, out: Option<&Path>, plan_out: Option<&Path>) -> Result<String, Failure> {
    if !builders::GENERATORS.contains(&name) {
        return Err(Failure::Usage(format!(
            "unknown generator {name:?}; expected one of {}",
            builders::GENERATORS.join(", ")
        )));
    }
    let field = g.field.unwrap_or(FieldKind::Rational);
    let params = generator_params(p)?;
    let b = builders::build(name, &params, field).map_err(invalid)?;
    let file = NetworkFile::from_built(&b, name, &params).to_json();
    if let Some(path) = plan_out {
        write(path, &plan_to_json(&b.plan))?;
    }
    let Some(path) = out else { return Ok(file) };
    write(path, &file)?;
    let cost = b.cost().map_err(invalid)?;
    let d = &b.network.network;
    if g.json {
        return Ok(to_json(&json!({
            "name": b.name,
            "file": path.display().to_string(),
            "vertices": d.vertex_count(),
            "modes": d.modes().len(),
            "sockets": b.network.arity(),
            "bound": b.bound,
            "report": cost,
        })));
    }
    let mut s = String::new();
    writeln!(s, "built {} into {}", b.name, path.display()).unwrap();
    writeln!(s, "{} vertices, {} modes, {} sockets", d.vertex_count(), d.modes().len(), b.network.arity()).unwrap();
    match b.bound {
        Some(x) => writeln!(s, "bound {x}").unwrap(),
        None => writeln!(s, "bound -").unwrap(),
    }
    report_lines(&mut s, &cost);
    Ok(s)
}

fn report_for(loaded: &Loaded, plan: &ExecutionPlan) -> Result<CostReport, Failure> {
    match &loaded.socketed {
        Some(s) => socketed_report(s, plan).map_err(invalid),
        None => tensornet::execution::plan_cost(&loaded.network, plan).map_err(invalid),
    }
}

fn plan(g: &Global, path: &Path, greedy: bool, objective: ObjectiveArg, out: Option<&Path>) -> Result<String, Failure> {
    let loaded = load(path)?;
    let req = PlanRequest::new(loaded.network.clone())
        .exact_bound(g.exact_bound)
        .strategy(if greedy { Strategy::Greedy } else { Strategy::Exact })
        .objective(match objective {
            ObjectiveArg::MaxStep => Objective::MaxStep,
            ObjectiveArg::TotalWork => Objective::TotalWork,
        });
    let (p, _) = planner::plan(&req).map_err(invalid)?;
    let report = report_for(&loaded, &p)?;
    let tree = p.tree(&loaded.network).map_err(invalid)?.to_string();
    if let Some(path) = out {
        write(path, &plan_to_json(&p))?;
    }
    if g.json {
        return Ok(to_json(&json!({ "plan": p, "tree": tree, "report": report })));
    }
    let mut s = String::new();
    write!(s, "plan {}", plan_to_json(&p)).unwrap();
    writeln!(s, "tree {tree}").unwrap();
    report_lines(&mut s, &report);
    Ok(s)
}

/// The plan to run: a plan file, else the construction's own plan, else a planned one.
fn choose_plan(g: &Global, loaded: &Loaded, built: Option<&Built>, path: Option<&Path>) -> Result<ExecutionPlan, Failure> {
    if let Some(path) = path {
        return parse_plan(&read(path)?).map_err(invalid);
    }
    if let Some(b) = built {
        return Ok(b.plan.clone());
    }
    let req = PlanRequest::new(loaded.network.clone()).exact_bound(g.exact_bound);
    Ok(planner::plan(&req).map_err(invalid)?.0)
}

fn file_field(loaded: &Loaded) -> Result<FieldKind, Failure> {
    loaded
        .field
        .or_else(|| loaded.generator.as_ref().and_then(|r| r.field))
        .ok_or_else(|| Failure::Invalid("the network file does not name a field".into()))
}

/// Runs `plan` on the file's network with `inputs` bound to the sockets,
/// reading the result through the construction's layout when there is one.
fn evaluate(
    s: &SocketedNetwork,
    built: Option<&Built>,
    plan: &ExecutionPlan,
    inputs: &[Tensor],
) -> Result<(Tensor, CostReport), Failure> {
    let embedded = match built {
        Some(b) => inputs
            .iter()
            .enumerate()
            .map(|(k, x)| b.layout.embed(k, x))
            .collect::<Result<Vec<_>, _>>()
            .map_err(invalid)?,
        None => inputs.to_vec(),
    };
    let d = s.bind(&embedded).map_err(invalid)?;
    let (t, report) = run(&d, plan).map_err(invalid)?;
    match built {
        Some(b) => Ok((b.layout.readout(&t).map_err(invalid)?, report)),
        None => Ok((t, report)),
    }
}

fn input_modes(s: &SocketedNetwork, built: Option<&Built>) -> Vec<Vec<Mode>> {
    match built {
        Some(b) => b.layout.logical_inputs(),
        None => (0..s.arity()).map(|k| s.socket_modes(k)).collect(),
    }
}

fn exec(g: &Global, path: &Path, plan_path: Option<&Path>) -> Result<String, Failure> {
    let loaded = load(path)?;
    let built = loaded.rebuild().map_err(invalid)?;
    let p = choose_plan(g, &loaded, built.as_ref(), plan_path)?;
    let (value, report) = match &loaded.socketed {
        None => run(&loaded.network, &p).map_err(invalid)?,
        Some(s) => {
            let field = file_field(&loaded)?;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let inputs = input_modes(s, built.as_ref())
                .into_iter()
                .map(|m| random_tensor(m, field, &mut rng))
                .collect::<Result<Vec<_>, _>>()?;
            evaluate(s, built.as_ref(), &p, &inputs)?
        }
    };
    let value = value.canonical();
    if g.json {
        return Ok(to_json(&json!({ "value": value, "report": report })));
    }
    let mut s = String::new();
    writeln!(s, "value {}", serde_json::to_string(&value).unwrap()).unwrap();
    report_lines(&mut s, &report);
    Ok(s)
}

fn verify(
    g: &Global,
    path: &Path,
    plan_path: Option<&Path>,
    oracle_name: Option<&str>,
    params: &Params,
    trials: usize,
) -> Outcome {
    let fail = |f: Failure| (String::new(), f);
    let loaded = load(path).map_err(fail)?;
    let built = loaded.rebuild().map_err(|e| fail(invalid(e)))?;
    let field = file_field(&loaded).map_err(fail)?;
    let s = loaded
        .socketed
        .clone()
        .ok_or_else(|| fail(Failure::Invalid("verify needs a network with sockets".into())))?;
    let spec: OracleSpec = match (&built, oracle_name) {
        (Some(b), name) => {
            let o = b
                .oracle
                .clone()
                .ok_or_else(|| fail(Failure::Invalid(format!("{} has no reference map", b.name))))?;
            if let Some(name) = name {
                let want = canonical(name).ok_or_else(|| fail(Failure::Usage(format!("unknown oracle {name:?}"))))?;
                if want != family(&o) {
                    return Err(fail(Failure::Invalid(format!(
                        "oracle {name} does not match the network's map {}",
                        family(&o)
                    ))));
                }
            }
            o
        }
        (None, Some(name)) => {
            let o = oracle_spec(name, params, field).map_err(fail)?;
            let (inputs, output) = oracle::socket_modes(&o);
            let sorted = |mut v: Vec<Mode>| {
                v.sort();
                v
            };
            let same = inputs.len() == s.arity()
                && inputs.iter().enumerate().all(|(k, m)| sorted(m.clone()) == sorted(s.socket_modes(k)))
                && sorted(output) == sorted(s.output_modes());
            if !same {
                return Err(fail(Failure::Invalid(format!("the network's sockets do not match {}", o.name()))));
            }
            o
        }
        (None, None) => return Err(fail(Failure::Usage("no generator recorded; pass --oracle".into()))),
    };
    let p = choose_plan(g, &loaded, built.as_ref(), plan_path).map_err(fail)?;
    let (logical, _) = oracle::socket_modes(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    for trial in 0..trials.max(1) {
        let inputs = logical
            .iter()
            .map(|m| random_tensor(m.clone(), field, &mut rng))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        let (got, _) = evaluate(&s, built.as_ref(), &p, &inputs).map_err(fail)?;
        let want = oracle::evaluate(&spec, &inputs).map_err(|e| fail(invalid(e)))?;
        if let Some(at) = first_difference(&got, &want).map_err(fail)? {
            let text = if g.json {
                to_json(&json!({ "result": "MISMATCH", "oracle": spec.name(), "trial": trial, "position": at }))
            } else {
                format!("MISMATCH {} trial {trial}: {at}\n", spec.name())
            };
            return Err((text, Failure::Mismatch));
        }
    }
    Ok(if g.json {
        to_json(&json!({ "result": "MATCH", "oracle": spec.name(), "trials": trials.max(1) }))
    } else {
        format!("MATCH {} ({} trial(s), seed {})\n", spec.name(), trials.max(1), g.seed)
    })
}

fn width(g: &Global, map: &str, params: &Params, log: bool) -> Result<String, Failure> {
    let field = g.field.unwrap_or(FieldKind::Rational);
    let o = oracle_spec(map, params, field)?;
    let fam = match &o {
        OracleSpec::Permanent { n } => Some(Family::Permanent(*n)),
        OracleSpec::Determinant { n } => Some(Family::Determinant(*n)),
        OracleSpec::PForm { pattern, n } => Some(Family::PForm(pattern.clone(), *n)),
        OracleSpec::Kruskal { rows, r } => Some(Family::Kruskal { l: rows.len(), n: rows[0], r: *r }),
        _ => None,
    };
    let spec = MapSpec::from_oracle(o, field);
    let cert = socket_width(&spec, log).map_err(invalid)?;
    let closed = fam.map(|f| closed_form_bound(&f)).transpose().map_err(invalid)?;
    if g.json {
        return Ok(to_json(&json!({ "certificate": cert, "closed_form_bound": closed })));
    }
    let mut s = format!("{cert}\n");
    if let Some(c) = closed {
        writeln!(s, "closed-form bound {c}").unwrap();
    }
    if let Some(entries) = &cert.per_tree_log {
        for (tree, w) in entries {
            writeln!(s, "{w} {tree}").unwrap();
        }
    }
    Ok(s)
}

fn branchwidth(g: &Global, params: &Params) -> Result<String, Failure> {
    let gp = generator_params(params)?;
    let text = gp.pattern.ok_or_else(|| Failure::Usage("missing --pattern or --pattern-file".into()))?;
    let p = parse_pattern(&text).map_err(invalid)?;
    let bd = branch_decomposition_search(&p).map_err(invalid)?;
    if g.json {
        return Ok(to_json(&serde_json::to_value(&bd).unwrap()));
    }
    let mut s = String::new();
    writeln!(s, "branchwidth {} ({})", bd.width, if bd.exact { "exact" } else { "upper bound" }).unwrap();
    writeln!(s, "leaves {} (pattern edges in input order)", bd.leaves).unwrap();
    for (a, b) in &bd.edges {
        writeln!(s, "{a} {b}").unwrap();
    }
    Ok(s)
}
