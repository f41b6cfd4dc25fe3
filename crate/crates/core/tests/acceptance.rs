//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Reference values are computed here by direct summation, independently of
//! the library's builders and runner. All comparisons are exact.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tensornet::builders::{
    branch_decomposition_search, branchwidth_evaluation, convolution_network, fft_network, matmul_network,
    pform_network, ryser_network, strassen_network, yates_network, yates_preset, Built, PatternGraph,
};
use tensornet::execution::{amortized_cost, plan_cost, run, ExecutionPlan};
use tensornet::field::{FieldKind, Scalar};
use tensornet::kronpow::lift;
use tensornet::lowerbound::{formify, socket_width};
use tensornet::network::{MapSpec, Network, SocketedNetwork};
use tensornet::oracle::{self, Group, OracleSpec};
use tensornet::planner::{optimal_plan, PlanRequest};
use tensornet::tensor::{Mode, ModeId, Tensor, VertexId};

const Q: FieldKind = FieldKind::Rational;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---- exact modular helpers ----

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn residue(s: &Scalar) -> u64 {
    match s {
        Scalar::Prime { value, .. } => *value,
        other => panic!("expected a prime-field scalar, got {other}"),
    }
}

/// Entries of `t` in row-major order over `order`.
fn entries(t: &Tensor, order: &[Mode]) -> Vec<u64> {
    let ids: Vec<ModeId> = order.iter().map(|m| m.id.clone()).collect();
    t.permuted(&ids).unwrap().scalars().iter().map(residue).collect()
}

fn tensor_of(modes: Vec<Mode>, field: FieldKind, data: &[u64]) -> Tensor {
    let data: Vec<Scalar> = data.iter().map(|&x| field.from_i64(x as i64)).collect();
    Tensor::from_scalars(modes, field, data).unwrap()
}

fn random_data(rng: &mut ChaCha8Rng, len: usize, p: u64) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(0..p)).collect()
}

// ---- random networks ----

fn random_network(rng: &mut ChaCha8Rng, field: FieldKind, max_vertices: usize) -> Network {
    let nv = rng.gen_range(1..=max_vertices);
    let nm = rng.gen_range(1..=8);
    let mut incident: Vec<Vec<(ModeId, usize)>> = vec![Vec::new(); nv];
    let mut all = Vec::new();
    for e in 0..nm {
        let id = ModeId(format!("e{e}"));
        let len = rng.gen_range(1..=3);
        let mut vs: Vec<usize> = (0..nv).collect();
        vs.shuffle(rng);
        for &v in &vs[..rng.gen_range(1..=nv.min(3))] {
            incident[v].push((id.clone(), len));
        }
        all.push((id, len));
    }
    for (v, inc) in incident.iter_mut().enumerate() {
        if inc.is_empty() {
            let id = ModeId(format!("f{v}"));
            let len = rng.gen_range(1..=3);
            inc.push((id.clone(), len));
            all.push((id, len));
        }
    }
    let mut d = Network::new();
    for (v, inc) in incident.iter().enumerate() {
        let modes: Vec<Mode> = inc.iter().map(|(id, l)| Mode::new(id.clone(), *l)).collect();
        let t = Tensor::from_fn(modes, field, |_| match field {
            FieldKind::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
            _ => field.from_i64(rng.gen_range(-3..=3)),
        })
        .unwrap();
        d.add_vertex(format!("v{v}"), t).unwrap();
    }
    d.set_boundary(all.iter().filter(|_| rng.gen_bool(0.3)).map(|(id, _)| id.clone()));
    d
}

/// A random contraction sequence: random subsets, singletons only on loops.
fn random_plan(d: &Network, rng: &mut ChaCha8Rng) -> ExecutionPlan {
    let mut cur = d.clone();
    let mut steps = Vec::new();
    loop {
        let ids = cur.vertex_ids();
        let looped: Vec<VertexId> = ids.iter().filter(|v| cur.has_loop(v)).cloned().collect();
        let step: Vec<VertexId> = if ids.len() == 1 {
            if looped.is_empty() {
                break;
            }
            looped
        } else if !looped.is_empty() && rng.gen_bool(0.3) {
            vec![looped[rng.gen_range(0..looped.len())].clone()]
        } else {
            let mut shuffled = ids.clone();
            shuffled.shuffle(rng);
            shuffled.truncate(rng.gen_range(2..=ids.len()));
            shuffled
        };
        cur = cur.contract(&step).unwrap();
        steps.push(step);
    }
    ExecutionPlan::new(steps)
}

// ---- criteria ----

fn c1_invariance() -> Check {
    let f = FieldKind::Prime(101);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut steps = 0;
    for i in 0..500 {
        let d = random_network(&mut rng, f, 6);
        let want = d.value().map_err(err)?.canonical();
        let plan = random_plan(&d, &mut rng);
        steps += plan.len();
        let (got, _) = run(&d, &plan).map_err(err)?;
        ensure(got.canonical() == want, || format!("instance {i}: value changed under {:?}", plan.steps))?;
    }
    Ok(format!("500 networks, {steps} contractions, all values identical"))
}

fn naive_matmul(a: &[u64], b: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut c = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0u128;
            for k in 0..n {
                s += a[i * n + k] as u128 * b[k * n + j] as u128;
            }
            c[i * n + j] = (s % p as u128) as u64;
        }
    }
    c
}

/// The value of a built network's core, with its socket modes named as the oracle's.
fn core_value_logical(b: &Built) -> Result<Tensor, String> {
    let v = b.network.core().value().map_err(err)?;
    let axes = b.layout.inputs.iter().flatten().chain(&b.layout.output);
    let mut rename = HashMap::new();
    for a in axes {
        ensure(a.modes.len() == 1, || "expected one network mode per logical axis".into())?;
        rename.insert(a.modes[0].id.clone(), a.logical.clone().expect("logical axis").id);
    }
    v.renamed(|id| rename[id].clone()).map_err(err)
}

fn c2_strassen() -> Check {
    let f = FieldKind::Prime(101);
    let p = 101;
    let s = strassen_network(f).map_err(err)?;
    let value = core_value_logical(&s)?;
    let (ins, out) = oracle::socket_modes(&OracleSpec::Matmul { n: 2, r: 2, m: 2 });
    let order: Vec<Mode> = ins.iter().flatten().chain(&out).cloned().collect();
    let got = entries(&value, &order);
    ensure(got.len() == 64, || format!("{} positions", got.len()))?;
    // <2,2,2>[i,k,k',j,i',j'] = [k = k'][i = i'][j = j']
    for (pos, &x) in got.iter().enumerate() {
        let bit = |s: usize| (pos >> (5 - s)) & 1;
        let (i, k, k2, j, i2, j2) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5));
        let want = u64::from(k == k2 && i == i2 && j == j2);
        ensure(x == want, || format!("Strassen reconstruction differs at position {pos}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut costs = Vec::new();
    for k in 1..=4u32 {
        let n = 1usize << k;
        let b = matmul_network(n, f).map_err(err)?;
        let (ins, out) = oracle::socket_modes(&OracleSpec::Matmul { n, r: n, m: n });
        let a = random_data(&mut rng, n * n, p);
        let bb = random_data(&mut rng, n * n, p);
        let inputs = vec![tensor_of(ins[0].clone(), f, &a), tensor_of(ins[1].clone(), f, &bb)];
        let (got, report) = b.evaluate(&inputs).map_err(err)?;
        ensure(entries(&got, &out) == naive_matmul(&a, &bb, n, p), || format!("n = {n}: product differs"))?;
        let bound = 7u64.pow(k) * 4;
        ensure(report.max_cost <= bound, || format!("n = {n}: cost {} > {bound}", report.max_cost))?;
        costs.push(report.max_cost);
    }
    ensure(costs == [28, 196, 1372, 9604], || format!("costs {costs:?}"))?;
    Ok(format!("64/64 positions; n = 2,4,8,16 match; max-step costs {costs:?}"))
}

fn c3_fourier() -> Check {
    let p = 65537u64;
    let f = FieldKind::Prime(p);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=8u32 {
        let n = 1usize << k;
        let b = fft_network(k, f, None).map_err(err)?;
        let root = match &b.oracle {
            Some(OracleSpec::Dft { root, .. }) => residue(root),
            _ => return Err("fft without a DFT oracle".into()),
        };
        ensure(pow_mod(root, n as u64, p) == 1 && pow_mod(root, n as u64 / 2, p) == p - 1, || {
            format!("k = {k}: {root} is not a primitive {n}-th root")
        })?;
        let x = random_data(&mut rng, n, p);
        let modes = b.layout.logical_inputs();
        let (got, report) = b.evaluate(&[tensor_of(modes[0].clone(), f, &x)]).map_err(err)?;
        let want: Vec<u64> = (0..n)
            .map(|j| {
                (0..n).fold(0u64, |s, i| (s + x[i] * pow_mod(root, (i * j) as u64, p)) % p)
            })
            .collect();
        ensure(entries(&got, &b.layout.logical_output()) == want, || format!("k = {k}: DFT differs"))?;
        ensure(report.max_cost == 1 << (k + 1), || format!("k = {k}: cost {}", report.max_cost))?;
    }
    for k in 1..=6u32 {
        let n = 1usize << k;
        for group in [Group::Cyclic(n), Group::Xor(k)] {
            let b = convolution_network(group, f).map_err(err)?;
            let modes = b.layout.logical_inputs();
            let (fv, gv) = (random_data(&mut rng, n, p), random_data(&mut rng, n, p));
            let inputs = [tensor_of(modes[0].clone(), f, &fv), tensor_of(modes[1].clone(), f, &gv)];
            let (got, _) = b.evaluate(&inputs).map_err(err)?;
            let mut want = vec![0u64; n];
            for a in 0..n {
                for c in 0..n {
                    let t = match group {
                        Group::Cyclic(_) => (a + c) % n,
                        Group::Xor(_) => a ^ c,
                    };
                    want[t] = (want[t] + fv[a] * gv[c]) % p;
                }
            }
            ensure(entries(&got, &b.layout.logical_output()) == want, || format!("{group:?}: convolution differs"))?;
        }
    }
    Ok("fft k = 1..8 match with cost 2^(k+1); cyclic and xor convolution k = 1..6 match".into())
}

fn brute_permanent(m: &[Vec<u64>], p: u64) -> u64 {
    fn go(m: &[Vec<u64>], row: usize, used: u32, p: u64) -> u64 {
        if row == m.len() {
            return 1;
        }
        let mut s = 0;
        for c in 0..m.len() {
            if used & (1 << c) == 0 && m[row][c] != 0 {
                s = (s + m[row][c] * go(m, row + 1, used | 1 << c, p)) % p;
            }
        }
        s
    }
    go(m, 0, 0, p)
}

fn c4_ryser() -> Check {
    let p = 10007u64;
    let f = FieldKind::Prime(p);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 2..=7 {
        let b = ryser_network(n, f).map_err(err)?;
        let rows: Vec<Vec<u64>> = (0..n).map(|_| random_data(&mut rng, n, p)).collect();
        let inputs: Vec<Tensor> = b
            .layout
            .logical_inputs()
            .into_iter()
            .zip(&rows)
            .map(|(m, r)| tensor_of(m, f, r))
            .collect();
        let (got, _) = b.evaluate(&inputs).map_err(err)?;
        let got = residue(&got.scalars()[0]);
        let want = brute_permanent(&rows, p);
        ensure(got == want, || format!("n = {n}: {got} != {want}"))?;
    }
    Ok("n = 2..7 equal the brute-force permanent".into())
}

fn c5_homomorphisms() -> Check {
    let patterns = [
        ("K3", PatternGraph::complete(3, 2).unwrap()),
        ("K4", PatternGraph::complete(4, 2).unwrap()),
        ("P4", PatternGraph::path(4).unwrap()),
        ("C5", PatternGraph::cycle(5).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut evaluations = 0;
    for (name, p) in &patterns {
        let bd = branch_decomposition_search(p).map_err(err)?;
        for n in 2..=5usize {
            for _ in 0..3 {
                let hosts01: Vec<Vec<u64>> = (0..p.edge_count()).map(|_| random_data(&mut rng, n * n, 2)).collect();
                let hosts: Vec<Tensor> = p
                    .edges()
                    .iter()
                    .zip(&hosts01)
                    .enumerate()
                    .map(|(k, (e, h))| {
                        let modes = vec![
                            Mode::new(format!("s{}_{}", k + 1, e[0]), n),
                            Mode::new(format!("s{}_{}", k + 1, e[1]), n),
                        ];
                        tensor_of(modes, Q, h)
                    })
                    .collect();
                let ev = branchwidth_evaluation(p, &bd, &hosts).map_err(err)?;
                let v = p.vertex_count();
                let mut count = 0u64;
                for code in 0..n.pow(v as u32) {
                    let sigma: Vec<usize> = (0..v).map(|i| code / n.pow(i as u32) % n).collect();
                    count += p
                        .edges()
                        .iter()
                        .zip(&hosts01)
                        .map(|(e, h)| h[sigma[e[0]] * n + sigma[e[1]]])
                        .product::<u64>();
                }
                ensure(ev.value.to_string() == count.to_string(), || {
                    format!("{name}, n = {n}: {} != {count}", ev.value)
                })?;
                ensure(ev.max_order <= bd.width, || {
                    format!("{name}: order {} exceeds width {}", ev.max_order, bd.width)
                })?;
                evaluations += 1;
            }
        }
    }
    Ok(format!("{evaluations} evaluations match brute-force counts within the decomposition width"))
}

fn c6_branchwidth() -> Check {
    let mut found = Vec::new();
    for n in 3..=7usize {
        let bd = branch_decomposition_search(&PatternGraph::complete(n, 2).unwrap()).map_err(err)?;
        let want = (2 * n).div_ceil(3);
        ensure(bd.width == want && bd.exact, || {
            format!("K{n}: width {} (exact {}), expected {want}", bd.width, bd.exact)
        })?;
        found.push(bd.width);
    }
    let bd = branch_decomposition_search(&PatternGraph::complete(4, 3).unwrap()).map_err(err)?;
    ensure(bd.width == 4 && bd.exact, || format!("3-uniform K4: width {}", bd.width))?;
    Ok(format!("K3..K7 widths {found:?}; 3-uniform K4 width 4"))
}

/// The least max-step cost over all executions by pairs (and loop singletons).
fn exhaustive(d: &Network, memo: &mut HashMap<(Vec<VertexId>, Vec<ModeId>), u64>) -> u64 {
    let ids = d.vertex_ids();
    let key = (ids.clone(), d.modes().keys().cloned().collect());
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let mut options: Vec<Vec<VertexId>> = ids.iter().filter(|v| d.has_loop(v)).map(|v| vec![v.clone()]).collect();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            options.push(vec![ids[i].clone(), ids[j].clone()]);
        }
    }
    let best = if options.is_empty() {
        0
    } else {
        options
            .iter()
            .map(|w| d.contraction_cost(w).unwrap().max(exhaustive(&d.contract(w).unwrap(), memo)))
            .min()
            .unwrap()
    };
    memo.insert(key, best);
    best
}

fn c7_planner() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let d = random_network(&mut rng, Q, 6).skeleton();
        let (plan, report) = optimal_plan(&PlanRequest::new(d.clone())).map_err(err)?;
        let replayed = plan_cost(&d, &plan).map_err(err)?.max_cost;
        let best = exhaustive(&d, &mut HashMap::new());
        ensure(report.max_cost == best && replayed == best, || {
            format!("instance {i}: planner {} (replayed {replayed}), exhaustive {best}", report.max_cost)
        })?;
    }
    Ok("200 networks: optimal plan cost equals the exhaustive minimum".into())
}

fn check_lift(label: &str, s: &SocketedNetwork, plan: &ExecutionPlan, k: usize) -> Result<(), String> {
    let a = amortized_cost(s, plan).map_err(err)?;
    let c = plan_cost(&s.network, plan).map_err(err)?.max_cost;
    let lifted = lift(s, plan, k).map_err(err)?;
    let measured = lifted.measured_cost().map_err(err)?;
    let bound = a.pow(k as u32 - 1) * c;
    ensure(measured <= bound, || format!("{label}, k = {k}: cost {measured} > {bound}"))?;
    let (lv, v) = (lifted.network.network.vertex_count(), s.network.vertex_count());
    ensure(lv <= k * v, || format!("{label}, k = {k}: {lv} vertices > {k} * {v}"))
}

fn random_realization(rng: &mut ChaCha8Rng) -> Result<(SocketedNetwork, ExecutionPlan), String> {
    let f = FieldKind::Prime(101);
    let mut d = Network::new();
    let socket_modes = [ModeId::from("s1"), ModeId::from("s2")];
    let mut incident: Vec<Vec<Mode>> = vec![Vec::new(); 4];
    for (t, s) in socket_modes.iter().enumerate() {
        incident[rng.gen_range(0..4)].push(Mode::new(s.clone(), 2 + t));
    }
    for e in 0..5 {
        let len = rng.gen_range(1..=3);
        let a = rng.gen_range(0..4);
        let b = (a + rng.gen_range(1..4)) % 4;
        incident[a].push(Mode::new(format!("e{e}"), len));
        incident[b].push(Mode::new(format!("e{e}"), len));
    }
    let mut out = Vec::new();
    for (v, inc) in incident.iter_mut().enumerate() {
        if v < 2 {
            inc.push(Mode::new(format!("o{v}"), 2));
            out.push(ModeId(format!("o{v}")));
        }
    }
    for (v, inc) in incident.into_iter().enumerate() {
        let t = Tensor::from_fn(inc, f, |_| f.from_i64(rng.gen_range(0..101))).map_err(err)?;
        d.add_vertex(format!("v{v}"), t).map_err(err)?;
    }
    d.add_placeholder("X", &socket_modes).map_err(err)?;
    d.set_boundary(out.iter().cloned());
    let s = SocketedNetwork::new(d, vec![VertexId::from("X")], out).map_err(err)?;
    let (plan, _) = optimal_plan(&PlanRequest::new(s.network.clone())).map_err(err)?;
    Ok((s, plan))
}

fn c8_lifting() -> Check {
    let s = strassen_network(Q).map_err(err)?;
    for k in 1..=4 {
        check_lift("Strassen", &s.network, &s.plan, k)?;
    }
    let y = yates_network(&yates_preset("zeta", Q).map_err(err)?, 1).map_err(err)?;
    for k in 1..=6 {
        check_lift("Yates", &y.network, &y.plan, k)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let (r, plan) = random_realization(&mut rng)?;
        for k in 1..=3 {
            check_lift(&format!("random realization {i}"), &r, &plan, k)?;
        }
    }
    Ok("Strassen k <= 4, Yates k <= 6, 20 random realizations k <= 3 within a^(k-1) c and k |V|".into())
}

fn width_of(o: OracleSpec) -> Result<usize, String> {
    Ok(socket_width(&MapSpec::from_oracle(o, Q), false).map_err(err)?.socket_width)
}

fn c9_socket_width() -> Check {
    let perm3 = width_of(OracleSpec::Permanent { n: 3 })?;
    ensure(perm3 == 3, || format!("perm3 width {perm3}"))?;
    let perm4 = width_of(OracleSpec::Permanent { n: 4 })?;
    ensure(perm4 >= 6, || format!("perm4 width {perm4} < 6"))?;
    let k4 = width_of(OracleSpec::PForm { pattern: PatternGraph::complete(4, 2).unwrap(), n: 2 })?;
    ensure(k4 == 8, || format!("K4 form width {k4}"))?;
    let h4 = width_of(OracleSpec::PForm { pattern: PatternGraph::complete(4, 3).unwrap(), n: 2 })?;
    ensure(h4 == 16, || format!("3-uniform K4 form width {h4}"))?;
    let kr = width_of(OracleSpec::Kruskal { rows: vec![2; 3], r: 2 })?;
    ensure(kr >= 8, || format!("Kruskal width {kr} < 8"))?;
    Ok(format!("perm3 {perm3}, perm4 {perm4} (>= 6), K4 form {k4}, 3-uniform K4 form {h4}, Kruskal(3,2,2) {kr}"))
}

fn c10_upper_meets_lower() -> Check {
    let mut rows = Vec::new();
    for n in 2..=4 {
        let b = ryser_network(n, Q).map_err(err)?;
        rows.push((format!("ryser n={n}"), b.cost().map_err(err)?.max_cost, width_of(OracleSpec::Permanent { n })?));
    }
    for v in [3, 4] {
        let (spec, b) = pform_network(&PatternGraph::complete(v, 2).unwrap(), 2, Q).map_err(err)?;
        let w = socket_width(&spec, false).map_err(err)?.socket_width;
        rows.push((format!("K{v} form n=2"), b.cost().map_err(err)?.max_cost, w));
    }
    let mm = matmul_network(2, Q).map_err(err)?;
    let form = formify(&MapSpec::from_oracle(OracleSpec::Matmul { n: 2, r: 2, m: 2 }, Q));
    let w = socket_width(&form, false).map_err(err)?.socket_width;
    rows.push(("matmul n=2 form".into(), mm.cost().map_err(err)?.max_cost, w));
    for (name, cost, width) in &rows {
        ensure(*cost >= *width as u64, || format!("{name}: cost {cost} < width {width}"))?;
    }
    let shown: Vec<String> = rows.iter().map(|(n, c, w)| format!("{n} {c}>={w}")).collect();
    Ok(shown.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("invariance under contraction", Duration::from_secs(60), c1_invariance),
        ("Strassen reconstruction and matmul", Duration::from_secs(60), c2_strassen),
        ("FFT and convolution", Duration::from_secs(60), c3_fourier),
        ("Ryser permanent", Duration::from_secs(120), c4_ryser),
        ("homomorphism counting", Duration::from_secs(120), c5_homomorphisms),
        ("branchwidth", Duration::from_secs(120), c6_branchwidth),
        ("planner optimality", Duration::from_secs(300), c7_planner),
        ("Kronecker lifting", Duration::from_secs(120), c8_lifting),
        ("socket-width certificates", Duration::from_secs(600), c9_socket_width),
        ("upper bounds meet lower bounds", Duration::from_secs(300), c10_upper_meets_lower),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|d| {
            if took <= *limit {
                Ok(d)
            } else {
                Err(format!("took {took:.1?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{:.2}s, limit {}s]", i + 1, took.as_secs_f64(), limit.as_secs()),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e} [{:.2}s, limit {}s]", i + 1, took.as_secs_f64(), limit.as_secs());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
