//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines are
//! always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrc::bench::{build_suite, log_bound, run_suite, MULTICUT, SANDWICH, TRADEOFF, TWO_ROUTE, VERTEX};
use mrc::lp::{separate, Separation};
use mrc::oracle::{brute_force_opt, brute_force_separator, enumerate_disjoint_path_sets, OracleOutcome};
use mrc::pipeline::{run_pipeline, OracleSummary, RunStatus, SolveOptions, EXIT_INFEASIBLE};
use mrc::rounding::{relaxed_thresholds, Mode};
use mrc::{
    edge_connectivity, min_cost_k_flow, verify_cut, vertex_connectivity, vertex_split_transform, Demand, Graph,
    Instance, KFlow, Removal, Semantics,
};

type Outcome = Result<String, String>;

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn exact_options(oracle_cap: usize) -> SolveOptions {
    SolveOptions { oracle_cap, ..SolveOptions::default() }
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let suite = build_suite(&SANDWICH, 0);
    if suite.len() < 200 {
        return Err(format!("suite has only {} instances", suite.len()));
    }
    for s in &suite {
        let (n, m) = (s.instance.graph().vertex_count(), s.instance.graph().edge_count());
        let integral = s.instance.costs().iter().all(|&c| c.fract() == 0.0 && c <= 10.0);
        let ks = s.instance.demands().iter().all(|d| (1..=3).contains(&d.k));
        if n > 10 || m > 12 || !integral || !ks {
            return Err(format!("seed {} outside suite bounds", s.seed));
        }
    }
    let reports = run_suite(&suite, &exact_options(12));
    let mut bad = Vec::new();
    for (s, r) in suite.iter().zip(&reports) {
        let lp = r.lp.as_ref().map(|l| l.objective);
        let opt = r.oracle.as_ref().and_then(OracleSummary::cost);
        match (lp, opt, r.cost()) {
            (Some(lp), Some(opt), Some(cost)) if lp <= opt + 1e-6 && opt <= cost => {}
            other => bad.push(format!("seed {}: (lp, opt, cost) = {other:?}", s.seed)),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if !bad.is_empty() {
        return Err(format!("{} of {} violate LP <= OPT <= cost: {}", bad.len(), suite.len(), bad.join("; ")));
    }
    if secs > 120.0 {
        return Err(format!("sandwich held but took {secs:.1}s (> 120s)"));
    }
    Ok(format!("{} instances, LP <= OPT <= cost on all, {secs:.2}s", suite.len()))
}

fn two_route() -> Outcome {
    let suite = build_suite(&TWO_ROUTE, 0);
    if suite.len() < 100 || suite.iter().any(|s| s.instance.demands().iter().any(|d| d.k != 2)) {
        return Err("suite is not a >= 100 instance threshold-2 suite".into());
    }
    let reports = run_suite(&suite, &exact_options(0));
    let mut failures = Vec::new();
    for (s, r) in suite.iter().zip(&reports) {
        let Some(cut) = &r.cut else {
            failures.push(format!("seed {}: no cut ({:?})", s.seed, r.status));
            continue;
        };
        let original: Vec<u32> = s.instance.demands().iter().map(|d| d.k).collect();
        let check = verify_cut(&s.instance, &cut.removed, &original).map_err(|e| e.to_string())?;
        if !check.feasible {
            failures.push(format!("seed {}", s.seed));
        }
    }
    if failures.is_empty() {
        Ok(format!("{} instances verify at original thresholds", suite.len()))
    } else {
        Err(format!("{} failures: {}", failures.len(), failures.join(", ")))
    }
}

/// Minimum disconnecting edge-set size for every vertex pair, by sweeping
/// all edge subsets once and reading components off a union-find.
fn all_pairs_min_separators(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u32>> {
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let m = edges.len();
    let mut best = vec![vec![u32::MAX; n]; n];
    let mut parent = vec![0; n];
    for removed in 0u32..1 << m {
        parent.iter_mut().enumerate().for_each(|(i, p)| *p = i);
        for (i, &(a, b)) in edges.iter().enumerate() {
            if removed >> i & 1 == 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let size = removed.count_ones();
        let root: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        for u in 0..n {
            for v in u + 1..n {
                if root[u] != root[v] && size < best[u][v] {
                    best[u][v] = size;
                }
            }
        }
    }
    best
}

fn check_flows(graph: &Graph, rng: &mut ChaCha8Rng, pairs: &[(usize, usize)]) -> Result<usize, String> {
    let view = graph.view();
    let metric: Vec<f64> = (0..graph.edge_count()).map(|_| unit(rng)).collect();
    let mut checked = 0;
    for &(u, v) in pairs {
        for semantics in [Semantics::EdgeDisjoint, Semantics::VertexDisjoint] {
            for k in 1..=3 {
                let listing = enumerate_disjoint_path_sets(&view, semantics, u, v, k, 1_000_000);
                if listing.partial {
                    return Err("enumeration limit reached".into());
                }
                let expected = listing.min_total(&metric);
                let got = min_cost_k_flow(&view, &metric, semantics, u, v, k).map_err(|e| e.to_string())?;
                match (got, expected) {
                    (KFlow::Paths(set), Some(best)) if (set.total_length - best).abs() <= 1e-9 => {}
                    (KFlow::Insufficient(_), None) => {}
                    (got, expected) => {
                        return Err(format!("{graph:?} ({u},{v}) k={k} {semantics:?}: flow {got:?} vs {expected:?}"))
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn menger_and_flows() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut graphs = 0;
    let mut pair_checks = 0;
    let mut flow_checks = 0;
    for n in 2..=6usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for mask in 0u32..1 << slots.len() {
            if mask.count_ones() > 9 {
                continue;
            }
            let edges: Vec<(usize, usize)> =
                (0..slots.len()).filter(|i| mask >> i & 1 == 1).map(|i| slots[i]).collect();
            let graph = Graph::from_pairs(n, &edges).map_err(|e| e.to_string())?;
            let best = all_pairs_min_separators(n, &edges);
            for u in 0..n {
                for v in u + 1..n {
                    let lambda = edge_connectivity(&graph.view(), u, v).map_err(|e| e.to_string())?;
                    if lambda != best[u][v] {
                        return Err(format!("{edges:?} ({u},{v}): flow {lambda}, brute force {}", best[u][v]));
                    }
                    pair_checks += 1;
                }
            }
            // every labelled (graph, pair) is a relabelling of some (graph', (0, 1)) in this family
            flow_checks += check_flows(&graph, &mut rng, &[(0, 1)])?;
            graphs += 1;
        }
    }
    let mut random = 0;
    for _ in 0..500 {
        let n = 2 + below(&mut rng, 5);
        let m = 1 + below(&mut rng, 9);
        let edges: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let a = below(&mut rng, n);
                let b = (a + 1 + below(&mut rng, n - 1)) % n;
                (a, b)
            })
            .collect();
        let graph = Graph::from_pairs(n, &edges).map_err(|e| e.to_string())?;
        let view = graph.view();
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let lambda = edge_connectivity(&view, u, v).map_err(|e| e.to_string())?;
                let brute = brute_force_separator(&view, Semantics::EdgeDisjoint, u, v) as u32;
                let kappa = vertex_connectivity(&view, u, v).map_err(|e| e.to_string())?;
                let brute_v = brute_force_separator(&view, Semantics::VertexDisjoint, u, v) as u32;
                if lambda != brute || kappa != brute_v {
                    return Err(format!("{edges:?} ({u},{v}): edge {lambda}/{brute}, vertex {kappa}/{brute_v}"));
                }
                pair_checks += 1;
                pairs.push((u, v));
            }
        }
        flow_checks += check_flows(&graph, &mut rng, &pairs)?;
        random += 1;
    }
    Ok(format!(
        "{graphs} exhaustive graphs + {random} random multigraphs: {pair_checks} connectivity and {flow_checks} k-flow checks agree"
    ))
}

fn separation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut triples, mut violated, mut satisfied) = (0, 0, 0);
    while triples < 200 {
        let n = 3 + below(&mut rng, 4);
        let m = 2 + below(&mut rng, 8);
        let edges: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let a = below(&mut rng, n);
                (a, (a + 1 + below(&mut rng, n - 1)) % n)
            })
            .collect();
        let graph = Graph::from_pairs(n, &edges).map_err(|e| e.to_string())?;
        let u = below(&mut rng, n);
        let v = (u + 1 + below(&mut rng, n - 1)) % n;
        let k = 1 + below(&mut rng, 3) as u32;
        let semantics = if triples % 2 == 0 { Semantics::EdgeDisjoint } else { Semantics::VertexDisjoint };
        let scale = 0.2 + 1.5 * unit(&mut rng);
        let x: Vec<f64> = (0..m).map(|_| if below(&mut rng, 4) == 0 { 0.0 } else { scale * unit(&mut rng) }).collect();
        let listing = enumerate_disjoint_path_sets(&graph.view(), semantics, u, v, k, 1_000_000);
        if listing.sets.is_empty() {
            continue;
        }
        let instance = Instance::new(graph, vec![1.0; m], vec![Demand::new(u, v, k)], Removal::Edge, semantics)
            .map_err(|e| e.to_string())?;
        let best = listing.min_union(&x).expect("nonempty listing");
        let expect_violated = best < 1.0 - 1e-6;
        match separate(&instance, &x, 0, 1e-6) {
            Separation::Violated { row, violation } => {
                if !expect_violated || (violation - (1.0 - best)).abs() > 1e-9 {
                    return Err(format!("{edges:?} ({u},{v},{k}): violation {violation} vs enumeration {best}"));
                }
                let row_len: f64 = row.edges.iter().map(|&e| x[e]).sum();
                if (row_len - best).abs() > 1e-9 {
                    return Err(format!("row length {row_len} vs enumeration {best}"));
                }
                violated += 1;
            }
            Separation::Satisfied => {
                if expect_violated {
                    return Err(format!("{edges:?} ({u},{v},{k}): missed union of length {best}"));
                }
                satisfied += 1;
            }
        }
        triples += 1;
    }
    if violated == 0 || satisfied == 0 {
        return Err(format!("degenerate sample: {violated} violated, {satisfied} satisfied"));
    }
    Ok(format!("{triples} triples agree ({violated} violated, {satisfied} satisfied)"))
}

fn bicriteria() -> Outcome {
    let suite = build_suite(&TRADEOFF, 0);
    let mut costs: Vec<Vec<f64>> = Vec::new();
    for beta in [1.0, 1.5, 2.0] {
        let mode = if beta == 1.0 { Mode::Exact } else { Mode::Bicriteria { beta } };
        let reports = run_suite(&suite, &SolveOptions { mode, oracle_cap: 0, ..SolveOptions::default() });
        let mut row = Vec::new();
        for (s, r) in suite.iter().zip(&reports) {
            let cut = r.cut.as_ref().ok_or(format!("seed {}: no cut at beta {beta}", s.seed))?;
            let thresholds = relaxed_thresholds(&s.instance, beta);
            if !verify_cut(&s.instance, &cut.removed, &thresholds).map_err(|e| e.to_string())?.feasible {
                return Err(format!("seed {}: beta {beta} cut fails at ceil(beta k)", s.seed));
            }
            row.push(cut.cost);
        }
        costs.push(row);
    }
    let means: Vec<f64> = costs.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    if !(means[1] <= means[0] && means[2] <= means[1]) {
        return Err(format!("mean cost not non-increasing: {means:?}"));
    }
    for i in 0..suite.len() {
        if costs[1][i] > costs[0][i] || costs[2][i] > costs[1][i] {
            return Err(format!(
                "seed {}: per-instance costs {:?}",
                suite[i].seed,
                [costs[0][i], costs[1][i], costs[2][i]]
            ));
        }
    }
    let out = Command::new(env!("CARGO_BIN_EXE_mrc"))
        .args(["bench", "--format", "csv"])
        .output()
        .map_err(|e| e.to_string())?;
    let table = String::from_utf8_lossy(&out.stdout);
    let bench_means: Vec<f64> = table
        .lines()
        .filter(|l| l.starts_with("tradeoff,"))
        .map(|l| l.split(',').nth(5).and_then(|c| c.parse().ok()).unwrap_or(f64::NAN))
        .collect();
    if !out.status.success() || bench_means.len() != 3 || bench_means.windows(2).any(|w| !(w[1] <= w[0])) {
        return Err(format!("`mrc bench` table missing or not monotone: {bench_means:?}"));
    }
    Ok(format!(
        "{} instances verify at ceil(beta k); mean cost by beta 1/1.5/2 = {:.3}/{:.3}/{:.3}",
        suite.len(),
        means[0],
        means[1],
        means[2]
    ))
}

fn multicut() -> Outcome {
    let suite = build_suite(&MULTICUT, 0);
    let reports = run_suite(&suite, &exact_options(0));
    let mut over = Vec::new();
    for (s, r) in suite.iter().zip(&reports) {
        let bound = log_bound(s.instance.demands().len());
        match r.ratio {
            Some(x) if x <= bound + 1e-9 => {}
            x => over.push(format!("seed {} ratio {x:?} > {bound:.3}", s.seed)),
        }
    }
    for line in &over {
        println!("    multicut over bound: {line}");
    }
    let within = suite.len() - over.len();
    let detail = format!("{within}/{} instances within 2 ln(p+1) + 1", suite.len());
    if suite.len() >= 100 && within * 100 >= 95 * suite.len() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn vertex_equivalence() -> Outcome {
    let suite = build_suite(&VERTEX, 0);
    let (mut feasible, mut infeasible, mut adjacent) = (0, 0, 0);
    for s in &suite {
        let inst = &s.instance;
        if inst.graph().vertex_count() > 7 {
            return Err(format!("seed {} has more than 7 vertices", s.seed));
        }
        let (split, map) = vertex_split_transform(inst).map_err(|e| e.to_string())?;
        let vertex = brute_force_opt(inst, 63).map_err(|e| e.to_string())?;
        let edge = brute_force_opt(&split, 63).map_err(|e| e.to_string())?;
        let edge_cost = edge.cost().expect("split instance is always cuttable");
        match vertex {
            OracleOutcome::Optimal(r) => {
                if r.cost != edge_cost {
                    return Err(format!("seed {}: vertex OPT {} vs split OPT {edge_cost}", s.seed, r.cost));
                }
                feasible += 1;
            }
            OracleOutcome::Infeasible { .. } => {
                if edge_cost < map.large() {
                    return Err(format!("seed {}: vertex oracle infeasible, split OPT {edge_cost}", s.seed));
                }
                infeasible += 1;
            }
        }
        let adjacent_k1 = inst.demands().iter().any(|d| {
            d.k == 1 && inst.graph().edges().iter().any(|e| (e.a, e.b) == (d.u, d.v) || (e.a, e.b) == (d.v, d.u))
        });
        if adjacent_k1 {
            let report = run_pipeline(inst, &exact_options(0)).map_err(|e| e.to_string())?;
            if report.status != RunStatus::Infeasible || report.exit_code != EXIT_INFEASIBLE {
                return Err(format!("seed {}: adjacent k=1 terminals reported {:?}", s.seed, report.status));
            }
            adjacent += 1;
        }
    }
    if adjacent == 0 || feasible == 0 {
        return Err(format!("suite lacks coverage: {feasible} feasible, {adjacent} adjacent-terminal"));
    }
    Ok(format!(
        "{} instances: {feasible} OPT matches, {infeasible} infeasible on both sides, {adjacent} adjacent k=1 reported Infeasible",
        suite.len()
    ))
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for suite in [SANDWICH, TWO_ROUTE, TRADEOFF, MULTICUT, VERTEX] {
        for s in build_suite(&suite, 0).iter().take(15) {
            for mode in [Mode::Exact, Mode::Bicriteria { beta: 1.5 }] {
                let options = SolveOptions { mode, oracle_cap: 12, ..SolveOptions::default() };
                let a = run_pipeline(&s.instance, &options).map_err(|e| e.to_string())?.to_json(false);
                let b = run_pipeline(&s.instance, &options).map_err(|e| e.to_string())?.to_json(false);
                if a != b {
                    return Err(format!("{} seed {}: reports differ", suite.name, s.seed));
                }
                runs += 1;
            }
        }
    }
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/triangle.mrc");
    let cli =
        || Command::new(env!("CARGO_BIN_EXE_mrc")).args(["solve", fixture, "--no-timings"]).output().map(|o| o.stdout);
    let (a, b) = (cli().map_err(|e| e.to_string())?, cli().map_err(|e| e.to_string())?);
    if a != b || a.is_empty() {
        return Err("`mrc solve --no-timings` output differs between runs".into());
    }
    Ok(format!("{runs} repeated pipeline runs and the CLI produce byte-identical reports"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 oracle sandwich", sandwich),
        ("2 exact threshold satisfaction", two_route),
        ("3 Menger and flow oracles", menger_and_flows),
        ("4 separation exactness", separation),
        ("5 bicriteria contract", bicriteria),
        ("6 multicut regression", multicut),
        ("7 vertex-variant equivalence", vertex_equivalence),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({secs:.2}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.2}s) {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
