//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero when a criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use louvain_core::compact::{
    compact_louvain_aggregate, compact_louvain_move, HashSlab, PickLessSchedule,
};
use louvain_core::graph::{generate, vertex_weights};
use louvain_core::mc::{louvain_aggregate, renumber_communities};
use louvain_core::oracle::{check_delta, exhaustive_best_partition, sequential_louvain};
use louvain_core::{
    build_csr, compact_louvain, louvain, CompactParams, CsrGraph, LouvainParams, LouvainResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Failed for a reason outside the implementation's control.
    FailHost(String),
}

type Criterion = (&'static str, fn() -> Outcome);

type Engine = (&'static str, fn(&CsrGraph, &LouvainParams) -> LouvainResult);

fn engines() -> [Engine; 3] {
    [
        ("sequential", |g, p| sequential_louvain(g, p).unwrap()),
        ("mc", |g, p| louvain(g, p).unwrap()),
        ("compact", |g, p| compact_louvain(g, p, &CompactParams::default()).unwrap()),
    ]
}

fn delta_consistency() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut moves, mut worst) = (0, 0.0f64);
    while moves < 600 {
        let n = rng.gen_range(2..=64);
        let edges = rng.gen_range(1..=(n * (n - 1) / 2).min(300));
        let el = generate::random_real_graph(n, edges, 10.0, rng.gen());
        let g = build_csr(&el, true).unwrap();
        let c = generate::random_membership(n, rng.gen_range(1..=n), rng.gen());
        for _ in 0..10 {
            let i = rng.gen_range(0..n);
            let target = if rng.gen_bool(0.5) { c[rng.gen_range(0..n)] } else { rng.gen_range(0..n as u32) };
            let (formula, direct) = check_delta(&g, &c, i, target).unwrap();
            worst = worst.max((formula - direct).abs());
            moves += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("{moves} moves, max |error| {worst:.2e}, {secs:.2} s");
    if worst <= 1e-9 && secs < 5.0 { Outcome::Pass(detail) } else { Outcome::Fail(detail) }
}

fn exhaustive_agreement() -> Outcome {
    let fixtures = [
        ("triangle", triangle(), 0.0),
        ("single-edge", single_edge(), 0.0),
        ("two-triangles", two_triangles(), 0.5),
        ("barbell", barbell(), 5.0 / 14.0),
    ];
    let p = LouvainParams::single_threaded();
    let mut worst = 0.0f64;
    for (name, g, expected) in &fixtures {
        let best = exhaustive_best_partition(g).unwrap().best_q;
        if (best - expected).abs() > 1e-12 {
            return Outcome::Fail(format!("exhaustive optimum of {name} is {best}, expected {expected}"));
        }
        for (engine, run) in engines() {
            let q = run(g, &p).modularity;
            if (q - best).abs() > 1e-9 {
                return Outcome::Fail(format!("{engine} reaches {q} on {name}, optimum {best}"));
            }
            worst = worst.max((q - best).abs());
        }
    }
    Outcome::Pass(format!("4 fixtures x 3 engines, max gap {worst:.1e}"))
}

fn aggregation_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..100 {
        let n = rng.gen_range(2..=400);
        let edges = rng.gen_range(1..=(n * (n - 1) / 2).min(3 * n));
        let g = build_csr(&generate::random_graph(n, edges, 1..=20, rng.gen()), true).unwrap();
        let (c, _) = renumber_communities(&generate::random_membership(n, rng.gen_range(1..=n), rng.gen()));
        let mc = louvain_aggregate(&g, &c).unwrap();
        let compact = compact_louvain_aggregate(&g, &c, &CompactParams::default()).unwrap();
        if mc.total_weight() != g.total_weight() || compact.total_weight() != g.total_weight() {
            return Outcome::Fail(format!(
                "graph {t}: weight {} -> mc {}, compact {}",
                g.total_weight(),
                mc.total_weight(),
                compact.total_weight()
            ));
        }
        if arc_multiset(&mc) != arc_multiset(&compact) {
            return Outcome::Fail(format!("graph {t}: engines disagree on aggregated arcs"));
        }
    }
    Outcome::Pass("100 graphs, exact weight, identical arc multisets".into())
}

fn engine_agreement() -> Outcome {
    let p = LouvainParams::default();
    let (mut worst_mc, mut worst_compact) = (0.0f64, 0.0f64);
    for seed in 0..50 {
        let n = 500 + (seed as usize * 10) % 501;
        let g = build_csr(&generate::planted_partition(n, 10, 0.3, 0.01, seed).0, true).unwrap();
        let mean = |f: &dyn Fn() -> f64| (0..5).map(|_| f()).sum::<f64>() / 5.0;
        let seq = mean(&|| sequential_louvain(&g, &p).unwrap().modularity);
        let mc = mean(&|| louvain(&g, &p).unwrap().modularity);
        let compact = mean(&|| compact_louvain(&g, &p, &CompactParams::default()).unwrap().modularity);
        worst_mc = worst_mc.max((mc - seq).abs());
        worst_compact = worst_compact.max((compact - seq).abs());
    }
    let detail = format!("50 graphs, max |dQ| mc {worst_mc:.2e}, compact {worst_compact:.2e}");
    if worst_mc <= 0.01 && worst_compact <= 0.01 { Outcome::Pass(detail) } else { Outcome::Fail(detail) }
}

fn monotonicity() -> Outcome {
    let p = LouvainParams { track_modularity: true, ..LouvainParams::single_threaded() };
    let mut runs = 0;
    for seed in 0..20 {
        for g in [planted(600, seed), random(400, 2000, seed)] {
            for (engine, run) in engines() {
                let r = run(&g, &p);
                let qs: Vec<f64> = r.pass_stats.iter().map(|s| s.modularity.unwrap()).collect();
                if let Some(w) = qs.windows(2).find(|w| w[1] < w[0] - 1e-12) {
                    return Outcome::Fail(format!("{engine} seed {seed}: Q fell from {} to {}", w[0], w[1]));
                }
                if let Some(g) = r.pass_stats.iter().filter_map(|s| s.min_accepted_gain).find(|&g| g <= 0.0) {
                    return Outcome::Fail(format!("{engine} seed {seed}: accepted move with gain {g}"));
                }
                runs += 1;
            }
        }
    }
    Outcome::Pass(format!("{runs} single-threaded runs"))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn hashtable_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let slab = HashSlab::<f32>::new(2 * 512, Default::default());
    let mut failures = 0;
    let mut mismatches = 0;
    let mut capacities = (usize::MAX, 0);
    for _ in 0..100_000 {
        // Log-uniform distinct-key count, so capacities cover 1..=1023.
        let e = rng.gen_range(0..=9u32);
        let d = rng.gen_range((1usize << e).div_ceil(2)..=1 << e);
        let t = slab.view(0, d);
        let (p1, p2) = (t.capacity(), t.secondary());
        capacities = (capacities.0.min(p1), capacities.1.max(p1));
        if gcd(p1, p2) != 1 {
            return Outcome::Fail(format!("gcd({p1}, {p2}) != 1"));
        }
        t.clear();
        let keys: Vec<u32> = (0..d).map(|_| rng.gen_range(0..u32::MAX)).collect();
        let mut reference: BTreeMap<u32, f64> = BTreeMap::new();
        for _ in 0..rng.gen_range(1..=2 * d) {
            if rng.gen_ratio(1, 50) {
                t.clear();
                reference.clear();
                continue;
            }
            let k = keys[rng.gen_range(0..d)];
            let v = rng.gen_range(0.0..10.0);
            if t.accumulate(k, v, rng.gen()).is_err() {
                failures += 1;
            }
            *reference.entry(k).or_insert(0.0) += v;
        }
        let got: BTreeMap<u32, f64> = t.entries().collect();
        let values_match = got.len() == reference.len()
            && reference.iter().all(|(k, v)| got.get(k).is_some_and(|g| (g - v).abs() <= 1e-5 * v.max(1.0)));
        let expected_max = got.iter().fold((louvain_core::graph::SENTINEL_ID, 0.0), |b, (&k, &v)| {
            if b.0 == louvain_core::graph::SENTINEL_ID || v > b.1 { (k, v) } else { b }
        });
        if !values_match || t.max() != expected_max {
            mismatches += 1;
        }
    }
    let detail = format!(
        "1e5 sequences, capacities {}..={}, {failures} failed, {mismatches} mismatches",
        capacities.0, capacities.1
    );
    if failures == 0 && mismatches == 0 && capacities == (1, 1023) {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn pick_less_convergence() -> Outcome {
    let n = 8;
    let g = graph(n, &[(3, 5)]);
    let k = vertex_weights(&g);
    let run = |pick_less: Option<PickLessSchedule>| {
        let mut c: Vec<u32> = (0..n as u32).collect();
        let mut sigma = k.clone();
        let mut flags = vec![true; n];
        let p = LouvainParams { max_iterations: 100, ..LouvainParams::single_threaded() };
        let cp = CompactParams { pick_less, lockstep: true, ..CompactParams::default() };
        let out = compact_louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.01, &p, &cp).unwrap();
        (c[3] == c[5], out.iterations)
    };
    let (merged_without, iters_without) = run(None);
    let (merged_with, iters_with) = run(Some(PickLessSchedule { rho: 4 }));
    let detail = format!(
        "without PL: {iters_without} iterations, merged {merged_without}; PL4: {iters_with} iterations, merged {merged_with}"
    );
    if !merged_without && iters_without == 100 && merged_with && iters_with < 100 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn tolerance_machinery() -> Outcome {
    let p = LouvainParams { initial_tolerance: 0.01, tolerance_drop: 10.0, ..LouvainParams::single_threaded() };
    let g = build_csr(&generate::ring_of_cliques(200, 5), true).unwrap();
    let mut passes = 0;
    for (engine, run) in engines() {
        let r = run(&g, &p);
        for (k, s) in r.pass_stats.iter().enumerate() {
            let expected = 0.01 / 10f64.powi(k as i32);
            if (s.tolerance - expected).abs() > 1e-15 * expected {
                return Outcome::Fail(format!("{engine} pass {k}: tolerance {}, expected {expected}", s.tolerance));
            }
        }
        passes = passes.max(r.passes);
    }
    if passes < 2 {
        return Outcome::Fail(format!("only {passes} pass ran; scaling not exercised"));
    }
    let shrink = graph(10, &[(0, 1)]);
    let p = LouvainParams { aggregation_tolerance: 0.8, ..LouvainParams::single_threaded() };
    for (engine, run) in engines() {
        let r = run(&shrink, &p);
        if r.passes != 1 || r.pass_stats[0].aggregated || r.pass_stats[0].communities != 9 {
            return Outcome::Fail(format!("{engine}: 10% shrink did not stop before aggregation"));
        }
    }
    Outcome::Pass(format!("tolerance 0.01/10^k over up to {passes} passes; 9/10 shrink stops without aggregating"))
}

fn scaling() -> Outcome {
    let g = build_csr(&generate::random_graph(20_000, 150_000, 1..=9, 9), true).unwrap();
    let time = |threads: usize| {
        let p = LouvainParams { thread_count: threads, ..LouvainParams::default() };
        louvain(&g, &p).unwrap();
        let mut samples: Vec<Duration> = (0..5)
            .map(|_| {
                let t = Instant::now();
                louvain(&g, &p).unwrap();
                t.elapsed()
            })
            .collect();
        samples.sort();
        samples[2]
    };
    let (one, four) = (time(1), time(4));
    let speedup = one.as_secs_f64() / four.as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let detail = format!(
        "{} edges, 1 thread {:.1} ms, 4 threads {:.1} ms, speedup {speedup:.2}, host CPUs {cores}",
        g.num_undirected_edges(),
        one.as_secs_f64() * 1e3,
        four.as_secs_f64() * 1e3
    );
    if speedup > 1.0 {
        Outcome::Pass(detail)
    } else if cores < 2 {
        Outcome::FailHost(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn instrumentation() -> Outcome {
    let g = planted(1000, 10);
    let mut worst = 0.0f64;
    for (_, run) in engines() {
        for threads in [1, 4] {
            let r = run(&g, &LouvainParams { thread_count: threads, ..LouvainParams::default() });
            let s = r.phase_times.split();
            if [s.local_moving, s.aggregation, s.other].iter().any(|&x| !(-1e-9..=1.0 + 1e-9).contains(&x)) {
                return Outcome::Fail(format!("fraction out of range: {s:?}"));
            }
            worst = worst.max((s.sum() - 1.0).abs());
        }
    }
    let detail = format!("local-moving + aggregation + other, max |sum - 1| {worst:.1e}");
    if worst <= 1e-9 { Outcome::Pass(detail) } else { Outcome::Fail(detail) }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("delta-consistency", delta_consistency),
        ("exhaustive-optimum", exhaustive_agreement),
        ("aggregation-conservation", aggregation_conservation),
        ("engine-agreement", engine_agreement),
        ("monotonicity", monotonicity),
        ("hashtable-fuzz", hashtable_fuzz),
        ("pick-less-convergence", pick_less_convergence),
        ("tolerance-machinery", tolerance_machinery),
        ("scaling-smoke", scaling),
        ("instrumentation", instrumentation),
    ];
    let mut blocking = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Outcome::Pass(d) => println!("[PASS] {:>2} {name}: {d}", i + 1),
            Outcome::Fail(d) => {
                blocking += 1;
                println!("[FAIL] {:>2} {name}: {d}", i + 1);
            }
            Outcome::FailHost(d) => {
                println!("[FAIL] {:>2} {name}: {d} (not blocking: needs a multi-core host)", i + 1)
            }
        }
    }
    if blocking > 0 {
        std::process::exit(1);
    }
}
