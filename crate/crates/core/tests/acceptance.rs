//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use turan_core::canon::are_isomorphic;
use turan_core::census::{
    classify_catalog, enumerate_nonisomorphic, find_minimal_nonvanishing, paper_catalog_seven,
    run_census, Bucket, Catalog, CensusOptions,
};
use turan_core::certify::{
    build_example8, build_example9, certify_uniform_turan_1_27, example8_graph,
    verify_bipartition_certificate, verify_turan_certificate, BipartitionCertificate,
    IntersectionMode, TuranCertificate,
};
use turan_core::digraph::digraph_vanishing_oracle;
use turan_core::hypergraph::{complete, tight_cycle};
use turan_core::orderings::{find_vanishing_ordering, Role};
use turan_core::palette::{builtin_palette, palette_density};
use turan_core::quasirandom::{check_d_eps_dense, edge_density, sample_palette_host, MeasureMode};
use turan_core::rational::{ratio, to_f64};
use turan_core::subgraph::contains_subhypergraph_with_bounds;
use turan_core::{Edge, Hypergraph3};

type Outcome = Result<String, String>;

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Outcome {
    let ex9 = turan_core::certify::example9_graph();
    let cases = [
        ("example9", ex9, false),
        ("tight C6", tight_cycle(6), true),
        ("K4", complete(4), false),
    ];
    let mut notes = Vec::new();
    for (name, h, expect) in cases {
        let (r, dt) = timed(|| find_vanishing_ordering(&h).unwrap());
        ensure(r.is_some() == expect, format!("{name}: wrong verdict"))?;
        ensure(dt < Duration::from_secs(1), format!("{name}: took {dt:?}"))?;
        notes.push(format!("{name} {dt:.1?}"));
    }
    Ok(notes.join(", "))
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Hypergraph3 {
    let p: f64 = rng.gen_range(0.05..0.6);
    let mut edges = Vec::new();
    for c in 0..n {
        for b in 0..c {
            for a in 0..b {
                if rng.gen_bool(p) {
                    edges.push([a, b, c]);
                }
            }
        }
    }
    Hypergraph3::from_edges(n, edges).unwrap()
}

fn criterion_2() -> Outcome {
    let agree = |h: &Hypergraph3| {
        let search = find_vanishing_ordering(h).unwrap().is_some();
        let oracle = digraph_vanishing_oracle(h).unwrap().vanishing;
        search == oracle
    };
    let mut classes = 0;
    for n in 0..=5 {
        for h in enumerate_nonisomorphic(n, turan_core::hypergraph::choose3(n)).unwrap() {
            classes += 1;
            ensure(agree(&h), format!("disagreement on {h:?}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..1000 {
        let h = random_graph(&mut rng, 6 + i % 2);
        ensure(agree(&h), format!("disagreement on {h:?}"))?;
    }
    Ok(format!("{classes} classes with n <= 5 and 1000 random graphs, 0 disagreements"))
}

fn criterion_3() -> Outcome {
    let (h9, c9) = build_example9();
    ensure(verify_turan_certificate(&h9, &c9), "example9 certificate rejected")?;
    for k in 1..=5 {
        let (h, c) = build_example8(k).map_err(|e| e.to_string())?;
        ensure(verify_turan_certificate(&h, &c), format!("H^{k} certificate rejected"))?;
    }
    let mut notes = Vec::new();
    for (name, h) in [("example9", h9), ("H^1", example8_graph(1).unwrap())] {
        let (r, dt) = timed(|| certify_uniform_turan_1_27(&h).unwrap());
        let c = r.certificate.ok_or(format!("{name}: search found no certificate"))?;
        ensure(verify_turan_certificate(&h, &c), format!("{name}: found certificate rejected"))?;
        ensure(dt < Duration::from_secs(60), format!("{name}: search took {dt:?}"))?;
        notes.push(format!("{name} search {dt:.1?}"));
    }
    Ok(format!("example9 and H^1..H^5 replay; {}", notes.join(", ")))
}

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("turan27-acceptance-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn criterion_4(cat: &Catalog, dt: Duration) -> Outcome {
    let s = cat.summary();
    ensure(
        (s.minimal, s.certified, s.palette_avoided, s.unresolved, s.isolated) == (24, 9, 15, 0, 6),
        format!("got {s}"),
    )?;
    ensure(cat.records.len() == 24, "record count differs from minimal count")?;
    let certified: Vec<&Hypergraph3> = cat
        .records
        .iter()
        .filter(|r| r.bucket == Some(Bucket::Certified))
        .map(|r| &r.representative)
        .collect();
    for (i, line) in paper_catalog_seven().iter().enumerate() {
        let hits = certified
            .iter()
            .filter(|h| are_isomorphic(h, line).unwrap())
            .count();
        ensure(hits == 1, format!("printed line {} matches {hits} certified classes", i + 1))?;
    }

    // Interrupt after a few tasks, then resume from the checkpoint.
    let dir = scratch_dir("census");
    let cp = dir.join("census.checkpoint.json");
    let partial = run_census(
        7,
        &CensusOptions {
            checkpoint: Some(cp.clone()),
            max_new_tasks: Some(5),
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(!partial.complete, "interrupted run claims completeness")?;
    let resumed = run_census(
        7,
        &CensusOptions {
            checkpoint: Some(cp.clone()),
            resume: true,
            jobs: Some(2),
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let mismatch = run_census(
        6,
        &CensusOptions {
            checkpoint: Some(cp),
            resume: true,
            ..Default::default()
        },
    );
    let _ = std::fs::remove_dir_all(&dir);
    let resumed = classify_catalog(resumed);
    ensure(resumed.complete, "resumed run incomplete")?;
    ensure(resumed.digest() == cat.digest(), "resumed catalog digest differs")?;
    ensure(mismatch.is_err(), "checkpoint for n = 7 accepted for n = 6")?;
    Ok(format!("{s}; certified = printed list; resume digest {}..; {dt:.1?}", &cat.digest()[..12]))
}

fn criterion_5() -> Outcome {
    let (cat, dt) = timed(|| classify_catalog(run_census(6, &CensusOptions::default()).unwrap()));
    let s = cat.summary();
    ensure(s.certified == 0, format!("got {s}"))?;
    ensure(dt < Duration::from_secs(600), format!("took {dt:?}"))?;
    Ok(format!("n = 6: {s}; {dt:.1?}"))
}

fn criterion_6() -> Outcome {
    let d = |name: &str| {
        let p = builtin_palette(name).unwrap();
        palette_density(&p.palette, &p.dist).unwrap()
    };
    ensure(d("vanishing") == ratio(1, 27), "vanishing palette density is not 1/27")?;
    ensure(d("four27_a") == ratio(4, 27), "four27_a density is not 4/27")?;
    ensure(d("four27_b") == ratio(4, 27), "four27_b density is not 4/27")?;
    Ok("1/27, 4/27, 4/27 exactly".into())
}

fn criterion_7(cat: &Catalog) -> Outcome {
    let spec = builtin_palette("vanishing").unwrap();
    let target = 1.0 / 27.0;
    let d = ratio(1, 27) - ratio(1, 100);
    let eps = ratio(1, 100);
    let (mut lo, mut hi) = (f64::MAX, f64::MIN);
    for seed in 0..20 {
        let s = sample_palette_host(200, &spec, seed).unwrap();
        let x = to_f64(&edge_density(&s.hypergraph));
        lo = lo.min(x);
        hi = hi.max(x);
        ensure((x - target).abs() <= 0.01, format!("seed {seed}: density {x:.5}"))?;
        let v = check_d_eps_dense(
            &s.hypergraph,
            &d,
            &eps,
            MeasureMode::Sampled {
                trials: 10_000,
                seed,
            },
        )
        .unwrap();
        ensure(v.holds, format!("seed {seed}: denseness violated by {:?}", v.counterexample))?;
    }

    let mut checks = 0;
    for r in cat.records.iter().filter(|r| r.bucket == Some(Bucket::PaletteAvoided)) {
        let name = r
            .palette_avoidance
            .iter()
            .find(|(_, &embeds)| !embeds)
            .map(|(n, _)| n.clone())
            .ok_or("avoided record without an avoiding palette")?;
        let p = builtin_palette(&name).unwrap();
        for seed in 0..10 {
            let host = sample_palette_host(12, &p, seed).unwrap().hypergraph;
            let found = contains_subhypergraph_with_bounds(&host, &r.representative, 16, 8).unwrap();
            ensure(found.is_none(), format!("{name} host {seed} contains {:?}", r.representative))?;
            checks += 1;
        }
    }
    ensure(checks == 150, format!("{checks} containment checks, expected 150"))?;
    Ok(format!(
        "densities in [{lo:.5}, {hi:.5}] vs 1/27 = {target:.5}; no sampled violations; {checks} host checks clean"
    ))
}

/// Checks a bipartition certificate from the definitions, sharing no code
/// with the library verifier.
fn independently_valid(h: &Hypergraph3, c: &BipartitionCertificate) -> bool {
    let p1: BTreeSet<Edge> = c.bipartition.part1.iter().copied().collect();
    let p2: BTreeSet<Edge> = c.bipartition.part2.iter().copied().collect();
    let all: BTreeSet<Edge> = h.edges().iter().copied().collect();
    if p1.len() + p2.len() != h.edge_count()
        || p1.len() != c.bipartition.part1.len()
        || p2.len() != c.bipartition.part2.len()
        || p1.union(&p2).copied().collect::<BTreeSet<_>>() != all
    {
        return false;
    }
    let ord = c.ordering.as_slice();
    let mut seen = ord.to_vec();
    seen.sort_unstable();
    if seen != (0..h.n()).collect::<Vec<_>>() {
        return false;
    }
    let mut pos = vec![0; h.n()];
    for (i, &v) in ord.iter().enumerate() {
        pos[v] = i;
    }
    let forced = |part: &BTreeSet<Edge>| -> Option<BTreeMap<(usize, usize), Role>> {
        let mut m = BTreeMap::new();
        for e in part {
            let mut by_pos = e.to_vec();
            by_pos.sort_by_key(|&v| pos[v]);
            let [x, y, z] = [by_pos[0], by_pos[1], by_pos[2]];
            for ((a, b), r) in [((x, y), Role::Left), ((x, z), Role::Top), ((y, z), Role::Right)] {
                let key = (a.min(b), a.max(b));
                if *m.entry(key).or_insert(r) != r {
                    return None;
                }
            }
        }
        Some(m)
    };
    let (Some(f1), Some(f2)) = (forced(&p1), forced(&p2)) else {
        return false;
    };
    let claims_ok = f1.iter().all(|(&(a, b), &r)| c.roles1.get(a, b) == Some(r))
        && f2.iter().all(|(&(a, b), &r)| c.roles2.get(a, b) == Some(r));
    let want = match c.mode {
        IntersectionMode::Horizontal => Role::Right,
        IntersectionMode::Vertical => Role::Top,
    };
    let shared_ok = p1.iter().all(|e1| {
        p2.iter().all(|e2| {
            let common: Vec<usize> = e1.iter().filter(|v| e2.contains(v)).copied().collect();
            if common.len() != 2 {
                return true;
            }
            let key = (common[0], common[1]);
            f1.get(&key) == Some(&want) && f2.get(&key) == Some(&Role::Left)
        })
    });
    claims_ok && shared_ok
}

fn mutate(rng: &mut ChaCha8Rng, c: &BipartitionCertificate) -> (BipartitionCertificate, &'static str) {
    let mut m = c.clone();
    loop {
        match rng.gen_range(0..3) {
            0 => {
                let roles = if rng.gen_bool(0.5) { &mut m.roles1 } else { &mut m.roles2 };
                let keys: Vec<(usize, usize)> = roles.iter().map(|(k, _)| k).collect();
                if let Some(&(a, b)) = keys.choose(rng) {
                    let old = roles.get(a, b).unwrap();
                    let new = *Role::ALL.iter().filter(|&&r| r != old).collect::<Vec<_>>().choose(rng).unwrap();
                    roles.set(a, b, *new);
                    return (m, "role flip");
                }
            }
            1 => {
                let mut ord = m.ordering.as_slice().to_vec();
                let i = rng.gen_range(0..ord.len());
                let j = rng.gen_range(0..ord.len());
                if i != j {
                    ord.swap(i, j);
                    m.ordering = turan_core::orderings::VertexOrder::new(ord).unwrap();
                    return (m, "ordering swap");
                }
            }
            _ => {
                let from_first = rng.gen_bool(0.5);
                let (src, dst) = if from_first {
                    (&mut m.bipartition.part1, &mut m.bipartition.part2)
                } else {
                    (&mut m.bipartition.part2, &mut m.bipartition.part1)
                };
                if !src.is_empty() {
                    let e = src.remove(rng.gen_range(0..src.len()));
                    dst.push(e);
                    return (m, "edge move");
                }
            }
        }
    }
}

fn criterion_8(cat: &Catalog) -> Outcome {
    let mut instances: Vec<(Hypergraph3, TuranCertificate)> = vec![build_example9()];
    for r in &cat.records {
        if let Some(c) = &r.turan_certified {
            instances.push((r.representative.clone(), c.clone()));
        }
    }
    ensure(instances.iter().all(|(h, _)| h.n() <= 7), "instance above 7 vertices")?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut stats: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for i in 0..10_000 {
        let (h, cert) = &instances[i % instances.len()];
        let vertical = rng.gen_bool(0.5);
        let base = if vertical { &cert.vertical } else { &cert.horizontal };
        let (m, kind) = mutate(&mut rng, base);
        let mut full = cert.clone();
        if vertical {
            full.vertical = m.clone();
        } else {
            full.horizontal = m.clone();
        }
        let accepted = verify_turan_certificate(h, &full);
        ensure(
            accepted == verify_bipartition_certificate(h, &m),
            "full and part verifiers disagree",
        )?;
        let genuine = independently_valid(h, &m);
        if accepted && !genuine {
            return Err(format!("{kind} wrongly accepted on {h:?}"));
        }
        if !accepted && genuine {
            return Err(format!("{kind} of a valid certificate rejected on {h:?}"));
        }
        let s = stats.entry(kind).or_default();
        if accepted {
            s.1 += 1;
        } else {
            s.0 += 1;
        }
    }
    let detail: Vec<String> = stats
        .iter()
        .map(|(k, (rej, ok))| format!("{k}: {rej} rejected, {ok} still valid"))
        .collect();
    Ok(format!("10000 mutations, 0 wrongly accepted ({})", detail.join("; ")))
}

fn main() {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut run = |n: usize, f: &dyn Fn() -> Outcome| {
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".into()));
        let line = match &r {
            Ok(msg) => format!("criterion {n}: PASS ({msg})"),
            Err(msg) => format!("criterion {n}: FAIL ({msg})"),
        };
        println!("{line}");
        results.push((n, r));
    };
    run(1, &criterion_1);
    run(2, &criterion_2);
    run(3, &criterion_3);
    let (cat, dt) = timed(|| classify_catalog(find_minimal_nonvanishing(7).unwrap()));
    run(4, &|| criterion_4(&cat, dt));
    run(5, &criterion_5);
    run(6, &criterion_6);
    run(7, &|| criterion_7(&cat));
    run(8, &|| criterion_8(&cat));
    let failed: Vec<usize> = results.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::exit(1);
    }
}
