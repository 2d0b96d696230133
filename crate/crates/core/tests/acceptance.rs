//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use plslab::corpus;
use plslab::count::{
    check_cycle_bounds, count_associative_triples, count_cycles, count_octahedra,
    cycle_count_spectral, octahedra_lower_bound_holds,
};
use plslab::cycle::{completion_defect, enumerate_cycles, CycleKind};
use plslab::decomposition::{
    count_dispersed_ring_decompositions, count_point_decompositions, count_ring_decompositions,
    DEFAULT_BUDGET,
};
use plslab::entropy::{
    covering_chain, inverse_invariance, ruzsa_cover, ruzsa_triangle, space_of, CyclicGroup,
    CyclicMetric,
};
use plslab::extraction::qc_extract;
use plslab::pls::{cyclic, fig1, product, random_relabel, restrict_random, to_binary_op, PartialLatinSquare};
use plslab::quadrangle::{brandt_reconstruct, check_quadrangle, satisfies_all, QcKind};
use plslab::so3::{build_net, fuzzy_op, verify_products, verify_density};
use plslab::vankampen::{build_presentation, emit_embedding, replay, vk_distance, Status};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group_identities() -> Outcome {
    for n in 2..=8usize {
        let g = cyclic(n);
        let oct = count_octahedra(&g);
        ensure(oct == (n as u64).pow(5), || format!("Z/{n}: octahedra {oct}"))?;
        let assoc = count_associative_triples(&to_binary_op(&g).unwrap());
        ensure(assoc == (n as u64).pow(3), || format!("Z/{n}: associative triples {assoc}"))?;
        for kind in [QcKind::Label, QcKind::Row, QcKind::Column] {
            ensure(check_quadrangle(&g, kind).is_empty(), || format!("Z/{n}: {kind} violation"))?;
        }
        for kind in CycleKind::ALL {
            for r in 2..=4 {
                let c = completion_defect(&g, kind, r).map_err(|e| e.to_string())?;
                ensure(c == 1, || format!("Z/{n} {kind:?} r={r}: defect {c}"))?;
            }
        }
    }
    Ok("Z/2..Z/8".into())
}

fn cycle_bounds() -> Outcome {
    let mut instances = 0;
    let mut worst = 0.0f64;
    for seed in 0..120u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=12);
        let p = rng.random_range(0.15..1.0);
        let base = if seed % 2 == 0 { cyclic(n) } else { random_relabel(&cyclic(n), seed) };
        let g = restrict_random(&base, p, seed);
        instances += 1;
        for r in 2..=4 {
            for kind in CycleKind::ALL {
                let b = check_cycle_bounds(&g, kind, r).map_err(|e| e.to_string())?;
                ensure(b.lower_holds && b.upper_holds, || format!("seed {seed} r={r} {kind:?}"))?;
                let exact = count_cycles(&g, kind, r).unwrap().to_f64();
                let spec = cycle_count_spectral(&g, kind, r).unwrap();
                let rel = (exact - spec).abs() / exact.max(1.0);
                worst = worst.max(rel);
                ensure(rel <= 1e-9, || format!("seed {seed} r={r}: spectral relative error {rel:e}"))?;
            }
        }
    }
    Ok(format!("{instances} instances, worst spectral error {worst:.1e}"))
}

fn octahedra_vs_associativity() -> Outcome {
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.random_range(2..=12);
        let p = rng.random_range(0.05..1.0);
        let g = restrict_random(&cyclic(n), p, seed);
        let op = to_binary_op(&g).unwrap();
        let assoc = count_associative_triples(&op);
        let oct = count_octahedra(&g);
        ensure(octahedra_lower_bound_holds(&oct, &assoc, n), || {
            format!("seed {seed}: octahedra {oct} below bound from {assoc} triples")
        })?;
    }
    Ok("60 restrictions".into())
}

fn oracle_equivalence() -> Outcome {
    let mut inst: Vec<PartialLatinSquare> = vec![fig1()];
    for n in 1..=5 {
        inst.push(cyclic(n));
        for s in 0..3 {
            inst.push(restrict_random(&cyclic(n), 0.7, s));
        }
    }
    for p in &inst {
        ensure(count_octahedra(p) == common::octahedra_by_coordinates(p), || format!("octahedra on {p:?}"))?;
    }
    let mut cyc = inst.clone();
    cyc.push(cyclic(6));
    cyc.push(restrict_random(&cyclic(6), 0.6, 4));
    for p in &cyc {
        for kind in CycleKind::ALL {
            for r in 2..=3 {
                ensure(count_cycles(p, kind, r).unwrap() == common::closed_walks(p, kind, r), || {
                    format!("cycles {kind:?} r={r}")
                })?;
            }
        }
    }
    for n in [2usize, 3] {
        let g = cyclic(n);
        for c in enumerate_cycles(&g, CycleKind::Label, 2, 1 << 20).unwrap().iter().step_by(5) {
            let pc = count_point_decompositions(&g, c, 0.0).unwrap();
            ensure(pc == common::point_centres(&g, &c.cells), || "point decompositions".into())?;
            let rc = count_ring_decompositions(&g, c, 0.0).unwrap();
            ensure(rc == common::ring_partners(&g, &c.cells), || "ring decompositions".into())?;
            let dc = count_dispersed_ring_decompositions(&g, c, DEFAULT_BUDGET).unwrap();
            ensure(dc == common::dispersed_by_coordinates(&g, &c.cells), || "dispersed decompositions".into())?;
        }
    }
    Ok(format!("{} octahedron, {} cycle instances", inst.len(), cyc.len()))
}

fn brandt() -> Outcome {
    let bases: Vec<PartialLatinSquare> = vec![
        cyclic(3),
        cyclic(4),
        product(&[2, 2]),
        cyclic(5),
        cyclic(6),
        common::s3(),
        cyclic(7),
        cyclic(8),
        product(&[2, 4]),
        common::d4(),
    ];
    for k in 0..20u64 {
        let base = &bases[k as usize % bases.len()];
        let n = base.dims()[0];
        let g = random_relabel(base, 77 + k);
        let a = brandt_reconstruct(&g, 0, 0).map_err(|e| e.to_string())?;
        a.verify().map_err(|e| e.to_string())?;
        if n <= 6 {
            let b = brandt_reconstruct(&g, (n - 1) as u32, (k as usize % n) as u32).map_err(|e| e.to_string())?;
            ensure(a.isomorphism_to(&b).is_some(), || format!("table {k}: choices not isomorphic"))?;
        }
        let orig = brandt_reconstruct(base, 0, 0).unwrap();
        ensure(a.isomorphism_to(&orig).is_some(), || format!("table {k}: differs from its source"))?;
    }
    Ok("20 scrambled tables, orders 3-8".into())
}

fn van_kampen() -> Outcome {
    let f = fig1();
    let pres = build_presentation(&f);
    let (d, d2) = (pres.letter(2, 3), pres.letter(2, 4));
    let r = vk_distance(&pres, &[d], &[d2], 8, Some(20)).map_err(|e| e.to_string())?;
    ensure(r.status == Status::ProvenAtMost, || format!("fig1: status {:?}", r.status))?;
    let cert = r.certificate.as_ref().ok_or("fig1: no certificate")?;
    let area = replay(&pres, &[d], &[d2], cert).map_err(|e| e.to_string())?;
    ensure(area <= 8, || format!("fig1: area {area}"))?;

    let mut proven = 1usize;
    for g in [cyclic(2), cyclic(3), cyclic(4), cyclic(5), product(&[2, 2])] {
        let rep = emit_embedding(&g, 12, None, 200_000).map_err(|e| e.to_string())?;
        for p in &rep.pairs {
            ensure(p.status == Status::NotFoundWithinBudget, || {
                format!("{:?}: pair {} {} has status {:?}", g.dims(), p.first, p.second, p.status)
            })?;
        }
        let pres = build_presentation(&g);
        for t in &rep.triples {
            let lhs = [pres.letter(0, t.triple[0]), pres.letter(1, t.triple[1])];
            let rhs = [pres.letter(2, t.triple[2])];
            replay(&pres, &lhs, &rhs, &t.certificate).map_err(|e| e.to_string())?;
            proven += 1;
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let r = vk_distance(&pres, &[pres.letter(a, 0)], &[pres.letter(b, 0)], 12, None).unwrap();
            ensure(r.status == Status::ClassSeparatedInfinite, || format!("classes {a} {b}: {:?}", r.status))?;
        }
    }
    Ok(format!("fig1 area {area}, {proven} certificates replayed"))
}

fn extraction() -> Outcome {
    for e in corpus::entries() {
        let p = e.generate().unwrap();
        let (out, _) = qc_extract(&p, 1).map_err(|err| format!("{}: {err}", e.name))?;
        ensure(satisfies_all(&out), || format!("{}: output violates the quadrangle conditions", e.name))?;
    }
    let mut min_kept = 1.0f64;
    for seed in 0..50u64 {
        let p = restrict_random(&cyclic(8), 0.3 + 0.014 * seed as f64, seed);
        let (out, _) = qc_extract(&p, seed).map_err(|e| e.to_string())?;
        ensure(satisfies_all(&out), || format!("Z/8 seed {seed}: unclean"))?;
        let kept = out.len() as f64 / p.len().max(1) as f64;
        min_kept = min_kept.min(kept);
        ensure(kept >= 0.01, || format!("Z/8 seed {seed}: kept {kept:.3}"))?;
    }
    Ok(format!("{} corpus entries, min retained {:.2}", corpus::entries().len(), min_kept))
}

fn metric_inequalities() -> Outcome {
    let g = CyclicGroup { n: 24, metric: CyclicMetric::Cyclic };
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let subset = |rng: &mut ChaCha8Rng| -> Vec<u64> {
        let k = rng.random_range(1..=12);
        sample(rng, 24, k).into_iter().map(|v| v as u64).collect()
    };
    let mut checks = 0;
    for trial in 0..150 {
        let eps = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0][trial % 6];
        let (u, v, w) = (subset(&mut rng), subset(&mut rng), subset(&mut rng));
        let space = space_of(&g, &u).unwrap();
        let all: Vec<usize> = (0..u.len()).collect();
        for c in covering_chain(&space, &all, eps).map_err(|e| e.to_string())? {
            ensure(c.holds, || format!("trial {trial}: {} ({} > {})", c.name, c.lhs, c.rhs))?;
            checks += 1;
        }
        for c in inverse_invariance(&g, &u, eps).map_err(|e| e.to_string())? {
            ensure(c.holds, || format!("trial {trial}: {}", c.name))?;
            checks += 1;
        }
        let t = ruzsa_triangle(&g, &u, &v, &w, eps).map_err(|e| e.to_string())?;
        ensure(t.holds, || format!("trial {trial}: triangle {} > {}", t.lhs, t.rhs))?;
        let cover = ruzsa_cover(&g, &u, &v, eps / 2.0).map_err(|e| e.to_string())?;
        ensure(cover.verified, || format!("trial {trial}: cover"))?;
        checks += 2;
    }
    Ok(format!("{checks} exact checks"))
}

fn so3() -> Outcome {
    let (delta, theta) = (0.45, 0.9);
    let net = build_net(delta, 13, 10_000).map_err(|e| e.to_string())?;
    let d = verify_density(&net, theta);
    ensure(d.check.pass && d.check.margin() >= 10.0, || {
        format!("defined pairs {} vs bound {:e}", d.check.measured, d.check.bound)
    })?;
    let c = verify_products(&net, theta, 0.5, 13).map_err(|e| e.to_string())?;
    let triples = c
        .checks
        .iter()
        .find(|k| k.metric == "associative_defined_triples")
        .expect("reported");
    ensure(triples.pass && triples.margin() >= 10.0, || {
        format!("triples {} vs bound {:e}", triples.measured, triples.bound)
    })?;
    let op = fuzzy_op(&net, theta / 3.0).map_err(|e| e.to_string())?;
    let v = op.validate();
    ensure(v.ok, || format!("{} injectivity violations", v.violations.len()))?;
    Ok(format!(
        "|net| = {}, pair proportion {:.3} ({:.1e}x), triples {:.3e} ({:.1e}x)",
        net.len(),
        d.check.measured,
        d.check.margin(),
        triples.measured,
        triples.margin()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("group-table identities", 10, group_identities),
        ("cycle count bounds and spectrum", 30, cycle_bounds),
        ("octahedra versus associative triples", 60, octahedra_vs_associativity),
        ("fast counters equal brute-force oracles", 600, oracle_equivalence),
        ("group reconstruction from scrambled tables", 10, brandt),
        ("van Kampen fixtures and certificate replay", 600, van_kampen),
        ("extraction postcondition", 600, extraction),
        ("metric entropy inequalities on Z/24", 60, metric_inequalities),
        ("SO(3) net bounds and injectivity", 300, so3),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let el = t.elapsed();
        let out = out.and_then(|s| {
            if el > Duration::from_secs(*limit) {
                Err(format!("took {el:.1?}, limit {limit} s"))
            } else {
                Ok(s)
            }
        });
        match out {
            Ok(s) => println!("PASS {}: {name} [{el:.2?}] {s}", i + 1),
            Err(s) => {
                failed += 1;
                println!("FAIL {}: {name} [{el:.2?}] {s}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
