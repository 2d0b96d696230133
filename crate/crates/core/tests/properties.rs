mod common;

use proptest::prelude::*;

use plslab::count::{
    check_cycle_bounds, count_associative_triples, count_cycles, count_octahedra,
    cycle_count_spectral, octahedra_lower_bound_holds,
};
use plslab::cycle::{completion_defect, CycleKind};
use plslab::entropy::{
    is_net, is_separated, net, ruzsa_cover, separated_set, CyclicGroup, CyclicMetric,
    FiniteMetricSpace, Mode, NetKind,
};
use plslab::extraction::qc_extract;
use plslab::pls::{cyclic, random_quasigroup, random_relabel, restrict_random, to_binary_op, PartialLatinSquare};
use plslab::quadrangle::{check_quadrangle, satisfies_all, QcKind};
use plslab::so3::{rotation_distance, Rotation};
use plslab::vankampen::{build_presentation, cyclic_reduce, free_reduce, inverse, replay, vk_distance, Status};

fn restricted() -> impl Strategy<Value = PartialLatinSquare> {
    (2usize..=7, 0.2f64..1.0, any::<u64>(), any::<bool>()).prop_map(|(n, p, seed, group)| {
        let base = if group { cyclic(n) } else { random_quasigroup(n, seed ^ 1) };
        restrict_random(&base, p, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn octahedra_match_coordinate_loop(p in restricted()) {
        prop_assert_eq!(count_octahedra(&p), common::octahedra_by_coordinates(&p));
    }

    #[test]
    fn cycle_counts_obey_bounds_and_spectrum(p in restricted(), r in 2usize..=4) {
        for kind in CycleKind::ALL {
            let b = check_cycle_bounds(&p, kind, r).unwrap();
            prop_assert!(b.lower_holds && b.upper_holds);
            let exact = count_cycles(&p, kind, r).unwrap().to_f64();
            let spec = cycle_count_spectral(&p, kind, r).unwrap();
            prop_assert!((exact - spec).abs() <= 1e-9 * exact.max(1.0));
        }
    }

    #[test]
    fn octahedra_dominate_associativity(n in 2usize..=8, p in 0.1f64..1.0, seed in any::<u64>()) {
        let sub = restrict_random(&cyclic(n), p, seed);
        let op = to_binary_op(&sub).unwrap();
        let assoc = count_associative_triples(&op);
        prop_assert!(octahedra_lower_bound_holds(&count_octahedra(&sub), &assoc, n));
    }

    #[test]
    fn relabelled_groups_stay_clean(n in 2usize..=7, seed in any::<u64>()) {
        let g = random_relabel(&cyclic(n), seed);
        prop_assert!(satisfies_all(&g));
        for kind in CycleKind::ALL {
            prop_assert_eq!(completion_defect(&g, kind, 2).unwrap(), 1);
        }
    }

    #[test]
    fn restrictions_of_groups_stay_clean(p in (2usize..=8, 0.1f64..1.0, any::<u64>())
        .prop_map(|(n, p, s)| restrict_random(&cyclic(n), p, s)))
    {
        for kind in [QcKind::Label, QcKind::Row, QcKind::Column] {
            prop_assert!(check_quadrangle(&p, kind).is_empty());
        }
    }

    #[test]
    fn json_round_trip(p in restricted()) {
        prop_assert_eq!(PartialLatinSquare::from_json(&p.to_json()).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn extraction_output_is_clean(n in 3usize..=6, p in 0.5f64..1.0, seed in any::<u64>()) {
        let src = restrict_random(&random_quasigroup(n, seed), p, seed ^ 7);
        let (out, trace) = qc_extract(&src, seed).unwrap();
        prop_assert!(satisfies_all(&out));
        prop_assert!(out.is_subset_of(&src));
        prop_assert_eq!(trace.output_cells, out.len());
    }

    #[test]
    fn proven_distances_replay(n in 2usize..=5, seed in any::<u64>()) {
        let g = random_relabel(&cyclic(n), seed);
        let pres = build_presentation(&g);
        for t in g.triples().iter().take(6) {
            let lhs = [pres.letter(0, t[0]), pres.letter(1, t[1])];
            let rhs = [pres.letter(2, t[2])];
            let r = vk_distance(&pres, &lhs, &rhs, 2, None).unwrap();
            prop_assert_eq!(r.status, Status::ProvenAtMost);
            let cert = r.certificate.unwrap();
            prop_assert_eq!(replay(&pres, &lhs, &rhs, &cert).unwrap(), r.area.unwrap());
        }
    }
}

fn word() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop_oneof![1i32..=6, -6i32..=-1], 0..12)
}

proptest! {
    #[test]
    fn reduction_is_idempotent(w in word()) {
        let r = free_reduce(&w);
        prop_assert_eq!(free_reduce(&r), r.clone());
        let mut both = w.clone();
        both.extend(inverse(&w));
        prop_assert!(free_reduce(&both).is_empty());
        let c = cyclic_reduce(&w);
        prop_assert_eq!(cyclic_reduce(&c), c);
    }

    #[test]
    fn separated_and_net_invariants(pts in prop::collection::vec(0u64..40, 1..16), eps in 1.0f64..8.0) {
        let g = CyclicGroup { n: 40, metric: CyclicMetric::Cyclic };
        let pts = plslab::entropy::dedup(pts);
        let s = FiniteMetricSpace::from_fn(pts.len(), |i, j| {
            use plslab::entropy::MetricGroup;
            g.dist(&pts[i], &pts[j])
        }).unwrap();
        let all: Vec<usize> = (0..pts.len()).collect();
        let greedy = separated_set(&s, &all, eps, Mode::Greedy).unwrap();
        let exact = separated_set(&s, &all, eps, Mode::Exact).unwrap();
        prop_assert!(is_separated(&s, &greedy, eps) && is_separated(&s, &exact, eps));
        prop_assert!(exact.len() >= greedy.len());
        prop_assert!(is_net(&s, &all, &greedy, eps, NetKind::Strict));
        let nu = net(&s, &all, eps, Mode::Exact, NetKind::Strict).unwrap();
        let nn = net(&s, &all, eps, Mode::Exact, NetKind::NonStrict).unwrap();
        prop_assert!(is_net(&s, &all, &nu, eps, NetKind::Strict));
        prop_assert!(nn.len() <= nu.len() && nu.len() <= exact.len());
    }

    #[test]
    fn ruzsa_cover_always_verifies(
        a in prop::collection::vec(0u64..24, 1..10),
        b in prop::collection::vec(0u64..24, 1..5),
        eps in 0.5f64..4.0,
    ) {
        let g = CyclicGroup { n: 24, metric: CyclicMetric::Cyclic };
        prop_assert!(ruzsa_cover(&g, &a, &b, eps).unwrap().verified);
    }

    #[test]
    fn rotation_metric_is_bi_invariant(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (p, q, r) = (Rotation::random(&mut rng), Rotation::random(&mut rng), Rotation::random(&mut rng));
        let d = rotation_distance(&p, &q);
        prop_assert!((rotation_distance(&r.mul(&p), &r.mul(&q)) - d).abs() <= 1e-6);
        prop_assert!((rotation_distance(&p.mul(&r), &q.mul(&r)) - d).abs() <= 1e-6);
        prop_assert!((rotation_distance(&p, &q.inverse().inverse()) - d).abs() <= 1e-9);
    }
}
