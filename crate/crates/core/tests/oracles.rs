mod common;

use common::*;
use plslab::count::{count_cycles, count_octahedra, count_octahedra_naive};
use plslab::cycle::{enumerate_cycles, CycleKind};
use plslab::decomposition::{
    count_dispersed_ring_decompositions, count_point_decompositions, count_ring_decompositions,
    DEFAULT_BUDGET,
};
use plslab::disc::AbstractDisc;
use plslab::pls::{cyclic, fig1, random_quasigroup, restrict_random};

fn small_instances() -> Vec<plslab::pls::PartialLatinSquare> {
    let mut v = vec![fig1()];
    for n in 1..=5 {
        v.push(cyclic(n));
        v.push(random_quasigroup(n, n as u64));
        for s in 0..4 {
            v.push(restrict_random(&cyclic(n), 0.6, s));
            v.push(restrict_random(&random_quasigroup(n, 9), 0.75, s));
        }
    }
    v
}

#[test]
fn octahedra_match_coordinate_loop() {
    for p in small_instances() {
        let fast = count_octahedra(&p);
        assert_eq!(fast, octahedra_by_coordinates(&p), "{:?}", p);
        assert_eq!(fast, count_octahedra_naive(&p, 1 << 20).unwrap());
    }
}

#[test]
fn cycles_match_walk_enumeration() {
    let mut v = small_instances();
    v.push(cyclic(6));
    v.push(restrict_random(&cyclic(6), 0.5, 7));
    for p in v {
        for kind in CycleKind::ALL {
            for r in 2..=3 {
                assert_eq!(count_cycles(&p, kind, r).unwrap(), closed_walks(&p, kind, r));
            }
        }
    }
}

fn every_cycle(p: &plslab::pls::PartialLatinSquare, r: usize) -> Vec<plslab::cycle::Cycle> {
    enumerate_cycles(p, CycleKind::Label, r, 1_000_000).unwrap()
}

#[test]
fn point_and_ring_counts_match_brute_force() {
    let mut inst = vec![cyclic(2), cyclic(3)];
    inst.push(restrict_random(&cyclic(4), 0.75, 2));
    for p in inst {
        for r in 2..=3 {
            for c in every_cycle(&p, r).iter().step_by(7) {
                assert_eq!(count_point_decompositions(&p, c, 0.0).unwrap(), point_centres(&p, &c.cells));
                assert_eq!(count_ring_decompositions(&p, c, 0.0).unwrap(), ring_partners(&p, &c.cells));
            }
        }
    }
}

#[test]
fn dispersed_counts_on_small_groups() {
    for (n, expected) in [(2usize, 512u64), (3, 19_683)] {
        let g = cyclic(n);
        let cycles = every_cycle(&g, 2);
        for c in cycles.iter().step_by(if n == 2 { 1 } else { 9 }) {
            let fast = count_dispersed_ring_decompositions(&g, c, DEFAULT_BUDGET).unwrap();
            assert_eq!(fast, dispersed_by_coordinates(&g, &c.cells));
            assert_eq!(fast, expected);
        }
    }
}

#[test]
fn disc_copies_match_assignment_loop() {
    let discs = [AbstractDisc::single_face(), AbstractDisc::polygon(2)];
    for p in [cyclic(2), cyclic(3), restrict_random(&cyclic(3), 0.7, 1)] {
        for d in &discs {
            let pins = vec![None; d.edges.len()];
            assert_eq!(d.count_copies(&p, &pins, u64::MAX).unwrap(), disc_copies(d, &p));
        }
    }
    let slit = AbstractDisc::slit_octahedron();
    let pins = vec![None; slit.edges.len()];
    assert_eq!(slit.count_copies(&cyclic(2), &pins, u64::MAX).unwrap(), disc_copies(&slit, &cyclic(2)));
}
