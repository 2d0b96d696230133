//! Point, ring and dispersed ring decompositions of cycles.
//!
//! All routines work in the view of the cycle's kind. A cycle with cells
//! `x_1 y_1 .. x_r y_r` has `x_i, y_i` in row `R_i` and `y_i, x_{i+1}` in
//! column `K_i`, so `x_i = (K_{i-1}, R_i)` and `y_i = (K_i, R_i)`.
//!
//! A ring partner is given by columns `K'_i` and rows `R'_i` with
//! `x'_i = (K'_i, R'_{i-1})`, `y'_i = (K'_i, R'_i)`, `u_i = (K'_i, R_i)` and
//! `v_i = (K_i, R'_i)`. Its rectangles are `(x_i, u_i, x'_i, v_{i-1})` and
//! `(v_i, y'_i, u_i, y_i)`, and the partner cycle read from a row-sharing
//! pair is `y'_1 x'_2 y'_2 .. y'_r x'_1`.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cycle::{Cycle, PopularityCache};
use crate::error::{Error, Result};
use crate::num::Count;
use crate::par;
use crate::pls::{PartialLatinSquare, Triple};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Column and row structure of a cycle in its view.
#[derive(Clone, Debug)]
struct Frame {
    r: usize,
    /// `K_i`, 0-based: `cols[i]` is the column shared by `y_i` and `x_{i+1}`.
    cols: Vec<u32>,
    /// `R_i`: row shared by `x_i` and `y_i`.
    rows: Vec<u32>,
    /// Labels of `x_i` and `y_i`.
    lx: Vec<u32>,
    ly: Vec<u32>,
}

impl Frame {
    fn new(view: &PartialLatinSquare, cycle: &Cycle) -> Result<Frame> {
        cycle
            .check_in(view)
            .map_err(|e| Error::input(format!("cycle not in the square: {}", e)))?;
        let r = cycle.r();
        let c = &cycle.cells;
        Ok(Frame {
            r,
            cols: (0..r).map(|i| c[2 * i + 1][0]).collect(),
            rows: (0..r).map(|i| c[2 * i][1]).collect(),
            lx: (0..r).map(|i| c[2 * i][2]).collect(),
            ly: (0..r).map(|i| c[2 * i + 1][2]).collect(),
        })
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.r - 1) % self.r
    }
}

fn cell(view: &PartialLatinSquare, x: u32, y: u32) -> Option<Triple> {
    view.label(x, y).map(|z| [x, y, z])
}

/// Rectangle with opposite corners `p` and `q`, in cycle order starting at
/// `p` and moving along its row.
fn rect_through(view: &PartialLatinSquare, p: Triple, q: Triple) -> Option<[Triple; 4]> {
    Some([
        p,
        cell(view, q[0], p[1])?,
        q,
        cell(view, p[0], q[1])?,
    ])
}

fn sig4(r: &[Triple; 4]) -> [u32; 4] {
    [r[0][2], r[1][2], r[2][2], r[3][2]]
}

fn threshold(view: &PartialLatinSquare, eps: f64) -> f64 {
    eps * view.ambient() as f64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDecomposition {
    pub centre: Triple,
    /// One rectangle per cycle cell, from the centre to that cell.
    pub rectangles: Vec<[Triple; 4]>,
}

impl PointDecomposition {
    pub fn verify(&self, view: &PartialLatinSquare, cycle: &Cycle) -> bool {
        self.rectangles.len() == cycle.cells.len()
            && self.rectangles.iter().zip(&cycle.cells).all(|(rect, t)| {
                rect[0] == self.centre
                    && rect[2] == *t
                    && rect.iter().all(|c| view.contains(*c))
                    && rect[0][1] == rect[1][1]
                    && rect[1][0] == rect[2][0]
                    && rect[2][1] == rect[3][1]
                    && rect[3][0] == rect[0][0]
            })
    }
}

pub fn point_decomposition(
    view: &PartialLatinSquare,
    cycle: &Cycle,
    centre: Triple,
) -> Option<PointDecomposition> {
    if !view.contains(centre) {
        return None;
    }
    let rectangles = cycle
        .cells
        .iter()
        .map(|t| rect_through(view, centre, *t))
        .collect::<Option<Vec<_>>>()?;
    Some(PointDecomposition { centre, rectangles })
}

/// Centres whose point decompositions have all rectangles `eps`-popular;
/// `eps = 0` accepts every decomposition.
pub fn point_centres(view: &PartialLatinSquare, cycle: &Cycle, eps: f64) -> Vec<Triple> {
    let mut cache = PopularityCache::new(view, threshold(view, eps));
    view.triples()
        .iter()
        .filter(|&&u| match point_decomposition(view, cycle, u) {
            Some(d) => d.rectangles.iter().all(|r| cache.is_popular(&sig4(r))),
            None => false,
        })
        .copied()
        .collect()
}

pub fn count_point_decompositions(pls: &PartialLatinSquare, cycle: &Cycle, eps: f64) -> Result<u64> {
    let view = cycle.kind.view(pls);
    Frame::new(&view, cycle)?;
    Ok(point_centres(&view, cycle, eps).len() as u64)
}

/// A ring partner `(K'_i, R'_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingDecomposition {
    pub cols: Vec<u32>,
    pub rows: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingCells {
    pub partner: Cycle,
    /// `(x_i, u_i, x'_i, v_{i-1})` then `(v_i, y'_i, u_i, y_i)` for each `i`.
    pub rectangles: Vec<[Triple; 4]>,
}

impl RingDecomposition {
    /// Materialise the partner cycle and the `2r` rectangles.
    pub fn cells(&self, view: &PartialLatinSquare, cycle: &Cycle) -> Option<RingCells> {
        let f = Frame::new(view, cycle).ok()?;
        let r = f.r;
        if self.cols.len() != r || self.rows.len() != r {
            return None;
        }
        let x = |i: usize| cycle.cells[2 * i];
        let y = |i: usize| cycle.cells[2 * i + 1];
        let u = |i: usize| cell(view, self.cols[i], f.rows[i]);
        let v = |i: usize| cell(view, f.cols[i], self.rows[i]);
        let xp = |i: usize| cell(view, self.cols[i], self.rows[f.prev(i)]);
        let yp = |i: usize| cell(view, self.cols[i], self.rows[i]);
        let mut rectangles = Vec::with_capacity(2 * r);
        for i in 0..r {
            rectangles.push([x(i), u(i)?, xp(i)?, v(f.prev(i))?]);
            rectangles.push([v(i)?, yp(i)?, u(i)?, y(i)]);
        }
        let mut pc = Vec::with_capacity(2 * r);
        for i in 0..r {
            pc.push(yp(i)?);
            pc.push(xp((i + 1) % r)?);
        }
        Some(RingCells {
            partner: Cycle {
                kind: cycle.kind,
                cells: pc,
            },
            rectangles,
        })
    }

    /// Re-check presence and the row/column sharing pattern.
    pub fn verify(&self, view: &PartialLatinSquare, cycle: &Cycle) -> bool {
        let Some(rc) = self.cells(view, cycle) else { return false };
        if rc.partner.check_in(view).is_err() {
            return false;
        }
        rc.rectangles.iter().all(|q| {
            q.iter().all(|c| view.contains(*c))
                && q[0][1] == q[1][1]
                && q[1][0] == q[2][0]
                && q[2][1] == q[3][1]
                && q[3][0] == q[0][0]
        })
    }
}

/// Visits ring partners whose constituent cycles are all popular.
struct RingSearch<'a, 'v> {
    view: &'a PartialLatinSquare,
    cycle: &'a Cycle,
    f: Frame,
    cache: PopularityCache<'v>,
    check_popular: bool,
    budget: u64,
    steps: u64,
}

impl<'a> RingSearch<'a, 'a> {
    fn run<V: FnMut(&[u32], &[u32])>(&mut self, visit: &mut V) -> Result<()> {
        let r = self.f.r;
        let mut kc = vec![0u32; r];
        let mut rr = vec![0u32; r];
        self.choose_col(0, &mut kc, &mut rr, visit)
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::resource(format!(
                "ring decomposition search exceeded {} states",
                self.budget
            )));
        }
        Ok(())
    }

    fn rect_ok(&mut self, q: Option<[Triple; 4]>) -> bool {
        match q {
            Some(q) => !self.check_popular || self.cache.is_popular(&sig4(&q)),
            None => false,
        }
    }

    fn choose_col<V: FnMut(&[u32], &[u32])>(
        &mut self,
        i: usize,
        kc: &mut Vec<u32>,
        rr: &mut Vec<u32>,
        visit: &mut V,
    ) -> Result<()> {
        let view = self.view;
        let ri = self.f.rows[i];
        for &k in view.row(ri) {
            self.tick()?;
            kc[i] = k;
            if i > 0 {
                // x'_i and rectangle (x_i, u_i, x'_i, v_{i-1}).
                let q = self.first_rect(i, kc, rr);
                if !self.rect_ok(q) {
                    continue;
                }
            }
            self.choose_row(i, kc, rr, visit)?;
        }
        Ok(())
    }

    fn first_rect(&self, i: usize, kc: &[u32], rr: &[u32]) -> Option<[Triple; 4]> {
        let view = self.view;
        let p = self.f.prev(i);
        Some([
            self.cycle.cells[2 * i],
            cell(view, kc[i], self.f.rows[i])?,
            cell(view, kc[i], rr[p])?,
            cell(view, self.f.cols[p], rr[p])?,
        ])
    }

    fn choose_row<V: FnMut(&[u32], &[u32])>(
        &mut self,
        i: usize,
        kc: &mut Vec<u32>,
        rr: &mut Vec<u32>,
        visit: &mut V,
    ) -> Result<()> {
        let view = self.view;
        let r = self.f.r;
        for &rp in view.column(kc[i]) {
            self.tick()?;
            rr[i] = rp;
            let q = (|| {
                Some([
                    cell(view, self.f.cols[i], rp)?,
                    cell(view, kc[i], rp)?,
                    cell(view, kc[i], self.f.rows[i])?,
                    self.cycle.cells[2 * i + 1],
                ])
            })();
            if !self.rect_ok(q) {
                continue;
            }
            if i + 1 < r {
                self.choose_col(i + 1, kc, rr, visit)?;
                continue;
            }
            let q = self.first_rect(0, kc, rr);
            if !self.rect_ok(q) {
                continue;
            }
            if self.check_popular {
                let mut sig = Vec::with_capacity(2 * r);
                for j in 0..r {
                    sig.push(view.label(kc[j], rr[j]).expect("checked"));
                    let n = (j + 1) % r;
                    sig.push(view.label(kc[n], rr[j]).expect("checked"));
                }
                if !self.cache.is_popular(&sig) {
                    continue;
                }
            }
            visit(kc, rr);
        }
        Ok(())
    }
}

fn ring_search<'a>(
    view: &'a PartialLatinSquare,
    cycle: &'a Cycle,
    theta: f64,
    budget: u64,
) -> Result<RingSearch<'a, 'a>> {
    Ok(RingSearch {
        view,
        cycle,
        f: Frame::new(view, cycle)?,
        cache: PopularityCache::new(view, threshold(view, theta)),
        check_popular: theta > 0.0,
        budget,
        steps: 0,
    })
}

/// Ring partners with all constituent cycles `theta`-popular.
pub fn count_ring_in_view(
    view: &PartialLatinSquare,
    cycle: &Cycle,
    theta: f64,
    budget: u64,
) -> Result<Count> {
    if theta <= 0.0 {
        return count_ring_transfer(view, cycle);
    }
    let mut s = ring_search(view, cycle, theta, budget)?;
    let mut n = 0u128;
    s.run(&mut |_, _| n += 1)?;
    Ok(Count::from(n))
}

pub fn count_ring_decompositions(
    pls: &PartialLatinSquare,
    cycle: &Cycle,
    theta: f64,
) -> Result<Count> {
    let view = cycle.kind.view(pls);
    count_ring_in_view(&view, cycle, theta, DEFAULT_BUDGET)
}

pub fn enumerate_ring_decompositions(
    view: &PartialLatinSquare,
    cycle: &Cycle,
    theta: f64,
    budget: u64,
) -> Result<Vec<RingDecomposition>> {
    let mut s = ring_search(view, cycle, theta, budget)?;
    let mut out = Vec::new();
    s.run(&mut |k, r| {
        out.push(RingDecomposition {
            cols: k.to_vec(),
            rows: r.to_vec(),
        })
    })?;
    Ok(out)
}

type Mat = Vec<Vec<u128>>;

fn mat_mul(a: &Mat, b: &Mat) -> Result<Mat> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let overflow = || Error::resource("decomposition count exceeds 128 bits");
    let mut c = vec![vec![0u128; m]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0 {
                continue;
            }
            for j in 0..m {
                let p = aik.checked_mul(b[k][j]).ok_or_else(overflow)?;
                c[i][j] = c[i][j].checked_add(p).ok_or_else(overflow)?;
            }
        }
    }
    Ok(c)
}

fn trace(a: &Mat) -> Result<u128> {
    (0..a.len()).try_fold(0u128, |t, i| {
        t.checked_add(a[i][i])
            .ok_or_else(|| Error::resource("decomposition count exceeds 128 bits"))
    })
}

/// Unrestricted ring partners via transfer matrices over the alternating
/// choice of `K'_1, R'_1, K'_2, ..`.
fn count_ring_transfer(view: &PartialLatinSquare, cycle: &Cycle) -> Result<Count> {
    let f = Frame::new(view, cycle)?;
    let [nx, ny, _] = view.dims();
    let has = |x: u32, y: u32| view.contains_cell(x, y) as u128;
    // A_i[R'_{i-1}][K'_i]: u_i and x'_i present.
    // B_i[K'_i][R'_i]: y'_i and v_i present.
    let mut acc: Option<Mat> = None;
    for i in 0..f.r {
        let a: Mat = (0..ny as u32)
            .map(|rp| {
                (0..nx as u32)
                    .map(|k| has(k, f.rows[i]) * has(k, rp))
                    .collect()
            })
            .collect();
        let b: Mat = (0..nx as u32)
            .map(|k| {
                (0..ny as u32)
                    .map(|rp| has(k, rp) * has(f.cols[i], rp))
                    .collect()
            })
            .collect();
        let ab = mat_mul(&a, &b)?;
        acc = Some(match acc {
            None => ab,
            Some(m) => mat_mul(&m, &ab)?,
        });
    }
    Ok(Count::from(trace(&acc.expect("r >= 2"))?))
}

/// A dispersed ring decomposition in view coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispersedRingDecomposition {
    /// `x'_1 y'_1 .. x'_r y'_r` with `x'_1, y'_1` sharing a column.
    pub partner: Vec<Triple>,
    /// `(x''_i, u_i, x'''_i, v_i)` with `u_i` in the row of `x''_i`.
    pub first: Vec<[Triple; 4]>,
    /// `(y''_i, w_i, y'''_i, z_i)` with `w_i` in the column of `y''_i`.
    pub second: Vec<[Triple; 4]>,
}

impl DispersedRingDecomposition {
    pub fn verify(&self, view: &PartialLatinSquare, cycle: &Cycle) -> bool {
        let r = cycle.r();
        if self.partner.len() != 2 * r || self.first.len() != r || self.second.len() != r {
            return false;
        }
        let present = |t: &Triple| view.contains(*t);
        let p = &self.partner;
        // Partner: column shared by x'_i, y'_i; row shared by y'_i, x'_{i+1}.
        for i in 0..r {
            if p[2 * i][0] != p[2 * i + 1][0] || p[2 * i + 1][1] != p[(2 * i + 2) % (2 * r)][1] {
                return false;
            }
        }
        let rect_row_first = |q: &[Triple; 4]| {
            q[0][1] == q[1][1] && q[1][0] == q[2][0] && q[2][1] == q[3][1] && q[3][0] == q[0][0]
        };
        let rect_col_first = |q: &[Triple; 4]| {
            q[0][0] == q[1][0] && q[1][1] == q[2][1] && q[2][0] == q[3][0] && q[3][1] == q[0][1]
        };
        let l = |t: &Triple| t[2];
        let c = &cycle.cells;
        p.iter().all(present)
            && self.first.iter().flatten().all(present)
            && self.second.iter().flatten().all(present)
            && self.first.iter().all(rect_row_first)
            && self.second.iter().all(rect_col_first)
            && (0..r).all(|i| {
                let (rq, sq) = (&self.first[i], &self.second[i]);
                l(&c[2 * i]) == l(&rq[0])
                    && l(&p[2 * i]) == l(&rq[2])
                    && l(&c[2 * i + 1]) == l(&sq[0])
                    && l(&p[2 * i + 1]) == l(&sq[2])
                    && l(&rq[1]) == l(&sq[3])
                    && l(&sq[1]) == l(&self.first[(i + 1) % r][3])
            })
    }
}

/// `G[p][q]` over cell pairs `(c1,r1)` labelled `a`, `(c2,r2)` labelled
/// `b` with `(c1,r2)` labelled `p` and `(c2,r1)` labelled `q`.
fn pair_matrix(view: &PartialLatinSquare, a: u32, b: u32) -> Mat {
    let nz = view.dims()[2];
    let mut g = vec![vec![0u128; nz]; nz];
    for &(c1, r1) in view.cells_with_label(a) {
        for &(c2, r2) in view.cells_with_label(b) {
            if let (Some(p), Some(q)) = (view.label(c1, r2), view.label(c2, r1)) {
                g[p as usize][q as usize] += 1;
            }
        }
    }
    g
}

fn transpose(m: &Mat) -> Mat {
    let n = m.len();
    let k = m.first().map_or(0, Vec::len);
    (0..k).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}

/// Label sequences of partner cycles (column-sharing start) with multiplicity.
fn partner_signatures(
    view: &PartialLatinSquare,
    r: usize,
    budget: u64,
) -> Result<HashMap<Vec<u32>, u64>> {
    let nx = view.dims()[0];
    let parts = par::map_range(nx, |c1| -> Result<HashMap<Vec<u32>, u64>> {
        let mut out = HashMap::new();
        let mut steps = 0u64;
        let mut sig = Vec::with_capacity(2 * r);
        for &r1 in view.column(c1 as u32) {
            sig.clear();
            sig.push(view.label(c1 as u32, r1).expect("indexed"));
            walk_partner(view, r, c1 as u32, r1, &mut sig, &mut out, &mut steps, budget)?;
        }
        Ok(out)
    });
    let mut out = HashMap::new();
    for p in parts {
        for (k, v) in p? {
            *out.entry(k).or_insert(0) += v;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn walk_partner(
    view: &PartialLatinSquare,
    r: usize,
    col: u32,
    start_row: u32,
    sig: &mut Vec<u32>,
    out: &mut HashMap<Vec<u32>, u64>,
    steps: &mut u64,
    budget: u64,
) -> Result<()> {
    // sig ends with x'_i at (col, row); choose y'_i in the same column.
    let i = sig.len() / 2;
    for &ny in view.column(col) {
        *steps += 1;
        if *steps > budget {
            return Err(Error::resource(format!(
                "dispersed decomposition search exceeded {} states",
                budget
            )));
        }
        if i + 1 == r {
            if ny == start_row {
                sig.push(view.label(col, ny).expect("indexed"));
                *out.entry(sig.clone()).or_insert(0) += 1;
                sig.pop();
            }
            continue;
        }
        sig.push(view.label(col, ny).expect("indexed"));
        for &nc in view.row(ny) {
            sig.push(view.label(nc, ny).expect("indexed"));
            walk_partner(view, r, nc, start_row, sig, out, steps, budget)?;
            sig.pop();
        }
        sig.pop();
    }
    Ok(())
}

/// Exact number of dispersed ring decompositions of `cycle`.
///
/// For a fixed partner, the first rectangles contribute matrices indexed by
/// the labels of `(v_i, u_i)` and the second by `(z_i, w_i)`; the label
/// identifications `u_i ~ z_i` and `w_i ~ v_{i+1}` chain them into a trace.
pub fn count_dispersed_in_view(
    view: &PartialLatinSquare,
    cycle: &Cycle,
    budget: u64,
) -> Result<Count> {
    let f = Frame::new(view, cycle)?;
    let r = f.r;
    let nz = view.dims()[2] as u64;
    let sigs = partner_signatures(view, r, budget)?;
    let work = sigs.len() as u64 * 2 * r as u64 * nz.pow(3);
    if work > budget {
        return Err(Error::resource(format!(
            "dispersed decomposition product work {} exceeds budget {}",
            work, budget
        )));
    }
    let mut firsts: HashMap<(u32, u32), Mat> = HashMap::new();
    let mut seconds: HashMap<(u32, u32), Mat> = HashMap::new();
    let mut total = BigUint::from(0u32);
    for (sig, mult) in sigs {
        let mut acc: Option<Mat> = None;
        for i in 0..r {
            let p = firsts
                .entry((f.lx[i], sig[2 * i]))
                .or_insert_with(|| pair_matrix(view, f.lx[i], sig[2 * i]))
                .clone();
            let q = seconds
                .entry((f.ly[i], sig[2 * i + 1]))
                .or_insert_with(|| transpose(&pair_matrix(view, f.ly[i], sig[2 * i + 1])))
                .clone();
            let pq = mat_mul(&p, &q)?;
            acc = Some(match acc {
                None => pq,
                Some(m) => mat_mul(&m, &pq)?,
            });
        }
        let t = trace(&acc.expect("r >= 2"))?;
        total += BigUint::from(t) * BigUint::from(mult);
    }
    Ok(Count(total))
}

pub fn count_dispersed_ring_decompositions(
    pls: &PartialLatinSquare,
    cycle: &Cycle,
    budget: u64,
) -> Result<Count> {
    let view = cycle.kind.view(pls);
    count_dispersed_in_view(&view, cycle, budget)
}

/// Every dispersed ring decomposition, for small instances.
pub fn enumerate_dispersed(
    view: &PartialLatinSquare,
    cycle: &Cycle,
    limit: usize,
) -> Result<Vec<DispersedRingDecomposition>> {
    let f = Frame::new(view, cycle)?;
    let r = f.r;
    // Rectangle options keyed by (label of first corner, label of opposite corner).
    let rects = |a: u32, b: u32, row_first: bool| -> Vec<[Triple; 4]> {
        let mut out = Vec::new();
        for &(c1, r1) in view.cells_with_label(a) {
            for &(c2, r2) in view.cells_with_label(b) {
                let (Some(p), Some(q)) = (view.label(c1, r2), view.label(c2, r1)) else {
                    continue;
                };
                let (s, t) = ([c1, r1, a], [c2, r2, b]);
                let (m1, m2) = ([c2, r1, q], [c1, r2, p]);
                out.push(if row_first { [s, m1, t, m2] } else { [s, m2, t, m1] });
            }
        }
        out
    };
    let mut partners = Vec::new();
    for c in crate::cycle::enumerate_cycles(view, cycle.kind, r, limit)? {
        // Rotate a row-first cycle by one to start at a column-sharing pair.
        let mut p = c.cells.clone();
        p.rotate_left(1);
        partners.push(p);
    }
    let mut out = Vec::new();
    for p in partners {
        let firsts: Vec<Vec<[Triple; 4]>> =
            (0..r).map(|i| rects(f.lx[i], p[2 * i][2], true)).collect();
        let seconds: Vec<Vec<[Triple; 4]>> =
            (0..r).map(|i| rects(f.ly[i], p[2 * i + 1][2], false)).collect();
        let mut chosen_f = Vec::new();
        let mut chosen_s = Vec::new();
        fn rec(
            i: usize,
            r: usize,
            firsts: &[Vec<[Triple; 4]>],
            seconds: &[Vec<[Triple; 4]>],
            cf: &mut Vec<[Triple; 4]>,
            cs: &mut Vec<[Triple; 4]>,
            p: &[Triple],
            out: &mut Vec<DispersedRingDecomposition>,
            limit: usize,
        ) -> Result<()> {
            if i == r {
                if cs[r - 1][1][2] == cf[0][3][2] {
                    if out.len() >= limit {
                        return Err(Error::resource(format!("more than {} decompositions", limit)));
                    }
                    out.push(DispersedRingDecomposition {
                        partner: p.to_vec(),
                        first: cf.clone(),
                        second: cs.clone(),
                    });
                }
                return Ok(());
            }
            for q in &firsts[i] {
                if i > 0 && cs[i - 1][1][2] != q[3][2] {
                    continue;
                }
                cf.push(*q);
                for s in &seconds[i] {
                    if s[3][2] != q[1][2] {
                        continue;
                    }
                    cs.push(*s);
                    rec(i + 1, r, firsts, seconds, cf, cs, p, out, limit)?;
                    cs.pop();
                }
                cf.pop();
            }
            Ok(())
        }
        rec(0, r, &firsts, &seconds, &mut chosen_f, &mut chosen_s, &p, &mut out, limit)?;
    }
    Ok(out)
}

/// Dispersed count against `ring_theta * (theta n)^(2r+1)`.
pub fn dispersed_lower_bound_holds(
    dispersed: &Count,
    ring_theta: &Count,
    theta: f64,
    n: usize,
    r: usize,
) -> bool {
    let rhs = ring_theta.to_f64() * (theta * n as f64).powi(2 * r as i32 + 1);
    dispersed.to_f64() >= rhs * (1.0 - 1e-12)
}

/// A ring decomposition plus point-decomposition centres for the partner
/// and each rectangle, all present in the view.
pub fn check_full_decomposition(
    view: &PartialLatinSquare,
    cycle: &Cycle,
    ring: &RingDecomposition,
    partner_centre: Triple,
    rect_centres: &[Triple],
) -> bool {
    let Some(rc) = ring.cells(view, cycle) else { return false };
    if rect_centres.len() != rc.rectangles.len() {
        return false;
    }
    let partner_ok = point_decomposition(view, &rc.partner, partner_centre).is_some();
    partner_ok
        && rc.rectangles.iter().zip(rect_centres).all(|(q, &u)| {
            let c = Cycle {
                kind: cycle.kind,
                cells: q.to_vec(),
            };
            point_decomposition(view, &c, u).is_some()
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::CycleKind;
    use crate::pls::cyclic;

    fn some_cycle(p: &PartialLatinSquare, r: usize) -> Cycle {
        crate::cycle::enumerate_cycles(p, CycleKind::Label, r, 1_000_000).unwrap()[5].clone()
    }

    #[test]
    fn z3_every_cell_is_a_centre() {
        let g = cyclic(3);
        let c = some_cycle(&g, 2);
        assert_eq!(count_point_decompositions(&g, &c, 0.0).unwrap(), 9);
    }

    #[test]
    fn z4_rectangles_are_fully_popular() {
        let g = cyclic(4);
        let c = some_cycle(&g, 2);
        assert_eq!(count_point_decompositions(&g, &c, 1.0).unwrap(), 16);
    }

    #[test]
    fn z2_ring_count_is_trivial_maximum() {
        let g = cyclic(2);
        let c = some_cycle(&g, 2);
        assert_eq!(count_ring_decompositions(&g, &c, 0.0).unwrap(), 16u64);
        assert_eq!(count_ring_decompositions(&g, &c, 1.0).unwrap(), 16u64);
    }

    #[test]
    fn transfer_and_search_agree() {
        let p = crate::pls::restrict_random(&cyclic(5), 0.8, 3);
        let cs = crate::cycle::enumerate_cycles(&p, CycleKind::Label, 2, 100_000).unwrap();
        for c in cs.iter().step_by(37) {
            let fast = count_ring_in_view(&p, c, 0.0, DEFAULT_BUDGET).unwrap();
            let list = enumerate_ring_decompositions(&p, c, 0.0, DEFAULT_BUDGET).unwrap();
            assert_eq!(fast, list.len() as u64);
            assert!(list.iter().all(|d| d.verify(&p, c)));
        }
    }

    #[test]
    fn z2_dispersed_count() {
        let g = cyclic(2);
        let c = some_cycle(&g, 2);
        let n = count_dispersed_ring_decompositions(&g, &c, DEFAULT_BUDGET).unwrap();
        assert_eq!(n, 512u64);
        let all = enumerate_dispersed(&g, &c, 10_000).unwrap();
        assert_eq!(all.len(), 512);
        assert!(all.iter().all(|d| d.verify(&g, &c)));
    }

    #[test]
    fn shifted_partner_always_exists() {
        let p = crate::pls::restrict_random(&cyclic(6), 0.7, 2);
        for c in crate::cycle::enumerate_cycles(&p, CycleKind::Label, 3, 100_000)
            .unwrap()
            .iter()
            .step_by(101)
        {
            let f = Frame::new(&p, c).unwrap();
            let shifted = RingDecomposition {
                cols: f.cols.clone(),
                rows: (0..f.r).map(|i| f.rows[(i + 1) % f.r]).collect(),
            };
            assert!(shifted.verify(&p, c));
        }
    }
}
