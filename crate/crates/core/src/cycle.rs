//! Alternating closed walks of cells and their signatures.
//!
//! A label cycle of half-length `r` is a sequence of cells `t_1 .. t_2r`
//! where `t_i, t_{i+1}` share a row for odd `i` and a column for even `i`
//! (indices cyclic). Its signature is the sequence of labels. Row and column
//! cycles are label cycles of a coordinate-permuted view whose third
//! coordinate is the signature class.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::pls::{permute_coords, PartialLatinSquare, Perm3, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Label,
    Row,
    Column,
}

impl CycleKind {
    pub const ALL: [CycleKind; 3] = [CycleKind::Label, CycleKind::Row, CycleKind::Column];

    /// Coordinate permutation whose third coordinate is this kind's class.
    pub fn perm(self) -> Perm3 {
        match self {
            CycleKind::Label => Perm3::IDENTITY,
            CycleKind::Column => Perm3([2, 1, 0]),
            CycleKind::Row => Perm3([2, 0, 1]),
        }
    }

    /// Original coordinate index carried as the signature.
    pub fn class(self) -> usize {
        self.perm().0[2]
    }

    pub fn view(self, pls: &PartialLatinSquare) -> PartialLatinSquare {
        match self {
            CycleKind::Label => pls.clone(),
            k => permute_coords(pls, k.perm()),
        }
    }
}

impl std::str::FromStr for CycleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "label" => Ok(CycleKind::Label),
            "row" => Ok(CycleKind::Row),
            "column" | "col" => Ok(CycleKind::Column),
            _ => Err(Error::input(format!("unknown kind '{}'", s))),
        }
    }
}

/// A cycle stored in view coordinates together with its kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub kind: CycleKind,
    /// Cells in view coordinates (signature is the third entry).
    pub cells: Vec<Triple>,
}

impl Cycle {
    pub fn r(&self) -> usize {
        self.cells.len() / 2
    }

    pub fn signature(&self) -> Vec<u32> {
        self.cells.iter().map(|t| t[2]).collect()
    }

    /// Cells mapped back to the original coordinates.
    pub fn original_cells(&self) -> Vec<Triple> {
        let inv = self.kind.perm().inverse();
        self.cells.iter().map(|t| inv.apply(*t)).collect()
    }

    /// Adjacency pattern and membership in the view.
    pub fn check_in(&self, view: &PartialLatinSquare) -> Result<()> {
        let m = self.cells.len();
        if m < 4 || m % 2 != 0 {
            return Err(Error::input(format!("cycle has {} cells", m)));
        }
        for (i, t) in self.cells.iter().enumerate() {
            if !view.contains(*t) {
                return Err(Error::input(format!("cell {:?} is not present", t)));
            }
            let next = self.cells[(i + 1) % m];
            // 0-based i even <=> 1-based odd: shared row.
            let shared = if i % 2 == 0 { 1 } else { 0 };
            if t[shared] != next[shared] {
                return Err(Error::input(format!(
                    "cells {} and {} do not share a {}",
                    i,
                    (i + 1) % m,
                    ["column", "row"][shared]
                )));
            }
        }
        Ok(())
    }

    /// Build from alternating column and row coordinates
    /// `x_1, y_1, .., x_r, y_r` (cells `(x_1,y_1), (x_2,y_1), (x_2,y_2), ..`).
    pub fn from_walk(
        view: &PartialLatinSquare,
        kind: CycleKind,
        cols: &[u32],
        rows: &[u32],
    ) -> Result<Cycle> {
        let r = cols.len();
        if rows.len() != r || r < 2 {
            return Err(Error::input("walk needs r >= 2 columns and rows"));
        }
        let mut cells = Vec::with_capacity(2 * r);
        for i in 0..r {
            for (x, y) in [(cols[i], rows[i]), (cols[(i + 1) % r], rows[i])] {
                let z = view
                    .label(x, y)
                    .ok_or_else(|| Error::input(format!("cell ({}, {}) is empty", x, y)))?;
                cells.push([x, y, z]);
            }
        }
        let c = Cycle { kind, cells };
        c.check_in(view)?;
        Ok(c)
    }
}

/// A walk state: start column, current column, current row.
type State = (u32, u32, u32);

/// Depth-first walk over signature prefixes. `visit` sees each
/// `(2r-1)`-prefix together with the multiset of completing labels.
fn walk_prefixes<V>(view: &PartialLatinSquare, r: usize, z1: u32, visit: &mut V)
where
    V: FnMut(&[u32], &BTreeMap<u32, u64>),
{
    let states: Vec<State> = view
        .cells_with_label(z1)
        .iter()
        .map(|&(x, y)| (x, x, y))
        .collect();
    if states.is_empty() {
        return;
    }
    let mut prefix = vec![z1];
    descend(view, r, &states, &mut prefix, visit);
}

fn descend<V>(
    view: &PartialLatinSquare,
    r: usize,
    states: &[State],
    prefix: &mut Vec<u32>,
    visit: &mut V,
) where
    V: FnMut(&[u32], &BTreeMap<u32, u64>),
{
    let d = prefix.len();
    if d == 2 * r - 1 {
        let mut completions = BTreeMap::new();
        for &(sx, _, cy) in states {
            if let Some(z) = view.label(sx, cy) {
                *completions.entry(z).or_insert(0u64) += 1;
            }
        }
        if !completions.is_empty() {
            visit(prefix, &completions);
        }
        return;
    }
    let mut next: Vec<(u32, State)> = Vec::new();
    for &(sx, cx, cy) in states {
        if d % 2 == 1 {
            for &x in view.row(cy) {
                let z = view.label(x, cy).expect("indexed cell");
                next.push((z, (sx, x, cy)));
            }
        } else {
            for &y in view.column(cx) {
                let z = view.label(cx, y).expect("indexed cell");
                next.push((z, (sx, cx, y)));
            }
        }
    }
    next.sort_unstable();
    let mut i = 0;
    let mut bucket = Vec::new();
    while i < next.len() {
        let z = next[i].0;
        bucket.clear();
        while i < next.len() && next[i].0 == z {
            bucket.push(next[i].1);
            i += 1;
        }
        prefix.push(z);
        descend(view, r, &bucket, prefix, visit);
        prefix.pop();
    }
}

/// Occurrence count of every realised signature of the given kind.
pub fn signature_histogram(
    pls: &PartialLatinSquare,
    kind: CycleKind,
    r: usize,
) -> Result<HashMap<Vec<u32>, u64>> {
    check_r(r)?;
    let view = kind.view(pls);
    let parts = par::map_range(view.dims()[2], |z1| {
        let mut local = Vec::new();
        walk_prefixes(&view, r, z1 as u32, &mut |prefix, comps| {
            for (&z, &c) in comps {
                let mut sig = prefix.to_vec();
                sig.push(z);
                local.push((sig, c));
            }
        });
        local
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Largest number of distinct last labels over all `(2r-1)`-prefixes of
/// realised signatures; 0 when there are no cycles.
pub fn completion_defect(pls: &PartialLatinSquare, kind: CycleKind, r: usize) -> Result<usize> {
    check_r(r)?;
    let view = kind.view(pls);
    let per_label = par::map_range(view.dims()[2], |z1| {
        let mut best = 0usize;
        walk_prefixes(&view, r, z1 as u32, &mut |_, comps| best = best.max(comps.len()));
        best
    });
    Ok(per_label.into_iter().max().unwrap_or(0))
}

/// How many `(2r-1)`-prefixes have exactly `c` distinct completions, per `c`.
pub fn completion_profile(
    pls: &PartialLatinSquare,
    kind: CycleKind,
    r: usize,
) -> Result<BTreeMap<usize, u64>> {
    check_r(r)?;
    let view = kind.view(pls);
    let parts = par::map_range(view.dims()[2], |z1| {
        let mut local: BTreeMap<usize, u64> = BTreeMap::new();
        walk_prefixes(&view, r, z1 as u32, &mut |_, comps| {
            *local.entry(comps.len()).or_insert(0) += 1
        });
        local
    });
    let mut out = BTreeMap::new();
    for part in parts {
        for (k, v) in part {
            *out.entry(k).or_insert(0) += v;
        }
    }
    Ok(out)
}

/// Number of cycles of the kind realising `sig`, in view coordinates.
pub fn signature_occurrences(view: &PartialLatinSquare, sig: &[u32]) -> u64 {
    let m = sig.len();
    if m < 2 || m % 2 != 0 || sig.iter().any(|&z| z as usize >= view.dims()[2]) {
        return 0;
    }
    let mut count = 0;
    'cells: for &(sx, sy) in view.cells_with_label(sig[0]) {
        let (mut x, mut y) = (sx, sy);
        for (i, &z) in sig.iter().enumerate().skip(1) {
            if i % 2 == 1 {
                match view.col_of(y, z) {
                    Some(nx) => x = nx,
                    None => continue 'cells,
                }
            } else {
                match view.row_of(x, z) {
                    Some(ny) => y = ny,
                    None => continue 'cells,
                }
            }
        }
        if x == sx {
            count += 1;
        }
    }
    count
}

/// Signatures of cycles occurring at least `theta * n` times, sorted,
/// with their occurrence counts. `n` is the ambient size of the instance.
pub fn popular_cycles(
    pls: &PartialLatinSquare,
    kind: CycleKind,
    r: usize,
    theta: f64,
) -> Result<Vec<(Vec<u32>, u64)>> {
    let n = pls.ambient() as f64;
    let hist = signature_histogram(pls, kind, r)?;
    let mut out: Vec<(Vec<u32>, u64)> = hist
        .into_iter()
        .inspect(|(_, c)| assert!(*c as f64 <= n, "signature occurs more than n times"))
        .filter(|(_, c)| *c as f64 >= theta * n)
        .collect();
    out.sort();
    Ok(out)
}

/// Memoised popularity queries against a fixed view.
pub struct PopularityCache<'a> {
    view: &'a PartialLatinSquare,
    threshold: f64,
    memo: HashMap<Vec<u32>, u64>,
}

impl<'a> PopularityCache<'a> {
    /// `threshold` is the minimum occurrence count (`theta * n`).
    pub fn new(view: &'a PartialLatinSquare, threshold: f64) -> Self {
        PopularityCache {
            view,
            threshold,
            memo: HashMap::new(),
        }
    }

    pub fn occurrences(&mut self, sig: &[u32]) -> u64 {
        if let Some(&c) = self.memo.get(sig) {
            return c;
        }
        let c = signature_occurrences(self.view, sig);
        self.memo.insert(sig.to_vec(), c);
        c
    }

    pub fn is_popular(&mut self, sig: &[u32]) -> bool {
        self.threshold <= 0.0 || self.occurrences(sig) as f64 >= self.threshold
    }
}

pub(crate) fn check_r(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::input(format!("half-length r = {} must be at least 2", r)));
    }
    Ok(())
}

/// Every cycle of the kind, in view coordinates, for small instances.
pub fn enumerate_cycles(
    pls: &PartialLatinSquare,
    kind: CycleKind,
    r: usize,
    limit: usize,
) -> Result<Vec<Cycle>> {
    check_r(r)?;
    let view = kind.view(pls);
    let mut out = Vec::new();
    let mut cols = vec![0u32; r];
    let mut rows = vec![0u32; r];
    fn rec(
        view: &PartialLatinSquare,
        kind: CycleKind,
        i: usize,
        cols: &mut Vec<u32>,
        rows: &mut Vec<u32>,
        out: &mut Vec<Cycle>,
        limit: usize,
    ) -> Result<()> {
        let r = cols.len();
        if i == r {
            if view.contains_cell(cols[0], rows[r - 1]) {
                if out.len() >= limit {
                    return Err(Error::resource(format!("more than {} cycles", limit)));
                }
                out.push(Cycle::from_walk(view, kind, cols, rows)?);
            }
            return Ok(());
        }
        // x_i is already fixed; choose y_i in column x_i, then x_{i+1} in row y_i.
        for &y in view.column(cols[i]) {
            rows[i] = y;
            if i + 1 == r {
                rec(view, kind, i + 1, cols, rows, out, limit)?;
            } else {
                for &x in view.row(y) {
                    cols[i + 1] = x;
                    rec(view, kind, i + 1, cols, rows, out, limit)?;
                }
            }
        }
        Ok(())
    }
    for x in 0..view.dims()[0] as u32 {
        cols[0] = x;
        rec(&view, kind, 0, &mut cols, &mut rows, &mut out, limit)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{cyclic, random_quasigroup};

    #[test]
    fn group_tables_have_unique_completions() {
        for n in 2..=5 {
            let g = cyclic(n);
            for k in CycleKind::ALL {
                assert_eq!(completion_defect(&g, k, 3).unwrap(), 1, "n={} {:?}", n, k);
            }
        }
    }

    #[test]
    fn empty_square_has_defect_zero() {
        let e = PartialLatinSquare::empty([3, 3, 3]);
        assert_eq!(completion_defect(&e, CycleKind::Label, 2).unwrap(), 0);
    }

    #[test]
    fn histogram_total_is_walk_count() {
        let q = random_quasigroup(4, 1);
        let hist = signature_histogram(&q, CycleKind::Row, 2).unwrap();
        let total: u64 = hist.values().sum();
        assert_eq!(total, 4u64.pow(4));
        for (sig, c) in &hist {
            let view = CycleKind::Row.view(&q);
            assert_eq!(signature_occurrences(&view, sig), *c);
        }
    }

    #[test]
    fn single_cell_degenerate_signature() {
        let p = PartialLatinSquare::new([1, 1, 1], [[0, 0, 0]]).unwrap();
        let pop = popular_cycles(&p, CycleKind::Label, 2, 1.0).unwrap();
        assert_eq!(pop, vec![(vec![0, 0, 0, 0], 1)]);
        assert!(popular_cycles(&p, CycleKind::Label, 2, 1.5).unwrap().is_empty());
    }

    #[test]
    fn enumerated_cycles_are_valid() {
        let q = random_quasigroup(3, 2);
        for k in CycleKind::ALL {
            let cs = enumerate_cycles(&q, k, 2, 10_000).unwrap();
            assert_eq!(cs.len(), 81);
            let view = k.view(&q);
            for c in cs {
                c.check_in(&view).unwrap();
                for t in c.original_cells() {
                    assert!(q.contains(t));
                }
            }
        }
    }
}
