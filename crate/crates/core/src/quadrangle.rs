//! Quadrangle conditions, completion defect and group reconstruction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::pls::{permute_coords, PartialLatinSquare, Perm3, Triple};

pub use crate::cycle::{completion_defect, completion_profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QcKind {
    Column,
    Row,
    Label,
}

impl QcKind {
    pub const ALL: [QcKind; 3] = [QcKind::Column, QcKind::Row, QcKind::Label];

    /// Involution moving this kind's class into the label position.
    pub fn perm(self) -> Perm3 {
        match self {
            QcKind::Label => Perm3::IDENTITY,
            QcKind::Column => Perm3::SWAP_XZ,
            QcKind::Row => Perm3::SWAP_YZ,
        }
    }

    /// Original coordinate index of the compared values.
    pub fn class(self) -> usize {
        self.perm().0[2]
    }

    pub fn view(self, pls: &PartialLatinSquare) -> PartialLatinSquare {
        match self {
            QcKind::Label => pls.clone(),
            k => permute_coords(pls, k.perm()),
        }
    }
}

impl fmt::Display for QcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QcKind::Column => "column",
            QcKind::Row => "row",
            QcKind::Label => "label",
        })
    }
}

impl std::str::FromStr for QcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "column" | "col" => Ok(QcKind::Column),
            "row" => Ok(QcKind::Row),
            "label" => Ok(QcKind::Label),
            _ => Err(Error::input(format!("unknown kind '{}'", s))),
        }
    }
}

/// Two rectangles agreeing in three corner values and differing in the
/// fourth. Values are compared in the kind's class; cells are stored in the
/// original coordinates, four per rectangle in the order
/// `(x1,y1), (x2,y1), (x1,y2), (x2,y2)` of the kind's view.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QcViolation {
    pub kind: QcKind,
    /// Shared values `(a, b, c)`.
    pub prefix: [u32; 3],
    /// The two different fourth values, smaller first.
    pub mismatch: (u32, u32),
    pub cells: [Triple; 8],
}

impl QcViolation {
    /// Re-check the configuration against `pls` from the stored cells alone.
    pub fn verify(&self, pls: &PartialLatinSquare) -> bool {
        if !self.cells.iter().all(|t| pls.contains(*t)) {
            return false;
        }
        let p = self.kind.perm();
        let v: Vec<Triple> = self.cells.iter().map(|t| p.apply(*t)).collect();
        let rect_ok = |r: &[Triple]| {
            r[0][1] == r[1][1] && r[2][1] == r[3][1] && r[0][0] == r[2][0] && r[1][0] == r[3][0]
        };
        let (r1, r2) = v.split_at(4);
        let same_prefix = (0..3).all(|i| r1[i][2] == r2[i][2] && r1[i][2] == self.prefix[i]);
        let (d1, d2) = (r1[3][2], r2[3][2]);
        rect_ok(r1)
            && rect_ok(r2)
            && same_prefix
            && d1 != d2
            && (d1.min(d2), d1.max(d2)) == self.mismatch
    }
}

impl fmt::Display for QcViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} kind: values {:?} complete to both {} and {} (cells {:?})",
            self.kind, self.prefix, self.mismatch.0, self.mismatch.1, self.cells
        )
    }
}

/// Smallest rectangle `[x1, x2, y1, y2]` per fourth value, for one prefix.
type Completions = BTreeMap<u32, [u32; 4]>;

fn completions_for_label(view: &PartialLatinSquare, a: u32) -> BTreeMap<(u32, u32), Completions> {
    let nz = view.dims()[2] as u32;
    let mut out: BTreeMap<(u32, u32), Completions> = BTreeMap::new();
    for &(x1, y1) in view.cells_with_label(a) {
        for b in 0..nz {
            let Some(x2) = view.col_of(y1, b) else { continue };
            for &y2 in view.column(x1) {
                let Some(d) = view.label(x2, y2) else { continue };
                let c = view.label(x1, y2).expect("indexed");
                let rect = [x1, x2, y1, y2];
                out.entry((b, c))
                    .or_default()
                    .entry(d)
                    .and_modify(|w| *w = (*w).min(rect))
                    .or_insert(rect);
            }
        }
    }
    out
}

fn rect_cells(view: &PartialLatinSquare, r: [u32; 4]) -> [Triple; 4] {
    let [x1, x2, y1, y2] = r;
    let cell = |x, y| [x, y, view.label(x, y).expect("rectangle cell")];
    [cell(x1, y1), cell(x2, y1), cell(x1, y2), cell(x2, y2)]
}

/// Every violation of the given kind, one per prefix and unordered pair of
/// different fourth values, with the smallest witnessing rectangles.
/// Sorted lexicographically.
pub fn check_quadrangle(pls: &PartialLatinSquare, kind: QcKind) -> Vec<QcViolation> {
    let view = kind.view(pls);
    let inv = kind.perm().inverse();
    let nz = view.dims()[2];
    let per_label = par::map_range(nz, |a| {
        let a = a as u32;
        let mut found = Vec::new();
        for ((b, c), comps) in completions_for_label(&view, a) {
            if comps.len() < 2 {
                continue;
            }
            let items: Vec<(u32, [u32; 4])> = comps.into_iter().collect();
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    let r1 = rect_cells(&view, items[i].1);
                    let r2 = rect_cells(&view, items[j].1);
                    let mut cells = [[0u32; 3]; 8];
                    for k in 0..4 {
                        cells[k] = inv.apply(r1[k]);
                        cells[k + 4] = inv.apply(r2[k]);
                    }
                    found.push(QcViolation {
                        kind,
                        prefix: [a, b, c],
                        mismatch: (items[i].0, items[j].0),
                        cells,
                    });
                }
            }
        }
        found
    });
    let mut out: Vec<QcViolation> = per_label.into_iter().flatten().collect();
    out.sort();
    out
}

pub fn satisfies_all(pls: &PartialLatinSquare) -> bool {
    QcKind::ALL
        .iter()
        .all(|&k| check_quadrangle(pls, k).is_empty())
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub n: usize,
    pub identity: u32,
    pub table: Vec<Vec<u32>>,
}

impl GroupTable {
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    /// Totality, associativity, identity law and two-sided inverses.
    pub fn verify(&self) -> Result<()> {
        let n = self.n;
        let fail = |m: String| Err(Error::Verification(m));
        if self.table.len() != n || self.table.iter().any(|r| r.len() != n) {
            return fail("table is not n x n".into());
        }
        if self.table.iter().flatten().any(|&v| v as usize >= n) {
            return fail("entry out of range".into());
        }
        if self.identity as usize >= n {
            return fail("identity out of range".into());
        }
        let e = self.identity;
        for a in 0..n as u32 {
            if self.mul(e, a) != a || self.mul(a, e) != a {
                return fail(format!("{} is not a two-sided identity for {}", e, a));
            }
            if !(0..n as u32).any(|b| self.mul(a, b) == e && self.mul(b, a) == e) {
                return fail(format!("{} has no inverse", a));
            }
            for b in 0..n as u32 {
                let ab = self.mul(a, b);
                for c in 0..n as u32 {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return fail(format!("({}, {}, {}) is not associative", a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// A bijection `f` with `f(ab) = f(a) f(b)`, if one exists.
    pub fn isomorphism_to(&self, other: &GroupTable) -> Option<Vec<u32>> {
        if self.n != other.n {
            return None;
        }
        let n = self.n;
        // Elements in order of increasing element order make good early pruning.
        let order_of = |g: &GroupTable, a: u32| {
            let mut k = 1;
            let mut p = a;
            while p != g.identity && k <= n {
                p = g.mul(p, a);
                k += 1;
            }
            k
        };
        let ord_self: Vec<usize> = (0..n as u32).map(|a| order_of(self, a)).collect();
        let ord_other: Vec<usize> = (0..n as u32).map(|a| order_of(other, a)).collect();
        let mut f = vec![u32::MAX; n];
        let mut used = vec![false; n];
        f[self.identity as usize] = other.identity;
        used[other.identity as usize] = true;
        let consistent = |f: &[u32]| {
            for a in 0..n {
                if f[a] == u32::MAX {
                    continue;
                }
                for b in 0..n {
                    if f[b] == u32::MAX {
                        continue;
                    }
                    let ab = self.mul(a as u32, b as u32) as usize;
                    if f[ab] != u32::MAX && f[ab] != other.mul(f[a], f[b]) {
                        return false;
                    }
                }
            }
            true
        };
        fn rec(
            i: usize,
            f: &mut Vec<u32>,
            used: &mut Vec<bool>,
            ord: (&[usize], &[usize]),
            consistent: &dyn Fn(&[u32]) -> bool,
        ) -> bool {
            let n = f.len();
            if i == n {
                return true;
            }
            if f[i] != u32::MAX {
                return rec(i + 1, f, used, ord, consistent);
            }
            for t in 0..n {
                if used[t] || ord.0[i] != ord.1[t] {
                    continue;
                }
                f[i] = t as u32;
                used[t] = true;
                if consistent(f) && rec(i + 1, f, used, ord, consistent) {
                    return true;
                }
                f[i] = u32::MAX;
                used[t] = false;
            }
            false
        }
        rec(0, &mut f, &mut used, (&ord_self, &ord_other), &consistent).then_some(f)
    }

    pub fn to_pls(&self) -> PartialLatinSquare {
        let n = self.n as u32;
        PartialLatinSquare::new(
            [self.n; 3],
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| [a, b, self.mul(a, b)]),
        )
        .expect("group tables are Latin")
    }
}

/// Read a group off a full Latin square satisfying the label condition:
/// `a * b` is the label at the column of `a` in row `row` and the row of `b`
/// in column `col`. The identity is the label at `(col, row)`.
pub fn brandt_reconstruct(pls: &PartialLatinSquare, row: u32, col: u32) -> Result<GroupTable> {
    if !pls.is_full() {
        return Err(Error::input("reconstruction needs a full Latin square"));
    }
    let n = pls.dims()[0];
    if row as usize >= n || col as usize >= n {
        return Err(Error::input(format!("row {} / column {} out of range", row, col)));
    }
    if let Some(v) = check_quadrangle(pls, QcKind::Label).into_iter().next() {
        return Err(Error::Quadrangle(Box::new(v)));
    }
    let xs: Vec<u32> = (0..n as u32)
        .map(|a| pls.col_of(row, a).expect("full"))
        .collect();
    let ys: Vec<u32> = (0..n as u32)
        .map(|b| pls.row_of(col, b).expect("full"))
        .collect();
    let table: Vec<Vec<u32>> = (0..n)
        .map(|a| (0..n).map(|b| pls.label(xs[a], ys[b]).expect("full")).collect())
        .collect();
    let g = GroupTable {
        n,
        identity: pls.label(col, row).expect("full"),
        table,
    };
    g.verify()?;
    Ok(g)
}

/// Prefix-to-completions map, exposed for diagnostics.
pub fn label_completions(pls: &PartialLatinSquare) -> HashMap<[u32; 3], BTreeSet<u32>> {
    let mut out = HashMap::new();
    for a in 0..pls.dims()[2] as u32 {
        for ((b, c), comps) in completions_for_label(pls, a) {
            out.insert([a, b, c], comps.into_keys().collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{cyclic, fig1, product, random_relabel};

    #[test]
    fn group_tables_are_clean() {
        for k in QcKind::ALL {
            assert!(check_quadrangle(&cyclic(5), k).is_empty());
        }
    }

    #[test]
    fn fig1_has_one_label_violation() {
        let f = fig1();
        let v = check_quadrangle(&f, QcKind::Label);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].mismatch, (3, 4));
        assert!(v[0].verify(&f));
    }

    #[test]
    fn unscrambled_cyclic_is_recovered() {
        let g = brandt_reconstruct(&cyclic(6), 0, 0).unwrap();
        assert_eq!(g.to_pls(), cyclic(6));
        assert_eq!(g.identity, 0);
    }

    #[test]
    fn scrambled_reconstructions_are_isomorphic() {
        let p = random_relabel(&product(&[2, 2]), 4);
        let a = brandt_reconstruct(&p, 0, 0).unwrap();
        let b = brandt_reconstruct(&p, 2, 3).unwrap();
        assert!(a.isomorphism_to(&b).is_some());
        let z4 = brandt_reconstruct(&cyclic(4), 0, 0).unwrap();
        assert!(a.isomorphism_to(&z4).is_none());
    }

    #[test]
    fn partial_input_is_rejected() {
        let e = brandt_reconstruct(&fig1(), 0, 0).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }
}
