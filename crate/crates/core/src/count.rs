//! Exact substructure counts.

use std::collections::HashMap;
use std::time::Instant;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cycle::{check_r, CycleKind};
use crate::error::{Error, Result};
use crate::num::{Accumulator, Count};
use crate::par;
use crate::pls::{PartialBinaryOp, PartialLatinSquare};

/// Ordered coordinates `(x1, x2, y1, y2)` with all four cells present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    pub x: [u32; 2],
    pub y: [u32; 2],
    /// Labels at `(x1,y1), (x2,y1), (x1,y2), (x2,y2)`.
    pub labels: [u32; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    HashGrouped,
    SpectralBound,
    Naive,
    MatrixPower,
    TableScan,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::HashGrouped => "hash-grouped",
            Method::SpectralBound => "spectral-bound",
            Method::Naive => "naive",
            Method::MatrixPower => "matrix-power",
            Method::TableScan => "table-scan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub metric: String,
    pub value: Count,
    pub method: Method,
    pub elapsed_ms: f64,
}

impl CountReport {
    pub fn timed(metric: &str, method: Method, f: impl FnOnce() -> Result<Count>) -> Result<Self> {
        let t = Instant::now();
        let value = f()?;
        Ok(CountReport {
            metric: metric.to_string(),
            value,
            method,
            elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
        })
    }

    pub fn csv_header() -> &'static str {
        "metric,value,method,elapsed_ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.3}",
            self.metric,
            self.value,
            self.method.as_str(),
            self.elapsed_ms
        )
    }
}

/// Every rectangle, degenerate ones included.
pub fn rectangles(pls: &PartialLatinSquare) -> Vec<Rectangle> {
    let mut out = Vec::new();
    for &[x1, y1, a] in pls.triples() {
        for &x2 in pls.row(y1) {
            let b = pls.label(x2, y1).expect("indexed");
            for &y2 in pls.column(x1) {
                let c = pls.label(x1, y2).expect("indexed");
                if let Some(d) = pls.label(x2, y2) {
                    out.push(Rectangle {
                        x: [x1, x2],
                        y: [y1, y2],
                        labels: [a, b, c, d],
                    });
                }
            }
        }
    }
    out
}

/// `sum_q m(q)^2` over label quadruples `q`, where `m(q)` counts rectangles
/// labelled `q`.
///
/// For each first label `a` and second label `b`, the rectangles are
/// enumerated from the cells labelled `a` and tallied by `(c, d)` in a dense
/// table, so the work is `O(n^4)` and the tally fits in memory.
pub fn count_octahedra(pls: &PartialLatinSquare) -> Count {
    let nz = pls.dims()[2];
    let acc = par::fold_range(
        nz,
        Accumulator::default,
        |mut acc, a| {
            let cells = pls.cells_with_label(a as u32);
            if cells.is_empty() {
                return acc;
            }
            let mut table = vec![0u64; nz * nz];
            let mut touched: Vec<usize> = Vec::new();
            for b in 0..nz as u32 {
                for &(x1, y1) in cells {
                    let Some(x2) = pls.col_of(y1, b) else { continue };
                    for &y2 in pls.column(x1) {
                        let Some(d) = pls.label(x2, y2) else { continue };
                        let c = pls.label(x1, y2).expect("indexed");
                        let k = c as usize * nz + d as usize;
                        if table[k] == 0 {
                            touched.push(k);
                        }
                        table[k] += 1;
                    }
                }
                for &k in &touched {
                    let m = table[k] as u128;
                    acc.add(m * m);
                    table[k] = 0;
                }
                touched.clear();
            }
            acc
        },
        Accumulator::merge,
    );
    acc.finish()
}

/// Pairs every rectangle with every other; quadratic in the rectangle count.
pub fn count_octahedra_naive(pls: &PartialLatinSquare, max_rectangles: usize) -> Result<Count> {
    let rects = rectangles(pls);
    if rects.len() > max_rectangles {
        return Err(Error::resource(format!(
            "{} rectangles exceed the naive pairing limit {}",
            rects.len(),
            max_rectangles
        )));
    }
    let mut total = 0u128;
    for p in &rects {
        for q in &rects {
            if p.labels == q.labels {
                total += 1;
            }
        }
    }
    Ok(Count::from(total))
}

/// Rectangles grouped by label quadruple.
pub fn rectangle_multiplicities(pls: &PartialLatinSquare) -> HashMap<[u32; 4], u64> {
    let mut m = HashMap::new();
    for r in rectangles(pls) {
        *m.entry(r.labels).or_insert(0) += 1;
    }
    m
}

/// Bipartite adjacency between columns and rows of the kind's view.
fn adjacency(view: &PartialLatinSquare) -> (usize, usize, Vec<Vec<u32>>) {
    let [nx, ny, _] = view.dims();
    let rows: Vec<Vec<u32>> = (0..nx as u32).map(|x| view.column(x).to_vec()).collect();
    (nx, ny, rows)
}

/// Closed alternating walks of length `2r`: `trace((A A^T)^r)` with `A`
/// the column-by-row incidence matrix of the kind's view.
pub fn count_cycles(pls: &PartialLatinSquare, kind: CycleKind, r: usize) -> Result<Count> {
    check_r(r)?;
    let view = kind.view(pls);
    let (nx, _, adj) = adjacency(&view);
    // B = A A^T, entries bounded by the row count.
    let b: Vec<Vec<u64>> = par::map_range(nx, |i| {
        let mut row = vec![0u64; nx];
        for &y in &adj[i] {
            for &j in view.row(y) {
                row[j as usize] += 1;
            }
        }
        row
    });
    if let Some(t) = trace_power_u128(&b, r) {
        return Ok(Count::from(t));
    }
    Ok(Count(trace_power_big(&b, r)))
}

fn trace_power_u128(b: &[Vec<u64>], r: usize) -> Option<u128> {
    let n = b.len();
    let base: Vec<Vec<u128>> = b
        .iter()
        .map(|row| row.iter().map(|&v| v as u128).collect())
        .collect();
    let mut cur = base.clone();
    for _ in 1..r {
        let next: Vec<Option<Vec<u128>>> = par::map_range(n, |i| {
            let mut row = vec![0u128; n];
            for (k, &cik) in cur[i].iter().enumerate() {
                if cik == 0 {
                    continue;
                }
                for j in 0..n {
                    let p = cik.checked_mul(base[k][j])?;
                    row[j] = row[j].checked_add(p)?;
                }
            }
            Some(row)
        });
        cur = next.into_iter().collect::<Option<Vec<_>>>()?;
    }
    let mut t = 0u128;
    for (i, row) in cur.iter().enumerate() {
        t = t.checked_add(row[i])?;
    }
    Some(t)
}

fn trace_power_big(b: &[Vec<u64>], r: usize) -> BigUint {
    let n = b.len();
    let base: Vec<Vec<BigUint>> = b
        .iter()
        .map(|row| row.iter().map(|&v| BigUint::from(v)).collect())
        .collect();
    let mut cur = base.clone();
    for _ in 1..r {
        cur = par::map_range(n, |i| {
            let mut row = vec![BigUint::zero(); n];
            for (k, cik) in cur[i].iter().enumerate() {
                if cik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    row[j] += cik * &base[k][j];
                }
            }
            row
        });
    }
    (0..n).fold(BigUint::zero(), |acc, i| acc + &cur[i][i])
}

/// `sum_i sigma_i^(2r)` over the singular values of the incidence matrix.
pub fn cycle_count_spectral(pls: &PartialLatinSquare, kind: CycleKind, r: usize) -> Result<f64> {
    check_r(r)?;
    let view = kind.view(pls);
    let [nx, ny, _] = view.dims();
    if nx == 0 || ny == 0 {
        return Ok(0.0);
    }
    let mut a = DMatrix::<f64>::zeros(nx, ny);
    for t in view.triples() {
        a[(t[0] as usize, t[1] as usize)] = 1.0;
    }
    let sv = a.singular_values();
    Ok(sv.iter().map(|s| s.powi(2 * r as i32)).sum())
}

/// Both sides of `alpha^(2r) n^(2r) <= cycles <= alpha^r n^(2r)` with
/// `alpha = m / n^2`, compared exactly as `m^(2r) <= cycles * n^(2r)` and
/// `cycles <= m^r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleBoundCheck {
    pub n: usize,
    pub cells: usize,
    pub r: usize,
    pub cycles: Count,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn check_cycle_bounds(
    pls: &PartialLatinSquare,
    kind: CycleKind,
    r: usize,
) -> Result<CycleBoundCheck> {
    let cycles = count_cycles(pls, kind, r)?;
    let n = pls.ambient();
    let m = BigUint::from(pls.len());
    let lower = m.pow(2 * r as u32) <= &cycles.0 * BigUint::from(n).pow(2 * r as u32);
    let upper = cycles.0 <= m.pow(r as u32);
    Ok(CycleBoundCheck {
        n,
        cells: pls.len(),
        r,
        cycles,
        lower_holds: lower,
        upper_holds: upper,
    })
}

/// Triples `(x, y, z)` with `x(yz)` and `(xy)z` both defined and equal.
pub fn count_associative_triples(op: &PartialBinaryOp) -> Count {
    let n = op.n();
    let total = par::sum_u64(n, |x| {
        let x = x as u32;
        let mut c = 0u64;
        for y in 0..n as u32 {
            let Some(xy) = op.get(x, y) else { continue };
            for z in 0..n as u32 {
                let Some(yz) = op.get(y, z) else { continue };
                if let (Some(l), Some(r)) = (op.get(xy, z), op.get(x, yz)) {
                    if l == r {
                        c += 1;
                    }
                }
            }
        }
        c
    });
    Count::from(total)
}

/// Exact form of `octahedra >= eps^4 n^5` with `eps = assoc / n^3`:
/// `octahedra * n^7 >= assoc^4`.
pub fn octahedra_lower_bound_holds(octahedra: &Count, assoc: &Count, n: usize) -> bool {
    &octahedra.0 * BigUint::from(n).pow(7) >= assoc.0.pow(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{cyclic, from_binary_op, random_quasigroup};

    #[test]
    fn z2_has_thirty_two_octahedra() {
        assert_eq!(count_octahedra(&cyclic(2)), 32u64);
    }

    #[test]
    fn single_triple_pairs_with_itself() {
        let p = PartialLatinSquare::new([1, 1, 1], [[0, 0, 0]]).unwrap();
        assert_eq!(count_octahedra(&p), 1u64);
    }

    #[test]
    fn fast_and_naive_agree_on_quasigroups() {
        for seed in 0..4 {
            let q = random_quasigroup(5, seed);
            assert_eq!(
                count_octahedra(&q),
                count_octahedra_naive(&q, 10_000).unwrap()
            );
        }
    }

    #[test]
    fn full_grid_cycles() {
        assert_eq!(count_cycles(&cyclic(3), CycleKind::Label, 2).unwrap(), 81u64);
    }

    #[test]
    fn matching_has_one_walk_per_cell() {
        let p = PartialLatinSquare::new([4, 4, 4], (0..4).map(|i| [i, i, 0])).unwrap();
        assert_eq!(count_cycles(&p, CycleKind::Label, 2).unwrap(), 4u64);
    }

    #[test]
    fn spectral_matches_exact() {
        let q = random_quasigroup(6, 3);
        let p = crate::pls::restrict_random(&q, 0.6, 1);
        for r in 2..=4 {
            let exact = count_cycles(&p, CycleKind::Label, r).unwrap().to_f64();
            let spec = cycle_count_spectral(&p, CycleKind::Label, r).unwrap();
            assert!((exact - spec).abs() <= 1e-9 * exact.max(1.0));
        }
    }

    #[test]
    fn group_associativity() {
        let op = crate::pls::to_binary_op(&cyclic(3)).unwrap();
        assert_eq!(count_associative_triples(&op), 27u64);
        assert_eq!(count_associative_triples(&PartialBinaryOp::new(3)), 0u64);
        let pls = from_binary_op(&op).unwrap();
        assert!(octahedra_lower_bound_holds(
            &count_octahedra(&pls),
            &Count::from(27u64),
            3
        ));
    }
}
