//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use plslab::cycle::CycleKind;
use plslab::disc::AbstractDisc;
use plslab::pls::{PartialLatinSquare, Triple};

/// Dense label lookup over the ambient cube.
pub struct Dense {
    pub n: usize,
    cell: Vec<Option<u32>>,
}

impl Dense {
    pub fn new(p: &PartialLatinSquare) -> Self {
        let n = p.ambient();
        let mut cell = vec![None; n * n];
        for t in p.triples() {
            cell[t[0] as usize * n + t[1] as usize] = Some(t[2]);
        }
        Dense { n, cell }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<u32> {
        self.cell[x * self.n + y]
    }

    /// Coordinates permuted so that `new[i] = old[perm[i]]`.
    pub fn view(p: &PartialLatinSquare, kind: CycleKind) -> Self {
        let perm = match kind {
            CycleKind::Label => [0, 1, 2],
            CycleKind::Column => [2, 1, 0],
            CycleKind::Row => [2, 0, 1],
        };
        let n = p.ambient();
        let mut cell = vec![None; n * n];
        for t in p.triples() {
            let v = [t[perm[0]], t[perm[1]], t[perm[2]]];
            cell[v[0] as usize * n + v[1] as usize] = Some(v[2]);
        }
        Dense { n, cell }
    }

    fn row_with_label(&self, x: usize, z: u32) -> Option<usize> {
        (0..self.n).find(|&y| self.get(x, y) == Some(z))
    }
}

/// Ordered pairs of rectangles with equal label quadruples, by looping over
/// all coordinate 4-tuples.
pub fn octahedra_by_coordinates(p: &PartialLatinSquare) -> u128 {
    let d = Dense::new(p);
    let n = d.n;
    let mut quads: Vec<[u32; 4]> = Vec::new();
    for x1 in 0..n {
        for x2 in 0..n {
            for y1 in 0..n {
                for y2 in 0..n {
                    if let (Some(a), Some(b), Some(c), Some(e)) =
                        (d.get(x1, y1), d.get(x2, y1), d.get(x1, y2), d.get(x2, y2))
                    {
                        quads.push([a, b, c, e]);
                    }
                }
            }
        }
    }
    quads.sort_unstable();
    let mut total = 0u128;
    let mut i = 0;
    while i < quads.len() {
        let j = (i..quads.len()).find(|&j| quads[j] != quads[i]).unwrap_or(quads.len());
        let m = (j - i) as u128;
        total += m * m;
        i = j;
    }
    total
}

/// Closed alternating walks of `2r` cells: consecutive cells share a row,
/// then a column, alternately.
pub fn closed_walks(p: &PartialLatinSquare, kind: CycleKind, r: usize) -> u128 {
    let d = Dense::view(p, kind);
    let n = d.n;
    fn rec(d: &Dense, start: (usize, usize), cur: (usize, usize), step: usize, len: usize) -> u128 {
        if step == len {
            return (cur.0 == start.0) as u128;
        }
        let mut c = 0;
        if step % 2 == 1 {
            // move within the row
            for x in 0..d.n {
                if d.get(x, cur.1).is_some() {
                    c += rec(d, start, (x, cur.1), step + 1, len);
                }
            }
        } else {
            for y in 0..d.n {
                if d.get(cur.0, y).is_some() {
                    c += rec(d, start, (cur.0, y), step + 1, len);
                }
            }
        }
        c
    }
    let mut total = 0;
    for x in 0..n {
        for y in 0..n {
            if d.get(x, y).is_some() {
                total += rec(&d, (x, y), (x, y), 1, 2 * r);
            }
        }
    }
    total
}

/// Cells given as `(column, row)` in a label-kind cycle `x_1 y_1 .. x_r y_r`.
pub fn cycle_frame(cells: &[Triple]) -> (Vec<usize>, Vec<usize>) {
    let r = cells.len() / 2;
    let cols = (0..r).map(|i| cells[2 * i + 1][0] as usize).collect();
    let rows = (0..r).map(|i| cells[2 * i][1] as usize).collect();
    (cols, rows)
}

/// Cells `u` with every rectangle from `u` to a cycle cell present.
pub fn point_centres(p: &PartialLatinSquare, cells: &[Triple]) -> u64 {
    let d = Dense::new(p);
    let mut c = 0;
    for x in 0..d.n {
        for y in 0..d.n {
            if d.get(x, y).is_none() {
                continue;
            }
            let ok = cells.iter().all(|t| {
                d.get(t[0] as usize, y).is_some() && d.get(x, t[1] as usize).is_some()
            });
            c += ok as u64;
        }
    }
    c
}

/// Ring partners by trying every `(K'_i, R'_i)`.
pub fn ring_partners(p: &PartialLatinSquare, cells: &[Triple]) -> u64 {
    let d = Dense::new(p);
    let (cols, rows) = cycle_frame(cells);
    let r = cols.len();
    let n = d.n;
    let total = (n as u64).pow(2 * r as u32);
    let mut c = 0;
    for code in 0..total {
        let mut v = code;
        let mut kc = vec![0; r];
        let mut rr = vec![0; r];
        for i in 0..r {
            kc[i] = (v % n as u64) as usize;
            v /= n as u64;
            rr[i] = (v % n as u64) as usize;
            v /= n as u64;
        }
        let ok = (0..r).all(|i| {
            let prev = (i + r - 1) % r;
            d.get(kc[i], rows[i]).is_some()
                && d.get(cols[i], rr[i]).is_some()
                && d.get(kc[i], rr[prev]).is_some()
                && d.get(kc[i], rr[i]).is_some()
        });
        c += ok as u64;
    }
    c
}

/// Dispersed ring decompositions by looping over all `n^{6r}` free
/// coordinates: the partner walk, then two columns for each of the `2r`
/// rectangles, rows being forced by labels.
pub fn dispersed_by_coordinates(p: &PartialLatinSquare, cells: &[Triple]) -> u64 {
    let d = Dense::new(p);
    let n = d.n;
    let r = cells.len() / 2;
    let lx: Vec<u32> = (0..r).map(|i| cells[2 * i][2]).collect();
    let ly: Vec<u32> = (0..r).map(|i| cells[2 * i + 1][2]).collect();
    let digits = 6 * r;
    let total = (n as u64).pow(digits as u32);
    let mut count = 0;
    'outer: for code in 0..total {
        let mut v = code;
        let mut dig = vec![0usize; digits];
        for k in dig.iter_mut() {
            *k = (v % n as u64) as usize;
            v /= n as u64;
        }
        let a = &dig[0..r];
        let b = &dig[r..2 * r];
        // Partner cells: x'_i = (a_{i+1}, b_i), y'_i = (a_{i+1}, b_{i+1}).
        let mut px = vec![0; r];
        let mut py = vec![0; r];
        for i in 0..r {
            let an = a[(i + 1) % r];
            match (d.get(an, b[i]), d.get(an, b[(i + 1) % r])) {
                (Some(s), Some(t)) => {
                    px[i] = s;
                    py[i] = t;
                }
                _ => continue 'outer,
            }
        }
        // first_i: s = (c1, .) labelled lx, t = (c2, .) labelled px;
        // u_i = (c2, row s), v_i = (c1, row t).
        let mut u = vec![0; r];
        let mut vv = vec![0; r];
        let mut w = vec![0; r];
        let mut z = vec![0; r];
        for i in 0..r {
            let (c1, c2) = (dig[2 * r + 2 * i], dig[2 * r + 2 * i + 1]);
            let (Some(r1), Some(r2)) = (d.row_with_label(c1, lx[i]), d.row_with_label(c2, px[i])) else {
                continue 'outer;
            };
            let (Some(ui), Some(vi)) = (d.get(c2, r1), d.get(c1, r2)) else {
                continue 'outer;
            };
            u[i] = ui;
            vv[i] = vi;
            // second_i: s = (e1, .) labelled ly, t = (e2, .) labelled py;
            // w_i = (e1, row t), z_i = (e2, row s).
            let (e1, e2) = (dig[4 * r + 2 * i], dig[4 * r + 2 * i + 1]);
            let (Some(s1), Some(s2)) = (d.row_with_label(e1, ly[i]), d.row_with_label(e2, py[i])) else {
                continue 'outer;
            };
            let (Some(wi), Some(zi)) = (d.get(e1, s2), d.get(e2, s1)) else {
                continue 'outer;
            };
            w[i] = wi;
            z[i] = zi;
        }
        let ok = (0..r).all(|i| z[i] == u[i] && w[(i + r - 1) % r] == vv[i]);
        count += ok as u64;
    }
    count
}

/// Disc copies by assigning every edge a value and checking every face.
pub fn disc_copies(disc: &AbstractDisc, p: &PartialLatinSquare) -> u128 {
    let d = Dense::new(p);
    let n = d.n;
    let m = disc.edges.len();
    let total = (n as u128).pow(m as u32);
    let mut c = 0;
    for code in 0..total {
        let mut v = code;
        let vals: Vec<usize> = (0..m)
            .map(|_| {
                let k = (v % n as u128) as usize;
                v /= n as u128;
                k
            })
            .collect();
        let ok = disc.faces.iter().all(|f| {
            d.get(vals[f[0]], vals[f[1]]) == Some(vals[f[2]] as u32)
        });
        c += ok as u128;
    }
    c
}

/// Small permutation groups as multiplication tables, `(a b)(i) = a(b(i))`.
pub fn permutation_group(generators: &[Vec<usize>]) -> PartialLatinSquare {
    let k = generators[0].len();
    let mut elems: Vec<Vec<usize>> = vec![(0..k).collect()];
    let mut i = 0;
    while i < elems.len() {
        for g in generators {
            let p: Vec<usize> = (0..k).map(|j| elems[i][g[j]]).collect();
            if !elems.contains(&p) {
                elems.push(p);
            }
        }
        i += 1;
    }
    let n = elems.len();
    let idx = |p: &Vec<usize>| elems.iter().position(|e| e == p).unwrap() as u32;
    let mut ts = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let p: Vec<usize> = (0..k).map(|j| elems[a][elems[b][j]]).collect();
            ts.push([a as u32, b as u32, idx(&p)]);
        }
    }
    PartialLatinSquare::new([n; 3], ts).unwrap()
}

pub fn s3() -> PartialLatinSquare {
    permutation_group(&[vec![1, 0, 2], vec![1, 2, 0]])
}

pub fn d4() -> PartialLatinSquare {
    permutation_group(&[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])
}
