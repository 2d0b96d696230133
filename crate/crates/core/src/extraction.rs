//! Dense-subset extraction: dependent random selection on cells and on
//! bipartite graphs, pruning of poorly decomposable cycles, independent-set
//! pruning against short two-edge discs, and the composed pipeline.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::count::{count_octahedra, rectangle_multiplicities};
use crate::cycle::{completion_defect, enumerate_cycles, CycleKind};
use crate::decomposition::{count_ring_in_view, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::par;
use crate::pls::{PartialLatinSquare, Triple};
use crate::quadrangle::satisfies_all;
use crate::vankampen::{build_presentation, slit_scan_class, Certificate, SearchLimits, Status, VkSearch};

const CYCLE_LIMIT: usize = 5_000_000;
const TUPLE_LIMIT: usize = 1 << 20;
const TUPLE_SAMPLES: usize = 1 << 14;

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Bits {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and_assign(&mut self, o: &Bits) {
        self.0.iter_mut().zip(&o.0).for_each(|(a, b)| *a &= b);
    }

    fn and_count(&self, o: &Bits) -> usize {
        self.0.iter().zip(&o.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }
}

/// Index of the maximum; ties go to the index ranked first by a seeded shuffle.
fn seeded_argmax(values: &[f64], seed: u64) -> Option<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut best: Option<usize> = None;
    for &i in &order {
        if best.is_none_or(|b| values[i] > values[b]) {
            best = Some(i);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Stage metadata

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: String,
    pub input_cells: usize,
    pub output_cells: usize,
    /// Output cells over the grid size.
    pub density: f64,
    /// Output octahedra over `n^5`.
    pub octahedron_density: f64,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
    /// Largest number of completions of a 4-cycle prefix in the output.
    pub well_definedness: usize,
    /// The stage produced nothing usable and its input was passed on.
    pub fallback: bool,
    pub verified: Option<bool>,
    pub notes: Vec<String>,
    pub details: serde_json::Value,
}

impl StageTrace {
    fn new(stage: &str, input: &PartialLatinSquare, output: &PartialLatinSquare) -> Result<Self> {
        let n = output.ambient().max(1) as f64;
        Ok(StageTrace {
            stage: stage.to_string(),
            input_cells: input.len(),
            output_cells: output.len(),
            density: output.density(),
            octahedron_density: count_octahedra(output).to_f64() / n.powi(5),
            theta: None,
            gamma: None,
            well_definedness: completion_defect(output, CycleKind::Label, 2)?,
            fallback: false,
            verified: None,
            notes: Vec::new(),
            details: serde_json::Value::Null,
        })
    }
}

// ---------------------------------------------------------------------------
// Dependent random selection on cells

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleBadness {
    pub r: usize,
    pub cycles: u64,
    pub bad: u64,
    pub proportion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrsCellReport {
    pub eps: f64,
    pub delta: f64,
    pub k: usize,
    pub seed: u64,
    /// Minimum rectangle multiplicity for an edge.
    pub popularity_threshold: f64,
    pub graph_edges: u64,
    pub centre: Option<Triple>,
    pub objective: Option<f64>,
    /// Every candidate had a negative objective; the best was kept anyway.
    pub negative_objective: bool,
    pub badness: Vec<CycleBadness>,
}

/// Cell graph: two cells are adjacent when they are opposite corners of a
/// rectangle whose label quadruple occurs at least `eps * n / 2` times.
struct CellGraph {
    nbrs: Vec<Bits>,
    index: HashMap<(u32, u32), usize>,
    edges: u64,
}

fn cell_graph(pls: &PartialLatinSquare, eps: f64) -> (CellGraph, f64) {
    let n = pls.ambient() as f64;
    let thr = eps * n / 2.0;
    let mult = rectangle_multiplicities(pls);
    let ts = pls.triples();
    let index: HashMap<(u32, u32), usize> =
        ts.iter().enumerate().map(|(i, t)| ((t[0], t[1]), i)).collect();
    let nbrs: Vec<Bits> = par::map_range(ts.len(), |i| {
        let [x1, y1, a] = ts[i];
        let mut b = Bits::new(ts.len());
        for &x2 in pls.row(y1) {
            if x2 == x1 {
                continue;
            }
            let lb = pls.label(x2, y1).expect("indexed");
            for &y2 in pls.column(x1) {
                if y2 == y1 {
                    continue;
                }
                let Some(d) = pls.label(x2, y2) else { continue };
                let c = pls.label(x1, y2).expect("indexed");
                if mult.get(&[a, lb, c, d]).is_some_and(|&m| m as f64 >= thr) {
                    b.set(index[&(x2, y2)]);
                }
            }
        }
        b
    });
    let edges = nbrs.iter().map(|b| b.count() as u64).sum::<u64>() / 2;
    (CellGraph { nbrs, index, edges }, thr)
}

/// Pick the cell whose neighbourhood best balances size against the number
/// of cycles with a small common neighbourhood, and return that
/// neighbourhood.
pub fn drs_cell(
    pls: &PartialLatinSquare,
    eps: f64,
    delta: f64,
    k: usize,
    seed: u64,
) -> Result<(PartialLatinSquare, DrsCellReport)> {
    if !(eps > 0.0 && eps <= 1.0 && delta > 0.0 && delta <= 1.0) {
        return Err(Error::input("eps and delta must lie in (0, 1]"));
    }
    if k < 2 {
        return Err(Error::input("k must be at least 2"));
    }
    let (g, thr) = cell_graph(pls, eps);
    let mut report = DrsCellReport {
        eps,
        delta,
        k,
        seed,
        popularity_threshold: thr,
        graph_edges: g.edges,
        centre: None,
        objective: None,
        negative_objective: false,
        badness: Vec::new(),
    };
    let empty = pls.restrict(|_| false);
    if g.edges == 0 {
        return Ok((empty, report));
    }
    let n = pls.ambient() as f64;
    let eta = delta * eps.powi(4 * k as i32);
    let ts = pls.triples();
    let evaluate = |v: usize| -> Result<(f64, Vec<CycleBadness>)> {
        let nb = &g.nbrs[v];
        let sub = pls.restrict(|t| nb.get(g.index[&(t[0], t[1])]));
        let mut z = 0.0;
        let mut bad_rows = Vec::new();
        for r in 2..=k {
            let cycles = enumerate_cycles(&sub, CycleKind::Label, r, CYCLE_LIMIT)?;
            let mut bad = 0u64;
            for c in &cycles {
                let mut common = Bits::full(ts.len());
                for t in &c.cells {
                    common.and_assign(&g.nbrs[g.index[&(t[0], t[1])]]);
                }
                if (common.count() as f64) < eta * n * n {
                    bad += 1;
                }
            }
            z += bad as f64 / n.powi(2 * r as i32);
            let total = cycles.len() as u64;
            bad_rows.push(CycleBadness {
                r,
                cycles: total,
                bad,
                proportion: if total == 0 { 0.0 } else { bad as f64 / total as f64 },
            });
        }
        let obj = sub.len() as f64 / (n * n) - eps / 2.0 - eps * z / (2.0 * k as f64 * eta);
        Ok((obj, bad_rows))
    };
    let scored = par::map_range(ts.len(), evaluate)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let objectives: Vec<f64> = scored.iter().map(|s| s.0).collect();
    let best = seeded_argmax(&objectives, seed).expect("nonempty");
    let nb = &g.nbrs[best];
    let out = pls.restrict(|t| nb.get(g.index[&(t[0], t[1])]));
    report.centre = Some(ts[best]);
    report.objective = Some(objectives[best]);
    report.negative_objective = objectives[best] < 0.0;
    report.badness = scored[best].1.clone();
    Ok((out, report))
}

// ---------------------------------------------------------------------------
// Dependent random selection on bipartite graphs

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub nx: usize,
    pub ny: usize,
    /// Sorted neighbours in `Y` of each `x`.
    pub adj: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    pub fn new(nx: usize, ny: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); nx];
        for (x, y) in edges {
            if x as usize >= nx || y as usize >= ny {
                return Err(Error::input(format!("edge ({}, {}) out of range", x, y)));
            }
            adj[x as usize].push(y);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Ok(BipartiteGraph { nx, ny, adj })
    }

    /// Columns against rows, one edge per defined cell.
    pub fn from_pls(pls: &PartialLatinSquare) -> Self {
        let [nx, ny, _] = pls.dims();
        Self::new(nx, ny, pls.triples().iter().map(|t| (t[0], t[1]))).expect("in range")
    }

    pub fn complete(nx: usize, ny: usize) -> Self {
        BipartiteGraph {
            nx,
            ny,
            adj: vec![(0..ny as u32).collect(); nx],
        }
    }

    pub fn random(nx: usize, ny: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let adj = (0..nx)
            .map(|_| (0..ny as u32).filter(|_| rng.random::<f64>() < p).collect())
            .collect();
        BipartiteGraph { nx, ny, adj }
    }

    pub fn edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        if self.nx * self.ny == 0 {
            0.0
        } else {
            self.edges() as f64 / (self.nx * self.ny) as f64
        }
    }

    pub fn has_edge(&self, x: u32, y: u32) -> bool {
        self.adj[x as usize].binary_search(&y).is_ok()
    }

    fn x_bits(&self) -> Vec<Bits> {
        self.adj
            .iter()
            .map(|a| {
                let mut b = Bits::new(self.ny);
                a.iter().for_each(|&y| b.set(y as usize));
                b
            })
            .collect()
    }

    fn y_bits(&self) -> Vec<Bits> {
        let mut out = vec![Bits::new(self.nx); self.ny];
        for (x, a) in self.adj.iter().enumerate() {
            for &y in a {
                out[y as usize].set(x);
            }
        }
        out
    }

    /// Number of `(u_1..u_r, v_1..v_r)` with `x_i u_i`, `v_i y_i` and every
    /// `u_i v_j` an edge (`u_i` in `Y`, `v_i` in `X`).
    pub fn connector_count(&self, xs: &[u32], ys: &[u32]) -> u64 {
        assert_eq!(xs.len(), ys.len());
        let yb = self.y_bits();
        fn rec(
            g: &BipartiteGraph,
            yb: &[Bits],
            xs: &[u32],
            ys: &[u32],
            common: Bits,
        ) -> u64 {
            if xs.is_empty() {
                return ys.iter().map(|&y| yb[y as usize].and_count(&common) as u64).product();
            }
            let mut total = 0;
            for &u in &g.adj[xs[0] as usize] {
                let mut c = common.clone();
                c.and_assign(&yb[u as usize]);
                if c.count() == 0 {
                    continue;
                }
                total += rec(g, yb, &xs[1..], ys, c);
            }
            total
        }
        rec(self, &yb, xs, ys, Bits::full(self.nx))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectorSample {
    pub xs: Vec<u32>,
    pub ys: Vec<u32>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrsBipartiteStats {
    pub delta: f64,
    pub k: usize,
    pub seed: u64,
    /// Sizes after the degree discard, the neighbourhood selection, the
    /// tuple filter, and of the final `Y` side.
    pub x1: usize,
    pub x2: usize,
    pub x3: usize,
    pub y1: usize,
    pub pivot: Option<u32>,
    /// Bad tuples were estimated by sampling rather than enumerated.
    pub sampled_tuples: bool,
    pub restricted_density: f64,
    pub samples: Vec<ConnectorSample>,
    pub min_connectors: Option<u64>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrsBipartiteResult {
    pub xs: Vec<u32>,
    pub ys: Vec<u32>,
    pub stats: DrsBipartiteStats,
}

/// Counts `(k+1)`-tuples from `pool` whose common `Y`-neighbourhood is
/// smaller than `min`, optionally with the first entry fixed. Exhaustive up
/// to a limit, then a seeded estimate.
fn bad_tuples(
    xb: &[Bits],
    ny: usize,
    pool: &[u32],
    fixed: Option<u32>,
    len: usize,
    min: f64,
    rng: &mut ChaCha8Rng,
) -> (f64, bool) {
    let free = len - fixed.is_some() as usize;
    let space = (pool.len() as f64).powi(free as i32);
    let start = match fixed {
        Some(x) => xb[x as usize].clone(),
        None => Bits::full(ny),
    };
    if pool.is_empty() {
        return (0.0, false);
    }
    if space <= TUPLE_LIMIT as f64 {
        fn rec(xb: &[Bits], pool: &[u32], left: usize, common: &Bits, min: f64) -> u64 {
            if left == 0 {
                return ((common.count() as f64) < min) as u64;
            }
            let mut t = 0;
            for &x in pool {
                let mut c = common.clone();
                c.and_assign(&xb[x as usize]);
                t += rec(xb, pool, left - 1, &c, min);
            }
            t
        }
        (rec(xb, pool, free, &start, min) as f64, false)
    } else {
        let mut bad = 0usize;
        for _ in 0..TUPLE_SAMPLES {
            let mut c = start.clone();
            for _ in 0..free {
                c.and_assign(&xb[pool[rng.random_range(0..pool.len())] as usize]);
            }
            bad += ((c.count() as f64) < min) as usize;
        }
        (bad as f64 / TUPLE_SAMPLES as f64 * space, true)
    }
}

/// Pass to `X' x Y'` where tuples of `X'` have large common neighbourhoods
/// and `Y'` has many edges into `X'`; reports connector counts for sampled
/// `r`-tuples, `2 <= r <= k`.
pub fn drs_bipartite(g: &BipartiteGraph, k: usize, seed: u64) -> Result<DrsBipartiteResult> {
    if k < 1 {
        return Err(Error::input("k must be at least 1"));
    }
    let delta = g.density();
    let mut stats = DrsBipartiteStats {
        delta,
        k,
        seed,
        x1: 0,
        x2: 0,
        x3: 0,
        y1: 0,
        pivot: None,
        sampled_tuples: false,
        restricted_density: 0.0,
        samples: Vec::new(),
        min_connectors: None,
        degenerate: true,
    };
    let degenerate = |stats| DrsBipartiteResult {
        xs: vec![],
        ys: vec![],
        stats,
    };
    if g.edges() == 0 {
        return Ok(degenerate(stats));
    }
    let (nx, ny) = (g.nx as f64, g.ny as f64);
    let x1: Vec<u32> = (0..g.nx as u32)
        .filter(|&x| g.adj[x as usize].len() as f64 >= delta * ny / 2.0)
        .collect();
    stats.x1 = x1.len();
    if x1.is_empty() {
        return Ok(degenerate(stats));
    }
    let c1 = delta.powi(2 * k as i32);
    let c2 = delta.powi(5 * k as i32);
    let xb = g.x_bits();
    let yb = g.y_bits();
    let in_x1 = {
        let mut b = Bits::new(g.nx);
        x1.iter().for_each(|&x| b.set(x as usize));
        b
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nbhd = |y: usize| -> Vec<u32> {
        (0..g.nx as u32)
            .filter(|&x| yb[y].get(x as usize) && in_x1.get(x as usize))
            .collect()
    };
    let mut objectives = Vec::with_capacity(g.ny);
    for y in 0..g.ny {
        let pool = nbhd(y);
        let (bad, sampled) = bad_tuples(&xb, g.ny, &pool, None, k + 1, c2 * ny, &mut rng);
        stats.sampled_tuples |= sampled;
        let e = k as i32 + 1;
        objectives.push(
            c1 * (pool.len() as f64).powi(e) - c1 * (delta * delta / 8.0 * nx).powi(e) - bad,
        );
    }
    let pivot = seeded_argmax(&objectives, seed).expect("nonempty") as u32;
    stats.pivot = Some(pivot);
    let x2 = nbhd(pivot as usize);
    stats.x2 = x2.len();
    if x2.is_empty() {
        return Ok(degenerate(stats));
    }
    let total = (x2.len() as f64).powi(k as i32);
    let mut x3 = Vec::new();
    for &x in &x2 {
        let (bad, sampled) = bad_tuples(&xb, g.ny, &x2, Some(x), k + 1, c2 * ny, &mut rng);
        stats.sampled_tuples |= sampled;
        if bad / total <= 2.0 * c1 {
            x3.push(x);
        }
    }
    stats.x3 = x3.len();
    if x3.is_empty() {
        return Ok(degenerate(stats));
    }
    let mut in_x3 = Bits::new(g.nx);
    x3.iter().for_each(|&x| in_x3.set(x as usize));
    let ys: Vec<u32> = (0..g.ny as u32)
        .filter(|&y| yb[y as usize].and_count(&in_x3) as f64 >= delta * x3.len() as f64 / 4.0)
        .collect();
    stats.y1 = ys.len();
    if ys.is_empty() {
        return Ok(degenerate(stats));
    }
    stats.degenerate = false;
    let inside: usize = ys.iter().map(|&y| yb[y as usize].and_count(&in_x3)).sum();
    stats.restricted_density = inside as f64 / (x3.len() * ys.len()) as f64;
    for r in 2..=k.max(1) {
        for _ in 0..8 {
            let sx: Vec<u32> = (0..r).map(|_| x3[rng.random_range(0..x3.len())]).collect();
            let sy: Vec<u32> = (0..r).map(|_| ys[rng.random_range(0..ys.len())]).collect();
            let count = g.connector_count(&sx, &sy);
            stats.min_connectors = Some(stats.min_connectors.map_or(count, |m| m.min(count)));
            stats.samples.push(ConnectorSample { xs: sx, ys: sy, count });
        }
    }
    Ok(DrsBipartiteResult { xs: x3, ys, stats })
}

// ---------------------------------------------------------------------------
// Pruning cycles with few ring decompositions

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneParams {
    pub k: usize,
    /// `floors[r - 2] * n^(2r)` is the minimum number of ring decompositions
    /// a `2r`-cycle must have.
    pub floors: Vec<f64>,
    pub theta: f64,
    /// Maximum number of cycle evaluations.
    pub budget: u64,
}

impl PruneParams {
    pub fn uniform(k: usize, gamma: f64, theta: f64) -> Self {
        PruneParams {
            k,
            floors: vec![gamma; k.saturating_sub(1)],
            theta,
            budget: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub params: PruneParams,
    /// Removed cycles per `r`, starting at `r = 2`.
    pub removed_cycles: Vec<u64>,
    pub removed_cells: usize,
    pub evaluations: u64,
    pub rounds: usize,
    pub budget_exhausted: bool,
    /// A final scan found every remaining cycle above its floor.
    pub verified: bool,
}

/// Repeatedly remove the cells of a greedy disjoint family of cycles whose
/// ring decompositions in the input number fewer than the floor.
pub fn prune_indecomposable(
    pls: &PartialLatinSquare,
    params: &PruneParams,
) -> Result<(PartialLatinSquare, PruneReport)> {
    let k = params.k;
    if k < 2 || params.floors.len() < k - 1 {
        return Err(Error::input("k must be at least 2 with one floor per r"));
    }
    let n = pls.ambient() as f64;
    let mut report = PruneReport {
        params: params.clone(),
        removed_cycles: vec![0; k - 1],
        removed_cells: 0,
        evaluations: 0,
        rounds: 0,
        budget_exhausted: false,
        verified: false,
    };
    let mut cache: HashMap<Vec<Triple>, bool> = HashMap::new();
    let mut current = pls.clone();
    'rounds: loop {
        report.rounds += 1;
        let mut removed_any = false;
        for r in 2..=k {
            let floor = params.floors[r - 2] * n.powi(2 * r as i32);
            let cycles = enumerate_cycles(&current, CycleKind::Label, r, CYCLE_LIMIT)?;
            let mut used: HashSet<(u32, u32)> = HashSet::new();
            for c in cycles {
                if c.cells.iter().any(|t| used.contains(&(t[0], t[1]))) {
                    continue;
                }
                let low = match cache.get(&c.cells) {
                    Some(&v) => v,
                    None => {
                        if report.evaluations >= params.budget {
                            report.budget_exhausted = true;
                            break 'rounds;
                        }
                        report.evaluations += 1;
                        let v = match count_ring_in_view(pls, &c, params.theta, DEFAULT_BUDGET) {
                            Ok(cnt) => cnt.to_f64() < floor,
                            Err(Error::Resource(_)) => {
                                report.budget_exhausted = true;
                                break 'rounds;
                            }
                            Err(e) => return Err(e),
                        };
                        cache.insert(c.cells.clone(), v);
                        v
                    }
                };
                if low {
                    used.extend(c.cells.iter().map(|t| (t[0], t[1])));
                    report.removed_cycles[r - 2] += 1;
                }
            }
            if !used.is_empty() {
                removed_any = true;
                current = current.restrict(|t| !used.contains(&(t[0], t[1])));
            }
        }
        if !removed_any {
            report.verified = true;
            break;
        }
    }
    report.removed_cells = pls.len() - current.len();
    Ok((current, report))
}

// ---------------------------------------------------------------------------
// Independent-set pruning

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuxWitness {
    Slit { cells: [Triple; 8] },
    Word { area: usize, certificate: Certificate },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxEdge {
    pub a: u32,
    pub b: u32,
    pub witness: AuxWitness,
}

/// Generators of one class, adjacent when some short disc has exactly
/// those two generators on its boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryGraph {
    pub class: usize,
    pub vertices: usize,
    pub edges: Vec<AuxEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentReport {
    pub b: usize,
    pub word_search_states: u64,
    pub graphs: Vec<AuxiliaryGraph>,
    /// Dropped generators per class.
    pub removed: [Vec<u32>; 3],
    /// Word searches stopped by the state limit.
    pub incomplete_searches: usize,
    pub cells_before: usize,
    pub cells_after: usize,
}

const SLIT_AREA: usize = 8;

fn auxiliary_graph(
    pls: &PartialLatinSquare,
    class: usize,
    b: usize,
    states: u64,
    incomplete: &mut usize,
) -> Result<AuxiliaryGraph> {
    let mut edges: Vec<AuxEdge> = Vec::new();
    if SLIT_AREA < b {
        for w in slit_scan_class(pls, class) {
            edges.push(AuxEdge {
                a: w.pair.0,
                b: w.pair.1,
                witness: AuxWitness::Slit { cells: w.cells },
            });
        }
    }
    if states > 0 && b > 1 {
        let pres = build_presentation(pls);
        let search = VkSearch::new(&pres);
        let mut used = vec![false; pls.dims()[class]];
        pls.triples().iter().for_each(|t| used[t[class] as usize] = true);
        let have: HashSet<(u32, u32)> = edges.iter().map(|e| (e.a, e.b)).collect();
        let nc = used.len() as u32;
        let pairs: Vec<(u32, u32)> = (0..nc)
            .flat_map(|i| (i + 1..nc).map(move |j| (i, j)))
            .filter(|&(i, j)| used[i as usize] && used[j as usize] && !have.contains(&(i, j)))
            .collect();
        let limits = SearchLimits {
            area_budget: b - 1,
            length_cap: None,
            max_states: states,
        };
        let results = par::map_range(pairs.len(), |p| {
            let (i, j) = pairs[p];
            search.distance(&[pres.letter(class, i)], &[pres.letter(class, j)], limits)
        });
        for (&(i, j), r) in pairs.iter().zip(results) {
            let r = r?;
            if r.status == Status::ProvenAtMost {
                edges.push(AuxEdge {
                    a: i,
                    b: j,
                    witness: AuxWitness::Word {
                        area: r.area.expect("proven"),
                        certificate: r.certificate.expect("proven"),
                    },
                });
            } else if !r.complete {
                *incomplete += 1;
            }
        }
    }
    edges.sort_by_key(|e| (e.a, e.b));
    Ok(AuxiliaryGraph {
        class,
        vertices: pls.dims()[class],
        edges,
    })
}

/// For each class in turn, keep a maximal independent set of the auxiliary
/// graph (generators in more triples first) and drop the triples of the
/// other generators.
pub fn independent_prune(
    pls: &PartialLatinSquare,
    b: usize,
    word_search_states: u64,
) -> Result<(PartialLatinSquare, IndependentReport)> {
    if b < 2 {
        return Err(Error::input("area bound b must be at least 2"));
    }
    let mut report = IndependentReport {
        b,
        word_search_states,
        graphs: Vec::new(),
        removed: [vec![], vec![], vec![]],
        incomplete_searches: 0,
        cells_before: pls.len(),
        cells_after: 0,
    };
    let mut current = pls.clone();
    for class in 0..3 {
        let g = auxiliary_graph(&current, class, b, word_search_states, &mut report.incomplete_searches)?;
        if !g.edges.is_empty() {
            let nc = g.vertices;
            let mut faces = vec![0usize; nc];
            current.triples().iter().for_each(|t| faces[t[class] as usize] += 1);
            let mut adj = vec![Vec::new(); nc];
            for e in &g.edges {
                adj[e.a as usize].push(e.b as usize);
                adj[e.b as usize].push(e.a as usize);
            }
            let mut order: Vec<usize> = (0..nc).collect();
            order.sort_by_key(|&v| (std::cmp::Reverse(faces[v]), v));
            let mut keep = vec![false; nc];
            for v in order {
                if adj[v].iter().all(|&u| !keep[u]) {
                    keep[v] = true;
                }
            }
            report.removed[class] = (0..nc as u32)
                .filter(|&v| !keep[v as usize] && faces[v as usize] > 0)
                .collect();
            current = current.restrict(|t| keep[t[class] as usize]);
        }
        report.graphs.push(g);
    }
    report.cells_after = current.len();
    Ok((current, report))
}

// ---------------------------------------------------------------------------
// Composed pipeline

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractParams {
    pub delta: f64,
    pub k: usize,
    pub b: usize,
    pub prune_budget: u64,
    pub word_search_states: u64,
    /// Re-add input triples greedily while all three conditions still hold.
    pub extend: bool,
}

impl Default for ExtractParams {
    fn default() -> Self {
        ExtractParams {
            delta: 0.01,
            k: 2,
            b: 9,
            prune_budget: 200_000,
            word_search_states: 20_000,
            extend: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionTrace {
    pub seed: u64,
    pub params: ExtractParams,
    pub input_cells: usize,
    pub output_cells: usize,
    pub density: f64,
    /// `eps^10` for the input's octahedron density; reported only.
    pub reference_density_bound: f64,
    /// The output is empty although the input was not.
    pub empty_output: bool,
    pub stages: Vec<StageTrace>,
}

pub fn qc_extract(pls: &PartialLatinSquare, seed: u64) -> Result<(PartialLatinSquare, ExtractionTrace)> {
    qc_extract_with(pls, seed, &ExtractParams::default())
}

/// Cell selection, cycle pruning and independent-set pruning, followed by
/// greedy re-extension. The output always satisfies all three quadrangle
/// conditions.
pub fn qc_extract_with(
    pls: &PartialLatinSquare,
    seed: u64,
    params: &ExtractParams,
) -> Result<(PartialLatinSquare, ExtractionTrace)> {
    let n = pls.ambient().max(1) as f64;
    let eps = (count_octahedra(pls).to_f64() / n.powi(5)).min(1.0);
    let mut trace = ExtractionTrace {
        seed,
        params: params.clone(),
        input_cells: pls.len(),
        output_cells: 0,
        density: 0.0,
        reference_density_bound: eps.powi(10),
        empty_output: false,
        stages: Vec::new(),
    };
    let finish = |out: PartialLatinSquare, mut trace: ExtractionTrace| {
        trace.output_cells = out.len();
        trace.density = out.density();
        trace.empty_output = out.is_empty() && !pls.is_empty();
        (out, trace)
    };
    if satisfies_all(pls) {
        let mut st = StageTrace::new("already-clean", pls, pls)?;
        st.verified = Some(true);
        st.notes.push("input satisfies all three conditions".into());
        trace.stages.push(st);
        return Ok(finish(pls.clone(), trace));
    }

    // Cell selection.
    let b1 = if eps > 0.0 {
        let (sub, rep) = drs_cell(pls, eps, params.delta, params.k, seed)?;
        let fallback = sub.is_empty();
        let out = if fallback { pls.clone() } else { sub };
        let mut st = StageTrace::new("drs-cell", pls, &out)?;
        st.fallback = fallback;
        if rep.negative_objective {
            st.notes.push("best objective negative; kept the best neighbourhood".into());
        }
        st.details = serde_json::to_value(&rep)?;
        trace.stages.push(st);
        out
    } else {
        let mut st = StageTrace::new("drs-cell", pls, pls)?;
        st.fallback = true;
        st.notes.push("no octahedra; selection skipped".into());
        trace.stages.push(st);
        pls.clone()
    };

    // Cycle pruning against decompositions in the selected set.
    let beta = b1.density();
    let floors: Vec<f64> = (2..=params.k).map(|r| beta.powi(4 * r as i32) / 2.0).collect();
    let prune = PruneParams {
        k: params.k,
        floors: floors.clone(),
        theta: 0.0,
        budget: params.prune_budget,
    };
    let (sub, rep) = prune_indecomposable(&b1, &prune)?;
    let fallback = sub.is_empty() && !b1.is_empty();
    let b2 = if fallback { b1.clone() } else { sub };
    let mut st = StageTrace::new("prune-indecomposable", &b1, &b2)?;
    st.fallback = fallback;
    st.theta = Some(0.0);
    st.gamma = floors.first().copied();
    st.verified = Some(rep.verified);
    st.details = serde_json::to_value(&rep)?;
    trace.stages.push(st);

    // Independent-set pruning.
    let (mut out, rep) = independent_prune(&b2, params.b, params.word_search_states)?;
    let mut st = StageTrace::new("independent-prune", &b2, &out)?;
    st.details = serde_json::to_value(&rep)?;
    trace.stages.push(st);

    if params.extend {
        let before = out.clone();
        let mut added = 0usize;
        for t in pls.triples() {
            if out.contains(*t) {
                continue;
            }
            let mut ts = out.triples().to_vec();
            ts.push(*t);
            let Ok(cand) = PartialLatinSquare::new(pls.dims(), ts) else { continue };
            if satisfies_all(&cand) {
                out = cand;
                added += 1;
            }
        }
        if let Some(names) = pls.names() {
            out = out.with_names(names.clone())?;
        }
        let mut st = StageTrace::new("extend", &before, &out)?;
        st.notes.push(format!("{} triples re-added", added));
        trace.stages.push(st);
    }

    let ok = satisfies_all(&out);
    if let Some(st) = trace.stages.last_mut() {
        st.verified = Some(ok);
    }
    if !ok {
        return Err(Error::Verification(
            "extraction output violates a quadrangle condition".into(),
        ));
    }
    Ok(finish(out, trace))
}
