//! Packing and covering numbers of finite point sets in metric spaces and
//! metric groups, Ruzsa-style covering, popular quotients and rough
//! approximate group checks.
//!
//! Separated sets use `d >= eps`. Strict nets use `d < eps`, non-strict
//! nets `d <= eps`. Infinite distances are `f64::INFINITY`.

use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Largest point count accepted by the exact searches.
pub const EXACT_LIMIT: usize = 24;
const AXIOM_LIMIT: usize = 2000;
const FULL_TRIANGLE_LIMIT: usize = 300;
const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Greedy,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    /// Every point within distance `< eps` of the net.
    Strict,
    /// Every point within distance `<= eps`.
    NonStrict,
}

impl NetKind {
    fn covers(self, d: f64, eps: f64) -> bool {
        match self {
            NetKind::Strict => d < eps,
            NetKind::NonStrict => d <= eps,
        }
    }
}

/// Points with a dense distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    /// `null` encodes an infinite distance.
    distances: Vec<Vec<Option<f64>>>,
}

impl FiniteMetricSpace {
    /// Checks the metric axioms: exhaustively up to 300 points, on sampled
    /// triples up to 2000, not at all beyond.
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::input("distance matrix has the wrong size"));
        }
        let s = FiniteMetricSpace { n, d };
        if n <= AXIOM_LIMIT {
            s.check_axioms()?;
        }
        Ok(s)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Result<Self> {
        let rows = par::map_range(n, |i| (0..n).map(|j| f(i, j)).collect::<Vec<_>>());
        Self::new(n, rows.concat())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: MatrixFile = serde_json::from_str(s)?;
        let n = m.distances.len();
        if m.distances.iter().any(|r| r.len() != n) {
            return Err(Error::input("distance matrix is not square"));
        }
        let d = m
            .distances
            .into_iter()
            .flatten()
            .map(|v| v.unwrap_or(f64::INFINITY))
            .collect();
        Self::new(n, d)
    }

    pub fn to_json(&self) -> String {
        let distances = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| Some(self.dist(i, j)).filter(|v| v.is_finite()))
                    .collect()
            })
            .collect();
        serde_json::to_string(&MatrixFile { distances }).expect("serialisable")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::input(format!("d({i}, {i}) is not zero")));
            }
            for j in 0..n {
                let v = self.dist(i, j);
                if v.is_nan() || v < 0.0 || v != self.dist(j, i) {
                    return Err(Error::input(format!("d({i}, {j}) is negative or asymmetric")));
                }
            }
        }
        let bad = |i: usize, j: usize, k: usize| {
            let (a, b, c) = (self.dist(i, k), self.dist(i, j), self.dist(j, k));
            a.is_finite() && a > b + c + TOL * (1.0 + a)
        };
        if n <= FULL_TRIANGLE_LIMIT {
            let found = par::map_range(n, |i| {
                for j in 0..n {
                    for k in 0..n {
                        if bad(i, j, k) {
                            return Some((i, j, k));
                        }
                    }
                }
                None
            });
            if let Some((i, j, k)) = found.into_iter().flatten().next() {
                return Err(Error::input(format!("triangle inequality fails at ({i}, {j}, {k})")));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..200_000 {
                let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                if bad(i, j, k) {
                    return Err(Error::input(format!("triangle inequality fails at ({i}, {j}, {k})")));
                }
            }
        }
        Ok(())
    }
}

fn check_exact(pts: &[usize]) -> Result<()> {
    if pts.len() > EXACT_LIMIT {
        return Err(Error::resource(format!(
            "exact search limited to {} points, got {}",
            EXACT_LIMIT,
            pts.len()
        )));
    }
    Ok(())
}

/// A maximal (greedy, index order) or maximum (exact) `eps`-separated subset
/// of `pts`.
pub fn separated_set(space: &FiniteMetricSpace, pts: &[usize], eps: f64, mode: Mode) -> Result<Vec<usize>> {
    match mode {
        Mode::Greedy => {
            let mut out: Vec<usize> = Vec::new();
            for &p in pts {
                if out.iter().all(|&q| space.dist(p, q) >= eps) {
                    out.push(p);
                }
            }
            Ok(out)
        }
        Mode::Exact => {
            check_exact(pts)?;
            let m = pts.len();
            let adj: Vec<u32> = (0..m)
                .map(|i| {
                    (0..m)
                        .filter(|&j| j != i && space.dist(pts[i], pts[j]) >= eps)
                        .fold(0u32, |a, j| a | 1 << j)
                })
                .collect();
            fn clique(adj: &[u32], cand: u32, cur: u32, best: &mut u32) {
                if cand == 0 {
                    if cur.count_ones() > best.count_ones() {
                        *best = cur;
                    }
                    return;
                }
                if cur.count_ones() + cand.count_ones() <= best.count_ones() {
                    return;
                }
                let v = cand.trailing_zeros();
                clique(adj, cand & adj[v as usize], cur | 1 << v, best);
                clique(adj, cand & !(1 << v), cur, best);
            }
            let mut best = 0u32;
            let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
            clique(&adj, all, 0, &mut best);
            Ok((0..m).filter(|&i| best >> i & 1 == 1).map(|i| pts[i]).collect())
        }
    }
}

/// An `eps`-net of `pts` drawn from `pts`. Greedy takes a maximal separated
/// set, which covers; exact is a minimum cover.
pub fn net(space: &FiniteMetricSpace, pts: &[usize], eps: f64, mode: Mode, kind: NetKind) -> Result<Vec<usize>> {
    match mode {
        Mode::Greedy => {
            let mut out: Vec<usize> = Vec::new();
            for &p in pts {
                if !out.iter().any(|&q| kind.covers(space.dist(p, q), eps)) {
                    out.push(p);
                }
            }
            Ok(out)
        }
        Mode::Exact => {
            check_exact(pts)?;
            let m = pts.len();
            if m == 0 {
                return Ok(vec![]);
            }
            let cover: Vec<u32> = (0..m)
                .map(|c| {
                    (0..m)
                        .filter(|&j| kind.covers(space.dist(pts[c], pts[j]), eps))
                        .fold(0u32, |a, j| a | 1 << j)
                })
                .collect();
            let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
            fn search(cover: &[u32], covered: u32, all: u32, depth: usize, chosen: &mut Vec<usize>) -> bool {
                if covered == all {
                    return true;
                }
                if chosen.len() == depth {
                    return false;
                }
                let p = (!covered & all).trailing_zeros();
                for (c, &mask) in cover.iter().enumerate() {
                    if mask >> p & 1 == 1 {
                        chosen.push(c);
                        if search(cover, covered | mask, all, depth, chosen) {
                            return true;
                        }
                        chosen.pop();
                    }
                }
                false
            }
            for depth in 1..=m {
                let mut chosen = Vec::new();
                if search(&cover, 0, all, depth, &mut chosen) {
                    chosen.sort_unstable();
                    return Ok(chosen.into_iter().map(|c| pts[c]).collect());
                }
            }
            unreachable!("the whole set is a net")
        }
    }
}

pub fn is_separated(space: &FiniteMetricSpace, set: &[usize], eps: f64) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &a)| set[i + 1..].iter().all(|&b| space.dist(a, b) >= eps))
}

pub fn is_net(space: &FiniteMetricSpace, pts: &[usize], net: &[usize], eps: f64, kind: NetKind) -> bool {
    pts.iter()
        .all(|&p| net.iter().any(|&q| kind.covers(space.dist(p, q), eps)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub eps: f64,
    pub points: usize,
    pub sigma_greedy: usize,
    pub sigma_exact: Option<usize>,
    pub nu_greedy: usize,
    pub nu_exact: Option<usize>,
    pub sigma_witness: Vec<usize>,
    pub nu_witness: Vec<usize>,
}

/// Greedy bounds always; exact values when `pts` is small enough.
pub fn entropy_report(space: &FiniteMetricSpace, pts: &[usize], eps: f64) -> Result<EntropyReport> {
    let sg = separated_set(space, pts, eps, Mode::Greedy)?;
    let ng = net(space, pts, eps, Mode::Greedy, NetKind::Strict)?;
    let exact = pts.len() <= EXACT_LIMIT;
    let se = exact.then(|| separated_set(space, pts, eps, Mode::Exact)).transpose()?;
    let ne = exact.then(|| net(space, pts, eps, Mode::Exact, NetKind::Strict)).transpose()?;
    Ok(EntropyReport {
        eps,
        points: pts.len(),
        sigma_greedy: sg.len(),
        sigma_exact: se.as_ref().map(Vec::len),
        nu_greedy: ng.len(),
        nu_exact: ne.as_ref().map(Vec::len),
        sigma_witness: se.unwrap_or(sg),
        nu_witness: ne.unwrap_or(ng),
    })
}

// ---------------------------------------------------------------------------
// Metric groups

/// A group with a bi-invariant metric.
pub trait MetricGroup: Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn dist(&self, a: &Self::Elem, b: &Self::Elem) -> f64;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclicMetric {
    /// `min(|a - b|, n - |a - b|)`.
    Cyclic,
    /// 1 off the diagonal.
    Discrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicGroup {
    pub n: u64,
    pub metric: CyclicMetric,
}

impl CyclicGroup {
    pub fn elements(&self) -> Vec<u64> {
        (0..self.n).collect()
    }
}

impl MetricGroup for CyclicGroup {
    type Elem = u64;

    fn dist(&self, a: &u64, b: &u64) -> f64 {
        let d = a.abs_diff(*b);
        match self.metric {
            CyclicMetric::Cyclic => d.min(self.n - d) as f64,
            CyclicMetric::Discrete => (d != 0) as u8 as f64,
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.n
    }

    fn inv(&self, a: &u64) -> u64 {
        (self.n - a) % self.n
    }

    fn identity(&self) -> u64 {
        0
    }
}

/// The integers with `|a - b|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl MetricGroup for Integers {
    type Elem = i64;

    fn dist(&self, a: &i64, b: &i64) -> f64 {
        a.abs_diff(*b) as f64
    }

    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }

    fn inv(&self, a: &i64) -> i64 {
        -a
    }

    fn identity(&self) -> i64 {
        0
    }
}

/// Remove repeated elements, keeping first occurrences.
pub fn dedup<E: PartialEq + Clone>(v: Vec<E>) -> Vec<E> {
    let mut out: Vec<E> = Vec::with_capacity(v.len());
    for e in v {
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// `AB` without repeats, in row-major order of `(a, b)`.
pub fn product_set<G: MetricGroup>(g: &G, a: &[G::Elem], b: &[G::Elem]) -> Vec<G::Elem> {
    dedup(a.iter().flat_map(|x| b.iter().map(move |y| g.mul(x, y))).collect())
}

pub fn inverse_set<G: MetricGroup>(g: &G, a: &[G::Elem]) -> Vec<G::Elem> {
    a.iter().map(|x| g.inv(x)).collect()
}

/// Distance matrix of `elems`; the indices of the space are those of `elems`.
pub fn space_of<G: MetricGroup>(g: &G, elems: &[G::Elem]) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_fn(elems.len(), |i, j| g.dist(&elems[i], &elems[j]))
}

pub fn sigma<G: MetricGroup>(g: &G, set: &[G::Elem], eps: f64, mode: Mode) -> Result<usize> {
    let s = space_of(g, set)?;
    let pts: Vec<usize> = (0..set.len()).collect();
    Ok(separated_set(&s, &pts, eps, mode)?.len())
}

pub fn nu<G: MetricGroup>(g: &G, set: &[G::Elem], eps: f64, mode: Mode, kind: NetKind) -> Result<usize> {
    let s = space_of(g, set)?;
    let pts: Vec<usize> = (0..set.len()).collect();
    Ok(net(&s, &pts, eps, mode, kind)?.len())
}

/// Largest violation of `d(ax, ay) = d(x, y) = d(xa, ya)` over sampled
/// triples of `elems`.
pub fn bi_invariance_defect<G: MetricGroup>(g: &G, elems: &[G::Elem], samples: usize, seed: u64) -> f64 {
    if elems.is_empty() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let pick = |rng: &mut ChaCha8Rng| &elems[rng.random_range(0..elems.len())];
        let (a, x, y) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let d = g.dist(x, y);
        let l = g.dist(&g.mul(a, x), &g.mul(a, y));
        let r = g.dist(&g.mul(x, a), &g.mul(y, a));
        if d.is_finite() {
            worst = worst.max((l - d).abs()).max((r - d).abs());
        }
    }
    worst
}

fn set_distance<G: MetricGroup>(g: &G, a: &[G::Elem], b: &[G::Elem]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| g.dist(x, y)))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuzsaCover<E> {
    /// Indices into `A` of the chosen translates.
    pub indices: Vec<usize>,
    pub k: Vec<E>,
    /// Every element of `A` lies within `< 2 eps` of `K B B^-1`.
    pub verified: bool,
}

/// Greedy maximal `K` in `A` whose translates `xB` are pairwise at distance
/// at least `2 eps`; `K B B^-1` is then checked to be a strict `2 eps`-net of `A`.
pub fn ruzsa_cover<G: MetricGroup>(g: &G, a: &[G::Elem], b: &[G::Elem], eps: f64) -> Result<RuzsaCover<G::Elem>> {
    let translate = |x: &G::Elem| -> Vec<G::Elem> { b.iter().map(|y| g.mul(x, y)).collect() };
    let mut indices: Vec<usize> = Vec::new();
    let mut translates: Vec<Vec<G::Elem>> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        let tx = translate(x);
        if translates.iter().all(|t| set_distance(g, &tx, t) >= 2.0 * eps) {
            indices.push(i);
            translates.push(tx);
        }
    }
    let k: Vec<G::Elem> = indices.iter().map(|&i| a[i].clone()).collect();
    let bb = product_set(g, b, &inverse_set(g, b));
    let kbb = product_set(g, &k, &bb);
    let ok = par::map_range(a.len(), |i| kbb.iter().any(|z| g.dist(&a[i], z) < 2.0 * eps));
    let verified = ok.into_iter().all(|v| v);
    if !verified && !a.is_empty() {
        return Err(Error::Verification("K B B^-1 fails to cover A within 2 eps".into()));
    }
    Ok(RuzsaCover { indices, k, verified })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughApprox<E> {
    pub verified: bool,
    pub k: Vec<E>,
    pub product_size: usize,
    /// A product `h1 h2` left uncovered, as indices into `H`.
    pub uncovered: Option<(usize, usize)>,
    /// A refutation only rules out covers drawn from the candidate translates.
    pub candidate_family_only: bool,
}

/// Search for `K` with `|K| <= k` and `HH` inside the closed `delta`-expansion
/// of `KH`, by greedy set cover over translates `gH` with `g` in `HH` or in
/// `extra`. A found cover is re-checked against every product.
pub fn rough_approx_check<G: MetricGroup>(
    g: &G,
    h: &[G::Elem],
    k: usize,
    delta: f64,
    extra: &[G::Elem],
) -> Result<RoughApprox<G::Elem>> {
    let mut prods: Vec<(G::Elem, (usize, usize))> = Vec::new();
    for (i, x) in h.iter().enumerate() {
        for (j, y) in h.iter().enumerate() {
            let p = g.mul(x, y);
            if !prods.iter().any(|(q, _)| *q == p) {
                prods.push((p, (i, j)));
            }
        }
    }
    let mut cands: Vec<G::Elem> = prods.iter().map(|(p, _)| p.clone()).collect();
    cands.extend(extra.iter().cloned());
    let cands = dedup(cands);
    let covers: Vec<Vec<bool>> = par::map_range(cands.len(), |c| {
        let t: Vec<G::Elem> = h.iter().map(|y| g.mul(&cands[c], y)).collect();
        prods
            .iter()
            .map(|(p, _)| t.iter().any(|z| g.dist(p, z) <= delta))
            .collect()
    });
    let mut covered = vec![false; prods.len()];
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < k && covered.iter().any(|c| !c) {
        let gain = |c: usize| (0..prods.len()).filter(|&p| !covered[p] && covers[c][p]).count();
        let mut best = (0, usize::MAX);
        for c in 0..cands.len() {
            let v = gain(c);
            if v > best.0 {
                best = (v, c);
            }
        }
        if best.0 == 0 {
            break;
        }
        chosen.push(best.1);
        for p in 0..prods.len() {
            covered[p] |= covers[best.1][p];
        }
    }
    let kset: Vec<G::Elem> = chosen.iter().map(|&c| cands[c].clone()).collect();
    let kh = product_set(g, &kset, h);
    let first_miss = prods
        .iter()
        .find(|(p, _)| !kh.iter().any(|z| g.dist(p, z) <= delta))
        .map(|(_, w)| *w);
    Ok(RoughApprox {
        verified: first_miss.is_none(),
        k: kset,
        product_size: prods.len(),
        uncovered: first_miss,
        candidate_family_only: first_miss.is_some(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopularElement<E> {
    pub element: E,
    /// Pairs `(x, y)` of indices into `A` with `d(y^-1 x, element) < eps`
    /// and both coordinates `delta`-separated; a greedy lower bound.
    pub witnesses: Vec<(usize, usize)>,
}

/// Elements of `A^-1 A` with at least `m` greedy witness pairs. With
/// `symmetric`, inverses of kept elements are added.
pub fn popular_elements<G: MetricGroup>(
    g: &G,
    a: &[G::Elem],
    eps: f64,
    delta: f64,
    m: usize,
    symmetric: bool,
) -> Vec<PopularElement<G::Elem>> {
    let quotients: Vec<G::Elem> = dedup(
        a.iter()
            .flat_map(|x| a.iter().map(move |y| (x, y)))
            .map(|(x, y)| g.mul(&g.inv(y), x))
            .collect(),
    );
    let wit = |d: &G::Elem| -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (i, x) in a.iter().enumerate() {
            for (j, y) in a.iter().enumerate() {
                if g.dist(&g.mul(&g.inv(y), x), d) >= eps {
                    continue;
                }
                let sep = out
                    .iter()
                    .all(|&(p, q)| g.dist(&a[p], x) >= delta && g.dist(&a[q], y) >= delta);
                if sep {
                    out.push((i, j));
                }
            }
        }
        out
    };
    let scored = par::map_range(quotients.len(), |i| wit(&quotients[i]));
    let mut out: Vec<PopularElement<G::Elem>> = quotients
        .into_iter()
        .zip(scored)
        .filter(|(_, w)| w.len() >= m)
        .map(|(element, witnesses)| PopularElement { element, witnesses })
        .collect();
    if symmetric {
        let extra: Vec<PopularElement<G::Elem>> = out
            .iter()
            .map(|p| g.inv(&p.element))
            .filter(|e| !out.iter().any(|p| p.element == *e))
            .map(|e| PopularElement {
                witnesses: wit(&e),
                element: e,
            })
            .collect();
        out.extend(extra);
    }
    out
}

// ---------------------------------------------------------------------------
// Inequality checks on exact values

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            name: name.to_string(),
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

/// `nu_eps <= sigma_eps <= nu_{eps/2}` on exact values.
pub fn covering_chain(space: &FiniteMetricSpace, pts: &[usize], eps: f64) -> Result<[InequalityCheck; 2]> {
    let nu_e = net(space, pts, eps, Mode::Exact, NetKind::Strict)?.len() as f64;
    let sig = separated_set(space, pts, eps, Mode::Exact)?.len() as f64;
    let nu_h = net(space, pts, eps / 2.0, Mode::Exact, NetKind::Strict)?.len() as f64;
    Ok([
        InequalityCheck::le("nu_eps <= sigma_eps", nu_e, sig),
        InequalityCheck::le("sigma_eps <= nu_eps/2", sig, nu_h),
    ])
}

/// Exact `sigma` and `nu` of `X` and `X^-1` agree.
pub fn inverse_invariance<G: MetricGroup>(g: &G, x: &[G::Elem], eps: f64) -> Result<[InequalityCheck; 2]> {
    let xi = inverse_set(g, x);
    let s = (sigma(g, x, eps, Mode::Exact)?, sigma(g, &xi, eps, Mode::Exact)?);
    let n = (
        nu(g, x, eps, Mode::Exact, NetKind::Strict)?,
        nu(g, &xi, eps, Mode::Exact, NetKind::Strict)?,
    );
    let eq = |name: &str, a: usize, b: usize| InequalityCheck {
        name: name.to_string(),
        lhs: a as f64,
        rhs: b as f64,
        holds: a == b,
    };
    Ok([eq("sigma(X) = sigma(X^-1)", s.0, s.1), eq("nu(X) = nu(X^-1)", n.0, n.1)])
}

/// `nu_eps(U) nu_eps(V W^-1) <= sigma_{eps/4}(U V^-1) sigma_{eps/4}(U W^-1)`.
pub fn ruzsa_triangle<G: MetricGroup>(
    g: &G,
    u: &[G::Elem],
    v: &[G::Elem],
    w: &[G::Elem],
    eps: f64,
) -> Result<InequalityCheck> {
    let vw = product_set(g, v, &inverse_set(g, w));
    let uv = product_set(g, u, &inverse_set(g, v));
    let uw = product_set(g, u, &inverse_set(g, w));
    let lhs = nu(g, u, eps, Mode::Exact, NetKind::Strict)? * nu(g, &vw, eps, Mode::Exact, NetKind::Strict)?;
    let rhs = sigma(g, &uv, eps / 4.0, Mode::Exact)? * sigma(g, &uw, eps / 4.0, Mode::Exact)?;
    Ok(InequalityCheck::le("ruzsa triangle", lhs as f64, rhs as f64))
}

/// `nu_{eps}(X x Y) <= sigma_{eps/2}(X) sigma_{eps/2}(Y)` under the max metric.
pub fn product_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    eps: f64,
) -> Result<InequalityCheck> {
    let (nx, ny) = (x.len(), y.len());
    let prod = FiniteMetricSpace::from_fn(nx * ny, |i, j| {
        x.dist(i / ny, j / ny).max(y.dist(i % ny, j % ny))
    })?;
    let all = |n: usize| (0..n).collect::<Vec<_>>();
    let lhs = net(&prod, &all(nx * ny), eps, Mode::Exact, NetKind::Strict)?.len();
    let rhs = separated_set(x, &all(nx), eps / 2.0, Mode::Exact)?.len()
        * separated_set(y, &all(ny), eps / 2.0, Mode::Exact)?.len();
    Ok(InequalityCheck::le("product covering", lhs as f64, rhs as f64))
}
