//! Rotations as unit quaternions, separated nets in SO(3), the fuzzy
//! product on a net, and measured counts against their lower bounds.

use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::count::{count_associative_triples, count_octahedra, octahedra_lower_bound_holds};
use crate::entropy::MetricGroup;
use crate::error::{Error, Result};
use crate::par;
use crate::pls::{from_binary_op, PartialBinaryOp};

/// Largest net `build_net` will grow.
pub const NET_CAP: usize = 20_000;
/// Triple enumerations above this size are sampled.
pub const ENUMERATION_CAP: u64 = 400_000_000;

/// Unit quaternion `(w, x, y, z)`; `q` and `-q` are the same rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rotation {
    q: [f64; 4],
}

impl From<[f64; 4]> for Rotation {
    fn from(q: [f64; 4]) -> Self {
        Rotation::new(q)
    }
}

impl From<Rotation> for [f64; 4] {
    fn from(r: Rotation) -> Self {
        r.q
    }
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { q: [1.0, 0.0, 0.0, 0.0] };

    /// Normalises; a zero vector becomes the identity.
    pub fn new(q: [f64; 4]) -> Self {
        let n = dot(&q, &q).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Self::IDENTITY;
        }
        Rotation {
            q: q.map(|v| v / n),
        }
    }

    /// Whether the input already had unit norm within `1e-12`.
    pub fn is_unit(q: [f64; 4]) -> bool {
        (dot(&q, &q).sqrt() - 1.0).abs() <= 1e-12
    }

    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (s, c) = (angle / 2.0).sin_cos();
        Rotation::new([c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n])
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn mul(&self, o: &Rotation) -> Rotation {
        let [a1, b1, c1, d1] = self.q;
        let [a2, b2, c2, d2] = o.q;
        Rotation::new([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    pub fn inverse(&self) -> Rotation {
        let [w, x, y, z] = self.q;
        Rotation { q: [w, -x, -y, -z] }
    }

    /// Haar-uniform rotation.
    pub fn random(rng: &mut impl rand::Rng) -> Rotation {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
            if dot(&q, &q) > 1e-12 {
                return Rotation::new(q);
            }
        }
    }
}

/// Rotation angle of `p q^-1`, in `[0, pi]`.
pub fn rotation_distance(p: &Rotation, q: &Rotation) -> f64 {
    2.0 * dot(&p.q, &q.q).abs().min(1.0).acos()
}

/// Euclidean distance between nearer representatives for a rotation angle.
fn chord(angle: f64) -> f64 {
    2.0 * (angle.min(std::f64::consts::PI) / 4.0).sin()
}

/// SO(3) with the rotation-angle metric.
#[derive(Clone, Copy, Debug, Default)]
pub struct So3;

impl MetricGroup for So3 {
    type Elem = Rotation;

    fn dist(&self, a: &Rotation, b: &Rotation) -> f64 {
        rotation_distance(a, b)
    }

    fn mul(&self, a: &Rotation, b: &Rotation) -> Rotation {
        a.mul(b)
    }

    fn inv(&self, a: &Rotation) -> Rotation {
        a.inverse()
    }

    fn identity(&self) -> Rotation {
        Rotation::IDENTITY
    }
}

/// Bucket grid in R^4 holding both representatives of every point.
#[derive(Clone, Debug)]
struct Grid {
    cell: f64,
    buckets: HashMap<[i32; 4], Vec<u32>>,
}

impl Grid {
    fn new(cell: f64) -> Self {
        Grid {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, q: &[f64; 4]) -> [i32; 4] {
        q.map(|v| (v / self.cell).floor() as i32)
    }

    fn insert(&mut self, q: &[f64; 4], i: u32) {
        for s in [1.0, -1.0] {
            let k = self.key(&q.map(|v| v * s));
            self.buckets.entry(k).or_default().push(i);
        }
    }

    /// Buckets to scan for a chord radius, or `None` when brute force is cheaper.
    fn visit(&self, q: &[f64; 4], radius: f64, mut f: impl FnMut(u32) -> bool) -> Option<bool> {
        let reach = (radius / self.cell).ceil() as i32;
        if reach > 2 {
            return None;
        }
        let c = self.key(q);
        let r = -reach..=reach;
        for a in r.clone() {
            for b in r.clone() {
                for d in r.clone() {
                    for e in r.clone() {
                        if let Some(v) = self.buckets.get(&[c[0] + a, c[1] + b, c[2] + d, c[3] + e]) {
                            for &i in v {
                                if f(i) {
                                    return Some(true);
                                }
                            }
                        }
                    }
                }
            }
        }
        Some(false)
    }
}

/// A `delta`-separated set of rotations, frozen after `budget` consecutive
/// rejected samples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationNet {
    pub delta: f64,
    pub seed: Option<u64>,
    pub budget: u64,
    /// Consecutive rejections when the net was frozen.
    pub rejections: u64,
    pub samples: u64,
    pub points: Vec<Rotation>,
    #[serde(skip)]
    grid: Option<Grid>,
}

impl PartialEq for RotationNet {
    fn eq(&self, o: &Self) -> bool {
        self.delta == o.delta && self.points == o.points
    }
}

impl RotationNet {
    /// Checks pairwise separation.
    pub fn from_points(delta: f64, points: Vec<Rotation>) -> Result<Self> {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if rotation_distance(&points[i], &points[j]) < delta {
                    return Err(Error::input(format!("points {i} and {j} are closer than {delta}")));
                }
            }
        }
        let mut net = RotationNet {
            delta,
            seed: None,
            budget: 0,
            rejections: 0,
            samples: 0,
            points,
            grid: None,
        };
        net.index();
        Ok(net)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let net: RotationNet = serde_json::from_str(s)?;
        Self::from_points(net.delta, net.points).map(|mut n| {
            n.seed = net.seed;
            n.budget = net.budget;
            n.rejections = net.rejections;
            n.samples = net.samples;
            n
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialisable")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn index(&mut self) {
        let mut g = Grid::new(chord(self.delta).max(1e-3));
        for (i, p) in self.points.iter().enumerate() {
            g.insert(&p.q, i as u32);
        }
        self.grid = Some(g);
    }

    fn grid(&self) -> &Grid {
        self.grid.as_ref().expect("net is indexed")
    }

    /// Whether some net point lies within angle `r` of `q`.
    pub fn any_within(&self, q: &Rotation, r: f64) -> bool {
        let hit = |i: u32| rotation_distance(q, &self.points[i as usize]) <= r;
        match self.grid().visit(&q.q, chord(r) + 1e-12, hit) {
            Some(v) => v,
            None => (0..self.points.len() as u32).any(hit),
        }
    }

    /// Nearest net point within angle `r`, ties to the lower index.
    pub fn nearest_within(&self, q: &Rotation, r: f64) -> Option<u32> {
        let mut best: Option<(f64, u32)> = None;
        let mut see = |i: u32| {
            let d = rotation_distance(q, &self.points[i as usize]);
            if d <= r && best.is_none_or(|(bd, bi)| d < bd || (d == bd && i < bi)) {
                best = Some((d, i));
            }
            false
        };
        if self.grid().visit(&q.q, chord(r) + 1e-12, &mut see).is_none() {
            (0..self.points.len() as u32).for_each(|i| {
                see(i);
            });
        }
        best.map(|(_, i)| i)
    }

    /// All net points within angle `r`.
    pub fn all_within(&self, q: &Rotation, r: f64) -> Vec<u32> {
        let mut out = Vec::new();
        let mut see = |i: u32| {
            if rotation_distance(q, &self.points[i as usize]) <= r {
                out.push(i);
            }
            false
        };
        if self.grid().visit(&q.q, chord(r) + 1e-12, &mut see).is_none() {
            (0..self.points.len() as u32).for_each(|i| {
                see(i);
            });
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Greedy insertion of Haar samples until `budget` consecutive samples are
/// rejected.
pub fn build_net(delta: f64, seed: u64, budget: u64) -> Result<RotationNet> {
    if !(delta > 0.0 && delta < std::f64::consts::PI) {
        return Err(Error::input("delta must lie in (0, pi)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = RotationNet {
        delta,
        seed: Some(seed),
        budget,
        rejections: 0,
        samples: 0,
        points: Vec::new(),
        grid: Some(Grid::new(chord(delta))),
    };
    let r = chord(delta);
    while net.rejections < budget {
        let q = Rotation::random(&mut rng);
        net.samples += 1;
        let close = |i: u32| rotation_distance(&q, &net.points[i as usize]) < delta;
        let blocked = match net.grid().visit(&q.q, r + 1e-12, close) {
            Some(v) => v,
            None => (0..net.points.len() as u32).any(close),
        };
        if blocked {
            net.rejections += 1;
            continue;
        }
        if net.points.len() == NET_CAP {
            return Err(Error::resource(format!("net exceeds {NET_CAP} points")));
        }
        let i = net.points.len() as u32;
        net.points.push(q);
        net.grid.as_mut().expect("indexed").insert(&q.q, i);
        net.rejections = 0;
    }
    Ok(net)
}

/// `x o y = z` iff `d(xy, z) <= theta delta`; single-valued for `theta < 1/2`.
pub fn fuzzy_op(net: &RotationNet, theta: f64) -> Result<PartialBinaryOp> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::input("theta must lie in (0, 1/2)"));
    }
    Ok(nearest_op(net, theta * net.delta))
}

/// Product rounded to the nearest net point within `tol`.
fn nearest_op(net: &RotationNet, tol: f64) -> PartialBinaryOp {
    let n = net.len();
    let rows = par::map_range(n, |x| {
        (0..n)
            .map(|y| net.nearest_within(&net.points[x].mul(&net.points[y]), tol))
            .collect::<Vec<_>>()
    });
    PartialBinaryOp::from_fn(n, |x, y| rows[x as usize][y as usize])
}

/// One measured quantity against its lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub metric: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_least(metric: &str, measured: f64, bound: f64) -> Self {
        Check {
            metric: metric.to_string(),
            measured,
            bound,
            pass: measured >= bound,
        }
    }

    /// How many times over the bound the measurement is.
    pub fn margin(&self) -> f64 {
        if self.bound > 0.0 {
            self.measured / self.bound
        } else {
            f64::INFINITY
        }
    }
}

pub fn checks_csv(rows: &[Check]) -> String {
    let mut s = String::from("metric,measured,bound,pass\n");
    for r in rows {
        s.push_str(&format!("{},{:e},{:e},{}\n", r.metric, r.measured, r.bound, r.pass));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityStats {
    pub theta: f64,
    pub delta: f64,
    pub net_size: usize,
    pub pairs: u64,
    pub hits: u64,
    pub check: Check,
}

/// Proportion of pairs `(x, y)` with `d(xy, net) <= theta delta`, against
/// `(theta/3)^9 / 16`.
pub fn verify_density(net: &RotationNet, theta: f64) -> DensityStats {
    let n = net.len();
    let tol = theta * net.delta;
    let hits = par::sum_u64(n, |x| {
        (0..n)
            .filter(|&y| net.any_within(&net.points[x].mul(&net.points[y]), tol))
            .count() as u64
    });
    let pairs = (n * n) as u64;
    let p = if pairs == 0 { 0.0 } else { hits as f64 / pairs as f64 };
    DensityStats {
        theta,
        delta: net.delta,
        net_size: n,
        pairs,
        hits,
        check: Check::at_least("defined_pair_proportion", p, (theta / 3.0).powi(9) / 16.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStats {
    pub theta: f64,
    pub delta: f64,
    pub eps: f64,
    pub net_size: usize,
    /// Partner threshold for the two-sided count.
    pub partner_bound: f64,
    /// Triples enumerated, or sampled when the net is large.
    pub triples_examined: u64,
    pub sampled: bool,
    pub popular_threshold: f64,
    pub checks: Vec<Check>,
    pub runtime_ms: u128,
}

/// The two-sided partner fraction, the associative-defined triple count
/// under tolerance `6 theta delta`, and the popular-product fraction.
pub fn verify_products(net: &RotationNet, theta: f64, eps: f64, seed: u64) -> Result<ProductStats> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input("eps must lie in (0, 1)"));
    }
    let start = Instant::now();
    let n = net.len();
    let d = net.delta;
    let pts = &net.points;

    let partner_bound = theta.powi(3) * d.powi(-3) / 128.0;
    let tol3 = 3.0 * theta * d;
    let good = par::sum_u64(n, |y| {
        let left = (0..n).filter(|&x| net.any_within(&pts[x].mul(&pts[y]), tol3)).count();
        let right = (0..n).filter(|&z| net.any_within(&pts[y].mul(&pts[z]), tol3)).count();
        (left as f64 >= partner_bound && right as f64 >= partner_bound) as u64
    });
    let frac = if n == 0 { 0.0 } else { good as f64 / n as f64 };

    let op = nearest_op(net, 6.0 * theta * d);
    let total = (n as u64).pow(3);
    let sampled = total > ENUMERATION_CAP;
    let both = |x: u32, y: u32, z: u32| -> bool {
        let (Some(xy), Some(yz)) = (op.get(x, y), op.get(y, z)) else {
            return false;
        };
        op.get(xy, z).is_some() && op.get(x, yz).is_some()
    };
    let (examined, triples) = if sampled {
        let per = ENUMERATION_CAP / n as u64;
        let hits = par::sum_u64(n, |x| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            (0..per)
                .filter(|_| {
                    use rand::Rng;
                    both(x as u32, rng.random_range(0..n as u32), rng.random_range(0..n as u32))
                })
                .count() as u64
        });
        let examined = per * n as u64;
        (examined, hits as f64 * total as f64 / examined as f64)
    } else {
        let hits = par::sum_u64(n, |x| {
            let mut c = 0u64;
            for y in 0..n as u32 {
                for z in 0..n as u32 {
                    c += both(x as u32, y, z) as u64;
                }
            }
            c
        });
        (total, hits as f64)
    };
    let triple_bound = theta.powi(9) * d.powi(-9) / 2f64.powi(22);

    let tol = theta * d;
    let popular_threshold = (theta / 3.0).powi(6) * n as f64 / 8.0;
    let counts = par::fold_range(
        n,
        || vec![0u64; n],
        |mut acc, x| {
            for y in 0..n {
                for z in net.all_within(&pts[x].mul(&pts[y]), tol) {
                    acc[z as usize] += 1;
                }
            }
            acc
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
            a
        },
    );
    let popular = counts.iter().filter(|&&c| c as f64 >= popular_threshold).count();
    let pop_frac = if n == 0 { 0.0 } else { popular as f64 / n as f64 };

    Ok(ProductStats {
        theta,
        delta: d,
        eps,
        net_size: n,
        partner_bound,
        triples_examined: examined,
        sampled,
        popular_threshold,
        checks: vec![
            Check::at_least("two_sided_partner_fraction", frac, 0.5),
            Check::at_least("associative_defined_triples", triples, triple_bound),
            Check::at_least("popular_product_fraction", pop_frac, 1.0 - eps),
        ],
        runtime_ms: start.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OctahedronCheck {
    pub n: usize,
    pub associative_triples: String,
    pub octahedra: String,
    pub holds: bool,
}

/// Octahedra of the fuzzy table against the associative-triple density.
pub fn octahedron_chain(net: &RotationNet, theta: f64) -> Result<OctahedronCheck> {
    let op = fuzzy_op(net, theta)?;
    let pls = from_binary_op(&op)?;
    let oct = count_octahedra(&pls);
    let assoc = count_associative_triples(&op);
    Ok(OctahedronCheck {
        n: op.n(),
        associative_triples: assoc.to_string(),
        octahedra: oct.to_string(),
        holds: octahedra_lower_bound_holds(&oct, &assoc, op.n()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn distances() {
        let p = Rotation::from_axis_angle([1.0, 2.0, 3.0], 0.7);
        assert_eq!(rotation_distance(&p, &p), 0.0);
        let z = Rotation::from_axis_angle([0.0, 0.0, 1.0], PI);
        assert!((rotation_distance(&Rotation::IDENTITY, &z) - PI).abs() < 1e-9);
        let neg = Rotation::new(p.quaternion().map(|v| -v));
        assert!(rotation_distance(&p, &neg) < 1e-6);
    }

    #[test]
    fn bi_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let (p, q, r) = (Rotation::random(&mut rng), Rotation::random(&mut rng), Rotation::random(&mut rng));
            let d = rotation_distance(&p, &q);
            assert!((rotation_distance(&r.mul(&p), &r.mul(&q)) - d).abs() <= 1e-6);
            assert!((rotation_distance(&p.mul(&r), &q.mul(&r)) - d).abs() <= 1e-6);
            let m = p.mul(&q).quaternion();
            assert!((dot(&m, &m).sqrt() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn tiny_and_identity_nets() {
        let big = build_net(3.1, 1, 10_000).unwrap();
        assert!(!big.is_empty() && big.len() <= 4);
        let id = RotationNet::from_points(3.0, vec![Rotation::IDENTITY]).unwrap();
        let op = fuzzy_op(&id, 0.4).unwrap();
        assert_eq!(op.get(0, 0), Some(0));
        assert_eq!(verify_density(&id, 0.4).check.measured, 1.0);
        let c = verify_products(&id, 0.4, 0.5, 0).unwrap();
        assert!(c.checks.iter().all(|c| c.pass));
        assert!(fuzzy_op(&id, 0.5).is_err());
    }

    #[test]
    fn net_is_separated_and_reproducible() {
        let a = build_net(1.0, 7, 10_000).unwrap();
        let b = build_net(1.0, 7, 10_000).unwrap();
        assert_eq!(a, b);
        assert!(a.rejections >= 10_000);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                assert!(rotation_distance(&a.points[i], &a.points[j]) >= 1.0);
            }
        }
        let back = RotationNet::from_json(&a.to_json()).unwrap();
        assert_eq!(back.len(), a.len());
        assert!(fuzzy_op(&a, 0.4).unwrap().validate().ok);
        assert!(octahedron_chain(&a, 0.4).unwrap().holds);
    }
}
