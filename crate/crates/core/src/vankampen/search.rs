//! Budgeted search for small diagrams between two words.
//!
//! The state is the cyclic word `w1 w2^-1`. A move removes one face: a
//! cyclic subword `s` of length 1 to 3 is replaced by `t` where `s t^-1` is a
//! rotation of a relator or its inverse, followed by cyclic reduction. Every
//! diagram with positive area has a face with an edge on the boundary, so
//! single-letter moves already reach every diagram; longer `s` shortcuts the
//! same faces. The search is IDA* on the number of faces.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use super::{canonical, class_image, cyclic_reduce, free_reduce, inverse, Letter, VKPresentation};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ExactZero,
    ProvenAtMost,
    NotFoundWithinBudget,
    ClassSeparatedInfinite,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ExactZero => "exact-zero",
            Status::ProvenAtMost => "proven-at-most",
            Status::NotFoundWithinBudget => "not-found-within-budget",
            Status::ClassSeparatedInfinite => "class-separated-infinite",
        }
    }
}

/// One face removal: rotate the current word left by `position`, replace
/// the first `removed` letters using the relator (inverted if `inverse`),
/// and cyclically reduce to obtain `word`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub relator: usize,
    pub inverse: bool,
    pub position: usize,
    pub removed: usize,
    pub word: Vec<Letter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Cyclic reduction of `w1 w2^-1`.
    pub start: Vec<Letter>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub status: Status,
    pub area: Option<usize>,
    pub certificate: Option<Certificate>,
    pub area_budget: usize,
    pub length_cap: usize,
    /// The search space at this resolution was exhausted (or a proof of
    /// inequality was found) rather than cut off by the state limit.
    pub complete: bool,
    pub states: u64,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub area_budget: usize,
    /// Defaults to `|w1| + |w2| + 3 * area_budget`.
    pub length_cap: Option<usize>,
    pub max_states: u64,
}

impl SearchLimits {
    pub fn new(area_budget: usize) -> Self {
        SearchLimits {
            area_budget,
            length_cap: None,
            max_states: 2_000_000,
        }
    }
}

struct Move {
    relator: usize,
    inverse: bool,
    replacement: Vec<Letter>,
}

/// Precomputed move table and relator lattice for one presentation.
pub struct VkSearch<'a> {
    pres: &'a VKPresentation,
    moves: HashMap<Vec<Letter>, Vec<Move>>,
    rows: Vec<Vec<i64>>,
    lattice: Option<Lattice>,
}

fn abelianise(w: &[Letter], gens: usize) -> Vec<i64> {
    let mut v = vec![0i64; gens];
    for &l in w {
        v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
    }
    v
}

fn relator_word(pres: &VKPresentation, t: usize, inv: bool) -> Vec<Letter> {
    let r = pres.relators[t].to_vec();
    if inv {
        inverse(&r)
    } else {
        r
    }
}

impl<'a> VkSearch<'a> {
    pub fn new(pres: &'a VKPresentation) -> Self {
        let mut moves: HashMap<Vec<Letter>, Vec<Move>> = HashMap::new();
        for t in 0..pres.relators.len() {
            for inv in [false, true] {
                let w = relator_word(pres, t, inv);
                for rot in 0..3 {
                    let mut r = w.clone();
                    r.rotate_left(rot);
                    for k in 1..=3 {
                        moves.entry(r[..k].to_vec()).or_default().push(Move {
                            relator: t,
                            inverse: inv,
                            replacement: inverse(&r[k..]),
                        });
                    }
                }
            }
        }
        let gens = pres.generators();
        let rows: Vec<Vec<i64>> = (0..pres.relators.len())
            .map(|t| abelianise(&pres.relators[t], gens))
            .collect();
        let lattice = Lattice::new(&rows, gens);
        VkSearch {
            pres,
            moves,
            rows,
            lattice,
        }
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn distance(
        &self,
        w1: &[Letter],
        w2: &[Letter],
        limits: SearchLimits,
    ) -> Result<DistanceResult> {
        let w1 = free_reduce(w1);
        let w2 = free_reduce(w2);
        let cap = limits
            .length_cap
            .unwrap_or(w1.len() + w2.len() + 3 * limits.area_budget);
        if cap < w1.len() + w2.len() {
            return Err(Error::input(format!(
                "length cap {} is below |w1| + |w2| = {}",
                cap,
                w1.len() + w2.len()
            )));
        }
        let gens = self.pres.generators();
        if w1.iter().chain(&w2).any(|l| l.unsigned_abs() as usize > gens || *l == 0) {
            return Err(Error::input("word uses a letter outside the presentation"));
        }
        let mut res = DistanceResult {
            status: Status::NotFoundWithinBudget,
            area: None,
            certificate: None,
            area_budget: limits.area_budget,
            length_cap: cap,
            complete: true,
            states: 0,
            note: None,
        };
        if w1 == w2 {
            res.status = Status::ExactZero;
            res.area = Some(0);
            res.certificate = Some(Certificate {
                start: vec![],
                steps: vec![],
            });
            return Ok(res);
        }
        if class_image(self.pres, &w1) != class_image(self.pres, &w2) {
            res.status = Status::ClassSeparatedInfinite;
            res.note = Some("class images differ".into());
            return Ok(res);
        }
        let mut joined = w1.clone();
        joined.extend(inverse(&w2));
        let start = cyclic_reduce(&joined);
        let ab = abelianise(&start, gens);
        if let Some(l) = &self.lattice {
            if !l.contains(&ab) {
                res.note = Some(
                    "abelian obstruction: the words differ in the abelianised group, \
                     so no diagram of any area exists"
                        .into(),
                );
                return Ok(res);
            }
        }
        let heur = match self.lattice.as_ref().filter(|l| l.full_rank()) {
            Some(l) => Heur::exact(l.row_coefficients(&ab).expect("member")),
            None => Heur::classes(ab, self.pres),
        };
        let mut ida = Ida {
            s: self,
            heur,
            cap,
            max_states: limits.max_states,
            states: 0,
            tt: HashMap::new(),
            path: Vec::new(),
        };
        let outcome = ida.run(start.clone(), limits.area_budget);
        res.states = ida.states;
        match outcome {
            Outcome::Found => {
                res.status = Status::ProvenAtMost;
                res.area = Some(ida.path.len());
                res.certificate = Some(Certificate {
                    start,
                    steps: ida.path,
                });
            }
            Outcome::Exhausted => {
                res.note = Some(format!(
                    "no diagram of area <= {} with intermediate words of length <= {}",
                    limits.area_budget, cap
                ));
            }
            Outcome::Aborted => {
                res.complete = false;
                res.note = Some(format!("state limit {} reached", limits.max_states));
            }
        }
        Ok(res)
    }
}

/// Admissible lower bound on the number of faces still to remove.
enum Heur {
    /// Unique relator coefficients of the abelianised word.
    Exact { k: Vec<i64>, l1: i64 },
    /// Abelianised word and its per-class L1 norms.
    Classes { ab: Vec<i64>, sums: [i64; 3], class: Vec<usize> },
}

impl Heur {
    fn exact(k: Vec<i64>) -> Heur {
        let l1 = k.iter().map(|v| v.abs()).sum();
        Heur::Exact { k, l1 }
    }

    fn classes(ab: Vec<i64>, pres: &VKPresentation) -> Heur {
        let class: Vec<usize> = (0..ab.len()).map(|g| pres.locate(g).0).collect();
        let mut sums = [0i64; 3];
        for (g, v) in ab.iter().enumerate() {
            sums[class[g]] += v.abs();
        }
        Heur::Classes { ab, sums, class }
    }

    fn value(&self, len: usize) -> usize {
        let (h, parity) = match self {
            Heur::Exact { l1, .. } => (*l1, *l1),
            Heur::Classes { sums, .. } => (sums.iter().copied().max().unwrap_or(0), sums[0]),
        };
        let h = (h as usize).max(len.div_ceil(3));
        // Each face changes the column exponent sum by one.
        if (h as i64 - parity).rem_euclid(2) == 1 {
            h + 1
        } else {
            h
        }
    }

    /// Apply `ab -= sign * rows[t]`.
    fn apply(&mut self, t: usize, sign: i64, rows: &[Vec<i64>]) {
        match self {
            Heur::Exact { k, l1 } => {
                *l1 -= k[t].abs();
                k[t] -= sign;
                *l1 += k[t].abs();
            }
            Heur::Classes { ab, sums, class } => {
                for (g, &v) in rows[t].iter().enumerate() {
                    if v != 0 {
                        sums[class[g]] -= ab[g].abs();
                        ab[g] -= sign * v;
                        sums[class[g]] += ab[g].abs();
                    }
                }
            }
        }
    }
}

enum Outcome {
    Found,
    Exhausted,
    Aborted,
}

enum Dfs {
    Found,
    Over(usize),
    Aborted,
}

struct Ida<'s, 'a> {
    s: &'s VkSearch<'a>,
    heur: Heur,
    cap: usize,
    max_states: u64,
    states: u64,
    tt: HashMap<Vec<Letter>, usize>,
    path: Vec<Step>,
}

impl Ida<'_, '_> {
    fn run(&mut self, start: Vec<Letter>, budget: usize) -> Outcome {
        let mut bound = self.heur.value(start.len());
        loop {
            if bound > budget {
                return Outcome::Exhausted;
            }
            self.tt.clear();
            match self.dfs(&start, 0, bound) {
                Dfs::Found => return Outcome::Found,
                Dfs::Aborted => return Outcome::Aborted,
                Dfs::Over(usize::MAX) => return Outcome::Exhausted,
                Dfs::Over(next) => bound = next,
            }
        }
    }

    fn dfs(&mut self, c: &[Letter], g: usize, bound: usize) -> Dfs {
        if c.is_empty() {
            return Dfs::Found;
        }
        let f = g + self.heur.value(c.len());
        if f > bound {
            return Dfs::Over(f);
        }
        let key = canonical(c);
        if self.tt.get(&key).is_some_and(|&seen| seen <= g) {
            return Dfs::Over(usize::MAX);
        }
        self.tt.insert(key, g);
        self.states += 1;
        if self.states > self.max_states {
            return Dfs::Aborted;
        }
        let len = c.len();
        let mut next_bound = usize::MAX;
        for p in 0..len {
            let mut rot = c.to_vec();
            rot.rotate_left(p);
            for k in 1..=len.min(3) {
                let Some(moves) = self.s.moves.get(&rot[..k]) else { continue };
                for m in moves {
                    let mut w = m.replacement.clone();
                    w.extend_from_slice(&rot[k..]);
                    let w = cyclic_reduce(&w);
                    if w.len() > self.cap {
                        continue;
                    }
                    let sign = if m.inverse { -1 } else { 1 };
                    self.heur.apply(m.relator, sign, &self.s.rows);
                    self.path.push(Step {
                        relator: m.relator,
                        inverse: m.inverse,
                        position: p,
                        removed: k,
                        word: w.clone(),
                    });
                    let r = self.dfs(&w, g + 1, bound);
                    match r {
                        Dfs::Found => return Dfs::Found,
                        Dfs::Aborted => {
                            self.heur.apply(m.relator, -sign, &self.s.rows);
                            return Dfs::Aborted;
                        }
                        Dfs::Over(b) => next_bound = next_bound.min(b),
                    }
                    self.path.pop();
                    self.heur.apply(m.relator, -sign, &self.s.rows);
                }
            }
        }
        Dfs::Over(next_bound)
    }
}

pub fn vk_distance_with(
    pres: &VKPresentation,
    w1: &[Letter],
    w2: &[Letter],
    limits: SearchLimits,
) -> Result<DistanceResult> {
    VkSearch::new(pres).distance(w1, w2, limits)
}

/// Search with the default state limit and length cap `|w1| + |w2| + 3b`
/// unless `cap` is given.
pub fn vk_distance(
    pres: &VKPresentation,
    w1: &[Letter],
    w2: &[Letter],
    area_budget: usize,
    cap: Option<usize>,
) -> Result<DistanceResult> {
    let mut l = SearchLimits::new(area_budget);
    l.length_cap = cap;
    vk_distance_with(pres, w1, w2, l)
}

/// Re-derive every step of a certificate; returns its area.
pub fn replay(
    pres: &VKPresentation,
    w1: &[Letter],
    w2: &[Letter],
    cert: &Certificate,
) -> Result<usize> {
    let fail = |m: String| Err(Error::Verification(format!("certificate replay: {}", m)));
    let mut joined = free_reduce(w1);
    joined.extend(inverse(&free_reduce(w2)));
    let start = cyclic_reduce(&joined);
    if start != cert.start {
        return fail("start word is not the reduction of w1 w2^-1".into());
    }
    let mut cur = start;
    for (i, st) in cert.steps.iter().enumerate() {
        if st.relator >= pres.relators.len() || cur.is_empty() {
            return fail(format!("step {} is out of range", i));
        }
        if st.position >= cur.len() || st.removed == 0 || st.removed > cur.len().min(3) {
            return fail(format!("step {} has an invalid position", i));
        }
        let mut rot = cur.clone();
        rot.rotate_left(st.position);
        let s = &rot[..st.removed];
        let rel = relator_word(pres, st.relator, st.inverse);
        let rotation = (0..3).find_map(|k| {
            let mut r = rel.clone();
            r.rotate_left(k);
            (r[..st.removed] == *s).then_some(r)
        });
        let Some(r) = rotation else {
            return fail(format!("step {} removes a subword that is not on the relator", i));
        };
        let mut next = inverse(&r[st.removed..]);
        next.extend_from_slice(&rot[st.removed..]);
        let next = cyclic_reduce(&next);
        if next != st.word {
            return fail(format!("step {} does not produce the recorded word", i));
        }
        cur = next;
    }
    if !cur.is_empty() {
        return fail("final word is not trivial".into());
    }
    Ok(cert.steps.len())
}
