//! Triangulated discs over the three-class complex and their copy counts.
//!
//! Vertices have one of three types `u, v, w`; an `X` edge runs `u -> v`, a
//! `Y` edge `v -> w` and a `Z` edge `u -> w`. Every face is a triangle with
//! one edge of each class, so a copy of the disc in a square assigns a
//! column to each `X` edge, a row to each `Y` edge and a label to each `Z`
//! edge such that every face becomes a triple.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Count;
use crate::pls::PartialLatinSquare;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    U,
    V,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    X,
    Y,
    Z,
}

impl EdgeClass {
    /// Coordinate of a triple carried by edges of this class.
    pub fn coord(self) -> usize {
        match self {
            EdgeClass::X => 0,
            EdgeClass::Y => 1,
            EdgeClass::Z => 2,
        }
    }

    fn ends(self) -> (VertexType, VertexType) {
        match self {
            EdgeClass::X => (VertexType::U, VertexType::V),
            EdgeClass::Y => (VertexType::V, VertexType::W),
            EdgeClass::Z => (VertexType::U, VertexType::W),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub class: EdgeClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractDisc {
    pub vertices: Vec<VertexType>,
    pub edges: Vec<Edge>,
    /// Edge indices `[x, y, z]` of each face.
    pub faces: Vec<[usize; 3]>,
    pub fixed: Vec<bool>,
}

#[derive(Default)]
struct Builder {
    vertices: Vec<VertexType>,
    edges: Vec<Edge>,
    index: HashMap<(usize, usize), Vec<usize>>,
    faces: Vec<[usize; 3]>,
}

impl Builder {
    fn vertex(&mut self, t: VertexType) -> usize {
        self.vertices.push(t);
        self.vertices.len() - 1
    }

    fn class_of(&self, a: usize, b: usize) -> (EdgeClass, usize, usize) {
        use VertexType::*;
        match (self.vertices[a], self.vertices[b]) {
            (U, V) => (EdgeClass::X, a, b),
            (V, U) => (EdgeClass::X, b, a),
            (V, W) => (EdgeClass::Y, a, b),
            (W, V) => (EdgeClass::Y, b, a),
            (U, W) => (EdgeClass::Z, a, b),
            (W, U) => (EdgeClass::Z, b, a),
            (s, t) => panic!("no edge class joins {:?} and {:?}", s, t),
        }
    }

    /// A fresh edge, even if one already joins the same pair.
    fn new_edge(&mut self, a: usize, b: usize) -> usize {
        let (class, from, to) = self.class_of(a, b);
        self.edges.push(Edge { from, to, class });
        let id = self.edges.len() - 1;
        self.index.entry((from.min(to), from.max(to))).or_default().push(id);
        id
    }

    fn edge(&mut self, a: usize, b: usize) -> usize {
        match self.index.get(&(a.min(b), a.max(b))) {
            Some(ids) => ids[0],
            None => self.new_edge(a, b),
        }
    }

    /// Face on three vertices of distinct types, with an optional explicit edge.
    fn face(&mut self, a: usize, b: usize, c: usize, explicit: Option<usize>) {
        let mut ids = [usize::MAX; 3];
        let mut pairs = vec![(a, b), (b, c), (a, c)];
        if let Some(e) = explicit {
            let Edge { from, to, class } = self.edges[e];
            ids[class.coord()] = e;
            pairs.retain(|&(p, q)| (p.min(q), p.max(q)) != (from.min(to), from.max(to)));
        }
        for (p, q) in pairs {
            let e = self.edge(p, q);
            ids[self.edges[e].class.coord()] = e;
        }
        self.faces.push(ids);
    }

    fn finish(self, fixed_boundary: bool) -> AbstractDisc {
        let mut d = AbstractDisc {
            fixed: vec![false; self.edges.len()],
            vertices: self.vertices,
            edges: self.edges,
            faces: self.faces,
        };
        if fixed_boundary {
            for e in d.boundary_edges() {
                d.fixed[e] = true;
            }
        }
        d
    }
}

impl AbstractDisc {
    /// `2r` faces around a `v` centre; the boundary is `2r` label edges whose
    /// faces share columns and rows alternately, i.e. a label cycle.
    pub fn polygon(r: usize) -> AbstractDisc {
        assert!(r >= 1);
        let mut b = Builder::default();
        let c = b.vertex(VertexType::V);
        let ring: Vec<usize> = (0..2 * r)
            .map(|j| b.vertex(if j % 2 == 0 { VertexType::U } else { VertexType::W }))
            .collect();
        for j in 0..2 * r {
            b.face(ring[j], c, ring[(j + 1) % (2 * r)], None);
        }
        b.finish(true)
    }

    /// The disc of a dispersed ring decomposition: an outer `2r`-gon, an inner
    /// `2r`-gon of opposite vertex types joined by `2r` radial label edges, a
    /// centre inside the inner ring, and a centre in each of the `2r` quads.
    pub fn dispersed_ring(r: usize) -> AbstractDisc {
        assert!(r >= 1);
        let m = 2 * r;
        let mut b = Builder::default();
        let outer: Vec<usize> = (0..m)
            .map(|j| b.vertex(if j % 2 == 0 { VertexType::U } else { VertexType::W }))
            .collect();
        let inner: Vec<usize> = (0..m)
            .map(|j| b.vertex(if j % 2 == 0 { VertexType::W } else { VertexType::U }))
            .collect();
        let centre = b.vertex(VertexType::V);
        for j in 0..m {
            let k = (j + 1) % m;
            let q = b.vertex(VertexType::V);
            b.face(outer[j], q, outer[k], None);
            b.face(outer[k], q, inner[k], None);
            b.face(inner[k], q, inner[j], None);
            b.face(inner[j], q, outer[j], None);
        }
        for j in 0..m {
            b.face(inner[j], centre, inner[(j + 1) % m], None);
        }
        b.finish(true)
    }

    /// The octahedron cut open along one label edge; its boundary is the two
    /// copies of that edge.
    pub fn slit_octahedron() -> AbstractDisc {
        let mut b = Builder::default();
        let u = [b.vertex(VertexType::U), b.vertex(VertexType::U)];
        let v = [b.vertex(VertexType::V), b.vertex(VertexType::V)];
        let w = [b.vertex(VertexType::W), b.vertex(VertexType::W)];
        let slit = b.edge(u[0], w[0]);
        let twin = b.new_edge(u[0], w[0]);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let explicit = match (i, j, k) {
                        (0, 0, 0) => Some(slit),
                        (0, 1, 0) => Some(twin),
                        _ => None,
                    };
                    b.face(u[i], v[j], w[k], explicit);
                }
            }
        }
        b.finish(true)
    }

    pub fn single_face() -> AbstractDisc {
        let mut b = Builder::default();
        let (u, v, w) = (
            b.vertex(VertexType::U),
            b.vertex(VertexType::V),
            b.vertex(VertexType::W),
        );
        b.face(u, v, w, None);
        b.finish(true)
    }

    fn face_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.edges.len()];
        for f in &self.faces {
            for &e in f {
                c[e] += 1;
            }
        }
        c
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        self.face_counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.boundary_edges()
            .into_iter()
            .flat_map(|e| [self.edges[e].from, self.edges[e].to])
            .collect()
    }

    pub fn internal_vertices(&self) -> usize {
        self.vertices.len() - self.boundary_vertices().len()
    }

    /// Face typing, edge-face incidence at most two, Euler characteristic
    /// one, face connectivity and a single boundary cycle.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::input(format!("not a disc: {}", m)));
        if self.fixed.len() != self.edges.len() {
            return bad("fixed mask has the wrong length".into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (s, t) = e.class.ends();
            if self.vertices.get(e.from) != Some(&s) || self.vertices.get(e.to) != Some(&t) {
                return bad(format!("edge {} has the wrong endpoint types", i));
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            let [x, y, z] = f.map(|e| self.edges[e]);
            if x.class != EdgeClass::X || y.class != EdgeClass::Y || z.class != EdgeClass::Z {
                return bad(format!("face {} does not have one edge per class", i));
            }
            if x.from != z.from || x.to != y.from || y.to != z.to {
                return bad(format!("face {} edges do not form a triangle", i));
            }
        }
        let counts = self.face_counts();
        if let Some(e) = counts.iter().position(|&c| c == 0 || c > 2) {
            return bad(format!("edge {} lies in {} faces", e, counts[e]));
        }
        let (v, e, f) = (
            self.vertices.len() as i64,
            self.edges.len() as i64,
            self.faces.len() as i64,
        );
        if v - e + f != 1 {
            return bad(format!("V - E + F = {}", v - e + f));
        }
        // Faces connected through shared edges.
        let mut by_edge: Vec<Vec<usize>> = vec![Vec::new(); self.edges.len()];
        for (i, fc) in self.faces.iter().enumerate() {
            for &e in fc {
                by_edge[e].push(i);
            }
        }
        let mut seen = vec![false; self.faces.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &e in &self.faces[i] {
                for &j in &by_edge[e] {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("faces are not connected".into());
        }
        // Boundary: every boundary vertex has boundary degree two, one component.
        let boundary = self.boundary_edges();
        let mut deg: HashMap<usize, Vec<usize>> = HashMap::new();
        for &be in &boundary {
            let Edge { from, to, .. } = self.edges[be];
            deg.entry(from).or_default().push(to);
            deg.entry(to).or_default().push(from);
        }
        if deg.values().any(|n| n.len() != 2) {
            return bad("boundary is not a union of cycles".into());
        }
        let start = *deg.keys().next().expect("a finite disc has a boundary");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &deg[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != deg.len() {
            return bad("boundary has several components".into());
        }
        Ok(())
    }

    /// Copies of the disc in `pls` agreeing with `pinned` on the edges where it
    /// is `Some`. Degenerate copies count.
    pub fn count_copies(
        &self,
        pls: &PartialLatinSquare,
        pinned: &[Option<u32>],
        budget: u64,
    ) -> Result<Count> {
        if pinned.len() != self.edges.len() {
            return Err(Error::input("one pin slot per edge is required"));
        }
        // Faces in an order where each shares an edge with an earlier one.
        let order = self.face_order();
        let mut vals = pinned.to_vec();
        let mut count = 0u128;
        let mut steps = 0u64;
        self.extend(pls, &order, 0, &mut vals, &mut count, &mut steps, budget)?;
        Ok(Count::from(count))
    }

    fn face_order(&self) -> Vec<usize> {
        let mut order = Vec::new();
        let mut used = vec![false; self.faces.len()];
        let mut known = vec![false; self.edges.len()];
        for (e, f) in self.fixed.iter().enumerate() {
            known[e] = *f;
        }
        while order.len() < self.faces.len() {
            let best = (0..self.faces.len())
                .filter(|&i| !used[i])
                .max_by_key(|&i| {
                    let k = self.faces[i].iter().filter(|&&e| known[e]).count();
                    (k, std::cmp::Reverse(i))
                })
                .expect("faces remain");
            used[best] = true;
            for &e in &self.faces[best] {
                known[e] = true;
            }
            order.push(best);
        }
        order
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        pls: &PartialLatinSquare,
        order: &[usize],
        i: usize,
        vals: &mut Vec<Option<u32>>,
        count: &mut u128,
        steps: &mut u64,
        budget: u64,
    ) -> Result<()> {
        *steps += 1;
        if *steps > budget {
            return Err(Error::resource(format!("copy count exceeded {} states", budget)));
        }
        if i == order.len() {
            *count += 1;
            return Ok(());
        }
        let [ex, ey, ez] = self.faces[order[i]];
        let cur = [vals[ex], vals[ey], vals[ez]];
        let candidates: Vec<[u32; 3]> = match cur {
            [Some(x), Some(y), Some(z)] => {
                if pls.label(x, y) == Some(z) {
                    vec![[x, y, z]]
                } else {
                    vec![]
                }
            }
            [Some(x), Some(y), None] => pls.label(x, y).map(|z| [x, y, z]).into_iter().collect(),
            [Some(x), None, Some(z)] => pls.row_of(x, z).map(|y| [x, y, z]).into_iter().collect(),
            [None, Some(y), Some(z)] => pls.col_of(y, z).map(|x| [x, y, z]).into_iter().collect(),
            _ => pls
                .triples()
                .iter()
                .filter(|t| (0..3).all(|c| cur[c].is_none_or(|v| v == t[c])))
                .copied()
                .collect(),
        };
        for t in candidates {
            let saved = cur;
            vals[ex] = Some(t[0]);
            vals[ey] = Some(t[1]);
            vals[ez] = Some(t[2]);
            self.extend(pls, order, i + 1, vals, count, steps, budget)?;
            vals[ex] = saved[0];
            vals[ey] = saved[1];
            vals[ez] = saved[2];
        }
        Ok(())
    }
}

/// `n^{V_I}` and `V_I` for a disc whose boundary is fully fixed.
pub fn trivial_max(disc: &AbstractDisc, n: usize) -> Result<(Count, usize)> {
    disc.validate()?;
    if disc.boundary_edges().iter().any(|&e| !disc.fixed[e]) {
        return Err(Error::input(
            "boundary edges must all be fixed before the trivial maximum applies",
        ));
    }
    let vi = disc.internal_vertices();
    Ok((Count::pow(n as u64, vi as u32), vi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(d: &AbstractDisc) -> (usize, usize, usize, usize) {
        (d.vertices.len(), d.edges.len(), d.faces.len(), d.internal_vertices())
    }

    #[test]
    fn builders_are_discs() {
        for d in [
            AbstractDisc::polygon(2),
            AbstractDisc::polygon(3),
            AbstractDisc::dispersed_ring(2),
            AbstractDisc::dispersed_ring(3),
            AbstractDisc::slit_octahedron(),
            AbstractDisc::single_face(),
        ] {
            d.validate().unwrap();
        }
    }

    #[test]
    fn shapes() {
        assert_eq!(shape(&AbstractDisc::polygon(3)), (7, 12, 6, 1));
        assert_eq!(shape(&AbstractDisc::dispersed_ring(2)), (13, 32, 20, 9));
        assert_eq!(shape(&AbstractDisc::slit_octahedron()), (6, 13, 8, 4));
        assert_eq!(shape(&AbstractDisc::single_face()), (3, 3, 1, 0));
    }

    #[test]
    fn trivial_maxima() {
        assert_eq!(trivial_max(&AbstractDisc::polygon(2), 5).unwrap().0, 5u64);
        assert_eq!(trivial_max(&AbstractDisc::dispersed_ring(2), 3).unwrap().0, 19683u64);
        assert_eq!(trivial_max(&AbstractDisc::single_face(), 7).unwrap().0, 1u64);
        let mut open = AbstractDisc::polygon(2);
        open.fixed = vec![false; open.edges.len()];
        assert!(trivial_max(&open, 3).is_err());
    }
}
