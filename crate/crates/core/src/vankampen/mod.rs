//! Presentations with one triangular relator `x y z^-1` per triple, word
//! search for small diagrams, and the resulting metric embedding report.

mod embed;
mod lattice;
mod search;

pub use embed::{
    emit_embedding, slit_scan, slit_scan_class, EmbeddingReport, PairEntry, SlitWitness,
    TripleCertificate,
};
pub use lattice::Lattice;
pub use search::{
    replay, vk_distance, vk_distance_with, Certificate, DistanceResult, SearchLimits, Status, Step,
    VkSearch,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pls::PartialLatinSquare;

/// A signed generator: `+(g + 1)` or `-(g + 1)` for global generator `g`.
pub type Letter = i32;

/// Generators are numbered columns first, then rows, then labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VKPresentation {
    pub dims: [usize; 3],
    pub relators: Vec<[Letter; 3]>,
    #[serde(skip)]
    names: Option<[Vec<String>; 3]>,
}

impl VKPresentation {
    pub fn generators(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn generator(&self, class: usize, i: u32) -> usize {
        self.dims[..class].iter().sum::<usize>() + i as usize
    }

    /// `(class, index)` of a global generator.
    pub fn locate(&self, g: usize) -> (usize, u32) {
        let mut g = g;
        for c in 0..3 {
            if g < self.dims[c] {
                return (c, g as u32);
            }
            g -= self.dims[c];
        }
        panic!("generator out of range")
    }

    pub fn letter(&self, class: usize, i: u32) -> Letter {
        self.generator(class, i) as Letter + 1
    }

    pub fn class_of(&self, l: Letter) -> usize {
        self.locate(l.unsigned_abs() as usize - 1).0
    }

    pub fn name(&self, g: usize) -> String {
        let (c, i) = self.locate(g);
        match &self.names {
            Some(n) => n[c][i as usize].clone(),
            None => format!("{}{}", ["x", "y", "z"][c], i),
        }
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&l| {
                let n = self.name(l.unsigned_abs() as usize - 1);
                if l < 0 {
                    format!("{}^-1", n)
                } else {
                    n
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parse generator names separated by spaces, `*` or `.`; `^-1` inverts.
    /// Accepts the instance's names and the generic `x3`, `y0`, `z2` forms.
    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*' || c == '.') {
            if tok.is_empty() || tok == "1" {
                continue;
            }
            let (base, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let g = self
                .lookup(base)
                .ok_or_else(|| Error::input(format!("unknown generator '{}'", base)))?;
            let l = g as Letter + 1;
            out.push(if inv { -l } else { l });
        }
        Ok(free_reduce(&out))
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        if let Some(n) = &self.names {
            for c in 0..3 {
                if let Some(i) = n[c].iter().position(|s| s == name) {
                    return Some(self.generator(c, i as u32));
                }
            }
        }
        let class = match name.chars().next()? {
            'x' => 0,
            'y' => 1,
            'z' => 2,
            _ => return None,
        };
        let i: u32 = name[1..].parse().ok()?;
        ((i as usize) < self.dims[class]).then(|| self.generator(class, i))
    }
}

/// One relator per triple.
pub fn build_presentation(pls: &PartialLatinSquare) -> VKPresentation {
    let dims = pls.dims();
    let mut p = VKPresentation {
        dims,
        relators: Vec::with_capacity(pls.len()),
        names: pls.names().map(|n| [n.x.clone(), n.y.clone(), n.z.clone()]),
    };
    for t in pls.triples() {
        let r = [p.letter(0, t[0]), p.letter(1, t[1]), -p.letter(2, t[2])];
        p.relators.push(r);
    }
    p
}

pub fn inverse(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| -l).collect()
}

pub fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Freely and cyclically reduced form.
pub fn cyclic_reduce(w: &[Letter]) -> Vec<Letter> {
    let r = free_reduce(w);
    let (mut i, mut j) = (0, r.len());
    while j - i >= 2 && r[i] == -r[j - 1] {
        i += 1;
        j -= 1;
    }
    r[i..j].to_vec()
}

/// Smallest rotation of the word or its inverse; equal for conjugate or
/// inverse cyclic words.
pub fn canonical(c: &[Letter]) -> Vec<Letter> {
    let mut best: Option<Vec<Letter>> = None;
    for w in [c.to_vec(), inverse(c)] {
        for k in 0..w.len().max(1) {
            let mut rot = w.clone();
            rot.rotate_left(k.min(w.len()));
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Image in the free group on two letters under `x -> a`, `y -> b`,
/// `z -> ab`, which kills every relator.
pub fn class_image(pres: &VKPresentation, w: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &l in w {
        let img: &[Letter] = match (pres.class_of(l), l > 0) {
            (0, true) => &[1],
            (0, false) => &[-1],
            (1, true) => &[2],
            (1, false) => &[-2],
            (_, true) => &[1, 2],
            (_, false) => &[-2, -1],
        };
        out.extend_from_slice(img);
    }
    free_reduce(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{cyclic, fig1};

    #[test]
    fn relators_follow_triples() {
        assert_eq!(build_presentation(&cyclic(2)).relators.len(), 4);
        let e = PartialLatinSquare::empty([2, 2, 2]);
        assert!(build_presentation(&e).relators.is_empty());
    }

    #[test]
    fn words_parse_and_print() {
        let p = build_presentation(&fig1());
        let w = p.parse_word("x1 * y2^-1.d2").unwrap();
        assert_eq!(p.format_word(&w), "x1 y2^-1 d2");
        assert!(p.parse_word("q").is_err());
        let g = build_presentation(&cyclic(3));
        assert_eq!(g.parse_word("x1 x1^-1").unwrap(), Vec::<Letter>::new());
        assert_eq!(g.format_word(&g.parse_word("z2^-1").unwrap()), "z2^-1");
    }

    #[test]
    fn canonical_identifies_conjugates_and_inverses() {
        let w = vec![1, 2, -3];
        let mut rot = w.clone();
        rot.rotate_left(1);
        assert_eq!(canonical(&w), canonical(&rot));
        assert_eq!(canonical(&w), canonical(&inverse(&w)));
        assert_eq!(cyclic_reduce(&[1, 2, -1]), vec![2]);
    }
}
