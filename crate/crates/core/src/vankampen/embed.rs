//! Slit octahedron scan and the generator embedding report.

use serde::{Deserialize, Serialize};

use super::search::{Certificate, SearchLimits, Status, VkSearch};
use super::{build_presentation, VKPresentation};
use crate::error::Result;
use crate::par;
use crate::pls::{PartialLatinSquare, Triple};
use crate::quadrangle::{check_quadrangle, QcKind};

/// Two generators of one class joined by a slit octahedron: eight triples
/// forming two rectangles that agree everywhere except at one corner.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlitWitness {
    pub class: usize,
    pub pair: (u32, u32),
    pub cells: [Triple; 8],
}

fn kind_for_class(class: usize) -> QcKind {
    match class {
        0 => QcKind::Column,
        1 => QcKind::Row,
        _ => QcKind::Label,
    }
}

/// One witness per distinct pair of generators in `class`.
pub fn slit_scan_class(pls: &PartialLatinSquare, class: usize) -> Vec<SlitWitness> {
    let mut out: Vec<SlitWitness> = Vec::new();
    for v in check_quadrangle(pls, kind_for_class(class)) {
        if out.iter().any(|w| w.pair == v.mismatch) {
            continue;
        }
        out.push(SlitWitness {
            class,
            pair: v.mismatch,
            cells: v.cells,
        });
    }
    out.sort();
    out
}

/// Label pairs.
pub fn slit_scan(pls: &PartialLatinSquare) -> Vec<SlitWitness> {
    slit_scan_class(pls, 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCertificate {
    pub triple: Triple,
    /// `x y` and `z` rendered with the instance's names.
    pub lhs: String,
    pub rhs: String,
    pub area: usize,
    pub scaled: f64,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub class: usize,
    pub first: String,
    pub second: String,
    pub status: Status,
    pub area: Option<usize>,
    pub scaled: Option<f64>,
    pub complete: bool,
    pub states: u64,
    pub note: Option<String>,
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub area_budget: usize,
    /// `None` means each search used `|w1| + |w2| + 3b`.
    pub length_cap: Option<usize>,
    pub max_states: u64,
    /// Distances are reported as area times this factor.
    pub scale: f64,
    /// Generator images of the three classes, in index order.
    pub phi: Vec<String>,
    pub psi: Vec<String>,
    pub omega: Vec<String>,
    pub triples: Vec<TripleCertificate>,
    pub pairs: Vec<PairEntry>,
    /// Same-class pairs joined by a diagram of area below the budget.
    pub offending: Vec<(usize, String, String)>,
    /// No offending pair was found.
    pub certified: bool,
    /// Every unproven pair was settled without hitting the state limit.
    pub complete: bool,
    pub slit: Vec<SlitWitness>,
}

fn names(pres: &VKPresentation, class: usize) -> Vec<String> {
    (0..pres.dims[class] as u32)
        .map(|i| pres.name(pres.generator(class, i)))
        .collect()
}

pub fn emit_embedding(
    pls: &PartialLatinSquare,
    area_budget: usize,
    length_cap: Option<usize>,
    max_states: u64,
) -> Result<EmbeddingReport> {
    let pres = build_presentation(pls);
    let search = VkSearch::new(&pres);
    let scale = if area_budget == 0 { 1.0 } else { 1.0 / area_budget as f64 };

    let mut triples = Vec::with_capacity(pls.len());
    for t in pls.triples() {
        let lhs = [pres.letter(0, t[0]), pres.letter(1, t[1])];
        let rhs = [pres.letter(2, t[2])];
        let r = search.distance(&lhs, &rhs, SearchLimits::new(1))?;
        let certificate = r.certificate.expect("every relator is a single face");
        triples.push(TripleCertificate {
            triple: *t,
            lhs: pres.format_word(&lhs),
            rhs: pres.format_word(&rhs),
            area: certificate.steps.len(),
            scaled: certificate.steps.len() as f64 * scale,
            certificate,
        });
    }

    let jobs: Vec<(usize, u32, u32)> = (0..3)
        .flat_map(|c| {
            let n = pres.dims[c] as u32;
            (0..n).flat_map(move |i| (i + 1..n).map(move |j| (c, i, j)))
        })
        .collect();
    let limits = SearchLimits {
        area_budget,
        length_cap,
        max_states,
    };
    let results = par::map_range(jobs.len(), |k| {
        let (c, i, j) = jobs[k];
        search.distance(&[pres.letter(c, i)], &[pres.letter(c, j)], limits)
    });
    let mut pairs = Vec::with_capacity(jobs.len());
    for (&(c, i, j), r) in jobs.iter().zip(results) {
        let r = r?;
        pairs.push(PairEntry {
            class: c,
            first: pres.name(pres.generator(c, i)),
            second: pres.name(pres.generator(c, j)),
            status: r.status,
            area: r.area,
            scaled: r.area.map(|a| a as f64 * scale),
            complete: r.complete,
            states: r.states,
            note: r.note,
            certificate: r.certificate,
        });
    }
    let offending: Vec<(usize, String, String)> = pairs
        .iter()
        .filter(|p| p.area.is_some_and(|a| a < area_budget))
        .map(|p| (p.class, p.first.clone(), p.second.clone()))
        .collect();
    let complete = pairs
        .iter()
        .all(|p| p.status == Status::ProvenAtMost || p.complete);
    let slit = (0..3).flat_map(|c| slit_scan_class(pls, c)).collect();
    Ok(EmbeddingReport {
        area_budget,
        length_cap,
        max_states,
        scale,
        phi: names(&pres, 0),
        psi: names(&pres, 1),
        omega: names(&pres, 2),
        triples,
        pairs,
        certified: offending.is_empty(),
        offending,
        complete,
        slit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{cyclic, fig1};

    #[test]
    fn fig1_has_one_slit_pair() {
        let w = slit_scan(&fig1());
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].pair, (3, 4));
        assert!(slit_scan_class(&fig1(), 0).is_empty());
        assert!(slit_scan(&cyclic(5)).is_empty());
    }

    #[test]
    fn cyclic_group_is_certified() {
        let r = emit_embedding(&cyclic(4), 12, None, 100_000).unwrap();
        assert!(r.certified && r.complete);
        assert_eq!(r.triples.len(), 16);
        assert!(r.triples.iter().all(|t| t.area == 1));
        assert_eq!(r.pairs.len(), 18);
    }
}
