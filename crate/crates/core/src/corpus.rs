//! Named instances used by tests, benches and `plslab gen --corpus`.

use crate::error::Result;
use crate::pls::{GenSpec, PartialLatinSquare};

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub spec: GenSpec,
}

impl Entry {
    pub fn generate(&self) -> Result<PartialLatinSquare> {
        self.spec.generate()
    }
}

const SPECS: &[&str] = &[
    "fig1",
    "cyclic:2",
    "cyclic:3",
    "cyclic:4",
    "cyclic:5",
    "cyclic:6",
    "cyclic:7",
    "cyclic:8",
    "product:2x2",
    "product:2x4",
    "product:3x3",
    "relabel:3:cyclic:6",
    "quasigroup:5:1",
    "quasigroup:6:2",
    "quasigroup:7:3",
    "restrict:0.5:1:cyclic:8",
    "restrict:0.7:2:cyclic:8",
    "restrict:0.8:3:product:2x4",
    "restrict:0.6:4:quasigroup:7:3",
];

/// The fixed corpus, in a stable order.
pub fn entries() -> Vec<Entry> {
    SPECS
        .iter()
        .map(|s| Entry {
            name: s.replace(':', "-"),
            spec: s.parse().expect("corpus specs parse"),
        })
        .collect()
}

pub fn find(name: &str) -> Option<Entry> {
    entries().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_generates() {
        for e in entries() {
            let p = e.generate().unwrap();
            assert!(!p.is_empty(), "{}", e.name);
        }
        assert!(find("cyclic-5").is_some());
    }
}
