//! Partial Latin squares as linear tripartite triple systems.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(x, y, z)`: column, row, label.
pub type Triple = [u32; 3];

pub(crate) const NONE: u32 = u32::MAX;

/// Optional external names for the coordinates of each class.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Names {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

impl Names {
    pub fn class(&self, c: usize) -> &[String] {
        match c {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }

    fn permuted(&self, p: Perm3) -> Names {
        let classes = [self.x.clone(), self.y.clone(), self.z.clone()];
        Names {
            x: classes[p.0[0]].clone(),
            y: classes[p.0[1]].clone(),
            z: classes[p.0[2]].clone(),
        }
    }
}

/// A set of triples in which any two coordinates determine the third.
///
/// Three dense lookup tables answer "which label sits at (x, y)", "which row
/// holds label z in column x" and "which column holds label z in row y";
/// per-column, per-row and per-label cell lists support the counting kernels.
#[derive(Clone)]
pub struct PartialLatinSquare {
    dims: [usize; 3],
    triples: Vec<Triple>,
    xy: Vec<u32>,
    xz: Vec<u32>,
    yz: Vec<u32>,
    by_x: Vec<Vec<u32>>,
    by_y: Vec<Vec<u32>>,
    by_z: Vec<Vec<(u32, u32)>>,
    names: Option<Names>,
}

impl PartialEq for PartialLatinSquare {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.triples == other.triples
    }
}

impl Eq for PartialLatinSquare {}

impl fmt::Debug for PartialLatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialLatinSquare")
            .field("dims", &self.dims)
            .field("triples", &self.triples)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearityKind {
    /// Same column and row, two labels.
    CellTwoLabels,
    /// Same column and label, two rows.
    LabelTwiceInColumn,
    /// Same row and label, two columns.
    LabelTwiceInRow,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearityViolation {
    pub kind: LinearityKind,
    pub first: Triple,
    pub second: Triple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<LinearityViolation>,
}

fn check_range(triples: &[Triple], dims: [usize; 3]) -> Result<()> {
    for t in triples {
        for c in 0..3 {
            if t[c] as usize >= dims[c] {
                return Err(Error::input(format!(
                    "triple {:?} out of range for dims {:?}",
                    t, dims
                )));
            }
        }
    }
    Ok(())
}

/// Every pair of distinct triples that share two coordinates.
pub fn validate(triples: &[Triple], dims: [usize; 3]) -> Result<ValidationReport> {
    check_range(triples, dims)?;
    let mut uniq: Vec<Triple> = triples.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let mut violations = Vec::new();
    let pairs = [
        (LinearityKind::CellTwoLabels, 0usize, 1usize),
        (LinearityKind::LabelTwiceInColumn, 0, 2),
        (LinearityKind::LabelTwiceInRow, 1, 2),
    ];
    for (kind, a, b) in pairs {
        let mut groups: HashMap<(u32, u32), Vec<Triple>> = HashMap::new();
        for t in &uniq {
            groups.entry((t[a], t[b])).or_default().push(*t);
        }
        for group in groups.values() {
            for i in 0..group.len() {
                for j in i + 1..group.len() {
                    violations.push(LinearityViolation {
                        kind,
                        first: group[i],
                        second: group[j],
                    });
                }
            }
        }
    }
    violations.sort();
    Ok(ValidationReport {
        ok: violations.is_empty(),
        violations,
    })
}

impl PartialLatinSquare {
    /// Build from triples; duplicates collapse, linearity failures are input errors.
    pub fn new(dims: [usize; 3], triples: impl IntoIterator<Item = Triple>) -> Result<Self> {
        let mut ts: Vec<Triple> = triples.into_iter().collect();
        check_range(&ts, dims)?;
        ts.sort_unstable();
        ts.dedup();
        let [nx, ny, nz] = dims;
        let mut xy = vec![NONE; nx * ny];
        let mut xz = vec![NONE; nx * nz];
        let mut yz = vec![NONE; ny * nz];
        for t in &ts {
            let (x, y, z) = (t[0] as usize, t[1] as usize, t[2] as usize);
            let clash = if xy[x * ny + y] != NONE {
                Some([t[0], t[1], xy[x * ny + y]])
            } else if xz[x * nz + z] != NONE {
                Some([t[0], xz[x * nz + z], t[2]])
            } else if yz[y * nz + z] != NONE {
                Some([yz[y * nz + z], t[1], t[2]])
            } else {
                None
            };
            if let Some(other) = clash {
                return Err(Error::input(format!(
                    "triples {:?} and {:?} agree in two coordinates",
                    other, t
                )));
            }
            xy[x * ny + y] = t[2];
            xz[x * nz + z] = t[1];
            yz[y * nz + z] = t[0];
        }
        let mut by_x = vec![Vec::new(); nx];
        let mut by_y = vec![Vec::new(); ny];
        let mut by_z = vec![Vec::new(); nz];
        for t in &ts {
            by_x[t[0] as usize].push(t[1]);
            by_y[t[1] as usize].push(t[0]);
            by_z[t[2] as usize].push((t[0], t[1]));
        }
        for v in by_y.iter_mut() {
            v.sort_unstable();
        }
        Ok(PartialLatinSquare {
            dims,
            triples: ts,
            xy,
            xz,
            yz,
            by_x,
            by_y,
            by_z,
            names: None,
        })
    }

    pub fn empty(dims: [usize; 3]) -> Self {
        Self::new(dims, std::iter::empty()).expect("empty set is linear")
    }

    pub fn with_names(mut self, names: Names) -> Result<Self> {
        for c in 0..3 {
            if names.class(c).len() != self.dims[c] {
                return Err(Error::input(format!(
                    "class {} has {} names for {} elements",
                    c,
                    names.class(c).len(),
                    self.dims[c]
                )));
            }
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn names(&self) -> Option<&Names> {
        self.names.as_ref()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Largest class size; the scale `n` for popularity thresholds and
    /// trivial maxima.
    pub fn ambient(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Sorted lexicographically.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn label(&self, x: u32, y: u32) -> Option<u32> {
        let v = self.xy[x as usize * self.dims[1] + y as usize];
        (v != NONE).then_some(v)
    }

    pub fn contains_cell(&self, x: u32, y: u32) -> bool {
        self.label(x, y).is_some()
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.label(t[0], t[1]) == Some(t[2])
    }

    /// Row holding label `z` in column `x`.
    pub fn row_of(&self, x: u32, z: u32) -> Option<u32> {
        let v = self.xz[x as usize * self.dims[2] + z as usize];
        (v != NONE).then_some(v)
    }

    /// Column holding label `z` in row `y`.
    pub fn col_of(&self, y: u32, z: u32) -> Option<u32> {
        let v = self.yz[y as usize * self.dims[2] + z as usize];
        (v != NONE).then_some(v)
    }

    /// Rows with a cell in column `x`, ascending.
    pub fn column(&self, x: u32) -> &[u32] {
        &self.by_x[x as usize]
    }

    /// Columns with a cell in row `y`, ascending.
    pub fn row(&self, y: u32) -> &[u32] {
        &self.by_y[y as usize]
    }

    /// Cells `(x, y)` carrying label `z`, ascending.
    pub fn cells_with_label(&self, z: u32) -> &[(u32, u32)] {
        &self.by_z[z as usize]
    }

    /// Defined cells over the full grid `n_x * n_y`.
    pub fn density(&self) -> f64 {
        let cells = self.dims[0] * self.dims[1];
        if cells == 0 {
            0.0
        } else {
            self.len() as f64 / cells as f64
        }
    }

    /// Sub-square keeping the triples accepted by `keep`; dims and names are kept.
    pub fn restrict(&self, keep: impl Fn(&Triple) -> bool) -> Self {
        let mut out = Self::new(self.dims, self.triples.iter().copied().filter(|t| keep(t)))
            .expect("subset of a linear set is linear");
        out.names = self.names.clone();
        out
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.triples.iter().all(|t| other.contains(*t))
    }

    /// A full Latin square: square dims and every cell defined.
    pub fn is_full(&self) -> bool {
        let [nx, ny, nz] = self.dims;
        nx == ny && ny == nz && self.len() == nx * ny
    }

    pub fn to_file(&self) -> PlsFile {
        PlsFile {
            dims: self.dims,
            triples: self.triples.clone(),
            names: self.names.clone(),
        }
    }

    pub fn from_file(f: PlsFile) -> Result<Self> {
        let pls = Self::new(f.dims, f.triples)?;
        match f.names {
            Some(n) => pls.with_names(n),
            None => Ok(pls),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            out.push_str(&format!("{},{},{}\n", t[0], t[1], t[2]));
        }
        out
    }

    /// Parse `x,y,z` lines; dims default to one past the largest coordinate.
    pub fn from_csv(s: &str, dims: Option<[usize; 3]>) -> Result<Self> {
        let mut ts = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::input(format!("line {}: expected x,y,z", i + 1)));
            }
            let mut t = [0u32; 3];
            for c in 0..3 {
                t[c] = parts[c]
                    .parse()
                    .map_err(|_| Error::input(format!("line {}: bad integer", i + 1)))?;
            }
            ts.push(t);
        }
        let dims = dims.unwrap_or_else(|| {
            let mut d = [0usize; 3];
            for t in &ts {
                for c in 0..3 {
                    d[c] = d[c].max(t[c] as usize + 1);
                }
            }
            d
        });
        Self::new(dims, ts)
    }

    /// External name of element `i` of class `c` (`x0`, `y3`, ... without a sidecar).
    pub fn name_of(&self, c: usize, i: u32) -> String {
        match &self.names {
            Some(n) => n.class(c)[i as usize].clone(),
            None => format!("{}{}", ["x", "y", "z"][c], i),
        }
    }
}

/// On-disk JSON layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlsFile {
    pub dims: [usize; 3],
    pub triples: Vec<Triple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Names>,
}

/// A permutation of the coordinate classes: new coordinate `i` is old
/// coordinate `self.0[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perm3(pub [usize; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);
    pub const SWAP_XY: Perm3 = Perm3([1, 0, 2]);
    pub const SWAP_XZ: Perm3 = Perm3([2, 1, 0]);
    pub const SWAP_YZ: Perm3 = Perm3([0, 2, 1]);
    pub const ROTATE: Perm3 = Perm3([1, 2, 0]);
    pub const ROTATE_BACK: Perm3 = Perm3([2, 0, 1]);

    pub fn all() -> [Perm3; 6] {
        [
            Self::IDENTITY,
            Self::SWAP_XY,
            Self::SWAP_XZ,
            Self::SWAP_YZ,
            Self::ROTATE,
            Self::ROTATE_BACK,
        ]
    }

    pub fn apply(&self, t: Triple) -> Triple {
        [t[self.0[0]], t[self.0[1]], t[self.0[2]]]
    }

    pub fn inverse(&self) -> Perm3 {
        let mut inv = [0usize; 3];
        for i in 0..3 {
            inv[self.0[i]] = i;
        }
        Perm3(inv)
    }
}

pub fn permute_coords(pls: &PartialLatinSquare, p: Perm3) -> PartialLatinSquare {
    let d = pls.dims;
    let dims = [d[p.0[0]], d[p.0[1]], d[p.0[2]]];
    let mut out = PartialLatinSquare::new(dims, pls.triples.iter().map(|t| p.apply(*t)))
        .expect("linearity is symmetric in the coordinates");
    out.names = pls.names.as_ref().map(|n| n.permuted(p));
    out
}

/// Partially defined binary operation on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialBinaryOp {
    n: usize,
    table: Vec<u32>,
}

impl PartialBinaryOp {
    pub fn new(n: usize) -> Self {
        PartialBinaryOp {
            n,
            table: vec![NONE; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(u32, u32) -> Option<u32>) -> Self {
        let mut op = Self::new(n);
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                if let Some(z) = f(x, y) {
                    op.set(x, y, z);
                }
            }
        }
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, x: u32, y: u32, z: u32) {
        assert!((z as usize) < self.n, "value out of range");
        self.table[x as usize * self.n + y as usize] = z;
    }

    pub fn unset(&mut self, x: u32, y: u32) {
        self.table[x as usize * self.n + y as usize] = NONE;
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Option<u32> {
        let v = self.table[x as usize * self.n + y as usize];
        (v != NONE).then_some(v)
    }

    pub fn defined_count(&self) -> usize {
        self.table.iter().filter(|&&v| v != NONE).count()
    }

    /// Injectivity in each variable, as a linearity report on the table's triples.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.triples(), [self.n; 3]).expect("entries are in range")
    }

    pub fn triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for x in 0..self.n as u32 {
            for y in 0..self.n as u32 {
                if let Some(z) = self.get(x, y) {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

/// The multiplication table as a triple system on `n x n x n`.
pub fn from_binary_op(op: &PartialBinaryOp) -> Result<PartialLatinSquare> {
    PartialLatinSquare::new([op.n; 3], op.triples())
}

/// Read a square triple system back as a table.
pub fn to_binary_op(pls: &PartialLatinSquare) -> Result<PartialBinaryOp> {
    let [nx, ny, nz] = pls.dims();
    if nx != ny || ny != nz {
        return Err(Error::input(format!("dims {:?} are not square", pls.dims())));
    }
    let mut op = PartialBinaryOp::new(nx);
    for t in pls.triples() {
        op.set(t[0], t[1], t[2]);
    }
    Ok(op)
}

/// Instance generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSpec {
    /// Addition table of Z/n.
    Cyclic { n: usize },
    /// Direct product of cyclic groups, mixed-radix indexed.
    Product { factors: Vec<usize> },
    /// Seeded random permutations of columns, rows and labels.
    Relabel { seed: u64, base: Box<GenSpec> },
    /// Keep each cell independently with probability `p`.
    Restrict { p: f64, seed: u64, base: Box<GenSpec> },
    /// Seeded random Latin square of order `n`.
    Quasigroup { n: usize, seed: u64 },
    /// Two rectangles with equal first three labels and different fourth.
    Fig1,
}

impl GenSpec {
    pub fn generate(&self) -> Result<PartialLatinSquare> {
        generate(self)
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Cyclic { n } => write!(f, "cyclic:{}", n),
            GenSpec::Product { factors } => {
                let s: Vec<String> = factors.iter().map(|v| v.to_string()).collect();
                write!(f, "product:{}", s.join("x"))
            }
            GenSpec::Relabel { seed, base } => write!(f, "relabel:{}:{}", seed, base),
            GenSpec::Restrict { p, seed, base } => write!(f, "restrict:{}:{}:{}", p, seed, base),
            GenSpec::Quasigroup { n, seed } => write!(f, "quasigroup:{}:{}", n, seed),
            GenSpec::Fig1 => write!(f, "fig1"),
        }
    }
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("unknown generator spec '{}'", s));
        let num = |v: &str| v.parse::<u64>().map_err(|_| bad());
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, r),
            None => (s, ""),
        };
        match head {
            "fig1" => Ok(GenSpec::Fig1),
            "cyclic" => Ok(GenSpec::Cyclic {
                n: num(rest)? as usize,
            }),
            "product" => {
                let factors = rest
                    .split('x')
                    .map(|v| num(v).map(|v| v as usize))
                    .collect::<Result<Vec<_>>>()?;
                if factors.is_empty() {
                    return Err(bad());
                }
                Ok(GenSpec::Product { factors })
            }
            "quasigroup" => {
                let (n, seed) = rest.split_once(':').ok_or_else(bad)?;
                Ok(GenSpec::Quasigroup {
                    n: num(n)? as usize,
                    seed: num(seed)?,
                })
            }
            "relabel" => {
                let (seed, base) = rest.split_once(':').ok_or_else(bad)?;
                Ok(GenSpec::Relabel {
                    seed: num(seed)?,
                    base: Box::new(base.parse()?),
                })
            }
            "restrict" => {
                let mut it = rest.splitn(3, ':');
                let p: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let seed = num(it.next().ok_or_else(bad)?)?;
                let base: GenSpec = it.next().ok_or_else(bad)?.parse()?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::input(format!("probability {} outside [0, 1]", p)));
                }
                Ok(GenSpec::Restrict {
                    p,
                    seed,
                    base: Box::new(base),
                })
            }
            _ => Err(bad()),
        }
    }
}

pub fn cyclic(n: usize) -> PartialLatinSquare {
    product(&[n])
}

/// Addition table of Z/n1 x ... x Z/nk.
pub fn product(factors: &[usize]) -> PartialLatinSquare {
    let order: usize = factors.iter().product();
    let digits = |mut v: usize| {
        factors
            .iter()
            .map(|&f| {
                let d = v % f;
                v /= f;
                d
            })
            .collect::<Vec<_>>()
    };
    let mut ts = Vec::with_capacity(order * order);
    for a in 0..order {
        let da = digits(a);
        for b in 0..order {
            let db = digits(b);
            let mut c = 0usize;
            for i in (0..factors.len()).rev() {
                c = c * factors[i] + (da[i] + db[i]) % factors[i];
            }
            ts.push([a as u32, b as u32, c as u32]);
        }
    }
    PartialLatinSquare::new([order; 3], ts).expect("group tables are Latin")
}

/// Apply explicit permutations of columns, rows and labels.
pub fn relabel(pls: &PartialLatinSquare, perms: &[Vec<u32>; 3]) -> Result<PartialLatinSquare> {
    for c in 0..3 {
        let mut seen = perms[c].clone();
        seen.sort_unstable();
        if seen != (0..pls.dims[c] as u32).collect::<Vec<_>>() {
            return Err(Error::input(format!("class {} map is not a permutation", c)));
        }
    }
    PartialLatinSquare::new(
        pls.dims,
        pls.triples.iter().map(|t| {
            [
                perms[0][t[0] as usize],
                perms[1][t[1] as usize],
                perms[2][t[2] as usize],
            ]
        }),
    )
}

pub fn random_relabel(pls: &PartialLatinSquare, seed: u64) -> PartialLatinSquare {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: [Vec<u32>; 3] = std::array::from_fn(|c| {
        let mut p: Vec<u32> = (0..pls.dims[c] as u32).collect();
        p.shuffle(&mut rng);
        p
    });
    relabel(pls, &perms).expect("shuffles are permutations")
}

pub fn restrict_random(pls: &PartialLatinSquare, p: f64, seed: u64) -> PartialLatinSquare {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep: Vec<bool> = pls.triples.iter().map(|_| rng.random::<f64>() < p).collect();
    let ts = pls
        .triples
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(t, _)| *t);
    let mut out = PartialLatinSquare::new(pls.dims, ts).expect("subset of a linear set");
    out.names = pls.names.clone();
    out
}

/// Random Latin square built row by row; each row is a perfect matching
/// between columns and unused labels found by augmenting paths over
/// shuffled candidate lists. Not uniform over Latin squares.
pub fn random_quasigroup(n: usize, seed: u64) -> PartialLatinSquare {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // used[y][z]: label z already appears in column y.
    let mut used = vec![vec![false; n]; n];
    let mut ts = Vec::with_capacity(n * n);
    for x in 0..n {
        let mut cols: Vec<usize> = (0..n).collect();
        cols.shuffle(&mut rng);
        let cand: Vec<Vec<usize>> = (0..n)
            .map(|y| {
                let mut c: Vec<usize> = (0..n).filter(|&z| !used[y][z]).collect();
                c.shuffle(&mut rng);
                c
            })
            .collect();
        let mut owner = vec![usize::MAX; n]; // label -> column
        for &y in &cols {
            let mut seen = vec![false; n];
            let found = augment(y, &cand, &mut owner, &mut seen);
            assert!(found, "Latin rectangles always extend");
        }
        for z in 0..n {
            let y = owner[z];
            used[y][z] = true;
            ts.push([x as u32, y as u32, z as u32]);
        }
    }
    PartialLatinSquare::new([n; 3], ts).expect("construction is Latin")
}

fn augment(y: usize, cand: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &z in &cand[y] {
        if seen[z] {
            continue;
        }
        seen[z] = true;
        if owner[z] == usize::MAX || augment(owner[z], cand, owner, seen) {
            owner[z] = y;
            return true;
        }
    }
    false
}

/// Eight triples over 4 columns, 4 rows and labels a, b, c, d, d2: two
/// rectangles agreeing on three labels and differing on the fourth.
pub fn fig1() -> PartialLatinSquare {
    let ts = [
        [0, 0, 0],
        [1, 0, 1],
        [0, 1, 2],
        [1, 1, 3],
        [2, 2, 0],
        [3, 2, 1],
        [2, 3, 2],
        [3, 3, 4],
    ];
    let s = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    PartialLatinSquare::new([4, 4, 5], ts)
        .and_then(|p| {
            p.with_names(Names {
                x: s(&["x1", "x2", "x3", "x4"]),
                y: s(&["y1", "y2", "y3", "y4"]),
                z: s(&["a", "b", "c", "d", "d2"]),
            })
        })
        .expect("fixture is valid")
}

pub fn generate(spec: &GenSpec) -> Result<PartialLatinSquare> {
    Ok(match spec {
        GenSpec::Cyclic { n } => {
            if *n == 0 {
                return Err(Error::input("cyclic order must be positive"));
            }
            cyclic(*n)
        }
        GenSpec::Product { factors } => {
            if factors.iter().any(|&f| f == 0) {
                return Err(Error::input("product factors must be positive"));
            }
            product(factors)
        }
        GenSpec::Relabel { seed, base } => random_relabel(&generate(base)?, *seed),
        GenSpec::Restrict { p, seed, base } => restrict_random(&generate(base)?, *p, *seed),
        GenSpec::Quasigroup { n, seed } => random_quasigroup(*n, *seed),
        GenSpec::Fig1 => fig1(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_valid() {
        let r = validate(&[[0, 0, 0]], [1, 1, 1]).unwrap();
        assert!(r.ok);
    }

    #[test]
    fn repeated_label_in_column_is_reported() {
        let r = validate(&[[0, 0, 0], [0, 1, 0]], [1, 2, 1]).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, LinearityKind::LabelTwiceInColumn);
    }

    #[test]
    fn out_of_range_names_the_triple() {
        let e = validate(&[[0, 5, 0]], [1, 1, 1]).unwrap_err();
        assert!(e.to_string().contains("[0, 5, 0]"));
    }

    #[test]
    fn z2_table_round_trips() {
        let op = PartialBinaryOp::from_fn(2, |x, y| Some((x + y) % 2));
        let pls = from_binary_op(&op).unwrap();
        assert_eq!(pls.triples(), &[[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]);
        assert_eq!(to_binary_op(&pls).unwrap(), op);
        assert!(from_binary_op(&PartialBinaryOp::new(3)).unwrap().is_empty());
    }

    #[test]
    fn indices_agree_with_triples() {
        let p = random_quasigroup(7, 3);
        for t in p.triples() {
            assert_eq!(p.label(t[0], t[1]), Some(t[2]));
            assert_eq!(p.row_of(t[0], t[2]), Some(t[1]));
            assert_eq!(p.col_of(t[1], t[2]), Some(t[0]));
        }
        assert!(p.is_full());
    }

    #[test]
    fn generators_parse_and_print() {
        for s in [
            "cyclic:4",
            "product:2x3",
            "quasigroup:5:3",
            "relabel:7:cyclic:4",
            "restrict:0.5:1:cyclic:8",
            "fig1",
        ] {
            let g: GenSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("torus:3".parse::<GenSpec>().is_err());
    }

    #[test]
    fn full_restriction_is_identity() {
        let z = cyclic(5);
        assert_eq!(restrict_random(&z, 1.0, 9), z);
        assert!(restrict_random(&z, 0.0, 9).is_empty());
    }

    #[test]
    fn restriction_is_reproducible_and_near_density() {
        let z = cyclic(8);
        let a = restrict_random(&z, 0.5, 1);
        let b = restrict_random(&z, 0.5, 1);
        assert_eq!(a, b);
        let d = a.len() as f64 / z.len() as f64;
        assert!((0.3..=0.7).contains(&d), "density {}", d);
    }

    #[test]
    fn swap_twice_is_identity() {
        let q = random_quasigroup(5, 1);
        let once = permute_coords(&q, Perm3::SWAP_YZ);
        assert_eq!(permute_coords(&once, Perm3::SWAP_YZ), q);
        for p in Perm3::all() {
            assert_eq!(permute_coords(&permute_coords(&q, p), p.inverse()), q);
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = fig1();
        let s = f.to_json();
        let back = PartialLatinSquare::from_json(&s).unwrap();
        assert_eq!(back.to_json(), s);
        assert_eq!(back.name_of(2, 4), "d2");
    }

    #[test]
    fn csv_round_trip() {
        let q = random_quasigroup(4, 2);
        assert_eq!(PartialLatinSquare::from_csv(&q.to_csv(), None).unwrap(), q);
    }
}
