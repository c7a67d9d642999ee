//! Finite equivariant CW pairs for a finite group `G`.
//!
//! A complex stores one representative cell per orbit `G/L × e^p`, labelled
//! by its stabilizer `L`. The boundary records, for each pair of orbit cells,
//! the equivariant attaching degree of the first on the second; the group
//! action itself is left implicit. Cells flagged `in_subcomplex` form the
//! subcomplex `Y₀` of a pair `(Ȳ, Y₀)`, which is how Borel–Moore input is
//! given: the space is `Ȳ \ Y₀` and its Borel–Moore homology is the relative
//! homology of the pair.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::fgab::IntMatrix;
use crate::lattice::{LatticeError, SubgroupLattice};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GcwError {
    #[error("stabilizer violation: `{from}` (stabilizer {from_stab}) attaches to `{to}` (stabilizer {to_stab}), but {from_stab} ⊄ {to_stab}")]
    StabilizerViolation { from: String, to: String, from_stab: String, to_stab: String },
    #[error("dimension gap: `{from}` (dimension {from_dim}) attaches to `{to}` (dimension {to_dim})")]
    DimensionGap { from: String, to: String, from_dim: usize, to_dim: usize },
    #[error("subcomplex not closed: `{from}` lies in the subcomplex but attaches to `{to}`, which does not")]
    SubcomplexNotClosed { from: String, to: String },
    #[error("boundary does not square to zero: the composite from `{from}` to `{to}` has degree {degree}")]
    BoundaryNotSquareZero { from: String, to: String, degree: i64 },
    #[error("cell `{0}` is declared twice")]
    DuplicateCell(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("bad arguments for preset `{name}`: {message}")]
    PresetArguments { name: String, message: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    /// Index into the complex's subgroup lattice.
    #[serde(skip)]
    pub stabilizer: usize,
    pub in_subcomplex: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantComplex {
    lattice: SubgroupLattice,
    cells: Vec<Cell>,
    // (from, to) -> degree, nonzero entries only
    boundary: BTreeMap<(usize, usize), i64>,
}

/// Cell counts of a validated complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// (dimension, stabilizer, orbit cells, of which in the subcomplex)
    pub cells: Vec<(usize, String, usize, usize)>,
    /// Euler characteristic of the pair, each orbit cell weighted by `|G/L|`.
    pub euler_characteristic: i64,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (dim, stab, n, sub) in &self.cells {
            write!(f, "dim {dim}, stabilizer {stab}: {n} orbit cell(s)")?;
            if *sub > 0 {
                write!(f, ", {sub} in subcomplex")?;
            }
            writeln!(f)?;
        }
        write!(f, "euler characteristic of the pair: {}", self.euler_characteristic)
    }
}

impl EquivariantComplex {
    pub fn new(lattice: SubgroupLattice) -> Self {
        EquivariantComplex { lattice, cells: Vec::new(), boundary: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn add_cell(&mut self, id: &str, dim: usize, stabilizer: &str, in_subcomplex: bool) -> Result<usize, GcwError> {
        if self.cell_index(id).is_some() {
            return Err(GcwError::DuplicateCell(id.to_string()));
        }
        let stabilizer = self.lattice.require(stabilizer)?;
        self.cells.push(Cell { id: id.to_string(), dim, stabilizer, in_subcomplex });
        Ok(self.cells.len() - 1)
    }

    /// Sets the attaching degree of orbit cell `from` on orbit cell `to`.
    pub fn set_degree(&mut self, from: &str, to: &str, degree: i64) -> Result<(), GcwError> {
        let a = self.require_cell(from)?;
        let b = self.require_cell(to)?;
        if degree == 0 {
            self.boundary.remove(&(a, b));
        } else {
            self.boundary.insert((a, b), degree);
        }
        Ok(())
    }

    pub fn degree(&self, from: usize, to: usize) -> i64 {
        self.boundary.get(&(from, to)).copied().unwrap_or(0)
    }

    /// Nonzero boundary entries as (from, to, degree), ordered by cell index.
    pub fn boundary_entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.boundary.iter().map(|(&(a, b), &d)| (a, b, d))
    }

    pub fn cell_index(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    fn require_cell(&self, id: &str) -> Result<usize, GcwError> {
        self.cell_index(id).ok_or_else(|| GcwError::UnknownCell(id.to_string()))
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().filter(|c| !c.in_subcomplex).map(|c| c.dim).max()
    }

    /// Cells of dimension `p` outside the subcomplex, in declaration order.
    pub fn relative_cells(&self, p: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == p && !self.cells[i].in_subcomplex).collect()
    }

    /// Orbit-level boundary from relative `p`-cells to relative `(p-1)`-cells;
    /// rows follow `relative_cells(p - 1)`, columns `relative_cells(p)`.
    pub fn boundary_matrix(&self, p: usize) -> IntMatrix {
        let cols = self.relative_cells(p);
        let rows = if p == 0 { Vec::new() } else { self.relative_cells(p - 1) };
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for (i, &r) in rows.iter().enumerate() {
                m.set(i, j, BigInt::from(self.degree(c, r)));
            }
        }
        m
    }

    pub fn validate(&self) -> Result<ValidationReport, GcwError> {
        let name = |i: usize| self.cells[i].id.clone();
        for &(a, b) in self.boundary.keys() {
            let (ca, cb) = (&self.cells[a], &self.cells[b]);
            if cb.dim + 1 != ca.dim {
                return Err(GcwError::DimensionGap { from: name(a), to: name(b), from_dim: ca.dim, to_dim: cb.dim });
            }
            if !self.lattice.contains(ca.stabilizer, cb.stabilizer) {
                return Err(GcwError::StabilizerViolation {
                    from: name(a),
                    to: name(b),
                    from_stab: self.lattice.name(ca.stabilizer).to_string(),
                    to_stab: self.lattice.name(cb.stabilizer).to_string(),
                });
            }
            if ca.in_subcomplex && !cb.in_subcomplex {
                return Err(GcwError::SubcomplexNotClosed { from: name(a), to: name(b) });
            }
        }
        // orbit-level ∂∂ = 0, over all cells including the subcomplex
        let mut square: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (&(a, b), &d1) in &self.boundary {
            for (&(_, c), &d2) in self.boundary.range((b, 0)..(b + 1, 0)) {
                *square.entry((a, c)).or_insert(0) += d1 * d2;
            }
        }
        if let Some((&(a, c), &degree)) = square.iter().find(|(_, &d)| d != 0) {
            return Err(GcwError::BoundaryNotSquareZero { from: name(a), to: name(c), degree });
        }

        let mut counts: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        let mut euler = 0i64;
        let g = self.lattice.ambient().order;
        for c in &self.cells {
            let e = counts.entry((c.dim, c.stabilizer)).or_default();
            e.0 += 1;
            if c.in_subcomplex {
                e.1 += 1;
            } else {
                let orbit = (g / self.lattice.order(c.stabilizer)) as i64;
                euler += if c.dim % 2 == 0 { orbit } else { -orbit };
            }
        }
        Ok(ValidationReport {
            cells: counts.into_iter().map(|((d, s), (n, k))| (d, self.lattice.name(s).to_string(), n, k)).collect(),
            euler_characteristic: euler,
        })
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct CellJson<'a> {
            id: &'a str,
            dim: usize,
            stabilizer: &'a str,
            in_subcomplex: bool,
        }
        #[derive(Serialize)]
        struct Json<'a> {
            ambient: &'a str,
            cells: Vec<CellJson<'a>>,
            boundary: Vec<(&'a str, &'a str, i64)>,
        }
        let j = Json {
            ambient: &self.lattice.ambient().name,
            cells: self
                .cells
                .iter()
                .map(|c| CellJson { id: &c.id, dim: c.dim, stabilizer: self.lattice.name(c.stabilizer), in_subcomplex: c.in_subcomplex })
                .collect(),
            boundary: self.boundary.iter().map(|(&(a, b), &d)| (self.cells[a].id.as_str(), self.cells[b].id.as_str(), d)).collect(),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }
}

/// Name, parameter shape and a one-line description of each preset.
pub const PRESETS: &[(&str, &str, &str)] = &[
    ("torus", "torus(d)", "the d-torus with its product cell structure, trivial group"),
    ("euclidean_sphere", "euclidean_sphere(d)", "the pair (S^d, pt) computing Borel-Moore homology of R^d, trivial group"),
    ("wedge_of_spheres", "wedge_of_spheres(d1, ..., dk)", "a wedge of spheres on one basepoint, trivial group"),
    (
        "halfturn_e3",
        "halfturn_e3",
        "R^3 with Z/2 rotating a plane by a half turn: the pair (S^{1+2σ}, ∞) with one fixed 1-cell and free 2- and 3-orbits",
    ),
];

fn arity(name: &str, params: &[i64], n: usize) -> Result<(), GcwError> {
    if params.len() != n {
        return Err(GcwError::PresetArguments { name: name.to_string(), message: format!("expected {n} argument(s), got {}", params.len()) });
    }
    Ok(())
}

fn dimension(name: &str, d: i64) -> Result<usize, GcwError> {
    usize::try_from(d)
        .ok()
        .filter(|&d| d <= 16)
        .ok_or_else(|| GcwError::PresetArguments { name: name.to_string(), message: format!("dimension {d} is outside 0..=16") })
}

pub fn preset(name: &str, params: &[i64]) -> Result<EquivariantComplex, GcwError> {
    match name {
        "torus" => {
            arity(name, params, 1)?;
            torus(dimension(name, params[0])?)
        }
        "euclidean_sphere" => {
            arity(name, params, 1)?;
            euclidean_sphere(dimension(name, params[0])?)
        }
        "wedge_of_spheres" => {
            let dims: Vec<usize> = params.iter().map(|&d| dimension(name, d)).collect::<Result<_, _>>()?;
            wedge_of_spheres(&dims)
        }
        "halfturn_e3" | "halfturn" => {
            arity(name, params, 0)?;
            halfturn_e3()
        }
        _ => Err(GcwError::UnknownPreset(name.to_string())),
    }
}

/// One cell per subset of the coordinates; every cellular boundary vanishes.
pub fn torus(d: usize) -> Result<EquivariantComplex, GcwError> {
    let mut x = EquivariantComplex::new(SubgroupLattice::trivial());
    let label = |s: u32| -> String { (0..d).filter(|i| s & (1 << i) != 0).map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("_") };
    let mut subsets: Vec<(u32, String)> = (0..1u32 << d).map(|s| (s.count_ones(), label(s))).collect();
    subsets.sort();
    for (dim, l) in subsets {
        x.add_cell(&format!("c{l}"), dim as usize, "e", false)?;
    }
    Ok(x)
}

/// The pair `(S^d, pt)`: a basepoint in the subcomplex and one `d`-cell.
pub fn euclidean_sphere(d: usize) -> Result<EquivariantComplex, GcwError> {
    let mut x = EquivariantComplex::new(SubgroupLattice::trivial());
    x.add_cell("infinity", 0, "e", true)?;
    x.add_cell("top", d, "e", false)?;
    Ok(x)
}

pub fn wedge_of_spheres(dims: &[usize]) -> Result<EquivariantComplex, GcwError> {
    let mut x = EquivariantComplex::new(SubgroupLattice::trivial());
    x.add_cell("base", 0, "e", false)?;
    for (i, &d) in dims.iter().enumerate() {
        x.add_cell(&format!("s{}", i + 1), d, "e", false)?;
    }
    Ok(x)
}

/// `S^{1+2σ}` relative to the point at infinity.
///
/// The fixed circle is `∞ ∪ x`. The free 2-orbit `h` consists of two
/// half-planes bounded by the fixed line, each with boundary the closure of
/// `x`, so each representative attaches to `x` with degree 1. The free
/// 3-orbit `w` consists of two half-spaces separated by the half-planes; its
/// representative has boundary `h - g·h`, whose orbit sum is `1 + (-1) = 0`.
pub fn halfturn_e3() -> Result<EquivariantComplex, GcwError> {
    let mut x = EquivariantComplex::new(SubgroupLattice::cyclic_of_prime_order(2));
    x.add_cell("infinity", 0, "Z2", true)?;
    x.add_cell("axis", 1, "Z2", false)?;
    x.add_cell("halfplane", 2, "e", false)?;
    x.add_cell("halfspace", 3, "e", false)?;
    x.set_degree("halfplane", "axis", 1)?;
    Ok(x)
}
