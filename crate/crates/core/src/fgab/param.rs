//! Homomorphisms with undetermined entries.
//!
//! A parametric map is `base + sum_i s_i * delta_i` with each `s_i` ranging
//! over `0..range_i`. Verdicts computed from such a map are quantified over
//! every well-defined instance.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::group::CyclicSum;
use super::hom::Homomorphism;
use super::matrix::IntMatrix;
use super::FgAbError;

/// Upper bound on the number of instances any enumeration will visit.
pub const MAX_INSTANCES: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub label: String,
    pub delta: IntMatrix,
    pub range: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricHom {
    source: CyclicSum,
    target: CyclicSum,
    base: IntMatrix,
    params: Vec<Param>,
}

/// One matrix entry as written in a data file: a number or `*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Fixed(BigInt),
    Undetermined,
}

impl ParametricHom {
    pub fn pinned(h: Homomorphism) -> Self {
        ParametricHom { source: h.source().clone(), target: h.target().clone(), base: h.matrix().clone(), params: Vec::new() }
    }

    /// Each `*` entry ranges over the residues of its target row, which must be torsion.
    pub fn from_entries(source: CyclicSum, target: CyclicSum, entries: &[Vec<Entry>]) -> Result<Self, FgAbError> {
        if entries.len() != target.len() || entries.iter().any(|r| r.len() != source.len()) {
            return Err(FgAbError::Shape {
                expected: (target.len(), source.len()),
                found: (entries.len(), entries.first().map_or(0, |r| r.len())),
            });
        }
        let mut base = IntMatrix::zeros(target.len(), source.len());
        let mut params = Vec::new();
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                match e {
                    Entry::Fixed(x) => base.set(i, j, x.clone()),
                    Entry::Undetermined => {
                        let order = &target.orders()[i];
                        if order.is_zero() {
                            return Err(FgAbError::Unbounded { row: i, column: j });
                        }
                        let mut delta = IntMatrix::zeros(target.len(), source.len());
                        delta.set(i, j, BigInt::one());
                        params.push(Param { label: format!("*[{i},{j}]"), delta, range: order.clone() });
                    }
                }
            }
        }
        // instances are validated one by one; the base alone need not be well-defined
        Ok(ParametricHom { source, target, base, params })
    }

    pub fn with_param(mut self, label: impl Into<String>, delta: IntMatrix, range: BigInt) -> Self {
        assert_eq!((delta.rows(), delta.cols()), (self.target.len(), self.source.len()));
        self.params.push(Param { label: label.into(), delta, range });
        self
    }

    /// Places this map as a block of a larger one, every other entry zero.
    pub fn embed(&self, source: CyclicSum, target: CyclicSum, row: usize, col: usize) -> ParametricHom {
        let place = |m: &IntMatrix| {
            let mut big = IntMatrix::zeros(target.len(), source.len());
            big.put_block(row, col, m);
            big
        };
        let params = self
            .params
            .iter()
            .map(|p| Param { label: p.label.clone(), delta: place(&p.delta), range: p.range.clone() })
            .collect();
        ParametricHom { base: place(&self.base), params, source, target }
    }

    /// `[self, other]` on the direct sum of the sources, parameters kept apart.
    pub fn hstack(&self, other: &ParametricHom) -> ParametricHom {
        assert_eq!(self.target, other.target, "hstack needs a common target");
        let source = CyclicSum::concat([&self.source, &other.source]);
        let left = self.embed(source.clone(), self.target.clone(), 0, 0);
        let right = other.embed(source, self.target.clone(), 0, self.source.len());
        let base = left.base.add(&right.base);
        let params = left.params.into_iter().chain(right.params).collect();
        ParametricHom { source: left.source, target: left.target, base, params }
    }

    pub fn source(&self) -> &CyclicSum {
        &self.source
    }

    pub fn target(&self) -> &CyclicSum {
        &self.target
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn base_matrix(&self) -> &IntMatrix {
        &self.base
    }

    pub fn is_pinned(&self) -> bool {
        self.params.is_empty()
    }

    /// The map itself when there are no undetermined entries.
    pub fn as_pinned(&self) -> Result<Homomorphism, FgAbError> {
        if !self.is_pinned() {
            return Err(FgAbError::Undetermined(self.params.len()));
        }
        Homomorphism::new(self.source.clone(), self.target.clone(), self.base.clone())
    }

    /// Number of parameter assignments (well-defined or not).
    pub fn assignment_count(&self) -> Result<u64, FgAbError> {
        let mut total: u64 = 1;
        for p in &self.params {
            let r = p.range.to_u64().ok_or(FgAbError::TooManyInstances)?;
            total = total.checked_mul(r).ok_or(FgAbError::TooManyInstances)?;
        }
        if total > MAX_INSTANCES {
            return Err(FgAbError::TooManyInstances);
        }
        Ok(total)
    }

    /// The map for one assignment; `None` if that instance is not well-defined.
    pub fn instance(&self, values: &[BigInt]) -> Option<Homomorphism> {
        assert_eq!(values.len(), self.params.len());
        let mut m = self.base.clone();
        for (p, s) in self.params.iter().zip(values) {
            m = m.add(&p.delta.scale(s));
        }
        Homomorphism::new(self.source().clone(), self.target().clone(), m).ok()
    }

    /// All well-defined instances with their assignments, in lexicographic
    /// order of the assignment (first parameter slowest).
    pub fn instances(&self) -> Result<Vec<(Vec<BigInt>, Homomorphism)>, FgAbError> {
        let ranges: Vec<u64> = self
            .params
            .iter()
            .map(|p| p.range.to_u64().ok_or(FgAbError::TooManyInstances))
            .collect::<Result<_, _>>()?;
        self.assignment_count()?;
        let mut out = Vec::new();
        for values in assignments(&ranges) {
            let big: Vec<BigInt> = values.iter().map(|&v| BigInt::from(v)).collect();
            if let Some(h) = self.instance(&big) {
                out.push((big, h));
            }
        }
        if out.is_empty() {
            return Err(FgAbError::NoWellDefinedInstance);
        }
        Ok(out)
    }

    /// Entry grid with `*` where a unit-delta parameter sits, for printing.
    pub fn entries(&self) -> Vec<Vec<Entry>> {
        let m = &self.base;
        let mut grid: Vec<Vec<Entry>> =
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| Entry::Fixed(m.get(i, j).clone())).collect()).collect();
        for p in &self.params {
            let nz: Vec<(usize, usize)> = (0..p.delta.rows())
                .flat_map(|i| (0..p.delta.cols()).map(move |j| (i, j)))
                .filter(|&(i, j)| !p.delta.get(i, j).is_zero())
                .collect();
            if let [(i, j)] = nz[..] {
                if p.delta.get(i, j).is_one() && m.get(i, j).is_zero() {
                    grid[i][j] = Entry::Undetermined;
                }
            }
        }
        grid
    }
}

impl From<Homomorphism> for ParametricHom {
    fn from(h: Homomorphism) -> Self {
        ParametricHom::pinned(h)
    }
}

/// Mixed-radix enumeration, first coordinate slowest.
pub fn assignments(ranges: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &r in ranges {
        let mut next = Vec::with_capacity(out.len() * r as usize);
        for v in &out {
            for x in 0..r {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}
