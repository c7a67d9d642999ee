use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::CyclicSum;
use super::matrix::IntMatrix;
use super::FgAbError;

/// A homomorphism between two cyclic sums, written as an integer matrix of
/// shape `target.len() x source.len()`. Entries in torsion rows are kept
/// reduced into `[0, d)`, so equal maps have equal matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    source: CyclicSum,
    target: CyclicSum,
    matrix: IntMatrix,
}

impl Homomorphism {
    /// Validates shape and well-definedness: for a source generator of order
    /// `d`, `d` times its image column must lie in the target's relations.
    pub fn new(source: CyclicSum, target: CyclicSum, matrix: IntMatrix) -> Result<Self, FgAbError> {
        if matrix.rows() != target.len() || matrix.cols() != source.len() {
            return Err(FgAbError::Shape {
                expected: (target.len(), source.len()),
                found: (matrix.rows(), matrix.cols()),
            });
        }
        let mut matrix = matrix;
        for (i, e) in target.orders().iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            for j in 0..matrix.cols() {
                let r = matrix.get(i, j).mod_floor(e);
                matrix.set(i, j, r);
            }
        }
        for (j, d) in source.orders().iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            for (i, e) in target.orders().iter().enumerate() {
                let a = matrix.get(i, j);
                let ok = if e.is_zero() { a.is_zero() } else { (d * a).is_multiple_of(e) };
                if !ok {
                    return Err(FgAbError::IllDefined { column: j, row: i, source_order: d.clone() });
                }
            }
        }
        Ok(Homomorphism { source, target, matrix })
    }

    pub fn zero(source: CyclicSum, target: CyclicSum) -> Self {
        let matrix = IntMatrix::zeros(target.len(), source.len());
        Homomorphism { source, target, matrix }
    }

    pub fn identity(group: CyclicSum) -> Self {
        let matrix = IntMatrix::identity(group.len());
        Homomorphism { source: group.clone(), target: group, matrix }
    }

    /// Assembles a block map from `sources[j]` to `targets[i]`; missing blocks are zero.
    pub fn from_blocks(
        sources: &[CyclicSum],
        targets: &[CyclicSum],
        blocks: &[(usize, usize, &Homomorphism)],
    ) -> Result<Self, FgAbError> {
        let source = CyclicSum::concat(sources);
        let target = CyclicSum::concat(targets);
        let col_off: Vec<usize> = offsets(sources);
        let row_off: Vec<usize> = offsets(targets);
        let mut matrix = IntMatrix::zeros(target.len(), source.len());
        for &(i, j, h) in blocks {
            if h.source != sources[j] || h.target != targets[i] {
                return Err(FgAbError::Mismatch(format!(
                    "block ({i},{j}) is {} -> {}, expected {} -> {}",
                    h.source, h.target, sources[j], targets[i]
                )));
            }
            let mut existing = matrix.submatrix(row_off[i], row_off[i] + h.target.len(), col_off[j], col_off[j] + h.source.len());
            existing = existing.add(&h.matrix);
            matrix.put_block(row_off[i], col_off[j], &existing);
        }
        Homomorphism::new(source, target, matrix)
    }

    pub fn source(&self) -> &CyclicSum {
        &self.source
    }

    pub fn target(&self) -> &CyclicSum {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Homomorphism) -> Result<Homomorphism, FgAbError> {
        if inner.target != self.source {
            return Err(FgAbError::Mismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, inner.source, inner.target
            )));
        }
        Homomorphism::new(inner.source.clone(), self.target.clone(), self.matrix.mul(&inner.matrix))
    }

    pub fn scale(&self, k: &BigInt) -> Homomorphism {
        // a multiple of a well-defined map is well-defined
        Homomorphism::new(self.source.clone(), self.target.clone(), self.matrix.scale(k))
            .expect("scalar multiple of a homomorphism")
    }

    pub fn add(&self, other: &Homomorphism) -> Result<Homomorphism, FgAbError> {
        if self.source != other.source || self.target != other.target {
            return Err(FgAbError::Mismatch("sum of maps with different endpoints".into()));
        }
        Homomorphism::new(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix))
    }

    /// Image of an element given in source coordinates, reduced.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut y = self.matrix.mul_vec(x);
        self.target.reduce(&mut y);
        y
    }

    /// Multiplication by `n` on a group.
    pub fn multiplication(group: CyclicSum, n: i64) -> Homomorphism {
        Homomorphism::identity(group).scale(&BigInt::from(n))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && {
            let mut id = IntMatrix::identity(self.source.len());
            for (i, o) in self.target.orders().iter().enumerate() {
                if !o.is_zero() {
                    id.set(i, i, BigInt::one().mod_floor(o));
                }
            }
            id == self.matrix
        }
    }
}

fn offsets(parts: &[CyclicSum]) -> Vec<usize> {
    let mut acc = 0;
    parts
        .iter()
        .map(|p| {
            let o = acc;
            acc += p.len();
            o
        })
        .collect()
}

impl fmt::Display for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {}", self.source, self.target, self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(orders: &[i64]) -> CyclicSum {
        CyclicSum::new(orders.iter().map(|&o| BigInt::from(o)).collect()).unwrap()
    }

    #[test]
    fn reduces_torsion_rows() {
        let h = Homomorphism::new(cs(&[0]), cs(&[8]), IntMatrix::from_i64(&[&[-3]])).unwrap();
        assert_eq!(h.matrix(), &IntMatrix::from_i64(&[&[5]]));
    }

    #[test]
    fn well_definedness() {
        // Z/2 -> Z/8 must land in 4Z/8
        assert!(Homomorphism::new(cs(&[2]), cs(&[8]), IntMatrix::from_i64(&[&[4]])).is_ok());
        assert!(Homomorphism::new(cs(&[2]), cs(&[8]), IntMatrix::from_i64(&[&[2]])).is_err());
        // torsion into a free group must vanish
        assert!(Homomorphism::new(cs(&[2]), cs(&[0]), IntMatrix::from_i64(&[&[1]])).is_err());
        // shape
        assert!(Homomorphism::new(cs(&[0]), cs(&[0, 0]), IntMatrix::from_i64(&[&[1]])).is_err());
    }

    #[test]
    fn composition_reduces() {
        let f = Homomorphism::new(cs(&[0]), cs(&[0]), IntMatrix::from_i64(&[&[3]])).unwrap();
        let g = Homomorphism::new(cs(&[0]), cs(&[4]), IntMatrix::from_i64(&[&[3]])).unwrap();
        assert_eq!(g.compose(&f).unwrap().matrix(), &IntMatrix::from_i64(&[&[1]]));
        assert!(f.compose(&g).is_err());
    }

    #[test]
    fn block_assembly() {
        let z = cs(&[0]);
        let z2 = cs(&[2]);
        let t = Homomorphism::new(z2.clone(), cs(&[2, 2]), IntMatrix::from_i64(&[&[0], &[1]])).unwrap();
        let h = Homomorphism::from_blocks(&[z2.clone(), z], &[cs(&[2, 2])], &[(0, 0, &t)]).unwrap();
        assert_eq!(h.matrix(), &IntMatrix::from_i64(&[&[0, 0], &[1, 0]]));
        assert!(Homomorphism::from_blocks(std::slice::from_ref(&z2), std::slice::from_ref(&z2), &[(0, 0, &t)]).is_err());
    }

    #[test]
    fn identity_detection() {
        assert!(Homomorphism::identity(cs(&[8, 0])).is_identity());
        assert!(!Homomorphism::multiplication(cs(&[8]), 3).is_identity());
        assert!(Homomorphism::multiplication(cs(&[2]), 3).is_identity());
    }
}
