//! Subquotients `K / S` of a lattice `Z^n`, with explicit generators and a
//! coordinate projection. Kernels, cokernels, images and homology all go
//! through here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::{CyclicSum, FgAbGroup};
use super::hom::Homomorphism;
use super::matrix::IntMatrix;
use super::snf::{kernel_basis, smith_normal_form, solve_with, SnfDecomposition};
use super::FgAbError;

#[derive(Clone, Debug)]
pub struct Subquotient {
    ambient: usize,
    group: FgAbGroup,
    /// `ambient x num_generators`: a representative for each normal-form generator.
    generators: IntMatrix,
    numerator: IntMatrix,
    numerator_snf: SnfDecomposition,
    /// Change of coordinates from the numerator basis to the adapted basis.
    adapt: IntMatrix,
    /// For each normal-form generator: (row of the adapted basis, order).
    slots: Vec<(usize, BigInt)>,
}

impl Subquotient {
    /// `numerator` must have independent columns; every column of
    /// `denominator` must lie in their span.
    pub fn new(numerator: IntMatrix, denominator: &IntMatrix) -> Result<Self, FgAbError> {
        let ambient = numerator.rows();
        assert_eq!(denominator.rows(), ambient);
        let k = numerator.cols();
        let numerator_snf = smith_normal_form(&numerator);
        assert_eq!(numerator_snf.rank(), k, "numerator columns must be independent");

        let mut coords = Vec::with_capacity(denominator.cols());
        for col in denominator.columns() {
            let c = solve_with(&numerator_snf, k, &col)
                .ok_or_else(|| FgAbError::NotSubgroup(format!("relation {col:?} outside the subgroup")))?;
            coords.push(c);
        }
        let relations = IntMatrix::from_columns(k, &coords);
        let rel_snf = smith_normal_form(&relations);
        let rank = rel_snf.rank();

        let mut free_slots = Vec::new();
        let mut torsion_slots = Vec::new();
        for i in 0..k {
            if i < rank {
                let d = rel_snf.d.get(i, i).clone();
                if !d.is_one() {
                    torsion_slots.push((i, d));
                }
            } else {
                free_slots.push((i, BigInt::zero()));
            }
        }
        let slots: Vec<(usize, BigInt)> = free_slots.into_iter().chain(torsion_slots).collect();
        let group = FgAbGroup::new(
            slots.iter().filter(|(_, o)| o.is_zero()).count(),
            slots.iter().filter(|(_, o)| !o.is_zero()).map(|(_, o)| o.clone()).collect(),
        )
        .expect("Smith normal form yields a divisibility chain");

        let basis_change = numerator.mul(rel_snf.u_inverse());
        let gen_cols: Vec<Vec<BigInt>> = slots.iter().map(|(i, _)| basis_change.column(*i)).collect();
        let generators = IntMatrix::from_columns(ambient, &gen_cols);

        Ok(Subquotient { ambient, group, generators, numerator, numerator_snf, adapt: rel_snf.u.clone(), slots })
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn into_group(self) -> FgAbGroup {
        self.group
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Representatives, one column per normal-form generator.
    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    /// Basis of the numerator lattice.
    pub fn numerator(&self) -> &IntMatrix {
        &self.numerator
    }

    /// Normal-form coordinates of the class of `v`, or `None` when `v` is
    /// not in the numerator.
    pub fn project(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient);
        let c = solve_with(&self.numerator_snf, self.numerator.cols(), v)?;
        let y = self.adapt.mul_vec(&c);
        Some(
            self.slots
                .iter()
                .map(|(i, o)| if o.is_zero() { y[*i].clone() } else { y[*i].mod_floor(o) })
                .collect(),
        )
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        solve_with(&self.numerator_snf, self.numerator.cols(), v).is_some()
    }
}

/// Lattice of `x` with `f(x) = 0` in the target, as independent columns.
pub fn kernel_lattice(f: &Homomorphism) -> IntMatrix {
    let n = f.source().len();
    let joined = f.matrix().hstack(&f.target().relation_matrix());
    let basis = kernel_basis(&joined);
    basis.submatrix(0, n, 0, basis.cols())
}

fn relations_plus(columns: &IntMatrix, group: &CyclicSum) -> IntMatrix {
    columns.hstack(&group.relation_matrix())
}

/// `ker(outgoing) / im(incoming)` with explicit generators.
pub fn homology_subquotient(incoming: &Homomorphism, outgoing: &Homomorphism) -> Result<Subquotient, FgAbError> {
    if incoming.target() != outgoing.source() {
        return Err(FgAbError::Mismatch(format!(
            "incoming map ends at {} but outgoing map starts at {}",
            incoming.target(),
            outgoing.source()
        )));
    }
    let composite = outgoing.compose(incoming)?;
    if !composite.is_zero() {
        return Err(FgAbError::CompositionNotZero(composite.matrix().to_string()));
    }
    let k = kernel_lattice(outgoing);
    let s = relations_plus(incoming.matrix(), incoming.target());
    Subquotient::new(k, &s)
}

pub fn homology_at(incoming: &Homomorphism, outgoing: &Homomorphism) -> Result<FgAbGroup, FgAbError> {
    homology_subquotient(incoming, outgoing).map(Subquotient::into_group)
}

/// `ker f` as a subquotient of the source coordinates; the generators are the inclusion.
pub fn kernel_subquotient(f: &Homomorphism) -> Subquotient {
    Subquotient::new(kernel_lattice(f), &f.source().relation_matrix()).expect("relations lie in the kernel")
}

pub fn kernel(f: &Homomorphism) -> FgAbGroup {
    kernel_subquotient(f).into_group()
}

/// `target / im f`; `project` realizes the quotient map.
pub fn cokernel_subquotient(f: &Homomorphism) -> Subquotient {
    let n = f.target().len();
    Subquotient::new(IntMatrix::identity(n), &relations_plus(f.matrix(), f.target()))
        .expect("everything lies in the full lattice")
}

pub fn cokernel(f: &Homomorphism) -> FgAbGroup {
    cokernel_subquotient(f).into_group()
}

/// `im f`, computed as `source / ker f`.
pub fn image(f: &Homomorphism) -> FgAbGroup {
    let n = f.source().len();
    Subquotient::new(IntMatrix::identity(n), &kernel_lattice(f))
        .expect("kernel lies in the full lattice")
        .into_group()
}

pub fn is_epimorphism(f: &Homomorphism) -> bool {
    cokernel(f).is_trivial()
}

pub fn is_monomorphism(f: &Homomorphism) -> bool {
    kernel(f).is_trivial()
}

/// Some `x` with `f(x) = y`, if `y` is in the image.
pub fn preimage(f: &Homomorphism, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let joined = relations_plus(f.matrix(), f.target());
    let snf = smith_normal_form(&joined);
    let sol = solve_with(&snf, joined.cols(), y)?;
    let mut x = sol[..f.source().len()].to_vec();
    f.source().reduce(&mut x);
    Some(x)
}

/// The kernel as a group together with its inclusion into the source.
pub fn kernel_inclusion(f: &Homomorphism) -> Homomorphism {
    let sq = kernel_subquotient(f);
    let src = sq.group().presentation();
    Homomorphism::new(src, f.source().clone(), sq.generators().clone()).expect("kernel inclusion")
}

/// The quotient map onto the cokernel.
pub fn cokernel_projection(f: &Homomorphism) -> Homomorphism {
    let sq = cokernel_subquotient(f);
    let n = f.target().len();
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            sq.project(&e).expect("unit vector in full lattice")
        })
        .collect();
    let tgt = sq.group().presentation();
    Homomorphism::new(f.target().clone(), tgt.clone(), IntMatrix::from_columns(tgt.len(), &cols))
        .expect("cokernel projection")
}

/// `Ext^1(a, b)`.
pub fn ext(a: &FgAbGroup, b: &FgAbGroup) -> FgAbGroup {
    let mut orders = Vec::new();
    for d in a.torsion() {
        orders.extend(std::iter::repeat_n(d.clone(), b.free_rank()));
        for c in b.torsion() {
            orders.push(c.gcd(d));
        }
    }
    let orders: Vec<BigInt> = orders.into_iter().filter(|o| !o.is_one()).collect();
    FgAbGroup::from_orders(&orders)
}

/// Reassembles a filtered group from its graded pieces, listed from the
/// bottom of the filtration upward. Returns the group only when every
/// extension is forced to split (`Ext(piece, lower) = 0`).
pub fn resolve_extensions(pieces: &[FgAbGroup]) -> Option<FgAbGroup> {
    let mut acc = FgAbGroup::trivial();
    for p in pieces {
        if p.is_trivial() {
            continue;
        }
        if !acc.is_trivial() && !ext(p, &acc).is_trivial() {
            return None;
        }
        acc = acc.direct_sum(p);
    }
    Some(acc)
}
