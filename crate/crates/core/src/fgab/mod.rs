//! Exact linear algebra over the integers and over finitely generated
//! abelian groups.

mod group;
mod hom;
mod matrix;
mod param;
mod snf;
mod subquotient;

use num_bigint::BigInt;
use thiserror::Error;

pub use group::{parse_orders, CyclicSum, FgAbGroup};
pub use hom::Homomorphism;
pub use matrix::{determinant, IntMatrix};
pub use param::{assignments, Entry, Param, ParametricHom, MAX_INSTANCES};
pub use snf::{kernel_basis, smith_normal_form, solve, SnfDecomposition};
pub use subquotient::{
    cokernel, cokernel_projection, cokernel_subquotient, ext, homology_at, homology_subquotient, image,
    is_epimorphism, is_monomorphism, kernel, kernel_inclusion, kernel_lattice, kernel_subquotient, preimage,
    resolve_extensions, Subquotient,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FgAbError {
    #[error("not in invariant-factor normal form: {0}")]
    NotNormalForm(String),
    #[error("cannot parse group: {0}")]
    Parse(String),
    #[error("matrix is {found:?}, expected {expected:?} (rows x columns)")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("ill-defined homomorphism: column {column} has order {source_order} but row {row} does not respect it")]
    IllDefined { column: usize, row: usize, source_order: BigInt },
    #[error("endpoint mismatch: {0}")]
    Mismatch(String),
    #[error("composite is not zero: {0}")]
    CompositionNotZero(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("undetermined entry at row {row}, column {column} lies in a free row and has no finite range")]
    Unbounded { row: usize, column: usize },
    #[error("map has {0} undetermined entries")]
    Undetermined(usize),
    #[error("too many undetermined combinations to enumerate (limit {MAX_INSTANCES})")]
    TooManyInstances,
    #[error("no assignment of the undetermined entries gives a well-defined map")]
    NoWellDefinedInstance,
}
