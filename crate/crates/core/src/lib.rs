//! Exact computation of groups of invertible phases on (G-)spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`fgab`] – integer matrices, Smith normal form, finitely generated
//!   abelian groups and their homomorphisms.
//! * [`dsl`] – the bracketed-section text format shared by data files.
//! * [`lattice`] – finite ambient groups with a named subgroup lattice.
//! * [`coeffsys`] – tabulated coefficient systems over the orbit category.
//! * [`gcw`] – finite equivariant CW pairs and presets.
//! * [`ahss`] – the equivariant Atiyah–Hirzebruch homology spectral sequence.
//! * [`thomcoh`] – the cohomological spectral sequence for Thom spectra over
//!   `RP^inf`, driven by Steenrod squares.
//! * [`lexseq`] – long exact sequence solving.

pub mod ahss;
pub mod coeffsys;
pub mod dsl;
pub mod fgab;
pub mod gcw;
pub mod lattice;
pub mod lexseq;
pub mod thomcoh;
