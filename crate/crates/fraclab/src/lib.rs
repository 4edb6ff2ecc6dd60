//! Tools for self-similar sets and the measures that live on them:
//! iterated function systems, stopping-time word families, atomic measure
//! constructions (natural, perturbed, packing-supported, cascade), a
//! bounded-Lipschitz distance with dual witnesses, and a multifractal
//! analysis pipeline (partition sums, Legendre transforms, coarse spectra,
//! local scaling exponents, box dimensions) with verification routines for
//! the scaling identities these constructions are supposed to satisfy.

pub mod cascade;
pub mod error;
pub mod ifs;
pub mod measure;
pub mod metric;
pub mod report;
pub mod spectrum;
pub mod svg;

pub use error::{Error, Result};
