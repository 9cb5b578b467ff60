//! Exact computations in the mod-2 Kato-Milne cohomology of rational function
//! fields of characteristic 2.
//!
//! The ground field is GF(2); towers GF(2)(t_1)...(t_n)(x) are handled
//! exactly, with no floating point anywhere.  The center of the crate is the
//! local normal form of a differential form at a completion of the tower,
//! from which residues, splittings of the localization sequence, a zero
//! decision procedure, and the norm criterion for Pfister quadratic forms are
//! all derived.  An independent GF(2) linear-algebra witness search
//! cross-checks the structural pipeline at test time.

pub mod basis;
pub mod cli;
pub mod completion;
pub mod decide;
pub mod error;
pub mod factor;
pub mod forms;
pub mod linalg;
pub mod local;
pub mod matrix;
pub mod oracle;
pub mod parse;
pub mod place;
pub mod poly;
pub mod ratfun;
pub mod report;
pub mod residue;
pub mod series;
pub mod split;
pub mod teich;
pub mod tower;
pub mod unipoly;

pub use error::{Error, Result};
