//! Executable machinery for interpreting ZFA and ZF inside set theory without
//! extensionality, where equality is read as co-extensionality (`=*`) and
//! membership as membership in sets (`∈*`).
//!
//! * [`fol`]: formula syntax, parser, printer, substitution.
//! * [`xlate`]: macro expansion of the starred predicates, ZFA translation,
//!   pure-set relativization and axiom-instance builders.
//! * [`memstruct`]: finite membership structures and their semantic constructions.
//! * [`eval`]: brute-force Tarskian evaluation.
//! * [`modelgen`]: structure families.
//! * [`verify`]: the check harness and its reports.
//! * [`cli`]: the `coext` command line.

pub mod cli;
pub mod eval;
pub mod fol;
pub mod memstruct;
pub mod modelgen;
pub mod verify;
pub mod xlate;

pub use eval::{Assignment, EvalError};
pub use fol::{Atom, Formula, Pred, Var};
pub use memstruct::{MemStructure, NodeSet};
