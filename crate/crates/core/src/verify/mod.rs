//! The check harness: schema validities over formula corpora, axiom
//! instances over model families, the ordinal copying machinery, and the
//! derivation of Scott's replacement. Every check produces a [`Report`];
//! failed reports carry a counterexample that [`replay`] reproduces.

mod axiom;
mod corpus;
mod driver;
mod family;
mod infinity;
mod props;
mod report;
mod schema;
mod scott;
pub mod suite;

pub use axiom::{check_axiom, check_instance, Bounds, PreparedAxiom, Scope};
pub use corpus::{corpus, functional_corpus, random_formula, STARRED, RAW};
pub use driver::{run_exhaustive, run_on, StructureCheck};
pub use family::{closed_family, FamilyError, FAMILY_RANK};
pub use infinity::{check_copy_relation, check_infinity_step, star_copies};
pub use props::{HierarchyCheck, QuotientCheck, Subsidiary2Check};
pub use report::{parse_records, replay, Counterexample, RecordError, Report, Witness};
pub use schema::{check_schema, PreparedSchema, SchemaError, SchemaId, Strictness};
pub use scott::check_scott;

use crate::eval::EvalError;
use crate::memstruct::StructError;
use crate::modelgen::GenError;
use crate::xlate::XlateError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Xlate(#[from] XlateError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("node {0} is not an ∈-ordinal with an ∈*-ordinal copy")]
    NoStarCopy(usize),
    #[error("bounds name node {node}, but the structure has {len} nodes")]
    BoundsExceedStructure { node: usize, len: usize },
}

/// Calls `f` on every tuple drawn from `lists` (first position most
/// significant) until it returns `false`.
pub(crate) fn for_each_tuple(lists: &[&[usize]], mut f: impl FnMut(&[usize]) -> bool) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let k = lists.len();
    let mut idx = vec![0usize; k];
    let mut tuple: Vec<usize> = lists.iter().map(|l| l[0]).collect();
    loop {
        if !f(&tuple) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                tuple[i] = lists[i][idx[i]];
                break;
            }
            idx[i] = 0;
            tuple[i] = lists[i][0];
        }
    }
}
