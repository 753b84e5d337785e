//! C ABI over `coext`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_parse`
//! style functions and released with the matching `*_free`. Every fallible
//! function returns a [`CoextStatus`]; after a failure the message is
//! available from [`coext_last_error`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`coext_string_free`].

use coext::eval::{Assignment, Evaluator};
use coext::fol::{parse, Formula};
use coext::memstruct::MemStructure;
use coext::modelgen::{build_hf, standard_family};
use coext::verify::{check_axiom, check_schema, closed_family, Bounds, Report, SchemaId};
use coext::xlate::{expand, relativize_pure, translate_zfa, translate_zfa_starred, AxiomId};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoextStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    OutOfRange = 4,
    Eval = 5,
    Check = 6,
    Panic = 7,
}

/// How [`coext_formula_translate`] rewrites a formula.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoextTranslation {
    /// ZFA into the raw language
    Zfa = 0,
    /// ZFA into the starred language
    ZfaStarred = 1,
    /// relativized to pure sets
    Pure = 2,
    /// starred predicates expanded
    Expand = 3,
}

/// Opaque membership structure.
pub struct CoextStructure(MemStructure);

/// Opaque formula.
pub struct CoextFormula(Formula);

/// Opaque check report.
pub struct CoextReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(CoextStatus, String);

type Res<T> = Result<T, Fail>;

fn guard(f: impl FnOnce() -> Res<()>) -> CoextStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CoextStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CoextStatus::Panic
        }
    }
}

fn fail(status: CoextStatus) -> impl FnOnce(String) -> Fail {
    move |msg| Fail(status, msg)
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(Fail(CoextStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CoextStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| Fail(CoextStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Res<&'a mut T> {
    p.as_mut().ok_or_else(|| Fail(CoextStatus::NullPointer, format!("{what} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior NUL").into_raw()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// The message from the latest call on this thread if it failed, or NULL.
/// The pointer stays valid until the next call on this thread; do not free it.
#[no_mangle]
pub extern "C" fn coext_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coext_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A structure with `n` nodes and no edges.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_new(n: usize, out: *mut *mut CoextStructure) -> CoextStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(CoextStructure(MemStructure::new(n)));
        Ok(())
    })
}

/// Parses the text format (`nodes N`, `mem Z X`, `label X name`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_parse(text: *const c_char, out: *mut *mut CoextStructure) -> CoextStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = out_ptr(out, "out")?;
        let s: MemStructure = text.parse().map_err(|e: coext::memstruct::StructParseError| Fail(CoextStatus::Parse, e.to_string()))?;
        *out = boxed(CoextStructure(s));
        Ok(())
    })
}

/// The rank-`rank` hereditarily finite sets (`rank ≤ 4`).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_hf(rank: usize, out: *mut *mut CoextStructure) -> CoextStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = build_hf(rank).map_err(|e| Fail(CoextStatus::OutOfRange, e.to_string()))?;
        *out = boxed(CoextStructure(s));
        Ok(())
    })
}

/// Rank-3 hereditarily finite sets with two doppelgängers of the empty set
/// and one of its singleton, closed under the axiom witnesses when `closed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_standard_family(closed: bool, out: *mut *mut CoextStructure) -> CoextStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let mut s = standard_family();
        if closed {
            s = closed_family(&s).map_err(|e| Fail(CoextStatus::Check, e.to_string()))?;
        }
        *out = boxed(CoextStructure(s));
        Ok(())
    })
}

/// Releases a structure. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_free(s: *mut CoextStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Adds the edge `member ∈ container`.
///
/// # Safety
/// `s` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_add_edge(s: *mut CoextStructure, member: usize, container: usize) -> CoextStatus {
    guard(|| {
        let s = out_ptr(s, "structure")?;
        s.0.add_edge(member, container).map_err(|e| Fail(CoextStatus::OutOfRange, e.to_string()))
    })
}

/// Number of nodes; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_len(s: *const CoextStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

unsafe fn node_query(
    s: *const CoextStructure,
    nodes: &[usize],
    out: *mut bool,
    f: impl FnOnce(&MemStructure) -> bool,
) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        let out = out_ptr(out, "out")?;
        if let Some(&bad) = nodes.iter().find(|&&x| x >= s.0.len()) {
            return Err(Fail(CoextStatus::OutOfRange, format!("node {bad} out of range ({} nodes)", s.0.len())));
        }
        *out = f(&s.0);
        Ok(())
    })
}

/// Whether the extension of `x` is closed under co-extensionality.
///
/// # Safety
/// `s` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_is_set(s: *const CoextStructure, x: usize, out: *mut bool) -> CoextStatus {
    node_query(s, &[x], out, |s| s.is_set(x))
}

/// Whether `x` and `y` have the same members.
///
/// # Safety
/// `s` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_coext(s: *const CoextStructure, x: usize, y: usize, out: *mut bool) -> CoextStatus {
    node_query(s, &[x, y], out, |s| s.coext(x, y))
}

/// Whether `z ∈* x`.
///
/// # Safety
/// `s` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_memstar(s: *const CoextStructure, z: usize, x: usize, out: *mut bool) -> CoextStatus {
    node_query(s, &[z, x], out, |s| s.memstar(z, x))
}

/// The extensional quotient as a new structure.
///
/// # Safety
/// `s` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_quotient(s: *const CoextStructure, out: *mut *mut CoextStructure) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(CoextStructure(s.0.quotient().0));
        Ok(())
    })
}

/// The structure in the text format.
///
/// # Safety
/// `s` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_structure_to_string(s: *const CoextStructure, out: *mut *mut c_char) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        *out_ptr(out, "out")? = owned_string(s.0.to_string());
        Ok(())
    })
}

/// Parses a formula.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_formula_parse(text: *const c_char, out: *mut *mut CoextFormula) -> CoextStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = out_ptr(out, "out")?;
        let f = parse(text).map_err(|e| Fail(CoextStatus::Parse, e.to_string()))?;
        *out = boxed(CoextFormula(f));
        Ok(())
    })
}

/// Releases a formula. NULL is ignored.
///
/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coext_formula_free(f: *mut CoextFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// The formula as text.
///
/// # Safety
/// `f` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_formula_to_string(f: *const CoextFormula, out: *mut *mut c_char) -> CoextStatus {
    guard(|| {
        let f = handle(f, "formula")?;
        *out_ptr(out, "out")? = owned_string(f.0.to_string());
        Ok(())
    })
}

/// Translates a formula into a new handle.
///
/// # Safety
/// `f` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_formula_translate(
    f: *const CoextFormula,
    mode: CoextTranslation,
    out: *mut *mut CoextFormula,
) -> CoextStatus {
    guard(|| {
        let f = &handle(f, "formula")?.0;
        let out = out_ptr(out, "out")?;
        let t = match mode {
            CoextTranslation::Zfa => translate_zfa(f).map_err(|e| Fail(CoextStatus::Parse, e.to_string()))?,
            CoextTranslation::ZfaStarred => {
                translate_zfa_starred(f).map_err(|e| Fail(CoextStatus::Parse, e.to_string()))?
            }
            CoextTranslation::Pure => relativize_pure(f),
            CoextTranslation::Expand => expand(f),
        };
        *out = boxed(CoextFormula(t));
        Ok(())
    })
}

/// Evaluates `f` under `assignment` (such as `"x=0,y=2"`, may be empty).
///
/// # Safety
/// Handles must be valid, `assignment` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn coext_eval(
    s: *const CoextStructure,
    f: *const CoextFormula,
    assignment: *const c_char,
    out: *mut bool,
) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        let f = handle(f, "formula")?;
        let rho: Assignment = str_arg(assignment, "assignment")?.parse().map_err(fail(CoextStatus::Parse))?;
        let out = out_ptr(out, "out")?;
        *out = Evaluator::default().eval(&s.0, &f.0, &rho).map_err(|e| Fail(CoextStatus::Eval, e.to_string()))?;
        Ok(())
    })
}

/// Evaluates the universal closure of `f`.
///
/// # Safety
/// Handles must be valid and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn coext_eval_all(s: *const CoextStructure, f: *const CoextFormula, out: *mut bool) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        let f = handle(f, "formula")?;
        let out = out_ptr(out, "out")?;
        *out = Evaluator::default().eval_all_assignments(&s.0, &f.0).map_err(|e| Fail(CoextStatus::Eval, e.to_string()))?;
        Ok(())
    })
}

/// Checks a parameter-free axiom (`"pairing*"`, `"weak-ext"`, ...) with
/// parameters of rank at most `max_rank`, or all nodes when `max_rank < 0`.
///
/// # Safety
/// `s` must be a valid handle, `name` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn coext_check_axiom(
    s: *const CoextStructure,
    name: *const c_char,
    max_rank: i64,
    out: *mut *mut CoextReport,
) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        let name = str_arg(name, "name")?;
        let out = out_ptr(out, "out")?;
        let id = AxiomId::from_name(name).ok_or_else(|| Fail(CoextStatus::Parse, format!("unknown axiom `{name}`")))?;
        let bounds = usize::try_from(max_rank).map_or(Bounds::All, Bounds::RankAtMost);
        let r = check_axiom(&s.0, &id, &bounds).map_err(|e| Fail(CoextStatus::Check, e.to_string()))?;
        *out = boxed(CoextReport(r));
        Ok(())
    })
}

/// Checks a schema (`"lemma1"`, ...) over its default corpus of the given
/// depth (at most 3).
///
/// # Safety
/// `s` must be a valid handle, `tag` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn coext_check_schema(
    s: *const CoextStructure,
    tag: *const c_char,
    depth: usize,
    out: *mut *mut CoextReport,
) -> CoextStatus {
    guard(|| {
        let s = handle(s, "structure")?;
        let tag = str_arg(tag, "tag")?;
        let out = out_ptr(out, "out")?;
        let id = SchemaId::from_tag(tag).ok_or_else(|| Fail(CoextStatus::Parse, format!("unknown schema `{tag}`")))?;
        if depth > 3 {
            return Err(Fail(CoextStatus::OutOfRange, format!("corpus depth {depth} above 3")));
        }
        let r = check_schema(&s.0, id, &id.default_corpus(depth)).map_err(|e| Fail(CoextStatus::Check, e.to_string()))?;
        *out = boxed(CoextReport(r));
        Ok(())
    })
}

/// Whether the report has no failures; false for NULL.
///
/// # Safety
/// `r` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn coext_report_passed(r: *const CoextReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.passed())
}

/// Number of examined instances whose antecedent held; 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn coext_report_realized(r: *const CoextReport) -> u64 {
    r.as_ref().map_or(0, |r| r.0.realized)
}

/// The human-readable report, or the counterexample record with `records`.
///
/// # Safety
/// `r` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coext_report_to_string(r: *const CoextReport, records: bool, out: *mut *mut c_char) -> CoextStatus {
    guard(|| {
        let r = handle(r, "report")?;
        let text = if records { r.0.to_records() } else { r.0.to_text() };
        *out_ptr(out, "out")? = owned_string(text);
        Ok(())
    })
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `r` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coext_report_free(r: *mut CoextReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
