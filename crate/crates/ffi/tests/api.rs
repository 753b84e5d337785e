use coext_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    coext_string_free(p);
    s
}

unsafe fn last_error() -> String {
    let p = coext_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn structure(text: &str) -> *mut CoextStructure {
    let mut s = ptr::null_mut();
    assert_eq!(coext_structure_parse(c(text).as_ptr(), &mut s), CoextStatus::Ok);
    s
}

unsafe fn formula(text: &str) -> *mut CoextFormula {
    let mut f = ptr::null_mut();
    assert_eq!(coext_formula_parse(c(text).as_ptr(), &mut f), CoextStatus::Ok);
    f
}

#[test]
fn build_and_query() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(coext_structure_new(3, &mut s), CoextStatus::Ok);
        assert_eq!(coext_structure_add_edge(s, 0, 2), CoextStatus::Ok);
        assert_eq!(coext_structure_len(s), 3);
        let mut b = true;
        // node 2 = {0} while 1 is co-extensional with 0
        assert_eq!(coext_structure_is_set(s, 2, &mut b), CoextStatus::Ok);
        assert!(!b);
        assert_eq!(coext_structure_coext(s, 0, 1, &mut b), CoextStatus::Ok);
        assert!(b);
        assert_eq!(coext_structure_memstar(s, 0, 2, &mut b), CoextStatus::Ok);
        assert!(!b);

        assert_eq!(coext_structure_add_edge(s, 0, 7), CoextStatus::OutOfRange);
        assert!(last_error().contains('7'));
        assert_eq!(coext_structure_is_set(s, 3, &mut b), CoextStatus::OutOfRange);

        let mut text = ptr::null_mut();
        assert_eq!(coext_structure_to_string(s, &mut text), CoextStatus::Ok);
        let text = take(text);
        let back = structure(&text);
        assert_eq!(coext_structure_len(back), 3);
        coext_structure_free(back);
        coext_structure_free(s);
    }
}

#[test]
fn quotient_collapses_classes() {
    unsafe {
        let s = structure("nodes 2\n");
        let mut q = ptr::null_mut();
        assert_eq!(coext_structure_quotient(s, &mut q), CoextStatus::Ok);
        assert_eq!(coext_structure_len(q), 1);
        coext_structure_free(q);
        coext_structure_free(s);
    }
}

#[test]
fn evaluation() {
    unsafe {
        let s = structure("nodes 3\nmem 0 2\n");
        let f = formula("set(x)");
        let mut b = true;
        assert_eq!(coext_eval(s, f, c("x=2").as_ptr(), &mut b), CoextStatus::Ok);
        assert!(!b);
        assert_eq!(coext_eval(s, f, c("x=1").as_ptr(), &mut b), CoextStatus::Ok);
        assert!(b);
        assert_eq!(coext_eval(s, f, c("").as_ptr(), &mut b), CoextStatus::Eval);
        assert_eq!(coext_eval(s, f, c("x=").as_ptr(), &mut b), CoextStatus::Parse);
        coext_formula_free(f);

        let g = formula("x =* x");
        assert_eq!(coext_eval_all(s, g, &mut b), CoextStatus::Ok);
        assert!(b);
        coext_formula_free(g);
        coext_structure_free(s);
    }
}

#[test]
fn formula_roundtrip_and_translation() {
    unsafe {
        let f = formula("all z. (z in x -> z in y)");
        let mut text = ptr::null_mut();
        assert_eq!(coext_formula_to_string(f, &mut text), CoextStatus::Ok);
        assert_eq!(take(text), "all z. (z in x -> z in y)");

        let mut t = ptr::null_mut();
        assert_eq!(coext_formula_translate(f, CoextTranslation::ZfaStarred, &mut t), CoextStatus::Ok);
        assert_eq!(coext_formula_to_string(t, &mut text), CoextStatus::Ok);
        assert_eq!(take(text), "all z. (z in* x -> z in* y)");
        let mut e = ptr::null_mut();
        assert_eq!(coext_formula_translate(t, CoextTranslation::Expand, &mut e), CoextStatus::Ok);
        assert_eq!(coext_formula_to_string(e, &mut text), CoextStatus::Ok);
        assert!(!take(text).contains("in*"));
        coext_formula_free(e);
        coext_formula_free(t);
        coext_formula_free(f);

        let mut bad = ptr::null_mut();
        assert_eq!(coext_formula_parse(c("all . x").as_ptr(), &mut bad), CoextStatus::Parse);
        assert!(bad.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn axiom_and_schema_checks() {
    unsafe {
        let two = structure("nodes 2\n");
        let mut r = ptr::null_mut();
        assert_eq!(coext_check_axiom(two, c("extensionality").as_ptr(), -1, &mut r), CoextStatus::Ok);
        assert!(!coext_report_passed(r));
        let mut text = ptr::null_mut();
        assert_eq!(coext_report_to_string(r, true, &mut text), CoextStatus::Ok);
        assert!(!take(text).is_empty());
        coext_report_free(r);

        assert_eq!(coext_check_axiom(two, c("weak-ext").as_ptr(), -1, &mut r), CoextStatus::Ok);
        assert!(coext_report_passed(r));
        coext_report_free(r);

        assert_eq!(coext_check_schema(two, c("lemma1").as_ptr(), 0, &mut r), CoextStatus::Ok);
        assert!(coext_report_passed(r));
        assert!(coext_report_realized(r) > 0);
        coext_report_free(r);

        assert_eq!(coext_check_axiom(two, c("no-such-axiom").as_ptr(), -1, &mut r), CoextStatus::Parse);
        assert_eq!(coext_check_schema(two, c("lemma1").as_ptr(), 4, &mut r), CoextStatus::OutOfRange);
        coext_structure_free(two);
    }
}

#[test]
fn generated_structures() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(coext_structure_hf(2, &mut s), CoextStatus::Ok);
        assert_eq!(coext_structure_len(s), 4);
        coext_structure_free(s);
        assert_eq!(coext_structure_hf(9, &mut s), CoextStatus::OutOfRange);

        assert_eq!(coext_structure_standard_family(false, &mut s), CoextStatus::Ok);
        let base = coext_structure_len(s);
        coext_structure_free(s);
        assert_eq!(coext_structure_standard_family(true, &mut s), CoextStatus::Ok);
        assert!(coext_structure_len(s) > base);
        let mut r = ptr::null_mut();
        assert_eq!(coext_check_axiom(s, c("pairing*").as_ptr(), 2, &mut r), CoextStatus::Ok);
        assert!(coext_report_passed(r));
        coext_report_free(r);
        coext_structure_free(s);
    }
}

#[test]
fn null_and_utf8_handling() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(coext_structure_parse(ptr::null(), &mut s), CoextStatus::NullPointer);
        assert_eq!(coext_structure_new(1, ptr::null_mut()), CoextStatus::NullPointer);
        let mut b = false;
        assert_eq!(coext_structure_is_set(ptr::null(), 0, &mut b), CoextStatus::NullPointer);
        assert_eq!(coext_structure_len(ptr::null()), 0);
        assert!(!coext_report_passed(ptr::null()));
        coext_structure_free(ptr::null_mut());
        coext_formula_free(ptr::null_mut());
        coext_report_free(ptr::null_mut());
        coext_string_free(ptr::null_mut());

        let bad = [0xffu8, 0xfe, 0];
        let mut f = ptr::null_mut();
        assert_eq!(coext_formula_parse(bad.as_ptr().cast(), &mut f), CoextStatus::InvalidUtf8);

        // success clears the message
        assert_eq!(coext_structure_new(1, &mut s), CoextStatus::Ok);
        assert!(coext_last_error().is_null());
        coext_structure_free(s);
    }
}

#[test]
fn errors_are_thread_local() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(coext_structure_parse(ptr::null(), &mut s), CoextStatus::NullPointer);
    }
    std::thread::spawn(|| assert!(coext_last_error().is_null())).join().unwrap();
    assert!(!coext_last_error().is_null());
}
