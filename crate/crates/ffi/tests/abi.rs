use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qfrac_ffi::*;

fn take(s: *mut c_char) -> Option<String> {
    if s.is_null() {
        return None;
    }
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { qfrac_string_free(s) };
    Some(out)
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn conductor(s: &str) -> *mut QfracConductor {
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { qfrac_conductor_parse(c(s).as_ptr(), &mut q) }, QfracStatus::Ok);
    q
}

#[test]
fn eval_round_trip() {
    let q = conductor("2/3");
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { qfrac_path_parse(c("(1, -1, -3)").as_ptr(), &mut m) },
        QfracStatus::Ok
    );
    assert_eq!(unsafe { qfrac_path_length(m) }, 2);
    assert_eq!(take(unsafe { qfrac_path_to_string(m) }).unwrap(), "(1, -1, -3)");
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { qfrac_eval(q, m, &mut e) }, QfracStatus::Ok);
    unsafe {
        assert!(qfrac_eval_is_path(e) && qfrac_eval_is_loop(e));
        assert_eq!(take(qfrac_eval_value(e)).unwrap(), "0");
        assert_eq!(take(qfrac_eval_weight_sq(e)).unwrap(), "1/9");
        assert_eq!(take(qfrac_eval_weight(e)).unwrap(), "1/3");
        qfrac_eval_free(e);
        qfrac_path_free(m);
        qfrac_conductor_free(q);
    }
}

#[test]
fn non_path_and_odd_weight() {
    let q = conductor("1/2");
    let entries = [0i64, 1];
    let mut m = ptr::null_mut();
    let mut e = ptr::null_mut();
    unsafe {
        assert_eq!(qfrac_path_new(entries.as_ptr(), 2, &mut m), QfracStatus::Ok);
        assert_eq!(qfrac_eval(q, m, &mut e), QfracStatus::Ok);
        assert!(!qfrac_eval_is_path(e));
        assert!(take(qfrac_eval_value(e)).is_none());
        qfrac_eval_free(e);
        qfrac_path_free(m);
        assert_eq!(qfrac_path_parse(c("1,-2").as_ptr(), &mut m), QfracStatus::Ok);
        assert_eq!(qfrac_eval(q, m, &mut e), QfracStatus::Ok);
        assert_eq!(take(qfrac_eval_weight(e)).unwrap(), "sqrt(1/2)");
        qfrac_eval_free(e);
        qfrac_path_free(m);
        qfrac_conductor_free(q);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(
            qfrac_conductor_parse(c("-2/3").as_ptr(), &mut q),
            QfracStatus::InvalidArgument
        );
        assert!(q.is_null());
        assert!(take(qfrac_last_error()).unwrap().contains("positive"));
        assert_eq!(qfrac_conductor_new(2, 4, &mut q), QfracStatus::Ok);
        qfrac_conductor_free(q);
        let mut m = ptr::null_mut();
        assert_eq!(qfrac_path_parse(c("1,x").as_ptr(), &mut m), QfracStatus::Parse);
        assert_eq!(qfrac_path_parse(ptr::null(), &mut m), QfracStatus::NullPointer);
        assert_eq!(qfrac_path_new(ptr::null(), 0, &mut m), QfracStatus::InvalidArgument);
        assert_eq!(
            qfrac_eval(ptr::null(), ptr::null(), ptr::null_mut()),
            QfracStatus::NullPointer
        );
        // NULL handles are tolerated by accessors and destructors.
        assert_eq!(qfrac_path_length(ptr::null()), 0);
        assert_eq!(qfrac_search_len(ptr::null()), 0);
        qfrac_path_free(ptr::null_mut());
        qfrac_string_free(ptr::null_mut());
    }
}

#[test]
fn certificate_lines() {
    let good = qfrac::tables::TABLE1_FIXTURE.lines().next().unwrap();
    let tampered = good.replace("\"weight_sq_den\":2", "\"weight_sq_den\":3");
    unsafe {
        assert_eq!(qfrac_verify_certificate_line(c(good).as_ptr()), QfracStatus::Ok);
        assert_eq!(
            qfrac_verify_certificate_line(c(&tampered).as_ptr()),
            QfracStatus::Verification
        );
        assert_eq!(
            qfrac_verify_certificate_line(c("{\"kind\":").as_ptr()),
            QfracStatus::Parse
        );
        let mut failed = 99;
        let all = c(qfrac::tables::TABLE1_FIXTURE);
        assert_eq!(qfrac_verify_certificates(all.as_ptr(), &mut failed), QfracStatus::Ok);
        assert_eq!(failed, 0);
        let mixed = c(&format!("{good}\n{tampered}\n"));
        assert_eq!(
            qfrac_verify_certificates(mixed.as_ptr(), &mut failed),
            QfracStatus::Verification
        );
        assert_eq!(failed, 1);
    }
}

#[test]
fn searches_agree() {
    let q = conductor("3/2");
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(qfrac_brute_force(q, 4, 5, &mut a), QfracStatus::Ok);
        assert_eq!(qfrac_diophantine_search(q, 4, 5, &mut b), QfracStatus::Ok);
        assert!(qfrac_search_exhaustive(a) && qfrac_search_exhaustive(b));
        let n = qfrac_search_len(a);
        assert!(n > 0);
        assert_eq!(n, qfrac_search_len(b));
        for i in 0..n {
            let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(qfrac_search_get(a, i, &mut x), QfracStatus::Ok);
            assert_eq!(qfrac_search_get(b, i, &mut y), QfracStatus::Ok);
            assert_eq!(take(qfrac_path_to_string(x)), take(qfrac_path_to_string(y)));
            assert_eq!(take(qfrac_search_weight_sq(a, i)), take(qfrac_search_weight_sq(b, i)));
            qfrac_path_free(x);
            qfrac_path_free(y);
        }
        let mut none = ptr::null_mut();
        assert_eq!(qfrac_search_get(a, n, &mut none), QfracStatus::OutOfRange);
        qfrac_search_free(a);
        qfrac_search_free(b);
        qfrac_conductor_free(q);
    }
}

#[test]
fn header_lists_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qfrac.h")).unwrap();
    for name in [
        "qfrac_path_parse",
        "qfrac_eval_weight_sq",
        "qfrac_verify_certificate_line",
        "qfrac_search_get",
        "qfrac_last_error",
        "QFRAC_STATUS_VERIFICATION",
        "typedef struct QfracPath QfracPath",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C smoke test against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib_dir = deps.parent().unwrap().to_path_buf();
    let lib = lib_dir.join("libqfrac_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("loop 1 weight^2 1/9"), "{text}");
}
