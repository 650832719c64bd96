use std::ffi::{CStr, CString};
use std::ptr;

use locseries_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ls_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn group_round_trip() {
    let mut g = ptr::null_mut();
    let text = cstr("gens: x, y; rels: y^4 = x^2, x^2 = (x y)^2");
    assert_eq!(unsafe { ls_group_parse(text.as_ptr(), &mut g) }, LsStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { ls_group_num_generators(g, &mut n) }, LsStatus::Ok);
    assert_eq!(n, 2);

    let mut json = ptr::null_mut();
    let coeff = cstr("Zloc:2");
    assert_eq!(unsafe { ls_series_json(g, coeff.as_ptr(), 2, 100_000, &mut json) }, LsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { ls_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["quotients"][0]["torsion"], serde_json::json!([2, 2]));
    assert_eq!(v["quotients"][1]["torsion"], serde_json::json!([4]));
    unsafe { ls_group_free(g) };
}

#[test]
fn catalog_and_errors() {
    let mut g = ptr::null_mut();
    let text = cstr("catalog:p120");
    assert_eq!(unsafe { ls_group_parse(text.as_ptr(), &mut g) }, LsStatus::Ok);
    let mut json = ptr::null_mut();
    let bad = cstr("Zloc:4");
    assert_eq!(unsafe { ls_series_json(g, bad.as_ptr(), 1, 1000, &mut json) }, LsStatus::InvalidInput);
    assert!(last_error().contains("not prime"));
    let q = cstr("Q");
    assert_eq!(unsafe { ls_series_json(g, q.as_ptr(), 1, 1000, &mut json) }, LsStatus::Ok);
    unsafe { ls_string_free(json) };
    unsafe { ls_group_free(g) };

    let broken = cstr("gens: x; rels: y");
    assert_eq!(unsafe { ls_group_parse(broken.as_ptr(), &mut g) }, LsStatus::InvalidInput);
    assert!(last_error().contains("undeclared"));
    assert_eq!(unsafe { ls_group_parse(ptr::null(), &mut g) }, LsStatus::NullArgument);
    assert_eq!(unsafe { ls_group_parse(text.as_ptr(), ptr::null_mut()) }, LsStatus::NullArgument);
}

#[test]
fn cap_and_unsupported_statuses() {
    let mut g = ptr::null_mut();
    let text = cstr("catalog:example2");
    assert_eq!(unsafe { ls_group_parse(text.as_ptr(), &mut g) }, LsStatus::Ok);
    let mut json = ptr::null_mut();
    let q = cstr("Q");
    assert_eq!(unsafe { ls_series_json(g, q.as_ptr(), 3, 1000, &mut json) }, LsStatus::Unsupported);
    unsafe { ls_group_free(g) };

    let text = cstr("catalog:q8n(1)");
    assert_eq!(unsafe { ls_group_parse(text.as_ptr(), &mut g) }, LsStatus::Ok);
    let p = cstr("Zp:2");
    assert_eq!(unsafe { ls_series_json(g, p.as_ptr(), 2, 3, &mut json) }, LsStatus::CapExceeded);
    unsafe { ls_group_free(g) };
}

#[test]
fn seifert_functions() {
    let trefoil = [-1i64, 1, 0, -1];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ls_seifert_new(trefoil.as_ptr(), 2, &mut s) }, LsStatus::Ok);

    let (mut num, mut den) = (0i64, 0i64);
    assert_eq!(unsafe { ls_rho_cyclic(s, 4, &mut num, &mut den) }, LsStatus::Ok);
    assert_eq!((num, den), (-3, 2));
    assert_eq!(unsafe { ls_rho_cyclic(s, 0, &mut num, &mut den) }, LsStatus::InvalidInput);

    let (mut value, mut bound, mut exact) = (0.0, 1.0, false);
    assert_eq!(unsafe { ls_rho_integral(s, 1e-9, &mut value, &mut bound, &mut exact) }, LsStatus::Ok);
    assert!((value + 4.0 / 3.0).abs() < 1e-12);
    assert!(exact);
    assert_eq!(bound, 0.0);

    let (mut sig, mut singular) = (0i64, true);
    assert_eq!(unsafe { ls_signature(s, std::f64::consts::PI, &mut sig, &mut singular) }, LsStatus::Ok);
    assert_eq!((sig, singular), (-2, false));
    unsafe { ls_seifert_free(s) };

    let bad = [1i64, 0, 0, 1];
    assert_eq!(unsafe { ls_seifert_new(bad.as_ptr(), 2, &mut s) }, LsStatus::InvalidSeifert);
    assert!(last_error().contains("det"));
    assert_eq!(unsafe { ls_seifert_new(ptr::null(), 0, &mut s) }, LsStatus::Ok);
    assert_eq!(unsafe { ls_rho_cyclic(s, 3, &mut num, &mut den) }, LsStatus::Ok);
    assert_eq!((num, den), (0, 1));
    unsafe { ls_seifert_free(s) };
}

#[test]
fn version_and_null_frees() {
    let v = unsafe { CStr::from_ptr(ls_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    unsafe {
        ls_string_free(ptr::null_mut());
        ls_group_free(ptr::null_mut());
        ls_seifert_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/locseries.h")).unwrap();
    for f in [
        "ls_last_error",
        "ls_version",
        "ls_string_free",
        "ls_group_parse",
        "ls_group_free",
        "ls_group_num_generators",
        "ls_series_json",
        "ls_seifert_new",
        "ls_seifert_free",
        "ls_signature",
        "ls_rho_cyclic",
        "ls_rho_integral",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct LsGroup LsGroup;"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/locseries.h"))
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
