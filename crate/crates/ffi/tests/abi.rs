use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hyperfactor_ffi::*;

fn last_error() -> String {
    let p = hf_last_error();
    assert!(!p.is_null(), "an error message should be set");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn build(q: u32) -> *mut HfFactorisation {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hf_factorisation_new(q, &mut h) }, HfStatus::Ok);
    assert!(!h.is_null());
    h
}

fn take_json(p: *mut std::ffi::c_char) -> serde_json::Value {
    let v = serde_json::from_str(unsafe { CStr::from_ptr(p) }.to_str().unwrap()).unwrap();
    unsafe { hf_string_free(p) };
    v
}

#[test]
fn handle_lifecycle() {
    let h = build(11);
    unsafe {
        assert_eq!(hf_factorisation_q(h), 11);
        assert_eq!(hf_factorisation_len(h), 55);
        let mut ok = false;
        assert_eq!(hf_factorisation_verify_partition(h, &mut ok), HfStatus::Ok);
        assert!(ok);
        hf_factorisation_free(h);
        hf_factorisation_free(ptr::null_mut());
        assert_eq!(hf_factorisation_len(ptr::null()), 0);
    }
}

#[test]
fn bad_order_is_reported() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hf_factorisation_new(7, &mut h) }, HfStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains('7'));
    assert_eq!(unsafe { hf_factorisation_new(6, &mut h) }, HfStatus::InvalidArgument);
    assert_eq!(
        unsafe { hf_factorisation_new(5, ptr::null_mut()) },
        HfStatus::NullPointer
    );
}

#[test]
fn factor_edges_copy_out() {
    let h = build(5);
    unsafe {
        let mut need = 0usize;
        assert_eq!(
            hf_factorisation_factor_edges(h, 0, ptr::null_mut(), 0, &mut need),
            HfStatus::BufferTooSmall
        );
        assert_eq!(need, 6);
        let mut buf = vec![0u32; need];
        assert_eq!(
            hf_factorisation_factor_edges(h, 0, buf.as_mut_ptr(), buf.len(), &mut need),
            HfStatus::Ok
        );
        let mut seen: Vec<u32> = buf.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..6).collect::<Vec<_>>(), "a 1-factor covers each vertex once");
        assert_eq!(
            hf_factorisation_factor_edges(h, 99, buf.as_mut_ptr(), buf.len(), &mut need),
            HfStatus::InvalidArgument
        );
        hf_factorisation_free(h);
    }
}

#[test]
fn overlap_at_minus_one() {
    for (q, want) in [(11u32, 3usize), (17, 1)] {
        let h = build(q);
        let mut n = 0usize;
        assert_eq!(unsafe { hf_overlap(h, q - 1, 0, &mut n) }, HfStatus::Ok);
        assert_eq!(n, want, "q = {q}");
        assert_eq!(unsafe { hf_overlap(h, 0, 1, &mut n) }, HfStatus::InvalidArgument);
        assert_eq!(unsafe { hf_overlap(h, 1, 0, &mut n) }, HfStatus::InvalidArgument);
        unsafe { hf_factorisation_free(h) };
    }
}

#[test]
fn check_reports_json() {
    let h = build(17);
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(
            hf_check(h, HfProperty::C1f, HfMode::Full, 0, 0, 0, &mut json),
            HfStatus::Ok
        );
        let v = take_json(json);
        assert_eq!(v["computed"], false);
        assert_eq!(v["predicted"], false);
        assert!(v.get("witness").is_some());

        assert_eq!(
            hf_check(h, HfProperty::C1f, HfMode::Sampled, 1, 1, 0, &mut json),
            HfStatus::InvalidArgument
        );
        assert!(last_error().contains("Sampled"));
        assert_eq!(
            hf_check(h, HfProperty::U1f, HfMode::Full, 0, 0, 0, &mut json),
            HfStatus::InvalidArgument
        );
        hf_factorisation_free(h);
    }
    let h = build(8);
    unsafe {
        assert_eq!(
            hf_check(h, HfProperty::Uc1f, HfMode::Reduced, 0, 0, 0, &mut json),
            HfStatus::Ok
        );
        assert_eq!(take_json(json)["computed"], true);
        assert_eq!(
            hf_check(h, HfProperty::Hb1f, HfMode::Sampled, 20, 3, 1000, &mut json),
            HfStatus::Ok
        );
        let v = take_json(json);
        assert_eq!(v["mode"], "sampled");
        assert_eq!(v["computed"], true);
        hf_factorisation_free(h);
    }
}

#[test]
fn suite_from_toml() {
    let config = CString::new("q = [5, 8]\ntrace_ell = [3]\n").unwrap();
    let mut json = ptr::null_mut();
    let mut code = -1;
    unsafe {
        assert_eq!(hf_suite_run(config.as_ptr(), &mut json, &mut code), HfStatus::Ok);
    }
    assert_eq!(code, 0);
    let v = take_json(json);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);

    let bad = CString::new("q = [5]\nbogus = 1\n").unwrap();
    unsafe {
        assert_eq!(
            hf_suite_run(bad.as_ptr(), &mut json, ptr::null_mut()),
            HfStatus::InvalidArgument
        );
    }
    assert!(last_error().contains("bogus"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(hf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hyperfactor.h")
}

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "hf_last_error",
        "hf_version",
        "hf_string_free",
        "hf_factorisation_new",
        "hf_factorisation_free",
        "hf_factorisation_q",
        "hf_factorisation_len",
        "hf_factorisation_factor_edges",
        "hf_factorisation_verify_partition",
        "hf_overlap",
        "hf_check",
        "hf_suite_run",
        "typedef struct HfFactorisation HfFactorisation",
        "HF_STATUS_BUFFER_TOO_SMALL = 3",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !have_cc() {
        eprintln!("cc not found, skipping");
        return;
    }
    for lang in ["c", "c++"] {
        let out = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .output()
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

/// Links a C program against the static library built alongside this test.
#[test]
fn c_program_links_against_staticlib() {
    if !have_cc() {
        eprintln!("cc not found, skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libhyperfactor_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "hyperfactor.h"

int main(void) {
    HfFactorisation *h = NULL;
    if (hf_factorisation_new(4, &h) != HF_STATUS_INVALID_ARGUMENT || hf_last_error() == NULL) return 1;
    if (hf_factorisation_new(5, &h) != HF_STATUS_OK) return 2;
    if (hf_factorisation_len(h) != 10) return 3;
    char *json = NULL;
    if (hf_check(h, HF_PROPERTY_C1F, HF_MODE_FULL, 0, 0, 0, &json) != HF_STATUS_OK) return 4;
    int ok = strstr(json, "\"computed\":true") != NULL;
    hf_string_free(json);
    hf_factorisation_free(h);
    printf("ok\n");
    return ok ? 0 : 5;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "link failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
