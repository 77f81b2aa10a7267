use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use codestat_ffi::*;

const LN2: f64 = std::f64::consts::LN_2;

fn last_error() -> Option<String> {
    let p = cs_last_error_message();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { cs_string_free(p) };
    Some(s)
}

fn rep3() -> *mut CsCode {
    let mut out = ptr::null_mut();
    let digits = [0u8, 0, 0, 1, 1, 1];
    assert_eq!(unsafe { cs_code_new(2, 3, digits.as_ptr(), 2, &mut out) }, CsStatus::Ok);
    out
}

fn hamming() -> *mut CsCode {
    let rows = [1u32, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1];
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cs_linear_code(2, 4, 7, rows.as_ptr(), &mut out) }, CsStatus::Ok);
    out
}

fn params(c: *const CsCode) -> CsCodeParams {
    let mut p = std::mem::MaybeUninit::<CsCodeParams>::uninit();
    assert_eq!(unsafe { cs_code_params(c, p.as_mut_ptr()) }, CsStatus::Ok);
    unsafe { p.assume_init() }
}

#[test]
fn code_construction_and_params() {
    let c = rep3();
    let p = params(c);
    assert_eq!((p.q, p.n, p.size, p.d, p.k_floor), (2, 3, 2, 3, 1));
    assert_eq!((p.rate_num, p.rate_den), (1, 3));
    assert_eq!(p.delta, 1.0);
    let mut buf = [9u8; 6];
    assert_eq!(unsafe { cs_code_words(c, buf.as_mut_ptr(), buf.len()) }, CsStatus::Ok);
    assert_eq!(buf, [0, 0, 0, 1, 1, 1]);
    assert_eq!(unsafe { cs_code_words(c, buf.as_mut_ptr(), 5) }, CsStatus::Input);
    unsafe { cs_code_free(c) };

    let h = hamming();
    let p = params(h);
    assert_eq!((p.size, p.d), (16, 3));
    unsafe { cs_code_free(h) };
}

#[test]
fn json_and_errors() {
    let mut out = ptr::null_mut();
    let text = CString::new(r#"{"q":3,"n":2,"words":["00","12"]}"#).unwrap();
    assert_eq!(unsafe { cs_code_from_json(text.as_ptr(), &mut out) }, CsStatus::Ok);
    assert_eq!(params(out).d, 2);
    unsafe { cs_code_free(out) };

    let bad = CString::new(r#"{"q":2,"n":2,"words":["03"]}"#).unwrap();
    assert_eq!(unsafe { cs_code_from_json(bad.as_ptr(), &mut out) }, CsStatus::Input);
    assert!(last_error().unwrap().contains("out of range"));

    assert_eq!(unsafe { cs_code_from_json(ptr::null(), &mut out) }, CsStatus::NullPointer);
    assert_eq!(unsafe { cs_code_params(ptr::null(), ptr::null_mut()) }, CsStatus::NullPointer);
    assert!(last_error().is_some());
    unsafe { cs_code_free(ptr::null_mut()) };

    // success clears the message
    let c = rep3();
    assert!(last_error().is_none());
    unsafe { cs_code_free(c) };
}

#[test]
fn reed_solomon_and_spoiling() {
    let mut rs = ptr::null_mut();
    assert_eq!(unsafe { cs_reed_solomon(7, 3, &mut rs) }, CsStatus::Ok);
    assert_eq!(params(rs).d, 5);
    assert_eq!(unsafe { cs_reed_solomon(6, 2, &mut rs) }, CsStatus::Precondition);

    let c = rep3();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cs_numeric_spoil(c, CsSpoilKind::Puncture as i32, &mut out) }, CsStatus::Ok);
    let p = params(out);
    assert_eq!((p.n, p.size, p.d), (2, 2, 2));
    unsafe { cs_code_free(out) };
    assert_eq!(unsafe { cs_numeric_spoil(c, CsSpoilKind::Shorten as i32, &mut out) }, CsStatus::Precondition);
    assert_eq!(unsafe { cs_numeric_spoil(c, 9, &mut out) }, CsStatus::Input);
    unsafe { cs_code_free(c) };
}

#[test]
fn thermodynamics() {
    let h = hamming();
    let (mut z, mut div) = (0.0, true);
    assert_eq!(unsafe { cs_partition_function(h, 1.0, 0, &mut z, &mut div) }, CsStatus::Ok);
    assert!(!div && (z - 8.0 / 7.0).abs() < 1e-12);
    assert_eq!(unsafe { cs_partition_function(h, 4.0 / 7.0, 0, &mut z, &mut div) }, CsStatus::Ok);
    assert!(div && z.is_infinite());
    assert_eq!(unsafe { cs_partition_function(h, -1.0, 0, &mut z, &mut div) }, CsStatus::Precondition);

    let lambda = [7.0 * LN2; 16];
    let mut beta = 0.0;
    assert_eq!(unsafe { cs_critical_beta(lambda.as_ptr(), lambda.len(), &mut beta) }, CsStatus::Ok);
    assert!((beta - 4.0 / 7.0).abs() < 1e-12);

    let mut v = 0.0;
    let idx = [1usize, 1];
    assert_eq!(
        unsafe { cs_kms_state_value(h, 4.0 / 7.0, idx.as_ptr(), 2, idx.as_ptr(), 2, &mut v) },
        CsStatus::Ok
    );
    assert!((v - 2f64.powi(-8)).abs() < 1e-15);
    let other = [1usize, 2];
    assert_eq!(
        unsafe { cs_kms_state_value(h, 1.0, idx.as_ptr(), 2, other.as_ptr(), 2, &mut v) },
        CsStatus::Ok
    );
    assert_eq!(v, 0.0);
    let out_of_range = [16usize];
    assert_eq!(
        unsafe { cs_kms_state_value(h, 1.0, out_of_range.as_ptr(), 1, idx.as_ptr(), 1, &mut v) },
        CsStatus::Input
    );

    assert_eq!(unsafe { cs_radon_nikodym_constant(h, &mut v) }, CsStatus::Ok);
    assert_eq!(v, 1.0 / 16.0);
    unsafe { cs_code_free(h) };
}

#[test]
fn fractal_quantities() {
    let h = hamming();
    let mut v = 0.0;
    assert_eq!(unsafe { cs_box_count_dimension(h, 3, &mut v) }, CsStatus::Ok);
    assert!((v - 4.0 / 7.0).abs() < 1e-12);
    assert_eq!(unsafe { cs_box_count_dimension(h, 0, &mut v) }, CsStatus::Precondition);

    let mut counts = [0usize; 8];
    let (mut d, mut holds) = (0usize, false);
    assert_eq!(
        unsafe { cs_threshold_scan(h, 0, counts.as_mut_ptr(), counts.len(), &mut d, &mut holds) },
        CsStatus::Ok
    );
    assert_eq!(d, 3);
    assert!(holds);
    assert_eq!(&counts[..4], &[1, 1, 1, 2]);
    assert_eq!(counts[7], 16);
    assert_eq!(
        unsafe { cs_threshold_scan(h, 0, counts.as_mut_ptr(), 7, &mut d, &mut holds) },
        CsStatus::Input
    );
    unsafe { cs_code_free(h) };

    let r = [0.5, 0.25, 0.25];
    assert_eq!(unsafe { cs_similarity_dimension(r.as_ptr(), 3, &mut v) }, CsStatus::Ok);
    assert!((v - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { cs_similarity_dimension(ptr::null(), 0, &mut v) }, CsStatus::Precondition);
}

fn target_dir() -> PathBuf {
    // tests/<binary> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/codestat.h")).unwrap();
    for name in ["cs_code_new", "cs_code_free", "cs_threshold_scan", "cs_last_error_message", "CS_STATUS_PANIC"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let lib = target_dir().join("libcodestat_ffi.a");
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler; skipping link test");
        return;
    };
    if !lib.exists() {
        eprintln!("{} not built; skipping link test", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
