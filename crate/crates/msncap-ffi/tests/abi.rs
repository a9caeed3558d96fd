use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use msncap_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(msn_last_error()) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { msn_string_free(p) };
    s
}

#[test]
fn triangle_capacity_and_deliveries() {
    let pairs = [1usize, 2, 1, 3, 2, 3];
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { msn_network_new(3, pairs.as_ptr(), 3, true, &mut net) }, MsnStatus::Ok);
    assert_eq!(unsafe { msn_network_sensors(net) }, 3);
    assert_eq!(unsafe { msn_network_events(net) }, 3);
    let (mut p, mut q) = (0u64, 0u64);
    assert_eq!(unsafe { msn_network_capacity(net, false, &mut p, &mut q) }, MsnStatus::Ok);
    assert_eq!((p, q), (8, 9));
    let mut buf = [0u64; 2];
    let mut written = 0usize;
    let st = unsafe { msn_network_deliveries(net, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, MsnStatus::BufferTooSmall);
    assert_eq!(written, 3);
    let mut buf = [0u64; 3];
    assert_eq!(unsafe { msn_network_deliveries(net, buf.as_mut_ptr(), 3, &mut written) }, MsnStatus::Ok);
    assert_eq!(buf, [3, 3, 2]);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { msn_network_to_json(net, &mut json) }, MsnStatus::Ok);
    let text = CString::new(take_string(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { msn_network_from_json(text.as_ptr(), &mut back) }, MsnStatus::Ok);
    assert_eq!(unsafe { msn_network_events(back) }, 3);
    unsafe {
        msn_network_free(back);
        msn_network_free(net);
    }
}

#[test]
fn construct_then_realize() {
    let mut arr = ptr::null_mut();
    assert_eq!(unsafe { msn_construct(MsnConstruction::Opt4, 6, 0, 0, &mut arr) }, MsnStatus::Ok);
    assert_eq!(unsafe { msn_arrangement_lines(arr) }, 6);
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { msn_arrangement_network(arr, &mut net) }, MsnStatus::Ok);
    let (mut p, mut q) = (0u64, 0u64);
    assert_eq!(unsafe { msn_network_capacity(net, false, &mut p, &mut q) }, MsnStatus::Ok);
    assert_eq!((p, q), (34, 39));

    let mut ok = true;
    let mut witness = ptr::null_mut();
    assert_eq!(unsafe { msn_realize(net, 3, &mut ok, &mut witness) }, MsnStatus::Ok);
    assert!(!ok);
    assert!(witness.is_null());
    assert_eq!(unsafe { msn_realize(net, 4, &mut ok, &mut witness) }, MsnStatus::Ok);
    assert!(ok);
    assert!(!witness.is_null());
    let mut regenerated = ptr::null_mut();
    assert_eq!(unsafe { msn_arrangement_network(witness, &mut regenerated) }, MsnStatus::Ok);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        msn_network_to_json(net, &mut a);
        msn_network_to_json(regenerated, &mut b);
    }
    assert_eq!(take_string(a), take_string(b));
    assert_eq!(unsafe { msn_realize(net, 5, &mut ok, ptr::null_mut()) }, MsnStatus::Unsupported);
    unsafe {
        msn_network_free(regenerated);
        msn_arrangement_free(witness);
        msn_network_free(net);
        msn_arrangement_free(arr);
    }
}

#[test]
fn arrangement_json_round_trip() {
    let text = CString::new(r#"{"lines": [{"slope": "1", "intercept": "0"}, {"slope": "-1", "intercept": "1/2"}]}"#).unwrap();
    let mut arr = ptr::null_mut();
    assert_eq!(unsafe { msn_arrangement_from_json(text.as_ptr(), &mut arr) }, MsnStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { msn_arrangement_to_json(arr, &mut out) }, MsnStatus::Ok);
    assert!(take_string(out).contains("\"1/2\""));
    unsafe { msn_arrangement_free(arr) };

    let bad = CString::new(r#"{"lines": [{"slope": "x", "intercept": "0"}]}"#).unwrap();
    let mut arr = ptr::null_mut();
    assert_eq!(unsafe { msn_arrangement_from_json(bad.as_ptr(), &mut arr) }, MsnStatus::InvalidArrangement);
    assert!(arr.is_null());
    assert!(last_error().contains("slope"));
}

#[test]
fn formulas_and_estimates() {
    let name = CString::new("max3").unwrap();
    let mut v = 0.0;
    let mut exact = ptr::null_mut();
    assert_eq!(unsafe { msn_formula(name.as_ptr(), 9, 0, &mut v, &mut exact) }, MsnStatus::Ok);
    assert_eq!(take_string(exact), "73/90");
    assert!((v - 73.0 / 90.0).abs() < 1e-15);

    let limit = CString::new("maxabs-limit").unwrap();
    assert_eq!(unsafe { msn_formula(limit.as_ptr(), 0, 3, &mut v, &mut exact) }, MsnStatus::Ok);
    assert!(exact.is_null());
    assert!((v - 0.46947).abs() < 1e-5);

    let unknown = CString::new("nope").unwrap();
    assert_eq!(unsafe { msn_formula(unknown.as_ptr(), 5, 0, &mut v, ptr::null_mut()) }, MsnStatus::InvalidArgument);

    let (mut m1, mut e1, mut m2, mut e2) = (0.0, 0.0, 0.0, 0.0);
    assert_eq!(unsafe { msn_estimate_capacity(20, 3, 8, 5, &mut m1, &mut e1) }, MsnStatus::Ok);
    assert_eq!(unsafe { msn_estimate_capacity(20, 3, 8, 5, &mut m2, &mut e2) }, MsnStatus::Ok);
    assert_eq!((m1, e1), (m2, e2));
    assert!(m1 > 0.0 && m1 <= 1.0);
}

#[test]
fn null_pointers_are_reported() {
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { msn_network_new(3, ptr::null(), 2, false, &mut net) }, MsnStatus::NullPointer);
    assert_eq!(unsafe { msn_network_new(3, ptr::null(), 0, false, ptr::null_mut()) }, MsnStatus::NullPointer);
    let (mut p, mut q) = (0u64, 0u64);
    assert_eq!(unsafe { msn_network_capacity(ptr::null(), false, &mut p, &mut q) }, MsnStatus::NullPointer);
    assert_eq!(unsafe { msn_network_sensors(ptr::null()) }, 0);
    unsafe {
        msn_network_free(ptr::null_mut());
        msn_arrangement_free(ptr::null_mut());
        msn_string_free(ptr::null_mut());
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/msncap.h")).expect("header generated by build.rs");
    for f in [
        "msn_last_error",
        "msn_status_name",
        "msn_string_free",
        "msn_network_new",
        "msn_network_from_json",
        "msn_network_to_json",
        "msn_network_free",
        "msn_network_capacity",
        "msn_network_deliveries",
        "msn_construct",
        "msn_arrangement_from_json",
        "msn_arrangement_to_json",
        "msn_arrangement_network",
        "msn_arrangement_free",
        "msn_realize",
        "msn_formula",
        "msn_estimate_capacity",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct MsnNetwork MsnNetwork;"));
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libmsncap_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let bin = out_dir.join("msncap_c_smoke");
    let status = Command::new(&cc)
        .arg(crate_dir().join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "8/9\n3 3 2\nmax4(5) = 13/15\n");
}
