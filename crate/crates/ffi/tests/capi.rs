use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use wilson_loops_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(wl_last_error()) }.to_string_lossy().into_owned()
}

fn parse(words: &str, dim: usize) -> Result<*mut WlLoops, WlStatus> {
    let mut out = ptr::null_mut();
    match unsafe { wl_loops_parse(c(words).as_ptr(), dim, &mut out) } {
        WlStatus::Ok => Ok(out),
        s => Err(s),
    }
}

fn coeff(p: *const WlPoly, k: usize) -> String {
    read_string(|buf, cap, needed| unsafe { wl_poly_coeff(p, k, buf, cap, needed) })
}

fn read_string(f: impl Fn(*mut c_char, usize, *mut usize) -> WlStatus) -> String {
    let mut needed = 0usize;
    assert_eq!(f(ptr::null_mut(), 0, &mut needed), WlStatus::Ok);
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(f(buf.as_mut_ptr(), buf.len(), &mut needed), WlStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn solver_round_trip() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(wl_solver_new(c("top").as_ptr(), &mut s), WlStatus::Ok);
        let l = parse("commutator 1", 2).unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(wl_solver_polynomial(s, l, 6, &mut p), WlStatus::Ok);
        let cs: Vec<String> = (0..=6).map(|k| coeff(p, k)).collect();
        assert_eq!(cs, ["0", "0", "2", "0", "-1", "0", "0"]);
        assert_eq!(wl_poly_degree(p), 4);
        assert!((wl_poly_eval(p, 0.2) - 0.0784).abs() < 1e-12);
        assert!(wl_solver_memo_len(s) > 0);

        let mut g = ptr::null_mut();
        assert_eq!(wl_gauge_polynomial(l, &mut g), WlStatus::Ok);
        let text = read_string(|b, cap, n| wl_poly_to_string(p, b, cap, n));
        assert_eq!(text, read_string(|b, cap, n| wl_poly_to_string(g, b, cap, n)));
        let mut bound = 0usize;
        assert_eq!(wl_degree_bound(l, &mut bound), WlStatus::Ok);
        assert_eq!(bound, 4);
        let mut area = 9u64;
        assert_eq!(wl_loops_area(l, &mut area), WlStatus::Ok);
        assert_eq!(area, 0);

        wl_poly_free(g);
        wl_poly_free(p);
        wl_loops_free(l);
        wl_solver_free(s);
    }
}

#[test]
fn sequences_print_and_reparse() {
    unsafe {
        let l = parse("rect 1 1 ; rect 2 1", 2).unwrap();
        assert_eq!(wl_loops_count(l), 2);
        let printed = read_string(|b, cap, n| wl_loops_to_string(l, b, cap, n));
        let again = parse(&printed, 2).unwrap();
        assert_eq!(read_string(|b, cap, n| wl_loops_to_string(again, b, cap, n)), printed);
        let mut s = ptr::null_mut();
        assert_eq!(wl_solver_new(ptr::null(), &mut s), WlStatus::Ok);
        let mut p = ptr::null_mut();
        assert_eq!(wl_solver_polynomial(s, again, 4, &mut p), WlStatus::Ok);
        assert_eq!(coeff(p, 3), "1");
        let mut area = 0u64;
        assert_eq!(wl_loops_area(l, &mut area), WlStatus::Invalid);
        wl_poly_free(p);
        wl_solver_free(s);
        wl_loops_free(again);
        wl_loops_free(l);
    }
}

#[test]
fn status_codes() {
    unsafe {
        assert_eq!(parse("x+ y+", 2).unwrap_err(), WlStatus::Parse);
        assert!(last_error().contains("parse error"));
        assert_eq!(wl_loops_parse(ptr::null(), 2, &mut ptr::null_mut()), WlStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(wl_loops_parse(bad.as_ptr().cast(), 2, &mut ptr::null_mut()), WlStatus::InvalidUtf8);
        let mut s = ptr::null_mut();
        assert_eq!(wl_solver_new(c("sideways").as_ptr(), &mut s), WlStatus::Parse);
        assert_eq!(wl_solver_new(c("random:4").as_ptr(), ptr::null_mut()), WlStatus::NullPointer);

        assert_eq!(wl_solver_new(c("lex").as_ptr(), &mut s), WlStatus::Ok);
        assert!(last_error().is_empty());
        assert_eq!(wl_solver_set_budget(s, 3, 1000, 0), WlStatus::Ok);
        let l = parse("rect 2 2", 2).unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(wl_solver_polynomial(s, l, 4, &mut p), WlStatus::Budget);
        assert!(p.is_null());

        let d3 = parse("rect 1 1", 3).unwrap();
        assert_eq!(wl_gauge_polynomial(d3, &mut p), WlStatus::Unsupported);
        assert_eq!(wl_solver_set_budget(s, 1 << 20, 1000, 0), WlStatus::Ok);
        assert_eq!(wl_solver_polynomial(s, l, 4, &mut p), WlStatus::Ok);
        let mut tiny = [0 as c_char; 1];
        let mut needed = 0usize;
        assert_eq!(wl_poly_to_string(p, tiny.as_mut_ptr(), tiny.len(), &mut needed), WlStatus::BufferTooSmall);
        assert!(needed > 1);

        assert_eq!(wl_poly_degree(ptr::null()), -1);
        assert!(wl_poly_eval(ptr::null(), 0.1).is_nan());
        assert_eq!(wl_solver_set_budget(ptr::null_mut(), 1, 1, 1), WlStatus::NullPointer);
        wl_poly_free(p);
        wl_loops_free(d3);
        wl_loops_free(l);
        wl_solver_free(s);
        wl_solver_free(ptr::null_mut());
        wl_loops_free(ptr::null_mut());
        wl_poly_free(ptr::null_mut());
        assert!(!CStr::from_ptr(wl_version()).to_bytes().is_empty());
    }
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/wilson_loops.h")).unwrap();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from the header");
    }
    assert!(header.contains("typedef struct WlSolver WlSolver;"));
    assert!(header.contains("WL_STATUS_BUFFER_TOO_SMALL = 7"));
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    // The static archive sits next to the test binary's deps directory.
    let exe = std::env::current_exe().unwrap();
    let profile_dir: PathBuf = exe.parent().and_then(Path::parent).unwrap().to_path_buf();
    let lib = profile_dir.join("libwilson_loops_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("wl_smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
