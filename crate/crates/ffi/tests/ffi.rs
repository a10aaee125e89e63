use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use probe_machine_ffi::*;

fn parse(text: &str) -> (PmStatus, *mut PmGraph) {
    let text = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    let status = unsafe { pm_graph_parse(text.as_ptr(), &mut g) };
    (status, g)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pm_last_error()) }.to_string_lossy().into_owned()
}

fn report(run: *const PmRun) -> serde_json::Value {
    let mut s: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { pm_run_to_json(run, &mut s) }, PmStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { pm_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

const HAMILTON8: &str = "1 4\n1 6\n1 7\n1 8\n2 6\n2 8\n3 5\n3 8\n4 5\n4 7\n4 8\n5 7\n";

#[test]
fn hamilton_round_trip() {
    let (status, g) = parse(HAMILTON8);
    assert_eq!(status, PmStatus::Ok);
    assert_eq!(unsafe { pm_graph_vertex_count(g) }, 8);
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { pm_solve_hamilton(g, ptr::null(), &mut run) }, PmStatus::Ok);
    assert_eq!(unsafe { pm_run_solution_count(run) }, 2);
    let r = report(run);
    assert_eq!(r["solutions"], serde_json::json!([[1, 4, 7, 5, 3, 8, 2, 6], [1, 6, 2, 8, 3, 5, 4, 7]]));
    assert_eq!(last_error(), "");
    unsafe {
        pm_run_free(run);
        pm_graph_free(g);
    }
}

#[test]
fn coloring_with_options() {
    let (_, g) = parse("1 2\n2 3\n1 3\n");
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { pm_solve_coloring(g, 3, false, ptr::null(), &mut run) }, PmStatus::Ok);
    assert_eq!(unsafe { pm_run_solution_count(run) }, 6);
    unsafe { pm_run_free(run) };
    assert_eq!(unsafe { pm_solve_coloring(g, 3, true, ptr::null(), &mut run) }, PmStatus::Ok);
    assert_eq!(unsafe { pm_run_solution_count(run) }, 1);
    unsafe { pm_run_free(run) };

    let opts = PmSolveOptions { mode: PmMode::Stochastic, seed: 5, ..pm_solve_options_default() };
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(pm_solve_coloring(g, 3, false, &opts, &mut a), PmStatus::Ok);
        assert_eq!(pm_solve_coloring(g, 3, false, &opts, &mut b), PmStatus::Ok);
    }
    let (ra, rb) = (report(a), report(b));
    assert_eq!(ra, rb);
    assert_eq!(ra["seed"], 5);
    unsafe {
        pm_run_free(a);
        pm_run_free(b);
        pm_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let (status, g) = parse("1 2\n2 zz\n");
    assert_eq!(status, PmStatus::Parse);
    assert!(g.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());

    let bad = [0xffu8, b' ', b'1', 0];
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { pm_graph_parse(bad.as_ptr().cast(), &mut g) }, PmStatus::Utf8);
    assert_eq!(unsafe { pm_graph_parse(ptr::null(), &mut g) }, PmStatus::Null);
    let (_, tiny) = parse("1 2\n2 3\n3 1\n");
    assert_eq!(unsafe { pm_graph_parse(c"1 2".as_ptr(), ptr::null_mut()) }, PmStatus::Null);

    let mut run = ptr::null_mut();
    assert_eq!(unsafe { pm_solve_hamilton(tiny, ptr::null(), &mut run) }, PmStatus::Infeasible);
    assert!(run.is_null());
    assert!(last_error().contains("at least 5"));
    assert_eq!(unsafe { pm_solve_hamilton(ptr::null(), ptr::null(), &mut run) }, PmStatus::Null);
    assert_eq!(unsafe { pm_solve_coloring(tiny, 0, false, ptr::null(), &mut run) }, PmStatus::InvalidArgument);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pm_run_to_json(ptr::null(), &mut s) }, PmStatus::Null);
    assert_eq!(unsafe { pm_run_solution_count(ptr::null()) }, 0);
    unsafe {
        pm_graph_free(tiny);
        pm_graph_free(ptr::null_mut());
        pm_run_free(ptr::null_mut());
        pm_string_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(pm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(manifest_dir().join("include/probe_machine.h")).unwrap();
    for name in [
        "pm_graph_parse", "pm_graph_free", "pm_graph_vertex_count", "pm_solve_options_default",
        "pm_solve_hamilton", "pm_solve_coloring", "pm_run_solution_count", "pm_run_to_json",
        "pm_string_free", "pm_run_free", "pm_last_error", "pm_version",
        "typedef struct PmGraph PmGraph", "typedef struct PmRun PmRun", "PM_STATUS_INFEASIBLE = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// The static library next to this test's deps directory.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libprobe_machine_ffi.a");
    lib.exists().then_some(lib)
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_against_the_header() {
    let (Some(lib), true) = (static_lib(), have("cc")) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = manifest_dir().join("tests/c/smoke.c");
    let include = manifest_dir().join("include");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg(format!("-I{}", include.display()))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(Path::new(&exe)).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), format!("{} 5 1\n", env!("CARGO_PKG_VERSION")));
}
