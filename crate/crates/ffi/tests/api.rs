use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qwhittaker_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qw_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn canonical_round_trips_through_json() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(qw_config_canonical(4, 3, 2, 1, &mut c), QwStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(qw_config_to_json(c, &mut json), QwStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qw_config_from_json(json, &mut back), QwStatus::Ok);
        let (mut l, mut n, mut m1, mut m2) = (0, 0, 0, 0);
        assert_eq!(qw_config_sector(back, &mut l, &mut n, &mut m1, &mut m2), QwStatus::Ok);
        assert_eq!((l, n, m1, m2), (4, 3, 2, 1));
        qw_string_free(json);
        qw_config_free(back);
        qw_config_free(c);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(qw_config_canonical(3, 3, 2, 1, &mut c), QwStatus::SectorBounds);
        assert!(c.is_null());
        assert!(last_error().contains("must be < 1"), "{}", last_error());

        let text = CString::new(r#"{"L":5,"N":2,"rows":[[0,1],[2,3]]}"#).unwrap();
        assert_eq!(qw_config_from_json(text.as_ptr(), &mut c), QwStatus::InvalidConfiguration);
        let junk = CString::new("not json").unwrap();
        assert_eq!(qw_config_from_json(junk.as_ptr(), &mut c), QwStatus::InvalidConfiguration);
        assert_eq!(qw_config_from_json(ptr::null(), &mut c), QwStatus::InvalidArgument);

        let mut p = ptr::null_mut();
        let a = [1.0, -1.0];
        assert_eq!(qw_params_new(0.5, a.as_ptr(), 2, &mut p), QwStatus::InvalidArgument);
        assert_eq!(qw_params_new(1.5, a.as_ptr(), 1, &mut p), QwStatus::InvalidArgument);

        assert_eq!(qw_config_canonical(5, 2, 2, 1, &mut c), QwStatus::Ok);
        assert_eq!(last_error(), "");
        qw_config_free(c);
    }
}

#[test]
fn simulation_is_seeded_and_weights_are_finite() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(qw_config_canonical(7, 3, 2, 2, &mut c), QwStatus::Ok);
        let a = [1.0, 2.0, 0.5];
        let mut p = ptr::null_mut();
        assert_eq!(qw_params_new(0.3, a.as_ptr(), 3, &mut p), QwStatus::Ok);
        let mut w = 0.0;
        assert_eq!(qw_log_weight(c, p, &mut w), QwStatus::Ok);
        assert!(w.is_finite());

        let run = |seed| {
            let mut end = ptr::null_mut();
            let mut events = 0;
            assert_eq!(qw_simulate(c, p, 50.0, seed, &mut end, &mut events), QwStatus::Ok);
            let mut json = ptr::null_mut();
            assert_eq!(qw_config_to_json(end, &mut json), QwStatus::Ok);
            let s = CStr::from_ptr(json).to_string_lossy().into_owned();
            let (mut l, mut n, mut m1, mut m2) = (0, 0, 0, 0);
            assert_eq!(qw_config_sector(end, &mut l, &mut n, &mut m1, &mut m2), QwStatus::Ok);
            assert_eq!(m2, 2);
            qw_string_free(json);
            qw_config_free(end);
            (s, events)
        };
        assert_eq!(run(9), run(9));
        qw_params_free(p);
        qw_config_free(c);
    }
}

#[test]
fn stationarity_through_the_c_interface() {
    let q = CString::new("1/3").unwrap();
    let acts: Vec<CString> = ["1", "2", "1/2"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<*const std::ffi::c_char> = acts.iter().map(|s| s.as_ptr()).collect();
    unsafe {
        let mut report = ptr::null_mut();
        let status = qw_verify_stationarity(4, 3, 2, 1, q.as_ptr(), ptrs.as_ptr(), 3, &mut report);
        assert_eq!(status, QwStatus::Ok, "{}", last_error());
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert_eq!(v["max_residual"], "0");
        assert_eq!(v["passed"], true);
        qw_string_free(report);

        let wrong_rows = qw_verify_stationarity(4, 3, 2, 1, q.as_ptr(), ptrs.as_ptr(), 2, ptr::null_mut());
        assert_eq!(wrong_rows, QwStatus::InvalidArgument);
    }
}

fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = profile_dir().join("libqwhittaker_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("qw_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
