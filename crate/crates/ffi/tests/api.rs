use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qquery_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qq_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn builtin_analysis_round_trip() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(qq_program_builtin(cs("OR").as_ptr(), 0.0, &mut p), QqStatus::Ok);
        assert_eq!(qq_program_oracle_arity(p), 1);

        let mut r = ptr::null_mut();
        assert_eq!(qq_analyze(p, cs("or").as_ptr(), &mut r), QqStatus::Ok);
        assert!((qq_report_p_error_max(r) - 0.25).abs() < 1e-12);
        assert!((qq_report_q_max(r) - 1.0).abs() < 1e-12);
        let mut side = QqSidedness::Exact;
        assert_eq!(qq_report_sidedness(r, &mut side), QqStatus::Ok);
        assert_eq!(side, QqSidedness::OneSidedOn0);

        let want = [(0u64, 0.0), (1, 0.25), (2, 0.25), (3, 0.0)];
        assert_eq!(qq_report_function_count(r), 4);
        for (i, (bits, err)) in want.iter().enumerate() {
            let (mut b, mut e) = (0u64, 0.0);
            assert_eq!(qq_report_function(r, i, &mut b, &mut e), QqStatus::Ok);
            assert_eq!(b, *bits);
            assert!((e - err).abs() < 1e-12);
        }
        let (mut b, mut e) = (0u64, 0.0);
        assert_eq!(qq_report_function(r, 4, &mut b, &mut e), QqStatus::InvalidArgument);

        let mut probs = [0.0f64; 3];
        assert_eq!(qq_run_exact(p, 0b01, probs.as_mut_ptr()), QqStatus::Ok);
        assert!((probs[1] - 0.75).abs() < 1e-12 && probs[2] == 0.0);

        let mut text = ptr::null_mut();
        assert_eq!(qq_program_serialize(p, &mut text), QqStatus::Ok);
        let mut q = ptr::null_mut();
        assert_eq!(qq_program_parse(text, &mut q), QqStatus::Ok);
        qq_string_free(text);

        qq_report_free(r);
        qq_program_free(q);
        qq_program_free(p);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(qq_program_parse(ptr::null(), &mut p), QqStatus::NullPointer);
        assert_eq!(qq_program_parse(cs("qubits 2\noracle-arity 1\ngate BOGUS 0\n").as_ptr(), &mut p), QqStatus::Parse);
        assert!(last_error().contains("line 3"), "{}", last_error());
        assert_eq!(qq_program_builtin(cs("NOPE").as_ptr(), 0.0, &mut p), QqStatus::InvalidArgument);
        assert!(p.is_null());

        assert_eq!(qq_program_builtin(cs("OR").as_ptr(), 0.0, &mut p), QqStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(qq_analyze(p, cs("andor:2").as_ptr(), &mut r), QqStatus::Analysis);
        assert_eq!(qq_analyze(p, cs("maybe").as_ptr(), &mut r), QqStatus::InvalidArgument);
        qq_program_free(p);

        let mut t = 0.0;
        assert_eq!(qq_threshold(1.0, 1.5, 3, &mut t), QqStatus::InvalidArgument);
        assert!(qq_report_p_error_max(ptr::null()).is_nan());
        qq_program_free(ptr::null_mut());
        qq_report_free(ptr::null_mut());
        qq_string_free(ptr::null_mut());
    }
}

#[test]
fn tune_threshold_and_dfp() {
    unsafe {
        let (mut theta, mut p) = (0.0, 0.0);
        assert_eq!(qq_tune(cs("ANDOR2").as_ptr(), ptr::null(), 0.0, 0.0, &mut theta, &mut p), QqStatus::Ok);
        assert!((theta - 0.074909).abs() < 1e-5);
        assert!((p - 0.287315).abs() < 5e-6);

        let mut t = 0.0;
        assert_eq!(qq_threshold(1.0, 3.0, 2, &mut t), QqStatus::Ok);
        assert!((t - 1.0 / 3.0).abs() < 1e-15);

        let (mut n, mut d) = (0i64, 0i64);
        assert_eq!(qq_dfp_worst_case(1, false, &mut n, &mut d), QqStatus::Ok);
        assert_eq!((n, d), (2, 1));
        assert_eq!(qq_dfp_worst_case(9, false, &mut n, &mut d), QqStatus::InvalidArgument);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libqquery_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile_path("qquery_smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("run cc");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}-{}", std::process::id()))
}
