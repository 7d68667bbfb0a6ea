use std::ffi::{c_char, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gpt_entropy_ffi::*;

const PR: &str = r#"{"theory":"boxworld","signature":"2:2,2:2",
  "table":["1/2",0,0,"1/2", "1/2",0,0,"1/2", "1/2",0,0,"1/2", 0,"1/2","1/2",0]}"#;
const INDEPENDENT_BITS: &str = r#"{"theory":"classical","signature":[2,2],"table":["1/4","1/4","1/4","1/4"]}"#;

fn load(json: &str) -> Result<*mut GptState, GptStatus> {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { gpt_state_from_json(c.as_ptr(), &mut out) } {
        GptStatus::Ok => Ok(out),
        s => Err(s),
    }
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let n = unsafe { gpt_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(511)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn pr_box_values() {
    let s = load(PR).unwrap();
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(gpt_state_subsystems(s), 2);
        assert_eq!(gpt_hhat(s, &mut v), GptStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(gpt_chsh(s, &mut v), GptStatus::Ok);
        assert_eq!(v, 4.0);
        assert_eq!(gpt_hhat_of(s, [0usize].as_ptr(), 1, &mut v), GptStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(gpt_decomposition_entropy(s, &mut v), GptStatus::Ok);
        assert!(v.abs() < 1e-9);
        gpt_state_free(s);
    }
}

#[test]
fn conditional_and_mutual_on_independent_bits() {
    let s = load(INDEPENDENT_BITS).unwrap();
    let (a, b) = ([0usize], [1usize]);
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(gpt_conditional(s, a.as_ptr(), 1, b.as_ptr(), 1, false, &mut v), GptStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(gpt_conditional(s, a.as_ptr(), 1, b.as_ptr(), 1, true, &mut v), GptStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(gpt_mutual(s, a.as_ptr(), 1, b.as_ptr(), 1, false, &mut v), GptStatus::Ok);
        assert!(v.abs() < 1e-9);
        gpt_state_free(s);
    }
}

#[test]
fn errors_map_to_status_codes() {
    assert_eq!(load("{").unwrap_err(), GptStatus::Parse);
    assert!(!last_error().is_empty());
    let signalling = r#"{"theory":"boxworld","signature":"2:2,2:2","table":[1,0,0,0, 1,0,0,0, 0,1,0,0, 0,1,0,0]}"#;
    assert_eq!(load(signalling).unwrap_err(), GptStatus::Signalling);
    assert!(last_error().contains("signalling"));
    let mut v = 0.0;
    unsafe {
        assert_eq!(gpt_hhat(ptr::null(), &mut v), GptStatus::NullPointer);
        let s = load(INDEPENDENT_BITS).unwrap();
        assert_eq!(gpt_chsh(s, &mut v), GptStatus::InvalidArgument);
        assert_eq!(gpt_hhat(s, ptr::null_mut()), GptStatus::NullPointer);
        assert_ne!(gpt_hhat_of(s, [7usize].as_ptr(), 1, &mut v), GptStatus::Ok);
        gpt_state_free(s);
        gpt_state_free(ptr::null_mut());
        assert_eq!(gpt_state_from_json(ptr::null(), &mut ptr::null_mut()), GptStatus::NullPointer);
    }
}

#[test]
fn last_error_truncates_with_terminator() {
    load("not json").unwrap_err();
    let full = unsafe { gpt_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 4];
    assert_eq!(unsafe { gpt_last_error(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(buf[3], 0);
}

/// Compiles the C smoke test against the generated header and static library.
#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libgpt_entropy_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let exe = tempfile_path("c_abi");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c_abi.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
    std::fs::remove_file(&exe).ok();
}

fn tempfile_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{name}-{}", std::process::id()))
}
