use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/<test-binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libattrmean_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("tpd 1032.37 header 1 version "), "{stdout}");
}

#[test]
fn header_declares_every_exported_function() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(manifest.join("include/attrmean.h")).unwrap();
    let source = std::fs::read_to_string(manifest.join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = source
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix("pub unsafe extern \"C\" fn ").or_else(|| l.trim_start().strip_prefix("pub extern \"C\" fn ")))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 20, "{exported:?}");
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
