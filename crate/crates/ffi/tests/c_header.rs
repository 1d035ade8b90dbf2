use std::env;
use std::path::{Path, PathBuf};
use std::process::Command;

/// `cargo test` only builds the rlib, so the static library is built here,
/// in its own target directory to stay clear of the outer build lock.
fn build_staticlib(manifest: &Path) -> PathBuf {
    let target = manifest.join("../../target/ffi-smoke");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "--manifest-path"])
        .arg(manifest.join("Cargo.toml"))
        .arg("--target-dir")
        .arg(&target)
        .status()
        .expect("run cargo");
    assert!(status.success());
    target.join("debug/libnhsim_ffi.a")
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = build_staticlib(manifest);
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1.000000");
}
