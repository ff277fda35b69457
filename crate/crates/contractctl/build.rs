use std::path::Path;
use std::process::Command;

fn git(args: &[&str]) -> Option<String> {
    let out = Command::new("git").args(args).output().ok()?;
    if !out.status.success() {
        return None;
    }
    let s = String::from_utf8(out.stdout).ok()?.trim().to_string();
    (!s.is_empty()).then_some(s)
}

fn main() {
    let version = std::env::var("CARGO_PKG_VERSION").unwrap_or_default();
    let stamp = match git(&["describe", "--tags", "--dirty", "--always", "--long"]) {
        // `--always` without tags yields just the abbreviated hash.
        Some(d) if !d.contains("-g") => format!("v{version}-0-g{d}"),
        Some(d) => d,
        None => format!("v{version}-unknown"),
    };
    println!("cargo:rustc-env=CONTRACTCTL_BUILD_STAMP={stamp}");
    let manifest = std::env::var("CARGO_MANIFEST_DIR").unwrap_or_default();
    let head = Path::new(&manifest).join("../../.git/HEAD");
    if head.exists() {
        println!("cargo:rerun-if-changed={}", head.display());
    }
    println!("cargo:rerun-if-changed=build.rs");
}
