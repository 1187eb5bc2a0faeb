#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semcell::catalog::write_catalog;
use semcell_core::geo::QuakeEvent;
use semcell_core::rng::KeyedStream;

pub const DAY_MS: i64 = 86_400_000;
/// 2010-01-01T00:00:00Z
pub const T0: i64 = 1_262_304_000_000;

pub fn semcell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semcell"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("spawn semcell")
}

pub fn semcell_ok(args: &[&str]) -> Output {
    let out = semcell(args);
    assert!(
        out.status.success(),
        "semcell {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn rng(seed: u64) -> KeyedStream {
    KeyedStream::new(seed, 0x7465_7374, 0, 0)
}

pub fn uniform(r: &mut KeyedStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.next_f64()
}

pub fn index(r: &mut KeyedStream, n: usize) -> usize {
    (r.next_u64() % n as u64) as usize
}

pub fn quake(t: i64, lat: f64, lon: f64, mag: f64) -> QuakeEvent {
    QuakeEvent::new(t, lat, lon, 10.0, mag).unwrap()
}

pub fn save_catalog(path: &Path, events: &[QuakeEvent]) {
    let file = std::fs::File::create(path).unwrap();
    write_catalog(file, events).unwrap();
}

/// Events spread over a `rows x cols` block of 0.5 degree meshes, one hour apart,
/// visiting the meshes in a shuffled but deterministic order.
pub fn grid_catalog(rows: usize, cols: usize, events: usize, seed: u64) -> Vec<QuakeEvent> {
    let mut r = rng(seed);
    (0..events)
        .map(|i| {
            let cell = index(&mut r, rows * cols);
            let lat = 30.0 + 0.5 * (cell / cols) as f64 + uniform(&mut r, 0.05, 0.45);
            let lon = 130.0 + 0.5 * (cell % cols) as f64 + uniform(&mut r, 0.05, 0.45);
            quake(
                T0 + i as i64 * 3_600_000,
                lat,
                lon,
                uniform(&mut r, 2.0, 5.5),
            )
        })
        .collect()
}

/// A small text corpus with a handful of recurring words.
pub fn small_corpus() -> String {
    let words = [
        "bank", "river", "money", "loan", "water", "fish", "rate", "shore", "COVID-19",
    ];
    let mut r = rng(99);
    let mut out = String::new();
    for _ in 0..60 {
        let n = 3 + index(&mut r, 4);
        let s: Vec<&str> = (0..n).map(|_| words[index(&mut r, words.len())]).collect();
        out.push_str(&s.join(" "));
        out.push_str(". ");
    }
    out
}

pub fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

pub fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

pub fn join(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
