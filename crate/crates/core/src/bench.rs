//! Enumeration benchmark: times checksum-mode enumeration over a number of
//! chunks and reports throughput.

use std::time::Instant;

use serde::Serialize;

use crate::cla::run_cla;
use crate::cpc::{Digest, SolutionSpace};
use crate::error::Result;
use crate::instance::HlfInstance;

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub r: usize,
    pub chunks: usize,
    pub solutions: u64,
    /// Best wall time over the repeats, enumeration only.
    pub seconds: f64,
    pub solutions_per_second: f64,
    pub checksum: String,
    pub cla_seconds: f64,
}

/// Runs the linear-algebra stage once, then enumerates `repeats` times and
/// keeps the fastest run.
pub fn run_bench(
    inst: &HlfInstance,
    chunks: usize,
    repeats: usize,
    cap: usize,
) -> Result<BenchReport> {
    let t0 = Instant::now();
    let cla = run_cla(inst)?;
    let cla_seconds = t0.elapsed().as_secs_f64();
    let space = SolutionSpace::with_cap(inst, &cla, cap)?;
    let (seconds, digest) = time_digest(&space, chunks, repeats);
    Ok(BenchReport {
        n: inst.n(),
        r: cla.rank,
        chunks,
        solutions: digest.count,
        seconds,
        solutions_per_second: digest.count as f64 / seconds.max(1e-12),
        checksum: digest.hex(),
        cla_seconds,
    })
}

/// Best-of-`repeats` wall time of [`SolutionSpace::digest_parallel`].
pub fn time_digest(space: &SolutionSpace, chunks: usize, repeats: usize) -> (f64, Digest) {
    let mut best = f64::INFINITY;
    let mut digest = Digest::default();
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        digest = std::hint::black_box(space.digest_parallel(chunks));
        best = best.min(t.elapsed().as_secs_f64());
    }
    (best, digest)
}
