//! IO, configuration, and suite orchestration around `vexan-core`.
//!
//! The core crate is pure computation; everything that touches files, JSON,
//! or threads lives here: run configs, grid-function CSV, JSONL/CSV report
//! writers, and the parallel suite runner.

pub mod config;
pub mod gridio;
pub mod report_io;

use std::time::Instant;

use rayon::prelude::*;
use vexan_core::harness::{run_experiment, ExperimentReport, ExperimentSpec};

/// Run a suite across `jobs` worker threads. Reports come back in spec
/// order and are bitwise-deterministic given the specs (only `runtime_ms`
/// varies between runs).
pub fn run_suite_parallel(specs: &[ExperimentSpec], jobs: usize) -> Vec<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let start = Instant::now();
                let mut report = run_experiment(spec);
                report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                report
            })
            .collect()
    })
}
