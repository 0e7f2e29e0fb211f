//! Synthetic instance-annotation video simulation, surrogate pixel-embedding
//! generation, seeded mean-shift segmentation and tracking, and AOGM-based
//! DET/SEG/TRA evaluation.

pub mod annosim;
pub mod error;
pub mod io;
pub mod meanshift;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};

/// Build the global worker pool, capped by the `ASIST_THREADS` env var when
/// set. Results are identical at any thread count; the cap only bounds
/// resource use. Safe to call more than once; later calls are no-ops.
pub fn init_thread_pool() {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("ASIST_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n > 0 {
                builder = builder.num_threads(n);
            }
        }
    }
    let _ = builder.build_global();
}
