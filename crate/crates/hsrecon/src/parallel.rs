//! Multi-threaded collaborative reconstruction.
//!
//! Reference positions are split into contiguous chunks, one per thread, each
//! accumulated separately and merged in chunk order. The partition depends
//! only on the thread count, so a given count always reproduces the same
//! bits; different counts differ only in floating-point summation order.

use std::thread;

use hsrecon_core::{CsrParams, CsrPlan, FilterBank, HyperCube, MultiCube, NoiseCovariance, Result};

pub fn reconstruct_csr_parallel(
    noisy: &MultiCube,
    bank: &FilterBank,
    cov: &NoiseCovariance,
    params: &CsrParams,
    threads: usize,
) -> Result<HyperCube> {
    let plan = CsrPlan::new(noisy, bank, cov, params)?;
    let references = plan.references();
    let threads = threads.clamp(1, references.len().max(1));
    if threads == 1 {
        let mut acc = plan.new_accumulator();
        plan.process(references, &mut acc)?;
        return plan.finish(&acc);
    }

    let chunk = references.len().div_ceil(threads);
    let partials = thread::scope(|s| {
        let handles: Vec<_> = references
            .chunks(chunk)
            .map(|part| {
                let plan = &plan;
                s.spawn(move || {
                    let mut acc = plan.new_accumulator();
                    plan.process(part, &mut acc).map(|_| acc)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("reconstruction worker panicked"))
            .collect::<Vec<_>>()
    });

    let mut total = plan.new_accumulator();
    for partial in partials {
        total.merge(&partial?)?;
    }
    plan.finish(&total)
}

pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}
