//! File formats, a multi-threaded reconstruction driver and the `hsrecon`
//! command line, on top of [`hsrecon_core`].

pub mod cli;
pub mod io;
pub mod manifest;
pub mod parallel;

pub use parallel::reconstruct_csr_parallel;
