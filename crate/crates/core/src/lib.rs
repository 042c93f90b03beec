//! Hyperspectral reconstruction from noisy multispectral captures.
//!
//! The crate reconstructs an `H×W×N` hyperspectral cube from an `H×W×M`
//! multispectral capture (`M < N`) with a non-local collaborative Wiener
//! filter: similar multispectral blocks are found by block matching, stacked,
//! and reconstructed jointly so that their independent noise averages out.
//! A per-pixel Wiener filter is provided as the baseline, together with the
//! simulation pieces needed to evaluate both (camera forward model, Poisson
//! and Gaussian noise, noise estimation, synthetic scenes) and the quality
//! metrics (spectral angle, PSNR).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, threading and
//! the command line live in the `hsrecon` companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod capture;
pub mod cube;
pub mod linalg;
pub mod matching;
pub mod metrics;
pub mod noise;
pub mod reconstruction;
pub mod scene;
pub mod spectral;

pub use capture::{forward_capture, normalize_capture, NormalizedCapture};
pub use cube::{HyperCube, MultiCube};
pub use error::{Error, Result};
pub use linalg::{Cholesky, Matrix};
pub use matching::{
    compute_tau, cube_distance, match_cubes, reference_positions, CsrParams, Match, MatchSet,
    Position,
};
pub use metrics::{evaluate, mean_spectral_angle, psnr, spectral_angle, EvaluationReport};
pub use noise::{
    awgn_corrupt, estimate_noise_variances, mean_variance, poisson_corrupt, IntensityLevel,
    NoiseCovariance,
};
pub use reconstruction::{
    aggregate, build_collaborative_filter, dense_collaborative_weights, reconstruct_csr,
    reconstruct_matchset, reconstruct_pixel_wiener, reconstruct_wiener_image, Accumulator,
    CollaborativeFilter, CsrPlan, FilterCache, SpectralBlock,
};
pub use scene::{synthetic_scene, SceneSpec};
pub use spectral::{
    build_first_difference, build_second_difference, build_smoothness_prior,
    generate_flat_top_bank, kron_identity_extend, kron_ones_extend, FilterBank, SmoothnessPrior,
    SpectralGrid, Spectrum, DEFAULT_ALPHA,
};
