//! Shot-noise and Gaussian-noise simulation, and noise-variance estimation.
//!
//! Every random sample is drawn from a ChaCha8 stream keyed by
//! `(seed, channel, row)` and positioned by column, so the output does not
//! depend on the order in which pixels are visited.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cube::MultiCube;
use crate::error::{invalid, Result};
use crate::linalg::Matrix;
use crate::math;

/// Below this mean, Poisson variates are drawn by inversion; above it by
/// transformed rejection.
pub const POISSON_INVERSION_LIMIT: f64 = 30.0;

/// Photon-scale factor `l` of the shot-noise model `C ~ P(l·Č) / l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityLevel(f64);

impl IntensityLevel {
    pub fn new(level: f64) -> Result<Self> {
        if !(level > 0.0) || !level.is_finite() {
            return Err(invalid!("intensity level must be positive and finite, got {level}"));
        }
        Ok(Self(level))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Diagonal noise covariance: one variance per multispectral channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCovariance {
    variances: Vec<f64>,
}

impl NoiseCovariance {
    pub fn new(variances: Vec<f64>) -> Result<Self> {
        if let Some(i) = variances.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid!(
                "noise variance {} of channel {i} must be finite and >= 0",
                variances[i]
            ));
        }
        Ok(Self { variances })
    }

    /// The same variance on each of `channels` channels.
    pub fn uniform(channels: usize, variance: f64) -> Result<Self> {
        Self::new(alloc::vec![variance; channels])
    }

    pub fn zeros(channels: usize) -> Self {
        Self {
            variances: alloc::vec![0.0; channels],
        }
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    /// `M×M` diagonal matrix view.
    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&self.variances)
    }
}

/// Arithmetic mean of the per-channel variances (0 for an empty covariance).
pub fn mean_variance(cov: &NoiseCovariance) -> f64 {
    if cov.is_empty() {
        return 0.0;
    }
    cov.variances.iter().sum::<f64>() / cov.len() as f64
}

#[derive(Clone, Copy)]
enum Domain {
    Poisson = 0,
    Gaussian = 1,
}

struct SampleStreams {
    base: ChaCha8Rng,
    domain: Domain,
}

impl SampleStreams {
    fn new(seed: u64, domain: Domain, cube: &MultiCube) -> Result<Self> {
        if cube.n_channels() >= 1 << 31 || cube.height() >= 1 << 32 || cube.width() >= 1 << 32 {
            return Err(invalid!("cube too large for keyed noise streams"));
        }
        Ok(Self {
            base: ChaCha8Rng::seed_from_u64(seed),
            domain,
        })
    }

    /// Generator for the sample at `(channel, y, x)`. Each column owns a run of
    /// 2³² words of its row's stream.
    fn at(&self, channel: usize, y: usize, x: usize) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(((self.domain as u64) << 63) | ((channel as u64) << 32) | y as u64);
        rng.set_word_pos((x as u128) << 32);
        rng
    }
}

/// Applies `C ~ P(l·Č) / l` independently to every sample. Inputs are
/// expected in `[0, 1]`; negative values are rejected.
pub fn poisson_corrupt(clean: &MultiCube, level: IntensityLevel, seed: u64) -> Result<MultiCube> {
    if let Some(i) = clean.data().iter().position(|&v| v < 0.0) {
        return Err(invalid!(
            "shot noise needs nonnegative intensities, found {} at index {i}",
            clean.data()[i]
        ));
    }
    let l = level.get();
    let streams = SampleStreams::new(seed, Domain::Poisson, clean)?;
    let (h, w, m) = (clean.height(), clean.width(), clean.n_channels());
    let mut data = Vec::with_capacity(h * w * m);
    for y in 0..h {
        for x in 0..w {
            for (c, &v) in clean.pixel(y, x).iter().enumerate() {
                let mean = l * v;
                let count = if mean == 0.0 {
                    0.0
                } else {
                    sample_poisson(mean, &mut streams.at(c, y, x))
                };
                data.push(count / l);
            }
        }
    }
    MultiCube::new(h, w, m, data)
}

/// Adds zero-mean Gaussian noise with the channel's variance to every sample.
pub fn awgn_corrupt(clean: &MultiCube, variances: &NoiseCovariance, seed: u64) -> Result<MultiCube> {
    if variances.len() != clean.n_channels() {
        return Err(invalid!(
            "{} noise variances for {} channels",
            variances.len(),
            clean.n_channels()
        ));
    }
    let sigmas: Vec<f64> = variances.variances().iter().map(|&v| math::sqrt(v)).collect();
    let streams = SampleStreams::new(seed, Domain::Gaussian, clean)?;
    let (h, w, m) = (clean.height(), clean.width(), clean.n_channels());
    let mut data = Vec::with_capacity(h * w * m);
    for y in 0..h {
        for x in 0..w {
            for (c, &v) in clean.pixel(y, x).iter().enumerate() {
                let sigma = sigmas[c];
                if sigma == 0.0 {
                    data.push(v);
                    continue;
                }
                let z: f64 = StandardNormal.sample(&mut streams.at(c, y, x));
                data.push(v + sigma * z);
            }
        }
    }
    MultiCube::new(h, w, m, data)
}

/// Per-channel noise variance from the 3×3 Laplacian-difference estimator
/// `σ = √(π/2) · Σ|I ∗ L| / (6 (W−2)(H−2))` with
/// `L = [[1,−2,1],[−2,4,−2],[1,−2,1]]`. The kernel annihilates affine images.
pub fn estimate_noise_variances(noisy: &MultiCube) -> Result<NoiseCovariance> {
    let (h, w) = (noisy.height(), noisy.width());
    if h < 3 || w < 3 {
        return Err(invalid!("noise estimation needs at least 3x3 pixels, got {h}x{w}"));
    }
    const KERNEL: [[f64; 3]; 3] = [[1.0, -2.0, 1.0], [-2.0, 4.0, -2.0], [1.0, -2.0, 1.0]];
    let norm = math::sqrt(PI / 2.0) / (6.0 * (w - 2) as f64 * (h - 2) as f64);
    let variances = (0..noisy.n_channels())
        .map(|c| {
            let mut total = 0.0;
            for y in 1..h - 1 {
                for x in 1..w - 1 {
                    let mut response = 0.0;
                    for (dy, row) in KERNEL.iter().enumerate() {
                        for (dx, &k) in row.iter().enumerate() {
                            response += k * noisy.value(y + dy - 1, x + dx - 1, c);
                        }
                    }
                    total += response.abs();
                }
            }
            let sigma = total * norm;
            sigma * sigma
        })
        .collect();
    NoiseCovariance::new(variances)
}

fn sample_poisson<R: Rng>(mean: f64, rng: &mut R) -> f64 {
    if mean < POISSON_INVERSION_LIMIT {
        poisson_inversion(mean, rng)
    } else {
        poisson_ptrs(mean, rng)
    }
}

/// Sequential-search inversion of the Poisson CDF.
fn poisson_inversion<R: Rng>(mean: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = math::exp(-mean);
    let mut cdf = p;
    // The cap only triggers when rounding leaves the accumulated CDF below u.
    while u > cdf && k < 1000 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    k as f64
}

/// Hörmann's transformed rejection with squeeze (PTRS), valid for mean >= 10.
fn poisson_ptrs<R: Rng>(mean: f64, rng: &mut R) -> f64 {
    let slam = math::sqrt(mean);
    let loglam = math::ln(mean);
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = math::floor((2.0 * a / us + b) * u + mean + 0.43);
        if us >= 0.07 && v <= vr {
            return k;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = math::ln(v) + math::ln(inv_alpha) - math::ln(a / (us * us) + b);
        let rhs = -mean + k * loglam - math::ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn constant(h: usize, w: usize, m: usize, v: f64) -> MultiCube {
        MultiCube::new(h, w, m, vec![v; h * w * m]).unwrap()
    }

    #[test]
    fn poisson_of_zero_is_zero() {
        let clean = constant(8, 8, 2, 0.0);
        for l in [1.0, 10.0, 1000.0] {
            let noisy = poisson_corrupt(&clean, IntensityLevel::new(l).unwrap(), 5).unwrap();
            assert!(noisy.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn poisson_is_deterministic_and_nonnegative() {
        let clean = MultiCube::new(4, 5, 3, (0..60).map(|i| i as f64 / 60.0).collect()).unwrap();
        let level = IntensityLevel::new(40.0).unwrap();
        let a = poisson_corrupt(&clean, level, 11).unwrap();
        let b = poisson_corrupt(&clean, level, 11).unwrap();
        let c = poisson_corrupt(&clean, level, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.data().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn poisson_rejects_negative_input() {
        let clean = MultiCube::new(1, 2, 1, vec![0.5, -0.1]).unwrap();
        assert!(poisson_corrupt(&clean, IntensityLevel::new(10.0).unwrap(), 0).is_err());
        assert!(IntensityLevel::new(0.0).is_err());
    }

    #[test]
    fn poisson_sample_is_independent_of_neighbours() {
        // Cropping the cube must not change the samples of the remaining pixels.
        let big = MultiCube::new(3, 3, 1, vec![0.4; 9]).unwrap();
        let level = IntensityLevel::new(10.0).unwrap();
        let a = poisson_corrupt(&big, level, 9).unwrap();
        let small = MultiCube::new(1, 1, 1, vec![0.4]).unwrap();
        let b = poisson_corrupt(&small, level, 9).unwrap();
        assert_eq!(a.value(0, 0, 0), b.value(0, 0, 0));
    }

    #[test]
    fn awgn_zero_variance_is_identity() {
        let clean = MultiCube::new(3, 3, 2, (0..18).map(|i| i as f64 * 0.1).collect()).unwrap();
        let noisy = awgn_corrupt(&clean, &NoiseCovariance::zeros(2), 3).unwrap();
        assert_eq!(noisy, clean);
        assert!(awgn_corrupt(&clean, &NoiseCovariance::zeros(3), 3).is_err());
    }

    #[test]
    fn estimator_annihilates_constants_and_ramps() {
        let flat = constant(16, 16, 2, 0.7);
        let est = estimate_noise_variances(&flat).unwrap();
        assert!(est.variances().iter().all(|&v| v < 1e-12));

        let ramp: Vec<f64> = (0..16 * 16)
            .flat_map(|i| {
                let (y, x) = ((i / 16) as f64, (i % 16) as f64);
                [0.01 * x + 0.02 * y + 0.1, 0.5 - 0.01 * y]
            })
            .collect();
        let ramp = MultiCube::new(16, 16, 2, ramp).unwrap();
        let est = estimate_noise_variances(&ramp).unwrap();
        assert!(est.variances().iter().all(|&v| v < 1e-12));

        assert!(estimate_noise_variances(&constant(2, 8, 1, 0.0)).is_err());
    }

    #[test]
    fn mean_variance_examples() {
        let nine = NoiseCovariance::uniform(9, 0.01).unwrap();
        assert!((mean_variance(&nine) - 0.01).abs() < 1e-15);
        let two = NoiseCovariance::new(vec![0.0, 0.02]).unwrap();
        assert_eq!(mean_variance(&two), 0.01);
        assert!(NoiseCovariance::new(vec![-1.0]).is_err());
        let diag = two.as_matrix();
        assert_eq!(diag.as_slice(), &[0.0, 0.0, 0.0, 0.02]);
    }
}
