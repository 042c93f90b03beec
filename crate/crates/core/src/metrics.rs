//! Reconstruction quality: spectral angle and PSNR.

use core::f64::consts::PI;

use crate::cube::HyperCube;
use crate::error::{invalid, Error, Result};
use crate::math;

/// Spectra with an L2 norm below this count as all-zero.
const ZERO_NORM: f64 = 1e-12;

fn norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Angle between two spectra in radians.
///
/// A zero spectrum against a nonzero one is at angle `π`; two zero spectra are
/// at angle 0.
pub fn spectral_angle(s: &[f64], s_hat: &[f64]) -> Result<f64> {
    if s.len() != s_hat.len() {
        return Err(invalid!("spectra have lengths {} and {}", s.len(), s_hat.len()));
    }
    let (ns, nh) = (norm(s), norm(s_hat));
    match (ns < ZERO_NORM, nh < ZERO_NORM) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(PI),
        (false, false) => {}
    }
    // Half-angle form; acos of the normalized dot product loses precision
    // near 0 and returns ~1e-8 for identical spectra.
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in s.iter().zip(s_hat) {
        let (u, v) = (a / ns, b / nh);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    Ok(2.0 * math::atan2(math::sqrt(diff), math::sqrt(sum)))
}

fn check_same_shape(reference: &HyperCube, estimate: &HyperCube) -> Result<()> {
    let shape = |c: &HyperCube| (c.height(), c.width(), c.n_bands());
    if shape(reference) != shape(estimate) {
        return Err(invalid!(
            "reference is {:?}, estimate is {:?}",
            shape(reference),
            shape(estimate)
        ));
    }
    Ok(())
}

struct AngleStats {
    mean: f64,
    std: f64,
    n_evaluated: usize,
    n_zero_reference: usize,
}

fn angle_stats(reference: &HyperCube, estimate: &HyperCube) -> Result<AngleStats> {
    check_same_shape(reference, estimate)?;
    let (mut sum, mut sum_sq, mut n, mut skipped) = (0.0, 0.0, 0usize, 0usize);
    for (s, s_hat) in reference.pixels().zip(estimate.pixels()) {
        if norm(s) < ZERO_NORM {
            skipped += 1;
            continue;
        }
        let theta = spectral_angle(s, s_hat)?;
        sum += theta;
        sum_sq += theta * theta;
        n += 1;
    }
    if n == 0 {
        return Err(Error::NoEvaluablePixels);
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    Ok(AngleStats {
        mean,
        std: math::sqrt(var),
        n_evaluated: n,
        n_zero_reference: skipped,
    })
}

/// Mean and population standard deviation of the per-pixel spectral angle,
/// skipping pixels whose reference spectrum is zero.
pub fn mean_spectral_angle(reference: &HyperCube, estimate: &HyperCube) -> Result<(f64, f64)> {
    let stats = angle_stats(reference, estimate)?;
    Ok((stats.mean, stats.std))
}

/// PSNR in dB against a unit peak. Identical cubes give `+inf`.
pub fn psnr(reference: &HyperCube, estimate: &HyperCube) -> Result<f64> {
    check_same_shape(reference, estimate)?;
    let sse: f64 = reference
        .data()
        .iter()
        .zip(estimate.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mse = sse / reference.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * math::log10(mse))
}

/// Aggregate quality of one reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport {
    /// Radians.
    pub mean_theta: f64,
    /// Radians.
    pub theta_std: f64,
    /// dB, `+inf` for a perfect reconstruction.
    pub psnr: f64,
    pub n_evaluated: usize,
    pub n_zero_reference: usize,
}

pub fn evaluate(reference: &HyperCube, estimate: &HyperCube) -> Result<EvaluationReport> {
    let stats = angle_stats(reference, estimate)?;
    Ok(EvaluationReport {
        mean_theta: stats.mean,
        theta_std: stats.std,
        psnr: psnr(reference, estimate)?,
        n_evaluated: stats.n_evaluated,
        n_zero_reference: stats.n_zero_reference,
    })
}
