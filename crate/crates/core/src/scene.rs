//! Synthetic test scenes: a Voronoi partition of the image with one smooth
//! spectrum per region.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::HyperCube;
use crate::error::{invalid, Result};
use crate::math;
use crate::spectral::SpectralGrid;

/// Size, number of regions and seed of a synthetic scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneSpec {
    pub height: usize,
    pub width: usize,
    pub regions: usize,
    pub seed: u64,
}

impl SceneSpec {
    pub const DEFAULT_REGIONS: usize = 8;

    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            regions: Self::DEFAULT_REGIONS,
            seed: 0,
        }
    }
}

/// A sum of 2 to 4 Gaussian bumps over a small baseline, scaled to a peak
/// between 0.4 and 1.
fn region_spectrum<R: Rng>(grid: &SpectralGrid, rng: &mut R) -> Vec<f64> {
    let (lo, hi) = (grid.lambda_min(), grid.lambda_max());
    let baseline = rng.random_range(0.0..0.05);
    let bumps: Vec<(f64, f64, f64)> = (0..rng.random_range(2..=4))
        .map(|_| {
            (
                rng.random_range(lo..=hi),
                rng.random_range(40.0..100.0),
                rng.random_range(0.2..1.0),
            )
        })
        .collect();
    let mut values: Vec<f64> = grid
        .wavelengths()
        .into_iter()
        .map(|l| {
            baseline
                + bumps
                    .iter()
                    .map(|&(mu, sigma, a)| {
                        let z = (l - mu) / sigma;
                        a * math::exp(-0.5 * z * z)
                    })
                    .sum::<f64>()
        })
        .collect();
    let peak = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let brightness = rng.random_range(0.4..=1.0);
    for v in &mut values {
        *v *= brightness / peak;
    }
    values
}

/// Generates a piecewise-constant scene whose region spectra are smooth in
/// wavelength. The result is normalized to a peak of exactly 1.
pub fn synthetic_scene(spec: &SceneSpec, grid: SpectralGrid) -> Result<HyperCube> {
    if spec.height == 0 || spec.width == 0 {
        return Err(invalid!("scene size {}x{} must be nonzero", spec.height, spec.width));
    }
    if spec.regions == 0 {
        return Err(invalid!("a scene needs at least one region"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sites: Vec<(f64, f64)> = (0..spec.regions)
        .map(|_| {
            (
                rng.random_range(0.0..spec.height as f64),
                rng.random_range(0.0..spec.width as f64),
            )
        })
        .collect();
    let spectra: Vec<Vec<f64>> = (0..spec.regions).map(|_| region_spectrum(&grid, &mut rng)).collect();

    let mut data = Vec::with_capacity(spec.height * spec.width * grid.n_bands());
    for y in 0..spec.height {
        for x in 0..spec.width {
            let (py, px) = (y as f64 + 0.5, x as f64 + 0.5);
            let nearest = sites
                .iter()
                .enumerate()
                .map(|(i, &(sy, sx))| (i, (sy - py) * (sy - py) + (sx - px) * (sx - px)))
                .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
                .0;
            data.extend_from_slice(&spectra[nearest]);
        }
    }
    Ok(HyperCube::new(spec.height, spec.width, grid, data)?.normalized_to_peak())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_unit_peak() {
        let spec = SceneSpec { seed: 3, ..SceneSpec::new(16, 20) };
        let a = synthetic_scene(&spec, SpectralGrid::default()).unwrap();
        let b = synthetic_scene(&spec, SpectralGrid::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.peak(), 1.0);
        assert!(a.data().iter().all(|&v| v > 0.0));
        let c = synthetic_scene(&SceneSpec { seed: 4, ..spec }, SpectralGrid::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn region_count_bounds_distinct_spectra() {
        let spec = SceneSpec { regions: 3, ..SceneSpec::new(12, 12) };
        let cube = synthetic_scene(&spec, SpectralGrid::default()).unwrap();
        let mut distinct: Vec<&[f64]> = Vec::new();
        for p in cube.pixels() {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        assert!(!distinct.is_empty() && distinct.len() <= 3);
    }

    #[test]
    fn invalid_specs() {
        let g = SpectralGrid::default();
        assert!(synthetic_scene(&SceneSpec::new(0, 4), g).is_err());
        assert!(synthetic_scene(&SceneSpec { regions: 0, ..SceneSpec::new(4, 4) }, g).is_err());
    }
}
