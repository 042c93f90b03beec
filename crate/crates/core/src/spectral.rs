//! Wavelength grids, filter banks, difference operators and the smoothness
//! prior on spectra.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::math;

/// Default regularizer added to `D₂ᵀD₂` so the smoothing matrix is invertible.
pub const DEFAULT_ALPHA: f64 = 1e-6;

/// Response of two neighbouring flat-top filters where they cross.
const FLAT_TOP_CROSSOVER: f64 = 0.5;

/// Uniformly sampled wavelength axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    lambda_min: f64,
    lambda_max: f64,
    n_bands: usize,
}

impl SpectralGrid {
    pub fn new(lambda_min: f64, lambda_max: f64, n_bands: usize) -> Result<Self> {
        if !lambda_min.is_finite() || !lambda_max.is_finite() || lambda_min >= lambda_max {
            return Err(invalid!(
                "wavelength range [{lambda_min}, {lambda_max}] must be finite and increasing"
            ));
        }
        if n_bands < 3 {
            return Err(invalid!("a spectral grid needs at least 3 bands, got {n_bands}"));
        }
        Ok(Self {
            lambda_min,
            lambda_max,
            n_bands,
        })
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn step(&self) -> f64 {
        (self.lambda_max - self.lambda_min) / (self.n_bands - 1) as f64
    }

    /// Center wavelength of band `k`.
    pub fn wavelength(&self, k: usize) -> f64 {
        if k + 1 == self.n_bands {
            return self.lambda_max;
        }
        self.lambda_min + k as f64 * self.step()
    }

    pub fn wavelengths(&self) -> Vec<f64> {
        (0..self.n_bands).map(|k| self.wavelength(k)).collect()
    }
}

impl Default for SpectralGrid {
    /// 440–920 nm in 10 nm steps (49 bands).
    fn default() -> Self {
        Self {
            lambda_min: 440.0,
            lambda_max: 920.0,
            n_bands: 49,
        }
    }
}

/// A sampled spectrum on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_bands() {
            return Err(invalid!(
                "spectrum has {} values but the grid has {} bands",
                values.len(),
                grid.n_bands()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("spectrum values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// The camera's `M×N` filter matrix: row `i` is the sampled transmittance of
/// channel `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    grid: SpectralGrid,
    responses: Matrix,
}

impl FilterBank {
    pub fn new(grid: SpectralGrid, responses: Matrix) -> Result<Self> {
        let (m, n) = (responses.rows(), responses.cols());
        if n != grid.n_bands() {
            return Err(invalid!(
                "filter responses have {n} columns but the grid has {} bands",
                grid.n_bands()
            ));
        }
        if m == 0 {
            return Err(invalid!("a filter bank needs at least one channel"));
        }
        if m >= n {
            return Err(invalid!(
                "{m} channels for {n} bands: the system must stay underdetermined"
            ));
        }
        for i in 0..m {
            let row = responses.row(i);
            if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(invalid!(
                    "response of channel {i} at band {j} is {} (must be finite and >= 0)",
                    row[j]
                ));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(invalid!("channel {i} has an all-zero response"));
            }
        }
        Ok(Self { grid, responses })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn responses(&self) -> &Matrix {
        &self.responses
    }

    pub fn n_channels(&self) -> usize {
        self.responses.rows()
    }

    pub fn n_bands(&self) -> usize {
        self.responses.cols()
    }

    /// The same bank with every transmittance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(invalid!("scale factor must be positive and finite, got {factor}"));
        }
        Self::new(self.grid, self.responses.scale(factor))
    }
}

/// Spectral covariance prior `K_s = (D₂ᵀD₂ + αI)⁻¹`.
///
/// `D₂ᵀD₂ + αI` is kept as the smoothing matrix; it is the matrix whose
/// inverse gives the minimum-curvature solution of `c = F s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessPrior {
    n_bands: usize,
    alpha: f64,
    k_s: Matrix,
}

impl SmoothnessPrior {
    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_s(&self) -> &Matrix {
        &self.k_s
    }

    /// `D₂ᵀD₂ + αI`.
    pub fn smoothing_matrix(&self) -> Matrix {
        smoothing_matrix(self.n_bands, self.alpha)
            .expect("dimensions were validated at construction")
    }

    /// Wraps an arbitrary symmetric positive-definite covariance, mainly for
    /// exercising the filters with priors other than the smoothness one.
    pub fn from_covariance(k_s: Matrix) -> Result<Self> {
        if !k_s.is_square() || k_s.rows() == 0 {
            return Err(invalid!("covariance must be square and non-empty"));
        }
        Cholesky::factor(&k_s)?;
        Ok(Self {
            n_bands: k_s.rows(),
            alpha: 0.0,
            k_s: k_s.symmetrized(),
        })
    }
}

/// `rows × cols` first-difference matrix: 1 on the diagonal, −1 on the first
/// superdiagonal.
pub fn build_first_difference(rows: usize, cols: usize) -> Result<Matrix> {
    if rows == 0 || cols != rows + 1 {
        return Err(invalid!(
            "first difference must be r x (r+1) with r >= 1, got {rows}x{cols}"
        ));
    }
    let mut d = Matrix::zeros(rows, cols);
    for i in 0..rows {
        d[(i, i)] = 1.0;
        d[(i, i + 1)] = -1.0;
    }
    Ok(d)
}

/// `(N−2) × N` second-difference matrix, the product of two first-difference
/// matrices. Every row is the stencil `(1, −2, 1)`.
pub fn build_second_difference(n_bands: usize) -> Result<Matrix> {
    if n_bands < 3 {
        return Err(invalid!("second differences need at least 3 bands, got {n_bands}"));
    }
    let outer = build_first_difference(n_bands - 2, n_bands - 1)?;
    let inner = build_first_difference(n_bands - 1, n_bands)?;
    outer.matmul(&inner)
}

fn smoothing_matrix(n_bands: usize, alpha: f64) -> Result<Matrix> {
    let d2 = build_second_difference(n_bands)?;
    let gram = d2.transpose().matmul(&d2)?;
    gram.add(&Matrix::identity(n_bands).scale(alpha))
}

/// Builds `K_s = (D₂ᵀD₂ + αI)⁻¹` through a Cholesky factorization.
pub fn build_smoothness_prior(n_bands: usize, alpha: f64) -> Result<SmoothnessPrior> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid!(
            "alpha must be positive and finite (D2^T D2 alone is singular), got {alpha}"
        ));
    }
    let m = smoothing_matrix(n_bands, alpha)?;
    let k_s = Cholesky::factor(&m)?.inverse().symmetrized();
    Ok(SmoothnessPrior {
        n_bands,
        alpha,
        k_s,
    })
}

/// `I_t ⊗ base`: `t` copies of `base` along the block diagonal.
pub fn kron_identity_extend(base: &Matrix, t: usize) -> Result<Matrix> {
    if t == 0 {
        return Err(invalid!("kronecker extension needs t >= 1"));
    }
    let (r, c) = (base.rows(), base.cols());
    let mut out = Matrix::zeros(t * r, t * c);
    for b in 0..t {
        for i in 0..r {
            for j in 0..c {
                out[(b * r + i, b * c + j)] = base[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `1_{t×t} ⊗ base` for a square `base`: a `t × t` tiling.
pub fn kron_ones_extend(base: &Matrix, t: usize) -> Result<Matrix> {
    if !base.is_square() {
        return Err(invalid!(
            "kron_ones_extend needs a square base, got {}x{}",
            base.rows(),
            base.cols()
        ));
    }
    tile(base, t)
}

/// `1_{t×t} ⊗ base` for any shape.
pub(crate) fn tile(base: &Matrix, t: usize) -> Result<Matrix> {
    if t == 0 {
        return Err(invalid!("kronecker extension needs t >= 1"));
    }
    let (r, c) = (base.rows(), base.cols());
    let mut out = Matrix::zeros(t * r, t * c);
    for bi in 0..t {
        for bj in 0..t {
            for i in 0..r {
                for j in 0..c {
                    out[(bi * r + i, bj * c + j)] = base[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

/// Generates `n_channels` overlapping flat-top filters.
///
/// Each filter is a super-Gaussian `exp(−|(λ − μᵢ)/w|^{2p})` with `p =
/// sharpness` and unit peak. Centers are spread uniformly over the grid and
/// snapped to the nearest band so that every filter peaks at exactly 1.0. The
/// width `w` is set so that neighbouring filters cross at half maximum.
pub fn generate_flat_top_bank(
    grid: SpectralGrid,
    n_channels: usize,
    sharpness: f64,
) -> Result<FilterBank> {
    if n_channels < 2 {
        return Err(invalid!("need at least 2 channels, got {n_channels}"));
    }
    if !(sharpness > 0.0) || !sharpness.is_finite() {
        return Err(invalid!("sharpness must be positive and finite, got {sharpness}"));
    }
    let n = grid.n_bands();
    if n_channels >= n {
        return Err(invalid!(
            "{n_channels} channels for {n} bands: the system must stay underdetermined"
        ));
    }
    let spacing = (grid.lambda_max() - grid.lambda_min()) / (n_channels - 1) as f64;
    let exponent = 2.0 * sharpness;
    let width = 0.5 * spacing / math::powf(-math::ln(FLAT_TOP_CROSSOVER), 1.0 / exponent);

    let mut responses = Matrix::zeros(n_channels, n);
    for i in 0..n_channels {
        let center_band = (i * (n - 1) + (n_channels - 1) / 2) / (n_channels - 1);
        let center = grid.wavelength(center_band);
        for k in 0..n {
            let x = ((grid.wavelength(k) - center) / width).abs();
            responses[(i, k)] = math::exp(-math::powf(x, exponent));
        }
    }
    FilterBank::new(grid, responses)
}
