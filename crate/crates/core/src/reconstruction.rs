//! Spectral reconstruction: the per-pixel Wiener filter and the collaborative
//! filter applied across stacks of matched blocks.
//!
//! For a stack of `T` matched multispectral pixels the collaborative filter is
//!
//! ```text
//! W = K_CSR F̂ᵀ (F̂ K_CSR F̂ᵀ + N̂)⁻¹,   F̂ = I_T ⊗ F,  K_CSR = 1_{T×T} ⊗ K_s,  N̂ = I_T ⊗ N.
//! ```
//!
//! Because every block row of `K_CSR` is the same, `W` has the closed form
//! `1_{T×T} ⊗ G` with `G = K_s Fᵀ (T·F K_s Fᵀ + N)⁻¹`: each stacked pixel is
//! reconstructed as `G` applied to the sum of the stack. Only the `M×M` system
//! `T·F K_s Fᵀ + N` has to be factored, which stays positive definite even for
//! zero noise. [`dense_collaborative_weights`] assembles the full Kronecker
//! form instead and is kept as a cross-check.

use alloc::vec;
use alloc::vec::Vec;

use crate::cube::{HyperCube, MultiCube};
use crate::error::{invalid, Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::matching::{compute_tau, match_cubes, reference_positions, CsrParams, MatchSet, Position};
use crate::noise::NoiseCovariance;
use crate::spectral::{
    build_smoothness_prior, kron_identity_extend, kron_ones_extend, tile, FilterBank,
    SmoothnessPrior, SpectralGrid, Spectrum,
};

/// Reconstruction weights for a stack of depth `t`, stored as the shared
/// `N×M` block of `W = 1_{t×t} ⊗ G`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollaborativeFilter {
    t: usize,
    grid: SpectralGrid,
    block: Matrix,
}

impl CollaborativeFilter {
    /// Stack depth.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn n_bands(&self) -> usize {
        self.block.rows()
    }

    pub fn n_channels(&self) -> usize {
        self.block.cols()
    }

    /// The `N×M` block `G` shared by every position of `W`.
    pub fn block(&self) -> &Matrix {
        &self.block
    }

    /// The full `(t·N)×(t·M)` weight matrix.
    pub fn weights(&self) -> Matrix {
        tile(&self.block, self.t).expect("t >= 1 by construction")
    }

    /// Applies `W` to a stacked vector of `t` multispectral pixels and returns
    /// the `t` reconstructed spectra, concatenated.
    pub fn apply(&self, stacked: &[f64]) -> Result<Vec<f64>> {
        let (n, m) = (self.n_bands(), self.n_channels());
        if stacked.len() != self.t * m {
            return Err(invalid!(
                "stacked input has length {}, expected {} x {}",
                stacked.len(),
                self.t,
                m
            ));
        }
        let mut out = vec![0.0; self.t * n];
        self.apply_into(stacked, &mut vec![0.0; m], &mut out);
        Ok(out)
    }

    fn apply_into(&self, stacked: &[f64], sum: &mut [f64], out: &mut [f64]) {
        let (n, m) = (self.n_bands(), self.n_channels());
        sum.fill(0.0);
        for pixel in stacked.chunks_exact(m) {
            for (s, v) in sum.iter_mut().zip(pixel) {
                *s += v;
            }
        }
        let (first, rest) = out.split_at_mut(n);
        self.block.matvec_into(sum, first);
        for slot in rest.chunks_exact_mut(n) {
            slot.copy_from_slice(first);
        }
    }
}

fn check_filter_inputs(
    bank: &FilterBank,
    prior: &SmoothnessPrior,
    cov: &NoiseCovariance,
    t: usize,
) -> Result<()> {
    if t == 0 {
        return Err(invalid!("stack depth must be >= 1"));
    }
    if prior.n_bands() != bank.n_bands() {
        return Err(invalid!(
            "prior has {} bands, filter bank has {}",
            prior.n_bands(),
            bank.n_bands()
        ));
    }
    if cov.len() != bank.n_channels() {
        return Err(invalid!(
            "{} noise variances for {} channels",
            cov.len(),
            bank.n_channels()
        ));
    }
    Ok(())
}

/// `F K_s`, shared by every stack depth.
fn projected_prior(bank: &FilterBank, prior: &SmoothnessPrior) -> Result<Matrix> {
    bank.responses().matmul(prior.k_s())
}

fn filter_from_projection(
    bank: &FilterBank,
    f_ks: &Matrix,
    signal_cov: &Matrix,
    cov: &NoiseCovariance,
    t: usize,
) -> Result<CollaborativeFilter> {
    let mut system = signal_cov.scale(t as f64);
    for (i, v) in cov.variances().iter().enumerate() {
        system[(i, i)] += v;
    }
    let chol = Cholesky::factor(&system)?;
    // Gᵀ = S⁻¹ F K_s, using the symmetry of K_s and S.
    let block = chol.solve_matrix(f_ks)?.transpose();
    Ok(CollaborativeFilter {
        t,
        grid: *bank.grid(),
        block,
    })
}

/// Builds the collaborative filter for stacks of depth `t`.
///
/// Fails with [`Error::NotPositiveDefinite`] when `t·F K_s Fᵀ + N` is
/// singular, which needs both a rank-deficient filter matrix and zero noise on
/// the deficient channels.
pub fn build_collaborative_filter(
    bank: &FilterBank,
    prior: &SmoothnessPrior,
    cov: &NoiseCovariance,
    t: usize,
) -> Result<CollaborativeFilter> {
    check_filter_inputs(bank, prior, cov, t)?;
    let f_ks = projected_prior(bank, prior)?;
    let signal_cov = f_ks.matmul(&bank.responses().transpose())?.symmetrized();
    filter_from_projection(bank, &f_ks, &signal_cov, cov, t)
}

/// The `(t·N)×(t·M)` weights assembled literally from the Kronecker products
/// and a Cholesky factorization of the `(t·M)×(t·M)` system `F̂ K_CSR F̂ᵀ + N̂`.
///
/// With zero noise and `t > 1` that system is singular and this fails, while
/// [`build_collaborative_filter`] returns the zero-noise limit.
pub fn dense_collaborative_weights(
    bank: &FilterBank,
    prior: &SmoothnessPrior,
    cov: &NoiseCovariance,
    t: usize,
) -> Result<Matrix> {
    check_filter_inputs(bank, prior, cov, t)?;
    let f_hat = kron_identity_extend(bank.responses(), t)?;
    let k_csr = kron_ones_extend(prior.k_s(), t)?;
    let n_hat = kron_identity_extend(&cov.as_matrix(), t)?;
    let f_k = f_hat.matmul(&k_csr)?;
    let k_c = f_k.matmul(&f_hat.transpose())?.add(&n_hat)?.symmetrized();
    let x = Cholesky::factor(&k_c)?.solve_matrix(&f_k)?;
    Ok(x.transpose())
}

/// Per-pixel Wiener reconstruction `ŝ = K_s Fᵀ (F K_s Fᵀ + N)⁻¹ c` with a
/// depth-1 filter.
pub fn reconstruct_pixel_wiener(pixel: &[f64], filter: &CollaborativeFilter) -> Result<Spectrum> {
    if filter.t() != 1 {
        return Err(invalid!("per-pixel reconstruction needs a depth-1 filter, got {}", filter.t()));
    }
    Spectrum::new(*filter.grid(), filter.apply(pixel)?)
}

/// Collaborative filters for every stack depth, built on demand. Filters
/// depend only on the depth, never on which blocks were matched.
#[derive(Debug, Clone)]
pub struct FilterCache {
    bank: FilterBank,
    cov: NoiseCovariance,
    f_ks: Matrix,
    signal_cov: Matrix,
    filters: Vec<Option<CollaborativeFilter>>,
}

impl FilterCache {
    pub fn new(bank: &FilterBank, prior: &SmoothnessPrior, cov: &NoiseCovariance) -> Result<Self> {
        check_filter_inputs(bank, prior, cov, 1)?;
        let f_ks = projected_prior(bank, prior)?;
        let signal_cov = f_ks.matmul(&bank.responses().transpose())?.symmetrized();
        Ok(Self {
            bank: bank.clone(),
            cov: cov.clone(),
            f_ks,
            signal_cov,
            filters: Vec::new(),
        })
    }

    pub fn get(&self, t: usize) -> Option<&CollaborativeFilter> {
        self.filters.get(t).and_then(Option::as_ref)
    }

    pub fn get_or_build(&mut self, t: usize) -> Result<&CollaborativeFilter> {
        if t == 0 {
            return Err(invalid!("stack depth must be >= 1"));
        }
        if self.filters.len() <= t {
            self.filters.resize(t + 1, None);
        }
        if self.filters[t].is_none() {
            let filter =
                filter_from_projection(&self.bank, &self.f_ks, &self.signal_cov, &self.cov, t)?;
            self.filters[t] = Some(filter);
        }
        Ok(self.filters[t].as_ref().expect("filled above"))
    }

    /// Builds every depth in `1..=max_t` so the cache can be shared read-only.
    pub fn warm(&mut self, max_t: usize) -> Result<()> {
        for t in 1..=max_t {
            self.get_or_build(t)?;
        }
        Ok(())
    }
}

/// A reconstructed `size × size × N` block at its image position.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBlock {
    pub position: Position,
    pub size: usize,
    pub n_bands: usize,
    /// Pixel-interleaved spectra, row-major over the block.
    pub data: Vec<f64>,
}

impl SpectralBlock {
    pub fn spectrum(&self, dy: usize, dx: usize) -> &[f64] {
        let start = (dy * self.size + dx) * self.n_bands;
        &self.data[start..start + self.n_bands]
    }
}

/// Reconstructs every block of a match set, building the filter for its
/// depth if the cache does not hold it yet.
pub fn reconstruct_matchset(
    image: &MultiCube,
    ms: &MatchSet,
    cache: &mut FilterCache,
    params: &CsrParams,
) -> Result<Vec<SpectralBlock>> {
    let filter = cache.get_or_build(ms.len())?;
    reconstruct_with_filter(image, ms, filter, params.block_size)
}

fn reconstruct_with_filter(
    image: &MultiCube,
    ms: &MatchSet,
    filter: &CollaborativeFilter,
    block: usize,
) -> Result<Vec<SpectralBlock>> {
    let t = ms.len();
    let (n, m) = (filter.n_bands(), filter.n_channels());
    if filter.t() != t {
        return Err(Error::Internal(alloc::format!(
            "filter of depth {} used for a stack of {t}",
            filter.t()
        )));
    }
    if image.n_channels() != m {
        return Err(invalid!("image has {} channels, filter expects {m}", image.n_channels()));
    }
    for p in ms.positions() {
        if p.row + block > image.height() || p.col + block > image.width() {
            return Err(invalid!("matched block at ({}, {}) leaves the image", p.row, p.col));
        }
    }

    let mut blocks: Vec<SpectralBlock> = ms
        .positions()
        .map(|position| SpectralBlock {
            position,
            size: block,
            n_bands: n,
            data: vec![0.0; block * block * n],
        })
        .collect();
    let mut stacked = vec![0.0; t * m];
    let mut sum = vec![0.0; m];
    let mut out = vec![0.0; t * n];
    for dy in 0..block {
        for dx in 0..block {
            for (slot, p) in stacked.chunks_exact_mut(m).zip(ms.positions()) {
                slot.copy_from_slice(image.pixel(p.row + dy, p.col + dx));
            }
            filter.apply_into(&stacked, &mut sum, &mut out);
            let offset = (dy * block + dx) * n;
            for (b, spectrum) in blocks.iter_mut().zip(out.chunks_exact(n)) {
                b.data[offset..offset + n].copy_from_slice(spectrum);
            }
        }
    }
    Ok(blocks)
}

/// Running per-pixel sums and counts of reconstructed spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    height: usize,
    width: usize,
    n_bands: usize,
    sums: Vec<f64>,
    counts: Vec<u32>,
}

impl Accumulator {
    pub fn new(height: usize, width: usize, n_bands: usize) -> Self {
        Self {
            height,
            width,
            n_bands,
            sums: vec![0.0; height * width * n_bands],
            counts: vec![0; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// Adds every spectrum of every block at its pixel.
    pub fn add_blocks(&mut self, blocks: &[SpectralBlock]) -> Result<()> {
        for b in blocks {
            if b.n_bands != self.n_bands || b.data.len() != b.size * b.size * b.n_bands {
                return Err(invalid!("block shape does not match the accumulator"));
            }
            if b.position.row + b.size > self.height || b.position.col + b.size > self.width {
                return Err(invalid!(
                    "block at ({}, {}) of size {} leaves the {}x{} accumulator",
                    b.position.row,
                    b.position.col,
                    b.size,
                    self.height,
                    self.width
                ));
            }
        }
        let n = self.n_bands;
        for b in blocks {
            for dy in 0..b.size {
                for dx in 0..b.size {
                    let pixel = (b.position.row + dy) * self.width + b.position.col + dx;
                    self.counts[pixel] += 1;
                    let sums = &mut self.sums[pixel * n..(pixel + 1) * n];
                    for (s, v) in sums.iter_mut().zip(b.spectrum(dy, dx)) {
                        *s += v;
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds another accumulator of the same shape.
    pub fn merge(&mut self, other: &Accumulator) -> Result<()> {
        if (self.height, self.width, self.n_bands) != (other.height, other.width, other.n_bands) {
            return Err(invalid!("cannot merge accumulators of different shapes"));
        }
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            *s += o;
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        Ok(())
    }

    /// Average spectrum of pixel `(y, x)`.
    pub fn mean_at(&self, y: usize, x: usize) -> Result<Vec<f64>> {
        let pixel = y * self.width + x;
        let count = self.counts[pixel];
        if count == 0 {
            return Err(Error::Internal(alloc::format!(
                "pixel ({y}, {x}) was never reconstructed"
            )));
        }
        let n = self.n_bands;
        Ok(self.sums[pixel * n..(pixel + 1) * n]
            .iter()
            .map(|s| s / count as f64)
            .collect())
    }
}

/// Adds reconstructed blocks into an accumulator.
pub fn aggregate(acc: &mut Accumulator, blocks: &[SpectralBlock]) -> Result<()> {
    acc.add_blocks(blocks)
}

/// A prepared collaborative reconstruction of one image.
///
/// The plan owns the mirror-padded image, the matching threshold, the
/// reference positions and a warmed filter cache. Reference positions can be
/// processed in any partition into separate accumulators that are merged
/// before [`CsrPlan::finish`]; the plan itself is read-only and `Sync`.
#[derive(Debug, Clone)]
pub struct CsrPlan {
    params: CsrParams,
    padded: MultiCube,
    pad: usize,
    height: usize,
    width: usize,
    grid: SpectralGrid,
    tau: f64,
    references: Vec<Position>,
    cache: FilterCache,
}

impl CsrPlan {
    pub fn new(
        noisy: &MultiCube,
        bank: &FilterBank,
        cov: &NoiseCovariance,
        params: &CsrParams,
    ) -> Result<Self> {
        params.validate()?;
        if noisy.n_channels() != bank.n_channels() {
            return Err(invalid!(
                "image has {} channels, filter bank has {}",
                noisy.n_channels(),
                bank.n_channels()
            ));
        }
        let prior = build_smoothness_prior(bank.n_bands(), params.alpha)?;
        let mut cache = FilterCache::new(bank, &prior, cov)?;
        cache.warm(params.mu_c)?;

        let pad = params.window.div_ceil(2);
        let padded = noisy.mirror_padded(pad);
        let (height, width) = (noisy.height(), noisy.width());
        let b = params.block_size;
        // References cover the original image; an image smaller than one
        // block borrows rows or columns from the padding.
        let region = |len: usize| {
            let extent = len.max(b);
            let start = if extent <= len + pad { pad } else { len + 2 * pad - extent };
            (start, extent)
        };
        let (row0, rows) = region(height);
        let (col0, cols) = region(width);
        let references = reference_positions(rows, cols, params)
            .into_iter()
            .map(|p| Position::new(p.row + row0, p.col + col0))
            .collect();

        Ok(Self {
            params: *params,
            padded,
            pad,
            height,
            width,
            grid: *bank.grid(),
            tau: compute_tau(cov, params),
            references,
            cache,
        })
    }

    pub fn params(&self) -> &CsrParams {
        &self.params
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn padding(&self) -> usize {
        self.pad
    }

    pub fn padded_image(&self) -> &MultiCube {
        &self.padded
    }

    /// Reference positions in padded-image coordinates.
    pub fn references(&self) -> &[Position] {
        &self.references
    }

    pub fn new_accumulator(&self) -> Accumulator {
        Accumulator::new(self.padded.height(), self.padded.width(), self.grid.n_bands())
    }

    pub fn match_at(&self, reference: Position) -> Result<MatchSet> {
        match_cubes(&self.padded, reference, &self.params, self.tau)
    }

    /// Reconstructs the blocks of one match set with the warmed cache.
    pub fn reconstruct(&self, ms: &MatchSet) -> Result<Vec<SpectralBlock>> {
        let filter = self.cache.get(ms.len()).ok_or_else(|| {
            Error::Internal(alloc::format!("no cached filter for stack depth {}", ms.len()))
        })?;
        reconstruct_with_filter(&self.padded, ms, filter, self.params.block_size)
    }

    /// Matches, reconstructs and aggregates the given references in order.
    pub fn process(&self, references: &[Position], acc: &mut Accumulator) -> Result<()> {
        for &reference in references {
            let ms = self.match_at(reference)?;
            let blocks = self.reconstruct(&ms)?;
            aggregate(acc, &blocks)?;
        }
        Ok(())
    }

    /// Averages the accumulated spectra, crops the padding and clamps
    /// negative radiances to zero.
    pub fn finish(&self, acc: &Accumulator) -> Result<HyperCube> {
        if (acc.height(), acc.width()) != (self.padded.height(), self.padded.width()) {
            return Err(invalid!("accumulator does not belong to this plan"));
        }
        let n = self.grid.n_bands();
        let mut data = Vec::with_capacity(self.height * self.width * n);
        for y in 0..self.height {
            for x in 0..self.width {
                let mean = acc.mean_at(y + self.pad, x + self.pad)?;
                data.extend(mean.into_iter().map(|v| v.max(0.0)));
            }
        }
        HyperCube::new(self.height, self.width, self.grid, data)
    }
}

/// Collaborative spectral reconstruction of a noisy multispectral image.
pub fn reconstruct_csr(
    noisy: &MultiCube,
    bank: &FilterBank,
    cov: &NoiseCovariance,
    params: &CsrParams,
) -> Result<HyperCube> {
    let plan = CsrPlan::new(noisy, bank, cov, params)?;
    let mut acc = plan.new_accumulator();
    plan.process(plan.references(), &mut acc)?;
    plan.finish(&acc)
}

/// Baseline: the depth-1 Wiener filter applied to every pixel on its own,
/// negative radiances clamped to zero.
pub fn reconstruct_wiener_image(
    noisy: &MultiCube,
    bank: &FilterBank,
    cov: &NoiseCovariance,
    alpha: f64,
) -> Result<HyperCube> {
    if noisy.n_channels() != bank.n_channels() {
        return Err(invalid!(
            "image has {} channels, filter bank has {}",
            noisy.n_channels(),
            bank.n_channels()
        ));
    }
    let prior = build_smoothness_prior(bank.n_bands(), alpha)?;
    let filter = build_collaborative_filter(bank, &prior, cov, 1)?;
    let n = bank.n_bands();
    let mut data = Vec::with_capacity(noisy.height() * noisy.width() * n);
    let mut sum = vec![0.0; bank.n_channels()];
    let mut out = vec![0.0; n];
    for pixel in noisy.pixels() {
        filter.apply_into(pixel, &mut sum, &mut out);
        data.extend(out.iter().map(|v| v.max(0.0)));
    }
    HyperCube::new(noisy.height(), noisy.width(), *bank.grid(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::generate_flat_top_bank;

    fn setup() -> (FilterBank, SmoothnessPrior) {
        let grid = SpectralGrid::new(400.0, 700.0, 16).unwrap();
        let bank = generate_flat_top_bank(grid, 4, 3.0).unwrap();
        let prior = build_smoothness_prior(16, 1e-3).unwrap();
        (bank, prior)
    }

    #[test]
    fn depth_one_filter_is_the_wiener_filter() {
        let (bank, prior) = setup();
        let cov = NoiseCovariance::uniform(4, 0.01).unwrap();
        let w = build_collaborative_filter(&bank, &prior, &cov, 1).unwrap();
        // K_s Fᵀ (F K_s Fᵀ + N)⁻¹ by explicit inverse.
        let f = bank.responses();
        let ks_ft = prior.k_s().matmul(&f.transpose()).unwrap();
        let sys = f.matmul(&ks_ft).unwrap().add(&cov.as_matrix()).unwrap();
        let expected = ks_ft.matmul(&Cholesky::factor(&sys).unwrap().inverse()).unwrap();
        assert!(w.weights().max_abs_diff(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn zero_pixel_gives_zero_spectrum() {
        let (bank, prior) = setup();
        let w = build_collaborative_filter(&bank, &prior, &NoiseCovariance::zeros(4), 1).unwrap();
        let s = reconstruct_pixel_wiener(&[0.0; 4], &w).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
        assert!(reconstruct_pixel_wiener(&[0.0; 3], &w).is_err());
        let deeper = build_collaborative_filter(&bank, &prior, &NoiseCovariance::zeros(4), 2).unwrap();
        assert!(reconstruct_pixel_wiener(&[0.0; 4], &deeper).is_err());
    }

    #[test]
    fn dense_route_fails_on_zero_noise_stacks() {
        let (bank, prior) = setup();
        let zero = NoiseCovariance::zeros(4);
        assert!(dense_collaborative_weights(&bank, &prior, &zero, 1).is_ok());
        assert!(matches!(
            dense_collaborative_weights(&bank, &prior, &zero, 2),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(build_collaborative_filter(&bank, &prior, &zero, 2).is_ok());
    }

    #[test]
    fn dimension_mismatches_rejected() {
        let (bank, prior) = setup();
        let cov = NoiseCovariance::zeros(3);
        assert!(build_collaborative_filter(&bank, &prior, &cov, 1).is_err());
        let other = build_smoothness_prior(10, 1e-3).unwrap();
        assert!(build_collaborative_filter(&bank, &other, &NoiseCovariance::zeros(4), 1).is_err());
        assert!(build_collaborative_filter(&bank, &prior, &NoiseCovariance::zeros(4), 0).is_err());
    }

    #[test]
    fn accumulator_averages() {
        let block = |row, col, v: f64| SpectralBlock {
            position: Position::new(row, col),
            size: 1,
            n_bands: 2,
            data: vec![v, 2.0 * v],
        };
        let mut acc = Accumulator::new(2, 2, 2);
        aggregate(&mut acc, &[block(0, 0, 1.0)]).unwrap();
        assert_eq!(acc.mean_at(0, 0).unwrap(), [1.0, 2.0]);
        aggregate(&mut acc, &[block(0, 0, 3.0)]).unwrap();
        assert_eq!(acc.mean_at(0, 0).unwrap(), [2.0, 4.0]);
        assert!(acc.mean_at(1, 1).is_err());
        assert!(aggregate(&mut acc, &[block(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn identical_stack_gives_identical_blocks() {
        let (bank, prior) = setup();
        let data: Vec<f64> = (0..4 * 4 * 4).map(|i| 0.1 + ((i / 4) % 4) as f64 * 0.05).collect();
        // Rows repeat with period 1 in y, so blocks at rows 0 and 2 coincide.
        let img = MultiCube::new(4, 4, 4, data).unwrap();
        let r = Position::new(0, 0);
        let ms = MatchSet::from_matches(
            r,
            vec![
                crate::matching::Match { position: r, distance: 0.0 },
                crate::matching::Match { position: Position::new(2, 0), distance: 0.0 },
            ],
        )
        .unwrap();
        let mut cache = FilterCache::new(&bank, &prior, &NoiseCovariance::zeros(4)).unwrap();
        let params = CsrParams { block_size: 2, window: 3, ..CsrParams::default() };
        let blocks = reconstruct_matchset(&img, &ms, &mut cache, &params).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].data, blocks[1].data);
        assert_eq!(blocks[1].position, Position::new(2, 0));
    }
}
