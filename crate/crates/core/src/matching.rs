//! Non-local cube matching.
//!
//! For a reference block, every candidate block whose top-left corner lies
//! within `±window/2` of the reference's top-left corner is compared by squared
//! distance. Candidates close enough are stacked in ascending order of
//! distance, with the reference always first.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cube::MultiCube;
use crate::error::{invalid, Result};
use crate::noise::{mean_variance, NoiseCovariance};
use crate::spectral::DEFAULT_ALPHA;

/// Top-left corner of a block, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Hyperparameters of the collaborative reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsrParams {
    /// Side length of the matched blocks.
    pub block_size: usize,
    /// Side length of the search window (odd).
    pub window: usize,
    /// Stride between reference blocks.
    pub step: usize,
    /// Threshold factor: candidates match when their mean squared distance is
    /// at most `tau_c` times the average noise variance.
    pub tau_c: f64,
    /// Maximum number of stacked blocks, the reference included.
    pub mu_c: usize,
    /// Regularizer of the smoothness prior.
    pub alpha: f64,
}

impl Default for CsrParams {
    fn default() -> Self {
        Self {
            block_size: 8,
            window: 33,
            step: 3,
            tau_c: 6.0,
            mu_c: 25,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl CsrParams {
    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(invalid!("block size must be >= 1"));
        }
        if self.window % 2 == 0 || self.window < self.block_size {
            return Err(invalid!(
                "search window must be odd and >= block size {}, got {}",
                self.block_size,
                self.window
            ));
        }
        if self.step == 0 {
            return Err(invalid!("step must be >= 1"));
        }
        if !(self.tau_c > 0.0) || !self.tau_c.is_finite() {
            return Err(invalid!("tau_c must be positive and finite, got {}", self.tau_c));
        }
        if self.mu_c == 0 {
            return Err(invalid!("mu_c must be >= 1"));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(invalid!("alpha must be positive and finite, got {}", self.alpha));
        }
        Ok(())
    }
}

/// One stacked block and its distance to the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub position: Position,
    /// Mean squared difference per block entry.
    pub distance: f64,
}

/// A reference block and the blocks stacked with it. The reference is the
/// first entry and distances never decrease along the list.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSet {
    reference: Position,
    matches: Vec<Match>,
}

impl MatchSet {
    /// A set holding only the reference.
    pub fn singleton(reference: Position) -> Self {
        Self {
            reference,
            matches: alloc::vec![Match {
                position: reference,
                distance: 0.0,
            }],
        }
    }

    /// Builds a set from explicit entries, checking the ordering invariants.
    pub fn from_matches(reference: Position, matches: Vec<Match>) -> Result<Self> {
        match matches.first() {
            Some(first) if first.position == reference && first.distance == 0.0 => {}
            _ => return Err(invalid!("a match set must start with its reference at distance 0")),
        }
        if matches.windows(2).any(|w| w[1].distance < w[0].distance) {
            return Err(invalid!("match distances must be nondecreasing"));
        }
        Ok(Self { reference, matches })
    }

    pub fn reference(&self) -> Position {
        self.reference
    }

    pub fn matches(&self) -> &[Match] {
        &self.matches
    }

    /// Stack depth `T`.
    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.matches.iter().map(|m| m.position)
    }
}

fn check_block(image: &MultiCube, p: Position, block: usize) -> Result<()> {
    if block == 0 || p.row + block > image.height() || p.col + block > image.width() {
        return Err(invalid!(
            "block of size {block} at ({}, {}) leaves the {}x{} image",
            p.row,
            p.col,
            image.height(),
            image.width()
        ));
    }
    Ok(())
}

/// Sum of squared differences over all `block × block × M` entries.
pub fn cube_distance(image: &MultiCube, a: Position, b: Position, block: usize) -> Result<f64> {
    check_block(image, a, block)?;
    check_block(image, b, block)?;
    Ok(block_ssd(image, a, b, block, f64::INFINITY).unwrap_or(f64::INFINITY))
}

/// Sum of squared differences, abandoned with `None` once it exceeds `limit`.
fn block_ssd(image: &MultiCube, a: Position, b: Position, block: usize, limit: f64) -> Option<f64> {
    let m = image.n_channels();
    let w = image.width();
    let data = image.data();
    let mut sum = 0.0;
    for dy in 0..block {
        let ra = ((a.row + dy) * w + a.col) * m;
        let rb = ((b.row + dy) * w + b.col) * m;
        let len = block * m;
        for (x, y) in data[ra..ra + len].iter().zip(&data[rb..rb + len]) {
            let d = x - y;
            sum += d * d;
        }
        // Partial sums of squares only grow, so this never drops a match.
        if sum > limit {
            return None;
        }
    }
    Some(sum)
}

/// `τ = τ_C · σ̄²`.
pub fn compute_tau(cov: &NoiseCovariance, params: &CsrParams) -> f64 {
    params.tau_c * mean_variance(cov)
}

/// Finds the blocks similar to the one at `reference`.
///
/// A candidate is kept when its mean squared difference per entry
/// (`cube_distance / (B²·M)`) is at most `tau`. Survivors are sorted by
/// `(distance, row, col)` behind the reference and truncated to `mu_c`.
pub fn match_cubes(
    image: &MultiCube,
    reference: Position,
    params: &CsrParams,
    tau: f64,
) -> Result<MatchSet> {
    params.validate()?;
    let block = params.block_size;
    check_block(image, reference, block)?;
    if !(tau >= 0.0) {
        return Err(invalid!("tau must be >= 0, got {tau}"));
    }
    let entries = (block * block * image.n_channels()) as f64;
    let radius = params.window / 2;
    let row_end = (reference.row + radius).min(image.height() - block);
    let col_end = (reference.col + radius).min(image.width() - block);

    let mut found = Vec::new();
    if params.mu_c > 1 {
        // Sums are compared against the bound before normalizing; the final
        // check below is on the normalized value.
        let limit = tau * entries;
        for row in reference.row.saturating_sub(radius)..=row_end {
            for col in reference.col.saturating_sub(radius)..=col_end {
                let position = Position::new(row, col);
                if position == reference {
                    continue;
                }
                let Some(sum) = block_ssd(image, reference, position, block, limit) else {
                    continue;
                };
                let distance = sum / entries;
                if distance <= tau {
                    found.push(Match { position, distance });
                }
            }
        }
        found.sort_by(|a, b| {
            a.distance
                .partial_cmp(&b.distance)
                .unwrap_or(Ordering::Equal)
                .then(a.position.cmp(&b.position))
        });
        found.truncate(params.mu_c - 1);
    }

    let mut matches = Vec::with_capacity(found.len() + 1);
    matches.push(Match {
        position: reference,
        distance: 0.0,
    });
    matches.extend(found);
    Ok(MatchSet { reference, matches })
}

fn axis_positions(len: usize, block: usize, step: usize) -> Vec<usize> {
    if len < block {
        return Vec::new();
    }
    let last = len - block;
    let mut out: Vec<usize> = (0..=last).step_by(step).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Top-left corners of the reference blocks: a grid with stride `step` that
/// always includes the last valid position, so every pixel is covered.
pub fn reference_positions(height: usize, width: usize, params: &CsrParams) -> Vec<Position> {
    let rows = axis_positions(height, params.block_size, params.step.max(1));
    let cols = axis_positions(width, params.block_size, params.step.max(1));
    rows.iter()
        .flat_map(|&r| cols.iter().map(move |&c| Position::new(r, c)))
        .collect()
}
