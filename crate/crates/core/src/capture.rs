//! Noiseless camera forward model `c = F s`.

use alloc::vec::Vec;

use crate::cube::{HyperCube, MultiCube};
use crate::error::{invalid, Result};
use crate::spectral::FilterBank;

/// Projects every pixel spectrum through the filter bank.
pub fn forward_capture(scene: &HyperCube, bank: &FilterBank) -> Result<MultiCube> {
    if scene.grid() != bank.grid() {
        return Err(invalid!(
            "scene grid {:?} does not match filter bank grid {:?}",
            scene.grid(),
            bank.grid()
        ));
    }
    let f = bank.responses();
    let m = bank.n_channels();
    let mut data = Vec::with_capacity(scene.height() * scene.width() * m);
    let mut c = alloc::vec![0.0; m];
    for s in scene.pixels() {
        f.matvec_into(s, &mut c);
        data.extend_from_slice(&c);
    }
    MultiCube::new(scene.height(), scene.width(), m, data)
}

/// A capture rescaled to unit peak, with the filter bank rescaled to match so
/// that `c = F s` still holds for the original scene.
#[derive(Debug, Clone)]
pub struct NormalizedCapture {
    pub capture: MultiCube,
    pub bank: FilterBank,
    /// The original peak the capture was divided by.
    pub scale: f64,
}

/// Divides a noiseless capture and its filter bank by the capture's peak, so
/// that capture values lie in `[0, 1]` before shot noise is simulated.
pub fn normalize_capture(capture: &MultiCube, bank: &FilterBank) -> Result<NormalizedCapture> {
    if capture.n_channels() != bank.n_channels() {
        return Err(invalid!(
            "capture has {} channels, filter bank has {}",
            capture.n_channels(),
            bank.n_channels()
        ));
    }
    let peak = capture.peak();
    if !(peak > 0.0) {
        return Ok(NormalizedCapture {
            capture: capture.clone(),
            bank: bank.clone(),
            scale: 1.0,
        });
    }
    let data = capture.data().iter().map(|v| v / peak).collect();
    Ok(NormalizedCapture {
        capture: MultiCube::new(capture.height(), capture.width(), capture.n_channels(), data)?,
        bank: bank.scaled(1.0 / peak)?,
        scale: peak,
    })
}
