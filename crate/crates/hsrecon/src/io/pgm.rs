//! Grayscale previews of a single band as binary 16-bit PGM (P5).

use std::path::Path;

use hsrecon_core::Error;

use super::{write_bytes, Cube, FormatError};

/// Maps band `band` linearly from `[0, cube max]` to `[0, 65535]`. Negative
/// samples map to 0; an all-zero cube gives an all-zero image.
pub fn encode_pgm(cube: &Cube, band: usize) -> Result<Vec<u8>, FormatError> {
    if band >= cube.bands() {
        return Err(Error::InvalidArgument(format!(
            "band {band} out of range for a cube with {} bands",
            cube.bands()
        ))
        .into());
    }
    let max = cube.data().iter().fold(0.0f64, |m, &v| m.max(v));
    let mut out = format!("P5\n{} {}\n65535\n", cube.width(), cube.height()).into_bytes();
    for v in cube.plane(band) {
        let level = if max > 0.0 {
            (v.max(0.0) / max * 65535.0).round() as u16
        } else {
            0
        };
        out.extend_from_slice(&level.to_be_bytes());
    }
    Ok(out)
}

pub fn render_channel_pgm(cube: &Cube, band: usize, path: &Path) -> Result<(), FormatError> {
    write_bytes(path, &encode_pgm(cube, band)?)
}
