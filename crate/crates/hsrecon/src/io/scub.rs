//! SCUB: a fixed 34-byte header followed by `f32` samples.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "SCUB"
//!      4     1  version (1)
//!      5     4  height, u32 LE
//!      9     4  width, u32 LE
//!     13     4  bands, u32 LE
//!     17     8  lambda_min in nm, f64 LE (0 for multispectral)
//!     25     8  lambda_max in nm, f64 LE (0 for multispectral)
//!     33     1  kind (0 hyperspectral, 1 multispectral)
//!     34        height·width·bands f32 LE, band-sequential
//! ```

use std::path::Path;

use hsrecon_core::{HyperCube, MultiCube, SpectralGrid};

use super::{read_bytes, write_bytes, FormatError};

pub const MAGIC: [u8; 4] = *b"SCUB";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 34;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeKind {
    Hyperspectral = 0,
    Multispectral = 1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeHeader {
    pub height: u32,
    pub width: u32,
    pub bands: u32,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kind: CubeKind,
}

/// A cube of either kind as stored in a SCUB file.
#[derive(Debug, Clone, PartialEq)]
pub enum Cube {
    Hyper(HyperCube),
    Multi(MultiCube),
}

impl Cube {
    pub fn height(&self) -> usize {
        match self {
            Cube::Hyper(c) => c.height(),
            Cube::Multi(c) => c.height(),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Cube::Hyper(c) => c.width(),
            Cube::Multi(c) => c.width(),
        }
    }

    pub fn bands(&self) -> usize {
        match self {
            Cube::Hyper(c) => c.n_bands(),
            Cube::Multi(c) => c.n_channels(),
        }
    }

    pub fn kind(&self) -> CubeKind {
        match self {
            Cube::Hyper(_) => CubeKind::Hyperspectral,
            Cube::Multi(_) => CubeKind::Multispectral,
        }
    }

    /// Pixel-interleaved samples.
    pub fn data(&self) -> &[f64] {
        match self {
            Cube::Hyper(c) => c.data(),
            Cube::Multi(c) => c.data(),
        }
    }

    /// Band `k` as a row-major plane.
    pub fn plane(&self, k: usize) -> Vec<f64> {
        self.data().chunks_exact(self.bands()).map(|p| p[k]).collect()
    }

    pub fn header(&self) -> CubeHeader {
        let (lambda_min, lambda_max) = match self {
            Cube::Hyper(c) => (c.grid().lambda_min(), c.grid().lambda_max()),
            Cube::Multi(_) => (0.0, 0.0),
        };
        CubeHeader {
            height: self.height() as u32,
            width: self.width() as u32,
            bands: self.bands() as u32,
            lambda_min,
            lambda_max,
            kind: self.kind(),
        }
    }

    pub fn into_hyper(self) -> Option<HyperCube> {
        match self {
            Cube::Hyper(c) => Some(c),
            Cube::Multi(_) => None,
        }
    }

    pub fn into_multi(self) -> Option<MultiCube> {
        match self {
            Cube::Multi(c) => Some(c),
            Cube::Hyper(_) => None,
        }
    }
}

impl From<HyperCube> for Cube {
    fn from(c: HyperCube) -> Self {
        Cube::Hyper(c)
    }
}

impl From<MultiCube> for Cube {
    fn from(c: MultiCube) -> Self {
        Cube::Multi(c)
    }
}

/// Serializes a cube. Samples are rounded to `f32`; values beyond the `f32`
/// range are rejected.
pub fn encode_cube(cube: &Cube) -> Result<Vec<u8>, FormatError> {
    let (h, w, b) = (cube.height(), cube.width(), cube.bands());
    for (name, v) in [("height", h), ("width", w), ("bands", b)] {
        if u32::try_from(v).is_err() {
            return Err(FormatError::binary(0, format!("{name} {v} does not fit in 32 bits")));
        }
    }
    let header = cube.header();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * h * w * b);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&header.height.to_le_bytes());
    out.extend_from_slice(&header.width.to_le_bytes());
    out.extend_from_slice(&header.bands.to_le_bytes());
    out.extend_from_slice(&header.lambda_min.to_le_bytes());
    out.extend_from_slice(&header.lambda_max.to_le_bytes());
    out.push(header.kind as u8);

    let data = cube.data();
    for k in 0..b {
        for p in 0..h * w {
            let v = data[p * b + k] as f32;
            if !v.is_finite() {
                return Err(FormatError::binary(
                    out.len(),
                    format!("sample {} does not fit in an f32", data[p * b + k]),
                ));
            }
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

fn le_u32(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().expect("4 bytes"))
}

fn le_f64(bytes: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(bytes[offset..offset + 8].try_into().expect("8 bytes"))
}

pub fn decode_header(bytes: &[u8]) -> Result<CubeHeader, FormatError> {
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::binary(
            bytes.len(),
            format!("truncated header: expected {HEADER_LEN} bytes, found {}", bytes.len()),
        ));
    }
    if bytes[..4] != MAGIC {
        return Err(FormatError::binary(0, format!("bad magic {:?}, expected \"SCUB\"", &bytes[..4])));
    }
    if bytes[4] != VERSION {
        return Err(FormatError::binary(4, format!("unsupported version {}", bytes[4])));
    }
    let kind = match bytes[33] {
        0 => CubeKind::Hyperspectral,
        1 => CubeKind::Multispectral,
        k => return Err(FormatError::binary(33, format!("unknown cube kind {k}"))),
    };
    let header = CubeHeader {
        height: le_u32(bytes, 5),
        width: le_u32(bytes, 9),
        bands: le_u32(bytes, 13),
        lambda_min: le_f64(bytes, 17),
        lambda_max: le_f64(bytes, 25),
        kind,
    };
    for (offset, v) in [(5, header.height), (9, header.width), (13, header.bands)] {
        if v == 0 {
            return Err(FormatError::binary(offset, "dimensions must be nonzero"));
        }
    }
    if kind == CubeKind::Multispectral && (header.lambda_min != 0.0 || header.lambda_max != 0.0) {
        return Err(FormatError::binary(17, "multispectral cubes carry no wavelength range"));
    }
    Ok(header)
}

pub fn decode_cube(bytes: &[u8]) -> Result<Cube, FormatError> {
    let header = decode_header(bytes)?;
    let (h, w, b) = (header.height as usize, header.width as usize, header.bands as usize);
    let payload = h
        .checked_mul(w)
        .and_then(|v| v.checked_mul(b))
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| FormatError::binary(5, "dimensions overflow"))?;
    let expected = HEADER_LEN + payload;
    if bytes.len() < expected {
        return Err(FormatError::binary(
            bytes.len(),
            format!("truncated payload: expected {expected} bytes, found {}", bytes.len()),
        ));
    }
    if bytes.len() > expected {
        return Err(FormatError::binary(
            expected,
            format!("{} trailing bytes after the payload", bytes.len() - expected),
        ));
    }

    let mut data = vec![0.0; h * w * b];
    for (i, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !v.is_finite() {
            return Err(FormatError::binary(HEADER_LEN + 4 * i, "sample is not finite"));
        }
        let (k, p) = (i / (h * w), i % (h * w));
        data[p * b + k] = f64::from(v);
    }
    Ok(match header.kind {
        CubeKind::Hyperspectral => {
            let grid = SpectralGrid::new(header.lambda_min, header.lambda_max, b)?;
            Cube::Hyper(HyperCube::new(h, w, grid, data)?)
        }
        CubeKind::Multispectral => Cube::Multi(MultiCube::new(h, w, b, data)?),
    })
}

pub fn write_cube(path: &Path, cube: &Cube) -> Result<(), FormatError> {
    write_bytes(path, &encode_cube(cube)?)
}

pub fn read_cube(path: &Path) -> Result<Cube, FormatError> {
    decode_cube(&read_bytes(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_band_sequential() {
        let cube = MultiCube::new(1, 2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let bytes = encode_cube(&cube.into()).unwrap();
        let samples: Vec<f32> = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        assert_eq!(samples, [1.0, 3.0, 2.0, 4.0]);
        assert_eq!(bytes[33], 1);
    }

    #[test]
    fn header_errors_carry_offsets() {
        let cube = MultiCube::new(1, 1, 1, vec![0.5]).unwrap();
        let good = encode_cube(&cube.into()).unwrap();
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(decode_cube(&bad), Err(FormatError::Binary { offset: 4, .. })));
        let mut bad = good.clone();
        bad[33] = 7;
        assert!(matches!(decode_cube(&bad), Err(FormatError::Binary { offset: 33, .. })));
        let mut bad = good.clone();
        bad[9..13].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(decode_cube(&bad), Err(FormatError::Binary { offset: 9, .. })));
        let mut bad = good;
        bad.push(0);
        assert!(matches!(decode_cube(&bad), Err(FormatError::Binary { offset: 38, .. })));
    }

    #[test]
    fn huge_dimensions_do_not_allocate() {
        let mut bytes = encode_cube(&MultiCube::new(1, 1, 1, vec![0.5]).unwrap().into()).unwrap();
        for offset in [5, 9, 13] {
            bytes[offset..offset + 4].copy_from_slice(&u32::MAX.to_le_bytes());
        }
        assert!(decode_cube(&bytes).is_err());
    }

    #[test]
    fn values_beyond_f32_are_rejected() {
        let cube = MultiCube::new(1, 1, 1, vec![1e300]).unwrap();
        assert!(encode_cube(&cube.into()).is_err());
    }
}
