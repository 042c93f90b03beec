//! On-disk formats: the SCUB cube container, filter-bank CSV and 16-bit PGM
//! previews.
//!
//! Every reader works on the whole file in memory and reports malformed input
//! as a [`FormatError`] carrying the byte offset or CSV cell at fault.

use std::path::{Path, PathBuf};

pub mod filter_csv;
pub mod pgm;
pub mod scub;

pub use filter_csv::{decode_filter_csv, encode_filter_csv, read_filter_csv, write_filter_csv};
pub use pgm::{encode_pgm, render_channel_pgm};
pub use scub::{decode_cube, encode_cube, read_cube, write_cube, Cube, CubeHeader, CubeKind};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("at byte {offset}: {message}")]
    Binary { offset: usize, message: String },
    #[error("row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] hsrecon_core::Error),
}

impl FormatError {
    fn binary(offset: usize, message: impl Into<String>) -> Self {
        Self::Binary {
            offset,
            message: message.into(),
        }
    }

    fn csv(row: usize, column: usize, message: impl Into<String>) -> Self {
        Self::Csv {
            row,
            column,
            message: message.into(),
        }
    }
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, FormatError> {
    std::fs::read(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    std::fs::write(path, bytes).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}
