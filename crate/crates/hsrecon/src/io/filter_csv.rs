//! Filter banks as CSV: the first row holds the band wavelengths in nm, each
//! following row the responses of one filter on those bands.

use std::path::Path;

use hsrecon_core::{FilterBank, Matrix, SpectralGrid};

use super::{read_bytes, write_bytes, FormatError};

/// Largest deviation from a uniform wavelength grid that is accepted, in nm.
pub const GRID_TOLERANCE_NM: f64 = 1e-6;

/// Shortest representation that parses back to the same value, in
/// scientific notation for very small or large magnitudes.
fn format_value(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn encode_filter_csv(bank: &FilterBank) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let row = |values: &[f64]| values.iter().map(|&v| format_value(v)).collect::<Vec<_>>();
    w.write_record(row(&bank.grid().wavelengths())).expect("writes to memory");
    for i in 0..bank.n_channels() {
        w.write_record(row(bank.responses().row(i))).expect("writes to memory");
    }
    w.into_inner().expect("writes to memory")
}

pub fn decode_filter_csv(bytes: &[u8]) -> Result<FilterBank, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let row = index + 1;
        let record = record.map_err(|e| FormatError::csv(row, 1, e.to_string()))?;
        if let Some(first) = rows.first() {
            if record.len() != first.len() {
                return Err(FormatError::csv(
                    row,
                    record.len().min(first.len()) + 1,
                    format!("row has {} cells, the wavelength row has {}", record.len(), first.len()),
                ));
            }
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| FormatError::csv(row, c + 1, format!("{cell:?} is not a number")))?;
                if !v.is_finite() {
                    return Err(FormatError::csv(row, c + 1, format!("{cell:?} is not finite")));
                }
                if row > 1 && v < 0.0 {
                    return Err(FormatError::csv(row, c + 1, format!("negative response {v}")));
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }

    let Some((wavelengths, responses)) = rows.split_first() else {
        return Err(FormatError::csv(1, 1, "empty file"));
    };
    let grid = parse_grid(wavelengths)?;
    if responses.is_empty() {
        return Err(FormatError::csv(2, 1, "no filter rows"));
    }
    Ok(FilterBank::new(grid, Matrix::from_rows(responses)?)?)
}

fn parse_grid(wavelengths: &[f64]) -> Result<SpectralGrid, FormatError> {
    let n = wavelengths.len();
    if n < 2 {
        return Err(FormatError::csv(1, n + 1, "need at least two wavelengths"));
    }
    let (first, last) = (wavelengths[0], wavelengths[n - 1]);
    let step = (last - first) / (n - 1) as f64;
    for (k, pair) in wavelengths.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(FormatError::csv(1, k + 2, "wavelengths must be strictly ascending"));
        }
    }
    for (k, &l) in wavelengths.iter().enumerate() {
        if (l - (first + k as f64 * step)).abs() > GRID_TOLERANCE_NM {
            return Err(FormatError::csv(
                1,
                k + 1,
                format!("wavelength {l} is off the uniform grid with step {step}"),
            ));
        }
    }
    Ok(SpectralGrid::new(first, last, n)?)
}

pub fn write_filter_csv(path: &Path, bank: &FilterBank) -> Result<(), FormatError> {
    write_bytes(path, &encode_filter_csv(bank))
}

pub fn read_filter_csv(path: &Path) -> Result<FilterBank, FormatError> {
    decode_filter_csv(&read_bytes(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_bank() {
        let bank = decode_filter_csv(b"500,510,520\n1,0.5,0\n0,0.5,1\n").unwrap();
        assert_eq!((bank.n_channels(), bank.n_bands()), (2, 3));
        assert_eq!(bank.grid().step(), 10.0);
    }

    #[test]
    fn cell_errors_are_located() {
        let err = |text: &str| match decode_filter_csv(text.as_bytes()) {
            Err(FormatError::Csv { row, column, .. }) => (row, column),
            other => panic!("expected a CSV error, got {other:?}"),
        };
        assert_eq!(err("500,510,530\n1,0,0\n"), (1, 2));
        assert_eq!(err("500,510,520\n1,0\n"), (2, 3));
        assert_eq!(err("500,510,520\n1,x,0\n"), (2, 2));
        assert_eq!(err("500,510,520\n1,-1,0\n"), (2, 2));
        assert_eq!(err("510,500,490\n1,0,0\n"), (1, 2));
        assert_eq!(err(""), (1, 1));
        assert_eq!(err("500,510,520\n"), (2, 1));
    }
}
