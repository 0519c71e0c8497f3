//! Readers for user-supplied series and samples.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use lowpass::{Extension, FourierSeries, SampledFunction};

use crate::error::{CliError, CliResult};

/// Numeric rows of a CSV file with their 1-based line numbers. An optional
/// header line is skipped when its first field is not a number; lines
/// starting with `#` are comments.
fn numeric_rows(path: &Path, width: usize) -> CliResult<Vec<(u64, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|source| match source.kind() {
            csv::ErrorKind::Io(_) => CliError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(source.to_string()),
            },
            _ => CliError::Csv {
                path: path.to_path_buf(),
                source,
            },
        })?;
    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let first_is_text = record.get(0).is_some_and(|f| f.parse::<f64>().is_err());
        if rows.is_empty() && index == 0 && first_is_text {
            continue;
        }
        if record.len() != width {
            return Err(CliError::parse(
                path,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let values = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| CliError::parse(path, line, format!("`{f}` is not a number")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::parse(path, line, format!("non-finite value {v}")));
        }
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(CliError::parse(path, 1, "no data rows"));
    }
    Ok(rows)
}

/// Reads `(k, alpha, beta)` rows, or a JSON series when the file name ends
/// in `.json`. Missing modes are zero; the `k = 0` row carries `α₀`.
pub fn read_series(path: &Path, half_width: f64) -> CliResult<FourierSeries> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        return serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line() as u64, e.to_string()));
    }
    let mut modes = BTreeMap::new();
    for (line, row) in numeric_rows(path, 3)? {
        let k = row[0];
        if k < 0.0 || k.fract() != 0.0 {
            return Err(CliError::parse(path, line, format!("mode index {k} is not a non-negative integer")));
        }
        let k = k as usize;
        if k == 0 && row[2] != 0.0 {
            return Err(CliError::parse(path, line, "the k = 0 row must have beta = 0"));
        }
        if modes.insert(k, (row[1], row[2])).is_some() {
            return Err(CliError::parse(path, line, format!("mode {k} appears twice")));
        }
    }
    let k_max = modes.keys().next_back().copied().unwrap_or(0);
    let mut cos = vec![0.0; k_max];
    let mut sin = vec![0.0; k_max];
    let mut half_mean = 0.0;
    for (k, (a, b)) in modes {
        if k == 0 {
            half_mean = a;
        } else {
            cos[k - 1] = a;
            sin[k - 1] = b;
        }
    }
    Ok(FourierSeries::with_period(half_mean, cos, sin, half_width)?)
}

/// Reads `(x, f)` rows on a uniform grid. Returns the nodes as read and the
/// sampled function.
pub fn read_samples(path: &Path, extension: Extension) -> CliResult<(Vec<f64>, SampledFunction)> {
    let rows = numeric_rows(path, 2)?;
    if rows.len() < 2 {
        return Err(CliError::parse(path, rows[0].0, "need at least two samples"));
    }
    let xs: Vec<f64> = rows.iter().map(|(_, r)| r[0]).collect();
    let values: Vec<f64> = rows.iter().map(|(_, r)| r[1]).collect();
    let m = xs.len();
    let (first, last) = (xs[0], xs[m - 1]);
    let h = (last - first) / (m - 1) as f64;
    if h <= 0.0 {
        return Err(CliError::parse(path, rows[1].0, "nodes must increase"));
    }
    let slack = 1e-9 * (last - first).abs().max(1.0);
    for (i, (line, _)) in rows.iter().enumerate() {
        if (xs[i] - (first + i as f64 * h)).abs() > slack {
            return Err(CliError::parse(path, *line, "nodes are not uniformly spaced"));
        }
    }
    let hi = match extension {
        Extension::Periodic => first + m as f64 * h,
        Extension::ZeroExtend => last,
    };
    let f = SampledFunction::from_samples(values, first, hi, extension)?;
    Ok((xs, f))
}

pub const DEFAULT_HALF_WIDTH: f64 = PI;
