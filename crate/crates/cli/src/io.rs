//! File formats: two-column spectra, three-column count series, and the
//! joint-intensity grid layout (first row = idler axis, first column =
//! signal axis, body = intensities).

use std::path::Path;

use e2pa_core::jsi::{JointTemporal, WavelengthGridJsi};
use e2pa_core::spectra::{Spectrum, SpectrumKind};
use e2pa_core::stats::{ChopperPhase, CountSeries};

use crate::error::{CliError, Result};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn parse_f64(path: &Path, line_no: usize, token: &str) -> Result<f64> {
    token.trim().parse::<f64>().map_err(|_| {
        CliError::Config(format!("{}:{line_no}: '{token}' is not a number", path.display()))
    })
}

/// Two-column comma-separated spectrum (wavelength_nm, value); a header
/// line is skipped if its first field is not numeric.
pub fn read_spectrum(path: &Path, kind: SpectrumKind) -> Result<Spectrum> {
    let text = read_text(path)?;
    let mut wavelengths = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (a, b) = (fields.next().unwrap_or(""), fields.next().unwrap_or(""));
        if idx == 0 && a.trim().parse::<f64>().is_err() {
            continue; // header
        }
        wavelengths.push(parse_f64(path, line_no, a)?);
        values.push(parse_f64(path, line_no, b)?);
    }
    Spectrum::new(wavelengths, values, kind)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Three-column comma-separated count series (t_start_s, counts, phase)
/// with uniform bins; the final bin inherits the common duration.
pub fn read_count_series(path: &Path) -> Result<CountSeries> {
    let text = read_text(path)?;
    let mut starts = Vec::new();
    let mut counts = Vec::new();
    let mut phases = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Config(format!(
                "{}:{line_no}: expected 3 comma-separated fields, got {}",
                path.display(),
                fields.len()
            )));
        }
        if idx == 0 && fields[0].trim().parse::<f64>().is_err() {
            continue; // header
        }
        starts.push(parse_f64(path, line_no, fields[0])?);
        let n = fields[1].trim().parse::<u64>().map_err(|_| {
            CliError::Config(format!(
                "{}:{line_no}: '{}' is not a count",
                path.display(),
                fields[1]
            ))
        })?;
        counts.push(n);
        phases.push(ChopperPhase::parse(fields[2]).map_err(|e| {
            CliError::Config(format!("{}:{line_no}: {e}", path.display()))
        })?);
    }
    if starts.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: count series needs at least 2 bins",
            path.display()
        )));
    }
    let dt = starts[1] - starts[0];
    // negated so a NaN start is also rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(dt > 0.0) {
        return Err(CliError::Config(format!("{}: bin starts must ascend", path.display())));
    }
    for (i, w) in starts.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(CliError::Config(format!(
                "{}: non-uniform bin at row {}: spacing {} vs {}",
                path.display(),
                i + 2,
                w[1] - w[0],
                dt
            )));
        }
    }
    let mut edges = starts;
    let last = *edges.last().unwrap();
    edges.push(last + dt);
    CountSeries::new(edges, counts, phases)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write_count_series(path: &Path, series: &CountSeries) -> Result<()> {
    let mut out = String::from("t_start_s,counts,phase\n");
    for i in 0..series.len() {
        out.push_str(&format!(
            "{:.9},{},{}\n",
            series.bin_edges[i],
            series.counts[i],
            series.phases[i].as_str()
        ));
    }
    write_text(path, &out)
}

/// Joint-spectral-intensity grid file: first row holds the idler
/// wavelengths (nm), the first column the signal wavelengths, the body the
/// intensities. The corner cell is ignored on read.
pub fn read_jsi_grid(path: &Path) -> Result<WavelengthGridJsi> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty grid file", path.display())))?;
    let idler: Vec<f64> = first
        .split(',')
        .skip(1)
        .map(|t| parse_f64(path, first_no + 1, t))
        .collect::<Result<_>>()?;
    if idler.is_empty() {
        return Err(CliError::Config(format!(
            "{}:{}: header row has no idler wavelengths",
            path.display(),
            first_no + 1
        )));
    }
    let mut signal = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != idler.len() + 1 {
            return Err(CliError::Config(format!(
                "{}:{line_no}: expected {} fields, got {}",
                path.display(),
                idler.len() + 1,
                fields.len()
            )));
        }
        signal.push(parse_f64(path, line_no, fields[0])?);
        rows.push(
            fields[1..]
                .iter()
                .map(|t| parse_f64(path, line_no, t))
                .collect::<Result<_>>()?,
        );
    }
    let matrix = ndarray::Array2::from_shape_fn((signal.len(), idler.len()), |(j, k)| rows[j][k]);
    WavelengthGridJsi::new(signal, idler, matrix)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write_jsi_grid(path: &Path, grid: &WavelengthGridJsi) -> Result<()> {
    let mut out = String::from("lambda_s_nm\\lambda_i_nm");
    for li in &grid.lambda_i_nm {
        out.push_str(&format!(",{li:.4}"));
    }
    out.push('\n');
    for (j, ls) in grid.lambda_s_nm.iter().enumerate() {
        out.push_str(&format!("{ls:.4}"));
        for k in 0..grid.lambda_i_nm.len() {
            out.push_str(&format!(",{:.6e}", grid.intensity[[j, k]]));
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Joint-temporal-intensity grid in the same layout, with times in fs.
pub fn write_jti_grid(path: &Path, jti: &JointTemporal) -> Result<()> {
    let mut out = String::from("t_s_fs\\t_i_fs");
    for ti in &jti.t_i {
        out.push_str(&format!(",{ti:.4}"));
    }
    out.push('\n');
    for (j, ts) in jti.t_s.iter().enumerate() {
        out.push_str(&format!("{ts:.4}"));
        for k in 0..jti.t_i.len() {
            out.push_str(&format!(",{:.6e}", jti.intensity[[j, k]]));
        }
        out.push('\n');
    }
    write_text(path, &out)
}
