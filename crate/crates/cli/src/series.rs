//! CSV time-series ingestion.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fourier_ratio::{Complex, IndexSet, Signal64};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Detrend {
    #[default]
    None,
    /// Subtract the mean.
    Mean,
    /// Subtract the least-squares line through (index, value).
    Linear,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeriesArgs {
    /// CSV file to read; `-` reads standard input.
    pub input: PathBuf,
    /// Value column, by header name or zero-based index. Defaults to the
    /// first column that is not `index`, `observed` or the imaginary column.
    #[arg(long)]
    pub column: Option<String>,
    /// Optional imaginary-part column (name or index).
    #[arg(long)]
    pub imag_column: Option<String>,
    /// The first row holds data, not column names.
    #[arg(long)]
    pub no_header: bool,
    #[arg(long, value_enum, default_value_t = Detrend::None)]
    pub detrend: Detrend,
}

/// A parsed series. `None` entries are missing values.
#[derive(Debug, Clone)]
pub struct Series {
    pub values: Vec<Option<Complex<f64>>>,
    pub preprocessing: Preprocessing,
}

/// Record of exactly what was read and how it was transformed.
#[derive(Debug, Clone, Serialize)]
pub struct Preprocessing {
    pub source: String,
    pub value_column: String,
    pub imag_column: Option<String>,
    pub observed_column: Option<String>,
    pub rows: usize,
    pub missing: usize,
    pub detrend: Detrend,
}

fn resolve(selector: &str, headers: Option<&csv::StringRecord>, width: usize) -> CliResult<usize> {
    if let Some(h) = headers {
        if let Some(i) = h.iter().position(|name| name.trim() == selector) {
            return Ok(i);
        }
    }
    match selector.parse::<usize>() {
        Ok(i) if i < width => Ok(i),
        _ => Err(CliError::Usage(format!("column `{selector}` not found"))),
    }
}

fn column_label(i: usize, headers: Option<&csv::StringRecord>) -> String {
    headers
        .and_then(|h| h.get(i))
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| i.to_string())
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("nan")
}

fn parse_cell(cell: &str, line: u64, column: &str) -> CliResult<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| {
        CliError::Input(format!(
            "line {line}: cannot parse `{}` in column `{column}`",
            cell.trim()
        ))
    })?;
    if !v.is_finite() {
        return Err(CliError::Input(format!(
            "line {line}: non-finite value in column `{column}`"
        )));
    }
    Ok(v)
}

fn open(path: &Path) -> CliResult<Box<dyn Read>> {
    if path == Path::new("-") {
        Ok(Box::new(std::io::stdin()))
    } else {
        std::fs::File::open(path)
            .map(|f| Box::new(f) as Box<dyn Read>)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Reads a series. With `observed_column` set (or an `observed` header
/// present), rows whose flag is 0 are missing; otherwise empty cells and
/// `NaN` mark missing values. Missing values are only accepted when
/// `allow_missing` holds. Blank lines are skipped, so single-column files
/// should spell missing values as `NaN`.
pub fn read_series(
    args: &SeriesArgs,
    observed_column: Option<&str>,
    allow_missing: bool,
) -> CliResult<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(!args.no_header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(open(&args.input)?);
    let headers = if args.no_header {
        None
    } else {
        Some(reader.headers()?.clone())
    };
    let records: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>()?;
    let width = headers
        .as_ref()
        .map(|h| h.len())
        .or_else(|| records.first().map(|r| r.len()))
        .unwrap_or(0);
    if records.is_empty() || width == 0 {
        return Err(CliError::Input(format!(
            "{}: no data rows",
            args.input.display()
        )));
    }

    let imag = args
        .imag_column
        .as_deref()
        .map(|c| resolve(c, headers.as_ref(), width))
        .transpose()?;
    let observed = match observed_column {
        Some(c) => Some(resolve(c, headers.as_ref(), width)?),
        None => headers
            .as_ref()
            .and_then(|h| h.iter().position(|n| n.trim() == "observed")),
    };
    let value = match &args.column {
        Some(c) => resolve(c, headers.as_ref(), width)?,
        None => (0..width)
            .find(|&i| {
                Some(i) != imag
                    && Some(i) != observed
                    && !headers
                        .as_ref()
                        .is_some_and(|h| h.get(i).map(str::trim) == Some("index"))
            })
            .ok_or_else(|| CliError::Usage("no value column available".into()))?,
    };
    let value_label = column_label(value, headers.as_ref());
    let imag_label = imag.map(|i| column_label(i, headers.as_ref()));

    let mut values = Vec::with_capacity(records.len());
    for record in &records {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| {
            record.get(i).ok_or_else(|| {
                CliError::Input(format!("line {line}: expected at least {} fields", i + 1))
            })
        };
        let present = match observed {
            Some(o) => match get(o)? {
                "1" | "true" => true,
                "0" | "false" => false,
                other => {
                    return Err(CliError::Input(format!(
                        "line {line}: observed flag must be 0 or 1, got `{other}`"
                    )))
                }
            },
            None => !is_missing(get(value)?),
        };
        if !present {
            if !allow_missing {
                return Err(CliError::Input(format!(
                    "line {line}: missing value in column `{value_label}`"
                )));
            }
            values.push(None);
            continue;
        }
        let re = parse_cell(get(value)?, line, &value_label)?;
        let im = match (imag, &imag_label) {
            (Some(i), Some(label)) => parse_cell(get(i)?, line, label)?,
            _ => 0.0,
        };
        values.push(Some(Complex::new(re, im)));
    }
    let missing = values.iter().filter(|v| v.is_none()).count();
    detrend(&mut values, args.detrend);
    Ok(Series {
        preprocessing: Preprocessing {
            source: args.input.display().to_string(),
            value_column: value_label,
            imag_column: imag_label,
            observed_column: observed.map(|o| column_label(o, headers.as_ref())),
            rows: values.len(),
            missing,
            detrend: args.detrend,
        },
        values,
    })
}

/// Fits over the observed entries only and subtracts from those entries.
fn detrend(values: &mut [Option<Complex<f64>>], mode: Detrend) {
    let points: Vec<(f64, Complex<f64>)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|z| (i as f64, z)))
        .collect();
    if points.is_empty() || mode == Detrend::None {
        return;
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<Complex<f64>>() / count;
    let slope = if mode == Detrend::Linear {
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: Complex<f64> = points.iter().map(|p| p.1 * (p.0 - mean_x)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            Complex::new(0.0, 0.0)
        }
    } else {
        Complex::new(0.0, 0.0)
    };
    for (i, v) in values.iter_mut().enumerate() {
        if let Some(z) = v {
            *z -= mean_y + slope * (i as f64 - mean_x);
        }
    }
}

impl Series {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The full signal; fails if anything is missing.
    pub fn signal(&self) -> CliResult<Signal64> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| CliError::Input(format!("row {i}: missing value"))))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Signal64::new(values)?)
    }

    /// Observed entries with zeros in the gaps, and the observed index set.
    pub fn observed(&self) -> CliResult<(Signal64, IndexSet)> {
        let zero = Complex::new(0.0, 0.0);
        let signal = Signal64::new(self.values.iter().map(|v| v.unwrap_or(zero)).collect())?;
        let mask: Vec<bool> = self.values.iter().map(Option::is_some).collect();
        Ok((signal, IndexSet::from_mask(&mask)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn args(path: &Path) -> SeriesArgs {
        SeriesArgs {
            input: path.to_path_buf(),
            column: None,
            imag_column: None,
            no_header: false,
            detrend: Detrend::None,
        }
    }

    fn write(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn skips_index_column_by_default() {
        let f = write("index,value\n0,1.5\n1,2.5\n");
        let s = read_series(&args(f.path()), None, false).unwrap();
        assert_eq!(s.preprocessing.value_column, "value");
        assert_eq!(s.values[1], Some(Complex::new(2.5, 0.0)));
    }

    #[test]
    fn bad_row_names_line() {
        let f = write("value\n1\nabc\n");
        let err = read_series(&args(f.path()), None, false).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sentinels_and_observed_flags() {
        let f = write("index,value\n0,1\n1,\n2,NaN\n3,4\n");
        assert!(read_series(&args(f.path()), None, false).is_err());
        let s = read_series(&args(f.path()), None, true).unwrap();
        assert_eq!(s.preprocessing.missing, 2);
        let f = write("index,value_re,value_im,observed\n0,1,2,1\n1,9,9,0\n");
        let mut a = args(f.path());
        a.imag_column = Some("value_im".into());
        let s = read_series(&a, None, true).unwrap();
        assert_eq!(s.preprocessing.value_column, "value_re");
        assert_eq!(s.values, vec![Some(Complex::new(1.0, 2.0)), None]);
    }

    #[test]
    fn headerless_index_selection() {
        let f = write("5,1\n6,2\n");
        let mut a = args(f.path());
        a.no_header = true;
        a.column = Some("1".into());
        let s = read_series(&a, None, false).unwrap();
        assert_eq!(s.values[0], Some(Complex::new(1.0, 0.0)));
        a.column = Some("7".into());
        assert_eq!(read_series(&a, None, false).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn linear_detrend_removes_line() {
        let mut v: Vec<Option<Complex<f64>>> = (0..10)
            .map(|i| Some(Complex::new(3.0 + 2.0 * i as f64, 1.0)))
            .collect();
        detrend(&mut v, Detrend::Linear);
        assert!(v.iter().all(|z| z.unwrap().norm() < 1e-12));
    }
}
