//! Tabular time-series ingestion: parsing, gap interpolation, removal of
//! variables with missing boundary values, and z-score standardization.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrecError};

/// Minimum number of time steps: a cubic plus one residual degree of freedom.
pub const MIN_STEPS: usize = 4;

/// Cell spellings treated as missing in addition to the empty cell.
const MISSING_TOKENS: [&str; 2] = ["NA", "NaN"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvFormat {
    pub delimiter: u8,
}

impl Default for CsvFormat {
    fn default() -> Self {
        CsvFormat { delimiter: b',' }
    }
}

/// One input column. `column` is the 1-based position among the variable
/// columns of the original table and never changes after filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub column: usize,
    pub values: Vec<Option<f64>>,
}

impl Series {
    pub fn canonical_name(&self) -> String {
        canonical_name(self.column)
    }
}

pub fn canonical_name(column: usize) -> String {
    format!("V{column}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    pub time_labels: Vec<f64>,
    /// Every variable name of the input table, in column order.
    pub input_names: Vec<String>,
    pub series: Vec<Series>,
}

impl TimeSeriesDataset {
    pub fn new(time_labels: Vec<f64>, series: Vec<Series>) -> Result<Self> {
        let input_names = series.iter().map(|s| s.name.clone()).collect();
        let ds = TimeSeriesDataset {
            time_labels,
            input_names,
            series,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.time_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_labels.is_empty()
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < MIN_STEPS {
            return Err(TrecError::Parse(format!(
                "need at least {MIN_STEPS} time steps, found {n}"
            )));
        }
        if let Some(w) = self.time_labels.windows(2).find(|w| w[1] <= w[0]) {
            return Err(TrecError::Parse(format!(
                "time labels must be strictly increasing ({} followed by {})",
                format_label(w[0]),
                format_label(w[1])
            )));
        }
        for s in &self.series {
            if s.values.len() != n {
                return Err(TrecError::LengthMismatch {
                    expected: n,
                    found: s.values.len(),
                }
                .for_variable(&s.name));
            }
        }
        Ok(())
    }
}

/// Formats a time label without a trailing ".0" for whole numbers.
pub fn format_label(t: f64) -> String {
    if t.fract() == 0.0 && t.abs() < 1e15 {
        format!("{}", t as i64)
    } else {
        format!("{t}")
    }
}

/// Parses a table whose first column holds numeric time labels and whose
/// remaining columns are variables. Row and column numbers in errors are
/// 1-based and count the header as row 1.
pub fn parse_dataset(text: &str, format: CsvFormat) -> Result<TimeSeriesDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| TrecError::Parse(e.to_string()))?
        .clone();
    if headers.len() < 2 {
        return Err(TrecError::Parse(format!(
            "need a time column and at least one variable column, found {} column(s)",
            headers.len()
        )));
    }

    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut time_labels = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); names.len()];

    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| TrecError::Parse(format!("row {row}: {e}")))?;
        if record.len() != headers.len() {
            return Err(TrecError::Parse(format!(
                "row {row}: expected {} fields, found {}",
                headers.len(),
                record.len()
            )));
        }
        let label = record[0].parse::<f64>().ok().filter(|t| t.is_finite()).ok_or_else(|| {
            TrecError::Cell {
                row,
                column: 1,
                message: format!("time label '{}' is not numeric", &record[0]),
            }
        })?;
        time_labels.push(label);
        for (j, cell) in record.iter().skip(1).enumerate() {
            columns[j].push(parse_cell(cell).map_err(|message| TrecError::Cell {
                row,
                column: j + 2,
                message,
            })?);
        }
    }

    let series = names
        .into_iter()
        .zip(columns)
        .enumerate()
        .map(|(i, (name, values))| Series {
            name,
            column: i + 1,
            values,
        })
        .collect();
    TimeSeriesDataset::new(time_labels, series)
}

fn parse_cell(cell: &str) -> std::result::Result<Option<f64>, String> {
    if cell.is_empty() || MISSING_TOKENS.contains(&cell) {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("'{cell}' is not numeric")),
    }
}

/// Fills interior gaps by linear interpolation between the nearest observed
/// neighbours and drops variables missing their first or last value.
/// Returns the retained dataset and the original names of removed variables.
pub fn interpolate_and_filter(d: &TimeSeriesDataset) -> Result<(TimeSeriesDataset, Vec<String>)> {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for s in &d.series {
        match interpolate(&s.values) {
            Some(values) => kept.push(Series {
                values: values.into_iter().map(Some).collect(),
                ..s.clone()
            }),
            None => removed.push(s.name.clone()),
        }
    }
    if kept.is_empty() {
        return Err(TrecError::NoVariablesRemain);
    }
    Ok((
        TimeSeriesDataset {
            time_labels: d.time_labels.clone(),
            input_names: d.input_names.clone(),
            series: kept,
        },
        removed,
    ))
}

/// `None` when the first or last value is missing.
fn interpolate(values: &[Option<f64>]) -> Option<Vec<f64>> {
    let (first, last) = (values.first()?, values.last()?);
    if first.is_none() || last.is_none() {
        return None;
    }
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            let gap = i - prev;
            if gap > 1 {
                let start = out[prev];
                for k in 1..gap {
                    let w = k as f64 / gap as f64;
                    out.push(start + w * (v - start));
                }
            }
            out.push(*v);
            prev = i;
        }
    }
    Some(out)
}

/// A retained, fully observed and standardized variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanVariable {
    /// Canonical short name, `V{column}`.
    pub name: String,
    pub original: String,
    pub values: Vec<f64>,
    pub raw: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
}

impl CleanVariable {
    /// Inverts the standardization.
    pub fn destandardize(&self) -> Vec<f64> {
        self.values.iter().map(|z| z * self.sd + self.mean).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameMapping {
    pub original: String,
    pub canonical: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanDataset {
    pub time_labels: Vec<f64>,
    pub variables: Vec<CleanVariable>,
    /// Original names of variables excluded for boundary gaps.
    pub removed: Vec<String>,
    /// Covers every input variable, removed ones included.
    pub name_map: Vec<NameMapping>,
    pub warnings: Vec<String>,
}

impl CleanDataset {
    pub fn len(&self) -> usize {
        self.time_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_labels.is_empty()
    }

    pub fn variable(&self, name: &str) -> Option<&CleanVariable> {
        self.variables.iter().find(|v| v.name == name)
    }
}

/// Z-scores each variable with the sample (N-1) standard deviation.
/// Constant variables become all zeros and produce a warning.
pub fn standardize(d: &TimeSeriesDataset, removed: Vec<String>) -> Result<CleanDataset> {
    let n = d.len();
    let mut warnings = Vec::new();
    let mut variables = Vec::with_capacity(d.series.len());
    for s in &d.series {
        let raw: Vec<f64> = s
            .values
            .iter()
            .map(|v| {
                v.ok_or_else(|| {
                    TrecError::InvalidArgument("standardize requires fully observed data".into())
                        .for_variable(&s.name)
                })
            })
            .collect::<Result<_>>()?;
        let mean = raw.iter().sum::<f64>() / n as f64;
        let var = raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        let values = if sd > 0.0 {
            raw.iter().map(|x| (x - mean) / sd).collect()
        } else {
            warnings.push(format!(
                "constant variable {} ({}) standardized to zeros",
                s.canonical_name(),
                s.name
            ));
            vec![0.0; n]
        };
        variables.push(CleanVariable {
            name: s.canonical_name(),
            original: s.name.clone(),
            values,
            raw,
            mean,
            sd,
        });
    }
    let name_map = d
        .input_names
        .iter()
        .enumerate()
        .map(|(i, original)| NameMapping {
            original: original.clone(),
            canonical: canonical_name(i + 1),
        })
        .collect();
    Ok(CleanDataset {
        time_labels: d.time_labels.clone(),
        variables,
        removed,
        name_map,
        warnings,
    })
}

/// `interpolate_and_filter` followed by `standardize`.
pub fn prepare(d: &TimeSeriesDataset) -> Result<CleanDataset> {
    let (filtered, removed) = interpolate_and_filter(d)?;
    standardize(&filtered, removed)
}
