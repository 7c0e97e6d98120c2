//! Numeric datasets: loading, validation and bounding boxes.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An `n x p` matrix of finite observations, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    p: usize,
    row_labels: Option<Vec<String>>,
    feature_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Zero-based column holding a row label; excluded from the values.
    pub label_column: Option<usize>,
}

impl CsvOptions {
    pub fn sniff(text: &str) -> Self {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let non_numeric = |line: &str| -> Vec<usize> {
            line.split(',')
                .enumerate()
                .filter(|(_, c)| c.trim().parse::<f64>().is_err())
                .map(|(j, _)| j)
                .collect()
        };
        let Some(first) = lines.next() else {
            return Self::default();
        };
        let has_header = !non_numeric(first).is_empty();
        let data_line = if has_header { lines.next() } else { Some(first) };
        let label_column = data_line.map(non_numeric).and_then(|cols| match cols.as_slice() {
            [j] => Some(*j),
            _ => None,
        });
        Self {
            has_header,
            label_column,
        }
    }
}

/// Per-feature bounding box of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanges {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl FeatureRanges {
    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    pub fn width(&self, j: usize) -> f64 {
        self.maxs[j] - self.mins[j]
    }
}

impl Dataset {
    /// Builds a dataset from a row-major buffer.
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 || p < 1 {
            return Err(Error::EmptyDataset { rows: n, cols: p });
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: n * p,
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: idx / p + 1,
                column: idx % p + 1,
            });
        }
        Ok(Self {
            values,
            n,
            p,
            row_labels: None,
            feature_names: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * p);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::Parse {
                    row: i + 1,
                    column: row.len().min(p) + 1,
                    message: format!("expected {p} values, found {}", row.len()),
                });
            }
            values.extend(row);
        }
        Self::new(n, p, values)
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                left: labels.len(),
                right: self.n,
            });
        }
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::DimensionMismatch {
                left: names.len(),
                right: self.p,
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Copy with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut out = Self::new(self.n, self.p, self.values.iter().map(|v| v * c).collect())?;
        out.row_labels = self.row_labels.clone();
        out.feature_names = self.feature_names.clone();
        Ok(out)
    }

    /// Copy with rows reordered so that row `i` of the result is row `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for &i in order {
            values.extend_from_slice(self.row(i));
        }
        Self::new(order.len(), self.p, values)
    }

    pub fn feature_ranges(&self) -> FeatureRanges {
        let mut mins = self.row(0).to_vec();
        let mut maxs = mins.clone();
        for row in self.rows().skip(1) {
            for (j, &v) in row.iter().enumerate() {
                if v < mins[j] {
                    mins[j] = v;
                }
                if v > maxs[j] {
                    maxs[j] = v;
                }
            }
        }
        FeatureRanges { mins, maxs }
    }

    pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file, options)
    }

    /// Loads a CSV, treating the first line as a header when any of its cells
    /// is non-numeric and using the single non-numeric column of the first
    /// data row, if there is exactly one, as row labels.
    pub fn load_csv_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(text.as_bytes(), &CsvOptions::sniff(&text))
    }

    pub fn read_csv(reader: impl Read, options: &CsvOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(options.has_header)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let header: Option<Vec<String>> = if options.has_header {
            let h = rdr.headers().map_err(|e| csv_error(0, e))?;
            Some(h.iter().map(str::to_owned).collect())
        } else {
            None
        };

        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut width: Option<usize> = header.as_ref().map(Vec::len);
        let mut n = 0;
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| csv_error(row, e))?;
            if record.len() == 1 && record.get(0) == Some("") {
                continue;
            }
            match width {
                Some(w) if w != record.len() => {
                    return Err(Error::Parse {
                        row,
                        column: record.len().min(w) + 1,
                        message: format!("expected {w} fields, found {}", record.len()),
                    });
                }
                None => width = Some(record.len()),
                _ => {}
            }
            if let Some(lc) = options.label_column {
                if lc >= record.len() {
                    return Err(Error::Parse {
                        row,
                        column: lc + 1,
                        message: "label column out of range".into(),
                    });
                }
            }
            for (j, cell) in record.iter().enumerate() {
                if options.label_column == Some(j) {
                    labels.push(cell.to_owned());
                    continue;
                }
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("`{cell}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite { row, column: j + 1 });
                }
                values.push(v);
            }
            n += 1;
        }

        let total = width.unwrap_or(0);
        let p = total - usize::from(options.label_column.is_some() && total > 0);
        let mut data = Self::new(n, p, values)?;
        if options.label_column.is_some() {
            data.row_labels = Some(labels);
        }
        if let Some(h) = header {
            let names: Vec<String> = h
                .into_iter()
                .enumerate()
                .filter(|(j, _)| options.label_column != Some(*j))
                .map(|(_, s)| s)
                .collect();
            data.feature_names = Some(names);
        }
        Ok(data)
    }

    /// Writes the values (and labels, as a trailing column) as CSV. Values use
    /// the shortest representation that parses back to the same `f64`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        if let Some(names) = &self.feature_names {
            let mut line = names.join(",");
            if self.row_labels.is_some() {
                line.push_str(",label");
            }
            writeln!(w, "{line}")?;
        }
        for (i, row) in self.rows().enumerate() {
            let mut line = row
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(",");
            if let Some(labels) = &self.row_labels {
                line.push(',');
                line.push_str(&labels[i]);
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Parse {
        row,
        column: 0,
        message: e.to_string(),
    }
}
