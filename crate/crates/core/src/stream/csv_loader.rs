use std::collections::{BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use super::{ColumnKind, FeatureColumn, Schema, StreamSource};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: String,
    /// Raw label values mapped to class 1; everything else is class 0.
    pub positive_labels: BTreeSet<String>,
    /// Used instead of `positive_labels` when that set is empty: these raw
    /// values are class 0 and everything else is class 1.
    pub negative_labels: BTreeSet<String>,
    /// Columns ignored entirely (identifiers, timestamps, leaked labels).
    pub drop_columns: Vec<String>,
    /// Columns to ordinal-encode. When `None`, a column is categorical iff
    /// its value in the first data row does not parse as a number.
    pub categorical_columns: Option<Vec<String>>,
}

impl CsvOptions {
    pub fn new(
        label_column: impl Into<String>,
        positive_labels: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        CsvOptions {
            label_column: label_column.into(),
            positive_labels: positive_labels.into_iter().map(Into::into).collect(),
            negative_labels: BTreeSet::new(),
            drop_columns: Vec::new(),
            categorical_columns: None,
        }
    }

    fn class_of(&self, raw: &str) -> u8 {
        if self.positive_labels.is_empty() {
            !self.negative_labels.contains(raw) as u8
        } else {
            self.positive_labels.contains(raw) as u8
        }
    }
}

#[derive(Debug, Clone)]
enum Encoder {
    Numeric,
    Categorical {
        codes: HashMap<String, usize>,
        order: Vec<String>,
    },
}

impl Encoder {
    fn categorical() -> Self {
        Encoder::Categorical {
            codes: HashMap::new(),
            order: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
struct Layout {
    header: Vec<String>,
    label_pos: usize,
    /// `(column position, encoder)` for each feature, in file order.
    encoders: Vec<(usize, Encoder)>,
}

/// CSV ingestion with categorical encoders shared across every file loaded
/// through the same loader, so a training file and a test file agree on
/// category codes.
#[derive(Debug, Clone)]
pub struct CsvLoader {
    opts: CsvOptions,
    layout: Option<Layout>,
}

impl CsvLoader {
    pub fn new(opts: CsvOptions) -> Self {
        CsvLoader { opts, layout: None }
    }

    pub fn load_path(&mut self, path: impl AsRef<Path>) -> Result<StreamSource> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        self.load_reader(std::io::BufReader::new(file))
    }

    pub fn load_reader<R: Read>(&mut self, reader: R) -> Result<StreamSource> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);

        let header: Vec<String> = match rdr.headers() {
            Ok(h) => h.iter().map(str::to_owned).collect(),
            Err(e) => return Err(row_error(e)),
        };
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(Error::EmptyStream);
        }

        let mut rows = Vec::new();
        let mut record = csv::StringRecord::new();
        loop {
            match rdr.read_record(&mut record) {
                Ok(true) => {}
                Ok(false) => break,
                Err(e) => return Err(row_error(e)),
            }
            let line = record.position().map_or(0, |p| p.line());
            if self.layout.is_none() {
                self.layout = Some(self.build_layout(&header, &record)?);
            }
            let layout = self.layout.as_mut().expect("layout initialised above");
            if rows.is_empty() && layout.header != header {
                return Err(Error::Schema(
                    "header differs from the first file loaded by this loader".into(),
                ));
            }
            let mut features = Vec::with_capacity(layout.encoders.len());
            for (pos, enc) in layout.encoders.iter_mut() {
                let raw = &record[*pos];
                let v = match enc {
                    Encoder::Numeric => match raw.parse::<f64>() {
                        Ok(v) if v.is_finite() => v,
                        _ => {
                            return Err(Error::Row {
                                line,
                                message: format!(
                                    "column '{}': cannot parse '{raw}' as a finite number",
                                    layout.header[*pos]
                                ),
                            })
                        }
                    },
                    Encoder::Categorical { codes, order } => {
                        let next = order.len();
                        let code = *codes.entry(raw.to_owned()).or_insert_with(|| {
                            order.push(raw.to_owned());
                            next
                        });
                        code as f64
                    }
                };
                features.push(v);
            }
            let label = self.opts.class_of(&record[layout.label_pos]);
            rows.push((features, label));
        }

        if rows.is_empty() {
            return Err(Error::EmptyStream);
        }
        let layout = self.layout.as_ref().expect("set when rows were read");
        StreamSource::from_rows(schema_of(layout), rows)
    }

    fn build_layout(&self, header: &[String], first: &csv::StringRecord) -> Result<Layout> {
        let mut seen = BTreeSet::new();
        for h in header {
            if !seen.insert(h.as_str()) {
                return Err(Error::Schema(format!("duplicate column '{h}'")));
            }
        }
        let label_pos = header
            .iter()
            .position(|h| *h == self.opts.label_column)
            .ok_or_else(|| {
                Error::Schema(format!("missing label column '{}'", self.opts.label_column))
            })?;
        if !self.opts.positive_labels.is_empty() && !self.opts.negative_labels.is_empty() {
            return Err(Error::Schema("give either positive or negative labels, not both".into()));
        }
        for c in &self.opts.drop_columns {
            if !header.contains(c) {
                return Err(Error::Schema(format!("missing dropped column '{c}'")));
            }
            if *c == self.opts.label_column {
                return Err(Error::Schema(format!("label column '{c}' cannot be dropped")));
            }
        }
        if let Some(cats) = &self.opts.categorical_columns {
            for c in cats {
                if !header.contains(c) {
                    return Err(Error::Schema(format!("missing categorical column '{c}'")));
                }
            }
        }
        let encoders: Vec<(usize, Encoder)> = header
            .iter()
            .enumerate()
            .filter(|(i, name)| *i != label_pos && !self.opts.drop_columns.contains(name))
            .map(|(i, name)| {
                let categorical = match &self.opts.categorical_columns {
                    Some(cats) => cats.contains(name),
                    None => first[i].parse::<f64>().is_err(),
                };
                let enc = if categorical {
                    Encoder::categorical()
                } else {
                    Encoder::Numeric
                };
                (i, enc)
            })
            .collect();
        if encoders.is_empty() {
            return Err(Error::Schema("no feature columns besides the label".into()));
        }
        Ok(Layout {
            header: header.to_vec(),
            label_pos,
            encoders,
        })
    }
}

fn schema_of(layout: &Layout) -> Schema {
    Schema {
        features: layout
            .encoders
            .iter()
            .map(|(pos, enc)| FeatureColumn {
                name: layout.header[*pos].clone(),
                kind: match enc {
                    Encoder::Numeric => ColumnKind::Numeric,
                    Encoder::Categorical { order, .. } => ColumnKind::Categorical(order.clone()),
                },
            })
            .collect(),
    }
}

fn row_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Csv(e),
        _ => Error::Row {
            line,
            message: e.to_string(),
        },
    }
}

/// Loads a headed, comma-separated file. Categorical columns are
/// ordinal-encoded in first-seen order; the label is 1 iff its raw value is
/// in `positive_labels`.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    positive_labels: &BTreeSet<String>,
) -> Result<StreamSource> {
    CsvLoader::new(CsvOptions::new(label_column, positive_labels.iter().cloned())).load_path(path)
}
