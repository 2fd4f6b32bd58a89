//! Mixed-variable data model: schema, CSV ingestion, validation, and
//! range normalization.
//!
//! A dataset is a table whose columns are either continuous (finite reals)
//! or categorical (values from a finite, ordered choice list). Categorical
//! cells are stored as 0-based indices into the column's category list; the
//! schema is the single source of truth for label text.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gower::PointView;

/// One column of a mixed-variable table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnSpec {
    Continuous { name: String },
    Categorical { name: String, categories: Vec<String> },
}

impl ColumnSpec {
    pub fn name(&self) -> &str {
        match self {
            ColumnSpec::Continuous { name } => name,
            ColumnSpec::Categorical { name, .. } => name,
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnSpec::Categorical { .. })
    }
}

#[derive(Deserialize)]
struct RawSchema {
    columns: Vec<ColumnSpec>,
}

/// Ordered column list with derived dimension counts.
///
/// `m = d_con + d_cat` is the mixed dimensionality; `expanded_dim` is the
/// length of one centroid after every categorical column is replaced by a
/// selection-probability block of its choice count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct Schema {
    columns: Vec<ColumnSpec>,
}

impl TryFrom<RawSchema> for Schema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        Schema::new(raw.columns)
    }
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::SchemaInvalid("schema has no columns".into()));
        }
        let mut names = HashSet::new();
        for col in &columns {
            if !names.insert(col.name().to_string()) {
                return Err(Error::SchemaInvalid(format!(
                    "duplicate column name '{}'",
                    col.name()
                )));
            }
            if let ColumnSpec::Categorical { name, categories } = col {
                if categories.len() < 2 {
                    return Err(Error::SchemaInvalid(format!(
                        "categorical column '{name}' has {} categories, need at least 2",
                        categories.len()
                    )));
                }
                let distinct: HashSet<&String> = categories.iter().collect();
                if distinct.len() != categories.len() {
                    return Err(Error::SchemaInvalid(format!(
                        "categorical column '{name}' has duplicate category labels"
                    )));
                }
            }
        }
        Ok(Schema { columns })
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    /// Count of continuous columns.
    pub fn d_con(&self) -> usize {
        self.columns.iter().filter(|c| !c.is_categorical()).count()
    }

    /// Count of categorical columns.
    pub fn d_cat(&self) -> usize {
        self.columns.iter().filter(|c| c.is_categorical()).count()
    }

    /// Mixed dimensionality m = d_con + d_cat.
    pub fn m(&self) -> usize {
        self.columns.len()
    }

    /// Choice counts of the categorical columns, in schema order.
    pub fn choice_counts(&self) -> Vec<usize> {
        self.columns
            .iter()
            .filter_map(|c| match c {
                ColumnSpec::Categorical { categories, .. } => Some(categories.len()),
                _ => None,
            })
            .collect()
    }

    /// Length of one centroid after categorical expansion:
    /// d_con + sum of choice counts.
    pub fn expanded_dim(&self) -> usize {
        self.d_con() + self.choice_counts().iter().sum::<usize>()
    }

    /// Continuous column names in schema order.
    pub fn continuous_names(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| !c.is_categorical())
            .map(|c| c.name())
            .collect()
    }

    /// Category labels of the l-th categorical column.
    pub fn categories(&self, cat_slot: usize) -> &[String] {
        self.columns
            .iter()
            .filter_map(|c| match c {
                ColumnSpec::Categorical { categories, .. } => Some(categories.as_slice()),
                _ => None,
            })
            .nth(cat_slot)
            .expect("categorical slot out of range")
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::InputFile {
            path: path.to_path_buf(),
            source,
        })?;
        let schema: Schema = serde_json::from_reader(file)?;
        Ok(schema)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    /// Stable content hash of the schema (first 16 hex chars of SHA-256 of
    /// the canonical JSON form), embedded in result artifacts.
    pub fn hash_hex(&self) -> String {
        let canonical = serde_json::to_string(self).expect("schema serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A validated mixed-variable table.
///
/// Continuous and categorical values are stored in separate row-major
/// blocks; `point(i)` exposes row `i` as a [`PointView`] for distance code.
/// Immutable after load; safe to share read-only across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    /// n x d_con, row-major, in the order continuous columns appear in the schema.
    cont: Vec<f64>,
    /// n x d_cat, row-major, category indices.
    cat: Vec<u32>,
    /// Observed (min, max) per continuous column.
    ranges: Vec<(f64, f64)>,
    n: usize,
}

impl Dataset {
    /// Build a dataset from already-split row data and validate it.
    pub fn from_parts(schema: Schema, cont: Vec<f64>, cat: Vec<u32>) -> Result<Self> {
        let d_con = schema.d_con();
        let d_cat = schema.d_cat();
        let n = if d_con > 0 {
            cont.len() / d_con
        } else if d_cat > 0 {
            cat.len() / d_cat
        } else {
            0
        };
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if cont.len() != n * d_con || cat.len() != n * d_cat {
            return Err(Error::SchemaMismatch(format!(
                "value blocks ({}, {}) do not tile {n} rows of ({d_con}, {d_cat})",
                cont.len(),
                cat.len()
            )));
        }
        for &v in &cont {
            if !v.is_finite() {
                return Err(Error::NonNumericContinuous {
                    column: "<from_parts>".into(),
                    row: 0,
                    value: v.to_string(),
                });
            }
        }
        let choices = schema.choice_counts();
        let cat_names: Vec<&str> = schema
            .columns
            .iter()
            .filter(|c| c.is_categorical())
            .map(|c| c.name())
            .collect();
        for (idx, &c) in cat.iter().enumerate() {
            let slot = idx % d_cat.max(1);
            if (c as usize) >= choices[slot] {
                return Err(Error::UnknownCategory {
                    column: cat_names[slot].to_string(),
                    row: idx / d_cat.max(1),
                    value: c.to_string(),
                });
            }
        }
        let ranges = compute_ranges(&cont, n, d_con);
        Ok(Dataset {
            schema,
            cont,
            cat,
            ranges,
            n,
        })
    }

    /// Load a CSV data file against a JSON schema file.
    ///
    /// The CSV must have a header row naming every schema column
    /// (order-insensitive); extra columns are rejected. Categorical strings
    /// are mapped to indices, continuous cells must parse to finite numbers,
    /// and empty cells are rejected.
    pub fn load(csv_path: impl AsRef<Path>, schema_path: impl AsRef<Path>) -> Result<Self> {
        let schema = Schema::from_json_file(schema_path)?;
        let csv_path = csv_path.as_ref();
        let file = File::open(csv_path).map_err(|source| Error::InputFile {
            path: csv_path.to_path_buf(),
            source,
        })?;
        Self::from_csv_reader(schema, file)
    }

    /// Parse CSV from any reader against an in-memory schema.
    pub fn from_csv_reader(schema: Schema, reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);

        let headers = rdr.headers()?.clone();
        let mut seen = HashSet::new();
        for h in headers.iter() {
            if !seen.insert(h.to_string()) {
                return Err(Error::UnknownColumn {
                    name: h.to_string(),
                    detail: "duplicated in CSV header".into(),
                });
            }
            if !schema.columns.iter().any(|c| c.name() == h) {
                return Err(Error::UnknownColumn {
                    name: h.to_string(),
                    detail: "present in CSV header but not in schema".into(),
                });
            }
        }
        // csv position of each schema column
        let mut col_pos = Vec::with_capacity(schema.m());
        for col in &schema.columns {
            match headers.iter().position(|h| h == col.name()) {
                Some(p) => col_pos.push(p),
                None => {
                    return Err(Error::UnknownColumn {
                        name: col.name().to_string(),
                        detail: "required by schema but missing from CSV header".into(),
                    })
                }
            }
        }

        let d_con = schema.d_con();
        let d_cat = schema.d_cat();
        let mut cont = Vec::new();
        let mut cat = Vec::new();
        let mut n = 0usize;
        for (row_idx, record) in rdr.records().enumerate() {
            let record = record?;
            for (col, &pos) in schema.columns.iter().zip(&col_pos) {
                let cell = record.get(pos).unwrap_or("");
                if cell.is_empty() {
                    return Err(Error::MissingValue {
                        column: col.name().to_string(),
                        row: row_idx,
                    });
                }
                match col {
                    ColumnSpec::Continuous { name } => {
                        let v: f64 = cell.parse().map_err(|_| Error::NonNumericContinuous {
                            column: name.clone(),
                            row: row_idx,
                            value: cell.to_string(),
                        })?;
                        if !v.is_finite() {
                            return Err(Error::NonNumericContinuous {
                                column: name.clone(),
                                row: row_idx,
                                value: cell.to_string(),
                            });
                        }
                        cont.push(v);
                    }
                    ColumnSpec::Categorical { name, categories } => {
                        match categories.iter().position(|c| c == cell) {
                            Some(idx) => cat.push(idx as u32),
                            None => {
                                return Err(Error::UnknownCategory {
                                    column: name.clone(),
                                    row: row_idx,
                                    value: cell.to_string(),
                                })
                            }
                        }
                    }
                }
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let ranges = compute_ranges(&cont, n, d_con);
        debug_assert_eq!(cont.len(), n * d_con);
        debug_assert_eq!(cat.len(), n * d_cat);
        Ok(Dataset {
            schema,
            cont,
            cat,
            ranges,
            n,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Observed (min, max) per continuous column.
    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    /// Range widths (max - min) per continuous column, the R_k divisors of
    /// the Gower distance.
    pub fn range_widths(&self) -> Vec<f64> {
        self.ranges.iter().map(|(lo, hi)| hi - lo).collect()
    }

    /// Row `i` as a borrowed mixed point.
    pub fn point(&self, i: usize) -> PointView<'_> {
        let d_con = self.schema.d_con();
        let d_cat = self.schema.d_cat();
        PointView {
            cont: &self.cont[i * d_con..(i + 1) * d_con],
            cat: &self.cat[i * d_cat..(i + 1) * d_cat],
        }
    }

    /// Rescale every continuous column to [0, 1]: x -> (x - min) / (max - min).
    ///
    /// Zero-range (constant) columns map to 0.0. Categorical values are
    /// unchanged. Idempotent: normalizing twice equals normalizing once.
    pub fn normalize(&self) -> Dataset {
        let d_con = self.schema.d_con();
        let mut cont = self.cont.clone();
        for (k, &(lo, hi)) in self.ranges.iter().enumerate() {
            let width = hi - lo;
            for row in 0..self.n {
                let v = &mut cont[row * d_con + k];
                *v = if width > 0.0 { (*v - lo) / width } else { 0.0 };
            }
        }
        let ranges = compute_ranges(&cont, self.n, d_con);
        Dataset {
            schema: self.schema.clone(),
            cont,
            cat: self.cat.clone(),
            ranges,
            n: self.n,
        }
    }

    /// Write the dataset back to CSV with header, restoring category labels.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(self.schema.columns.iter().map(|c| c.name()))?;
        let d_con = self.schema.d_con();
        let d_cat = self.schema.d_cat();
        for row in 0..self.n {
            let mut record = Vec::with_capacity(self.schema.m());
            let mut ci = 0usize;
            let mut gi = 0usize;
            for col in &self.schema.columns {
                match col {
                    ColumnSpec::Continuous { .. } => {
                        record.push(self.cont[row * d_con + ci].to_string());
                        ci += 1;
                    }
                    ColumnSpec::Categorical { categories, .. } => {
                        let idx = self.cat[row * d_cat + gi] as usize;
                        record.push(categories[idx].clone());
                        gi += 1;
                    }
                }
            }
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        self.write_csv(file)
    }
}

fn compute_ranges(cont: &[f64], n: usize, d_con: usize) -> Vec<(f64, f64)> {
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); d_con];
    for row in 0..n {
        for k in 0..d_con {
            let v = cont[row * d_con + k];
            let (lo, hi) = &mut ranges[k];
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
    }
    ranges
}
