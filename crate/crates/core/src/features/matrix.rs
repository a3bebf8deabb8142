use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Extensive,
    Intensive,
}

/// One feature across all cells of a grid, in grid cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub values: Vec<f64>,
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    Zscore,
    MeanRatio,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::Zscore => "zscore",
            Normalization::MeanRatio => "mean_ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowId {
    pub city: String,
    pub cell_id: i64,
}

/// Dense BSU-by-feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub row_ids: Vec<RowId>,
    pub column_names: Vec<String>,
    /// Row-major, `row_ids.len() * column_names.len()` entries.
    pub values: Vec<f64>,
    pub normalization: Normalization,
    /// Grid spacing the rows were aggregated on, when known.
    pub grid_size_m: Option<f64>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let d = self.n_cols();
        &self.values[row * d..(row + 1) * d]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|n| n == name)
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.get(r, col)).collect()
    }

    fn expect_normalization(&self, expected: Normalization) -> Result<()> {
        if self.normalization != expected {
            return Err(Error::WrongNormalization {
                expected: expected.as_str(),
                actual: self.normalization.as_str(),
            });
        }
        Ok(())
    }
}

/// Assembles raw feature columns into a matrix, one row per cell.
///
/// Columns keep their given order; `cell_ids` must be in the same grid
/// order the columns were computed in.
pub fn assemble_matrix(
    columns: &[FeatureColumn],
    city_tag: &str,
    cell_ids: &[i64],
    grid_size_m: Option<f64>,
) -> Result<FeatureMatrix> {
    if columns.is_empty() {
        return Err(Error::NoColumns);
    }
    let mut names: Vec<String> = Vec::with_capacity(columns.len());
    for col in columns {
        if names.contains(&col.name) {
            return Err(Error::DuplicateColumn(col.name.clone()));
        }
        if col.values.len() != cell_ids.len() {
            return Err(Error::ColumnLengthMismatch {
                name: col.name.clone(),
                len: col.values.len(),
                expected: cell_ids.len(),
            });
        }
        names.push(col.name.clone());
    }
    let n = cell_ids.len();
    let d = columns.len();
    let mut values = vec![0.0; n * d];
    for (c, col) in columns.iter().enumerate() {
        for (r, &v) in col.values.iter().enumerate() {
            values[r * d + c] = v;
        }
    }
    let row_ids = cell_ids
        .iter()
        .map(|&cell_id| RowId {
            city: city_tag.to_string(),
            cell_id,
        })
        .collect();
    Ok(FeatureMatrix {
        row_ids,
        column_names: names,
        values,
        normalization: Normalization::Raw,
        grid_size_m,
    })
}

pub fn column_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn column_is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Standardizes a raw matrix.
///
/// `Zscore`: per column (x - mean) / population stdev, constant columns
/// dropped. `MeanRatio`: per column x / mean, all-zero columns dropped.
/// Returns the standardized matrix and the dropped column names.
pub fn standardize(
    matrix: &FeatureMatrix,
    method: Normalization,
) -> Result<(FeatureMatrix, Vec<String>)> {
    matrix.expect_normalization(Normalization::Raw)?;
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    if n == 0 || d == 0 {
        return Err(Error::AllColumnsDegenerate);
    }

    let mut kept_cols: Vec<usize> = Vec::new();
    let mut dropped: Vec<String> = Vec::new();
    let mut transforms: Vec<(f64, f64)> = Vec::new(); // (offset, scale): (x - offset) / scale

    for c in 0..d {
        let col = matrix.column(c);
        let mean = column_mean(&col);
        match method {
            Normalization::Zscore => {
                if column_is_constant(&col) {
                    dropped.push(matrix.column_names[c].clone());
                    continue;
                }
                let var = col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
                kept_cols.push(c);
                transforms.push((mean, var.sqrt()));
            }
            Normalization::MeanRatio => {
                if col.iter().all(|&x| x == 0.0) {
                    dropped.push(matrix.column_names[c].clone());
                    continue;
                }
                kept_cols.push(c);
                transforms.push((0.0, mean));
            }
            Normalization::Raw => unreachable!("raw is not a standardization target"),
        }
    }

    if kept_cols.is_empty() {
        return Err(Error::AllColumnsDegenerate);
    }
    if !dropped.is_empty() {
        log::warn!(
            "standardize({}) dropped degenerate column(s): {}",
            method.as_str(),
            dropped.join(", ")
        );
    }

    let kd = kept_cols.len();
    let mut values = vec![0.0; n * kd];
    for (out_c, (&c, &(offset, scale))) in kept_cols.iter().zip(transforms.iter()).enumerate() {
        for r in 0..n {
            values[r * kd + out_c] = (matrix.get(r, c) - offset) / scale;
        }
    }
    let out = FeatureMatrix {
        row_ids: matrix.row_ids.clone(),
        column_names: kept_cols
            .iter()
            .map(|&c| matrix.column_names[c].clone())
            .collect(),
        values,
        normalization: method,
        grid_size_m: matrix.grid_size_m,
    };
    Ok((out, dropped))
}
