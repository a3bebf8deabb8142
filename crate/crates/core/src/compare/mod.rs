//! Cross-city comparison: joint clustering over pooled feature matrices.

use crate::error::{Error, Result};
use crate::features::{standardize, FeatureMatrix, Normalization};

/// Fraction of a cluster's BSUs each city must contribute for the cluster
/// to count as shared.
pub const DEFAULT_SHARED_MIN_SHARE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinMode {
    /// All cities aggregated on the same grid size.
    UniformGrid,
    /// Each city on its own (typically silhouette-selected) grid size.
    PerCityGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityRange {
    pub city: String,
    pub start: usize,
    pub end: usize,
}

/// Pooled multi-city matrix; normalization is computed over the union so
/// between-city differences survive standardization.
#[derive(Debug, Clone)]
pub struct JointMatrix {
    pub raw: FeatureMatrix,
    pub standardized: FeatureMatrix,
    pub dropped_columns: Vec<String>,
    pub city_ranges: Vec<CityRange>,
}

fn catalog_mismatch(first: &FeatureMatrix, other: &FeatureMatrix) -> Error {
    let only_first: Vec<&str> = first
        .column_names
        .iter()
        .filter(|n| !other.column_names.contains(n))
        .map(String::as_str)
        .collect();
    let only_other: Vec<&str> = other
        .column_names
        .iter()
        .filter(|n| !first.column_names.contains(n))
        .map(String::as_str)
        .collect();
    let describe = |items: Vec<&str>| {
        if items.is_empty() {
            "order differs".to_string()
        } else {
            items.join(", ")
        }
    };
    Error::ColumnCatalogMismatch {
        only_first: describe(only_first),
        only_other: describe(only_other),
    }
}

/// Concatenates raw per-city matrices and z-scores the union.
///
/// All inputs must share the identical column sequence; uniform-grid mode
/// additionally requires every input to record the same grid size.
pub fn join_cities(matrices: &[FeatureMatrix], mode: JoinMode) -> Result<JointMatrix> {
    if matrices.len() < 2 {
        return Err(Error::TooFewInputs {
            min: 2,
            got: matrices.len(),
        });
    }
    let first = &matrices[0];
    for m in matrices {
        if m.normalization != Normalization::Raw {
            return Err(Error::WrongNormalization {
                expected: "raw",
                actual: m.normalization.as_str(),
            });
        }
    }
    for m in &matrices[1..] {
        if m.column_names != first.column_names {
            return Err(catalog_mismatch(first, m));
        }
    }
    if mode == JoinMode::UniformGrid {
        let sizes: Vec<Option<f64>> = matrices.iter().map(|m| m.grid_size_m).collect();
        let all_equal = sizes
            .iter()
            .all(|s| matches!((s, sizes[0]), (Some(a), Some(b)) if *a == b));
        if !all_equal {
            return Err(Error::UniformGridSizeMismatch(format!("{sizes:?}")));
        }
    }

    let mut row_ids = Vec::new();
    let mut values = Vec::new();
    let mut city_ranges = Vec::new();
    for m in matrices {
        let start = row_ids.len();
        row_ids.extend(m.row_ids.iter().cloned());
        values.extend_from_slice(&m.values);
        let city = m
            .row_ids
            .first()
            .map(|r| r.city.clone())
            .unwrap_or_default();
        city_ranges.push(CityRange {
            city,
            start,
            end: row_ids.len(),
        });
    }
    let raw = FeatureMatrix {
        row_ids,
        column_names: first.column_names.clone(),
        values,
        normalization: Normalization::Raw,
        grid_size_m: if mode == JoinMode::UniformGrid {
            first.grid_size_m
        } else {
            None
        },
    };
    let (standardized, dropped_columns) = standardize(&raw, Normalization::Zscore)?;
    Ok(JointMatrix {
        raw,
        standardized,
        dropped_columns,
        city_ranges,
    })
}

/// Restricts a raw matrix to its `degree_centrality` column.
pub fn centrality_only_matrix(matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
    let col = matrix
        .column_index("degree_centrality")
        .ok_or_else(|| Error::MissingColumn("degree_centrality".into()))?;
    Ok(FeatureMatrix {
        row_ids: matrix.row_ids.clone(),
        column_names: vec!["degree_centrality".into()],
        values: matrix.column(col),
        normalization: matrix.normalization,
        grid_size_m: matrix.grid_size_m,
    })
}

/// Shared-vs-city-specific breakdown of a joint clustering.
#[derive(Debug, Clone)]
pub struct CrossCityReport {
    /// Distinct city tags in first-appearance order.
    pub cities: Vec<String>,
    pub k: usize,
    /// `contingency[cluster][city]` = BSU count.
    pub contingency: Vec<Vec<usize>>,
    pub cluster_sizes: Vec<usize>,
    /// A cluster is shared when every city contributes at least
    /// `min_share` of its BSUs (and at least one).
    pub shared: Vec<bool>,
    pub min_share: f64,
    /// `per_city_means[cluster][city][feature]`, on jointly mean-ratio
    /// normalized features; NaN when the (cluster, city) cell is empty.
    pub per_city_means: Vec<Vec<Vec<f64>>>,
    pub feature_names: Vec<String>,
}

/// Builds the contingency table and per-cluster per-city mean profiles for
/// a labeling of the joint matrix.
pub fn cross_city_report(
    labels: &[usize],
    joint: &JointMatrix,
    min_share: f64,
) -> Result<CrossCityReport> {
    let n = joint.raw.n_rows();
    if labels.len() != n {
        return Err(Error::LabelLengthMismatch {
            labels: labels.len(),
            rows: n,
        });
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);

    let mut cities: Vec<String> = Vec::new();
    let mut city_of_row = vec![0usize; n];
    for (i, id) in joint.raw.row_ids.iter().enumerate() {
        let idx = match cities.iter().position(|c| c == &id.city) {
            Some(idx) => idx,
            None => {
                cities.push(id.city.clone());
                cities.len() - 1
            }
        };
        city_of_row[i] = idx;
    }
    let n_cities = cities.len();

    let mut contingency = vec![vec![0usize; n_cities]; k];
    for (i, &l) in labels.iter().enumerate() {
        contingency[l][city_of_row[i]] += 1;
    }
    let cluster_sizes: Vec<usize> = contingency.iter().map(|row| row.iter().sum()).collect();

    let shared: Vec<bool> = (0..k)
        .map(|c| {
            let total = cluster_sizes[c];
            total > 0
                && (0..n_cities).all(|ci| {
                    let count = contingency[c][ci];
                    count >= 1 && count as f64 / total as f64 >= min_share
                })
        })
        .collect();

    // Per-cluster per-city profiles on jointly normalized features.
    let (ratio, _) = standardize(&joint.raw, Normalization::MeanRatio)?;
    let d = ratio.n_cols();
    let mut sums = vec![vec![vec![0.0; d]; n_cities]; k];
    let mut counts = vec![vec![0usize; n_cities]; k];
    for i in 0..n {
        let (l, ci) = (labels[i], city_of_row[i]);
        counts[l][ci] += 1;
        let row = ratio.row(i);
        for (j, &v) in row.iter().enumerate() {
            sums[l][ci][j] += v;
        }
    }
    let per_city_means = sums
        .into_iter()
        .enumerate()
        .map(|(l, per_city)| {
            per_city
                .into_iter()
                .enumerate()
                .map(|(ci, sum)| {
                    if counts[l][ci] == 0 {
                        vec![f64::NAN; d]
                    } else {
                        sum.into_iter().map(|s| s / counts[l][ci] as f64).collect()
                    }
                })
                .collect()
        })
        .collect();

    Ok(CrossCityReport {
        cities,
        k,
        contingency,
        cluster_sizes,
        shared,
        min_share,
        per_city_means,
        feature_names: ratio.column_names,
    })
}
