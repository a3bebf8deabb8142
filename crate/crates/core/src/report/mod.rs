//! Result artifacts: cluster-mean tables, correlations, distribution data,
//! and labeled choropleth GeoJSON.

pub mod writers;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::features::{standardize, FeatureMatrix, Normalization};
use crate::geometry::gridio::cell_ring_wgs84;
use crate::geometry::HexGrid;

/// Per-cluster mean of mean-ratio-normalized features.
///
/// Feature rows keep catalogue order; columns are clusters 0..K-1. The
/// cluster-size-weighted average of each feature row equals 1.
#[derive(Debug, Clone)]
pub struct ClusterMeansTable {
    pub feature_names: Vec<String>,
    pub k: usize,
    /// Feature-major, `feature_names.len() * k`; NaN marks empty clusters.
    pub values: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
    pub empty_clusters: Vec<usize>,
}

impl ClusterMeansTable {
    pub fn get(&self, feature: usize, cluster: usize) -> f64 {
        self.values[feature * self.k + cluster]
    }
}

/// Mean-ratio normalizes the raw matrix, then averages per cluster.
pub fn cluster_means(raw: &FeatureMatrix, labels: &[usize]) -> Result<ClusterMeansTable> {
    let n = raw.n_rows();
    if labels.len() != n {
        return Err(Error::LabelLengthMismatch {
            labels: labels.len(),
            rows: n,
        });
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let (ratio, _) = standardize(raw, Normalization::MeanRatio)?;
    let d = ratio.n_cols();

    let mut cluster_sizes = vec![0usize; k];
    for &l in labels {
        cluster_sizes[l] += 1;
    }
    let empty_clusters: Vec<usize> = (0..k).filter(|&c| cluster_sizes[c] == 0).collect();
    if !empty_clusters.is_empty() {
        log::warn!("empty cluster(s) in means table: {empty_clusters:?}");
    }

    let mut sums = vec![0.0; d * k];
    for (i, &l) in labels.iter().enumerate() {
        for (j, &v) in ratio.row(i).iter().enumerate() {
            sums[j * k + l] += v;
        }
    }
    let values = (0..d * k)
        .map(|idx| {
            let c = idx % k;
            if cluster_sizes[c] == 0 {
                f64::NAN
            } else {
                sums[idx] / cluster_sizes[c] as f64
            }
        })
        .collect();
    Ok(ClusterMeansTable {
        feature_names: ratio.column_names,
        k,
        values,
        cluster_sizes,
        empty_clusters,
    })
}

/// Pearson correlation matrix of a standardized matrix, row-major d x d
/// with an exact unit diagonal.
pub fn correlation_matrix(matrix: &FeatureMatrix) -> Result<Vec<f64>> {
    let n = matrix.n_rows();
    if n < 2 {
        return Err(Error::TooFewInputs { min: 2, got: n });
    }
    let d = matrix.n_cols();
    let mut means = vec![0.0; d];
    for i in 0..n {
        for (j, &v) in matrix.row(i).iter().enumerate() {
            means[j] += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = vec![0.0; d * d];
    for i in 0..n {
        let row = matrix.row(i);
        for a in 0..d {
            let da = row[a] - means[a];
            for b in a..d {
                cov[a * d + b] += da * (row[b] - means[b]);
            }
        }
    }
    let mut out = vec![0.0; d * d];
    for a in 0..d {
        for b in a..d {
            let value = if a == b {
                1.0
            } else {
                let denom = (cov[a * d + a] * cov[b * d + b]).sqrt();
                if denom == 0.0 {
                    0.0
                } else {
                    cov[a * d + b] / denom
                }
            };
            out[a * d + b] = value;
            out[b * d + a] = value;
        }
    }
    Ok(out)
}

/// Labeled hexagon map for one city.
#[derive(Debug, Clone)]
pub struct ChoroplethDoc {
    pub json: Value,
}

/// One polygon feature per cell with `cell_id`, `city`, and `cluster`
/// properties, unprojected back to WGS84.
pub fn export_choropleth(grid: &HexGrid, labels: &[usize], city: &str) -> Result<ChoroplethDoc> {
    if labels.len() != grid.cells.len() {
        return Err(Error::LabelCellMismatch {
            labels: labels.len(),
            cells: grid.cells.len(),
        });
    }
    let features: Vec<Value> = grid
        .cells
        .iter()
        .zip(labels.iter())
        .map(|(cell, &label)| {
            json!({
                "type": "Feature",
                "properties": {
                    "cell_id": cell.cell_id,
                    "city": city,
                    "cluster": label,
                },
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [cell_ring_wgs84(&grid.frame, cell)],
                },
            })
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("type".into(), Value::String("FeatureCollection".into()));
    doc.insert("features".into(), Value::Array(features));
    Ok(ChoroplethDoc {
        json: Value::Object(doc),
    })
}

/// Reads back the (cell_id, cluster) pairs of a choropleth document.
pub fn choropleth_labels(doc: &Value) -> Result<Vec<(i64, usize)>> {
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::GeoJson("missing features".into()))?;
    features
        .iter()
        .map(|f| {
            let props = f
                .get("properties")
                .ok_or_else(|| Error::GeoJson("feature without properties".into()))?;
            let cell_id = props
                .get("cell_id")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::GeoJson("missing cell_id".into()))?;
            let cluster = props
                .get("cluster")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::GeoJson("missing cluster".into()))?;
            Ok((cell_id, cluster as usize))
        })
        .collect()
}
