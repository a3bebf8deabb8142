//! Feature matrix CSV (schema: `city,cell_id,<feature names...>`) plus a
//! JSON sidecar carrying grid-size provenance for cross-city joins.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::matrix::{FeatureMatrix, Normalization, RowId};

pub fn write_features_csv<W: Write>(matrix: &FeatureMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["city".to_string(), "cell_id".to_string()];
    header.extend(matrix.column_names.iter().cloned());
    w.write_record(&header)?;
    for (r, id) in matrix.row_ids.iter().enumerate() {
        let mut record = vec![id.city.clone(), id.cell_id.to_string()];
        record.extend(matrix.row(r).iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(input: R) -> Result<FeatureMatrix> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::FeaturesCsv(e.to_string()))?
        .clone();
    if header.len() < 3 || &header[0] != "city" || &header[1] != "cell_id" {
        return Err(Error::FeaturesCsv(
            "header must start with city,cell_id and list at least one feature".into(),
        ));
    }
    let column_names: Vec<String> = header.iter().skip(2).map(str::to_owned).collect();
    let d = column_names.len();
    let mut row_ids = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::FeaturesCsv(e.to_string()))?;
        if record.len() != d + 2 {
            return Err(Error::FeaturesCsv(format!(
                "row {} has {} fields, expected {}",
                i + 2,
                record.len(),
                d + 2
            )));
        }
        let cell_id: i64 = record[1]
            .parse()
            .map_err(|e| Error::FeaturesCsv(format!("row {}: bad cell_id: {e}", i + 2)))?;
        row_ids.push(RowId {
            city: record[0].to_string(),
            cell_id,
        });
        for field in record.iter().skip(2) {
            let v: f64 = field
                .parse()
                .map_err(|e| Error::FeaturesCsv(format!("row {}: bad value: {e}", i + 2)))?;
            if !v.is_finite() {
                return Err(Error::FeaturesCsv(format!(
                    "row {}: non-finite value {field}",
                    i + 2
                )));
            }
            values.push(v);
        }
    }
    Ok(FeatureMatrix {
        row_ids,
        column_names,
        values,
        normalization: Normalization::Raw,
        grid_size_m: None,
    })
}

/// Sidecar provenance written next to a features CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub city: String,
    pub grid_size_m: f64,
    pub cell_count: usize,
}

pub fn meta_path_for(csv_path: &std::path::Path) -> std::path::PathBuf {
    let mut os = csv_path.as_os_str().to_owned();
    os.push(".meta.json");
    std::path::PathBuf::from(os)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::matrix::{assemble_matrix, Aggregation, FeatureColumn};

    #[test]
    fn csv_roundtrip_preserves_values_exactly() {
        let cols = vec![
            FeatureColumn {
                name: "a".into(),
                values: vec![0.1, 2.0, 3.5e-12],
                aggregation: Aggregation::Extensive,
            },
            FeatureColumn {
                name: "b".into(),
                values: vec![1.0 / 3.0, 0.0, 9.9],
                aggregation: Aggregation::Intensive,
            },
        ];
        let m = assemble_matrix(&cols, "lausanne", &[3, -7, 12], Some(450.0)).unwrap();
        let mut buf = Vec::new();
        write_features_csv(&m, &mut buf).unwrap();
        let back = read_features_csv(buf.as_slice()).unwrap();
        assert_eq!(back.row_ids, m.row_ids);
        assert_eq!(back.column_names, m.column_names);
        assert_eq!(back.values, m.values, "f64 round-trips through Display");
    }

    #[test]
    fn header_validation() {
        let bad = "cell,city,a\nx,1,2\n";
        assert!(read_features_csv(bad.as_bytes()).is_err());
    }
}
