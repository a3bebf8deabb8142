//! CSV writers for the report output tree.

use std::io::Write;

use crate::compare::CrossCityReport;
use crate::error::Result;
use crate::features::{standardize, FeatureMatrix, Normalization};
use crate::report::ClusterMeansTable;
use crate::selection::{BicCurve, GridSweepResult};

fn fmt3(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v:.3}")
    }
}

/// `feature,cluster_1..cluster_K`, values rounded to 3 decimals; empty
/// clusters render as NA.
pub fn write_cluster_means<W: Write>(table: &ClusterMeansTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["feature".to_string()];
    header.extend((1..=table.k).map(|c| format!("cluster_{c}")));
    w.write_record(&header)?;
    for (f, name) in table.feature_names.iter().enumerate() {
        let mut record = vec![name.clone()];
        record.extend((0..table.k).map(|c| fmt3(table.get(f, c))));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Symmetric feature-correlation matrix with a label column.
pub fn write_correlations<W: Write>(names: &[String], corr: &[f64], out: W) -> Result<()> {
    let d = names.len();
    debug_assert_eq!(corr.len(), d * d);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["feature".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for a in 0..d {
        let mut record = vec![names[a].clone()];
        record.extend((0..d).map(|b| corr[a * d + b].to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-BSU distribution data for one feature:
/// `city,cell_id,cluster,raw,mean_ratio`.
pub fn write_distribution<W: Write>(
    raw: &FeatureMatrix,
    labels: &[usize],
    feature: &str,
    out: W,
) -> Result<()> {
    let (ratio, _) = standardize(raw, Normalization::MeanRatio)?;
    let raw_col = raw
        .column_index(feature)
        .ok_or_else(|| crate::error::Error::MissingColumn(feature.into()))?;
    let ratio_col = ratio.column_index(feature);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["city", "cell_id", "cluster", "raw", "mean_ratio"])?;
    for (i, id) in raw.row_ids.iter().enumerate() {
        let ratio_value = match ratio_col {
            Some(c) => ratio.get(i, c).to_string(),
            None => "NA".into(),
        };
        w.write_record([
            id.city.as_str(),
            &id.cell_id.to_string(),
            &labels[i].to_string(),
            &raw.get(i, raw_col).to_string(),
            &ratio_value,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `k,bic,train_log_likelihood,converged_restarts`, one row per sweep point.
pub fn write_bic_curve<W: Write>(curve: &BicCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "bic", "train_log_likelihood", "converged_restarts"])?;
    for e in &curve.entries {
        w.write_record([
            e.k.to_string(),
            e.bic.to_string(),
            e.train_log_likelihood.to_string(),
            e.converged_restarts.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `size_m,best_k,silhouette,cell_count`, one row per candidate size.
pub fn write_grid_sweep<W: Write>(sweep: &GridSweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["size_m", "best_k", "silhouette", "cell_count"])?;
    for e in &sweep.entries {
        w.write_record([
            e.size_m.to_string(),
            e.best_k.to_string(),
            e.silhouette.to_string(),
            e.cell_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `cluster,<city...>,total,shared`, one row per cluster.
pub fn write_contingency<W: Write>(report: &CrossCityReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["cluster".to_string()];
    header.extend(report.cities.iter().cloned());
    header.push("total".into());
    header.push("shared".into());
    w.write_record(&header)?;
    for c in 0..report.k {
        let mut record = vec![(c + 1).to_string()];
        record.extend(report.contingency[c].iter().map(usize::to_string));
        record.push(report.cluster_sizes[c].to_string());
        record.push(report.shared[c].to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// One city's per-cluster mean profile from a cross-city report:
/// `feature,cluster_1..cluster_K` (3 decimals, NA for empty cells).
pub fn write_city_cluster_means<W: Write>(
    report: &CrossCityReport,
    city_index: usize,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["feature".to_string()];
    header.extend((1..=report.k).map(|c| format!("cluster_{c}")));
    w.write_record(&header)?;
    for (f, name) in report.feature_names.iter().enumerate() {
        let mut record = vec![name.clone()];
        for c in 0..report.k {
            record.push(fmt3(report.per_city_means[c][city_index][f]));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
