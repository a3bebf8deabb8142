//! Per-BSU urban-form features: tag counts, walk-network degree centrality,
//! matrix assembly and normalization.

pub mod catalog;
pub mod counting;
pub mod csvio;
pub mod matrix;
pub mod network;

pub use catalog::{AggregationMode, CatalogEntry, FeatureCatalog, TagSelector, DEFAULT_WALKABLE};
pub use counting::{compute_catalog_columns, count_feature};
pub use csvio::{read_features_csv, write_features_csv, MatrixMeta};
pub use matrix::{
    assemble_matrix, standardize, Aggregation, FeatureColumn, FeatureMatrix, Normalization, RowId,
};
pub use network::{build_walk_network, degree_centrality, network_feature, WalkGraph};
