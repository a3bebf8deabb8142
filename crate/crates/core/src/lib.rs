//! Urban-form clustering toolkit: OSM extracts to hexagonal spatial units,
//! per-unit feature vectors, GMM clustering with BIC/silhouette model
//! selection, and cross-city comparison.

pub mod compare;
pub mod error;
pub mod features;
pub mod geometry;
pub mod gmm;
pub mod ingest;
pub mod report;
pub mod selection;

pub use error::{Error, Result};
pub use features::{FeatureCatalog, FeatureColumn, FeatureMatrix, Normalization, TagSelector};
pub use geometry::{Boundary, HexCell, HexGrid, LatLon, LocalFrame};
pub use gmm::{GmmConfig, GmmModel};
pub use ingest::{Entity, EntityKind, EntitySet};
