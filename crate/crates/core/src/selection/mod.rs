//! Cluster-count selection by BIC and grid-size selection by silhouette.

pub mod silhouette;
pub mod sweep;

pub use silhouette::{silhouette, SilhouetteBreakdown};
pub use sweep::{select_grid, select_k, BicCurve, BicEntry, GridSweepEntry, GridSweepResult};
