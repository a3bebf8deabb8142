//! Pedestrian street graph and degree centrality.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::features::catalog::AggregationMode;
use crate::features::matrix::{Aggregation, FeatureColumn};
use crate::geometry::{HexGrid, LatLon};
use crate::ingest::{EntityKind, EntitySet};

/// Undirected street graph built from walkable ways; vertices keep their
/// OSM node ids so shared endpoints merge ways into one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkGraph {
    positions: BTreeMap<i64, LatLon>,
    edges: BTreeSet<(i64, i64)>,
}

impl WalkGraph {
    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (i64, LatLon)> + '_ {
        self.positions.iter().map(|(&id, &p)| (id, p))
    }

    pub fn edges(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degrees(&self) -> BTreeMap<i64, usize> {
        let mut degrees: BTreeMap<i64, usize> = self.positions.keys().map(|&id| (id, 0)).collect();
        for &(a, b) in &self.edges {
            *degrees.get_mut(&a).expect("edge endpoint exists") += 1;
            *degrees.get_mut(&b).expect("edge endpoint exists") += 1;
        }
        degrees
    }
}

/// Builds the walk graph from every way whose `highway` value is walkable.
///
/// Edges are consecutive vertex pairs of each way; self-loops (repeated
/// consecutive node ids) and duplicate edges are dropped.
pub fn build_walk_network(entities: &EntitySet, walkable: &BTreeSet<String>) -> Result<WalkGraph> {
    let mut positions: BTreeMap<i64, LatLon> = BTreeMap::new();
    let mut edges: BTreeSet<(i64, i64)> = BTreeSet::new();

    for e in entities.iter() {
        if e.kind != EntityKind::Way {
            continue;
        }
        let Some(highway) = e.tags.get("highway") else {
            continue;
        };
        if !walkable.contains(highway) {
            continue;
        }
        for (&id, &coord) in e.node_refs.iter().zip(e.coords.iter()) {
            positions.insert(id, coord);
        }
        for pair in e.node_refs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue;
            }
            edges.insert((a.min(b), a.max(b)));
        }
    }

    if positions.is_empty() {
        return Err(Error::EmptyWalkNetwork);
    }
    Ok(WalkGraph { positions, edges })
}

/// Degree centrality deg(v) / (N - 1) for every vertex.
pub fn degree_centrality(graph: &WalkGraph) -> Result<BTreeMap<i64, f64>> {
    let n = graph.vertex_count();
    if n < 2 {
        return Err(Error::CentralityUndefined(n));
    }
    let denom = (n - 1) as f64;
    Ok(graph
        .degrees()
        .into_iter()
        .map(|(id, deg)| (id, deg as f64 / denom))
        .collect())
}

/// Aggregates vertex centralities per cell: extensive sums, intensive
/// averages (cells without vertices stay 0).
pub fn network_feature(
    grid: &HexGrid,
    graph: &WalkGraph,
    mode: AggregationMode,
) -> Result<FeatureColumn> {
    let centrality = degree_centrality(graph)?;
    let mut sums = vec![0.0_f64; grid.cells.len()];
    let mut counts = vec![0usize; grid.cells.len()];
    for (id, pos) in graph.vertices() {
        let (x, y) = grid.frame.project(pos.lat, pos.lon);
        if let Some(i) = grid.locate_index(x, y) {
            sums[i] += centrality[&id];
            counts[i] += 1;
        }
    }
    let (values, aggregation) = match mode {
        AggregationMode::Extensive => (sums, Aggregation::Extensive),
        AggregationMode::Intensive => {
            let mut empty = 0usize;
            let values = sums
                .iter()
                .zip(counts.iter())
                .map(|(&s, &c)| {
                    if c == 0 {
                        empty += 1;
                        0.0
                    } else {
                        s / c as f64
                    }
                })
                .collect();
            if empty > 0 {
                log::warn!(
                    "{empty} cell(s) have no walk-network vertices; intensive value set to 0"
                );
            }
            (values, Aggregation::Intensive)
        }
    };
    Ok(FeatureColumn {
        name: "degree_centrality".into(),
        values,
        aggregation,
    })
}
