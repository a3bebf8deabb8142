use std::collections::BTreeSet;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::TagMap;

/// Selects entities by tag key, optionally pinned to one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSelector {
    pub key: String,
    pub value: Option<String>,
}

impl TagSelector {
    pub fn new(key: impl Into<String>, value: Option<&str>) -> Result<Self> {
        let key = key.into();
        if key.is_empty() {
            return Err(Error::Catalog("selector key must be nonempty".into()));
        }
        Ok(Self {
            key,
            value: value.map(str::to_owned),
        })
    }

    pub fn matches(&self, tags: &TagMap) -> bool {
        match tags.get(&self.key) {
            Some(v) => self.value.as_deref().is_none_or(|want| want == v),
            None => false,
        }
    }

    /// Column name, e.g. `highway_pedestrian` or bare `natural`.
    pub fn column_name(&self) -> String {
        match &self.value {
            Some(v) => format!("{}_{}", self.key, v),
            None => self.key.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregationMode {
    Extensive,
    Intensive,
}

/// One entry of the feature catalogue, in output column order.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogEntry {
    Count(TagSelector),
    /// Walk-network degree centrality aggregated per cell.
    NetworkDegreeCentrality {
        aggregation: AggregationMode,
    },
}

impl CatalogEntry {
    pub fn column_name(&self) -> String {
        match self {
            CatalogEntry::Count(sel) => sel.column_name(),
            CatalogEntry::NetworkDegreeCentrality { .. } => "degree_centrality".into(),
        }
    }
}

/// Highway values treated as walkable when building the walk network.
pub const DEFAULT_WALKABLE: [&str; 14] = [
    "pedestrian",
    "footway",
    "path",
    "steps",
    "living_street",
    "residential",
    "service",
    "unclassified",
    "tertiary",
    "secondary",
    "primary",
    "track",
    "crossing",
    "cycleway",
];

/// The ordered feature catalogue plus the walkable highway set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCatalog {
    pub entries: Vec<CatalogEntry>,
    pub walkable: BTreeSet<String>,
}

impl FeatureCatalog {
    /// The full 31-feature catalogue: street types, walk-network degree
    /// centrality, multimodality, points of interest, natural elements.
    pub fn standard() -> Self {
        let count = |key: &str, value: &str| {
            CatalogEntry::Count(TagSelector::new(key, Some(value)).unwrap())
        };
        let key_only = |key: &str| CatalogEntry::Count(TagSelector::new(key, None).unwrap());
        let entries = vec![
            count("highway", "pedestrian"),
            count("highway", "service"),
            count("highway", "living_street"),
            count("highway", "footway"),
            count("highway", "steps"),
            count("highway", "path"),
            CatalogEntry::NetworkDegreeCentrality {
                aggregation: AggregationMode::Extensive,
            },
            key_only("public_transport"),
            count("highway", "bus_stop"),
            count("highway", "cycleway"),
            count("highway", "crossing"),
            count("railway", "subway_entrance"),
            count("building", "residential"),
            count("building", "commercial"),
            count("building", "public"),
            count("building", "school"),
            count("building", "church"),
            count("building", "university"),
            count("building", "train_station"),
            count("amenity", "parking"),
            count("amenity", "restaurant"),
            count("amenity", "cafe"),
            count("amenity", "bar"),
            count("amenity", "pub"),
            count("amenity", "theatre"),
            count("amenity", "cinema"),
            count("amenity", "library"),
            count("amenity", "hospital"),
            count("amenity", "pharmacy"),
            count("amenity", "doctors"),
            key_only("natural"),
        ];
        Self {
            entries,
            walkable: DEFAULT_WALKABLE.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        self.entries.iter().map(CatalogEntry::column_name).collect()
    }

    /// Parses a TOML catalog:
    ///
    /// ```toml
    /// walkable = ["footway", "path"]   # optional override
    ///
    /// [[feature]]
    /// key = "highway"
    /// value = "pedestrian"
    ///
    /// [[feature]]
    /// network = "degree_centrality"
    /// aggregation = "extensive"
    /// ```
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct RawEntry {
            key: Option<String>,
            value: Option<String>,
            network: Option<String>,
            aggregation: Option<String>,
        }
        #[derive(Deserialize)]
        struct RawCatalog {
            walkable: Option<Vec<String>>,
            #[serde(default)]
            feature: Vec<RawEntry>,
        }

        let raw: RawCatalog = toml::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?;
        if raw.feature.is_empty() {
            return Err(Error::Catalog("catalog lists no features".into()));
        }
        let mut entries = Vec::with_capacity(raw.feature.len());
        for (i, f) in raw.feature.iter().enumerate() {
            match (&f.key, &f.network) {
                (Some(key), None) => {
                    entries.push(CatalogEntry::Count(TagSelector::new(
                        key.clone(),
                        f.value.as_deref(),
                    )?));
                }
                (None, Some(metric)) => {
                    if metric != "degree_centrality" {
                        return Err(Error::Catalog(format!(
                            "feature {i}: unknown network metric {metric:?}"
                        )));
                    }
                    let aggregation = match f.aggregation.as_deref() {
                        Some("extensive") | None => AggregationMode::Extensive,
                        Some("intensive") => AggregationMode::Intensive,
                        Some(other) => {
                            return Err(Error::Catalog(format!(
                                "feature {i}: unknown aggregation {other:?}"
                            )))
                        }
                    };
                    entries.push(CatalogEntry::NetworkDegreeCentrality { aggregation });
                }
                _ => {
                    return Err(Error::Catalog(format!(
                        "feature {i}: set either key or network"
                    )))
                }
            }
        }
        let walkable = raw
            .walkable
            .map(|w| w.into_iter().collect())
            .unwrap_or_else(|| DEFAULT_WALKABLE.iter().map(|s| s.to_string()).collect());
        Ok(Self { entries, walkable })
    }
}
