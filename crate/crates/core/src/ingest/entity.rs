use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatLon;

pub type TagMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Node,
    Way,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Node => "node",
            EntityKind::Way => "way",
        }
    }
}

/// A tagged OSM node or way with resolved geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: i64,
    pub kind: EntityKind,
    pub tags: TagMap,
    /// One coordinate for nodes, two or more for ways.
    pub coords: Vec<LatLon>,
    /// Ordered node references for ways; empty for nodes.
    pub node_refs: Vec<i64>,
}

impl Entity {
    pub fn node(id: i64, tags: TagMap, lat: f64, lon: f64) -> Result<Self> {
        validate_tags(id, &tags)?;
        let point = LatLon::new(lat, lon)?;
        Ok(Self {
            id,
            kind: EntityKind::Node,
            tags,
            coords: vec![point],
            node_refs: vec![],
        })
    }

    pub fn way(id: i64, tags: TagMap, coords: Vec<LatLon>, node_refs: Vec<i64>) -> Result<Self> {
        validate_tags(id, &tags)?;
        if coords.len() < 2 {
            return Err(Error::InvalidEntity {
                id,
                message: format!("way needs >= 2 coordinates, has {}", coords.len()),
            });
        }
        if coords.len() != node_refs.len() {
            return Err(Error::InvalidEntity {
                id,
                message: format!(
                    "way has {} coordinates but {} node refs",
                    coords.len(),
                    node_refs.len()
                ),
            });
        }
        Ok(Self {
            id,
            kind: EntityKind::Way,
            tags,
            coords,
            node_refs,
        })
    }
}

fn validate_tags(id: i64, tags: &TagMap) -> Result<()> {
    if tags.keys().any(|k| k.is_empty()) {
        return Err(Error::InvalidEntity {
            id,
            message: "empty tag key".into(),
        });
    }
    Ok(())
}

/// Parsed entities clipped (or not yet) to a study area.
///
/// Immutable after construction; ids are unique per entity kind.
#[derive(Debug, Clone, PartialEq)]
pub struct EntitySet {
    entities: Vec<Entity>,
    source: String,
}

impl EntitySet {
    pub fn new(entities: Vec<Entity>, source: String) -> Result<Self> {
        let mut seen: HashSet<(EntityKind, i64)> = HashSet::with_capacity(entities.len());
        for e in &entities {
            if !seen.insert((e.kind, e.id)) {
                return Err(Error::DuplicateEntityId {
                    id: e.id,
                    kind: e.kind.as_str(),
                });
            }
        }
        Ok(Self { entities, source })
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Entity> {
        self.entities.iter()
    }
}
