use crate::error::Result;
use crate::geometry::Boundary;
use crate::ingest::entity::{Entity, EntityKind, EntitySet};

/// Clips an entity set to a boundary.
///
/// Nodes are kept when inside or on the boundary; ways are kept when at
/// least one geometry vertex is inside. Kept ways retain their full
/// geometry, so clipping is idempotent.
pub fn clip_to_boundary(entities: &EntitySet, boundary: &Boundary) -> Result<EntitySet> {
    let kept: Vec<Entity> = entities
        .iter()
        .filter(|e| match e.kind {
            EntityKind::Node => boundary.contains(e.coords[0]),
            EntityKind::Way => e.coords.iter().any(|&p| boundary.contains(p)),
        })
        .cloned()
        .collect();
    EntitySet::new(kept, entities.source().to_string())
}
