//! OSM extract and boundary ingestion.

pub mod boundary_geojson;
pub mod clip;
pub mod entity;
pub mod interchange;
pub mod osm_xml;

pub use boundary_geojson::{parse_boundary_geojson, parse_boundary_str};
pub use clip::clip_to_boundary;
pub use entity::{Entity, EntityKind, EntitySet, TagMap};
pub use interchange::{read_entities, write_entities};
pub use osm_xml::{parse_osm_bytes, parse_osm_xml};
