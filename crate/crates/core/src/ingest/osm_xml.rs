//! OSM XML (.osm) extract parsing.
//!
//! Keeps every tagged node and way, plus untagged nodes referenced by kept
//! ways (needed for way geometry). Relations are ignored; boundaries must be
//! pre-exported to GeoJSON.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::geometry::LatLon;
use crate::ingest::entity::{Entity, EntitySet, TagMap};

struct RawNode {
    id: i64,
    lat: f64,
    lon: f64,
    tags: TagMap,
    order: usize,
}

struct RawWay {
    id: i64,
    refs: Vec<i64>,
    tags: TagMap,
}

fn line_of(bytes: &[u8], pos: usize) -> usize {
    let end = pos.min(bytes.len());
    bytes[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

fn xml_err(bytes: &[u8], pos: usize, message: impl Into<String>) -> Error {
    Error::OsmXml {
        line: line_of(bytes, pos),
        message: message.into(),
    }
}

struct AttrF64(f64);
struct AttrI64(i64);

fn parse_attrs(bytes: &[u8], pos: usize, e: &BytesStart) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| xml_err(bytes, pos, err.to_string()))?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|err| xml_err(bytes, pos, err.to_string()))?
            .into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn required_i64(
    bytes: &[u8],
    pos: usize,
    attrs: &HashMap<String, String>,
    key: &str,
) -> Result<AttrI64> {
    attrs
        .get(key)
        .ok_or_else(|| xml_err(bytes, pos, format!("missing attribute {key}")))?
        .parse::<i64>()
        .map(AttrI64)
        .map_err(|e| xml_err(bytes, pos, format!("bad {key}: {e}")))
}

fn required_f64(
    bytes: &[u8],
    pos: usize,
    attrs: &HashMap<String, String>,
    key: &str,
) -> Result<AttrF64> {
    attrs
        .get(key)
        .ok_or_else(|| xml_err(bytes, pos, format!("missing attribute {key}")))?
        .parse::<f64>()
        .map(AttrF64)
        .map_err(|e| xml_err(bytes, pos, format!("bad {key}: {e}")))
}

enum Pending {
    None,
    Node(RawNode),
    Way(RawWay),
}

/// Parses OSM XML from an in-memory document.
///
/// Returns the entity set and a list of warnings (one per dropped way).
pub fn parse_osm_bytes(
    bytes: &[u8],
    source: impl Into<String>,
) -> Result<(EntitySet, Vec<String>)> {
    let mut reader = Reader::from_reader(bytes);
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut node_index: HashMap<i64, usize> = HashMap::new();
    let mut ways: Vec<RawWay> = Vec::new();
    let mut pending = Pending::None;
    let mut order = 0usize;

    loop {
        let pos = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|e| xml_err(bytes, reader.buffer_position() as usize, e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    b"node" => {
                        let attrs = parse_attrs(bytes, pos, e)?;
                        let AttrI64(id) = required_i64(bytes, pos, &attrs, "id")?;
                        let AttrF64(lat) = required_f64(bytes, pos, &attrs, "lat")?;
                        let AttrF64(lon) = required_f64(bytes, pos, &attrs, "lon")?;
                        let node = RawNode {
                            id,
                            lat,
                            lon,
                            tags: TagMap::new(),
                            order,
                        };
                        order += 1;
                        if empty {
                            node_index.insert(node.id, nodes.len());
                            nodes.push(node);
                        } else {
                            pending = Pending::Node(node);
                        }
                    }
                    b"way" => {
                        let attrs = parse_attrs(bytes, pos, e)?;
                        let AttrI64(id) = required_i64(bytes, pos, &attrs, "id")?;
                        let way = RawWay {
                            id,
                            refs: Vec::new(),
                            tags: TagMap::new(),
                        };
                        if empty {
                            ways.push(way);
                        } else {
                            pending = Pending::Way(way);
                        }
                    }
                    b"nd" => {
                        let attrs = parse_attrs(bytes, pos, e)?;
                        let AttrI64(node_ref) = required_i64(bytes, pos, &attrs, "ref")?;
                        if let Pending::Way(ref mut w) = pending {
                            w.refs.push(node_ref);
                        }
                    }
                    b"tag" => {
                        let attrs = parse_attrs(bytes, pos, e)?;
                        let k = attrs
                            .get("k")
                            .ok_or_else(|| xml_err(bytes, pos, "tag missing k"))?
                            .clone();
                        let v = attrs.get("v").cloned().unwrap_or_default();
                        match pending {
                            Pending::Node(ref mut n) => {
                                n.tags.insert(k, v);
                            }
                            Pending::Way(ref mut w) => {
                                w.tags.insert(k, v);
                            }
                            Pending::None => {}
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) => match e.name().as_ref() {
                b"node" => {
                    if let Pending::Node(n) = std::mem::replace(&mut pending, Pending::None) {
                        node_index.insert(n.id, nodes.len());
                        nodes.push(n);
                    }
                }
                b"way" => {
                    if let Pending::Way(w) = std::mem::replace(&mut pending, Pending::None) {
                        ways.push(w);
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }

    let mut warnings = Vec::new();
    let mut keep_node_ids: HashSet<i64> = HashSet::new();
    let mut entities: Vec<Entity> = Vec::new();
    let mut kept_ways: Vec<Entity> = Vec::new();

    for way in &ways {
        if way.tags.is_empty() {
            continue;
        }
        let mut coords = Vec::with_capacity(way.refs.len());
        let mut missing = None;
        for &r in &way.refs {
            match node_index.get(&r) {
                Some(&i) => coords.push((r, nodes[i].lat, nodes[i].lon)),
                None => {
                    missing = Some(r);
                    break;
                }
            }
        }
        if let Some(r) = missing {
            warnings.push(format!(
                "way {} dropped: references missing node {}",
                way.id, r
            ));
            continue;
        }
        if coords.len() < 2 {
            warnings.push(format!(
                "way {} dropped: only {} node(s)",
                way.id,
                coords.len()
            ));
            continue;
        }
        let refs: Vec<i64> = coords.iter().map(|&(r, _, _)| r).collect();
        let latlons = coords
            .iter()
            .map(|&(_, lat, lon)| LatLon::new(lat, lon))
            .collect::<Result<Vec<_>>>()?;
        kept_ways.push(Entity::way(way.id, way.tags.clone(), latlons, refs)?);
        keep_node_ids.extend(&way.refs);
    }

    let mut kept_nodes: Vec<&RawNode> = nodes
        .iter()
        .filter(|n| !n.tags.is_empty() || keep_node_ids.contains(&n.id))
        .collect();
    kept_nodes.sort_by_key(|n| n.order);
    for n in kept_nodes {
        entities.push(Entity::node(n.id, n.tags.clone(), n.lat, n.lon)?);
    }
    entities.extend(kept_ways);

    let set = EntitySet::new(entities, source.into())?;
    Ok((set, warnings))
}

/// Parses OSM XML from any byte stream by buffering it in memory.
pub fn parse_osm_xml<R: Read>(
    mut stream: R,
    source: impl Into<String>,
) -> Result<(EntitySet, Vec<String>)> {
    let mut bytes = Vec::new();
    stream.read_to_end(&mut bytes)?;
    parse_osm_bytes(&bytes, source)
}
