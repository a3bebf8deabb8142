//! GeoJSON serialization of hex grids.
//!
//! The FeatureCollection holds one polygon per cell (WGS84) and a foreign
//! member with the frame parameters, grid size, and boundary so a grid file
//! round-trips to the exact same cells without re-tessellating.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::boundary::{Boundary, LatLon};
use crate::geometry::frame::LocalFrame;
use crate::geometry::hex::{HexCell, HexGrid};

pub const GRID_META_KEY: &str = "urbanform_grid";

/// Closed 7-point ring of a cell in [lon, lat] order.
pub fn cell_ring_wgs84(frame: &LocalFrame, cell: &HexCell) -> Vec<[f64; 2]> {
    let mut ring: Vec<[f64; 2]> = cell
        .vertices
        .iter()
        .map(|&(x, y)| {
            let (lat, lon) = frame.unproject(x, y);
            [lon, lat]
        })
        .collect();
    ring.push(ring[0]);
    ring
}

fn ring_to_json(ring: &[LatLon]) -> Value {
    Value::Array(
        ring.iter()
            .map(|p| json!([p.lat, p.lon]))
            .collect::<Vec<_>>(),
    )
}

fn ring_from_json(v: &Value) -> Result<Vec<LatLon>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::GridFile("boundary ring is not an array".into()))?;
    arr.iter()
        .map(|p| {
            let pair = p
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::GridFile("boundary point is not a [lat, lon] pair".into()))?;
            let lat = pair[0]
                .as_f64()
                .ok_or_else(|| Error::GridFile("non-numeric latitude".into()))?;
            let lon = pair[1]
                .as_f64()
                .ok_or_else(|| Error::GridFile("non-numeric longitude".into()))?;
            LatLon::new(lat, lon)
        })
        .collect()
}

/// Serializes the grid as a GeoJSON FeatureCollection value.
pub fn grid_to_geojson(grid: &HexGrid) -> Value {
    let features: Vec<Value> = grid
        .cells
        .iter()
        .map(|cell| {
            json!({
                "type": "Feature",
                "properties": {
                    "cell_id": cell.cell_id,
                    "q": cell.q,
                    "r": cell.r,
                },
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [cell_ring_wgs84(&grid.frame, cell)],
                },
            })
        })
        .collect();

    let meta = json!({
        "version": 1,
        "size_m": grid.size_m,
        "origin_lat": grid.frame.origin_lat,
        "origin_lon": grid.frame.origin_lon,
        "boundary_name": grid.boundary.name,
        "boundary_exterior": ring_to_json(&grid.boundary.exterior),
        "boundary_holes": Value::Array(
            grid.boundary.holes.iter().map(|h| ring_to_json(h)).collect()
        ),
    });

    let mut doc = Map::new();
    doc.insert("type".into(), Value::String("FeatureCollection".into()));
    doc.insert("features".into(), Value::Array(features));
    doc.insert(GRID_META_KEY.into(), meta);
    Value::Object(doc)
}

fn meta_f64(meta: &Value, key: &str) -> Result<f64> {
    meta.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::GridFile(format!("missing numeric {key}")))
}

/// Reconstructs a grid from a GeoJSON document written by [`grid_to_geojson`].
pub fn grid_from_geojson(doc: &Value) -> Result<HexGrid> {
    let meta = doc
        .get(GRID_META_KEY)
        .ok_or_else(|| Error::GridFile(format!("missing {GRID_META_KEY} member")))?;
    let size_m = meta_f64(meta, "size_m")?;
    let origin_lat = meta_f64(meta, "origin_lat")?;
    let origin_lon = meta_f64(meta, "origin_lon")?;
    let name = meta
        .get("boundary_name")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();
    let exterior = ring_from_json(
        meta.get("boundary_exterior")
            .ok_or_else(|| Error::GridFile("missing boundary_exterior".into()))?,
    )?;
    let holes = meta
        .get("boundary_holes")
        .and_then(Value::as_array)
        .map(|hs| hs.iter().map(ring_from_json).collect::<Result<Vec<_>>>())
        .transpose()?
        .unwrap_or_default();
    let boundary = Boundary::new(exterior, holes, name)?;
    let frame = LocalFrame::new(origin_lat, origin_lon)?;

    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::GridFile("missing features array".into()))?;
    let mut axial = Vec::with_capacity(features.len());
    for f in features {
        let props = f
            .get("properties")
            .ok_or_else(|| Error::GridFile("feature without properties".into()))?;
        let q = props
            .get("q")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::GridFile("feature missing q".into()))?;
        let r = props
            .get("r")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::GridFile("feature missing r".into()))?;
        axial.push((q as i32, r as i32));
    }
    HexGrid::from_cells(frame, size_m, boundary, &axial)
}
