//! GeoJSON boundary parsing.
//!
//! Accepts a Feature, FeatureCollection, or bare geometry whose (first)
//! feature is a Polygon or MultiPolygon. For a MultiPolygon the largest-area
//! part becomes the boundary and the rest are reported as warnings.

use std::io::Read;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::poly;
use crate::geometry::{Boundary, LatLon, LocalFrame};

fn ring_from_coords(coords: &Value) -> Result<Vec<LatLon>> {
    let arr = coords
        .as_array()
        .ok_or_else(|| Error::GeoJson("ring is not an array".into()))?;
    let ring: Vec<LatLon> = arr
        .iter()
        .map(|pos| {
            let pair = pos
                .as_array()
                .filter(|p| p.len() >= 2)
                .ok_or_else(|| Error::GeoJson("position is not [lon, lat]".into()))?;
            let lon = pair[0]
                .as_f64()
                .ok_or_else(|| Error::GeoJson("non-numeric longitude".into()))?;
            let lat = pair[1]
                .as_f64()
                .ok_or_else(|| Error::GeoJson("non-numeric latitude".into()))?;
            LatLon::new(lat, lon)
        })
        .collect::<Result<Vec<_>>>()?;
    if ring.len() < 4 {
        return Err(Error::DegenerateRing);
    }
    if ring[0] != ring[ring.len() - 1] {
        let first = ring[0];
        let last = ring[ring.len() - 1];
        return Err(Error::UnclosedRing {
            first: (first.lat, first.lon),
            last: (last.lat, last.lon),
        });
    }
    Ok(ring)
}

fn polygon_rings(coords: &Value) -> Result<(Vec<LatLon>, Vec<Vec<LatLon>>)> {
    let rings = coords
        .as_array()
        .ok_or_else(|| Error::GeoJson("polygon coordinates are not an array".into()))?;
    if rings.is_empty() {
        return Err(Error::GeoJson("polygon has no rings".into()));
    }
    let exterior = ring_from_coords(&rings[0])?;
    let holes = rings[1..]
        .iter()
        .map(ring_from_coords)
        .collect::<Result<Vec<_>>>()?;
    Ok((exterior, holes))
}

/// Planar area of a ring in square meters, via a local frame at its centroid.
fn ring_area_m2(ring: &[LatLon]) -> f64 {
    let mean_lat = ring.iter().map(|p| p.lat).sum::<f64>() / ring.len() as f64;
    let mean_lon = ring.iter().map(|p| p.lon).sum::<f64>() / ring.len() as f64;
    let frame = match LocalFrame::new(mean_lat, mean_lon) {
        Ok(f) => f,
        Err(_) => return 0.0,
    };
    let pts: Vec<(f64, f64)> = ring.iter().map(|p| frame.project(p.lat, p.lon)).collect();
    poly::ring_signed_area(&pts).abs()
}

fn first_geometry(doc: &Value) -> Result<(&Value, Option<&Value>)> {
    let type_of = |v: &Value| v.get("type").and_then(Value::as_str).map(str::to_owned);
    match type_of(doc).as_deref() {
        Some("FeatureCollection") => {
            let features = doc
                .get("features")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::GeoJson("FeatureCollection without features".into()))?;
            let first = features.first().ok_or(Error::NoPolygon)?;
            let geom = first.get("geometry").ok_or(Error::NoPolygon)?;
            Ok((geom, first.get("properties")))
        }
        Some("Feature") => {
            let geom = doc.get("geometry").ok_or(Error::NoPolygon)?;
            Ok((geom, doc.get("properties")))
        }
        Some("Polygon") | Some("MultiPolygon") => Ok((doc, None)),
        _ => Err(Error::NoPolygon),
    }
}

/// Parses a boundary from GeoJSON text.
///
/// Returns the boundary plus warnings for skipped MultiPolygon parts.
pub fn parse_boundary_str(text: &str, fallback_name: &str) -> Result<(Boundary, Vec<String>)> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::GeoJson(e.to_string()))?;
    let (geom, properties) = first_geometry(&doc)?;
    let name = properties
        .and_then(|p| p.get("name"))
        .and_then(Value::as_str)
        .unwrap_or(fallback_name)
        .to_string();

    let geom_type = geom.get("type").and_then(Value::as_str).unwrap_or("");
    let coords = geom.get("coordinates").ok_or(Error::NoPolygon)?;
    let mut warnings = Vec::new();

    let (exterior, holes) = match geom_type {
        "Polygon" => polygon_rings(coords)?,
        "MultiPolygon" => {
            let parts = coords
                .as_array()
                .ok_or_else(|| Error::GeoJson("MultiPolygon coordinates invalid".into()))?;
            if parts.is_empty() {
                return Err(Error::NoPolygon);
            }
            let parsed: Vec<(Vec<LatLon>, Vec<Vec<LatLon>>)> = parts
                .iter()
                .map(polygon_rings)
                .collect::<Result<Vec<_>>>()?;
            let areas: Vec<f64> = parsed.iter().map(|(ext, _)| ring_area_m2(ext)).collect();
            let largest = areas
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i)
                .unwrap_or(0);
            for (i, area) in areas.iter().enumerate() {
                if i != largest {
                    warnings.push(format!(
                        "MultiPolygon part {} skipped (area {:.0} m^2 < largest {:.0} m^2)",
                        i, area, areas[largest]
                    ));
                }
            }
            parsed.into_iter().nth(largest).unwrap()
        }
        _ => return Err(Error::NoPolygon),
    };

    let boundary = Boundary::new(exterior, holes, name)?;
    Ok((boundary, warnings))
}

/// Parses a boundary from any byte stream.
pub fn parse_boundary_geojson<R: Read>(
    mut stream: R,
    fallback_name: &str,
) -> Result<(Boundary, Vec<String>)> {
    let mut text = String::new();
    stream.read_to_string(&mut text)?;
    parse_boundary_str(&text, fallback_name)
}
