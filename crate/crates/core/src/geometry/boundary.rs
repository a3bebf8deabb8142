use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::poly;

/// A WGS84 coordinate pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::CoordinateRange { lat, lon });
        }
        Ok(Self { lat, lon })
    }
}

/// Study-area polygon: one exterior ring plus optional hole rings, all closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub exterior: Vec<LatLon>,
    pub holes: Vec<Vec<LatLon>>,
    pub name: String,
}

fn validate_ring(ring: &[LatLon]) -> Result<()> {
    if ring.len() < 4 {
        return Err(Error::DegenerateRing);
    }
    let first = ring[0];
    let last = ring[ring.len() - 1];
    if first != last {
        return Err(Error::UnclosedRing {
            first: (first.lat, first.lon),
            last: (last.lat, last.lon),
        });
    }
    let pts: Vec<(f64, f64)> = ring.iter().map(|p| (p.lon, p.lat)).collect();
    if let Some(vertex) = poly::ring_self_intersection(&pts) {
        return Err(Error::SelfIntersectingRing { vertex });
    }
    Ok(())
}

impl Boundary {
    pub fn new(exterior: Vec<LatLon>, holes: Vec<Vec<LatLon>>, name: String) -> Result<Self> {
        validate_ring(&exterior)?;
        for hole in &holes {
            validate_ring(hole)?;
        }
        Ok(Self {
            exterior,
            holes,
            name,
        })
    }

    /// All rings as (lon, lat) tuples, exterior first.
    pub fn rings_lonlat(&self) -> Vec<Vec<(f64, f64)>> {
        let mut rings = Vec::with_capacity(1 + self.holes.len());
        rings.push(self.exterior.iter().map(|p| (p.lon, p.lat)).collect());
        for hole in &self.holes {
            rings.push(hole.iter().map(|p| (p.lon, p.lat)).collect());
        }
        rings
    }

    /// Even-odd containment in degree space; points on any ring count inside.
    /// The local projection scales each axis independently, so degree-space
    /// containment agrees exactly with projected containment.
    pub fn contains(&self, point: LatLon) -> bool {
        poly::point_in_rings((point.lon, point.lat), &self.rings_lonlat())
    }

    /// Area-weighted centroid of the exterior ring, in degrees.
    ///
    /// Computed relative to the first vertex; city polygons sit at large
    /// coordinate offsets and the raw shoelace form cancels badly there.
    pub fn centroid(&self) -> LatLon {
        let origin = self.exterior[0];
        let ring: Vec<(f64, f64)> = self
            .exterior
            .iter()
            .map(|p| (p.lon - origin.lon, p.lat - origin.lat))
            .collect();
        let area = poly::ring_signed_area(&ring);
        if area == 0.0 {
            // Degenerate exterior: fall back to the vertex mean.
            let n = (ring.len() - 1) as f64;
            let (sx, sy) = ring[..ring.len() - 1]
                .iter()
                .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
            return LatLon {
                lat: sy / n + origin.lat,
                lon: sx / n + origin.lon,
            };
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for w in ring.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let cross = x0 * y1 - x1 * y0;
            cx += (x0 + x1) * cross;
            cy += (y0 + y1) * cross;
        }
        LatLon {
            lat: cy / (6.0 * area) + origin.lat,
            lon: cx / (6.0 * area) + origin.lon,
        }
    }

    /// Bounding box of the exterior ring as (min, max) corners.
    pub fn bbox(&self) -> (LatLon, LatLon) {
        let mut min_lat = f64::INFINITY;
        let mut min_lon = f64::INFINITY;
        let mut max_lat = f64::NEG_INFINITY;
        let mut max_lon = f64::NEG_INFINITY;
        for p in &self.exterior {
            min_lat = min_lat.min(p.lat);
            min_lon = min_lon.min(p.lon);
            max_lat = max_lat.max(p.lat);
            max_lon = max_lon.max(p.lon);
        }
        (
            LatLon {
                lat: min_lat,
                lon: min_lon,
            },
            LatLon {
                lat: max_lat,
                lon: max_lon,
            },
        )
    }
}
