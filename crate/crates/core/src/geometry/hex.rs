use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::boundary::Boundary;
use crate::geometry::frame::LocalFrame;
use crate::geometry::poly;

/// Upper bound on candidate cells enumerated for one grid; guards against a
/// grid size far too small for the study area.
const MAX_CANDIDATE_CELLS: usize = 10_000_000;

/// Packs axial coordinates into one stable cell id.
pub fn pack_cell_id(q: i32, r: i32) -> i64 {
    ((q as i64) << 32) | ((r as i64) & 0xFFFF_FFFF)
}

/// Inverse of [`pack_cell_id`].
pub fn unpack_cell_id(id: i64) -> (i32, i32) {
    ((id >> 32) as i32, id as i32)
}

/// One hexagonal Basic Spatial Unit.
#[derive(Debug, Clone, PartialEq)]
pub struct HexCell {
    pub cell_id: i64,
    pub q: i32,
    pub r: i32,
    pub center: (f64, f64),
    pub vertices: [(f64, f64); 6],
}

/// Flat-top hexagonal tessellation of a boundary.
///
/// `size_m` is the center-to-center spacing of adjacent cells, which equals
/// the flat-to-flat width of each hexagon. Cell (0, 0) is centered on the
/// boundary centroid, so a given boundary and size always produce the same
/// grid.
#[derive(Debug, Clone)]
pub struct HexGrid {
    pub frame: LocalFrame,
    pub size_m: f64,
    pub cells: Vec<HexCell>,
    pub boundary: Boundary,
    index: HashMap<(i32, i32), usize>,
}

/// Circumradius (center to vertex) for a given center spacing.
fn circumradius(size_m: f64) -> f64 {
    size_m / 3.0_f64.sqrt()
}

fn cell_center(radius: f64, q: i32, r: i32) -> (f64, f64) {
    (
        1.5 * radius * q as f64,
        3.0_f64.sqrt() * radius * (r as f64 + q as f64 / 2.0),
    )
}

fn cell_vertices(radius: f64, center: (f64, f64)) -> [(f64, f64); 6] {
    let mut vertices = [(0.0, 0.0); 6];
    for (k, v) in vertices.iter_mut().enumerate() {
        let angle = std::f64::consts::PI / 3.0 * k as f64;
        *v = (
            center.0 + radius * angle.cos(),
            center.1 + radius * angle.sin(),
        );
    }
    vertices
}

fn build_cell(radius: f64, q: i32, r: i32) -> HexCell {
    let center = cell_center(radius, q, r);
    HexCell {
        cell_id: pack_cell_id(q, r),
        q,
        r,
        center,
        vertices: cell_vertices(radius, center),
    }
}

/// Tessellates the boundary with flat-top hexagons of the given spacing,
/// retaining cells whose center lies inside the boundary.
pub fn make_hexgrid(boundary: &Boundary, size_m: f64) -> Result<HexGrid> {
    if !(size_m > 0.0 && size_m.is_finite()) {
        return Err(Error::NonPositiveGridSize(size_m));
    }
    let centroid = boundary.centroid();
    let frame = LocalFrame::new(centroid.lat, centroid.lon)?;

    let rings: Vec<Vec<(f64, f64)>> = boundary
        .rings_lonlat()
        .iter()
        .map(|ring| {
            ring.iter()
                .map(|&(lon, lat)| frame.project(lat, lon))
                .collect()
        })
        .collect();

    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &rings[0] {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }

    let radius = circumradius(size_m);
    let q_lo = ((min_x - size_m) / (1.5 * radius)).floor() as i64;
    let q_hi = ((max_x + size_m) / (1.5 * radius)).ceil() as i64;
    let r_span = ((max_y - min_y) / size_m + 4.0).ceil() as i64;
    let candidates = ((q_hi - q_lo + 1).max(0) as usize).saturating_mul(r_span.max(0) as usize);
    if candidates > MAX_CANDIDATE_CELLS {
        return Err(Error::GridTooFine {
            size_m,
            max: MAX_CANDIDATE_CELLS,
        });
    }

    let mut cells = Vec::new();
    for q in q_lo..=q_hi {
        // y = sqrt(3) * radius * (r + q/2); solve the r range from the y range.
        let y_unit = 3.0_f64.sqrt() * radius;
        let r_lo = ((min_y - size_m) / y_unit - q as f64 / 2.0).floor() as i64;
        let r_hi = ((max_y + size_m) / y_unit - q as f64 / 2.0).ceil() as i64;
        for r in r_lo..=r_hi {
            if q.abs() > (1 << 20) || r.abs() > (1 << 20) {
                return Err(Error::GridTooFine {
                    size_m,
                    max: MAX_CANDIDATE_CELLS,
                });
            }
            let center = cell_center(radius, q as i32, r as i32);
            if poly::point_in_rings(center, &rings) {
                cells.push(build_cell(radius, q as i32, r as i32));
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::GridExceedsStudyArea);
    }

    let index = cells
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.q, c.r), i))
        .collect();
    Ok(HexGrid {
        frame,
        size_m,
        cells,
        boundary: boundary.clone(),
        index,
    })
}

impl HexGrid {
    /// Rebuilds a grid from its defining parameters and retained (q, r) list,
    /// reproducing the exact centers and vertices of the original build.
    pub fn from_cells(
        frame: LocalFrame,
        size_m: f64,
        boundary: Boundary,
        axial: &[(i32, i32)],
    ) -> Result<Self> {
        if !(size_m > 0.0 && size_m.is_finite()) {
            return Err(Error::NonPositiveGridSize(size_m));
        }
        if axial.is_empty() {
            return Err(Error::GridExceedsStudyArea);
        }
        let radius = circumradius(size_m);
        let cells: Vec<HexCell> = axial
            .iter()
            .map(|&(q, r)| build_cell(radius, q, r))
            .collect();
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if index.insert((c.q, c.r), i).is_some() {
                return Err(Error::GridFile(format!(
                    "duplicate cell ({}, {})",
                    c.q, c.r
                )));
            }
        }
        Ok(Self {
            frame,
            size_m,
            cells,
            boundary,
            index,
        })
    }

    /// Area of every cell: (sqrt(3)/2) * size_m^2.
    pub fn cell_area(&self) -> f64 {
        3.0_f64.sqrt() / 2.0 * self.size_m * self.size_m
    }

    pub fn cell_ids(&self) -> Vec<i64> {
        self.cells.iter().map(|c| c.cell_id).collect()
    }

    pub fn cell_by_id(&self, cell_id: i64) -> Option<&HexCell> {
        let (q, r) = unpack_cell_id(cell_id);
        self.index.get(&(q, r)).map(|&i| &self.cells[i])
    }

    /// Index into `cells` of the cell containing the local-frame point, if
    /// that cell was retained.
    pub fn locate_index(&self, x: f64, y: f64) -> Option<usize> {
        let radius = circumradius(self.size_m);
        let qf = x / (1.5 * radius);
        let rf = y / (3.0_f64.sqrt() * radius) - qf / 2.0;
        let (q, r) = axial_round(qf, rf);
        self.index.get(&(q, r)).copied()
    }

    /// Cell id of the cell containing the local-frame point, if retained.
    pub fn locate(&self, x: f64, y: f64) -> Option<i64> {
        self.locate_index(x, y).map(|i| self.cells[i].cell_id)
    }
}

/// Rounds fractional axial coordinates to the nearest hex via cube rounding.
fn axial_round(qf: f64, rf: f64) -> (i32, i32) {
    let xf = qf;
    let zf = rf;
    let yf = -xf - zf;
    let mut x = xf.round();
    let mut z = zf.round();
    let y = yf.round();
    let dx = (x - xf).abs();
    let dy = (y - yf).abs();
    let dz = (z - zf).abs();
    if dx > dy && dx > dz {
        x = -y - z;
    } else if dy <= dz {
        z = -x - y;
    }
    (x as i32, z as i32)
}
