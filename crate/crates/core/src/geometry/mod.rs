//! Local planar projection and hexagonal tessellation.

pub mod boundary;
pub mod frame;
pub mod gridio;
pub mod hex;
pub mod poly;

pub use boundary::{Boundary, LatLon};
pub use frame::{LocalFrame, EARTH_RADIUS_M};
pub use hex::{make_hexgrid, pack_cell_id, unpack_cell_id, HexCell, HexGrid};
