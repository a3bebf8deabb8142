use std::path::Path;

use crate::errors::AppResult;
use crate::io::write_entities_file;

pub fn run(osm: &Path, boundary: &Path, out: &Path) -> AppResult<()> {
    let boundary = super::load_boundary(boundary, "ingest")?;
    let clipped = super::load_osm_clipped(osm, &boundary, "ingest")?;
    write_entities_file(&clipped, out, "ingest")?;
    log::info!("wrote {} entities to {}", clipped.len(), out.display());
    Ok(())
}
