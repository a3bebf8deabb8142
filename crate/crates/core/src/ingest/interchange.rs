//! Newline-delimited entity interchange format.
//!
//! Line 1 is a header record; every following line is one entity as a JSON
//! object. UTF-8, `\n` line endings, map keys sorted, so the same entity set
//! always serializes to the same bytes.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::entity::{Entity, EntitySet};

const FORMAT: &str = "urbanform-entities";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    source: String,
}

pub fn write_entities<W: Write>(set: &EntitySet, mut out: W) -> Result<()> {
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
        source: set.source().to_string(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for entity in set.iter() {
        serde_json::to_writer(&mut out, entity)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_entities<R: BufRead>(input: R) -> Result<EntitySet> {
    let mut lines = input.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| Error::Interchange {
        line: 1,
        message: "empty input".into(),
    })?;
    let header: Header = serde_json::from_str(&first?).map_err(|e| Error::Interchange {
        line: 1,
        message: e.to_string(),
    })?;
    if header.format != FORMAT {
        return Err(Error::Interchange {
            line: 1,
            message: format!("unexpected format {:?}", header.format),
        });
    }
    if header.version != VERSION {
        return Err(Error::Interchange {
            line: 1,
            message: format!("unsupported version {}", header.version),
        });
    }
    let mut entities = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let entity: Entity = serde_json::from_str(&line).map_err(|e| Error::Interchange {
            line: idx + 1,
            message: e.to_string(),
        })?;
        entities.push(entity);
    }
    EntitySet::new(entities, header.source)
}
