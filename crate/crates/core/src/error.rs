use thiserror::Error;

/// Errors produced by the urbanform pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("XML parse error at line {line}: {message}")]
    OsmXml { line: usize, message: String },

    #[error("invalid entity {id}: {message}")]
    InvalidEntity { id: i64, message: String },

    #[error("duplicate entity id {id} ({kind})")]
    DuplicateEntityId { id: i64, kind: &'static str },

    #[error("GeoJSON error: {0}")]
    GeoJson(String),

    #[error("no polygonal feature present in boundary input")]
    NoPolygon,

    #[error("unclosed ring: first point {first:?} != last point {last:?}")]
    UnclosedRing { first: (f64, f64), last: (f64, f64) },

    #[error("ring is self-intersecting near vertex {vertex}")]
    SelfIntersectingRing { vertex: usize },

    #[error("ring has fewer than 4 points (closed ring needs >= 3 distinct vertices)")]
    DegenerateRing,

    #[error("coordinate out of range: lat {lat}, lon {lon}")]
    CoordinateRange { lat: f64, lon: f64 },

    #[error("frame origin latitude {0} too close to a pole")]
    PolarOrigin(f64),

    #[error("grid size exceeds study area")]
    GridExceedsStudyArea,

    #[error("grid size {size_m} m yields more than {max} candidate cells")]
    GridTooFine { size_m: f64, max: usize },

    #[error("grid size must be positive, got {0}")]
    NonPositiveGridSize(f64),

    #[error("grid file invalid: {0}")]
    GridFile(String),

    #[error("no walk network in extract")]
    EmptyWalkNetwork,

    #[error("degree centrality undefined for a graph with {0} vertex(es)")]
    CentralityUndefined(usize),

    #[error("column {name} has {len} values but the grid has {expected} cells")]
    ColumnLengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },

    #[error("duplicate column name {0}")]
    DuplicateColumn(String),

    #[error("cannot assemble a matrix from zero columns")]
    NoColumns,

    #[error("all columns are degenerate; nothing left to standardize")]
    AllColumnsDegenerate,

    #[error("matrix must be {expected} but is {actual}")]
    WrongNormalization {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("feature catalog invalid: {0}")]
    Catalog(String),

    #[error("features CSV invalid: {0}")]
    FeaturesCsv(String),

    #[error("model dimension {model} does not match matrix dimension {matrix}")]
    DimensionMismatch { model: usize, matrix: usize },

    #[error("invalid GMM config: {0}")]
    InvalidConfig(String),

    #[error("K = {k} exceeds row count {rows}")]
    TooFewRows { k: usize, rows: usize },

    #[error("non-finite density for row {row}")]
    NonFiniteDensity { row: usize },

    #[error("component {component} collapsed (effective weight below threshold)")]
    ComponentCollapse { component: usize },

    #[error("covariance of component {component} is not positive-definite")]
    NotPositiveDefinite { component: usize },

    #[error("restart {restart} failed {attempts} consecutive times")]
    RestartExhausted { restart: usize, attempts: usize },

    #[error("responsibility row {row} is not a distribution (sum {sum})")]
    InvalidResponsibilities { row: usize, sum: f64 },

    #[error("responsibilities shape {rows}x{k} does not match matrix {expected_rows} rows")]
    RespShapeMismatch {
        rows: usize,
        k: usize,
        expected_rows: usize,
    },

    #[error("labels length {labels} does not match row count {rows}")]
    LabelLengthMismatch { labels: usize, rows: usize },

    #[error("silhouette undefined for one cluster")]
    SingleCluster,

    #[error("invalid K range [{lo}, {hi}] for {rows} rows")]
    InvalidKRange { lo: usize, hi: usize, rows: usize },

    #[error("every K in the sweep failed to fit")]
    AllKFailed,

    #[error("every candidate grid size was skipped: {0}")]
    AllSizesSkipped(String),

    #[error("grid sizes must be strictly increasing and positive")]
    InvalidSizeList,

    #[error("need at least {min} inputs, got {got}")]
    TooFewInputs { min: usize, got: usize },

    #[error(
        "column catalogues differ: only in first: [{only_first}]; only in other: [{only_other}]"
    )]
    ColumnCatalogMismatch {
        only_first: String,
        only_other: String,
    },

    #[error("uniform-grid join requires identical grid sizes; got {0}")]
    UniformGridSizeMismatch(String),

    #[error("matrix has no column named {0}")]
    MissingColumn(String),

    #[error("labels refer to {labels} cells but the grid has {cells}")]
    LabelCellMismatch { labels: usize, cells: usize },

    #[error("model file invalid: {0}")]
    ModelFile(String),

    #[error("interchange record invalid at line {line}: {message}")]
    Interchange { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
