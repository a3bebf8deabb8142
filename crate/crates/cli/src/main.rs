//! urbanform: OSM extracts to hexagonal spatial units, urban-form feature
//! vectors, GMM clustering with BIC/silhouette selection, and cross-city
//! comparison reports.

mod commands;
mod errors;
mod io;
mod runconfig;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "urbanform",
    version,
    about = "Urban-form clustering over hexagonal spatial units"
)]
struct Cli {
    /// Seed for all randomized stages (restart initialization).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = library default). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// off | error | warn | info | debug | trace
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CovarianceArg {
    Diagonal,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CompareMode {
    UniformGrid,
    PerCityGrid,
}

/// GMM hyperparameters shared by the clustering subcommands.
#[derive(clap::Args, Clone)]
struct GmmArgs {
    #[arg(long, value_enum, default_value = "diagonal")]
    covariance: CovarianceArg,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-6)]
    reg_var: f64,
}

impl GmmArgs {
    fn to_config(&self, k: usize, seed: u64) -> urbanform_core::gmm::GmmConfig {
        urbanform_core::gmm::GmmConfig {
            k,
            covariance: match self.covariance {
                CovarianceArg::Diagonal => urbanform_core::gmm::CovarianceKind::Diagonal,
                CovarianceArg::Full => urbanform_core::gmm::CovarianceKind::Full,
            },
            max_iter: self.max_iter,
            tol: self.tol,
            n_restarts: self.restarts,
            reg_var: self.reg_var,
            seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an OSM XML extract, clip it to a boundary, write entities.
    Ingest {
        #[arg(long)]
        osm: PathBuf,
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tessellate a boundary into hexagonal cells.
    Grid {
        /// Accepted for pipeline symmetry; the tessellation needs only the boundary.
        #[arg(long)]
        entities: Option<PathBuf>,
        #[arg(long)]
        boundary: PathBuf,
        /// Center-to-center spacing in meters.
        #[arg(long)]
        size: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate the feature catalogue per cell into a CSV matrix.
    Features {
        #[arg(long)]
        entities: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        /// TOML catalog; defaults to the built-in 31-feature catalogue.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// City tag for the CSV rows; defaults to the grid's boundary name.
        #[arg(long)]
        city: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep K over a range and pick the BIC minimizer.
    SelectK {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        k_min: usize,
        #[arg(long)]
        k_max: usize,
        #[command(flatten)]
        gmm: GmmArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep grid sizes and pick the silhouette maximizer.
    SelectGrid {
        #[arg(long)]
        osm: PathBuf,
        #[arg(long)]
        boundary: PathBuf,
        /// Comma-separated candidate sizes in meters, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 12)]
        k_max: usize,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        gmm: GmmArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a GMM (fixed K or BIC-selected) and serialize the model.
    Cluster {
        #[arg(long)]
        features: PathBuf,
        /// Component count, or "auto" for a BIC sweep over k-min..=k-max.
        #[arg(long, default_value = "auto")]
        k: String,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 12)]
        k_max: usize,
        #[command(flatten)]
        gmm: GmmArgs,
        #[arg(long)]
        out: PathBuf,
        /// Optional BIC curve CSV (written only when k = auto).
        #[arg(long)]
        bic_out: Option<PathBuf>,
    },
    /// Joint clustering of two or more cities.
    Compare {
        /// Feature CSVs, one per city, in city order.
        #[arg(long, num_args = 2.., required = true)]
        features: Vec<PathBuf>,
        /// Grid GeoJSON files matching --features order (for the maps).
        #[arg(long, num_args = 2.., required = true)]
        grids: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "per-city-grid")]
        mode: CompareMode,
        /// Component count, or "auto" for a BIC sweep.
        #[arg(long, default_value = "auto")]
        k: String,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 12)]
        k_max: usize,
        /// Minimum per-city share of a cluster for it to count as shared.
        #[arg(long, default_value_t = urbanform_core::compare::DEFAULT_SHARED_MIN_SHARE)]
        min_share: f64,
        /// Cluster on the degree_centrality column alone.
        #[arg(long, default_value_t = false)]
        centrality_only: bool,
        #[command(flatten)]
        gmm: GmmArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the report tree from cached artifacts.
    Report {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        /// BIC curve CSV to copy into the report.
        #[arg(long)]
        bic: Option<PathBuf>,
        /// Grid sweep CSV to copy into the report.
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let level = match cli.log_level.as_str() {
        "off" => log::LevelFilter::Off,
        "error" => log::LevelFilter::Error,
        "warn" => log::LevelFilter::Warn,
        "info" => log::LevelFilter::Info,
        "debug" => log::LevelFilter::Debug,
        "trace" => log::LevelFilter::Trace,
        other => {
            eprintln!("validation error: unknown log level {other:?}");
            return ExitCode::from(2);
        }
    };
    env_logger::Builder::new().filter_level(level).init();

    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            log::warn!("thread pool already initialized: {e}");
        }
    }

    let seed = cli.seed;
    let result = match cli.command {
        Command::Ingest { osm, boundary, out } => commands::ingest::run(&osm, &boundary, &out),
        Command::Grid {
            entities,
            boundary,
            size,
            out,
        } => commands::grid::run(entities.as_deref(), &boundary, size, &out),
        Command::Features {
            entities,
            grid,
            catalog,
            city,
            out,
        } => commands::features::run(&entities, &grid, catalog.as_deref(), city.as_deref(), &out),
        Command::SelectK {
            features,
            k_min,
            k_max,
            gmm,
            out,
        } => commands::select_k::run(&features, k_min, k_max, &gmm, seed, &out),
        Command::SelectGrid {
            osm,
            boundary,
            sizes,
            k_min,
            k_max,
            catalog,
            gmm,
            out,
        } => commands::select_grid::run(
            &osm,
            &boundary,
            &sizes,
            k_min,
            k_max,
            catalog.as_deref(),
            &gmm,
            seed,
            &out,
        ),
        Command::Cluster {
            features,
            k,
            k_min,
            k_max,
            gmm,
            out,
            bic_out,
        } => commands::cluster::run(
            &features,
            &k,
            k_min,
            k_max,
            &gmm,
            seed,
            &out,
            bic_out.as_deref(),
        ),
        Command::Compare {
            features,
            grids,
            mode,
            k,
            k_min,
            k_max,
            min_share,
            centrality_only,
            gmm,
            out,
        } => commands::compare::run(commands::compare::Args {
            features: &features,
            grids: &grids,
            uniform: mode == CompareMode::UniformGrid,
            k: &k,
            k_min,
            k_max,
            min_share,
            centrality_only,
            gmm: &gmm,
            seed,
            out: &out,
        }),
        Command::Report {
            features,
            model,
            grid,
            bic,
            sweep,
            out,
        } => commands::report::run(
            &features,
            &model,
            &grid,
            bic.as_deref(),
            sweep.as_deref(),
            &out,
        ),
        Command::Run { config } => commands::run::run(&config, seed),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Default seed when neither the CLI nor a config provides one.
pub(crate) fn effective_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed.unwrap_or(42)
}
