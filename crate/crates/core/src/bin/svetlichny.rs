use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use svetlichny::cli::{self, Format, GraphSource, Report, RunConfig};
use svetlichny::quantum::{DEFAULT_RESTARTS, DEFAULT_SEED};
use svetlichny::{CoefficientKind, Error, Method};

/// Svetlichny and Mermin polynomials, communication graphs and their maxima.
///
/// Exit status: 0 success, 1 domain error or failed verification, 2 I/O or
/// parse error. Errors are written to stderr as JSON.
///
/// Environment: SVETLICHNY_DIM_CAP overrides the parity-subspace dimension
/// cap (default 24); SVETLICHNY_BRUTE_CAP overrides the brute-force strategy
/// cap (default 2^24, accepts `2^k`). Command-line flags take precedence.
#[derive(Parser, Debug)]
#[command(name = "svetlichny", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Svet,
    Mermin,
}

impl From<Kind> for CoefficientKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Svet => CoefficientKind::Svetlichny,
            Kind::Mermin => CoefficientKind::Mermin,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Closed,
    Recursive,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphArg {
    /// Graph file: {"m": M, "edges": [[i, j], ...]}, 1-based, i -> j.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Catalog graph name instead of a file (see `catalog --list`).
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Args, Debug)]
struct CatalogParams {
    /// Party count for parameterized catalog graphs.
    #[arg(long)]
    m: Option<usize>,
    /// Split point for `fig2`.
    #[arg(long)]
    k: Option<usize>,
}

fn source(g: GraphArg, p: CatalogParams) -> GraphSource {
    match (g.graph, g.catalog) {
        (Some(path), _) => GraphSource::File(path),
        (None, Some(name)) => GraphSource::Catalog { name, m: p.m, k: p.k },
        (None, None) => unreachable!("clap enforces one graph source"),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact coefficient table.
    Coeffs {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Kind::Svet)]
        kind: Kind,
        /// Defaults to closed for svet and recursive for mermin.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Partially/totally paired classification and separability.
    Classify {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        params: CatalogParams,
    },
    /// Exact maximum over the strategies a graph allows.
    Maximize {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        params: CatalogParams,
        #[arg(long, value_enum, default_value_t = Kind::Svet)]
        kind: Kind,
        /// Cross-check by exhaustive strategy enumeration.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        dim_cap: Option<usize>,
        /// Decimal or `2^k`.
        #[arg(long)]
        brute_cap: Option<String>,
    },
    /// Parity-preserving mixture of a strategy file.
    Mixture {
        #[arg(long)]
        strategy: PathBuf,
    },
    /// No-signalling check of a table file.
    Nosignal {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Svetlichny value of a table file.
    Evaluate {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Svet)]
        kind: Kind,
    },
    /// Optimize GHZ measurement angles.
    Quantum {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also optimize polar angles (m <= 4).
        #[arg(long)]
        general: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Bound table: theory against computed maxima for each m.
    Verify {
        #[arg(long, default_value_t = 2)]
        m_min: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        dim_cap: Option<usize>,
    },
    /// Print a catalog graph in the graph file format.
    Catalog {
        /// Graph name; omit with --list.
        name: Option<String>,
        #[command(flatten)]
        params: CatalogParams,
        #[arg(long)]
        list: bool,
    },
}

fn run(cmd: Command, mut cfg: RunConfig) -> Result<Report, Error> {
    match cmd {
        Command::Coeffs { m, kind, method } => {
            let kind = CoefficientKind::from(kind);
            let method = match (method, kind) {
                (Some(MethodArg::Closed), _) => Method::Closed,
                (Some(MethodArg::Recursive), _) | (None, CoefficientKind::Mermin) => Method::Recursive,
                (None, CoefficientKind::Svetlichny) => Method::Closed,
            };
            cli::cmd_coeffs(m, kind, method)
        }
        Command::Classify { graph, params } => cli::cmd_classify(&source(graph, params)),
        Command::Maximize { graph, params, kind, oracle, dim_cap, brute_cap } => {
            if let Some(d) = dim_cap {
                cfg.dim_cap = d;
            }
            if let Some(b) = brute_cap {
                cfg.brute_cap =
                    cli::parse_cap(&b).ok_or_else(|| Error::InvalidParams(format!("bad --brute-cap `{b}`")))?;
            }
            cfg.validate()?;
            cli::cmd_maximize(&source(graph, params), kind.into(), oracle, &cfg)
        }
        Command::Mixture { strategy } => cli::cmd_mixture(&strategy),
        Command::Nosignal { table, tol } => cli::cmd_nosignal(&table, tol),
        Command::Evaluate { table, kind } => cli::cmd_evaluate(&table, kind.into()),
        Command::Quantum { m, restarts, seed, general, tol } => cli::cmd_quantum(m, restarts, seed, general, tol),
        Command::Verify { m_min, m_max, restarts, seed, dim_cap } => {
            cfg.seed = seed;
            if let Some(d) = dim_cap {
                cfg.dim_cap = d;
            }
            cfg.validate()?;
            cli::cmd_verify(m_min, m_max, restarts, &cfg)
        }
        Command::Catalog { list: true, .. } => Ok(cli::catalog_list()),
        Command::Catalog { name: Some(name), params, .. } => cli::cmd_catalog(&name, params.m, params.k),
        Command::Catalog { name: None, .. } => Err(Error::InvalidParams("catalog needs a name or --list".into())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Cli::parse();
    let format = match args.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Csv => Format::Csv,
    };
    let result = RunConfig::from_env().and_then(|cfg| run(args.command, RunConfig { format, ..cfg }));
    match result {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(format).as_bytes()).is_err() {
                return ExitCode::from(cli::EXIT_INPUT as u8);
            }
            ExitCode::from(report.status as u8)
        }
        Err(e) => {
            eprintln!("{}", cli::error_json(&e));
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
