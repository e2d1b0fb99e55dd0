use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirnet_core::graph::{self, export};
use mirnet_core::pipeline::{write_atomically, MANIFEST_FILE};
use mirnet_core::synth::{self, PairMode, SynthSpec};
use mirnet_core::{
    entropy_diagnose, load_price_table, run_pipeline, AnalysisConfig, CorrMetric, DistanceMatrix,
    DistanceMethod, DistanceParams, Error, GraphKind,
};

#[derive(Parser)]
#[command(
    name = "mirnet",
    version,
    about = "Dependency networks from price tables: correlation and mutual information rate"
)]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build distance matrices, filtered graphs and centrality tables.
    Run(RunArgs),
    /// Entropy-rate diagnostics for one instrument.
    Entropy(EntropyArgs),
    /// Write a synthetic price table.
    Synth(SynthArgs),
    /// Filter a saved distance matrix into a graph file.
    Export(ExportArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Configuration file (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Price table: a date column plus one column per instrument.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long)]
    date_column: Option<String>,
    /// Comma-separated subset of instrument columns.
    #[arg(long, value_delimiter = ',')]
    tickers: Option<Vec<String>>,
    /// Alphabet size for MIR methods; repeatable.
    #[arg(long = "alphabet")]
    alphabets: Vec<u32>,
    /// Sequences shorter than this are rejected unless --allow-short.
    #[arg(long)]
    min_length: Option<usize>,
}

impl InputArgs {
    fn config(&self) -> mirnet_core::Result<AnalysisConfig> {
        let mut cfg = match &self.config {
            Some(p) => AnalysisConfig::load(p)?,
            None => AnalysisConfig::default(),
        };
        if let Some(v) = &self.input {
            cfg.input = v.clone();
        }
        if let Some(v) = self.delimiter {
            cfg.table.delimiter = v;
        }
        if let Some(v) = &self.date_column {
            cfg.table.date_column = v.clone();
        }
        if let Some(v) = &self.tickers {
            cfg.table.tickers = Some(v.clone());
        }
        if !self.alphabets.is_empty() {
            cfg.alphabets = self.alphabets.clone();
        }
        if let Some(v) = self.min_length {
            cfg.min_len = v;
        }
        if cfg.input.as_os_str().is_empty() {
            return Err(Error::Config(
                "no input table: pass --input or set `input` in the config".into(),
            ));
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    /// 1 − ρ²
    OneMinusSquared,
    /// sqrt(2(1 − ρ))
    Sqrt,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Distance method (correlation, mir, mir_prime); repeatable.
    #[arg(long = "method")]
    methods: Vec<DistanceMethod>,
    /// Graph kind (mst, pmfg); repeatable.
    #[arg(long = "kind")]
    kinds: Vec<GraphKind>,
    #[arg(long, value_enum)]
    corr_metric: Option<Metric>,
    /// Random walk weighted by similarity 1 − d instead of uniform.
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    allow_short: bool,
    /// Treat pairs of constant symbol sequences as distance 0.
    #[arg(long)]
    degenerate_as_zero: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    ticker: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// 15 instruments: factor groups, a near copy, an |x|-driven and an independent one.
    Wig20,
    /// --instruments factor-model instruments.
    Universe,
    PairIndependent,
    PairIdentity,
    PairNonlinear,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(
        long,
        value_enum,
        conflicts_with = "spec",
        required_unless_present = "spec"
    )]
    preset: Option<Preset>,
    /// Instrument specification (TOML).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Number of daily returns [default: 1000, or the spec's value].
    #[arg(long)]
    days: Option<usize>,
    /// [default: 0, or the spec's value]
    #[arg(long)]
    seed: Option<u64>,
    /// Instrument count for the universe preset.
    #[arg(long, default_value_t = 91)]
    instruments: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graphml,
    Dot,
    Json,
}

#[derive(Args)]
struct ExportArgs {
    /// Distance matrix written by `run` (`<variant>/distance.csv`).
    #[arg(long)]
    matrix: PathBuf,
    /// Method the matrix was computed with; recorded in the export.
    #[arg(long, default_value = "correlation")]
    method: DistanceMethod,
    #[arg(long)]
    alphabet: Option<u32>,
    #[arg(long, default_value = "mst")]
    kind: GraphKind,
    #[arg(long, value_enum, default_value = "graphml")]
    format: Format,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    error: Error,
}

fn usage(error: Error) -> Failure {
    Failure { code: 1, error }
}

fn internal(error: Error) -> Failure {
    let code = if matches!(error, Error::Io { .. } | Error::Numerical(_)) {
        3
    } else {
        1
    };
    Failure { code, error }
}

fn ascii(c: char) -> Result<u8, Failure> {
    u8::try_from(c).ok().filter(u8::is_ascii).ok_or_else(|| {
        usage(Error::Config(format!(
            "delimiter {c:?} is not a single ASCII character"
        )))
    })
}

fn run(args: RunArgs) -> Result<u8, Failure> {
    let mut cfg = args.input.config().map_err(usage)?;
    if !args.methods.is_empty() {
        cfg.methods = args.methods;
    }
    if !args.kinds.is_empty() {
        cfg.kinds = args.kinds;
    }
    if let Some(m) = args.corr_metric {
        cfg.corr_metric = match m {
            Metric::OneMinusSquared => CorrMetric::OneMinusSquared,
            Metric::Sqrt => CorrMetric::Sqrt,
        };
    }
    cfg.weighted_walk |= args.weighted;
    cfg.allow_short |= args.allow_short;
    cfg.degenerate_as_zero |= args.degenerate_as_zero;
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }

    // Input and configuration problems are reported before anything is written.
    cfg.validate().map_err(usage)?;
    load_price_table(&cfg.input, &cfg.table).map_err(usage)?;

    let manifest = run_pipeline(&cfg).map_err(internal)?;
    for c in &manifest.combinations {
        match &c.error {
            None => println!(
                "ok     {}/{} ({} edges)",
                c.variant,
                c.kind,
                c.edges.unwrap_or(0)
            ),
            Some(e) => println!("failed {}/{}: {e}", c.variant, c.kind),
        }
    }
    for n in &manifest.notes {
        println!("note: {n}");
    }
    println!("manifest: {}", cfg.output_dir.join(MANIFEST_FILE).display());
    Ok(if manifest.all_ok() { 0 } else { 2 })
}

fn entropy(args: EntropyArgs) -> Result<u8, Failure> {
    let cfg = args.input.config().map_err(usage)?;
    cfg.validate().map_err(usage)?;
    let report = entropy_diagnose(&cfg, &args.ticker).map_err(usage)?;
    print!("{report}");
    Ok(0)
}

fn synth(args: SynthArgs) -> Result<u8, Failure> {
    let days = args.days.unwrap_or(1000);
    let seed = args.seed.unwrap_or(0);
    let spec = match (args.preset, &args.spec) {
        (_, Some(path)) => {
            let mut spec = SynthSpec::load(path).map_err(usage)?;
            spec.days = args.days.unwrap_or(spec.days);
            spec.seed = args.seed.unwrap_or(spec.seed);
            spec
        }
        (Some(Preset::Wig20), None) => SynthSpec::wig20_like(days, seed),
        (Some(Preset::Universe), None) => {
            SynthSpec::factor_universe(args.instruments, 5, days, seed)
        }
        (Some(Preset::PairIndependent), None) => SynthSpec::pair(PairMode::Independent, days, seed),
        (Some(Preset::PairIdentity), None) => SynthSpec::pair(PairMode::NearIdentity, days, seed),
        (Some(Preset::PairNonlinear), None) => SynthSpec::pair(PairMode::Nonlinear, days, seed),
        (None, None) => unreachable!("clap requires --preset or --spec"),
    };
    let prices = synth::generate_prices(&spec).map_err(usage)?;
    let mut buf = Vec::new();
    synth::write_price_table(&prices, &mut buf, ascii(args.delimiter)?).map_err(internal)?;
    write_atomically(&args.out, &buf).map_err(internal)?;
    println!(
        "wrote {} instruments x {} days to {}",
        prices.len(),
        spec.days,
        args.out.display()
    );
    Ok(0)
}

fn export_graph(args: ExportArgs) -> Result<u8, Failure> {
    let file = std::fs::File::open(&args.matrix).map_err(|e| {
        usage(Error::Io {
            context: format!("opening {}", args.matrix.display()),
            source: e,
        })
    })?;
    let params = DistanceParams {
        // matches what `run` records: correlation has no alphabet
        alphabet_size: if args.method.uses_symbols() {
            args.alphabet.unwrap_or(4)
        } else {
            0
        },
        ..DistanceParams::default()
    };
    let m = DistanceMatrix::read_delimited(file, ascii(args.delimiter)?, args.method, params)
        .map_err(usage)?;
    let g = graph::build(&m, args.kind).map_err(usage)?;
    let body = match args.format {
        Format::Graphml => export::to_graphml(&g),
        Format::Dot => export::to_dot(&g),
        Format::Json => export::to_json(&g),
    };
    write_atomically(&args.out, body.as_bytes()).map_err(internal)?;
    println!(
        "{} with {} edges written to {}",
        g.kind,
        g.edges.len(),
        args.out.display()
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Entropy(a) => entropy(a),
        Command::Synth(a) => synth(a),
        Command::Export(a) => export_graph(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
