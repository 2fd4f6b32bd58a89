//! Command-line surface: dataset validation, single clustering runs,
//! K sweeps, the repeated-runs benchmark, and synthetic data generation.
//!
//! Exit codes: 0 success (including --help/--version), 1 usage error,
//! 2 data error, 3 runtime error. Every output file is written atomically
//! (temp file + rename), and every artifact embeds the configuration that
//! produced it, including the resolved seed, so it can be replayed
//! bit-exactly.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::baselines::{
    hierarchical_cluster, lloyd_cluster, HierConfig, Linkage, LloydConfig, Seeding, UpdateRule,
};
use crate::dataset::Dataset;
use crate::de_engine::DeTuning;
use crate::dek_core::{run_dek_traced, DekConfig, ObjectiveVariant};
use crate::error::{Error, Result};
use crate::gower::pairwise_matrix;
use crate::model_selection::{pick_elbow, sweep_k, SweepMethod};
use crate::synth_bench::{generate, run_bench, BenchSpec, KChoice, Method, SynthSpec};
use crate::validity_metrics::metric_report;

#[derive(Parser)]
#[command(
    name = "dek",
    version,
    about = "Mixed-data clustering: DE-assisted K-means with Gower distance, \
             baseline clusterers, validity metrics, K selection, and a \
             repeated-runs benchmark"
)]
struct Cli {
    /// Bound worker threads (also readable from the DEK_JOBS env var)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load a dataset against its schema and print its shape statistics
    Validate {
        /// CSV data file with a header row
        #[arg(long)]
        data: PathBuf,
        /// JSON schema file describing the columns
        #[arg(long)]
        schema: PathBuf,
    },
    /// Run one clustering and write the result artifact as JSON
    Cluster(ClusterArgs),
    /// Sweep K over a range, emit the SSE curve, and pick the elbow
    SweepK(SweepArgs),
    /// Compare methods over repeated seeded runs and emit the report table
    Bench(BenchArgs),
    /// Generate a synthetic mixed dataset with planted clusters
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Stabilized,
    PaperLiteral,
}

impl From<VariantArg> for ObjectiveVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Stabilized => ObjectiveVariant::Stabilized,
            VariantArg::PaperLiteral => ObjectiveVariant::PaperLiteral,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedingArg {
    /// K distinct rows drawn uniformly
    Random,
    /// Distance-weighted K-means++ seeding
    Kmeanspp,
}

impl From<SeedingArg> for Seeding {
    fn from(v: SeedingArg) -> Self {
        match v {
            SeedingArg::Random => Seeding::UniformRandomRows,
            SeedingArg::Kmeanspp => Seeding::KMeansPlusPlus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UpdateArg {
    /// Median/mode prototypes under Gower distance
    MedianMode,
    /// Mean prototypes on one-hot-expanded data (squared error)
    EuclideanOnehot,
}

impl From<UpdateArg> for UpdateRule {
    fn from(v: UpdateArg) -> Self {
        match v {
            UpdateArg::MedianMode => UpdateRule::MedianMode,
            UpdateArg::EuclideanOnehot => UpdateRule::EuclideanOnehot,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkageArg {
    Single,
    Complete,
    Average,
}

impl From<LinkageArg> for Linkage {
    fn from(v: LinkageArg) -> Self {
        match v {
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Average => Linkage::Average,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMethodArg {
    Lloyd,
    Dek,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    /// Clustering method
    #[arg(long, value_enum)]
    method: Method,
    /// Cluster count (dek needs at least 2)
    #[arg(long)]
    k: usize,
    /// RNG seed; drawn at random and reported when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with DE overrides (keys: np, f, cr, max_gs, seed, mutation)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Objective variant for dek
    #[arg(long, value_enum, default_value = "stabilized")]
    variant: VariantArg,
    /// Seeding for lloyd
    #[arg(long, value_enum, default_value = "random")]
    seeding: SeedingArg,
    /// Prototype update rule for lloyd
    #[arg(long, value_enum, default_value = "median-mode")]
    update: UpdateArg,
    /// Linkage for hier
    #[arg(long, value_enum, default_value = "average")]
    linkage: LinkageArg,
    /// Write the result JSON here (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-generation best objective as CSV (dek only)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Dump the pairwise Gower matrix as CSV
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long, default_value_t = 2)]
    k_min: usize,
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    /// Seeded runs per K
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, value_enum, default_value = "lloyd")]
    method: SweepMethodArg,
    #[arg(long)]
    seed: Option<u64>,
    /// DE overrides for --method dek
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the curve CSV (k, mean_sse, std_sse) here
    #[arg(long)]
    out_curve: Option<PathBuf>,
    /// Write the chosen K (plus the curve) as JSON here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// CSV data file; repeat for several datasets
    #[arg(long, required = true)]
    data: Vec<PathBuf>,
    /// JSON schema file; one per --data, in order
    #[arg(long, required = true)]
    schema: Vec<PathBuf>,
    /// Comma-separated method list
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dek,lloyd,hier")]
    methods: Vec<Method>,
    /// Cluster count: an integer, or "elbow" to pick per dataset
    #[arg(long, default_value = "elbow", value_parser = parse_k_choice)]
    k: KChoiceArg,
    /// Independent runs per (dataset, method)
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "stabilized")]
    variant: VariantArg,
    /// Seeding for lloyd runs
    #[arg(long, value_enum, default_value = "random")]
    seeding: SeedingArg,
    /// Linkage for hier runs
    #[arg(long, value_enum, default_value = "average")]
    linkage: LinkageArg,
    /// DE overrides applied to every dek run (per-run seeds still win)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum KChoiceArg {
    Fixed(usize),
    Elbow,
}

fn parse_k_choice(s: &str) -> std::result::Result<KChoiceArg, String> {
    if s.eq_ignore_ascii_case("elbow") {
        return Ok(KChoiceArg::Elbow);
    }
    s.parse::<usize>()
        .map(KChoiceArg::Fixed)
        .map_err(|_| format!("expected an integer or 'elbow', got '{s}'"))
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    n_per_cluster: usize,
    #[arg(long, default_value_t = 3)]
    k_true: usize,
    #[arg(long, default_value_t = 4)]
    d_con: usize,
    /// Comma-separated choice counts of the categorical columns
    #[arg(long, value_delimiter = ',', default_value = "3,3,3")]
    choices: Vec<usize>,
    /// Cluster-center separation in within-cluster standard deviations
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    /// Probability of a point taking its cluster's modal category
    #[arg(long, default_value_t = 0.95)]
    purity: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_data: PathBuf,
    #[arg(long)]
    out_schema: PathBuf,
    /// Also write the planted labels (one per row) as CSV
    #[arg(long)]
    out_labels: Option<PathBuf>,
}

/// Parse the command line, dispatch, and map errors to the exit-code
/// contract.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    init_jobs(cli.jobs);
    match dispatch(cli.cmd) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_jobs(flag: Option<usize>) {
    let jobs = flag.or_else(|| {
        std::env::var("DEK_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs.filter(|&n| n > 0) {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Validate { data, schema } => cmd_validate(&data, &schema),
        Cmd::Cluster(args) => cmd_cluster(args),
        Cmd::SweepK(args) => cmd_sweep_k(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Synth(args) => cmd_synth(args),
    }
}

fn cmd_validate(data: &Path, schema: &Path) -> Result<()> {
    let ds = Dataset::load(data, schema)?;
    let s = ds.schema();
    let choices: Vec<String> = s.choice_counts().iter().map(usize::to_string).collect();
    println!(
        "n={} D_con={} D_cat={} choices=[{}]",
        ds.n(),
        s.d_con(),
        s.d_cat(),
        choices.join(" ")
    );
    println!("m={} expanded_dim={}", s.m(), s.expanded_dim());
    Ok(())
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    match flag {
        Some(seed) => seed,
        None => {
            let seed = rand::thread_rng().gen();
            eprintln!("no --seed given; drew seed {seed}");
            seed
        }
    }
}

fn load_tuning(path: &Option<PathBuf>) -> Result<Option<DeTuning>> {
    let Some(path) = path else { return Ok(None) };
    let file = std::fs::File::open(path).map_err(|source| Error::InputFile {
        path: path.clone(),
        source,
    })?;
    let tuning: DeTuning = serde_json::from_reader(file)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    Ok(Some(tuning))
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    let ds = Dataset::load(&args.data, &args.schema)?.normalize();
    let tuning = load_tuning(&args.config)?;
    let seed = resolve_seed(args.seed.or(tuning.as_ref().and_then(|t| t.seed)));
    let variant: ObjectiveVariant = args.variant.into();

    let mut trace: Option<Vec<f64>> = None;
    let (result, config_echo) = match args.method {
        Method::Dek => {
            let mut cfg = DekConfig::new(args.k, seed);
            cfg.variant = variant;
            if let Some(t) = &tuning {
                t.apply(&mut cfg.de);
            }
            cfg.de.seed = seed;
            let (result, history) = run_dek_traced(&ds, &cfg)?;
            trace = Some(history);
            let echo = serde_json::json!({
                "np": cfg.de.np, "f": cfg.de.f, "cr": cfg.de.cr,
                "max_gs": cfg.de.max_gs, "mutation": cfg.de.mutation,
            });
            (result, echo)
        }
        Method::Lloyd => {
            let mut cfg = LloydConfig::new(args.k, seed);
            cfg.seeding = args.seeding.into();
            cfg.update = args.update.into();
            let echo = serde_json::json!({
                "seeding": cfg.seeding, "update": cfg.update,
                "max_iters": cfg.max_iters, "tol": cfg.tol,
            });
            (lloyd_cluster(&ds, &cfg)?, echo)
        }
        Method::Hier => {
            let cfg = HierConfig {
                k: args.k,
                linkage: args.linkage.into(),
            };
            let echo = serde_json::json!({ "linkage": cfg.linkage });
            (hierarchical_cluster(&ds, &cfg)?, echo)
        }
    };

    let matrix = pairwise_matrix(&ds);
    if let Some(path) = &args.dump_matrix {
        let mut buf = Vec::new();
        matrix.write_csv(&mut buf)?;
        write_atomic(path, &buf)?;
    }
    if let Some(path) = &args.trace {
        if let Some(history) = &trace {
            let mut text = String::from("generation,best_objective\n");
            for (g, v) in history.iter().enumerate() {
                text.push_str(&format!("{},{v}\n", g + 1));
            }
            write_atomic(path, text.as_bytes())?;
        } else {
            eprintln!("--trace only applies to --method dek; ignored");
        }
    }

    let mut artifact = result.to_json(ds.schema());
    artifact["config"] = config_echo;
    let json = serde_json::to_string_pretty(&artifact).expect("artifact serializes") + "\n";

    let summary = match metric_report(&ds, &matrix, &result) {
        Ok(m) => format!(
            "dbi={:.6} sc={:.6} dvi={:.6} sse={:.6} k_effective={}",
            m.dbi, m.sc, m.dvi, m.sse, m.k_effective
        ),
        Err(e) => format!("metrics unavailable: {e}"),
    };

    match &args.out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            println!("{summary}");
            eprintln!("wrote {} ({:?})", path.display(), result.runtime);
        }
        None => {
            print!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_sweep_k(args: SweepArgs) -> Result<()> {
    let ds = Dataset::load(&args.data, &args.schema)?.normalize();
    let tuning = load_tuning(&args.config)?;
    let seed = resolve_seed(args.seed);
    let method = match args.method {
        SweepMethodArg::Lloyd => SweepMethod::Lloyd,
        SweepMethodArg::Dek => SweepMethod::Dek,
    };
    let curve = sweep_k(
        &ds,
        args.k_min,
        args.k_max,
        args.runs,
        method,
        seed,
        tuning.as_ref(),
    )?;
    let chosen = pick_elbow(&curve)?;
    println!("chosen K = {chosen}");

    if let Some(path) = &args.out_curve {
        let mut buf = Vec::new();
        curve.write_csv(&mut buf)?;
        write_atomic(path, &buf)?;
    }
    if let Some(path) = &args.out {
        let points: Vec<serde_json::Value> = curve
            .points
            .iter()
            .map(|p| {
                serde_json::json!({
                    "k": p.k, "mean_sse": p.mean_sse, "std_sse": p.std_sse,
                    "run_sses": p.run_sses,
                })
            })
            .collect();
        let artifact = serde_json::json!({
            "chosen_k": chosen,
            "config": {
                "data": args.data.display().to_string(),
                "schema": args.schema.display().to_string(),
                "k_min": args.k_min, "k_max": args.k_max,
                "runs_per_k": args.runs, "base_seed": seed,
                "method": match args.method {
                    SweepMethodArg::Lloyd => "lloyd",
                    SweepMethodArg::Dek => "dek",
                },
            },
            "curve": points,
        });
        let json = serde_json::to_string_pretty(&artifact).expect("serializes") + "\n";
        write_atomic(path, json.as_bytes())?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.data.len() != args.schema.len() {
        return Err(Error::InvalidConfig(format!(
            "{} --data files but {} --schema files",
            args.data.len(),
            args.schema.len()
        )));
    }
    let mut datasets = Vec::with_capacity(args.data.len());
    for (data, schema) in args.data.iter().zip(&args.schema) {
        let name = data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| data.display().to_string());
        datasets.push((name, Dataset::load(data, schema)?));
    }
    let seed = resolve_seed(args.seed);
    let mut spec = BenchSpec::new(datasets, args.methods.clone());
    spec.k = match args.k {
        KChoiceArg::Fixed(k) => KChoice::Fixed(k),
        KChoiceArg::Elbow => KChoice::Elbow,
    };
    spec.runs = args.runs;
    spec.base_seed = seed;
    spec.variant = args.variant.into();
    spec.seeding = args.seeding.into();
    spec.linkage = args.linkage.into();
    spec.de_tuning = load_tuning(&args.config)?;

    let report = run_bench(&spec)?;
    for (name, k) in &report.k_by_dataset {
        println!("dataset {name}: K = {k}");
    }
    print!("{}", report.render_table());

    if let Some(path) = &args.out_json {
        let json = serde_json::to_string_pretty(&report.to_json()).expect("serializes") + "\n";
        write_atomic(path, json.as_bytes())?;
    }
    if let Some(path) = &args.out_csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        write_atomic(path, &buf)?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let spec = SynthSpec {
        n_per_cluster: args.n_per_cluster,
        k_true: args.k_true,
        d_con: args.d_con,
        cat_choices: args.choices.clone(),
        separation: args.separation,
        purity: args.purity,
        seed,
    };
    let (ds, labels) = generate(&spec)?;

    let mut buf = Vec::new();
    ds.write_csv(&mut buf)?;
    write_atomic(&args.out_data, &buf)?;
    write_atomic(&args.out_schema, ds.schema().to_json_string().as_bytes())?;
    if let Some(path) = &args.out_labels {
        let mut text = String::from("label\n");
        for l in &labels {
            text.push_str(&format!("{l}\n"));
        }
        write_atomic(path, text.as_bytes())?;
    }
    println!(
        "generated n={} rows ({} clusters x {}), D_con={}, choices={:?}, seed={}",
        ds.n(),
        spec.k_true,
        spec.n_per_cluster,
        spec.d_con,
        spec.cat_choices,
        seed
    );
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let _ = std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o644));
    }
    Ok(())
}
