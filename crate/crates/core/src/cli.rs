//! `vqlab` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 usage error,
//! 3 data-format error, 4 training diverged.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Family, RotationSequence, Topology};
use crate::data;
use crate::error::Error;
use crate::learn::{
    train_classifier, train_distribution_direct, train_distribution_qgan, ClassifierConfig,
    DistributionConfig, ParamInit, TrainReport,
};
use crate::metrics::{estimate_entangling_capability, estimate_expressibility, SamplingConfig};

pub const CSV_HEADER: [&str; 10] = [
    "family",
    "rotations",
    "topology",
    "layers",
    "expressibility",
    "entanglement",
    "n_pairs",
    "n_states",
    "n_bins",
    "seed",
];

pub const THREADS_ENV: &str = "VQLAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(Error),
    #[error("{0}")]
    Diverged(String),
    #[error("{0}")]
    Other(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Diverged(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => CliError::Usage(msg),
            Error::Format { .. } => CliError::Data(e),
            Error::Diverged(msg) => CliError::Diverged(msg),
            other => CliError::Other(other),
        }
    }
}

/// Errors while reading input datasets count as data errors even when they are I/O.
fn data_error(e: Error) -> CliError {
    match e {
        Error::Io(_) | Error::Format { .. } => CliError::Data(e),
        other => other.into(),
    }
}

#[derive(Parser, Debug)]
#[command(name = "vqlab", version, about = "Variational circuit expressibility, entanglement and training runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expressibility and entangling capability over a sweep of circuits.
    Metrics(MetricsArgs),
    /// Learn random 2^n-outcome distributions, one run per seed.
    GenDist(GenDistArgs),
    /// Train the variational classifier on MNIST.
    Classify(ClassifyArgs),
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Sweep configuration JSON; defaults to the full C1 sweep.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output path; the JSON sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub n_pairs: Option<usize>,
    #[arg(long)]
    pub n_states: Option<usize>,
    #[arg(long)]
    pub n_bins: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Circuit spec JSON; overrides the individual flags below.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value = "C1")]
    pub family: String,
    #[arg(long, default_value_t = 6)]
    pub qubits: usize,
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    #[arg(long, default_value = "x")]
    pub rotations: String,
    #[arg(long, default_value = "linear")]
    pub topology: String,
}

impl SpecArgs {
    pub fn build(&self) -> Result<AnsatzSpec, CliError> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
        }
        Ok(AnsatzSpec::new(
            self.family.parse()?,
            self.qubits,
            self.layers,
            self.rotations.parse()?,
            self.topology.parse()?,
        )?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trainer {
    Qgan,
    Direct,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    /// Flat-Dirichlet draw seeded by the run seed.
    Random,
    /// All mass on outcome 0.
    PointMass,
}

#[derive(Args, Debug)]
pub struct GenDistArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum, default_value_t = Trainer::Qgan)]
    pub trainer: Trainer,
    #[arg(long, value_enum, default_value_t = TargetKind::Random)]
    pub target: TargetKind,
    /// Comma-separated run seeds; overrides --seed/--n-seeds.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub n_seeds: u64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub steps_per_epoch: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Start from all-zero angles instead of uniform random ones.
    #[arg(long)]
    pub zero_init: bool,
    /// Output directory.
    #[arg(long, default_value = "gen-dist")]
    pub out: PathBuf,
    /// Record wall_time_s as 0 so reports are byte-reproducible.
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Directory holding the four standard MNIST IDX files.
    #[arg(long, default_value = "data/mnist")]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub train_images: Option<PathBuf>,
    #[arg(long)]
    pub train_labels: Option<PathBuf>,
    #[arg(long)]
    pub test_images: Option<PathBuf>,
    #[arg(long)]
    pub test_labels: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub n_classes: usize,
    #[arg(long, default_value_t = 2000)]
    pub n_train: usize,
    #[arg(long, default_value_t = 500)]
    pub n_test: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "classify.json")]
    pub out: PathBuf,
    #[arg(long)]
    pub reproducible: bool,
}

/// Sweep over (family × rotations × topology × layers).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub rotation_sequences: Vec<String>,
    pub topologies: Vec<Topology>,
    pub layer_range: [usize; 2],
    pub qubits: usize,
    pub sampling: SamplingConfig,
    pub output_path: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            families: vec![Family::C1],
            rotation_sequences: ["x", "y", "xy", "yx", "xz", "zx", "yz", "zy"]
                .map(String::from)
                .to_vec(),
            topologies: Topology::ALL.to_vec(),
            layer_range: [1, 6],
            qubits: 6,
            sampling: SamplingConfig::default(),
            output_path: PathBuf::from("metrics.csv"),
        }
    }
}

impl SweepConfig {
    /// Circuits in output order: family, rotations, topology, then layers.
    pub fn specs(&self) -> Result<Vec<AnsatzSpec>, CliError> {
        let [lo, hi] = self.layer_range;
        if lo == 0 || lo > hi {
            return Err(CliError::Usage(format!("bad layer_range [{lo}, {hi}]")));
        }
        self.sampling.validate()?;
        let rotations = self
            .rotation_sequences
            .iter()
            .map(|r| r.parse::<RotationSequence>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut specs = Vec::new();
        for &family in &self.families {
            for rot in &rotations {
                for &topology in &self.topologies {
                    for layers in lo..=hi {
                        specs.push(AnsatzSpec::new(family, self.qubits, layers, rot.clone(), topology)?);
                    }
                }
            }
        }
        Ok(specs)
    }
}

/// One row of the metrics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub family: Family,
    pub rotations: String,
    pub topology: Topology,
    pub layers: usize,
    pub expressibility: f64,
    pub entanglement: f64,
    pub n_pairs: usize,
    pub n_states: usize,
    pub n_bins: usize,
    pub seed: u64,
}

impl MetricsRow {
    fn record(&self) -> [String; 10] {
        [
            self.family.to_string(),
            self.rotations.clone(),
            self.topology.to_string(),
            self.layers.to_string(),
            self.expressibility.to_string(),
            self.entanglement.to_string(),
            self.n_pairs.to_string(),
            self.n_states.to_string(),
            self.n_bins.to_string(),
            self.seed.to_string(),
        ]
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MetricsRow>, CliError> {
    let specs = cfg.specs()?;
    let sampling = cfg.sampling;
    let rows = specs
        .par_iter()
        .map(|spec| -> crate::Result<MetricsRow> {
            let expr = estimate_expressibility(spec, &sampling)?;
            let ent = estimate_entangling_capability(spec, &sampling)?;
            Ok(MetricsRow {
                family: spec.family(),
                rotations: spec.rotations().to_string(),
                topology: spec.topology(),
                layers: spec.layers(),
                expressibility: expr.value,
                entanglement: ent.value,
                n_pairs: sampling.n_pairs,
                n_states: sampling.n_states,
                n_bins: sampling.n_bins,
                seed: sampling.seed,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn rows_to_csv(rows: &[MetricsRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Other(Error::Io(e.into()));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Other(Error::Io(e.into_error())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    fs::write(path, text).map_err(Error::from)?;
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(Error::from)?;
    }
    Ok(())
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_path = out.clone();
    }
    if let Some(n) = args.n_pairs {
        cfg.sampling.n_pairs = n;
    }
    if let Some(n) = args.n_states {
        cfg.sampling.n_states = n;
    }
    if let Some(n) = args.n_bins {
        cfg.sampling.n_bins = n;
    }
    let rows = run_sweep(&cfg)?;
    ensure_parent(&cfg.output_path)?;
    fs::write(&cfg.output_path, rows_to_csv(&rows)?).map_err(Error::from)?;
    write_json(&cfg.output_path.with_extension("json"), &rows)?;
    eprintln!("wrote {} rows to {}", rows.len(), cfg.output_path.display());
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_metric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenDistAggregate {
    pub trainer: String,
    pub target: String,
    pub spec: AnsatzSpec,
    pub mean_hellinger: Option<f64>,
    pub per_seed: Vec<SeedOutcome>,
}

impl GenDistArgs {
    fn seed_list(&self) -> Vec<u64> {
        match &self.seeds {
            Some(list) => list.clone(),
            None => (self.seed..self.seed + self.n_seeds).collect(),
        }
    }
}

/// Runs every seed; diverged seeds are recorded in the aggregate and turn the
/// exit code into 4 after all seeds finish.
pub fn cmd_gen_dist(args: &GenDistArgs) -> Result<GenDistAggregate, CliError> {
    let spec = args.spec.build()?;
    let n_outcomes = 1usize << spec.n_qubits();
    let seeds = args.seed_list();
    if seeds.is_empty() {
        return Err(CliError::Usage("no seeds given".into()));
    }
    fs::create_dir_all(&args.out).map_err(Error::from)?;
    let trainer_name = match args.trainer {
        Trainer::Qgan => "qgan",
        Trainer::Direct => "direct",
    };
    let target_name = match args.target {
        TargetKind::Random => "flat_dirichlet",
        TargetKind::PointMass => "point_mass",
    };

    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut diverged = 0;
    for &seed in &seeds {
        let target = match args.target {
            TargetKind::Random => data::random_target_distribution::<f64>(n_outcomes, seed)?,
            TargetKind::PointMass => {
                let mut t = vec![0.0; n_outcomes];
                t[0] = 1.0;
                t
            }
        };
        let cfg = DistributionConfig {
            epochs: args.epochs,
            steps_per_epoch: args.steps_per_epoch,
            batch_size: args.batch_size,
            learning_rate: args.lr,
            seed,
            init: if args.zero_init {
                ParamInit::Constant(0.0)
            } else {
                ParamInit::Uniform
            },
        };
        let result = match args.trainer {
            Trainer::Qgan => train_distribution_qgan(&spec, &target, &cfg),
            Trainer::Direct => train_distribution_direct(&spec, &target, &cfg),
        };
        match result {
            Ok(mut report) => {
                if args.reproducible {
                    report.wall_time_s = 0.0;
                }
                write_json(&args.out.join(format!("report_seed{seed}.json")), &report)?;
                per_seed.push(SeedOutcome {
                    seed,
                    final_metric: Some(report.final_metric),
                    error: None,
                });
            }
            Err(Error::Diverged(msg)) => {
                diverged += 1;
                per_seed.push(SeedOutcome {
                    seed,
                    final_metric: None,
                    error: Some(msg),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let done: Vec<f64> = per_seed.iter().filter_map(|s| s.final_metric).collect();
    let aggregate = GenDistAggregate {
        trainer: trainer_name.into(),
        target: target_name.into(),
        spec,
        mean_hellinger: (!done.is_empty()).then(|| done.iter().sum::<f64>() / done.len() as f64),
        per_seed,
    };
    write_json(&args.out.join("aggregate.json"), &aggregate)?;
    if diverged > 0 {
        return Err(CliError::Diverged(format!(
            "{diverged} of {} seeds diverged",
            seeds.len()
        )));
    }
    Ok(aggregate)
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<TrainReport, CliError> {
    if ![2, 4, 6].contains(&args.n_classes) {
        return Err(CliError::Usage(format!(
            "--n-classes must be 2, 4 or 6, got {}",
            args.n_classes
        )));
    }
    let spec = args.spec.build()?;
    let path = |given: &Option<PathBuf>, name: &str| given.clone().unwrap_or_else(|| args.data_dir.join(name));
    let train_raw = data::load_idx(
        path(&args.train_images, data::TRAIN_IMAGES),
        path(&args.train_labels, data::TRAIN_LABELS),
    )
    .map_err(data_error)?;
    let test_raw = data::load_idx(
        path(&args.test_images, data::TEST_IMAGES),
        path(&args.test_labels, data::TEST_LABELS),
    )
    .map_err(data_error)?;
    let train = data::prepare_subset::<f64>(&train_raw, args.n_classes, args.n_train)?;
    let test = data::prepare_subset::<f64>(&test_raw, args.n_classes, args.n_test)?;
    let cfg = ClassifierConfig {
        n_classes: args.n_classes,
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.lr,
        seed: args.seed,
    };
    let mut report = train_classifier(&spec, &train, &test, &cfg)?;
    if args.reproducible {
        report.wall_time_s = 0.0;
    }
    ensure_parent(&args.out)?;
    write_json(&args.out, &report)?;
    Ok(report)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
        // a second initialization only happens in tests; keep the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Metrics(args) => cmd_metrics(&args),
        Command::GenDist(args) => {
            let agg = cmd_gen_dist(&args)?;
            if let Some(mean) = agg.mean_hellinger {
                eprintln!("mean Hellinger over {} seeds: {mean}", agg.per_seed.len());
            }
            Ok(())
        }
        Command::Classify(args) => {
            let report = cmd_classify(&args)?;
            eprintln!("test accuracy: {}", report.final_metric);
            Ok(())
        }
    }
}

pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vqlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
