//! Random-ordering size experiments, lemma sweeps, bound curves and CSV output.
//!
//! Every random choice comes from ChaCha8 (`rand_chacha`) seeded through
//! [`trial_seed`], so a configuration reproduces the same records on any
//! platform regardless of how trials are scheduled across threads.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use itertools::Itertools;
use log::{debug, info, warn};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bdd::{BddError, Manager, NodeRef, VarId, VarOrder};
use crate::fooling::{self, BalancedPartition, FoolingError, SaddMsbOracle};
use crate::sadd::{self, SaddError, SaddParams};

/// Default resource guard for one trial's manager.
pub const DEFAULT_NODE_CAP: usize = 5_000_000;

/// Members per partition checked pairwise by [`verify_lemma`]; larger
/// fooling sets are sub-sampled.
pub const MEMBER_CHECK_LIMIT: u64 = 1 << 10;

/// Largest `n` for exhaustive lemma sweeps.
pub const EXHAUSTIVE_LEMMA_LIMIT: u32 = 6;

/// Smallest-of-50 widths read off the reference size plot, by operand width.
pub const FIGURE_WIDTHS: [(u32, u64); 4] = [(2, 5), (4, 16), (8, 136), (16, 5851)];
/// Smallest-of-50 sizes read off the reference size plot.
pub const FIGURE_SIZES: [(u32, u64); 4] = [(2, 22), (4, 96), (8, 937), (16, 46761)];
/// The "predicted lower bound" series drawn in the same plot.
pub const FIGURE_BOUNDS: [(u32, u64); 4] = [(2, 1), (4, 2), (8, 8), (16, 128)];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Sadd(#[from] SaddError),
    #[error(transparent)]
    Fooling(#[from] FoolingError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("n={n} trial {trial}: width {width} is below the proven bound {bound}")]
    BoundViolated {
        n: u32,
        trial: usize,
        width: usize,
        bound: u64,
    },
    #[error("n={n}: every trial exceeded the node cap of {cap}")]
    AllTrialsCapped { n: u32, cap: usize },
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Which outputs of the shifted addition a diagram represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    /// Only the most significant sum bit, `sAdd^n_{n-1}`.
    MsbOnly,
    /// All `n + 1` output bits as one shared diagram.
    AllOutputs,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::MsbOnly => "msb_only",
            Target::AllOutputs => "all_outputs",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "msb_only" | "msb" => Ok(Target::MsbOnly),
            "all_outputs" | "all" => Ok(Target::AllOutputs),
            other => Err(HarnessError::Config(format!("unknown target `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub n_values: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    pub target: Target,
    pub omega: Ratio<u64>,
    pub node_cap: usize,
}

impl ExperimentConfig {
    pub fn new(n_values: Vec<u32>, trials: usize, seed: u64, target: Target) -> Self {
        Self {
            n_values,
            trials,
            seed,
            target,
            omega: fooling::half(),
            node_cap: DEFAULT_NODE_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(HarnessError::Config("no operand widths given".into()));
        }
        for &n in &self.n_values {
            SaddParams::minimal(n)?;
        }
        if self.omega > Ratio::from_integer(1) {
            return Err(HarnessError::Config(format!("omega {} > 1", self.omega)));
        }
        Ok(())
    }
}

/// One random ordering and the diagram measured under it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub n: u32,
    pub trial: usize,
    pub ordering: Vec<VarId>,
    pub size: usize,
    pub width: usize,
    /// Seed of this trial's ordering (see [`trial_seed`]).
    pub seed: u64,
    pub target: Target,
}

/// Per-width minima over the completed trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub n: u32,
    pub min_size: usize,
    pub min_width: usize,
    pub lower_bound: u64,
    pub trials_completed: usize,
    pub trials_capped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<Summary>,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` at width `n`, derived from the run seed.
pub fn trial_seed(seed: u64, n: u32, trial: usize) -> u64 {
    mix(seed ^ mix(((n as u64) << 32) | trial as u64))
}

/// Random variable order for one trial.
pub fn trial_order(params: &SaddParams, seed: u64) -> VarOrder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    params.random_order(&mut rng)
}

/// Builds the target diagram in a fresh manager under `order`.
pub fn build_target(
    params: &SaddParams,
    order: VarOrder,
    target: Target,
    node_cap: usize,
) -> Result<(Manager, Vec<NodeRef>)> {
    let mut mgr = Manager::new(order).with_node_cap(node_cap);
    let f = sadd::build_sadd(&mut mgr, params)?;
    let roots = match target {
        Target::MsbOnly => vec![f.output_bit(params.n() as usize - 1)?],
        Target::AllOutputs => f.bits().to_vec(),
    };
    Ok((mgr, roots))
}

/// Size and width of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub size: usize,
    pub width: usize,
}

pub fn measure(
    params: &SaddParams,
    order: VarOrder,
    target: Target,
    node_cap: usize,
) -> Result<Measurement> {
    let (mgr, roots) = build_target(params, order, target, node_cap)?;
    Ok(Measurement {
        size: mgr.dag_size(&roots)?,
        width: mgr.max_width(&roots)?,
    })
}

/// `ceil(2^(n/4))`, the smallest integer `c` with `c^4 >= 2^n`.
pub fn lower_bound(n: u32) -> u64 {
    let target = 1u128 << n.min(124);
    let mut c = 1u64 << (n / 4);
    while (c as u128).pow(4) < target {
        c += 1;
    }
    c
}

/// Runs every `(n, trial)` pair, in parallel, and summarises the minima.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let jobs: Vec<(u32, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let outcomes: Vec<(u32, Option<ExperimentRecord>)> = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let params = SaddParams::minimal(n)?;
            let seed = trial_seed(config.seed, n, trial);
            let order = trial_order(&params, seed);
            let ordering = order.permutation().to_vec();
            match measure(&params, order, config.target, config.node_cap) {
                Ok(m) => {
                    debug!("n={n} trial={trial} size={} width={}", m.size, m.width);
                    Ok((
                        n,
                        Some(ExperimentRecord {
                            n,
                            trial,
                            ordering,
                            size: m.size,
                            width: m.width,
                            seed,
                            target: config.target,
                        }),
                    ))
                }
                Err(HarnessError::Sadd(SaddError::Bdd(BddError::NodeCapExceeded { .. }))) => {
                    warn!("n={n} trial={trial} exceeded the node cap");
                    Ok((n, None))
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let mut records: Vec<ExperimentRecord> =
        outcomes.iter().filter_map(|(_, r)| r.clone()).collect();
    records.sort_by_key(|r| (r.n, r.trial));

    if config.target == Target::MsbOnly {
        for r in &records {
            let bound = lower_bound(r.n);
            if (r.width as u64) < bound {
                return Err(HarnessError::BoundViolated {
                    n: r.n,
                    trial: r.trial,
                    width: r.width,
                    bound,
                });
            }
        }
    }

    let mut summary = Vec::new();
    for &n in config.n_values.iter().unique() {
        let done: Vec<_> = records.iter().filter(|r| r.n == n).collect();
        let capped = outcomes
            .iter()
            .filter(|(m, r)| *m == n && r.is_none())
            .count();
        if done.is_empty() {
            return Err(HarnessError::AllTrialsCapped {
                n,
                cap: config.node_cap,
            });
        }
        let s = Summary {
            n,
            min_size: done.iter().map(|r| r.size).min().unwrap_or(0),
            min_width: done.iter().map(|r| r.width).min().unwrap_or(0),
            lower_bound: lower_bound(n),
            trials_completed: done.len(),
            trials_capped: capped,
        };
        info!(
            "n={n}: min size {} min width {} ({} trials, {} capped)",
            s.min_size, s.min_width, s.trials_completed, s.trials_capped
        );
        summary.push(s);
    }
    Ok(ExperimentResult {
        config: config.clone(),
        records,
        summary,
    })
}

/// True minima of size and width over every variable order (small `n` only).
pub fn exhaustive_minimum(n: u32, target: Target) -> Result<Measurement> {
    let params = SaddParams::minimal(n)?;
    if params.num_vars() > 8 {
        return Err(HarnessError::Config(format!(
            "exhaustive search over {}! orderings refused",
            params.num_vars()
        )));
    }
    let vars = params.vars();
    let mut best: Option<Measurement> = None;
    for perm in vars.iter().copied().permutations(vars.len()) {
        let m = measure(&params, VarOrder::new(perm)?, target, usize::MAX)?;
        best = Some(match best {
            None => m,
            Some(b) => Measurement {
                size: b.size.min(m.size),
                width: b.width.min(m.width),
            },
        });
    }
    Ok(best.expect("at least one ordering"))
}

/// One row of the bound curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundPoint {
    pub n: u32,
    /// `ceil(2^(n/4))`.
    pub proven: u64,
    /// The plotted "predicted lower bound", where the plot has a point.
    pub figure: Option<u64>,
    /// `2^(n/2 - 1)`, which reproduces the plotted series.
    pub half_exponent: f64,
}

pub fn lower_bound_curve(n_values: &[u32]) -> Vec<BoundPoint> {
    n_values
        .iter()
        .map(|&n| BoundPoint {
            n,
            proven: lower_bound(n),
            figure: lookup(&FIGURE_BOUNDS, n),
            half_exponent: 2f64.powf(n as f64 / 2.0 - 1.0),
        })
        .collect()
}

fn lookup(table: &[(u32, u64)], n: u32) -> Option<u64> {
    table.iter().find(|(m, _)| *m == n).map(|&(_, v)| v)
}

/// Measured minima against the reference plot for one width.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureComparison {
    pub n: u32,
    pub min_width: usize,
    pub min_size: usize,
    pub reference_width: u64,
    pub reference_size: u64,
    /// Both minima strictly above `ceil(2^(n/4))`.
    pub exceeds_bound: bool,
    /// Both minima within a factor of two of the references.
    pub within_factor_two: bool,
    /// Alternative counting conventions, filled in when the factor-two check fails.
    pub diagnostic: Option<String>,
}

fn within_factor(measured: usize, reference: u64, factor: f64) -> bool {
    let (m, r) = (measured as f64, reference as f64);
    m <= r * factor && m * factor >= r
}

/// Compares an experiment's summary with [`FIGURE_WIDTHS`] and [`FIGURE_SIZES`].
pub fn compare_with_figure(result: &ExperimentResult) -> Result<Vec<FigureComparison>> {
    let mut out = Vec::new();
    for s in &result.summary {
        let (Some(ref_w), Some(ref_s)) = (lookup(&FIGURE_WIDTHS, s.n), lookup(&FIGURE_SIZES, s.n))
        else {
            continue;
        };
        let exceeds_bound = s.min_width as u64 > s.lower_bound && s.min_size as u64 > s.lower_bound;
        let within =
            within_factor(s.min_width, ref_w, 2.0) && within_factor(s.min_size, ref_s, 2.0);
        let diagnostic = if within {
            None
        } else {
            Some(counting_diagnostic(result, s.n)?)
        };
        out.push(FigureComparison {
            n: s.n,
            min_width: s.min_width,
            min_size: s.min_size,
            reference_width: ref_w,
            reference_size: ref_s,
            exceeds_bound,
            within_factor_two: within,
            diagnostic,
        });
    }
    Ok(out)
}

/// Re-measures the smallest diagram of width `n` under other counting conventions.
fn counting_diagnostic(result: &ExperimentResult, n: u32) -> Result<String> {
    let Some(best) = result
        .records
        .iter()
        .filter(|r| r.n == n)
        .min_by_key(|r| (r.size, r.trial))
    else {
        return Ok(format!("n={n}: no completed trials"));
    };
    let params = SaddParams::minimal(n)?;
    let order = VarOrder::new(best.ordering.clone())?;
    let other = match best.target {
        Target::MsbOnly => Target::AllOutputs,
        Target::AllOutputs => Target::MsbOnly,
    };
    let alt = measure(&params, order, other, result.config.node_cap)?;
    Ok(format!(
        "n={n} trial {}: {} size={} width={}; with terminals size={}; {} size={} width={}",
        best.trial,
        best.target,
        best.size,
        best.width,
        best.size + 2,
        other,
        alt.size,
        alt.width
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaMode {
    Exhaustive,
    Sample,
}

impl FromStr for LemmaMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exhaustive" => Ok(LemmaMode::Exhaustive),
            "sample" => Ok(LemmaMode::Sample),
            other => Err(HarnessError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// The individual claims checked per partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    /// `Σ_p |Split_p| >= n² / 4`.
    SplitSum,
    /// The best shift splits at least `n / 4` aligned pairs.
    ShiftBound,
    /// The family has exactly `2^|Split_p|` members.
    MemberCount,
    /// The family is a fooling set for `sAdd^n_{n-1}` with every member evaluating to 1.
    FoolingProperty,
}

/// A partition that broke one of the lemma's claims.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaFailure {
    pub partition: String,
    pub claim: Claim,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: u32,
    pub mode: LemmaMode,
    pub partitions_checked: usize,
    pub min_split: usize,
    pub min_split_sum: usize,
    /// Partitions whose fooling set was verified on a random subset of members.
    pub subsampled: usize,
    pub member_limit: u64,
    pub failures: Vec<LemmaFailure>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, claim: Claim) -> impl Iterator<Item = &LemmaFailure> {
        self.failures.iter().filter(move |f| f.claim == claim)
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "mode {:?}", self.mode)?;
        writeln!(f, "partitions {}", self.partitions_checked)?;
        writeln!(f, "min_split {}", self.min_split)?;
        writeln!(f, "min_split_sum {}", self.min_split_sum)?;
        writeln!(
            f,
            "subsampled {} (more than {} members)",
            self.subsampled, self.member_limit
        )?;
        for claim in [
            Claim::SplitSum,
            Claim::ShiftBound,
            Claim::MemberCount,
            Claim::FoolingProperty,
        ] {
            writeln!(f, "failures {claim:?} {}", self.failures_of(claim).count())?;
        }
        for fail in &self.failures {
            writeln!(f, "  {:?} {}: {}", fail.claim, fail.partition, fail.detail)?;
        }
        Ok(())
    }
}

struct PartitionCheck {
    split: usize,
    split_sum: usize,
    subsampled: bool,
    failures: Vec<(Claim, String)>,
}

fn check_partition(part: &BalancedPartition, seed: u64) -> Result<PartitionCheck> {
    let n = part.n();
    let sum = fooling::sum_split_lower_bound(part);
    let fs = fooling::build_fooling_set(part)?;
    let choice = fs.shift().expect("constructed set");
    let split = choice.report.split_len();
    let mut failures = Vec::new();
    if !sum.holds {
        failures.push((
            Claim::SplitSum,
            format!("sum {} below {}", sum.sum, sum.bound),
        ));
    }
    if !choice.meets_bound {
        failures.push((Claim::ShiftBound, format!("best split {split} below n/4")));
    }
    if fs.len() != 1u64 << split {
        failures.push((
            Claim::MemberCount,
            format!("{} members, split {split}", fs.len()),
        ));
    }
    let verdict =
        fooling::verify_fooling_set_sampled(&SaddMsbOracle { n }, &fs, MEMBER_CHECK_LIMIT, seed)?;
    if !verdict.valid {
        failures.push((
            Claim::FoolingProperty,
            format!("witness {:?}", verdict.witness),
        ));
    } else if verdict.diagonal.is_some_and(|d| !d) {
        failures.push((Claim::FoolingProperty, "members evaluate to 0".into()));
    }
    Ok(PartitionCheck {
        split,
        split_sum: sum.sum,
        subsampled: verdict.subsampled,
        failures,
    })
}

/// Checks the construction over every (or a sample of) balanced partition at `w = 1/2`.
pub fn verify_lemma(n: u32, mode: LemmaMode, samples: usize, seed: u64) -> Result<LemmaReport> {
    let partitions: Vec<BalancedPartition> = match mode {
        LemmaMode::Exhaustive => {
            if n > EXHAUSTIVE_LEMMA_LIMIT {
                return Err(HarnessError::Config(format!(
                    "exhaustive mode is limited to n <= {EXHAUSTIVE_LEMMA_LIMIT}"
                )));
            }
            fooling::enumerate_partitions(n, fooling::half())?.collect()
        }
        LemmaMode::Sample => {
            if samples == 0 {
                return Err(HarnessError::Config("samples must be at least 1".into()));
            }
            fooling::sample_partitions(n, fooling::half(), samples, seed)?.collect()
        }
    };
    let checks: Vec<PartitionCheck> = partitions
        .par_iter()
        .enumerate()
        .map(|(i, part)| check_partition(part, mix(seed ^ i as u64)))
        .collect::<Result<_>>()?;
    let failures = partitions
        .iter()
        .zip(&checks)
        .flat_map(|(part, c)| {
            c.failures.iter().map(|(claim, detail)| LemmaFailure {
                partition: part.to_spec(),
                claim: *claim,
                detail: detail.clone(),
            })
        })
        .collect();
    Ok(LemmaReport {
        n,
        mode,
        partitions_checked: partitions.len(),
        min_split: checks.iter().map(|c| c.split).min().unwrap_or(0),
        min_split_sum: checks.iter().map(|c| c.split_sum).min().unwrap_or(0),
        subsampled: checks.iter().filter(|c| c.subsampled).count(),
        member_limit: MEMBER_CHECK_LIMIT,
        failures,
    })
}

pub const RECORDS_HEADER: &str = "n,trial,target,seed,size,width";
pub const SUMMARY_HEADER: &str = "n,min_size,min_width,lower_bound";

pub fn records_csv(records: &[ExperimentRecord]) -> String {
    let mut out = format!("{RECORDS_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.trial, r.target, r.seed, r.size, r.width
        ));
    }
    out
}

pub fn summary_csv(summary: &[Summary]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for s in summary {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.n, s.min_size, s.min_width, s.lower_bound
        ));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)
}

/// Writes the per-trial CSV.
pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    write_file(path, &records_csv(records))
}

/// Writes the per-width summary CSV.
pub fn emit_summary_csv(summary: &[Summary], path: &Path) -> Result<()> {
    write_file(path, &summary_csv(summary))
}

/// Parses an order spec: `canonical`, `random:<seed>` or a comma-separated
/// variable list covering every variable.
pub fn parse_order(params: &SaddParams, spec: &str) -> Result<VarOrder> {
    let spec = spec.trim();
    if spec == "canonical" {
        return Ok(params.canonical_order());
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed = seed
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad seed in `{spec}`")))?;
        return Ok(trial_order(params, seed));
    }
    let vars = spec
        .split(',')
        .map(|s| s.parse::<VarId>())
        .collect::<Result<Vec<_>, _>>()?;
    if vars.len() != params.num_vars() || vars.iter().any(|&v| !params.contains(v)) {
        return Err(HarnessError::Config(format!(
            "order must list each of the {} variables exactly once",
            params.num_vars()
        )));
    }
    Ok(VarOrder::new(vars)?)
}
