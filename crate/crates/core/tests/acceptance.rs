//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p sadd-bdd --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sadd_bdd::bdd::{Manager, VarId};
use sadd_bdd::fooling::{
    self, build_fooling_set, enumerate_partitions, half, nodes_below_boundary, separated_order,
    split_pairs, BalancedPartition, FoolingSet, PartialAssignment,
};
use sadd_bdd::harness::{
    self, Claim, ExperimentConfig, HarnessError, LemmaMode, LemmaReport, Target,
};
use sadd_bdd::sadd::{self, build_sadd, SaddInput, SaddParams};

/// Operand widths swept exhaustively for the construction checks.
const EXHAUSTIVE_N: [u32; 5] = [2, 3, 4, 5, 6];
/// Operand widths sampled for the construction checks, and the sample count.
const SAMPLED_N: [u32; 2] = [8, 16];
const LEMMA_SAMPLES: usize = 500;
const LEMMA_SEED: u64 = 2;
/// Experiment widths, trials and seed for the width and size checks.
const EXPERIMENT_N: [u32; 4] = [2, 4, 8, 16];
const EXPERIMENT_TRIALS: usize = 50;
const EXPERIMENT_SEED: u64 = 0;
/// Separated orderings drawn per partition for the boundary check.
const SEPARATED_ORDERS: usize = 8;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    for n in 1..=5 {
        let params = SaddParams::minimal(n).unwrap();
        let mut mgr = Manager::new(params.canonical_order());
        let f = build_sadd(&mut mgr, &params).unwrap();
        for a in 0..1u64 << n {
            for b in 0..1u64 << n {
                for d in 0..1u64 << params.d_width() {
                    let expected = sadd::oracle_sadd(&params, a, b, d).unwrap();
                    let got = f.eval_value(&mgr, params.input(a, b, d).unwrap()).unwrap();
                    checked += 1;
                    if got != expected {
                        mismatches.push(format!("n={n} a={a} b={b} d={d}: {got} != {expected}"));
                    }
                }
            }
        }
    }
    let mut out = Outcome::new(
        mismatches.is_empty(),
        format!("{checked} inputs, {} mismatches", mismatches.len()),
    );
    for m in mismatches.into_iter().take(5) {
        out = out.detail(m);
    }
    out
}

fn lemma_reports() -> Vec<LemmaReport> {
    let exhaustive = EXHAUSTIVE_N
        .iter()
        .map(|&n| harness::verify_lemma(n, LemmaMode::Exhaustive, 0, LEMMA_SEED));
    let sampled = SAMPLED_N
        .iter()
        .map(|&n| harness::verify_lemma(n, LemmaMode::Sample, LEMMA_SAMPLES, LEMMA_SEED));
    exhaustive.chain(sampled).map(Result::unwrap).collect()
}

fn construction_validity(reports: &[LemmaReport]) -> Outcome {
    let claims = [
        Claim::ShiftBound,
        Claim::MemberCount,
        Claim::FoolingProperty,
    ];
    let failures: Vec<_> = reports
        .iter()
        .flat_map(|r| {
            claims
                .iter()
                .flat_map(move |&c| r.failures_of(c).map(move |f| (r.n, f)))
        })
        .collect();
    let partitions: usize = reports.iter().map(|r| r.partitions_checked).sum();
    let mut out = Outcome::new(
        failures.is_empty(),
        format!("{partitions} partitions, {} failures", failures.len()),
    );
    for r in reports {
        out = out.detail(format!(
            "n={:>2} {:?}: {} partitions, min split {}, {} sub-sampled to {} members",
            r.n, r.mode, r.partitions_checked, r.min_split, r.subsampled, r.member_limit
        ));
    }
    for (n, f) in failures.iter().take(5) {
        out = out.detail(format!("n={n} {} {:?}: {}", f.partition, f.claim, f.detail));
    }
    out
}

fn split_sum_bound(reports: &[LemmaReport]) -> Outcome {
    let mut violations = 0;
    let mut partitions = 0;
    let mut details = Vec::new();
    for r in reports {
        let bad: Vec<_> = r.failures_of(Claim::SplitSum).collect();
        violations += bad.len();
        partitions += r.partitions_checked;
        details.push(format!(
            "n={:>2}: {} of {} below n^2/4 = {}, min sum {}{}",
            r.n,
            bad.len(),
            r.partitions_checked,
            Ratio::new(u64::from(r.n * r.n), 4),
            r.min_split_sum,
            bad.first()
                .map(|f| format!(", e.g. {}", f.partition))
                .unwrap_or_default()
        ));
    }
    let mut out = Outcome::new(
        violations == 0,
        format!("{violations} of {partitions} partitions below the bound"),
    );
    out.details = details;
    out
}

fn width_bound() -> Outcome {
    let config = ExperimentConfig::new(
        EXPERIMENT_N.to_vec(),
        EXPERIMENT_TRIALS,
        EXPERIMENT_SEED,
        Target::MsbOnly,
    );
    let mut out = match harness::run_experiment(&config) {
        Ok(result) => {
            let violations = result
                .records
                .iter()
                .filter(|r| (r.width as u64) < harness::lower_bound(r.n))
                .count();
            let capped: usize = result.summary.iter().map(|s| s.trials_capped).sum();
            let mut out = Outcome::new(
                violations == 0,
                format!(
                    "{} orderings, {violations} below ceil(2^(n/4)), {capped} capped",
                    result.records.len()
                ),
            );
            for s in &result.summary {
                out = out.detail(format!(
                    "n={:>2} msb_only min width {} >= {}",
                    s.n, s.min_width, s.lower_bound
                ));
            }
            out
        }
        Err(e @ HarnessError::BoundViolated { .. }) => Outcome::new(false, e.to_string()),
        Err(e) => panic!("{e}"),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(EXPERIMENT_SEED);
    let mut orders = 0;
    let mut short = Vec::new();
    for n in 2..=4 {
        let params = SaddParams::minimal(n).unwrap();
        for part in enumerate_partitions(n, half()).unwrap() {
            let fs = build_fooling_set(&part).unwrap();
            for _ in 0..SEPARATED_ORDERS {
                let mut mgr = Manager::new(separated_order(&part, params.d_width(), &mut rng));
                let f = build_sadd(&mut mgr, &params).unwrap();
                let msb = f.output_bit(n as usize - 1).unwrap();
                let below = nodes_below_boundary(&mgr, msb, &part).unwrap();
                orders += 1;
                if (below as u64) < fs.len() {
                    short.push(format!("n={n} {}: {below} < {}", part.to_spec(), fs.len()));
                }
            }
        }
    }
    out.pass &= short.is_empty();
    out.summary += &format!(
        "; {orders} separated orderings, {} below the fooling-set size",
        short.len()
    );
    out.details.extend(short.into_iter().take(5));
    out
}

fn goldens() -> Outcome {
    let mut failed = Vec::new();

    // f = a1 ^ b1 ^ (a0 & b0) with L = {a0, b0}
    let part = BalancedPartition::new(2, [VarId::a(0), VarId::b(0)], half()).unwrap();
    let assign = |x: bool, y: bool, lo: u32| {
        PartialAssignment::new()
            .with(VarId::a(lo), x)
            .with(VarId::b(lo), y)
    };
    let (l1, l2) = (assign(false, false, 0), assign(true, true, 0));
    let (r1, r2) = (assign(false, true, 1), assign(false, false, 1));
    let fs = FoolingSet::explicit(part, 0, 0, vec![(l1, r1), (l2, r2)]).unwrap();
    let f = |x: SaddInput| (x.a >> 1 ^ x.b >> 1 ^ (x.a & x.b)) & 1 == 1;
    let at = |l, r| f(fs.combine(l, r).unwrap()) as u8;
    let evals = [at(&l1, &r1), at(&l2, &r1), at(&l2, &r2), at(&l1, &r2)];
    if evals != [1, 0, 1, 0] {
        failed.push(format!("two-pair evaluations {evals:?}"));
    }

    let part = BalancedPartition::new(2, [VarId::a(1), VarId::b(1)], half()).unwrap();
    let split = split_pairs(&part, 1).unwrap().split;
    if split != [(0, 1)] {
        failed.push(format!("Split_1 = {split:?}"));
    }

    let fs = build_fooling_set(&part).unwrap();
    let (left, right) = ([VarId::a(1), VarId::b(1)], [VarId::a(0), VarId::b(0)]);
    let pairs: Vec<(String, String)> = fs
        .pairs()
        .map(|(l, r)| (l.render(&left), r.render(&right)))
        .collect();
    let expected = [("10", "10"), ("11", "00")].map(|(l, r)| (l.to_string(), r.to_string()));
    if pairs != expected {
        failed.push(format!("fooling set {pairs:?}"));
    }
    let verdict = fooling::verify_fooling_set(&fooling::SaddMsbOracle { n: 2 }, &fs).unwrap();
    if !verdict.valid {
        failed.push(format!("fooling set rejected: {:?}", verdict.witness));
    }

    let mut out = Outcome::new(
        failed.is_empty(),
        "evaluations 1,0,1,0; Split_1 = {(a0,b1)}; set {(10,10),(11,00)}",
    );
    out.details = failed;
    out
}

fn experiment_reproduction() -> Outcome {
    let config = ExperimentConfig::new(
        EXPERIMENT_N.to_vec(),
        EXPERIMENT_TRIALS,
        EXPERIMENT_SEED,
        Target::AllOutputs,
    );
    let result = harness::run_experiment(&config).unwrap();
    let comparisons = harness::compare_with_figure(&result).unwrap();
    let above = comparisons.iter().all(|c| c.exceeds_bound);
    let outside: Vec<u32> = comparisons
        .iter()
        .filter(|c| !c.within_factor_two)
        .map(|c| c.n)
        .collect();
    let diagnosed = comparisons
        .iter()
        .all(|c| c.within_factor_two || c.diagnostic.is_some());
    let summary = if outside.is_empty() {
        "(a) minima above ceil(2^(n/4)); (b) all within x2 of the plot".to_string()
    } else {
        format!(
            "(a) minima above ceil(2^(n/4)): {above}; (b) SOFT-FAIL outside x2 at n={outside:?}, \
             counting-convention diagnostic emitted"
        )
    };
    let mut out = Outcome::new(above && diagnosed, summary);
    for c in &comparisons {
        out = out.detail(format!(
            "n={:>2} width {} (plot {}) size {} (plot {})",
            c.n, c.min_width, c.reference_width, c.min_size, c.reference_size
        ));
        if let Some(d) = &c.diagnostic {
            out = out.detail(format!("      {d}"));
        }
    }
    out
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(format!("{name}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_sadd-bdd"))
            .args([
                "experiment",
                "--n",
                "2,4,8,16",
                "--trials",
                "5",
                "--seed",
                "7",
            ])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let summary = dir.path().join(format!("{name}.summary.csv"));
        (std::fs::read(out).unwrap(), std::fs::read(summary).unwrap())
    };
    let (rows1, sum1) = run("first");
    let (rows2, sum2) = run("second");
    let same = rows1 == rows2 && sum1 == sum2 && !rows1.is_empty();
    Outcome::new(
        same,
        format!(
            "two CLI runs: {} + {} bytes, identical: {same}",
            rows1.len(),
            sum1.len()
        ),
    )
}

fn main() -> ExitCode {
    let reports = std::cell::OnceCell::new();
    let lemma = || reports.get_or_init(lemma_reports);
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence, n=1..5", Box::new(oracle_equivalence)),
        (
            "fooling-set construction",
            Box::new(|| construction_validity(lemma())),
        ),
        (
            "split-sum bound n^2/4",
            Box::new(|| split_sum_bound(lemma())),
        ),
        ("width lower bound", Box::new(width_bound)),
        ("worked-example goldens", Box::new(goldens)),
        (
            "random-ordering experiment",
            Box::new(experiment_reproduction),
        ),
        ("determinism", Box::new(determinism)),
    ];

    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {} {name}: {} [{:.1}s]",
            i + 1,
            outcome.summary,
            start.elapsed().as_secs_f64()
        );
        for d in &outcome.details {
            println!("       {d}");
        }
        failures += usize::from(!outcome.pass);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
