//! Balanced partitions, shift-aligned split pairs and fooling sets for the
//! most significant sum bit of `A + (B >> D)`.
//!
//! The key variables are `Y = A ∪ B`; shift bits never belong to a partition
//! and are fixed by a fooling set's context instead. For a partition `(L, R)`
//! the construction picks the shift `p` whose aligned pairs `(a_i, b_{i+p})`
//! cross the partition most often, embeds `U = a_0..a_{m-1}` and
//! `V = b_p..b_{n-1}` (with `m = n - p`), pins every other input, and lets the
//! crossing pairs range over all complementary values. Every member then sums
//! to `2^n - 1`, while any two members cross into a carry or a kill.
//!
//! Indices are 0-based and LSB-first throughout. Text renderings list
//! variables most significant first, `A` before `B` before `D`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::bdd::{BddError, Manager, NodeRef, VarId, VarKind};
use crate::sadd::{self, SaddError, SaddInput, MAX_WIDTH};

/// Largest `n` accepted by [`enumerate_partitions`].
pub const ENUMERATION_LIMIT: u32 = 8;

/// Largest `|R| + d_width` accepted by [`subfunction_count`].
pub const SUBFUNCTION_LIMIT: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoolingError {
    #[error("operand width must be in 1..={MAX_WIDTH}, got {0}")]
    BadWidth(u32),
    #[error("balance weight {0} is outside [0, 1]")]
    BadOmega(Ratio<u64>),
    #[error("cannot parse balance weight `{0}`")]
    BadOmegaText(String),
    #[error("{0} is not a key variable for n={1}")]
    NotKeyVariable(VarId, u32),
    #[error("|L| = {left} violates the balance window [{lo}, {hi}]")]
    NotBalanced { left: usize, lo: u64, hi: u64 },
    #[error("exhaustive enumeration limited to n <= {limit}, got {n}; use sampling")]
    TooLarge { n: u32, limit: u32 },
    #[error("shift {p} out of range for n={n}")]
    ShiftOutOfRange { p: u32, n: u32 },
    #[error("assignment support does not match its partition side at {0}")]
    SupportMismatch(VarId),
    #[error("assignment does not cover variable {0}")]
    IncompleteAssignment(VarId),
    #[error("assignment lies outside the constrained family: {0}")]
    NotApplicable(String),
    #[error("subfunction table over {vars} variables exceeds the limit of {limit}")]
    GuardExceeded { vars: u32, limit: u32 },
    #[error("variable order does not place all of L above all of R")]
    NotSeparated,
    #[error("bad partition spec `{0}`")]
    BadSpec(String),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Sadd(#[from] SaddError),
}

pub type Result<T, E = FoolingError> = std::result::Result<T, E>;

/// Parses `1/2`, `0.5`, `1` and similar.
pub fn parse_omega(text: &str) -> Result<Ratio<u64>> {
    let text = text.trim();
    let bad = || FoolingError::BadOmegaText(text.to_string());
    let omega = if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num: u64 = frac.parse().map_err(|_| bad())?;
        Ratio::new(int * den + num, den)
    } else {
        text.parse::<Ratio<u64>>().map_err(|_| bad())?
    };
    if omega > Ratio::from_integer(1) {
        return Err(FoolingError::BadOmega(omega));
    }
    Ok(omega)
}

/// The usual balance weight.
pub fn half() -> Ratio<u64> {
    Ratio::new(1, 2)
}

/// Sort key for rendering: register order, most significant bit first.
fn text_key(v: &VarId) -> (VarKind, Reverse<u32>) {
    (v.kind, Reverse(v.index))
}

fn check_width(n: u32) -> Result<()> {
    if n == 0 || n > MAX_WIDTH {
        return Err(FoolingError::BadWidth(n));
    }
    Ok(())
}

/// The admissible `|L|` range `[floor(|Y| w), ceil(|Y| w)]`.
fn balance_window(n: u32, omega: Ratio<u64>) -> (u64, u64) {
    let target = Ratio::from_integer(2 * n as u64) * omega;
    (target.floor().to_integer(), target.ceil().to_integer())
}

/// A split `(L, R)` of the key variables `A ∪ B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedPartition {
    n: u32,
    omega: Ratio<u64>,
    left_a: u64,
    left_b: u64,
}

impl BalancedPartition {
    /// Partition whose left side is exactly `left`; all other key variables go right.
    pub fn new(n: u32, left: impl IntoIterator<Item = VarId>, omega: Ratio<u64>) -> Result<Self> {
        check_width(n)?;
        if omega > Ratio::from_integer(1) {
            return Err(FoolingError::BadOmega(omega));
        }
        let (mut left_a, mut left_b) = (0u64, 0u64);
        for v in left {
            let mask = match v.kind {
                VarKind::A if v.index < n => &mut left_a,
                VarKind::B if v.index < n => &mut left_b,
                _ => return Err(FoolingError::NotKeyVariable(v, n)),
            };
            *mask |= 1 << v.index;
        }
        let part = Self {
            n,
            omega,
            left_a,
            left_b,
        };
        let (lo, hi) = balance_window(n, omega);
        let left = part.left_len();
        if (left as u64) < lo || (left as u64) > hi {
            return Err(FoolingError::NotBalanced { left, lo, hi });
        }
        Ok(part)
    }

    /// Parses `L=a1,b0,...` (the `L=` prefix is optional).
    pub fn from_spec(n: u32, spec: &str, omega: Ratio<u64>) -> Result<Self> {
        let body = spec.trim();
        let body = body
            .strip_prefix("L=")
            .or_else(|| body.strip_prefix("l="))
            .unwrap_or(body);
        let mut left = Vec::new();
        for name in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let v: VarId = name
                .parse()
                .map_err(|_| FoolingError::BadSpec(spec.to_string()))?;
            if left.contains(&v) {
                return Err(FoolingError::BadSpec(spec.to_string()));
            }
            left.push(v);
        }
        Self::new(n, left, omega)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn omega(&self) -> Ratio<u64> {
        self.omega
    }

    /// Bit mask of `A` indices on the left side.
    pub fn left_a_mask(&self) -> u64 {
        self.left_a
    }

    /// Bit mask of `B` indices on the left side.
    pub fn left_b_mask(&self) -> u64 {
        self.left_b
    }

    pub fn left_len(&self) -> usize {
        (self.left_a.count_ones() + self.left_b.count_ones()) as usize
    }

    pub fn right_len(&self) -> usize {
        2 * self.n as usize - self.left_len()
    }

    /// Side of a key variable: `Some(true)` for L, `Some(false)` for R, `None`
    /// for shift bits and out-of-range indices.
    pub fn side(&self, v: VarId) -> Option<bool> {
        if v.index >= self.n {
            return None;
        }
        match v.kind {
            VarKind::A => Some(self.left_a >> v.index & 1 == 1),
            VarKind::B => Some(self.left_b >> v.index & 1 == 1),
            VarKind::D => None,
        }
    }

    pub fn is_left(&self, v: VarId) -> bool {
        self.side(v) == Some(true)
    }

    pub fn is_right(&self, v: VarId) -> bool {
        self.side(v) == Some(false)
    }

    fn key_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.n).map(VarId::a).chain((0..self.n).map(VarId::b))
    }

    pub fn left(&self) -> BTreeSet<VarId> {
        self.key_vars().filter(|&v| self.is_left(v)).collect()
    }

    pub fn right(&self) -> BTreeSet<VarId> {
        self.key_vars().filter(|&v| self.is_right(v)).collect()
    }

    /// `L=...` spec accepted by [`BalancedPartition::from_spec`].
    pub fn to_spec(&self) -> String {
        let mut left: Vec<_> = self.left().into_iter().collect();
        left.sort_by_key(text_key);
        let names: Vec<String> = left.iter().map(ToString::to_string).collect();
        format!("L={}", names.join(","))
    }
}

/// Every partition of `A ∪ B` satisfying the balance window, in mask order.
pub fn enumerate_partitions(
    n: u32,
    omega: Ratio<u64>,
) -> Result<impl Iterator<Item = BalancedPartition>> {
    check_width(n)?;
    if n > ENUMERATION_LIMIT {
        return Err(FoolingError::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    if omega > Ratio::from_integer(1) {
        return Err(FoolingError::BadOmega(omega));
    }
    let (lo, hi) = balance_window(n, omega);
    let low_mask = (1u64 << n) - 1;
    Ok((0u64..1 << (2 * n)).filter_map(move |mask| {
        let size = mask.count_ones() as u64;
        (lo..=hi).contains(&size).then(|| BalancedPartition {
            n,
            omega,
            left_a: mask & low_mask,
            left_b: mask >> n,
        })
    }))
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `count` partitions drawn uniformly from all balanced ones (ChaCha8, seeded).
pub fn sample_partitions(
    n: u32,
    omega: Ratio<u64>,
    count: usize,
    seed: u64,
) -> Result<impl Iterator<Item = BalancedPartition>> {
    check_width(n)?;
    if omega > Ratio::from_integer(1) {
        return Err(FoolingError::BadOmega(omega));
    }
    let (lo, hi) = balance_window(n, omega);
    let total_vars = 2 * n as u64;
    let sizes: Vec<(u64, u128)> = (lo..=hi).map(|k| (k, binomial(total_vars, k))).collect();
    let total: u128 = sizes.iter().map(|s| s.1).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(move |_| {
        let mut ticket = rng.random_range(0..total);
        let mut size = sizes[0].0;
        for &(k, weight) in &sizes {
            if ticket < weight {
                size = k;
                break;
            }
            ticket -= weight;
        }
        let (mut left_a, mut left_b) = (0u64, 0u64);
        for i in index::sample(&mut rng, total_vars as usize, size as usize) {
            let i = i as u32;
            if i < n {
                left_a |= 1 << i;
            } else {
                left_b |= 1 << (i - n);
            }
        }
        BalancedPartition {
            n,
            omega,
            left_a,
            left_b,
        }
    }))
}

/// Aligned pairs `(i, i + p)` meaning `(a_i, b_{i+p})`, for `0 <= i <= n-1-p`.
pub fn args_pairs(n: u32, p: u32) -> Result<Vec<(u32, u32)>> {
    if p > n {
        return Err(FoolingError::ShiftOutOfRange { p, n });
    }
    Ok((0..n - p).map(|i| (i, i + p)).collect())
}

/// Aligned pairs for one shift and the subset crossing the partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub p: u32,
    pub args: Vec<(u32, u32)>,
    pub split: Vec<(u32, u32)>,
    pub a_left: usize,
    pub a_right: usize,
    pub b_left: usize,
    pub b_right: usize,
}

impl SplitReport {
    pub fn split_len(&self) -> usize {
        self.split.len()
    }

    /// Line-oriented rendering; pairs are written `a<i>:b<j>`.
    pub fn to_text(&self) -> String {
        let pairs = |list: &[(u32, u32)]| {
            list.iter()
                .map(|(i, j)| format!("a{i}:b{j}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "p {}", self.p);
        let _ = writeln!(
            out,
            "sizes A_L={} A_R={} B_L={} B_R={}",
            self.a_left, self.a_right, self.b_left, self.b_right
        );
        let _ = writeln!(out, "args {}", pairs(&self.args));
        let _ = writeln!(out, "split {}", pairs(&self.split));
        out.lines()
            .map(str::trim_end)
            .map(|l| format!("{l}\n"))
            .collect()
    }
}

/// Restricts [`args_pairs`] to pairs with one member on each side.
pub fn split_pairs(partition: &BalancedPartition, p: u32) -> Result<SplitReport> {
    let args = args_pairs(partition.n, p)?;
    let split = args
        .iter()
        .copied()
        .filter(|&(i, j)| partition.is_left(VarId::a(i)) != partition.is_left(VarId::b(j)))
        .collect();
    let a_left = partition.left_a.count_ones() as usize;
    let b_left = partition.left_b.count_ones() as usize;
    let n = partition.n as usize;
    Ok(SplitReport {
        p,
        args,
        split,
        a_left,
        a_right: n - a_left,
        b_left,
        b_right: n - b_left,
    })
}

/// `Σ_p |Split_p|` against `n² / 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitSum {
    pub sum: usize,
    pub bound: Ratio<u64>,
    pub holds: bool,
}

pub fn sum_split_lower_bound(partition: &BalancedPartition) -> SplitSum {
    let n = partition.n;
    let sum = (0..=n)
        .map(|p| split_pairs(partition, p).map_or(0, |r| r.split_len()))
        .sum::<usize>();
    let bound = Ratio::new((n as u64).pow(2), 4);
    SplitSum {
        sum,
        bound,
        holds: Ratio::from_integer(sum as u64) >= bound,
    }
}

/// The selected shift and whether `|Split_p| >= ceil(n/4)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftChoice {
    pub p: u32,
    pub report: SplitReport,
    pub meets_bound: bool,
}

/// Shift with the largest split; the smallest such `p` on ties.
pub fn choose_p(partition: &BalancedPartition) -> ShiftChoice {
    let n = partition.n;
    let mut best: Option<SplitReport> = None;
    for p in 0..=n {
        let report = split_pairs(partition, p).expect("p <= n");
        if best
            .as_ref()
            .is_none_or(|b| report.split_len() > b.split_len())
        {
            best = Some(report);
        }
    }
    let report = best.expect("at least one shift");
    let meets_bound = 4 * report.split_len() as u64 >= n as u64;
    ShiftChoice {
        p: report.p,
        report,
        meets_bound,
    }
}

/// Bits fixed on a declared support, stored as register masks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    support: SaddInput,
    values: SaddInput,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: VarId, bit: bool) {
        self.support.set(v, true);
        self.values.set(v, bit);
    }

    pub fn with(mut self, v: VarId, bit: bool) -> Self {
        self.set(v, bit);
        self
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.support.get(v).then(|| self.values.get(v))
    }

    pub fn covers(&self, v: VarId) -> bool {
        self.support.get(v)
    }

    /// Support masks per register.
    pub fn support(&self) -> SaddInput {
        self.support
    }

    /// Values, zero outside the support.
    pub fn values(&self) -> SaddInput {
        self.values
    }

    pub fn len(&self) -> usize {
        let s = self.support;
        (s.a.count_ones() + s.b.count_ones() + s.d.count_ones()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bits of the given variables, written as a `0`/`1` string.
    pub fn render(&self, vars: &[VarId]) -> String {
        vars.iter()
            .map(|&v| match self.get(v) {
                Some(true) => '1',
                Some(false) => '0',
                None => '-',
            })
            .collect()
    }
}

/// Disjoint union of partial assignments.
fn union(parts: &[&PartialAssignment]) -> PartialAssignment {
    let mut out = PartialAssignment::default();
    for p in parts {
        out.support.a |= p.support.a;
        out.support.b |= p.support.b;
        out.support.d |= p.support.d;
        out.values.a |= p.values.a;
        out.values.b |= p.values.b;
        out.values.d |= p.values.d;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PairSource {
    Explicit(Vec<(PartialAssignment, PartialAssignment)>),
    /// `base_l`/`base_r` hold the pinned bits; each `(left, right)` variable
    /// pair takes complementary values.
    Alternating {
        base_l: PartialAssignment,
        base_r: PartialAssignment,
        crossing: Vec<(VarId, VarId)>,
    },
}

/// A family of `(l, r)` pairs over a partition, plus the bits every member
/// shares outside `L ∪ R` (the shift register).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoolingSet {
    partition: BalancedPartition,
    d_width: u32,
    shift_context: PartialAssignment,
    context: PartialAssignment,
    choice: Option<ShiftChoice>,
    pairs: PairSource,
}

impl FoolingSet {
    /// Wraps explicitly listed pairs; `shift` fixes the `D` register.
    pub fn explicit(
        partition: BalancedPartition,
        d_width: u32,
        shift: u64,
        pairs: Vec<(PartialAssignment, PartialAssignment)>,
    ) -> Result<Self> {
        for (l, r) in &pairs {
            for v in partition.key_vars() {
                let expected_left = partition.is_left(v);
                if l.covers(v) != expected_left || r.covers(v) == expected_left {
                    return Err(FoolingError::SupportMismatch(v));
                }
            }
        }
        let shift_context = shift_assignment(d_width, shift);
        Ok(Self {
            partition,
            d_width,
            shift_context,
            context: shift_context,
            choice: None,
            pairs: PairSource::Explicit(pairs),
        })
    }

    pub fn partition(&self) -> &BalancedPartition {
        &self.partition
    }

    pub fn d_width(&self) -> u32 {
        self.d_width
    }

    /// Selected shift, for constructed sets.
    pub fn shift(&self) -> Option<&ShiftChoice> {
        self.choice.as_ref()
    }

    /// Every pinned bit, shift register included.
    pub fn context(&self) -> &PartialAssignment {
        &self.context
    }

    pub fn len(&self) -> u64 {
        match &self.pairs {
            PairSource::Explicit(p) => p.len() as u64,
            PairSource::Alternating { crossing, .. } => 1u64 << crossing.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th pair; constructed sets are ordered by `l` read as a
    /// binary string in rendering order.
    pub fn pair(&self, index: u64) -> Option<(PartialAssignment, PartialAssignment)> {
        if index >= self.len() {
            return None;
        }
        match &self.pairs {
            PairSource::Explicit(p) => p.get(index as usize).copied(),
            PairSource::Alternating {
                base_l,
                base_r,
                crossing,
            } => {
                let (mut l, mut r) = (*base_l, *base_r);
                let k = crossing.len();
                for (j, &(lv, rv)) in crossing.iter().enumerate() {
                    let bit = index >> (k - 1 - j) & 1 == 1;
                    l.set(lv, bit);
                    r.set(rv, !bit);
                }
                Some((l, r))
            }
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (PartialAssignment, PartialAssignment)> + '_ {
        (0..self.len()).filter_map(|i| self.pair(i))
    }

    /// Total input `l · r` with the shift register taken from the context.
    pub fn combine(&self, l: &PartialAssignment, r: &PartialAssignment) -> Result<SaddInput> {
        let total = union(&[l, r, &self.shift_context]);
        for v in self.partition.key_vars() {
            if !total.covers(v) {
                return Err(FoolingError::IncompleteAssignment(v));
            }
        }
        for i in 0..self.d_width {
            if !total.covers(VarId::d(i)) {
                return Err(FoolingError::IncompleteAssignment(VarId::d(i)));
            }
        }
        Ok(total.values)
    }

    /// Header, variable lists, then one `l r` line per pair.
    pub fn to_text(&self) -> String {
        let mut left: Vec<_> = self.partition.left().into_iter().collect();
        let mut right: Vec<_> = self.partition.right().into_iter().collect();
        left.sort_by_key(text_key);
        right.sort_by_key(text_key);
        let d_vars: Vec<_> = (0..self.d_width).rev().map(VarId::d).collect();
        let names = |vs: &[VarId]| {
            vs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.partition.n);
        let _ = writeln!(out, "d_width {}", self.d_width);
        if let Some(choice) = &self.choice {
            let _ = writeln!(out, "p {}", choice.p);
            let _ = writeln!(out, "split {}", choice.report.split_len());
        }
        let _ = writeln!(out, "L {}", names(&left));
        let _ = writeln!(out, "R {}", names(&right));
        let _ = writeln!(out, "D {}", self.shift_context.render(&d_vars));
        let _ = writeln!(out, "pairs {}", self.len());
        for (l, r) in self.pairs() {
            let _ = writeln!(out, "{} {}", l.render(&left), r.render(&right));
        }
        out.lines()
            .map(str::trim_end)
            .map(|l| format!("{l}\n"))
            .collect()
    }
}

fn shift_assignment(d_width: u32, shift: u64) -> PartialAssignment {
    let mut out = PartialAssignment::new();
    for i in 0..d_width {
        out.set(VarId::d(i), i < 64 && shift >> i & 1 == 1);
    }
    out
}

/// Builds the fooling set for `sAdd^n_{n-1}` under `partition`.
///
/// Pinned bits: `a_i = 1` for `i >= m`, `b_i = 0` for `i < p`, `D = p`, and
/// `(u_i, v_i) = (1, 0)` for aligned pairs that do not cross. Crossing pairs
/// take every complementary assignment.
pub fn build_fooling_set(partition: &BalancedPartition) -> Result<FoolingSet> {
    let n = partition.n;
    let choice = choose_p(partition);
    let p = choice.p;
    let m = n - p;
    let d_width = sadd::min_shift_width(n);

    let mut pinned = PartialAssignment::new();
    for i in m..n {
        pinned.set(VarId::a(i), true);
    }
    for i in 0..p {
        pinned.set(VarId::b(i), false);
    }
    let mut crossing = Vec::new();
    for &(i, j) in &choice.report.args {
        let (u, v) = (VarId::a(i), VarId::b(j));
        if choice.report.split.contains(&(i, j)) {
            if partition.is_left(u) {
                crossing.push((u, v));
            } else {
                crossing.push((v, u));
            }
        } else {
            pinned.set(u, true);
            pinned.set(v, false);
        }
    }
    crossing.sort_by_key(|(l, _)| text_key(l));

    let mut base_l = PartialAssignment::new();
    let mut base_r = PartialAssignment::new();
    for v in partition.key_vars() {
        if let Some(bit) = pinned.get(v) {
            if partition.is_left(v) {
                base_l.set(v, bit);
            } else {
                base_r.set(v, bit);
            }
        }
    }
    let shift_context = shift_assignment(d_width, p as u64);
    Ok(FoolingSet {
        partition: partition.clone(),
        d_width,
        shift_context,
        context: union(&[&pinned, &shift_context]),
        choice: Some(choice),
        pairs: PairSource::Alternating {
            base_l,
            base_r,
            crossing,
        },
    })
}

/// A Boolean function of a packed `(A, B, D)` input.
pub trait BooleanFunction {
    fn eval(&self, x: SaddInput) -> Result<bool>;
}

impl<F: Fn(SaddInput) -> bool> BooleanFunction for F {
    fn eval(&self, x: SaddInput) -> Result<bool> {
        Ok(self(x))
    }
}

/// Integer reference for the most significant sum bit, `sAdd^n_{n-1}`.
#[derive(Clone, Copy, Debug)]
pub struct SaddMsbOracle {
    pub n: u32,
}

impl BooleanFunction for SaddMsbOracle {
    fn eval(&self, x: SaddInput) -> Result<bool> {
        Ok(sadd::sadd_bit(x, self.n - 1))
    }
}

/// A BDD root viewed as a [`BooleanFunction`].
#[derive(Clone, Copy, Debug)]
pub struct BddFunction<'a> {
    pub manager: &'a Manager,
    pub root: NodeRef,
}

impl BooleanFunction for BddFunction<'_> {
    fn eval(&self, x: SaddInput) -> Result<bool> {
        Ok(self.manager.eval_with(self.root, |v| Some(x.get(v)))?)
    }
}

/// Why a family is not a fooling set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `f(l·r) != f(l'·r')`.
    DiagonalMismatch,
    /// Both crossings `l·r'` and `l'·r` agree with the diagonal value.
    CrossingsAgree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub first: u64,
    pub second: u64,
    pub kind: WitnessKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    /// Common value of `f(l·r)`; `None` for an empty set or a diagonal mismatch.
    pub diagonal: Option<bool>,
    pub witness: Option<Witness>,
    /// Members examined (all of them unless sub-sampled).
    pub members_checked: u64,
    /// Unordered member pairs whose crossings were evaluated.
    pub pairs_checked: u64,
    pub subsampled: bool,
}

/// Exhaustive check of every member and every unordered pair of members.
pub fn verify_fooling_set<F: BooleanFunction + ?Sized>(f: &F, fs: &FoolingSet) -> Result<Verdict> {
    let members: Vec<u64> = (0..fs.len()).collect();
    verify_members(f, fs, &members, false)
}

/// Like [`verify_fooling_set`], but checks a seeded random subset of
/// `max_members` members when the set is larger.
pub fn verify_fooling_set_sampled<F: BooleanFunction + ?Sized>(
    f: &F,
    fs: &FoolingSet,
    max_members: u64,
    seed: u64,
) -> Result<Verdict> {
    if fs.len() <= max_members {
        return verify_fooling_set(f, fs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<u64> = index::sample(&mut rng, fs.len() as usize, max_members as usize)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    members.sort_unstable();
    verify_members(f, fs, &members, true)
}

fn verify_members<F: BooleanFunction + ?Sized>(
    f: &F,
    fs: &FoolingSet,
    members: &[u64],
    subsampled: bool,
) -> Result<Verdict> {
    let mut verdict = Verdict {
        valid: true,
        diagonal: None,
        witness: None,
        members_checked: members.len() as u64,
        pairs_checked: 0,
        subsampled,
    };
    let pairs: Vec<_> = members
        .iter()
        .map(|&i| fs.pair(i).expect("member index in range"))
        .collect();
    for (k, (l, r)) in pairs.iter().enumerate() {
        let value = f.eval(fs.combine(l, r)?)?;
        match verdict.diagonal {
            None => verdict.diagonal = Some(value),
            Some(first) if first != value => {
                verdict.valid = false;
                verdict.diagonal = None;
                verdict.witness = Some(Witness {
                    first: members[0],
                    second: members[k],
                    kind: WitnessKind::DiagonalMismatch,
                });
                return Ok(verdict);
            }
            Some(_) => {}
        }
    }
    let Some(diagonal) = verdict.diagonal else {
        return Ok(verdict);
    };
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            verdict.pairs_checked += 1;
            let (l, r) = &pairs[i];
            let (l2, r2) = &pairs[j];
            let cross1 = f.eval(fs.combine(l, r2)?)?;
            let cross2 = f.eval(fs.combine(l2, r)?)?;
            if cross1 == diagonal && cross2 == diagonal {
                verdict.valid = false;
                verdict.witness = Some(Witness {
                    first: members[i],
                    second: members[j],
                    kind: WitnessKind::CrossingsAgree,
                });
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

/// Closed form of `sAdd^n_{n-1}` on inputs that respect the pinned bits of a
/// constructed fooling set (crossing pairs may take any values).
///
/// With `k` the highest aligned position below `min(m, n-1)` where
/// `u_k = v_k`, the carry into bit `n-1` is `u_k` (0 when no such `k`
/// exists), and the result is `a_{n-1} XOR (B >> p)_{n-1} XOR carry`.
pub fn msb_case_formula(x: SaddInput, fs: &FoolingSet) -> Result<bool> {
    let choice = fs.choice.as_ref().ok_or_else(|| {
        FoolingError::NotApplicable("fooling set was not built by construction".into())
    })?;
    let ctx = &fs.context;
    for v in (0..fs.partition.n)
        .map(VarId::a)
        .chain((0..fs.partition.n).map(VarId::b))
        .chain((0..fs.d_width).map(VarId::d))
    {
        if let Some(bit) = ctx.get(v) {
            if x.get(v) != bit {
                return Err(FoolingError::NotApplicable(format!(
                    "{v} must be {}",
                    u8::from(bit)
                )));
            }
        }
    }
    let n = fs.partition.n;
    let p = choice.p;
    let m = n - p;
    let carry = (0..m.min(n - 1))
        .rev()
        .find(|&i| x.get(VarId::a(i)) == x.get(VarId::b(i + p)))
        .is_some_and(|k| x.get(VarId::a(k)));
    let top_a = x.get(VarId::a(n - 1));
    let top_shifted = p == 0 && x.get(VarId::b(n - 1));
    Ok(top_a ^ top_shifted ^ carry)
}

/// Number of distinct subfunctions over `R ∪ D` left after fixing `L` to each
/// member's `l`.
pub fn subfunction_count<F: BooleanFunction + ?Sized>(
    f: &F,
    partition: &BalancedPartition,
    fs: &FoolingSet,
) -> Result<usize> {
    let free: Vec<VarId> = partition
        .right()
        .into_iter()
        .chain((0..fs.d_width).map(VarId::d))
        .collect();
    let vars = free.len() as u32;
    if vars > SUBFUNCTION_LIMIT {
        return Err(FoolingError::GuardExceeded {
            vars,
            limit: SUBFUNCTION_LIMIT,
        });
    }
    let rows = 1u64 << vars;
    let mut tables = FxHashSet::default();
    for (l, _) in fs.pairs() {
        let mut table = vec![0u64; rows.div_ceil(64) as usize];
        for row in 0..rows {
            let mut x = l.values();
            for (bit, &v) in free.iter().enumerate() {
                x.set(v, row >> bit & 1 == 1);
            }
            if f.eval(x)? {
                table[(row / 64) as usize] |= 1 << (row % 64);
            }
        }
        tables.insert(table);
    }
    Ok(tables.len())
}

/// Internal nodes of `root` at or below the first level holding an `R` variable.
///
/// The order must place every `L` variable above every `R` variable; shift
/// bits may sit anywhere.
pub fn nodes_below_boundary(
    mgr: &Manager,
    root: NodeRef,
    partition: &BalancedPartition,
) -> Result<usize> {
    let order = mgr.order();
    let level = |v: VarId| order.level_of(v).ok_or(BddError::UnknownVariable(v));
    let mut last_left = None;
    let mut first_right = u32::MAX;
    for v in partition.left() {
        last_left = last_left.max(Some(level(v)?));
    }
    for v in partition.right() {
        first_right = first_right.min(level(v)?);
    }
    if last_left.is_some_and(|l| l > first_right) {
        return Err(FoolingError::NotSeparated);
    }
    let widths: BTreeMap<u32, usize> = mgr.level_widths(&[root])?;
    Ok(widths.range(first_right..).map(|(_, &w)| w).sum())
}

/// Random order with all of `L` (shuffled) above all of `R` (shuffled) and the
/// shift bits inserted at random positions.
pub fn separated_order<R: Rng + ?Sized>(
    partition: &BalancedPartition,
    d_width: u32,
    rng: &mut R,
) -> crate::bdd::VarOrder {
    use rand::seq::SliceRandom;
    let mut left: Vec<_> = partition.left().into_iter().collect();
    let mut right: Vec<_> = partition.right().into_iter().collect();
    left.shuffle(rng);
    right.shuffle(rng);
    let mut vars: Vec<_> = left.into_iter().chain(right).collect();
    for i in 0..d_width {
        let at = rng.random_range(0..=vars.len());
        vars.insert(at, VarId::d(i));
    }
    crate::bdd::VarOrder::new(vars).expect("distinct variables")
}
