//! Exponent shortening and the free-group power word solver.
//!
//! For a period `p` the exponents of its powers form a walk `0 = eta_0,
//! eta_1, ..., eta_m`. Long stretches of that walk which no prefix sum
//! visits can be cut out without changing whether the word is trivial,
//! which leaves exponents polynomial in the size of the input.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_words::{free_reduce, OmegaWord};
use crate::power_words::{PowerWord, SymbolicLetter, SymbolicWord};
use crate::preprocess::{default_threshold, preprocess_with};
use crate::rewrite_t;

/// Prefix sums of the exponents of one period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaProfile {
    pub period: OmegaWord,
    /// `prefix_sums[0] = 0`, `prefix_sums[i]` sums the first `i` exponents.
    pub prefix_sums: Vec<BigInt>,
    /// Index of each power of `period` within the symbolic word.
    pub positions: Vec<usize>,
}

impl EtaProfile {
    pub fn count(&self) -> usize {
        self.positions.len()
    }

    pub fn exponents(&self) -> impl Iterator<Item = BigInt> + '_ {
        self.prefix_sums.windows(2).map(|w| &w[1] - &w[0])
    }
}

pub fn eta_profile(u: &SymbolicWord, p: &OmegaWord) -> EtaProfile {
    let mut prefix_sums = vec![BigInt::zero()];
    let mut positions = Vec::new();
    for (i, l) in u.letters.iter().enumerate() {
        if let SymbolicLetter::Power { period, exponent } = l {
            if period == p {
                let next = prefix_sums.last().unwrap() + exponent;
                prefix_sums.push(next);
                positions.push(i);
            }
        }
    }
    EtaProfile {
        period: p.clone(),
        prefix_sums,
        positions,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "ser_big")]
    pub lo: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub hi: BigInt,
}

impl Interval {
    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo + 1
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn distance(&self, x: &BigInt) -> BigInt {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            BigInt::zero()
        }
    }
}

/// Increasing, pairwise disjoint, nonempty intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    // prefix sums of widths, one longer than `intervals`
    cumulative: Vec<BigInt>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<Interval>) -> Option<Self> {
        let ordered = intervals.iter().all(|i| i.lo <= i.hi)
            && intervals.windows(2).all(|w| w[0].hi < w[1].lo);
        if !ordered {
            return None;
        }
        let mut cumulative = vec![BigInt::zero()];
        for i in &intervals {
            let next = cumulative.last().unwrap() + i.width();
            cumulative.push(next);
        }
        Some(IntervalSet {
            intervals,
            cumulative,
        })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        let i = self.intervals.partition_point(|iv| &iv.hi < x);
        self.intervals.get(i).is_some_and(|iv| iv.contains(x))
    }

    /// Total width of the intervals lying strictly between `a` and `b`.
    pub fn width_between(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let first = self.intervals.partition_point(|iv| &iv.lo <= lo);
        let end = self.intervals.partition_point(|iv| &iv.hi < hi);
        if end <= first {
            BigInt::zero()
        } else {
            &self.cumulative[end] - &self.cumulative[first]
        }
    }

    /// Distance from `x` to the nearest interval.
    pub fn distance(&self, x: &BigInt) -> Option<BigInt> {
        let i = self.intervals.partition_point(|iv| &iv.hi < x);
        let after = self.intervals.get(i).map(|iv| iv.distance(x));
        let before = i
            .checked_sub(1)
            .and_then(|j| self.intervals.get(j))
            .map(|iv| iv.distance(x));
        match (before, after) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// The cut margin `(6|u| + 1)^2 · lambda(u) + 1`.
pub fn cut_constant(u: &SymbolicWord) -> BigInt {
    let n = BigInt::from(6 * u.len() + 1);
    &n * &n * u.lambda() + 1
}

pub fn cut_intervals(u: &SymbolicWord, p: &OmegaWord) -> IntervalSet {
    cut_intervals_with(&eta_profile(u, p), &cut_constant(u))
}

/// Gaps of at least `2k` between consecutive distinct prefix sums, shrunk
/// by `k` on both sides.
pub fn cut_intervals_with(profile: &EtaProfile, k: &BigInt) -> IntervalSet {
    let mut values = profile.prefix_sums.clone();
    values.sort();
    values.dedup();
    let two_k = k * 2;
    let intervals = values
        .windows(2)
        .filter(|w| &w[1] - &w[0] >= two_k)
        .map(|w| Interval {
            lo: &w[0] + k,
            hi: &w[1] - k,
        })
        .collect();
    IntervalSet::new(intervals).expect("gaps are ordered")
}

/// Smallest distance from any prefix sum to the cut set.
pub fn cut_distance(profile: &EtaProfile, cut: &IntervalSet) -> Option<BigInt> {
    profile
        .prefix_sums
        .iter()
        .filter_map(|x| cut.distance(x))
        .min()
}

/// New exponents `z_i = y_i - sign(y_i) · (width cut between eta_{i-1} and eta_i)`.
pub fn shortened_exponents(profile: &EtaProfile, cut: &IntervalSet) -> Result<Vec<BigInt>> {
    if let Some(bad) = profile.prefix_sums.iter().find(|x| cut.contains(x)) {
        return Err(Error::IncompatibleCut {
            value: bad.to_string(),
        });
    }
    Ok(profile
        .prefix_sums
        .windows(2)
        .map(|w| {
            let y = &w[1] - &w[0];
            let removed = cut.width_between(&w[0], &w[1]);
            if y.is_negative() {
                y + removed
            } else {
                y - removed
            }
        })
        .collect())
}

pub fn shorten_for(u: &SymbolicWord, p: &OmegaWord, cut: &IntervalSet) -> Result<SymbolicWord> {
    let profile = eta_profile(u, p);
    let z = shortened_exponents(&profile, cut)?;
    let mut out = u.clone();
    for (&pos, z) in profile.positions.iter().zip(z) {
        out.letters[pos] = SymbolicLetter::power(p.clone(), z);
    }
    Ok(out)
}

/// Per-period summary of one shortening pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub period: String,
    pub powers: usize,
    #[serde(rename = "K", serialize_with = "ser_big")]
    pub k: BigInt,
    pub intervals: usize,
    pub max_exponent_bits: u64,
    #[serde(serialize_with = "ser_big")]
    pub max_shortened_exponent: BigInt,
    pub max_shortened_exponent_bits: u64,
    #[serde(skip)]
    pub cut_distance: Option<BigInt>,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Shortens every period in lexicographic order.
pub fn shorten(u: &SymbolicWord) -> Result<(SymbolicWord, Vec<PeriodReport>)> {
    let k = cut_constant(u);
    let mut periods: BTreeMap<OmegaWord, ()> = BTreeMap::new();
    for l in &u.letters {
        if let SymbolicLetter::Power { period, .. } = l {
            periods.insert(period.clone(), ());
        }
    }
    let mut out = u.clone();
    let mut reports = Vec::new();
    for p in periods.into_keys() {
        let profile = eta_profile(u, &p);
        let cut = cut_intervals_with(&profile, &k);
        let z = shortened_exponents(&profile, &cut)?;
        let max_bits = profile.exponents().map(|y| y.bits()).max().unwrap_or(0);
        let max_z = z.iter().map(|v| v.abs()).max().unwrap_or_default();
        for (&pos, z) in profile.positions.iter().zip(z) {
            out.letters[pos] = SymbolicLetter::power(p.clone(), z);
        }
        reports.push(PeriodReport {
            period: p.to_string(),
            powers: profile.count(),
            k: k.clone(),
            intervals: cut.len(),
            max_exponent_bits: max_bits,
            max_shortened_exponent_bits: max_z.bits(),
            max_shortened_exponent: max_z,
            cut_distance: cut_distance(&profile, &cut),
        });
    }
    Ok((out, reports))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FinalCheck {
    /// Literal expansion and free reduction.
    Expand,
    /// Normalization of the shortened symbolic word.
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeOptions {
    /// Largest shortened word that is decided by literal expansion.
    pub expand_cap: u64,
    /// Demotion threshold; `None` uses the rank-based default.
    pub threshold: Option<usize>,
}

pub const DEFAULT_EXPAND_CAP: u64 = 1 << 22;

impl Default for FreeOptions {
    fn default() -> Self {
        FreeOptions {
            expand_cap: DEFAULT_EXPAND_CAP,
            threshold: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeReport {
    pub identity: bool,
    pub periods: Vec<PeriodReport>,
    /// Letters in the shortened word.
    pub expanded_length: BigInt,
    pub final_check: FinalCheck,
    /// Rewriting steps, when the symbolic check ran.
    pub steps: Option<usize>,
    pub canonical: SymbolicWord,
    pub shortened: SymbolicWord,
}

pub fn solve_free(v: &PowerWord) -> Result<bool> {
    Ok(solve_free_report(v, &FreeOptions::default())?.identity)
}

pub fn solve_free_report(v: &PowerWord, opts: &FreeOptions) -> Result<FreeReport> {
    let threshold = opts.threshold.unwrap_or_else(|| default_threshold(v.rank()));
    let canonical = preprocess_with(v, threshold).into_symbolic();
    let (shortened, periods) = shorten(&canonical)?;
    let expanded_length = shortened.sigma_len();
    let (identity, final_check, steps) = if expanded_length <= BigInt::from(opts.expand_cap) {
        let w = shortened.project(opts.expand_cap)?;
        (free_reduce(&w).is_empty(), FinalCheck::Expand, None)
    } else {
        let n = rewrite_t::normalize(&shortened)?;
        (n.word.is_empty(), FinalCheck::Symbolic, Some(n.steps))
    };
    Ok(FreeReport {
        identity,
        periods,
        expanded_length,
        final_check,
        steps,
        canonical,
        shortened,
    })
}

/// `|z| <= m · (2K - 1)`, the size guarantee for shortened exponents.
pub fn shortened_exponent_bound(u: &SymbolicWord, powers: usize) -> BigInt {
    (cut_constant(u) * 2 - BigInt::one()) * powers
}
