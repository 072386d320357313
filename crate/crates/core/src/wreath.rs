//! Wreath products `G wr Z`: a lamp group `G` at every integer and a cursor.
//!
//! Words mix base letters, which multiply into the lamp under the cursor,
//! with the reserved letter `t` (`T`), which moves the cursor right (left).
//! Power words are decided by checking a polynomial set of positions near
//! the factor boundaries directly, and the long stretches in between, where
//! every factor looks periodic, through a periodic membership check.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, ParseError, Result};
use crate::free_words::{free_reduce_letters, invert_letters, Letter, ReducedWord, Word};
use crate::perm::{a5_letter, Perm};
use crate::power_words::PowerWord;
use crate::shorten::{solve_free_report, FreeOptions};

/// Generator index of the cursor letter `t`.
pub const SHIFT_GENERATOR: u32 = 19;

pub fn is_shift(l: Letter) -> bool {
    l.generator() == SHIFT_GENERATOR
}

/// A base group together with a decision procedure for its power words.
pub trait GroupBackend: Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// Whether `l` is a base letter of this group.
    fn accepts(&self, l: Letter) -> bool;

    /// Image of a base letter; only called on accepted letters.
    fn letter(&self, l: Letter) -> Self::Elem;

    fn eval_word(&self, w: &[Letter]) -> Self::Elem {
        w.iter()
            .fold(self.identity(), |acc, &l| self.multiply(&acc, &self.letter(l)))
    }

    fn pow(&self, a: &Self::Elem, n: &BigInt) -> Self::Elem {
        let mut base = if n.is_negative() {
            self.invert(a)
        } else {
            a.clone()
        };
        let mut e = n.abs();
        let mut acc = self.identity();
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.multiply(&acc, &base);
            }
            e >>= 1u32;
            if !e.is_zero() {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// Decides whether a power word over the base letters is the identity.
    fn solve_power_word(&self, v: &PowerWord) -> Result<bool>;
}

/// `Z^dim`; letter with generator index `g` is the unit vector `g mod dim`.
#[derive(Clone, Debug)]
pub struct IntegerBackend {
    dim: usize,
}

impl IntegerBackend {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        IntegerBackend { dim }
    }
}

impl GroupBackend for IntegerBackend {
    type Elem = Vec<BigInt>;

    fn name(&self) -> String {
        if self.dim == 1 {
            "Z".into()
        } else {
            format!("Z^{}", self.dim)
        }
    }

    fn identity(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.dim]
    }

    fn multiply(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn invert(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().map(|x| -x).collect()
    }

    fn is_identity(&self, a: &Vec<BigInt>) -> bool {
        a.iter().all(Zero::is_zero)
    }

    fn accepts(&self, l: Letter) -> bool {
        !is_shift(l)
    }

    fn letter(&self, l: Letter) -> Vec<BigInt> {
        let mut v = self.identity();
        v[l.generator() as usize % self.dim] = BigInt::from(l.sign());
        v
    }

    fn pow(&self, a: &Vec<BigInt>, n: &BigInt) -> Vec<BigInt> {
        a.iter().map(|x| x * n).collect()
    }

    fn solve_power_word(&self, v: &PowerWord) -> Result<bool> {
        let total = v.factors.iter().fold(self.identity(), |acc, f| {
            self.multiply(&acc, &self.pow(&self.eval_word(f.period.letters()), &f.exponent))
        });
        Ok(self.is_identity(&total))
    }
}

/// `Z / modulus`; every letter is `±1`.
#[derive(Clone, Debug)]
pub struct ModularBackend {
    modulus: u64,
}

impl ModularBackend {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 1);
        ModularBackend { modulus }
    }
}

impl GroupBackend for ModularBackend {
    type Elem = u64;

    fn name(&self) -> String {
        format!("Z/{}", self.modulus)
    }

    fn identity(&self) -> u64 {
        0
    }

    fn multiply(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.modulus as u128) as u64
    }

    fn invert(&self, a: &u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    fn accepts(&self, l: Letter) -> bool {
        !is_shift(l)
    }

    fn letter(&self, l: Letter) -> u64 {
        if l.is_inverse() {
            self.invert(&(1 % self.modulus))
        } else {
            1 % self.modulus
        }
    }

    fn pow(&self, a: &u64, n: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        (BigInt::from(*a) * n).mod_floor(&m).to_u64().unwrap()
    }

    fn solve_power_word(&self, v: &PowerWord) -> Result<bool> {
        let total = v.factors.iter().fold(0, |acc, f| {
            self.multiply(&acc, &self.pow(&self.eval_word(f.period.letters()), &f.exponent))
        });
        Ok(total == 0)
    }
}

/// Free group on the first `rank` letters; power words go to the
/// shortening solver.
#[derive(Clone, Debug)]
pub struct FreeBackend {
    rank: u32,
    options: FreeOptions,
}

impl FreeBackend {
    /// Ranks up to 19 keep the cursor letter free.
    pub const MAX_RANK: u32 = SHIFT_GENERATOR;

    pub fn new(rank: u32) -> Self {
        assert!((1..=Self::MAX_RANK).contains(&rank));
        FreeBackend {
            rank,
            options: FreeOptions::default(),
        }
    }
}

impl GroupBackend for FreeBackend {
    type Elem = ReducedWord;

    fn name(&self) -> String {
        format!("F{}", self.rank)
    }

    fn identity(&self) -> ReducedWord {
        ReducedWord::empty()
    }

    fn multiply(&self, a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
        a.mul(b)
    }

    fn invert(&self, a: &ReducedWord) -> ReducedWord {
        a.inverse()
    }

    fn is_identity(&self, a: &ReducedWord) -> bool {
        a.is_empty()
    }

    fn accepts(&self, l: Letter) -> bool {
        l.generator() < self.rank
    }

    fn letter(&self, l: Letter) -> ReducedWord {
        free_reduce_letters(&[l])
    }

    fn eval_word(&self, w: &[Letter]) -> ReducedWord {
        free_reduce_letters(w)
    }

    fn solve_power_word(&self, v: &PowerWord) -> Result<bool> {
        Ok(solve_free_report(v, &self.options)?.identity)
    }
}

/// A5 as permutations, `a = (1 2 3 4 5)` and `b = (1 2 3)`.
#[derive(Clone, Debug, Default)]
pub struct A5Backend;

impl GroupBackend for A5Backend {
    type Elem = Perm;

    fn name(&self) -> String {
        "A5".into()
    }

    fn identity(&self) -> Perm {
        Perm::IDENTITY
    }

    fn multiply(&self, a: &Perm, b: &Perm) -> Perm {
        a.then(b)
    }

    fn invert(&self, a: &Perm) -> Perm {
        a.inverse()
    }

    fn accepts(&self, l: Letter) -> bool {
        a5_letter(l).is_some()
    }

    fn letter(&self, l: Letter) -> Perm {
        a5_letter(l).expect("accepted letter")
    }

    fn pow(&self, a: &Perm, n: &BigInt) -> Perm {
        let k = n.mod_floor(&BigInt::from(a.order())).to_u32().unwrap();
        (0..k).fold(Perm::IDENTITY, |acc, _| acc.then(a))
    }

    fn solve_power_word(&self, v: &PowerWord) -> Result<bool> {
        let total = v.factors.iter().fold(Perm::IDENTITY, |acc, f| {
            acc.then(&self.pow(&self.eval_word(f.period.letters()), &f.exponent))
        });
        Ok(total.is_identity())
    }
}

/// Base group named on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseGroup {
    Integers(usize),
    Modular(u64),
    Free(u32),
    A5,
}

impl FromStr for BaseGroup {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        let bad = || ParseError::GroupSelector(s.to_string());
        let num = |t: &str| t.parse::<u64>().ok().filter(|&n| n >= 1).ok_or_else(bad);
        match s.split_once(':') {
            None if s == "z" => Ok(BaseGroup::Integers(1)),
            Some(("z", k)) => Ok(BaseGroup::Integers(num(k)? as usize)),
            Some(("zmod", q)) => Ok(BaseGroup::Modular(num(q)?)),
            Some(("free", r)) => {
                let r = num(r)?;
                if r > FreeBackend::MAX_RANK as u64 {
                    return Err(bad());
                }
                Ok(BaseGroup::Free(r as u32))
            }
            Some(("perm", "a5")) => Ok(BaseGroup::A5),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BaseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseGroup::Integers(1) => write!(f, "z"),
            BaseGroup::Integers(k) => write!(f, "z:{k}"),
            BaseGroup::Modular(q) => write!(f, "zmod:{q}"),
            BaseGroup::Free(r) => write!(f, "free:{r}"),
            BaseGroup::A5 => write!(f, "perm:a5"),
        }
    }
}

/// Every letter must be the cursor letter or a base letter of `backend`.
pub fn check_letters<B: GroupBackend>(v: &PowerWord, backend: &B) -> Result<(), ParseError> {
    match v.letters().find(|&l| !is_shift(l) && !backend.accepts(l)) {
        Some(l) => Err(ParseError::LetterOutOfRange {
            letter: l.to_char(),
            group: format!("{} wr Z", backend.name()),
        }),
        None => Ok(()),
    }
}

/// `(f, shift)`: finitely many non-identity lamps and the cursor offset.
#[derive(Clone, Debug, PartialEq)]
pub struct WreathElement<E> {
    pub support: BTreeMap<BigInt, E>,
    pub shift: BigInt,
}

impl<E: Clone + PartialEq> WreathElement<E> {
    pub fn identity() -> Self {
        WreathElement {
            support: BTreeMap::new(),
            shift: BigInt::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty() && self.shift.is_zero()
    }

    pub fn value_at<B: GroupBackend<Elem = E>>(&self, k: &BigInt, backend: &B) -> E {
        self.support.get(k).cloned().unwrap_or_else(|| backend.identity())
    }

    /// `(f1, h1)(f2, h2) = (f1 · f2(. - h1), h1 + h2)`.
    pub fn mul<B: GroupBackend<Elem = E>>(&self, other: &Self, backend: &B) -> Self {
        let mut support = self.support.clone();
        for (k, v) in &other.support {
            let key = k + &self.shift;
            let cur = support.remove(&key).unwrap_or_else(|| backend.identity());
            let next = backend.multiply(&cur, v);
            if !backend.is_identity(&next) {
                support.insert(key, next);
            }
        }
        WreathElement {
            support,
            shift: &self.shift + &other.shift,
        }
    }
}

/// Letters written at each cursor position while reading a word once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordLayout {
    pub shift: i64,
    /// Leftmost and rightmost cursor positions visited, including 0.
    pub lo: i64,
    pub hi: i64,
    pub cells: BTreeMap<i64, Vec<Letter>>,
}

impl WordLayout {
    pub fn new(w: &[Letter]) -> Self {
        let mut cursor = 0i64;
        let (mut lo, mut hi) = (0, 0);
        let mut cells: BTreeMap<i64, Vec<Letter>> = BTreeMap::new();
        for &l in w {
            if is_shift(l) {
                cursor += l.sign() as i64;
                lo = lo.min(cursor);
                hi = hi.max(cursor);
            } else {
                cells.entry(cursor).or_default().push(l);
            }
        }
        WordLayout {
            shift: cursor,
            lo,
            hi,
            cells,
        }
    }

    pub fn width(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    fn cell(&self, k: i64) -> &[Letter] {
        self.cells.get(&k).map_or(&[], Vec::as_slice)
    }
}

/// Reads `w` left to right.
pub fn eval_wreath<B: GroupBackend>(w: &[Letter], backend: &B) -> WreathElement<B::Elem> {
    let layout = WordLayout::new(w);
    let support = layout
        .cells
        .iter()
        .map(|(&k, letters)| (BigInt::from(k), backend.eval_word(letters)))
        .filter(|(_, v)| !backend.is_identity(v))
        .collect();
    WreathElement {
        support,
        shift: BigInt::from(layout.shift),
    }
}

/// A nonempty tuple read cyclically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicSequence<E> {
    tuple: Vec<E>,
}

impl<E> PeriodicSequence<E> {
    pub fn new(tuple: Vec<E>) -> Option<Self> {
        (!tuple.is_empty()).then_some(PeriodicSequence { tuple })
    }

    pub fn period(&self) -> usize {
        self.tuple.len()
    }

    pub fn at(&self, k: u64) -> &E {
        &self.tuple[(k % self.tuple.len() as u64) as usize]
    }

    pub fn values(&self) -> &[E] {
        &self.tuple
    }
}

/// Lamp values `lo..=hi` repeating `values` from `lo`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicRun<E> {
    pub lo: BigInt,
    pub hi: BigInt,
    pub values: PeriodicSequence<E>,
}

/// `w^n` with the repeating middle kept as a single period.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerProfile<E> {
    pub shift: BigInt,
    /// Cursor hull of `w^n`.
    pub hull: (BigInt, BigInt),
    /// Non-identity values outside `middle`.
    pub explicit: BTreeMap<BigInt, E>,
    pub middle: Option<PeriodicRun<E>>,
}

impl<E: Clone + PartialEq> PowerProfile<E> {
    pub fn value_at<B: GroupBackend<Elem = E>>(&self, k: &BigInt, backend: &B) -> E {
        if let Some(run) = &self.middle {
            if &run.lo <= k && k <= &run.hi {
                let off = (k - &run.lo).to_u64().unwrap();
                return run.values.at(off).clone();
            }
        }
        self.explicit.get(k).cloned().unwrap_or_else(|| backend.identity())
    }

    /// Writes the whole element out, refusing hulls wider than `cap`.
    pub fn materialize<B: GroupBackend<Elem = E>>(
        &self,
        backend: &B,
        cap: u64,
    ) -> Result<WreathElement<E>> {
        let width: BigInt = &self.hull.1 - &self.hull.0 + 1;
        if width > BigInt::from(cap) {
            return Err(Error::CapExceeded {
                needed: width.to_string(),
                cap,
            });
        }
        let mut support = self.explicit.clone();
        if let Some(run) = &self.middle {
            let mut k = run.lo.clone();
            let mut off = 0u64;
            while k <= run.hi {
                let v = run.values.at(off);
                if !backend.is_identity(v) {
                    support.insert(k.clone(), v.clone());
                }
                k += 1;
                off += 1;
            }
        }
        Ok(WreathElement {
            support,
            shift: self.shift.clone(),
        })
    }
}

/// Copies `q` of a word with shift `d` (copy `q` starts at cursor `q·d`)
/// that write to relative position `r`, ascending, ignoring how many copies
/// there are.
fn covering_copies(r: &BigInt, d: i64, lo: i64, hi: i64) -> (BigInt, BigInt) {
    let dd = BigInt::from(d.abs());
    if d > 0 {
        // r - q d in [lo, hi]
        ((r - hi).div_ceil(&dd), (r - lo).div_floor(&dd))
    } else {
        // r + q |d| in [lo, hi]
        ((BigInt::from(lo) - r).div_ceil(&dd), (BigInt::from(hi) - r).div_floor(&dd))
    }
}

/// Word written at relative position `r` by copies `q` in `[q_lo, q_hi]`.
fn copies_word(layout: &WordLayout, r: &BigInt, q_lo: &BigInt, q_hi: &BigInt) -> Vec<Letter> {
    let mut out = Vec::new();
    let mut q = q_lo.clone();
    while &q <= q_hi {
        let k = (r - &q * layout.shift).to_i64().expect("cell within layout");
        out.extend_from_slice(layout.cell(k));
        q += 1;
    }
    out
}

/// Structured form of `w^n`. With a nonzero shift the middle of the support
/// is periodic with period `|shift|`; with zero shift every lamp is raised
/// to the `n`-th power, which is refused if `n · |I(w)|` exceeds `cap`.
pub fn power_profile<B: GroupBackend>(
    w: &[Letter],
    n: &BigInt,
    backend: &B,
    cap: u64,
) -> Result<PowerProfile<B::Elem>> {
    if n.is_negative() {
        return power_profile(&invert_letters(w), &-n, backend, cap);
    }
    let layout = WordLayout::new(w);
    let d = layout.shift;
    let (lo, hi) = (layout.lo, layout.hi);
    if n.is_zero() {
        return Ok(PowerProfile {
            shift: BigInt::zero(),
            hull: (BigInt::zero(), BigInt::zero()),
            explicit: BTreeMap::new(),
            middle: None,
        });
    }
    if d == 0 {
        let needed = n * layout.width();
        if needed > BigInt::from(cap) {
            return Err(Error::ZeroShiftOverflow {
                exponent: n.to_string(),
                cap,
            });
        }
        let explicit = layout
            .cells
            .iter()
            .map(|(&k, c)| (BigInt::from(k), backend.pow(&backend.eval_word(c), n)))
            .filter(|(_, v)| !backend.is_identity(v))
            .collect();
        return Ok(PowerProfile {
            shift: BigInt::zero(),
            hull: (lo.into(), hi.into()),
            explicit,
            middle: None,
        });
    }
    let last: BigInt = n - 1;
    let travel = &last * d;
    let hull = if d > 0 {
        (BigInt::from(lo), hi + &travel)
    } else {
        (lo + &travel, BigInt::from(hi))
    };
    let value = |k: &BigInt| {
        let (q_lo, q_hi) = covering_copies(k, d, lo, hi);
        let q_lo = q_lo.max(BigInt::zero());
        let q_hi = q_hi.min(last.clone());
        backend.eval_word(&copies_word(&layout, k, &q_lo, &q_hi))
    };
    let nd = n * d;
    let (mid_lo, mid_hi) = if d > 0 {
        (BigInt::from(hi - d + 1), lo + &nd - 1)
    } else {
        (hi + &nd + 1, BigInt::from(lo - d - 1))
    };
    let period = d.unsigned_abs();
    let middle_len = &mid_hi - &mid_lo + 1;
    let mut explicit = BTreeMap::new();
    let mut visit = |from: &BigInt, to: &BigInt| {
        let mut k = from.clone();
        while &k <= to {
            let v = value(&k);
            if !backend.is_identity(&v) {
                explicit.insert(k.clone(), v);
            }
            k += 1;
        }
    };
    let middle = if middle_len >= BigInt::from(period) {
        visit(&hull.0, &(&mid_lo - 1));
        visit(&(&mid_hi + 1), &hull.1);
        let tuple = (0..period).map(|j| value(&(&mid_lo + j))).collect();
        Some(PeriodicRun {
            lo: mid_lo,
            hi: mid_hi,
            values: PeriodicSequence::new(tuple).unwrap(),
        })
    } else {
        visit(&hull.0, &hull.1);
        None
    };
    Ok(PowerProfile {
        shift: nd,
        hull,
        explicit,
        middle,
    })
}

pub const DEFAULT_MEMBERSHIP_CAP: u64 = 1_000_000;

/// Whether the pointwise product of the summands (summand `i` read at
/// `k + phase_i`) is the identity for every `k` in `0..m`.
///
/// The product repeats with the lcm of the periods, so only
/// `min(m, lcm)` points are checked; more than `cap` is an error.
pub fn membership_periodic<B: GroupBackend>(
    summands: &[(PeriodicSequence<B::Elem>, u64)],
    m: &BigInt,
    backend: &B,
    cap: u64,
) -> Result<bool> {
    let mut lcm = BigInt::one();
    for (s, _) in summands {
        lcm = lcm.lcm(&BigInt::from(s.period()));
    }
    let count = m.clone().min(lcm).max(BigInt::zero());
    if count > BigInt::from(cap) {
        return Err(Error::MembershipCapExceeded {
            needed: count.to_string(),
            cap,
        });
    }
    let count = count.to_u64().unwrap();
    Ok((0..count).all(|k| {
        let v = summands.iter().fold(backend.identity(), |acc, (s, phase)| {
            backend.multiply(&acc, s.at(k + phase))
        });
        backend.is_identity(&v)
    }))
}

/// One factor `u^x` (`x > 0`) placed at cursor `start`.
#[derive(Clone, Debug)]
pub struct FactorLayout {
    pub word: WordLayout,
    pub exponent: BigInt,
    pub start: BigInt,
    /// Cursor hull of the whole power.
    pub span: (BigInt, BigInt),
}

/// Positions and hulls of all factors of a power word.
#[derive(Clone, Debug)]
pub struct WreathLayout {
    pub factors: Vec<FactorLayout>,
    /// Cursor position after the last factor.
    pub end: BigInt,
    pub hull: (BigInt, BigInt),
    /// Widest single-period hull.
    pub ell: u64,
}

impl WreathLayout {
    pub fn new(v: &PowerWord) -> Self {
        let mut factors = Vec::new();
        let mut pos = BigInt::zero();
        let (mut h_lo, mut h_hi) = (BigInt::zero(), BigInt::zero());
        let mut ell = 1;
        for f in &v.factors {
            if f.exponent.is_zero() || f.period.is_empty() {
                continue;
            }
            let (letters, x) = if f.exponent.is_negative() {
                (invert_letters(f.period.letters()), -&f.exponent)
            } else {
                (f.period.letters().to_vec(), f.exponent.clone())
            };
            let word = WordLayout::new(&letters);
            let travel = (&x - 1) * word.shift;
            let span = if word.shift >= 0 {
                (&pos + word.lo, &pos + word.hi + &travel)
            } else {
                (&pos + word.lo + &travel, &pos + word.hi)
            };
            h_lo = h_lo.min(span.0.clone());
            h_hi = h_hi.max(span.1.clone());
            ell = ell.max(word.width());
            let next = &pos + &x * word.shift;
            factors.push(FactorLayout {
                word,
                exponent: x,
                start: pos,
                span,
            });
            pos = next;
        }
        WreathLayout {
            factors,
            end: pos,
            hull: (h_lo, h_hi),
            ell,
        }
    }

    /// Intervals of positions checked one by one: `ell`-neighbourhoods of
    /// every factor boundary, clipped to the hull, merged.
    pub fn check_intervals(&self) -> Vec<(BigInt, BigInt)> {
        let ell = BigInt::from(self.ell);
        let mut raw: Vec<(BigInt, BigInt)> = self
            .factors
            .iter()
            .map(|f| &f.start)
            .chain(std::iter::once(&self.end))
            .map(|p| {
                (
                    (p - &ell).max(self.hull.0.clone()),
                    (p + &ell).min(self.hull.1.clone()),
                )
            })
            .filter(|(a, b)| a <= b)
            .collect();
        raw.sort();
        let mut merged: Vec<(BigInt, BigInt)> = Vec::new();
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= &last.1 + 1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        merged
    }

    /// Maximal intervals of the hull outside the checked set.
    pub fn gaps(&self) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::new();
        let mut next = self.hull.0.clone();
        for (a, b) in self.check_intervals() {
            if a > next {
                out.push((next.clone(), &a - 1));
            }
            next = b + 1;
        }
        if next <= self.hull.1 {
            out.push((next, self.hull.1.clone()));
        }
        out
    }

    /// A power word over the base letters evaluating to the lamp at `m`.
    pub fn query_word(&self, m: &BigInt) -> PowerWord {
        let mut out = PowerWord::default();
        for f in &self.factors {
            if m < &f.span.0 || m > &f.span.1 {
                continue;
            }
            let r = m - &f.start;
            if f.word.shift == 0 {
                let k = r.to_i64().expect("inside span");
                let cell = f.word.cell(k);
                if !cell.is_empty() {
                    out.push(Word(cell.to_vec()), f.exponent.clone());
                }
                continue;
            }
            let (q_lo, q_hi) = covering_copies(&r, f.word.shift, f.word.lo, f.word.hi);
            let q_lo = q_lo.max(BigInt::zero());
            let q_hi = q_hi.min(&f.exponent - 1);
            let mut q = q_lo;
            while q <= q_hi {
                let k = (&r - &q * f.word.shift).to_i64().unwrap();
                let cell = f.word.cell(k);
                if !cell.is_empty() {
                    out.push(Word(cell.to_vec()), 1);
                }
                q += 1;
            }
        }
        out
    }

    /// Periodic summands for a gap: one tuple per shifting factor covering
    /// it, read from the gap's left end.
    pub fn gap_summands<B: GroupBackend>(
        &self,
        gap: &(BigInt, BigInt),
        backend: &B,
    ) -> Vec<(PeriodicSequence<B::Elem>, u64)> {
        let mut out = Vec::new();
        for f in &self.factors {
            if gap.1 < f.span.0 || gap.0 > f.span.1 {
                continue;
            }
            debug_assert!(f.word.shift != 0, "zero-shift factors stay inside checked points");
            let period = f.word.shift.unsigned_abs();
            let tuple = (0..period)
                .map(|j| {
                    let r = &gap.0 + j - &f.start;
                    let (q_lo, q_hi) = covering_copies(&r, f.word.shift, f.word.lo, f.word.hi);
                    backend.eval_word(&copies_word(&f.word, &r, &q_lo, &q_hi))
                })
                .collect();
            out.push((PeriodicSequence::new(tuple).unwrap(), 0));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathOptions {
    pub membership_cap: u64,
}

impl Default for WreathOptions {
    fn default() -> Self {
        WreathOptions {
            membership_cap: DEFAULT_MEMBERSHIP_CAP,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WreathReport {
    pub identity: bool,
    /// Set when the cursor does not return to 0.
    pub shift_rejected: bool,
    pub points_checked: usize,
    pub gaps: usize,
    pub membership_points: u64,
}

pub fn solve_wreath<B: GroupBackend>(v: &PowerWord, backend: &B) -> Result<bool> {
    Ok(solve_wreath_report(v, backend, &WreathOptions::default())?.identity)
}

pub fn solve_wreath_report<B: GroupBackend>(
    v: &PowerWord,
    backend: &B,
    opts: &WreathOptions,
) -> Result<WreathReport> {
    check_letters(v, backend)?;
    let layout = WreathLayout::new(v);
    let mut report = WreathReport::default();
    if !layout.end.is_zero() {
        report.shift_rejected = true;
        return Ok(report);
    }
    for (a, b) in layout.check_intervals() {
        let mut m = a;
        while m <= b {
            report.points_checked += 1;
            if !backend.solve_power_word(&layout.query_word(&m))? {
                return Ok(report);
            }
            m += 1;
        }
    }
    for gap in layout.gaps() {
        report.gaps += 1;
        let summands = layout.gap_summands(&gap, backend);
        let len: BigInt = &gap.1 - &gap.0 + 1;
        let mut lcm = BigInt::one();
        for (s, _) in &summands {
            lcm = lcm.lcm(&BigInt::from(s.period()));
        }
        report.membership_points += len.clone().min(lcm).to_u64().unwrap_or(u64::MAX);
        if !membership_periodic(&summands, &len, backend, opts.membership_cap)? {
            return Ok(report);
        }
    }
    report.identity = true;
    Ok(report)
}

/// Dispatches on a named base group.
pub fn solve_wreath_on(v: &PowerWord, base: &BaseGroup, opts: &WreathOptions) -> Result<WreathReport> {
    match base {
        BaseGroup::Integers(k) => solve_wreath_report(v, &IntegerBackend::new(*k), opts),
        BaseGroup::Modular(q) => solve_wreath_report(v, &ModularBackend::new(*q), opts),
        BaseGroup::Free(r) => solve_wreath_report(v, &FreeBackend::new(*r), opts),
        BaseGroup::A5 => solve_wreath_report(v, &A5Backend, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<Letter> {
        Word::parse(s).unwrap().0
    }

    fn values(e: &WreathElement<Vec<BigInt>>, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi)
            .map(|k| {
                e.support
                    .get(&BigInt::from(k))
                    .map_or(0, |v| v[0].to_i64().unwrap())
            })
            .collect()
    }

    const EXAMPLE: &str = "b T b t b t bbb t bbb t bbbbb T b";

    #[test]
    fn worked_example_single() {
        let z = IntegerBackend::new(1);
        let e = eval_wreath(&w(EXAMPLE), &z);
        assert_eq!(e.shift, BigInt::from(2));
        assert_eq!(values(&e, -1, 3), vec![1, 2, 3, 4, 5]);
        assert_eq!(e.support.len(), 5);
    }

    #[test]
    fn worked_example_eighth_power() {
        let z = IntegerBackend::new(1);
        let prof = power_profile(&w(EXAMPLE), &BigInt::from(8), &z, 1000).unwrap();
        let e = prof.materialize(&z, 1000).unwrap();
        assert_eq!(e.shift, BigInt::from(16));
        assert_eq!(
            values(&e, -1, 17),
            vec![1, 2, 4, 6, 9, 6, 9, 6, 9, 6, 9, 6, 9, 6, 9, 6, 8, 4, 5]
        );
        let run = prof.middle.as_ref().unwrap();
        assert_eq!((run.lo.clone(), run.hi.clone()), (BigInt::from(2), BigInt::from(14)));
        assert_eq!(run.values.period(), 2);
        let brute = eval_wreath(&Word(w(EXAMPLE)).repeat(8).0, &z);
        assert_eq!(brute, e);
    }

    #[test]
    fn small_evaluations() {
        let z = IntegerBackend::new(1);
        assert!(eval_wreath(&w("tT"), &z).is_identity());
        let e = eval_wreath(&w("btBT"), &z);
        assert_eq!(e.shift, BigInt::zero());
        assert_eq!(values(&e, 0, 1), vec![1, -1]);
    }

    #[test]
    fn zero_shift_overflow() {
        let z = IntegerBackend::new(1);
        let huge = BigInt::one() << 80u32;
        assert!(matches!(
            power_profile(&w("btbT"), &huge, &z, 1000),
            Err(Error::ZeroShiftOverflow { .. })
        ));
        let p = power_profile(&w("btbT"), &BigInt::from(7), &z, 1000).unwrap();
        let e = p.materialize(&z, 100).unwrap();
        assert_eq!(values(&e, 0, 1), vec![7, 7]);
    }

    #[test]
    fn membership_examples() {
        let z = IntegerBackend::new(1);
        let seq = |v: &[i64]| {
            PeriodicSequence::new(v.iter().map(|&x| vec![BigInt::from(x)]).collect()).unwrap()
        };
        let s = vec![(seq(&[0, 1]), 0), (seq(&[0, -1]), 0)];
        assert!(membership_periodic(&s, &BigInt::from(1000), &z, 100).unwrap());
        let s = vec![(seq(&[1]), 0), (seq(&[-1, 0]), 0)];
        assert!(membership_periodic(&s, &BigInt::from(1), &z, 100).unwrap());
        assert!(!membership_periodic(&s, &BigInt::from(2), &z, 100).unwrap());
        let s = vec![(seq(&[0, 0, 0]), 0)];
        assert!(membership_periodic(&s, &(BigInt::one() << 70u32), &z, 100).unwrap());
        let s = vec![(seq(&[0; 7]), 0), (seq(&[0; 11]), 0), (seq(&[0; 13]), 0)];
        assert!(matches!(
            membership_periodic(&s, &BigInt::from(10_000), &z, 100),
            Err(Error::MembershipCapExceeded { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let z = IntegerBackend::new(1);
        let huge = BigInt::one() << 90u32;
        let v = PowerWord::parse(&format!("(bbtbT tt)^{huge} (bbtbT tt)^-{huge}")).unwrap();
        assert!(solve_wreath(&v, &z).unwrap());
        let v = PowerWord::parse(&format!("({EXAMPLE})^8")).unwrap();
        let inverse = crate::free_words::invert(&v.expand(1000).unwrap());
        let mut v2 = v.clone();
        v2.push(inverse, 1);
        assert!(solve_wreath(&v2, &z).unwrap());
        assert!(!solve_wreath(&v, &z).unwrap());
        let v = PowerWord::parse("btBT").unwrap();
        assert!(!solve_wreath(&v, &z).unwrap());
    }

    #[test]
    fn query_word_matches_column() {
        let v = PowerWord::parse(&format!("({EXAMPLE})^8")).unwrap();
        let layout = WreathLayout::new(&v);
        let q = layout.query_word(&BigInt::zero());
        let z = IntegerBackend::new(1);
        let total = q.factors.iter().fold(z.identity(), |acc, f| {
            z.multiply(&acc, &z.pow(&z.eval_word(f.period.letters()), &f.exponent))
        });
        assert_eq!(total, vec![BigInt::from(2)]);
        assert!(layout.query_word(&BigInt::from(100)).factors.is_empty());
    }

    #[test]
    fn zero_shift_factor_is_a_single_power() {
        let v = PowerWord::parse("(bbtaT)^1000000000000").unwrap();
        let layout = WreathLayout::new(&v);
        let q = layout.query_word(&BigInt::zero());
        assert_eq!(q.factors.len(), 1);
        assert_eq!(q.to_string(), "(bb)^1000000000000");
    }

    #[test]
    fn base_selectors() {
        for s in ["z", "z:3", "zmod:7", "free:2", "perm:a5"] {
            let b: BaseGroup = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
        }
        assert!("free:20".parse::<BaseGroup>().is_err());
        assert!("zmod:0".parse::<BaseGroup>().is_err());
        assert!("perm:a6".parse::<BaseGroup>().is_err());
    }

    #[test]
    fn letters_are_validated() {
        let v = PowerWord::parse("ct").unwrap();
        assert!(solve_wreath(&v, &FreeBackend::new(2)).is_err());
        assert!(solve_wreath(&v, &A5Backend).is_err());
    }
}
