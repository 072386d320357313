//! Symbolic rewriting over powers and blocks. Five rules act on adjacent
//! letters:
//!
//! - `PP`: `p^x p^y -> p^(x+y)`
//! - `PQ`: `p^x q^y -> p^(x-d) r q^(y-e)` for distinct periods
//! - `BB`: `s t -> red(st)`
//! - `PB`: `p^x s -> p^(x-d) r`
//! - `BP`: `s q^y -> r q^(y-e)`
//!
//! The three mixed rules fire only when the junction cancels. Irreducible
//! words project to freely reduced words, so a word is the identity iff it
//! normalizes to the empty word.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::free_words::{Letter, OmegaWord, ReducedWord};
use crate::power_words::{SymbolicLetter, SymbolicWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    PP,
    PQ,
    BB,
    PB,
    BP,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleKind::PP => "PP",
            RuleKind::PQ => "PQ",
            RuleKind::BB => "BB",
            RuleKind::PB => "PB",
            RuleKind::BP => "BP",
        };
        f.write_str(s)
    }
}

/// One rule firing on the letters at `position` and `position + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub kind: RuleKind,
    pub position: usize,
    /// Exponent removed from the left power (`PQ`, `PB`).
    pub d: Option<BigInt>,
    /// Exponent removed from the right power (`PQ`, `BP`).
    pub e: Option<BigInt>,
    /// Middle residue (`PQ`, `PB`, `BP`); may be empty except in `PQ`.
    pub r: Option<ReducedWord>,
    /// Letters that replace the pair.
    pub replacement: Vec<SymbolicLetter>,
}

fn signed_period(period: &OmegaWord, exponent: &BigInt) -> Vec<Letter> {
    if exponent.is_negative() {
        period.as_reduced().inverse().into_letters()
    } else {
        period.to_vec()
    }
}

fn first_letter(l: &SymbolicLetter) -> Letter {
    match l {
        SymbolicLetter::Power { period, exponent } => *signed_period(period, exponent).first().unwrap(),
        SymbolicLetter::Block(w) => w[0],
    }
}

fn last_letter(l: &SymbolicLetter) -> Letter {
    match l {
        SymbolicLetter::Power { period, exponent } => *signed_period(period, exponent).last().unwrap(),
        SymbolicLetter::Block(w) => *w.last().unwrap(),
    }
}

fn small(x: &BigInt, bound: usize) -> usize {
    // min(|x|, bound) as a machine integer
    x.abs().to_usize().map_or(bound, |v| v.min(bound))
}

fn sign(x: &BigInt) -> BigInt {
    if x.is_negative() {
        BigInt::from(-1)
    } else {
        BigInt::from(1)
    }
}

fn push_power(out: &mut Vec<SymbolicLetter>, period: &OmegaWord, exponent: BigInt) {
    if !exponent.is_zero() {
        out.push(SymbolicLetter::power(period.clone(), exponent));
    }
}

fn push_block(out: &mut Vec<SymbolicLetter>, letters: Vec<Letter>) {
    if !letters.is_empty() {
        out.push(SymbolicLetter::Block(ReducedWord::new_unchecked(letters)));
    }
}

/// Reduces `left · right` and reports how many letters of `left` survive.
fn junction(left: &[Letter], right: &[Letter]) -> (usize, Vec<Letter>) {
    let mut i = left.len();
    let mut j = 0;
    while i > 0 && j < right.len() && left[i - 1] == right[j].inverse() {
        i -= 1;
        j += 1;
    }
    let mut res = left[..i].to_vec();
    res.extend_from_slice(&right[j..]);
    (i, res)
}

/// The rule applicable to the pair at `pos`, if any.
pub fn application_at(u: &SymbolicWord, pos: usize) -> Option<RuleApplication> {
    let left = u.letters.get(pos)?;
    let right = u.letters.get(pos + 1)?;
    use SymbolicLetter::{Block, Power};
    if let (Power { period: p, exponent: x }, Power { period: q, exponent: y }) = (left, right) {
        if p == q {
            let mut replacement = Vec::new();
            push_power(&mut replacement, p, x + y);
            return Some(RuleApplication {
                kind: RuleKind::PP,
                position: pos,
                d: None,
                e: None,
                r: None,
                replacement,
            });
        }
    }
    if last_letter(left) != first_letter(right).inverse() {
        return None;
    }
    Some(match (left, right) {
        (Power { period: p, exponent: x }, Power { period: q, exponent: y }) => {
            let a = small(x, q.len() + 1);
            let b = small(y, p.len() + 1);
            let ps = signed_period(p, x);
            let qs = signed_period(q, y);
            let left_w = ps.repeat(a);
            let right_w = qs.repeat(b);
            let (kept_left, res) = junction(&left_w, &right_w);
            let kept_right = res.len() - kept_left;
            let a2 = kept_left / p.len();
            let b2 = kept_right / q.len();
            let d = sign(x) * (a - a2);
            let e = sign(y) * (b - b2);
            let r = res[a2 * p.len()..res.len() - b2 * q.len()].to_vec();
            let mut replacement = Vec::new();
            push_power(&mut replacement, p, x - &d);
            push_block(&mut replacement, r.clone());
            push_power(&mut replacement, q, y - &e);
            RuleApplication {
                kind: RuleKind::PQ,
                position: pos,
                d: Some(d),
                e: Some(e),
                r: Some(ReducedWord::new_unchecked(r)),
                replacement,
            }
        }
        (Block(s), Block(t)) => {
            let (_, res) = junction(s, t);
            let mut replacement = Vec::new();
            push_block(&mut replacement, res);
            RuleApplication {
                kind: RuleKind::BB,
                position: pos,
                d: None,
                e: None,
                r: None,
                replacement,
            }
        }
        (Power { period: p, exponent: x }, Block(s)) => {
            let a = small(x, s.len().div_ceil(p.len()) + 1);
            let left_w = signed_period(p, x).repeat(a);
            let (kept, res) = junction(&left_w, s);
            let a2 = kept / p.len();
            let d = sign(x) * (a - a2);
            let r = res[a2 * p.len()..].to_vec();
            let mut replacement = Vec::new();
            push_power(&mut replacement, p, x - &d);
            push_block(&mut replacement, r.clone());
            RuleApplication {
                kind: RuleKind::PB,
                position: pos,
                d: Some(d),
                e: None,
                r: Some(ReducedWord::new_unchecked(r)),
                replacement,
            }
        }
        (Block(s), Power { period: q, exponent: y }) => {
            let b = small(y, s.len().div_ceil(q.len()) + 1);
            let right_w = signed_period(q, y).repeat(b);
            let (kept_s, res) = junction(s, &right_w);
            let kept_right = res.len() - kept_s;
            let b2 = kept_right / q.len();
            let e = sign(y) * (b - b2);
            let r = res[..res.len() - b2 * q.len()].to_vec();
            let mut replacement = Vec::new();
            push_block(&mut replacement, r.clone());
            push_power(&mut replacement, q, y - &e);
            RuleApplication {
                kind: RuleKind::BP,
                position: pos,
                d: None,
                e: Some(e),
                r: Some(ReducedWord::new_unchecked(r)),
                replacement,
            }
        }
    })
}

/// Leftmost applicable rule; `None` iff `u` is irreducible.
pub fn find_step(u: &SymbolicWord) -> Option<RuleApplication> {
    find_step_from(u, 0)
}

fn find_step_from(u: &SymbolicWord, start: usize) -> Option<RuleApplication> {
    (start..u.len().saturating_sub(1)).find_map(|i| application_at(u, i))
}

/// Applies `app` after recomputing it against `u`.
pub fn apply_step(u: &SymbolicWord, app: &RuleApplication) -> Result<SymbolicWord> {
    let fresh = application_at(u, app.position).ok_or(Error::InvalidApplication {
        position: app.position,
    })?;
    if &fresh != app || (fresh.kind == RuleKind::PQ && fresh.r.as_ref().is_some_and(|r| r.is_empty())) {
        return Err(Error::InvalidApplication {
            position: app.position,
        });
    }
    let mut out = u.clone();
    splice(&mut out, &fresh);
    Ok(out)
}

fn splice(u: &mut SymbolicWord, app: &RuleApplication) {
    u.letters
        .splice(app.position..app.position + 2, app.replacement.iter().cloned());
}

/// One applied step, as reported to a trace sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: usize,
    pub kind: RuleKind,
    pub position: usize,
    pub len_delta: usize,
    pub lambda: usize,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step#{} rule={} pos={} |u|_Δ={} λ={}",
            self.step, self.kind, self.position, self.len_delta, self.lambda
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub word: SymbolicWord,
    pub steps: usize,
}

/// Upper bound on the number of steps from `u`: `2|u| + 4·(power letters)`.
pub fn step_bound(u: &SymbolicWord) -> usize {
    let (n, powers) = u.measure_delta();
    2 * n + 4 * powers
}

pub fn normalize(u: &SymbolicWord) -> Result<Normalized> {
    normalize_traced(u, |_| {})
}

/// Leftmost normalization, calling `sink` after every step.
pub fn normalize_traced(u: &SymbolicWord, mut sink: impl FnMut(&TraceEvent)) -> Result<Normalized> {
    let budget = 6 * u.len();
    let mut word = u.clone();
    let mut steps = 0;
    let mut start = 0;
    while let Some(app) = find_step_from(&word, start) {
        if steps == budget {
            return Err(Error::StepBudgetExceeded { budget });
        }
        splice(&mut word, &app);
        steps += 1;
        sink(&TraceEvent {
            step: steps,
            kind: app.kind,
            position: app.position,
            len_delta: word.len(),
            lambda: word.lambda(),
        });
        start = app.position.saturating_sub(1);
    }
    Ok(Normalized { word, steps })
}

pub fn is_identity_t(u: &SymbolicWord) -> Result<bool> {
    Ok(normalize(u)?.word.is_empty())
}
