//! Word problem and power word problem in the Grigorchuk group.
//!
//! Generators act on the binary tree: `a` swaps the two subtrees and
//! `b = (a, c)`, `c = (a, d)`, `d = (1, b)`. All four are involutions and
//! `{1, b, c, d}` is a Klein four-group.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, ParseError, Result};
use crate::free_words::Letter;
use crate::power_words::PowerWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    B,
    C,
    D,
}

impl Generator {
    pub fn from_index(i: u32) -> Option<Self> {
        Some(match i {
            0 => Generator::A,
            1 => Generator::B,
            2 => Generator::C,
            3 => Generator::D,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::B => 'b',
            Generator::C => 'c',
            Generator::D => 'd',
        }
    }

    // b, c, d as the nonzero elements of (Z/2)^2
    fn klein(self) -> u8 {
        match self {
            Generator::A => unreachable!(),
            Generator::B => 1,
            Generator::C => 2,
            Generator::D => 3,
        }
    }

    fn from_klein(k: u8) -> Option<Self> {
        match k {
            1 => Some(Generator::B),
            2 => Some(Generator::C),
            3 => Some(Generator::D),
            _ => None,
        }
    }

    /// Left and right sections; `None` is the identity.
    fn sections(self) -> (Option<Generator>, Option<Generator>) {
        match self {
            Generator::A => unreachable!(),
            Generator::B => (Some(Generator::A), Some(Generator::C)),
            Generator::C => (Some(Generator::A), Some(Generator::D)),
            Generator::D => (None, Some(Generator::B)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GrigWord(pub Vec<Generator>);

impl GrigWord {
    /// Letters `a`-`d`, uppercase aliases allowed, whitespace ignored.
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let mut out = Vec::new();
        for (offset, ch) in s.char_indices() {
            if ch.is_whitespace() {
                continue;
            }
            let g = match ch.to_ascii_lowercase() {
                'a' => Generator::A,
                'b' => Generator::B,
                'c' => Generator::C,
                'd' => Generator::D,
                c if c.is_ascii_alphabetic() => {
                    return Err(ParseError::LetterOutOfRange {
                        letter: ch,
                        group: "grigorchuk".into(),
                    })
                }
                _ => return Err(ParseError::UnexpectedChar { offset, found: ch }),
            };
            out.push(g);
        }
        Ok(GrigWord(out))
    }

    /// Inverse letters map to the same generator.
    pub fn from_letters(letters: &[Letter]) -> Result<Self, ParseError> {
        letters
            .iter()
            .map(|l| {
                Generator::from_index(l.generator()).ok_or(ParseError::LetterOutOfRange {
                    letter: l.to_char(),
                    group: "grigorchuk".into(),
                })
            })
            .collect::<Result<_, _>>()
            .map(GrigWord)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn repeat(&self, n: usize) -> Self {
        GrigWord(self.0.repeat(n))
    }
}

impl fmt::Display for GrigWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.0 {
            write!(f, "{}", g.to_char())?;
        }
        Ok(())
    }
}

/// Cancels `aa` and multiplies adjacent letters of `{b, c, d}`, giving a word
/// that alternates between `a` and `{b, c, d}`.
pub fn reduce(w: &[Generator]) -> Vec<Generator> {
    let mut out: Vec<Generator> = Vec::with_capacity(w.len());
    for &g in w {
        match (out.last().copied(), g) {
            (Some(Generator::A), Generator::A) => {
                out.pop();
            }
            (Some(top), g) if top != Generator::A && g != Generator::A => {
                out.pop();
                if let Some(k) = Generator::from_klein(top.klein() ^ g.klein()) {
                    out.push(k);
                }
            }
            _ => out.push(g),
        }
    }
    out
}

fn a_count_odd(w: &[Generator]) -> bool {
    w.iter().filter(|&&g| g == Generator::A).count() % 2 == 1
}

/// Sections of a word that fixes the first level.
fn split(w: &[Generator]) -> (Vec<Generator>, Vec<Generator>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut swapped = false;
    for &g in w {
        if g == Generator::A {
            swapped = !swapped;
            continue;
        }
        let (x, y) = g.sections();
        let (x, y) = if swapped { (y, x) } else { (x, y) };
        left.extend(x);
        right.extend(y);
    }
    (left, right)
}

/// Reduced words up to this length are decided by table lookup.
pub const BASE_TABLE_LEN: usize = 8;

fn decide_reduced(r: &[Generator], table: Option<&HashSet<Vec<Generator>>>) -> bool {
    if r.is_empty() {
        return true;
    }
    if a_count_odd(r) || r.len() == 1 {
        return false;
    }
    if let Some(t) = table {
        if r.len() <= BASE_TABLE_LEN {
            return t.contains(r);
        }
    }
    let (left, right) = split(r);
    decide_reduced(&reduce(&left), table) && decide_reduced(&reduce(&right), table)
}

/// Every reduced word of length at most [`BASE_TABLE_LEN`] that is trivial.
pub fn base_table() -> &'static HashSet<Vec<Generator>> {
    static TABLE: OnceLock<HashSet<Vec<Generator>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let non_a = [Generator::B, Generator::C, Generator::D];
        let mut table = HashSet::new();
        let mut layer: Vec<Vec<Generator>> = vec![Vec::new()];
        for _ in 0..BASE_TABLE_LEN {
            let mut next = Vec::new();
            for w in &layer {
                let candidates: &[Generator] = match w.last() {
                    None => &[Generator::A, Generator::B, Generator::C, Generator::D],
                    Some(Generator::A) => &non_a,
                    Some(_) => &[Generator::A],
                };
                for &g in candidates {
                    let mut v = w.clone();
                    v.push(g);
                    if decide_reduced(&v, None) {
                        table.insert(v.clone());
                    }
                    next.push(v);
                }
            }
            layer = next;
        }
        table
    })
}

pub fn wp_grigorchuk(w: &GrigWord) -> bool {
    decide_reduced(&reduce(&w.0), Some(base_table()))
}

pub const DEFAULT_ORDER_CAP_EXPONENT: u32 = 64;

/// Least `2^t` with `w^(2^t) = 1`, by repeated squaring.
pub fn element_order_pow2(w: &GrigWord, cap_exponent: u32) -> Result<BigInt> {
    let mut x = reduce(&w.0);
    let mut t = 0;
    loop {
        if decide_reduced(&x, Some(base_table())) {
            return Ok(BigInt::one() << t);
        }
        if t == cap_exponent {
            return Err(Error::OrderCapExceeded { cap_exponent });
        }
        let doubled = [x.as_slice(), x.as_slice()].concat();
        x = reduce(&doubled);
        t += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrigReport {
    pub identity: bool,
    /// Order of each period.
    pub orders: Vec<BigInt>,
    /// Letters after reducing every exponent modulo the order of its period.
    pub expanded_length: usize,
}

pub fn solve_grigorchuk(v: &PowerWord) -> Result<bool> {
    Ok(solve_grigorchuk_report(v, DEFAULT_ORDER_CAP_EXPONENT, DEFAULT_EXPAND_CAP)?.identity)
}

/// Letters the reduced word may reach before [`Error::CapExceeded`].
pub const DEFAULT_EXPAND_CAP: u64 = 1 << 24;

pub fn solve_grigorchuk_report(v: &PowerWord, cap_exponent: u32, expand_cap: u64) -> Result<GrigReport> {
    let mut word = Vec::new();
    let mut orders = Vec::new();
    for f in &v.factors {
        let p = GrigWord::from_letters(f.period.letters())?;
        let o = element_order_pow2(&p, cap_exponent)?;
        let e = f.exponent.mod_floor(&o);
        orders.push(o);
        if e.is_zero() {
            continue;
        }
        let needed = &e * p.len() + word.len();
        if needed > BigInt::from(expand_cap) {
            return Err(Error::CapExceeded {
                needed: needed.to_string(),
                cap: expand_cap,
            });
        }
        let e = e.to_usize().unwrap();
        word.extend(p.repeat(e).0);
        word = reduce(&word);
    }
    Ok(GrigReport {
        identity: decide_reduced(&word, Some(base_table())),
        orders,
        expanded_length: word.len(),
    })
}
