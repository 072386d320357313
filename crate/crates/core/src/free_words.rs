//! Plain words over a free basis and the operations the solvers build on:
//! inversion, free and cyclic reduction, primitive roots and the canonical
//! period representative (the set `Omega`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use crate::error::ParseError;

/// Number of generators addressable through the text syntax (`a`..`z`).
pub const MAX_GENERATORS: u32 = 26;

/// A generator or its inverse.
///
/// Stored as `2 * generator + inverse`, so the derived ordering is the fixed
/// letter order `a < A < b < B < ...` used for lexicographic comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Self {
        debug_assert!(generator < MAX_GENERATORS);
        Letter(2 * generator + inverse as u32)
    }

    pub fn positive(generator: u32) -> Self {
        Self::new(generator, false)
    }

    pub fn generator(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// `+1` for a generator, `-1` for an inverse letter.
    pub fn sign(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    #[must_use]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as u32 - 'a' as u32, false)),
            'A'..='Z' => Some(Letter::new(c as u32 - 'A' as u32, true)),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A finite, possibly non-reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses the shared text syntax: `a`-`z` generators, `A`-`Z` inverses,
    /// whitespace ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut letters = Vec::with_capacity(text.len());
        for (offset, c) in text.char_indices() {
            if c.is_whitespace() {
                continue;
            }
            match Letter::from_char(c) {
                Some(l) => letters.push(l),
                None => return Err(ParseError::UnexpectedChar { offset, found: c }),
            }
        }
        Ok(Word(letters))
    }

    /// Number of generators needed to spell this word (largest index + 1).
    pub fn rank(&self) -> u32 {
        self.0.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    /// `w^k` for `k >= 0`, written out.
    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// A freely reduced word: no factor `x x^-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord(Vec::new())
    }

    /// Checks the reduction invariant; returns `None` if it fails.
    pub fn new(letters: Vec<Letter>) -> Option<Self> {
        if is_freely_reduced(&letters) {
            Some(ReducedWord(letters))
        } else {
            None
        }
    }

    pub(crate) fn new_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(is_freely_reduced(&letters));
        ReducedWord(letters)
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn into_word(self) -> Word {
        Word(self.0)
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    #[must_use]
    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(invert_letters(&self.0))
    }

    /// Product in the free group.
    #[must_use]
    pub fn mul(&self, other: &ReducedWord) -> ReducedWord {
        let mut out = self.0.clone();
        push_reducing(&mut out, &other.0);
        ReducedWord(out)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) => self.0.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }
}

impl Deref for ReducedWord {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A word in the canonical period set: nonempty, freely and cyclically
/// reduced, primitive, and lexicographically least among the rotations of
/// itself and of its inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaWord(ReducedWord);

impl OmegaWord {
    /// Validates all four conditions.
    pub fn new(word: ReducedWord) -> Option<Self> {
        if is_omega(&word) {
            Some(OmegaWord(word))
        } else {
            None
        }
    }

    pub fn as_reduced(&self) -> &ReducedWord {
        &self.0
    }

    pub fn to_word(&self) -> Word {
        self.0.to_word()
    }
}

impl Deref for OmegaWord {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl fmt::Display for OmegaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn invert_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

pub fn invert(w: &Word) -> Word {
    Word(invert_letters(&w.0))
}

fn is_freely_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|p| p[0] != p[1].inverse())
}

/// Appends `tail` to an already reduced `stack`, cancelling as it goes.
pub(crate) fn push_reducing(stack: &mut Vec<Letter>, tail: &[Letter]) {
    for &l in tail {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
}

pub fn free_reduce(w: &Word) -> ReducedWord {
    free_reduce_letters(&w.0)
}

pub fn free_reduce_letters(letters: &[Letter]) -> ReducedWord {
    let mut stack = Vec::with_capacity(letters.len());
    push_reducing(&mut stack, letters);
    ReducedWord(stack)
}

/// Splits `w = c · core · c^-1` with `c` maximal. The core is cyclically
/// reduced.
pub fn cyclic_reduce(w: &ReducedWord) -> (ReducedWord, ReducedWord) {
    let n = w.len();
    let mut k = 0;
    while 2 * k + 1 < n && w[k] == w[n - 1 - k].inverse() {
        k += 1;
    }
    (
        ReducedWord(w[..k].to_vec()),
        ReducedWord(w[k..n - k].to_vec()),
    )
}

/// Smallest period of `s` via the border (failure) function.
pub fn smallest_period<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    n - fail[n - 1]
}

/// `w = root^multiplicity` with `root` primitive.
pub fn primitive_root(w: &ReducedWord) -> (ReducedWord, usize) {
    let n = w.len();
    if n == 0 {
        return (ReducedWord::empty(), 1);
    }
    let p = smallest_period(w);
    let root_len = if n.is_multiple_of(p) { p } else { n };
    (ReducedWord(w[..root_len].to_vec()), n / root_len)
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k % n
}

fn rotate(s: &[Letter], start: usize) -> Vec<Letter> {
    let mut v = Vec::with_capacity(s.len());
    v.extend_from_slice(&s[start..]);
    v.extend_from_slice(&s[..start]);
    v
}

/// Result of bringing a primitive cyclically reduced word into `Omega`.
///
/// For every integer `x`:
/// `p^x = conjugator^-1 · omega^(±x) · conjugator` in the free group, where
/// the sign is `-` exactly when `flipped` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaNormal {
    pub omega: OmegaWord,
    pub conjugator: ReducedWord,
    pub flipped: bool,
}

/// Picks the least rotation of `p` or `p^-1`, preferring `p` on ties.
///
/// `p` must be nonempty, cyclically reduced and primitive.
pub fn omega_normalize(p: &ReducedWord) -> OmegaNormal {
    assert!(!p.is_empty(), "omega_normalize on empty word");
    debug_assert!(p.is_cyclically_reduced());
    let inv = p.inverse();
    let rp = least_rotation(p);
    let ri = least_rotation(&inv);
    let cand_p = rotate(p, rp);
    let cand_i = rotate(&inv, ri);
    let (flipped, base, start, omega) = if cand_p <= cand_i {
        (false, &p[..], rp, cand_p)
    } else {
        (true, &inv[..], ri, cand_i)
    };
    // base = v u with v = base[..start]; omega = u v, so base = v · omega · v^-1
    // and base^x = u^-1 · omega^x · u. Use the shorter of the two conjugators.
    let v = &base[..start];
    let u = &base[start..];
    let conjugator = if u.len() <= v.len() {
        u.to_vec()
    } else {
        invert_letters(v)
    };
    OmegaNormal {
        omega: OmegaWord(ReducedWord(omega)),
        conjugator: ReducedWord(conjugator),
        flipped,
    }
}

pub fn is_omega(w: &ReducedWord) -> bool {
    if w.is_empty() || !is_freely_reduced(w) || !w.is_cyclically_reduced() {
        return false;
    }
    if smallest_period(w) != w.len() && w.len().is_multiple_of(smallest_period(w)) {
        return false;
    }
    let inv = w.inverse();
    (0..w.len()).all(|i| w[..] <= rotate(w, i)[..] && w[..] <= rotate(&inv, i)[..])
}

/// Pure lexicographic order under the fixed letter order; a proper prefix is
/// smaller.
pub fn lex_compare(u: &[Letter], v: &[Letter]) -> Ordering {
    u.cmp(v)
}
