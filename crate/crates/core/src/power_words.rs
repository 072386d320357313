//! Power words (the succinct input) and symbolic words over the extended
//! alphabet of power letters and reduced blocks.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, ParseError, Result};
use crate::free_words::{invert, Letter, OmegaWord, ReducedWord, Word};

/// Arbitrary-precision signed exponent.
pub type BigExponent = BigInt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub period: Word,
    pub exponent: BigExponent,
}

impl Factor {
    pub fn new(period: Word, exponent: impl Into<BigInt>) -> Self {
        Factor {
            period,
            exponent: exponent.into(),
        }
    }

    /// Number of letters in the literal expansion.
    pub fn expanded_len(&self) -> BigInt {
        self.exponent.abs() * self.period.len()
    }
}

/// `p_1^x_1 ... p_n^x_n` as raw input: periods need not be reduced and
/// exponents may be zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PowerWord {
    pub factors: Vec<Factor>,
}

impl PowerWord {
    pub fn new(factors: Vec<Factor>) -> Self {
        PowerWord { factors }
    }

    pub fn from_word(w: Word) -> Self {
        PowerWord {
            factors: vec![Factor::new(w, 1)],
        }
    }

    pub fn push(&mut self, period: Word, exponent: impl Into<BigInt>) {
        self.factors.push(Factor::new(period, exponent));
    }

    pub fn extend(&mut self, other: PowerWord) {
        self.factors.extend(other.factors);
    }

    /// Parses `(word)^exp` atoms and plain letter runs; whitespace is ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::new(text).parse()
    }

    /// Inverse element: factors reversed, exponents negated.
    #[must_use]
    pub fn inverse(&self) -> PowerWord {
        PowerWord {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Factor::new(f.period.clone(), -&f.exponent))
                .collect(),
        }
    }

    pub fn expanded_len(&self) -> BigInt {
        self.factors.iter().map(Factor::expanded_len).sum()
    }

    /// Literal expansion, refused beyond `cap` letters.
    pub fn expand(&self, cap: u64) -> Result<Word> {
        let needed = self.expanded_len();
        if needed > BigInt::from(cap) {
            return Err(Error::CapExceeded {
                needed: needed.to_string(),
                cap,
            });
        }
        let mut out = Vec::with_capacity(needed.to_usize().unwrap_or(0));
        for f in &self.factors {
            let k = f.exponent.abs().to_usize().expect("bounded by cap");
            let p = if f.exponent.is_negative() {
                invert(&f.period)
            } else {
                f.period.clone()
            };
            for _ in 0..k {
                out.extend_from_slice(p.letters());
            }
        }
        Ok(Word(out))
    }

    pub fn rank(&self) -> u32 {
        self.factors.iter().map(|f| f.period.rank()).max().unwrap_or(0)
    }

    pub fn max_period_len(&self) -> usize {
        self.factors.iter().map(|f| f.period.len()).max().unwrap_or(0)
    }

    /// Total size of the succinct encoding: period letters plus exponent bits.
    pub fn input_size(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| f.period.len() as u64 + f.exponent.bits().max(1))
            .sum()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.factors.iter().flat_map(|f| f.period.letters().iter().copied())
    }
}

impl fmt::Display for PowerWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut prev_plain = false;
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let plain = factor.exponent.is_one() && !factor.period.is_empty() && !prev_plain;
            if plain {
                write!(f, "{}", factor.period)?;
            } else {
                write!(f, "({})^{}", factor.period, factor.exponent)?;
            }
            prev_plain = plain;
        }
        Ok(())
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(o, _)| o)
            .unwrap_or_else(|| self.chars.last().map(|&(o, c)| o + c.len_utf8()).unwrap_or(0))
    }

    fn letters(&mut self) -> Vec<Letter> {
        let mut out = Vec::new();
        while let Some(l) = self.peek().and_then(Letter::from_char) {
            out.push(l);
            self.pos += 1;
        }
        out
    }

    fn expect(&mut self, c: char, what: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(ParseError::Expected {
                offset: self.offset(),
                expected: what,
            }),
            None => Err(ParseError::UnexpectedEnd(what)),
        }
    }

    fn exponent(&mut self) -> Result<BigInt, ParseError> {
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        let start = self.pos;
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return match self.peek() {
                None => Err(ParseError::UnexpectedEnd("exponent digits")),
                Some(_) => {
                    self.pos = start;
                    Err(ParseError::Expected {
                        offset: self.offset(),
                        expected: "exponent digits",
                    })
                }
            };
        }
        let value: BigInt = digits.parse().expect("ascii digits");
        Ok(if negative { -value } else { value })
    }

    fn parse(mut self) -> Result<PowerWord, ParseError> {
        let mut pw = PowerWord::default();
        while let Some(c) = self.peek() {
            if c == '(' {
                self.pos += 1;
                let period = self.letters();
                self.expect(')', "')'")?;
                self.expect('^', "'^'")?;
                let e = self.exponent()?;
                pw.push(Word(period), e);
            } else if Letter::from_char(c).is_some() {
                let run = self.letters();
                pw.push(Word(run), 1);
            } else {
                return Err(ParseError::UnexpectedChar {
                    offset: self.offset(),
                    found: c,
                });
            }
        }
        Ok(pw)
    }
}

/// A letter of the extended alphabet: a power of a canonical period with a
/// nonzero exponent, or a nonempty reduced block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymbolicLetter {
    Power {
        period: OmegaWord,
        exponent: BigExponent,
    },
    Block(ReducedWord),
}

impl SymbolicLetter {
    /// Panics on a zero exponent.
    pub fn power(period: OmegaWord, exponent: BigExponent) -> Self {
        assert!(!exponent.is_zero(), "power letter with zero exponent");
        SymbolicLetter::Power { period, exponent }
    }

    /// Panics on an empty block.
    pub fn block(word: ReducedWord) -> Self {
        assert!(!word.is_empty(), "empty block letter");
        SymbolicLetter::Block(word)
    }

    /// Letters needed to write the symbol, ignoring the exponent.
    pub fn lambda(&self) -> usize {
        match self {
            SymbolicLetter::Power { period, .. } => period.len(),
            SymbolicLetter::Block(w) => w.len(),
        }
    }

    pub fn is_power(&self) -> bool {
        matches!(self, SymbolicLetter::Power { .. })
    }

    pub fn sigma_len(&self) -> BigInt {
        match self {
            SymbolicLetter::Power { period, exponent } => exponent.abs() * period.len(),
            SymbolicLetter::Block(w) => BigInt::from(w.len()),
        }
    }

    fn write_into(&self, out: &mut Vec<Letter>) {
        match self {
            SymbolicLetter::Power { period, exponent } => {
                let k = exponent.abs().to_usize().expect("bounded by cap");
                let p: Vec<Letter> = if exponent.is_negative() {
                    period.as_reduced().inverse().into_letters()
                } else {
                    period.to_vec()
                };
                for _ in 0..k {
                    out.extend_from_slice(&p);
                }
            }
            SymbolicLetter::Block(w) => out.extend_from_slice(w),
        }
    }
}

impl fmt::Display for SymbolicLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicLetter::Power { period, exponent } => write!(f, "({period})^{exponent}"),
            SymbolicLetter::Block(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolicWord {
    pub letters: Vec<SymbolicLetter>,
}

impl SymbolicWord {
    pub fn new(letters: Vec<SymbolicLetter>) -> Self {
        SymbolicWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Length over the plain alphabet after full expansion.
    pub fn sigma_len(&self) -> BigInt {
        self.letters.iter().map(SymbolicLetter::sigma_len).sum()
    }

    /// Literal expansion, refused beyond `cap` letters.
    pub fn project(&self, cap: u64) -> Result<Word> {
        let needed = self.sigma_len();
        if needed > BigInt::from(cap) {
            return Err(Error::CapExceeded {
                needed: needed.to_string(),
                cap,
            });
        }
        let mut out = Vec::with_capacity(needed.to_usize().unwrap_or(0));
        for l in &self.letters {
            l.write_into(&mut out);
        }
        Ok(Word(out))
    }

    /// Sum of per-symbol lengths, exponents ignored.
    pub fn lambda(&self) -> usize {
        self.letters.iter().map(SymbolicLetter::lambda).sum()
    }

    /// Largest per-symbol length.
    pub fn mu(&self) -> usize {
        self.letters.iter().map(SymbolicLetter::lambda).max().unwrap_or(0)
    }

    /// `(letters, power letters)`.
    pub fn measure_delta(&self) -> (usize, usize) {
        (
            self.letters.len(),
            self.letters.iter().filter(|l| l.is_power()).count(),
        )
    }

    /// Reads the symbolic word back as a raw power word.
    pub fn to_power_word(&self) -> PowerWord {
        PowerWord {
            factors: self
                .letters
                .iter()
                .map(|l| match l {
                    SymbolicLetter::Power { period, exponent } => {
                        Factor::new(period.to_word(), exponent.clone())
                    }
                    SymbolicLetter::Block(w) => Factor::new(w.to_word(), BigInt::one()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
