//! Canonical form `s_0 p_1^x_1 s_1 ... p_n^x_n s_n` with canonical periods
//! and freely reduced interstitial blocks.

use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::free_words::{
    cyclic_reduce, free_reduce, omega_normalize, primitive_root, push_reducing, Letter,
    OmegaWord, ReducedWord,
};
use crate::power_words::{PowerWord, SymbolicLetter, SymbolicWord};

/// A symbolic word with no two adjacent blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonicalForm(SymbolicWord);

impl CanonicalForm {
    pub fn as_symbolic(&self) -> &SymbolicWord {
        &self.0
    }

    pub fn into_symbolic(self) -> SymbolicWord {
        self.0
    }

    /// Checks block alternation, block reduction and nonemptiness.
    pub fn is_well_formed(&self) -> bool {
        let blocks_ok = self.0.letters.iter().all(|l| match l {
            SymbolicLetter::Block(w) => !w.is_empty(),
            SymbolicLetter::Power { exponent, .. } => !exponent.is_zero(),
        });
        let alternating = self
            .0
            .letters
            .windows(2)
            .all(|p| p[0].is_power() || p[1].is_power());
        blocks_ok && alternating
    }
}

impl Deref for CanonicalForm {
    type Target = SymbolicWord;
    fn deref(&self) -> &SymbolicWord {
        &self.0
    }
}

/// Powers spelling at most this many letters are written out, per rank.
pub const DEMOTION_PER_GENERATOR: usize = 4;

pub fn default_threshold(rank: u32) -> usize {
    DEMOTION_PER_GENERATOR * rank.max(1) as usize
}

pub fn preprocess(v: &PowerWord) -> CanonicalForm {
    preprocess_with(v, default_threshold(v.rank()))
}

pub fn preprocess_with(v: &PowerWord, threshold: usize) -> CanonicalForm {
    let mut out = Builder::default();
    for f in &v.factors {
        if f.exponent.is_zero() {
            continue;
        }
        out.push_power(&free_reduce(&f.period), f.exponent.clone(), threshold);
    }
    let mut word = out.finish();
    // Blocks whose cyclic core is too long to be demoted would turn into
    // powers on a second pass; do that now.
    while let Some(i) = word.letters.iter().position(|l| match l {
        SymbolicLetter::Block(w) => cyclic_reduce(w).1.len() > threshold,
        _ => false,
    }) {
        let SymbolicLetter::Block(w) = word.letters[i].clone() else {
            unreachable!()
        };
        let mut b = Builder::default();
        b.push_power(&w, BigInt::one(), threshold);
        let replacement = b.finish().letters;
        word.letters.splice(i..=i, replacement);
    }
    CanonicalForm(word)
}

/// Expands powers spelling at most `threshold` letters and merges blocks.
pub fn demote_small_powers(u: &SymbolicWord, threshold: usize) -> SymbolicWord {
    let mut out = Builder::default();
    for l in &u.letters {
        match l {
            SymbolicLetter::Block(w) => out.push_block(w),
            SymbolicLetter::Power { period, exponent } => {
                out.push_omega(period.as_reduced(), exponent.clone(), threshold)
            }
        }
    }
    out.finish()
}

#[derive(Default)]
struct Builder {
    letters: Vec<SymbolicLetter>,
    pending: Vec<Letter>,
}

impl Builder {
    fn push_block(&mut self, w: &[Letter]) {
        push_reducing(&mut self.pending, w);
    }

    fn flush(&mut self) {
        if !self.pending.is_empty() {
            let w = ReducedWord::new_unchecked(std::mem::take(&mut self.pending));
            self.letters.push(SymbolicLetter::Block(w));
        }
    }

    /// `q` freely reduced, exponent nonzero.
    fn push_power(&mut self, q: &ReducedWord, exponent: BigInt, threshold: usize) {
        if q.is_empty() {
            return;
        }
        let (outer, core) = cyclic_reduce(q);
        let (root, k) = primitive_root(&core);
        let exponent = exponent * k;
        let n = omega_normalize(&root);
        let exponent = if n.flipped { -exponent } else { exponent };
        // q^x = outer · conj^-1 · omega^x' · conj · outer^-1
        let left = outer.mul(&n.conjugator.inverse());
        let right = n.conjugator.mul(&outer.inverse());
        self.push_block(&left);
        self.push_omega(n.omega.as_reduced(), exponent, threshold);
        self.push_block(&right);
    }

    fn push_omega(&mut self, omega: &ReducedWord, exponent: BigInt, threshold: usize) {
        let size = exponent.abs() * omega.len();
        if size <= BigInt::from(threshold) {
            let k = exponent.abs().to_usize().expect("below threshold");
            let p = if exponent.is_negative() {
                omega.inverse()
            } else {
                omega.clone()
            };
            for _ in 0..k {
                self.push_block(&p);
            }
        } else {
            self.flush();
            let omega = OmegaWord::new(omega.clone()).expect("canonical period");
            self.letters.push(SymbolicLetter::power(omega, exponent));
        }
    }

    fn finish(mut self) -> SymbolicWord {
        self.flush();
        SymbolicWord::new(self.letters)
    }
}
