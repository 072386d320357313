//! Permutations of five points, enough for the alternating group A5.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::free_words::Letter;

/// `Perm(p)` sends point `i` to `p[i]` (points `0..5`). Products act left to
/// right: `x.then(y)` applies `x` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub [u8; 5]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2, 3, 4]);

    /// A cycle on 1-based points, e.g. `&[1, 2, 3]`.
    pub fn cycle(points: &[u8]) -> Perm {
        let mut p = Self::IDENTITY.0;
        for (i, &x) in points.iter().enumerate() {
            let y = points[(i + 1) % points.len()];
            p[x as usize - 1] = y - 1;
        }
        Perm(p)
    }

    #[must_use]
    pub fn then(&self, other: &Perm) -> Perm {
        let mut out = [0; 5];
        for (i, o) in out.iter_mut().enumerate() {
            *o = other.0[self.0[i] as usize];
        }
        Perm(out)
    }

    #[must_use]
    pub fn inverse(&self) -> Perm {
        let mut out = [0; 5];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u8;
        }
        Perm(out)
    }

    /// `by^-1 · self · by`.
    #[must_use]
    pub fn conjugate(&self, by: &Perm) -> Perm {
        by.inverse().then(self).then(by)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn order(&self) -> u32 {
        let mut x = *self;
        let mut k = 1;
        while !x.is_identity() {
            x = x.then(self);
            k += 1;
        }
        k
    }

    pub fn is_even(&self) -> bool {
        let mut seen = [false; 5];
        let mut transpositions = 0;
        for start in 0..5 {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }

    pub fn is_five_cycle(&self) -> bool {
        self.order() == 5 && (0..5).all(|i| self.0[i] as usize != i)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = [false; 5];
        let mut wrote = false;
        for start in 0..5 {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.0[i] as usize;
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Image of generator `a`.
pub fn a5_gen_a() -> Perm {
    Perm::cycle(&[1, 2, 3, 4, 5])
}

/// Image of generator `b`.
pub fn a5_gen_b() -> Perm {
    Perm::cycle(&[1, 2, 3])
}

/// Letters `a`, `b` and their inverses; `None` for anything else.
pub fn a5_letter(l: Letter) -> Option<Perm> {
    let g = match l.generator() {
        0 => a5_gen_a(),
        1 => a5_gen_b(),
        _ => return None,
    };
    Some(if l.is_inverse() { g.inverse() } else { g })
}

/// Shortest word over `a, A, b, B` for every element of A5.
pub fn a5_words() -> &'static HashMap<Perm, Vec<Letter>> {
    static TABLE: OnceLock<HashMap<Perm, Vec<Letter>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let gens: Vec<Letter> = [(0, false), (0, true), (1, false), (1, true)]
            .iter()
            .map(|&(g, inv)| Letter::new(g, inv))
            .collect();
        let mut table = HashMap::new();
        table.insert(Perm::IDENTITY, Vec::new());
        let mut queue = VecDeque::from([Perm::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            let w = table[&x].clone();
            for &l in &gens {
                let y = x.then(&a5_letter(l).unwrap());
                if let Entry::Vacant(e) = table.entry(y) {
                    let mut wy = w.clone();
                    wy.push(l);
                    e.insert(wy);
                    queue.push_back(y);
                }
            }
        }
        table
    })
}

pub fn a5_elements() -> Vec<Perm> {
    let mut v: Vec<Perm> = a5_words().keys().copied().collect();
    v.sort();
    v
}
