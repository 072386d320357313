//! Brute-force reference solvers and seeded random instances.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::free_words::{free_reduce, invert_letters, Letter, Word};
use crate::grigorchuk::{solve_grigorchuk, wp_grigorchuk, GrigWord};
use crate::power_words::{Factor, PowerWord};
use crate::preprocess::preprocess;
use crate::rewrite_t::is_identity_t;
use crate::shorten::solve_free;
use crate::wreath::{
    check_letters, eval_wreath, solve_wreath_on, A5Backend, BaseGroup, FreeBackend, GroupBackend,
    IntegerBackend, ModularBackend, WreathOptions, SHIFT_GENERATOR,
};

pub const DEFAULT_CAP: u64 = 1_000_000;

pub fn brute_solve_free(v: &PowerWord, cap: u64) -> Result<bool> {
    Ok(free_reduce(&v.expand(cap)?).is_empty())
}

pub fn brute_solve_wreath<B: GroupBackend>(v: &PowerWord, backend: &B, cap: u64) -> Result<bool> {
    check_letters(v, backend)?;
    let w = v.expand(cap)?;
    Ok(eval_wreath(w.letters(), backend).is_identity())
}

pub fn brute_solve_wreath_on(v: &PowerWord, base: &BaseGroup, cap: u64) -> Result<bool> {
    match base {
        BaseGroup::Integers(k) => brute_solve_wreath(v, &IntegerBackend::new(*k), cap),
        BaseGroup::Modular(q) => brute_solve_wreath(v, &ModularBackend::new(*q), cap),
        BaseGroup::Free(r) => brute_solve_wreath(v, &FreeBackend::new(*r), cap),
        BaseGroup::A5 => brute_solve_wreath(v, &A5Backend, cap),
    }
}

pub fn brute_solve_grigorchuk(v: &PowerWord, cap: u64) -> Result<bool> {
    let w = v.expand(cap)?;
    Ok(wp_grigorchuk(&GrigWord::from_letters(w.letters())?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceGroup {
    Free,
    Wreath(BaseGroup),
    Grigorchuk,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpec {
    pub group: InstanceGroup,
    /// Number of base generators used.
    pub rank: u32,
    pub max_factors: usize,
    pub max_period_len: usize,
    pub max_exponent: BigInt,
    /// Share of instances built as `w · w^-1`.
    pub identity_fraction: f64,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            group: InstanceGroup::Free,
            rank: 2,
            max_factors: 8,
            max_period_len: 6,
            max_exponent: BigInt::from(64),
            identity_fraction: 0.5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub word: PowerWord,
    pub forced_identity: bool,
}

/// Uniform-ish in `[-max, max]`.
fn random_exponent(rng: &mut ChaCha8Rng, max: &BigInt) -> BigInt {
    if let Some(m) = max.to_i64() {
        return BigInt::from(rng.gen_range(-m..=m));
    }
    let mut bytes = vec![0u8; (max.bits() / 8 + 9) as usize];
    rng.fill_bytes(&mut bytes);
    let x = BigInt::from_bytes_le(Sign::Plus, &bytes).mod_floor(&(max * 2 + 1));
    x - max
}

fn base_letters(group: &InstanceGroup, rank: u32) -> Vec<Letter> {
    let (gens, inverses) = match group {
        InstanceGroup::Free => (rank, true),
        InstanceGroup::Wreath(BaseGroup::A5) => (rank.min(2), true),
        InstanceGroup::Wreath(BaseGroup::Free(r)) => (rank.min(*r), true),
        InstanceGroup::Wreath(_) => (rank, true),
        InstanceGroup::Grigorchuk => (4, false),
    };
    let mut out = Vec::new();
    for g in 0..gens.max(1) {
        out.push(Letter::new(g, false));
        if inverses {
            out.push(Letter::new(g, true));
        }
    }
    if matches!(group, InstanceGroup::Wreath(_)) {
        // cursor moves as often as base letters
        let n = out.len();
        for i in 0..n {
            out.push(Letter::new(SHIFT_GENERATOR, i % 2 == 1));
        }
    }
    out
}

fn random_factor(rng: &mut ChaCha8Rng, spec: &InstanceSpec, alphabet: &[Letter]) -> Factor {
    let len = rng.gen_range(1..=spec.max_period_len.max(1));
    let period = (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect();
    Factor::new(Word(period), random_exponent(rng, &spec.max_exponent))
}

fn shift_of(f: &Factor) -> BigInt {
    let s: i64 = f
        .period
        .letters()
        .iter()
        .filter(|l| l.generator() == SHIFT_GENERATOR)
        .map(|l| l.sign() as i64)
        .sum();
    &f.exponent * s
}

/// The `index`-th instance of the stream selected by `spec.seed`.
pub fn generate_nth(spec: &InstanceSpec, index: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let alphabet = base_letters(&spec.group, spec.rank);
    let max_factors = spec.max_factors.max(1);
    let forced = rng.gen_bool(spec.identity_fraction);
    if forced {
        if max_factors < 2 {
            let f = random_factor(&mut rng, spec, &alphabet);
            return Instance {
                word: PowerWord::new(vec![Factor::new(f.period, 0)]),
                forced_identity: true,
            };
        }
        let k = rng.gen_range(1..=max_factors / 2);
        let w = PowerWord::new((0..k).map(|_| random_factor(&mut rng, spec, &alphabet)).collect());
        let mut factors = w.factors.clone();
        for f in w.inverse().factors {
            // (p)^-x or (p^-1)^x
            if rng.gen_bool(0.5) {
                factors.push(Factor::new(Word(invert_letters(f.period.letters())), -f.exponent));
            } else {
                factors.push(f);
            }
        }
        if factors.len() < max_factors {
            let i = rng.gen_range(0..factors.len());
            let f = factors[i].clone();
            let part = random_exponent(&mut rng, &spec.max_exponent);
            factors[i] = Factor::new(f.period.clone(), part.clone());
            factors.insert(i + 1, Factor::new(f.period, f.exponent - part));
        }
        let r = rng.gen_range(0..factors.len());
        factors.rotate_left(r);
        return Instance {
            word: PowerWord::new(factors),
            forced_identity: true,
        };
    }
    let n = rng.gen_range(1..=max_factors);
    let mut factors: Vec<Factor> = (0..n).map(|_| random_factor(&mut rng, spec, &alphabet)).collect();
    if matches!(spec.group, InstanceGroup::Wreath(_)) && rng.gen_bool(0.5) {
        // return the cursor to the origin so the lamp check is exercised
        let shift: BigInt = factors.iter().map(shift_of).sum();
        if !shift.is_zero() {
            let back = Factor::new(Word(vec![Letter::new(SHIFT_GENERATOR, false)]), -shift);
            if factors.len() == max_factors {
                factors.pop();
                let shift: BigInt = factors.iter().map(shift_of).sum();
                factors.push(Factor::new(back.period, -shift));
            } else {
                factors.push(back);
            }
        }
    }
    Instance {
        word: PowerWord::new(factors),
        forced_identity: false,
    }
}

pub fn generate(spec: &InstanceSpec) -> PowerWord {
    generate_nth(spec, 0).word
}

pub fn generate_many(spec: &InstanceSpec, count: u64) -> impl Iterator<Item = Instance> + '_ {
    (0..count).map(move |i| generate_nth(spec, i))
}

/// Verdicts of the fast solver, the rewriting normal form (free groups only)
/// and brute force (`None` above the cap).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub solver: bool,
    pub symbolic: Option<bool>,
    pub brute: Option<bool>,
}

impl Verdicts {
    pub fn agree(&self) -> bool {
        [self.symbolic, self.brute]
            .iter()
            .flatten()
            .all(|&v| v == self.solver)
    }
}

fn within_cap(r: Result<bool>) -> Result<Option<bool>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn differential(group: &InstanceGroup, v: &PowerWord, cap: u64) -> Result<Verdicts> {
    Ok(match group {
        InstanceGroup::Free => Verdicts {
            solver: solve_free(v)?,
            symbolic: Some(is_identity_t(preprocess(v).as_symbolic())?),
            brute: within_cap(brute_solve_free(v, cap))?,
        },
        InstanceGroup::Wreath(base) => Verdicts {
            solver: solve_wreath_on(v, base, &WreathOptions::default())?.identity,
            symbolic: None,
            brute: within_cap(brute_solve_wreath_on(v, base, cap))?,
        },
        InstanceGroup::Grigorchuk => Verdicts {
            solver: solve_grigorchuk(v)?,
            symbolic: None,
            brute: within_cap(brute_solve_grigorchuk(v, cap))?,
        },
    })
}
