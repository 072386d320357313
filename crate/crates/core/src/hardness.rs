//! Hard instances from CNF formulas: a formula becomes a power word over a
//! wreath product that is the identity exactly when the formula is
//! unsatisfiable.
//!
//! Cursor position `z` in `[0, M)` with `M` the product of the first `n`
//! primes encodes the valuation "`x_i` true iff `p_i` divides `z`", and by
//! the Chinese remainder theorem every valuation occurs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, ParseError, Result};
use crate::free_words::{Letter, Word};
use crate::perm::{a5_elements, a5_words, Perm};
use crate::power_words::{Factor, PowerWord};
use crate::wreath::SHIFT_GENERATOR;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn holds(&self, valuation: &[bool]) -> bool {
        valuation[self.var] == self.positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    /// `None` if a clause is empty or mentions a variable `>= vars`.
    pub fn new(vars: usize, clauses: Vec<Vec<Literal>>) -> Option<Self> {
        let ok = clauses
            .iter()
            .all(|c| !c.is_empty() && c.iter().all(|l| l.var < vars));
        ok.then_some(Cnf { vars, clauses })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn eval(&self, valuation: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds(valuation)))
    }

    /// Reads the `p cnf <vars> <clauses>` format.
    pub fn parse_dimacs(text: &str) -> Result<Cnf, ParseError> {
        let err = |line: usize, message: String| ParseError::Dimacs { line, message };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            if t.starts_with('%') {
                break;
            }
            if t.starts_with('p') {
                let parts: Vec<&str> = t.split_whitespace().collect();
                if header.is_some() {
                    return Err(err(line, "duplicate header".into()));
                }
                match parts.as_slice() {
                    ["p", "cnf", n, m] => {
                        let n = n.parse().map_err(|_| err(line, format!("bad variable count {n:?}")))?;
                        let m = m.parse().map_err(|_| err(line, format!("bad clause count {m:?}")))?;
                        header = Some((n, m));
                    }
                    _ => return Err(err(line, "expected `p cnf <vars> <clauses>`".into())),
                }
                continue;
            }
            let (n, _) = header.ok_or_else(|| err(line, "clause before header".into()))?;
            for tok in t.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| err(line, format!("bad literal {tok:?}")))?;
                if v == 0 {
                    if current.is_empty() {
                        return Err(err(line, "empty clause".into()));
                    }
                    clauses.push(std::mem::take(&mut current));
                    continue;
                }
                let var = v.unsigned_abs() as usize;
                if var > n {
                    return Err(err(line, format!("variable {var} exceeds declared {n}")));
                }
                current.push(Literal {
                    var: var - 1,
                    positive: v > 0,
                });
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let (n, m) = header.ok_or_else(|| err(last_line, "missing header".into()))?;
        if clauses.len() != m {
            return Err(err(
                last_line,
                format!("header declares {m} clauses, found {}", clauses.len()),
            ));
        }
        Ok(Cnf::new(n, clauses).expect("validated while parsing"))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                s.push_str(&format!("{} ", if l.positive { v } else { -v }));
            }
            s.push_str("0\n");
        }
        s
    }

    /// Clauses with duplicate literals removed and tautologies dropped.
    fn simplified_clauses(&self) -> Vec<Vec<Literal>> {
        self.clauses
            .iter()
            .filter_map(|c| {
                let set: BTreeSet<Literal> = c.iter().copied().collect();
                let tautology = set.iter().any(|l| {
                    set.contains(&Literal {
                        var: l.var,
                        positive: !l.positive,
                    })
                });
                (!tautology).then(|| set.into_iter().collect())
            })
            .collect()
    }
}

pub const SAT_BRUTE_FORCE_LIMIT: usize = 24;

pub fn sat_brute_force(c: &Cnf) -> Result<bool> {
    if c.vars > SAT_BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables {
            vars: c.vars,
            limit: SAT_BRUTE_FORCE_LIMIT,
        });
    }
    let mut valuation = vec![false; c.vars];
    for bits in 0u32..(1 << c.vars) {
        for (i, v) in valuation.iter_mut().enumerate() {
            *v = bits >> i & 1 == 1;
        }
        if c.eval(&valuation) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The first `n` primes and their product.
pub fn first_primes(n: usize) -> (Vec<u64>, BigInt) {
    let mut primes: Vec<u64> = Vec::with_capacity(n);
    let mut k = 2u64;
    while primes.len() < n {
        if primes.iter().take_while(|&&p| p * p <= k).all(|&p| !k.is_multiple_of(p)) {
            primes.push(k);
        }
        k += 1;
    }
    let m = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
    (primes, m)
}

fn shift_letter(inverse: bool) -> Letter {
    Letter::new(SHIFT_GENERATOR, inverse)
}

fn shift_word(k: u64) -> Vec<Letter> {
    vec![shift_letter(false); k as usize]
}

/// `a^-j b a^j`, the `j`-th basis element of a free subgroup of `F_2`.
fn clause_generator(j: usize) -> Vec<Letter> {
    let a = Letter::new(0, false);
    let mut w = vec![a.inverse(); j];
    w.push(Letter::new(1, false));
    w.extend(std::iter::repeat_n(a, j));
    w
}

fn back_to_origin(m: &BigInt) -> Factor {
    Factor::new(Word(vec![shift_letter(false)]), -m)
}

/// Writes `g` at cursor positions divisible by `p` in `[0, M)`.
fn on_multiples(g: &[Letter], p: u64, m: &BigInt) -> [Factor; 2] {
    let mut period = g.to_vec();
    period.extend(shift_word(p));
    [Factor::new(Word(period), m / p), back_to_origin(m)]
}

/// Writes `h` where `p` divides the position and `g` elsewhere in `[0, M)`.
fn split_by_residue(h: &[Letter], g: &[Letter], p: u64, m: &BigInt) -> [Factor; 2] {
    let mut period = h.to_vec();
    for _ in 1..p {
        period.push(shift_letter(false));
        period.extend_from_slice(g);
    }
    period.push(shift_letter(false));
    [Factor::new(Word(period), m / p), back_to_origin(m)]
}

fn commutator(x: &PowerWord, y: &PowerWord) -> PowerWord {
    let mut out = x.clone();
    out.extend(y.clone());
    out.extend(x.inverse());
    out.extend(y.inverse());
    out
}

/// Number of clauses the free-group construction works with: non-tautological
/// clauses, padded to a power of two.
pub fn padded_clause_count(c: &Cnf) -> usize {
    let m = c.simplified_clauses().len();
    if m == 0 {
        0
    } else {
        m.next_power_of_two()
    }
}

/// Upper bound `2 n m^2` on the number of powers, with `m` the padded clause count.
pub fn free_wreath_size_bound(c: &Cnf) -> usize {
    let m = padded_clause_count(c);
    (2 * c.vars * m * m).max(1)
}

/// Power word over `F_2 wr Z` (letters `a`, `b`, cursor `t`), trivial iff
/// `c` is unsatisfiable.
pub fn cnf_to_free_wreath(c: &Cnf) -> PowerWord {
    cnf_to_free_wreath_with_primes(c, &first_primes(c.vars).0)
}

/// As [`cnf_to_free_wreath`] with caller-chosen pairwise coprime moduli.
pub fn cnf_to_free_wreath_with_primes(c: &Cnf, primes: &[u64]) -> PowerWord {
    assert!(primes.len() >= c.vars);
    let mut clauses = c.simplified_clauses();
    if clauses.is_empty() {
        return PowerWord::new(vec![Factor::new(Word(vec![Letter::new(0, false)]), 1)]);
    }
    let target = clauses.len().next_power_of_two();
    let last = clauses.last().unwrap().clone();
    clauses.resize(target, last);
    let m: BigInt = primes[..c.vars].iter().fold(BigInt::one(), |acc, &p| acc * p);
    let mut level: Vec<PowerWord> = clauses
        .iter()
        .enumerate()
        .map(|(j, clause)| {
            let g = clause_generator(j + 1);
            let mut w = PowerWord::default();
            for l in clause.iter().filter(|l| l.positive) {
                w.factors.extend(on_multiples(&g, primes[l.var], &m));
            }
            let id: Vec<Letter> = Vec::new();
            for l in clause.iter().filter(|l| !l.positive) {
                w.factors.extend(split_by_residue(&id, &g, primes[l.var], &m));
            }
            w
        })
        .collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| commutator(&pair[0], &pair[1]))
            .collect();
    }
    level.pop().unwrap()
}

/// Fan-in two circuit over variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Circuit {
    Const(bool),
    Var(usize),
    Not(Box<Circuit>),
    And(Box<Circuit>, Box<Circuit>),
    Or(Box<Circuit>, Box<Circuit>),
}

impl Circuit {
    pub fn eval(&self, valuation: &[bool]) -> bool {
        match self {
            Circuit::Const(b) => *b,
            Circuit::Var(k) => valuation[*k],
            Circuit::Not(f) => !f.eval(valuation),
            Circuit::And(f, g) => f.eval(valuation) && g.eval(valuation),
            Circuit::Or(f, g) => f.eval(valuation) || g.eval(valuation),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Circuit::Const(_) | Circuit::Var(_) => 0,
            Circuit::Not(f) => f.depth(),
            Circuit::And(f, g) | Circuit::Or(f, g) => 1 + f.depth().max(g.depth()),
        }
    }

    /// Balanced binary trees for the conjunction and each clause.
    pub fn from_cnf(c: &Cnf) -> Circuit {
        let clauses: Vec<Circuit> = c
            .clauses
            .iter()
            .map(|cl| {
                let lits: Vec<Circuit> = cl
                    .iter()
                    .map(|l| {
                        let v = Circuit::Var(l.var);
                        if l.positive {
                            v
                        } else {
                            Circuit::Not(Box::new(v))
                        }
                    })
                    .collect();
                balanced(lits, Circuit::Or, false)
            })
            .collect();
        balanced(clauses, Circuit::And, true)
    }
}

fn balanced(
    mut items: Vec<Circuit>,
    join: fn(Box<Circuit>, Box<Circuit>) -> Circuit,
    empty: bool,
) -> Circuit {
    match items.len() {
        0 => Circuit::Const(empty),
        1 => items.pop().unwrap(),
        n => {
            let right = items.split_off(n / 2);
            join(
                Box::new(balanced(items, join, empty)),
                Box::new(balanced(right, join, empty)),
            )
        }
    }
}

/// Reads `on_true` if variable `var` is set, `on_false` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub var: usize,
    pub on_false: Perm,
    pub on_true: Perm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GProgram {
    pub instructions: Vec<Instruction>,
}

impl GProgram {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn eval(&self, valuation: &[bool]) -> Perm {
        self.instructions.iter().fold(Perm::IDENTITY, |acc, i| {
            let g = if i.on_false == i.on_true || !valuation[i.var] {
                i.on_false
            } else {
                i.on_true
            };
            acc.then(&g)
        })
    }
}

impl fmt::Display for GProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, i) in self.instructions.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "x{} {} {}", i.var + 1, i.on_false, i.on_true)?;
        }
        Ok(())
    }
}

/// Output element of compiled programs.
pub fn barrington_output() -> Perm {
    Perm::cycle(&[1, 2, 3, 4, 5])
}

/// `(alpha, beta, gamma)` with `gamma^-1 [alpha, beta] gamma = target`, all
/// in A5, for every 5-cycle `target`.
fn and_gadgets() -> &'static HashMap<Perm, (Perm, Perm, Perm)> {
    static TABLE: OnceLock<HashMap<Perm, (Perm, Perm, Perm)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let group = a5_elements();
        let cycles: Vec<Perm> = group.iter().copied().filter(Perm::is_five_cycle).collect();
        let mut table = HashMap::new();
        for &target in &cycles {
            'search: for &alpha in &cycles {
                for &beta in &cycles {
                    let comm = alpha.then(&beta).then(&alpha.inverse()).then(&beta.inverse());
                    if !comm.is_five_cycle() {
                        continue;
                    }
                    if let Some(&gamma) = group.iter().find(|g| comm.conjugate(g) == target) {
                        table.insert(target, (alpha, beta, gamma));
                        break 'search;
                    }
                }
            }
        }
        table
    })
}

fn constant(g: Perm) -> Instruction {
    Instruction {
        var: 0,
        on_false: g,
        on_true: g,
    }
}

fn compile(c: &Circuit, target: Perm) -> Vec<Instruction> {
    match c {
        Circuit::Const(false) => Vec::new(),
        Circuit::Const(true) => vec![constant(target)],
        Circuit::Var(k) => vec![Instruction {
            var: *k,
            on_false: Perm::IDENTITY,
            on_true: target,
        }],
        Circuit::Not(f) => {
            let mut p = compile(f, target.inverse());
            match p.last_mut() {
                Some(last) => {
                    last.on_false = last.on_false.then(&target);
                    last.on_true = last.on_true.then(&target);
                }
                None => p.push(constant(target)),
            }
            p
        }
        Circuit::And(f, g) => {
            let (alpha, beta, gamma) = and_gadgets()[&target];
            let mut p = compile(f, alpha);
            p.extend(compile(g, beta));
            p.extend(compile(f, alpha.inverse()));
            p.extend(compile(g, beta.inverse()));
            if let Some(first) = p.first_mut() {
                let gi = gamma.inverse();
                first.on_false = gi.then(&first.on_false);
                first.on_true = gi.then(&first.on_true);
            }
            if let Some(last) = p.last_mut() {
                last.on_false = last.on_false.then(&gamma);
                last.on_true = last.on_true.then(&gamma);
            }
            p
        }
        Circuit::Or(f, g) => {
            let not = |x: &Circuit| Box::new(Circuit::Not(Box::new(x.clone())));
            compile(&Circuit::Not(Box::new(Circuit::And(not(f), not(g)))), target)
        }
    }
}

/// Program whose product is the identity exactly on valuations falsifying
/// the circuit, and [`barrington_output`] otherwise.
pub fn compile_circuit(c: &Circuit) -> GProgram {
    GProgram {
        instructions: compile(c, barrington_output()),
    }
}

pub fn barrington_compile(c: &Cnf) -> GProgram {
    compile_circuit(&Circuit::from_cnf(c))
}

fn a5_word(g: &Perm) -> Vec<Letter> {
    a5_words()[g].clone()
}

/// Power word over `A5 wr Z` (letters `a`, `b`, cursor `t`), trivial iff
/// `c` is unsatisfiable.
pub fn cnf_to_a5_wreath(c: &Cnf) -> PowerWord {
    cnf_to_a5_wreath_with_primes(c, &first_primes(c.vars).0)
}

pub fn cnf_to_a5_wreath_with_primes(c: &Cnf, primes: &[u64]) -> PowerWord {
    assert!(primes.len() >= c.vars);
    let program = barrington_compile(c);
    let m: BigInt = primes[..c.vars].iter().fold(BigInt::one(), |acc, &p| acc * p);
    let mut out = PowerWord::default();
    for i in &program.instructions {
        let p = if i.var < c.vars { primes[i.var] } else { 1 };
        let h = a5_word(&i.on_true);
        let g = a5_word(&i.on_false);
        out.factors.extend(split_by_residue(&h, &g, p, &m));
    }
    out
}
