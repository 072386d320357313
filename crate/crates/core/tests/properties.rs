use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use powgroup::free_words::{
    free_reduce, free_reduce_letters, invert, is_omega, omega_normalize, Letter, ReducedWord, Word,
};
use powgroup::grigorchuk::{element_order_pow2, solve_grigorchuk, wp_grigorchuk, Generator, GrigWord};
use powgroup::hardness::{
    barrington_compile, cnf_to_free_wreath, free_wreath_size_bound, padded_clause_count, Circuit, Cnf,
    Literal,
};
use powgroup::oracle::{brute_solve_free, brute_solve_wreath};
use powgroup::power_words::{Factor, PowerWord, SymbolicLetter, SymbolicWord};
use powgroup::preprocess::{preprocess, preprocess_with};
use powgroup::rewrite_t::{find_step, apply_step, is_identity_t, normalize, step_bound, RuleKind};
use powgroup::shorten::{
    cut_constant, cut_distance, cut_intervals, eta_profile, shorten, shortened_exponent_bound,
    shortened_exponents, solve_free,
};
use powgroup::wreath::{
    eval_wreath, membership_periodic, power_profile, solve_wreath, FreeBackend, GroupBackend,
    IntegerBackend, PeriodicSequence, WreathLayout, SHIFT_GENERATOR,
};

fn letter(rank: u32) -> impl Strategy<Value = Letter> {
    (0..rank, any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv))
}

fn word(rank: u32, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(rank), 0..=max).prop_map(Word)
}

fn power_word(rank: u32, factors: usize, period: usize, exp: i64) -> impl Strategy<Value = PowerWord> {
    prop::collection::vec(
        (prop::collection::vec(letter(rank), 1..=period), -exp..=exp),
        0..=factors,
    )
    .prop_map(|fs| PowerWord::new(fs.into_iter().map(|(p, x)| Factor::new(Word(p), x)).collect()))
}

fn big_power_word(rank: u32, factors: usize, period: usize) -> impl Strategy<Value = PowerWord> {
    prop::collection::vec(
        (prop::collection::vec(letter(rank), 1..=period), any::<i64>(), 0u32..60),
        0..=factors,
    )
    .prop_map(|fs| {
        PowerWord::new(
            fs.into_iter()
                .map(|(p, x, s)| Factor::new(Word(p), BigInt::from(x >> s)))
                .collect(),
        )
    })
}

fn reduced(w: &PowerWord) -> ReducedWord {
    free_reduce(&w.expand(1 << 20).unwrap())
}

fn project_reduced(u: &SymbolicWord) -> ReducedWord {
    free_reduce(&u.project(1 << 22).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn free_reduce_idempotent(w in word(3, 20)) {
        let r = free_reduce(&w);
        prop_assert_eq!(free_reduce(&r.to_word()), r);
    }

    #[test]
    fn free_reduce_congruence(u in word(3, 12), v in word(3, 12)) {
        let direct = free_reduce(&u.concat(v.letters()));
        let split = free_reduce(&free_reduce(&u).to_word().concat(&free_reduce(&v)));
        prop_assert_eq!(direct, split);
    }

    #[test]
    fn word_times_inverse_is_trivial(w in word(3, 20)) {
        prop_assert!(free_reduce(&w.concat(invert(&w).letters())).is_empty());
    }

    #[test]
    fn lambda_dominates_length(v in power_word(2, 6, 4, 9)) {
        let u = preprocess_with(&v, 0).into_symbolic();
        prop_assert!(u.lambda() >= u.len());
    }

    #[test]
    fn plain_words_round_trip(w in word(3, 16)) {
        let text = w.to_string();
        let v = PowerWord::parse(&text).unwrap();
        prop_assert_eq!(v.expand(100).unwrap(), w);
    }

    #[test]
    fn power_words_round_trip(v in power_word(4, 6, 4, 1_000)) {
        let again = PowerWord::parse(&v.to_string()).unwrap();
        prop_assert_eq!(reduced(&again), reduced(&v));
        prop_assert_eq!(again.to_string(), v.to_string());
    }

    #[test]
    fn lambda_equals_projection_for_unit_exponents(w in word(2, 12)) {
        let r = free_reduce(&w);
        if !r.is_empty() {
            let u = SymbolicWord::new(vec![SymbolicLetter::block(r.clone())]);
            prop_assert_eq!(u.lambda(), r.len());
        }
    }

    #[test]
    fn preprocess_preserves_value(v in power_word(2, 6, 4, 6)) {
        let c = preprocess(&v);
        prop_assert_eq!(project_reduced(c.as_symbolic()), reduced(&v));
        prop_assert!(c.is_well_formed());
        for l in &c.as_symbolic().letters {
            if let SymbolicLetter::Power { period, .. } = l {
                prop_assert!(is_omega(period.as_reduced()));
            }
        }
    }

    #[test]
    fn preprocess_idempotent(v in power_word(2, 6, 4, 6), threshold in 0usize..10) {
        let once = preprocess_with(&v, threshold);
        let twice = preprocess_with(&once.as_symbolic().to_power_word(), threshold);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn rewriting_bounds_and_soundness(v in power_word(2, 8, 4, 9)) {
        let u = preprocess_with(&v, 0).into_symbolic();
        let bound = step_bound(&u);
        let lambda0 = u.lambda();
        let mu0 = u.mu();
        let value = project_reduced(&u);
        let mut cur = u.clone();
        let mut k = 0;
        while let Some(app) = find_step(&cur) {
            let next = apply_step(&cur, &app).unwrap();
            k += 1;
            prop_assert!(k <= bound);
            prop_assert!(next.lambda() <= lambda0 + 2 * k * mu0);
            prop_assert_eq!(project_reduced(&next), value.clone());
            if app.kind != RuleKind::PP {
                let lam = cur.lambda();
                let mut periods: Vec<_> = cur.letters.iter().filter_map(|l| match l {
                    SymbolicLetter::Power { period, .. } => Some(period.clone()),
                    _ => None,
                }).collect();
                periods.dedup();
                for p in periods {
                    let a = eta_profile(&cur, &p).prefix_sums;
                    let b = eta_profile(&next, &p).prefix_sums;
                    if a.len() == b.len() {
                        for (x, y) in a.iter().zip(&b) {
                            prop_assert!((x - y).abs() <= BigInt::from(lam));
                        }
                    }
                }
            }
            cur = next;
        }
        let n = normalize(&u).unwrap();
        prop_assert!(n.steps <= bound);
        prop_assert_eq!(n.word.is_empty(), value.is_empty());
    }

    #[test]
    fn shortening_guarantees(v in big_power_word(2, 8, 3)) {
        let u = preprocess(&v).into_symbolic();
        let k = cut_constant(&u);
        let (s, reports) = shorten(&u).unwrap();
        prop_assert_eq!(s.len(), u.len());
        for r in &reports {
            if r.intervals > 0 {
                prop_assert_eq!(r.cut_distance.clone(), Some(k.clone()));
            }
            prop_assert!(r.max_shortened_exponent <= shortened_exponent_bound(&u, r.powers));
        }
        for (a, b) in u.letters.iter().zip(&s.letters) {
            match (a, b) {
                (SymbolicLetter::Power { exponent: y, period: p }, SymbolicLetter::Power { exponent: z, period: q }) => {
                    prop_assert_eq!(p, q);
                    prop_assert!(!z.is_zero());
                    prop_assert_eq!(y.is_negative(), z.is_negative());
                    prop_assert!(z.abs() <= y.abs());
                }
                (x, y) => prop_assert_eq!(x, y),
            }
        }
        // the cut keeps every prefix sum outside and at distance exactly K
        let mut periods: Vec<_> = u.letters.iter().filter_map(|l| match l {
            SymbolicLetter::Power { period, .. } => Some(period.clone()),
            _ => None,
        }).collect();
        periods.sort();
        periods.dedup();
        for p in periods {
            let c = cut_intervals(&u, &p);
            let profile = eta_profile(&u, &p);
            prop_assert!(shortened_exponents(&profile, &c).is_ok());
            if !c.is_empty() {
                prop_assert_eq!(cut_distance(&profile, &c), Some(k.clone()));
            }
        }
        prop_assert_eq!(is_identity_t(&s).unwrap(), solve_free(&v).unwrap());
    }

    #[test]
    fn solvers_agree_with_expansion(v in power_word(3, 8, 6, 64)) {
        let brute = brute_solve_free(&v, 1 << 20).unwrap();
        prop_assert_eq!(solve_free(&v).unwrap(), brute);
        prop_assert_eq!(is_identity_t(preprocess(&v).as_symbolic()).unwrap(), brute);
    }
}

fn wreath_word(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(
        prop_oneof![letter(2), any::<bool>().prop_map(|inv| Letter::new(SHIFT_GENERATOR, inv))],
        0..=max,
    )
}

fn wreath_power_word() -> impl Strategy<Value = PowerWord> {
    (prop::collection::vec((wreath_word(5), -12i64..=12), 0..=6), any::<bool>()).prop_map(|(fs, close)| {
        let mut v = PowerWord::new(
            fs.into_iter()
                .filter(|(p, _)| !p.is_empty())
                .map(|(p, x)| Factor::new(Word(p), x))
                .collect(),
        );
        if close {
            let layout = WreathLayout::new(&v);
            v.push(Word(vec![Letter::new(SHIFT_GENERATOR, false)]), -layout.end);
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn wreath_eval_is_homomorphism(u in wreath_word(12), v in wreath_word(12)) {
        let z = IntegerBackend::new(2);
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        let lhs = eval_wreath(&uv, &z);
        let rhs = eval_wreath(&u, &z).mul(&eval_wreath(&v, &z), &z);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn power_profile_matches_expansion(w in wreath_word(10), n in 0i64..=12) {
        let z = IntegerBackend::new(1);
        let n = BigInt::from(n);
        let profile = power_profile(&w, &n, &z, 1 << 16).unwrap();
        let lit = w.repeat(n.to_usize().unwrap());
        prop_assert_eq!(profile.materialize(&z, 1 << 16).unwrap(), eval_wreath(&lit, &z));
        if let Some(run) = &profile.middle {
            let d = profile.shift.abs() / &n;
            prop_assert_eq!(BigInt::from(run.values.period()), d.clone());
            let mut k = run.lo.clone();
            while &k + &d <= run.hi {
                let a = profile.value_at(&k, &z);
                let b = profile.value_at(&(&k + &d), &z);
                prop_assert_eq!(a, b);
                k += 1;
            }
        }
    }

    #[test]
    fn wreath_solver_matches_brute_force(v in wreath_power_word()) {
        let z = IntegerBackend::new(1);
        let f2 = FreeBackend::new(2);
        prop_assert_eq!(solve_wreath(&v, &z).unwrap(), brute_solve_wreath(&v, &z, 1 << 16).unwrap());
        prop_assert_eq!(solve_wreath(&v, &f2).unwrap(), brute_solve_wreath(&v, &f2, 1 << 16).unwrap());
    }

    #[test]
    fn query_word_is_the_lamp(v in wreath_power_word()) {
        let f2 = FreeBackend::new(2);
        let layout = WreathLayout::new(&v);
        let lit = eval_wreath(v.expand(1 << 16).unwrap().letters(), &f2);
        for (a, b) in layout.check_intervals() {
            let mut m = a;
            while m <= b {
                let q = layout.query_word(&m);
                let direct = lit.value_at(&m, &f2);
                let via = f2.eval_word(q.expand(1 << 16).unwrap().letters());
                prop_assert_eq!(via, direct);
                m += 1;
            }
        }
    }

    #[test]
    fn membership_matches_scan(
        tuples in prop::collection::vec((prop::collection::vec(-2i64..=2, 1..=6), 0u64..6), 1..=4),
        m in 0u64..200,
    ) {
        let z = IntegerBackend::new(1);
        let summands: Vec<_> = tuples
            .iter()
            .map(|(t, ph)| {
                let vals = t.iter().map(|&x| vec![BigInt::from(x)]).collect();
                (PeriodicSequence::new(vals).unwrap(), *ph)
            })
            .collect();
        let naive = (0..m).all(|k| {
            let s: i64 = tuples.iter().map(|(t, ph)| t[((k + ph) % t.len() as u64) as usize]).sum();
            s == 0
        });
        prop_assert_eq!(membership_periodic(&summands, &BigInt::from(m), &z, 1 << 20).unwrap(), naive);
    }
}

fn grig_word(max: usize) -> impl Strategy<Value = GrigWord> {
    prop::collection::vec(0u32..4, 0..=max)
        .prop_map(|v| GrigWord(v.into_iter().map(|i| Generator::from_index(i).unwrap()).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn grigorchuk_order_invariant(w in grig_word(8)) {
        let o = element_order_pow2(&w, 64).unwrap();
        let o = o.to_usize().unwrap();
        prop_assert!(wp_grigorchuk(&w.repeat(o)));
        prop_assert!(o == 1 || !wp_grigorchuk(&w.repeat(o / 2)));
    }

    #[test]
    fn grigorchuk_exponent_reduction(w in grig_word(8), x in any::<u128>(), neg in any::<bool>()) {
        let x = if neg { -BigInt::from(x) } else { BigInt::from(x) };
        let period: String = if w.is_empty() { "a".into() } else { w.to_string() };
        let w = GrigWord::parse(&period).unwrap();
        let v = PowerWord::parse(&format!("({period})^{x}")).unwrap();
        let o = element_order_pow2(&w, 64).unwrap();
        let r = x.mod_floor(&o).to_usize().unwrap();
        prop_assert_eq!(solve_grigorchuk(&v).unwrap(), wp_grigorchuk(&w.repeat(r)));
    }

    #[test]
    fn grigorchuk_matches_expansion(
        fs in prop::collection::vec((grig_word(8), 0i64..=256), 1..=4),
    ) {
        let fs: Vec<_> = fs.into_iter().filter(|(w, _)| !w.is_empty()).collect();
        let text: Vec<String> = fs.iter().map(|(w, x)| format!("({w})^{x}")).collect();
        let v = PowerWord::parse(&text.join(" ")).unwrap();
        let mut lit = Vec::new();
        for (w, x) in &fs {
            lit.extend(w.repeat(*x as usize).0);
        }
        prop_assert_eq!(solve_grigorchuk(&v).unwrap(), wp_grigorchuk(&GrigWord(lit)));
    }
}

fn cnf(max_vars: usize, max_clauses: usize) -> impl Strategy<Value = Cnf> {
    (1..=max_vars).prop_flat_map(move |n| {
        prop::collection::vec(
            prop::collection::vec((0..n, any::<bool>()), 1..=3),
            0..=max_clauses,
        )
        .prop_map(move |cs| {
            let clauses = cs
                .into_iter()
                .map(|c| c.into_iter().map(|(var, positive)| Literal { var, positive }).collect())
                .collect();
            Cnf::new(n, clauses).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn clause_words_claims(c in cnf(3, 1)) {
        // a single clause: the tree is just the clause word
        let w = cnf_to_free_wreath(&c);
        prop_assert!(w.factors.len() <= free_wreath_size_bound(&c));
        let f2 = FreeBackend::new(2);
        let e = eval_wreath(w.expand(1 << 20).unwrap().letters(), &f2);
        prop_assert!(e.shift.is_zero());
        let m: i64 = [2, 3, 5][..c.vars()].iter().product();
        for (k, val) in &e.support {
            prop_assert!(!k.is_negative() && k < &BigInt::from(m));
            if padded_clause_count(&c) == 0 {
                continue;
            }
            // a power of a^-1 b a: conjugating back by a gives a power of b
            let a = Letter::new(0, false);
            let mut conj = vec![a];
            conj.extend_from_slice(val);
            conj.push(a.inverse());
            let r = free_reduce_letters(&conj);
            prop_assert!(r.iter().all(|l| l.generator() == 1));
            let signs: Vec<bool> = r.iter().map(|l| l.is_inverse()).collect();
            prop_assert!(signs.windows(2).all(|s| s[0] == s[1]));
        }
    }

    #[test]
    fn barrington_contract(c in cnf(4, 5)) {
        let program = barrington_compile(&c);
        let circuit = Circuit::from_cnf(&c);
        prop_assert!(program.instructions.iter().all(|i| i.var < c.vars().max(1)));
        for bits in 0u32..(1 << c.vars()) {
            let v: Vec<bool> = (0..c.vars()).map(|i| bits >> i & 1 == 1).collect();
            prop_assert_eq!(!program.eval(&v).is_identity(), circuit.eval(&v));
            prop_assert_eq!(circuit.eval(&v), c.eval(&v));
        }
    }

    #[test]
    fn size_bound(c in cnf(5, 6)) {
        prop_assert!(cnf_to_free_wreath(&c).factors.len() <= free_wreath_size_bound(&c));
    }
}

#[test]
fn omega_normal_reassembles_exhaustively() {
    let letters: Vec<Letter> = (0..2).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect();
    let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut all = Vec::new();
    for _ in 0..4 {
        let mut next = Vec::new();
        for w in &words {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        words = next;
    }
    let mut checked = 0;
    for w in all {
        let Some(p) = ReducedWord::new(w) else { continue };
        if !p.is_cyclically_reduced() || powgroup::free_words::primitive_root(&p).1 != 1 {
            continue;
        }
        let n = omega_normalize(&p);
        for x in -4i64..=4 {
            let px = Word(p.to_vec()).repeat(x.unsigned_abs() as usize);
            let px = if x < 0 { invert(&px) } else { px };
            let ox = x * if n.flipped { -1 } else { 1 };
            let o = Word(n.omega.to_vec()).repeat(ox.unsigned_abs() as usize);
            let o = if ox < 0 { invert(&o) } else { o };
            let rebuilt = n.conjugator.inverse().to_word().concat(o.letters()).concat(&n.conjugator);
            assert_eq!(free_reduce(&rebuilt), free_reduce(&px), "{p:?} {x}");
        }
        let inv = omega_normalize(&p.inverse());
        assert_eq!(inv.omega, n.omega);
        for i in 1..p.len() {
            let mut rot = p[i..].to_vec();
            rot.extend_from_slice(&p[..i]);
            assert_eq!(omega_normalize(&ReducedWord::new(rot).unwrap()).omega, n.omega);
        }
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn huge_exponents_stay_symbolic() {
    let e = BigInt::one() << 1000u32;
    let v = PowerWord::parse(&format!("(ab)^{e} (ab)^-{e}")).unwrap();
    assert!(solve_free(&v).unwrap());
    let v = PowerWord::parse(&format!("(ab)^{e} (ba)^-{e}")).unwrap();
    assert!(!solve_free(&v).unwrap());
}
