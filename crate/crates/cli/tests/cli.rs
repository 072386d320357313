use powgroup::PowerWord;
use powgroup_cli::{bench_instances, run_args, BENCH_BITS};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    run_args(std::iter::once("powgroup").chain(args.iter().copied()), "")
}

fn run_stdin(args: &[&str], stdin: &str) -> (i32, String) {
    run_args(std::iter::once("powgroup").chain(args.iter().copied()), stdin)
}

fn json(out: &str) -> Value {
    serde_json::from_str(out.trim()).expect("valid json")
}

#[test]
fn solve_exit_codes() {
    assert_eq!(run(&["solve", "--group", "free:2", "(ab)^5 B (ba)^-4 A"]), (0, "identity\n".into()));
    assert_eq!(run(&["solve", "--group", "free:2", "a"]), (1, "non-identity\n".into()));
    assert_eq!(run(&["solve", "--group", "free:2", "(ab)^5 (ba)^-4 A B A"]).0, 1);
}

#[test]
fn parse_error_is_machine_readable() {
    let (code, out) = run(&["solve", "--group", "free:2", "(ab^"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["error"], "parse");
    assert!(v["detail"].is_string());
}

#[test]
fn letters_outside_the_rank_are_parse_errors() {
    let (code, out) = run(&["solve", "--group", "free:2", "abc"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "parse");
    let (code, out) = run(&["solve", "--group", "wreath:free:1", "tbT"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "parse");
}

#[test]
fn bad_selectors() {
    for g in ["free:0", "free:x", "wreath:q", "cyclic"] {
        let (code, out) = run(&["solve", "--group", g, "a"]);
        assert_eq!(code, 2, "{g}");
        assert_eq!(json(&out)["error"], "parse");
    }
}

#[test]
fn free_json_fields() {
    let word = "(ab)^123456789123456789 B (ba)^-123456789123456788 A";
    let (code, out) = run(&["solve", "--json", "--group", "free:2", word]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "identity");
    assert_eq!(v["group"], "free:2");
    let stats = &v["stats"];
    for key in ["periods", "expanded_length", "final_check", "steps"] {
        assert!(!stats[key].is_null(), "{key}");
    }
    let p = &stats["periods"][0];
    assert_eq!(p["period"], "ab");
    assert_eq!(p["powers"], 2);
    assert_eq!(p["max_exponent_bits"], 57);
    for key in ["K", "intervals", "max_shortened_exponent", "max_shortened_exponent_bits"] {
        assert!(!p[key].is_null(), "{key}");
    }
}

#[test]
fn wreath_and_grigorchuk_json() {
    let (code, out) = run(&["solve", "--json", "--group", "wreath:z", "(tb)^3 T (Bt)^-1 (t)^-3"]);
    let v = json(&out);
    assert_eq!(v["group"], "wreath:z");
    for key in ["points_checked", "gaps", "membership_points", "shift_rejected"] {
        assert!(!v["stats"][key].is_null(), "{key}");
    }
    assert_eq!(code, if v["verdict"] == "identity" { 0 } else { 1 });

    let (code, out) = run(&["solve", "--json", "--group", "grigorchuk", "(ab)^16 (ad)^5"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["stats"]["orders"], serde_json::json!(["16", "4"]));
    assert_eq!(v["stats"]["expanded_length"], 2);
}

#[test]
fn wreath_worked_example() {
    let (code, out) = run(&["solve", "--group", "wreath:z", "b T b t b t bbb t bbb t bbbbb T b"]);
    assert_eq!((code, out.as_str()), (1, "non-identity\n"));
    let w = PowerWord::parse("b T b t b t bbb t bbb t bbbbb T b").unwrap();
    let both = format!("{w} {}", w.inverse());
    let (code, _) = run(&["solve", "--group", "wreath:z", &both]);
    assert_eq!(code, 0);
}

#[test]
fn grigorchuk_expand_cap_error() {
    let (code, out) = run(&["solve", "--group", "grigorchuk", "--cap", "10", "(ab)^1000"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "cap");
}

#[test]
fn membership_cap_error() {
    let word = "(bttt)^1000 (TTTB)^1000";
    let (code, out) = run(&["solve", "--group", "wreath:z", "--membership-cap", "1", word]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "membership-cap");
    assert_eq!(run(&["solve", "--group", "wreath:z", word]).0, 0);
}

#[test]
fn trace_lines_match_format() {
    let word = "(ab)^123456789123456789 B (ba)^-123456789123456788 A";
    let (code, out) = run(&["trace", "--group", "free:2", word]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines,
        ["step#1 rule=PB pos=0 |u|_Δ=2 λ=4", "step#2 rule=PP pos=0 |u|_Δ=0 λ=0", "identity"]
    );
    let (_, solved) = run(&["solve", "--trace", "--group", "free:2", word]);
    assert_eq!(solved, out);
}

#[test]
fn input_from_stdin_and_file() {
    assert_eq!(run_stdin(&["solve", "--group", "free:2"], "(ab)^2 BABA"), (0, "identity\n".into()));
    let path = std::env::temp_dir().join(format!("powgroup-cli-{}.txt", std::process::id()));
    std::fs::write(&path, "(ab)^2 BAB").unwrap();
    let (code, _) = run(&["solve", "--group", "free:2", "--file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 1);
}

#[test]
fn gen_hard_round_trip() {
    let unsat = "p cnf 1 2\n1 0\n-1 0\n";
    let sat = "p cnf 2 2\n1 2 0\n-1 0\n";
    for (cnf, expect) in [(unsat, 0), (sat, 1)] {
        for (target, solve_group) in [(None, "wreath:free:2"), (Some("wreath:perm:a5"), "wreath:perm:a5")] {
            let mut args = vec!["gen-hard", "--primes", "2,3"];
            if let Some(t) = target {
                args.extend(["--group", t]);
            }
            let (code, word) = run_stdin(&args, cnf);
            assert_eq!(code, 0, "{word}");
            let (code, out) = run_stdin(&["solve", "--group", solve_group], &word);
            assert_eq!(code, expect, "{cnf} {solve_group} {out}");
        }
    }
}

#[test]
fn gen_hard_errors() {
    let (code, out) = run_stdin(&["gen-hard"], "p cnf 1 1\n2 0\n");
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "parse");
    let (code, out) = run_stdin(&["gen-hard", "--primes", "2"], "p cnf 2 1\n1 2 0\n");
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "parse");
}

#[test]
fn fuzz_agrees() {
    for g in ["free:2", "wreath:z", "wreath:zmod:2", "grigorchuk"] {
        let (code, out) = run(&["fuzz", "--group", g, "--count", "50", "--seed", "3"]);
        assert_eq!(code, 0, "{g}: {out}");
        assert!(out.contains("all agree"));
    }
}

#[test]
fn bench_marks_infeasible_rows() {
    let (code, out) = run(&["bench", "--json", "--per-size", "2", "--seed", "9"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), BENCH_BITS.len());
    assert!(rows[0]["brute_ms"].is_number());
    assert!(rows[0]["solve_free_ms"].is_number());
    assert_eq!(rows[4]["bits"], 1024);
    assert_eq!(rows[4]["brute_ms"], "infeasible");
}

#[test]
fn bench_instances_are_seeded() {
    assert_eq!(bench_instances(4, 3), bench_instances(4, 3));
    assert_ne!(bench_instances(4, 3), bench_instances(5, 3));
}

#[test]
fn printed_words_parse_back() {
    for (_, words) in bench_instances(11, 4) {
        for v in words {
            assert_eq!(PowerWord::parse(&v.to_string()).unwrap(), v);
        }
    }
}
