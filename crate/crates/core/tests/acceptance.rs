//! Acceptance run. Each test prints one `PASS`/`FAIL` line to stderr (outside
//! the harness capture) and then asserts the verdict.

mod support;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use fitex::circuit::eval_by_levels;
use fitex::gen::random_circuit;
use fitex::learn::{run_learning, Strategy, XForm};
use fitex::pss::{expansion_check_with, extract_pss_with, find_mpss_with, is_pss_with, pss_to_circuit_bound_with, MpssMode};
use fitex::replay::selftest;
use fitex::report::{stable_json, BoundReport, CircuitText, ExtractPssReport, LearnReport, SynthReport};
use fitex::synth::{enumerate_min_functions_with, solve_min_with, FitProblem};
use fitex::{BitVector, Config, Sample, SampleSet, TruthTable};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use support::{Oracle, ORACLE_DEPTH};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
    report: Value,
}

fn cfg(threads: usize) -> Config {
    Config::default().with_threads(threads).with_seed(SEED)
}

fn announce(id: &str, o: &Outcome, elapsed: Duration, limit: Duration) -> bool {
    let pass = o.pass && elapsed < limit;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "\n{id} {}: {} ({:.2}s, limit {}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn timed(id: &str, limit_s: u64, run: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let o = run();
    let pass = announce(id, &o, start.elapsed(), Duration::from_secs(limit_s));
    assert!(pass, "{id}: {}", o.detail);
}

fn pts(list: &[&str]) -> BTreeSet<BitVector> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

fn random_valued_set(rng: &mut ChaCha8Rng, n: usize, max: usize) -> SampleSet {
    let mut all: Vec<BitVector> = BitVector::all(n).collect();
    all.shuffle(rng);
    let k = rng.gen_range(1..=max);
    SampleSet::from_samples(n, all[..k].iter().map(|v| Sample::labeled(*v, rng.gen()))).unwrap()
}

#[test]
fn c1_paper_example_replay() {
    timed("C1", 1, || {
        let r = selftest(&cfg(Config::default().threads));
        let wanted = [
            "C_f(110) = 1 via u = (1,1)",
            "parity-4 first level at 1001 is 1010, output 0",
            "M_f matches golden",
            "M_xor matches golden",
            "M_p matches golden",
            "five-level circuit: K=5 with spurious nodes",
        ];
        let failed: Vec<&str> = wanted
            .iter()
            .filter(|name| !r.case(name).is_some_and(|c| c.passed))
            .copied()
            .collect();
        Outcome {
            pass: failed.is_empty() && r.elapsed_ms < 1000.0,
            detail: format!("{}/{} replay checks, selftest {:.0} ms, failed {failed:?}", wanted.len() - failed.len(), wanted.len(), r.elapsed_ms),
            report: Value::Null,
        }
    });
}

fn fe_vs_oracle(c: &Config) -> Outcome {
    let mut sets: Vec<SampleSet> = (0..16u64).map(|b| SampleSet::full(&TruthTable::from_u64(2, b))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    sets.extend((0..200).map(|_| random_valued_set(&mut rng, 3, 8)));
    let mut mismatches = Vec::new();
    let mut reports = Vec::new();
    for (i, sv) in sets.iter().enumerate() {
        let p = FitProblem::new(sv.clone());
        let r = solve_min_with(&p, c).unwrap();
        let classes = enumerate_min_functions_with(&p, c).unwrap();
        let sound = sv.fits(&r.witness).unwrap() && r.witness.node_count() == r.d_min;
        let agrees = match Oracle::for_dim(sv.n_inputs()).solve(sv) {
            Some((d, want)) => r.d_min == d && classes == want,
            None => r.d_min > ORACLE_DEPTH,
        };
        if !(sound && agrees) {
            mismatches.push(i);
        }
        reports.push(SynthReport::new(&r).unwrap());
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!("{} sets, {} mismatches {mismatches:?}", sets.len(), mismatches.len()),
        report: serde_json::to_value(reports).unwrap(),
    }
}

#[test]
fn c2_fe_matches_brute_force() {
    timed("C2", 600, || fe_vs_oracle(&cfg(Config::default().threads)));
}

#[test]
fn c3_pss_verdicts() {
    timed("C3", 60, || {
        let c = cfg(Config::default().threads);
        let tt = |n: usize, f: fn(&[bool]) -> bool| {
            TruthTable::from_fn(n, |v| f(&v.iter().collect::<Vec<_>>()))
        };
        let or = tt(2, |b| b[0] || b[1]);
        let and = tt(2, |b| b[0] && b[1]);
        let xor = tt(2, |b| b[0] ^ b[1]);
        let cf = tt(3, |b| b[0] || (b[1] && !b[2]));
        let b1 = TruthTable::variable(2, 0);
        let cases: [(&str, &TruthTable, &[&str], bool); 10] = [
            ("OR {10,00}", &or, &["10", "00"], false),
            ("OR {10,01,00}", &or, &["10", "01", "00"], true),
            ("OR {11}", &or, &["11"], false),
            ("AND {01,11}", &and, &["01", "11"], false),
            ("AND {11,01,10}", &and, &["11", "01", "10"], true),
            ("XOR {10,01}", &xor, &["10", "01"], false),
            ("XOR B^2", &xor, &["10", "01", "11", "00"], true),
            ("C_f {100,010,011,000}", &cf, &["100", "010", "011", "000"], true),
            ("b1 {11,00}", &b1, &["11", "00"], false),
            ("b1 {11,00,10}", &b1, &["11", "00", "10"], true),
        ];
        let mut wrong = Vec::new();
        for (name, f, s, want) in cases {
            let r = is_pss_with(f, &pts(s), &c).unwrap();
            if r.is_pss != want {
                let other = r.offending_function.map_or("-".into(), |t| t.to_string());
                wrong.push(format!("{name}: got {} (other minimal fit {other})", r.is_pss));
            }
        }
        Outcome {
            pass: wrong.is_empty(),
            detail: format!("{}/{} verdicts reproduced; {}", cases.len() - wrong.len(), cases.len(), wrong.join("; ")),
            report: Value::Null,
        }
    });
}

fn theorem_bounds(c: &Config) -> Outcome {
    let mut funcs: Vec<TruthTable> = (0..16u64).map(|b| TruthTable::from_u64(2, b)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ 0x4);
    funcs.extend((0..50).map(|_| TruthTable::from_u64(3, rng.gen::<u64>() & 0xff)));
    let mut violations = Vec::new();
    let mut reports = Vec::new();
    for f in &funcs {
        let minimal = solve_min_with(&FitProblem::new(SampleSet::full(f)), c).unwrap().witness;
        let e = extract_pss_with(f, &minimal, c).unwrap();
        let proper = is_pss_with(f, &e.set, c).unwrap().is_pss;
        let b = pss_to_circuit_bound_with(f, &e.set, c).unwrap();
        let mut why = Vec::new();
        if e.size > 3 * e.d {
            why.push(format!("|S|={} > 3d={}", e.size, 3 * e.d));
        }
        if !proper {
            why.push("not proper".to_string());
        }
        if b.d >= b.bound {
            why.push(format!("d={} >= N|S|={}", b.d, b.bound));
        }
        if !why.is_empty() {
            violations.push(format!("{f} (d={}): {}", e.d, why.join(", ")));
        }
        reports.push(ExtractPssReport {
            function: f.to_string(),
            circuit: CircuitText::new(&minimal).unwrap(),
            report: e,
            rebuilt: Some(BoundReport::new(&b).unwrap()),
        });
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!("{} functions, {} violations: {}", funcs.len(), violations.len(), violations.join("; ")),
        report: serde_json::to_value(reports).unwrap(),
    }
}

#[test]
fn c4_theorem_bounds() {
    timed("C4", 1800, || theorem_bounds(&cfg(Config::default().threads)));
}

#[test]
fn c5_size_sandwich_and_levels() {
    timed("C5", 60, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5);
        let mut bad = Vec::new();
        for i in 0..1000 {
            let n = rng.gen_range(2..=4);
            let d = rng.gen_range(1..=8);
            let c = random_circuit(&mut rng, n, d);
            let s = c.gate_size();
            let dec = c.decompose_levels().unwrap();
            let levels_ok = BitVector::all(n).all(|v| eval_by_levels(&dec, &v).unwrap() == c.evaluate(&v).unwrap());
            if !(c.is_valid() && d <= s && s <= 3 * d && levels_ok) {
                bad.push(i);
            }
        }
        Outcome {
            pass: bad.is_empty(),
            detail: format!("1000 circuits, {} violations {bad:?}", bad.len()),
            report: Value::Null,
        }
    });
}

#[test]
fn c6_expansion_strictness() {
    timed("C6", 600, || {
        let c = cfg(Config::default().threads);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x6);
        let (mut done, mut strict, mut redraws) = (0, 0, 0);
        let mut failures = Vec::new();
        while done < 100 {
            let n = rng.gen_range(2..=3);
            let sv = random_valued_set(&mut rng, n, (1 << n) - 1);
            let classes = enumerate_min_functions_with(&FitProblem::new(sv.clone()), &c).unwrap();
            let agreed: Vec<BitVector> = BitVector::all(n)
                .filter(|v| !sv.contains(v))
                .filter(|v| classes.iter().all(|g| g.at(v) == classes.first().unwrap().at(v)))
                .collect();
            let Some(b) = agreed.choose(&mut rng) else {
                redraws += 1;
                continue;
            };
            let r = expansion_check_with(&sv, b, &c).unwrap();
            done += 1;
            if r.contradicts_all && r.strict {
                strict += 1;
            } else {
                failures.push(format!("{sv:?} + {b}: {} -> {}", r.d_before, r.d_after));
            }
        }
        Outcome {
            pass: strict == 100,
            detail: format!("{strict}/100 strict increases, {redraws} sets redrawn for lack of an agreed point {failures:?}"),
            report: Value::Null,
        }
    });
}

fn learning_convergence(c: &Config) -> Outcome {
    let mut converged = 0;
    let mut missed = Vec::new();
    let mut reports = Vec::new();
    for bits in 0..16u64 {
        let f = TruthTable::from_u64(2, bits);
        let m = find_mpss_with(&f, MpssMode::Exhaustive, c).unwrap();
        let stream: Vec<Sample> = m.set.iter().map(|v| Sample::labeled(*v, f.at(v))).collect();
        for strategy in [Strategy::Of, Strategy::Sf] {
            let run = run_learning(strategy, XForm::constant(2, false), &stream, Some(&f), c).unwrap();
            if run.converged == Some(true) {
                converged += 1;
            } else {
                missed.push(format!("{strategy:?} on {f}"));
            }
            reports.push(LearnReport {
                strategy: format!("{strategy:?}").to_lowercase(),
                steps: run.trace().len(),
                converged: run.converged,
                current: run.state.current.to_string(),
                circuit: CircuitText::new(&run.state.circuit).unwrap(),
                trace: run.trace().to_vec(),
            });
        }
    }
    Outcome {
        pass: converged == 32,
        detail: format!("{converged}/32 convergences {missed:?}"),
        report: serde_json::to_value(reports).unwrap(),
    }
}

#[test]
fn c7_learning_convergence() {
    timed("C7", 300, || learning_convergence(&cfg(Config::default().threads)));
}

#[test]
fn c8_determinism_across_thread_counts() {
    timed("C8", 3600, || {
        type Run = fn(&Config) -> Outcome;
        let runs: [(&str, Run); 3] = [("C2", fe_vs_oracle), ("C4", theorem_bounds), ("C7", learning_convergence)];
        let mut differing = Vec::new();
        for (name, run) in runs {
            let one = stable_json(&run(&cfg(1)).report);
            let four = stable_json(&run(&cfg(4)).report);
            if one != four {
                differing.push(name);
            }
        }
        let report = json!({ "differing": differing });
        Outcome {
            pass: differing.is_empty(),
            detail: format!("reports for C2, C4, C7 at 1 vs 4 threads; differing {differing:?}"),
            report,
        }
    });
}
