//! Replays the worked examples and reports one verdict per claim.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::bits::BitVector;
use crate::circuit::fixtures::{c_f, c_five_level, c_parity4, c_xor, g, lit, ng, nlit};
use crate::circuit::{eval_by_levels, Circuit, ConnectionConfig, GateKind, Polarity, WorkingNode};
use crate::config::Config;
use crate::error::Result;
use crate::format::{parse_circuit, write_circuit};
use crate::function::{dnf_fitting_circuit, parity_fn, Sample, SampleSet};
use crate::learn::{run_learning, Expr, Pattern, Strategy, XForm, xform_to_circuit};
use crate::pss::{extract_pss_with, find_mpss_with, is_pss_with, pss_to_circuit_bound_with, witness_table, MpssMode};
use crate::synth::{fits, solve_min_with, FitProblem};
use crate::table::TruthTable;

pub const GOLDEN_M_F: &str = include_str!("../golden/m_f.txt");
pub const GOLDEN_M_XOR: &str = include_str!("../golden/m_xor.txt");
pub const GOLDEN_M_P: &str = include_str!("../golden/m_p.txt");
pub const GOLDEN_LEVELS_F: &str = include_str!("../golden/levels_f.txt");
pub const GOLDEN_LEVELS_P: &str = include_str!("../golden/levels_p.txt");
pub const GOLDEN_LEVELS_FIVE: &str = include_str!("../golden/levels_five.txt");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayCase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub cases: Vec<ReplayCase>,
    pub passed: usize,
    pub failed: usize,
    pub elapsed_ms: f64,
}

impl ReplayReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn case(&self, name: &str) -> Option<&ReplayCase> {
        self.cases.iter().find(|c| c.name == name)
    }
}

fn bv(s: &str) -> BitVector {
    s.parse().expect("literal bitstring")
}

fn pts(list: &[&str]) -> BTreeSet<BitVector> {
    list.iter().map(|s| bv(s)).collect()
}

fn tt(n: usize, f: impl Fn(&[bool]) -> bool) -> TruthTable {
    TruthTable::from_fn(n, |v| f(&v.iter().collect::<Vec<_>>()))
}

fn sv(n: usize, items: &[(&str, bool)]) -> Result<SampleSet> {
    SampleSet::from_samples(n, items.iter().map(|&(s, o)| Sample::labeled(bv(s), o)))
}

fn or2() -> TruthTable {
    tt(2, |b| b[0] || b[1])
}

fn show(s: &BTreeSet<BitVector>) -> String {
    let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

type Check = fn(&Config) -> Result<(bool, String)>;

const CASES: &[(&str, Check)] = &[
    ("C_f(110) = 1 via u = (1,1)", |_| {
        let d = c_f().decompose_levels()?;
        let t = d.trace(&bv("110"))?;
        let ok = t[0] == [true, true] && t[1] == [true] && c_f().evaluate(&bv("110"))?;
        Ok((ok, format!("trace {t:?}")))
    }),
    ("parity-4 first level at 1001 is 1010, output 0", |_| {
        let d = c_parity4().decompose_levels()?;
        let t = d.trace(&bv("1001"))?;
        let out = eval_by_levels(&d, &bv("1001"))?;
        Ok((t[0] == [true, false, true, false] && !out, format!("level 1 {:?}, output {out}", t[0])))
    }),
    ("M_f matches golden", |_| golden(&c_f(), GOLDEN_M_F)),
    ("M_xor matches golden", |_| golden(&c_xor(), GOLDEN_M_XOR)),
    ("M_p matches golden", |_| golden(&c_parity4(), GOLDEN_M_P)),
    ("M_f block parses to C_f", |_| {
        let c = parse_circuit(GOLDEN_M_F)?;
        Ok((c.truth_table()? == tt(3, |b| b[0] || (b[1] && !b[2])), c.to_string()))
    }),
    ("C_f levels: K=2 with one spurious node", |_| levels(&c_f(), GOLDEN_LEVELS_F)),
    ("parity-4 levels: K=4, no spurious nodes", |_| levels(&c_parity4(), GOLDEN_LEVELS_P)),
    ("five-level circuit: K=5 with spurious nodes", |_| {
        let (ok, detail) = levels(&c_five_level(), GOLDEN_LEVELS_FIVE)?;
        let d = c_five_level().decompose_levels()?;
        let same = BitVector::all(4).all(|v| d.evaluate(&v).ok() == c_five_level().evaluate(&v).ok());
        Ok((ok && same && d.spurious().len() == 4, detail))
    }),
    ("XOR circuit: d=3, s=4, depth 2", |_| {
        let c = c_xor();
        let got = (c.node_count(), c.gate_size(), c.depth());
        Ok((got == (3, 4, 2) && c.is_valid(), format!("{got:?}")))
    }),
    ("parity-4 circuit: d=9, depth 4, output 0 at 1001", |_| {
        let c = c_parity4();
        let ok = c.node_count() == 9 && c.depth() == 4 && !c.evaluate(&bv("1001"))?;
        Ok((ok, format!("d={} depth={}", c.node_count(), c.depth())))
    }),
    ("[| |] is b1 | b2", |_| {
        let c = parse_circuit("N=2 d=1\n| |\n")?;
        Ok((c.to_string() == "b1 | b2", c.to_string()))
    }),
    ("scrambled parity-4 returns to natural order", |_| {
        let scrambled = Circuit::from_nodes(
            4,
            vec![
                WorkingNode::and(lit(4), lit(3)),
                WorkingNode::or(lit(3), lit(4)),
                WorkingNode::and(lit(2), lit(1)),
                WorkingNode::or(lit(1), lit(2)),
                WorkingNode::and(g(2), ng(1)),
                WorkingNode::and(g(4), ng(3)),
                WorkingNode::and(g(6), g(5)),
                WorkingNode::or(g(6), g(5)),
                WorkingNode::and(g(8), ng(7)),
            ],
        )?;
        let n = scrambled.natural_order();
        let levels = n.node_levels();
        Ok((n == c_parity4() && levels == [1, 1, 1, 1, 2, 2, 3, 3, 4], format!("levels {levels:?}")))
    }),
    ("truth table of b1 | b2 is 0111", |_| {
        let t = parse_circuit("N=2 d=1\n| |\n")?.truth_table()?;
        Ok((t.to_string() == "0111", t.to_string()))
    }),
    ("parity of 3 is 01101001", |_| {
        let t = parity_fn(3);
        Ok((t.to_string() == "01101001", t.to_string()))
    }),
    ("minterm DNF on the OR samples has d = 3", |_| {
        let s = sv(2, &[("10", true), ("01", true), ("00", false)])?;
        let c = dnf_fitting_circuit(&s);
        Ok((c.node_count() == 3 && fits(&s, &c), c.to_string()))
    }),
    ("OR samples: d_min 1, witness b1 | b2", |cfg| {
        let r = solve_min_with(&FitProblem::new(sv(2, &[("00", false), ("10", true), ("01", true)])?), cfg)?;
        Ok((r.d_min == 1 && r.witness.truth_table()? == or2(), format!("d_min={} {}", r.d_min, r.witness)))
    }),
    ("OR on {10,00}: d_min 0, witness b1", |cfg| {
        let r = solve_min_with(&FitProblem::new(sv(2, &[("10", true), ("00", false)])?), cfg)?;
        Ok((r.d_min == 0 && r.witness.truth_table()? == TruthTable::variable(2, 0), r.witness.to_string()))
    }),
    ("AND on {01,11}: d_min 0, b2 is a minimal fit", |cfg| {
        let p = FitProblem::new(sv(2, &[("01", false), ("11", true)])?).enumerate_all();
        let r = solve_min_with(&p, cfg)?;
        let ok = r.d_min == 0 && r.function_classes.contains(&TruthTable::variable(2, 1));
        Ok((ok, format!("d_min={} canonical witness {}", r.d_min, r.witness)))
    }),
    ("{11->1, 00->0} admits b1 and b2; adding 10->1 leaves b1", |cfg| {
        let two = FitProblem::new(sv(2, &[("11", true), ("00", false)])?).enumerate_all();
        let a = solve_min_with(&two, cfg)?.function_classes;
        let three = FitProblem::new(sv(2, &[("11", true), ("00", false), ("10", true)])?).enumerate_all();
        let b = solve_min_with(&three, cfg)?.function_classes;
        let (b1, b2) = (TruthTable::variable(2, 0), TruthTable::variable(2, 1));
        let ok = a.contains(&b1) && a.contains(&b2) && b.len() == 1 && b.contains(&b1);
        Ok((ok, format!("{} then {} classes", a.len(), b.len())))
    }),
    ("OR: {10,01,00} is proper", |cfg| verdict(&or2(), &["10", "01", "00"], true, cfg)),
    ("OR: {11} is not proper, FE gives constant 1", |cfg| {
        let r = is_pss_with(&or2(), &pts(&["11"]), cfg)?;
        let ok = !r.is_pss && r.function_classes.contains(&TruthTable::constant(2, true));
        let classes: Vec<String> = r.function_classes.iter().map(|t| t.to_string()).collect();
        Ok((ok, format!("d_min={}, minimal fits {classes:?}", r.d_min)))
    }),
    ("XOR: {10,01} is not proper", |cfg| verdict(&tt(2, |b| b[0] ^ b[1]), &["10", "01"], false, cfg)),
    ("XOR: all of B^2 is proper", |cfg| {
        verdict(&tt(2, |b| b[0] ^ b[1]), &["00", "10", "01", "11"], true, cfg)
    }),
    ("C_f: {100,010,011,000} is proper", |cfg| {
        verdict(&tt(3, |b| b[0] || (b[1] && !b[2])), &["100", "010", "011", "000"], true, cfg)
    }),
    ("OR minimum proper set has 3 points", |cfg| {
        let m = find_mpss_with(&or2(), MpssMode::Exhaustive, cfg)?;
        Ok((m.size == 3 && m.certified, show(&m.set)))
    }),
    ("AND minimum proper set is {11,01,10}", |cfg| {
        let m = find_mpss_with(&tt(2, |b| b[0] && b[1]), MpssMode::Exhaustive, cfg)?;
        let ok = m.size == 3 && is_pss_with(&tt(2, |b| b[0] && b[1]), &pts(&["11", "01", "10"]), cfg)?.is_pss;
        Ok((ok, show(&m.set)))
    }),
    ("witness pairs of [& &] and [|! |!]", |_| {
        use GateKind::*;
        use Polarity::*;
        let and = witness_table(ConnectionConfig { gate: And, left: Direct, right: Direct });
        let nor = witness_table(ConnectionConfig { gate: Or, left: Negated, right: Negated });
        let p = |l: u8, r: u8| (l == 1, r == 1);
        let ok = and == [p(1, 1), p(1, 0), p(0, 1)] && nor == [p(1, 1), p(0, 1), p(1, 0)];
        Ok((ok, format!("{and:?} {nor:?}")))
    }),
    ("b1 | b2 on B^3: joined {000,100,010} is proper, 3 <= 3", |cfg| {
        let f = tt(3, |b| b[0] || b[1]);
        let s = pts(&["000", "100", "010"]);
        let r = is_pss_with(&f, &s, cfg)?;
        let e = extract_pss_with(&f, &Circuit::from_nodes(3, vec![WorkingNode::or(lit(1), lit(2))])?, cfg)?;
        Ok((r.is_pss && e.size <= 3 && e.verified, format!("extracted {}", show(&e.set))))
    }),
    ("(b1 | b2) & b3: either joined set is proper", |cfg| {
        let f = tt(3, |b| (b[0] || b[1]) && b[2]);
        let mut detail = Vec::new();
        let mut ok = true;
        for s in [&["001", "101", "011", "100"][..], &["001", "101", "011", "110", "111"][..]] {
            let r = is_pss_with(&f, &pts(s), cfg)?;
            ok &= r.is_pss;
            let other = r.offending_function.map_or("none".to_string(), |t| t.to_string());
            detail.push(format!("|S|={} proper={} other fit {other}", s.len(), r.is_pss));
        }
        Ok((ok, detail.join("; ")))
    }),
    ("(b1 | b2) & b3: extraction stays within 3d = 6", |cfg| {
        let f = tt(3, |b| (b[0] || b[1]) && b[2]);
        let c = Circuit::from_nodes(3, vec![WorkingNode::or(lit(1), lit(2)), WorkingNode::and(g(1), lit(3))])?;
        let e = extract_pss_with(&f, &c, cfg)?;
        let ok = e.size <= 6 && is_pss_with(&f, &e.set, cfg)?.is_pss;
        Ok((ok, format!("joined {} final {}", e.joined.len(), e.size)))
    }),
    ("height-three circuit on B^4: joined nine points are proper", |cfg| {
        let s = pts(&["1000", "1100", "0000", "0100", "0110", "0101", "0111", "0011", "1111"]);
        let r = is_pss_with(&height_three_fn(), &s, cfg)?;
        let other = r.offending_function.map_or("none".to_string(), |t| t.to_string());
        Ok((r.is_pss && s.len() == 9, format!("d_min={}, other fit {other}", r.d_min)))
    }),
    ("height-three circuit on B^4: extraction stays within 3d = 15", |cfg| {
        let c = Circuit::from_nodes(
            4,
            vec![
                WorkingNode::and(lit(1), nlit(2)),
                WorkingNode::and(nlit(1), lit(2)),
                WorkingNode::or(lit(3), lit(4)),
                WorkingNode::and(g(2), g(3)),
                WorkingNode::or(g(1), g(4)),
            ],
        )?;
        let e = extract_pss_with(&height_three_fn(), &c, cfg)?;
        let ok = e.d == 5 && e.size <= 15 && is_pss_with(&height_three_fn(), &e.set, cfg)?.is_pss;
        Ok((ok, format!("joined {} final {}", e.joined.len(), e.size)))
    }),
    ("OR proper set of 3 gives d = 1 < N|S| = 6", |cfg| {
        let b = pss_to_circuit_bound_with(&or2(), &pts(&["10", "01", "00"]), cfg)?;
        Ok((b.d == 1 && b.d < b.bound, format!("d={} bound={}", b.d, b.bound)))
    }),
    ("X-form (p1 | p2) & !(p1 & p2) over 10, 01 is XOR", |_| {
        let x = XForm::new(
            2,
            vec![Pattern::Minterm(bv("10")), Pattern::Minterm(bv("01"))],
            Expr::and(
                Expr::or(Expr::Pattern(0), Expr::Pattern(1)),
                Expr::negate(Expr::and(Expr::Pattern(0), Expr::Pattern(1))),
            ),
        )?;
        let t = xform_to_circuit(&x).truth_table()?;
        Ok((t == tt(2, |b| b[0] ^ b[1]), t.to_string()))
    }),
    ("X-form over 1000, 0100, 0011 equals (b3 & b4) | b1 | b2 | (b1 & b2)", |_| {
        let p = Expr::Pattern;
        let x = XForm::new(
            4,
            ["1000", "0100", "0011"].iter().map(|s| Pattern::Minterm(bv(s))).collect(),
            Expr::or(Expr::or(Expr::or(p(2), p(0)), p(1)), Expr::and(p(0), p(1))),
        )?;
        let t = xform_to_circuit(&x).truth_table()?;
        let quoted = tt(4, |b| (b[2] && b[3]) || b[0] || b[1]);
        Ok((t == quoted, format!("form true on {} points, circuit on {}", t.count_ones(), quoted.count_ones())))
    }),
    ("objective learning holds OR after its proper prefix", |cfg| {
        let stream = [("10", true), ("01", true), ("00", false), ("11", true), ("10", true), ("00", false)];
        let items: Vec<Sample> = stream.iter().map(|&(s, o)| Sample::labeled(bv(s), o)).collect();
        let run = run_learning(Strategy::Of, XForm::constant(2, false), &items, Some(&or2()), cfg)?;
        let ok = run.trace()[2..].iter().all(|e| e.converged == Some(true));
        Ok((ok, format!("{} steps", run.trace().len())))
    }),
    ("objective learning settles on b1 after the third sample", |cfg| {
        let items: Vec<Sample> = [("11", true), ("00", false), ("10", true)]
            .iter()
            .map(|&(s, o)| Sample::labeled(bv(s), o))
            .collect();
        let b1 = TruthTable::variable(2, 0);
        let run = run_learning(Strategy::Of, XForm::constant(2, false), &items, Some(&b1), cfg)?;
        Ok((run.converged == Some(true), format!("d={}", run.state.circuit.node_count())))
    }),
    ("both strategies converge by the end of a proper prefix on B^2", |cfg| {
        let mut fails = Vec::new();
        for bits in 0..16 {
            let f = TruthTable::from_u64(2, bits);
            let m = find_mpss_with(&f, MpssMode::Exhaustive, cfg)?;
            let items: Vec<Sample> = m.set.iter().map(|v| Sample::labeled(*v, f.at(v))).collect();
            for s in [Strategy::Of, Strategy::Sf] {
                let run = run_learning(s, XForm::constant(2, false), &items, Some(&f), cfg)?;
                let at_j = run.trace().get(m.size - 1).and_then(|e| e.converged);
                if at_j != Some(true) {
                    fails.push(format!("{f}/{s:?}"));
                }
            }
        }
        Ok((fails.is_empty(), format!("failures {fails:?}")))
    }),
];

/// Cases whose stated outcome the computation contradicts.
pub const KNOWN_CONFLICTS: [&str; 4] = [
    "AND on {01,11}: d_min 0, b2 is a minimal fit",
    "C_f: {100,010,011,000} is proper",
    "(b1 | b2) & b3: either joined set is proper",
    "X-form over 1000, 0100, 0011 equals (b3 & b4) | b1 | b2 | (b1 & b2)",
];

fn height_three_fn() -> TruthTable {
    tt(4, |b| (b[0] && !b[1]) || ((!b[0] && b[1]) && (b[2] || b[3])))
}

fn golden(c: &Circuit, expected: &str) -> Result<(bool, String)> {
    let text = write_circuit(c)?;
    Ok((text == expected, text.lines().next().unwrap_or_default().to_string()))
}

fn levels(c: &Circuit, expected: &str) -> Result<(bool, String)> {
    let d = c.decompose_levels()?;
    let dump = d.dump();
    Ok((dump == expected, format!("K={}, {} spurious", d.depth(), d.spurious().len())))
}

fn verdict(f: &TruthTable, s: &[&str], expected: bool, cfg: &Config) -> Result<(bool, String)> {
    let r = is_pss_with(f, &pts(s), cfg)?;
    let detail = match &r.offending_function {
        Some(g) => format!("d_min={}, other minimal fit {g}", r.d_min),
        None => format!("d_min={}", r.d_min),
    };
    Ok((r.is_pss == expected, detail))
}

pub fn selftest(cfg: &Config) -> ReplayReport {
    let start = Instant::now();
    let cases: Vec<ReplayCase> = CASES
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = check(cfg).unwrap_or_else(|e| (false, format!("error: {e}")));
            ReplayCase { name, passed, detail }
        })
        .collect();
    let passed = cases.iter().filter(|c| c.passed).count();
    ReplayReport {
        failed: cases.len() - passed,
        passed,
        cases,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}
