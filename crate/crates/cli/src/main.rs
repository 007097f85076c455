use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fitex::format::{parse_circuit, parse_samples, parse_stream, parse_truth_table, write_circuit, write_truth_table};
use fitex::learn::{circuit_to_xform, run_learning, Strategy, XForm};
use fitex::pss::{extract_pss_with, find_mpss_with, is_pss_with, pss_to_circuit_bound_with, MpssMode};
use fitex::report::{
    BoundReport, CheckPssReport, CircuitText, EvalReport, ExtractPssReport, LearnReport, MpssReport, SynthReport,
};
use fitex::synth::{solve_min_with, FitProblem};
use fitex::{BitVector, Config, Error, TruthTable};

#[derive(Parser)]
#[command(name = "fitex", version, about = "Minimum-node circuit fitting, proper sampling sets and FE-driven learning")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a circuit at one input.
    Eval {
        #[arg(long)]
        circuit: PathBuf,
        /// Bitstring, leftmost character is b1.
        #[arg(long)]
        input: String,
    },
    /// Find a minimum-node circuit fitting a sample file.
    Synth {
        #[arg(long)]
        samples: PathBuf,
        /// Also report every minimal function class.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        dcap: Option<usize>,
    },
    /// Decide whether a point set is a proper sampling set of a function.
    CheckPss {
        /// Truth table or circuit file.
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        samples: PathBuf,
    },
    /// Extract a proper sampling set from a minimal circuit.
    ExtractPss {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Search for a minimum-size proper sampling set.
    Mpss {
        /// Truth table or circuit file.
        #[arg(long = "fn")]
        function: String,
        /// Random deletion search with this many rounds instead of the
        /// exhaustive scan.
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Run a learning strategy over a sample stream.
    Learn {
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        stream: PathBuf,
        /// Truth table file or bitstring to test convergence against.
        #[arg(long)]
        target: Option<String>,
        /// Initial circuit; constant 0 by default.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Where to write the trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Rewrite a circuit in another form.
    Convert {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "matrix")]
        to: ConvertTo,
    },
    /// Replay the worked examples.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Of,
    Sf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertTo {
    /// Connection matrix in the current node order.
    Matrix,
    /// Connection matrix in natural order.
    Natural,
    Levels,
    Infix,
    Table,
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Contract(String),
    /// Already reported; exit with this code.
    Quiet(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse(_)) => 3,
            Failure::Core(e) if e.is_budget() => 2,
            Failure::Quiet(c) => *c,
            _ => 1,
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

/// Truth table file, circuit file, or an inline bitstring.
fn load_function(arg: &str) -> Res<TruthTable> {
    let path = Path::new(arg);
    if !path.exists() {
        if arg.chars().all(|c| c == '0' || c == '1') && !arg.is_empty() {
            return Ok(TruthTable::from_bitstring(arg).map_err(Error::from)?);
        }
        return Err(Failure::Io(path.to_path_buf(), std::io::ErrorKind::NotFound.into()));
    }
    let text = read(path)?;
    match parse_truth_table(&text) {
        Ok(t) => Ok(t),
        Err(table_err) => match parse_circuit(&text) {
            Ok(c) => Ok(c.truth_table()?),
            Err(_) => Err(table_err.into()),
        },
    }
}

fn emit<T: Serialize>(json: bool, report: &T, human: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    } else {
        print!("{}", human());
    }
}

fn points(set: &std::collections::BTreeSet<BitVector>) -> String {
    set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Res<()> {
    let cfg = Config::from_env();
    let json = cli.json;
    match cli.command {
        Command::Eval { circuit, input } => {
            let c = parse_circuit(&read(&circuit)?)?;
            let v: BitVector = input.parse().map_err(Error::from)?;
            let r = EvalReport::new(&c, &v)?;
            emit(json, &r, || format!("{}\n", r.output as u8));
        }
        Command::Synth { samples, all, dcap } => {
            let sv = parse_samples(&read(&samples)?)?;
            let mut p = FitProblem::new(sv);
            p.enumerate_all = all;
            p.d_cap = dcap;
            let r = solve_min_with(&p, &cfg)?;
            let rep = SynthReport::new(&r)?;
            emit(json, &rep, || {
                let mut s = format!("d_min={}\nwitness: {}\n{}", r.d_min, r.witness, rep.witness.text);
                if all {
                    s.push_str(&format!("function classes: {}\n", rep.function_classes.join(" ")));
                }
                s
            });
        }
        Command::CheckPss { function, samples } => {
            let f = load_function(&function)?;
            let sv = parse_samples(&read(&samples)?)?;
            if let Some((v, o)) = sv.labeled().find(|(v, o)| f.at(v) != *o) {
                return Err(Failure::Contract(format!(
                    "sample {v} -> {} disagrees with the function",
                    o as u8
                )));
            }
            let r = is_pss_with(&f, &sv.inputs().collect(), &cfg)?;
            let rep = CheckPssReport {
                function: f.to_string(),
                report: r,
            };
            emit(json, &rep, || {
                let r = &rep.report;
                let mut s = format!("is_pss={} d_min={} size={}\n", r.is_pss, r.d_min, r.size);
                if let Some(g) = &r.offending_function {
                    s.push_str(&format!("other minimal fit: {g}\n"));
                }
                s
            });
        }
        Command::ExtractPss { circuit } => {
            let c = parse_circuit(&read(&circuit)?)?;
            let f = c.truth_table()?;
            let r = extract_pss_with(&f, &c, &cfg)?;
            let rebuilt = match pss_to_circuit_bound_with(&f, &r.set, &cfg) {
                Ok(b) => Some(BoundReport::new(&b)?),
                Err(Error::NotExpressing) => None,
                Err(e) => return Err(e.into()),
            };
            let rep = ExtractPssReport {
                function: f.to_string(),
                circuit: CircuitText::new(&c)?,
                report: r,
                rebuilt,
            };
            emit(json, &rep, || {
                let r = &rep.report;
                let mut s = format!(
                    "set: {}\nsize={} d={} bound={}\njoined: {} (proper={})\n",
                    points(&r.set),
                    r.size,
                    r.d,
                    r.bound,
                    points(&r.joined),
                    r.verified
                );
                if let Some(b) = &rep.rebuilt {
                    s.push_str(&format!("rebuilt: {} (d={} < {})\n", b.circuit.infix, b.d, b.bound));
                }
                s
            });
        }
        Command::Mpss { function, rounds } => {
            let f = load_function(&function)?;
            let (mode, name) = match rounds {
                Some(r) => (MpssMode::Randomized { rounds: r }, "randomized"),
                None => (MpssMode::Exhaustive, "exhaustive"),
            };
            let r = find_mpss_with(&f, mode, &cfg)?;
            let rep = MpssReport {
                function: f.to_string(),
                mode: name.into(),
                result: r,
            };
            emit(json, &rep, || {
                let r = &rep.result;
                format!("set: {}\nsize={} certified={}\n", points(&r.set), r.size, r.certified)
            });
        }
        Command::Learn {
            strategy,
            stream,
            target,
            init,
            trace,
        } => {
            let (n, items) = parse_stream(&read(&stream)?)?;
            let target = target.as_deref().map(load_function).transpose()?;
            let initial = match init {
                Some(p) => circuit_to_xform(&parse_circuit(&read(&p)?)?),
                None => XForm::constant(n, false),
            };
            if initial.n_inputs() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: initial.n_inputs(),
                }
                .into());
            }
            let strategy = match strategy {
                StrategyArg::Of => Strategy::Of,
                StrategyArg::Sf => Strategy::Sf,
            };
            let run = run_learning(strategy, initial, &items, target.as_ref(), &cfg)?;
            if let Some(path) = trace {
                let text = serde_json::to_string_pretty(run.trace()).expect("trace serializes");
                fs::write(&path, text + "\n").map_err(|e| Failure::Io(path, e))?;
            }
            let rep = LearnReport {
                strategy: format!("{strategy:?}").to_lowercase(),
                steps: run.trace().len(),
                converged: run.converged,
                current: run.state.current.to_string(),
                circuit: CircuitText::new(&run.state.circuit)?,
                trace: run.trace().to_vec(),
            };
            emit(json, &rep, || {
                let mut s = String::new();
                for e in &rep.trace {
                    let ev = serde_json::to_value(e.event).expect("event serializes");
                    s.push_str(&format!("{:>4} {:<11} d={}", e.step, ev.as_str().unwrap_or(""), e.d));
                    if let Some(c) = e.converged {
                        s.push_str(&format!(" converged={c}"));
                    }
                    if e.fallback {
                        s.push_str(" fallback");
                    }
                    s.push('\n');
                }
                s.push_str(&format!("current: {}\n", rep.circuit.infix));
                s
            });
        }
        Command::Convert { circuit, to } => {
            let c = parse_circuit(&read(&circuit)?)?;
            let out = match to {
                ConvertTo::Matrix => write_circuit(&c)?,
                ConvertTo::Natural => write_circuit(&c.natural_order())?,
                ConvertTo::Levels => c.decompose_levels()?.dump(),
                ConvertTo::Infix => format!("{c}\n"),
                ConvertTo::Table => write_truth_table(&c.truth_table()?),
            };
            #[derive(Serialize)]
            struct Converted {
                text: String,
            }
            let rep = Converted { text: out };
            emit(json, &rep, || rep.text.clone());
        }
        Command::Selftest => {
            let r = fitex::replay::selftest(&cfg);
            emit(json, &r, || {
                let mut s = String::new();
                for c in &r.cases {
                    s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
                }
                s.push_str(&format!("{} passed, {} failed\n", r.passed, r.failed));
                s
            });
            if !r.all_passed() {
                return Err(Failure::Quiet(1));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(p, e) => eprintln!("error: {}: {e}", p.display()),
                Failure::Contract(m) => eprintln!("error: {m}"),
                Failure::Quiet(_) => {}
            }
            ExitCode::from(f.code())
        }
    }
}
