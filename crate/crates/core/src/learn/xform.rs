use std::collections::HashMap;
use std::fmt;

use crate::bits::BitVector;
use crate::circuit::{Body, Circuit, Edge, GateKind, NodeRef, Polarity, WorkingNode};
use crate::error::{Error, Result};
use crate::function::push_minterm;

/// A base pattern seen as a boolean variable over B^N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// True exactly at the vector.
    Minterm(BitVector),
    /// The input b_{j+1}.
    Variable(usize),
}

impl Pattern {
    fn eval(&self, v: &BitVector) -> bool {
        match self {
            Pattern::Minterm(p) => p == v,
            Pattern::Variable(j) => v.get(*j),
        }
    }

    /// Nodes the pattern costs once compiled.
    pub fn node_cost(&self) -> usize {
        match self {
            Pattern::Minterm(p) => p.len().saturating_sub(1),
            Pattern::Variable(_) => 0,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Minterm(p) => write!(f, "({p})"),
            Pattern::Variable(j) => write!(f, "b{}", j + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Pattern(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    fn binary(gate: GateKind, a: Expr, b: Expr) -> Expr {
        match gate {
            GateKind::And => Expr::and(a, b),
            GateKind::Or => Expr::or(a, b),
        }
    }

    fn eval(&self, p: &[bool]) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Pattern(k) => p[*k],
            Expr::Not(e) => !e.eval(p),
            Expr::And(a, b) => a.eval(p) && b.eval(p),
            Expr::Or(a, b) => a.eval(p) || b.eval(p),
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Not(e) => e.visit(f),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Written ¬ operators.
    pub fn not_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| n += matches!(e, Expr::Not(_)) as usize);
        n
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let (prec, op) = match self {
            Expr::Const(b) => return write!(f, "{}", *b as u8),
            Expr::Pattern(k) => return write!(f, "p{}", k + 1),
            Expr::Not(e) => {
                f.write_str("!")?;
                return e.fmt_prec(f, 3);
            }
            Expr::And(..) => (2, " & "),
            Expr::Or(..) => (1, " | "),
        };
        let (Expr::And(a, b) | Expr::Or(a, b)) = self else { unreachable!() };
        if prec < parent {
            f.write_str("(")?;
        }
        a.fmt_prec(f, prec)?;
        f.write_str(op)?;
        b.fmt_prec(f, prec + 1)?;
        if prec < parent {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An {∨, ∧, ¬} expression over a group of base patterns.
///
/// Identical sub-expressions are compiled once, so a circuit transcribed by
/// [`circuit_to_xform`] compiles back to the same node count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XForm {
    n: usize,
    patterns: Vec<Pattern>,
    expr: Expr,
}

impl XForm {
    pub fn new(n: usize, patterns: Vec<Pattern>, expr: Expr) -> Result<Self> {
        let x = XForm { n, patterns, expr };
        x.check()?;
        Ok(x)
    }

    pub fn constant(n: usize, value: bool) -> Self {
        XForm {
            n,
            patterns: Vec::new(),
            expr: Expr::Const(value),
        }
    }

    /// The single-pattern form E = p over the minterm of `v`.
    pub fn minterm(v: &BitVector) -> Self {
        XForm {
            n: v.len(),
            patterns: vec![Pattern::Minterm(*v)],
            expr: Expr::Pattern(0),
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidXForm(m));
        if self.n == 0 {
            return bad("dimension must be positive".into());
        }
        for (k, p) in self.patterns.iter().enumerate() {
            match p {
                Pattern::Minterm(v) if v.len() != self.n => {
                    return bad(format!("p{} has dimension {}, expected {}", k + 1, v.len(), self.n))
                }
                Pattern::Variable(j) if *j >= self.n => {
                    return bad(format!("p{} references missing input b{}", k + 1, j + 1))
                }
                _ => {}
            }
        }
        let mut err = None;
        let root_const = matches!(strip_not(&self.expr).0, Expr::Const(_));
        self.expr.visit(&mut |e| match e {
            Expr::Pattern(k) if *k >= self.patterns.len() => {
                err.get_or_insert(format!("leaf p{} but only {} patterns", k + 1, self.patterns.len()));
            }
            Expr::Const(_) if !root_const => {
                err.get_or_insert("constants may only form the whole expression".into());
            }
            _ => {}
        });
        match err {
            Some(m) => bad(m),
            None => Ok(()),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn evaluate(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        let p: Vec<bool> = self.patterns.iter().map(|p| p.eval(v)).collect();
        Ok(self.expr.eval(&p))
    }

    /// d(E): distinct ∨/∧ sub-expressions, identifying those that differ only
    /// by double negation or by naming the same pattern twice.
    pub fn operator_count(&self) -> usize {
        if matches!(strip_not(&self.expr).0, Expr::Const(_)) {
            return 0;
        }
        let mut c = Compiler::new(self);
        c.edge(&self.expr);
        c.memo.len()
    }

    /// Pattern indices the expression references.
    pub fn used_patterns(&self) -> Vec<usize> {
        let mut used = vec![false; self.patterns.len()];
        self.expr.visit(&mut |e| {
            if let Expr::Pattern(k) = e {
                used[*k] = true;
            }
        });
        (0..used.len()).filter(|&k| used[k]).collect()
    }

    /// The adjusting number L = d(C) − d(E): nodes spent on referenced
    /// minterm patterns, N−1 each.
    pub fn pattern_overhead(&self) -> usize {
        self.used_patterns().iter().map(|&k| self.patterns[k].node_cost()).sum()
    }
}

impl fmt::Display for XForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt_prec(f, 0)?;
        if !self.patterns.is_empty() {
            f.write_str(" where ")?;
            for (k, p) in self.patterns.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "p{}={p}", k + 1)?;
            }
        }
        Ok(())
    }
}

fn strip_not(e: &Expr) -> (&Expr, bool) {
    let mut e = e;
    let mut neg = false;
    while let Expr::Not(inner) = e {
        e = inner;
        neg = !neg;
    }
    (e, neg)
}

struct Compiler<'a> {
    x: &'a XForm,
    nodes: Vec<WorkingNode>,
    pattern_edges: Vec<Option<Edge>>,
    memo: HashMap<(GateKind, Edge, Edge), usize>,
}

impl<'a> Compiler<'a> {
    fn new(x: &'a XForm) -> Self {
        Compiler {
            x,
            nodes: Vec::new(),
            pattern_edges: vec![None; x.patterns.len()],
            memo: HashMap::new(),
        }
    }

    fn pattern(&mut self, k: usize) -> Edge {
        if let Some(e) = self.pattern_edges[k] {
            return e;
        }
        let e = match &self.x.patterns[k] {
            Pattern::Minterm(v) => push_minterm(v, &mut self.nodes),
            Pattern::Variable(j) => Edge::input(*j),
        };
        self.pattern_edges[k] = Some(e);
        e
    }

    fn edge(&mut self, e: &Expr) -> Edge {
        let (e, neg) = strip_not(e);
        let out = match e {
            Expr::Pattern(k) => self.pattern(*k),
            Expr::And(a, b) | Expr::Or(a, b) => {
                let gate = if matches!(e, Expr::And(..)) { GateKind::And } else { GateKind::Or };
                let l = self.edge(a);
                let r = self.edge(b);
                let key = (gate, l, r);
                let k = match self.memo.get(&key) {
                    Some(&k) => k,
                    None => {
                        self.nodes.push(WorkingNode::new(gate, l, r));
                        self.memo.insert(key, self.nodes.len() - 1);
                        self.nodes.len() - 1
                    }
                };
                Edge::working(k)
            }
            Expr::Const(_) | Expr::Not(_) => unreachable!("checked"),
        };
        if neg {
            out.negate()
        } else {
            out
        }
    }
}

/// Compiles each referenced pattern to its minterm chain and each operator to
/// a node, folding ¬ onto edges. d(C) = d(E) + L with L from
/// [`XForm::pattern_overhead`].
pub fn xform_to_circuit(x: &XForm) -> Circuit {
    let n = x.n;
    let (root, root_neg) = strip_not(&x.expr);
    if let Expr::Const(b) = root {
        return Circuit::constant(n, b ^ root_neg);
    }
    let mut c = Compiler::new(x);
    let out = c.edge(&x.expr);
    let mut nodes = c.nodes;
    match out.source {
        NodeRef::Input(j) => Circuit::literal(n, j, out.polarity),
        NodeRef::Working(k) => {
            debug_assert_eq!(k, nodes.len() - 1);
            if out.polarity.is_negated() {
                nodes[k] = nodes[k].dual();
            }
            Circuit::new_unchecked(n, Body::Nodes(nodes))
        }
    }
}

/// Transcribes `c` over the unit patterns b_1..b_N with explicit ¬.
pub fn circuit_to_xform(c: &Circuit) -> XForm {
    let n = c.n_inputs();
    let patterns: Vec<Pattern> = (0..n).map(Pattern::Variable).collect();
    let expr = match c.body() {
        Body::Const(b) => {
            return XForm::constant(n, *b);
        }
        Body::Literal { input, polarity } => with_polarity(Expr::Pattern(*input), *polarity),
        Body::Nodes(nodes) => {
            let mut exprs: Vec<Expr> = Vec::with_capacity(nodes.len());
            for w in nodes {
                let side = |e: Edge, exprs: &[Expr]| {
                    let base = match e.source {
                        NodeRef::Input(j) => Expr::Pattern(j),
                        NodeRef::Working(k) => exprs[k].clone(),
                    };
                    with_polarity(base, e.polarity)
                };
                let l = side(w.left, &exprs);
                let r = side(w.right, &exprs);
                exprs.push(Expr::binary(w.gate, l, r));
            }
            exprs.pop().expect("nonempty")
        }
    };
    XForm { n, patterns, expr }
}

fn with_polarity(e: Expr, p: Polarity) -> Expr {
    if p.is_negated() {
        Expr::negate(e)
    } else {
        e
    }
}
