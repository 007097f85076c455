//! Text formats for circuits, sample sets, streams and truth tables.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fmt::Write as _;

use crate::bits::BitVector;
use crate::circuit::{Body, Circuit, ConnectionMatrix, Entry, Polarity};
use crate::error::{Error, ParseError, Result};
use crate::function::{Sample, SampleSet};
use crate::table::TruthTable;

struct Line<'a> {
    no: usize,
    text: &'a str,
}

fn content_lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim_end();
        let s = t.trim_start();
        (!s.is_empty() && !s.starts_with('#')).then_some(Line { no: i + 1, text: t })
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - s.as_ptr() as usize + 1, tok))
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError::new(line, column, message))
}

fn shift(e: ParseError, line: usize, column: usize) -> Error {
    perr(line, column + e.column - 1, e.message)
}

/// `key=value` pairs of a header line.
fn header(line: &Line<'_>) -> Result<Vec<(usize, String, String)>> {
    tokens(line.text)
        .map(|(col, tok)| match tok.split_once('=') {
            Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((col, k.to_string(), v.to_string())),
            _ => Err(perr(line.no, col, format!("expected key=value, found '{tok}'"))),
        })
        .collect()
}

fn header_n(line: &Line<'_>, fields: &[(usize, String, String)]) -> Result<usize> {
    match fields.first() {
        Some((col, k, v)) if k == "N" => v
            .parse::<usize>()
            .ok()
            .filter(|&n| (1..=crate::bits::MAX_INPUTS).contains(&n))
            .ok_or_else(|| perr(line.no, col + 2, format!("bad input count '{v}'"))),
        Some((col, k, _)) => Err(perr(line.no, *col, format!("header must start with N=, found '{k}'"))),
        None => Err(perr(line.no, 1, "empty header")),
    }
}

fn first_line<'a>(it: &mut impl Iterator<Item = Line<'a>>, what: &str) -> Result<Line<'a>> {
    it.next().ok_or_else(|| perr(1, 1, format!("missing {what} header")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = content_lines(text);
    let head = first_line(&mut lines, "circuit")?;
    let fields = header(&head)?;
    let n = header_n(&head, &fields)?;
    if fields.len() != 2 {
        return Err(perr(head.no, 1, "header must be N=<n> followed by one of d=, const=, lit="));
    }
    let (col, key, val) = &fields[1];
    let vcol = col + key.len() + 1;
    let body = match key.as_str() {
        "const" => match val.as_str() {
            "0" => Body::Const(false),
            "1" => Body::Const(true),
            _ => return Err(perr(head.no, vcol, format!("const must be 0 or 1, found '{val}'"))),
        },
        "lit" => {
            let (neg, digits) = match val.as_bytes()[0] {
                b'-' => (true, &val[1..]),
                b'+' => (false, &val[1..]),
                _ => (false, &val[..]),
            };
            let j = digits
                .parse::<usize>()
                .ok()
                .filter(|j| (1..=n).contains(j))
                .ok_or_else(|| perr(head.no, vcol, format!("literal must be ±j with 1 <= j <= {n}, found '{val}'")))?;
            Body::Literal {
                input: j - 1,
                polarity: Polarity::from_negated(neg),
            }
        }
        "d" => {
            let d = val
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| perr(head.no, vcol, format!("d must be a positive integer, found '{val}'")))?;
            return parse_matrix_rows(&mut lines, head.no, n, d);
        }
        other => return Err(perr(head.no, *col, format!("unknown header key '{other}'"))),
    };
    if let Some(extra) = lines.next() {
        return Err(perr(extra.no, 1, "unexpected content after degenerate circuit header"));
    }
    Circuit::new(n, body).map_err(|e| perr(head.no, 1, e.to_string()))
}

fn parse_matrix_rows<'a>(
    lines: &mut impl Iterator<Item = Line<'a>>,
    head_line: usize,
    n: usize,
    d: usize,
) -> Result<Circuit> {
    let cols = n + d - 1;
    let mut rows = Vec::with_capacity(d);
    let mut row_lines = Vec::with_capacity(d);
    for line in lines.by_ref() {
        if rows.len() == d {
            return Err(perr(line.no, 1, format!("more than d={d} matrix rows")));
        }
        let mut row = Vec::with_capacity(cols);
        for (col, tok) in tokens(line.text) {
            let e: Entry = tok
                .parse()
                .map_err(|_| perr(line.no, col, format!("unknown symbol '{tok}'")))?;
            row.push(e);
        }
        if row.len() != cols {
            return Err(perr(line.no, 1, format!("row has {} symbols, expected N+d-1 = {cols}", row.len())));
        }
        rows.push(row);
        row_lines.push(line.no);
    }
    if rows.len() < d {
        return Err(perr(head_line, 1, format!("expected {d} matrix rows, found {}", rows.len())));
    }
    let m = ConnectionMatrix::new(n, rows).map_err(|e| match e {
        Error::MatrixRow { row, message } => perr(row_lines[row - 1], 1, message),
        Error::MatrixColumn { column, message } => perr(head_line, 1, format!("column {column}: {message}")),
        other => perr(head_line, 1, other.to_string()),
    })?;
    Circuit::from_connection_matrix(&m).map_err(|e| perr(head_line, 1, e.to_string()))
}

/// Header plus matrix rows in the circuit's node order. Circuits with a
/// repeated operand have no matrix and are rejected.
pub fn write_circuit(c: &Circuit) -> Result<String> {
    let n = c.n_inputs();
    Ok(match c.body() {
        Body::Const(b) => format!("N={n} const={}\n", *b as u8),
        Body::Literal { input, polarity } => {
            format!("N={n} lit={}{}\n", if polarity.is_negated() { "-" } else { "" }, input + 1)
        }
        Body::Nodes(nodes) => {
            let m = c.to_connection_matrix()?;
            format!("N={n} d={}\n{m}\n", nodes.len())
        }
    })
}

fn parse_items(text: &str) -> Result<(usize, Vec<(usize, Sample)>)> {
    let mut lines = content_lines(text);
    let head = first_line(&mut lines, "sample")?;
    let fields = header(&head)?;
    let n = header_n(&head, &fields)?;
    if fields.len() != 1 {
        return Err(perr(head.no, fields[1].0, "sample header takes only N="));
    }
    let mut out = Vec::new();
    for line in lines {
        let toks: Vec<(usize, &str)> = tokens(line.text).collect();
        let [(bc, bits), (ac, arrow), (oc, out_tok)] = toks[..] else {
            return Err(perr(line.no, 1, "expected '<bits> -> <0|1|?>'"));
        };
        let input: BitVector = bits.parse().map_err(|e| shift(e, line.no, bc))?;
        if input.len() != n {
            return Err(perr(line.no, bc, format!("input has {} bits, expected {n}", input.len())));
        }
        if arrow != "->" {
            return Err(perr(line.no, ac, format!("expected '->', found '{arrow}'")));
        }
        let output = match out_tok {
            "0" => Some(false),
            "1" => Some(true),
            "?" => None,
            other => return Err(perr(line.no, oc, format!("output must be 0, 1 or ?, found '{other}'"))),
        };
        out.push((line.no, Sample { input, output }));
    }
    Ok((n, out))
}

/// Sample file as a set; repeated inputs must agree.
pub fn parse_samples(text: &str) -> Result<SampleSet> {
    let (n, items) = parse_items(text)?;
    let mut sv = SampleSet::new(n);
    for (no, s) in items {
        sv.insert(s).map_err(|e| perr(no, 1, e.to_string()))?;
    }
    Ok(sv)
}

/// Sample file as an ordered stream; repeats are kept.
pub fn parse_stream(text: &str) -> Result<(usize, Vec<Sample>)> {
    let (n, items) = parse_items(text)?;
    Ok((n, items.into_iter().map(|(_, s)| s).collect()))
}

fn write_item(out: &mut String, v: &BitVector, o: Option<bool>) {
    let o = match o {
        Some(true) => '1',
        Some(false) => '0',
        None => '?',
    };
    writeln!(out, "{v} -> {o}").expect("string write");
}

pub fn write_samples(sv: &SampleSet) -> String {
    let mut out = format!("N={}\n", sv.n_inputs());
    for s in sv.iter() {
        write_item(&mut out, &s.input, s.output);
    }
    out
}

pub fn write_stream(n: usize, items: &[Sample]) -> String {
    let mut out = format!("N={n}\n");
    for s in items {
        write_item(&mut out, &s.input, s.output);
    }
    out
}

/// `N=<n>` then the 2^N-character table, row 0 first.
pub fn parse_truth_table(text: &str) -> Result<TruthTable> {
    let mut lines = content_lines(text);
    let head = first_line(&mut lines, "truth table")?;
    let fields = header(&head)?;
    let n = header_n(&head, &fields)?;
    if fields.len() != 1 {
        return Err(perr(head.no, fields[1].0, "truth table header takes only N="));
    }
    let body = lines.next().ok_or_else(|| perr(head.no, 1, "missing table line"))?;
    let col = body.text.len() - body.text.trim_start().len() + 1;
    let t = TruthTable::from_bitstring(body.text).map_err(|e| shift(e, body.no, col))?;
    if t.n_inputs() != n {
        return Err(perr(body.no, col, format!("table has {} rows, expected 2^{n}", t.len())));
    }
    if let Some(extra) = lines.next() {
        return Err(perr(extra.no, 1, "unexpected content after table"));
    }
    Ok(t)
}

pub fn write_truth_table(t: &TruthTable) -> String {
    format!("N={}\n{t}\n", t.n_inputs())
}
