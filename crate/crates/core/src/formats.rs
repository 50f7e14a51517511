//! DIMACS `wcnf`, partition-annotated `pwcnf`, and solution output.
//!
//! A pwcnf file has the header `p pwcnf n_vars n_clauses top n_part` followed
//! by clause records `part weight lit* 0`. A wcnf file has the header
//! `p wcnf n_vars n_clauses [top]` and records `weight lit* 0`. Records are
//! whitespace-separated tokens and may wrap across lines. Lines starting with
//! `c` are comments. A clause whose weight equals `top` is hard.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::cnf::{Clause, InstanceError, Lit, MaxSatInstance, PartitionedInstance, SoftClause};
use crate::maxsat::{SolveResult, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A parse error or warning tied to a 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl ParseDiagnostic {
    fn error(line: usize, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line: line.max(1),
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(line: usize, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line: line.max(1),
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "line {}: {}: {}", self.line, kind, self.message)
    }
}

/// A parsed value together with the warnings raised while reading it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Either kind of input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Wcnf(MaxSatInstance),
    Pwcnf(PartitionedInstance),
}

impl Input {
    pub fn instance(&self) -> &MaxSatInstance {
        match self {
            Input::Wcnf(i) => i,
            Input::Pwcnf(p) => &p.base,
        }
    }

    pub fn into_instance(self) -> MaxSatInstance {
        match self {
            Input::Wcnf(i) => i,
            Input::Pwcnf(p) => p.base,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dialect {
    Wcnf,
    Pwcnf,
}

struct Header {
    n_vars: u32,
    n_clauses: usize,
    top: Option<u64>,
    n_part: u32,
}

struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Tokens<'a> {
        Tokens {
            lines: text.lines().enumerate(),
            current: "".split_whitespace(),
            line: 0,
        }
    }

    /// Next non-comment line, as a token iterator; `None` at end of input.
    fn next_line(&mut self) -> Option<&'a str> {
        for (i, l) in self.lines.by_ref() {
            self.line = i + 1;
            let t = l.trim_start();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            return Some(t);
        }
        None
    }

    fn next(&mut self) -> Result<Option<&'a str>, ParseDiagnostic> {
        loop {
            if let Some(tok) = self.current.next() {
                return Ok(Some(tok));
            }
            match self.next_line() {
                None => return Ok(None),
                Some(l) if l.starts_with('p') => {
                    return Err(ParseDiagnostic::error(self.line, "duplicate header"));
                }
                Some(l) => self.current = l.split_whitespace(),
            }
        }
    }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseDiagnostic> {
    tok.parse()
        .map_err(|_| ParseDiagnostic::error(line, format!("invalid {what} `{tok}`")))
}

fn parse_header(
    tokens: &mut Tokens<'_>,
    expected: Option<Dialect>,
) -> Result<(Dialect, Header), ParseDiagnostic> {
    let Some(line) = tokens.next_line() else {
        return Err(ParseDiagnostic::error(tokens.line, "missing header"));
    };
    let at = tokens.line;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.first() != Some(&"p") {
        return Err(ParseDiagnostic::error(at, "missing header"));
    }
    let dialect = match fields.get(1) {
        Some(&"wcnf") => Dialect::Wcnf,
        Some(&"pwcnf") => Dialect::Pwcnf,
        Some(other) => {
            return Err(ParseDiagnostic::error(at, format!("unsupported format `{other}`")))
        }
        None => return Err(ParseDiagnostic::error(at, "header lacks a format name")),
    };
    if let Some(e) = expected {
        if e != dialect {
            let want = if e == Dialect::Wcnf { "wcnf" } else { "pwcnf" };
            return Err(ParseDiagnostic::error(at, format!("expected a `p {want}` header")));
        }
    }
    let args = &fields[2..];
    let arity_ok = match dialect {
        Dialect::Wcnf => args.len() == 2 || args.len() == 3,
        Dialect::Pwcnf => args.len() == 4,
    };
    if !arity_ok {
        let shape = match dialect {
            Dialect::Wcnf => "p wcnf n_vars n_clauses [top]",
            Dialect::Pwcnf => "p pwcnf n_vars n_clauses top n_part",
        };
        return Err(ParseDiagnostic::error(at, format!("malformed header, expected `{shape}`")));
    }
    let n_vars = number(args[0], at, "variable count")?;
    if n_vars > i32::MAX as u32 {
        return Err(ParseDiagnostic::error(at, "variable count too large"));
    }
    let n_clauses = number(args[1], at, "clause count")?;
    let top = args.get(2).map(|t| number::<u64>(t, at, "top weight")).transpose()?;
    if top == Some(0) {
        return Err(ParseDiagnostic::error(at, "top weight must be positive"));
    }
    let n_part = match args.get(3) {
        Some(t) => number(t, at, "partition count")?,
        None => 0,
    };
    if dialect == Dialect::Pwcnf && n_part == 0 {
        return Err(ParseDiagnostic::error(at, "partition count must be positive"));
    }
    Ok((
        dialect,
        Header {
            n_vars,
            n_clauses,
            top,
            n_part,
        },
    ))
}

fn parse_any(input: &[u8], expected: Option<Dialect>) -> Result<Parsed<Input>, ParseDiagnostic> {
    let text = String::from_utf8_lossy(input);
    let mut tokens = Tokens::new(&text);
    let (dialect, header) = parse_header(&mut tokens, expected)?;
    let mut warnings = Vec::new();
    let mut hard = Vec::new();
    let mut hard_labels = Vec::new();
    let mut soft = Vec::new();
    let mut count = 0usize;

    while let Some(first) = tokens.next()? {
        let start = tokens.line;
        count += 1;
        let label = if dialect == Dialect::Pwcnf {
            let label: u32 = number(first, start, "partition label")?;
            if label == 0 || label > header.n_part {
                return Err(ParseDiagnostic::error(
                    start,
                    format!("partition label {label} outside [1, {}]", header.n_part),
                ));
            }
            Some(label)
        } else {
            None
        };
        let weight_tok = match label {
            Some(_) => tokens
                .next()?
                .ok_or_else(|| ParseDiagnostic::error(tokens.line, "clause not terminated by 0"))?,
            None => first,
        };
        let weight: u64 = number(weight_tok, tokens.line, "weight")?;
        if weight == 0 {
            return Err(ParseDiagnostic::error(tokens.line, "weight must be positive"));
        }
        if let Some(top) = header.top {
            if weight > top {
                return Err(ParseDiagnostic::error(
                    tokens.line,
                    format!("soft weight exceeds top ({weight} > {top})"),
                ));
            }
        }
        let mut lits = Vec::new();
        loop {
            let Some(tok) = tokens.next()? else {
                return Err(ParseDiagnostic::error(tokens.line, "clause not terminated by 0"));
            };
            let v: i32 = number(tok, tokens.line, "literal")?;
            if v == 0 {
                break;
            }
            if v.unsigned_abs() > header.n_vars {
                return Err(ParseDiagnostic::error(
                    tokens.line,
                    format!("literal {v} exceeds n_vars = {}", header.n_vars),
                ));
            }
            lits.push(Lit::from_dimacs(v).expect("nonzero"));
        }
        let clause = match Clause::new(lits) {
            Ok(c) => c,
            Err(_) => {
                warnings.push(ParseDiagnostic::warning(start, "tautological clause dropped"));
                continue;
            }
        };
        if Some(weight) == header.top {
            hard.push(clause);
            if let Some(l) = label {
                hard_labels.push(l);
            }
        } else {
            soft.push(SoftClause::new(clause, weight).with_partition(label.unwrap_or(0)));
        }
    }
    if count != header.n_clauses {
        return Err(ParseDiagnostic::error(
            tokens.line,
            format!("header declares {} clauses, body has {count}", header.n_clauses),
        ));
    }
    let top = match header.top {
        Some(t) => t,
        None => {
            let sum = soft
                .iter()
                .try_fold(0u64, |acc: u64, s: &SoftClause| acc.checked_add(s.weight));
            sum.and_then(|s| s.checked_add(1))
                .ok_or_else(|| ParseDiagnostic::error(tokens.line, "weight sum overflows 64 bits"))?
        }
    };
    let base = MaxSatInstance {
        n_vars: header.n_vars,
        hard,
        soft,
        top,
    };
    if let Err(InstanceError::WeightOverflow) = base.total_soft_weight() {
        return Err(ParseDiagnostic::error(tokens.line, "weight sum overflows 64 bits"));
    }
    let value = match dialect {
        Dialect::Wcnf => Input::Wcnf(base),
        Dialect::Pwcnf => Input::Pwcnf(PartitionedInstance {
            base,
            n_part: header.n_part,
            hard_labels,
        }),
    };
    Ok(Parsed { value, warnings })
}

pub fn parse_pwcnf_with_warnings(
    input: &[u8],
) -> Result<Parsed<PartitionedInstance>, ParseDiagnostic> {
    let p = parse_any(input, Some(Dialect::Pwcnf))?;
    match p.value {
        Input::Pwcnf(value) => Ok(Parsed {
            value,
            warnings: p.warnings,
        }),
        Input::Wcnf(_) => unreachable!("dialect checked in header"),
    }
}

pub fn parse_pwcnf(input: &[u8]) -> Result<PartitionedInstance, ParseDiagnostic> {
    parse_pwcnf_with_warnings(input).map(|p| p.value)
}

pub fn parse_wcnf_with_warnings(input: &[u8]) -> Result<Parsed<MaxSatInstance>, ParseDiagnostic> {
    let p = parse_any(input, Some(Dialect::Wcnf))?;
    Ok(Parsed {
        value: p.value.into_instance(),
        warnings: p.warnings,
    })
}

pub fn parse_wcnf(input: &[u8]) -> Result<MaxSatInstance, ParseDiagnostic> {
    parse_wcnf_with_warnings(input).map(|p| p.value)
}

/// Parses either format, chosen by the header.
pub fn parse_auto(input: &[u8]) -> Result<Parsed<Input>, ParseDiagnostic> {
    parse_any(input, None)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WriteError {
    #[error("soft clause {0} has no partition label")]
    UnassignedLabel(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn push_clause(out: &mut String, prefix: &str, clause: &Clause) {
    out.push_str(prefix);
    for l in clause.lits() {
        let _ = write!(out, " {l}");
    }
    out.push_str(" 0\n");
}

/// Hard clauses first, then soft clauses, each in input order.
pub fn write_pwcnf(inst: &PartitionedInstance) -> Result<String, WriteError> {
    let base = &inst.base;
    base.validate()?;
    if let Some(i) = base.soft.iter().position(|s| s.partition == 0) {
        return Err(WriteError::UnassignedLabel(i));
    }
    inst.validate()?;
    let keep_labels = inst.hard_labels.len() == base.hard.len()
        && inst.hard_labels.iter().all(|&l| l >= 1 && l <= inst.n_part);
    let mut out = format!(
        "p pwcnf {} {} {} {}\n",
        base.n_vars,
        base.num_clauses(),
        base.top,
        inst.n_part
    );
    for (i, c) in base.hard.iter().enumerate() {
        let label = if keep_labels { inst.hard_labels[i] } else { 1 };
        push_clause(&mut out, &format!("{label} {}", base.top), c);
    }
    for s in &base.soft {
        push_clause(&mut out, &format!("{} {}", s.partition, s.weight), &s.clause);
    }
    Ok(out)
}

pub fn write_wcnf(inst: &MaxSatInstance) -> String {
    let mut out = format!("p wcnf {} {} {}\n", inst.n_vars, inst.num_clauses(), inst.top);
    for c in &inst.hard {
        push_clause(&mut out, &inst.top.to_string(), c);
    }
    for s in &inst.soft {
        push_clause(&mut out, &s.weight.to_string(), &s.clause);
    }
    out
}

/// `o`, `s` and `v` lines in MaxSAT Evaluation style.
pub fn write_solution(result: &SolveResult) -> String {
    let mut out = String::new();
    if let Some(cost) = result.cost {
        let _ = writeln!(out, "o {cost}");
    }
    let status = match (result.status, &result.model) {
        (Status::Optimum, _) => "OPTIMUM FOUND",
        (Status::HardUnsat, _) => "UNSATISFIABLE",
        (Status::Timeout, Some(_)) => "SATISFIABLE",
        (Status::Timeout, None) => "UNKNOWN",
    };
    let _ = writeln!(out, "s {status}");
    if let Some(model) = &result.model {
        out.push('v');
        for l in model.lits() {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
    }
    out
}
