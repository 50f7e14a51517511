//! MaxSAT encodings of minimum sum coloring and seating assignment, their
//! user partition schemes, text formats and random generators.

mod generate;
mod msc;
mod seating;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cnf::PartitionedInstance;

pub use generate::{
    gen_msc, gen_seating, generate_corpus, CorpusEntry, GenKind, ManifestEntry, MscParams,
    SeatingParams,
};
pub use msc::{decode_coloring, encode_msc, MscProblem};
pub use seating::{decode_seating, encode_seating, SeatingProblem};

/// User partition scheme for an encoded problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeChoice {
    None,
    MscVertex,
    MscColor,
    SeatTags,
    SeatTables,
}

impl SchemeChoice {
    /// Parses a CLI scheme name; `vertex` and `color` apply to coloring,
    /// `tags` and `tables` to seating.
    pub fn parse(name: &str) -> Result<SchemeChoice, EncodeError> {
        match name.to_ascii_lowercase().as_str() {
            "none" => Ok(SchemeChoice::None),
            "vertex" => Ok(SchemeChoice::MscVertex),
            "color" | "colour" => Ok(SchemeChoice::MscColor),
            "tags" => Ok(SchemeChoice::SeatTags),
            "tables" => Ok(SchemeChoice::SeatTables),
            _ => Err(EncodeError::UnknownScheme(name.to_string())),
        }
    }
}

impl FromStr for SchemeChoice {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeChoice::parse(s)
    }
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeChoice::None => "none",
            SchemeChoice::MscVertex => "vertex",
            SchemeChoice::MscColor => "color",
            SchemeChoice::SeatTags => "tags",
            SchemeChoice::SeatTables => "tables",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("scheme `{scheme}` does not apply to {problem} problems")]
    SchemeMismatch {
        scheme: SchemeChoice,
        problem: &'static str,
    },
    #[error("unknown scheme `{0}` (expected none, vertex, color, tags or tables)")]
    UnknownScheme(String),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("at least one color is required")]
    NoColors,
    #[error("at least one table is required")]
    NoTables,
    #[error("tag {tag} out of range for {n} tags")]
    TagOutOfRange { tag: usize, n: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Either problem kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Msc(MscProblem),
    Seating(SeatingProblem),
}

impl Problem {
    pub fn encode(&self, scheme: SchemeChoice) -> Result<PartitionedInstance, EncodeError> {
        match self {
            Problem::Msc(p) => encode_msc(p, scheme),
            Problem::Seating(p) => encode_seating(p, scheme),
        }
    }

    /// Reads a problem file; the kind is chosen by the `p msc` or `p seating` header.
    pub fn parse(text: &str) -> Result<Problem, EncodeError> {
        let header = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('c'));
        match header.and_then(|h| h.split_whitespace().nth(1)) {
            Some("msc") => MscProblem::parse(text).map(Problem::Msc),
            Some("seating") => SeatingProblem::parse(text).map(Problem::Seating),
            _ => Err(EncodeError::Syntax {
                line: 1,
                message: "expected a `p msc` or `p seating` header".into(),
            }),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Problem::Msc(p) => p.to_text(),
            Problem::Seating(p) => p.to_text(),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> EncodeError {
    EncodeError::Syntax {
        line,
        message: message.into(),
    }
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<usize, EncodeError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

/// Non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'))
}
