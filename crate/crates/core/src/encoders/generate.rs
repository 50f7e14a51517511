use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EncodeError, MscProblem, Problem, SeatingProblem};

/// Ranges (inclusive) for random minimum sum coloring problems.
#[derive(Clone, Debug, PartialEq)]
pub struct MscParams {
    pub vertices: (usize, usize),
    pub density: (f64, f64),
    pub colors: (usize, usize),
}

impl Default for MscParams {
    fn default() -> MscParams {
        MscParams {
            vertices: (10, 60),
            density: (0.1, 0.5),
            colors: (3, 8),
        }
    }
}

/// Ranges (inclusive) for random seating problems. When `min` or `max` is
/// unset, the per-table bounds are `floor(P / 2T)` and `ceil(2P / T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeatingParams {
    pub persons: (usize, usize),
    pub tables: (usize, usize),
    pub tag_universe: (usize, usize),
    pub tags_per_person: (usize, usize),
    pub min: Option<usize>,
    pub max: Option<usize>,
}

impl Default for SeatingParams {
    fn default() -> SeatingParams {
        SeatingParams {
            persons: (8, 40),
            tables: (2, 6),
            tag_universe: (3, 10),
            tags_per_person: (1, 3),
            min: None,
            max: None,
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo.min(hi)..=hi.max(lo))
}

/// Erdos-Renyi graph with a density drawn from the range.
pub fn gen_msc(params: &MscParams, seed: u64) -> MscProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = draw(&mut rng, params.vertices);
    let (lo, hi) = params.density;
    let density = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    let colors = draw(&mut rng, params.colors).max(1);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    MscProblem::new(n, edges, colors).expect("generated edges are in range")
}

/// Persons with tag sets sampled without replacement from the drawn universe.
pub fn gen_seating(params: &SeatingParams, seed: u64) -> SeatingProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = draw(&mut rng, params.persons);
    let tables = draw(&mut rng, params.tables).max(1);
    let universe = draw(&mut rng, params.tag_universe);
    let persons: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let k = draw(&mut rng, params.tags_per_person).min(universe);
            sample(&mut rng, universe, k).into_vec()
        })
        .collect();
    let min = params.min.unwrap_or(n / (2 * tables));
    let max = params.max.unwrap_or((2 * n).div_ceil(tables));
    let p = SeatingProblem::new(persons, universe, tables, min, max).expect("tags in range");
    if !p.is_feasible() {
        log::warn!(
            "seating problem (seed {seed}) is infeasible: {n} persons, {tables} tables, {min}..{max} per table"
        );
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Msc,
    Seating,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::Msc => "msc",
            GenKind::Seating => "seating",
        })
    }
}

impl FromStr for GenKind {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "msc" => Ok(GenKind::Msc),
            "seating" => Ok(GenKind::Seating),
            _ => Err(EncodeError::Syntax {
                line: 0,
                message: format!("unknown problem kind `{s}` (expected msc or seating)"),
            }),
        }
    }
}

/// One line of a generator manifest: space-separated `key=value` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ManifestEntry {
    pub fields: Vec<(String, String)>,
}

impl ManifestEntry {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse_line(line: &str) -> Result<ManifestEntry, EncodeError> {
        let fields = line
            .split_whitespace()
            .map(|tok| {
                tok.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| EncodeError::Syntax {
                        line: 0,
                        message: format!("manifest token `{tok}` is not key=value"),
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(ManifestEntry { fields })
    }
}

impl fmt::Display for ManifestEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// A generated problem with its name and manifest line.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub problem: Problem,
    pub manifest: ManifestEntry,
}

/// Generates `count` problems; instance `i` uses a seed drawn from `seed`.
pub fn generate_corpus(
    kind: GenKind,
    count: usize,
    seed: u64,
    msc: &MscParams,
    seating: &SeatingParams,
) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let s: u64 = rng.gen();
            let name = format!("{kind}_{i:04}");
            let mut m = ManifestEntry::default();
            m.push("instance", &name);
            m.push("kind", kind);
            m.push("seed", s);
            let problem = match kind {
                GenKind::Msc => {
                    let p = gen_msc(msc, s);
                    m.push("vertices", p.n_vertices);
                    m.push("edges", p.edges.len());
                    m.push("colors", p.n_colors);
                    Problem::Msc(p)
                }
                GenKind::Seating => {
                    let p = gen_seating(seating, s);
                    m.push("persons", p.persons.len());
                    m.push("tables", p.n_tables);
                    m.push("tags", p.n_tags);
                    m.push("min", p.min);
                    m.push("max", p.max);
                    m.push("feasible", p.is_feasible());
                    Problem::Seating(p)
                }
            };
            CorpusEntry {
                name,
                problem,
                manifest: m,
            }
        })
        .collect()
}
