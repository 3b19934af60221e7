//! JSON file formats.
//!
//! Guessers see their neighbours in ascending vertex order, and tables are
//! indexed by the seen colors read as a base-`q` number with the first
//! neighbour most significant.

use std::fs;
use std::path::{Path, PathBuf};

use hatguess_core::book::{BookParameters, OntoFamily, Verification};
use hatguess_core::clique::KnownSet;
use hatguess_core::linear::{FamilyKind, LinearStrategy, SpreadFamily};
use hatguess_core::planar::{Members, PairFunction, PairFunctionFamily};
use hatguess_core::{Color, Graph, Guesser, HatError, Shape, StrategyProfile, StructuredRule};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: HatError,
    },
}

fn parse_error(path: &Path, e: serde_json::Error) -> FormatError {
    FormatError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    }
}

/// Reads `path` as `T`. A report written by the CLI is accepted too, in
/// which case `T` is read from its `result.<key>` field.
pub fn read_json<T: DeserializeOwned>(path: &Path, key: &str) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    let inner = match value.get("result").and_then(|r| r.get(key)) {
        Some(v) if value.get("command").is_some() => v.clone(),
        _ => value,
    };
    match serde_json::from_value(inner) {
        Ok(t) => Ok(t),
        // re-parse the text so the message carries a position
        Err(_) => serde_json::from_str(&text).map_err(|e| parse_error(path, e)),
    }
}

pub fn invalid(path: &Path, source: HatError) -> FormatError {
    FormatError::Invalid {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeFile {
    PlanarConstruction { q: u32, m: usize },
    Book { d: usize, m: usize },
    Multipartite { n: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeFile>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        let shape = match g.shape() {
            Shape::Generic => None,
            Shape::PlanarConstruction { q, m } => Some(ShapeFile::PlanarConstruction { q, m }),
            Shape::Book { d, m } => Some(ShapeFile::Book { d, m }),
            Shape::Multipartite { n, m } => Some(ShapeFile::Multipartite { n, m }),
        };
        GraphFile {
            n: g.n(),
            edges: g.edges().map(|(a, b)| [a, b]).collect(),
            shape,
        }
    }

    pub fn to_graph(&self) -> hatguess_core::Result<Graph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        let shape = match self.shape {
            None => Shape::Generic,
            Some(ShapeFile::PlanarConstruction { q, m }) => Shape::PlanarConstruction { q, m },
            Some(ShapeFile::Book { d, m }) => Shape::Book { d, m },
            Some(ShapeFile::Multipartite { n, m }) => Shape::Multipartite { n, m },
        };
        Graph::with_shape(self.n, &edges, shape)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GuesserFile {
    Table { table: Vec<Color> },
    Affine { coefficients: Vec<Color>, bias: Color },
    Constant { value: Color },
    Hashed { seed: u64, salt: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub q: Color,
    pub guessers: Vec<GuesserFile>,
}

impl StrategyFile {
    /// Fails on structured guessers with no serializable rule.
    pub fn from_profile(p: &StrategyProfile) -> hatguess_core::Result<Self> {
        let guessers = p
            .guessers()
            .iter()
            .enumerate()
            .map(|(v, g)| match g {
                Guesser::Table(t) => Ok(GuesserFile::Table { table: t.clone() }),
                Guesser::Affine { coefficients, bias } => Ok(GuesserFile::Affine {
                    coefficients: coefficients.clone(),
                    bias: *bias,
                }),
                Guesser::Structured(s) => match s.rule() {
                    Some(StructuredRule::Constant { value }) => Ok(GuesserFile::Constant { value }),
                    Some(StructuredRule::Hashed { seed, salt }) => Ok(GuesserFile::Hashed { seed, salt }),
                    None => Err(HatError::InvalidInput(format!(
                        "vertex {v}: guesser {} has no file representation",
                        s.name()
                    ))),
                },
            })
            .collect::<hatguess_core::Result<_>>()?;
        Ok(StrategyFile { q: p.q(), guessers })
    }

    pub fn to_profile(&self) -> hatguess_core::Result<StrategyProfile> {
        let guessers = self
            .guessers
            .iter()
            .map(|g| match g {
                GuesserFile::Table { table } => Guesser::Table(table.clone()),
                GuesserFile::Affine { coefficients, bias } => Guesser::Affine {
                    coefficients: coefficients.clone(),
                    bias: *bias,
                },
                GuesserFile::Constant { value } => Guesser::constant(*value, self.q),
                GuesserFile::Hashed { seed, salt } => Guesser::hashed(*seed, *salt, self.q),
            })
            .collect();
        StrategyProfile::new(self.q, guessers)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnownSetFile {
    pub d: usize,
    pub q: Color,
    pub colorings: Vec<Vec<Color>>,
}

impl KnownSetFile {
    pub fn to_known_set(&self) -> hatguess_core::Result<KnownSet> {
        KnownSet::new(self.d, self.q, self.colorings.clone())
    }
}

/// A pair function is a list of `q^2` unordered pairs `[g1, g2]`, entry
/// `a * q + b` being the value on central coloring `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairFamilyFile {
    Explicit {
        q: Color,
        members: Vec<Vec<[Color; 2]>>,
    },
    /// Every pair function, indexed implicitly; `size` is informational.
    Full {
        q: Color,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        size: Option<String>,
    },
}

impl PairFamilyFile {
    pub fn from_family(f: &PairFunctionFamily) -> Self {
        match f.members() {
            Members::Explicit(m) => PairFamilyFile::Explicit {
                q: f.q(),
                members: m
                    .iter()
                    .map(|pf| pf.table().iter().map(|&(a, b)| [a, b]).collect())
                    .collect(),
            },
            Members::Full => PairFamilyFile::Full {
                q: f.q(),
                size: Some(f.len().to_string()),
            },
        }
    }

    pub fn to_family(&self) -> hatguess_core::Result<PairFunctionFamily> {
        match self {
            PairFamilyFile::Explicit { q, members } => {
                let members = members
                    .iter()
                    .map(|t| PairFunction::new(*q, t.iter().map(|&[a, b]| (a, b)).collect()))
                    .collect::<hatguess_core::Result<_>>()?;
                PairFunctionFamily::explicit(*q, members)
            }
            PairFamilyFile::Full { q, .. } => PairFunctionFamily::full(*q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VerificationFile {
    ExactSubsets { checked: u64 },
    ExactOuter { checked: u64 },
    Sampled { samples: u64 },
}

impl From<Verification> for VerificationFile {
    fn from(v: Verification) -> Self {
        match v {
            Verification::ExactSubsets { checked } => VerificationFile::ExactSubsets { checked },
            Verification::ExactOuter { checked } => VerificationFile::ExactOuter { checked },
            Verification::Sampled { samples } => VerificationFile::Sampled { samples },
        }
    }
}

impl From<VerificationFile> for Verification {
    fn from(v: VerificationFile) -> Self {
        match v {
            VerificationFile::ExactSubsets { checked } => Verification::ExactSubsets { checked },
            VerificationFile::ExactOuter { checked } => Verification::ExactOuter { checked },
            VerificationFile::Sampled { samples } => Verification::Sampled { samples },
        }
    }
}

/// Member `i` is `f_i` as a flat table over central colorings in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntoFamilyFile {
    pub d: usize,
    pub q: Color,
    pub m: usize,
    pub s: usize,
    pub members: Vec<Vec<Color>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationFile>,
}

impl OntoFamilyFile {
    pub fn from_family(f: &OntoFamily) -> Self {
        OntoFamilyFile {
            d: f.params.d,
            q: f.params.q,
            m: f.params.m,
            s: f.params.s,
            members: f.members.clone(),
            verification: Some(f.verification.into()),
        }
    }

    pub fn params(&self) -> hatguess_core::Result<BookParameters> {
        BookParameters::new(self.d, self.q, self.m, self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearVertexFile {
    /// One per visible vertex `(i', j)`, `j != k`, in lexicographic order.
    pub coefficients: Vec<Color>,
    pub bias: Color,
}

/// Vertices `(i, k)` are listed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearStrategyFile {
    pub n: usize,
    pub m: usize,
    pub p: Color,
    pub vertices: Vec<LinearVertexFile>,
}

impl LinearStrategyFile {
    pub fn from_strategy(s: &LinearStrategy) -> Self {
        LinearStrategyFile {
            n: s.n(),
            m: s.m(),
            p: s.p(),
            vertices: s
                .coefficients()
                .iter()
                .zip(s.bias())
                .map(|(c, &b)| LinearVertexFile {
                    coefficients: c.clone(),
                    bias: b,
                })
                .collect(),
        }
    }

    pub fn to_strategy(&self) -> hatguess_core::Result<LinearStrategy> {
        LinearStrategy::new(
            self.n,
            self.m,
            self.p,
            self.vertices.iter().map(|v| v.coefficients.clone()).collect(),
            self.vertices.iter().map(|v| v.bias).collect(),
        )
    }
}

/// Materialized members are lists of element codes `(i * m + k) * p + c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpreadFamilyFile {
    Materialized { members: Vec<Vec<u32>> },
    F { strategy: LinearStrategyFile },
    G { strategy: LinearStrategyFile },
}

impl SpreadFamilyFile {
    pub fn to_family(&self) -> hatguess_core::Result<SpreadFamily> {
        Ok(match self {
            SpreadFamilyFile::Materialized { members } => SpreadFamily::Materialized(members.clone()),
            SpreadFamilyFile::F { strategy } => SpreadFamily::Implicit {
                kind: FamilyKind::F,
                strategy: strategy.to_strategy()?,
            },
            SpreadFamilyFile::G { strategy } => SpreadFamily::Implicit {
                kind: FamilyKind::G,
                strategy: strategy.to_strategy()?,
            },
        })
    }
}
