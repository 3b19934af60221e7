//! Guessing strategies.
//!
//! A guesser receives the colors its vertex sees, ordered by ascending
//! neighbour index, and returns a color.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::coloring::lex_index;
use crate::field::{is_prime, PrimeField};
use crate::{Color, Graph, HatError, Result};

/// A guessing rule given in closed form rather than as a table.
pub trait StructuredGuesser: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    fn guess(&self, seen: &[Color]) -> Result<Color>;

    /// The serializable description of this rule, if it has one.
    fn rule(&self) -> Option<StructuredRule> {
        None
    }
}

/// Closed-form rules that can round-trip through a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuredRule {
    /// Always guess `value`.
    Constant { value: Color },
    /// A fixed pseudo-random total function of the seen colors, keyed by
    /// `(seed, salt)`. Stands in for a uniformly random lookup table when
    /// `q^deg` is too large to store.
    Hashed { seed: u64, salt: u64 },
}

impl StructuredRule {
    pub fn into_guesser(self, q: Color) -> Guesser {
        Guesser::Structured(Arc::new(RuleGuesser { rule: self, q }))
    }
}

#[derive(Debug)]
struct RuleGuesser {
    rule: StructuredRule,
    q: Color,
}

impl StructuredGuesser for RuleGuesser {
    fn name(&self) -> &str {
        match self.rule {
            StructuredRule::Constant { .. } => "constant",
            StructuredRule::Hashed { .. } => "hashed",
        }
    }

    fn guess(&self, seen: &[Color]) -> Result<Color> {
        Ok(match self.rule {
            StructuredRule::Constant { value } => value,
            StructuredRule::Hashed { seed, salt } => {
                let mut h = mix(seed ^ mix(salt));
                for &c in seen {
                    h = mix(h ^ u64::from(c).wrapping_add(0x9e37_79b9_7f4a_7c15));
                }
                (h % u64::from(self.q)) as Color
            }
        })
    }

    fn rule(&self) -> Option<StructuredRule> {
        Some(self.rule)
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub enum Guesser {
    /// Guesses indexed by the seen colors read as a base-`q` number, first
    /// neighbour most significant. Must hold exactly `q^deg` entries.
    Table(Vec<Color>),
    /// `bias + Σ coefficients[j] * seen[j]` over `Z_q`; `q` must be prime.
    Affine {
        coefficients: Vec<Color>,
        bias: Color,
    },
    Structured(Arc<dyn StructuredGuesser>),
}

impl Guesser {
    pub fn constant(value: Color, q: Color) -> Self {
        StructuredRule::Constant { value }.into_guesser(q)
    }

    pub fn hashed(seed: u64, salt: u64, q: Color) -> Self {
        StructuredRule::Hashed { seed, salt }.into_guesser(q)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Guesser::Table(_) => "table",
            Guesser::Affine { .. } => "affine",
            Guesser::Structured(_) => "structured",
        }
    }
}

/// One guesser per vertex, all over the same color count.
#[derive(Debug, Clone)]
pub struct StrategyProfile {
    q: Color,
    guessers: Vec<Guesser>,
    field: Option<PrimeField>,
}

impl StrategyProfile {
    pub fn new(q: Color, guessers: Vec<Guesser>) -> Result<Self> {
        if q == 0 {
            return Err(HatError::invalid("q must be at least 1"));
        }
        let has_affine = guessers.iter().any(|g| matches!(g, Guesser::Affine { .. }));
        let field = if is_prime(u64::from(q)) {
            Some(PrimeField::new(q)?)
        } else if has_affine {
            return Err(HatError::invalid(format!("affine guessers need prime q, got {q}")));
        } else {
            None
        };
        Ok(StrategyProfile { q, guessers, field })
    }

    /// Every vertex guesses according to the same rule with its own salt.
    pub fn hashed(q: Color, n: usize, seed: u64) -> Self {
        let guessers = (0..n).map(|v| Guesser::hashed(seed, v as u64, q)).collect();
        StrategyProfile::new(q, guessers).expect("q >= 1")
    }

    pub fn q(&self) -> Color {
        self.q
    }

    pub fn len(&self) -> usize {
        self.guessers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guessers.is_empty()
    }

    pub fn guessers(&self) -> &[Guesser] {
        &self.guessers
    }

    pub fn guesser(&self, v: usize) -> &Guesser {
        &self.guessers[v]
    }

    /// Checks that the profile is defined on `graph`: one guesser per vertex,
    /// tables total on `q^deg` inputs, affine maps with one coefficient per
    /// neighbour, and all stored colors below `q`.
    pub fn validate_for(&self, graph: &Graph) -> Result<()> {
        if self.guessers.len() != graph.n() {
            return Err(HatError::invalid(format!(
                "profile has {} guessers for {} vertices",
                self.guessers.len(),
                graph.n()
            )));
        }
        for (v, g) in self.guessers.iter().enumerate() {
            let deg = graph.degree(v);
            match g {
                Guesser::Table(t) => {
                    let want = crate::combin::checked_pow(u64::from(self.q), deg as u64);
                    if want != Some(t.len() as u64) {
                        return Err(HatError::invalid(format!(
                            "vertex {v}: table has {} entries, expected q^deg = {}^{}",
                            t.len(),
                            self.q,
                            deg
                        )));
                    }
                    check_colors(v, t, self.q)?;
                }
                Guesser::Affine { coefficients, bias } => {
                    if coefficients.len() != deg {
                        return Err(HatError::invalid(format!(
                            "vertex {v}: {} coefficients for degree {deg}",
                            coefficients.len()
                        )));
                    }
                    check_colors(v, coefficients, self.q)?;
                    check_colors(v, core::slice::from_ref(bias), self.q)?;
                }
                Guesser::Structured(_) => {}
            }
        }
        Ok(())
    }

    /// The guess of vertex `v` given the colors it sees.
    #[inline]
    pub fn guess(&self, v: usize, seen: &[Color]) -> Result<Color> {
        match &self.guessers[v] {
            Guesser::Table(t) => Ok(t[lex_index(seen, self.q)]),
            Guesser::Affine { coefficients, bias } => {
                let f = self.field.as_ref().expect("validated prime q");
                Ok(f.affine(coefficients, seen, *bias))
            }
            Guesser::Structured(s) => {
                let g = s.guess(seen)?;
                if g >= self.q {
                    return Err(HatError::Contract(format!(
                        "structured guesser {} returned {g} >= q={}",
                        s.name(),
                        self.q
                    )));
                }
                Ok(g)
            }
        }
    }

    /// Tabulates every guesser over all `q^deg` inputs.
    pub fn to_tables(&self, graph: &Graph, budget: u64) -> Result<StrategyProfile> {
        let mut out = Vec::with_capacity(self.guessers.len());
        for v in 0..graph.n() {
            let deg = graph.degree(v);
            let size = crate::combin::checked_pow(u64::from(self.q), deg as u64)
                .filter(|&s| s <= budget)
                .ok_or_else(|| {
                    HatError::budget(
                        "table size",
                        crate::combin::big_pow(u64::from(self.q), deg as u64),
                        budget,
                    )
                })?;
            let mut seen = alloc::vec![0; deg];
            let mut table = Vec::with_capacity(size as usize);
            loop {
                table.push(self.guess(v, &seen)?);
                if !crate::coloring::advance(&mut seen, self.q) {
                    break;
                }
            }
            out.push(Guesser::Table(table));
        }
        StrategyProfile::new(self.q, out)
    }
}

fn check_colors(v: usize, colors: &[Color], q: Color) -> Result<()> {
    match colors.iter().find(|&&c| c >= q) {
        Some(c) => Err(HatError::invalid(format!("vertex {v}: value {c} >= q={q}"))),
        None => Ok(()),
    }
}
