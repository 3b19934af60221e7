//! Playing one round of the game and sweeping colorings.
//!
//! Exhaustive sweeps walk `[0,q)^n` as an odometer in lexicographic order,
//! so the work can be cut into contiguous index blocks; see
//! [`sweep_block`]. Sampled sweeps draw sample `j` from ChaCha stream
//! `j / SAMPLE_CHUNK` of the seed, so any partition into chunks reproduces
//! the sequential result.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coloring::advance;
use crate::combin::{big_pow, checked_pow};
use crate::{Color, Coloring, Graph, HatError, Result, StrategyProfile};

/// Samples per derived random stream in sampled verification.
pub const SAMPLE_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Every coloring has a correct guesser (exhaustive sweeps only).
    Winning,
    /// A coloring under which every vertex guesses wrong.
    Counterexample(Coloring),
    /// Sampling found nothing; this is not a proof.
    NoCounterexampleFound { samples: u64 },
}

impl VerifyOutcome {
    pub fn is_winning(&self) -> bool {
        matches!(self, VerifyOutcome::Winning)
    }

    pub fn counterexample(&self) -> Option<&Coloring> {
        match self {
            VerifyOutcome::Counterexample(c) => Some(c),
            _ => None,
        }
    }
}

/// Evaluates a profile on a graph, reusing one scratch buffer.
pub struct Evaluator<'a> {
    graph: &'a Graph,
    profile: &'a StrategyProfile,
    seen: Vec<Color>,
}

impl<'a> Evaluator<'a> {
    pub fn new(graph: &'a Graph, profile: &'a StrategyProfile) -> Result<Self> {
        profile.validate_for(graph)?;
        Ok(Evaluator {
            graph,
            profile,
            seen: Vec::new(),
        })
    }

    pub fn q(&self) -> Color {
        self.profile.q()
    }

    /// The guess of vertex `v` when the hats are `values`.
    pub fn guess_of(&mut self, v: usize, values: &[Color]) -> Result<Color> {
        self.seen.clear();
        self.seen.extend(self.graph.neighbors(v).iter().map(|&u| values[u]));
        self.profile.guess(v, &self.seen)
    }

    pub fn is_correct(&mut self, v: usize, values: &[Color]) -> Result<bool> {
        Ok(self.guess_of(v, values)? == values[v])
    }

    /// Whether at least one vertex guesses correctly; stops at the first.
    pub fn any_correct(&mut self, values: &[Color]) -> Result<bool> {
        for v in 0..self.graph.n() {
            if self.is_correct(v, values)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn correct_set(&mut self, values: &[Color]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for v in 0..self.graph.n() {
            if self.is_correct(v, values)? {
                out.push(v);
            }
        }
        Ok(out)
    }
}

fn check_coloring(graph: &Graph, profile: &StrategyProfile, coloring: &Coloring) -> Result<()> {
    if profile.q() != coloring.q() {
        return Err(HatError::invalid(format!(
            "profile q={} but coloring q={}",
            profile.q(),
            coloring.q()
        )));
    }
    if coloring.len() != graph.n() {
        return Err(HatError::invalid(format!(
            "coloring has {} entries for {} vertices",
            coloring.len(),
            graph.n()
        )));
    }
    Ok(())
}

/// The vertices that guess their own color correctly, ascending.
pub fn evaluate(graph: &Graph, profile: &StrategyProfile, coloring: &Coloring) -> Result<Vec<usize>> {
    check_coloring(graph, profile, coloring)?;
    Evaluator::new(graph, profile)?.correct_set(coloring.values())
}

/// Number of colorings of `graph` with `q` colors, if it fits in a u64.
pub fn coloring_count(n: usize, q: Color) -> Option<u64> {
    checked_pow(u64::from(q), n as u64)
}

/// Searches for an all-wrong coloring.
///
/// Exhaustive mode requires `q^n <= budget` and never falls back to
/// sampling. It reports the lexicographically first counterexample.
pub fn verify(graph: &Graph, profile: &StrategyProfile, mode: VerifyMode, budget: u64) -> Result<VerifyOutcome> {
    profile.validate_for(graph)?;
    match mode {
        VerifyMode::Exhaustive => {
            let total = exhaustive_total(graph.n(), profile.q(), budget)?;
            Ok(match sweep_block(graph, profile, 0, total)? {
                Some(c) => VerifyOutcome::Counterexample(c),
                None => VerifyOutcome::Winning,
            })
        }
        VerifyMode::Sampled { count, seed } => {
            let mut chunk = 0;
            while chunk * SAMPLE_CHUNK < count {
                let len = SAMPLE_CHUNK.min(count - chunk * SAMPLE_CHUNK);
                if let Some((_, c)) = sample_chunk(graph, profile, seed, chunk, len)? {
                    return Ok(VerifyOutcome::Counterexample(c));
                }
                chunk += 1;
            }
            Ok(VerifyOutcome::NoCounterexampleFound { samples: count })
        }
    }
}

/// `q^n`, or a budget error carrying the exact count.
pub fn exhaustive_total(n: usize, q: Color, budget: u64) -> Result<u64> {
    match coloring_count(n, q) {
        Some(t) if t <= budget => Ok(t),
        _ => Err(HatError::budget(
            "exhaustive sweep",
            big_pow(u64::from(q), n as u64),
            budget,
        )),
    }
}

/// Sweeps the colorings with lexicographic indices `start..start+len` and
/// returns the first all-wrong one.
pub fn sweep_block(graph: &Graph, profile: &StrategyProfile, start: u64, len: u64) -> Result<Option<Coloring>> {
    let q = profile.q();
    let mut eval = Evaluator::new(graph, profile)?;
    let mut values = Coloring::from_index(start, graph.n(), q).into_values();
    for _ in 0..len {
        if !eval.any_correct(&values)? {
            return Coloring::new(q, values).map(Some);
        }
        if !advance(&mut values, q) {
            break;
        }
    }
    Ok(None)
}

/// The random stream used for sampled chunk `chunk`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Draws `len` colorings from chunk `chunk` and returns the first all-wrong
/// one together with its global sample index.
pub fn sample_chunk(
    graph: &Graph,
    profile: &StrategyProfile,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Result<Option<(u64, Coloring)>> {
    let q = profile.q();
    let mut eval = Evaluator::new(graph, profile)?;
    let mut rng = chunk_rng(seed, chunk);
    let mut values = alloc::vec![0; graph.n()];
    for j in 0..len {
        for slot in values.iter_mut() {
            *slot = rng.random_range(0..q);
        }
        if !eval.any_correct(&values)? {
            return Ok(Some((chunk * SAMPLE_CHUNK + j, Coloring::new(q, values)?)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Guesser;
    use alloc::vec;

    fn k2_shift(q: Color) -> StrategyProfile {
        // u guesses h(v), v guesses h(u)+1
        let u: Vec<Color> = (0..q).collect();
        let v: Vec<Color> = (0..q).map(|c| (c + 1) % q).collect();
        StrategyProfile::new(q, vec![Guesser::Table(u), Guesser::Table(v)]).unwrap()
    }

    #[test]
    fn evaluate_k2_example() {
        let g = Graph::complete(2);
        let c = Coloring::new(2, vec![0, 0]).unwrap();
        assert_eq!(evaluate(&g, &k2_shift(2), &c).unwrap(), vec![0]);
    }

    #[test]
    fn evaluate_lone_vertex() {
        let g = Graph::complete(1);
        let p = StrategyProfile::new(3, vec![Guesser::Table(vec![0])]).unwrap();
        let c = Coloring::new(3, vec![2]).unwrap();
        assert!(evaluate(&g, &p, &c).unwrap().is_empty());
    }

    #[test]
    fn evaluate_rejects_mismatch() {
        let g = Graph::complete(2);
        let c = Coloring::new(3, vec![0, 0]).unwrap();
        assert!(matches!(evaluate(&g, &k2_shift(2), &c), Err(HatError::InvalidInput(_))));
        let short = Coloring::new(2, vec![0]).unwrap();
        assert!(evaluate(&g, &k2_shift(2), &short).is_err());
    }

    #[test]
    fn verify_k2_examples() {
        let g = Graph::complete(2);
        assert_eq!(
            verify(&g, &k2_shift(2), VerifyMode::Exhaustive, 100).unwrap(),
            VerifyOutcome::Winning
        );
        let out = verify(&g, &k2_shift(3), VerifyMode::Exhaustive, 100).unwrap();
        assert_eq!(
            out,
            VerifyOutcome::Counterexample(Coloring::new(3, vec![0, 2]).unwrap())
        );
    }

    #[test]
    fn verify_total_sum_k3() {
        let g = Graph::complete(3);
        // vertex i guesses i - (sum of the others) mod 3
        let guessers = (0..3u32)
            .map(|i| Guesser::Affine {
                coefficients: vec![2, 2],
                bias: i,
            })
            .collect();
        let p = StrategyProfile::new(3, guessers).unwrap();
        assert!(verify(&g, &p, VerifyMode::Exhaustive, 100).unwrap().is_winning());
    }

    #[test]
    fn exhaustive_budget_is_explicit() {
        let g = Graph::complete(3);
        let p = StrategyProfile::hashed(3, 3, 0);
        match verify(&g, &p, VerifyMode::Exhaustive, 26) {
            Err(HatError::BudgetExceeded { requested, .. }) => assert_eq!(requested, "27"),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn sampled_never_claims_winning() {
        let g = Graph::complete(2);
        let out = verify(&g, &k2_shift(2), VerifyMode::Sampled { count: 50, seed: 3 }, 0).unwrap();
        assert_eq!(out, VerifyOutcome::NoCounterexampleFound { samples: 50 });
        let bad = verify(&g, &k2_shift(3), VerifyMode::Sampled { count: 500, seed: 3 }, 0).unwrap();
        let c = bad.counterexample().expect("q=3 shift strategy loses often");
        assert!(evaluate(&g, &k2_shift(3), c).unwrap().is_empty());
    }

    #[test]
    fn blocks_partition_the_sweep() {
        let g = Graph::complete(3);
        let p = StrategyProfile::hashed(3, 3, 11);
        let whole = sweep_block(&g, &p, 0, 27).unwrap();
        let mut first = None;
        for start in (0..27).step_by(5) {
            if let Some(c) = sweep_block(&g, &p, start, 5).unwrap() {
                first = Some(c);
                break;
            }
        }
        assert_eq!(whole, first);
    }
}
