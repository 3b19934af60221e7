//! Affine strategies over `Z_p` on the complete multipartite graph
//! `K_n^(m)` and the colorings that defeat them.
//!
//! Vertex `(i, k)` guesses `f_ik(x) + b_ik`, where `f_ik` is linear in the
//! colors of every `(i', j)` with `j != k`. The ground set is
//! `T = [n] x [m] x Z_p`; element `(i, k, c)` is encoded as
//! `(i * m + k) * p + c`. Each coloring `x` yields the two `nm`-sets
//!
//! * `F(x) = {(i, k, x_ik - f_ik(x) - b_ik)}`
//! * `G(x) = {(i, k, x_ik - f_ik(x))}`
//!
//! and if `F(x) ∩ G(y) = ∅` then every vertex guesses wrong on `x - y`.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coloring::advance;
use crate::combin::{big_pow, checked_pow};
use crate::field::PrimeField;
use crate::game::Evaluator;
use crate::spread::{spread_value, SpreadValue};
use crate::{Color, Coloring, Graph, Guesser, HatError, Result, StrategyProfile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearStrategy {
    n: usize,
    m: usize,
    field: PrimeField,
    /// Per vertex, one coefficient per visible vertex in ascending order.
    coefficients: Vec<Vec<Color>>,
    bias: Vec<Color>,
    visible: Vec<Vec<usize>>,
}

fn visible_from(n: usize, m: usize, v: usize) -> Vec<usize> {
    let k = v % m;
    (0..n * m).filter(|&u| u % m != k).collect()
}

impl LinearStrategy {
    pub fn new(n: usize, m: usize, p: Color, coefficients: Vec<Vec<Color>>, bias: Vec<Color>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(HatError::invalid("n and m must be positive"));
        }
        let field = PrimeField::new(p)?;
        let verts = n * m;
        if coefficients.len() != verts || bias.len() != verts {
            return Err(HatError::invalid(format!(
                "need {verts} coefficient rows and biases, got {} and {}",
                coefficients.len(),
                bias.len()
            )));
        }
        let want = n * (m - 1);
        for (v, row) in coefficients.iter().enumerate() {
            if row.len() != want {
                return Err(HatError::invalid(format!(
                    "vertex {v} has {} coefficients, sees {want} vertices",
                    row.len()
                )));
            }
            if row.iter().chain([&bias[v]]).any(|&c| c >= p) {
                return Err(HatError::invalid(format!("vertex {v}: value outside [0, {p})")));
            }
        }
        let visible = (0..verts).map(|v| visible_from(n, m, v)).collect();
        Ok(LinearStrategy {
            n,
            m,
            field,
            coefficients,
            bias,
            visible,
        })
    }

    /// Uniformly random coefficients and biases.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, p: Color, rng: &mut R) -> Result<Self> {
        let verts = n * m;
        let width = n * m.saturating_sub(1);
        let coefficients = (0..verts)
            .map(|_| (0..width).map(|_| rng.random_range(0..p.max(1))).collect())
            .collect();
        let bias = (0..verts).map(|_| rng.random_range(0..p.max(1))).collect();
        LinearStrategy::new(n, m, p, coefficients, bias)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> Color {
        self.field.modulus()
    }

    /// Vertex count `nm`, also the member size `w`.
    pub fn vertices(&self) -> usize {
        self.n * self.m
    }

    pub fn coefficients(&self) -> &[Vec<Color>] {
        &self.coefficients
    }

    pub fn bias(&self) -> &[Color] {
        &self.bias
    }

    pub fn graph(&self) -> Graph {
        Graph::multipartite(self.n, self.m)
    }

    pub fn to_profile(&self) -> StrategyProfile {
        let guessers = self
            .coefficients
            .iter()
            .zip(&self.bias)
            .map(|(c, &b)| Guesser::Affine {
                coefficients: c.clone(),
                bias: b,
            })
            .collect();
        StrategyProfile::new(self.p(), guessers).expect("prime modulus")
    }

    /// `f_v(x)`, the linear part only.
    pub fn linear_part(&self, v: usize, x: &[Color]) -> Color {
        let f = &self.field;
        self.visible[v]
            .iter()
            .zip(&self.coefficients[v])
            .fold(0, |acc, (&u, &c)| f.add(acc, f.mul(c, x[u])))
    }

    pub fn guess(&self, v: usize, x: &[Color]) -> Color {
        self.field.add(self.linear_part(v, x), self.bias[v])
    }

    fn check_len(&self, x: &[Color]) -> Result<()> {
        if x.len() != self.vertices() {
            return Err(HatError::invalid(format!(
                "coloring has {} entries, need n*m = {}",
                x.len(),
                self.vertices()
            )));
        }
        if x.iter().any(|&c| c >= self.p()) {
            return Err(HatError::invalid("coloring value outside [0, p)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyKind {
    /// With the biases.
    F,
    /// Without them.
    G,
}

/// Code of ground-set element `(slot, value)`.
pub fn encode_element(slot: usize, value: Color, p: Color) -> u32 {
    (slot as u32) * p + value
}

pub fn decode_element(code: u32, m: usize, p: Color) -> (usize, usize, Color) {
    let slot = (code / p) as usize;
    (slot / m, slot % m, code % p)
}

/// Value of `x`'s member at `slot`.
fn slot_value(s: &LinearStrategy, kind: FamilyKind, slot: usize, x: &[Color]) -> Color {
    let f = &s.field;
    let v = f.sub(x[slot], s.linear_part(slot, x));
    match kind {
        FamilyKind::F => f.sub(v, s.bias[slot]),
        FamilyKind::G => v,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpreadFamily {
    Materialized(Vec<Vec<u32>>),
    Implicit { kind: FamilyKind, strategy: LinearStrategy },
}

impl SpreadFamily {
    /// Lists every member; implicit families have `p^nm` of them.
    pub fn materialize(&self, budget: u64) -> Result<Vec<Vec<u32>>> {
        match self {
            SpreadFamily::Materialized(m) => Ok(m.clone()),
            SpreadFamily::Implicit { kind, strategy } => {
                let p = u64::from(strategy.p());
                let w = strategy.vertices() as u64;
                checked_pow(p, w)
                    .filter(|&t| t <= budget)
                    .ok_or_else(|| HatError::budget("family members", big_pow(p, w), budget))?;
                let mut x = alloc::vec![0; strategy.vertices()];
                let mut out = Vec::new();
                loop {
                    out.push(materialize_member(*kind, strategy, &x)?);
                    if !advance(&mut x, strategy.p()) {
                        break;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn spread(&self, budget: u64) -> Result<SpreadValue> {
        spread_value(&self.materialize(budget)?, budget)
    }
}

/// `F(x)` or `G(x)` as sorted element codes.
pub fn materialize_member(kind: FamilyKind, strategy: &LinearStrategy, x: &[Color]) -> Result<Vec<u32>> {
    strategy.check_len(x)?;
    let p = strategy.p();
    Ok((0..strategy.vertices())
        .map(|slot| encode_element(slot, slot_value(strategy, kind, slot, x), p))
        .collect())
}

/// Finds the first `x` whose member lies inside `allowed` (indexed by element
/// code), assigning coordinates in `(k, i)` order with values ascending.
/// `None` means no such `x` exists.
pub fn find_member_within(kind: FamilyKind, strategy: &LinearStrategy, allowed: &[bool]) -> Result<Option<Vec<Color>>> {
    let (n, m, p) = (strategy.n, strategy.m, strategy.p());
    let w = strategy.vertices();
    if allowed.len() != w * p as usize {
        return Err(HatError::invalid(format!(
            "allowed set has {} flags, ground set has {}",
            allowed.len(),
            w * p as usize
        )));
    }
    let order: Vec<usize> = (0..m).flat_map(|k| (0..n).map(move |i| i * m + k)).collect();
    let mut pos = alloc::vec![0; w];
    for (t, &v) in order.iter().enumerate() {
        pos[v] = t;
    }
    // slot v can be checked once its own coordinate and every visible one is set
    let mut ready: Vec<Vec<usize>> = alloc::vec![Vec::new(); w];
    for v in 0..w {
        let last = strategy.visible[v]
            .iter()
            .map(|&u| pos[u])
            .chain([pos[v]])
            .max()
            .unwrap();
        ready[last].push(v);
    }
    for v in 0..w {
        if !(0..p).any(|c| allowed[v * p as usize + c as usize]) {
            return Ok(None);
        }
    }

    let mut x = alloc::vec![0; w];
    let mut depth = 0usize;
    let mut next = alloc::vec![0 as Color; w + 1];
    loop {
        if depth == w {
            return Ok(Some(x));
        }
        let var = order[depth];
        let mut advanced = false;
        while next[depth] < p {
            x[var] = next[depth];
            next[depth] += 1;
            let ok = ready[depth]
                .iter()
                .all(|&s| allowed[s * p as usize + slot_value(strategy, kind, s, &x) as usize]);
            if ok {
                advanced = true;
                break;
            }
        }
        if advanced {
            depth += 1;
            if depth < w {
                next[depth] = 0;
            }
        } else {
            x[var] = 0;
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }
}

pub const DEFAULT_DEFEAT_RETRIES: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefeatOutcome {
    /// `coloring = x_f - x_g` with `F(x_f)` and `G(x_g)` disjoint.
    Defeated {
        coloring: Vec<Color>,
        x_f: Vec<Color>,
        x_g: Vec<Color>,
        attempt: u32,
    },
    NotFound {
        attempts: u32,
    },
}

/// Two-colors `T` at random (attempt `a` uses ChaCha stream `a`), looks for
/// `F(x_f)` in one class and `G(x_g)` in the other, and returns the
/// difference.
pub fn defeat_linear(strategy: &LinearStrategy, seed: u64, retries: u32) -> Result<DefeatOutcome> {
    let p = strategy.p();
    let size = strategy.vertices() * p as usize;
    for attempt in 0..retries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(attempt));
        let one: Vec<bool> = (0..size).map(|_| rng.random()).collect();
        let two: Vec<bool> = one.iter().map(|&b| !b).collect();
        let Some(x_f) = find_member_within(FamilyKind::F, strategy, &one)? else {
            continue;
        };
        let Some(x_g) = find_member_within(FamilyKind::G, strategy, &two)? else {
            continue;
        };
        let f = &strategy.field;
        let z: Vec<Color> = x_f.iter().zip(&x_g).map(|(&a, &b)| f.sub(a, b)).collect();
        if let Some(v) = (0..strategy.vertices()).find(|&v| strategy.guess(v, &z) == z[v]) {
            return Err(HatError::Contradiction(format!(
                "disjoint members gave a coloring on which vertex {v} is right"
            )));
        }
        return Ok(DefeatOutcome::Defeated {
            coloring: z,
            x_f,
            x_g,
            attempt,
        });
    }
    Ok(DefeatOutcome::NotFound { attempts: retries })
}

/// First coloring in lexicographic order on which every vertex is wrong,
/// found by evaluating the affine profile directly.
pub fn brute_force_defeat(strategy: &LinearStrategy, budget: u64) -> Result<Option<Coloring>> {
    let graph = strategy.graph();
    let profile = strategy.to_profile();
    let total = crate::game::exhaustive_total(graph.n(), strategy.p(), budget)?;
    let mut eval = Evaluator::new(&graph, &profile)?;
    let mut x = alloc::vec![0; graph.n()];
    for _ in 0..total {
        if !eval.any_correct(&x)? {
            return Ok(Some(Coloring::new(strategy.p(), x)?));
        }
        advance(&mut x, strategy.p());
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialReport {
    pub trials: u64,
    pub hits: u64,
    pub frequency: f64,
}

/// Keeps each element of `T` with probability `1/r` and records how often
/// some member fits inside what was kept. Trial `t` uses ChaCha stream `t`.
pub fn spread_lemma_trial(family: &SpreadFamily, ground: usize, r: u32, trials: u64, seed: u64) -> Result<TrialReport> {
    if r == 0 {
        return Err(HatError::invalid("r must be positive"));
    }
    let mut hits = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let kept: Vec<bool> = (0..ground).map(|_| r == 1 || rng.random_range(0..r) == 0).collect();
        let inside = match family {
            SpreadFamily::Implicit { kind, strategy } => find_member_within(*kind, strategy, &kept)?.is_some(),
            SpreadFamily::Materialized(members) => members
                .iter()
                .any(|m| m.iter().all(|&e| kept.get(e as usize).copied().unwrap_or(false))),
        };
        hits += u64::from(inside);
    }
    Ok(TrialReport {
        trials,
        hits,
        frequency: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
    })
}
