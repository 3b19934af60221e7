//! Handling a known set of candidate colorings on a clique.
//!
//! The clique vertices know that their joint coloring lies in a set `S`.
//! Vertex `j` sees the other `d - 1` colors, so its strategy only matters on
//! the projections of `S` that drop coordinate `j`; everything else defaults
//! to guessing 0. The search assigns, per (vertex, projection), a guess taken
//! from the own-colors occurring in `S`, and either covers all of `S` or
//! returns a refutation tree that can be replayed independently.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::combin::big_pow;
use crate::{Color, HatError, Result};

/// `Σ_{i=1}^{d} i^i`, the known-set size a `d`-clique is expected to handle.
pub fn capacity(d: u32) -> BigUint {
    (1..=u64::from(d)).map(|i| big_pow(i, i)).sum()
}

/// Candidate colorings of a `d`-clique, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownSet {
    d: usize,
    q: Color,
    set: Vec<Vec<Color>>,
}

impl KnownSet {
    /// Rejects duplicates, wrong lengths and out-of-range colors.
    pub fn new(d: usize, q: Color, mut set: Vec<Vec<Color>>) -> Result<Self> {
        if d == 0 || q == 0 {
            return Err(HatError::invalid("known set needs d >= 1 and q >= 1"));
        }
        for s in &set {
            if s.len() != d {
                return Err(HatError::invalid(format!("coloring {s:?} has length != d={d}")));
            }
            if s.iter().any(|&c| c >= q) {
                return Err(HatError::invalid(format!("coloring {s:?} has a color >= q={q}")));
            }
        }
        set.sort_unstable();
        if set.windows(2).any(|w| w[0] == w[1]) {
            return Err(HatError::invalid("known set has duplicate colorings"));
        }
        Ok(KnownSet { d, q, set })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> Color {
        self.q
    }

    pub fn colorings(&self) -> &[Vec<Color>] {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

fn project(c: &[Color], j: usize) -> Vec<Color> {
    c.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect()
}

/// Per-vertex guess tables keyed by what the vertex sees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueStrategy {
    d: usize,
    q: Color,
    tables: Vec<BTreeMap<Vec<Color>, Color>>,
}

impl CliqueStrategy {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> Color {
        self.q
    }

    /// Vertex `j`'s guess given the other `d - 1` colors in index order.
    pub fn guess(&self, j: usize, others: &[Color]) -> Color {
        self.tables[j].get(others).copied().unwrap_or(0)
    }

    /// Vertex `j`'s guess when the clique is colored `full`.
    pub fn guess_in(&self, j: usize, full: &[Color]) -> Color {
        self.guess(j, &project(full, j))
    }

    pub fn table(&self, j: usize) -> &BTreeMap<Vec<Color>, Color> {
        &self.tables[j]
    }

    /// Whether every coloring of `ks` has a correct guesser.
    pub fn covers(&self, ks: &KnownSet) -> bool {
        ks.colorings()
            .iter()
            .all(|s| (0..self.d).any(|j| self.guess_in(j, s) == s[j]))
    }
}

/// An exhausted search tree.
///
/// `witness` indexes the (sorted) known set. At a `Split` the witness is
/// uncovered and each open vertex is tried as its coverer; a `Dead` witness
/// is uncovered with no open vertex left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    Dead {
        witness: usize,
    },
    Split {
        witness: usize,
        branches: Vec<(usize, Refutation)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub nodes: u64,
    pub tree: Refutation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HandleOutcome {
    Handled(CliqueStrategy),
    Infeasible(InfeasibilityCertificate),
}

impl HandleOutcome {
    pub fn is_handled(&self) -> bool {
        matches!(self, HandleOutcome::Handled(_))
    }
}

/// Search nodes allowed by default.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

const OPEN: Color = Color::MAX;

struct Problem<'a> {
    ks: &'a KnownSet,
    /// `var[s * d + j]`: the variable (j, projection of s without j).
    var: Vec<usize>,
    keys: Vec<(usize, Vec<Color>)>,
}

impl<'a> Problem<'a> {
    fn new(ks: &'a KnownSet) -> Self {
        // variables numbered in (vertex, observed input) order
        let keys: Vec<(usize, Vec<Color>)> = ks
            .colorings()
            .iter()
            .flat_map(|s| (0..ks.d).map(move |j| (j, project(s, j))))
            .collect::<alloc::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let order: BTreeMap<&(usize, Vec<Color>), usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut var = Vec::with_capacity(ks.len() * ks.d);
        for s in ks.colorings() {
            for j in 0..ks.d {
                var.push(order[&(j, project(s, j))]);
            }
        }
        Problem { ks, var, keys }
    }

    /// Uncovered coloring with fewest open variables (ties: lowest index).
    fn pick(&self, value: &[Color]) -> Option<(usize, usize)> {
        let d = self.ks.d;
        let mut best: Option<(usize, usize)> = None;
        for (si, s) in self.ks.colorings().iter().enumerate() {
            let mut open = 0;
            let mut covered = false;
            for j in 0..d {
                match value[self.var[si * d + j]] {
                    OPEN => open += 1,
                    g if g == s[j] => {
                        covered = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !covered && best.is_none_or(|(_, o)| open < o) {
                best = Some((si, open));
                if open == 0 {
                    break;
                }
            }
        }
        best
    }
}

struct Searcher<'a> {
    problem: Problem<'a>,
    value: Vec<Color>,
    nodes: u64,
    budget: u64,
}

impl Searcher<'_> {
    fn run(&mut self) -> Result<Option<Refutation>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(HatError::budget("clique handler nodes", self.nodes, self.budget));
        }
        let Some((si, open)) = self.problem.pick(&self.value) else {
            return Ok(None);
        };
        if open == 0 {
            return Ok(Some(Refutation::Dead { witness: si }));
        }
        let d = self.problem.ks.d;
        let own = self.problem.ks.colorings()[si].clone();
        let mut branches = Vec::with_capacity(open);
        for (j, &c) in own.iter().enumerate() {
            let var = self.problem.var[si * d + j];
            if self.value[var] != OPEN {
                continue;
            }
            self.value[var] = c;
            match self.run()? {
                None => return Ok(None),
                Some(sub) => branches.push((j, sub)),
            }
            self.value[var] = OPEN;
        }
        Ok(Some(Refutation::Split { witness: si, branches }))
    }
}

/// Finds a clique strategy that covers every coloring of `ks`, or proves
/// that none exists.
pub fn handle_known_set(ks: &KnownSet, node_budget: u64) -> Result<HandleOutcome> {
    let problem = Problem::new(ks);
    let mut searcher = Searcher {
        value: alloc::vec![OPEN; problem.keys.len()],
        problem,
        nodes: 0,
        budget: node_budget,
    };
    match searcher.run()? {
        Some(tree) => Ok(HandleOutcome::Infeasible(InfeasibilityCertificate {
            nodes: searcher.nodes,
            tree,
        })),
        None => {
            let mut tables = alloc::vec![BTreeMap::new(); ks.d];
            for (key, &g) in searcher.problem.keys.iter().zip(&searcher.value) {
                if g != OPEN {
                    tables[key.0].insert(key.1.clone(), g);
                }
            }
            let strategy = CliqueStrategy {
                d: ks.d,
                q: ks.q,
                tables,
            };
            debug_assert!(strategy.covers(ks));
            Ok(HandleOutcome::Handled(strategy))
        }
    }
}

pub fn is_handleable(ks: &KnownSet) -> Result<bool> {
    Ok(handle_known_set(ks, DEFAULT_NODE_BUDGET)?.is_handled())
}

/// Replays a refutation tree against `ks` from the empty assignment and
/// checks that it is a complete proof of infeasibility.
pub fn check_refutation(ks: &KnownSet, tree: &Refutation) -> bool {
    let problem = Problem::new(ks);
    let mut value = alloc::vec![OPEN; problem.keys.len()];
    replay(&problem, &mut value, tree)
}

fn replay(problem: &Problem<'_>, value: &mut [Color], node: &Refutation) -> bool {
    let d = problem.ks.d;
    let witness = match node {
        Refutation::Dead { witness } | Refutation::Split { witness, .. } => *witness,
    };
    let Some(s) = problem.ks.colorings().get(witness) else {
        return false;
    };
    let vars = &problem.var[witness * d..witness * d + d];
    if (0..d).any(|j| value[vars[j]] == s[j]) {
        return false;
    }
    let open: Vec<usize> = (0..d).filter(|&j| value[vars[j]] == OPEN).collect();
    match node {
        Refutation::Dead { .. } => open.is_empty(),
        Refutation::Split { branches, .. } => {
            let tried: Vec<usize> = branches.iter().map(|(j, _)| *j).collect();
            if tried != open {
                return false;
            }
            branches.iter().all(|(j, sub)| {
                value[vars[*j]] = s[*j];
                let ok = replay(problem, value, sub);
                value[vars[*j]] = OPEN;
                ok
            })
        }
    }
}

impl Refutation {
    pub fn size(&self) -> usize {
        match self {
            Refutation::Dead { .. } => 1,
            Refutation::Split { branches, .. } => 1 + branches.iter().map(|(_, b)| b.size()).sum::<usize>(),
        }
    }
}
