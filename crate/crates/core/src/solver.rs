//! Exact decision of "is there a winning profile with `q` colors?".
//!
//! Each vertex's table entry for a given view is a variable. A coloring `c`
//! is covered once some vertex's entry for its view of `c` equals its own
//! color. The search repeatedly picks the uncovered coloring with the fewest
//! still-unassigned entries and branches on which of those vertices covers
//! it. A coloring whose entries are all assigned to wrong values is a dead
//! end; a coloring with a single open entry forces it.

use alloc::vec::Vec;

use crate::coloring::{advance, lex_index};
use crate::combin::{big_pow, checked_pow};
use crate::{Color, Graph, Guesser, HatError, Result, StrategyProfile};

const UNSET: Color = Color::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    /// Cap on `q^n`.
    pub max_colorings: u64,
    /// Cap on search nodes.
    pub max_nodes: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_colorings: 1_000_000,
            max_nodes: 100_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub winnable: bool,
    /// A winning table profile when `winnable`. Entries the search never
    /// needed are 0.
    pub witness: Option<StrategyProfile>,
    pub nodes: u64,
}

struct Search {
    n: usize,
    /// `slot[ci * n + v]`: variable holding v's guess on coloring ci.
    slot: Vec<usize>,
    /// `own[ci * n + v]`: v's color in coloring ci.
    own: Vec<Color>,
    value: Vec<Color>,
    nodes: u64,
    max_nodes: u64,
}

impl Search {
    fn colorings(&self) -> usize {
        self.own.len() / self.n.max(1)
    }

    /// The uncovered coloring with the fewest open variables, or `None` when
    /// every coloring is covered.
    fn pick(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for ci in 0..self.colorings() {
            let base = ci * self.n;
            let mut open = 0;
            let mut covered = false;
            for v in 0..self.n {
                match self.value[self.slot[base + v]] {
                    UNSET => open += 1,
                    g if g == self.own[base + v] => {
                        covered = true;
                        break;
                    }
                    _ => {}
                }
            }
            if covered {
                continue;
            }
            if best.is_none_or(|(_, o)| open < o) {
                best = Some((ci, open));
                if open == 0 {
                    break;
                }
            }
        }
        best
    }

    fn run(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(HatError::budget("solver nodes", self.nodes, self.max_nodes));
        }
        let Some((ci, open)) = self.pick() else {
            return Ok(true);
        };
        if open == 0 {
            return Ok(false);
        }
        let base = ci * self.n;
        for v in 0..self.n {
            let var = self.slot[base + v];
            if self.value[var] != UNSET {
                continue;
            }
            self.value[var] = self.own[base + v];
            if self.run()? {
                return Ok(true);
            }
            self.value[var] = UNSET;
        }
        Ok(false)
    }
}

/// Decides whether some profile on `graph` wins with `q` colors.
pub fn solve_hg(graph: &Graph, q: Color, limits: SolveLimits) -> Result<SolveOutcome> {
    if q == 0 {
        return Err(HatError::invalid("q must be at least 1"));
    }
    let n = graph.n();
    let total = checked_pow(u64::from(q), n as u64)
        .filter(|&t| t <= limits.max_colorings)
        .ok_or_else(|| {
            HatError::budget(
                "solver colorings",
                big_pow(u64::from(q), n as u64),
                limits.max_colorings,
            )
        })?;

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    for v in 0..n {
        let size = checked_pow(u64::from(q), graph.degree(v) as u64)
            .filter(|&s| s <= limits.max_colorings)
            .ok_or_else(|| {
                HatError::budget(
                    "solver table",
                    big_pow(u64::from(q), graph.degree(v) as u64),
                    limits.max_colorings,
                )
            })?;
        offsets.push(offsets[v] + size as usize);
    }

    let mut slot = Vec::with_capacity(total as usize * n);
    let mut own = Vec::with_capacity(total as usize * n);
    let mut values = alloc::vec![0; n];
    let mut seen = Vec::new();
    loop {
        for v in 0..n {
            seen.clear();
            seen.extend(graph.neighbors(v).iter().map(|&u| values[u]));
            slot.push(offsets[v] + lex_index(&seen, q));
            own.push(values[v]);
        }
        if !advance(&mut values, q) {
            break;
        }
    }

    let mut search = Search {
        n,
        slot,
        own,
        value: alloc::vec![UNSET; offsets[n]],
        nodes: 0,
        max_nodes: limits.max_nodes,
    };
    let winnable = search.run()?;
    let witness = if winnable {
        let guessers = (0..n)
            .map(|v| {
                Guesser::Table(
                    search.value[offsets[v]..offsets[v + 1]]
                        .iter()
                        .map(|&g| if g == UNSET { 0 } else { g })
                        .collect(),
                )
            })
            .collect();
        Some(StrategyProfile::new(q, guessers)?)
    } else {
        None
    };
    Ok(SolveOutcome {
        winnable,
        witness,
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{verify, VerifyMode};

    fn solve(g: &Graph, q: Color) -> SolveOutcome {
        solve_hg(g, q, SolveLimits::default()).unwrap()
    }

    #[test]
    fn small_cliques() {
        assert!(solve(&Graph::complete(1), 1).winnable);
        assert!(!solve(&Graph::complete(1), 2).winnable);
        assert!(solve(&Graph::complete(2), 2).winnable);
        assert!(!solve(&Graph::complete(2), 3).winnable);
        assert!(solve(&Graph::complete(3), 3).winnable);
    }

    #[test]
    fn witnesses_verify() {
        for (g, q) in [
            (Graph::complete(2), 2),
            (Graph::complete(3), 3),
            (Graph::complete(3), 2),
        ] {
            let out = solve(&g, q);
            let w = out.witness.unwrap();
            assert!(verify(&g, &w, VerifyMode::Exhaustive, 1 << 20).unwrap().is_winning());
        }
    }

    #[test]
    fn edgeless_graph_loses_at_two() {
        assert!(!solve(&Graph::empty(3), 2).winnable);
    }

    #[test]
    fn budget_errors() {
        let limits = SolveLimits {
            max_colorings: 10,
            max_nodes: 10,
        };
        assert!(matches!(
            solve_hg(&Graph::complete(3), 3, limits),
            Err(HatError::BudgetExceeded { .. })
        ));
    }
}
