//! Certified lower bounds on sampled `G(n, 1/2)` graphs.

use std::time::Instant;

use hatguess_core::randgraph::{certified_lower_bound, target_d_trend, BoundOptions, GnpSample};
use hatguess_core::Result;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub seed: u64,
    pub d: usize,
    pub m_found: usize,
    pub q_certified: u32,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MedianRow {
    pub n: usize,
    /// Lower median over seeds.
    pub median_q: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendEntry {
    pub log2_n: u32,
    pub target_d: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub medians: Vec<MedianRow>,
    pub medians_nondecreasing: bool,
    pub target_d_trend: Vec<TrendEntry>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub seeds: u64,
    /// Seed `i` of every size is `base_seed + i`.
    pub base_seed: u64,
    /// Record wall-clock times; when off, `wall_ms` is 0.
    pub timing: bool,
    pub options: BoundOptions,
}

pub fn run_row(n: usize, seed: u64, timing: bool, options: BoundOptions) -> Result<ExperimentRow> {
    let start = Instant::now();
    let sample = GnpSample::sample(n, seed)?;
    let bound = certified_lower_bound(&sample, seed, options)?;
    Ok(ExperimentRow {
        n,
        seed,
        d: bound.d,
        m_found: bound.book.map_or(0, |b| b.commons.len()),
        q_certified: bound.q,
        wall_ms: if timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    crate::parallel::init_pool();
    let jobs: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.seeds).map(move |i| (n, cfg.base_seed.wrapping_add(i))))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, seed)| run_row(n, seed, cfg.timing, cfg.options))
        .collect::<Result<Vec<_>>>()?;
    let medians: Vec<MedianRow> = cfg
        .sizes
        .iter()
        .map(|&n| {
            let mut qs: Vec<u32> = rows.iter().filter(|r| r.n == n).map(|r| r.q_certified).collect();
            qs.sort_unstable();
            MedianRow {
                n,
                median_q: qs.get(qs.len().saturating_sub(1) / 2).copied().unwrap_or(1),
            }
        })
        .collect();
    let mut by_n = medians.clone();
    by_n.sort_by_key(|m| m.n);
    let nondecreasing = by_n.windows(2).all(|w| w[0].median_q <= w[1].median_q);
    let target_d_trend = target_d_trend(10..=60)
        .into_iter()
        .map(|t| TrendEntry {
            log2_n: t.log2_n,
            target_d: t.d,
            ratio: t.ratio,
        })
        .collect();
    Ok(ExperimentReport {
        rows,
        medians,
        medians_nondecreasing: nondecreasing,
        target_d_trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_sizes_and_seeds() {
        let cfg = ExperimentConfig {
            sizes: vec![64, 128],
            seeds: 2,
            base_seed: 10,
            timing: false,
            options: BoundOptions::default(),
        };
        let rep = run_experiment(&cfg).unwrap();
        let keys: Vec<(usize, u64)> = rep.rows.iter().map(|r| (r.n, r.seed)).collect();
        assert_eq!(keys, vec![(64, 10), (64, 11), (128, 10), (128, 11)]);
        assert!(rep.rows.iter().all(|r| r.q_certified >= 2 && r.wall_ms == 0));
        assert_eq!(rep, run_experiment(&cfg).unwrap());
    }
}
