//! Books inside `G(n, 1/2)` and the hat guessing lower bounds they certify.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::book::{certified_q, CertifiedQ, CertifyOptions};
use crate::{Graph, HatError, Result};

pub const MAX_SAMPLE_N: usize = 100_000;

/// A graph stored as adjacency bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GnpSample {
    n: usize,
    seed: u64,
    words: usize,
    rows: Vec<u64>,
}

impl GnpSample {
    /// Each pair `i < j` is an edge independently with probability 1/2.
    /// Row `i`'s bits above the diagonal are drawn in order, one `u64` per
    /// 64 columns, from a ChaCha8 stream seeded by `seed`.
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        if n > MAX_SAMPLE_N {
            return Err(HatError::budget("sample vertices", n, MAX_SAMPLE_N as u64));
        }
        let words = n.div_ceil(64);
        let mut rows = alloc::vec![0u64; n * words];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..n {
            let first = (i + 1) / 64;
            for w in first..words {
                let mut bits = rng.next_u64();
                if w == first {
                    let lo = (i + 1) % 64;
                    bits &= if lo == 0 { u64::MAX } else { u64::MAX << lo };
                }
                if w == words - 1 && !n.is_multiple_of(64) {
                    bits &= (1u64 << (n % 64)) - 1;
                }
                rows[i * words + w] = bits;
            }
        }
        for i in 0..n {
            for w in (i + 1) / 64..words {
                let mut bits = rows[i * words + w];
                while bits != 0 {
                    let j = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    rows[j * words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(GnpSample { n, seed, words, rows })
    }

    /// Bitset form of an arbitrary graph.
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.n();
        let words = n.div_ceil(64);
        let mut rows = alloc::vec![0u64; n * words];
        for (a, b) in graph.edges() {
            rows[a * words + b / 64] |= 1 << (b % 64);
            rows[b * words + a / 64] |= 1 << (a % 64);
        }
        GnpSample {
            n,
            seed: 0,
            words,
            rows,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.row(a)[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }
}

/// Largest `d` with `d^d * d^3 <= n / 2^(d+1)`, or 0 when even `d = 1` fails.
pub fn target_d(n: &BigUint) -> usize {
    let mut d = 0usize;
    loop {
        let next = d + 1;
        let lhs = BigUint::from(next).pow(next as u32 + 3) << (next + 1);
        if lhs > *n {
            return d;
        }
        d = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub log2_n: u32,
    pub d: usize,
    /// `d * ln ln n / ln n`
    pub ratio: f64,
}

/// `target_d(2^k)` next to its normalized growth for each `k`.
pub fn target_d_trend(exponents: impl IntoIterator<Item = u32>) -> Vec<TrendRow> {
    exponents
        .into_iter()
        .map(|k| {
            let d = target_d(&(BigUint::from(1u32) << k));
            let ln_n = f64::from(k) * core::f64::consts::LN_2;
            TrendRow {
                log2_n: k,
                d,
                ratio: d as f64 * libm::log(ln_n) / ln_n,
            }
        })
        .collect()
}

/// A `d`-clique and every vertex adjacent to all of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BookEmbedding {
    pub clique: Vec<usize>,
    pub commons: Vec<usize>,
}

impl BookEmbedding {
    /// Re-checks both adjacency claims and that `commons` is complete.
    pub fn is_exact(&self, sample: &GnpSample) -> bool {
        let c = &self.clique;
        let pairwise = c
            .iter()
            .enumerate()
            .all(|(i, &a)| c[i + 1..].iter().all(|&b| sample.has_edge(a, b)));
        let listed: Vec<usize> = (0..sample.n())
            .filter(|v| !c.contains(v) && c.iter().all(|&a| sample.has_edge(a, *v)))
            .collect();
        pairwise && listed == self.commons
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BookSearch {
    Found {
        book: BookEmbedding,
        cliques_seen: u64,
    },
    /// The search finished and the graph has no `d`-clique.
    Absent,
    /// The node budget ran out before any `d`-clique turned up.
    NotFoundAtCap {
        nodes: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BookSearchOptions {
    /// Stop after this many `d`-cliques. Branches that cannot beat the
    /// best so far are skipped and not counted.
    pub k_max: u64,
    pub max_nodes: u64,
}

impl Default for BookSearchOptions {
    fn default() -> Self {
        BookSearchOptions {
            k_max: 10_000,
            max_nodes: 10_000_000,
        }
    }
}

struct BookDfs<'a> {
    sample: &'a GnpSample,
    d: usize,
    opts: BookSearchOptions,
    clique: Vec<usize>,
    best: Option<(usize, Vec<usize>)>,
    cliques: u64,
    nodes: u64,
    stopped: bool,
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

impl BookDfs<'_> {
    /// `commons`: vertices adjacent to the whole current clique.
    fn extend(&mut self, commons: &[u64], min_next: usize) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            self.stopped = true;
            return;
        }
        let size = popcount(commons);
        if self.clique.len() == self.d {
            self.cliques += 1;
            if self.best.as_ref().is_none_or(|(b, _)| size > *b) {
                self.best = Some((size, self.clique.clone()));
            }
            if self.cliques >= self.opts.k_max {
                self.stopped = true;
            }
            return;
        }
        if let Some((best, _)) = &self.best {
            // commons only shrink as the clique grows
            if size <= *best {
                return;
            }
        }
        let mut next = alloc::vec![0u64; commons.len()];
        for w in min_next / 64..commons.len() {
            let mut bits = commons[w];
            if w == min_next / 64 {
                bits &= u64::MAX << (min_next % 64);
            }
            while bits != 0 {
                let v = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                for (o, (&c, &r)) in next.iter_mut().zip(commons.iter().zip(self.sample.row(v))) {
                    *o = c & r;
                }
                self.clique.push(v);
                self.extend(&next, v + 1);
                self.clique.pop();
                if self.stopped {
                    return;
                }
            }
        }
    }
}

/// Searches `d`-cliques for the one with the most common neighbours.
/// Starting vertices are tried by descending degree; each clique is reached
/// once, through its smallest vertex.
pub fn find_book(sample: &GnpSample, d: usize, opts: BookSearchOptions) -> Result<BookSearch> {
    if d == 0 {
        return Err(HatError::invalid("clique size must be positive"));
    }
    let mut order: Vec<usize> = (0..sample.n()).collect();
    order.sort_by_key(|&v| (core::cmp::Reverse(sample.degree(v)), v));
    let mut dfs = BookDfs {
        sample,
        d,
        opts,
        clique: Vec::with_capacity(d),
        best: None,
        cliques: 0,
        nodes: 0,
        stopped: false,
    };
    for &v in &order {
        dfs.clique.push(v);
        let row = sample.row(v).to_vec();
        // restrict to larger indices so each clique is reached from its minimum
        let mut later = row.clone();
        for (w, word) in later.iter_mut().enumerate() {
            if w < v / 64 {
                *word = 0;
            } else if w == v / 64 {
                *word &= u64::MAX.checked_shl((v % 64) as u32 + 1).unwrap_or(0);
            }
        }
        if d == 1 {
            dfs.extend(&row, sample.n());
        } else {
            extend_from_root(&mut dfs, &row, &later);
        }
        dfs.clique.pop();
        if dfs.stopped {
            break;
        }
    }
    let exhausted = dfs.nodes > opts.max_nodes;
    Ok(match dfs.best {
        Some((_, clique)) => {
            let mut sorted = clique.clone();
            sorted.sort_unstable();
            let commons = (0..sample.n())
                .filter(|v| !sorted.contains(v) && sorted.iter().all(|&a| sample.has_edge(a, *v)))
                .collect();
            BookSearch::Found {
                book: BookEmbedding {
                    clique: sorted,
                    commons,
                },
                cliques_seen: dfs.cliques,
            }
        }
        None if exhausted => BookSearch::NotFoundAtCap { nodes: dfs.nodes },
        None => BookSearch::Absent,
    })
}

/// Root step: the clique's commons are the root's whole neighbourhood, the
/// next vertex comes from its larger neighbours.
fn extend_from_root(dfs: &mut BookDfs<'_>, row: &[u64], later: &[u64]) {
    let mut next = alloc::vec![0u64; row.len()];
    for (w, &word) in later.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let u = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for (o, (&c, &r)) in next.iter_mut().zip(row.iter().zip(dfs.sample.row(u))) {
                *o = c & r;
            }
            dfs.clique.push(u);
            dfs.extend(&next, u + 1);
            dfs.clique.pop();
            if dfs.stopped {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedBound {
    pub n: usize,
    /// `target_d(n)`
    pub target_d: usize,
    /// Clique size of the winning book.
    pub d: usize,
    pub book: Option<BookEmbedding>,
    pub q: u32,
    pub certificate: Option<CertifiedQ>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundOptions {
    pub search: BookSearchOptions,
    pub certify: CertifyOptions,
}

/// Finds books with clique sizes `1..=max(target_d(n), 2)` and keeps the
/// one whose certified `q` is largest.
pub fn certified_lower_bound(sample: &GnpSample, seed: u64, opts: BoundOptions) -> Result<CertifiedBound> {
    let n = sample.n();
    let td = target_d(&BigUint::from(n));
    let mut out = CertifiedBound {
        n,
        target_d: td,
        d: 0,
        book: None,
        q: 1,
        certificate: None,
    };
    for d in 1..=td.max(2).min(n) {
        let book = match find_book(sample, d, opts.search)? {
            BookSearch::Found { book, .. } => book,
            BookSearch::Absent | BookSearch::NotFoundAtCap { .. } => continue,
        };
        if !book.is_exact(sample) {
            return Err(HatError::Contradiction(format!(
                "book {book:?} fails its adjacency check"
            )));
        }
        let cert = certified_q(d, book.commons.len(), seed, opts.certify)?;
        if out.certificate.is_none() || cert.q > out.q {
            out.d = d;
            out.q = cert.q;
            out.book = Some(book);
            out.certificate = Some(cert);
        }
    }
    Ok(out)
}
