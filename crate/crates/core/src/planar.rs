//! The central-pair construction: a central edge `uv` and `m` outer edges
//! `x_i y_i`, each outer vertex adjacent to both `u` and `v`.
//!
//! Outer pair `i` is driven by a pair function `f_i` from central colorings
//! to unordered color pairs `{g1 < g2}`: `x_i` guesses `g1 - h(y_i)` and
//! `y_i` guesses `g2 - h(x_i)`, so both are wrong exactly when
//! `h(x_i) + h(y_i)` avoids `f_i(h(u), h(v))`. The central pair sees every
//! outer hat, computes the central colorings under which all outer vertices
//! would be wrong (the survivors) and plays a known-set strategy on them.
//!
//! With `q` colors the covering parameter is `t = q / 2`: a family covers
//! when every `t` central colorings are sent by some member to pairwise
//! disjoint pairs, which then partition `[0, q)`. Covering caps the
//! survivors at `t - 1`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clique::{handle_known_set, HandleOutcome, KnownSet, DEFAULT_NODE_BUDGET};
use crate::combin::{big_pow, binomial, binomial_u64, Combinations};
use crate::game::Evaluator;
use crate::{Color, Coloring, Graph, Guesser, HatError, Result, Shape, StrategyProfile, StructuredGuesser};

pub const U: usize = 0;
pub const V: usize = 1;

pub fn outer_x(i: usize) -> usize {
    2 + 2 * i
}

pub fn outer_y(i: usize) -> usize {
    3 + 2 * i
}

/// Number of unordered pairs of distinct colors.
pub fn pair_count(q: Color) -> u32 {
    q * q.saturating_sub(1) / 2
}

/// Colex rank of `{g1 < g2}`.
pub fn colex_rank(g1: Color, g2: Color) -> u32 {
    debug_assert!(g1 < g2);
    g2 * (g2 - 1) / 2 + g1
}

/// The pair of colex rank `rank`.
pub fn colex_unrank(rank: u32) -> (Color, Color) {
    let mut g2 = 1;
    while (g2 + 1) * g2 / 2 <= rank {
        g2 += 1;
    }
    (rank - g2 * (g2 - 1) / 2, g2)
}

/// A map from ordered central colorings `(a, b)` to unordered pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairFunction {
    q: Color,
    /// Indexed by `a * q + b`; every entry has `g1 < g2 < q`.
    table: Vec<(Color, Color)>,
}

impl PairFunction {
    pub fn new(q: Color, table: Vec<(Color, Color)>) -> Result<Self> {
        if q < 2 {
            return Err(HatError::invalid("pair functions need q >= 2"));
        }
        if table.len() != (q * q) as usize {
            return Err(HatError::invalid(format!(
                "pair table has {} entries, need {}",
                table.len(),
                q * q
            )));
        }
        if let Some(&(g1, g2)) = table.iter().find(|&&(g1, g2)| !(g1 < g2 && g2 < q)) {
            return Err(HatError::invalid(format!(
                "pair ({g1},{g2}) is not an ordered pair of distinct colors < {q}"
            )));
        }
        Ok(PairFunction { q, table })
    }

    pub fn constant(q: Color, pair: (Color, Color)) -> Result<Self> {
        PairFunction::new(q, alloc::vec![pair; (q * q) as usize])
    }

    pub fn q(&self) -> Color {
        self.q
    }

    pub fn table(&self) -> &[(Color, Color)] {
        &self.table
    }

    #[inline]
    pub fn get(&self, a: Color, b: Color) -> (Color, Color) {
        self.table[(a * self.q + b) as usize]
    }

    #[inline]
    fn get_index(&self, central: usize) -> (Color, Color) {
        self.table[central]
    }

    /// Whether `sum` lies in `f(a, b)`.
    #[inline]
    pub fn hits(&self, a: Color, b: Color, sum: Color) -> bool {
        let (g1, g2) = self.get(a, b);
        sum == g1 || sum == g2
    }

    /// Whether the central colorings at `indices` (each `a * q + b`) are sent
    /// to pairwise disjoint pairs.
    pub fn separates(&self, indices: &[usize]) -> bool {
        let mut used = 0u64;
        for &c in indices {
            let (g1, g2) = self.get_index(c);
            let bits = (1u64 << g1) | (1u64 << g2);
            if used & bits != 0 {
                return false;
            }
            used |= bits;
        }
        true
    }
}

/// The guesses `(x, y)` of an outer pair driven by `f`.
pub fn outer_guesses(f: &PairFunction, hu: Color, hv: Color, hx: Color, hy: Color) -> (Color, Color) {
    let q = f.q;
    let (g1, g2) = f.get(hu, hv);
    ((g1 + q - hy) % q, (g2 + q - hx) % q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Members {
    Explicit(Vec<PairFunction>),
    /// Every pair function, member `i` decoded from `i` in mixed radix.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairFunctionFamily {
    q: Color,
    t: usize,
    members: Members,
}

impl PairFunctionFamily {
    pub fn explicit(q: Color, members: Vec<PairFunction>) -> Result<Self> {
        if members.iter().any(|f| f.q != q) {
            return Err(HatError::invalid("family members disagree on q"));
        }
        Ok(PairFunctionFamily {
            q,
            t: (q / 2) as usize,
            members: Members::Explicit(members),
        })
    }

    /// The family of all pair functions, indexed implicitly.
    pub fn full(q: Color) -> Result<Self> {
        if !(2..=64).contains(&q) {
            return Err(HatError::invalid(format!(
                "implicit family supports 2 <= q <= 64, got {q}"
            )));
        }
        Ok(PairFunctionFamily {
            q,
            t: (q / 2) as usize,
            members: Members::Full,
        })
    }

    pub fn q(&self) -> Color {
        self.q
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn explicit_members(&self) -> Option<&[PairFunction]> {
        match &self.members {
            Members::Explicit(m) => Some(m),
            Members::Full => None,
        }
    }

    pub fn len(&self) -> BigUint {
        match &self.members {
            Members::Explicit(m) => BigUint::from(m.len()),
            Members::Full => full_count(self.q),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_zero()
    }

    /// Member `index`; for the full family this decodes the index.
    pub fn member(&self, index: &BigUint) -> Result<PairFunction> {
        match &self.members {
            Members::Explicit(m) => index
                .to_usize()
                .and_then(|i| m.get(i))
                .cloned()
                .ok_or_else(|| HatError::invalid(format!("member index {index} out of range"))),
            Members::Full => decode_full_member(self.q, index),
        }
    }
}

/// `C(q,2)^(q^2)`, the number of pair functions.
pub fn full_count(q: Color) -> BigUint {
    big_pow(u64::from(pair_count(q)), u64::from(q * q))
}

/// Decodes member `index` of the full family: digit `j` (least significant
/// first, base `C(q,2)`) is the colex rank of the pair assigned to central
/// coloring `j = a * q + b`.
pub fn decode_full_member(q: Color, index: &BigUint) -> Result<PairFunction> {
    if index >= &full_count(q) {
        return Err(HatError::invalid(format!("member index {index} out of range")));
    }
    let base = pair_count(q);
    let mut rest = index.clone();
    let mut table = Vec::with_capacity((q * q) as usize);
    for _ in 0..q * q {
        let digit = (&rest % base).to_u32().expect("digit below base");
        rest /= base;
        table.push(colex_unrank(digit));
    }
    PairFunction::new(q, table)
}

/// Inverse of [`decode_full_member`].
pub fn encode_full_member(f: &PairFunction) -> BigUint {
    let base = BigUint::from(pair_count(f.q));
    f.table
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &(g1, g2)| acc * &base + colex_rank(g1, g2))
}

/// Enumerates every pair function, when there are at most `budget` of them.
pub fn build_full_family(q: Color, budget: u64) -> Result<PairFunctionFamily> {
    if q < 2 {
        return Err(HatError::invalid("pair functions need q >= 2"));
    }
    let count = full_count(q);
    let n = count
        .to_u64()
        .filter(|&c| c <= budget)
        .ok_or_else(|| HatError::budget("full pair-function family", &count, budget))?;
    let members = (0..n)
        .map(|i| decode_full_member(q, &BigUint::from(i)))
        .collect::<Result<Vec<_>>>()?;
    PairFunctionFamily::explicit(q, members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    /// Every `t`-subset of central colorings.
    Exhaustive,
    /// `count` uniformly random `t`-subsets.
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverCheck {
    pub exact: bool,
    pub checked: u64,
    /// A subset of central colorings no member separates.
    pub violation: Option<Vec<(Color, Color)>>,
}

impl CoverCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Number of `t`-subsets an exhaustive cover check visits.
pub fn cover_subset_count(q: Color) -> BigUint {
    binomial(u64::from(q * q), u64::from(q / 2))
}

fn member_separating(family: &PairFunctionFamily, subset: &[usize]) -> Result<bool> {
    match &family.members {
        Members::Explicit(m) => Ok(m.iter().any(|f| f.separates(subset))),
        Members::Full => {
            // the member sending subset[k] to {2k, 2k+1} and everything else
            // to {0,1}, looked up through the index
            let q = family.q;
            let mut table = alloc::vec![(0, 1); (q * q) as usize];
            for (k, &c) in subset.iter().enumerate() {
                table[c] = (2 * k as Color, 2 * k as Color + 1);
            }
            let f = PairFunction::new(q, table)?;
            let member = decode_full_member(q, &encode_full_member(&f))?;
            Ok(member.separates(subset))
        }
    }
}

fn central_pairs(q: Color, subset: &[usize]) -> Vec<(Color, Color)> {
    subset.iter().map(|&c| (c as Color / q, c as Color % q)).collect()
}

/// Checks the covering property, exhaustively or on sampled subsets.
pub fn verify_cover_family(family: &PairFunctionFamily, mode: CoverMode) -> Result<CoverCheck> {
    let q = family.q;
    if !q.is_multiple_of(2) {
        return Err(HatError::invalid(format!("covering needs even q, got {q}")));
    }
    let (cells, t) = ((q * q) as usize, family.t);
    match mode {
        CoverMode::Exhaustive => {
            let mut comb = Combinations::new(cells, t);
            let mut checked = 0;
            while comb.advance() {
                checked += 1;
                if !member_separating(family, comb.current())? {
                    return Ok(CoverCheck {
                        exact: true,
                        checked,
                        violation: Some(central_pairs(q, comb.current())),
                    });
                }
            }
            Ok(CoverCheck {
                exact: true,
                checked,
                violation: None,
            })
        }
        CoverMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for checked in 1..=count {
                let mut subset = rand::seq::index::sample(&mut rng, cells, t).into_vec();
                subset.sort_unstable();
                if !member_separating(family, &subset)? {
                    return Ok(CoverCheck {
                        exact: false,
                        checked,
                        violation: Some(central_pairs(q, &subset)),
                    });
                }
            }
            Ok(CoverCheck {
                exact: false,
                checked: count,
                violation: None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverOptions {
    /// Largest `C(q^2, t)` handled by greedy construction plus exhaustive
    /// verification.
    pub subset_budget: u64,
    /// Members the greedy construction may add before giving up.
    pub max_members: usize,
    /// Candidates compared per greedy step.
    pub candidates: usize,
    /// Subsets checked when the family can only be verified by sampling.
    pub samples: u64,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            subset_budget: 2_000_000,
            max_members: 100_000,
            candidates: 8,
            samples: 1_000_000,
        }
    }
}

/// A random pair function sending the central colorings in `subset` to a
/// random perfect matching of the colors.
fn random_separator(q: Color, subset: &[usize], rng: &mut ChaCha8Rng) -> PairFunction {
    let pairs = pair_count(q);
    let mut table: Vec<(Color, Color)> = (0..q * q).map(|_| colex_unrank(rng.random_range(0..pairs))).collect();
    let mut colors: Vec<Color> = (0..q).collect();
    colors.shuffle(rng);
    for (k, &c) in subset.iter().enumerate() {
        let (a, b) = (colors[2 * k], colors[2 * k + 1]);
        table[c] = (a.min(b), a.max(b));
    }
    PairFunction { q, table }
}

/// Builds a covering family for even `q` with `t = q / 2`.
///
/// When the `C(q^2, t)` subsets fit `subset_budget`, members are added
/// greedily (each step covers the first uncovered subset and as many others
/// as the best of a few random candidates manages) and the result is checked
/// exhaustively. Otherwise members are random functions through a perfect
/// matching, as many as the union bound asks for, and the family is checked
/// on sampled subsets. A family that fails its check is never returned.
pub fn build_cover_family(q: Color, seed: u64, opts: CoverOptions) -> Result<(PairFunctionFamily, CoverCheck)> {
    if q < 2 || !q.is_multiple_of(2) || q > 64 {
        return Err(HatError::invalid(format!(
            "cover families need even 2 <= q <= 64, got {q}"
        )));
    }
    let t = (q / 2) as usize;
    let cells = (q * q) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets = binomial_u64(cells as u64, t as u64).filter(|&s| s <= opts.subset_budget);

    let (members, mode) = if subsets.is_some() {
        let mut uncovered: Vec<Vec<usize>> = Vec::new();
        let mut comb = Combinations::new(cells, t);
        while comb.advance() {
            uncovered.push(comb.current().to_vec());
        }
        let mut members = Vec::new();
        while let Some(target) = uncovered.first().cloned() {
            if members.len() >= opts.max_members {
                return Err(HatError::Contract(format!(
                    "greedy cover stopped at {} members with {} subsets uncovered",
                    members.len(),
                    uncovered.len()
                )));
            }
            let best = (0..opts.candidates.max(1))
                .map(|_| random_separator(q, &target, &mut rng))
                .map(|f| {
                    let gain = uncovered.iter().filter(|s| f.separates(s)).count();
                    (gain, f)
                })
                .max_by_key(|(gain, _)| *gain)
                .map(|(_, f)| f)
                .expect("at least one candidate");
            uncovered.retain(|s| !best.separates(s));
            members.push(best);
        }
        (members, CoverMode::Exhaustive)
    } else {
        let size = union_bound_members(q).min(opts.max_members);
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let mut colors: Vec<Color> = (0..q).collect();
            colors.shuffle(&mut rng);
            let table = (0..cells)
                .map(|_| {
                    let k = rng.random_range(0..t);
                    let (a, b) = (colors[2 * k], colors[2 * k + 1]);
                    (a.min(b), a.max(b))
                })
                .collect();
            members.push(PairFunction { q, table });
        }
        (
            members,
            CoverMode::Sampled {
                count: opts.samples,
                seed: seed ^ 0x5eed,
            },
        )
    };

    let family = PairFunctionFamily::explicit(q, members)?;
    let check = verify_cover_family(&family, mode)?;
    if let Some(v) = &check.violation {
        return Err(HatError::Contract(format!("constructed family misses subset {v:?}")));
    }
    Ok((family, check))
}

/// Members needed so that the expected number of uncovered `t`-subsets is
/// below one, for functions routed through a random perfect matching
/// (a fixed subset is separated with probability `t! / t^t`).
fn union_bound_members(q: Color) -> usize {
    let t = f64::from(q / 2);
    let hit = (1..=(q / 2)).map(f64::from).product::<f64>() / libm::pow(t, t);
    let ln_subsets = ln_binomial(u64::from(q * q), u64::from(q / 2));
    libm::ceil(ln_subsets / -libm::log1p(-hit)) as usize + 1
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    (0..k)
        .map(|i| libm::log((n - i) as f64) - libm::log((i + 1) as f64))
        .sum()
}

/// Central colorings `(a, b)` under which every outer pair is wrong, given
/// the outer sums `h(x_i) + h(y_i) mod q`, in lexicographic order.
pub fn surviving_central_colorings(members: &[PairFunction], sums: &[Color]) -> Result<Vec<(Color, Color)>> {
    if members.len() != sums.len() {
        return Err(HatError::invalid(format!(
            "{} sums for {} family members",
            sums.len(),
            members.len()
        )));
    }
    let Some(q) = members.first().map(|f| f.q) else {
        return Err(HatError::invalid("empty family has no central constraint"));
    };
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            if members.iter().zip(sums).all(|(f, &s)| !f.hits(a, b, s)) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// One step of the lazy survivor bound: member `index` (sum `sum`) rules
/// out the listed central colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub index: BigUint,
    pub sum: Color,
    pub removed: Vec<(Color, Color)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazySurvivors {
    /// A superset of the true survivor set.
    pub survivors: Vec<(Color, Color)>,
    pub steps: Vec<Elimination>,
}

/// Bounds the survivor set of the implicit full family without
/// materializing it.
///
/// While at least `t` candidates remain, the first `t` of them are sent to
/// a random perfect matching by a member built for the purpose; that
/// member's index is looked up in `sum_of`, and every candidate whose pair
/// contains the sum is removed. Every removal is justified by a real member,
/// so what is left contains the true survivors.
pub fn lazy_full_family_survivors(
    family: &PairFunctionFamily,
    mut sum_of: impl FnMut(&BigUint) -> Color,
    rng: &mut ChaCha8Rng,
) -> Result<LazySurvivors> {
    if family.members != Members::Full {
        return Err(HatError::invalid("lazy survivors need the implicit full family"));
    }
    let (q, t) = (family.q, family.t);
    let mut candidates: Vec<usize> = (0..(q * q) as usize).collect();
    let mut steps = Vec::new();
    while candidates.len() >= t.max(1) {
        let chosen = &candidates[..t.max(1)];
        let built = random_separator(q, chosen, rng);
        let index = encode_full_member(&built);
        let member = family.member(&index)?;
        if member != built {
            return Err(HatError::Contradiction(format!(
                "member {index} does not decode to its encoding"
            )));
        }
        let sum = sum_of(&index) % q;
        let (kept, removed): (Vec<usize>, Vec<usize>) = candidates.iter().partition(|&&c| {
            let (g1, g2) = member.get_index(c);
            sum != g1 && sum != g2
        });
        if removed.is_empty() {
            return Err(HatError::Contradiction(format!(
                "sum {sum} avoids a perfect matching of [0,{q})"
            )));
        }
        steps.push(Elimination {
            index,
            sum,
            removed: central_pairs(q, &removed),
        });
        candidates = kept;
    }
    Ok(LazySurvivors {
        survivors: central_pairs(q, &candidates),
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OuterRole {
    X,
    Y,
}

#[derive(Debug)]
struct PlanarOuter {
    f: Arc<PairFunction>,
    role: OuterRole,
}

impl StructuredGuesser for PlanarOuter {
    fn name(&self) -> &str {
        "planar-outer"
    }

    fn guess(&self, seen: &[Color]) -> Result<Color> {
        // seen = [h(u), h(v), h(partner)]
        let &[hu, hv, partner] = seen else {
            return Err(HatError::invalid("outer vertex must see exactly u, v and its partner"));
        };
        let (gx, gy) = match self.role {
            OuterRole::X => outer_guesses(&self.f, hu, hv, 0, partner),
            OuterRole::Y => outer_guesses(&self.f, hu, hv, partner, 0),
        };
        Ok(if self.role == OuterRole::X { gx } else { gy })
    }
}

#[derive(Debug)]
struct PlanarCentral {
    members: Arc<Vec<PairFunction>>,
    q: Color,
    /// 0 for `u`, 1 for `v`.
    slot: usize,
}

impl StructuredGuesser for PlanarCentral {
    fn name(&self) -> &str {
        "planar-central"
    }

    fn guess(&self, seen: &[Color]) -> Result<Color> {
        // seen = [h(partner), h(x_0), h(y_0), h(x_1), ...]
        let m = self.members.len();
        if seen.len() != 1 + 2 * m {
            return Err(HatError::invalid(
                "central vertex must see its partner and every outer vertex",
            ));
        }
        let sums: Vec<Color> = (0..m).map(|i| (seen[1 + 2 * i] + seen[2 + 2 * i]) % self.q).collect();
        let survivors = surviving_central_colorings(&self.members, &sums)?;
        let set = survivors.iter().map(|&(a, b)| alloc::vec![a, b]).collect();
        let ks = KnownSet::new(2, self.q, set)?;
        match handle_known_set(&ks, DEFAULT_NODE_BUDGET)? {
            HandleOutcome::Handled(s) => Ok(s.guess(self.slot, &seen[..1])),
            HandleOutcome::Infeasible(_) => Err(HatError::Contract(format!(
                "central pair cannot handle survivor set {survivors:?}"
            ))),
        }
    }
}

/// The construction graph together with its strategy profile.
#[derive(Debug, Clone)]
pub struct PlanarStrategy {
    pub graph: Graph,
    pub profile: StrategyProfile,
    pub members: Arc<Vec<PairFunction>>,
}

/// Wires an explicit family into a profile on the construction with one
/// outer pair per member.
pub fn construct_planar_strategy(family: &PairFunctionFamily) -> Result<PlanarStrategy> {
    let q = family.q;
    if !q.is_multiple_of(2) {
        return Err(HatError::invalid(format!("construction needs even q, got {q}")));
    }
    if q > 12 {
        return Err(HatError::Contract(format!(
            "q={q}: up to {} survivors exceed what the central pair handles (5)",
            q / 2 - 1
        )));
    }
    let members = family
        .explicit_members()
        .ok_or_else(|| HatError::invalid("the implicit full family cannot be materialized as a graph"))?;
    let members = Arc::new(members.to_vec());
    let m = members.len();
    let graph = Graph::planar_construction(q, m);
    let mut guessers = Vec::with_capacity(2 + 2 * m);
    for slot in [U, V] {
        guessers.push(Guesser::Structured(Arc::new(PlanarCentral {
            members: members.clone(),
            q,
            slot,
        })));
    }
    for f in members.iter() {
        let f = Arc::new(f.clone());
        guessers.push(Guesser::Structured(Arc::new(PlanarOuter {
            f: f.clone(),
            role: OuterRole::X,
        })));
        guessers.push(Guesser::Structured(Arc::new(PlanarOuter { f, role: OuterRole::Y })));
    }
    let profile = StrategyProfile::new(q, guessers)?;
    profile.validate_for(&graph)?;
    Ok(PlanarStrategy {
        graph,
        profile,
        members,
    })
}

/// The six central colorings `{0,1} x {0,1,2}` the adversary commits to.
pub const ADVERSARY_CENTRAL: [(Color, Color); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)];

/// Defeats any profile on the construction with 13 colors.
///
/// Each outer pair gets the lexicographically first of its 169 colorings on
/// which both members are wrong under all six committed central colorings;
/// then the central pair gets the first committed coloring on which both of
/// its members are wrong. The result is checked to have no correct guess.
pub fn adversary_13(graph: &Graph, profile: &StrategyProfile) -> Result<Coloring> {
    const Q: Color = 13;
    let Shape::PlanarConstruction { m, .. } = graph.shape() else {
        return Err(HatError::invalid("adversary needs the planar construction shape"));
    };
    if profile.q() != Q {
        return Err(HatError::invalid(format!(
            "adversary plays 13 colors, profile has q={}",
            profile.q()
        )));
    }
    let mut eval = Evaluator::new(graph, profile)?;
    let mut values = alloc::vec![0; graph.n()];

    for i in 0..m {
        let (x, y) = (outer_x(i), outer_y(i));
        let mut chosen = None;
        'scan: for hx in 0..Q {
            for hy in 0..Q {
                values[x] = hx;
                values[y] = hy;
                let mut all_wrong = true;
                for &(a, b) in &ADVERSARY_CENTRAL {
                    values[U] = a;
                    values[V] = b;
                    if eval.is_correct(x, &values)? || eval.is_correct(y, &values)? {
                        all_wrong = false;
                        break;
                    }
                }
                if all_wrong {
                    chosen = Some((hx, hy));
                    break 'scan;
                }
            }
        }
        let (hx, hy) = chosen.ok_or_else(|| {
            HatError::Contradiction(format!(
                "outer pair {i} has no coloring wrong for all six central colorings"
            ))
        })?;
        values[x] = hx;
        values[y] = hy;
    }

    let mut central = None;
    for &(a, b) in &ADVERSARY_CENTRAL {
        values[U] = a;
        values[V] = b;
        if !eval.is_correct(U, &values)? && !eval.is_correct(V, &values)? {
            central = Some((a, b));
            break;
        }
    }
    let (a, b) =
        central.ok_or_else(|| HatError::Contradiction("central pair handles all six committed colorings".into()))?;
    values[U] = a;
    values[V] = b;
    if eval.any_correct(&values)? {
        return Err(HatError::Contradiction("adversary coloring has a correct guess".into()));
    }
    Coloring::new(Q, values)
}

/// Whether `graph` respects the planar edge bound `e <= 3v - 6` (`v >= 3`).
pub fn within_euler_bound(graph: &Graph) -> bool {
    graph.n() < 3 || graph.edge_count() <= 3 * graph.n() - 6
}

/// A combinatorial embedding of the construction: neighbours of each
/// vertex in counter-clockwise order, for the drawing with `u` above, `v`
/// below, the outer pairs on a horizontal line between them and the edge
/// `uv` routed around the left.
pub fn construction_rotation(m: usize) -> Vec<Vec<usize>> {
    let mut rot = Vec::with_capacity(2 + 2 * m);
    let mut at_u = alloc::vec![V];
    let mut at_v = Vec::new();
    for i in 0..m {
        at_u.extend([outer_x(i), outer_y(i)]);
    }
    for i in (0..m).rev() {
        at_v.extend([outer_y(i), outer_x(i)]);
    }
    at_v.push(U);
    rot.push(at_u);
    rot.push(at_v);
    for i in 0..m {
        rot.push(alloc::vec![outer_y(i), U, V]);
        rot.push(alloc::vec![U, outer_x(i), V]);
    }
    rot
}

/// Counts faces of the rotation system and checks Euler's formula
/// `V - E + F = 2` for the (connected) graph. A rotation system that
/// satisfies it is a planar embedding.
pub fn is_planar_embedding(graph: &Graph, rotation: &[Vec<usize>]) -> bool {
    if rotation.len() != graph.n() || graph.n() == 0 {
        return false;
    }
    for (v, order) in rotation.iter().enumerate() {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != graph.neighbors(v) {
            return false;
        }
    }
    let e = graph.edge_count();
    if e == 0 {
        return graph.n() == 1;
    }
    // darts (a, b) indexed by a's adjacency position
    let pos = |a: usize, b: usize| rotation[a].iter().position(|&w| w == b).expect("neighbour");
    let mut seen: Vec<Vec<bool>> = rotation.iter().map(|r| alloc::vec![false; r.len()]).collect();
    let mut faces = 0usize;
    for a in 0..graph.n() {
        for k in 0..rotation[a].len() {
            if seen[a][k] {
                continue;
            }
            faces += 1;
            let (mut x, mut kx) = (a, k);
            while !seen[x][kx] {
                seen[x][kx] = true;
                let y = rotation[x][kx];
                // next dart leaves y right after the reverse dart (y, x)
                let back = pos(y, x);
                let next = (back + 1) % rotation[y].len();
                x = y;
                kx = next;
            }
        }
    }
    let connected = is_connected(graph);
    connected && graph.n() + faces == e + 2
}

fn is_connected(graph: &Graph) -> bool {
    let mut seen = alloc::vec![false; graph.n()];
    let mut stack = alloc::vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in graph.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
