//! Strategies on book graphs `B_{d,m}`: a central `d`-clique and `m` outer
//! vertices that each see the whole clique.
//!
//! Outer vertex `i` guesses `f_i(central coloring)`. If every `s`-subset of
//! central colorings has a member whose restriction is onto `[0, q)`, then
//! for any outer hats fewer than `s` central colorings leave all outer
//! vertices wrong. The clique computes that survivor set from the hats it
//! sees and plays a known-set strategy on it.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clique::{capacity, handle_known_set, HandleOutcome, KnownSet, DEFAULT_NODE_BUDGET};
use crate::coloring::advance;
use crate::combin::{big_pow, binomial, checked_pow, Combinations};
use crate::{Color, Graph, Guesser, HatError, Result, StrategyProfile, StructuredGuesser, VerifyMode};

/// The lemma's parameter point for clique size `d`, exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaParameters {
    pub d: u32,
    /// `d^(d-2)`
    pub q: BigUint,
    /// `d^d * d^3`
    pub m: BigUint,
    /// `d^d`
    pub s: BigUint,
}

pub fn lemma_parameters(d: u32) -> Result<LemmaParameters> {
    if d < 2 {
        return Err(HatError::invalid(format!("lemma parameters need d >= 2, got {d}")));
    }
    let d64 = u64::from(d);
    Ok(LemmaParameters {
        d,
        q: big_pow(d64, d64 - 2),
        m: big_pow(d64, d64 + 3),
        s: big_pow(d64, d64),
    })
}

impl LemmaParameters {
    pub fn to_book(&self) -> Result<BookParameters> {
        let too_big = || HatError::invalid(format!("lemma parameters for d={} overflow", self.d));
        BookParameters::new(
            self.d as usize,
            self.q.to_u32().ok_or_else(too_big)?,
            self.m.to_usize().ok_or_else(too_big)?,
            self.s.to_usize().ok_or_else(too_big)?,
        )
    }
}

/// The numbers in the lemma's two union bounds at clique size `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionBound {
    /// `q (1 - 1/q)^(d^d)`: a fixed member misses some color on a fixed set.
    pub miss: f64,
    /// `q e^(-d^d / q)`
    pub exp_form: f64,
    /// `q e^(-d^2)`
    pub square_form: f64,
    /// `log2` of the bound `d^(d^d d^2)` on the number of `d^d`-subsets.
    pub log2_subsets: f64,
    /// `log2` of subsets bound times `(1/2)^(d^d d^3)`.
    pub log2_total: f64,
}

impl UnionBound {
    /// `miss <= exp_form <= square_form < 1/2` and the total below 1.
    /// With `q = d^(d-2)` the middle step is an equality.
    pub fn holds(&self) -> bool {
        let tol = 1e-12 * self.square_form.max(1e-300);
        self.miss <= self.exp_form + tol
            && self.exp_form <= self.square_form + tol
            && self.square_form < 0.5
            && self.log2_total < 0.0
    }
}

pub fn union_bound_chain(d: u32) -> UnionBound {
    let df = f64::from(d);
    let q = libm::pow(df, df - 2.0);
    let dd = libm::pow(df, df);
    let miss = if q <= 1.0 {
        0.0
    } else {
        q * libm::pow(1.0 - 1.0 / q, dd)
    };
    let log2_subsets = dd * df * df * libm::log2(df);
    UnionBound {
        miss,
        exp_form: q * libm::exp(-dd / q),
        square_form: q * libm::exp(-df * df),
        log2_subsets,
        log2_total: log2_subsets - dd * df * df * df,
    }
}

/// `(d, q, m, s)`: clique size, colors, outer vertices, survivor threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BookParameters {
    pub d: usize,
    pub q: Color,
    pub m: usize,
    pub s: usize,
}

impl BookParameters {
    pub fn new(d: usize, q: Color, m: usize, s: usize) -> Result<Self> {
        if d == 0 || q == 0 || s == 0 {
            return Err(HatError::invalid("book parameters need d, q, s >= 1"));
        }
        if q > 64 {
            return Err(HatError::invalid(format!("q={q} above the supported 64")));
        }
        match checked_pow(u64::from(q), d as u64) {
            Some(cells) if cells <= u32::MAX as u64 => {
                if s as u64 > cells {
                    return Err(HatError::invalid(format!("s={s} exceeds q^d={cells}")));
                }
            }
            _ => return Err(HatError::invalid(format!("q^d = {q}^{d} is too large to tabulate"))),
        }
        Ok(BookParameters { d, q, m, s })
    }

    /// `q^d`, the number of central colorings.
    pub fn cells(&self) -> usize {
        (self.q as usize).pow(self.d as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    /// Every `s`-subset of central colorings was checked.
    ExactSubsets { checked: u64 },
    /// Every outer coloring's survivor set was checked to be below `s`.
    ExactOuter { checked: u64 },
    /// Only `samples` random `s`-subsets were checked.
    Sampled { samples: u64 },
}

impl Verification {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Verification::Sampled { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntoFamily {
    pub params: BookParameters,
    /// Member `i` is a flat table over central colorings in lexicographic
    /// order.
    pub members: Vec<Vec<Color>>,
    pub verification: Verification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OntoMode {
    Subsets,
    OuterColorings,
    Sampled {
        count: u64,
        seed: u64,
    },
    /// The cheaper exact mode when its worst-case work fits `budget`,
    /// otherwise sampling.
    Auto {
        budget: u64,
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntoCheck {
    pub verification: Verification,
    /// An `s`-subset (as central colorings) with no onto member.
    pub violation: Option<Vec<Vec<Color>>>,
}

impl OntoCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn decode_cell(mut index: usize, params: &BookParameters) -> Vec<Color> {
    let q = params.q as usize;
    let mut out = alloc::vec![0; params.d];
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as Color;
        index /= q;
    }
    out
}

fn onto_on(member: &[Color], subset: &[usize], full: u64) -> bool {
    let mut hit = 0u64;
    for &c in subset {
        hit |= 1 << member[c];
        if hit == full {
            return true;
        }
    }
    hit == full
}

fn check_members(params: &BookParameters, members: &[Vec<Color>]) -> Result<()> {
    if members.len() != params.m {
        return Err(HatError::invalid(format!(
            "{} members for m={}",
            members.len(),
            params.m
        )));
    }
    let cells = params.cells();
    for (i, f) in members.iter().enumerate() {
        if f.len() != cells {
            return Err(HatError::invalid(format!(
                "member {i} has {} entries, need q^d={cells}",
                f.len()
            )));
        }
        if f.iter().any(|&c| c >= params.q) {
            return Err(HatError::invalid(format!("member {i} has a value >= q")));
        }
    }
    Ok(())
}

/// Indices of central colorings under which every outer vertex is wrong.
pub fn survivor_indices(members: &[Vec<Color>], outer: &[Color], cells: usize) -> Vec<usize> {
    (0..cells)
        .filter(|&c| members.iter().zip(outer).all(|(f, &h)| f[c] != h))
        .collect()
}

/// Survivor set as central colorings, lexicographic.
pub fn survivors(params: &BookParameters, members: &[Vec<Color>], outer: &[Color]) -> Vec<Vec<Color>> {
    survivor_indices(members, outer, params.cells())
        .into_iter()
        .map(|c| decode_cell(c, params))
        .collect()
}

/// Worst-case work of the two exact verification routes: over `s`-subsets
/// and over outer colorings.
pub fn exact_costs(params: &BookParameters) -> (BigUint, BigUint) {
    let cells = params.cells() as u64;
    let m = params.m as u64;
    (
        binomial(cells, params.s as u64) * (m * params.s as u64),
        big_pow(u64::from(params.q), m) * (cells * m.max(1)),
    )
}

/// Checks that every `s`-subset of central colorings meets an onto member.
pub fn verify_onto_family(params: &BookParameters, members: &[Vec<Color>], mode: OntoMode) -> Result<OntoCheck> {
    check_members(params, members)?;
    let cells = params.cells();
    let s = params.s;
    let full = if params.q == 64 {
        u64::MAX
    } else {
        (1u64 << params.q) - 1
    };
    let as_colorings = |subset: &[usize]| subset.iter().map(|&c| decode_cell(c, params)).collect();

    let mode = match mode {
        OntoMode::Auto { budget, samples, seed } => {
            let (by_subsets, by_outer) = exact_costs(params);
            let budget_big = BigUint::from(budget);
            if by_subsets <= by_outer && by_subsets <= budget_big {
                OntoMode::Subsets
            } else if by_outer <= budget_big {
                OntoMode::OuterColorings
            } else {
                OntoMode::Sampled { count: samples, seed }
            }
        }
        other => other,
    };

    match mode {
        OntoMode::Subsets => {
            let mut comb = Combinations::new(cells, s);
            let mut checked = 0;
            while comb.advance() {
                checked += 1;
                if !members.iter().any(|f| onto_on(f, comb.current(), full)) {
                    return Ok(OntoCheck {
                        verification: Verification::ExactSubsets { checked },
                        violation: Some(as_colorings(comb.current())),
                    });
                }
            }
            Ok(OntoCheck {
                verification: Verification::ExactSubsets { checked },
                violation: None,
            })
        }
        OntoMode::OuterColorings => {
            let mut outer = alloc::vec![0; params.m];
            let mut checked = 0;
            loop {
                checked += 1;
                let surv = survivor_indices(members, &outer, cells);
                if surv.len() >= s {
                    return Ok(OntoCheck {
                        verification: Verification::ExactOuter { checked },
                        violation: Some(as_colorings(&surv[..s])),
                    });
                }
                if !advance(&mut outer, params.q) {
                    break;
                }
            }
            Ok(OntoCheck {
                verification: Verification::ExactOuter { checked },
                violation: None,
            })
        }
        OntoMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let subset = rand::seq::index::sample(&mut rng, cells, s).into_vec();
                if !members.iter().any(|f| onto_on(f, &subset, full)) {
                    let mut subset = subset;
                    subset.sort_unstable();
                    return Ok(OntoCheck {
                        verification: Verification::Sampled { samples: count },
                        violation: Some(as_colorings(&subset)),
                    });
                }
            }
            Ok(OntoCheck {
                verification: Verification::Sampled { samples: count },
                violation: None,
            })
        }
        OntoMode::Auto { .. } => unreachable!("resolved above"),
    }
}

impl OntoFamily {
    /// Wraps given members after checking them.
    pub fn from_members(params: BookParameters, members: Vec<Vec<Color>>, mode: OntoMode) -> Result<Self> {
        let check = verify_onto_family(&params, &members, mode)?;
        match check.violation {
            Some(v) => Err(HatError::Contract(format!("family is not onto on subset {v:?}"))),
            None => Ok(OntoFamily {
                params,
                members,
                verification: check.verification,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OntoOptions {
    /// Worst-case work allowed for exact verification.
    pub budget: u64,
    /// Subsets drawn when only sampling fits.
    pub samples: u64,
    /// Fresh families drawn after the first fails.
    pub retries: u32,
    /// Refuse to fall back to sampling.
    pub require_exact: bool,
}

impl Default for OntoOptions {
    fn default() -> Self {
        OntoOptions {
            budget: 100_000_000,
            samples: 100_000,
            retries: 16,
            require_exact: false,
        }
    }
}

/// Draws uniformly random members (attempt `k` uses ChaCha stream `k`) until
/// one family passes verification.
pub fn build_onto_family(params: BookParameters, seed: u64, opts: OntoOptions) -> Result<OntoFamily> {
    if opts.require_exact {
        let (a, b) = exact_costs(&params);
        let cheapest = a.min(b);
        if cheapest > BigUint::from(opts.budget) {
            return Err(HatError::budget("exact onto verification", cheapest, opts.budget));
        }
    }
    let cells = params.cells();
    let mut last = None;
    for attempt in 0..=u64::from(opts.retries) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let members: Vec<Vec<Color>> = (0..params.m)
            .map(|_| (0..cells).map(|_| rng.random_range(0..params.q)).collect())
            .collect();
        let mode = OntoMode::Auto {
            budget: opts.budget,
            samples: opts.samples,
            seed: seed ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15),
        };
        let check = verify_onto_family(&params, &members, mode)?;
        match check.violation {
            None => {
                return Ok(OntoFamily {
                    params,
                    members,
                    verification: check.verification,
                })
            }
            Some(v) => last = Some(v),
        }
    }
    Err(HatError::Contract(format!(
        "no onto family after {} attempts; last violating subset {:?}",
        opts.retries + 1,
        last.unwrap_or_default()
    )))
}

#[derive(Debug)]
struct BookCentral {
    slot: usize,
    params: BookParameters,
    members: Arc<Vec<Vec<Color>>>,
}

impl StructuredGuesser for BookCentral {
    fn name(&self) -> &str {
        "book-central"
    }

    fn guess(&self, seen: &[Color]) -> Result<Color> {
        // seen = [other clique colors (d-1), outer colors (m)]
        let d = self.params.d;
        if seen.len() != d - 1 + self.params.m {
            return Err(HatError::invalid(
                "central vertex must see the rest of the clique and every outer vertex",
            ));
        }
        let (others, outer) = seen.split_at(d - 1);
        let set = survivors(&self.params, &self.members, outer);
        let ks = KnownSet::new(d, self.params.q, set)?;
        match handle_known_set(&ks, DEFAULT_NODE_BUDGET)? {
            HandleOutcome::Handled(s) => Ok(s.guess(self.slot, others)),
            HandleOutcome::Infeasible(_) => Err(HatError::Contract(format!(
                "central clique cannot handle survivor set {:?}",
                ks.colorings()
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BookStrategy {
    pub graph: Graph,
    pub profile: StrategyProfile,
}

/// Outer vertices guess with the family's tables, the clique plays the
/// known-set strategy on the survivors.
pub fn construct_book_strategy(family: &OntoFamily) -> Result<BookStrategy> {
    let p = family.params;
    check_members(&p, &family.members)?;
    if BigUint::from(p.s - 1) > capacity(p.d as u32) {
        return Err(HatError::Contract(format!(
            "s - 1 = {} exceeds the clique capacity {}",
            p.s - 1,
            capacity(p.d as u32)
        )));
    }
    let graph = Graph::book(p.d, p.m);
    let members = Arc::new(family.members.clone());
    let mut guessers = Vec::with_capacity(p.d + p.m);
    for slot in 0..p.d {
        guessers.push(Guesser::Structured(Arc::new(BookCentral {
            slot,
            params: p,
            members: members.clone(),
        })));
    }
    guessers.extend(family.members.iter().map(|f| Guesser::Table(f.clone())));
    let profile = StrategyProfile::new(p.q, guessers)?;
    profile.validate_for(&graph)?;
    Ok(BookStrategy { graph, profile })
}

/// Which survivor sets a handling check covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandlingScope {
    /// Every `(s-1)`-subset of central colorings. Handled sets stay handled
    /// under removal, so this covers every possible survivor set.
    AllSubsets,
    /// The survivor set of every outer coloring.
    AllOuter,
    /// Survivor sets of random outer colorings.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlingCheck {
    pub scope: HandlingScope,
    pub checked: u64,
    pub max_survivors: usize,
    /// A survivor set the clique cannot handle.
    pub failure: Option<Vec<Vec<Color>>>,
}

impl HandlingCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn is_exact(&self) -> bool {
        self.scope != HandlingScope::Sampled
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HandlingOptions {
    /// Cap on `C(q^d, s-1)` for the all-subsets route.
    pub subset_budget: u64,
    /// Cap on `q^m` for the all-outer route.
    pub outer_budget: u64,
    /// Outer colorings drawn otherwise.
    pub samples: u64,
}

impl Default for HandlingOptions {
    fn default() -> Self {
        HandlingOptions {
            subset_budget: 100_000,
            outer_budget: 1_000_000,
            samples: 10_000,
        }
    }
}

/// Runs the clique handler on the survivor sets the family can produce,
/// through the first route whose size fits its budget.
pub fn check_central_handling(family: &OntoFamily, opts: HandlingOptions, seed: u64) -> Result<HandlingCheck> {
    let p = family.params;
    let cells = p.cells();
    let handles = |surv: &[usize]| -> Result<Option<Vec<Vec<Color>>>> {
        let set: Vec<Vec<Color>> = surv.iter().map(|&c| decode_cell(c, &p)).collect();
        let ks = KnownSet::new(p.d, p.q, set.clone())?;
        Ok(if handle_known_set(&ks, DEFAULT_NODE_BUDGET)?.is_handled() {
            None
        } else {
            Some(set)
        })
    };

    let subsets = binomial(cells as u64, p.s as u64 - 1);
    if subsets <= BigUint::from(opts.subset_budget) {
        let mut out = HandlingCheck {
            scope: HandlingScope::AllSubsets,
            checked: 0,
            max_survivors: p.s - 1,
            failure: None,
        };
        let mut comb = Combinations::new(cells, p.s - 1);
        while comb.advance() {
            out.checked += 1;
            if let Some(set) = handles(comb.current())? {
                out.failure = Some(set);
                break;
            }
        }
        return Ok(out);
    }

    let exhaustive = checked_pow(u64::from(p.q), p.m as u64).is_some_and(|t| t <= opts.outer_budget);
    let mut out = HandlingCheck {
        scope: if exhaustive {
            HandlingScope::AllOuter
        } else {
            HandlingScope::Sampled
        },
        checked: 0,
        max_survivors: 0,
        failure: None,
    };
    let mut done: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut visit = |outer: &[Color], out: &mut HandlingCheck| -> Result<bool> {
        out.checked += 1;
        let surv = survivor_indices(&family.members, outer, cells);
        out.max_survivors = out.max_survivors.max(surv.len());
        if done.contains(&surv) {
            return Ok(true);
        }
        if let Some(set) = handles(&surv)? {
            out.failure = Some(set);
            return Ok(false);
        }
        done.insert(surv);
        Ok(true)
    };
    let mut outer = alloc::vec![0; p.m];
    if exhaustive {
        while visit(&outer, &mut out)? && advance(&mut outer, p.q) {}
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..opts.samples {
            for h in outer.iter_mut() {
                *h = rng.random_range(0..p.q);
            }
            if !visit(&outer, &mut out)? {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    pub onto: OntoOptions,
    pub handling: HandlingOptions,
    /// Cap on `q^(d+m')` for the end-to-end spot check.
    pub spot_budget: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            onto: OntoOptions {
                require_exact: true,
                ..OntoOptions::default()
            },
            handling: HandlingOptions::default(),
            spot_budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpotCheck {
    /// The book strategy on the first `m` members won an exhaustive sweep.
    Winning { m: usize },
    /// No prefix of the family small enough to sweep verified exactly.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedQ {
    pub d: usize,
    pub m_available: usize,
    pub q: Color,
    /// The witness family for `q` (absent when `q = 1`).
    pub family: Option<OntoFamily>,
    pub handling: Option<HandlingCheck>,
    pub spot_check: SpotCheck,
}

/// Largest `q` for which an exactly verified onto family with `m_available`
/// members exists and the clique handles every survivor set it produces.
///
/// For each `q` the threshold is `s = min(capacity(d) + 1, q^d)`. The search
/// stops at the first `q` that fails or exceeds a budget, or once `s < q`.
pub fn certified_q(d: usize, m_available: usize, seed: u64, opts: CertifyOptions) -> Result<CertifiedQ> {
    if d == 0 {
        return Err(HatError::invalid("certified_q needs d >= 1"));
    }
    let cap = capacity(d as u32).to_usize().unwrap_or(usize::MAX);
    let mut best = CertifiedQ {
        d,
        m_available,
        q: 1,
        family: None,
        handling: None,
        spot_check: SpotCheck::Skipped,
    };
    if m_available == 0 {
        return Ok(best);
    }
    for q in 2..=64u32 {
        let cells = match checked_pow(u64::from(q), d as u64) {
            Some(c) if c <= 1 << 24 => c as usize,
            _ => break,
        };
        let s = cells.min(cap.saturating_add(1));
        if s < q as usize {
            break;
        }
        let params = BookParameters::new(d, q, m_available, s)?;
        let family = match build_onto_family(params, seed ^ u64::from(q) << 32, opts.onto) {
            Ok(f) if f.verification.is_exact() => f,
            Ok(_) | Err(HatError::Contract(_)) | Err(HatError::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        };
        let handling = check_central_handling(&family, opts.handling, seed ^ u64::from(q))?;
        if !handling.passed() {
            break;
        }
        best.q = q;
        best.family = Some(family);
        best.handling = Some(handling);
    }
    if let Some(family) = &best.family {
        best.spot_check = spot_check(family, opts)?;
    }
    Ok(best)
}

/// Trims the family to the longest prefix that still fits an exhaustive
/// sweep, re-verifies the prefix exactly and sweeps the resulting strategy.
fn spot_check(family: &OntoFamily, opts: CertifyOptions) -> Result<SpotCheck> {
    let p = family.params;
    let mut m_trim = p.m;
    while m_trim > 0 && checked_pow(u64::from(p.q), (p.d + m_trim) as u64).is_none_or(|t| t > opts.spot_budget) {
        m_trim -= 1;
    }
    while m_trim > 0 {
        let params = BookParameters { m: m_trim, ..p };
        let members = family.members[..m_trim].to_vec();
        let check = verify_onto_family(
            &params,
            &members,
            OntoMode::Auto {
                budget: opts.onto.budget,
                samples: 0,
                seed: 0,
            },
        )?;
        if check.passed() && check.verification.is_exact() {
            let trimmed = OntoFamily {
                params,
                members,
                verification: check.verification,
            };
            let strat = construct_book_strategy(&trimmed)?;
            let outcome = crate::verify(&strat.graph, &strat.profile, VerifyMode::Exhaustive, opts.spot_budget)?;
            return match outcome {
                crate::VerifyOutcome::Winning => Ok(SpotCheck::Winning { m: m_trim }),
                other => Err(HatError::Contradiction(format!(
                    "verified book strategy with m={m_trim} lost: {other:?}"
                ))),
            };
        }
        m_trim -= 1;
    }
    Ok(SpotCheck::Skipped)
}
