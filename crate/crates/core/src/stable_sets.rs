//! Stable matchings, farsighted stable sets and DEM farsighted stable sets.
//!
//! A farsighted stable set `V` is internally stable (no member indirectly
//! dominates another) and externally stable (every matching outside `V` is
//! indirectly dominated by a member). A DEM set replaces internal stability by
//! deterrence of external deviations and minimality.
//!
//! All queries go through a [`Context`], which caches one dominance row per
//! member over the whole matching space.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::{OnceCell, RefCell};
use core::fmt;

use crate::bits::BitSet;
use crate::blocking::{is_individually_rational, is_stable, minimal_enforcing_coalitions, BlockMode, BlockWitness};
use crate::dominance::{
    decide_rational, elementary_search, has_matched_block, indirectly_dominates, matched_blocks_of, DominancePath,
    DominanceVerdict, Oracle, Policy,
};
use crate::enumeration::{count_matchings, enumerate_ir_matchings, enumerate_matchings, Codec, MatchingCode};
use crate::market::Market;
use crate::matching::{preferring, Agent, Coalition, Matching};

/// Largest matching space a [`Context`] scans by default.
pub const DEFAULT_SPACE_LIMIT: u128 = 20_000_000;
/// Largest set whose minimality is checked.
pub const MINIMALITY_CAP: usize = 20;
/// Largest candidate pool for set searches.
pub const POOL_CAP: usize = 128;
/// Default number of subsets (or search nodes) a set search may examine.
pub const DEFAULT_SUBSET_BUDGET: u64 = 1 << 22;

const LISTING_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetError {
    EmptySet,
    SpaceTooLarge(u128),
    PoolTooLarge(usize),
    MinimalityCap(usize),
}

impl fmt::Display for SetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetError::EmptySet => f.write_str("the set is empty"),
            SetError::SpaceTooLarge(n) => write!(f, "matching space has {n} elements, above the scan limit"),
            SetError::PoolTooLarge(n) => write!(f, "candidate pool has {n} matchings, above the limit of {POOL_CAP}"),
            SetError::MinimalityCap(n) => {
                write!(f, "set has {n} matchings; minimality is checked up to {MINIMALITY_CAP}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Farsighted,
    Dem,
}

/// Which matchings of the space it dominates, and which it could not decide.
#[derive(Clone, Debug)]
pub struct Row {
    pub dominated: BitSet,
    pub unknown: BitSet,
}

/// A market plus cached dominance rows.
pub struct Context<'a> {
    market: &'a Market,
    policy: Policy,
    codec: Codec,
    count: usize,
    oracle: OnceCell<Option<Oracle<'a>>>,
    rows: RefCell<BTreeMap<Matching, Rc<Row>>>,
}

impl<'a> Context<'a> {
    pub fn new(market: &'a Market, policy: Policy) -> Result<Self, SetError> {
        Self::with_limit(market, policy, DEFAULT_SPACE_LIMIT)
    }

    /// `limit` bounds the number of matchings a row scan may visit.
    pub fn with_limit(market: &'a Market, policy: Policy, limit: u128) -> Result<Self, SetError> {
        let count = count_matchings(market);
        if count > limit {
            return Err(SetError::SpaceTooLarge(count));
        }
        Ok(Context {
            market,
            policy,
            codec: Codec::new(market),
            count: count as usize,
            oracle: OnceCell::new(),
            rows: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn market(&self) -> &'a Market {
        self.market
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// Number of matchings in the space.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn code(&self, m: &Matching) -> usize {
        self.codec.encode(m).0 as usize
    }

    pub fn decode(&self, code: usize) -> Matching {
        self.codec
            .decode(self.market, MatchingCode(code as u128))
            .expect("code below the space size")
    }

    fn oracle(&self) -> Option<&Oracle<'a>> {
        self.oracle
            .get_or_init(|| Oracle::with_cap(self.market, self.policy.exhaustive_cap).ok())
            .as_ref()
    }

    /// Everything `mu` indirectly dominates, by code.
    pub fn row(&self, mu: &Matching) -> Rc<Row> {
        if let Some(r) = self.rows.borrow().get(mu) {
            return r.clone();
        }
        let n = self.count;
        let mut unknown = BitSet::new(n);
        let dominated = if is_individually_rational(self.market, mu) {
            let mut d = BitSet::new(n);
            for (i, nu) in enumerate_matchings(self.market).enumerate() {
                if &nu != mu && !has_matched_block(self.market, mu, &nu) {
                    d.insert(i);
                }
            }
            d
        } else if let Some(oracle) = self.oracle() {
            oracle.dominated_by(mu)
        } else {
            let mut d = BitSet::new(n);
            for (i, nu) in enumerate_matchings(self.market).enumerate() {
                if &nu == mu || has_matched_block(self.market, mu, &nu) {
                    continue;
                }
                if elementary_search(self.market, mu, &nu, self.policy.scan_budget).is_some() {
                    d.insert(i);
                } else {
                    unknown.insert(i);
                }
            }
            d
        };
        let row = Rc::new(Row { dominated, unknown });
        self.rows.borrow_mut().insert(mu.clone(), row.clone());
        row
    }

    /// `a >> b`, `None` when undecided.
    pub fn dominates(&self, a: &Matching, b: &Matching) -> Option<bool> {
        let row = self.row(a);
        let code = self.code(b);
        if row.dominated.contains(code) {
            Some(true)
        } else if row.unknown.contains(code) {
            None
        } else {
            Some(false)
        }
    }

    /// A verdict with certificate for `a >> b`.
    pub fn certify(&self, a: &Matching, b: &Matching) -> DominanceVerdict {
        if a == b {
            return DominanceVerdict::Refuted(None);
        }
        if is_individually_rational(self.market, a) {
            return decide_rational(self.market, a, b);
        }
        if let Some(oracle) = self.oracle() {
            return match oracle.path(a, b) {
                Some(p) => DominanceVerdict::Dominates(p),
                None => DominanceVerdict::Refuted(matched_blocks_of(self.market, a, b).first().copied()),
            };
        }
        indirectly_dominates(self.market, a, b, &self.policy)
    }

    /// Sorted by code, duplicates removed.
    fn normalize(&self, set: &[Matching]) -> Result<Vec<Matching>, SetError> {
        if set.is_empty() {
            return Err(SetError::EmptySet);
        }
        let mut v: Vec<(usize, Matching)> = set.iter().map(|m| (self.code(m), m.clone())).collect();
        v.sort_by_key(|(c, _)| *c);
        v.dedup_by_key(|(c, _)| *c);
        Ok(v.into_iter().map(|(_, m)| m).collect())
    }
}

/// `set[dominator] >> set[dominated]`, with its path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalViolation {
    pub dominator: usize,
    pub dominated: usize,
    pub path: Option<DominancePath>,
}

/// `set[dominator]` does not indirectly dominate `set[dominated]`; the
/// witnesses are the blocks of the former that the latter locks in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDominance {
    pub dominator: usize,
    pub dominated: usize,
    pub witnesses: Vec<BlockWitness>,
}

/// A deviation from `set[member]` to `deviation` by a minimal coalition that
/// no member of the set deters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterrenceFailure {
    pub member: usize,
    pub deviation: Matching,
    pub coalition: Coalition,
}

/// `set[deterrer] >> deviation` while `unmoved`, a member of `coalition`, does
/// not prefer `set[deterrer]` to `set[member]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deterrence {
    pub member: usize,
    pub deviation: Matching,
    pub coalition: Coalition,
    pub deterrer: usize,
    pub unmoved: Agent,
    pub path: Option<DominancePath>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSetReport {
    pub condition: Condition,
    pub set: Vec<Matching>,
    pub verdict: Verdict,
    pub internal_violations: Vec<InternalViolation>,
    pub internal_non_dominance: Vec<NonDominance>,
    /// First uncovered matchings, in code order.
    pub external_uncovered: Vec<Matching>,
    pub external_uncovered_count: usize,
    pub external_checked: usize,
    /// Pairs `(member, matching)` whose dominance stayed undecided (listing capped).
    pub undecided: Vec<(usize, Matching)>,
    pub undecided_count: usize,
    pub deterrence_failures: Vec<DeterrenceFailure>,
    pub deterrence_witnesses: Vec<Deterrence>,
    /// A proper subset that also satisfies deterrence and external stability.
    pub minimality_witness: Option<Vec<Matching>>,
}

impl StableSetReport {
    fn new(condition: Condition, set: Vec<Matching>) -> Self {
        StableSetReport {
            condition,
            set,
            verdict: Verdict::Unknown,
            internal_violations: Vec::new(),
            internal_non_dominance: Vec::new(),
            external_uncovered: Vec::new(),
            external_uncovered_count: 0,
            external_checked: 0,
            undecided: Vec::new(),
            undecided_count: 0,
            deterrence_failures: Vec::new(),
            deterrence_witnesses: Vec::new(),
            minimality_witness: None,
        }
    }

    fn note_undecided(&mut self, member: usize, m: impl FnOnce() -> Matching) {
        self.undecided_count += 1;
        if self.undecided.len() < LISTING_CAP {
            self.undecided.push((member, m()));
        }
    }

    fn settle(&mut self) {
        let failed = !self.internal_violations.is_empty()
            || self.external_uncovered_count > 0
            || !self.deterrence_failures.is_empty()
            || self.minimality_witness.is_some();
        self.verdict = if self.undecided_count > 0 {
            Verdict::Unknown
        } else if failed {
            Verdict::Fails
        } else {
            Verdict::Holds
        };
    }
}

/// Stable matchings in code order.
pub fn stable_matchings(market: &Market, mode: BlockMode) -> Vec<Matching> {
    enumerate_matchings(market)
        .filter(|m| is_stable(market, m, mode))
        .collect()
}

/// Matchings `mu` such that `{mu}` is a farsighted stable set: exactly the
/// stable ones.
pub fn singleton_fss(market: &Market) -> Vec<Matching> {
    let out = stable_matchings(market, BlockMode::Extended);
    #[cfg(debug_assertions)]
    if count_matchings(market) <= 5000 {
        if let Ok(ctx) = Context::new(market, Policy::default()) {
            for m in &out {
                debug_assert_eq!(
                    verify_fss(&ctx, core::slice::from_ref(m)).map(|r| r.verdict),
                    Ok(Verdict::Holds)
                );
            }
        }
    }
    out
}

/// Checks internal and external stability of `set`.
pub fn verify_fss(ctx: &Context<'_>, set: &[Matching]) -> Result<StableSetReport, SetError> {
    let set = ctx.normalize(set)?;
    let rows: Vec<Rc<Row>> = set.iter().map(|m| ctx.row(m)).collect();
    let codes: Vec<usize> = set.iter().map(|m| ctx.code(m)).collect();
    let mut report = StableSetReport::new(Condition::Farsighted, set.clone());
    for (a, row) in rows.iter().enumerate() {
        for (b, &code) in codes.iter().enumerate() {
            if a == b {
                continue;
            }
            if row.dominated.contains(code) {
                report.internal_violations.push(InternalViolation {
                    dominator: a,
                    dominated: b,
                    path: ctx.certify(&set[a], &set[b]).path().cloned(),
                });
            } else if row.unknown.contains(code) {
                report.note_undecided(a, || set[b].clone());
            } else {
                report.internal_non_dominance.push(NonDominance {
                    dominator: a,
                    dominated: b,
                    witnesses: matched_blocks_of(ctx.market, &set[a], &set[b]),
                });
            }
        }
    }
    scan_external(ctx, &codes, &rows, Pool::All, &mut report);
    report.settle();
    Ok(report)
}

fn in_universe(ctx: &Context<'_>, universe: Pool, m: &Matching) -> bool {
    universe == Pool::All || is_individually_rational(ctx.market, m)
}

fn scan_external(ctx: &Context<'_>, codes: &[usize], rows: &[Rc<Row>], universe: Pool, report: &mut StableSetReport) {
    let members: BitSet = {
        let mut b = BitSet::new(ctx.count);
        for &c in codes {
            b.insert(c);
        }
        b
    };
    for code in 0..ctx.count {
        if members.contains(code) || (universe != Pool::All && !in_universe(ctx, universe, &ctx.decode(code))) {
            continue;
        }
        report.external_checked += 1;
        if rows.iter().any(|r| r.dominated.contains(code)) {
            continue;
        }
        if let Some(i) = rows.iter().position(|r| r.unknown.contains(code)) {
            report.note_undecided(i, || ctx.decode(code));
            continue;
        }
        report.external_uncovered_count += 1;
        if report.external_uncovered.len() < LISTING_CAP {
            report.external_uncovered.push(ctx.decode(code));
        }
    }
}

/// Requirement on a subset `S` of an indexed family: when `member` (if any)
/// is in `S` and `outside` (if any) is not, `S` must meet `mask`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Requirement {
    member: Option<u8>,
    outside: Option<u8>,
    mask: u128,
}

impl Requirement {
    fn holds(&self, s: u128) -> bool {
        let applies = self.member.is_none_or(|i| s >> i & 1 == 1) && self.outside.is_none_or(|j| s >> j & 1 == 0);
        !applies || self.mask & s != 0
    }
}

fn all_hold(reqs: &[Requirement], s: u128) -> bool {
    reqs.iter().all(|r| r.holds(s))
}

/// Deterrence and external-stability requirements over `family`, for
/// deviations and outside matchings drawn from `universe`.
///
/// Deterrence: for each member `i`, each other matching `nu` and each minimal
/// coalition `T` enforcing `nu` over `i`, some member dominating `nu` must not
/// be preferred to `i` by every agent of `T` (when `nu` is outside the subset).
/// External stability: each matching outside the subset must be dominated by
/// a member. `visit` sees every requirement as `(i, nu, T, mask)`; `i` is
/// `None` for external stability.
fn dem_requirements(
    ctx: &Context<'_>,
    family: &[Matching],
    rows: &[Rc<Row>],
    universe: Pool,
    mut visit: impl FnMut(Option<usize>, &Matching, Option<Coalition>, u128),
) -> (Vec<Requirement>, bool) {
    let market = ctx.market;
    let position: BTreeMap<usize, u8> = family.iter().enumerate().map(|(i, m)| (ctx.code(m), i as u8)).collect();
    let mut reqs = BTreeSet::new();
    let mut undecided = false;
    for (code, nu) in enumerate_matchings(market).enumerate() {
        if !in_universe(ctx, universe, &nu) {
            continue;
        }
        let outside = position.get(&code).copied();
        let dominators: u128 = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.dominated.contains(code))
            .fold(0, |acc, (a, _)| acc | 1 << a);
        undecided |= rows.iter().any(|r| r.unknown.contains(code));
        reqs.insert(Requirement {
            member: None,
            outside,
            mask: dominators,
        });
        visit(None, &nu, None, dominators);
        for (i, mu) in family.iter().enumerate() {
            if outside == Some(i as u8) {
                continue;
            }
            for t in minimal_enforcing_coalitions(market, mu, &nu).unwrap_or_default() {
                let mut mask = 0u128;
                for (a, member) in family.iter().enumerate() {
                    if dominators >> a & 1 == 1 && !t.is_subset(&preferring(market, member, mu)) {
                        mask |= 1 << a;
                    }
                }
                reqs.insert(Requirement {
                    member: Some(i as u8),
                    outside,
                    mask,
                });
                visit(Some(i), &nu, Some(t), mask);
            }
        }
    }
    (reqs.into_iter().collect(), undecided)
}

/// Checks deterrence of external deviations, external stability and
/// minimality of `set`, with deviations and outside matchings drawn from
/// `universe`. With `witnesses`, every deterred deviation is listed with a
/// member that deters it.
pub fn verify_dem(
    ctx: &Context<'_>,
    set: &[Matching],
    universe: Pool,
    witnesses: bool,
) -> Result<StableSetReport, SetError> {
    let set = ctx.normalize(set)?;
    if set.len() > MINIMALITY_CAP {
        return Err(SetError::MinimalityCap(set.len()));
    }
    let rows: Vec<Rc<Row>> = set.iter().map(|m| ctx.row(m)).collect();
    let codes: Vec<usize> = set.iter().map(|m| ctx.code(m)).collect();
    let mut report = StableSetReport::new(Condition::Dem, set.clone());
    let mut failures = Vec::new();
    let mut deterred = Vec::new();
    let member_codes: BTreeSet<usize> = codes.iter().copied().collect();
    let (reqs, undecided) = dem_requirements(ctx, &set, &rows, universe, |i, nu, t, mask| {
        let (Some(i), Some(t)) = (i, t) else { return };
        if member_codes.contains(&ctx.code(nu)) {
            return;
        }
        if mask == 0 {
            failures.push(DeterrenceFailure {
                member: i,
                deviation: nu.clone(),
                coalition: t,
            });
        } else if witnesses {
            deterred.push((i, nu.clone(), t, mask.trailing_zeros() as usize));
        }
    });
    report.deterrence_failures = failures;
    for (member, deviation, coalition, deterrer) in deterred {
        let unmoved = coalition
            .agents()
            .find(|a| !a.prefers(ctx.market, &set[deterrer], &set[member]))
            .expect("mask excludes members preferred by the whole coalition");
        let path = ctx.certify(&set[deterrer], &deviation).path().cloned();
        report.deterrence_witnesses.push(Deterrence {
            member,
            deviation,
            coalition,
            deterrer,
            unmoved,
            path,
        });
    }
    scan_external(ctx, &codes, &rows, universe, &mut report);
    let full: u128 = (1u128 << set.len()) - 1;
    report.minimality_witness = (1..full)
        .filter(|&s| all_hold(&reqs, s))
        .min_by_key(|s| s.count_ones())
        .map(|s| members_of(&set, s));
    if undecided && report.undecided_count == 0 {
        report.undecided_count = 1;
    }
    report.settle();
    Ok(report)
}

fn members_of(pool: &[Matching], mask: u128) -> Vec<Matching> {
    (0..pool.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| pool[i].clone())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pool {
    IndividuallyRational,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Sweep when the subset count fits the budget, otherwise kernel search.
    Auto,
    /// Every subset by cardinality, then lexicographically by code.
    Sweep,
    /// Branching search for independent sets meeting every cover requirement.
    Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub pool: Pool,
    pub max_size: Option<usize>,
    /// Skip cardinality two in sweeps: no such set is ever farsighted stable.
    pub prune_pairs: bool,
    pub budget: u64,
    pub strategy: Strategy,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            pool: Pool::IndividuallyRational,
            max_size: None,
            prune_pairs: true,
            budget: DEFAULT_SUBSET_BUDGET,
            strategy: Strategy::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSearch {
    /// By cardinality, then lexicographically by code.
    pub sets: Vec<Vec<Matching>>,
    pub pool_size: usize,
    /// False when the budget ran out or some dominance stayed undecided.
    pub complete: bool,
    pub budget_exhausted: bool,
    pub undecided: bool,
    pub examined: u64,
    pub strategy: Strategy,
}

fn pool_of(ctx: &Context<'_>, pool: Pool) -> Result<Vec<Matching>, SetError> {
    let members: Vec<Matching> = match pool {
        Pool::IndividuallyRational => enumerate_ir_matchings(ctx.market).take(POOL_CAP + 1).collect(),
        Pool::All => {
            if ctx.count > POOL_CAP {
                return Err(SetError::PoolTooLarge(ctx.count));
            }
            enumerate_matchings(ctx.market).collect()
        }
    };
    if members.len() > POOL_CAP {
        let total = enumerate_ir_matchings(ctx.market).count();
        return Err(SetError::PoolTooLarge(total));
    }
    Ok(members)
}

/// Dominance among pool members and covers of matchings outside the pool.
struct PoolGraph {
    members: Vec<Matching>,
    /// `out[a]`: members `a` dominates.
    out: Vec<u128>,
    /// `into[b]`: members dominating `b`.
    into: Vec<u128>,
    /// Inclusion-minimal sets of members dominating some outside matching.
    covers: Vec<u128>,
    undecided: bool,
}

impl PoolGraph {
    fn build(ctx: &Context<'_>, members: Vec<Matching>) -> Self {
        let p = members.len();
        let rows: Vec<Rc<Row>> = members.iter().map(|m| ctx.row(m)).collect();
        let codes: Vec<usize> = members.iter().map(|m| ctx.code(m)).collect();
        let mut out = vec![0u128; p];
        let mut into = vec![0u128; p];
        let mut undecided = false;
        for a in 0..p {
            for b in 0..p {
                if rows[a].dominated.contains(codes[b]) {
                    out[a] |= 1 << b;
                    into[b] |= 1 << a;
                }
                undecided |= rows[a].unknown.contains(codes[b]);
            }
        }
        let in_pool: BTreeSet<usize> = codes.iter().copied().collect();
        let mut masks = BTreeSet::new();
        for code in (0..ctx.count).filter(|c| !in_pool.contains(c)) {
            let mask = (0..p)
                .filter(|&a| rows[a].dominated.contains(code))
                .fold(0u128, |acc, a| acc | 1 << a);
            undecided |= rows.iter().any(|r| r.unknown.contains(code));
            masks.insert(mask);
        }
        PoolGraph {
            members,
            out,
            into,
            covers: minimal_masks(masks),
            undecided,
        }
    }

    fn is_fss(&self, s: u128) -> bool {
        let p = self.members.len();
        (0..p).all(|a| {
            if s >> a & 1 == 1 {
                self.out[a] & s == 0
            } else {
                self.into[a] & s != 0
            }
        }) && self.covers.iter().all(|&c| c & s != 0)
    }
}

fn minimal_masks(masks: BTreeSet<u128>) -> Vec<u128> {
    let mut by_size: Vec<u128> = masks.into_iter().collect();
    by_size.sort_by_key(|m| (m.count_ones(), *m));
    let mut kept: Vec<u128> = Vec::new();
    for m in by_size {
        if !kept.iter().any(|&k| k & !m == 0) {
            kept.push(m);
        }
    }
    kept.sort();
    kept
}

fn binomial_sum(p: usize, max: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for k in 0..=max.min(p) {
        if k > 0 {
            c = c * (p - k + 1) as u128 / k as u128;
            total = total.saturating_add(c);
        }
    }
    total
}

/// Visits subsets of `0..p` with cardinality in `sizes`, by cardinality then
/// lexicographically. Returns false if `budget` ran out.
fn sweep(
    p: usize,
    sizes: impl Iterator<Item = usize>,
    budget: u64,
    examined: &mut u64,
    mut f: impl FnMut(u128),
) -> bool {
    for k in sizes {
        if k == 0 || k > p {
            continue;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if *examined >= budget {
                return false;
            }
            *examined += 1;
            f(idx.iter().fold(0u128, |acc, &i| acc | 1 << i));
            // next combination in lexicographic order
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < p - k + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    true
}

fn lex_key(s: u128) -> (u32, Vec<u32>) {
    let mut bits = Vec::new();
    let mut x = s;
    while x != 0 {
        bits.push(x.trailing_zeros());
        x &= x - 1;
    }
    (s.count_ones(), bits)
}

/// All farsighted stable sets drawn from the pool.
pub fn enumerate_fss(ctx: &Context<'_>, opts: &SearchOptions) -> Result<SetSearch, SetError> {
    let members = pool_of(ctx, opts.pool)?;
    let graph = PoolGraph::build(ctx, members);
    let p = graph.members.len();
    let max = opts.max_size.unwrap_or(p).min(p);
    let strategy = match opts.strategy {
        Strategy::Auto if binomial_sum(p, max) <= opts.budget as u128 => Strategy::Sweep,
        Strategy::Auto => Strategy::Kernel,
        s => s,
    };
    let mut found = Vec::new();
    let mut examined = 0u64;
    let finished = match strategy {
        Strategy::Sweep => {
            let sizes = (1..=max).filter(|&k| !(opts.prune_pairs && k == 2));
            sweep(p, sizes, opts.budget, &mut examined, |s| {
                if graph.is_fss(s) {
                    found.push(s);
                }
            })
        }
        _ => {
            let mut kernel = Kernel {
                graph: &graph,
                max,
                budget: opts.budget,
                examined: 0,
                found: Vec::new(),
            };
            let finished = kernel.run(0, full_mask(p));
            examined = kernel.examined;
            found = kernel.found;
            finished
        }
    };
    found.sort_by_key(|&s| lex_key(s));
    Ok(SetSearch {
        sets: found.into_iter().map(|s| members_of(&graph.members, s)).collect(),
        pool_size: p,
        complete: finished && !graph.undecided,
        budget_exhausted: !finished,
        undecided: graph.undecided,
        examined,
        strategy,
    })
}

fn full_mask(p: usize) -> u128 {
    if p == 128 {
        u128::MAX
    } else {
        (1u128 << p) - 1
    }
}

/// Enumerates independent sets of the dominance graph that meet every
/// requirement: each member's closed in-neighbourhood and each outside cover.
/// Branches on the unmet requirement with the fewest candidates; a candidate
/// excludes the ones before it, so each set is produced once.
struct Kernel<'g> {
    graph: &'g PoolGraph,
    max: usize,
    budget: u64,
    examined: u64,
    found: Vec<u128>,
}

impl Kernel<'_> {
    fn run(&mut self, chosen: u128, available: u128) -> bool {
        if self.examined >= self.budget {
            return false;
        }
        self.examined += 1;
        let g = self.graph;
        let p = g.members.len();
        let closed = (0..p).map(|v| g.into[v] | 1 << v);
        let mut best: Option<u128> = None;
        for req in closed.chain(g.covers.iter().copied()) {
            if req & chosen != 0 {
                continue;
            }
            let cand = req & available;
            if best.is_none_or(|b| cand.count_ones() < b.count_ones()) {
                best = Some(cand);
                if cand == 0 {
                    break;
                }
            }
        }
        let Some(mut cand) = best else {
            self.found.push(chosen);
            return true;
        };
        if chosen.count_ones() as usize >= self.max {
            return true;
        }
        let mut available = available;
        while cand != 0 {
            let a = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let bit = 1u128 << a;
            let next = available & !bit & !g.out[a] & !g.into[a];
            if !self.run(chosen | bit, next) {
                return false;
            }
            available &= !bit;
        }
        true
    }
}

/// All DEM farsighted stable sets drawn from the pool, by sweep. Deviations
/// and outside matchings are drawn from the pool as well.
pub fn enumerate_dem(ctx: &Context<'_>, opts: &SearchOptions) -> Result<SetSearch, SetError> {
    let members = pool_of(ctx, opts.pool)?;
    let p = members.len();
    let rows: Vec<Rc<Row>> = members.iter().map(|m| ctx.row(m)).collect();
    let (reqs, undecided) = dem_requirements(ctx, &members, &rows, opts.pool, |_, _, _, _| {});
    let max = opts.max_size.unwrap_or(p).min(p);
    let mut satisfying: Vec<u128> = Vec::new();
    let mut found = Vec::new();
    let mut examined = 0u64;
    let finished = sweep(p, 1..=max, opts.budget, &mut examined, |s| {
        if all_hold(&reqs, s) {
            if !satisfying.iter().any(|&t| t & !s == 0) {
                found.push(s);
            }
            satisfying.push(s);
        }
    });
    found.sort_by_key(|&s| lex_key(s));
    Ok(SetSearch {
        sets: found.into_iter().map(|s| members_of(&members, s)).collect(),
        pool_size: p,
        complete: finished && !undecided,
        budget_exhausted: !finished,
        undecided,
        examined,
        strategy: Strategy::Sweep,
    })
}
