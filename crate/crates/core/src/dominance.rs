//! Indirect dominance: `mu >> nu` when some sequence of enforceable moves leads
//! from `nu` to `mu` and every moving coalition strictly prefers `mu` to the
//! matching it moves from.
//!
//! For an individually rational dominator the relation is decided exactly by
//! [`matched_blocks_of`]: `mu >> nu` iff no agent is locked into an outcome at
//! `nu` that beats `mu` for it. Otherwise the decision falls back to a cheap
//! path search and then to exhaustive reachability over the matching space.

mod oracle;
mod search;

use alloc::vec::Vec;
use core::fmt;

use crate::blocking::{enforcing_within, is_individually_rational, BlockWitness};
use crate::enumeration::count_matchings;
use crate::market::{HospitalId, Market, Member, Slot, SlotPair};
use crate::matching::{preferring, Agent, Coalition, Matching};

pub use oracle::{dominance_graph, DominanceMatrix, Oracle, Relation};
pub use search::elementary_search;

/// One move: `coalition` enforces `to` over the previous matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub coalition: Coalition,
    pub to: Matching,
}

/// A certificate for `end() >> start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominancePath {
    pub start: Matching,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    NoSteps,
    NotEnforceable { step: usize },
    MemberDoesNotGain { step: usize, agent: Agent },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::NoSteps => write!(f, "path has no steps"),
            ReplayError::NotEnforceable { step } => write!(f, "step {step} is not enforceable by its coalition"),
            ReplayError::MemberDoesNotGain { step, agent } => {
                write!(f, "at step {step}, {agent:?} does not prefer the final matching")
            }
        }
    }
}

impl DominancePath {
    pub fn new(start: Matching) -> Self {
        DominancePath {
            start,
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, coalition: Coalition, to: Matching) {
        self.steps.push(Step { coalition, to });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &Matching {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }

    /// Matchings along the path, `start` first.
    pub fn matchings(&self) -> impl Iterator<Item = &Matching> {
        core::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.to))
    }

    /// Checks every step: its coalition can enforce it, and every member
    /// strictly prefers the final matching to the one the step leaves.
    pub fn replay(&self, market: &Market) -> Result<(), ReplayError> {
        if self.steps.is_empty() {
            return Err(ReplayError::NoSteps);
        }
        let end = self.end();
        let mut from = &self.start;
        for (i, step) in self.steps.iter().enumerate() {
            if !crate::blocking::can_enforce(market, from, &step.to, &step.coalition) {
                return Err(ReplayError::NotEnforceable { step: i });
            }
            if let Some(agent) = step.coalition.agents().find(|a| !a.prefers(market, end, from)) {
                return Err(ReplayError::MemberDoesNotGain { step: i, agent });
            }
            from = &step.to;
        }
        Ok(())
    }
}

/// Outcome of deciding `dominator >> dominated`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominanceVerdict {
    Dominates(DominancePath),
    /// Refuted. The witness is a block of the dominator that the dominated
    /// matching locks in; exhaustive search can refute without one.
    Refuted(Option<BlockWitness>),
    Unknown,
}

impl DominanceVerdict {
    pub fn holds(&self) -> Option<bool> {
        match self {
            DominanceVerdict::Dominates(_) => Some(true),
            DominanceVerdict::Refuted(_) => Some(false),
            DominanceVerdict::Unknown => None,
        }
    }

    pub fn path(&self) -> Option<&DominancePath> {
        match self {
            DominanceVerdict::Dominates(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Policy {
    /// Largest matching space searched exhaustively for non-IR dominators.
    pub exhaustive_cap: u128,
    /// States explored by the elementary-move search.
    pub elementary_budget: usize,
    /// Elementary-search budget per matching when a whole space is scanned.
    pub scan_budget: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            exhaustive_cap: 5000,
            elementary_budget: 20_000,
            scan_budget: 256,
        }
    }
}

/// Agents that are better off, indifferent, or worse off at `to` than at `from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreferencePartition {
    pub better: Coalition,
    pub indifferent: Coalition,
    pub worse: Coalition,
}

/// Partition of all agents by how they rank `to` against `from`.
pub fn preference_partition(market: &Market, from: &Matching, to: &Matching) -> PreferencePartition {
    let better = preferring(market, to, from);
    let worse = preferring(market, from, to);
    let indifferent = Coalition::everyone(market).difference(&better.union(&worse));
    PreferencePartition {
        better,
        indifferent,
        worse,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotIndividuallyRational;

impl fmt::Display for NotIndividuallyRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("matching is not individually rational")
    }
}

/// Simple sufficient condition for `mu >> nu` (with `mu` individually
/// rational): the matchings differ and no hospital and the couple it holds at
/// `nu` both strictly prefer `nu` to `mu`.
pub fn lemma2_sufficient(market: &Market, mu: &Matching, nu: &Matching) -> Result<bool, NotIndividuallyRational> {
    if !is_individually_rational(market, mu) {
        return Err(NotIndividuallyRational);
    }
    if mu == nu {
        return Ok(false);
    }
    let loyal = preferring(market, nu, mu);
    Ok(!nu
        .matches()
        .any(|(s, h)| loyal.contains_hospital(h) && loyal.contains_couple(s.couple())))
}

/// Blocks of `mu` that `nu` locks in.
///
/// At `nu` a hospital holding `s` is loyal if it weakly prefers `s` to its
/// outcome at `mu`; loyal hospitals never move on the way to `mu`, the others
/// can always drop their student, and with it the partner's match. A couple
/// is locked in when its outcome differs from `mu`'s and it strictly prefers,
/// to its outcome at `mu`, every position it can be left with after any of
/// its disloyal hospitals leave. The couple and its strictly loyal hospitals then block `mu` with that
/// position as target. A hospital is locked in when it prefers both its
/// outcome at `nu` and an empty position to its student at `mu`.
///
/// Any entry refutes `mu >> nu`; for individually rational `mu` an empty list
/// proves it.
pub fn matched_blocks_of(market: &Market, mu: &Matching, nu: &Matching) -> Vec<BlockWitness> {
    let mut out = Vec::new();
    locked_blocks(market, mu, nu, |w| {
        out.push(w);
        true
    });
    out
}

/// Whether [`matched_blocks_of`] is nonempty, without building the list.
pub fn has_matched_block(market: &Market, mu: &Matching, nu: &Matching) -> bool {
    let mut found = false;
    locked_blocks(market, mu, nu, |_| {
        found = true;
        false
    });
    found
}

/// Feeds each locked block to `sink` until it returns false.
fn locked_blocks(market: &Market, mu: &Matching, nu: &Matching, mut sink: impl FnMut(BlockWitness) -> bool) {
    for h in market.hospitals() {
        let at_mu = market.hospital_rank(h, mu.holder(h));
        if mu.holder(h).is_some()
            && market.hospital_rank(h, None) < at_mu
            && market.hospital_rank(h, nu.holder(h)) < at_mu
            && !sink(BlockWitness::Hospital { hospital: h })
        {
            return;
        }
    }
    for c in market.couples() {
        let target = mu.pair(c);
        let held = nu.pair(c);
        if held == target {
            continue;
        }
        let mu_rank = market.couple_rank(c, target);
        let loyalty = |member: Member| -> Loyalty {
            match held.get(member) {
                Slot::Unemployed => Loyalty::Unemployed,
                Slot::Hospital(h) => {
                    let s = c.student(member);
                    if mu.holder(h) == Some(s) {
                        Loyalty::Kept
                    } else if market.hospital_rank(h, Some(s)) < market.hospital_rank(h, mu.holder(h)) {
                        Loyalty::Strict(h)
                    } else {
                        Loyalty::Disloyal
                    }
                }
            }
        };
        let l = [loyalty(Member::First), loyalty(Member::Second)];
        let droppable = |i: usize| l[i] == Loyalty::Disloyal;
        // a hospital releasing one member may take the other match down too
        let wiped = (droppable(0) || droppable(1)) && {
            let x = SlotPair::UNEMPLOYED;
            x == target || market.couple_rank(c, x) >= mu_rank
        };
        let locked = !wiped
            && (0..4u8).all(|drop| {
                if (drop & 1 == 1 && !droppable(0)) || (drop & 2 == 2 && !droppable(1)) {
                    return true;
                }
                let mut x = held;
                if drop & 1 == 1 {
                    x.0 = Slot::Unemployed;
                }
                if drop & 2 == 2 {
                    x.1 = Slot::Unemployed;
                }
                x != target && market.couple_rank(c, x) < mu_rank
            });
        if !locked {
            continue;
        }
        let mut full = held;
        if droppable(0) {
            full.0 = Slot::Unemployed;
        }
        if droppable(1) {
            full.1 = Slot::Unemployed;
        }
        if !sink(locked_witness(c, target, full, l)) {
            return;
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Loyalty {
    Unemployed,
    /// Holds the same student as at the dominator.
    Kept,
    /// Strictly prefers its student to its outcome at the dominator.
    Strict(HospitalId),
    Disloyal,
}

fn locked_witness(c: crate::market::CoupleId, at_mu: SlotPair, full: SlotPair, l: [Loyalty; 2]) -> BlockWitness {
    let strict = |i: usize| match l[i] {
        Loyalty::Strict(h) => Some(h),
        _ => None,
    };
    match (strict(0), strict(1)) {
        (Some(_), Some(_)) => BlockWitness::Triple {
            couple: c,
            target: full,
        },
        (Some(h), None) | (None, Some(h)) => {
            let member = if strict(0).is_some() {
                Member::First
            } else {
                Member::Second
            };
            if full.get(member.other()) == at_mu.get(member.other()) {
                BlockWitness::Single {
                    couple: c,
                    member,
                    hospital: h,
                    target: full,
                }
            } else {
                BlockWitness::Partial {
                    couple: c,
                    member,
                    hospital: h,
                    target: full,
                }
            }
        }
        (None, None) => BlockWitness::Unmatch {
            couple: c,
            target: full,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathError {
    SameMatching,
    NotIndividuallyRational,
    /// Some agent is locked into an outcome it prefers to the target.
    Blocked,
}

/// Builds a path certifying `mu >> nu` for individually rational `mu`.
///
/// From each matching the path first tries to jump straight to `mu`.
/// Otherwise every match absent from `mu` that one of its sides would leave
/// (because that side prefers `mu`) is destroyed, and the loop repeats. A
/// couple that loses a match to a hospital and still does not want `mu` loses
/// its other match as well.
pub fn construct_dominance_path(market: &Market, mu: &Matching, nu: &Matching) -> Result<DominancePath, PathError> {
    if mu == nu {
        return Err(PathError::SameMatching);
    }
    if !is_individually_rational(market, mu) {
        return Err(PathError::NotIndividuallyRational);
    }
    let mut path = DominancePath::new(nu.clone());
    let mut cur = nu.clone();
    loop {
        let gainers = preferring(market, mu, &cur);
        if let Some(t) = enforcing_within(market, &cur, mu, gainers) {
            path.push(t, mu.clone());
            return Ok(path);
        }
        let mut next = cur.clone();
        let mut t = Coalition::EMPTY;
        let mut released = Coalition::EMPTY;
        for (s, h) in cur.matches() {
            if mu.contains_match(s, h) {
                continue;
            }
            let c = s.couple();
            if gainers.contains_hospital(h) {
                t.insert_hospital(h);
                next.unassign(s);
                if !gainers.contains_couple(c) {
                    released.insert_couple(c);
                }
            } else if gainers.contains_couple(c) {
                t.insert_couple(c);
                next.unassign(s);
            }
        }
        for c in market.couples().filter(|&c| released.contains_couple(c)) {
            let left = next.pair(c);
            if left == mu.pair(c) || market.couple_rank(c, mu.pair(c)) < market.couple_rank(c, left) {
                continue;
            }
            for s in c.students() {
                next.unassign(s);
            }
        }
        if t.is_empty() {
            return Err(PathError::Blocked);
        }
        path.push(t, next.clone());
        cur = next;
    }
}

/// Decides `dominator >> dominated`.
///
/// Individually rational dominators are decided exactly from
/// [`matched_blocks_of`]. For the rest a locked-in block still refutes; if
/// there is none the elementary-move search looks for a path, then the whole
/// space is searched when it is no larger than `policy.exhaustive_cap`.
pub fn indirectly_dominates(
    market: &Market,
    dominator: &Matching,
    dominated: &Matching,
    policy: &Policy,
) -> DominanceVerdict {
    if dominator == dominated {
        return DominanceVerdict::Refuted(None);
    }
    if is_individually_rational(market, dominator) {
        return decide_rational(market, dominator, dominated);
    }
    if let Some(&w) = matched_blocks_of(market, dominator, dominated).first() {
        return DominanceVerdict::Refuted(Some(w));
    }
    if let Some(path) = elementary_search(market, dominator, dominated, policy.elementary_budget) {
        return DominanceVerdict::Dominates(path);
    }
    if count_matchings(market) <= policy.exhaustive_cap {
        let oracle = Oracle::new(market);
        return match oracle.path(dominator, dominated) {
            Some(path) => DominanceVerdict::Dominates(path),
            None => DominanceVerdict::Refuted(None),
        };
    }
    DominanceVerdict::Unknown
}

/// Exact decision for an individually rational dominator.
pub(crate) fn decide_rational(market: &Market, dominator: &Matching, dominated: &Matching) -> DominanceVerdict {
    if dominator == dominated {
        return DominanceVerdict::Refuted(None);
    }
    if let Some(&w) = matched_blocks_of(market, dominator, dominated).first() {
        return DominanceVerdict::Refuted(Some(w));
    }
    match construct_dominance_path(market, dominator, dominated) {
        Ok(path) => DominanceVerdict::Dominates(path),
        // unreachable when the characterization holds; never report a false positive
        Err(_) => DominanceVerdict::Unknown,
    }
}
