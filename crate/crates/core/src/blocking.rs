//! Blocking coalitions, individual rationality, stability, enforceability and
//! direct dominance.

use alloc::vec;
use alloc::vec::Vec;

use crate::market::{CoupleId, HospitalId, Market, Member, Slot, SlotPair, StudentId};
use crate::matching::{preferring, Agent, Coalition, Matching};

/// Which two-sided blocking forms are searched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BlockMode {
    /// Triples `{h1,h2,c}` and single-hospital blocks `{h,c}` where the other
    /// partner keeps their position.
    Literal,
    /// Literal forms plus single-hospital blocks where the other partner
    /// becomes unemployed. Stability in this mode coincides with not being
    /// directly dominated.
    #[default]
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKind {
    OneSidedHospital,
    OneSidedCouple,
    TwoSidedTriple,
    TwoSidedSingle,
    ExtendedPartial,
}

/// A coalition that blocks a matching, with the assignment it moves to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockWitness {
    /// The hospital prefers an unfilled position to its student.
    Hospital { hospital: HospitalId },
    /// The couple prefers to unmatch one or both partners.
    Unmatch { couple: CoupleId, target: SlotPair },
    /// The couple moves to two new hospitals, each preferring its new student.
    Triple { couple: CoupleId, target: SlotPair },
    /// One partner moves to `hospital`; the other keeps their position.
    Single {
        couple: CoupleId,
        member: Member,
        hospital: HospitalId,
        target: SlotPair,
    },
    /// One partner moves to `hospital`; the other becomes unemployed.
    Partial {
        couple: CoupleId,
        member: Member,
        hospital: HospitalId,
        target: SlotPair,
    },
}

impl BlockWitness {
    pub fn kind(&self) -> BlockKind {
        match self {
            BlockWitness::Hospital { .. } => BlockKind::OneSidedHospital,
            BlockWitness::Unmatch { .. } => BlockKind::OneSidedCouple,
            BlockWitness::Triple { .. } => BlockKind::TwoSidedTriple,
            BlockWitness::Single { .. } => BlockKind::TwoSidedSingle,
            BlockWitness::Partial { .. } => BlockKind::ExtendedPartial,
        }
    }

    pub fn is_one_sided(&self) -> bool {
        matches!(self, BlockWitness::Hospital { .. } | BlockWitness::Unmatch { .. })
    }

    pub fn couple(&self) -> Option<CoupleId> {
        match *self {
            BlockWitness::Hospital { .. } => None,
            BlockWitness::Unmatch { couple, .. }
            | BlockWitness::Triple { couple, .. }
            | BlockWitness::Single { couple, .. }
            | BlockWitness::Partial { couple, .. } => Some(couple),
        }
    }

    /// The couple's position after the block; `None` for a hospital block.
    pub fn target(&self) -> Option<SlotPair> {
        match *self {
            BlockWitness::Hospital { .. } => None,
            BlockWitness::Unmatch { target, .. }
            | BlockWitness::Triple { target, .. }
            | BlockWitness::Single { target, .. }
            | BlockWitness::Partial { target, .. } => Some(target),
        }
    }

    pub fn coalition(&self) -> Coalition {
        let mut t = Coalition::EMPTY;
        match *self {
            BlockWitness::Hospital { hospital } => t.insert_hospital(hospital),
            BlockWitness::Unmatch { couple, .. } => t.insert_couple(couple),
            BlockWitness::Triple { couple, target } => {
                t.insert_couple(couple);
                for (_, h) in target.hospitals() {
                    t.insert_hospital(h);
                }
            }
            BlockWitness::Single { couple, hospital, .. } | BlockWitness::Partial { couple, hospital, .. } => {
                t.insert_couple(couple);
                t.insert_hospital(hospital);
            }
        }
        t
    }

    /// Re-evaluates the defining inequalities of this block at `mu`.
    pub fn replays(&self, market: &Market, mu: &Matching) -> bool {
        let gains = |c: CoupleId, target: SlotPair| {
            target.is_admissible() && market.couple_rank(c, target) < market.couple_rank(c, mu.pair(c))
        };
        let hospital_gains = |h: HospitalId, c: CoupleId, member: Member| {
            let s = c.student(member);
            market.hospital_rank(h, Some(s)) < market.hospital_rank(h, mu.holder(h))
        };
        match *self {
            BlockWitness::Hospital { hospital } => {
                mu.holder(hospital).is_some()
                    && market.hospital_rank(hospital, None) < market.hospital_rank(hospital, mu.holder(hospital))
            }
            BlockWitness::Unmatch { couple, target } => {
                let cur = mu.pair(couple);
                let allowed = [
                    SlotPair::UNEMPLOYED,
                    SlotPair(cur.0, Slot::Unemployed),
                    SlotPair(Slot::Unemployed, cur.1),
                ];
                allowed.contains(&target) && gains(couple, target)
            }
            BlockWitness::Triple { couple, target } => match (target.0, target.1) {
                (Slot::Hospital(h1), Slot::Hospital(h2)) => {
                    gains(couple, target)
                        && hospital_gains(h1, couple, Member::First)
                        && hospital_gains(h2, couple, Member::Second)
                }
                _ => false,
            },
            BlockWitness::Single {
                couple,
                member,
                hospital,
                target,
            } => {
                target == mu.pair(couple).with(member, Slot::Hospital(hospital))
                    && gains(couple, target)
                    && hospital_gains(hospital, couple, member)
            }
            BlockWitness::Partial {
                couple,
                member,
                hospital,
                target,
            } => {
                target == SlotPair::UNEMPLOYED.with(member, Slot::Hospital(hospital))
                    && gains(couple, target)
                    && hospital_gains(hospital, couple, member)
            }
        }
    }
}

/// Hospitals holding an unacceptable student and couples better off
/// unmatching one or both partners.
pub fn one_sided_blocks(market: &Market, mu: &Matching) -> Vec<BlockWitness> {
    let mut out = Vec::new();
    for h in market.hospitals() {
        let w = BlockWitness::Hospital { hospital: h };
        if w.replays(market, mu) {
            out.push(w);
        }
    }
    for c in market.couples() {
        let cur = mu.pair(c);
        let mut targets = [
            SlotPair::UNEMPLOYED,
            SlotPair(cur.0, Slot::Unemployed),
            SlotPair(Slot::Unemployed, cur.1),
        ];
        targets.sort();
        let mut last = None;
        for target in targets {
            if Some(target) == last || target == cur {
                continue;
            }
            last = Some(target);
            let w = BlockWitness::Unmatch { couple: c, target };
            if w.replays(market, mu) {
                out.push(w);
            }
        }
    }
    out
}

/// Two-sided blocks, grouped by couple; triples, then single-hospital blocks,
/// then (extended mode) partial rematches.
pub fn two_sided_blocks(market: &Market, mu: &Matching, mode: BlockMode) -> Vec<BlockWitness> {
    let mut out = Vec::new();
    for c in market.couples() {
        two_sided_blocks_of(market, mu, mode, c, &mut out);
    }
    out
}

fn two_sided_blocks_of(market: &Market, mu: &Matching, mode: BlockMode, c: CoupleId, out: &mut Vec<BlockWitness>) {
    let cur = mu.pair(c);
    for h1 in market.hospitals() {
        for h2 in market.hospitals().filter(|&h2| h2 != h1) {
            let w = BlockWitness::Triple {
                couple: c,
                target: SlotPair(Slot::Hospital(h1), Slot::Hospital(h2)),
            };
            if w.replays(market, mu) {
                out.push(w);
            }
        }
    }
    for member in [Member::First, Member::Second] {
        for h in market.hospitals() {
            let w = BlockWitness::Single {
                couple: c,
                member,
                hospital: h,
                target: cur.with(member, Slot::Hospital(h)),
            };
            if w.replays(market, mu) {
                out.push(w);
            }
        }
    }
    if mode == BlockMode::Extended {
        for member in [Member::First, Member::Second] {
            // with the partner already unemployed this is the single-hospital form
            if cur.get(member.other()).is_unemployed() {
                continue;
            }
            for h in market.hospitals() {
                let w = BlockWitness::Partial {
                    couple: c,
                    member,
                    hospital: h,
                    target: SlotPair::UNEMPLOYED.with(member, Slot::Hospital(h)),
                };
                if w.replays(market, mu) {
                    out.push(w);
                }
            }
        }
    }
}

pub fn is_individually_rational(market: &Market, mu: &Matching) -> bool {
    let hospitals_ok = mu
        .matches()
        .all(|(_, h)| market.hospital_rank(h, mu.holder(h)) < market.hospital_rank(h, None));
    hospitals_ok
        && market.couples().all(|c| {
            let cur = mu.pair(c);
            let r = market.couple_rank(c, cur);
            [
                SlotPair::UNEMPLOYED,
                SlotPair(cur.0, Slot::Unemployed),
                SlotPair(Slot::Unemployed, cur.1),
            ]
            .into_iter()
            .all(|t| t == cur || market.couple_rank(c, t) > r)
        })
}

/// `None` when `mu` is stable, otherwise the first block found (one-sided
/// blocks are reported before two-sided ones).
pub fn find_block(market: &Market, mu: &Matching, mode: BlockMode) -> Option<BlockWitness> {
    if let Some(w) = one_sided_blocks(market, mu).into_iter().next() {
        return Some(w);
    }
    let mut buf = Vec::new();
    for c in market.couples() {
        two_sided_blocks_of(market, mu, mode, c, &mut buf);
        if let Some(&w) = buf.first() {
            return Some(w);
        }
    }
    None
}

pub fn is_stable(market: &Market, mu: &Matching, mode: BlockMode) -> bool {
    find_block(market, mu, mode).is_none()
}

/// The hospital that held the partner of `s` at `from` and no longer holds
/// that partner at `to`.
fn released_partner(from: &Matching, to: &Matching, s: StudentId) -> Option<HospitalId> {
    let partner = s.couple().student(s.member().other());
    let h = from.slot(partner).hospital()?;
    (to.holder(h) != Some(partner)).then_some(h)
}

/// Whether `coalition` can move the market from `from` to `to`: every new
/// match is between members, and every match destroyed without replacement
/// has a member on at least one side, or belongs to a couple whose other
/// match was broken by a member hospital.
pub fn can_enforce(market: &Market, from: &Matching, to: &Matching, coalition: &Coalition) -> bool {
    market.hospitals().all(|h| {
        let before = from.holder(h);
        let after = to.holder(h);
        let formed_ok = match after {
            Some(s) if after != before => coalition.contains_hospital(h) && coalition.contains_couple(s.couple()),
            _ => true,
        };
        let destroyed_ok = match (before, after) {
            (Some(s), None) => {
                coalition.contains_hospital(h)
                    || coalition.contains_couple(s.couple())
                    || released_partner(from, to, s).is_some_and(|g| coalition.contains_hospital(g))
            }
            _ => true,
        };
        formed_ok && destroyed_ok
    })
}

/// Smallest canonical coalition inside `eligible` that can enforce `to` over
/// `from`, or `None` if none exists.
///
/// Both sides of every new match are required. For a match destroyed without
/// replacement, a side already required is reused, then the couple, then the
/// hospital, then the hospital releasing the partner.
pub fn enforcing_within(market: &Market, from: &Matching, to: &Matching, eligible: Coalition) -> Option<Coalition> {
    let mut forced = Coalition::EMPTY;
    for h in market.hospitals() {
        let after = to.holder(h);
        if let Some(s) = after {
            if after != from.holder(h) {
                let c = s.couple();
                if !eligible.contains_hospital(h) || !eligible.contains_couple(c) {
                    return None;
                }
                forced.insert_hospital(h);
                forced.insert_couple(c);
            }
        }
    }
    let mut t = forced;
    for h in market.hospitals() {
        if let (Some(s), None) = (from.holder(h), to.holder(h)) {
            let c = s.couple();
            let partner = released_partner(from, to, s);
            let covered = |t: &Coalition| {
                t.contains_hospital(h) || t.contains_couple(c) || partner.is_some_and(|g| t.contains_hospital(g))
            };
            if covered(&t) {
                continue;
            }
            if eligible.contains_couple(c) {
                t.insert_couple(c);
            } else if eligible.contains_hospital(h) {
                t.insert_hospital(h);
            } else {
                t.insert_hospital(partner.filter(|&g| eligible.contains_hospital(g))?);
            }
        }
    }
    Some(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SameMatching;

/// All inclusion-minimal coalitions that can enforce `to` over `from`.
///
/// Both sides of every new match are forced. The remaining destroyed matches
/// form disjoint stars around couples (a hospital has one position). A star
/// with two hospitals is covered by either of them, since each releases the
/// other's student, so its minimal covers are the couple alone or any one of
/// its hospitals; the result is the product of those choices, couples in
/// index order, couple first, then hospitals by index.
pub fn minimal_enforcing_coalitions(
    market: &Market,
    from: &Matching,
    to: &Matching,
) -> Result<Vec<Coalition>, SameMatching> {
    if from == to {
        return Err(SameMatching);
    }
    let mut forced = Coalition::EMPTY;
    for h in market.hospitals() {
        let after = to.holder(h);
        if let Some(s) = after {
            if after != from.holder(h) {
                forced.insert_hospital(h);
                forced.insert_couple(s.couple());
            }
        }
    }
    // uncovered destroyed matches, grouped by couple
    let mut stars: Vec<(CoupleId, u64)> = Vec::new();
    for h in market.hospitals() {
        if let (Some(s), None) = (from.holder(h), to.holder(h)) {
            let c = s.couple();
            if forced.contains_hospital(h)
                || forced.contains_couple(c)
                || released_partner(from, to, s).is_some_and(|g| forced.contains_hospital(g))
            {
                continue;
            }
            match stars.iter_mut().find(|(sc, _)| *sc == c) {
                Some((_, mask)) => *mask |= 1 << h.0,
                None => stars.push((c, 1 << h.0)),
            }
        }
    }
    stars.sort();
    let mut out = vec![forced];
    for &(c, hospitals) in &stars {
        let mut covers = vec![Coalition::from_agents([Agent::Couple(c)])];
        covers.extend(
            (0..64)
                .filter(|i| hospitals >> i & 1 == 1)
                .map(|i| Coalition::from_masks(1 << i, 0)),
        );
        out = out
            .iter()
            .flat_map(|t| covers.iter().map(move |x| t.union(x)))
            .collect();
    }
    Ok(out)
}

/// `dominator > dominated`: some coalition whose members all strictly prefer
/// `dominator` can enforce it over `dominated`. Returns such a coalition.
pub fn directly_dominates(market: &Market, dominator: &Matching, dominated: &Matching) -> Option<Coalition> {
    if dominator == dominated {
        return None;
    }
    let gainers = preferring(market, dominator, dominated);
    enforcing_within(market, dominated, dominator, gainers)
}

/// Agents whose own assignment differs between the two matchings.
pub fn movers(market: &Market, a: &Matching, b: &Matching) -> Coalition {
    Coalition::from_agents(
        market
            .hospitals()
            .map(Agent::Hospital)
            .chain(market.couples().map(Agent::Couple))
            .filter(|ag| !ag.indifferent(a, b)),
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::enumeration::enumerate_matchings;
    use crate::market::tests::{example1, example4};
    use crate::market::{HospitalId, StudentId};
    use alloc::vec;

    pub fn lit(market: &Market, pairs: &[(&str, &str)]) -> Matching {
        let mut m = Matching::empty(market);
        for (s, h) in pairs {
            let s = market.student_by_name(s).unwrap();
            let slot = if *h == "u" {
                Slot::Unemployed
            } else {
                Slot::Hospital(market.hospital_by_name(h).unwrap())
            };
            m.assign(s, slot);
        }
        m
    }

    fn h(m: &Market, n: &str) -> HospitalId {
        m.hospital_by_name(n).unwrap()
    }

    fn coalition(market: &Market, names: &[&str]) -> Coalition {
        Coalition::from_agents(names.iter().map(|n| {
            market
                .hospital_by_name(n)
                .map(Agent::Hospital)
                .unwrap_or_else(|| Agent::Couple(market.couple_by_name(n).unwrap()))
        }))
    }

    pub fn ex1_named(m: &Market) -> [Matching; 4] {
        [
            lit(m, &[("s1", "h3"), ("s2", "h1")]),
            lit(m, &[("s1", "h1"), ("s2", "h2")]),
            lit(m, &[("s3", "h2"), ("s4", "h3")]),
            lit(m, &[("s1", "h2"), ("s2", "h3")]),
        ]
    }

    pub fn ex4_named(m: &Market) -> [Matching; 3] {
        [
            lit(m, &[("s1", "h1"), ("s2", "h2")]),
            lit(m, &[("s3", "h2")]),
            lit(m, &[("s3", "h1")]),
        ]
    }

    #[test]
    fn one_sided_examples() {
        let m = example1();
        let blocks = one_sided_blocks(&m, &lit(&m, &[("s1", "h3")]));
        assert_eq!(
            blocks,
            vec![BlockWitness::Unmatch {
                couple: CoupleId(0),
                target: SlotPair::UNEMPLOYED
            }]
        );
        let [_, _, _, mu4] = ex1_named(&m);
        assert!(one_sided_blocks(&m, &mu4).is_empty());
        for market in [example1(), example4()] {
            assert!(one_sided_blocks(&market, &Matching::empty(&market)).is_empty());
        }
    }

    #[test]
    fn two_sided_example1() {
        let m = example1();
        let [mu1, ..] = ex1_named(&m);
        let blocks = two_sided_blocks(&m, &mu1, BlockMode::Literal);
        assert!(blocks.contains(&BlockWitness::Triple {
            couple: CoupleId(1),
            target: SlotPair(Slot::Hospital(h(&m, "h2")), Slot::Hospital(h(&m, "h3"))),
        }));
        for b in &blocks {
            assert!(b.replays(&m, &mu1));
        }
    }

    #[test]
    fn individual_rationality_examples() {
        let m = example4();
        let [mu1, ..] = ex4_named(&m);
        assert!(is_individually_rational(&m, &mu1));
        assert!(!is_individually_rational(&m, &lit(&m, &[("s1", "h1")])));
        assert!(is_individually_rational(&m, &Matching::empty(&m)));
    }

    #[test]
    fn example1_unique_stable() {
        let m = example1();
        let [_, _, _, mu4] = ex1_named(&m);
        for mode in [BlockMode::Literal, BlockMode::Extended] {
            let stable: Vec<_> = enumerate_matchings(&m).filter(|x| is_stable(&m, x, mode)).collect();
            assert_eq!(stable, vec![mu4.clone()]);
        }
    }

    #[test]
    fn example4_no_stable() {
        let m = example4();
        for mode in [BlockMode::Literal, BlockMode::Extended] {
            assert_eq!(enumerate_matchings(&m).filter(|x| is_stable(&m, x, mode)).count(), 0);
        }
    }

    #[test]
    fn enforce_examples() {
        let m = example1();
        let [mu1, ..] = ex1_named(&m);
        let mut after = mu1.clone();
        after.unassign(StudentId(0));
        assert!(can_enforce(&m, &mu1, &after, &coalition(&m, &["h3"])));
        assert!(!can_enforce(&m, &mu1, &after, &coalition(&m, &["h1"])));
        assert!(can_enforce(&m, &mu1, &mu1, &Coalition::EMPTY));
        for x in enumerate_matchings(&m).step_by(7) {
            for y in enumerate_matchings(&m).step_by(5) {
                assert!(can_enforce(&m, &x, &y, &Coalition::everyone(&m)));
            }
        }
        let mins = minimal_enforcing_coalitions(&m, &mu1, &after).unwrap();
        assert_eq!(mins, vec![coalition(&m, &["c1"]), coalition(&m, &["h3"])]);
        assert_eq!(minimal_enforcing_coalitions(&m, &mu1, &mu1), Err(SameMatching));
    }

    #[test]
    fn forming_one_match_needs_both_sides() {
        let m = example1();
        let from = lit(&m, &[("s3", "h2")]);
        let to = lit(&m, &[("s3", "h2"), ("s1", "h1")]);
        assert_eq!(
            minimal_enforcing_coalitions(&m, &from, &to).unwrap(),
            vec![coalition(&m, &["h1", "c1"])]
        );
    }

    #[test]
    fn minimal_coalitions_match_subset_search() {
        for m in [example1(), example4()] {
            let (nh, nc) = (m.hospital_count(), m.couple_count());
            let all: Vec<_> = enumerate_matchings(&m).collect();
            for a in all.iter().step_by(3) {
                for b in &all {
                    if a == b {
                        continue;
                    }
                    let works: Vec<Coalition> = (0u64..1 << nh)
                        .flat_map(|h| (0u64..1 << nc).map(move |c| Coalition::from_masks(h, c)))
                        .filter(|t| can_enforce(&m, a, b, t))
                        .collect();
                    let mut want: Vec<Coalition> = works
                        .iter()
                        .filter(|t| !works.iter().any(|u| u != *t && u.is_subset(t)))
                        .copied()
                        .collect();
                    let mut got = minimal_enforcing_coalitions(&m, a, b).unwrap();
                    want.sort_by_key(|t| (t.hospital_mask(), t.couple_mask()));
                    got.sort_by_key(|t| (t.hospital_mask(), t.couple_mask()));
                    assert_eq!(got, want, "{a:?} to {b:?}");
                }
            }
        }
    }

    #[test]
    fn direct_dominance_examples() {
        let m = example4();
        let [mu1, mu2, mu3] = ex4_named(&m);
        assert_eq!(directly_dominates(&m, &mu3, &mu2), Some(coalition(&m, &["h1", "c2"])));
        // h2 releases s2, so s1 may lose h1 without h1 or c1 taking part
        assert_eq!(directly_dominates(&m, &mu2, &mu1), Some(coalition(&m, &["h2", "c2"])));
        assert!(directly_dominates(&m, &mu1, &mu3).is_some());
        assert!(directly_dominates(&m, &mu1, &mu1).is_none());

        let e1 = example1();
        let [a1, a2, a3, _] = ex1_named(&e1);
        assert!(directly_dominates(&e1, &a1, &a2).is_some());
        assert!(directly_dominates(&e1, &a2, &a3).is_some());
        assert!(directly_dominates(&e1, &a3, &a1).is_some());
        assert!(directly_dominates(&e1, &a2, &a1).is_none());
        assert!(directly_dominates(&e1, &a3, &a2).is_none());
        assert!(directly_dominates(&e1, &a1, &a3).is_none());
    }

    /// Literal check of every subset of agents.
    fn brute_direct(market: &Market, to: &Matching, from: &Matching) -> bool {
        if to == from {
            return false;
        }
        let (nh, nc) = (market.hospital_count(), market.couple_count());
        (0u64..1 << nh).any(|hm| {
            (0u64..1 << nc).any(|cm| {
                let t = Coalition::from_masks(hm, cm);
                can_enforce(market, from, to, &t) && t.agents().all(|a| a.prefers(market, to, from))
            })
        })
    }

    #[test]
    fn direct_dominance_matches_subset_search() {
        for market in [example1(), example4()] {
            let all: Vec<_> = enumerate_matchings(&market).collect();
            for a in &all {
                for b in &all {
                    let fast = directly_dominates(&market, a, b);
                    assert_eq!(fast.is_some(), brute_direct(&market, a, b), "{a:?} over {b:?}");
                    if let Some(t) = fast {
                        assert!(can_enforce(&market, b, a, &t));
                        assert!(t.agents().all(|ag| ag.prefers(&market, a, b)));
                    }
                }
            }
        }
    }

    #[test]
    fn extended_stability_is_non_domination() {
        for market in [example1(), example4()] {
            let all: Vec<_> = enumerate_matchings(&market).collect();
            for b in &all {
                let dominated = all.iter().any(|a| directly_dominates(&market, a, b).is_some());
                assert_eq!(is_stable(&market, b, BlockMode::Extended), !dominated);
            }
        }
    }
}
