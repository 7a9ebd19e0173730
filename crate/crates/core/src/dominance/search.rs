//! Breadth-first path search over small local moves.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::DominancePath;
use crate::blocking::enforcing_within;
use crate::market::{Market, Member, Slot};
use crate::matching::{preferring, Coalition, Matching};

/// Searches for a path from `start` to `target` made of single unmatches,
/// single match formations, couple rematches to a listed pair, wholesale
/// destruction of every leavable match, and direct jumps to `target`. Each
/// move must be enforceable by agents preferring `target` to the matching the
/// move leaves. Explores at most `budget` matchings; any path found is valid.
pub fn elementary_search(market: &Market, target: &Matching, start: &Matching, budget: usize) -> Option<DominancePath> {
    if target == start {
        return None;
    }
    let mut parent: BTreeMap<Matching, Option<(Matching, Coalition)>> = BTreeMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(cur) = queue.pop_front() {
        let gain = preferring(market, target, &cur);
        if gain.is_empty() {
            continue;
        }
        for next in moves(market, target, &cur, gain) {
            if parent.contains_key(&next) {
                continue;
            }
            let Some(t) = enforcing_within(market, &cur, &next, gain) else {
                continue;
            };
            parent.insert(next.clone(), Some((cur.clone(), t)));
            if &next == target {
                return Some(unwind(&parent, start, target));
            }
            if parent.len() >= budget {
                return None;
            }
            queue.push_back(next);
        }
    }
    None
}

fn unwind(
    parent: &BTreeMap<Matching, Option<(Matching, Coalition)>>,
    start: &Matching,
    target: &Matching,
) -> DominancePath {
    let mut rev = Vec::new();
    let mut cur = target.clone();
    while let Some(Some((prev, t))) = parent.get(&cur) {
        rev.push((*t, cur.clone()));
        cur = prev.clone();
    }
    let mut path = DominancePath::new(start.clone());
    for (t, to) in rev.into_iter().rev() {
        path.push(t, to);
    }
    path
}

fn moves(market: &Market, target: &Matching, cur: &Matching, gain: Coalition) -> Vec<Matching> {
    let mut out = Vec::new();
    out.push(target.clone());
    let mut wipe = cur.clone();
    for (s, h) in cur.matches() {
        if gain.contains_hospital(h) || gain.contains_couple(s.couple()) {
            let mut next = cur.clone();
            next.unassign(s);
            out.push(next);
            if !target.contains_match(s, h) {
                wipe.unassign(s);
            }
        }
    }
    out.push(wipe);
    for c in market.couples().filter(|&c| gain.contains_couple(c)) {
        for member in [Member::First, Member::Second] {
            let s = c.student(member);
            for h in market.hospitals().filter(|&h| gain.contains_hospital(h)) {
                if cur.slot(s) != Slot::Hospital(h) {
                    let mut next = cur.clone();
                    next.assign(s, Slot::Hospital(h));
                    out.push(next);
                }
            }
        }
        for &pair in market.couple_list(c).iter().chain([target.pair(c)].iter()) {
            if pair != cur.pair(c) {
                let mut next = cur.clone();
                next.assign_pair(c, pair);
                out.push(next);
            }
        }
    }
    out
}
