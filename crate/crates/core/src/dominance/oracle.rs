//! Exhaustive reachability over the whole matching space.

use alloc::vec;
use alloc::vec::Vec;

use super::{decide_rational, indirectly_dominates, DominancePath, DominanceVerdict, Policy};
use crate::bits::BitSet;
use crate::blocking::{directly_dominates, enforcing_within, is_individually_rational};
use crate::enumeration::{count_matchings, Space};
use crate::market::Market;
use crate::matching::{preferring, Coalition, Matching};

/// Exact indirect dominance over a materialized matching space.
///
/// A move from `nu` toward target `mu` is allowed iff some coalition of agents
/// preferring `mu` to `nu` can enforce it; [`enforcing_within`] decides that
/// with one canonical coalition. The set of matchings `mu` dominates is the
/// backward closure of `mu` under allowed moves.
pub struct Oracle<'a> {
    market: &'a Market,
    space: Space,
}

struct Closure {
    reached: BitSet,
    parent: Vec<Option<(u32, Coalition)>>,
}

impl<'a> Oracle<'a> {
    /// Materializes the whole space; use [`Oracle::with_cap`] for untrusted sizes.
    pub fn new(market: &'a Market) -> Self {
        Oracle {
            market,
            space: Space::materialize(market, u128::MAX).unwrap_or_else(|_| unreachable!()),
        }
    }

    /// `Err(count)` when the space has more than `cap` matchings.
    pub fn with_cap(market: &'a Market, cap: u128) -> Result<Self, u128> {
        Ok(Oracle {
            market,
            space: Space::materialize(market, cap)?,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    fn closure(&self, target: usize, stop_at: Option<usize>) -> Closure {
        let n = self.space.len();
        let goal = self.space.get(target);
        let gain: Vec<Coalition> = self.space.iter().map(|v| preferring(self.market, goal, v)).collect();
        // a matching nobody wants to leave can never move
        let mut pending: Vec<usize> = (0..n).filter(|&v| v != target && !gain[v].is_empty()).collect();
        let mut reached = BitSet::new(n);
        let mut parent = vec![None; n];
        let mut queue = vec![target];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            let to = self.space.get(x);
            let mut i = 0;
            while i < pending.len() {
                let v = pending[i];
                match enforcing_within(self.market, self.space.get(v), to, gain[v]) {
                    Some(t) => {
                        reached.insert(v);
                        parent[v] = Some((x as u32, t));
                        queue.push(v);
                        pending.swap_remove(i);
                        if stop_at == Some(v) {
                            return Closure { reached, parent };
                        }
                    }
                    None => i += 1,
                }
            }
        }
        Closure { reached, parent }
    }

    /// Codes of every matching that `target` indirectly dominates.
    pub fn dominated_by(&self, target: &Matching) -> BitSet {
        self.closure(self.space.index_of(target), None).reached
    }

    pub fn dominates(&self, dominator: &Matching, dominated: &Matching) -> bool {
        self.path(dominator, dominated).is_some()
    }

    /// A shortest-hop certificate for `dominator >> dominated`.
    pub fn path(&self, dominator: &Matching, dominated: &Matching) -> Option<DominancePath> {
        let target = self.space.index_of(dominator);
        let start = self.space.index_of(dominated);
        if target == start {
            return None;
        }
        let closure = self.closure(target, Some(start));
        if !closure.reached.contains(start) {
            return None;
        }
        let mut path = DominancePath::new(dominated.clone());
        let mut cur = start;
        while let Some((next, t)) = closure.parent[cur] {
            path.push(t, self.space.get(next as usize).clone());
            cur = next as usize;
        }
        Some(path)
    }

    /// Indirect-dominance matrix restricted to `scope`.
    pub fn matrix(&self, scope: &[Matching]) -> DominanceMatrix {
        let codes: Vec<usize> = scope.iter().map(|m| self.space.index_of(m)).collect();
        let rows = codes
            .iter()
            .map(|&a| {
                let reached = self.closure(a, None).reached;
                codes
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| reached.contains(b))
                    .map(|(j, _)| j)
                    .collect_row(scope.len())
            })
            .collect();
        DominanceMatrix {
            nodes: scope.to_vec(),
            rows,
            unknown: Vec::new(),
        }
    }
}

trait CollectRow {
    fn collect_row(self, len: usize) -> BitSet;
}

impl<I: Iterator<Item = usize>> CollectRow for I {
    fn collect_row(self, len: usize) -> BitSet {
        let mut b = BitSet::new(len);
        for i in self {
            b.insert(i);
        }
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Direct,
    Indirect,
}

/// `rows[a]` holds `b` iff `nodes[a]` dominates `nodes[b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceMatrix {
    pub nodes: Vec<Matching>,
    pub rows: Vec<BitSet>,
    /// Pairs `(a, b)` whose verdict stayed unknown; they carry no edge.
    pub unknown: Vec<(usize, usize)>,
}

impl DominanceMatrix {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dominates(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    /// Edges `(a, b)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |b| (a, b)))
    }
}

/// Dominance graph over `scope`.
///
/// Indirect edges come from the exact oracle when the space has at most
/// `policy.exhaustive_cap` matchings. Larger spaces are decided pair by pair;
/// pairs left undecided are listed in `unknown`.
pub fn dominance_graph(market: &Market, scope: &[Matching], relation: Relation, policy: &Policy) -> DominanceMatrix {
    let n = scope.len();
    match relation {
        Relation::Direct => DominanceMatrix {
            nodes: scope.to_vec(),
            rows: scope
                .iter()
                .map(|a| {
                    (0..n)
                        .filter(|&j| directly_dominates(market, a, &scope[j]).is_some())
                        .collect_row(n)
                })
                .collect(),
            unknown: Vec::new(),
        },
        Relation::Indirect => {
            if count_matchings(market) <= policy.exhaustive_cap {
                return Oracle::new(market).matrix(scope);
            }
            let mut unknown = Vec::new();
            let mut rows = Vec::with_capacity(n);
            for (i, a) in scope.iter().enumerate() {
                let ir = is_individually_rational(market, a);
                let mut row = BitSet::new(n);
                for (j, b) in scope.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let v = if ir {
                        decide_rational(market, a, b)
                    } else {
                        indirectly_dominates(market, a, b, policy)
                    };
                    match v {
                        DominanceVerdict::Dominates(_) => {
                            row.insert(j);
                        }
                        DominanceVerdict::Refuted(_) => {}
                        DominanceVerdict::Unknown => unknown.push((i, j)),
                    }
                }
                rows.push(row);
            }
            DominanceMatrix {
                nodes: scope.to_vec(),
                rows,
                unknown,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocking::can_enforce;
    use crate::blocking::tests::{ex1_named, ex4_named};
    use crate::enumeration::{enumerate_ir_matchings, enumerate_matchings};
    use crate::market::tests::{example1, example4};
    use crate::matching::Agent;

    /// Fixed-point reachability using every coalition of agents.
    fn naive_rows(market: &Market) -> Vec<BitSet> {
        let all: Vec<Matching> = enumerate_matchings(market).collect();
        let n = all.len();
        let (nh, nc) = (market.hospital_count(), market.couple_count());
        let coalitions: Vec<Coalition> = (0u64..1 << nh)
            .flat_map(|h| (0u64..1 << nc).map(move |c| Coalition::from_masks(h, c)))
            .filter(|t| !t.is_empty())
            .collect();
        let mut rows = Vec::new();
        for tau in &all {
            let mut reached = BitSet::new(n);
            let mut changed = true;
            while changed {
                changed = false;
                for (v, nu) in all.iter().enumerate() {
                    if nu == tau || reached.contains(v) {
                        continue;
                    }
                    let ok = all.iter().enumerate().any(|(x, next)| {
                        (next == tau || reached.contains(x))
                            && next != nu
                            && coalitions.iter().any(|t| {
                                can_enforce(market, nu, next, t)
                                    && t.agents().all(|a: Agent| a.prefers(market, tau, nu))
                            })
                    });
                    if ok {
                        reached.insert(v);
                        changed = true;
                    }
                }
            }
            rows.push(reached);
        }
        rows
    }

    #[test]
    fn oracle_matches_naive_fixed_point_on_example4() {
        let m = example4();
        let oracle = Oracle::new(&m);
        let naive = naive_rows(&m);
        for (i, tau) in oracle.space().iter().enumerate() {
            assert_eq!(oracle.dominated_by(tau), naive[i], "row of {tau:?}");
        }
    }

    #[test]
    fn oracle_paths_replay() {
        let m = example1();
        let oracle = Oracle::new(&m);
        let all: Vec<_> = oracle.space().iter().cloned().collect();
        for tau in all.iter().step_by(3) {
            let row = oracle.dominated_by(tau);
            for (j, nu) in all.iter().enumerate() {
                let p = oracle.path(tau, nu);
                assert_eq!(p.is_some(), row.contains(j));
                if let Some(p) = p {
                    p.replay(&m).unwrap();
                    assert_eq!(p.end(), tau);
                }
            }
        }
    }

    #[test]
    fn example4_direct_graph_over_ir() {
        let m = example4();
        let scope: Vec<_> = enumerate_ir_matchings(&m).collect();
        assert_eq!(scope.len(), 4);
        let [mu1, mu2, mu3] = ex4_named(&m);
        let g = dominance_graph(&m, &scope, Relation::Direct, &Policy::default());
        let idx = |x: &Matching| scope.iter().position(|y| y == x).unwrap();
        assert!(g.dominates(idx(&mu1), idx(&mu3)));
        assert!(g.dominates(idx(&mu3), idx(&mu2)));
        assert!(g.dominates(idx(&mu2), idx(&mu1)));
        assert!(!g.dominates(idx(&mu3), idx(&mu1)));
        let empty = idx(&Matching::empty(&m));
        for x in [&mu1, &mu2, &mu3] {
            assert!(g.dominates(idx(x), empty));
        }
    }

    #[test]
    fn example1_indirect_graph_over_named() {
        let m = example1();
        let scope = ex1_named(&m).to_vec();
        let g = dominance_graph(&m, &scope, Relation::Indirect, &Policy::default());
        for j in 0..3 {
            assert!(g.dominates(3, j));
        }
        // c1 leaves its second choice at mu4 looking forward to mu1 or mu2; for
        // mu3, h2 swaps s1 for s3 and c1 loses h3 as well
        for j in 0..3 {
            assert!(g.dominates(j, 3));
        }
        assert!(g.dominates(0, 1) && g.dominates(1, 2) && g.dominates(2, 0));
        assert!(!g.dominates(1, 0) && !g.dominates(2, 1) && !g.dominates(0, 2));
        // the tiered route agrees
        let tiered = dominance_graph(
            &m,
            &scope,
            Relation::Indirect,
            &Policy {
                exhaustive_cap: 0,
                ..Policy::default()
            },
        );
        assert_eq!(tiered.rows, g.rows);
        assert!(dominance_graph(&m, &[], Relation::Indirect, &Policy::default()).is_empty());
    }
}
