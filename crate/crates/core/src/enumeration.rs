//! The matching space of a market and its canonical integer codes.
//!
//! Codes follow the mixed-radix order over students (student 0 most
//! significant), each digit a slot with `u` first and hospitals in index order.
//! Assignments that give one hospital to two students are skipped, so codes are
//! dense in `0..count_matchings`.

use alloc::vec;
use alloc::vec::Vec;

use crate::blocking;
use crate::market::{HospitalId, Market, Slot, StudentId};
use crate::matching::Matching;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchingCode(pub u128);

/// `completions[r][k]`: ways to place `r` students into `k` free hospitals or `u`.
#[derive(Clone)]
struct CompletionTable {
    table: Vec<Vec<u128>>,
}

impl CompletionTable {
    fn new(students: usize, hospitals: usize) -> Self {
        let mut table = vec![vec![0u128; hospitals + 1]; students + 1];
        table[0].iter_mut().for_each(|x| *x = 1);
        for r in 1..=students {
            for k in 0..=hospitals {
                let idle = table[r - 1][k];
                let placed = if k > 0 {
                    (k as u128).saturating_mul(table[r - 1][k - 1])
                } else {
                    0
                };
                table[r][k] = idle.saturating_add(placed);
            }
        }
        CompletionTable { table }
    }

    #[inline]
    fn get(&self, students: usize, free: usize) -> u128 {
        self.table[students][free]
    }
}

/// `Σ_k C(m,k)·P(|S|,k)`; saturates at `u128::MAX`.
pub fn count_matchings(market: &Market) -> u128 {
    CompletionTable::new(market.student_count(), market.hospital_count())
        .get(market.student_count(), market.hospital_count())
}

/// Encoder/decoder for one market's codes.
#[derive(Clone)]
pub struct Codec {
    students: usize,
    hospitals: usize,
    table: CompletionTable,
}

impl Codec {
    pub fn new(market: &Market) -> Self {
        let (n, m) = (market.student_count(), market.hospital_count());
        Codec {
            students: n,
            hospitals: m,
            table: CompletionTable::new(n, m),
        }
    }

    pub fn count(&self) -> u128 {
        self.table.get(self.students, self.hospitals)
    }

    pub fn encode(&self, matching: &Matching) -> MatchingCode {
        let (n, m) = (self.students, self.hospitals);
        let mut used = 0u64;
        let mut used_count = 0;
        let mut code = 0u128;
        for (i, slot) in matching.slots().iter().enumerate() {
            let rest = n - i - 1;
            let free = m - used_count;
            if let Slot::Hospital(h) = *slot {
                // `u` sorts first
                code += self.table.get(rest, free);
                let smaller_free = (h.0 as u32) - (used & ((1u64 << h.0) - 1)).count_ones();
                code += smaller_free as u128 * self.table.get(rest, free - 1);
                used |= 1u64 << h.0;
                used_count += 1;
            }
        }
        MatchingCode(code)
    }

    pub fn decode(&self, market: &Market, code: MatchingCode) -> Option<Matching> {
        let (n, m) = (self.students, self.hospitals);
        if code.0 >= self.count() {
            return None;
        }
        let mut rem = code.0;
        let mut used = vec![false; m];
        let mut used_count = 0;
        let mut slots = Vec::with_capacity(n);
        for i in 0..n {
            let rest = n - i - 1;
            let free = m - used_count;
            let idle = self.table.get(rest, free);
            if rem < idle {
                slots.push(Slot::Unemployed);
                continue;
            }
            rem -= idle;
            let block = self.table.get(rest, free - 1);
            let skip = (rem / block) as usize;
            rem %= block;
            let h = (0..m).filter(|&j| !used[j]).nth(skip)?;
            used[h] = true;
            used_count += 1;
            slots.push(Slot::Hospital(HospitalId(h)));
        }
        Matching::from_slots(market, slots).ok()
    }
}

pub fn encode(market: &Market, matching: &Matching) -> MatchingCode {
    Codec::new(market).encode(matching)
}

pub fn decode(market: &Market, code: MatchingCode) -> Option<Matching> {
    Codec::new(market).decode(market, code)
}

/// Lazy stream over every matching in code order.
pub struct Matchings<'a> {
    market: &'a Market,
    current: Option<Matching>,
    started: bool,
}

pub fn enumerate_matchings(market: &Market) -> Matchings<'_> {
    Matchings {
        market,
        current: Some(Matching::empty(market)),
        started: false,
    }
}

impl Matchings<'_> {
    /// Advances `cur` to its successor in code order; false when exhausted.
    fn advance(market: &Market, cur: &mut Matching) -> bool {
        let n = market.student_count();
        let m = market.hospital_count();
        // odometer: increment the least significant digit that has a free larger
        // slot, then reset every less significant digit to `u`
        for i in (0..n).rev() {
            let s = StudentId(i);
            let start = match cur.slot(s) {
                Slot::Unemployed => 0,
                Slot::Hospital(h) => h.0 + 1,
            };
            cur.unassign(s);
            if let Some(h) = (start..m).find(|&j| cur.holder(HospitalId(j)).is_none()) {
                cur.assign(s, Slot::Hospital(HospitalId(h)));
                return true;
            }
        }
        false
    }
}

impl Iterator for Matchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if !self.started {
            self.started = true;
            return self.current.clone();
        }
        let cur = self.current.as_mut()?;
        if Self::advance(self.market, cur) {
            Some(cur.clone())
        } else {
            self.current = None;
            None
        }
    }
}

/// Individually rational matchings in code order.
pub fn enumerate_ir_matchings(market: &Market) -> impl Iterator<Item = Matching> + '_ {
    enumerate_matchings(market).filter(move |m| blocking::is_individually_rational(market, m))
}

/// The whole matching space held in memory, indexed by code.
#[derive(Clone)]
pub struct Space {
    matchings: Vec<Matching>,
    codec: Codec,
}

impl Space {
    /// Materializes the space, or returns its size if it exceeds `cap`.
    pub fn materialize(market: &Market, cap: u128) -> Result<Space, u128> {
        let count = count_matchings(market);
        if count > cap {
            return Err(count);
        }
        Ok(Space {
            matchings: enumerate_matchings(market).collect(),
            codec: Codec::new(market),
        })
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn get(&self, index: usize) -> &Matching {
        &self.matchings[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Matching> {
        self.matchings.iter()
    }

    pub fn as_slice(&self) -> &[Matching] {
        &self.matchings
    }

    /// Index of `m` in this space (its code).
    pub fn index_of(&self, m: &Matching) -> usize {
        self.codec.encode(m).0 as usize
    }
}
