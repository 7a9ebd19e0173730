use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::market::{CoupleId, HospitalId, Market, Member, Slot, SlotPair, StudentId};

/// An injective assignment of students to single-position hospitals.
///
/// The student side is authoritative; the hospital side is kept in sync so
/// `holder(h)` is a lookup.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    students: Vec<Slot>,
    hospitals: Vec<Option<StudentId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingError {
    WrongStudentCount { expected: usize, found: usize },
    UnknownHospital(usize),
    HospitalAssignedTwice(HospitalId),
}

impl fmt::Display for MatchingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingError::WrongStudentCount { expected, found } => {
                write!(f, "expected {expected} student slots, found {found}")
            }
            MatchingError::UnknownHospital(h) => write!(f, "hospital index {h} out of range"),
            MatchingError::HospitalAssignedTwice(h) => write!(f, "hospital #{} assigned twice", h.0),
        }
    }
}

impl Matching {
    /// Everyone unemployed, every position unfilled.
    pub fn empty(market: &Market) -> Self {
        Matching {
            students: vec![Slot::Unemployed; market.student_count()],
            hospitals: vec![None; market.hospital_count()],
        }
    }

    pub fn from_slots(market: &Market, slots: Vec<Slot>) -> Result<Self, MatchingError> {
        if slots.len() != market.student_count() {
            return Err(MatchingError::WrongStudentCount {
                expected: market.student_count(),
                found: slots.len(),
            });
        }
        let mut hospitals = vec![None; market.hospital_count()];
        for (i, slot) in slots.iter().enumerate() {
            if let Slot::Hospital(h) = *slot {
                let cell = hospitals.get_mut(h.0).ok_or(MatchingError::UnknownHospital(h.0))?;
                if cell.is_some() {
                    return Err(MatchingError::HospitalAssignedTwice(h));
                }
                *cell = Some(StudentId(i));
            }
        }
        Ok(Matching {
            students: slots,
            hospitals,
        })
    }

    #[inline]
    pub fn slot(&self, s: StudentId) -> Slot {
        self.students[s.0]
    }

    /// The student holding `h`'s position, if any.
    #[inline]
    pub fn holder(&self, h: HospitalId) -> Option<StudentId> {
        self.hospitals[h.0]
    }

    #[inline]
    pub fn pair(&self, c: CoupleId) -> SlotPair {
        SlotPair(self.students[2 * c.0], self.students[2 * c.0 + 1])
    }

    pub fn slots(&self) -> &[Slot] {
        &self.students
    }

    pub fn holders(&self) -> &[Option<StudentId>] {
        &self.hospitals
    }

    pub fn is_empty(&self) -> bool {
        self.hospitals.iter().all(Option::is_none)
    }

    /// Number of student-hospital matches.
    pub fn size(&self) -> usize {
        self.hospitals.iter().filter(|h| h.is_some()).count()
    }

    pub fn contains_match(&self, s: StudentId, h: HospitalId) -> bool {
        self.hospitals[h.0] == Some(s)
    }

    /// Matches `(student, hospital)` in hospital order.
    pub fn matches(&self) -> impl Iterator<Item = (StudentId, HospitalId)> + '_ {
        self.hospitals
            .iter()
            .enumerate()
            .filter_map(|(h, s)| s.map(|s| (s, HospitalId(h))))
    }

    /// Destroys the match of `s`, if any.
    pub fn unassign(&mut self, s: StudentId) {
        if let Slot::Hospital(h) = self.students[s.0] {
            self.hospitals[h.0] = None;
        }
        self.students[s.0] = Slot::Unemployed;
    }

    /// Empties `h`'s position, if filled.
    pub fn vacate(&mut self, h: HospitalId) {
        if let Some(s) = self.hospitals[h.0].take() {
            self.students[s.0] = Slot::Unemployed;
        }
    }

    /// Moves `s` to `slot`; the student's old position and the new hospital's
    /// previous holder are released.
    pub fn assign(&mut self, s: StudentId, slot: Slot) {
        self.unassign(s);
        if let Slot::Hospital(h) = slot {
            self.vacate(h);
            self.hospitals[h.0] = Some(s);
        }
        self.students[s.0] = slot;
    }

    /// Moves couple `c` to `pair`. Positions the pair needs are released first.
    pub fn assign_pair(&mut self, c: CoupleId, pair: SlotPair) {
        let [s1, s2] = c.students();
        self.unassign(s1);
        self.unassign(s2);
        self.assign(s1, pair.0);
        self.assign(s2, pair.1);
    }

    /// The matching with every match that involves a member of `coalition` destroyed.
    pub fn without(&self, coalition: &Coalition) -> Matching {
        let mut out = self.clone();
        for (s, h) in self.matches() {
            if coalition.contains_hospital(h) || coalition.contains_couple(s.couple()) {
                out.unassign(s);
            }
        }
        out
    }

    /// `self` restricted to matches also present in `other`.
    pub fn intersection(&self, other: &Matching) -> Matching {
        let mut out = self.clone();
        for (s, h) in self.matches() {
            if !other.contains_match(s, h) {
                out.unassign(s);
            }
        }
        out
    }

    /// Every match of `self` is a match of `other`.
    pub fn is_submatching_of(&self, other: &Matching) -> bool {
        self.matches().all(|(s, h)| other.contains_match(s, h))
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, slot) in self.students.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match slot {
                Slot::Unemployed => write!(f, "#{i}:u")?,
                Slot::Hospital(h) => write!(f, "#{i}:h#{}", h.0)?,
            }
        }
        f.write_str("}")
    }
}

/// A hospital or a couple; the decision makers of the market.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    Hospital(HospitalId),
    Couple(CoupleId),
}

impl Agent {
    /// Strict preference of this agent for its outcome at `a` over its outcome at `b`.
    #[inline]
    pub fn prefers(self, market: &Market, a: &Matching, b: &Matching) -> bool {
        match self {
            Agent::Hospital(h) => market.hospital_rank(h, a.holder(h)) < market.hospital_rank(h, b.holder(h)),
            Agent::Couple(c) => market.couple_rank(c, a.pair(c)) < market.couple_rank(c, b.pair(c)),
        }
    }

    /// Same own assignment at both matchings.
    pub fn indifferent(self, a: &Matching, b: &Matching) -> bool {
        match self {
            Agent::Hospital(h) => a.holder(h) == b.holder(h),
            Agent::Couple(c) => a.pair(c) == b.pair(c),
        }
    }

    pub fn name(self, market: &Market) -> &str {
        match self {
            Agent::Hospital(h) => market.hospital_name(h),
            Agent::Couple(c) => market.couple_name(c),
        }
    }
}

/// A set of hospitals and couples, one bit per agent.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    hospitals: u64,
    couples: u64,
}

impl Coalition {
    pub const EMPTY: Coalition = Coalition {
        hospitals: 0,
        couples: 0,
    };

    pub fn from_masks(hospitals: u64, couples: u64) -> Self {
        Coalition { hospitals, couples }
    }

    /// Every agent of the market.
    pub fn everyone(market: &Market) -> Self {
        let mask = |n: usize| if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        Coalition {
            hospitals: mask(market.hospital_count()),
            couples: mask(market.couple_count()),
        }
    }

    pub fn from_agents(agents: impl IntoIterator<Item = Agent>) -> Self {
        let mut c = Coalition::EMPTY;
        for a in agents {
            c.insert(a);
        }
        c
    }

    pub fn hospital_mask(&self) -> u64 {
        self.hospitals
    }

    pub fn couple_mask(&self) -> u64 {
        self.couples
    }

    #[inline]
    pub fn insert(&mut self, agent: Agent) {
        match agent {
            Agent::Hospital(h) => self.hospitals |= 1 << h.0,
            Agent::Couple(c) => self.couples |= 1 << c.0,
        }
    }

    #[inline]
    pub fn insert_hospital(&mut self, h: HospitalId) {
        self.hospitals |= 1 << h.0;
    }

    #[inline]
    pub fn insert_couple(&mut self, c: CoupleId) {
        self.couples |= 1 << c.0;
    }

    #[inline]
    pub fn contains(&self, agent: Agent) -> bool {
        match agent {
            Agent::Hospital(h) => self.contains_hospital(h),
            Agent::Couple(c) => self.contains_couple(c),
        }
    }

    #[inline]
    pub fn contains_hospital(&self, h: HospitalId) -> bool {
        self.hospitals >> h.0 & 1 == 1
    }

    #[inline]
    pub fn contains_couple(&self, c: CoupleId) -> bool {
        self.couples >> c.0 & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.hospitals == 0 && self.couples == 0
    }

    pub fn len(&self) -> usize {
        (self.hospitals.count_ones() + self.couples.count_ones()) as usize
    }

    #[inline]
    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.hospitals & !other.hospitals == 0 && self.couples & !other.couples == 0
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition {
            hospitals: self.hospitals | other.hospitals,
            couples: self.couples | other.couples,
        }
    }

    pub fn intersection(&self, other: &Coalition) -> Coalition {
        Coalition {
            hospitals: self.hospitals & other.hospitals,
            couples: self.couples & other.couples,
        }
    }

    pub fn difference(&self, other: &Coalition) -> Coalition {
        Coalition {
            hospitals: self.hospitals & !other.hospitals,
            couples: self.couples & !other.couples,
        }
    }

    /// Hospitals first, then couples, each in index order.
    pub fn agents(&self) -> impl Iterator<Item = Agent> + '_ {
        bits(self.hospitals)
            .map(|i| Agent::Hospital(HospitalId(i)))
            .chain(bits(self.couples).map(|i| Agent::Couple(CoupleId(i))))
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.agents()).finish()
    }
}

/// Agents that strictly prefer their outcome at `better` to their outcome at `worse`.
pub fn preferring(market: &Market, better: &Matching, worse: &Matching) -> Coalition {
    let mut out = Coalition::EMPTY;
    for h in market.hospitals() {
        if market.hospital_rank(h, better.holder(h)) < market.hospital_rank(h, worse.holder(h)) {
            out.insert_hospital(h);
        }
    }
    for c in market.couples() {
        if market.couple_rank(c, better.pair(c)) < market.couple_rank(c, worse.pair(c)) {
            out.insert_couple(c);
        }
    }
    out
}

/// Slot of `member` of couple `c`.
pub fn member_slot(m: &Matching, c: CoupleId, member: Member) -> Slot {
    m.slot(c.student(member))
}
