//! Couples markets: hospitals with one position each, couples of students, and
//! both sides' strict preferences.
//!
//! Preference lists only name acceptable alternatives. The order is completed
//! below the boundary (an unfilled position for hospitals, `(u,u)` for couples)
//! by canonical index, so every comparison is a total strict order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::diag::{Diagnostic, Span};

/// Coalitions are stored as 64-bit masks per side.
pub const MAX_AGENTS_PER_SIDE: usize = 64;

/// Reserved identifier for the unemployed slot.
pub const UNEMPLOYED_KEYWORD: &str = "u";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HospitalId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoupleId(pub usize);

/// Students are indexed by couple: couple `k` owns students `2k` and `2k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StudentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Member {
    First,
    Second,
}

impl Member {
    pub fn other(self) -> Member {
        match self {
            Member::First => Member::Second,
            Member::Second => Member::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Member::First => 0,
            Member::Second => 1,
        }
    }
}

impl StudentId {
    pub fn couple(self) -> CoupleId {
        CoupleId(self.0 / 2)
    }

    pub fn member(self) -> Member {
        if self.0.is_multiple_of(2) {
            Member::First
        } else {
            Member::Second
        }
    }
}

impl CoupleId {
    pub fn student(self, member: Member) -> StudentId {
        StudentId(2 * self.0 + member.index())
    }

    pub fn students(self) -> [StudentId; 2] {
        [self.student(Member::First), self.student(Member::Second)]
    }
}

/// A student's position: a hospital or unemployment (`u`).
///
/// The derived order puts `Unemployed` first, which is the digit order used by
/// matching codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Unemployed,
    Hospital(HospitalId),
}

impl Slot {
    pub fn hospital(self) -> Option<HospitalId> {
        match self {
            Slot::Unemployed => None,
            Slot::Hospital(h) => Some(h),
        }
    }

    pub fn is_unemployed(self) -> bool {
        matches!(self, Slot::Unemployed)
    }

    fn digit(self) -> usize {
        match self {
            Slot::Unemployed => 0,
            Slot::Hospital(h) => h.0 + 1,
        }
    }
}

/// A couple's joint position, first member's slot first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotPair(pub Slot, pub Slot);

impl SlotPair {
    pub const UNEMPLOYED: SlotPair = SlotPair(Slot::Unemployed, Slot::Unemployed);

    pub fn get(self, member: Member) -> Slot {
        match member {
            Member::First => self.0,
            Member::Second => self.1,
        }
    }

    pub fn with(self, member: Member, slot: Slot) -> SlotPair {
        match member {
            Member::First => SlotPair(slot, self.1),
            Member::Second => SlotPair(self.0, slot),
        }
    }

    /// Pairs sending both members to the same hospital are not positions.
    pub fn is_admissible(self) -> bool {
        !matches!((self.0, self.1), (Slot::Hospital(a), Slot::Hospital(b)) if a == b)
    }

    pub fn hospitals(self) -> impl Iterator<Item = (Member, HospitalId)> {
        [(Member::First, self.0), (Member::Second, self.1)]
            .into_iter()
            .filter_map(|(m, s)| s.hospital().map(|h| (m, h)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreferenceError {
    /// Strict comparison of an alternative with itself.
    SameAlternative,
    /// A couple pair with both members at one hospital.
    NotAPosition,
}

impl fmt::Display for PreferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreferenceError::SameAlternative => f.write_str("strict comparison of an alternative with itself"),
            PreferenceError::NotAPosition => f.write_str("pair places both members at the same hospital"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    hospital_names: Vec<String>,
    couple_names: Vec<String>,
    student_names: Vec<String>,
    hospital_lists: Vec<Vec<StudentId>>,
    couple_lists: Vec<Vec<SlotPair>>,
    // rank[h][s]; the unfilled position ranks at list length
    hospital_rank: Vec<Vec<u32>>,
    // rank[c][pair index]; (u,u) ranks at list length
    couple_rank: Vec<Vec<u32>>,
}

impl Market {
    pub fn hospital_count(&self) -> usize {
        self.hospital_names.len()
    }

    pub fn couple_count(&self) -> usize {
        self.couple_names.len()
    }

    pub fn student_count(&self) -> usize {
        self.student_names.len()
    }

    pub fn hospitals(&self) -> impl Iterator<Item = HospitalId> + Clone {
        (0..self.hospital_count()).map(HospitalId)
    }

    pub fn couples(&self) -> impl Iterator<Item = CoupleId> + Clone {
        (0..self.couple_count()).map(CoupleId)
    }

    pub fn students(&self) -> impl Iterator<Item = StudentId> + Clone {
        (0..self.student_count()).map(StudentId)
    }

    pub fn hospital_name(&self, h: HospitalId) -> &str {
        &self.hospital_names[h.0]
    }

    pub fn couple_name(&self, c: CoupleId) -> &str {
        &self.couple_names[c.0]
    }

    pub fn student_name(&self, s: StudentId) -> &str {
        &self.student_names[s.0]
    }

    pub fn hospital_by_name(&self, name: &str) -> Option<HospitalId> {
        self.hospital_names.iter().position(|n| n == name).map(HospitalId)
    }

    pub fn couple_by_name(&self, name: &str) -> Option<CoupleId> {
        self.couple_names.iter().position(|n| n == name).map(CoupleId)
    }

    pub fn student_by_name(&self, name: &str) -> Option<StudentId> {
        self.student_names.iter().position(|n| n == name).map(StudentId)
    }

    /// Acceptable students of `h`, best first.
    pub fn hospital_list(&self, h: HospitalId) -> &[StudentId] {
        &self.hospital_lists[h.0]
    }

    /// Acceptable pairs of `c`, best first.
    pub fn couple_list(&self, c: CoupleId) -> &[SlotPair] {
        &self.couple_lists[c.0]
    }

    pub fn slot_name(&self, slot: Slot) -> &str {
        match slot {
            Slot::Unemployed => UNEMPLOYED_KEYWORD,
            Slot::Hospital(h) => self.hospital_name(h),
        }
    }

    /// Position of `assignee` in `h`'s completed order; lower is better.
    #[inline]
    pub fn hospital_rank(&self, h: HospitalId, assignee: Option<StudentId>) -> u32 {
        match assignee {
            None => self.hospital_lists[h.0].len() as u32,
            Some(s) => self.hospital_rank[h.0][s.0],
        }
    }

    /// Position of `pair` in `c`'s completed order; lower is better.
    #[inline]
    pub fn couple_rank(&self, c: CoupleId, pair: SlotPair) -> u32 {
        self.couple_rank[c.0][self.pair_index(pair)]
    }

    #[inline]
    fn pair_index(&self, pair: SlotPair) -> usize {
        pair.0.digit() * (self.hospital_count() + 1) + pair.1.digit()
    }

    pub fn is_acceptable_to_hospital(&self, h: HospitalId, s: StudentId) -> bool {
        self.hospital_rank(h, Some(s)) < self.hospital_rank(h, None)
    }

    pub fn is_acceptable_to_couple(&self, c: CoupleId, pair: SlotPair) -> bool {
        pair != SlotPair::UNEMPLOYED && self.couple_rank(c, pair) < self.couple_rank(c, SlotPair::UNEMPLOYED)
    }

    /// `a ≻_h b`, where `None` is the unfilled position.
    pub fn hospital_prefers(
        &self,
        h: HospitalId,
        a: Option<StudentId>,
        b: Option<StudentId>,
    ) -> Result<bool, PreferenceError> {
        if a == b {
            return Err(PreferenceError::SameAlternative);
        }
        Ok(self.hospital_rank(h, a) < self.hospital_rank(h, b))
    }

    /// `p ≻_c q`.
    pub fn couple_prefers(&self, c: CoupleId, p: SlotPair, q: SlotPair) -> Result<bool, PreferenceError> {
        if !p.is_admissible() || !q.is_admissible() {
            return Err(PreferenceError::NotAPosition);
        }
        if p == q {
            return Err(PreferenceError::SameAlternative);
        }
        Ok(self.couple_rank(c, p) < self.couple_rank(c, q))
    }

    /// All admissible pairs in canonical order, `(u,u)` first.
    pub fn all_pairs(&self) -> impl Iterator<Item = SlotPair> + '_ {
        let slots = || core::iter::once(Slot::Unemployed).chain(self.hospitals().map(Slot::Hospital));
        slots()
            .flat_map(move |a| slots().map(move |b| SlotPair(a, b)))
            .filter(|p| p.is_admissible())
    }

    /// Rebuilds a builder describing this market, e.g. to edit and revalidate.
    pub fn to_builder(&self) -> MarketBuilder {
        let mut b = MarketBuilder::new();
        for h in self.hospitals() {
            b.add_hospital(Name::new(self.hospital_name(h)));
        }
        for c in self.couples() {
            let [s1, s2] = c.students();
            b.add_couple(
                Name::new(self.couple_name(c)),
                [Name::new(self.student_name(s1)), Name::new(self.student_name(s2))],
            );
        }
        for h in self.hospitals() {
            let students = self
                .hospital_list(h)
                .iter()
                .map(|&s| Name::new(self.student_name(s)))
                .collect();
            b.add_hospital_prefs(Name::new(self.hospital_name(h)), students);
        }
        for c in self.couples() {
            let pairs = self
                .couple_list(c)
                .iter()
                .map(|p| RawPair {
                    first: self.raw_slot(p.0),
                    second: self.raw_slot(p.1),
                    span: Span::NONE,
                })
                .collect();
            b.add_couple_prefs(Name::new(self.couple_name(c)), pairs);
        }
        b
    }

    fn raw_slot(&self, slot: Slot) -> Option<Name> {
        slot.hospital().map(|h| Name::new(self.hospital_name(h)))
    }
}

/// An identifier together with where it was read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name {
            text: text.into(),
            span: Span::NONE,
        }
    }

    pub fn at(text: impl Into<String>, span: Span) -> Self {
        Name {
            text: text.into(),
            span,
        }
    }
}

/// One entry of a couple's list; `None` is the unemployed slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPair {
    pub first: Option<Name>,
    pub second: Option<Name>,
    pub span: Span,
}

#[derive(Clone, Debug)]
struct RawCouple {
    name: Name,
    members: [Name; 2],
}

/// Unvalidated market description. [`MarketBuilder::build`] checks every
/// invariant and reports all violations with their source positions.
#[derive(Clone, Debug, Default)]
pub struct MarketBuilder {
    hospitals: Vec<Name>,
    couples: Vec<RawCouple>,
    hospital_prefs: Vec<(Name, Vec<Name>)>,
    couple_prefs: Vec<(Name, Vec<RawPair>)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Hospital,
    Couple,
    Student,
}

impl Kind {
    fn noun(self) -> &'static str {
        match self {
            Kind::Hospital => "hospital",
            Kind::Couple => "couple",
            Kind::Student => "student",
        }
    }
}

impl MarketBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_hospital(&mut self, name: Name) -> &mut Self {
        self.hospitals.push(name);
        self
    }

    pub fn add_couple(&mut self, name: Name, members: [Name; 2]) -> &mut Self {
        self.couples.push(RawCouple { name, members });
        self
    }

    pub fn add_hospital_prefs(&mut self, hospital: Name, students: Vec<Name>) -> &mut Self {
        self.hospital_prefs.push((hospital, students));
        self
    }

    pub fn add_couple_prefs(&mut self, couple: Name, pairs: Vec<RawPair>) -> &mut Self {
        self.couple_prefs.push((couple, pairs));
        self
    }

    /// Shorthand for hand-built markets: `"u"` in a pair is the unemployed slot.
    pub fn hospital(mut self, name: &str, prefs: &[&str]) -> Self {
        self.add_hospital(Name::new(name));
        if !prefs.is_empty() {
            self.add_hospital_prefs(Name::new(name), prefs.iter().map(|s| Name::new(*s)).collect());
        }
        self
    }

    /// Shorthand for hand-built markets: `"u"` in a pair is the unemployed slot.
    pub fn couple(mut self, name: &str, members: (&str, &str), prefs: &[(&str, &str)]) -> Self {
        self.add_couple(Name::new(name), [Name::new(members.0), Name::new(members.1)]);
        if !prefs.is_empty() {
            let slot = |s: &str| (s != UNEMPLOYED_KEYWORD).then(|| Name::new(s));
            let pairs = prefs
                .iter()
                .map(|(a, b)| RawPair {
                    first: slot(a),
                    second: slot(b),
                    span: Span::NONE,
                })
                .collect();
            self.add_couple_prefs(Name::new(name), pairs);
        }
        self
    }

    pub fn build(&self) -> Result<Market, Vec<Diagnostic>> {
        let mut errors = Vec::new();
        let mut kinds: BTreeMap<String, Kind> = BTreeMap::new();
        let mut declare = |name: &Name, kind: Kind, errors: &mut Vec<Diagnostic>| -> bool {
            if name.text == UNEMPLOYED_KEYWORD {
                errors.push(Diagnostic::error(
                    name.span,
                    format!("`{UNEMPLOYED_KEYWORD}` is reserved for the unemployed slot"),
                ));
                return false;
            }
            match kinds.get(name.text.as_str()) {
                Some(&prev) if prev == kind && kind == Kind::Student => {
                    errors.push(Diagnostic::error(
                        name.span,
                        format!("student {} in two couples", name.text),
                    ));
                    false
                }
                Some(&prev) if prev == kind => {
                    errors.push(Diagnostic::error(
                        name.span,
                        format!("duplicate {} id {}", kind.noun(), name.text),
                    ));
                    false
                }
                Some(&prev) => {
                    errors.push(Diagnostic::error(
                        name.span,
                        format!("identifier {} already names a {}", name.text, prev.noun()),
                    ));
                    false
                }
                None => {
                    kinds.insert(name.text.clone(), kind);
                    true
                }
            }
        };

        let mut hospital_names = Vec::new();
        for h in &self.hospitals {
            if declare(h, Kind::Hospital, &mut errors) {
                hospital_names.push(h.text.clone());
            }
        }
        let mut couple_names = Vec::new();
        let mut student_names = Vec::new();
        for c in &self.couples {
            let ok_couple = declare(&c.name, Kind::Couple, &mut errors);
            let ok_first = declare(&c.members[0], Kind::Student, &mut errors);
            let ok_second = declare(&c.members[1], Kind::Student, &mut errors);
            if ok_couple && ok_first && ok_second {
                couple_names.push(c.name.text.clone());
                student_names.push(c.members[0].text.clone());
                student_names.push(c.members[1].text.clone());
            }
        }
        if hospital_names.len() > MAX_AGENTS_PER_SIDE {
            errors.push(Diagnostic::error(
                Span::NONE,
                format!("at most {MAX_AGENTS_PER_SIDE} hospitals are supported"),
            ));
        }
        if couple_names.len() > MAX_AGENTS_PER_SIDE {
            errors.push(Diagnostic::error(
                Span::NONE,
                format!("at most {MAX_AGENTS_PER_SIDE} couples are supported"),
            ));
        }

        let lookup = |names: &[String], name: &str| names.iter().position(|n| n == name);
        let m = hospital_names.len();

        let mut hospital_lists: Vec<Option<Vec<StudentId>>> = vec![None; m];
        for (hname, students) in &self.hospital_prefs {
            let Some(h) = lookup(&hospital_names, &hname.text) else {
                errors.push(Diagnostic::error(
                    hname.span,
                    format!("unknown hospital {}", hname.text),
                ));
                continue;
            };
            if hospital_lists[h].is_some() {
                errors.push(Diagnostic::error(
                    hname.span,
                    format!("preferences for hospital {} given twice", hname.text),
                ));
                continue;
            }
            let mut list = Vec::with_capacity(students.len());
            for s in students {
                match lookup(&student_names, &s.text) {
                    None => errors.push(Diagnostic::error(s.span, format!("unknown student {}", s.text))),
                    Some(i) if list.contains(&StudentId(i)) => errors.push(Diagnostic::error(
                        s.span,
                        format!("student {} listed twice by hospital {}", s.text, hname.text),
                    )),
                    Some(i) => list.push(StudentId(i)),
                }
            }
            hospital_lists[h] = Some(list);
        }

        let mut couple_lists: Vec<Option<Vec<SlotPair>>> = vec![None; couple_names.len()];
        for (cname, pairs) in &self.couple_prefs {
            let Some(c) = lookup(&couple_names, &cname.text) else {
                errors.push(Diagnostic::error(cname.span, format!("unknown couple {}", cname.text)));
                continue;
            };
            if couple_lists[c].is_some() {
                errors.push(Diagnostic::error(
                    cname.span,
                    format!("preferences for couple {} given twice", cname.text),
                ));
                continue;
            }
            let mut list = Vec::with_capacity(pairs.len());
            for p in pairs {
                let mut resolve = |slot: &Option<Name>| -> Option<Slot> {
                    match slot {
                        None => Some(Slot::Unemployed),
                        Some(n) => match lookup(&hospital_names, &n.text) {
                            Some(h) => Some(Slot::Hospital(HospitalId(h))),
                            None => {
                                errors.push(Diagnostic::error(n.span, format!("unknown hospital {}", n.text)));
                                None
                            }
                        },
                    }
                };
                let (Some(a), Some(b)) = (resolve(&p.first), resolve(&p.second)) else {
                    continue;
                };
                let pair = SlotPair(a, b);
                if !pair.is_admissible() {
                    errors.push(Diagnostic::error(
                        p.span,
                        format!(
                            "same-hospital pair ({},{}) in preferences of couple {}",
                            hospital_names[a.hospital().map_or(0, |h| h.0)],
                            hospital_names[b.hospital().map_or(0, |h| h.0)],
                            cname.text
                        ),
                    ));
                } else if pair == SlotPair::UNEMPLOYED {
                    errors.push(Diagnostic::error(
                        p.span,
                        format!("(u,u) listed by couple {}; it is the implicit boundary", cname.text),
                    ));
                } else if list.contains(&pair) {
                    errors.push(Diagnostic::error(
                        p.span,
                        format!("pair listed twice by couple {}", cname.text),
                    ));
                } else {
                    list.push(pair);
                }
            }
            couple_lists[c] = Some(list);
        }

        if !errors.is_empty() {
            errors.sort_by_key(|d| d.span());
            return Err(errors);
        }

        let hospital_lists: Vec<Vec<StudentId>> = hospital_lists.into_iter().map(Option::unwrap_or_default).collect();
        let couple_lists: Vec<Vec<SlotPair>> = couple_lists.into_iter().map(Option::unwrap_or_default).collect();
        let n_students = student_names.len();

        let hospital_rank = hospital_lists
            .iter()
            .map(|list| {
                let boundary = list.len() as u32;
                let mut rank: Vec<u32> = (0..n_students).map(|s| boundary + 1 + s as u32).collect();
                for (i, s) in list.iter().enumerate() {
                    rank[s.0] = i as u32;
                }
                rank
            })
            .collect();

        let width = m + 1;
        let couple_rank = couple_lists
            .iter()
            .map(|list| {
                let boundary = list.len() as u32;
                let mut rank: Vec<u32> = (0..width * width).map(|i| boundary + 1 + i as u32).collect();
                rank[0] = boundary;
                for h in 0..m {
                    let same = (h + 1) * width + (h + 1);
                    rank[same] = u32::MAX;
                }
                for (i, p) in list.iter().enumerate() {
                    rank[p.0.digit() * width + p.1.digit()] = i as u32;
                }
                rank
            })
            .collect();

        Ok(Market {
            hospital_names,
            couple_names,
            student_names,
            hospital_lists,
            couple_lists,
            hospital_rank,
            couple_rank,
        })
    }
}

/// Validates a raw description; see [`MarketBuilder::build`].
pub fn validate_market(raw: &MarketBuilder) -> Result<Market, Vec<Diagnostic>> {
    raw.build()
}

impl fmt::Display for SlotPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |slot: Slot| match slot {
            Slot::Unemployed => UNEMPLOYED_KEYWORD.to_string(),
            Slot::Hospital(h) => format!("#{}", h.0),
        };
        write!(f, "({},{})", s(self.0), s(self.1))
    }
}
