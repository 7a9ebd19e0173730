//! Seeded random markets.
//!
//! Each list is a uniformly random acceptable subset of the requested length
//! in a uniformly random strict order. Market `i` of a run draws from stream
//! `i` of a ChaCha8 generator seeded with the run seed, so it does not depend
//! on how many markets are generated.

use std::fmt;

use farsight_core::market::MAX_AGENTS_PER_SIDE;
use farsight_core::{Market, MarketBuilder, Slot, SlotPair};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GENERATOR: &str = "ChaCha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub hospitals: usize,
    pub couples: usize,
    /// Hospital list length; `None` lists every student.
    pub hospital_list_len: Option<usize>,
    /// Couple list length; `None` lists every pair other than `(u,u)`.
    pub couple_list_len: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamError {
    TooManyAgents,
    HospitalList { len: usize, students: usize },
    CoupleList { len: usize, pairs: usize },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::TooManyAgents => write!(f, "at most {MAX_AGENTS_PER_SIDE} hospitals and couples are supported"),
            ParamError::HospitalList { len, students } => {
                write!(f, "hospital list length {len} exceeds the {students} students")
            }
            ParamError::CoupleList { len, pairs } => {
                write!(f, "couple list length {len} exceeds the {pairs} pairs other than (u,u)")
            }
        }
    }
}

impl std::error::Error for ParamError {}

impl RandomParams {
    pub fn students(&self) -> usize {
        2 * self.couples
    }

    /// Pairs a couple can list: distinct hospitals or one unemployed slot.
    pub fn pair_count(&self) -> usize {
        self.hospitals * self.hospitals + self.hospitals
    }

    pub fn lengths(&self) -> Result<(usize, usize), ParamError> {
        if self.hospitals > MAX_AGENTS_PER_SIDE || self.couples > MAX_AGENTS_PER_SIDE {
            return Err(ParamError::TooManyAgents);
        }
        let lh = self.hospital_list_len.unwrap_or(self.students());
        let lc = self.couple_list_len.unwrap_or(self.pair_count());
        if lh > self.students() {
            return Err(ParamError::HospitalList {
                len: lh,
                students: self.students(),
            });
        }
        if lc > self.pair_count() {
            return Err(ParamError::CoupleList {
                len: lc,
                pairs: self.pair_count(),
            });
        }
        Ok((lh, lc))
    }
}

/// Market `index` of the run seeded with `seed`.
pub fn random_market(params: &RandomParams, seed: u64, index: u64) -> Result<Market, ParamError> {
    let (lh, lc) = params.lengths()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);

    let hospitals: Vec<String> = (1..=params.hospitals).map(|i| format!("h{i}")).collect();
    let students: Vec<String> = (1..=params.students()).map(|i| format!("s{i}")).collect();
    let slot_name = |s: Slot| match s {
        Slot::Unemployed => "u".to_string(),
        Slot::Hospital(h) => hospitals[h.0].clone(),
    };
    let slots: Vec<Slot> = std::iter::once(Slot::Unemployed)
        .chain((0..params.hospitals).map(|h| Slot::Hospital(farsight_core::HospitalId(h))))
        .collect();
    let pairs: Vec<(String, String)> = slots
        .iter()
        .flat_map(|&a| slots.iter().map(move |&b| SlotPair(a, b)))
        .filter(|p| p.is_admissible() && *p != SlotPair::UNEMPLOYED)
        .map(|p| (slot_name(p.0), slot_name(p.1)))
        .collect();

    let mut b = MarketBuilder::new();
    for h in &hospitals {
        let mut list: Vec<&str> = students.iter().map(String::as_str).collect();
        list.shuffle(&mut rng);
        list.truncate(lh);
        b = b.hospital(h, &list);
    }
    for c in 0..params.couples {
        let mut list: Vec<(&str, &str)> = pairs.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
        list.shuffle(&mut rng);
        list.truncate(lc);
        b = b.couple(&format!("c{}", c + 1), (&students[2 * c], &students[2 * c + 1]), &list);
    }
    Ok(b.build().expect("generated markets are valid"))
}

/// Comment block recording how a market was drawn.
pub fn header(params: &RandomParams, seed: u64, index: u64) -> String {
    let (lh, lc) = params.lengths().unwrap_or((0, 0));
    format!(
        "# random market {index}: generator {GENERATOR}, seed {seed}, stream {index}\n\
         # hospitals {} couples {} hospital-list-len {lh} couple-list-len {lc}\n",
        params.hospitals, params.couples
    )
}
