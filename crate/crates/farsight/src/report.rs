//! JSON and text renderings of verdicts and reports.
//!
//! Every JSON document carries `verdict`, and where they apply `certificate`
//! (evidence for a true verdict), `witness` (evidence against), `set` and
//! `condition`.

use std::fmt::Write as _;

use farsight_core::dominance::{DominancePath, Relation};
use farsight_core::stable_sets::{Condition, Pool, SetSearch, StableSetReport, Verdict};
use farsight_core::{BlockWitness, Coalition, DominanceVerdict, Market, Matching};
use serde::Serialize;

use crate::format::serialize_matching;

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct StepJson {
    pub coalition: Vec<String>,
    pub to: String,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct PathJson {
    pub start: String,
    pub steps: Vec<StepJson>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct WitnessJson {
    pub kind: &'static str,
    pub coalition: Vec<String>,
    /// The couple's pair after the block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

pub fn coalition_names(market: &Market, t: &Coalition) -> Vec<String> {
    t.agents().map(|a| a.name(market).to_string()).collect()
}

pub fn path_json(market: &Market, p: &DominancePath) -> PathJson {
    PathJson {
        start: serialize_matching(market, &p.start),
        steps: p
            .steps
            .iter()
            .map(|s| StepJson {
                coalition: coalition_names(market, &s.coalition),
                to: serialize_matching(market, &s.to),
            })
            .collect(),
    }
}

pub fn witness_json(market: &Market, w: &BlockWitness) -> WitnessJson {
    let kind = match w {
        BlockWitness::Hospital { .. } => "hospital",
        BlockWitness::Unmatch { .. } => "unmatch",
        BlockWitness::Triple { .. } => "triple",
        BlockWitness::Single { .. } => "single",
        BlockWitness::Partial { .. } => "partial",
    };
    WitnessJson {
        kind,
        coalition: coalition_names(market, &w.coalition()),
        target: w
            .target()
            .map(|p| format!("({},{})", market.slot_name(p.0), market.slot_name(p.1))),
    }
}

pub fn verdict_word(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

fn set_verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "true",
        Verdict::Fails => "false",
        Verdict::Unknown => "unknown",
    }
}

fn condition_word(c: Condition) -> &'static str {
    match c {
        Condition::Farsighted => "farsighted",
        Condition::Dem => "dem",
    }
}

pub fn pool_word(p: Pool) -> &'static str {
    match p {
        Pool::IndividuallyRational => "ir",
        Pool::All => "all",
    }
}

pub fn relation_word(r: Relation) -> &'static str {
    match r {
        Relation::Direct => "direct",
        Relation::Indirect => "indirect",
    }
}

#[derive(Serialize, Debug)]
pub struct DominanceJson {
    pub relation: &'static str,
    pub dominator: String,
    pub dominated: String,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

pub fn dominance_json(
    market: &Market,
    relation: Relation,
    a: &Matching,
    b: &Matching,
    v: &DominanceVerdict,
) -> DominanceJson {
    DominanceJson {
        relation: relation_word(relation),
        dominator: serialize_matching(market, a),
        dominated: serialize_matching(market, b),
        verdict: verdict_word(v.holds()),
        certificate: v.path().map(|p| path_json(market, p)),
        witness: match v {
            DominanceVerdict::Refuted(Some(w)) => Some(witness_json(market, w)),
            _ => None,
        },
    }
}

pub fn dominance_text(market: &Market, relation: Relation, a: &Matching, b: &Matching, v: &DominanceVerdict) -> String {
    let mut out = String::new();
    let sym = match relation {
        Relation::Direct => ">",
        Relation::Indirect => ">>",
    };
    writeln!(
        out,
        "{} {sym} {}: {}",
        serialize_matching(market, a),
        serialize_matching(market, b),
        verdict_word(v.holds())
    )
    .unwrap();
    match v {
        DominanceVerdict::Dominates(p) => write_path(&mut out, market, p, "  "),
        DominanceVerdict::Refuted(Some(w)) => {
            let j = witness_json(market, w);
            writeln!(
                out,
                "  blocked by {} {{{}}}{}, which the dominated matching locks in",
                j.kind,
                j.coalition.join(", "),
                j.target.map(|t| format!(" moving to {t}")).unwrap_or_default()
            )
            .unwrap();
        }
        DominanceVerdict::Refuted(None) => {}
        DominanceVerdict::Unknown => writeln!(out, "  undecided within the configured budgets").unwrap(),
    }
    out
}

fn write_path(out: &mut String, market: &Market, p: &DominancePath, indent: &str) {
    for (i, s) in p.steps.iter().enumerate() {
        writeln!(
            out,
            "{indent}T{i} = {{{}}} -> {}",
            coalition_names(market, &s.coalition).join(", "),
            serialize_matching(market, &s.to)
        )
        .unwrap();
    }
}

#[derive(Serialize, Debug)]
pub struct PairJson {
    pub dominator: String,
    pub dominated: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessJson>,
}

#[derive(Serialize, Debug)]
pub struct DeterrenceJson {
    pub member: String,
    pub deviation: String,
    pub coalition: Vec<String>,
    pub deterrer: String,
    pub unmoved: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathJson>,
}

#[derive(Serialize, Debug)]
pub struct FailureJson {
    pub member: String,
    pub deviation: String,
    pub coalition: Vec<String>,
}

#[derive(Serialize, Debug, Default)]
pub struct SetCertificate {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub internal_non_dominance: Vec<PairJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deterrence: Vec<DeterrenceJson>,
    pub external_checked: usize,
}

#[derive(Serialize, Debug, Default)]
pub struct SetWitness {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub internal_violations: Vec<PairJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub external_uncovered: Vec<String>,
    pub external_uncovered_count: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deterrence_failures: Vec<FailureJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimality: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<(String, String)>,
    pub undecided_count: usize,
}

#[derive(Serialize, Debug)]
pub struct SetReportJson {
    pub condition: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub universe: Option<&'static str>,
    pub set: Vec<String>,
    pub verdict: &'static str,
    pub certificate: SetCertificate,
    pub witness: SetWitness,
}

pub fn set_report_json(market: &Market, r: &StableSetReport, universe: Option<Pool>) -> SetReportJson {
    let lit = |m: &Matching| serialize_matching(market, m);
    let at = |i: usize| lit(&r.set[i]);
    SetReportJson {
        condition: condition_word(r.condition),
        universe: universe.map(pool_word),
        set: r.set.iter().map(lit).collect(),
        verdict: set_verdict_word(r.verdict),
        certificate: SetCertificate {
            internal_non_dominance: r
                .internal_non_dominance
                .iter()
                .map(|x| PairJson {
                    dominator: at(x.dominator),
                    dominated: at(x.dominated),
                    path: None,
                    witnesses: x.witnesses.iter().map(|w| witness_json(market, w)).collect(),
                })
                .collect(),
            deterrence: r
                .deterrence_witnesses
                .iter()
                .map(|d| DeterrenceJson {
                    member: at(d.member),
                    deviation: lit(&d.deviation),
                    coalition: coalition_names(market, &d.coalition),
                    deterrer: at(d.deterrer),
                    unmoved: d.unmoved.name(market).to_string(),
                    path: d.path.as_ref().map(|p| path_json(market, p)),
                })
                .collect(),
            external_checked: r.external_checked,
        },
        witness: SetWitness {
            internal_violations: r
                .internal_violations
                .iter()
                .map(|x| PairJson {
                    dominator: at(x.dominator),
                    dominated: at(x.dominated),
                    path: x.path.as_ref().map(|p| path_json(market, p)),
                    witnesses: Vec::new(),
                })
                .collect(),
            external_uncovered: r.external_uncovered.iter().map(lit).collect(),
            external_uncovered_count: r.external_uncovered_count,
            deterrence_failures: r
                .deterrence_failures
                .iter()
                .map(|f| FailureJson {
                    member: at(f.member),
                    deviation: lit(&f.deviation),
                    coalition: coalition_names(market, &f.coalition),
                })
                .collect(),
            minimality: r.minimality_witness.as_ref().map(|s| s.iter().map(lit).collect()),
            undecided: r.undecided.iter().map(|(i, m)| (at(*i), lit(m))).collect(),
            undecided_count: r.undecided_count,
        },
    }
}

pub fn set_report_text(market: &Market, r: &StableSetReport) -> String {
    let j = set_report_json(market, r, None);
    let mut out = String::new();
    let what = match r.condition {
        Condition::Farsighted => "farsighted stable set",
        Condition::Dem => "DEM farsighted stable set",
    };
    writeln!(out, "{what}: {}", j.verdict).unwrap();
    for m in &j.set {
        writeln!(out, "  member {m}").unwrap();
    }
    for x in &j.certificate.internal_non_dominance {
        let blocks: Vec<String> = x
            .witnesses
            .iter()
            .map(|w| format!("{{{}}}", w.coalition.join(", ")))
            .collect();
        writeln!(
            out,
            "  {} does not dominate {}: {}",
            x.dominator,
            x.dominated,
            blocks.join(" ")
        )
        .unwrap();
    }
    for x in &r.internal_violations {
        writeln!(
            out,
            "  {} >> {}",
            at(market, r, x.dominator),
            at(market, r, x.dominated)
        )
        .unwrap();
        if let Some(p) = &x.path {
            write_path(&mut out, market, p, "    ");
        }
    }
    writeln!(
        out,
        "  external: {} outside matchings checked, {} uncovered",
        r.external_checked, r.external_uncovered_count
    )
    .unwrap();
    for m in &j.witness.external_uncovered {
        writeln!(out, "    uncovered {m}").unwrap();
    }
    for f in &j.witness.deterrence_failures {
        writeln!(
            out,
            "  undeterred: {} -> {} by {{{}}}",
            f.member,
            f.deviation,
            f.coalition.join(", ")
        )
        .unwrap();
    }
    if !j.certificate.deterrence.is_empty() {
        writeln!(out, "  {} deviations deterred", j.certificate.deterrence.len()).unwrap();
    }
    if let Some(s) = &j.witness.minimality {
        writeln!(out, "  not minimal: [{}] also qualifies", s.join(", ")).unwrap();
    }
    if r.undecided_count > 0 {
        writeln!(out, "  {} dominance queries undecided", r.undecided_count).unwrap();
    }
    out
}

fn at(market: &Market, r: &StableSetReport, i: usize) -> String {
    serialize_matching(market, &r.set[i])
}

#[derive(Serialize, Debug)]
pub struct SearchJson {
    pub condition: &'static str,
    pub pool: &'static str,
    pub pool_size: usize,
    pub max_size: Option<usize>,
    pub strategy: &'static str,
    pub complete: bool,
    pub budget_exhausted: bool,
    pub undecided: bool,
    pub examined: u64,
    pub sets: Vec<Vec<String>>,
}

pub fn search_json(
    market: &Market,
    condition: Condition,
    pool: Pool,
    max_size: Option<usize>,
    s: &SetSearch,
) -> SearchJson {
    SearchJson {
        condition: condition_word(condition),
        pool: pool_word(pool),
        pool_size: s.pool_size,
        max_size,
        strategy: match s.strategy {
            farsight_core::stable_sets::Strategy::Auto => "auto",
            farsight_core::stable_sets::Strategy::Sweep => "sweep",
            farsight_core::stable_sets::Strategy::Kernel => "kernel",
        },
        complete: s.complete,
        budget_exhausted: s.budget_exhausted,
        undecided: s.undecided,
        examined: s.examined,
        sets: s
            .sets
            .iter()
            .map(|set| set.iter().map(|m| serialize_matching(market, m)).collect())
            .collect(),
    }
}

pub fn search_text(j: &SearchJson) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} sets from the {} pool ({} matchings, {} subsets examined by {}): {} found{}",
        j.condition,
        j.pool,
        j.pool_size,
        j.examined,
        j.strategy,
        j.sets.len(),
        if j.complete { "" } else { ", search incomplete" }
    )
    .unwrap();
    for s in &j.sets {
        writeln!(out, "  [{}]", s.join(", ")).unwrap();
    }
    out
}

#[derive(Serialize, Debug)]
pub struct AnalyzeJson {
    pub hospitals: usize,
    pub couples: usize,
    pub matchings: u128,
    pub individually_rational: usize,
    pub block_mode: &'static str,
    pub stable: Vec<String>,
    pub verdict: &'static str,
}
