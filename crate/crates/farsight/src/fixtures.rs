//! Bundled example markets and their named matchings.

use farsight_core::blocking::directly_dominates;
use farsight_core::dominance::indirectly_dominates;
use farsight_core::enumeration::count_matchings;
use farsight_core::stable_sets::{
    enumerate_dem, enumerate_fss, stable_matchings, verify_dem, verify_fss, Context, Pool, SearchOptions, Strategy,
};
use farsight_core::{BlockMode, Coalition, Market, Matching, Policy, Verdict};

use crate::format::{parse_market, parse_matching};

pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    /// `(name, literal)` pairs, e.g. `("mu4", "{s1:h2, s2:h3}")`.
    pub matchings: &'static [(&'static str, &'static str)],
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "example1",
        source: include_str!("../../../fixtures/example1.cm"),
        matchings: &[
            ("mu1", "{s1:h3, s2:h1}"),
            ("mu2", "{s1:h1, s2:h2}"),
            ("mu3", "{s3:h2, s4:h3}"),
            ("mu4", "{s1:h2, s2:h3}"),
        ],
    },
    Fixture {
        name: "example2",
        source: include_str!("../../../fixtures/example2.cm"),
        matchings: &[
            ("mu", "{s1:h4, s2:h6, s5:h3, s7:h5, s8:h1, s9:h2}"),
            ("mu1", "{s1:h1, s2:h2, s3:h3, s5:h6, s6:h5, s9:h4}"),
            ("mu2", "{s1:h4, s2:h6, s6:h2, s7:h3, s8:h5, s10:h1}"),
            ("mu3", "{s3:h4, s4:h1, s5:h3, s7:h5, s8:h6, s9:h2}"),
        ],
    },
    Fixture {
        name: "example3",
        source: include_str!("../../../fixtures/example3.cm"),
        matchings: &[
            ("mu1", "{s1:h1, s2:h2, s3:h3, s5:h6, s6:h5, s9:h4}"),
            ("mu2", "{s1:h4, s2:h6, s6:h2, s7:h3, s8:h5, s10:h1}"),
            ("mu3", "{s3:h4, s4:h1, s5:h3, s7:h5, s8:h6, s9:h2}"),
        ],
    },
    Fixture {
        name: "example4",
        source: include_str!("../../../fixtures/example4.cm"),
        matchings: &[("mu1", "{s1:h1, s2:h2}"), ("mu2", "{s3:h2}"), ("mu3", "{s3:h1}")],
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

impl Fixture {
    pub fn market(&self) -> Market {
        parse_market(self.source).expect("bundled fixture parses")
    }

    pub fn matching(&self, market: &Market, name: &str) -> Option<Matching> {
        let (_, lit) = self.matchings.iter().find(|(n, _)| *n == name)?;
        Some(parse_matching(lit, market).expect("bundled matching parses"))
    }

    /// Named matchings in declaration order.
    pub fn named(&self, market: &Market) -> Vec<(&'static str, Matching)> {
        self.matchings
            .iter()
            .map(|(n, lit)| (*n, parse_matching(lit, market).expect("bundled matching parses")))
            .collect()
    }
}

fn names(market: &Market, t: &Coalition) -> Vec<String> {
    t.agents().map(|a| a.name(market).to_string()).collect()
}

/// The documented facts about the bundled markets, each with its outcome.
pub fn check_all(policy: &Policy) -> Vec<(String, bool)> {
    let mut out: Vec<(String, bool)> = Vec::new();
    let mut check = |name: &str, pass: bool| out.push((name.to_string(), pass));

    let f = find("example1").expect("bundled");
    let m = f.market();
    let mu = |n: &str| f.matching(&m, n).expect("named matching");
    let ctx = Context::new(&m, *policy).expect("small space");
    check("example1: 73 matchings", count_matchings(&m) == 73);
    check(
        "example1: mu4 is the only stable matching",
        stable_matchings(&m, BlockMode::Extended) == vec![mu("mu4")],
    );
    for (a, b) in [("mu3", "mu1"), ("mu2", "mu3"), ("mu1", "mu2")] {
        check(
            &format!("example1: {a} > {b}"),
            directly_dominates(&m, &mu(a), &mu(b)).is_some(),
        );
        check(
            &format!("example1: not {b} > {a}"),
            directly_dominates(&m, &mu(b), &mu(a)).is_none(),
        );
    }
    for b in ["mu1", "mu2", "mu3"] {
        let v = indirectly_dominates(&m, &mu("mu4"), &mu(b), policy);
        let replays = v.path().is_some_and(|p| p.replay(&m).is_ok());
        check(&format!("example1: mu4 >> {b}"), replays);
    }
    check(
        "example1: [mu4] is farsighted stable",
        verify_fss(&ctx, &[mu("mu4")]).is_ok_and(|r| r.verdict == Verdict::Holds),
    );
    let all = SearchOptions {
        pool: Pool::All,
        ..SearchOptions::default()
    };
    check(
        "example1: [mu4] is the only farsighted stable set over all matchings",
        enumerate_fss(&ctx, &all).is_ok_and(|s| s.complete && s.sets == vec![vec![mu("mu4")]]),
    );

    let f = find("example2").expect("bundled");
    let m = f.market();
    let mu = |n: &str| f.matching(&m, n).expect("named matching");
    let ctx = Context::new(&m, *policy).expect("space within the scan limit");
    check("example2: 424051 matchings", count_matchings(&m) == 424_051);
    check(
        "example2: mu is the only stable matching",
        stable_matchings(&m, BlockMode::Extended) == vec![mu("mu")],
    );
    check(
        "example2: [mu] is farsighted stable",
        verify_fss(&ctx, &[mu("mu")]).is_ok_and(|r| r.verdict == Verdict::Holds),
    );
    check(
        "example2: [mu1, mu2, mu3] is farsighted stable",
        verify_fss(&ctx, &[mu("mu1"), mu("mu2"), mu("mu3")]).is_ok_and(|r| r.verdict == Verdict::Holds),
    );

    let f = find("example3").expect("bundled");
    let m = f.market();
    let mu = |n: &str| f.matching(&m, n).expect("named matching");
    let ctx = Context::new(&m, *policy).expect("space within the scan limit");
    check(
        "example3: no stable matching",
        stable_matchings(&m, BlockMode::Extended).is_empty(),
    );
    check(
        "example3: [mu1, mu2, mu3] is farsighted stable",
        verify_fss(&ctx, &[mu("mu1"), mu("mu2"), mu("mu3")]).is_ok_and(|r| r.verdict == Verdict::Holds),
    );

    let f = find("example4").expect("bundled");
    let m = f.market();
    let mu = |n: &str| f.matching(&m, n).expect("named matching");
    let ctx = Context::new(&m, *policy).expect("small space");
    check("example4: 21 matchings", count_matchings(&m) == 21);
    check(
        "example4: no stable matching",
        stable_matchings(&m, BlockMode::Extended).is_empty(),
    );
    let by = |a: &str, b: &str| directly_dominates(&m, &mu(a), &mu(b)).map(|t| names(&m, &t));
    check(
        "example4: mu3 > mu2 by {h1, c2}",
        by("mu3", "mu2") == Some(vec!["h1".into(), "c2".into()]),
    );
    check("example4: mu2 > mu1", by("mu2", "mu1").is_some());
    check("example4: mu1 > mu3", by("mu1", "mu3").is_some());
    let sweep = SearchOptions {
        pool: Pool::All,
        strategy: Strategy::Sweep,
        budget: 1 << 21,
        ..SearchOptions::default()
    };
    check(
        "example4: no farsighted stable set",
        enumerate_fss(&ctx, &sweep).is_ok_and(|s| s.complete && s.sets.is_empty()),
    );
    let dem = SearchOptions {
        max_size: Some(2),
        ..SearchOptions::default()
    };
    let found = enumerate_dem(&ctx, &dem).map(|s| s.sets).unwrap_or_default();
    for (a, b) in [("mu1", "mu2"), ("mu1", "mu3"), ("mu2", "mu3")] {
        let mut pair = vec![mu(a), mu(b)];
        pair.sort_by_key(|x| ctx.code(x));
        let verified = verify_dem(&ctx, &pair, Pool::IndividuallyRational, true).is_ok_and(|r| {
            r.verdict == Verdict::Holds
                && r.deterrence_witnesses
                    .iter()
                    .all(|d| d.path.as_ref().is_some_and(|p| p.replay(&m).is_ok()))
        });
        check(
            &format!("example4: [{a}, {b}] is a DEM set"),
            verified && found.contains(&pair),
        );
    }
    out
}
