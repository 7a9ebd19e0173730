use farsight_core::blocking::{directly_dominates, is_individually_rational, is_stable};
use farsight_core::dominance::{indirectly_dominates, lemma2_sufficient, matched_blocks_of, Oracle};
use farsight_core::enumeration::{enumerate_ir_matchings, enumerate_matchings};
use farsight_core::stable_sets::{verify_fss, Context};
use farsight_core::{BlockMode, DominanceVerdict, Market, MarketBuilder, Policy, Verdict};
use proptest::prelude::*;

/// Random acceptable subsets in random order, from include flags and sort keys.
fn pick<T: Clone>(items: &[T], keys: &[(bool, u16)]) -> Vec<T> {
    let mut chosen: Vec<(u16, T)> = items
        .iter()
        .zip(keys)
        .filter(|(_, k)| k.0)
        .map(|(x, k)| (k.1, x.clone()))
        .collect();
    chosen.sort_by_key(|(k, _)| *k);
    chosen.into_iter().map(|(_, x)| x).collect()
}

fn market_strategy() -> impl Strategy<Value = Market> {
    (1usize..=3, 1usize..=2)
        .prop_flat_map(|(m, n)| {
            let hospital_keys = prop::collection::vec(prop::collection::vec(any::<(bool, u16)>(), 2 * n), m);
            let pair_count = (m + 1) * (m + 1) - 1 - m;
            let couple_keys = prop::collection::vec(prop::collection::vec(any::<(bool, u16)>(), pair_count), n);
            (Just((m, n)), hospital_keys, couple_keys)
        })
        .prop_map(|((m, n), hk, ck)| build(m, n, &hk, &ck))
}

fn build(m: usize, n: usize, hk: &[Vec<(bool, u16)>], ck: &[Vec<(bool, u16)>]) -> Market {
    let hospitals: Vec<String> = (1..=m).map(|i| format!("h{i}")).collect();
    let students: Vec<String> = (1..=2 * n).map(|i| format!("s{i}")).collect();
    let mut slots: Vec<String> = hospitals.clone();
    slots.push("u".into());
    let mut pairs = Vec::new();
    for a in &slots {
        for b in &slots {
            if (a != b || a == "u") && !(a == "u" && b == "u") {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let mut b = MarketBuilder::new();
    for (i, h) in hospitals.iter().enumerate() {
        let list = pick(&students, &hk[i]);
        let refs: Vec<&str> = list.iter().map(String::as_str).collect();
        b = b.hospital(h, &refs);
    }
    for c in 0..n {
        let list = pick(&pairs, &ck[c]);
        let refs: Vec<(&str, &str)> = list.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
        b = b.couple(&format!("c{}", c + 1), (&students[2 * c], &students[2 * c + 1]), &refs);
    }
    b.build().expect("generated market is valid")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characterization_agrees_with_oracle(market in market_strategy()) {
        let oracle = Oracle::new(&market);
        let all: Vec<_> = enumerate_matchings(&market).collect();
        for mu in enumerate_ir_matchings(&market) {
            let row = oracle.dominated_by(&mu);
            for (j, nu) in all.iter().enumerate() {
                let v = indirectly_dominates(&market, &mu, nu, &Policy::default());
                match &v {
                    DominanceVerdict::Dominates(p) => {
                        prop_assert!(row.contains(j), "{mu:?} over {nu:?}");
                        prop_assert!(p.replay(&market).is_ok());
                        prop_assert_eq!(p.end(), &mu);
                    }
                    DominanceVerdict::Refuted(w) => {
                        prop_assert!(!row.contains(j), "{mu:?} over {nu:?}");
                        if let Some(w) = w {
                            prop_assert!(w.replays(&market, &mu));
                        }
                    }
                    DominanceVerdict::Unknown => prop_assert!(false, "undecided {mu:?} over {nu:?}"),
                }
            }
        }
    }

    #[test]
    fn direct_implies_indirect(market in market_strategy()) {
        let oracle = Oracle::new(&market);
        let all: Vec<_> = enumerate_matchings(&market).collect();
        for a in all.iter().step_by(2) {
            let row = oracle.dominated_by(a);
            for (j, b) in all.iter().enumerate() {
                if directly_dominates(&market, a, b).is_some() {
                    prop_assert!(row.contains(j));
                }
            }
        }
    }

    #[test]
    fn singleton_sets_are_stable_matchings(market in market_strategy()) {
        let ctx = Context::new(&market, Policy::default()).unwrap();
        for mu in enumerate_matchings(&market) {
            let v = verify_fss(&ctx, std::slice::from_ref(&mu)).unwrap().verdict;
            prop_assert_eq!(v == Verdict::Holds, is_stable(&market, &mu, BlockMode::Extended), "{:?}", mu);
        }
    }

    #[test]
    fn no_farsighted_stable_pair(market in market_strategy()) {
        let ctx = Context::new(&market, Policy::default()).unwrap();
        let ir: Vec<_> = enumerate_ir_matchings(&market).collect();
        for (i, a) in ir.iter().enumerate() {
            for b in &ir[i + 1..] {
                let v = verify_fss(&ctx, &[a.clone(), b.clone()]).unwrap().verdict;
                prop_assert_ne!(v, Verdict::Holds);
            }
        }
    }

    #[test]
    fn lemma2_condition_leaves_no_locked_block(market in market_strategy()) {
        let all: Vec<_> = enumerate_matchings(&market).collect();
        for mu in all.iter().filter(|m| is_individually_rational(&market, m)) {
            for nu in &all {
                if lemma2_sufficient(&market, mu, nu) == Ok(true) {
                    prop_assert!(matched_blocks_of(&market, mu, nu).is_empty());
                }
            }
        }
    }
}
