//! Monte Carlo existence rates over seeded random markets.

use std::fmt::Write as _;
use std::thread;

use farsight_core::stable_sets::{enumerate_dem, singleton_fss, stable_matchings, Context, SearchOptions};
use farsight_core::{BlockMode, Policy};

use crate::random::{random_market, ParamError, RandomParams, GENERATOR};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub markets: usize,
    pub stable: usize,
    pub singleton_fss: usize,
    /// A DEM set turned up within the search budget.
    pub dem_found: usize,
    /// Searches that found nothing but did not finish.
    pub dem_incomplete: usize,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.markets += o.markets;
        self.stable += o.stable;
        self.singleton_fss += o.singleton_fss;
        self.dem_found += o.dem_found;
        self.dem_incomplete += o.dem_incomplete;
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StatsConfig {
    pub seed: u64,
    pub count: u64,
    pub policy: Policy,
    pub search: SearchOptions,
    pub threads: usize,
}

fn one(params: &RandomParams, cfg: &StatsConfig, index: u64) -> Tally {
    let market = random_market(params, cfg.seed, index).expect("parameters checked");
    let mut t = Tally {
        markets: 1,
        ..Tally::default()
    };
    if !stable_matchings(&market, BlockMode::Extended).is_empty() {
        t.stable = 1;
    }
    if !singleton_fss(&market).is_empty() {
        t.singleton_fss = 1;
    }
    match Context::new(&market, cfg.policy).and_then(|ctx| enumerate_dem(&ctx, &cfg.search)) {
        Ok(s) if !s.sets.is_empty() => t.dem_found = 1,
        Ok(s) if !s.complete => t.dem_incomplete = 1,
        Ok(_) => {}
        Err(_) => t.dem_incomplete = 1,
    }
    t
}

/// Tallies `cfg.count` markets at one parameter point. Markets are split
/// across threads by index, so the result does not depend on `cfg.threads`.
pub fn tally(params: &RandomParams, cfg: &StatsConfig) -> Result<Tally, ParamError> {
    params.lengths()?;
    let threads = cfg.threads.max(1) as u64;
    let mut total = Tally::default();
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                s.spawn(move || {
                    let mut t = Tally::default();
                    let mut i = w;
                    while i < cfg.count {
                        t.add(&one(params, cfg, i));
                        i += threads;
                    }
                    t
                })
            })
            .collect();
        for h in handles {
            total.add(&h.join().expect("worker panicked"));
        }
    });
    Ok(total)
}

pub const CSV_HEADER: &str = "hospitals,couples,hospital_list_len,couple_list_len,markets,\
stable,stable_rate,singleton_fss,singleton_fss_rate,dem_found,dem_found_rate,dem_incomplete";

fn rate(k: usize, n: usize) -> String {
    if n == 0 {
        "nan".into()
    } else {
        format!("{:.4}", k as f64 / n as f64)
    }
}

pub fn csv_row(params: &RandomParams, t: &Tally) -> String {
    let (lh, lc) = params.lengths().unwrap_or((0, 0));
    format!(
        "{},{},{lh},{lc},{},{},{},{},{},{},{},{}",
        params.hospitals,
        params.couples,
        t.markets,
        t.stable,
        rate(t.stable, t.markets),
        t.singleton_fss,
        rate(t.singleton_fss, t.markets),
        t.dem_found,
        rate(t.dem_found, t.markets),
        t.dem_incomplete
    )
}

/// CSV with a comment header recording the generator and seed, then one row per point.
pub fn stats_csv(points: &[RandomParams], cfg: &StatsConfig) -> Result<String, ParamError> {
    let mut out = String::new();
    writeln!(
        out,
        "# generator {GENERATOR}, seed {}, {} markets per point",
        cfg.seed, cfg.count
    )
    .unwrap();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for p in points {
        let t = tally(p, cfg)?;
        writeln!(out, "{}", csv_row(p, &t)).unwrap();
    }
    Ok(out)
}
