//! Seeded Monte Carlo estimators for expected capacities.
//!
//! Trial `i` draws from its own stream derived from `(seed, model, i)`, trials
//! run in parallel and results are reduced in trial order, so a report depends
//! only on its parameters and seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{sample_gmsn_full, sample_rgmsn_full, Arrangement, GeometryError, Slope};
use crate::network::{self, Cmsn, Kind, Packet};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimateError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Summary of a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    /// Sample standard deviation divided by `√trials`; zero for one trial.
    pub stderr: f64,
    pub trials: usize,
    pub n: usize,
    pub seed: u64,
    /// Labelled side estimates (probability tables, redraw counts, references).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
    /// The per-trial values behind `mean`, in trial order.
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl EstimateReport {
    fn from_values(values: Vec<f64>, n: usize, seed: u64) -> Self {
        let trials = values.len();
        let mean = values.iter().sum::<f64>() / trials as f64;
        let stderr = if trials > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
            (var / trials as f64).sqrt()
        } else {
            0.0
        };
        EstimateReport { mean, stderr, trials, n, seed, extra: BTreeMap::new(), values }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), EstimateError> {
    if cond {
        Ok(())
    } else {
        Err(EstimateError::BadParams(msg()))
    }
}

/// Runs `f(trial_seed)` for every trial in parallel, keeping trial order.
fn run_trials<T: Send>(
    trials: usize,
    seed: u64,
    tag: &str,
    f: impl Fn(u64) -> Result<T, EstimateError> + Sync,
) -> Result<Vec<T>, EstimateError> {
    (0..trials as u64).into_par_iter().map(|i| f(rng::derive_seed(seed, tag, i))).collect()
}

/// Both the delivery total and `n·L` are exact in an `f64`, so the single
/// rounded division equals the exact capacity rounded once.
fn exact_capacity(c: &Cmsn) -> f64 {
    network::capacity_f64_unchecked(c)
}

/// Mean capacity of random line arrangements with `n ≥ 3` lines.
pub fn estimate_gmsn_capacity(n: usize, trials: usize, seed: u64) -> Result<EstimateReport, EstimateError> {
    check(n >= 3, || format!("n must be at least 3, got {n}"))?;
    check(trials >= 1, || "at least one trial is required".into())?;
    let caps = run_trials(trials, seed, "estimate-gmsn", |t| Ok(exact_capacity(&sample_gmsn_full(n, t)?.cmsn)))?;
    Ok(EstimateReport::from_values(caps, n, seed))
}

/// Draws a slope-restricted arrangement with at least one crossing.
/// Returns the sample and the number of redraws.
fn rgmsn_with_events(n: usize, s: usize, seed: u64) -> Result<(Arrangement, Cmsn, usize), EstimateError> {
    for redraw in 0..=crate::geometry::MAX_REJECTIONS {
        let sample = sample_rgmsn_full(n, s, rng::derive_seed(seed, "rgmsn-redraw", redraw as u64))?;
        if !sample.cmsn.is_empty() {
            return Ok((sample.arrangement, sample.cmsn, redraw));
        }
    }
    Err(GeometryError::DegenerateSampler(crate::geometry::MAX_REJECTIONS).into())
}

/// Mean capacity of random arrangements using `s ≥ 2` slopes. Draws without
/// any crossing are redrawn; the total is reported under `extra["redraws"]`.
pub fn estimate_rgmsn_capacity(n: usize, s: usize, trials: usize, seed: u64) -> Result<EstimateReport, EstimateError> {
    check(n >= 3, || format!("n must be at least 3, got {n}"))?;
    check(s >= 2, || format!("s must be at least 2, got {s}"))?;
    check(trials >= 1, || "at least one trial is required".into())?;
    let out = run_trials(trials, seed, "estimate-rgmsn", |t| {
        let (_, c, redraws) = rgmsn_with_events(n, s, t)?;
        Ok((exact_capacity(&c), redraws))
    })?;
    let redraws: usize = out.iter().map(|o| o.1).sum();
    let mut report = EstimateReport::from_values(out.into_iter().map(|o| o.0).collect(), n, seed);
    report.extra.insert("redraws".into(), redraws as f64);
    Ok(report)
}

/// Label of a reach-table entry.
pub fn reach_label(i: usize, j: usize, k: usize) -> String {
    format!("P({i},{j},{k})")
}

/// Class of each line, numbered from 1 by increasing slope.
fn slope_ranks(arr: &Arrangement, slopes_sorted: &[&Slope]) -> Vec<usize> {
    arr.lines.iter().map(|l| 1 + slopes_sorted.iter().position(|s| **s == l.slope).expect("slope is drawn")).collect()
}

/// Hit and trial counts per table entry for one arrangement.
fn reach_counts(arr: &Arrangement, c: &Cmsn, s: usize) -> BTreeMap<(usize, usize, usize), (u64, u64)> {
    let mut distinct: Vec<&Slope> = arr.lines.iter().map(|l| &l.slope).collect();
    distinct.sort_by(|a, b| a.finite().cmp(&b.finite()));
    distinct.dedup();
    let rank = slope_ranks(arr, &distinct);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); s + 1];
    for (i, &r) in rank.iter().enumerate() {
        members[r].push(i + 1);
    }
    let sets = network::delivery_sets(c);
    let mut counts = BTreeMap::new();
    for (p, d) in c.events().iter().zip(&sets) {
        let (ci, cj) = (rank[p.u - 1].min(rank[p.v - 1]), rank[p.u - 1].max(rank[p.v - 1]));
        for (k, lines) in members.iter().enumerate().skip(1) {
            let mut hits = 0u64;
            let mut total = 0u64;
            for &w in lines {
                if p.contains(w) {
                    continue;
                }
                total += 1;
                hits += u64::from(d.contains(w));
            }
            if total > 0 {
                let e = counts.entry((ci, cj, k)).or_insert((0, 0));
                e.0 += hits;
                e.1 += total;
            }
        }
    }
    counts
}

/// Probability that the packet of a crossing between a class-`i` and a
/// class-`j` line (`i < j`, classes numbered by increasing slope) reaches a
/// random other line of class `k`.
///
/// Entries pool hits over all trials and appear in `extra` as `P(i,j,k)`.
/// `mean` and `stderr` describe the per-trial average of the table. Only
/// draws where every one of the `s` slopes is used contribute; others are
/// redrawn.
pub fn estimate_reach_table(s: usize, n: usize, trials: usize, seed: u64) -> Result<EstimateReport, EstimateError> {
    check(s == 3 || s == 4, || format!("reach tables are defined for s = 3 or 4, got {s}"))?;
    check(n >= 2 * s, || format!("n must be at least {}, got {n}", 2 * s))?;
    check(trials >= 1, || "at least one trial is required".into())?;
    let per_trial = run_trials(trials, seed, "estimate-reach", |t| {
        for redraw in 0..=crate::geometry::MAX_REJECTIONS {
            let sample = sample_rgmsn_full(n, s, rng::derive_seed(t, "reach-redraw", redraw as u64))?;
            let used: std::collections::HashSet<&Slope> = sample.arrangement.lines.iter().map(|l| &l.slope).collect();
            if used.len() == s {
                return Ok(reach_counts(&sample.arrangement, &sample.cmsn, s));
            }
        }
        Err(GeometryError::DegenerateSampler(crate::geometry::MAX_REJECTIONS).into())
    })?;
    let mut pooled: BTreeMap<(usize, usize, usize), (u64, u64)> = BTreeMap::new();
    let mut averages = Vec::with_capacity(trials);
    for counts in &per_trial {
        let mut sum = 0.0;
        for (key, &(h, t)) in counts {
            let e = pooled.entry(*key).or_insert((0, 0));
            e.0 += h;
            e.1 += t;
            sum += h as f64 / t as f64;
        }
        averages.push(sum / counts.len() as f64);
    }
    let mut report = EstimateReport::from_values(averages, n, seed);
    for ((i, j, k), (h, t)) in pooled {
        report.extra.insert(reach_label(i, j, k), h as f64 / t as f64);
    }
    Ok(report)
}

/// Group size `⌈n ln n⌉` used by the partition experiment.
pub fn partition_group_size(n: usize) -> usize {
    ((n as f64) * (n as f64).ln()).ceil().max(1.0) as usize
}

fn all_pairs(n: usize) -> Vec<Packet> {
    (1..=n).flat_map(|u| (u + 1..=n).map(move |v| Packet { u, v })).collect()
}

/// Shuffles all pairs of `n ≥ 2` sensors, cuts the sequence into consecutive
/// groups of `⌈n ln n⌉` pairs (the last may be short) and reports the mean
/// fraction of groups that mention every sensor.
///
/// `extra` carries the group size and the reference value `1 − ln(n)/n`.
pub fn partition_conjecture_experiment(n: usize, trials: usize, seed: u64) -> Result<EstimateReport, EstimateError> {
    check(n >= 2, || format!("n must be at least 2, got {n}"))?;
    check(trials >= 1, || "at least one trial is required".into())?;
    let g = partition_group_size(n);
    let fractions = run_trials(trials, seed, "estimate-conjecture", |t| {
        let mut pairs = all_pairs(n);
        pairs.shuffle(&mut rng::stream(t, "conjecture-order", 0));
        let mut full = 0usize;
        let mut groups = 0usize;
        let mut seen = vec![false; n + 1];
        for chunk in pairs.chunks(g) {
            groups += 1;
            seen.iter_mut().for_each(|x| *x = false);
            for p in chunk {
                seen[p.u] = true;
                seen[p.v] = true;
            }
            full += usize::from(seen[1..].iter().all(|&x| x));
        }
        Ok(full as f64 / groups as f64)
    })?;
    let mut report = EstimateReport::from_values(fractions, n, seed);
    report.extra.insert("group_size".into(), g as f64);
    report.extra.insert("reference".into(), 1.0 - (n as f64).ln() / n as f64);
    Ok(report)
}

/// Mean capacity of uniformly random orderings of all pairs of `n ≥ 2` sensors.
pub fn random_rcmsn_capacity(n: usize, trials: usize, seed: u64) -> Result<EstimateReport, EstimateError> {
    check(n >= 2, || format!("n must be at least 2, got {n}"))?;
    check(trials >= 1, || "at least one trial is required".into())?;
    let caps = run_trials(trials, seed, "estimate-random-rcmsn", |t| {
        let mut pairs = all_pairs(n);
        pairs.shuffle(&mut rng::stream(t, "random-rcmsn-order", 0));
        let c = Cmsn::new(n, pairs, Kind::Rcmsn).expect("every pair once");
        Ok(exact_capacity(&c))
    })?;
    Ok(EstimateReport::from_values(caps, n, seed))
}
