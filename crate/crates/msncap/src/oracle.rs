//! Brute-force reference implementations used to cross-check the fast paths.
//!
//! Nothing here calls the code it checks: capacities are found by forward
//! propagation instead of the backward sweep, realizability by trying every
//! initial order, and linear feasibility by Fourier–Motzkin elimination.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::lp::{LinearSystem, Relation};
use crate::network::{CapacityReport, Cmsn, Kind, NetworkError, Packet};
use crate::rational::Rational;
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} is limited to {limit}, got {got}")]
    TooLarge { what: &'static str, limit: usize, got: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

fn guard(what: &'static str, limit: usize, got: usize) -> Result<(), OracleError> {
    if got > limit {
        Err(OracleError::TooLarge { what, limit, got })
    } else {
        Ok(())
    }
}

pub const CHAIN_MAX_N: usize = 12;

/// Deliveries by pushing each packet forward through later events.
pub fn capacity_chain_oracle(c: &Cmsn) -> Result<CapacityReport, OracleError> {
    guard("chain oracle sensor count", CHAIN_MAX_N, c.n())?;
    let ev = c.events();
    let mut counts = Vec::with_capacity(ev.len());
    for (k, start) in ev.iter().enumerate() {
        let mut holds = vec![false; c.n() + 1];
        holds[start.u] = true;
        holds[start.v] = true;
        for later in &ev[k + 1..] {
            if holds[later.u] || holds[later.v] {
                holds[later.u] = true;
                holds[later.v] = true;
            }
        }
        counts.push(holds.iter().filter(|&&h| h).count());
    }
    Ok(CapacityReport::from_deliveries(c.n(), counts)?)
}

/// Rearranges `v` into the next lexicographic permutation; false after the last.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn all_pairs(n: usize) -> Vec<Packet> {
    (1..=n).flat_map(|u| (u + 1..=n).map(move |v| Packet { u, v })).collect()
}

pub const EXHAUSTIVE_MAX_N: usize = 4;

/// Calls `f` on every ordering of all pairs of `n ≤ 4` sensors.
pub fn for_each_rcmsn(n: usize, mut f: impl FnMut(&Cmsn)) -> Result<(), OracleError> {
    guard("exhaustive enumeration sensor count", EXHAUSTIVE_MAX_N, n)?;
    let mut order = all_pairs(n);
    loop {
        f(&Cmsn::new(n, order.clone(), Kind::Rcmsn)?);
        if !next_permutation(&mut order) {
            return Ok(());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremes {
    pub min: Rational,
    pub max: Rational,
    pub argmin: Cmsn,
    pub argmax: Cmsn,
}

/// Smallest and largest capacity over every event order on `2 ≤ n ≤ 4` sensors.
/// The first ordering (lexicographically) attaining each extreme is kept.
pub fn enumerate_rcmsn_extremes(n: usize) -> Result<Extremes, OracleError> {
    if n < 2 {
        return Err(NetworkError::EmptyNetwork { n, events: 0 }.into());
    }
    let mut best: Option<Extremes> = None;
    let mut failure = None;
    for_each_rcmsn(n, |c| {
        let cap = match capacity_chain_oracle(c) {
            Ok(r) => r.capacity,
            Err(e) => {
                failure.get_or_insert(e);
                return;
            }
        };
        match &mut best {
            None => best = Some(Extremes { min: cap.clone(), max: cap, argmin: c.clone(), argmax: c.clone() }),
            Some(b) => {
                if cap < b.min {
                    b.min = cap.clone();
                    b.argmin = c.clone();
                }
                if cap > b.max {
                    b.max = cap;
                    b.argmax = c.clone();
                }
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(best.expect("at least one ordering")),
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Expected and largest absolute capacity of a two-slope network on `n ≥ 3`
/// lines when each line picks one of the two slopes by a fair coin.
///
/// With `m` lines in one class the absolute capacity is
/// `m(n−m)(n+2)/(n²(n−1))`, so the expectation is the binomial average.
pub fn expabs2_exact(n: usize) -> Result<(Rational, Rational), OracleError> {
    if n < 3 {
        return Err(NetworkError::EmptyNetwork { n, events: 0 }.into());
    }
    let nn = n as u64;
    let denom = BigInt::from(nn * nn * (nn - 1));
    let mut total = BigInt::zero();
    let mut best = BigInt::zero();
    for m in 0..=nn {
        let term = BigInt::from(m * (nn - m) * (nn + 2));
        total += binomial(nn, m) * &term;
        best = best.max(term);
    }
    let expected = Rational::new(total, denom.clone() * (BigInt::one() << n));
    Ok((expected, Rational::new(best, denom)))
}

pub const FM_MAX_VARS: usize = 8;
const FM_MAX_ROWS: usize = 500_000;

/// `coeffs·x ≥ rhs`, remembering which input rows were combined to derive it.
#[derive(Clone)]
struct Row {
    coeffs: Vec<Rational>,
    rhs: Rational,
    history: FixedBitSet,
}

/// Scales `row` so its first nonzero coefficient has absolute value 1.
fn normalized(mut row: Row) -> Row {
    if let Some(lead) = row.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
        for c in &mut row.coeffs {
            *c /= &lead;
        }
        row.rhs /= &lead;
    }
    row
}

/// Keeps only the tightest row for each direction and drops rows whose history
/// exceeds `max_history` (Kohler's bound); returns None on a violated constant row.
fn absorb(rows: Vec<Row>, max_history: usize) -> Option<Vec<Row>> {
    let mut tight: HashMap<Vec<Rational>, (Rational, FixedBitSet)> = HashMap::new();
    for r in rows {
        if r.coeffs.iter().all(Zero::is_zero) {
            if r.rhs.is_positive() {
                return None;
            }
            continue;
        }
        if r.history.count_ones(..) > max_history {
            continue;
        }
        let r = normalized(r);
        tight
            .entry(r.coeffs)
            .and_modify(|(rhs, history)| {
                if r.rhs > *rhs {
                    *rhs = r.rhs.clone();
                    *history = r.history.clone();
                }
            })
            .or_insert((r.rhs, r.history));
    }
    Some(tight.into_iter().map(|(coeffs, (rhs, history))| Row { coeffs, rhs, history }).collect())
}

/// Decides feasibility of a system with at most eight variables by
/// Fourier–Motzkin elimination.
///
/// Strict rows `a·x > b` become `a·x − ε ≥ b` with an extra variable `ε ≤ 1`;
/// the system is feasible exactly when the projection onto `ε` admits some
/// `ε > 0`. With every row non-strict, a row derived from more than `k + 1`
/// inputs after `k` eliminations is redundant and can be dropped.
pub fn fm_feasibility(sys: &LinearSystem) -> Result<bool, OracleError> {
    guard("Fourier-Motzkin variable count", FM_MAX_VARS, sys.num_vars)?;
    let nv = sys.num_vars;
    let eps = nv;
    let mut inputs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in &sys.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.push(if c.rel == Relation::Gt { -Rational::one() } else { Rational::zero() });
        if c.rel == Relation::Eq {
            inputs.push((coeffs.iter().map(|x| -x).collect(), -&c.rhs));
        }
        inputs.push((coeffs, c.rhs.clone()));
    }
    let mut cap = vec![Rational::zero(); nv + 1];
    cap[eps] = -Rational::one();
    inputs.push((cap, -Rational::one()));
    let total = inputs.len();
    let mut rows: Vec<Row> = inputs
        .into_iter()
        .enumerate()
        .map(|(i, (coeffs, rhs))| {
            let mut history = FixedBitSet::with_capacity(total);
            history.insert(i);
            Row { coeffs, rhs, history }
        })
        .collect();
    let mut live: Vec<usize> = (0..nv).collect();
    let mut eliminated = 0usize;
    loop {
        let Some(mut current) = absorb(rows, eliminated + 1) else { return Ok(false) };
        if live.is_empty() {
            // Only ε remains: lo ≤ ε ≤ hi with hi ≤ 1.
            let mut lo: Option<Rational> = None;
            let mut hi = Rational::one();
            for r in &current {
                let a = &r.coeffs[eps];
                let bound = &r.rhs / a;
                if a.is_positive() {
                    lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
                } else {
                    hi = hi.min(bound);
                }
            }
            return Ok(hi.is_positive() && lo.is_none_or(|l| l <= hi));
        }
        // Eliminate the variable producing the fewest combined rows.
        let cost = |j: usize| {
            let pos = current.iter().filter(|r| r.coeffs[j].is_positive()).count();
            let neg = current.iter().filter(|r| r.coeffs[j].is_negative()).count();
            pos * neg
        };
        let (slot, &j) = live.iter().enumerate().min_by_key(|(_, &j)| cost(j)).expect("live is nonempty");
        live.swap_remove(slot);
        eliminated += 1;
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in current.drain(..) {
            if r.coeffs[j].is_positive() {
                pos.push(r);
            } else if r.coeffs[j].is_negative() {
                neg.push(r);
            } else {
                keep.push(r);
            }
        }
        for p in &pos {
            for q in &neg {
                let mut history = p.history.clone();
                history.union_with(&q.history);
                if history.count_ones(..) > eliminated + 1 {
                    continue;
                }
                guard("Fourier-Motzkin row count", FM_MAX_ROWS, keep.len() + 1)?;
                let (wp, wq) = (-&q.coeffs[j], p.coeffs[j].clone());
                let coeffs = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| a * &wp + b * &wq).collect();
                keep.push(Row { coeffs, rhs: &p.rhs * &wp + &q.rhs * &wq, history });
            }
        }
        rows = keep;
    }
}

pub const WIRING_SEARCH_MAX_N: usize = 8;

/// Every initial top-to-bottom order from which the events can be replayed as
/// swaps of adjacent lines, in lexicographic order.
pub fn wiring_search_oracle(c: &Cmsn) -> Result<Vec<Vec<usize>>, OracleError> {
    guard("wiring search sensor count", WIRING_SEARCH_MAX_N, c.n())?;
    let mut order: Vec<usize> = (1..=c.n()).collect();
    let mut found = Vec::new();
    loop {
        let mut line = order.clone();
        let replayable = c.events().iter().all(|p| {
            let i = line.iter().position(|&x| x == p.u).expect("valid id");
            let j = line.iter().position(|&x| x == p.v).expect("valid id");
            line.swap(i, j);
            i.abs_diff(j) == 1
        });
        if replayable {
            found.push(order.clone());
        }
        if !next_permutation(&mut order) {
            return Ok(found);
        }
    }
}

/// A uniformly random ordering of all pairs of `n` sensors.
pub fn random_rcmsn(n: usize, seed: u64) -> Cmsn {
    let mut pairs = all_pairs(n);
    pairs.shuffle(&mut rng::stream(seed, "oracle-rcmsn", 0));
    Cmsn::new(n, pairs, Kind::Rcmsn).expect("all pairs once")
}

/// A random nonempty subset of the pairs of `n ≥ 2` sensors in random order.
pub fn random_cmsn(n: usize, seed: u64) -> Cmsn {
    let mut rng = rng::stream(seed, "oracle-cmsn", 0);
    let mut pairs = all_pairs(n);
    pairs.shuffle(&mut rng);
    let total = pairs.len();
    pairs.truncate(rng.gen_range(1..=total));
    let kind = if pairs.len() == total { Kind::Rcmsn } else { Kind::Cmsn };
    Cmsn::new(n, pairs, kind).expect("distinct pairs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{feasible_strict, Constraint};
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn row(c: &[i64], rel: Relation, rhs: i64) -> Constraint {
        Constraint::new(c.iter().map(|&x| int(x)).collect(), rel, int(rhs))
    }

    #[test]
    fn chain_oracle_example() {
        let c = Cmsn::from_pairs(3, &[(2, 3), (1, 3), (1, 2)], Kind::Rcmsn).unwrap();
        assert_eq!(capacity_chain_oracle(&c).unwrap().deliveries, vec![3, 3, 2]);
        let big = random_rcmsn(13, 1);
        assert!(matches!(capacity_chain_oracle(&big), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn extremes_for_small_n() {
        let e3 = enumerate_rcmsn_extremes(3).unwrap();
        assert_eq!((e3.min, e3.max), (rat(8, 9), rat(8, 9)));
        let e4 = enumerate_rcmsn_extremes(4).unwrap();
        assert_eq!((e4.min, e4.max), (rat(5, 6), rat(7, 8)));
        assert!(enumerate_rcmsn_extremes(5).is_err());
        let mut count = 0;
        for_each_rcmsn(4, |_| count += 1).unwrap();
        assert_eq!(count, 720);
    }

    #[test]
    fn two_slope_sums() {
        assert_eq!(expabs2_exact(4).unwrap(), (rat(3, 8), rat(1, 2)));
        assert_eq!(expabs2_exact(5).unwrap(), (rat(7, 20), rat(21, 50)));
        for n in 3..=40 {
            assert_eq!(expabs2_exact(n).unwrap().0, rat(n as i64 + 2, 4 * n as i64));
        }
    }

    #[test]
    fn fm_examples() {
        let mut s = LinearSystem::new(1);
        s.push(row(&[1], Relation::Gt, 0));
        s.push(row(&[-1], Relation::Gt, 0));
        assert!(!fm_feasibility(&s).unwrap());

        let mut cyc = LinearSystem::new(3);
        cyc.push(row(&[1, -1, 0], Relation::Gt, 0));
        cyc.push(row(&[0, 1, -1], Relation::Gt, 0));
        cyc.push(row(&[-1, 0, 1], Relation::Gt, 0));
        assert!(!fm_feasibility(&cyc).unwrap());

        let mut touch = LinearSystem::new(1);
        touch.push(row(&[1], Relation::Ge, 1));
        touch.push(row(&[-1], Relation::Ge, -1));
        assert!(fm_feasibility(&touch).unwrap());
        touch.push(row(&[1], Relation::Gt, 1));
        assert!(!fm_feasibility(&touch).unwrap());

        let mut eq = LinearSystem::new(2);
        eq.push(row(&[1, 1], Relation::Eq, 2));
        eq.push(row(&[1, -1], Relation::Gt, 0));
        assert!(fm_feasibility(&eq).unwrap());
        assert!(fm_feasibility(&LinearSystem::new(9)).is_err());
    }

    #[test]
    fn wiring_search_finds_mirror_pairs() {
        let c = Cmsn::from_pairs(3, &[(2, 3), (1, 3), (1, 2)], Kind::Rcmsn).unwrap();
        assert_eq!(wiring_search_oracle(&c).unwrap(), vec![vec![1, 2, 3], vec![3, 2, 1]]);
    }

    #[test]
    fn permutation_walk_is_complete() {
        let mut v = vec![1, 2, 3, 4];
        let mut k = 1;
        while next_permutation(&mut v) {
            k += 1;
        }
        assert_eq!(k, 24);
        assert_eq!(v, vec![4, 3, 2, 1]);
    }

    proptest! {
        #[test]
        fn fm_agrees_with_simplex(rows in proptest::collection::vec(
            (proptest::collection::vec(-3i64..=3, 3), 0usize..2), 1..10)) {
            let mut s = LinearSystem::new(3);
            for (c, strict) in rows {
                s.push(row(&c, if strict == 1 { Relation::Gt } else { Relation::Ge }, 0));
            }
            let simplex = feasible_strict(&s).unwrap().is_feasible();
            prop_assert_eq!(fm_feasibility(&s).unwrap(), simplex);
        }

        #[test]
        fn random_cmsn_is_valid(n in 2usize..=7, seed in any::<u64>()) {
            let c = random_cmsn(n, seed);
            prop_assert!(!c.is_empty());
            prop_assert!(crate::network::validate(&c).is_ok());
        }
    }
}
