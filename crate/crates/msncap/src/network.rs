//! Network representation and the capacity engine.
//!
//! A [`Cmsn`] is an ordered list of communication events between pairs of
//! sensors. Sensors are numbered `1..=n`.

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{choose2, Rational};

/// An unordered pair of sensors that meet, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Packet {
    pub u: usize,
    pub v: usize,
}

impl Packet {
    /// Normalizes the order of the endpoints. `a == b` is rejected later by validation.
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Packet { u: a, v: b }
        } else {
            Packet { u: b, v: a }
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    pub fn shares_sensor(&self, other: &Packet) -> bool {
        self.contains(other.u) || self.contains(other.v)
    }
}

impl fmt::Display for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Every pair meets exactly once.
    Rcmsn,
    /// Pairs meet at most once.
    Cmsn,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("pair {pair} occurs more than once (event {index})")]
    DuplicatePair { pair: Packet, index: usize },
    #[error("sensor id {id} outside 1..={n} (event {index})")]
    OutOfRangeId { id: usize, n: usize, index: usize },
    #[error("event {index} pairs sensor {id} with itself")]
    SelfPair { id: usize, index: usize },
    #[error("restricted network needs {expected} events, found {found}")]
    NotExhaustive { expected: u64, found: usize },
    #[error("capacity is undefined for an empty network (n = {n}, {events} events)")]
    EmptyNetwork { n: usize, events: usize },
    #[error("event index {index} outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("sensor {id} outside 1..={n}")]
    SensorOutOfRange { id: usize, n: usize },
}

/// A combinatorial mobile sensor network: `n` sensors and an ordered list of meetings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cmsn {
    n: usize,
    events: Vec<Packet>,
    kind: Kind,
}

impl Cmsn {
    /// Builds and validates a network.
    pub fn new(n: usize, events: Vec<Packet>, kind: Kind) -> Result<Self, NetworkError> {
        let c = Cmsn { n, events, kind };
        validate(&c)?;
        Ok(c)
    }

    /// Builds a network from `(a, b)` tuples.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)], kind: Kind) -> Result<Self, NetworkError> {
        let mut events = Vec::with_capacity(pairs.len());
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a == b {
                return Err(NetworkError::SelfPair { id: a, index: i + 1 });
            }
            events.push(Packet::new(a, b));
        }
        Cmsn::new(n, events, kind)
    }

    /// Builds without validation; callers must uphold the invariants.
    pub(crate) fn from_parts_unchecked(n: usize, events: Vec<Packet>, kind: Kind) -> Self {
        Cmsn { n, events, kind }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[Packet] {
        &self.events
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Same events with sensor ids renamed through `perm` (`perm[i-1]` is the new id of `i`).
    pub fn relabeled(&self, perm: &[usize]) -> Cmsn {
        let events = self.events.iter().map(|p| Packet::new(perm[p.u - 1], perm[p.v - 1])).collect();
        Cmsn { n: self.n, events, kind: self.kind }
    }
}

/// Checks the invariants of a [`Cmsn`] without changing it.
pub fn validate(c: &Cmsn) -> Result<(), NetworkError> {
    let mut seen = HashSet::with_capacity(c.events.len());
    for (i, p) in c.events.iter().enumerate() {
        let index = i + 1;
        for id in [p.u, p.v] {
            if id == 0 || id > c.n {
                return Err(NetworkError::OutOfRangeId { id, n: c.n, index });
            }
        }
        if p.u == p.v {
            return Err(NetworkError::SelfPair { id: p.u, index });
        }
        if !seen.insert(*p) {
            return Err(NetworkError::DuplicatePair { pair: *p, index });
        }
    }
    if c.kind == Kind::Rcmsn {
        let expected = choose2(c.n);
        if c.events.len() as u64 != expected {
            return Err(NetworkError::NotExhaustive { expected, found: c.events.len() });
        }
    }
    Ok(())
}

/// Per-event delivery counts with the derived capacities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityReport {
    pub deliveries: Vec<usize>,
    pub total: u64,
    pub capacity: Rational,
    pub absolute_capacity: Rational,
}

impl CapacityReport {
    /// Assembles a report from raw delivery counts.
    pub fn from_deliveries(n: usize, deliveries: Vec<usize>) -> Result<Self, NetworkError> {
        let len = deliveries.len();
        if len == 0 || n < 2 {
            return Err(NetworkError::EmptyNetwork { n, events: len });
        }
        let total: u64 = deliveries.iter().map(|&d| d as u64).sum();
        let capacity = Rational::new(BigInt::from(total), BigInt::from(n as u64 * len as u64));
        let absolute_capacity = Rational::new(BigInt::from(total), BigInt::from(n as u64 * choose2(n)));
        Ok(CapacityReport { deliveries, total, capacity, absolute_capacity })
    }
}

/// Raw delivery counts from the right-to-left reach-set sweep.
///
/// `reach[x]` holds the set reached by the next event containing `x`, so the
/// set for event `{u, v}` is `{u, v} ∪ reach[u] ∪ reach[v]`.
pub fn delivery_counts(c: &Cmsn) -> Vec<usize> {
    let n = c.n;
    let mut reach: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n + 1); n + 1];
    let mut out = vec![0usize; c.events.len()];
    let mut d = FixedBitSet::with_capacity(n + 1);
    for (k, p) in c.events.iter().enumerate().rev() {
        d.clear();
        d.union_with(&reach[p.u]);
        d.union_with(&reach[p.v]);
        d.insert(p.u);
        d.insert(p.v);
        out[k] = d.count_ones(..);
        reach[p.u].clone_from(&d);
        reach[p.v].clone_from(&d);
    }
    out
}

/// The set of sensors reached by each event's packet, endpoints included.
pub fn delivery_sets(c: &Cmsn) -> Vec<FixedBitSet> {
    let n = c.n;
    let mut reach: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n + 1); n + 1];
    let mut out = vec![FixedBitSet::new(); c.events.len()];
    for (k, p) in c.events.iter().enumerate().rev() {
        let mut d = reach[p.u].clone();
        d.union_with(&reach[p.v]);
        d.insert(p.u);
        d.insert(p.v);
        reach[p.u].clone_from(&d);
        reach[p.v].clone_from(&d);
        out[k] = d;
    }
    out
}

/// Validates, sweeps, and reports exact capacities.
pub fn deliveries(c: &Cmsn) -> Result<CapacityReport, NetworkError> {
    validate(c)?;
    CapacityReport::from_deliveries(c.n, delivery_counts(c))
}

/// Total deliveries divided by `n·L`.
pub fn capacity(c: &Cmsn) -> Result<Rational, NetworkError> {
    deliveries(c).map(|r| r.capacity)
}

/// Total deliveries divided by `n·C(n,2)`.
pub fn absolute_capacity(c: &Cmsn) -> Result<Rational, NetworkError> {
    deliveries(c).map(|r| r.absolute_capacity)
}

/// Capacity as a float, skipping validation. Intended for trusted inputs in hot loops.
pub fn capacity_f64_unchecked(c: &Cmsn) -> f64 {
    let total: usize = delivery_counts(c).iter().sum();
    total as f64 / (c.n as f64 * c.events.len() as f64)
}

/// Minimum number of hops for the packet of event `k` (1-based) to reach sensor `x`.
///
/// Returns `Ok(None)` when `x` is never reached.
pub fn min_hops(c: &Cmsn, k: usize, x: usize) -> Result<Option<usize>, NetworkError> {
    if k == 0 || k > c.events.len() {
        return Err(NetworkError::IndexOutOfRange { index: k, len: c.events.len() });
    }
    if x == 0 || x > c.n {
        return Err(NetworkError::SensorOutOfRange { id: x, n: c.n });
    }
    let all = min_hops_from(c, k);
    Ok(all[x])
}

/// Hop distance from the packet of event `k` (1-based) to every sensor; index 0 unused.
pub fn min_hops_from(c: &Cmsn, k: usize) -> Vec<Option<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; c.n + 1];
    let first = c.events[k - 1];
    best[first.u] = Some(0);
    best[first.v] = Some(0);
    for p in &c.events[k..] {
        let via = match (best[p.u], best[p.v]) {
            (None, None) => continue,
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        let h = via + 1;
        for s in [p.u, p.v] {
            if best[s].is_none_or(|cur| h < cur) {
                best[s] = Some(h);
            }
        }
    }
    best
}

/// Largest hop count over every delivered `(event, sensor)` pair.
pub fn max_delivery_hops(c: &Cmsn) -> usize {
    (1..=c.events.len())
        .map(|k| min_hops_from(c, k).into_iter().flatten().max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn tri() -> Cmsn {
        Cmsn::from_pairs(3, &[(2, 3), (1, 3), (1, 2)], Kind::Rcmsn).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&tri()).is_ok());
        let dup = Cmsn::from_pairs(3, &[(1, 2), (1, 2), (1, 3)], Kind::Cmsn);
        assert!(matches!(dup, Err(NetworkError::DuplicatePair { index: 2, .. })));
        let short = Cmsn::from_pairs(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)], Kind::Rcmsn);
        assert!(matches!(short, Err(NetworkError::NotExhaustive { expected: 6, found: 5 })));
        let out = Cmsn::from_pairs(3, &[(1, 4)], Kind::Cmsn);
        assert!(matches!(out, Err(NetworkError::OutOfRangeId { id: 4, .. })));
    }

    #[test]
    fn small_capacities() {
        let one = Cmsn::from_pairs(2, &[(1, 2)], Kind::Rcmsn).unwrap();
        let r = deliveries(&one).unwrap();
        assert_eq!(r.deliveries, vec![2]);
        assert_eq!(r.capacity, rat(1, 1));
        let r = deliveries(&tri()).unwrap();
        assert_eq!(r.deliveries, vec![3, 3, 2]);
        assert_eq!(r.capacity, rat(8, 9));
        assert_eq!(r.absolute_capacity, rat(8, 9));
    }

    #[test]
    fn empty_network_is_an_error() {
        let e = Cmsn::new(4, vec![], Kind::Cmsn).unwrap();
        assert!(matches!(capacity(&e), Err(NetworkError::EmptyNetwork { .. })));
        let lone = Cmsn::new(1, vec![], Kind::Rcmsn).unwrap();
        assert!(matches!(capacity(&lone), Err(NetworkError::EmptyNetwork { .. })));
    }

    #[test]
    fn hop_examples() {
        let c = Cmsn::from_pairs(3, &[(1, 2), (2, 3)], Kind::Cmsn).unwrap();
        assert_eq!(min_hops(&c, 1, 1).unwrap(), Some(0));
        assert_eq!(min_hops(&c, 1, 3).unwrap(), Some(1));
        assert_eq!(min_hops(&c, 2, 1).unwrap(), None);
        assert!(min_hops(&c, 3, 1).is_err());
        assert!(min_hops(&c, 1, 4).is_err());
    }

    #[test]
    fn hops_take_the_shortest_chain() {
        // 1-2, then 2-3, then 3-4, then 1-4: sensor 4 is one hop away via {1,4}.
        let c = Cmsn::from_pairs(4, &[(1, 2), (2, 3), (3, 4), (1, 4)], Kind::Cmsn).unwrap();
        assert_eq!(min_hops(&c, 1, 4).unwrap(), Some(1));
        assert_eq!(min_hops(&c, 1, 3).unwrap(), Some(1));
    }

    fn arb_rcmsn(max_n: usize) -> impl Strategy<Value = Cmsn> {
        (2..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v))).collect();
            Just(pairs).prop_shuffle().prop_map(move |p| Cmsn::from_pairs(n, &p, Kind::Rcmsn).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rcmsn_capacity_within_bounds(c in arb_rcmsn(8)) {
            let n = c.n() as i64;
            let cap = capacity(&c).unwrap();
            prop_assert!(cap >= rat(2 * (n + 1), 3 * n));
            prop_assert!(cap <= rat(n * n - n + 2, n * n));
            prop_assert_eq!(absolute_capacity(&c).unwrap(), cap);
            prop_assert_eq!(*deliveries(&c).unwrap().deliveries.last().unwrap(), 2);
        }

        #[test]
        fn relabeling_preserves_capacity(c in arb_rcmsn(7), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut perm: Vec<usize> = (1..=c.n()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(capacity(&c.relabeled(&perm)).unwrap(), capacity(&c).unwrap());
        }

        #[test]
        fn disjoint_swap_preserves_other_deliveries(c in arb_rcmsn(7), pos in any::<prop::sample::Index>()) {
            let ev = c.events().to_vec();
            let k = pos.index(ev.len().max(2) - 1);
            prop_assume!(k + 1 < ev.len() && !ev[k].shares_sensor(&ev[k + 1]));
            let mut swapped = ev.clone();
            swapped.swap(k, k + 1);
            let a = deliveries(&c).unwrap();
            let b = deliveries(&Cmsn::new(c.n(), swapped, Kind::Rcmsn).unwrap()).unwrap();
            prop_assert_eq!(a.total, b.total);
            for j in 0..ev.len() {
                if j != k && j != k + 1 {
                    prop_assert_eq!(a.deliveries[j], b.deliveries[j]);
                }
            }
        }

        #[test]
        fn every_delivery_has_finite_hops(c in arb_rcmsn(7)) {
            let r = deliveries(&c).unwrap();
            for k in 1..=c.len() {
                let reached = min_hops_from(&c, k).into_iter().skip(1).filter(|h| h.is_some()).count();
                prop_assert_eq!(reached, r.deliveries[k - 1]);
            }
        }
    }
}
