//! Wiring diagrams: an initial top-to-bottom order of pseudolines plus the
//! sequence of adjacent transpositions performed at each crossing.
//!
//! [`rcmsn_from_wiring`] replays a diagram into its event sequence and
//! [`wiring_from_rcmsn`] infers a diagram from an event sequence, rejecting
//! sequences that no pseudoline arrangement produces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Cmsn, Kind, NetworkError, Packet};
use crate::rational::choose2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WiringError {
    #[error("malformed wiring diagram: {0}")]
    Malformed(String),
    #[error("pair {pair} would cross a second time at event {index}")]
    RepeatedCrossing { pair: Packet, index: usize },
    #[error("not realizable by pseudolines{}: {reason}", .event.map(|k| format!(" (event {k})")).unwrap_or_default())]
    NonRealizable { event: Option<usize>, reason: &'static str },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// `sigma[k]` is the label of the `(k+1)`-th pseudoline from the top at the far
/// left; `a[t]` is the 1-based upper position of the pair swapped at step `t+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiringDiagram {
    pub n: usize,
    pub sigma: Vec<usize>,
    pub a: Vec<usize>,
}

impl WiringDiagram {
    pub fn new(n: usize, sigma: Vec<usize>, a: Vec<usize>) -> Result<Self, WiringError> {
        let w = WiringDiagram { n, sigma, a };
        w.check()?;
        Ok(w)
    }

    fn check(&self) -> Result<(), WiringError> {
        if self.sigma.len() != self.n {
            return Err(WiringError::Malformed(format!("sigma has {} entries for n = {}", self.sigma.len(), self.n)));
        }
        let mut seen = vec![false; self.n + 1];
        for &s in &self.sigma {
            if s == 0 || s > self.n || std::mem::replace(&mut seen[s], true) {
                return Err(WiringError::Malformed(format!("sigma is not a permutation of 1..={}", self.n)));
            }
        }
        if let Some((t, &p)) = self.a.iter().enumerate().find(|(_, &p)| p == 0 || p >= self.n) {
            return Err(WiringError::Malformed(format!("position {p} at step {} is outside 1..{}", t + 1, self.n)));
        }
        Ok(())
    }

    /// The diagram read upside down: same arrangement, reflected.
    pub fn mirror(&self) -> WiringDiagram {
        let sigma = self.sigma.iter().rev().copied().collect();
        let a = self.a.iter().map(|&p| self.n - p).collect();
        WiringDiagram { n: self.n, sigma, a }
    }
}

/// Replays the transpositions of `w`, recording the pair swapped at each step.
///
/// The result has kind [`Kind::Rcmsn`] when every pair crosses exactly once.
pub fn rcmsn_from_wiring(w: &WiringDiagram) -> Result<Cmsn, WiringError> {
    w.check()?;
    let mut tau = w.sigma.clone();
    let mut crossed = std::collections::HashSet::with_capacity(w.a.len());
    let mut events = Vec::with_capacity(w.a.len());
    for (t, &p) in w.a.iter().enumerate() {
        let pair = Packet::new(tau[p - 1], tau[p]);
        if !crossed.insert(pair) {
            return Err(WiringError::RepeatedCrossing { pair, index: t + 1 });
        }
        events.push(pair);
        tau.swap(p - 1, p);
    }
    let kind = if events.len() as u64 == choose2(w.n) { Kind::Rcmsn } else { Kind::Cmsn };
    Ok(Cmsn::new(w.n, events, kind)?)
}

/// How the first pass treats a crossing between slots that are already linked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase1Variant {
    /// Literal pseudocode: the degree test runs before the link test and an
    /// already-linked crossing does not swap.
    Literal,
    /// The degree test applies only to new links and every crossing swaps.
    /// Agrees with exhaustive search on all small inputs.
    #[default]
    UnconditionalSwap,
}

/// Path-shaped adjacency structure over slots `1..=n`.
struct SlotList {
    nbr: Vec<[usize; 2]>,
    deg: Vec<u8>,
    comp: Vec<usize>,
}

impl SlotList {
    fn new(n: usize) -> Self {
        SlotList { nbr: vec![[0, 0]; n + 1], deg: vec![0; n + 1], comp: (0..=n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.comp[x] != x {
            self.comp[x] = self.comp[self.comp[x]];
            x = self.comp[x];
        }
        x
    }

    fn linked(&self, a: usize, b: usize) -> bool {
        self.nbr[a][..self.deg[a] as usize].contains(&b)
    }

    fn link(&mut self, a: usize, b: usize) {
        self.nbr[a][self.deg[a] as usize] = b;
        self.deg[a] += 1;
        self.nbr[b][self.deg[b] as usize] = a;
        self.deg[b] += 1;
        let (ra, rb) = (self.find(a), self.find(b));
        self.comp[ra] = rb;
    }

    /// Walks the path starting at endpoint `head`.
    fn walk(&self, head: usize, out: &mut Vec<usize>) {
        let mut prev = 0;
        let mut cur = head;
        loop {
            out.push(cur);
            let next = self.nbr[cur][..self.deg[cur] as usize].iter().copied().find(|&x| x != prev);
            match next {
                Some(x) => {
                    prev = cur;
                    cur = x;
                }
                None => break,
            }
        }
    }
}

/// Infers the wiring diagram of a network using the default first-pass variant.
pub fn wiring_from_rcmsn(c: &Cmsn) -> Result<WiringDiagram, WiringError> {
    wiring_from_rcmsn_with(c, Phase1Variant::default())
}

/// Infers a wiring diagram in two passes.
///
/// The first pass links slots that must be adjacent at the far left and reads
/// an initial order off the resulting path. The second pass replays the events
/// from that order and requires every crossing pair to be adjacent; it alone
/// decides realizability. Of the two readings of the path the one with the
/// lexicographically smaller initial order is returned. Pairs that never
/// cross (parallel classes) may leave several paths, which are then
/// concatenated by smallest endpoint.
pub fn wiring_from_rcmsn_with(c: &Cmsn, variant: Phase1Variant) -> Result<WiringDiagram, WiringError> {
    let n = c.n();
    // tau[label] = slot (left-end label) currently occupied by that line.
    let mut tau: Vec<usize> = (0..=n).collect();
    let mut list = SlotList::new(n);
    for (k, p) in c.events().iter().enumerate() {
        let event = Some(k + 1);
        let (sx, sy) = (tau[p.u], tau[p.v]);
        let linked = list.linked(sx, sy);
        let blocked = list.deg[sx] == 2 || list.deg[sy] == 2;
        match variant {
            Phase1Variant::Literal => {
                if blocked {
                    return Err(WiringError::NonRealizable { event, reason: "a crossing line is already between two neighbours" });
                }
                if !linked {
                    list.link(sx, sy);
                    tau.swap(p.u, p.v);
                }
            }
            Phase1Variant::UnconditionalSwap => {
                if !linked {
                    if blocked {
                        return Err(WiringError::NonRealizable { event, reason: "a crossing line is already between two neighbours" });
                    }
                    if list.find(sx) == list.find(sy) {
                        return Err(WiringError::NonRealizable { event, reason: "adjacencies close a cycle" });
                    }
                    list.link(sx, sy);
                }
                tau.swap(p.u, p.v);
            }
        }
    }

    let mut sigma = Vec::with_capacity(n);
    let mut placed = vec![false; n + 1];
    for head in 1..=n {
        if !placed[head] && list.deg[head] <= 1 {
            let start = sigma.len();
            list.walk(head, &mut sigma);
            for &s in &sigma[start..] {
                placed[s] = true;
            }
        }
    }
    if sigma.len() != n {
        return Err(WiringError::NonRealizable { event: None, reason: "adjacencies close a cycle" });
    }

    let mut pos = vec![0usize; n + 1];
    for (i, &s) in sigma.iter().enumerate() {
        pos[s] = i + 1;
    }
    let mut a = Vec::with_capacity(c.len());
    for (k, p) in c.events().iter().enumerate() {
        let (pu, pv) = (pos[p.u], pos[p.v]);
        if pu.abs_diff(pv) != 1 {
            return Err(WiringError::NonRealizable { event: Some(k + 1), reason: "the crossing lines are not adjacent" });
        }
        a.push(pu.min(pv));
        pos.swap(p.u, p.v);
    }
    Ok(WiringDiagram { n, sigma, a })
}
