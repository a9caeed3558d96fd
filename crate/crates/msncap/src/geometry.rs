//! Lines, arrangements, intersection ordering and random network generators.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Cmsn, Kind, Packet};
use crate::rational::{int, Rational};
use crate::rng;

/// Slope of a line: a finite rational, or vertical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slope {
    Finite(Rational),
    Vertical,
}

impl Slope {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Slope::Finite(k) => Some(k),
            Slope::Vertical => None,
        }
    }
}

/// `y = slope·x + intercept`, or `x = intercept` when vertical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    pub slope: Slope,
    pub intercept: Rational,
}

impl Line {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Line { slope: Slope::Finite(slope), intercept }
    }

    pub fn vertical(x: Rational) -> Self {
        Line { slope: Slope::Vertical, intercept: x }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self.slope, Slope::Vertical)
    }

    /// `y` at `x` for a finite line.
    pub fn y_at(&self, x: &Rational) -> Option<Rational> {
        self.slope.finite().map(|k| k * x + &self.intercept)
    }
}

/// Ordered lines; line `i` (0-based) is sensor `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Arrangement {
    pub lines: Vec<Line>,
}

impl Arrangement {
    pub fn new(lines: Vec<Line>) -> Self {
        Arrangement { lines }
    }

    pub fn n(&self) -> usize {
        self.lines.len()
    }

    pub fn slopes(&self) -> Vec<Slope> {
        self.lines.iter().map(|l| l.slope.clone()).collect()
    }

    /// Groups lines by equal slope. Returns the distinct slopes in order of first
    /// appearance and the class index of every line.
    pub fn slope_classes(&self) -> (Vec<Slope>, Vec<usize>) {
        let mut distinct: Vec<Slope> = Vec::new();
        let mut assignment = Vec::with_capacity(self.lines.len());
        for l in &self.lines {
            let idx = match distinct.iter().position(|s| *s == l.slope) {
                Some(i) => i,
                None => {
                    distinct.push(l.slope.clone());
                    distinct.len() - 1
                }
            };
            assignment.push(idx);
        }
        (distinct, assignment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Any two events at the same `x` are an error.
    #[default]
    Reject,
    /// Equal `x` is allowed between events that share no line; they are ordered
    /// lexicographically by pair.
    StableIfDisjoint,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("an arrangement needs at least 2 lines, got {0}")]
    TooFewLines(usize),
    #[error("lines {0} and {1} are identical")]
    IdenticalLines(usize, usize),
    #[error("lines {0}, {1} and {2} pass through one point")]
    ConcurrentLines(usize, usize, usize),
    #[error("events {0} and {1} occur at the same x")]
    TieRejected(Packet, Packet),
    #[error("invalid affine map: {0}")]
    InvalidMap(&'static str),
    #[error("sampler gave up after {0} degenerate draws")]
    DegenerateSampler(usize),
    #[error("shear factor {0} maps a line to a vertical one")]
    DegenerateShear(String),
}

/// x-coordinate of the crossing of two lines, `None` if they are parallel.
pub fn intersection_x(a: &Line, b: &Line) -> Option<Rational> {
    match (&a.slope, &b.slope) {
        (Slope::Vertical, Slope::Vertical) => None,
        (Slope::Vertical, Slope::Finite(_)) => Some(a.intercept.clone()),
        (Slope::Finite(_), Slope::Vertical) => Some(b.intercept.clone()),
        (Slope::Finite(ka), Slope::Finite(kb)) => {
            if ka == kb {
                None
            } else {
                Some((&b.intercept - &a.intercept) / (ka - kb))
            }
        }
    }
}

/// Crossing point of two lines, `None` if parallel.
pub fn intersection_point(a: &Line, b: &Line) -> Option<(Rational, Rational)> {
    let x = intersection_x(a, b)?;
    let y = a.y_at(&x).or_else(|| b.y_at(&x)).expect("one of two crossing lines is finite");
    Some((x, y))
}

/// Exact fraction with a positive `i128` denominator, compared by cross multiplication.
#[derive(Debug, Clone, Copy)]
struct SmallFrac {
    num: i128,
    den: i128,
}

impl PartialEq for SmallFrac {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SmallFrac {}
impl PartialOrd for SmallFrac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SmallFrac {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Integer form of an arrangement: every slope and intercept times a common
/// denominator, when all of them fit in 62 bits.
fn scaled_integers(arr: &Arrangement) -> Option<(Vec<Option<i64>>, Vec<i64>, i64)> {
    let mut lcm = BigInt::one();
    for l in &arr.lines {
        if let Slope::Finite(k) = &l.slope {
            lcm = lcm.lcm(k.denom());
        }
        lcm = lcm.lcm(l.intercept.denom());
    }
    let limit = BigInt::one() << 62;
    if lcm >= limit {
        return None;
    }
    let scale = |r: &Rational| -> Option<i64> {
        let v = r.numer() * (&lcm / r.denom());
        if v.abs() >= limit {
            None
        } else {
            v.to_i64()
        }
    };
    let mut ks = Vec::with_capacity(arr.n());
    let mut bs = Vec::with_capacity(arr.n());
    for l in &arr.lines {
        ks.push(match &l.slope {
            Slope::Finite(k) => Some(scale(k)?),
            Slope::Vertical => None,
        });
        bs.push(scale(&l.intercept)?);
    }
    Some((ks, bs, lcm.to_i64()?))
}

/// Sorted crossing events `(x-key, i, j)` with `i < j` (0-based line indices).
fn sorted_crossings<K: Ord>(n: usize, key: impl Fn(usize, usize) -> Option<K>) -> Vec<(K, usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(k) = key(i, j) {
                out.push((k, i, j));
            }
        }
    }
    out.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    out
}

/// Checks each group of equal-x events for concurrency and (optionally) disjoint ties.
fn check_ties<K: Eq>(arr: &Arrangement, ev: &[(K, usize, usize)], policy: TiePolicy) -> Result<(), GeometryError> {
    let mut start = 0;
    while start < ev.len() {
        let mut end = start + 1;
        while end < ev.len() && ev[end].0 == ev[start].0 {
            end += 1;
        }
        for a in start..end {
            for b in (a + 1)..end {
                let (_, i1, j1) = ev[a];
                let (_, i2, j2) = ev[b];
                let pa = Packet::new(i1 + 1, j1 + 1);
                let pb = Packet::new(i2 + 1, j2 + 1);
                let shared = [i1, j1].into_iter().find(|s| *s == i2 || *s == j2);
                match shared {
                    Some(s) if !arr.lines[s].is_vertical() => {
                        let mut three = [i1, j1, i2, j2];
                        three.sort_unstable();
                        let mut uniq: Vec<usize> = three.to_vec();
                        uniq.dedup();
                        return Err(GeometryError::ConcurrentLines(uniq[0] + 1, uniq[1] + 1, uniq[2] + 1));
                    }
                    Some(_) => return Err(GeometryError::TieRejected(pa, pb)),
                    None if policy == TiePolicy::Reject => return Err(GeometryError::TieRejected(pa, pb)),
                    None => {}
                }
            }
        }
        start = end;
    }
    Ok(())
}

fn check_identical(arr: &Arrangement) -> Result<(), GeometryError> {
    let mut idx: Vec<usize> = (0..arr.n()).collect();
    let key = |l: &Line| (l.slope.finite().cloned(), l.intercept.clone());
    idx.sort_by(|&a, &b| key(&arr.lines[a]).cmp(&key(&arr.lines[b])));
    for w in idx.windows(2) {
        if arr.lines[w[0]] == arr.lines[w[1]] {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(GeometryError::IdenticalLines(a + 1, b + 1));
        }
    }
    Ok(())
}

/// The network generated by an arrangement: every crossing pair, sorted by the
/// exact x-coordinate of the crossing.
pub fn cmsn_from_arrangement(arr: &Arrangement, policy: TiePolicy) -> Result<Cmsn, GeometryError> {
    let n = arr.n();
    if n < 2 {
        return Err(GeometryError::TooFewLines(n));
    }
    check_identical(arr)?;
    let events: Vec<(usize, usize)> = if let Some((ks, bs, d)) = scaled_integers(arr) {
        let ev = sorted_crossings(n, |i, j| match (ks[i], ks[j]) {
            (None, None) => None,
            (None, Some(_)) => Some(SmallFrac { num: bs[i] as i128, den: d as i128 }),
            (Some(_), None) => Some(SmallFrac { num: bs[j] as i128, den: d as i128 }),
            (Some(ki), Some(kj)) if ki == kj => None,
            (Some(ki), Some(kj)) => {
                let (num, den) = ((bs[j] - bs[i]) as i128, (ki - kj) as i128);
                Some(if den < 0 { SmallFrac { num: -num, den: -den } } else { SmallFrac { num, den } })
            }
        });
        check_ties(arr, &ev, policy)?;
        ev.into_iter().map(|(_, i, j)| (i, j)).collect()
    } else {
        let ev = sorted_crossings(n, |i, j| intersection_x(&arr.lines[i], &arr.lines[j]));
        check_ties(arr, &ev, policy)?;
        ev.into_iter().map(|(_, i, j)| (i, j)).collect()
    };
    let kind = if events.len() == n * (n - 1) / 2 { Kind::Rcmsn } else { Kind::Cmsn };
    let packets = events.into_iter().map(|(i, j)| Packet::new(i + 1, j + 1)).collect();
    Ok(Cmsn::from_parts_unchecked(n, packets, kind))
}

/// Image under `x' = αx + β`, `y' = γx + δy + ε` with `α > 0`, `δ ≠ 0`.
pub fn affine_image(
    arr: &Arrangement,
    alpha: &Rational,
    beta: &Rational,
    gamma: &Rational,
    delta: &Rational,
    epsilon: &Rational,
) -> Result<Arrangement, GeometryError> {
    if !alpha.is_positive() {
        return Err(GeometryError::InvalidMap("alpha must be positive"));
    }
    if delta.is_zero() {
        return Err(GeometryError::InvalidMap("delta must be nonzero"));
    }
    let lines = arr
        .lines
        .iter()
        .map(|l| match &l.slope {
            Slope::Vertical => Line::vertical(alpha * &l.intercept + beta),
            Slope::Finite(k) => {
                let lead = gamma + delta * k;
                let slope = &lead / alpha;
                let intercept = delta * &l.intercept + epsilon - &lead * beta / alpha;
                Line::new(slope, intercept)
            }
        })
        .collect();
    Ok(Arrangement::new(lines))
}

/// Image under the shear `x' = x + εy` (`y` unchanged). Vertical lines become steep
/// finite lines; this is how near-vertical witnesses are tilted.
pub fn shear(arr: &Arrangement, eps: &Rational) -> Result<Arrangement, GeometryError> {
    let mut lines = Vec::with_capacity(arr.n());
    for l in &arr.lines {
        lines.push(match &l.slope {
            Slope::Finite(k) => {
                let den = Rational::one() + k * eps;
                if den.is_zero() {
                    return Err(GeometryError::DegenerateShear(eps.to_string()));
                }
                Line::new(k / &den, &l.intercept / &den)
            }
            Slope::Vertical => {
                if eps.is_zero() {
                    l.clone()
                } else {
                    Line::new(eps.recip(), -&l.intercept / eps)
                }
            }
        });
    }
    Ok(Arrangement::new(lines))
}

/// Maximum number of redraws before a sampler gives up.
pub const MAX_REJECTIONS: usize = 1000;

/// A sampled arrangement together with the number of rejected degenerate draws.
#[derive(Debug, Clone)]
pub struct Sample {
    pub arrangement: Arrangement,
    pub cmsn: Cmsn,
    pub rejections: usize,
}

fn sample_loop(
    seed: u64,
    tag: &str,
    mut draw: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Option<Arrangement>,
) -> Result<Sample, GeometryError> {
    for attempt in 0..=MAX_REJECTIONS {
        let mut r = rng::stream(seed, tag, attempt as u64);
        let Some(arr) = draw(&mut r) else { continue };
        if let Ok(c) = cmsn_from_arrangement(&arr, TiePolicy::Reject) {
            return Ok(Sample { arrangement: arr, cmsn: c, rejections: attempt });
        }
    }
    Err(GeometryError::DegenerateSampler(MAX_REJECTIONS))
}

fn dyadic(k: i64) -> Rational {
    Rational::new(BigInt::from(k), BigInt::from(1i64 << rng::DYADIC_BITS))
}

/// `n` lines with independent uniform dyadic slopes and intercepts on `[0, 1]`,
/// redrawn until slopes are distinct and crossings are generic.
pub fn sample_gmsn_full(n: usize, seed: u64) -> Result<Sample, GeometryError> {
    if n < 2 {
        return Err(GeometryError::TooFewLines(n));
    }
    sample_loop(seed, "gmsn", |r| {
        let mut ks: Vec<i64> = Vec::with_capacity(n);
        let mut lines = Vec::with_capacity(n);
        for _ in 0..n {
            let k = rng::dyadic_numerator(r);
            let b = rng::dyadic_numerator(r);
            ks.push(k);
            lines.push(Line::new(dyadic(k), dyadic(b)));
        }
        ks.sort_unstable();
        if ks.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Arrangement::new(lines))
    })
}

/// See [`sample_gmsn_full`].
pub fn sample_gmsn(n: usize, seed: u64) -> Result<Arrangement, GeometryError> {
    sample_gmsn_full(n, seed).map(|s| s.arrangement)
}

/// `s` uniform dyadic slopes on `[0, 1]`; each line picks a slope uniformly and a
/// uniform dyadic intercept. Degenerate draws are redrawn.
pub fn sample_rgmsn_full(n: usize, s: usize, seed: u64) -> Result<Sample, GeometryError> {
    if n < 2 {
        return Err(GeometryError::TooFewLines(n));
    }
    if s == 0 {
        return Err(GeometryError::InvalidMap("at least one slope is required"));
    }
    sample_loop(seed, &format!("rgmsn-{s}"), |r| {
        let slopes: Vec<i64> = (0..s).map(|_| rng::dyadic_numerator(r)).collect();
        let mut sorted = slopes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let lines = (0..n)
            .map(|_| {
                let c = r.gen_range(0..s);
                Line::new(dyadic(slopes[c]), dyadic(rng::dyadic_numerator(r)))
            })
            .collect();
        Some(Arrangement::new(lines))
    })
}

/// See [`sample_rgmsn_full`].
pub fn sample_rgmsn(n: usize, s: usize, seed: u64) -> Result<Arrangement, GeometryError> {
    sample_rgmsn_full(n, s, seed).map(|s| s.arrangement)
}

/// Smallest gap between distinct crossing x-coordinates, and the largest |y| of any crossing.
pub fn crossing_spread(arr: &Arrangement) -> (Option<Rational>, Rational) {
    let mut xs = Vec::new();
    let mut max_y = Rational::zero();
    for i in 0..arr.n() {
        for j in (i + 1)..arr.n() {
            if let Some((x, y)) = intersection_point(&arr.lines[i], &arr.lines[j]) {
                if y.abs() > max_y {
                    max_y = y.abs();
                }
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let gap = xs.windows(2).map(|w| &w[1] - &w[0]).min();
    (gap, max_y)
}

/// Convenience: a finite line from integer slope and intercept.
pub fn iline(k: i64, b: i64) -> Line {
    Line::new(int(k), int(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::capacity;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn min_cap_lines(n: i64) -> Arrangement {
        // k x + (n+1-k) y = k(n+1-k)  =>  y = -k/(n+1-k) x + k
        Arrangement::new((1..=n).map(|k| Line::new(rat(-k, n + 1 - k), int(k))).collect())
    }

    #[test]
    fn three_line_example() {
        let c = cmsn_from_arrangement(&min_cap_lines(3), TiePolicy::Reject).unwrap();
        let pairs: Vec<(usize, usize)> = c.events().iter().map(|p| (p.u, p.v)).collect();
        assert_eq!(pairs, vec![(2, 3), (1, 3), (1, 2)]);
        assert_eq!(c.kind(), Kind::Rcmsn);
        let a = &min_cap_lines(3).lines;
        assert_eq!(intersection_x(&a[1], &a[2]).unwrap(), rat(1, 2));
        assert_eq!(intersection_x(&a[0], &a[2]).unwrap(), rat(3, 4));
        assert_eq!(intersection_x(&a[0], &a[1]).unwrap(), rat(3, 2));
    }

    #[test]
    fn concurrency_and_identity() {
        let arr = Arrangement::new(vec![iline(1, 0), iline(-1, 0), iline(0, 0)]);
        assert!(matches!(
            cmsn_from_arrangement(&arr, TiePolicy::StableIfDisjoint),
            Err(GeometryError::ConcurrentLines(1, 2, 3))
        ));
        let arr = Arrangement::new(vec![iline(1, 0), iline(2, 1), iline(1, 0)]);
        assert!(matches!(cmsn_from_arrangement(&arr, TiePolicy::Reject), Err(GeometryError::IdenticalLines(1, 3))));
    }

    #[test]
    fn parallel_pair_gives_cmsn() {
        let arr = Arrangement::new(vec![iline(0, 0), iline(0, 1), iline(1, 5)]);
        let c = cmsn_from_arrangement(&arr, TiePolicy::Reject).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.kind(), Kind::Cmsn);
    }

    #[test]
    fn disjoint_ties_follow_policy() {
        // Two far-apart crosses at x = 0.
        let arr = Arrangement::new(vec![iline(1, 0), iline(-1, 0), iline(1, 10), iline(-1, 10)]);
        assert!(matches!(cmsn_from_arrangement(&arr, TiePolicy::Reject), Err(GeometryError::TieRejected(..))));
        let c = cmsn_from_arrangement(&arr, TiePolicy::StableIfDisjoint).unwrap();
        assert_eq!(c.events()[0], Packet::new(2, 3));
        assert_eq!(c.events()[1], Packet::new(1, 2));
        assert_eq!(c.events()[2], Packet::new(3, 4));
    }

    #[test]
    fn vertical_lines_are_ordered_by_position() {
        let arr = Arrangement::new(vec![Line::vertical(int(3)), iline(0, 0), iline(1, -10)]);
        let c = cmsn_from_arrangement(&arr, TiePolicy::Reject);
        // Two events on the vertical line share x = 3.
        assert!(matches!(c, Err(GeometryError::TieRejected(..))));
        let arr = Arrangement::new(vec![Line::vertical(int(3)), iline(0, 0)]);
        assert_eq!(cmsn_from_arrangement(&arr, TiePolicy::Reject).unwrap().len(), 1);
    }

    #[test]
    fn big_rational_path_matches_integer_path() {
        let huge = Rational::new(BigInt::one(), BigInt::one() << 80);
        let arr = Arrangement::new(vec![
            Line::new(int(1) + &huge, int(0)),
            Line::new(int(-1), int(3)),
            Line::new(int(2), int(-1) + &huge),
        ]);
        let c = cmsn_from_arrangement(&arr, TiePolicy::Reject).unwrap();
        let plain = Arrangement::new(vec![iline(1, 0), iline(-1, 3), iline(2, -1)]);
        assert_eq!(c, cmsn_from_arrangement(&plain, TiePolicy::Reject).unwrap());
    }

    #[test]
    fn affine_examples() {
        let arr = min_cap_lines(3);
        let id = affine_image(&arr, &int(1), &int(0), &int(0), &int(1), &int(0)).unwrap();
        assert_eq!(id, arr);
        let sheared = affine_image(&arr, &int(1), &int(0), &int(1), &int(1), &int(0)).unwrap();
        assert_eq!(
            cmsn_from_arrangement(&sheared, TiePolicy::Reject).unwrap(),
            cmsn_from_arrangement(&arr, TiePolicy::Reject).unwrap()
        );
        let three = Arrangement::new(vec![iline(-1, 0), iline(0, 1), iline(1, 2)]);
        let m = affine_image(&three, &int(1), &int(0), &int(1), &int(2), &int(0)).unwrap();
        let ks: Vec<Rational> = m.lines.iter().map(|l| l.slope.finite().unwrap().clone()).collect();
        assert_eq!(ks, vec![int(-1), int(1), int(3)]);
        assert!(affine_image(&three, &int(0), &int(0), &int(0), &int(1), &int(0)).is_err());
        assert!(affine_image(&three, &int(1), &int(0), &int(0), &int(0), &int(0)).is_err());
    }

    #[test]
    fn shear_tilts_verticals() {
        let arr = Arrangement::new(vec![Line::vertical(int(2)), iline(0, 1), iline(0, 3)]);
        let s = shear(&arr, &rat(1, 100)).unwrap();
        let c = cmsn_from_arrangement(&s, TiePolicy::Reject).unwrap();
        // The vertical meets y = 1 before y = 3 after a positive tilt.
        assert_eq!(c.events(), &[Packet::new(1, 2), Packet::new(1, 3)]);
    }

    #[test]
    fn samplers_are_deterministic() {
        assert_eq!(sample_gmsn(5, 1).unwrap(), sample_gmsn(5, 1).unwrap());
        assert_ne!(sample_gmsn(5, 1).unwrap(), sample_gmsn(5, 2).unwrap());
        assert_eq!(sample_rgmsn(6, 3, 7).unwrap(), sample_rgmsn(6, 3, 7).unwrap());
    }

    #[test]
    fn one_slope_is_empty() {
        let s = sample_rgmsn_full(5, 1, 3).unwrap();
        assert!(s.cmsn.is_empty());
        assert!(capacity(&s.cmsn).is_err());
    }

    #[test]
    fn two_slopes_give_grid_capacity() {
        for seed in 0..20 {
            let s = sample_rgmsn_full(7, 2, seed).unwrap();
            let (classes, _) = s.arrangement.slope_classes();
            if classes.len() == 2 {
                assert_eq!(capacity(&s.cmsn).unwrap(), rat(9, 14));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn gmsn_samples_are_restricted_and_bounded(n in 3usize..14, seed in any::<u64>()) {
            let s = sample_gmsn_full(n, seed).unwrap();
            prop_assert_eq!(s.cmsn.kind(), Kind::Rcmsn);
            let cap = capacity(&s.cmsn).unwrap();
            let ni = n as i64;
            prop_assert!(cap >= rat(2 * (ni + 1), 3 * ni));
            prop_assert!(cap <= rat(ni * ni - ni + 2, ni * ni));
        }

        #[test]
        fn affine_maps_preserve_the_network(
            seed in any::<u64>(),
            a in 1i64..5, b in -5i64..5, g in -5i64..5, d in prop::sample::select(vec![-3i64, -1, 1, 2]), e in -5i64..5,
        ) {
            let arr = sample_gmsn(6, seed).unwrap();
            let m = affine_image(&arr, &int(a), &int(b), &int(g), &int(d), &int(e)).unwrap();
            prop_assert_eq!(
                cmsn_from_arrangement(&m, TiePolicy::Reject).unwrap(),
                cmsn_from_arrangement(&arr, TiePolicy::Reject).unwrap()
            );
        }
    }
}
