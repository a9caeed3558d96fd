//! Deterministic line arrangements that attain the extremal capacities.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::formulas;
use crate::geometry::{cmsn_from_arrangement, intersection_x, Arrangement, GeometryError, Line, Slope, TiePolicy};
use crate::network::{self, Cmsn};
use crate::rational::{int, rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<(), ConstructionError> {
    if cond {
        Ok(())
    } else {
        Err(ConstructionError::BadParams(msg()))
    }
}

/// An arrangement together with the tie policy it is meant to be read with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub arrangement: Arrangement,
    pub policy: TiePolicy,
}

impl Construction {
    pub fn cmsn(&self) -> Result<Cmsn, GeometryError> {
        cmsn_from_arrangement(&self.arrangement, self.policy)
    }
}

/// Lines `kx + (n+1−k)y = k(n+1−k)` for `k = 1..=n`.
///
/// For `n ≥ 6` some crossings of disjoint pairs share an x-coordinate
/// (`x = (n+1−i)(n+1−j)/(n+1)`), so the network is read with
/// [`TiePolicy::StableIfDisjoint`].
pub fn min_capacity_gmsn(n: usize) -> Result<Construction, ConstructionError> {
    need(n >= 2, || format!("min-gmsn needs n ≥ 2, got {n}"))?;
    let n1 = n as i64 + 1;
    let lines = (1..=n as i64).map(|k| Line::new(rat(-k, n1 - k), int(k))).collect();
    Ok(Construction { arrangement: Arrangement::new(lines), policy: TiePolicy::StableIfDisjoint })
}

/// Largest crossing x among `lines`, or `None` if no two cross.
fn max_crossing_x(lines: &[Line]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            if let Some(x) = intersection_x(&lines[i], &lines[j]) {
                if best.as_ref().is_none_or(|b| x > *b) {
                    best = Some(x);
                }
            }
        }
    }
    best
}

/// A line of slope `k` whose crossings with `lines` all lie strictly right of
/// every crossing already present (by a margin of at least 1).
pub fn place_right(lines: &[Line], k: &Rational) -> Option<Line> {
    let x = max_crossing_x(lines).unwrap_or_else(Rational::zero) + Rational::one();
    // Crossing with y = k_i x + b_i sits at (c − b_i)/(k_i − k).
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for l in lines {
        let Slope::Finite(ki) = &l.slope else { return None };
        if ki == k {
            continue;
        }
        let bound = &l.intercept + (ki - k) * &x;
        if ki > k {
            if lower.as_ref().is_none_or(|v| bound > *v) {
                lower = Some(bound);
            }
        } else if upper.as_ref().is_none_or(|v| bound < *v) {
            upper = Some(bound);
        }
    }
    let c = match (lower, upper) {
        (Some(lo), None) => lo + Rational::one(),
        (None, Some(hi)) => hi - Rational::one(),
        (None, None) => Rational::zero(),
        (Some(lo), Some(hi)) => {
            if lo >= hi {
                return None;
            }
            (lo + hi) / int(2)
        }
    };
    Some(Line::new(k.clone(), c))
}

/// Nudges intercepts of lines in `movable` by shrinking dyadic amounts until the
/// arrangement reads without error under `policy`.
fn make_generic(mut lines: Vec<Line>, movable: &[usize], policy: TiePolicy) -> Result<Vec<Line>, ConstructionError> {
    let mut step = rat(1, 64);
    for round in 0..200 {
        let arr = Arrangement::new(lines.clone());
        let offender = match cmsn_from_arrangement(&arr, policy) {
            Ok(_) => return Ok(lines),
            Err(GeometryError::ConcurrentLines(a, b, c)) => [c, b, a].into_iter().find(|i| movable.contains(&(i - 1))),
            Err(GeometryError::TieRejected(p, q)) => {
                [q.v, q.u, p.v, p.u].into_iter().find(|i| movable.contains(&(i - 1)))
            }
            Err(e) => return Err(e.into()),
        };
        let Some(i) = offender else {
            return Err(ConstructionError::ConstructionFailed(format!(
                "degenerate crossing among fixed lines after {round} repairs"
            )));
        };
        lines[i - 1].intercept += &step * int(round as i64 % 7 + 1);
        step /= int(2);
    }
    Err(ConstructionError::ConstructionFailed("could not make the arrangement generic".into()))
}

/// Body of `n − 2` lines with slopes `2..n−1`, then a collector (slope 1) and a
/// distributor (slope `n`) each placed right of all earlier crossings.
pub fn max_capacity_gmsn(n: usize) -> Result<Construction, ConstructionError> {
    need(n >= 3, || format!("max-gmsn needs n ≥ 3, got {n}"))?;
    let body: Vec<Line> = (2..n as i64).map(|k| Line::new(int(k), int(k * k * k))).collect();
    let movable: Vec<usize> = (0..body.len()).collect();
    let mut lines = if body.len() < 2 { body } else { make_generic(body, &movable, TiePolicy::Reject)? };
    let collector = place_right(&lines, &int(1)).expect("collector slope is below every body slope");
    lines.push(collector);
    let distributor = place_right(&lines, &int(n as i64)).expect("distributor slope is above every other slope");
    lines.push(distributor);
    Ok(Construction { arrangement: Arrangement::new(lines), policy: TiePolicy::Reject })
}

/// `m` lines of slope `+1` (intercepts `i(n+1)`) and `k` lines of slope `−1`
/// (intercepts `j`). Requires `n = m + k ≥ 3`.
pub fn grid(m: usize, k: usize) -> Result<Construction, ConstructionError> {
    need(m >= 1 && k >= 1, || format!("grid needs m, k ≥ 1, got m = {m}, k = {k}"))?;
    let n = m + k;
    need(n >= 3, || format!("grid needs n = m + k ≥ 3, got {n}"))?;
    let step = n as i64 + 1;
    let mut lines: Vec<Line> = (1..=m as i64).map(|i| Line::new(int(1), int(i * step))).collect();
    lines.extend((1..=k as i64).map(|j| Line::new(int(-1), int(j))));
    Ok(Construction { arrangement: Arrangement::new(lines), policy: TiePolicy::Reject })
}

/// Class sizes `(a, b, c)` maximizing the three-slope capacity for `n` lines,
/// where `b` is the middle-slope class. Ties go to the smaller `a`, then smaller `c`.
pub fn three_slope_sizes(n: usize) -> (usize, usize, usize) {
    let mut best: Option<(Rational, (usize, usize, usize))> = None;
    for a in 1..n {
        for c in 1..(n - a) {
            let b = n - a - c;
            let v = formulas::three_slope_capacity(a, b, c);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, (a, b, c)));
            }
        }
    }
    best.expect("n ≥ 3").1
}

/// The three-slope arrangement with class sizes `(a, b, c)`.
///
/// Built from `a − 1` lines `x = k`, the line `x = a + 2b + 2c − 2`, `b` lines
/// `y = h` (`h = 0..b−1`) and `c` lines `x + 2y = a + 2b + 2k − 3`, then mapped
/// by `(x, y) ↦ (x + y, y − x)`. The map scales a rotation by `π/4` by `√2`, so
/// crossings keep their x-order, and the slopes become `+1`, `−1` and `−3`.
pub fn three_slope_arrangement(a: usize, b: usize, c: usize) -> Result<Construction, ConstructionError> {
    need(a >= 1 && b >= 1 && c >= 1, || format!("three-slope sizes must be positive, got ({a}, {b}, {c})"))?;
    let (ai, bi, ci) = (a as i64, b as i64, c as i64);
    let mut lines = Vec::with_capacity(a + b + c);
    // x = p  ↦  Y = X − 2p
    for k in 1..ai {
        lines.push(Line::new(int(1), int(-2 * k)));
    }
    lines.push(Line::new(int(1), int(-2 * (ai + 2 * bi + 2 * ci - 2))));
    // y = h  ↦  Y = −X + 2h
    for h in 0..bi {
        lines.push(Line::new(int(-1), int(2 * h)));
    }
    // x + 2y = C  ↦  Y = −3X + 2C
    for k in 1..=ci {
        lines.push(Line::new(int(-3), int(2 * (ai + 2 * bi + 2 * k - 3))));
    }
    Ok(Construction { arrangement: Arrangement::new(lines), policy: TiePolicy::StableIfDisjoint })
}

/// Three-slope arrangement with the best class sizes for `n ≥ 4`.
pub fn three_slope_optimal(n: usize) -> Result<Construction, ConstructionError> {
    need(n >= 4, || format!("opt3 needs n ≥ 4, got {n}"))?;
    let (a, b, c) = three_slope_sizes(n);
    three_slope_arrangement(a, b, c)
}

/// Four-slope arrangement attaining [`formulas::max4`] for `n ≥ 5`.
///
/// With sizes `(1, b, c, 1)`: a `b`-line class of slope `−1` and a `c`-line
/// class of slope `−2` form a grid; a collector of slope `−4` is placed right
/// of the grid and a distributor of slope `+1` right of everything. The grid's
/// crossings and the `−2`/`−4` crossings all precede the distributor, which
/// realizes the delivery pattern whose sum is the four-slope case-one expression.
pub fn four_slope_optimal(n: usize) -> Result<Construction, ConstructionError> {
    need(n >= 5, || format!("opt4 needs n ≥ 5, got {n}"))?;
    let (a, b, c, d) = formulas::four_slope_sizes(n);
    if a != 1 || d != 1 {
        return Err(ConstructionError::ConstructionFailed(format!("unsupported class sizes ({a}, {b}, {c}, {d})")));
    }
    let (bi, ci) = (b as i64, c as i64);
    let mut body: Vec<Line> = (0..bi).map(|i| Line::new(int(-1), int(i * (ci + 1)))).collect();
    body.extend((0..ci).map(|j| Line::new(int(-2), int(j))));
    let collector = place_right(&body, &int(-4)).expect("collector slope is below the body slopes");
    body.push(collector);
    let distributor = place_right(&body, &int(1)).expect("distributor slope is above every other slope");
    let mut lines = vec![distributor];
    lines.extend(body);
    let built = Construction { arrangement: Arrangement::new(lines), policy: TiePolicy::Reject };
    let cap = network::capacity(&built.cmsn()?).map_err(|e| ConstructionError::ConstructionFailed(e.to_string()))?;
    if cap != formulas::max4(n) {
        return Err(ConstructionError::ConstructionFailed(format!(
            "capacity {cap} differs from the closed form {}",
            formulas::max4(n)
        )));
    }
    Ok(built)
}

/// Near-equal split of `m` items into `parts` groups, larger groups first.
fn split_even(m: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|j| m / parts + usize::from(j < m % parts)).collect()
}

/// Collector-distributor family with `s ≥ 3` slopes on `n ≥ s` lines.
///
/// `a` collectors (slope `−1`) and `a` distributors (slope `+1`) cross a narrow
/// horizontal band holding `n − 2a` lines split over `s − 2` nearly horizontal
/// classes. Along the band collectors and distributors alternate, so every band
/// crossing is followed by crossings in both directions. The middle classes
/// cross each other far to the left of the grid. `a` maximizes the
/// delivery-count bound [`formulas::maxabs_objective`].
pub fn collector_distributor_family(n: usize, s: usize) -> Result<Construction, ConstructionError> {
    need(s >= 3, || format!("cd-family needs s ≥ 3, got {s}"))?;
    need(n >= s, || format!("cd-family needs n ≥ s, got n = {n}, s = {s}"))?;
    let a = formulas::maxabs_best_a(n, s);
    let m = n - 2 * a;
    let sizes = split_even(m, s - 2);
    let ai = a as i64;
    let slope_step = rat(1, 8 * s as i64 * (4 * ai + 8));
    let band = int(2 * (m as i64 + 1));
    let mut lines = Vec::with_capacity(n);
    let mut count = 0i64;
    for (j, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            count += 1;
            // Higher slope classes sit higher at x = 0, so middle crossings lie at x < 0.
            let b = Rational::new(count.into(), band.numer().clone()) - rat(1, 4);
            lines.push(Line::new(&slope_step * int(j as i64), b));
        }
    }
    let movable: Vec<usize> = (0..lines.len()).collect();
    for i in 1..=ai {
        lines.push(Line::new(int(-1), int(4 * i)));
    }
    for j in 1..=ai {
        lines.push(Line::new(int(1), int(-(4 * j + 2))));
    }
    let lines = make_generic(lines, &movable, TiePolicy::StableIfDisjoint)?;
    Ok(Construction { arrangement: Arrangement::new(lines), policy: TiePolicy::StableIfDisjoint })
}
