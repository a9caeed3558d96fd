//! Deciding whether a network is drawn by straight lines with few slopes.
//!
//! Every positive answer carries an arrangement that has been checked to
//! regenerate the input exactly. Negative answers name the stage that rejected.
//!
//! With slopes fixed, the crossing x-coordinates are linear in the intercepts,
//! so the event order becomes a homogeneous system of strict inequalities
//! solved exactly by [`crate::lp::feasible_strict`]. An affine change of
//! coordinates that keeps the x-order lets two slope classes be pinned to
//! `−1` and `+1`; the remaining (at most two) slopes are searched over a
//! geometric ladder of magnitudes.

use std::collections::HashSet;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cmsn_from_arrangement, shear, Arrangement, GeometryError, Line, Slope, TiePolicy};
use crate::lp::{self, Constraint, Feasibility, LinearSystem, LpError, Relation};
use crate::network::{Cmsn, Packet};
use crate::rational::{int, rat, Rational};
use crate::wiring::{wiring_from_rcmsn, WiringError};

/// Largest slope budget handled by [`realize_rgmsn`].
pub const MAX_SLOPES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("sensors {a} and {c} do not cross, nor do {b} and {c}, yet {a} and {b} cross")]
    NotClassPartition { a: usize, b: usize, c: usize },
    #[error("slope budget {0} is not supported (1 to 4 are)")]
    UnsupportedSlopeCount(usize),
    #[error("invalid slope assignment: {0}")]
    BadAssignment(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Realizable,
    NotRealizable,
}

/// Which check produced a negative answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// No pseudoline arrangement produces the events.
    Wiring,
    /// Non-crossing is not an equivalence relation.
    ClassPartition,
    /// More parallel classes than the slope budget.
    ClassCount,
    /// Classes cannot be ordered by slope consistently with the far-left order.
    SlopeOrder,
    /// The intercept system is infeasible for the given slopes.
    LinearProgram,
    /// No slope candidate admits intercepts.
    CandidateSearch,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Wiring => "wiring",
            Stage::ClassPartition => "class-partition",
            Stage::ClassCount => "class-count",
            Stage::SlopeOrder => "slope-order",
            Stage::LinearProgram => "linear-program",
            Stage::CandidateSearch => "candidate-search",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizeResult {
    pub decision: Decision,
    /// Present exactly when realizable; regenerates the input.
    pub witness: Option<Arrangement>,
    /// Rejecting stage for negative answers.
    pub stage: Option<Stage>,
    pub certificate_note: String,
}

impl RealizeResult {
    fn rejected(stage: Stage, note: impl Into<String>) -> Self {
        RealizeResult { decision: Decision::NotRealizable, witness: None, stage: Some(stage), certificate_note: note.into() }
    }

    fn accepted(witness: Arrangement, note: impl Into<String>) -> Self {
        RealizeResult { decision: Decision::Realizable, witness: Some(witness), stage: None, certificate_note: note.into() }
    }

    pub fn is_realizable(&self) -> bool {
        self.decision == Decision::Realizable
    }
}

/// Maximal sets of mutually non-crossing sensors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClasses {
    /// Classes ordered by their smallest member; members ascending.
    pub classes: Vec<Vec<usize>>,
    /// `class_of[i]` is the class index of sensor `i + 1`.
    pub class_of: Vec<usize>,
}

impl ParallelClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Groups sensors by the non-crossing relation and checks that it is transitive.
pub fn parallel_classes(c: &Cmsn) -> Result<ParallelClasses, RealizeError> {
    let n = c.n();
    let mut cross = vec![vec![false; n + 1]; n + 1];
    for p in c.events() {
        cross[p.u][p.v] = true;
        cross[p.v][p.u] = true;
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for s in 1..=n {
        if class_of[s - 1] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![s];
        class_of[s - 1] = id;
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for y in 1..=n {
                if y != x && !cross[x][y] && class_of[y - 1] == usize::MAX {
                    class_of[y - 1] = id;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if cross[a][b] {
                    // Some member links a and b through non-crossing steps; report a witness triple.
                    let c = members.iter().copied().find(|&m| m != a && m != b && !cross[a][m] && !cross[b][m]);
                    let c = c.unwrap_or_else(|| bridge(&members, &cross, a, b));
                    return Err(RealizeError::NotClassPartition { a, b, c });
                }
            }
        }
        classes.push(members);
    }
    Ok(ParallelClasses { classes, class_of })
}

/// A member adjacent (non-crossing) to `a` on a path towards `b`.
fn bridge(members: &[usize], cross: &[Vec<bool>], a: usize, b: usize) -> usize {
    members.iter().copied().find(|&m| m != a && m != b && !cross[a][m]).unwrap_or(b)
}

/// The order of the lines at the far left, top to bottom, as inferred from the
/// wiring diagram. Slopes increase down this order.
fn far_left_order(c: &Cmsn) -> Result<Vec<usize>, WiringError> {
    Ok(wiring_from_rcmsn(c)?.sigma)
}

/// Class indices in the order they appear along `order`, or `None` if some
/// class is not contiguous there.
fn class_sequence(order: &[usize], class_of: &[usize]) -> Option<Vec<usize>> {
    let mut seq: Vec<usize> = Vec::new();
    for &s in order {
        let k = class_of[s - 1];
        if seq.last() != Some(&k) {
            if seq.contains(&k) {
                return None;
            }
            seq.push(k);
        }
    }
    Some(seq)
}

/// Coefficients of the crossing x (or, for a vertical line, of y) of `p` in the
/// intercept variables.
fn crossing_coeffs(p: &Packet, slopes: &[Slope], n: usize) -> (Vec<Rational>, Vec<Rational>) {
    let (u, v) = (p.u - 1, p.v - 1);
    let mut x = vec![Rational::zero(); n];
    let mut y = vec![Rational::zero(); n];
    match (&slopes[u], &slopes[v]) {
        (Slope::Finite(ku), Slope::Finite(kv)) => {
            // (b_v − b_u) / (k_u − k_v)
            let inv = (ku - kv).recip();
            x[v] = inv.clone();
            x[u] = -inv;
            y[u] = &x[u] * ku + Rational::one();
            y[v] = &x[v] * ku;
        }
        (Slope::Vertical, Slope::Finite(k)) | (Slope::Finite(k), Slope::Vertical) => {
            let (vert, fin) = if slopes[u] == Slope::Vertical { (u, v) } else { (v, u) };
            x[vert] = Rational::one();
            y[vert] = k.clone();
            y[fin] = Rational::one();
        }
        (Slope::Vertical, Slope::Vertical) => unreachable!("parallel lines never cross"),
    }
    (x, y)
}

fn vertical_member(p: &Packet, slopes: &[Slope]) -> Option<usize> {
    [p.u, p.v].into_iter().find(|&s| slopes[s - 1] == Slope::Vertical)
}

/// The homogeneous strict system over intercepts whose solutions draw `c`
/// with the given per-line slopes.
///
/// `order` lists the lines top to bottom at the far left; it fixes the order
/// of parallel lines. Consecutive events get a strict x-order, except two
/// events on the same vertical line, which are ordered by y (the order a small
/// shear produces).
pub fn intercept_system(c: &Cmsn, line_slopes: &[Slope], order: &[usize]) -> LinearSystem {
    let n = c.n();
    let mut sys = LinearSystem::new(n);
    let coeffs: Vec<_> = c.events().iter().map(|p| crossing_coeffs(p, line_slopes, n)).collect();
    for t in 1..c.len() {
        let (prev, next) = (&c.events()[t - 1], &c.events()[t]);
        let shared_vertical = vertical_member(prev, line_slopes).filter(|&s| next.contains(s));
        let (a, b) = if shared_vertical.is_some() {
            (&coeffs[t - 1].1, &coeffs[t].1)
        } else {
            (&coeffs[t - 1].0, &coeffs[t].0)
        };
        sys.push(Constraint::homogeneous(b.iter().zip(a).map(|(x, y)| x - y).collect(), Relation::Gt));
    }
    for w in order.windows(2) {
        let (top, below) = (w[0] - 1, w[1] - 1);
        if line_slopes[top] != line_slopes[below] {
            continue;
        }
        let mut row = vec![Rational::zero(); n];
        // Finite: the upper line has the larger intercept. Vertical: after the
        // shear the upper line is the one further left.
        let sign = if line_slopes[top] == Slope::Vertical { -1 } else { 1 };
        row[top] = int(sign);
        row[below] = int(-sign);
        sys.push(Constraint::homogeneous(row, Relation::Gt));
    }
    sys
}

fn same_events(a: &Cmsn, b: &Cmsn) -> bool {
    a.n() == b.n() && a.events() == b.events()
}

/// Builds the witness from intercepts and checks it, shearing away vertical lines.
fn certify(c: &Cmsn, line_slopes: &[Slope], intercepts: Vec<Rational>) -> Result<Option<Arrangement>, RealizeError> {
    let lines: Vec<Line> =
        line_slopes.iter().zip(intercepts).map(|(k, b)| Line { slope: k.clone(), intercept: b }).collect();
    let arr = Arrangement::new(lines);
    if !line_slopes.contains(&Slope::Vertical) {
        let ok = cmsn_from_arrangement(&arr, TiePolicy::StableIfDisjoint).is_ok_and(|g| same_events(&g, c));
        return Ok(ok.then_some(arr));
    }
    let mut eps = rat(1, 16);
    for _ in 0..128 {
        if let Ok(tilted) = shear(&arr, &eps) {
            if cmsn_from_arrangement(&tilted, TiePolicy::StableIfDisjoint).is_ok_and(|g| same_events(&g, c)) {
                return Ok(Some(tilted));
            }
        }
        eps /= int(4);
    }
    Ok(None)
}

/// Intercept LP for fixed per-line slopes; `order` as in [`intercept_system`].
fn solve_fixed(c: &Cmsn, line_slopes: &[Slope], order: &[usize]) -> Result<Option<Arrangement>, RealizeError> {
    let sys = intercept_system(c, line_slopes, order);
    match lp::feasible_strict(&sys)? {
        Feasibility::Infeasible => Ok(None),
        Feasibility::Feasible(w) => certify(c, line_slopes, w.into_values()),
    }
}

/// Checks the wiring and the class structure; on failure returns the rejection.
struct Prepared {
    order: Vec<usize>,
    classes: ParallelClasses,
    /// Class indices along `order`.
    sequence: Vec<usize>,
}

fn prepare(c: &Cmsn) -> Result<Result<Prepared, RealizeResult>, RealizeError> {
    let order = match far_left_order(c) {
        Ok(o) => o,
        Err(WiringError::NonRealizable { event, reason }) => {
            let at = event.map(|k| format!(" at event {k}")).unwrap_or_default();
            return Ok(Err(RealizeResult::rejected(Stage::Wiring, format!("no pseudoline arrangement{at}: {reason}"))));
        }
        Err(e) => return Err(RealizeError::BadAssignment(e.to_string())),
    };
    let classes = match parallel_classes(c) {
        Ok(p) => p,
        Err(e @ RealizeError::NotClassPartition { .. }) => {
            return Ok(Err(RealizeResult::rejected(Stage::ClassPartition, e.to_string())));
        }
        Err(e) => return Err(e),
    };
    let Some(sequence) = class_sequence(&order, &classes.class_of) else {
        return Ok(Err(RealizeResult::rejected(Stage::SlopeOrder, "a parallel class is split in the far-left order")));
    };
    Ok(Ok(Prepared { order, classes, sequence }))
}

fn slope_rank(s: &Slope) -> Option<&Rational> {
    s.finite()
}

/// Decides whether `c` is drawn by lines where sensor `i + 1` lies in class
/// `class_assignment[i]` with slope `slopes[class]`.
///
/// The witness uses exactly the requested slopes unless one is vertical, in
/// which case the whole witness is sheared slightly.
pub fn realize_with_slopes(c: &Cmsn, slopes: &[Slope], class_assignment: &[usize]) -> Result<RealizeResult, RealizeError> {
    let n = c.n();
    if class_assignment.len() != n {
        return Err(RealizeError::BadAssignment(format!("{} class indices for {n} sensors", class_assignment.len())));
    }
    if let Some(&k) = class_assignment.iter().find(|&&k| k >= slopes.len()) {
        return Err(RealizeError::BadAssignment(format!("class {k} has no slope")));
    }
    for i in 0..slopes.len() {
        if slopes[i + 1..].contains(&slopes[i]) {
            return Err(RealizeError::BadAssignment("slopes must be pairwise distinct".into()));
        }
    }
    let prep = match prepare(c)? {
        Ok(p) => p,
        Err(rejection) => return Ok(rejection),
    };
    // Each parallel class must carry one slope, and distinct classes distinct slopes.
    for class in &prep.classes.classes {
        let k = class_assignment[class[0] - 1];
        if class.iter().any(|&s| class_assignment[s - 1] != k) {
            return Ok(RealizeResult::rejected(Stage::ClassPartition, "a parallel class spans several slopes"));
        }
    }
    let mut used: Vec<usize> = prep.classes.classes.iter().map(|cl| class_assignment[cl[0] - 1]).collect();
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Ok(RealizeResult::rejected(Stage::ClassPartition, "crossing sensors were given the same slope"));
    }
    let line_slopes: Vec<Slope> = class_assignment.iter().map(|&k| slopes[k].clone()).collect();

    // The far-left order sorts lines by increasing slope (vertical last); use
    // whichever reading of it agrees with the requested slopes.
    let ranks: Vec<&Slope> = prep.sequence.iter().map(|&cl| &line_slopes[prep.classes.classes[cl][0] - 1]).collect();
    let before = |a: &Slope, b: &Slope| match (slope_rank(a), slope_rank(b)) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let order = if ranks.windows(2).all(|w| before(w[0], w[1])) {
        prep.order
    } else if ranks.windows(2).all(|w| before(w[1], w[0])) {
        prep.order.into_iter().rev().collect()
    } else {
        return Ok(RealizeResult::rejected(Stage::SlopeOrder, "the far-left order is not sorted by the given slopes"));
    };
    match solve_fixed(c, &line_slopes, &order)? {
        Some(w) => Ok(RealizeResult::accepted(w, "intercepts found for the given slopes; regeneration verified")),
        None => Ok(RealizeResult::rejected(Stage::LinearProgram, "no intercepts order the crossings as required")),
    }
}

/// Slope magnitudes `> 1` tried for free classes: `1 + 2^e·(1 + i/steps)` for
/// `e ∈ −4..=11` and `i < steps`, ascending. Each ladder contains the ladders
/// whose step count divides its own.
pub fn ladder(steps: i64) -> Vec<Rational> {
    (-4 * steps..12 * steps)
        .map(|j| {
            let e = j.div_euclid(steps);
            let p = if e >= 0 { int(1i64 << e) } else { rat(1, 1i64 << -e) };
            Rational::one() + p * rat(steps + j.rem_euclid(steps), steps)
        })
        .collect()
}

/// Ladder resolutions tried in turn; the finer one runs only when the coarse
/// one finds nothing.
const LADDER_TIERS: [i64; 2] = [4, 16];

fn moderation(k: &Rational) -> f64 {
    (k.to_f64().unwrap_or(f64::MAX) - 3.0).abs()
}

/// Ladder indices for the classes left of the pinned pair (listed outward) and
/// right of it (listed outward); magnitudes strictly increase outward.
fn slope_candidates(lad: &[Rational], left: usize, right: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    fn increasing(m: usize, len: usize) -> Vec<Vec<usize>> {
        match len {
            0 => vec![vec![]],
            1 => (0..m).map(|i| vec![i]).collect(),
            2 => (0..m).flat_map(|i| (i + 1..m).map(move |j| vec![i, j])).collect(),
            _ => unreachable!("at most two free classes"),
        }
    }
    let mut out = Vec::new();
    for l in increasing(lad.len(), left) {
        for r in increasing(lad.len(), right) {
            out.push((l.clone(), r));
        }
    }
    let score = |c: &(Vec<usize>, Vec<usize>)| -> f64 { c.0.iter().chain(&c.1).map(|&i| moderation(&lad[i])).sum() };
    // Stable sort keeps ladder order among equally moderate candidates.
    out.sort_by(|a, b| score(a).total_cmp(&score(b)));
    out
}

/// Events among lines of the given classes only.
fn sub_network(c: &Cmsn, class_of: &[usize], keep: &[usize]) -> Cmsn {
    let events = c.events().iter().filter(|p| keep.contains(&class_of[p.u - 1]) && keep.contains(&class_of[p.v - 1])).copied().collect();
    Cmsn::from_parts_unchecked(c.n(), events, crate::network::Kind::Cmsn)
}

/// Decides whether `c` is drawn by lines using at most `s ≤ 4` distinct slopes.
///
/// Rejections at the wiring, class-partition, class-count and slope-order
/// stages are certain. A rejection at the candidate-search stage means no
/// slope on the finite search ladder worked; it has not been observed on
/// sampled line arrangements.
pub fn realize_rgmsn(c: &Cmsn, s: usize) -> Result<RealizeResult, RealizeError> {
    if s == 0 || s > MAX_SLOPES {
        return Err(RealizeError::UnsupportedSlopeCount(s));
    }
    let prep = match prepare(c)? {
        Ok(p) => p,
        Err(rejection) => return Ok(rejection),
    };
    let k = prep.classes.len();
    if k > s {
        return Ok(RealizeResult::rejected(Stage::ClassCount, format!("{k} parallel classes exceed the budget of {s} slopes")));
    }
    let n = c.n();
    let class_slopes_to_lines = |per_class: &[Rational]| -> Vec<Slope> {
        (0..n).map(|i| Slope::Finite(per_class[prep.classes.class_of[i]].clone())).collect()
    };

    if k <= 2 {
        let mut per_class = vec![Rational::zero(); k];
        for (pos, &cl) in prep.sequence.iter().enumerate() {
            per_class[cl] = if k == 1 { Rational::zero() } else { int(2 * pos as i64 - 1) };
        }
        let line_slopes = class_slopes_to_lines(&per_class);
        if k == 1 {
            let lines = (0..n).map(|i| Line::new(Rational::zero(), int((n - pos_of(&prep.order, i + 1)) as i64))).collect();
            return Ok(RealizeResult::accepted(Arrangement::new(lines), "all lines parallel"));
        }
        return Ok(match solve_fixed(c, &line_slopes, &prep.order)? {
            Some(w) => RealizeResult::accepted(w, "two classes drawn with slopes -1 and 1; regeneration verified"),
            None => RealizeResult::rejected(Stage::LinearProgram, "the two-class intercept system is infeasible"),
        });
    }

    // Pin the classes of the last crossing to −1 and +1. They are adjacent in
    // slope order because the last crossing swaps neighbours at the far right.
    let last = c.events().last().expect("two or more classes imply events");
    let (ca, cb) = (prep.classes.class_of[last.u - 1], prep.classes.class_of[last.v - 1]);
    let mut seq = prep.sequence.clone();
    let mut order = prep.order.clone();
    let (mut ia, mut ib) = (pos_of(&seq, ca), pos_of(&seq, cb));
    if ia > ib {
        seq.reverse();
        order.reverse();
        ia = pos_of(&seq, ca);
        ib = pos_of(&seq, cb);
    }
    if ib != ia + 1 {
        return Ok(RealizeResult::rejected(Stage::SlopeOrder, "the last crossing joins classes that are not slope neighbours"));
    }
    let left: Vec<usize> = seq[..ia].iter().rev().copied().collect();
    let right: Vec<usize> = seq[ib + 1..].to_vec();
    let free: Vec<(usize, i64)> = left.iter().map(|&cl| (cl, -1)).chain(right.iter().map(|&cl| (cl, 1))).collect();
    let slopes_for = |assign: &[(usize, Rational)]| -> Vec<Slope> {
        let mut per_class = vec![Rational::zero(); k];
        per_class[ca] = int(-1);
        per_class[cb] = int(1);
        for (cl, v) in assign {
            per_class[*cl] = v.clone();
        }
        class_slopes_to_lines(&per_class)
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut tried = 0usize;
    for steps in LADDER_TIERS {
        let lad = ladder(steps);
        // With two free classes, each must already work together with the
        // pinned pair alone; those smaller systems are solved once per value.
        let mut alone: Vec<Vec<Option<bool>>> = vec![vec![None; lad.len()]; free.len()];
        for (lv, rv) in slope_candidates(&lad, left.len(), right.len()) {
            let picks: Vec<usize> = lv.into_iter().chain(rv).collect();
            // Index in the finest ladder identifies a value across tiers.
            let key: Vec<usize> = picks.iter().map(|&i| i * (LADDER_TIERS[1] / steps) as usize).collect();
            if !seen.insert(key) {
                continue;
            }
            let assign: Vec<(usize, Rational)> =
                free.iter().zip(&picks).map(|(&(cl, sign), &i)| (cl, int(sign) * &lad[i])).collect();
            if free.len() == 2 {
                let mut pass = true;
                for (f, &i) in picks.iter().enumerate() {
                    if alone[f][i].is_none() {
                        let sub = sub_network(c, &prep.classes.class_of, &[ca, cb, free[f].0]);
                        let sys = intercept_system(&sub, &slopes_for(&assign[f..=f]), &order);
                        alone[f][i] = Some(lp::feasible_strict(&sys)?.is_feasible());
                    }
                    pass &= alone[f][i] == Some(true);
                }
                if !pass {
                    continue;
                }
            }
            tried += 1;
            if let Some(w) = solve_fixed(c, &slopes_for(&assign), &order)? {
                let shown: Vec<String> = assign.iter().map(|(_, v)| crate::rational::format_rational(v)).collect();
                return Ok(RealizeResult::accepted(
                    w,
                    format!(
                        "{k} classes drawn with slopes -1, 1, {} after {tried} full systems; regeneration verified",
                        shown.join(", ")
                    ),
                ));
            }
        }
    }
    Ok(RealizeResult::rejected(
        Stage::CandidateSearch,
        format!("none of {tried} candidate slope assignments admits intercepts"),
    ))
}

fn pos_of(seq: &[usize], x: usize) -> usize {
    seq.iter().position(|&y| y == x).expect("class occurs in the sequence")
}

/// Whether every realizable verdict in `r` regenerates `c`; used by tests.
pub fn witness_regenerates(c: &Cmsn, r: &RealizeResult) -> bool {
    match &r.witness {
        None => r.decision == Decision::NotRealizable,
        Some(w) => cmsn_from_arrangement(w, TiePolicy::StableIfDisjoint).is_ok_and(|g| same_events(&g, c)),
    }
}
