//! Closed-form capacity expressions.
//!
//! Rational-valued formulas are exact. Formulas containing square roots are
//! returned as a [`HighPrecisionReal`]: a rational enclosure narrower than
//! `10^-64`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::Signed;
use thiserror::Error;

use crate::rational::{int, rat, to_decimal, Rational};

/// Decimal digits carried by [`HighPrecisionReal`].
pub const REAL_DIGITS: u32 = 64;

/// A real number known to lie in the closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighPrecisionReal {
    pub lo: Rational,
    pub hi: Rational,
}

impl HighPrecisionReal {
    pub fn exact(r: Rational) -> Self {
        HighPrecisionReal { lo: r.clone(), hi: r }
    }

    /// Enclosure of `sqrt(x)` for `x ≥ 0` to [`REAL_DIGITS`] digits.
    pub fn sqrt(x: &Rational) -> Self {
        assert!(!x.is_negative(), "square root of a negative number");
        let scale = num_traits::pow(BigInt::from(10), REAL_DIGITS as usize);
        let scaled = (x * Rational::from_integer(&scale * &scale)).floor().to_integer();
        let s = scaled.sqrt();
        let lo = Rational::new(s.clone(), scale.clone());
        let exact = &s * &s == scaled && lo.clone() * lo.clone() == *x;
        let hi = if exact { lo.clone() } else { Rational::new(s + 1, scale) };
        HighPrecisionReal { lo, hi }
    }

    pub fn add(&self, other: &Self) -> Self {
        HighPrecisionReal { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        HighPrecisionReal { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        HighPrecisionReal { lo, hi }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let a = &self.lo * r;
        let b = &self.hi * r;
        if r.is_negative() {
            HighPrecisionReal { lo: b, hi: a }
        } else {
            HighPrecisionReal { lo: a, hi: b }
        }
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::to_f64(&self.midpoint())
    }

    /// Decimal rendering of the midpoint.
    pub fn to_decimal(&self, places: usize) -> String {
        to_decimal(&self.midpoint(), places)
    }

    /// Whether the whole enclosure is strictly below / above a rational.
    pub fn certainly_lt(&self, r: &Rational) -> bool {
        self.hi < *r
    }

    pub fn certainly_gt(&self, r: &Rational) -> bool {
        self.lo > *r
    }
}

impl fmt::Display for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("bad parameters for {name}: {reason}")]
    BadParams { name: &'static str, reason: String },
    #[error("unknown formula {0:?}")]
    UnknownName(String),
}

/// Which closed form to evaluate, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    /// Minimum capacity over restricted networks, `2(n+1)/(3n)`.
    MinRcmsn { n: usize },
    /// Maximum capacity over restricted networks, `1 − 1/n + 2/n²`.
    MaxRcmsn { n: usize },
    /// Capacity of every two-slope network with both slopes used.
    Cap2 { n: usize },
    /// Maximum absolute capacity with two slopes.
    Maxabs2 { n: usize },
    /// Expected absolute capacity with two uniformly assigned slopes.
    Expabs2 { n: usize },
    /// Maximum capacity with three slopes.
    Max3 { n: usize },
    /// Maximum capacity with four slopes.
    Max4 { n: usize },
    /// Large-`n` limit of the maximum absolute capacity with `s` slopes.
    MaxabsLimit { s: usize },
    /// Large-`n` limit of the expected capacity; `None` means unrestricted slopes.
    ExpLimit { s: Option<usize> },
    /// Leading-order maximum capacity with `s ≥ 3` slopes.
    MaxSLeading { n: usize, s: usize },
}

impl FormulaId {
    pub fn name(&self) -> &'static str {
        match self {
            FormulaId::MinRcmsn { .. } => "min_rcmsn",
            FormulaId::MaxRcmsn { .. } => "max_rcmsn",
            FormulaId::Cap2 { .. } => "cap2",
            FormulaId::Maxabs2 { .. } => "maxabs2",
            FormulaId::Expabs2 { .. } => "expabs2",
            FormulaId::Max3 { .. } => "max3",
            FormulaId::Max4 { .. } => "max4",
            FormulaId::MaxabsLimit { .. } => "maxabs_limit",
            FormulaId::ExpLimit { .. } => "exp_limit",
            FormulaId::MaxSLeading { .. } => "max_s_leading",
        }
    }

    /// Builds an id from a name (`-` and `_` are interchangeable) and optional parameters.
    pub fn from_name(name: &str, n: Option<usize>, s: Option<usize>) -> Result<Self, FormulaError> {
        let key = name.replace('-', "_").to_ascii_lowercase();
        let static_name: &'static str = match key.as_str() {
            "min_rcmsn" => "min_rcmsn",
            "max_rcmsn" => "max_rcmsn",
            "cap2" => "cap2",
            "maxabs2" => "maxabs2",
            "expabs2" => "expabs2",
            "max3" => "max3",
            "max4" => "max4",
            "maxabs_limit" => "maxabs_limit",
            "exp_limit" => "exp_limit",
            "max_s_leading" => "max_s_leading",
            _ => return Err(FormulaError::UnknownName(name.to_string())),
        };
        let need_n = |v: Option<usize>| {
            v.ok_or(FormulaError::BadParams { name: static_name, reason: "missing n".into() })
        };
        let need_s = |v: Option<usize>| {
            v.ok_or(FormulaError::BadParams { name: static_name, reason: "missing s".into() })
        };
        Ok(match static_name {
            "min_rcmsn" => FormulaId::MinRcmsn { n: need_n(n)? },
            "max_rcmsn" => FormulaId::MaxRcmsn { n: need_n(n)? },
            "cap2" => FormulaId::Cap2 { n: need_n(n)? },
            "maxabs2" => FormulaId::Maxabs2 { n: need_n(n)? },
            "expabs2" => FormulaId::Expabs2 { n: need_n(n)? },
            "max3" => FormulaId::Max3 { n: need_n(n)? },
            "max4" => FormulaId::Max4 { n: need_n(n)? },
            "maxabs_limit" => FormulaId::MaxabsLimit { s: need_s(s)? },
            "exp_limit" => FormulaId::ExpLimit { s },
            _ => FormulaId::MaxSLeading { n: need_n(n)?, s: need_s(s)? },
        })
    }
}

impl FromStr for FormulaId {
    type Err = FormulaError;
    /// Parses `name` or `name:n` or `name:n:s`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut parts = text.split(':');
        let name = parts.next().unwrap_or_default();
        let parse = |p: Option<&str>| p.and_then(|v| v.parse::<usize>().ok());
        let n = parse(parts.next());
        let s = parse(parts.next());
        FormulaId::from_name(name, n, s)
    }
}

/// A formula value: exact, or a high-precision enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaValue {
    Exact(Rational),
    Real(HighPrecisionReal),
}

impl FormulaValue {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            FormulaValue::Exact(r) => Some(r),
            FormulaValue::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            FormulaValue::Exact(r) => crate::rational::to_f64(r),
            FormulaValue::Real(r) => r.to_f64(),
        }
    }

    pub fn enclosure(&self) -> HighPrecisionReal {
        match self {
            FormulaValue::Exact(r) => HighPrecisionReal::exact(r.clone()),
            FormulaValue::Real(r) => r.clone(),
        }
    }
}

fn bad(name: &'static str, reason: impl Into<String>) -> FormulaError {
    FormulaError::BadParams { name, reason: reason.into() }
}

fn need(cond: bool, name: &'static str, reason: &str) -> Result<(), FormulaError> {
    if cond {
        Ok(())
    } else {
        Err(bad(name, reason))
    }
}

fn big(v: i128) -> BigInt {
    BigInt::from(v)
}

fn frac(num: i128, den: i128) -> Rational {
    Rational::new(big(num), big(den))
}

/// Evaluates a closed form.
pub fn closed_form(id: FormulaId) -> Result<FormulaValue, FormulaError> {
    use FormulaValue::Exact;
    let name = id.name();
    match id {
        FormulaId::MinRcmsn { n } => {
            need(n >= 2, name, "n ≥ 2")?;
            let n = n as i128;
            Ok(Exact(frac(2 * (n + 1), 3 * n)))
        }
        FormulaId::MaxRcmsn { n } => {
            need(n >= 2, name, "n ≥ 2")?;
            let n = n as i128;
            Ok(Exact(frac(n * n - n + 2, n * n)))
        }
        FormulaId::Cap2 { n } => {
            need(n >= 3, name, "n ≥ 3")?;
            let n = n as i128;
            Ok(Exact(frac(n + 2, 2 * n)))
        }
        FormulaId::Maxabs2 { n } => {
            need(n >= 3, name, "n ≥ 3")?;
            let n = n as i128;
            Ok(Exact(if n % 2 == 0 { frac(n + 2, 4 * n - 4) } else { frac((n + 1) * (n + 2), 4 * n * n) }))
        }
        FormulaId::Expabs2 { n } => {
            need(n >= 3, name, "n ≥ 3")?;
            let n = n as i128;
            Ok(Exact(frac(n + 2, 4 * n)))
        }
        FormulaId::Max3 { n } => {
            need(n >= 4, name, "n ≥ 4")?;
            Ok(Exact(max3(n)))
        }
        FormulaId::Max4 { n } => {
            need(n >= 5, name, "n ≥ 5")?;
            Ok(Exact(max4(n)))
        }
        FormulaId::MaxabsLimit { s } => {
            need(s >= 3, name, "s ≥ 3")?;
            Ok(FormulaValue::Real(maxabs_limit(s)))
        }
        FormulaId::ExpLimit { s } => match s {
            None => Ok(Exact(rat(5, 6))),
            Some(2) => Ok(Exact(rat(1, 2))),
            Some(3) => Ok(Exact(rat(11, 18))),
            Some(4) => Ok(Exact(rat(17, 24))),
            Some(other) => Err(bad(name, format!("known for unrestricted slopes or s ∈ {{2,3,4}}, got s = {other}"))),
        },
        FormulaId::MaxSLeading { n, s } => {
            need(n >= 1, name, "n ≥ 1")?;
            need(s >= 3, name, "s ≥ 3")?;
            if s == 3 {
                let n_r = int(n as i64);
                let inv_sqrt = HighPrecisionReal::sqrt(&n_r.recip());
                let rest = HighPrecisionReal::exact(int(1) + frac(9, 8 * n as i128));
                Ok(FormulaValue::Real(rest.sub(&inv_sqrt)))
            } else {
                let (s, n) = (s as i128, n as i128);
                Ok(Exact(int(1) - frac(s - 2, (s - 3) * n)))
            }
        }
    }
}

/// Exact capacity of the three-slope arrangement with class sizes `(a, b, c)`,
/// where `b` is the size of the class whose slope lies between the other two.
pub fn three_slope_capacity(a: usize, b: usize, c: usize) -> Rational {
    let (a, b, c) = (a as i128, b as i128, c as i128);
    let n = a + b + c;
    frac(2 * b + a + c + 2, 2 * n) - frac(n - 1, 2 * n) * frac(b, a * b + b * c + c * a)
}

/// The two-parameter family `f(a, b)` with `c = a`.
pub fn three_slope_symmetric(a: usize, b: usize) -> Rational {
    let (a, b) = (a as i128, b as i128);
    let n = 2 * a + b;
    frac(a + b + 1, n) - frac(n - 1, 2 * n) * frac(b, a * a + 2 * a * b)
}

/// Largest `q` with `(2q)² ≤ n`, i.e. `⌊√n / 2⌋`.
pub fn q_of(n: usize) -> usize {
    (n.sqrt()) / 2
}

fn max3_expr1(n: i128, p: i128) -> Option<Rational> {
    let den = 4 * p * n * n - 6 * p * p * n;
    if p <= 0 || den == 0 {
        return None;
    }
    let num = (4 * p - 1) * n * n - (10 * p * p - 6 * p - 1) * n + (6 * p * p * p - 6 * p * p - 2 * p);
    Some(frac(num, den))
}

fn max3_expr2(n: i128, q: i128) -> Option<Rational> {
    let den = (4 * q + 2) * n * n - (6 * q * q + 6 * q + 2) * n;
    if den == 0 {
        return None;
    }
    let num = (4 * q + 1) * n * n - (10 * q * q + 4 * q - 1) * n + (6 * q * q * q + 3 * q * q - 3 * q - 2);
    Some(frac(num, den))
}

/// Maximum three-slope capacity: the largest of the symmetric expression at
/// `p = q` and `p = q + 1` and the asymmetric expression at `q`.
pub fn max3(n: usize) -> Rational {
    let q = q_of(n) as i128;
    let n = n as i128;
    [max3_expr1(n, q), max3_expr1(n, q + 1), max3_expr2(n, q)]
        .into_iter()
        .flatten()
        .max()
        .expect("at least one candidate is defined for n ≥ 4")
}

/// Capacity expression for four slope classes of sizes `(a, b, c, d)` in the
/// configuration where the two middle classes cross the grid near its final corner.
pub fn four_slope_case_one(a: usize, b: usize, c: usize, d: usize) -> Rational {
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    let n = a + b + c + d;
    let s = b + c;
    frac(a + d + 2 * s + 1, 2 * n)
        + frac(a * d + b * c * (a + d - 1) + s - s * s, 2 * n * (a * d + b * c + (a + d) * s))
}

/// Class sizes `(a, b, c, d)` that maximize [`four_slope_case_one`] among
/// `d = 1`, `a ∈ {1, 2}`, `|b − c| ≤ 1`; ties go to the first in
/// lexicographic order.
pub fn four_slope_sizes(n: usize) -> (usize, usize, usize, usize) {
    let mut best: Option<(Rational, (usize, usize, usize, usize))> = None;
    for a in 1..=2usize {
        if n < a + 3 {
            continue;
        }
        let rest = n - a - 1;
        for b in [rest / 2, rest.div_ceil(2)] {
            let c = rest - b;
            if b == 0 || c == 0 {
                continue;
            }
            let v = four_slope_case_one(a, b, c, 1);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, (a, b, c, 1)));
            }
        }
    }
    best.expect("n ≥ 5").1
}

/// Maximum four-slope capacity (exact).
///
/// Odd `n`: `(n³+2n²−3n−4) / (n(n²+4n−9))`; even `n`:
/// `(n³+2n²−2n−4) / (n(n²+4n−8))`. Both equal [`four_slope_case_one`] at
/// [`four_slope_sizes`].
pub fn max4(n: usize) -> Rational {
    let n = n as i128;
    if n % 2 == 1 {
        frac(n * n * n + 2 * n * n - 3 * n - 4, n * (n * n + 4 * n - 9))
    } else {
        frac(n * n * n + 2 * n * n - 2 * n - 4, n * (n * n + 4 * n - 8))
    }
}

/// The four-slope expression with the parity cases the other way round. It is
/// not attainable (for `n = 5` it exceeds every achievable capacity); kept only
/// so the discrepancy can be demonstrated.
pub fn max4_parity_swapped(n: usize) -> Rational {
    let n = n as i128;
    if n % 2 == 1 {
        frac(n * n * n + 2 * n * n - 2 * n - 4, n * (n * n + 4 * n - 8))
    } else {
        frac(n * n * n + 2 * n * n - 3 * n - 4, n * (n * n + 4 * n - 9))
    }
}

/// `((135s³−945s²+2232s−1796) + 4(9s²−42s+52)^{3/2}) / (243(s−2)³)`.
pub fn maxabs_limit(s: usize) -> HighPrecisionReal {
    let s = s as i128;
    let poly = frac(135 * s * s * s - 945 * s * s + 2232 * s - 1796, 1);
    let base = frac(9 * s * s - 42 * s + 52, 1);
    let root = HighPrecisionReal::sqrt(&base).scale(&base);
    let num = root.scale(&int(4)).add(&HighPrecisionReal::exact(poly));
    num.scale(&frac(1, 243 * (s - 2) * (s - 2) * (s - 2)))
}

/// Number of deliveries bound from the absolute-capacity argument:
/// `f(a)` with `a = b` extreme lines and equal middle classes.
pub fn maxabs_objective(a: usize, n: usize, s: usize) -> Rational {
    let (a, n, s) = (a as i128, n as i128, s as i128);
    let m = frac(n - 2 * a, s - 2);
    let pairs = frac((s - 2) * (s - 3), 2) * &m * &m;
    int(n as i64) * (frac(a * a + 2 * a * (n - 2 * a), 1) + pairs) - frac((n - 2 * a) * a * (2 * a - 1) + a * a * (a - 1), 1)
}

/// The `a` maximizing [`maxabs_objective`] over `1 ≤ a ≤ (n − (s−2)) / 2` (smallest on ties).
pub fn maxabs_best_a(n: usize, s: usize) -> usize {
    let hi = (n.saturating_sub(s - 2) / 2).max(1);
    let mut best = (1usize, maxabs_objective(1, n, s));
    for a in 2..=hi {
        let v = maxabs_objective(a, n, s);
        if v > best.1 {
            best = (a, v);
        }
    }
    best.0
}
