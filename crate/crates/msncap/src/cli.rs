//! Batch command-line interface: file formats, command execution and report
//! rendering.
//!
//! Every command is a pure function from parsed arguments to an [`Outcome`]
//! (text for stdout plus an exit code), so the binary only parses arguments and
//! prints. Exit codes: 0 success, 1 "not realizable", 2 bad input or
//! parameters, 3 a construction disagreed with its closed form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::constructions::{self, Construction, ConstructionError};
use crate::formulas::{self, FormulaError, FormulaId, FormulaValue};
use crate::geometry::{cmsn_from_arrangement, Arrangement, GeometryError, Line, Slope, TiePolicy};
use crate::montecarlo::{self, EstimateError, EstimateReport};
use crate::network::{self, Cmsn, Kind, NetworkError};
use crate::rational::{format_rational, from_f64, parse_rational, to_decimal, Rational};
use crate::realize::{self, RealizeError, RealizeResult};

/// Version stamped into every JSON document the CLI writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Digits after the decimal point in rendered decimals.
pub const DECIMAL_PLACES: usize = 10;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_REALIZABLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invalid network: {0}")]
    Network(#[from] NetworkError),
    #[error("invalid arrangement: {0}")]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[cfg(feature = "oracle")]
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

// ---------------------------------------------------------------------------
// File formats

/// `{"n": 3, "kind": "rcmsn", "events": [[1,2],[1,3],[2,3]]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub n: usize,
    pub kind: Kind,
    pub events: Vec<[usize; 2]>,
}

/// One line: slope `"p/q"` or `"vertical"`; intercept `"p/q"` (the x-coordinate
/// of a vertical line).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineEntry {
    pub slope: String,
    pub intercept: String,
}

/// `{"lines": [{"slope": "1/2", "intercept": "-3"}, ...]}`
///
/// `tie_policy` is optional and defaults to rejecting simultaneous events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "is_default_policy")]
    pub tie_policy: TiePolicy,
    pub lines: Vec<LineEntry>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn is_default_policy(p: &TiePolicy) -> bool {
    *p == TiePolicy::default()
}

impl NetworkFile {
    pub fn from_cmsn(c: &Cmsn) -> Self {
        NetworkFile {
            schema_version: SCHEMA_VERSION,
            n: c.n(),
            kind: c.kind(),
            events: c.events().iter().map(|p| [p.u, p.v]).collect(),
        }
    }

    pub fn to_cmsn(&self) -> Result<Cmsn> {
        let pairs: Vec<(usize, usize)> = self.events.iter().map(|&[u, v]| (u, v)).collect();
        Ok(Cmsn::from_pairs(self.n, &pairs, self.kind)?)
    }
}

impl ArrangementFile {
    pub fn from_arrangement(arr: &Arrangement, tie_policy: TiePolicy) -> Self {
        let lines = arr
            .lines
            .iter()
            .map(|l| LineEntry {
                slope: match &l.slope {
                    Slope::Finite(k) => format_rational(k),
                    Slope::Vertical => "vertical".into(),
                },
                intercept: format_rational(&l.intercept),
            })
            .collect();
        ArrangementFile { schema_version: SCHEMA_VERSION, tie_policy, lines }
    }

    pub fn to_arrangement(&self) -> Result<Arrangement> {
        let mut lines = Vec::with_capacity(self.lines.len());
        for (i, e) in self.lines.iter().enumerate() {
            let num = |field: &str, text: &str| {
                parse_rational(text).map_err(|err| CliError::Invalid(format!("line {}: {field}: {err}", i + 1)))
            };
            let intercept = num("intercept", &e.intercept)?;
            let line = if e.slope.trim().eq_ignore_ascii_case("vertical") {
                Line::vertical(intercept)
            } else {
                Line::new(num("slope", &e.slope)?, intercept)
            };
            lines.push(line);
        }
        Ok(Arrangement::new(lines))
    }
}

/// A parsed input file of either shape.
#[derive(Debug, Clone)]
pub enum InputFile {
    Network(NetworkFile),
    Arrangement(ArrangementFile),
}

impl InputFile {
    /// Detects the shape by its distinguishing key (`events` or `lines`).
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value.as_object().ok_or_else(|| CliError::Invalid("top level must be a JSON object".into()))?;
        if let Some(v) = obj.get("schema_version") {
            if v.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(CliError::Invalid(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
            }
        }
        match (obj.contains_key("events"), obj.contains_key("lines")) {
            (true, false) => Ok(InputFile::Network(serde_json::from_value(value)?)),
            (false, true) => Ok(InputFile::Arrangement(serde_json::from_value(value)?)),
            (true, true) => Err(CliError::Invalid("object has both \"events\" and \"lines\"".into())),
            (false, false) => Err(CliError::Invalid("expected a network (\"events\") or an arrangement (\"lines\")".into())),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// The event sequence, reading an arrangement with its tie policy.
    pub fn to_cmsn(&self) -> Result<Cmsn> {
        match self {
            InputFile::Network(f) => f.to_cmsn(),
            InputFile::Arrangement(f) => Ok(cmsn_from_arrangement(&f.to_arrangement()?, f.tie_policy)?),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

/// `value` rendered at [`DECIMAL_PLACES`] with ties to even.
pub fn decimal(value: &Rational) -> String {
    to_decimal(value, DECIMAL_PLACES)
}

/// Exact binary value of `x` rounded like [`decimal`]; `NaN` and infinities
/// fall back to Rust's formatting.
pub fn decimal_f64(x: f64) -> String {
    from_f64(x).map_or_else(|| x.to_string(), |r| decimal(&r))
}

// ---------------------------------------------------------------------------
// Arguments

#[derive(Debug, Parser)]
#[command(name = "msncap", version, about = "Capacity, constructions, realizability and simulation for mobile sensor networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact capacity of a network or arrangement file.
    Capacity(CapacityArgs),
    /// Write an extremal arrangement and a sidecar report.
    Construct(ConstructArgs),
    /// Decide whether a network is drawn by lines with few or given slopes.
    Realize(RealizeArgs),
    /// Seeded Monte Carlo estimates.
    Estimate(EstimateArgs),
    /// Evaluate a closed form.
    Formula(FormulaArgs),
    /// Brute-force reference computations.
    #[cfg(feature = "oracle")]
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Also print the capacity normalised by n·C(n,2).
    #[arg(long)]
    pub absolute: bool,
    /// Also print the delivery count of every event.
    #[arg(long)]
    pub per_event: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    MinGmsn,
    MaxGmsn,
    Grid,
    Opt3,
    Opt4,
    CdFamily,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub kind: ConstructKind,
    #[arg(long)]
    pub n: usize,
    /// Size of the first class for `grid` (the second has n − m lines).
    #[arg(long)]
    pub m: Option<usize>,
    /// Slope count for `cd-family`.
    #[arg(long)]
    pub s: Option<usize>,
    /// Arrangement output; the report goes to `<out>.report.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("budget").required(true).args(["slopes", "max_slopes"])))]
pub struct RealizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated slopes (`p/q` or `vertical`), one per parallel class.
    #[arg(long, allow_hyphen_values = true)]
    pub slopes: Option<String>,
    #[arg(long)]
    pub max_slopes: Option<usize>,
    /// Where to write the verified witness arrangement.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Gmsn,
    Rgmsn,
    ReachTable,
    Conjecture,
    RandomRcmsn,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Per-trial values as `trial,capacity` rows.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[cfg(feature = "oracle")]
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    /// Minimum and maximum capacity over all restricted networks on n sensors.
    Extremes,
    /// Exact expected and maximum absolute capacity of two-slope networks.
    Expabs2,
    /// Capacity by forward chain propagation of an input file.
    Chain,
    /// All initial orders that replay an input file as a wiring diagram.
    Wiring,
}

#[cfg(feature = "oracle")]
#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub name: OracleName,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub input: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Execution

/// What a command prints and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: EXIT_OK }
    }
}

/// Runs a parsed command line. Errors map to exit code 2.
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Capacity(a) => capacity_cmd(a),
        Command::Construct(a) => construct_cmd(a),
        Command::Realize(a) => realize_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Formula(a) => formula_cmd(a),
        #[cfg(feature = "oracle")]
        Command::Oracle(a) => oracle_cmd(a),
    }
}

#[derive(Serialize)]
struct CapacityJson {
    schema_version: u32,
    n: usize,
    events: usize,
    capacity: String,
    capacity_decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    absolute_capacity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    absolute_capacity_decimal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deliveries: Option<Vec<usize>>,
}

fn capacity_cmd(a: &CapacityArgs) -> Result<Outcome> {
    let c = InputFile::read(&a.input)?.to_cmsn()?;
    let report = network::deliveries(&c)?;
    if a.json {
        let out = CapacityJson {
            schema_version: SCHEMA_VERSION,
            n: c.n(),
            events: c.len(),
            capacity: format_rational(&report.capacity),
            capacity_decimal: decimal(&report.capacity),
            absolute_capacity: a.absolute.then(|| format_rational(&report.absolute_capacity)),
            absolute_capacity_decimal: a.absolute.then(|| decimal(&report.absolute_capacity)),
            deliveries: a.per_event.then(|| report.deliveries.clone()),
        };
        return Ok(Outcome::ok(to_json(&out)));
    }
    let mut s = format!("{} ≈ {}\n", format_rational(&report.capacity), decimal(&report.capacity));
    if a.absolute {
        let _ = writeln!(s, "absolute {} ≈ {}", format_rational(&report.absolute_capacity), decimal(&report.absolute_capacity));
    }
    if a.per_event {
        let counts: Vec<String> = report.deliveries.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", counts.join(" "));
    }
    Ok(Outcome::ok(s))
}

/// Sidecar written next to a constructed arrangement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructReport {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    pub capacity: String,
    pub capacity_decimal: String,
    pub absolute_capacity: String,
    pub absolute_capacity_decimal: String,
    /// Closed forms compared against, as `name = value`.
    pub closed_forms: Vec<String>,
    /// `pass`, `fail`, or `none` when no closed form applies.
    pub check: String,
}

/// Path of the sidecar report for an arrangement written to `out`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

fn kind_name(kind: ConstructKind) -> &'static str {
    match kind {
        ConstructKind::MinGmsn => "min-gmsn",
        ConstructKind::MaxGmsn => "max-gmsn",
        ConstructKind::Grid => "grid",
        ConstructKind::Opt3 => "opt3",
        ConstructKind::Opt4 => "opt4",
        ConstructKind::CdFamily => "cd-family",
    }
}

fn exact_form(id: FormulaId) -> Result<Rational> {
    match formulas::closed_form(id)? {
        FormulaValue::Exact(r) => Ok(r),
        FormulaValue::Real(_) => unreachable!("capacity closed forms are rational"),
    }
}

fn construct_cmd(a: &ConstructArgs) -> Result<Outcome> {
    let n = a.n;
    let (built, expected): (Construction, Vec<(String, Rational, bool)>) = match a.kind {
        ConstructKind::MinGmsn => (
            constructions::min_capacity_gmsn(n)?,
            vec![("min_rcmsn".into(), exact_form(FormulaId::MinRcmsn { n })?, false)],
        ),
        ConstructKind::MaxGmsn => (
            constructions::max_capacity_gmsn(n)?,
            vec![("max_rcmsn".into(), exact_form(FormulaId::MaxRcmsn { n })?, false)],
        ),
        ConstructKind::Grid => {
            let m = a.m.ok_or_else(|| CliError::Invalid("grid needs --m".into()))?;
            if m == 0 || m >= n {
                return Err(CliError::Invalid(format!("grid needs 1 ≤ m < n, got m = {m}, n = {n}")));
            }
            let k = n - m;
            let (mi, ki, ni) = (m as i64, k as i64, n as i64);
            let abs = crate::rational::rat(mi * ki * (ni + 2), ni * ni * (ni - 1));
            (
                constructions::grid(m, k)?,
                vec![
                    ("cap2".into(), exact_form(FormulaId::Cap2 { n })?, false),
                    ("grid_absolute".into(), abs, true),
                ],
            )
        }
        ConstructKind::Opt3 => {
            (constructions::three_slope_optimal(n)?, vec![("max3".into(), exact_form(FormulaId::Max3 { n })?, false)])
        }
        ConstructKind::Opt4 => {
            (constructions::four_slope_optimal(n)?, vec![("max4".into(), exact_form(FormulaId::Max4 { n })?, false)])
        }
        ConstructKind::CdFamily => {
            let s = a.s.ok_or_else(|| CliError::Invalid("cd-family needs --s".into()))?;
            (constructions::collector_distributor_family(n, s)?, Vec::new())
        }
    };
    let c = built.cmsn()?;
    let report = network::deliveries(&c)?;
    let mut pass = true;
    let mut closed_forms = Vec::new();
    for (name, value, absolute) in &expected {
        let got = if *absolute { &report.absolute_capacity } else { &report.capacity };
        pass &= got == value;
        closed_forms.push(format!("{name} = {}", format_rational(value)));
    }
    let sidecar = ConstructReport {
        schema_version: SCHEMA_VERSION,
        kind: kind_name(a.kind).into(),
        n,
        m: a.m.filter(|_| a.kind == ConstructKind::Grid),
        s: a.s.filter(|_| a.kind == ConstructKind::CdFamily),
        capacity: format_rational(&report.capacity),
        capacity_decimal: decimal(&report.capacity),
        absolute_capacity: format_rational(&report.absolute_capacity),
        absolute_capacity_decimal: decimal(&report.absolute_capacity),
        check: if expected.is_empty() { "none" } else if pass { "pass" } else { "fail" }.into(),
        closed_forms,
    };
    write_file(&a.out, &to_json(&ArrangementFile::from_arrangement(&built.arrangement, built.policy)))?;
    let side = sidecar_path(&a.out);
    write_file(&side, &to_json(&sidecar))?;
    let mut s = format!("wrote {} and {}\n", a.out.display(), side.display());
    let _ = writeln!(s, "capacity {} ≈ {}", sidecar.capacity, sidecar.capacity_decimal);
    let _ = writeln!(s, "absolute {} ≈ {}", sidecar.absolute_capacity, sidecar.absolute_capacity_decimal);
    for f in &sidecar.closed_forms {
        let _ = writeln!(s, "closed form {f}");
    }
    let _ = writeln!(s, "check {}", sidecar.check);
    let code = if sidecar.check == "fail" { EXIT_CHECK_FAILED } else { EXIT_OK };
    Ok(Outcome { stdout: s, code })
}

/// Parses `"a,b,c"` into slopes; `vertical` (any case) is accepted.
pub fn parse_slope_list(text: &str) -> Result<Vec<Slope>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            if t.eq_ignore_ascii_case("vertical") {
                Ok(Slope::Vertical)
            } else {
                parse_rational(t).map(Slope::Finite).map_err(|e| CliError::Invalid(format!("slope {t:?}: {e}")))
            }
        })
        .collect()
}

/// Largest slope list tried exhaustively against the parallel classes.
pub const MAX_GIVEN_SLOPES: usize = 6;

/// Tries every injective assignment of the given slopes to the parallel
/// classes and returns the first realization, or the last rejection.
pub fn realize_given_slopes(c: &Cmsn, slopes: &[Slope]) -> Result<RealizeResult> {
    if slopes.is_empty() || slopes.len() > MAX_GIVEN_SLOPES {
        return Err(CliError::Invalid(format!("give between 1 and {MAX_GIVEN_SLOPES} slopes, got {}", slopes.len())));
    }
    let classes = match realize::parallel_classes(c) {
        Ok(p) => p,
        Err(RealizeError::NotClassPartition { a, b, c: x }) => {
            return Ok(rejection(
                realize::Stage::ClassPartition,
                format!("sensors {a} and {x} do not cross, nor do {b} and {x}, yet {a} and {b} cross"),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let k = classes.len();
    if k > slopes.len() {
        return Ok(rejection(realize::Stage::ClassCount, format!("{k} parallel classes but only {} slopes", slopes.len())));
    }
    let mut last = None;
    let mut chosen = Vec::with_capacity(k);
    let mut used = vec![false; slopes.len()];
    try_assignments(c, slopes, &classes.class_of, &mut chosen, &mut used, k, &mut last)?;
    match last {
        Some(Ok(found)) => Ok(found),
        Some(Err(rejected)) => Ok(rejected),
        None => unreachable!("at least one assignment is tried"),
    }
}

fn rejection(stage: realize::Stage, note: String) -> RealizeResult {
    RealizeResult { decision: realize::Decision::NotRealizable, witness: None, stage: Some(stage), certificate_note: note }
}

/// Depth-first over slope choices per class. `last` holds `Ok` once a
/// realization is found, which stops the search.
fn try_assignments(
    c: &Cmsn,
    slopes: &[Slope],
    class_of: &[usize],
    chosen: &mut Vec<usize>,
    used: &mut [bool],
    k: usize,
    last: &mut Option<std::result::Result<RealizeResult, RealizeResult>>,
) -> Result<()> {
    if matches!(last, Some(Ok(_))) {
        return Ok(());
    }
    if chosen.len() == k {
        let class_slopes: Vec<Slope> = chosen.iter().map(|&i| slopes[i].clone()).collect();
        let r = realize::realize_with_slopes(c, &class_slopes, class_of)?;
        *last = Some(if r.is_realizable() { Ok(r) } else { Err(r) });
        return Ok(());
    }
    for i in 0..slopes.len() {
        if !used[i] {
            used[i] = true;
            chosen.push(i);
            try_assignments(c, slopes, class_of, chosen, used, k, last)?;
            chosen.pop();
            used[i] = false;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RealizeJson<'a> {
    schema_version: u32,
    decision: realize::Decision,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage: Option<realize::Stage>,
    note: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<ArrangementFile>,
}

fn realize_cmd(a: &RealizeArgs) -> Result<Outcome> {
    let c = InputFile::read(&a.input)?.to_cmsn()?;
    let result = match (&a.slopes, a.max_slopes) {
        (Some(list), None) => realize_given_slopes(&c, &parse_slope_list(list)?)?,
        (None, Some(s)) => realize::realize_rgmsn(&c, s)?,
        _ => return Err(CliError::Invalid("give exactly one of --slopes and --max-slopes".into())),
    };
    let witness_file = result.witness.as_ref().map(|w| ArrangementFile::from_arrangement(w, TiePolicy::StableIfDisjoint));
    if let (Some(path), Some(file)) = (&a.witness, &witness_file) {
        write_file(path, &to_json(file))?;
    }
    let code = if result.is_realizable() { EXIT_OK } else { EXIT_NOT_REALIZABLE };
    let stdout = if a.json {
        to_json(&RealizeJson {
            schema_version: SCHEMA_VERSION,
            decision: result.decision,
            stage: result.stage,
            note: &result.certificate_note,
            witness: witness_file,
        })
    } else {
        let mut s = match result.stage {
            None => "realizable\n".to_string(),
            Some(stage) => format!("not realizable (stage: {})\n", stage.as_str()),
        };
        if !result.certificate_note.is_empty() {
            let _ = writeln!(s, "{}", result.certificate_note);
        }
        if let (Some(path), true) = (&a.witness, result.is_realizable()) {
            let _ = writeln!(s, "witness written to {}", path.display());
        }
        s
    };
    Ok(Outcome { stdout, code })
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    schema_version: u32,
    model: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<usize>,
    #[serde(flatten)]
    report: &'a EstimateReport,
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Gmsn => "gmsn",
        Model::Rgmsn => "rgmsn",
        Model::ReachTable => "reach-table",
        Model::Conjecture => "conjecture",
        Model::RandomRcmsn => "random-rcmsn",
    }
}

/// Renders `trial,capacity` rows for the per-trial values.
pub fn estimate_csv(report: &EstimateReport) -> String {
    let mut s = String::from("trial,capacity\n");
    for (i, v) in report.values.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", decimal_f64(*v));
    }
    s
}

fn estimate_cmd(a: &EstimateArgs) -> Result<Outcome> {
    let need_s = || a.s.ok_or_else(|| CliError::Invalid(format!("model {} needs --s", model_name(a.model))));
    let report = match a.model {
        Model::Gmsn => montecarlo::estimate_gmsn_capacity(a.n, a.trials, a.seed)?,
        Model::Rgmsn => montecarlo::estimate_rgmsn_capacity(a.n, need_s()?, a.trials, a.seed)?,
        Model::ReachTable => montecarlo::estimate_reach_table(need_s()?, a.n, a.trials, a.seed)?,
        Model::Conjecture => montecarlo::partition_conjecture_experiment(a.n, a.trials, a.seed)?,
        Model::RandomRcmsn => montecarlo::random_rcmsn_capacity(a.n, a.trials, a.seed)?,
    };
    if let Some(path) = &a.csv {
        write_file(path, &estimate_csv(&report))?;
    }
    let s_used = match a.model {
        Model::Rgmsn | Model::ReachTable => a.s,
        _ => None,
    };
    if a.json {
        return Ok(Outcome::ok(to_json(&EstimateJson {
            schema_version: SCHEMA_VERSION,
            model: model_name(a.model),
            s: s_used,
            report: &report,
        })));
    }
    let mut s = format!("model {} n {} trials {} seed {}", model_name(a.model), report.n, report.trials, report.seed);
    if let Some(v) = s_used {
        let _ = write!(s, " s {v}");
    }
    s.push('\n');
    let _ = writeln!(s, "mean {}", decimal_f64(report.mean));
    let _ = writeln!(s, "stderr {}", decimal_f64(report.stderr));
    for (k, v) in &report.extra {
        let _ = writeln!(s, "{k} {}", decimal_f64(*v));
    }
    Ok(Outcome::ok(s))
}

#[derive(Serialize)]
struct FormulaJson {
    schema_version: u32,
    name: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    decimal: String,
}

fn formula_cmd(a: &FormulaArgs) -> Result<Outcome> {
    let id = FormulaId::from_name(&a.name, a.n, a.s)?;
    let value = formulas::closed_form(id)?;
    let (exact, dec) = match &value {
        FormulaValue::Exact(r) => (Some(format_rational(r)), decimal(r)),
        FormulaValue::Real(x) => (None, x.to_decimal(DECIMAL_PLACES)),
    };
    if a.json {
        return Ok(Outcome::ok(to_json(&FormulaJson { schema_version: SCHEMA_VERSION, name: id.name(), exact, decimal: dec })));
    }
    Ok(Outcome::ok(match exact {
        Some(e) => format!("{e} ≈ {dec}\n"),
        None => format!("≈ {dec}\n"),
    }))
}

#[cfg(feature = "oracle")]
fn oracle_cmd(a: &OracleArgs) -> Result<Outcome> {
    use crate::oracle;
    let need_n = || a.n.ok_or_else(|| CliError::Invalid("this oracle needs --n".into()));
    let need_input = || -> Result<Cmsn> {
        let path = a.input.as_ref().ok_or_else(|| CliError::Invalid("this oracle needs --input".into()))?;
        InputFile::read(path)?.to_cmsn()
    };
    let s = match a.name {
        OracleName::Extremes => {
            let e = oracle::enumerate_rcmsn_extremes(need_n()?)?;
            format!("min {} ≈ {}\nmax {} ≈ {}\n", format_rational(&e.min), decimal(&e.min), format_rational(&e.max), decimal(&e.max))
        }
        OracleName::Expabs2 => {
            let (expected, max) = oracle::expabs2_exact(need_n()?)?;
            format!("expected {} ≈ {}\nmax {} ≈ {}\n", format_rational(&expected), decimal(&expected), format_rational(&max), decimal(&max))
        }
        OracleName::Chain => {
            let r = oracle::capacity_chain_oracle(&need_input()?)?;
            format!("{} ≈ {}\n", format_rational(&r.capacity), decimal(&r.capacity))
        }
        OracleName::Wiring => {
            let orders = oracle::wiring_search_oracle(&need_input()?)?;
            let mut s = format!("{} initial orders\n", orders.len());
            for o in orders {
                let parts: Vec<String> = o.iter().map(usize::to_string).collect();
                let _ = writeln!(s, "{}", parts.join(" "));
            }
            s
        }
    };
    Ok(Outcome::ok(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const TRIANGLE: &str = r#"{"n": 3, "kind": "rcmsn", "events": [[1,2],[1,3],[2,3]]}"#;

    #[test]
    fn detects_both_shapes() {
        assert!(matches!(InputFile::parse(TRIANGLE).unwrap(), InputFile::Network(_)));
        let arr = r#"{"lines": [{"slope": "1", "intercept": "0"}, {"slope": "vertical", "intercept": "2/3"}]}"#;
        let InputFile::Arrangement(f) = InputFile::parse(arr).unwrap() else { panic!("not an arrangement") };
        let a = f.to_arrangement().unwrap();
        assert!(a.lines[1].is_vertical());
        assert_eq!(a.lines[1].intercept, rat(2, 3));
    }

    #[test]
    fn rejects_bad_shapes() {
        for text in [
            "[1,2]",
            "{}",
            r#"{"events": [], "lines": []}"#,
            r#"{"n": 3, "kind": "rcmsn", "events": [[1,2]], "extra": 1}"#,
            r#"{"schema_version": 7, "n": 3, "kind": "rcmsn", "events": [[1,2]]}"#,
            "{not json",
        ] {
            assert!(InputFile::parse(text).is_err(), "{text}");
        }
        let dup = InputFile::parse(r#"{"n": 3, "kind": "cmsn", "events": [[1,2],[2,1]]}"#).unwrap();
        assert!(matches!(dup.to_cmsn(), Err(CliError::Network(_))));
        let bad_num = InputFile::parse(r#"{"lines": [{"slope": "1/0", "intercept": "0"}]}"#).unwrap();
        assert!(bad_num.to_cmsn().is_err());
    }

    #[test]
    fn arrangement_file_round_trip() {
        let c = constructions::min_capacity_gmsn(7).unwrap();
        let file = ArrangementFile::from_arrangement(&c.arrangement, c.policy);
        let text = to_json(&file);
        let InputFile::Arrangement(back) = InputFile::parse(&text).unwrap() else { panic!() };
        assert_eq!(back, file);
        assert_eq!(back.to_arrangement().unwrap(), c.arrangement);
        assert_eq!(InputFile::Arrangement(back).to_cmsn().unwrap(), c.cmsn().unwrap());
    }

    #[test]
    fn network_file_round_trip() {
        let InputFile::Network(f) = InputFile::parse(TRIANGLE).unwrap() else { panic!() };
        let c = f.to_cmsn().unwrap();
        assert_eq!(NetworkFile::from_cmsn(&c), f);
    }

    #[test]
    fn decimals_round_half_even() {
        assert_eq!(decimal(&rat(8, 9)), "0.8888888889");
        assert_eq!(decimal(&rat(1, 4)), "0.2500000000");
        // 0.125 is exact in binary, so ties go to the even neighbour at 2 places.
        assert_eq!(to_decimal(&from_f64(0.125).unwrap(), 2), "0.12");
        assert_eq!(decimal_f64(0.5), "0.5000000000");
    }

    #[test]
    fn slope_lists() {
        let s = parse_slope_list("1, -1/3,vertical").unwrap();
        assert_eq!(s, vec![Slope::Finite(rat(1, 1)), Slope::Finite(rat(-1, 3)), Slope::Vertical]);
        assert!(parse_slope_list("1,x").is_err());
    }

    #[test]
    fn given_slopes_try_every_assignment() {
        // grid(2,2) in class order {1,2},{3,4}: any assignment of {1,−1} works,
        // but the three-slope network below needs its slopes in slope order.
        let g = constructions::grid(2, 2).unwrap().cmsn().unwrap();
        assert!(realize_given_slopes(&g, &parse_slope_list("-1,1").unwrap()).unwrap().is_realizable());
        let m = constructions::min_capacity_gmsn(3).unwrap().cmsn().unwrap();
        let r = realize_given_slopes(&m, &parse_slope_list("-1,-3,-1/3").unwrap()).unwrap();
        assert!(r.is_realizable());
        assert!(realize::witness_regenerates(&m, &r));
        let few = realize_given_slopes(&m, &parse_slope_list("1,2").unwrap()).unwrap();
        assert_eq!(few.stage, Some(realize::Stage::ClassCount));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = montecarlo::random_rcmsn_capacity(5, 3, 9).unwrap();
        let csv = estimate_csv(&r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "trial,capacity");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0."));
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("/tmp/a.json")), PathBuf::from("/tmp/a.json.report.json"));
    }
}
