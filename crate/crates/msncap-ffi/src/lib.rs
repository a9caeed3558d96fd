//! C ABI over `msncap`.
//!
//! Networks and arrangements are opaque heap handles created by `msn_*_new` /
//! `msn_construct` style calls and released with the matching `*_free`. Every
//! fallible call returns an [`MsnStatus`]; on failure a description is kept per
//! thread and can be read with [`msn_last_error`]. Strings returned to the
//! caller are owned by the caller and released with [`msn_string_free`].
//! Panics never cross the boundary; they surface as [`MsnStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use msncap::cli::{ArrangementFile, InputFile, NetworkFile};
use msncap::constructions::{self, Construction};
use msncap::formulas::{self, FormulaId, FormulaValue};
use msncap::geometry::cmsn_from_arrangement;
use msncap::{montecarlo, network, realize, Arrangement, Cmsn, Kind, Rational, TiePolicy};
use num_traits::ToPrimitive;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidNetwork = 3,
    InvalidArrangement = 4,
    Unsupported = 5,
    BufferTooSmall = 6,
    Overflow = 7,
    Internal = 99,
}

/// Which extremal arrangement [`msn_construct`] builds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsnConstruction {
    MinGmsn = 0,
    MaxGmsn = 1,
    /// Two classes of sizes `m` and `n - m`.
    Grid = 2,
    Opt3 = 3,
    Opt4 = 4,
    /// Collector/distributor family with `s` slopes.
    CdFamily = 5,
}

/// Opaque event sequence.
pub struct MsnNetwork {
    inner: Cmsn,
}

/// Opaque line arrangement with the tie policy it is read with.
pub struct MsnArrangement {
    inner: Arrangement,
    policy: TiePolicy,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

struct Failure(MsnStatus, String);

impl Failure {
    fn new(status: MsnStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

/// Runs `f`, records any failure message and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MsnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MsnStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MsnStatus::Internal
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(MsnStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p).to_str().map_err(|_| Failure::new(MsnStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn to_u64_pair(r: &Rational) -> Result<(u64, u64), Failure> {
    match (r.numer().to_u64(), r.denom().to_u64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Failure::new(MsnStatus::Overflow, "value does not fit in 64-bit parts")),
    }
}

/// Description of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn msn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn msn_status_name(status: MsnStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MsnStatus::Ok => c"ok",
        MsnStatus::NullPointer => c"null pointer",
        MsnStatus::InvalidArgument => c"invalid argument",
        MsnStatus::InvalidNetwork => c"invalid network",
        MsnStatus::InvalidArrangement => c"invalid arrangement",
        MsnStatus::Unsupported => c"unsupported",
        MsnStatus::BufferTooSmall => c"buffer too small",
        MsnStatus::Overflow => c"overflow",
        MsnStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn msn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a network from `len` pairs stored as `pairs[2i], pairs[2i+1]`
/// (sensors are numbered from 1). `restricted` requires every pair exactly once.
///
/// # Safety
/// `pairs` must point to `2 * len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_network_new(
    n: usize,
    pairs: *const usize,
    len: usize,
    restricted: bool,
    out: *mut *mut MsnNetwork,
) -> MsnStatus {
    guard(|| {
        non_null(out, "out")?;
        if len > 0 {
            non_null(pairs, "pairs")?;
        }
        let flat = if len == 0 { &[][..] } else { std::slice::from_raw_parts(pairs, 2 * len) };
        let list: Vec<(usize, usize)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        let kind = if restricted { Kind::Rcmsn } else { Kind::Cmsn };
        let c = Cmsn::from_pairs(n, &list, kind).map_err(|e| Failure::new(MsnStatus::InvalidNetwork, e))?;
        *out = Box::into_raw(Box::new(MsnNetwork { inner: c }));
        Ok(())
    })
}

/// Parses a network file, or an arrangement file read into its event sequence.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_network_from_json(json: *const c_char, out: *mut *mut MsnNetwork) -> MsnStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(json, "json")?;
        let file = InputFile::parse(text).map_err(|e| Failure::new(MsnStatus::InvalidArgument, e))?;
        let c = file.to_cmsn().map_err(|e| Failure::new(MsnStatus::InvalidNetwork, e))?;
        *out = Box::into_raw(Box::new(MsnNetwork { inner: c }));
        Ok(())
    })
}

/// Network file JSON for `net`; release with [`msn_string_free`].
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_network_to_json(net: *const MsnNetwork, out: *mut *mut c_char) -> MsnStatus {
    guard(|| {
        non_null(net, "net")?;
        non_null(out, "out")?;
        let text = serde_json::to_string(&NetworkFile::from_cmsn(&(*net).inner)).expect("plain data serializes");
        *out = into_c_string(text);
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn msn_network_free(net: *mut MsnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of sensors, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn msn_network_sensors(net: *const MsnNetwork) -> usize {
    net.as_ref().map_or(0, |h| h.inner.n())
}

/// Number of events, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn msn_network_events(net: *const MsnNetwork) -> usize {
    net.as_ref().map_or(0, |h| h.inner.len())
}

/// Capacity as a reduced fraction; `absolute` divides by `n·C(n,2)` instead
/// of `n·L`.
///
/// # Safety
/// `net` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_network_capacity(
    net: *const MsnNetwork,
    absolute: bool,
    num: *mut u64,
    den: *mut u64,
) -> MsnStatus {
    guard(|| {
        non_null(net, "net")?;
        non_null(num, "num")?;
        non_null(den, "den")?;
        let r = network::deliveries(&(*net).inner).map_err(|e| Failure::new(MsnStatus::InvalidNetwork, e))?;
        let (p, q) = to_u64_pair(if absolute { &r.absolute_capacity } else { &r.capacity })?;
        *num = p;
        *den = q;
        Ok(())
    })
}

/// Writes the delivery count of every event into `buf`. `*written` receives
/// the event count even when `cap` is too small.
///
/// # Safety
/// `buf` must hold `cap` writable values; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_network_deliveries(
    net: *const MsnNetwork,
    buf: *mut u64,
    cap: usize,
    written: *mut usize,
) -> MsnStatus {
    guard(|| {
        non_null(net, "net")?;
        non_null(written, "written")?;
        let counts = network::delivery_counts(&(*net).inner);
        *written = counts.len();
        if cap < counts.len() {
            return Err(Failure::new(MsnStatus::BufferTooSmall, format!("need {} slots, got {cap}", counts.len())));
        }
        if !counts.is_empty() {
            non_null(buf, "buf")?;
            let dst = std::slice::from_raw_parts_mut(buf, counts.len());
            for (d, &c) in dst.iter_mut().zip(&counts) {
                *d = c as u64;
            }
        }
        Ok(())
    })
}

/// Builds an extremal arrangement. `m` is used by `Grid`, `s` by `CdFamily`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_construct(
    kind: MsnConstruction,
    n: usize,
    m: usize,
    s: usize,
    out: *mut *mut MsnArrangement,
) -> MsnStatus {
    guard(|| {
        non_null(out, "out")?;
        let built: Result<Construction, _> = match kind {
            MsnConstruction::MinGmsn => constructions::min_capacity_gmsn(n),
            MsnConstruction::MaxGmsn => constructions::max_capacity_gmsn(n),
            MsnConstruction::Grid => {
                if m == 0 || m >= n {
                    return Err(Failure::new(MsnStatus::InvalidArgument, format!("grid needs 1 ≤ m < n, got m = {m}, n = {n}")));
                }
                constructions::grid(m, n - m)
            }
            MsnConstruction::Opt3 => constructions::three_slope_optimal(n),
            MsnConstruction::Opt4 => constructions::four_slope_optimal(n),
            MsnConstruction::CdFamily => constructions::collector_distributor_family(n, s),
        };
        let built = built.map_err(|e| Failure::new(MsnStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(MsnArrangement { inner: built.arrangement, policy: built.policy }));
        Ok(())
    })
}

/// Parses an arrangement file.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_arrangement_from_json(json: *const c_char, out: *mut *mut MsnArrangement) -> MsnStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(json, "json")?;
        let file: ArrangementFile =
            serde_json::from_str(text).map_err(|e| Failure::new(MsnStatus::InvalidArgument, e))?;
        let arr = file.to_arrangement().map_err(|e| Failure::new(MsnStatus::InvalidArrangement, e))?;
        *out = Box::into_raw(Box::new(MsnArrangement { inner: arr, policy: file.tie_policy }));
        Ok(())
    })
}

/// Arrangement file JSON for `arr`; release with [`msn_string_free`].
///
/// # Safety
/// `arr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_arrangement_to_json(arr: *const MsnArrangement, out: *mut *mut c_char) -> MsnStatus {
    guard(|| {
        non_null(arr, "arr")?;
        non_null(out, "out")?;
        let h = &*arr;
        let text = serde_json::to_string(&ArrangementFile::from_arrangement(&h.inner, h.policy)).expect("plain data serializes");
        *out = into_c_string(text);
        Ok(())
    })
}

/// Number of lines, or 0 for a null handle.
///
/// # Safety
/// `arr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn msn_arrangement_lines(arr: *const MsnArrangement) -> usize {
    arr.as_ref().map_or(0, |h| h.inner.n())
}

/// Event sequence of an arrangement.
///
/// # Safety
/// `arr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_arrangement_network(arr: *const MsnArrangement, out: *mut *mut MsnNetwork) -> MsnStatus {
    guard(|| {
        non_null(arr, "arr")?;
        non_null(out, "out")?;
        let h = &*arr;
        let c = cmsn_from_arrangement(&h.inner, h.policy).map_err(|e| Failure::new(MsnStatus::InvalidArrangement, e))?;
        *out = Box::into_raw(Box::new(MsnNetwork { inner: c }));
        Ok(())
    })
}

/// # Safety
/// `arr` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn msn_arrangement_free(arr: *mut MsnArrangement) {
    if !arr.is_null() {
        drop(Box::from_raw(arr));
    }
}

/// Decides whether `net` is drawn by lines with at most `max_slopes` (1 to 4)
/// slopes. On a positive answer a verified witness is stored in `*witness`
/// when `witness` is non-null; otherwise `*witness` is set to null.
///
/// # Safety
/// `net` must be a live handle; `realizable` must be writable; `witness` may
/// be null.
#[no_mangle]
pub unsafe extern "C" fn msn_realize(
    net: *const MsnNetwork,
    max_slopes: usize,
    realizable: *mut bool,
    witness: *mut *mut MsnArrangement,
) -> MsnStatus {
    guard(|| {
        non_null(net, "net")?;
        non_null(realizable, "realizable")?;
        let r = realize::realize_rgmsn(&(*net).inner, max_slopes).map_err(|e| match e {
            realize::RealizeError::UnsupportedSlopeCount(_) => Failure::new(MsnStatus::Unsupported, e),
            other => Failure::new(MsnStatus::InvalidNetwork, other),
        })?;
        *realizable = r.is_realizable();
        if !witness.is_null() {
            *witness = match r.witness {
                Some(w) => Box::into_raw(Box::new(MsnArrangement { inner: w, policy: TiePolicy::StableIfDisjoint })),
                None => ptr::null_mut(),
            };
        }
        Ok(())
    })
}

/// Evaluates a closed form by name (for example `"max3"` or `"maxabs-limit"`).
/// Parameters that a formula does not use are ignored; pass 0 for "absent".
/// `*value` receives the nearest double; when the value is rational and
/// `exact` is non-null, `*exact` receives `"p/q"` (release with
/// [`msn_string_free`]), otherwise null.
///
/// # Safety
/// `name` must be a NUL-terminated string; `value` must be writable; `exact`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn msn_formula(
    name: *const c_char,
    n: usize,
    s: usize,
    value: *mut f64,
    exact: *mut *mut c_char,
) -> MsnStatus {
    guard(|| {
        non_null(value, "value")?;
        let name = read_str(name, "name")?;
        let opt = |v: usize| (v != 0).then_some(v);
        let id = FormulaId::from_name(name, opt(n), opt(s)).map_err(|e| Failure::new(MsnStatus::InvalidArgument, e))?;
        let v = formulas::closed_form(id).map_err(|e| Failure::new(MsnStatus::InvalidArgument, e))?;
        *value = v.to_f64();
        if !exact.is_null() {
            *exact = match &v {
                FormulaValue::Exact(r) => into_c_string(msncap::rational::format_rational(r)),
                FormulaValue::Real(_) => ptr::null_mut(),
            };
        }
        Ok(())
    })
}

/// Seeded mean capacity of random line arrangements; `slopes == 0` draws
/// distinct slopes, otherwise at most `slopes` distinct slopes.
///
/// # Safety
/// `mean` and `stderr` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_estimate_capacity(
    n: usize,
    slopes: usize,
    trials: usize,
    seed: u64,
    mean: *mut f64,
    stderr: *mut f64,
) -> MsnStatus {
    guard(|| {
        non_null(mean, "mean")?;
        non_null(stderr, "stderr")?;
        let r = if slopes == 0 {
            montecarlo::estimate_gmsn_capacity(n, trials, seed)
        } else {
            montecarlo::estimate_rgmsn_capacity(n, slopes, trials, seed)
        }
        .map_err(|e| Failure::new(MsnStatus::InvalidArgument, e))?;
        *mean = r.mean;
        *stderr = r.stderr;
        Ok(())
    })
}
