//! C ABI for the `svetlichny` crate.
//!
//! Objects cross the boundary as opaque handles released by their `_free`
//! function. Every fallible call returns an [`SvStatus`]; on failure the
//! message is available from [`sv_last_error`] on the same thread until the
//! next failing call. Strings returned through `char **` out-parameters are
//! owned by the caller and released with [`sv_string_free`]. Exact values are
//! returned as `numerator / 2^exponent`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use svetlichny::nosignal::{check_nosignalling, parity_mixture};
use svetlichny::quantum::{optimize_angles, OptimizeOptions};
use svetlichny::strategies::brute_force_max;
use svetlichny::{
    catalog, classify, evaluate, is_separable, max_over_graph, mermin_coeffs, strategy_to_table, svetlichny_coeffs,
    theory_bounds, tp_strategy, Classification, CoefficientTable, CommGraph, CorrelationTable, DeterministicStrategy,
    Error, ExactScalar, MaxOptions, Method,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Parameters outside the supported domain (party count, sizes, caps).
    InvalidArgument = 3,
    /// A totally paired graph was required.
    PartiallyPaired = 4,
    /// An enumeration cap was exceeded.
    CapExceeded = 5,
    /// Malformed JSON or file content.
    Parse = 6,
    Unsupported = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

pub struct SvGraph(CommGraph);
pub struct SvCoeffs(CoefficientTable);
pub struct SvStrategy(DeterministicStrategy);
pub struct SvTable(CorrelationTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SvStatus {
    match e {
        Error::PartiallyPaired(..) => SvStatus::PartiallyPaired,
        Error::Capacity { .. } | Error::StrategyCap { .. } => SvStatus::CapExceeded,
        Error::Parse(_) | Error::Json(_) | Error::Io(_) => SvStatus::Parse,
        Error::Unsupported(_) => SvStatus::Unsupported,
        _ => SvStatus::InvalidArgument,
    }
}

struct Fail(SvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, mapping errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SvStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            SvStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SvStatus::NullPointer, format!("null pointer: {what}"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SvStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no interior nul").into_raw()
}

fn write_exact(v: ExactScalar, num: *mut i64, exp: *mut u32) -> Result<(), Fail> {
    unsafe {
        *out(num, "numerator")? = v.numerator();
        *out(exp, "exponent")? = v.exponent();
    }
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is accepted.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- graphs ----

/// Parses the graph file format `{"m": M, "edges": [[i, j], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_graph` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_from_json(json: *const c_char, out_graph: *mut *mut SvGraph) -> SvStatus {
    guard(|| {
        let g = CommGraph::from_json(read_str(json, "json")?)?;
        *out(out_graph, "out_graph")? = boxed(SvGraph(g));
        Ok(())
    })
}

/// Builds a graph from `n_edges` pairs `(from, to)` stored flat in `edges`,
/// 1-based.
///
/// # Safety
/// `edges` must point to `2 * n_edges` values (may be null when zero).
#[no_mangle]
pub unsafe extern "C" fn sv_graph_from_edges(
    m: usize,
    edges: *const u32,
    n_edges: usize,
    out_graph: *mut *mut SvGraph,
) -> SvStatus {
    guard(|| {
        let flat: &[u32] = if n_edges == 0 {
            &[]
        } else {
            if edges.is_null() {
                return Err(null("edges"));
            }
            std::slice::from_raw_parts(edges, 2 * n_edges)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks(2).map(|p| (p[0] as usize, p[1] as usize)).collect();
        let g = CommGraph::from_edges(m, &pairs)?;
        *out(out_graph, "out_graph")? = boxed(SvGraph(g));
        Ok(())
    })
}

/// Named catalog graph. `m` and `k` are read only by parameterized entries;
/// pass 0 to leave them unset.
///
/// # Safety
/// `name` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_catalog(name: *const c_char, m: usize, k: usize, out_graph: *mut *mut SvGraph) -> SvStatus {
    guard(|| {
        let opt = |v: usize| (v != 0).then_some(v);
        let g = catalog(read_str(name, "name")?, opt(m), opt(k))?;
        *out(out_graph, "out_graph")? = boxed(SvGraph(g));
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_free(g: *mut SvGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Party count, or 0 for a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_m(g: *const SvGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

/// Sets `*is_tp`; for partially paired graphs also writes the smallest
/// unpaired pair to `*pair_i < *pair_j`, otherwise both become 0.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_classify(
    g: *const SvGraph,
    is_tp: *mut bool,
    pair_i: *mut u32,
    pair_j: *mut u32,
) -> SvStatus {
    guard(|| {
        let (tp, (i, j)) = match classify(&deref(g, "graph")?.0)? {
            Classification::PartiallyPaired { pair } => (false, pair),
            Classification::TotallyPaired { .. } => (true, (0, 0)),
        };
        *out(is_tp, "is_tp")? = tp;
        *out(pair_i, "pair_i")? = i as u32;
        *out(pair_j, "pair_j")? = j as u32;
        Ok(())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_is_separable(g: *const SvGraph, separable: *mut bool) -> SvStatus {
    guard(|| {
        *out(separable, "separable")? = is_separable(&deref(g, "graph")?.0);
        Ok(())
    })
}

/// Graph file JSON, caller-owned.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_graph_to_json(g: *const SvGraph, json: *mut *mut c_char) -> SvStatus {
    guard(|| {
        let s = deref(g, "graph")?.0.to_json().to_string();
        *out(json, "json")? = into_c_string(s);
        Ok(())
    })
}

// ---- coefficients ----

/// Svetlichny coefficients; `recursive` selects the recursion over the
/// closed form.
///
/// # Safety
/// `out_coeffs` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sv_coeffs_svetlichny(m: usize, recursive: bool, out_coeffs: *mut *mut SvCoeffs) -> SvStatus {
    guard(|| {
        let method = if recursive { Method::Recursive } else { Method::Closed };
        let c = svetlichny_coeffs(m, method)?;
        *out(out_coeffs, "out_coeffs")? = boxed(SvCoeffs(c));
        Ok(())
    })
}

/// # Safety
/// `out_coeffs` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sv_coeffs_mermin(m: usize, out_coeffs: *mut *mut SvCoeffs) -> SvStatus {
    guard(|| {
        *out(out_coeffs, "out_coeffs")? = boxed(SvCoeffs(mermin_coeffs(m)?));
        Ok(())
    })
}

/// Coefficient at input word `x` (party 1 in bit 0).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_coeffs_get(c: *const SvCoeffs, x: u32, num: *mut i64, exp: *mut u32) -> SvStatus {
    guard(|| {
        let c = &deref(c, "coeffs")?.0;
        if (x as u64) >> c.m() != 0 {
            return Err(Fail(SvStatus::InvalidArgument, format!("input word {x} out of range")));
        }
        write_exact(c.value(x), num, exp)
    })
}

/// # Safety
/// `c` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sv_coeffs_free(c: *mut SvCoeffs) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `(2^{m-q-1}, 2^{m-q-1/2}, 2^{m-q})`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_theory_bounds(m: usize, lhv: *mut f64, quantum: *mut f64, algebraic: *mut f64) -> SvStatus {
    guard(|| {
        let b = theory_bounds(m)?;
        *out(lhv, "lhv")? = b.lhv_separable;
        *out(quantum, "quantum")? = b.quantum;
        *out(algebraic, "algebraic")? = b.algebraic;
        Ok(())
    })
}

// ---- strategies ----

/// Exact maximum over the graph. `dim_cap` 0 means the default cap.
/// `witness` may be null; otherwise it receives a strategy attaining the
/// maximum.
///
/// # Safety
/// Handles must be live; `num` and `exp` writable.
#[no_mangle]
pub unsafe extern "C" fn sv_max_over_graph(
    g: *const SvGraph,
    c: *const SvCoeffs,
    dim_cap: usize,
    num: *mut i64,
    exp: *mut u32,
    witness: *mut *mut SvStrategy,
) -> SvStatus {
    guard(|| {
        let opts = if dim_cap == 0 { MaxOptions::default() } else { MaxOptions { dim_cap } };
        let res = max_over_graph(&deref(g, "graph")?.0, &deref(c, "coeffs")?.0, opts)?;
        write_exact(res.value, num, exp)?;
        if let Some(w) = witness.as_mut() {
            *w = boxed(SvStrategy(res.witness));
        }
        Ok(())
    })
}

/// Exhaustive maximum over every strategy; fails when the strategy count
/// exceeds `2^cap_log2`.
///
/// # Safety
/// Handles must be live; `num` and `exp` writable.
#[no_mangle]
pub unsafe extern "C" fn sv_brute_force_max(
    g: *const SvGraph,
    c: *const SvCoeffs,
    cap_log2: u32,
    num: *mut i64,
    exp: *mut u32,
) -> SvStatus {
    guard(|| {
        if cap_log2 >= 128 {
            return Err(Fail(SvStatus::InvalidArgument, "cap_log2 must be below 128".into()));
        }
        let res = brute_force_max(&deref(g, "graph")?.0, &deref(c, "coeffs")?.0, 1u128 << cap_log2)?;
        write_exact(res.value, num, exp)
    })
}

/// Strategy reaching the algebraic maximum on a totally paired graph;
/// [`SvStatus::PartiallyPaired`] otherwise.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_tp_strategy(g: *const SvGraph, out_strategy: *mut *mut SvStrategy) -> SvStatus {
    guard(|| {
        let s = tp_strategy(&deref(g, "graph")?.0)?;
        *out(out_strategy, "out_strategy")? = boxed(SvStrategy(s));
        Ok(())
    })
}

/// Parses `{"m": M, "tables": {"i": {"dep": [...], "bits": hex}}}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out_strategy` writable.
#[no_mangle]
pub unsafe extern "C" fn sv_strategy_from_json(json: *const c_char, out_strategy: *mut *mut SvStrategy) -> SvStatus {
    guard(|| {
        let s = DeterministicStrategy::from_json(read_str(json, "json")?)?;
        *out(out_strategy, "out_strategy")? = boxed(SvStrategy(s));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_strategy_to_json(s: *const SvStrategy, json: *mut *mut c_char) -> SvStatus {
    guard(|| {
        let text = deref(s, "strategy")?.0.to_json().to_string();
        *out(json, "json")? = into_c_string(text);
        Ok(())
    })
}

/// Output bits of every party on input `x`, party 1 in bit 0.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_strategy_outputs(s: *const SvStrategy, x: u32, outputs: *mut u32) -> SvStatus {
    guard(|| {
        let s = &deref(s, "strategy")?.0;
        if (x as u64) >> s.m() != 0 {
            return Err(Fail(SvStatus::InvalidArgument, format!("input word {x} out of range")));
        }
        *out(outputs, "outputs")? = s.outputs(x);
        Ok(())
    })
}

/// `Σ_x c(x) (-1)^{Σ a_i(x)}`, exactly.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_strategy_eval(
    s: *const SvStrategy,
    c: *const SvCoeffs,
    num: *mut i64,
    exp: *mut u32,
) -> SvStatus {
    guard(|| {
        let v = svetlichny::eval_strategy(&deref(s, "strategy")?.0, &deref(c, "coeffs")?.0)?;
        write_exact(v, num, exp)
    })
}

/// Deterministic delta table of a strategy.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_strategy_to_table(s: *const SvStrategy, out_table: *mut *mut SvTable) -> SvStatus {
    guard(|| {
        let t = strategy_to_table(&deref(s, "strategy")?.0);
        *out(out_table, "out_table")? = boxed(SvTable(t));
        Ok(())
    })
}

/// Uniform mixture over the even-parity output shifts of `s`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_parity_mixture(s: *const SvStrategy, out_table: *mut *mut SvTable) -> SvStatus {
    guard(|| {
        let t = parity_mixture(&deref(s, "strategy")?.0);
        *out(out_table, "out_table")? = boxed(SvTable(t));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sv_strategy_free(s: *mut SvStrategy) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

// ---- tables ----

/// # Safety
/// `json` must be NUL-terminated; `out_table` writable.
#[no_mangle]
pub unsafe extern "C" fn sv_table_from_json(json: *const c_char, out_table: *mut *mut SvTable) -> SvStatus {
    guard(|| {
        let t = CorrelationTable::from_json(read_str(json, "json")?)?;
        *out(out_table, "out_table")? = boxed(SvTable(t));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_table_to_json(t: *const SvTable, json: *mut *mut c_char) -> SvStatus {
    guard(|| {
        let text = deref(t, "table")?.0.to_json();
        *out(json, "json")? = into_c_string(text);
        Ok(())
    })
}

/// `P(a|x)` as a double.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_table_get(t: *const SvTable, x: u32, a: u32, p: *mut f64) -> SvStatus {
    guard(|| {
        let t = &deref(t, "table")?.0;
        if (x as u64) >> t.m() != 0 || (a as u64) >> t.m() != 0 {
            return Err(Fail(SvStatus::InvalidArgument, "input or outcome word out of range".into()));
        }
        *out(p, "p")? = t.get(x, a);
        Ok(())
    })
}

/// Functional value of a table. `is_exact` reports whether `num`/`exp`
/// hold the exact value; `value` is always written.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sv_table_evaluate(
    t: *const SvTable,
    c: *const SvCoeffs,
    value: *mut f64,
    is_exact: *mut bool,
    num: *mut i64,
    exp: *mut u32,
) -> SvStatus {
    guard(|| {
        let v = evaluate(&deref(t, "table")?.0, &deref(c, "coeffs")?.0)?;
        *out(value, "value")? = v.to_f64();
        *out(is_exact, "is_exact")? = v.exact().is_some();
        let e = v.exact().unwrap_or(ExactScalar::ZERO);
        write_exact(e, num, exp)
    })
}

/// Sets `*ok`; when the table signals and `report` is non-null, writes the
/// first violation as caller-owned JSON (null otherwise).
///
/// # Safety
/// `t` and `ok` must be valid; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn sv_table_check_nosignalling(
    t: *const SvTable,
    tol: f64,
    ok: *mut bool,
    report: *mut *mut c_char,
) -> SvStatus {
    guard(|| {
        let found = check_nosignalling(&deref(t, "table")?.0, tol)?;
        *out(ok, "ok")? = found.is_none();
        if let Some(r) = report.as_mut() {
            *r = found.map_or(ptr::null_mut(), |v| into_c_string(v.to_json().to_string()));
        }
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sv_table_free(t: *mut SvTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

// ---- quantum ----

/// Optimizes GHZ measurement angles for the Svetlichny functional.
/// `phi` may be null; otherwise it receives `2m` azimuths ordered
/// `φ_1^0, φ_1^1, φ_2^0, ...`.
///
/// # Safety
/// `value`, `target`, `converged` writable; `phi` null or `2m` long.
#[no_mangle]
pub unsafe extern "C" fn sv_quantum_optimize(
    m: usize,
    restarts: usize,
    seed: u64,
    value: *mut f64,
    target: *mut f64,
    converged: *mut bool,
    phi: *mut f64,
) -> SvStatus {
    guard(|| {
        let opt = optimize_angles(m, OptimizeOptions { restarts, seed, ..Default::default() })?;
        *out(value, "value")? = opt.value;
        *out(target, "target")? = opt.target;
        *out(converged, "converged")? = opt.converged;
        if !phi.is_null() {
            let dst = std::slice::from_raw_parts_mut(phi, 2 * m);
            for (i, p) in opt.angles.phi().iter().enumerate() {
                dst[2 * i] = p[0];
                dst[2 * i + 1] = p[1];
            }
        }
        Ok(())
    })
}
