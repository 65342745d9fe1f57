//! C ABI over the enumis library: opaque handles, integer status codes, and
//! a thread-local last-error message. The header `include/enumis.h` is
//! generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use enumis::bounds;
use enumis::enumeration::{enumerate_opt, StopReason};
use enumis::harness::parse_graph;
use enumis::ising::{AnnealSchedule, Interpolation};
use enumis::maxclique::{
    enumerate_max_cliques_exact, erdos_renyi, make_clique_sampler, Graph, VertexSet,
};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumisStatus {
    Ok = 0,
    /// A pointer was null or a numeric argument violated its domain.
    InvalidArgument = 1,
    /// Input text failed to parse.
    ParseError = 2,
    /// The sampler gave up before the enumeration finished.
    SamplerFailed = 3,
    /// An internal invariant failed; the error message has details.
    Internal = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let owned = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn fail(status: EnumisStatus, message: impl std::fmt::Display) -> EnumisStatus {
    set_error(message.to_string());
    status
}

/// Message for the most recent error on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn enumis_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn enumis_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn write_out<T>(out: *mut T, value: T) -> EnumisStatus {
    if out.is_null() {
        return fail(EnumisStatus::InvalidArgument, "null output pointer");
    }
    unsafe { out.write(value) };
    EnumisStatus::Ok
}

/// Correction factor kappa1(epsilon); requires epsilon in (0, 1/e).
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn enumis_kappa1(epsilon: f64, out: *mut f64) -> EnumisStatus {
    match bounds::kappa1(epsilon) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(err) => fail(EnumisStatus::InvalidArgument, err),
    }
}

/// Correction factor kappa2(epsilon); requires epsilon in (0, e^-1.5).
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn enumis_kappa2(epsilon: f64, out: *mut f64) -> EnumisStatus {
    match bounds::kappa2(epsilon) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(err) => fail(EnumisStatus::InvalidArgument, err),
    }
}

/// Accepted-sample deadline ceil(m ln(m kappa / epsilon)).
///
/// # Safety
/// `out` must point to writable memory for one uint64.
#[no_mangle]
pub unsafe extern "C" fn enumis_deadline(
    m: u64,
    kappa: f64,
    epsilon: f64,
    out: *mut u64,
) -> EnumisStatus {
    match bounds::deadline(m, kappa, epsilon) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(err) => fail(EnumisStatus::InvalidArgument, err),
    }
}

/// Accepted samples at which a successful enumeration of n solutions halts.
///
/// # Safety
/// `out` must point to writable memory for one uint64.
#[no_mangle]
pub unsafe extern "C" fn enumis_sample_budget(
    n: u64,
    epsilon: f64,
    kappa: f64,
    out: *mut u64,
) -> EnumisStatus {
    match bounds::sample_budget(n, epsilon, kappa) {
        Ok(value) => unsafe { write_out(out, value) },
        Err(err) => fail(EnumisStatus::InvalidArgument, err),
    }
}

/// Opaque undirected graph handle.
pub struct EnumisGraph {
    inner: Graph,
}

/// Generates a seeded random graph with round(C(n,2) * density) edges.
///
/// # Safety
/// `out` must point to writable memory for one pointer. The returned handle
/// must be released with `enumis_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn enumis_graph_generate(
    n: usize,
    density: f64,
    seed: u64,
    out: *mut *mut EnumisGraph,
) -> EnumisStatus {
    match erdos_renyi(n, density, seed) {
        Ok(graph) => unsafe {
            write_out(out, Box::into_raw(Box::new(EnumisGraph { inner: graph })))
        },
        Err(err) => fail(EnumisStatus::InvalidArgument, err),
    }
}

/// Parses a DIMACS graph (`p edge <n> <m>` header, `e <u> <v>` lines).
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` as in
/// `enumis_graph_generate`.
#[no_mangle]
pub unsafe extern "C" fn enumis_graph_parse_dimacs(
    text: *const c_char,
    out: *mut *mut EnumisGraph,
) -> EnumisStatus {
    if text.is_null() {
        return fail(EnumisStatus::InvalidArgument, "null text pointer");
    }
    let text = unsafe { std::ffi::CStr::from_ptr(text) };
    let Ok(text) = text.to_str() else {
        return fail(EnumisStatus::ParseError, "graph text is not valid UTF-8");
    };
    match parse_graph(text) {
        Ok(graph) => unsafe {
            write_out(out, Box::into_raw(Box::new(EnumisGraph { inner: graph })))
        },
        Err(err) => fail(EnumisStatus::ParseError, err),
    }
}

/// Vertex count of a graph handle; zero for null.
///
/// # Safety
/// `graph` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_graph_vertices(graph: *const EnumisGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    unsafe { &(*graph).inner }.n_vertices()
}

/// Edge count of a graph handle; zero for null.
///
/// # Safety
/// `graph` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_graph_edges(graph: *const EnumisGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    unsafe { &(*graph).inner }.n_edges()
}

/// Releases a graph handle. Null is ignored.
///
/// # Safety
/// `graph` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn enumis_graph_free(graph: *mut EnumisGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Opaque result handle: the enumerated maximum cliques plus run statistics.
pub struct EnumisCliqueResult {
    cliques: Vec<Vec<u32>>,
    theta: f64,
    accepted_samples: u64,
    raw_draws: u64,
    guarantee_holds: bool,
}

/// Enumerates all maximum cliques with the annealing sampler and the
/// epsilon-guaranteed stopping rule. `sweeps`, `beta_initial` and
/// `beta_final` configure the annealer; pass 0 / 0.0 / 0.0 for defaults.
/// `budget_cap` caps raw draws (0 means unlimited; hitting it clears the
/// guarantee flag on the result).
///
/// # Safety
/// `graph` must be a live handle; `out` must point to writable memory for
/// one pointer. The returned handle must be released with
/// `enumis_result_free`.
#[no_mangle]
pub unsafe extern "C" fn enumis_enumerate_max_cliques(
    graph: *const EnumisGraph,
    epsilon: f64,
    penalty: f64,
    sweeps: u32,
    beta_initial: f64,
    beta_final: f64,
    seed: u64,
    budget_cap: u64,
    out: *mut *mut EnumisCliqueResult,
) -> EnumisStatus {
    if graph.is_null() {
        return fail(EnumisStatus::InvalidArgument, "null graph handle");
    }
    let graph = unsafe { &(*graph).inner };
    let defaults = AnnealSchedule::default();
    let schedule = match AnnealSchedule::new(
        if sweeps == 0 { defaults.sweeps } else { sweeps },
        if beta_initial == 0.0 { defaults.beta_initial } else { beta_initial },
        if beta_final == 0.0 { defaults.beta_final } else { beta_final },
        Interpolation::Geometric,
    ) {
        Ok(schedule) => schedule,
        Err(err) => return fail(EnumisStatus::InvalidArgument, err),
    };
    let cap = (budget_cap > 0).then_some(budget_cap);
    let run = catch_unwind(AssertUnwindSafe(|| -> Result<_, String> {
        let mut sampler =
            make_clique_sampler(graph, penalty, schedule, seed).map_err(|e| e.to_string())?;
        enumerate_opt(&mut sampler, epsilon, cap).map_err(|e| e.to_string())
    }));
    match run {
        Ok(Ok(result)) => {
            let cliques: Vec<Vec<u32>> = result
                .solutions
                .iter()
                .map(|s| VertexSet::from_key(&s.key).members().to_vec())
                .collect();
            let handle = EnumisCliqueResult {
                cliques,
                theta: result.theta,
                accepted_samples: result.accepted_samples,
                raw_draws: result.raw_draws,
                guarantee_holds: result.stop_reason == StopReason::DeadlineMissed,
            };
            unsafe { write_out(out, Box::into_raw(Box::new(handle))) }
        }
        Ok(Err(err)) => fail(EnumisStatus::InvalidArgument, err),
        Err(_) => fail(EnumisStatus::Internal, "panic inside enumeration"),
    }
}

/// Exact reference enumeration of all maximum cliques (no sampling).
///
/// # Safety
/// `graph` must be a live handle; `out` as in
/// `enumis_enumerate_max_cliques`.
#[no_mangle]
pub unsafe extern "C" fn enumis_exact_max_cliques(
    graph: *const EnumisGraph,
    out: *mut *mut EnumisCliqueResult,
) -> EnumisStatus {
    if graph.is_null() {
        return fail(EnumisStatus::InvalidArgument, "null graph handle");
    }
    let graph = unsafe { &(*graph).inner };
    match catch_unwind(AssertUnwindSafe(|| enumerate_max_cliques_exact(graph))) {
        Ok(cliques) => {
            let size = cliques.first().map_or(0, |c| c.len());
            let handle = EnumisCliqueResult {
                cliques: cliques.iter().map(|c| c.members().to_vec()).collect(),
                theta: -(size as f64),
                accepted_samples: 0,
                raw_draws: 0,
                guarantee_holds: true,
            };
            unsafe { write_out(out, Box::into_raw(Box::new(handle))) }
        }
        Err(_) => fail(EnumisStatus::Internal, "panic inside exact enumeration"),
    }
}

/// Number of cliques in a result; zero for null.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_count(result: *const EnumisCliqueResult) -> usize {
    if result.is_null() {
        return 0;
    }
    unsafe { &(*result) }.cliques.len()
}

/// Copies the vertices of clique `index` into `buffer` (up to `buffer_len`
/// entries) and reports the clique's full size through `written`.
///
/// # Safety
/// `result` must be a live handle; `buffer` must have room for `buffer_len`
/// entries; `written` must point to writable memory for one size_t.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_clique(
    result: *const EnumisCliqueResult,
    index: usize,
    buffer: *mut u32,
    buffer_len: usize,
    written: *mut usize,
) -> EnumisStatus {
    if result.is_null() || written.is_null() {
        return fail(EnumisStatus::InvalidArgument, "null pointer");
    }
    let result = unsafe { &(*result) };
    let Some(clique) = result.cliques.get(index) else {
        return fail(EnumisStatus::InvalidArgument, "clique index out of range");
    };
    unsafe { written.write(clique.len()) };
    if buffer_len > 0 {
        if buffer.is_null() {
            return fail(EnumisStatus::InvalidArgument, "null buffer");
        }
        let count = clique.len().min(buffer_len);
        unsafe { ptr::copy_nonoverlapping(clique.as_ptr(), buffer, count) };
    }
    EnumisStatus::Ok
}

/// Final threshold (minus the clique size) of a result.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_theta(result: *const EnumisCliqueResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &(*result) }.theta
}

/// Accepted-sample count at which the run stopped.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_accepted_samples(
    result: *const EnumisCliqueResult,
) -> u64 {
    if result.is_null() {
        return 0;
    }
    unsafe { &(*result) }.accepted_samples
}

/// Total raw draws, including rejected ones.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_raw_draws(result: *const EnumisCliqueResult) -> u64 {
    if result.is_null() {
        return 0;
    }
    unsafe { &(*result) }.raw_draws
}

/// 1 when the run ended at a deadline (the epsilon guarantee applies),
/// 0 when a budget cap cut it short.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_guarantee_holds(
    result: *const EnumisCliqueResult,
) -> i32 {
    if result.is_null() {
        return 0;
    }
    i32::from(unsafe { &(*result) }.guarantee_holds)
}

/// Releases a result handle. Null is ignored.
///
/// # Safety
/// `result` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn enumis_result_free(result: *mut EnumisCliqueResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_roundtrip() {
        let mut value = 0.0f64;
        assert_eq!(unsafe { enumis_kappa1(0.01, &mut value) }, EnumisStatus::Ok);
        assert!((value - 1.142_105_487).abs() < 1e-6);
        assert_eq!(
            unsafe { enumis_kappa1(0.5, &mut value) },
            EnumisStatus::InvalidArgument
        );
        assert!(!enumis_last_error_message().is_null());
        let mut deadline = 0u64;
        assert_eq!(
            unsafe { enumis_deadline(2, value.max(1.0), 0.01, &mut deadline) },
            EnumisStatus::Ok
        );
    }

    #[test]
    fn graph_and_enumeration_through_the_abi() {
        let text = std::ffi::CString::new("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        let mut graph: *mut EnumisGraph = ptr::null_mut();
        assert_eq!(
            unsafe { enumis_graph_parse_dimacs(text.as_ptr(), &mut graph) },
            EnumisStatus::Ok
        );
        assert_eq!(unsafe { enumis_graph_vertices(graph) }, 3);
        assert_eq!(unsafe { enumis_graph_edges(graph) }, 3);

        let mut result: *mut EnumisCliqueResult = ptr::null_mut();
        let status = unsafe {
            enumis_enumerate_max_cliques(graph, 0.01, 2.0, 200, 0.1, 8.0, 7, 0, &mut result)
        };
        assert_eq!(status, EnumisStatus::Ok);
        assert_eq!(unsafe { enumis_result_count(result) }, 1);
        assert_eq!(unsafe { enumis_result_theta(result) }, -3.0);
        assert_eq!(unsafe { enumis_result_guarantee_holds(result) }, 1);
        let mut buffer = [0u32; 8];
        let mut written = 0usize;
        assert_eq!(
            unsafe {
                enumis_result_clique(result, 0, buffer.as_mut_ptr(), buffer.len(), &mut written)
            },
            EnumisStatus::Ok
        );
        assert_eq!(written, 3);
        assert_eq!(&buffer[..3], &[0, 1, 2]);

        let mut exact: *mut EnumisCliqueResult = ptr::null_mut();
        assert_eq!(
            unsafe { enumis_exact_max_cliques(graph, &mut exact) },
            EnumisStatus::Ok
        );
        assert_eq!(unsafe { enumis_result_count(exact) }, 1);

        unsafe {
            enumis_result_free(result);
            enumis_result_free(exact);
            enumis_graph_free(graph);
        }
    }

    #[test]
    fn null_handling() {
        assert_eq!(unsafe { enumis_graph_vertices(ptr::null()) }, 0);
        assert_eq!(unsafe { enumis_result_count(ptr::null()) }, 0);
        let mut out: *mut EnumisGraph = ptr::null_mut();
        assert_eq!(
            unsafe { enumis_graph_parse_dimacs(ptr::null(), &mut out) },
            EnumisStatus::InvalidArgument
        );
        unsafe { enumis_graph_free(ptr::null_mut()) };
        unsafe { enumis_result_free(ptr::null_mut()) };
    }
}
