//! C ABI over the projektor library.
//!
//! Conventions:
//! - Handles (`PjSubspace`, `PjTrajectory`) are opaque; free them with the
//!   matching `*_free` function exactly once.
//! - Every fallible call returns a [`PjStatus`]; on failure a thread-local
//!   message is readable through [`pj_last_error`].
//! - Vectors and matrices pass as dense f64 buffers; matrices are
//!   column-major. Indices of subspaces and letters are 1-based, matching
//!   the library and its file formats.
//!
//! The shipped header `include/projektor.h` is maintained by hand and kept
//! in sync by a test.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use projektor::harness;
use projektor::regularity::{witness_search_with, WitnessOptions};
use projektor::schedule::{run_trajectory, Schedule, Trajectory};
use projektor::subspace::{Subspace, Vector};
use projektor::transport;
use projektor::Error;

/// Status codes mirrored in the shipped header.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PjStatus {
    Ok = 0,
    InputError = 1,
    EmptySubspace = 2,
    Empty = 3,
    ZeroNorm = 4,
    PreconditionViolated = 5,
    ConstructionFailed = 6,
    ChainDegraded = 7,
    Mismatch = 8,
    Io = 9,
    Json = 10,
    NullPointer = 11,
    BufferTooSmall = 12,
    Utf8 = 13,
    Panic = 14,
}

impl From<&Error> for PjStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Input(_) => PjStatus::InputError,
            Error::EmptySubspace(_) => PjStatus::EmptySubspace,
            Error::Empty(_) => PjStatus::Empty,
            Error::ZeroNorm(_) => PjStatus::ZeroNorm,
            Error::PreconditionViolated(_) => PjStatus::PreconditionViolated,
            Error::ConstructionFailed(_) => PjStatus::ConstructionFailed,
            Error::ChainDegraded { .. } => PjStatus::ChainDegraded,
            Error::Mismatch(_) => PjStatus::Mismatch,
            Error::Io(_) => PjStatus::Io,
            Error::Json(_) => PjStatus::Json,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(e: &Error) -> PjStatus {
    set_error(&e.to_string());
    PjStatus::from(e)
}

fn guard(status: impl FnOnce() -> PjStatus + std::panic::UnwindSafe) -> PjStatus {
    match catch_unwind(status) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic crossed the C boundary");
            PjStatus::Panic
        }
    }
}

/// Opaque subspace handle.
pub struct PjSubspace(Subspace);

/// Opaque trajectory handle.
pub struct PjTrajectory(Trajectory);

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to
/// `cap`). Returns the full length including the terminator.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be null (then only
/// the required length is returned).
#[no_mangle]
pub unsafe extern "C" fn pj_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // Guarantee termination even when truncated.
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn null_pointer() -> PjStatus {
    set_error("null pointer argument");
    PjStatus::NullPointer
}

/// Orthonormalize `count` vectors of length `ambient_dim` (stored
/// contiguously, vector by vector) into a subspace handle.
///
/// # Safety
/// `data` must hold `ambient_dim * count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_span(
    data: *const f64,
    ambient_dim: usize,
    count: usize,
    tol: f64,
    out: *mut *mut PjSubspace,
) -> PjStatus {
    if out.is_null() {
        return null_pointer();
    }
    let Some(data) = slice_arg(data, ambient_dim * count) else {
        return null_pointer();
    };
    guard(AssertUnwindSafe(|| {
        let vectors: Vec<Vector> = (0..count)
            .map(|j| Vector::from_column_slice(&data[j * ambient_dim..(j + 1) * ambient_dim]))
            .collect();
        match Subspace::span(&vectors, tol) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(PjSubspace(s)));
                PjStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_free(s: *mut PjSubspace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_ambient_dim(s: *const PjSubspace) -> usize {
    s.as_ref().map(|s| s.0.ambient_dim()).unwrap_or(0)
}

/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_dim(s: *const PjSubspace) -> usize {
    s.as_ref().map(|s| s.0.dim()).unwrap_or(0)
}

/// Copy the orthonormal basis (column-major, ambient_dim x dim) into `out`.
///
/// # Safety
/// `out` must hold at least `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_basis(
    s: *const PjSubspace,
    out: *mut f64,
    cap: usize,
) -> PjStatus {
    let Some(s) = s.as_ref() else {
        return null_pointer();
    };
    if out.is_null() {
        return null_pointer();
    }
    let needed = s.0.ambient_dim() * s.0.dim();
    if cap < needed {
        set_error("basis buffer too small");
        return PjStatus::BufferTooSmall;
    }
    let dst = std::slice::from_raw_parts_mut(out, needed);
    dst.copy_from_slice(s.0.basis().as_slice());
    PjStatus::Ok
}

/// Project `x` onto the subspace, writing `ambient_dim` doubles to `out`.
///
/// # Safety
/// `x` and `out` must hold `ambient_dim` doubles each.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_project(
    s: *const PjSubspace,
    x: *const f64,
    out: *mut f64,
) -> PjStatus {
    let Some(s) = s.as_ref() else {
        return null_pointer();
    };
    let Some(x) = slice_arg(x, s.0.ambient_dim()) else {
        return null_pointer();
    };
    if out.is_null() {
        return null_pointer();
    }
    guard(AssertUnwindSafe(|| {
        match s.0.project(&Vector::from_column_slice(x)) {
            Ok(p) => {
                std::slice::from_raw_parts_mut(out, s.0.ambient_dim())
                    .copy_from_slice(p.as_slice());
                PjStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// Distance from `x` to the subspace.
///
/// # Safety
/// `x` must hold `ambient_dim` doubles; `out` one double.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_distance(
    s: *const PjSubspace,
    x: *const f64,
    out: *mut f64,
) -> PjStatus {
    let Some(s) = s.as_ref() else {
        return null_pointer();
    };
    let Some(x) = slice_arg(x, s.0.ambient_dim()) else {
        return null_pointer();
    };
    if out.is_null() {
        return null_pointer();
    }
    guard(AssertUnwindSafe(|| {
        match s.0.distance(&Vector::from_column_slice(x)) {
            Ok(d) => {
                *out = d;
                PjStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

unsafe fn binary_op(
    a: *const PjSubspace,
    b: *const PjSubspace,
    out: *mut *mut PjSubspace,
    op: impl FnOnce(&Subspace, &Subspace) -> Result<Subspace, Error>,
) -> PjStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return null_pointer();
    };
    if out.is_null() {
        return null_pointer();
    }
    match op(&a.0, &b.0) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(PjSubspace(s)));
            PjStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Closed linear span of the union.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_join(
    a: *const PjSubspace,
    b: *const PjSubspace,
    out: *mut *mut PjSubspace,
) -> PjStatus {
    binary_op(a, b, out, |a, b| a.join(b))
}

/// Intersection by principal-vector thresholding.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_intersect(
    a: *const PjSubspace,
    b: *const PjSubspace,
    tol: f64,
    out: *mut *mut PjSubspace,
) -> PjStatus {
    binary_op(a, b, out, |a, b| a.intersect(b, tol))
}

/// Orthogonal complement.
///
/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pj_subspace_complement(
    s: *const PjSubspace,
    out: *mut *mut PjSubspace,
) -> PjStatus {
    let Some(s) = s.as_ref() else {
        return null_pointer();
    };
    if out.is_null() {
        return null_pointer();
    }
    *out = Box::into_raw(Box::new(PjSubspace(s.0.complement())));
    PjStatus::Ok
}

/// Principal angles between two subspaces. Writes up to `angles_cap`
/// ascending angles, the actual count, the Friedrichs cosine, and the
/// shared-direction count.
///
/// # Safety
/// Output pointers must be writable; `angles_out` must hold `angles_cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn pj_principal_angles(
    a: *const PjSubspace,
    b: *const PjSubspace,
    tol: f64,
    angles_out: *mut f64,
    angles_cap: usize,
    angles_len: *mut usize,
    friedrichs_out: *mut f64,
    dim_intersection_out: *mut usize,
) -> PjStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return null_pointer();
    };
    if angles_len.is_null() || friedrichs_out.is_null() || dim_intersection_out.is_null() {
        return null_pointer();
    }
    guard(AssertUnwindSafe(|| match a.0.principal_angles(&b.0, tol) {
        Ok(profile) => {
            *angles_len = profile.principal_angles.len();
            if profile.principal_angles.len() > angles_cap {
                set_error("angle buffer too small");
                return PjStatus::BufferTooSmall;
            }
            if !angles_out.is_null() {
                std::slice::from_raw_parts_mut(angles_out, profile.principal_angles.len())
                    .copy_from_slice(&profile.principal_angles);
            }
            *friedrichs_out = profile.friedrichs_cos;
            *dim_intersection_out = profile.dim_intersection;
            PjStatus::Ok
        }
        Err(e) => fail(&e),
    }))
}

/// Witness gap of a family: smallest eigenvalue of the summed complement
/// projections restricted to the orthogonal complement of the common
/// intersection, plus the witness's largest distance to a member.
///
/// # Safety
/// `spaces` must hold `count` live handles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_witness_gap(
    spaces: *const *const PjSubspace,
    count: usize,
    gap_out: *mut f64,
    max_dist_out: *mut f64,
) -> PjStatus {
    if spaces.is_null() || gap_out.is_null() || max_dist_out.is_null() {
        return null_pointer();
    }
    let handles = std::slice::from_raw_parts(spaces, count);
    let mut family = Vec::with_capacity(count);
    for h in handles {
        let Some(h) = h.as_ref() else {
            return null_pointer();
        };
        family.push(h.0.clone());
    }
    guard(AssertUnwindSafe(|| {
        let opts = WitnessOptions {
            compute_rate: false,
            compute_friedrichs: false,
            ..WitnessOptions::default()
        };
        match witness_search_with(&family, &opts) {
            Ok(report) => {
                *gap_out = report.witness_gap;
                *max_dist_out = report.max_dist;
                PjStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// Schedule kinds accepted by [`pj_run_trajectory`].
pub const PJ_SCHEDULE_CYCLIC: i32 = 0;
pub const PJ_SCHEDULE_SEEDED_RANDOM: i32 = 1;
pub const PJ_SCHEDULE_EXPLICIT: i32 = 2;

/// Run z_n = P(L_{k_n}) z_{n-1} over the handles. For the explicit kind,
/// `explicit`/`explicit_len` supply the 1-based index list; otherwise they
/// may be null/0.
///
/// # Safety
/// `spaces` holds `count` live handles; `z0` holds the ambient dimension;
/// `explicit` holds `explicit_len` entries when used; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pj_run_trajectory(
    spaces: *const *const PjSubspace,
    count: usize,
    schedule_kind: i32,
    seed: u64,
    explicit: *const usize,
    explicit_len: usize,
    z0: *const f64,
    steps: usize,
    out: *mut *mut PjTrajectory,
) -> PjStatus {
    if spaces.is_null() || out.is_null() {
        return null_pointer();
    }
    let handles = std::slice::from_raw_parts(spaces, count);
    let mut family = Vec::with_capacity(count);
    for h in handles {
        let Some(h) = h.as_ref() else {
            return null_pointer();
        };
        family.push(h.0.clone());
    }
    let ambient = family.first().map(|s| s.ambient_dim()).unwrap_or(0);
    let Some(z0) = slice_arg(z0, ambient) else {
        return null_pointer();
    };
    let schedule = match schedule_kind {
        PJ_SCHEDULE_CYCLIC => Schedule::Cyclic { k: count },
        PJ_SCHEDULE_SEEDED_RANDOM => Schedule::SeededRandom { k: count, seed },
        PJ_SCHEDULE_EXPLICIT => {
            if explicit.is_null() {
                return null_pointer();
            }
            Schedule::Explicit {
                k: count,
                indices: std::slice::from_raw_parts(explicit, explicit_len).to_vec(),
            }
        }
        _ => {
            set_error("unknown schedule kind");
            return PjStatus::InputError;
        }
    };
    guard(AssertUnwindSafe(|| {
        match run_trajectory(&family, &schedule, &Vector::from_column_slice(z0), steps) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(PjTrajectory(t)));
                PjStatus::Ok
            }
            Err(e) => fail(&e),
        }
    }))
}

/// # Safety
/// `t` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pj_trajectory_free(t: *mut PjTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of projection steps.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pj_trajectory_steps(t: *const PjTrajectory) -> usize {
    t.as_ref().map(|t| t.0.steps()).unwrap_or(0)
}

/// Norm of z_step (step 0 is the start point).
///
/// # Safety
/// `t` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pj_trajectory_norm(
    t: *const PjTrajectory,
    step: usize,
    out: *mut f64,
) -> PjStatus {
    let Some(t) = t.as_ref() else {
        return null_pointer();
    };
    if out.is_null() {
        return null_pointer();
    }
    match t.0.norms.get(step) {
        Some(n) => {
            *out = *n;
            PjStatus::Ok
        }
        None => {
            set_error("step out of range");
            PjStatus::InputError
        }
    }
}

/// 1-based subspace index applied at `step` (1-based).
///
/// # Safety
/// `t` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pj_trajectory_index(
    t: *const PjTrajectory,
    step: usize,
    out: *mut usize,
) -> PjStatus {
    let Some(t) = t.as_ref() else {
        return null_pointer();
    };
    if out.is_null() || step == 0 {
        return null_pointer();
    }
    match t.0.schedule_used.get(step - 1) {
        Some(k) => {
            *out = *k;
            PjStatus::Ok
        }
        None => {
            set_error("step out of range");
            PjStatus::InputError
        }
    }
}

/// Closed-form residual of the M-line ladder: 1 - cos^M(pi/2M).
#[no_mangle]
pub extern "C" fn pj_ladder_residual(m: usize) -> f64 {
    if m == 0 {
        return f64::NAN;
    }
    transport::ladder_residual(m)
}

/// Smallest ladder size whose residual is strictly below `epsilon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pj_minimal_ladder_size(epsilon: f64, out: *mut usize) -> PjStatus {
    if out.is_null() {
        return null_pointer();
    }
    match transport::minimal_ladder_size(epsilon) {
        Ok(m) => {
            *out = m;
            PjStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<Option<&'a str>, PjStatus> {
    if ptr.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => {
            set_error("invalid UTF-8 in string argument");
            Err(PjStatus::Utf8)
        }
    }
}

/// Load an experiment spec (JSON file), optionally override its output
/// directory, run it, and return the process-style exit code: 0 success,
/// 1 bad input, 2 construction failure.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` may be null.
#[no_mangle]
pub unsafe extern "C" fn pj_run_experiment(
    config_path: *const c_char,
    out_dir: *const c_char,
) -> i32 {
    let config_path = match cstr_arg(config_path) {
        Ok(Some(p)) => p.to_owned(),
        Ok(None) => {
            set_error("null config path");
            return 1;
        }
        Err(_) => return 1,
    };
    let out_dir = match cstr_arg(out_dir) {
        Ok(v) => v.map(PathBuf::from),
        Err(_) => return 1,
    };
    let run = catch_unwind(AssertUnwindSafe(|| {
        let text = std::fs::read_to_string(&config_path)
            .map_err(|e| Error::Input(format!("cannot read config: {e}")))?;
        let mut spec: harness::ExperimentSpec = serde_json_from_str(&text)?;
        if let Some(dir) = out_dir {
            spec.output_dir = dir;
        }
        harness::run_experiment(&spec)
    }));
    match run {
        Ok(Ok(outcome)) => outcome.exit_code,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            e.exit_code()
        }
        Err(_) => {
            set_error("panic crossed the C boundary");
            1
        }
    }
}

fn serde_json_from_str(text: &str) -> Result<harness::ExperimentSpec, Error> {
    serde_json::from_str(text).map_err(Error::from)
}

/// Replay a recorded report and byte-compare its CSV outputs: 0 identical,
/// 1 bad input, 3 mismatch.
///
/// # Safety
/// `report_path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pj_replay(report_path: *const c_char) -> i32 {
    let path = match cstr_arg(report_path) {
        Ok(Some(p)) => PathBuf::from(p),
        Ok(None) => {
            set_error("null report path");
            return 1;
        }
        Err(_) => return 1,
    };
    match catch_unwind(AssertUnwindSafe(|| harness::replay(&path))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            e.exit_code()
        }
        Err(_) => {
            set_error("panic crossed the C boundary");
            1
        }
    }
}
