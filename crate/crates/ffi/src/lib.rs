//! C ABI for nhsim.
//!
//! Every fallible function returns an [`NhsimStatus`]. On failure a message
//! is kept per thread and can be read with [`nhsim_last_error_message`].
//! Models and trajectories are opaque handles released with their `_free`
//! function. Matrices are written row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DVector;

use nhsim::bench::{self, Model};
use nhsim::gni;
use nhsim::mech::projectors;
use nhsim::models::{Sleigh, SleighParams, Snakeboard, SnakeboardParams};
use nhsim::se2::{AlgebraVector, Retraction};
use nhsim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhsimStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad parameters, inadmissible state, unknown config key and so on.
    InvalidInput = 2,
    Parse = 3,
    /// Rank-deficient constraints or a vanishing closed-form denominator.
    Singular = 4,
    NoConvergence = 5,
    /// Any other numerical failure.
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhsimRetraction {
    Exp = 0,
    Cay = 1,
    Ccsk = 2,
}

/// Opaque model handle.
pub struct NhsimModel(Model);

/// Opaque table of simulation output.
pub struct NhsimTrajectory {
    header: Vec<CString>,
    data: Vec<f64>,
    rows: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> NhsimStatus {
    match e.root() {
        Error::Parse { .. } => NhsimStatus::Parse,
        r if r.is_input_error() => NhsimStatus::InvalidInput,
        Error::SingularConstraint { .. } | Error::NearSingularDenominator { .. } => NhsimStatus::Singular,
        Error::NewtonDivergence { .. } => NhsimStatus::NoConvergence,
        _ => NhsimStatus::Numerical,
    }
}

fn fail(e: Error) -> NhsimStatus {
    let status = status_of(&e);
    set_last_error(e.to_string());
    status
}

fn null(what: &str) -> NhsimStatus {
    set_last_error(format!("{what} is null"));
    NhsimStatus::NullPointer
}

fn guard(f: impl FnOnce() -> NhsimStatus) -> NhsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("internal panic".into());
            NhsimStatus::Panic
        }
    }
}

/// Reads `n` doubles; a null pointer is accepted only when `n == 0`.
unsafe fn input(p: *const f64, n: usize, what: &str) -> Result<DVector<f64>, NhsimStatus> {
    if n == 0 {
        return Ok(DVector::zeros(0));
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(DVector::from_column_slice(std::slice::from_raw_parts(p, n)))
}

unsafe fn output(p: *mut f64, values: &[f64], what: &str) -> Result<(), NhsimStatus> {
    if values.is_empty() {
        return Ok(());
    }
    if p.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), p, values.len());
    Ok(())
}

fn model_ref<'a>(model: *const NhsimModel) -> Result<&'a Model, NhsimStatus> {
    // SAFETY: non-null handles come from `nhsim_*_new` per the API contract.
    unsafe { model.as_ref() }.map(|m| &m.0).ok_or_else(|| null("model"))
}

fn finish(r: Result<(), NhsimStatus>) -> NhsimStatus {
    match r {
        Ok(()) => NhsimStatus::Ok,
        Err(s) => s,
    }
}

unsafe fn store_model(out: *mut *mut NhsimModel, model: Result<Model, Error>) -> NhsimStatus {
    if out.is_null() {
        return null("out");
    }
    *out = ptr::null_mut();
    match model {
        Ok(m) => {
            *out = Box::into_raw(Box::new(NhsimModel(m)));
            NhsimStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nhsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn nhsim_status_name(status: NhsimStatus) -> *const c_char {
    let s: &'static CStr = match status {
        NhsimStatus::Ok => c"ok",
        NhsimStatus::NullPointer => c"null pointer",
        NhsimStatus::InvalidInput => c"invalid input",
        NhsimStatus::Parse => c"parse error",
        NhsimStatus::Singular => c"singular configuration",
        NhsimStatus::NoConvergence => c"solver did not converge",
        NhsimStatus::Numerical => c"numerical failure",
        NhsimStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Chaplygin sleigh with inertia `I`, mass `m` and skate offset `a`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn nhsim_sleigh_new(
    inertia: f64,
    mass: f64,
    offset: f64,
    out: *mut *mut NhsimModel,
) -> NhsimStatus {
    guard(|| {
        let params = SleighParams { inertia, mass, offset };
        store_model(out, Sleigh::new(params).map(Model::Sleigh))
    })
}

/// Snakeboard with mass `m`, half length `l`, board inertia `I` and wheel
/// inertia `J`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn nhsim_snakeboard_new(
    mass: f64,
    half_length: f64,
    inertia: f64,
    rotor_inertia: f64,
    out: *mut *mut NhsimModel,
) -> NhsimStatus {
    guard(|| {
        let params = SnakeboardParams {
            mass,
            half_length,
            inertia,
            rotor_inertia,
        };
        store_model(out, Snakeboard::new(params).map(Model::Snakeboard))
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nhsim_model_free(model: *mut NhsimModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Configuration dimension `n`; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_model_dim(model: *const NhsimModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.system().dim())
}

/// Number of constraints `m`.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_model_num_constraints(model: *const NhsimModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.system().num_constraints())
}

/// Length of the control vector `u`; 0 for the sleigh.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_model_num_controls(model: *const NhsimModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.system().num_controls())
}

/// Writes the n×n projectors P(q) and Q(q), either of which may be null.
///
/// # Safety
/// `q` holds `n` doubles; non-null outputs hold `n*n`.
#[no_mangle]
pub unsafe extern "C" fn nhsim_projectors(
    model: *const NhsimModel,
    q: *const f64,
    p_out: *mut f64,
    q_out: *mut f64,
) -> NhsimStatus {
    guard(|| {
        finish((|| {
            let sys = model_ref(model)?.system();
            let n = sys.dim();
            let q = input(q, n, "q")?;
            let pr = projectors(sys, &q).map_err(fail)?;
            if !p_out.is_null() {
                output(p_out, pr.p.transpose().as_slice(), "p_out")?;
            }
            if !q_out.is_null() {
                output(q_out, pr.q.transpose().as_slice(), "q_out")?;
            }
            Ok(())
        })())
    })
}

/// First half-step momentum `p_{1/2}` from an admissible `(q0, p0)`.
///
/// # Safety
/// `q0`, `p0` and `p_half_out` hold `n` doubles, `u0` holds the control
/// count (may be null when that is 0).
#[no_mangle]
pub unsafe extern "C" fn nhsim_gni_init(
    model: *const NhsimModel,
    q0: *const f64,
    p0: *const f64,
    u0: *const f64,
    h: f64,
    p_half_out: *mut f64,
) -> NhsimStatus {
    guard(|| {
        finish((|| {
            let sys = model_ref(model)?.system();
            let n = sys.dim();
            let (q0, p0) = (input(q0, n, "q0")?, input(p0, n, "p0")?);
            let u0 = input(u0, sys.num_controls(), "u0")?;
            let p_half = gni::gni_init(sys, &q0, &p0, &u0, h).map_err(fail)?;
            output(p_half_out, p_half.as_slice(), "p_half_out")
        })())
    })
}

/// One projected GNI step `(q_k, p_{k-1/2}) -> (q_{k+1}, p_{k+1/2})` with
/// the control evaluated at `t_k`.
///
/// # Safety
/// `q`, `p_half`, `q_next` and `p_half_next` hold `n` doubles; `u` holds
/// the control count (may be null when that is 0).
#[no_mangle]
pub unsafe extern "C" fn nhsim_gni_step(
    model: *const NhsimModel,
    q: *const f64,
    p_half: *const f64,
    u: *const f64,
    h: f64,
    q_next: *mut f64,
    p_half_next: *mut f64,
) -> NhsimStatus {
    guard(|| {
        finish((|| {
            let sys = model_ref(model)?.system();
            let n = sys.dim();
            let (q, p_half) = (input(q, n, "q")?, input(p_half, n, "p_half")?);
            let u = input(u, sys.num_controls(), "u")?;
            let (qn, pn) = gni::gni_step(sys, &q, &p_half, &u, h).map_err(fail)?;
            output(q_next, qn.as_slice(), "q_next")?;
            output(p_half_next, pn.as_slice(), "p_half_next")
        })())
    })
}

/// Maps `v = (w, x, y)` in se(2) to `g = (theta, x, y)` in SE(2).
///
/// # Safety
/// `v` and `g_out` each hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn nhsim_se2_retract(kind: NhsimRetraction, v: *const f64, g_out: *mut f64) -> NhsimStatus {
    guard(|| {
        finish((|| {
            let v = input(v, 3, "v")?;
            let tau = match kind {
                NhsimRetraction::Exp => Retraction::Exp,
                NhsimRetraction::Cay => Retraction::Cay,
                NhsimRetraction::Ccsk => Retraction::Ccsk,
            };
            let g = tau.apply(AlgebraVector::new(v[0], v[1], v[2]));
            output(g_out, &g.to_array(), "g_out")
        })())
    })
}

/// Parses a run configuration and simulates it.
///
/// On a numerical failure mid-run the status reports it but `*out` still
/// receives the rows completed so far. On input errors `*out` is null.
///
/// # Safety
/// `config` is a NUL-terminated UTF-8 string; `out` is valid for one
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn nhsim_simulate_config(config: *const c_char, out: *mut *mut NhsimTrajectory) -> NhsimStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        if config.is_null() {
            return null("config");
        }
        let text = match CStr::from_ptr(config).to_str() {
            Ok(t) => t,
            Err(e) => {
                set_last_error(format!("config is not UTF-8: {e}"));
                return NhsimStatus::InvalidInput;
            }
        };
        let sim = match bench::parse_config(text).and_then(|cfg| bench::simulate(&cfg)) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let table = sim.table;
        let traj = NhsimTrajectory {
            header: table
                .header
                .iter()
                .map(|h| CString::new(h.as_str()).unwrap_or_default())
                .collect(),
            rows: table.rows.len(),
            data: table.rows.into_iter().flatten().collect(),
        };
        *out = Box::into_raw(Box::new(traj));
        match sim.run.error {
            None => NhsimStatus::Ok,
            Some(e) => fail(e),
        }
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nhsim_trajectory_free(traj: *mut NhsimTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_trajectory_rows(traj: *const NhsimTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.rows)
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_trajectory_cols(traj: *const NhsimTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.header.len())
}

/// Column name, or null when out of range. Owned by the trajectory.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_trajectory_column_name(traj: *const NhsimTrajectory, col: usize) -> *const c_char {
    traj.as_ref()
        .and_then(|t| t.header.get(col))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Row-major `rows × cols` values, owned by the trajectory. Null when empty.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nhsim_trajectory_data(traj: *const NhsimTrajectory) -> *const f64 {
    match traj.as_ref() {
        Some(t) if !t.data.is_empty() => t.data.as_ptr(),
        _ => ptr::null(),
    }
}
