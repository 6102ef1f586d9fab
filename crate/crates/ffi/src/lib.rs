//! C ABI over the cavitas library.
//!
//! Every fallible call returns a [`CavitasStatus`]; on failure the message is
//! kept per thread and read back with [`cavitas_last_error_message`]. Handles
//! are opaque and owned by the caller, who releases them with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cavitas::constitutive::{EnergyFamily3D, StressFamily1D};
use cavitas::energy::energy_delta_closed;
use cavitas::fracture::{build_fan, energy_production};
use cavitas::selfsim::{shoot_cavity_solution, CavityCondition, CavitySolution, SolverControls};
use cavitas::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavitasStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside its domain.
    InvalidArgument = 2,
    /// Material violates a constitutive hypothesis.
    InvalidMaterial = 3,
    /// No cavitating solution exists for the requested stretch.
    NoSolution = 4,
    /// Integration, quadrature or root-finding failure.
    Numerical = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Stored-energy family.
pub struct CavitasFamily(EnergyFamily3D);

/// Cavitating self-similar solution.
pub struct CavitasSolution(CavitySolution);

/// Precursor shock data.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CavitasJunction {
    pub sigma: f64,
    pub a_minus: f64,
    pub lambda: f64,
    pub rh_residual: f64,
    pub lax_ok: bool,
}

/// One sample of the similarity profile.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CavitasTrajPoint {
    pub s: f64,
    pub phi: f64,
    pub v: f64,
    pub a: f64,
    pub b: f64,
    pub q: f64,
}

/// Summary of the 1-d fracture fan. `total_production` is `+inf` when the
/// stress is unbounded.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CavitasFan {
    pub sigma: f64,
    pub y0: f64,
    pub total_production: f64,
    pub lax_ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let end = e.nul_position();
        CString::new(&e.into_vec()[..end]).expect("prefix has no interior NUL")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CavitasStatus {
    match e {
        Error::Domain { .. } | Error::Config { .. } | Error::Bracket(_) | Error::Contract(_) => {
            CavitasStatus::InvalidArgument
        }
        Error::Constitutive(_) => CavitasStatus::InvalidMaterial,
        Error::NoCavitatingSolution { .. } => CavitasStatus::NoSolution,
        _ => CavitasStatus::Numerical,
    }
}

/// Runs `f`, recording failures and converting panics.
fn guard<F>(f: F) -> CavitasStatus
where
    F: FnOnce() -> Result<(), (CavitasStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            CavitasStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            CavitasStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (CavitasStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CavitasStatus, String) {
    (CavitasStatus::NullPointer, format!("null pointer: {what}"))
}

/// Writes `value` through `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_out<T>(out: *mut T, what: &str, value: T) -> Result<(), (CavitasStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `p` must be null or point to a live value of `T`.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (CavitasStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cavitas_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(s) => s,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn cavitas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

fn new_family(
    out: *mut *mut CavitasFamily,
    make: impl FnOnce() -> cavitas::Result<EnergyFamily3D>,
) -> CavitasStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fam = make().map_err(lib_err)?;
        fam.validate().into_result().map_err(lib_err)?;
        unsafe { out.write(Box::into_raw(Box::new(CavitasFamily(fam)))) };
        Ok(())
    })
}

/// Power-law family `h(v) = A v^gamma + B v^(-beta)`. On success `*out` holds
/// a handle to release with [`cavitas_family_free`].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_family_power_law(
    a: f64,
    b: f64,
    gamma: f64,
    beta: f64,
    out: *mut *mut CavitasFamily,
) -> CavitasStatus {
    new_family(out, || EnergyFamily3D::power_law(a, b, gamma, beta))
}

/// Linear-log family `h(v) = L0 v - C ln v + D`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_family_linear_log(
    l0: f64,
    c: f64,
    d: f64,
    out: *mut *mut CavitasFamily,
) -> CavitasStatus {
    new_family(out, || EnergyFamily3D::linear_log(l0, c, d))
}

/// # Safety
/// `fam` must be null or a handle from a `cavitas_family_*` constructor not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn cavitas_family_free(fam: *mut CavitasFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// The coefficient `P(a, b)`.
///
/// # Safety
/// `fam` must be a live family handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_family_p_coefficient(
    fam: *const CavitasFamily,
    a: f64,
    b: f64,
    out: *mut f64,
) -> CavitasStatus {
    guard(|| {
        let fam = deref(fam, "fam")?;
        let p = fam.0.p_coefficient(a, b).map_err(lib_err)?;
        write_out(out, "out", p)
    })
}

/// Specific volume of the stress-free cavity (root of `h'`).
///
/// # Safety
/// `fam` must be a live family handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_family_stress_free_volume(
    fam: *const CavitasFamily,
    out: *mut f64,
) -> CavitasStatus {
    guard(|| {
        let fam = deref(fam, "fam")?;
        let h = fam.0.cavity_pressure_root().map_err(lib_err)?;
        write_out(out, "out", h)
    })
}

fn solve(
    fam: *const CavitasFamily,
    lambda: f64,
    cond: CavityCondition,
    out: *mut *mut CavitasSolution,
) -> CavitasStatus {
    guard(|| {
        let fam = unsafe { deref(fam, "fam")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let sol = shoot_cavity_solution(&fam.0, lambda, cond, &SolverControls::default())
            .map_err(lib_err)?;
        unsafe { out.write(Box::into_raw(Box::new(CavitasSolution(sol)))) };
        Ok(())
    })
}

/// Cavitating solution at far-field stretch `lambda` with a stress-free
/// cavity. Returns [`CavitasStatus::NoSolution`] below the critical stretch.
///
/// # Safety
/// `fam` must be a live family handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solve_cavity(
    fam: *const CavitasFamily,
    lambda: f64,
    out: *mut *mut CavitasSolution,
) -> CavitasStatus {
    solve(fam, lambda, CavityCondition::StressFree, out)
}

/// As [`cavitas_solve_cavity`] with the cavity specific volume prescribed.
///
/// # Safety
/// `fam` must be a live family handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solve_cavity_prescribed(
    fam: *const CavitasFamily,
    lambda: f64,
    v0: f64,
    out: *mut *mut CavitasSolution,
) -> CavitasStatus {
    solve(fam, lambda, CavityCondition::PrescribedV0(v0), out)
}

/// # Safety
/// `sol` must be null or a handle from a solve call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solution_free(sol: *mut CavitasSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Cavity velocity `phi(0)`.
///
/// # Safety
/// `sol` must be a live solution handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solution_phi0(
    sol: *const CavitasSolution,
    out: *mut f64,
) -> CavitasStatus {
    guard(|| {
        let sol = deref(sol, "sol")?;
        write_out(out, "out", sol.0.phi0)
    })
}

/// # Safety
/// `sol` must be a live solution handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solution_junction(
    sol: *const CavitasSolution,
    out: *mut CavitasJunction,
) -> CavitasStatus {
    guard(|| {
        let j = deref(sol, "sol")?.0.junction;
        write_out(
            out,
            "out",
            CavitasJunction {
                sigma: j.sigma,
                a_minus: j.a_minus,
                lambda: j.lambda,
                rh_residual: j.rh_residual,
                lax_ok: j.lax_ok,
            },
        )
    })
}

/// Profile sample at similarity variable `s`, clamped to `[0, sigma]`.
///
/// # Safety
/// `sol` must be a live solution handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solution_eval(
    sol: *const CavitasSolution,
    s: f64,
    out: *mut CavitasTrajPoint,
) -> CavitasStatus {
    guard(|| {
        let sol = deref(sol, "sol")?;
        if s.is_nan() {
            return Err((CavitasStatus::InvalidArgument, "s is NaN".into()));
        }
        let p = sol.0.trajectory.eval(s);
        write_out(
            out,
            "out",
            CavitasTrajPoint {
                s: p.s,
                phi: p.phi,
                v: p.v,
                a: p.a,
                b: p.b,
                q: p.q,
            },
        )
    })
}

/// Energy of the cavitating solution minus the homogeneous one in the ball
/// `|x| <= t sigma` at time `t`.
///
/// # Safety
/// `sol` must be a live solution handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_solution_energy_delta(
    sol: *const CavitasSolution,
    t: f64,
    out: *mut f64,
) -> CavitasStatus {
    guard(|| {
        let sol = deref(sol, "sol")?;
        let d = energy_delta_closed(&sol.0, t).map_err(lib_err)?;
        write_out(out, "out", d)
    })
}

/// Fracture fan of the stress `tau(u) = tau_inf - u^(-p)` between stretches
/// `alpha < lambda`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cavitas_fracture_fan(
    tau_inf: f64,
    p: f64,
    lambda: f64,
    alpha: f64,
    out: *mut CavitasFan,
) -> CavitasStatus {
    guard(|| {
        let law = StressFamily1D::shifted_inverse_power(tau_inf, p).map_err(lib_err)?;
        let fan = build_fan(law, lambda, alpha).map_err(lib_err)?;
        let prod = energy_production(&fan).map_err(lib_err)?;
        write_out(
            out,
            "out",
            CavitasFan {
                sigma: fan.sigma,
                y0: fan.y0,
                total_production: prod.total.finite().unwrap_or(f64::INFINITY),
                lax_ok: fan.lax_ok,
            },
        )
    })
}
