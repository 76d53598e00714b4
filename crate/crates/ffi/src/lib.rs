//! C ABI for the befp library: opaque handles, integer status codes, and a
//! thread-local error message. The matching header `include/befp.h` is
//! generated by cbindgen at build time.
//!
//! Conventions: constructors write through an out-pointer and return a
//! `BefpStatus`; every handle returned with `BEFP_OK` must be released with
//! its `_free` function; `befp_last_error_message` describes the most recent
//! failure on the calling thread.

use befp::diagnostics;
use befp::equilibria;
use befp::fp_exact;
use befp::grid::{ProfileKind, RadialGrid, RadialProfile};
use befp::radial_solver::{self, RadialInitialCondition, Trajectory};
use befp::transform;
use befp::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BefpStatus {
    BefpOk = 0,
    BefpErrInvalidArgument = 1,
    BefpErrNumerical = 2,
    BefpErrIo = 3,
    BefpErrNullPointer = 4,
    BefpErrPanic = 5,
}

/// Opaque radial profile handle.
pub struct BefpProfile(RadialProfile);

/// Opaque trajectory handle.
pub struct BefpTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> BefpStatus {
    match err {
        Error::Io(_) | Error::Parse { .. } => BefpStatus::BefpErrIo,
        Error::TimeStepTooLarge { .. }
        | Error::NegativeCell { .. }
        | Error::ExponentOverflow(_)
        | Error::UnresolvedConcentration { .. }
        | Error::SandwichViolation { .. } => BefpStatus::BefpErrNumerical,
        _ => BefpStatus::BefpErrInvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> BefpStatus) -> BefpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            BefpStatus::BefpErrPanic
        }
    }
}

fn fallible(f: impl FnOnce() -> Result<(), Error>) -> BefpStatus {
    guard(|| match f() {
        Ok(()) => BefpStatus::BefpOk,
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(Error::InvalidParameter {
            name: "out",
            message: "null out-pointer".into(),
        });
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn null_ptr_error(name: &'static str) -> Error {
    Error::InvalidParameter { name, message: "null pointer".into() }
}

unsafe fn profile_ref<'a>(p: *const BefpProfile) -> Result<&'a RadialProfile, Error> {
    if p.is_null() {
        return Err(null_ptr_error("profile"));
    }
    Ok(unsafe { &(*p).0 })
}

unsafe fn cstr<'a>(s: *const c_char, name: &'static str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(null_ptr_error(name));
    }
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| Error::InvalidParameter {
        name,
        message: "invalid UTF-8".into(),
    })
}

/// Message describing the most recent error on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn befp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn kind_from_int(kind: i32) -> Result<ProfileKind, Error> {
    match kind {
        0 => Ok(ProfileKind::Befp),
        1 => Ok(ProfileKind::Fp),
        other => Err(Error::InvalidParameter {
            name: "kind",
            message: format!("expected 0 (BEFP side) or 1 (FP side), got {other}"),
        }),
    }
}

// ── profile construction and access ──────────────────────────────────

/// Bose-Einstein equilibrium `f_∞^β` sampled on a uniform grid.
///
/// # Safety
/// `out` must be a valid pointer to a `BefpProfile*` slot.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_equilibrium(
    beta: f64,
    r_max: f64,
    intervals: usize,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let grid = RadialGrid::uniform(r_max, intervals)?;
        let eq = equilibria::EquilibriumParams::from_beta(beta)?;
        unsafe { write_out(out, BefpProfile(eq.profile(&grid))) }
    })
}

/// Point mass at the origin; `kind` 0 = BEFP side, 1 = FP side.
///
/// # Safety
/// `out` must be a valid pointer to a `BefpProfile*` slot.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_dirac(
    kind: i32,
    mass: f64,
    r_max: f64,
    intervals: usize,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let grid = RadialGrid::uniform(r_max, intervals)?;
        let p = RadialProfile::dirac(grid, kind_from_int(kind)?, mass)?;
        unsafe { write_out(out, BefpProfile(p)) }
    })
}

/// Radial Gaussian bump (BEFP side) normalised to `mass`.
///
/// # Safety
/// `out` must be a valid pointer to a `BefpProfile*` slot.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_gaussian_bump(
    center: f64,
    width: f64,
    mass: f64,
    r_max: f64,
    intervals: usize,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let grid = RadialGrid::uniform(r_max, intervals)?;
        let ic = RadialInitialCondition::GaussianBump { center, width, mass };
        unsafe { write_out(out, BefpProfile(ic.profile(&grid)?)) }
    })
}

/// Profile from caller-provided nodes (strictly increasing, starting at 0)
/// and values (`r·density`, non-negative).
///
/// # Safety
/// `nodes` and `values` must point to `len` readable doubles; `out` must be
/// a valid pointer to a `BefpProfile*` slot.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_from_values(
    kind: i32,
    nodes: *const f64,
    values: *const f64,
    len: usize,
    atom: f64,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        if nodes.is_null() || values.is_null() {
            return Err(null_ptr_error("nodes/values"));
        }
        let nodes = unsafe { std::slice::from_raw_parts(nodes, len) }.to_vec();
        let values = unsafe { std::slice::from_raw_parts(values, len) }.to_vec();
        let grid = RadialGrid::new(nodes)?;
        let p = RadialProfile::new(grid, kind_from_int(kind)?, values, atom)?;
        unsafe { write_out(out, BefpProfile(p)) }
    })
}

/// # Safety
/// `path` must be a valid NUL-terminated string; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_read_csv(
    path: *const c_char,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let path = unsafe { cstr(path, "path") }?;
        unsafe { write_out(out, BefpProfile(RadialProfile::read_csv(path)?)) }
    })
}

/// # Safety
/// `profile` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_write_csv(
    profile: *const BefpProfile,
    path: *const c_char,
) -> BefpStatus {
    fallible(|| {
        let p = unsafe { profile_ref(profile) }?;
        let path = unsafe { cstr(path, "path") }?;
        p.write_csv(path)
    })
}

/// # Safety
/// `profile` must be a handle obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_free(profile: *mut BefpProfile) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Number of grid nodes, or 0 for a null handle.
///
/// # Safety
/// `profile` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_len(profile: *const BefpProfile) -> usize {
    if profile.is_null() {
        0
    } else {
        unsafe { &(*profile).0 }.len()
    }
}

/// Profile kind: 0 = BEFP side, 1 = FP side, -1 for a null handle.
///
/// # Safety
/// `profile` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_kind(profile: *const BefpProfile) -> i32 {
    if profile.is_null() {
        return -1;
    }
    match unsafe { &(*profile).0 }.kind() {
        ProfileKind::Befp => 0,
        ProfileKind::Fp => 1,
    }
}

/// Origin point mass divided by 2π (NaN for a null handle).
///
/// # Safety
/// `profile` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_atom(profile: *const BefpProfile) -> f64 {
    if profile.is_null() {
        f64::NAN
    } else {
        unsafe { &(*profile).0 }.atom()
    }
}

/// Total 2D mass by quadrature (NaN for a null handle).
///
/// # Safety
/// `profile` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_mass(profile: *const BefpProfile) -> f64 {
    if profile.is_null() {
        f64::NAN
    } else {
        unsafe { &(*profile).0 }.mass()
    }
}

/// Copy the grid nodes into `buf` (must hold `befp_profile_len` doubles).
///
/// # Safety
/// `profile` live handle; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_copy_nodes(
    profile: *const BefpProfile,
    buf: *mut f64,
    len: usize,
) -> BefpStatus {
    fallible(|| {
        let p = unsafe { profile_ref(profile) }?;
        if buf.is_null() {
            return Err(null_ptr_error("buf"));
        }
        if len != p.len() {
            return Err(Error::InvalidParameter {
                name: "len",
                message: format!("buffer holds {len}, profile has {}", p.len()),
            });
        }
        unsafe { std::slice::from_raw_parts_mut(buf, len) }.copy_from_slice(p.grid().nodes());
        Ok(())
    })
}

/// Copy the profile values (`r·density`) into `buf`.
///
/// # Safety
/// `profile` live handle; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_copy_values(
    profile: *const BefpProfile,
    buf: *mut f64,
    len: usize,
) -> BefpStatus {
    fallible(|| {
        let p = unsafe { profile_ref(profile) }?;
        if buf.is_null() {
            return Err(null_ptr_error("buf"));
        }
        if len != p.len() {
            return Err(Error::InvalidParameter {
                name: "len",
                message: format!("buffer holds {len}, profile has {}", p.len()),
            });
        }
        unsafe { std::slice::from_raw_parts_mut(buf, len) }.copy_from_slice(p.values());
        Ok(())
    })
}

/// L¹(R²) distance between two profiles on the same grid.
///
/// # Safety
/// Both handles live; `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_profile_l1_distance(
    a: *const BefpProfile,
    b: *const BefpProfile,
    out: *mut f64,
) -> BefpStatus {
    fallible(|| {
        let a = unsafe { profile_ref(a) }?;
        let b = unsafe { profile_ref(b) }?;
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = a.l1_distance(b)? };
        Ok(())
    })
}

// ── transform ────────────────────────────────────────────────────────

/// Λ: FP-side profile to BEFP side.
///
/// # Safety
/// `g` live handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn befp_lambda_forward(
    g: *const BefpProfile,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let g = unsafe { profile_ref(g) }?;
        unsafe { write_out(out, BefpProfile(transform::lambda_forward(g)?)) }
    })
}

/// Λ⁻¹: BEFP-side profile to FP side.
///
/// # Safety
/// `f` live handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn befp_lambda_inverse(
    f: *const BefpProfile,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let f = unsafe { profile_ref(f) }?;
        unsafe { write_out(out, BefpProfile(transform::lambda_inverse(f)?)) }
    })
}

/// `m = 2π log(1 + M/2π)`.
#[no_mangle]
pub extern "C" fn befp_mass_f_from_fp(fp_mass: f64) -> f64 {
    transform::mass_f_from_fp(fp_mass)
}

/// `M = 2π (e^{m/2π} − 1)`.
#[no_mangle]
pub extern "C" fn befp_mass_fp_from_f(befp_mass: f64) -> f64 {
    transform::mass_fp_from_f(befp_mass)
}

/// L¹ Lipschitz factor `1 + M₂/2π` of Λ.
#[no_mangle]
pub extern "C" fn befp_lipschitz_bound(fp_mass_1: f64, fp_mass_2: f64) -> f64 {
    transform::lipschitz_bound(fp_mass_1, fp_mass_2)
}

// ── closed forms ─────────────────────────────────────────────────────

/// `f_∞^β(r) = 1/(β e^{r²/2} − 1)`; requires β > 1.
///
/// # Safety
/// `out` must be a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_bose_einstein(beta: f64, r: f64, out: *mut f64) -> BefpStatus {
    fallible(|| {
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = equilibria::bose_einstein(beta, r)? };
        Ok(())
    })
}

/// β with `mass(f_∞^β) = m`.
///
/// # Safety
/// `out` must be a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_beta_from_mass(mass: f64, out: *mut f64) -> BefpStatus {
    fallible(|| {
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = equilibria::beta_from_mass(mass)? };
        Ok(())
    })
}

/// The Dirac-start solution `ϑ(t)⁻¹[(2π+1)e^{r²/2ϑ(t)} − 1]⁻¹`, t > 0.
///
/// # Safety
/// `out` must be a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_fundamental_solution(t: f64, r: f64, out: *mut f64) -> BefpStatus {
    fallible(|| {
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = equilibria::befp_fundamental(t, r)? };
        Ok(())
    })
}

/// Mass of the Dirac-start solution, `2π log(1 + 1/2π)`.
#[no_mangle]
pub extern "C" fn befp_fundamental_mass() -> f64 {
    equilibria::fundamental_mass()
}

/// Explicit infinite-mass solution `2(2A⁻¹e^{−2t} + r²)⁻¹`.
///
/// # Safety
/// `out` must be a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_infinite_mass_solution(
    t: f64,
    r: f64,
    a: f64,
    out: *mut f64,
) -> BefpStatus {
    fallible(|| {
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = equilibria::befp_infinite_mass(t, r, a)? };
        Ok(())
    })
}

// ── diagnostics ──────────────────────────────────────────────────────

/// Entropy `H(f)` of a profile.
///
/// # Safety
/// `profile` live handle; `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_entropy(profile: *const BefpProfile, out: *mut f64) -> BefpStatus {
    fallible(|| {
        let p = unsafe { profile_ref(profile) }?;
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = diagnostics::entropy(p)? };
        Ok(())
    })
}

/// Entropy dissipation `D(f)`.
///
/// # Safety
/// `profile` live handle; `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_dissipation(
    profile: *const BefpProfile,
    out: *mut f64,
) -> BefpStatus {
    fallible(|| {
        let p = unsafe { profile_ref(profile) }?;
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = diagnostics::dissipation(p)? };
        Ok(())
    })
}

/// Weighted norm `‖(1+r^ℓ)f‖_p`; pass `INFINITY` for the sup norm.
///
/// # Safety
/// `profile` live handle; `out` a valid double slot.
#[no_mangle]
pub unsafe extern "C" fn befp_lp_ell_norm(
    profile: *const BefpProfile,
    p: f64,
    ell: f64,
    out: *mut f64,
) -> BefpStatus {
    fallible(|| {
        let profile = unsafe { profile_ref(profile) }?;
        if out.is_null() {
            return Err(null_ptr_error("out"));
        }
        unsafe { *out = diagnostics::lp_ell_norm(profile, p, ell)? };
        Ok(())
    })
}

// ── propagation and the exact radial solver ──────────────────────────

/// Exact linear-FP propagation of an FP-side profile to time t.
///
/// # Safety
/// `g` live handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn befp_fp_propagate(
    g: *const BefpProfile,
    t: f64,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        let g = unsafe { profile_ref(g) }?;
        unsafe { write_out(out, BefpProfile(fp_exact::fp_propagate_radial(g, t)?)) }
    })
}

/// Exact BEFP pipeline from a BEFP-side initial profile: snapshots at the
/// given strictly increasing positive times.
///
/// # Safety
/// `f0` live handle; `times` readable for `n_times` doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn befp_solve_radial_exact(
    f0: *const BefpProfile,
    times: *const f64,
    n_times: usize,
    out: *mut *mut BefpTrajectory,
) -> BefpStatus {
    fallible(|| {
        let f0 = unsafe { profile_ref(f0) }?;
        if times.is_null() {
            return Err(null_ptr_error("times"));
        }
        let times = unsafe { std::slice::from_raw_parts(times, n_times) };
        let ic = RadialInitialCondition::Tabulated(f0.clone());
        let traj = radial_solver::solve_radial_exact(&ic, f0.grid(), times)?;
        unsafe { write_out(out, BefpTrajectory(traj)) }
    })
}

/// # Safety
/// `traj` must be a handle obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn befp_trajectory_free(traj: *mut BefpTrajectory) {
    if !traj.is_null() {
        drop(unsafe { Box::from_raw(traj) });
    }
}

/// Number of snapshots (0 for a null handle).
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn befp_trajectory_len(traj: *const BefpTrajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        unsafe { &(*traj).0 }.len()
    }
}

/// Snapshot time at index `i` (NaN when out of range).
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn befp_trajectory_time(traj: *const BefpTrajectory, i: usize) -> f64 {
    if traj.is_null() {
        return f64::NAN;
    }
    let t = unsafe { &(*traj).0 };
    t.times().get(i).copied().unwrap_or(f64::NAN)
}

/// Clone snapshot `i` into a fresh profile handle.
///
/// # Safety
/// `traj` live handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn befp_trajectory_snapshot(
    traj: *const BefpTrajectory,
    i: usize,
    out: *mut *mut BefpProfile,
) -> BefpStatus {
    fallible(|| {
        if traj.is_null() {
            return Err(null_ptr_error("traj"));
        }
        let t = unsafe { &(*traj).0 };
        let snap = t.snapshots().get(i).ok_or_else(|| Error::InvalidParameter {
            name: "i",
            message: format!("index {i} out of range ({} snapshots)", t.len()),
        })?;
        unsafe { write_out(out, BefpProfile(snap.clone())) }
    })
}

/// Per-snapshot diagnostics; any of the destination pointers may be null.
///
/// # Safety
/// `traj` live handle; non-null destinations must be valid double slots.
#[no_mangle]
pub unsafe extern "C" fn befp_trajectory_diagnostics(
    traj: *const BefpTrajectory,
    i: usize,
    mass: *mut f64,
    entropy: *mut f64,
    l1_to_equilibrium: *mut f64,
    sup_norm: *mut f64,
) -> BefpStatus {
    fallible(|| {
        if traj.is_null() {
            return Err(null_ptr_error("traj"));
        }
        let t = unsafe { &(*traj).0 };
        let d = t.diagnostics().get(i).ok_or_else(|| Error::InvalidParameter {
            name: "i",
            message: format!("index {i} out of range ({} snapshots)", t.len()),
        })?;
        unsafe {
            if !mass.is_null() {
                *mass = d.mass;
            }
            if !entropy.is_null() {
                *entropy = d.entropy;
            }
            if !l1_to_equilibrium.is_null() {
                *l1_to_equilibrium = d.l1_to_equilibrium;
            }
            if !sup_norm.is_null() {
                *sup_norm = d.sup_norm;
            }
        }
        Ok(())
    })
}

/// Write a trajectory as `(t, r, value)` CSV.
///
/// # Safety
/// `traj` live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn befp_trajectory_write_csv(
    traj: *const BefpTrajectory,
    path: *const c_char,
) -> BefpStatus {
    fallible(|| {
        if traj.is_null() {
            return Err(null_ptr_error("traj"));
        }
        let path = unsafe { cstr(path, "path") }?;
        unsafe { &(*traj).0 }.write_csv(path)
    })
}
