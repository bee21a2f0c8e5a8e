//! C ABI for `gup-mechanics`.
//!
//! Every fallible function returns a [`GupStatus`] and writes its results
//! through out-pointers. On failure a human-readable message is kept per
//! thread and can be copied out with [`gup_last_error_message`]. Models and
//! trajectories are opaque handles released with their `_free` functions.
//! Panics never cross the boundary; they are reported as
//! [`GupStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gup_mechanics::algebra::{
    bracket_xp_1d, bracket_xp_3d, canonical_momentum_1d, canonical_momentum_3d, momentum_map_1d,
    momentum_map_3d, CanonicalState, DeformationParameters,
};
use gup_mechanics::constants::{effective_light_speed, ConstantsReport, Geometry, CODATA_2018};
use gup_mechanics::dynamics::{
    energy_drift, integrate, Hamiltonian, HamiltonianKind, Potential, SqrtBranch, Trajectory,
};
use gup_mechanics::frames::{velocity_compose, Event, GalileanBoost, GalileanLaw, LorentzBoost};
use gup_mechanics::legendre::momentum_from_velocity_exact;
use gup_mechanics::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GupStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NonFinite = 4,
    NoRoot = 5,
    NonConvergence = 6,
    Singular = 7,
    Superluminal = 8,
    IntegrationDomainExit = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GupModelKind {
    NonRelExact1D = 0,
    NonRelFirstOrder1D = 1,
    NonRel3DFirstOrder = 2,
    NonRel3DExact = 3,
    RelFirstOrder1D = 4,
    EffectiveSqrtEuclidean = 5,
    EffectiveSqrtRelativistic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GupPotentialKind {
    Free = 0,
    /// `k |x|^2 / 2`; the parameter is the stiffness `k`.
    Harmonic = 1,
    /// `-F x_1`; the parameter is the force `F`.
    UniformField = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GupGalileanLaw {
    Exact = 0,
    FirstOrder = 1,
    Ordinary = 2,
}

/// Closed-form estimates for one mass, in SI units.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GupConstantsReport {
    pub gamma: f64,
    pub c_gamma: f64,
    pub u_over_c_1d: f64,
    pub u_over_c_3d: f64,
    pub c_eff_rel_deviation_1d: f64,
    pub c_eff_rel_deviation_3d: f64,
}

/// Opaque Hamiltonian model.
pub struct GupModel {
    inner: Hamiltonian,
}

/// Opaque integrated trajectory.
pub struct GupTrajectory {
    dimension: usize,
    times: Vec<f64>,
    /// `dimension` positions then `dimension` momenta per sample.
    states: Vec<f64>,
    energies: Vec<f64>,
    drift: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GupStatus {
    match e {
        Error::InvalidParameter(_)
        | Error::IndexOutOfRange(_)
        | Error::DimensionMismatch { .. }
        | Error::DegeneratePath(_)
        | Error::Parse { .. }
        | Error::Validation { .. }
        | Error::Conflict(_)
        | Error::Csv { .. }
        | Error::Io(_) => GupStatus::InvalidArgument,
        Error::Domain(_) => GupStatus::Domain,
        Error::NonFinite(_) => GupStatus::NonFinite,
        Error::NoRoot { .. } => GupStatus::NoRoot,
        Error::NonConvergence { .. } => GupStatus::NonConvergence,
        Error::SingularComposition | Error::SingularVelocity => GupStatus::Singular,
        Error::Superluminal { .. } => GupStatus::Superluminal,
        Error::IntegrationDomainExit { .. } => GupStatus::IntegrationDomainExit,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Outcome) -> GupStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GupStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed for `{name}`"));
            GupStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            let status = status_of(&e);
            set_last_error(e.to_string());
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            GupStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller guarantees `p` is either null or valid for writes.
    unsafe { p.as_mut() }.ok_or(Failure::Null(name))
}

fn input<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees `p` is either null or valid for reads.
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: non-null and, per the caller contract, valid for `len` reads.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a>(p: *mut f64, len: usize, name: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: non-null and, per the caller contract, valid for `len` writes.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn vec3(p: *const f64, name: &'static str) -> Result<[f64; 3], Failure> {
    let s = slice(p, 3, name)?;
    Ok([s[0], s[1], s[2]])
}

fn check_dimension(dimension: usize) -> Result<(), Failure> {
    if dimension == 1 || dimension == 3 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension must be 1 or 3, got {dimension}")).into())
    }
}

fn galilean_law(law: GupGalileanLaw) -> GalileanLaw {
    match law {
        GupGalileanLaw::Exact => GalileanLaw::Exact,
        GupGalileanLaw::FirstOrder => GalileanLaw::FirstOrder,
        GupGalileanLaw::Ordinary => GalileanLaw::Ordinary,
    }
}

/// Copies the calling thread's last error message into `buffer` (NUL
/// terminated, truncated to `capacity`). Returns the full message length
/// including the terminator, or 0 when there is no message.
///
/// # Safety
/// `buffer` must be null or valid for `capacity` byte writes.
#[no_mangle]
pub unsafe extern "C" fn gup_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(message) = slot.as_ref() else {
            return 0;
        };
        let bytes = message.as_bytes_with_nul();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity);
            // SAFETY: `buffer` is valid for `capacity` bytes per the contract.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
                *buffer.add(n - 1) = 0;
            }
        }
        bytes.len()
    })
}

/// `P = tan(sqrt(beta) p) / sqrt(beta)`.
#[no_mangle]
pub extern "C" fn gup_momentum_map_1d(
    p: f64,
    beta: f64,
    mass: f64,
    deformed: *mut f64,
) -> GupStatus {
    guard(|| {
        let params = DeformationParameters::new(beta, mass)?;
        *out(deformed, "deformed")? = momentum_map_1d(p, &params)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn gup_canonical_momentum_1d(
    deformed: f64,
    beta: f64,
    mass: f64,
    p: *mut f64,
) -> GupStatus {
    guard(|| {
        let params = DeformationParameters::new(beta, mass)?;
        *out(p, "p")? = canonical_momentum_1d(deformed, &params);
        Ok(())
    })
}

/// `P_i = p_i / sqrt(1 - beta p^2)`; `p` and `deformed` hold three values.
#[no_mangle]
pub extern "C" fn gup_momentum_map_3d(
    p: *const f64,
    beta: f64,
    mass: f64,
    deformed: *mut f64,
) -> GupStatus {
    guard(|| {
        let params = DeformationParameters::new(beta, mass)?;
        let mapped = momentum_map_3d(vec3(p, "p")?, &params)?;
        slice_mut(deformed, 3, "deformed")?.copy_from_slice(&mapped);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn gup_canonical_momentum_3d(
    deformed: *const f64,
    beta: f64,
    mass: f64,
    p: *mut f64,
) -> GupStatus {
    guard(|| {
        let params = DeformationParameters::new(beta, mass)?;
        let back = canonical_momentum_3d(vec3(deformed, "deformed")?, &params);
        slice_mut(p, 3, "p")?.copy_from_slice(&back);
        Ok(())
    })
}

/// `{X, P} = 1 + beta P^2`.
#[no_mangle]
pub extern "C" fn gup_bracket_xp_1d(
    deformed: f64,
    beta: f64,
    mass: f64,
    value: *mut f64,
) -> GupStatus {
    guard(|| {
        let params = DeformationParameters::new(beta, mass)?;
        *out(value, "value")? = bracket_xp_1d(deformed, &params);
        Ok(())
    })
}

/// `{X_i, P_j}` for 1-based indices `i`, `j`.
#[no_mangle]
pub extern "C" fn gup_bracket_xp_3d(
    deformed: *const f64,
    i: usize,
    j: usize,
    beta: f64,
    mass: f64,
    value: *mut f64,
) -> GupStatus {
    guard(|| {
        let params = DeformationParameters::new(beta, mass)?;
        *out(value, "value")? = bracket_xp_3d(vec3(deformed, "deformed")?, i, j, &params)?;
        Ok(())
    })
}

/// Creates a model. `scale` is the light speed for `RelFirstOrder1D` and the
/// velocity scale for the square-root kinds; it is ignored otherwise.
#[no_mangle]
pub extern "C" fn gup_model_new(
    kind: GupModelKind,
    beta: f64,
    mass: f64,
    scale: f64,
    potential: GupPotentialKind,
    potential_parameter: f64,
    model: *mut *mut GupModel,
) -> GupStatus {
    guard(|| {
        let slot = out(model, "model")?;
        *slot = ptr::null_mut();
        let kind = match kind {
            GupModelKind::NonRelExact1D => HamiltonianKind::NonRelExact1D,
            GupModelKind::NonRelFirstOrder1D => HamiltonianKind::NonRelFirstOrder1D,
            GupModelKind::NonRel3DFirstOrder => HamiltonianKind::NonRel3DFirstOrder,
            GupModelKind::NonRel3DExact => HamiltonianKind::NonRel3DExact,
            GupModelKind::RelFirstOrder1D => HamiltonianKind::RelFirstOrder1D { c: scale },
            GupModelKind::EffectiveSqrtEuclidean => HamiltonianKind::EffectiveSquareRoot {
                scale,
                branch: SqrtBranch::Euclidean,
            },
            GupModelKind::EffectiveSqrtRelativistic => HamiltonianKind::EffectiveSquareRoot {
                scale,
                branch: SqrtBranch::Relativistic,
            },
        };
        let potential = match potential {
            GupPotentialKind::Free => Potential::Free,
            GupPotentialKind::Harmonic => Potential::Harmonic {
                stiffness: potential_parameter,
            },
            GupPotentialKind::UniformField => Potential::UniformField {
                force: potential_parameter,
            },
        };
        let inner = Hamiltonian::new(kind, DeformationParameters::new(beta, mass)?, potential)?;
        *slot = Box::into_raw(Box::new(GupModel { inner }));
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must be null or a handle from `gup_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gup_model_free(model: *mut GupModel) {
    if !model.is_null() {
        // SAFETY: `model` came from `gup_model_new` and is freed once.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Spatial dimension the model requires, or 0 when it accepts 1 and 3.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gup_model_dimension(model: *const GupModel) -> usize {
    // SAFETY: null or a live handle, per the contract.
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.kind.dimension().unwrap_or(0))
}

fn with_state<R>(
    model: &GupModel,
    x: &[f64],
    p: &[f64],
    f1: impl FnOnce(&Hamiltonian, &CanonicalState<1>) -> gup_mechanics::Result<R>,
    f3: impl FnOnce(&Hamiltonian, &CanonicalState<3>) -> gup_mechanics::Result<R>,
) -> gup_mechanics::Result<R> {
    match x.len() {
        1 => f1(&model.inner, &CanonicalState::new([x[0]], [p[0]])),
        _ => f3(
            &model.inner,
            &CanonicalState::new([x[0], x[1], x[2]], [p[0], p[1], p[2]]),
        ),
    }
}

/// Energy at the phase point `(x, p)`, each of length `dimension`.
#[no_mangle]
pub extern "C" fn gup_model_energy(
    model: *const GupModel,
    x: *const f64,
    p: *const f64,
    dimension: usize,
    energy: *mut f64,
) -> GupStatus {
    guard(|| {
        let model = input(model, "model")?;
        check_dimension(dimension)?;
        let (x, p) = (slice(x, dimension, "x")?, slice(p, dimension, "p")?);
        *out(energy, "energy")? = with_state(model, x, p, |h, s| h.energy(s), |h, s| h.energy(s))?;
        Ok(())
    })
}

/// Velocity `dH/dp` for the momentum `p` of length `dimension`.
#[no_mangle]
pub extern "C" fn gup_model_velocity(
    model: *const GupModel,
    p: *const f64,
    dimension: usize,
    velocity: *mut f64,
) -> GupStatus {
    guard(|| {
        let model = input(model, "model")?;
        check_dimension(dimension)?;
        let p = slice(p, dimension, "p")?;
        let target = slice_mut(velocity, dimension, "velocity")?;
        match dimension {
            1 => target.copy_from_slice(&model.inner.velocity(&[p[0]])?),
            _ => target.copy_from_slice(&model.inner.velocity(&[p[0], p[1], p[2]])?),
        }
        Ok(())
    })
}

/// Exact numerical inversion of `v = dH/dp`.
#[no_mangle]
pub extern "C" fn gup_model_momentum_from_velocity(
    model: *const GupModel,
    velocity: *const f64,
    dimension: usize,
    p: *mut f64,
) -> GupStatus {
    guard(|| {
        let model = input(model, "model")?;
        check_dimension(dimension)?;
        let v = slice(velocity, dimension, "velocity")?;
        let target = slice_mut(p, dimension, "p")?;
        match dimension {
            1 => target.copy_from_slice(&momentum_from_velocity_exact(&model.inner, &[v[0]])?),
            _ => target.copy_from_slice(&momentum_from_velocity_exact(
                &model.inner,
                &[v[0], v[1], v[2]],
            )?),
        }
        Ok(())
    })
}

fn flatten<const D: usize>(traj: Trajectory<D>) -> GupTrajectory {
    let drift = energy_drift(&traj);
    let states = traj
        .states
        .iter()
        .flat_map(|s| s.x.iter().chain(s.p.iter()).copied().collect::<Vec<_>>())
        .collect();
    GupTrajectory {
        dimension: D,
        times: traj.times,
        states,
        energies: traj.energies,
        drift,
    }
}

/// Integrates from `(x, p)` at `t = 0` to `t_end` with fixed-step RK4.
#[no_mangle]
pub extern "C" fn gup_integrate(
    model: *const GupModel,
    x: *const f64,
    p: *const f64,
    dimension: usize,
    t_end: f64,
    dt: f64,
    trajectory: *mut *mut GupTrajectory,
) -> GupStatus {
    guard(|| {
        let slot = out(trajectory, "trajectory")?;
        *slot = ptr::null_mut();
        let model = input(model, "model")?;
        check_dimension(dimension)?;
        let (x, p) = (slice(x, dimension, "x")?, slice(p, dimension, "p")?);
        let flat = with_state(
            model,
            x,
            p,
            |h, s| integrate(h, s, t_end, dt).map(flatten),
            |h, s| integrate(h, s, t_end, dt).map(flatten),
        )?;
        *slot = Box::into_raw(Box::new(flat));
        Ok(())
    })
}

/// Releases a trajectory; null is ignored.
///
/// # Safety
/// `trajectory` must be null or a handle from `gup_integrate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gup_trajectory_free(trajectory: *mut GupTrajectory) {
    if !trajectory.is_null() {
        // SAFETY: `trajectory` came from `gup_integrate` and is freed once.
        drop(unsafe { Box::from_raw(trajectory) });
    }
}

/// Number of samples, including the initial state; 0 for null.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gup_trajectory_len(trajectory: *const GupTrajectory) -> usize {
    // SAFETY: null or a live handle, per the contract.
    unsafe { trajectory.as_ref() }.map_or(0, |t| t.times.len())
}

/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gup_trajectory_dimension(trajectory: *const GupTrajectory) -> usize {
    // SAFETY: null or a live handle, per the contract.
    unsafe { trajectory.as_ref() }.map_or(0, |t| t.dimension)
}

/// Largest relative energy change along the trajectory.
#[no_mangle]
pub extern "C" fn gup_trajectory_energy_drift(
    trajectory: *const GupTrajectory,
    drift: *mut f64,
) -> GupStatus {
    guard(|| {
        *out(drift, "drift")? = input(trajectory, "trajectory")?.drift;
        Ok(())
    })
}

/// Copies sample `index`; `x` and `p` receive `dimension` values each.
#[no_mangle]
pub extern "C" fn gup_trajectory_sample(
    trajectory: *const GupTrajectory,
    index: usize,
    t: *mut f64,
    x: *mut f64,
    p: *mut f64,
    energy: *mut f64,
) -> GupStatus {
    guard(|| {
        let traj = input(trajectory, "trajectory")?;
        if index >= traj.times.len() {
            return Err(Error::IndexOutOfRange(index).into());
        }
        let d = traj.dimension;
        let row = &traj.states[2 * d * index..2 * d * (index + 1)];
        *out(t, "t")? = traj.times[index];
        slice_mut(x, d, "x")?.copy_from_slice(&row[..d]);
        slice_mut(p, d, "p")?.copy_from_slice(&row[d..]);
        *out(energy, "energy")? = traj.energies[index];
        Ok(())
    })
}

/// Maps the moving-frame event `(t', x')` to the rest frame.
#[no_mangle]
pub extern "C" fn gup_galilean_apply(
    law: GupGalileanLaw,
    velocity: f64,
    u: f64,
    t_moving: f64,
    x_moving: f64,
    t: *mut f64,
    x: *mut f64,
) -> GupStatus {
    guard(|| {
        let boost = GalileanBoost::new(velocity, u, galilean_law(law))?;
        let e = boost.apply(&Event::new(t_moving, [x_moving]));
        *out(t, "t")? = e.t;
        *out(x, "x")? = e.x[0];
        Ok(())
    })
}

/// Velocity of the exact boost equal to applying `first` then `second`.
#[no_mangle]
pub extern "C" fn gup_galilean_compose(
    second: f64,
    first: f64,
    u: f64,
    velocity: *mut f64,
) -> GupStatus {
    guard(|| {
        let composed =
            GalileanBoost::exact(second, u)?.compose(&GalileanBoost::exact(first, u)?)?;
        *out(velocity, "velocity")? = composed.velocity;
        Ok(())
    })
}

/// Rest-frame velocity of a particle moving with `v_moving` in the boosted frame.
#[no_mangle]
pub extern "C" fn gup_velocity_compose(
    law: GupGalileanLaw,
    v_moving: f64,
    velocity: f64,
    u: f64,
    result: *mut f64,
) -> GupStatus {
    guard(|| {
        let boost = GalileanBoost::new(velocity, u, galilean_law(law))?;
        *out(result, "result")? = velocity_compose(v_moving, &boost)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn gup_lorentz_apply(
    velocity: f64,
    c_eff: f64,
    t_moving: f64,
    x_moving: f64,
    t: *mut f64,
    x: *mut f64,
) -> GupStatus {
    guard(|| {
        let e = LorentzBoost::new(velocity, c_eff)?.apply(&Event::new(t_moving, [x_moving]));
        *out(t, "t")? = e.t;
        *out(x, "x")? = e.x[0];
        Ok(())
    })
}

/// `gamma`, `u/c` and the light-speed deviation for `mass` (kg), using the
/// pinned CODATA 2018 constants.
#[no_mangle]
pub extern "C" fn gup_constants_report(mass: f64, report: *mut GupConstantsReport) -> GupStatus {
    guard(|| {
        let r = ConstantsReport::for_mass(mass, &CODATA_2018)?;
        *out(report, "report")? = GupConstantsReport {
            gamma: r.gamma,
            c_gamma: r.c_gamma,
            u_over_c_1d: r.u_over_c_1d,
            u_over_c_3d: r.u_over_c_3d,
            c_eff_rel_deviation_1d: r.c_eff_rel_deviation_1d,
            c_eff_rel_deviation_3d: r.c_eff_rel_deviation_3d,
        };
        Ok(())
    })
}

/// `c_eff` from `1/c_eff^2 = 1/c^2 - k gamma^2`; `dimension` (1 or 3)
/// selects `k`.
#[no_mangle]
pub extern "C" fn gup_effective_light_speed(
    gamma: f64,
    dimension: usize,
    c: f64,
    c_eff: *mut f64,
) -> GupStatus {
    guard(|| {
        check_dimension(dimension)?;
        let geometry = if dimension == 1 {
            Geometry::OneD
        } else {
            Geometry::ThreeD
        };
        *out(c_eff, "c_eff")? = effective_light_speed(gamma, geometry, c)?;
        Ok(())
    })
}
