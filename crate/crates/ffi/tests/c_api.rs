use std::ffi::CStr;
use std::ptr;

use gup_ffi::*;
use gup_mechanics::algebra::{momentum_map_1d, DeformationParameters};
use gup_mechanics::constants::{ConstantsReport, CODATA_2018};

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { gup_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

fn model(
    kind: GupModelKind,
    beta: f64,
    scale: f64,
    potential: GupPotentialKind,
    k: f64,
) -> *mut GupModel {
    let mut m = ptr::null_mut();
    assert_eq!(
        gup_model_new(kind, beta, 1.0, scale, potential, k, &mut m),
        GupStatus::Ok
    );
    assert!(!m.is_null());
    m
}

#[test]
fn momentum_map_matches_core() {
    let mut big_p = 0.0;
    assert_eq!(
        gup_momentum_map_1d(1.0, 0.01, 1.0, &mut big_p),
        GupStatus::Ok
    );
    let params = DeformationParameters::new(0.01, 1.0).unwrap();
    assert_eq!(big_p, momentum_map_1d(1.0, &params).unwrap());

    let mut back = 0.0;
    assert_eq!(
        gup_canonical_momentum_1d(big_p, 0.01, 1.0, &mut back),
        GupStatus::Ok
    );
    assert!((back - 1.0).abs() < 1e-14);
}

#[test]
fn momentum_map_3d_round_trip() {
    let p = [0.3, -0.2, 0.5];
    let mut big_p = [0.0; 3];
    let mut back = [0.0; 3];
    assert_eq!(
        gup_momentum_map_3d(p.as_ptr(), 0.5, 1.0, big_p.as_mut_ptr()),
        GupStatus::Ok
    );
    assert_eq!(
        gup_canonical_momentum_3d(big_p.as_ptr(), 0.5, 1.0, back.as_mut_ptr()),
        GupStatus::Ok
    );
    for (a, b) in p.iter().zip(back) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn domain_error_sets_message() {
    let p = [0.6, 0.8, 0.0];
    let mut big_p = [0.0; 3];
    let status = gup_momentum_map_3d(p.as_ptr(), 1.0, 1.0, big_p.as_mut_ptr());
    assert_eq!(status, GupStatus::Domain);
    assert!(!last_error().is_empty());
}

#[test]
fn null_out_pointer_is_reported() {
    assert_eq!(
        gup_momentum_map_1d(1.0, 0.01, 1.0, ptr::null_mut()),
        GupStatus::NullPointer
    );
    assert!(last_error().contains("deformed"));
}

#[test]
fn invalid_parameters_rejected() {
    let mut v = 0.0;
    assert_eq!(
        gup_bracket_xp_1d(1.0, -1.0, 1.0, &mut v),
        GupStatus::InvalidArgument
    );
    let mut m = ptr::null_mut();
    let status = gup_model_new(
        GupModelKind::NonRelExact1D,
        0.01,
        -1.0,
        0.0,
        GupPotentialKind::Free,
        0.0,
        &mut m,
    );
    assert_eq!(status, GupStatus::InvalidArgument);
    assert!(m.is_null());
}

#[test]
fn brackets() {
    let mut v = 0.0;
    assert_eq!(gup_bracket_xp_1d(2.0, 0.25, 1.0, &mut v), GupStatus::Ok);
    assert_eq!(v, 2.0);
    let big_p = [0.0, 0.0, 0.0];
    assert_eq!(
        gup_bracket_xp_3d(big_p.as_ptr(), 1, 1, 0.25, 1.0, &mut v),
        GupStatus::Ok
    );
    assert_eq!(v, 1.0);
    assert_eq!(
        gup_bracket_xp_3d(big_p.as_ptr(), 1, 2, 0.25, 1.0, &mut v),
        GupStatus::Ok
    );
    assert_eq!(v, 0.0);
    assert_eq!(
        gup_bracket_xp_3d(big_p.as_ptr(), 4, 1, 0.25, 1.0, &mut v),
        GupStatus::InvalidArgument
    );
}

#[test]
fn model_energy_velocity_inversion() {
    let m = model(
        GupModelKind::NonRelExact1D,
        0.01,
        0.0,
        GupPotentialKind::Free,
        0.0,
    );
    assert_eq!(unsafe { gup_model_dimension(m) }, 1);
    let (x, p) = ([0.0], [1.0]);
    let mut e = 0.0;
    assert_eq!(
        gup_model_energy(m, x.as_ptr(), p.as_ptr(), 1, &mut e),
        GupStatus::Ok
    );
    assert!((e - 0.5033523211247444).abs() < 1e-12);

    let mut v = [0.0];
    assert_eq!(
        gup_model_velocity(m, p.as_ptr(), 1, v.as_mut_ptr()),
        GupStatus::Ok
    );
    let mut back = [0.0];
    assert_eq!(
        gup_model_momentum_from_velocity(m, v.as_ptr(), 1, back.as_mut_ptr()),
        GupStatus::Ok
    );
    assert!((back[0] - 1.0).abs() < 1e-10);

    assert_eq!(
        gup_model_energy(m, x.as_ptr(), p.as_ptr(), 2, &mut e),
        GupStatus::InvalidArgument
    );
    unsafe { gup_model_free(m) };
}

#[test]
fn harmonic_integration_through_handles() {
    let m = model(
        GupModelKind::NonRelFirstOrder1D,
        0.0,
        0.0,
        GupPotentialKind::Harmonic,
        1.0,
    );
    let (x, p) = ([1.0], [0.0]);
    let mut traj = ptr::null_mut();
    let status = gup_integrate(
        m,
        x.as_ptr(),
        p.as_ptr(),
        1,
        std::f64::consts::TAU,
        1e-3,
        &mut traj,
    );
    assert_eq!(status, GupStatus::Ok);
    let len = unsafe { gup_trajectory_len(traj) };
    assert!(len > 6000);
    assert_eq!(unsafe { gup_trajectory_dimension(traj) }, 1);

    let (mut t, mut xs, mut ps, mut e) = (0.0, [0.0], [0.0], 0.0);
    let status = gup_trajectory_sample(
        traj,
        len - 1,
        &mut t,
        xs.as_mut_ptr(),
        ps.as_mut_ptr(),
        &mut e,
    );
    assert_eq!(status, GupStatus::Ok);
    assert!((t - std::f64::consts::TAU).abs() < 1e-9);
    assert!((xs[0] - 1.0).abs() < 1e-8);

    let mut drift = 1.0;
    assert_eq!(gup_trajectory_energy_drift(traj, &mut drift), GupStatus::Ok);
    assert!(drift < 1e-8);

    let status = gup_trajectory_sample(traj, len, &mut t, xs.as_mut_ptr(), ps.as_mut_ptr(), &mut e);
    assert_eq!(status, GupStatus::InvalidArgument);
    unsafe {
        gup_trajectory_free(traj);
        gup_model_free(m);
    }
}

#[test]
fn integration_domain_exit() {
    let m = model(
        GupModelKind::NonRel3DExact,
        1.0,
        0.0,
        GupPotentialKind::UniformField,
        1.0,
    );
    let (x, p) = ([0.0; 3], [0.5, 0.0, 0.0]);
    let mut traj = ptr::null_mut();
    let status = gup_integrate(m, x.as_ptr(), p.as_ptr(), 3, 10.0, 1e-2, &mut traj);
    assert_eq!(status, GupStatus::IntegrationDomainExit);
    assert!(traj.is_null());
    unsafe { gup_model_free(m) };
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        gup_model_free(ptr::null_mut());
        gup_trajectory_free(ptr::null_mut());
        assert_eq!(gup_trajectory_len(ptr::null()), 0);
    }
}

#[test]
fn frames() {
    let (mut t, mut x) = (0.0, 0.0);
    let status = gup_galilean_apply(GupGalileanLaw::Exact, 1.0, 1.0, 0.0, 1.0, &mut t, &mut x);
    assert_eq!(status, GupStatus::Ok);
    assert!((t + 0.5f64.sqrt()).abs() < 1e-15 && (x - 0.5f64.sqrt()).abs() < 1e-15);

    assert_eq!(
        gup_lorentz_apply(0.5, 1.0, 1.0, 0.0, &mut t, &mut x),
        GupStatus::Ok
    );
    assert!(t > 1.0 && x > 0.0);
    assert_eq!(
        gup_lorentz_apply(1.5, 1.0, 1.0, 0.0, &mut t, &mut x),
        GupStatus::Superluminal
    );

    let mut v = 0.0;
    assert_eq!(gup_galilean_compose(0.3, 0.4, 1.0, &mut v), GupStatus::Ok);
    assert!((v - 0.7 / (1.0 - 0.12)).abs() < 1e-14);
    assert_eq!(
        gup_galilean_compose(2.0, 2.0, 1.0, &mut v),
        GupStatus::Singular
    );

    assert_eq!(
        gup_velocity_compose(GupGalileanLaw::Ordinary, 0.3, 0.4, 1.0, &mut v),
        GupStatus::Ok
    );
    assert!((v - 0.7).abs() < 1e-15);
}

#[test]
fn constants_match_core() {
    let mut r = GupConstantsReport::default();
    assert_eq!(
        gup_constants_report(CODATA_2018.electron_mass, &mut r),
        GupStatus::Ok
    );
    let core = ConstantsReport::for_mass(CODATA_2018.electron_mass, &CODATA_2018).unwrap();
    assert_eq!(r.gamma, core.gamma);
    assert_eq!(r.u_over_c_3d, core.u_over_c_3d);

    let mut c_eff = 0.0;
    assert_eq!(
        gup_effective_light_speed(0.1, 3, 1.0, &mut c_eff),
        GupStatus::Ok
    );
    assert!(c_eff > 1.0);
    assert_eq!(
        gup_effective_light_speed(0.1, 2, 1.0, &mut c_eff),
        GupStatus::InvalidArgument
    );
}

#[test]
fn errors_are_thread_local() {
    assert_eq!(
        gup_momentum_map_1d(1.0, -1.0, 1.0, ptr::null_mut()),
        GupStatus::InvalidArgument
    );
    let n = std::thread::spawn(|| unsafe { gup_last_error_message(ptr::null_mut(), 0) })
        .join()
        .unwrap();
    assert_eq!(n, 0);
}

#[test]
fn truncated_error_buffer_is_terminated() {
    gup_momentum_map_1d(1.0, 0.01, 1.0, ptr::null_mut());
    let mut buf = [1 as std::ffi::c_char; 4];
    let full = unsafe { gup_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 4);
    assert_eq!(buf[3], 0);
}

#[test]
fn header_is_generated() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gup.h")).unwrap();
    for symbol in [
        "gup_model_new",
        "gup_integrate",
        "GUP_STATUS_DOMAIN",
        "typedef struct GupModel GupModel",
    ] {
        assert!(header.contains(symbol), "{symbol} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/gup.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
