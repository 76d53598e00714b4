//! Exercise the C ABI through the exported extern "C" functions.

use befp_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(befp_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn equilibrium_profile_lifecycle() {
    unsafe {
        let mut p: *mut BefpProfile = ptr::null_mut();
        let status = befp_profile_equilibrium(2.0, 8.0, 2000, &mut p);
        assert_eq!(status, BefpStatus::BefpOk);
        assert!(!p.is_null());
        assert_eq!(befp_profile_len(p), 2001);
        assert_eq!(befp_profile_kind(p), 0);
        assert_eq!(befp_profile_atom(p), 0.0);
        // mass of f_inf^2 is 2π log 2
        let mass = befp_profile_mass(p);
        assert!((mass - 4.355_172_180_607_204).abs() < 1e-5, "mass {mass}");

        let mut nodes = vec![0.0; 2001];
        let mut values = vec![0.0; 2001];
        assert_eq!(befp_profile_copy_nodes(p, nodes.as_mut_ptr(), 2001), BefpStatus::BefpOk);
        assert_eq!(befp_profile_copy_values(p, values.as_mut_ptr(), 2001), BefpStatus::BefpOk);
        assert_eq!(nodes[0], 0.0);
        assert_eq!(nodes[2000], 8.0);
        // φ(r) = r f(r) with f(0) = 1 at β = 2
        assert!((values[1] / nodes[1] - 1.0).abs() < 1e-3);
        // wrong buffer length is rejected
        assert_eq!(
            befp_profile_copy_values(p, values.as_mut_ptr(), 5),
            BefpStatus::BefpErrInvalidArgument
        );
        befp_profile_free(p);
    }
}

#[test]
fn invalid_beta_sets_error_message() {
    unsafe {
        let mut p: *mut BefpProfile = ptr::null_mut();
        let status = befp_profile_equilibrium(0.5, 8.0, 100, &mut p);
        assert_eq!(status, BefpStatus::BefpErrInvalidArgument);
        assert!(p.is_null());
        let msg = last_error();
        assert!(msg.contains("beta"), "message: {msg}");
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(
            befp_lambda_forward(ptr::null(), ptr::null_mut()),
            BefpStatus::BefpErrInvalidArgument
        );
        let mut out = 0.0f64;
        assert_eq!(befp_entropy(ptr::null(), &mut out), BefpStatus::BefpErrInvalidArgument);
        assert!(last_error().contains("null"));
        assert_eq!(befp_profile_len(ptr::null()), 0);
        assert!(befp_profile_mass(ptr::null()).is_nan());
        befp_profile_free(ptr::null_mut()); // no-op
        befp_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn transform_round_trip_through_the_abi() {
    unsafe {
        // FP-side Dirac of unit mass -> Λ -> BEFP side with the closed-form mass
        let mut dirac: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_profile_dirac(1, 1.0, 8.0, 1000, &mut dirac), BefpStatus::BefpOk);
        let mut f: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_lambda_forward(dirac, &mut f), BefpStatus::BefpOk);
        assert_eq!(befp_profile_kind(f), 0);
        let m = befp_profile_mass(f);
        assert!((m - befp_fundamental_mass()).abs() < 1e-12, "mass {m}");

        let mut back: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_lambda_inverse(f, &mut back), BefpStatus::BefpOk);
        let atom = befp_profile_atom(back);
        assert!((atom - befp_profile_atom(dirac)).abs() < 1e-15);

        // the scalar mass relations agree with the profile-level ones
        assert!((befp_mass_f_from_fp(1.0) - m).abs() < 1e-12);
        assert!((befp_mass_fp_from_f(m) - 1.0).abs() < 1e-12);
        assert!((befp_lipschitz_bound(0.0, 2.0 * std::f64::consts::PI) - 2.0).abs() < 1e-15);

        befp_profile_free(dirac);
        befp_profile_free(f);
        befp_profile_free(back);
    }
}

#[test]
fn scalar_closed_forms() {
    unsafe {
        let mut v = 0.0f64;
        assert_eq!(befp_bose_einstein(2.0, 0.0, &mut v), BefpStatus::BefpOk);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(befp_beta_from_mass(2.0 * std::f64::consts::PI, &mut v), BefpStatus::BefpOk);
        assert!((v - 1.581_976_706_869_326_4).abs() < 1e-12);
        assert_eq!(befp_fundamental_solution(1.0, 0.0, &mut v), BefpStatus::BefpOk);
        assert!((v - 0.184_065_499_616_596).abs() < 1e-12);
        assert_eq!(
            befp_fundamental_solution(-1.0, 0.0, &mut v),
            BefpStatus::BefpErrInvalidArgument
        );
        assert_eq!(befp_infinite_mass_solution(0.0, 0.0, 2.0, &mut v), BefpStatus::BefpOk);
        assert!((v - 2.0).abs() < 1e-15);
    }
}

#[test]
fn exact_solver_and_trajectory_access() {
    unsafe {
        let mut f0: *mut BefpProfile = ptr::null_mut();
        assert_eq!(
            befp_profile_gaussian_bump(1.5, 0.5, 1.0, 8.0, 1500, &mut f0),
            BefpStatus::BefpOk
        );
        let times = [0.5, 1.0, 2.0];
        let mut traj: *mut BefpTrajectory = ptr::null_mut();
        assert_eq!(
            befp_solve_radial_exact(f0, times.as_ptr(), times.len(), &mut traj),
            BefpStatus::BefpOk
        );
        assert_eq!(befp_trajectory_len(traj), 3);
        assert_eq!(befp_trajectory_time(traj, 1), 1.0);
        assert!(befp_trajectory_time(traj, 9).is_nan());

        let mut mass = 0.0;
        let mut entropy = 0.0;
        let mut l1 = 0.0;
        let mut sup = 0.0;
        for i in 0..3 {
            assert_eq!(
                befp_trajectory_diagnostics(traj, i, &mut mass, &mut entropy, &mut l1, &mut sup),
                BefpStatus::BefpOk
            );
            assert!((mass - 1.0).abs() < 1e-5, "mass {mass}");
            assert!(sup > 0.0);
        }
        // distances to equilibrium shrink
        let mut d_first = 0.0;
        let mut d_last = 0.0;
        befp_trajectory_diagnostics(traj, 0, ptr::null_mut(), ptr::null_mut(), &mut d_first, ptr::null_mut());
        befp_trajectory_diagnostics(traj, 2, ptr::null_mut(), ptr::null_mut(), &mut d_last, ptr::null_mut());
        assert!(d_last < d_first, "{d_last} vs {d_first}");

        let mut snap: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_trajectory_snapshot(traj, 2, &mut snap), BefpStatus::BefpOk);
        let mut h_direct = 0.0;
        assert_eq!(befp_entropy(snap, &mut h_direct), BefpStatus::BefpOk);
        assert!((h_direct - entropy).abs() < 1e-12);
        let mut d = 0.0;
        assert_eq!(befp_dissipation(snap, &mut d), BefpStatus::BefpOk);
        assert!(d >= 0.0);
        let mut sup_norm = 0.0;
        assert_eq!(befp_lp_ell_norm(snap, f64::INFINITY, 0.0, &mut sup_norm), BefpStatus::BefpOk);
        assert!((sup_norm - sup).abs() < 1e-12);

        assert_eq!(
            befp_trajectory_snapshot(traj, 7, &mut snap),
            BefpStatus::BefpErrInvalidArgument
        );

        befp_profile_free(snap);
        befp_profile_free(f0);
        befp_trajectory_free(traj);
    }
}

#[test]
fn fp_propagation_preserves_mass_through_abi() {
    unsafe {
        let mut g0: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_profile_dirac(1, 0.5, 8.0, 2000, &mut g0), BefpStatus::BefpOk);
        let mut g1: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_fp_propagate(g0, 1.0, &mut g1), BefpStatus::BefpOk);
        assert_eq!(befp_profile_kind(g1), 1);
        assert_eq!(befp_profile_atom(g1), 0.0);
        assert!((befp_profile_mass(g1) - 0.5).abs() < 1e-6);
        assert_eq!(befp_fp_propagate(g0, -1.0, &mut g1), BefpStatus::BefpErrInvalidArgument);
        befp_profile_free(g0);
        befp_profile_free(g1);
    }
}

#[test]
fn csv_round_trip_through_abi() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut p: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_profile_equilibrium(3.0, 6.0, 500, &mut p), BefpStatus::BefpOk);
        assert_eq!(befp_profile_write_csv(p, cpath.as_ptr()), BefpStatus::BefpOk);
        let mut q: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_profile_read_csv(cpath.as_ptr(), &mut q), BefpStatus::BefpOk);
        assert_eq!(befp_profile_len(q), befp_profile_len(p));
        let mut dist = -1.0;
        assert_eq!(befp_profile_l1_distance(p, q, &mut dist), BefpStatus::BefpOk);
        assert_eq!(dist, 0.0);
        befp_profile_free(p);
        befp_profile_free(q);

        // io errors surface as BEFP_ERR_IO
        let missing = CString::new("/nonexistent/nowhere.csv").unwrap();
        let mut r: *mut BefpProfile = ptr::null_mut();
        assert_eq!(befp_profile_read_csv(missing.as_ptr(), &mut r), BefpStatus::BefpErrIo);
    }
}

#[test]
fn from_values_validates_input() {
    unsafe {
        let nodes = [0.0, 0.5, 1.0, 1.5];
        let values = [0.0, 0.2, 0.3, 0.1];
        let mut p: *mut BefpProfile = ptr::null_mut();
        assert_eq!(
            befp_profile_from_values(1, nodes.as_ptr(), values.as_ptr(), 4, 0.0, &mut p),
            BefpStatus::BefpOk
        );
        befp_profile_free(p);
        // bad kind tag
        assert_eq!(
            befp_profile_from_values(7, nodes.as_ptr(), values.as_ptr(), 4, 0.0, &mut p),
            BefpStatus::BefpErrInvalidArgument
        );
        // negative value
        let bad = [0.0, -0.2, 0.3, 0.1];
        assert_eq!(
            befp_profile_from_values(1, nodes.as_ptr(), bad.as_ptr(), 4, 0.0, &mut p),
            BefpStatus::BefpErrInvalidArgument
        );
        // decreasing nodes
        let bad_nodes = [0.0, 1.0, 0.5, 1.5];
        assert_eq!(
            befp_profile_from_values(1, bad_nodes.as_ptr(), values.as_ptr(), 4, 0.0, &mut p),
            BefpStatus::BefpErrInvalidArgument
        );
    }
}

#[test]
fn generated_header_contains_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/befp.h");
    let text = std::fs::read_to_string(&header).expect("header generated at build time");
    for symbol in [
        "BefpStatus",
        "BEFP_OK",
        "BEFP_ERR_NUMERICAL",
        "typedef struct BefpProfile BefpProfile",
        "typedef struct BefpTrajectory BefpTrajectory",
        "befp_last_error_message",
        "befp_profile_equilibrium",
        "befp_lambda_forward",
        "befp_lambda_inverse",
        "befp_solve_radial_exact",
        "befp_trajectory_diagnostics",
        "befp_fundamental_solution",
        "befp_entropy",
    ] {
        assert!(text.contains(symbol), "header lacks `{symbol}`");
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/befp.h");
    let compiler = ["cc", "clang", "gcc"]
        .iter()
        .find(|c| {
            std::process::Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .copied()
        .expect("a C compiler is required for the header syntax check");
    let out = std::process::Command::new(compiler)
        .args(["-std=c99", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
        .expect("compiler runs");
    assert!(
        out.status.success(),
        "header does not compile:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
