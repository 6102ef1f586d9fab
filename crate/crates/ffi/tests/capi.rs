use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cavitas_ffi::*;

fn last_error() -> String {
    let p = cavitas_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn power_law(gamma: f64) -> *mut CavitasFamily {
    let mut fam = ptr::null_mut();
    let st = unsafe { cavitas_family_power_law(1.0, 1.0, gamma, 1.0, &mut fam) };
    assert_eq!(st, CavitasStatus::Ok);
    assert!(!fam.is_null());
    fam
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(cavitas_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn family_roundtrip_and_p_above_one() {
    let fam = power_law(1.25);
    let mut p = 0.0;
    assert_eq!(
        unsafe { cavitas_family_p_coefficient(fam, 0.5, 2.0, &mut p) },
        CavitasStatus::Ok
    );
    assert!(p > 1.0);
    let mut h = 0.0;
    assert_eq!(
        unsafe { cavitas_family_stress_free_volume(fam, &mut h) },
        CavitasStatus::Ok
    );
    // h'(H) = 1.25 H^0.25 - H^-2 = 0.
    assert!((1.25 * h.powf(0.25) - h.powi(-2)).abs() < 1e-12);
    assert!(cavitas_last_error_message().is_null());
    unsafe { cavitas_family_free(fam) };
}

#[test]
fn rejected_materials_report_status_and_message() {
    let mut fam = ptr::null_mut();
    let st = unsafe { cavitas_family_power_law(1.0, 1.0, 2.5, 1.0, &mut fam) };
    assert_eq!(st, CavitasStatus::InvalidMaterial);
    assert!(fam.is_null());
    assert!(last_error().contains("gamma"));
    let st = unsafe { cavitas_family_linear_log(-1.0, 1.0, 1.0, &mut fam) };
    assert_eq!(st, CavitasStatus::InvalidArgument);
    assert!(last_error().contains("L0"), "{}", last_error());
}

#[test]
fn null_pointers_are_refused() {
    let st = unsafe { cavitas_family_power_law(1.0, 1.0, 1.25, 1.0, ptr::null_mut()) };
    assert_eq!(st, CavitasStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(
        unsafe { cavitas_family_p_coefficient(ptr::null(), 1.0, 1.0, &mut x) },
        CavitasStatus::NullPointer
    );
    assert_eq!(
        unsafe { cavitas_solution_phi0(ptr::null(), &mut x) },
        CavitasStatus::NullPointer
    );
    unsafe {
        cavitas_family_free(ptr::null_mut());
        cavitas_solution_free(ptr::null_mut());
    }
}

#[test]
fn solve_through_handles() {
    let fam = power_law(1.25);
    let mut sol = ptr::null_mut();
    assert_eq!(
        unsafe { cavitas_solve_cavity(fam, 3.0, &mut sol) },
        CavitasStatus::Ok
    );
    let mut j = CavitasJunction::default();
    assert_eq!(
        unsafe { cavitas_solution_junction(sol, &mut j) },
        CavitasStatus::Ok
    );
    assert!(j.lax_ok && j.a_minus < j.lambda && j.sigma > 0.0);
    assert!(j.rh_residual.abs() < 1e-8);
    let mut phi0 = 0.0;
    assert_eq!(
        unsafe { cavitas_solution_phi0(sol, &mut phi0) },
        CavitasStatus::Ok
    );
    let mut pt = CavitasTrajPoint::default();
    assert_eq!(
        unsafe { cavitas_solution_eval(sol, 0.0, &mut pt) },
        CavitasStatus::Ok
    );
    assert_eq!(pt.phi, phi0);
    assert_eq!(
        unsafe { cavitas_solution_eval(sol, 0.5 * j.sigma, &mut pt) },
        CavitasStatus::Ok
    );
    assert!(pt.q < 0.0 && pt.a < pt.b);
    assert_eq!(
        unsafe { cavitas_solution_eval(sol, f64::NAN, &mut pt) },
        CavitasStatus::InvalidArgument
    );
    let mut d = 0.0;
    assert_eq!(
        unsafe { cavitas_solution_energy_delta(sol, 1.0, &mut d) },
        CavitasStatus::Ok
    );
    assert!(d.is_finite());
    unsafe {
        cavitas_solution_free(sol);
        cavitas_family_free(fam);
    }
}

#[test]
fn below_critical_stretch_is_no_solution() {
    let fam = power_law(1.25);
    let mut sol = ptr::null_mut();
    assert_eq!(
        unsafe { cavitas_solve_cavity(fam, 1.0, &mut sol) },
        CavitasStatus::NoSolution
    );
    assert!(sol.is_null());
    assert!(last_error().contains("no cavitating solution"));
    unsafe { cavitas_family_free(fam) };
}

#[test]
fn fracture_fan_closed_forms() {
    let mut fan = CavitasFan::default();
    assert_eq!(
        unsafe { cavitas_fracture_fan(2.0, 1.0, 2.0, 1.0, &mut fan) },
        CavitasStatus::Ok
    );
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((fan.sigma - r).abs() < 1e-12 && (fan.y0 - r).abs() < 1e-12);
    assert!((fan.total_production - 1.333_811_534).abs() < 1e-8);
    assert!(fan.lax_ok);
    assert_eq!(
        unsafe { cavitas_fracture_fan(2.0, 1.0, 1.0, 2.0, &mut fan) },
        CavitasStatus::InvalidArgument
    );
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("cavitas.h")
}

/// The static archive: `cargo test` leaves it in `target/<profile>/deps`
/// beside the test binary, `cargo build` also copies it one level up.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps, deps.parent().unwrap()]
        .iter()
        .map(|d| d.join("libcavitas_ffi.a"))
        .find(|p| p.exists())
        .expect("static library libcavitas_ffi.a not built")
}

#[test]
fn header_is_generated_and_complete() {
    let text = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "CAVITAS_STATUS_NO_SOLUTION",
        "typedef struct CavitasFamily CavitasFamily;",
        "cavitas_solve_cavity(",
        "cavitas_solve_cavity_prescribed(",
        "cavitas_last_error_message(void)",
        "cavitas_fracture_fan(",
    ] {
        assert!(text.contains(sym), "missing {sym}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let lib = static_lib();
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "cavitas.h"
int main(void) {
    CavitasFamily *fam = NULL;
    if (cavitas_family_power_law(1.0, 1.0, 1.25, 1.0, &fam) != CAVITAS_STATUS_OK) return 10;
    CavitasSolution *sol = NULL;
    if (cavitas_solve_cavity(fam, 3.0, &sol) != CAVITAS_STATUS_OK) return 11;
    CavitasJunction j;
    if (cavitas_solution_junction(sol, &j) != CAVITAS_STATUS_OK || !j.lax_ok) return 12;
    CavitasSolution *none = NULL;
    if (cavitas_solve_cavity(fam, 1.0, &none) != CAVITAS_STATUS_NO_SOLUTION) return 13;
    if (cavitas_last_error_message() == NULL) return 14;
    printf("%.12f\n", j.sigma);
    cavitas_solution_free(sol);
    cavitas_family_free(fam);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status
    );
    let sigma: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((sigma - 2.784_034_012).abs() < 1e-8);
}
