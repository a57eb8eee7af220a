use std::ffi::{c_char, CStr, CString};
use std::ptr;

use emtor::graded::{GradedModule, PolynomialRing};
use emtor_ffi::*;
use serde_json::Value;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = emtor_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    emtor_string_free(p);
    s
}

fn trivial_module_json(degrees: Vec<usize>, truncation: usize) -> CString {
    let ring = PolynomialRing::new(degrees).unwrap();
    c(&serde_json::to_string(&GradedModule::trivial(&ring, truncation).to_json()).unwrap())
}

#[test]
fn koszul_tor_of_the_residue_field() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(emtor_module_from_json(trivial_module_json(vec![2, 2], 8).as_ptr(), &mut m), EmtorStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(emtor_koszul_tor(m, 8, &mut t), EmtorStatus::Ok);
        let mut q = 0;
        assert_eq!(emtor_tor_trusted_q(t, &mut q), EmtorStatus::Ok);
        assert_eq!(q, 6);
        let dims: Vec<usize> = [(0, 0), (1, 2), (2, 4), (1, 4)]
            .iter()
            .map(|&(p, q)| {
                let mut d = usize::MAX;
                assert_eq!(emtor_tor_dim(t, p, q, &mut d), EmtorStatus::Ok);
                d
            })
            .collect();
        assert_eq!(dims, vec![1, 2, 1, 0]);
        let mut json = ptr::null_mut();
        assert_eq!(emtor_tor_to_json(t, &mut json), EmtorStatus::Ok);
        let v: Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["trusted_q"], 6);
        emtor_tor_free(t);
        emtor_module_free(m);
    }
}

#[test]
fn invalid_modules_report_an_error() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(emtor_module_from_json(c("{\"ring\": 3}").as_ptr(), &mut m), EmtorStatus::InvalidInput);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(emtor_module_from_json(ptr::null(), &mut m), EmtorStatus::NullPointer);
        assert_eq!(emtor_tor_trusted_q(ptr::null(), ptr::null_mut()), EmtorStatus::NullPointer);
        assert_eq!(emtor_fan_is_smooth(ptr::null(), ptr::null_mut()), EmtorStatus::NullPointer);
        emtor_module_free(ptr::null_mut());
        emtor_tor_free(ptr::null_mut());
        emtor_fan_free(ptr::null_mut());
        emtor_string_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_the_last_error() {
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(emtor_group_cohomology_json(c("nonsense").as_ptr(), &mut json), EmtorStatus::InvalidInput);
        assert!(!emtor_last_error().is_null());
        assert_eq!(emtor_group_cohomology_json(c("SL:2").as_ptr(), &mut json), EmtorStatus::Ok);
        assert!(emtor_last_error().is_null());
        emtor_string_free(json);
    }
}

#[test]
fn projective_plane_through_the_abi() {
    let pp2 = r#"{"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]}"#;
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(emtor_fan_from_json(c(pp2).as_ptr(), &mut f), EmtorStatus::Ok, "{}", last_error());
        let mut smooth = false;
        assert_eq!(emtor_fan_is_smooth(f, &mut smooth), EmtorStatus::Ok);
        assert!(smooth);
        let mut json = ptr::null_mut();
        assert_eq!(emtor_toric_cohomology_json(f, 10, &mut json), EmtorStatus::Ok);
        let v: Value = serde_json::from_str(&take_string(json)).unwrap();
        let entries: Vec<(u64, u64, u64)> = v["entries"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| (e["n"].as_u64().unwrap(), e["weight"].as_u64().unwrap(), e["dim"].as_u64().unwrap()))
            .collect();
        assert_eq!(entries, vec![(0, 0, 1), (2, 2, 1), (4, 4, 1)]);
        emtor_fan_free(f);
    }
}

#[test]
fn group_cohomology_of_sl3() {
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(emtor_group_cohomology_json(c("SL:3").as_ptr(), &mut json), EmtorStatus::Ok);
        let v: Value = serde_json::from_str(&take_string(json)).unwrap();
        let classes: Vec<(u64, u64)> =
            v["entries"].as_array().unwrap().iter().map(|e| (e["n"].as_u64().unwrap(), e["weight"].as_u64().unwrap())).collect();
        assert_eq!(classes, vec![(0, 0), (3, 4), (5, 6), (8, 10)]);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/emtor.h")).unwrap();
    for name in [
        "emtor_last_error",
        "emtor_string_free",
        "emtor_module_from_json",
        "emtor_module_free",
        "emtor_koszul_tor",
        "emtor_tor_free",
        "emtor_tor_dim",
        "emtor_tor_trusted_q",
        "emtor_tor_to_json",
        "emtor_fan_from_json",
        "emtor_fan_free",
        "emtor_fan_is_smooth",
        "emtor_toric_cohomology_json",
        "emtor_group_cohomology_json",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from the header");
    }
    assert!(header.contains("typedef struct EmtorModule EmtorModule;"));
}
