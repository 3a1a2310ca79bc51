use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sinai_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sinai_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn path_roundtrip_and_stats() {
    let values = [0.0, 1.0, 3.0, 1.5, 0.0, -1.0, 2.0];
    let mut path: *mut SinaiPath = ptr::null_mut();
    let st = unsafe { sinai_path_from_values(0.5, 3, values.as_ptr(), values.len(), &mut path) };
    assert_eq!(st, SinaiStatus::Ok);
    assert_eq!(unsafe { sinai_path_len(path) }, values.len());

    let mut small = [0.0; 2];
    let mut written = 0usize;
    let st = unsafe { sinai_path_values(path, small.as_mut_ptr(), small.len(), &mut written) };
    assert_eq!(st, SinaiStatus::BufferTooSmall);
    assert_eq!(written, values.len());

    let mut buf = [0.0; 7];
    let st = unsafe { sinai_path_values(path, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, SinaiStatus::Ok);
    assert_eq!(buf, values);
    unsafe { sinai_path_free(path) };
}

#[test]
fn sampled_path_central_stats() {
    let mut path: *mut SinaiPath = ptr::null_mut();
    assert_eq!(
        unsafe { sinai_path_sample(50.0, 1e-2, 7, &mut path) },
        SinaiStatus::Ok
    );
    let mut stats = SinaiCentralStats {
        excess: 0.0,
        length: 0.0,
        direction: SinaiDirection::Up,
        rel_origin: 0.0,
        b: 0.0,
    };
    assert_eq!(
        unsafe { sinai_path_central_stats(path, 1.0, &mut stats) },
        SinaiStatus::Ok
    );
    assert!(stats.excess >= 0.0 && stats.length > 0.0);
    assert!((0.0..=1.0).contains(&stats.rel_origin));
    unsafe { sinai_path_free(path) };
}

#[test]
fn synthetic_engine_records_flips() {
    let mut engine: *mut SinaiEngine = ptr::null_mut();
    assert_eq!(
        unsafe { sinai_engine_synthetic(1001, 3, &mut engine) },
        SinaiStatus::Ok
    );
    assert_eq!(
        unsafe { sinai_engine_advance(engine, 100.0) },
        SinaiStatus::Ok
    );
    let mut level = 0.0;
    assert_eq!(
        unsafe { sinai_engine_level(engine, &mut level) },
        SinaiStatus::Ok
    );
    assert!(level >= 100.0);
    assert!(unsafe { sinai_engine_live_slopes(engine) } >= 3);

    let mut needed = 0usize;
    let mut sign = 0i32;
    let st = unsafe { sinai_engine_flips(engine, ptr::null_mut(), 0, &mut needed, &mut sign) };
    assert!(st == SinaiStatus::Ok || st == SinaiStatus::BufferTooSmall);
    assert!(sign == 1 || sign == -1);
    let mut buf = vec![0.0; needed];
    let mut written = 0usize;
    let st = unsafe {
        sinai_engine_flips(
            engine,
            buf.as_mut_ptr(),
            buf.len(),
            &mut written,
            ptr::null_mut(),
        )
    };
    assert_eq!(st, SinaiStatus::Ok);
    assert_eq!(written, needed);
    assert!(buf.windows(2).all(|w| w[0] < w[1]));
    assert!(buf.iter().all(|&x| x > 1.0 && x <= level));
    unsafe { sinai_engine_free(engine) };
}

#[test]
fn even_window_is_rejected() {
    let mut engine: *mut SinaiEngine = ptr::null_mut();
    let st = unsafe { sinai_engine_synthetic(1000, 3, &mut engine) };
    assert_eq!(st, SinaiStatus::InvalidArgument);
    assert!(engine.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_handles_are_reported() {
    assert_eq!(
        unsafe { sinai_engine_advance(ptr::null_mut(), 10.0) },
        SinaiStatus::NullPointer
    );
    assert!(last_error().contains("engine"));
    assert_eq!(unsafe { sinai_path_len(ptr::null()) }, 0);
    unsafe {
        sinai_path_free(ptr::null_mut());
        sinai_engine_free(ptr::null_mut());
    }
}

#[test]
fn law_wrappers() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { sinai_genfun(100.0, 0.0, 0.0, &mut re, &mut im) },
        SinaiStatus::Ok
    );
    assert!((re - sinai_survival(100.0)).abs() < 1e-10);
    assert!(im.abs() < 1e-12);
    assert_eq!(
        unsafe { sinai_genfun(100.0, 1.0, 0.0, &mut re, &mut im) },
        SinaiStatus::Ok
    );
    assert!((re - 1.0).abs() < 1e-10);
    assert_eq!(
        unsafe { sinai_genfun(10.0, -2.0, 0.0, &mut re, &mut im) },
        SinaiStatus::DomainError
    );

    let mut e = SinaiExponents::default();
    assert_eq!(
        unsafe { sinai_exponents(0.0, 0.0, &mut e) },
        SinaiStatus::Ok
    );
    // lambda1 * lambda2 = 1 - z
    assert!((e.lambda1_re * e.lambda2_re - 1.0).abs() < 1e-12);

    assert!(sinai_ratio_cdf(1.0).abs() < 1e-12);
    assert!(sinai_ratio_cdf(1e6) > 0.99);
    assert!(sinai_first_flip_cdf(1.0).abs() < 1e-12);
    assert!(sinai_rate_function(1.0 / 3.0).abs() < 1e-9);
    assert!(sinai_central_excess_density(0.5) > 0.0);
    let mut d = 0.0;
    assert_eq!(unsafe { sinai_ratio_density(2.0, &mut d) }, SinaiStatus::Ok);
    assert!(d > 0.0);
    assert_eq!(
        unsafe { sinai_slope_length_density(1.0, 1e-12, &mut d) },
        SinaiStatus::Ok
    );
    assert!(d > 0.0);
}

#[test]
fn renewal_buffer_protocol() {
    let mut needed = 0usize;
    let st = unsafe {
        sinai_renewal_simulate(1e6, 11, ptr::null_mut(), 0, &mut needed, ptr::null_mut())
    };
    assert!(st == SinaiStatus::Ok || st == SinaiStatus::BufferTooSmall);
    let mut buf = vec![0.0; needed];
    let mut written = 0usize;
    let mut sign = 0;
    let st = unsafe {
        sinai_renewal_simulate(
            1e6,
            11,
            buf.as_mut_ptr(),
            buf.len(),
            &mut written,
            &mut sign,
        )
    };
    assert_eq!(st, SinaiStatus::Ok);
    assert_eq!(written, needed);
    assert!(sign == 1 || sign == -1);
}

#[test]
fn ldp_guard_maps_to_status() {
    let (mut rate, mut hits) = (0.0, 0u64);
    let st = unsafe { sinai_ldp_tail_estimate(0.2, 5.0, 1000, 1, &mut rate, &mut hits) };
    assert_eq!(st, SinaiStatus::InvalidArgument);
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/sinai_ffi.h")
}

#[test]
fn header_declares_every_entry_point() {
    let text = std::fs::read_to_string(header()).expect("generated header");
    for name in [
        "sinai_last_error",
        "sinai_path_sample",
        "sinai_path_from_values",
        "sinai_path_values",
        "sinai_path_central_stats",
        "sinai_path_free",
        "sinai_engine_from_path",
        "sinai_engine_synthetic",
        "sinai_engine_advance",
        "sinai_engine_flips",
        "sinai_engine_free",
        "sinai_genfun",
        "sinai_exponents",
        "sinai_renewal_simulate",
        "sinai_ldp_tail_estimate",
        "SINAI_STATUS_BUFFER_TOO_SMALL",
        "SINAI_DIRECTION_DOWN",
        "typedef struct SinaiPath SinaiPath",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let Ok(out) = Command::new(&cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-std=c11", "-x", "c"])
        .arg(header())
        .output()
    else {
        eprintln!("skipping: {cc} not available");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
