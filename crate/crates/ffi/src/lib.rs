//! C ABI for the angular-billiard library: opaque curve handles, status
//! codes, orbit evaluation into caller-provided buffers, and JSON
//! certificate emission. The matching header is generated into
//! `include/angular_billiard.h` at build time.

use std::ffi::{c_char, CStr, CString};

use angular_billiard::angular::{orbit, AngularState};
use angular_billiard::birkhoff::{billiard_orbit, BilliardLineState, BirkhoffTable};
use angular_billiard::curve::{CurveSpec, SupportCurve};
use angular_billiard::integrability::certify;
use angular_billiard::io::{certificate_to_json, poly_from_json};
use angular_billiard::normal_form::twist_profile;
use angular_billiard::trace::trace_curve;
use angular_billiard::OrientedLine;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    BadInput = 3,
    NumericalFailure = 4,
}

/// Opaque convex-curve handle.
pub struct AbCurve {
    curve: SupportCurve,
    // kept to rebuild owned copies where the library takes the curve by value
    spec: CurveSpec,
}

fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, AbStatus> {
    if ptr.is_null() {
        return Err(AbStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| AbStatus::InvalidUtf8)
}

/// Builds a curve from its JSON description (the same schema the CLI
/// accepts); on success stores a heap handle in `out`. The handle must be
/// released with `ab_curve_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ab_curve_from_json(
    json: *const c_char,
    out: *mut *mut AbCurve,
) -> AbStatus {
    if out.is_null() {
        return AbStatus::NullArgument;
    }
    let json = match read_str(json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match CurveSpec::from_json(json).and_then(|s| s.build_support().map(|c| (s, c))) {
        Ok((spec, curve)) => {
            unsafe { *out = Box::into_raw(Box::new(AbCurve { curve, spec })) };
            AbStatus::Ok
        }
        Err(_) => AbStatus::BadInput,
    }
}

/// Releases a curve handle; a null pointer is a no-op.
///
/// # Safety
/// `curve` must come from `ab_curve_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ab_curve_free(curve: *mut AbCurve) {
    if !curve.is_null() {
        drop(unsafe { Box::from_raw(curve) });
    }
}

/// Iterates the angular map from the exterior polar state (phi, r) and
/// writes the plane points of the orbit, including the start, as
/// `2 * (steps + 1)` interleaved x,y values into `out_xy`.
///
/// # Safety
/// `out_xy` must point to at least `2 * (steps + 1)` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ab_angular_orbit(
    curve: *const AbCurve,
    phi: f64,
    r: f64,
    steps: usize,
    out_xy: *mut f64,
) -> AbStatus {
    if curve.is_null() || out_xy.is_null() {
        return AbStatus::NullArgument;
    }
    let curve = unsafe { &(*curve).curve };
    match orbit(curve, AngularState::new(phi, r), steps) {
        Ok((states, _)) => {
            let buf = unsafe { std::slice::from_raw_parts_mut(out_xy, 2 * (steps + 1)) };
            for (k, s) in states.iter().enumerate() {
                let q = s.point();
                buf[2 * k] = q.x;
                buf[2 * k + 1] = q.y;
            }
            AbStatus::Ok
        }
        Err(_) => AbStatus::NumericalFailure,
    }
}

/// Iterates the Birkhoff billiard in the dual table of the curve from the
/// oriented line (phi, p) and writes `2 * (steps + 1)` interleaved phi,p
/// values into `out_phip`.
///
/// # Safety
/// `out_phip` must point to at least `2 * (steps + 1)` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ab_birkhoff_orbit(
    curve: *const AbCurve,
    phi: f64,
    p: f64,
    steps: usize,
    out_phip: *mut f64,
) -> AbStatus {
    if curve.is_null() || out_phip.is_null() {
        return AbStatus::NullArgument;
    }
    let gamma = match unsafe { &(*curve).spec }.build_support() {
        Ok(c) => c,
        Err(_) => return AbStatus::BadInput,
    };
    let table = BirkhoffTable::from_dual(gamma);
    let start = BilliardLineState::new(OrientedLine::new(phi, p));
    match billiard_orbit(&table, start, steps) {
        Ok(states) => {
            let buf = unsafe { std::slice::from_raw_parts_mut(out_phip, 2 * (steps + 1)) };
            for (k, s) in states.iter().enumerate() {
                buf[2 * k] = s.line.phi();
                buf[2 * k + 1] = s.line.p();
            }
            AbStatus::Ok
        }
        Err(_) => AbStatus::NumericalFailure,
    }
}

/// Minimum of the generating-function twist over a 256 x 128 grid; positive
/// for strictly convex curves.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn ab_twist_min(curve: *const AbCurve, out: *mut f64) -> AbStatus {
    if curve.is_null() || out.is_null() {
        return AbStatus::NullArgument;
    }
    unsafe { *out = twist_profile(&(*curve).curve, 256, 128, 1e-3) };
    AbStatus::Ok
}

/// Emits the non-integrability certificate of the curve {f = 0} as a JSON
/// string, where `f_json` is a list of [i, j, coefficient] triples. The
/// string must be released with `ab_string_free`.
///
/// # Safety
/// `f_json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ab_certify_json(
    f_json: *const c_char,
    out: *mut *mut c_char,
) -> AbStatus {
    if out.is_null() {
        return AbStatus::NullArgument;
    }
    let json = match read_str(f_json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let f = match poly_from_json(json) {
        Ok(f) => f,
        Err(_) => return AbStatus::BadInput,
    };
    let cert = angular_billiard::curve::ImplicitCurveModel::from_poly_autoseed(f.clone())
        .map_err(|_| AbStatus::BadInput)
        .and_then(|model| trace_curve(&model, 0.01).map_err(|_| AbStatus::NumericalFailure))
        .and_then(|trace| certify(&f, &trace).map_err(|_| AbStatus::BadInput));
    match cert {
        Ok(cert) => {
            let text = certificate_to_json(&cert);
            match CString::new(text) {
                Ok(s) => {
                    unsafe { *out = s.into_raw() };
                    AbStatus::Ok
                }
                Err(_) => AbStatus::NumericalFailure,
            }
        }
        Err(status) => status,
    }
}

/// Releases a string returned by this library; a null pointer is a no-op.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn ellipse_handle() -> *mut AbCurve {
        let json = CString::new(r#"{"kind":"ellipse","a":2.0,"b":1.0}"#).unwrap();
        let mut handle: *mut AbCurve = ptr::null_mut();
        let status = unsafe { ab_curve_from_json(json.as_ptr(), &mut handle) };
        assert_eq!(status, AbStatus::Ok);
        assert!(!handle.is_null());
        handle
    }

    #[test]
    fn curve_lifecycle_and_errors() {
        let handle = ellipse_handle();
        unsafe { ab_curve_free(handle) };
        unsafe { ab_curve_free(ptr::null_mut()) };
        let bad = CString::new("not json").unwrap();
        let mut out: *mut AbCurve = ptr::null_mut();
        assert_eq!(
            unsafe { ab_curve_from_json(bad.as_ptr(), &mut out) },
            AbStatus::BadInput
        );
        assert_eq!(
            unsafe { ab_curve_from_json(ptr::null(), &mut out) },
            AbStatus::NullArgument
        );
    }

    #[test]
    fn angular_orbit_matches_library() {
        let handle = ellipse_handle();
        let steps = 10usize;
        let mut buf = vec![0.0f64; 2 * (steps + 1)];
        let status =
            unsafe { ab_angular_orbit(handle, 0.3, 4.0, steps, buf.as_mut_ptr()) };
        assert_eq!(status, AbStatus::Ok);
        let curve = angular_billiard::make_ellipse(2.0, 1.0).unwrap();
        let (states, _) = orbit(&curve, AngularState::new(0.3, 4.0), steps).unwrap();
        for (k, s) in states.iter().enumerate() {
            let q = s.point();
            assert!((buf[2 * k] - q.x).abs() < 1e-12);
            assert!((buf[2 * k + 1] - q.y).abs() < 1e-12);
        }
        // interior start fails numerically
        assert_eq!(
            unsafe { ab_angular_orbit(handle, 0.0, 0.5, 2, buf.as_mut_ptr()) },
            AbStatus::NumericalFailure
        );
        unsafe { ab_curve_free(handle) };
    }

    #[test]
    fn birkhoff_orbit_fills_buffer() {
        let handle = ellipse_handle();
        let steps = 20usize;
        let mut buf = vec![f64::NAN; 2 * (steps + 1)];
        let status = unsafe { ab_birkhoff_orbit(handle, 0.4, 0.2, steps, buf.as_mut_ptr()) };
        assert_eq!(status, AbStatus::Ok);
        assert!(buf.iter().all(|v| v.is_finite()));
        assert!((buf[0] - 0.4).abs() < 1e-12 && (buf[1] - 0.2).abs() < 1e-12);
        unsafe { ab_curve_free(handle) };
    }

    #[test]
    fn twist_min_positive() {
        let handle = ellipse_handle();
        let mut min = 0.0f64;
        assert_eq!(unsafe { ab_twist_min(handle, &mut min) }, AbStatus::Ok);
        assert!(min > 0.0);
        unsafe { ab_curve_free(handle) };
    }

    #[test]
    fn certify_round_trips_json() {
        let f = CString::new("[[4,0,1.0],[0,4,1.0],[0,0,-1.0]]").unwrap();
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { ab_certify_json(f.as_ptr(), &mut out) }, AbStatus::Ok);
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap();
        let json: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(json["verdict"], "NOT_POLY_INTEGRABLE");
        assert_eq!(json["witnesses"].as_array().unwrap().len(), 4);
        unsafe { ab_string_free(out) };
        // conics are rejected as bad input
        let conic = CString::new("[[2,0,1.0],[0,2,1.0],[0,0,-1.0]]").unwrap();
        assert_eq!(
            unsafe { ab_certify_json(conic.as_ptr(), &mut out) },
            AbStatus::BadInput
        );
    }
}
