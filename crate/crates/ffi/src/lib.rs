//! C interface to `qwhittaker`.
//!
//! Configurations and parameters live behind opaque handles that the caller
//! frees with `qw_config_free` / `qw_params_free`. Every fallible call returns
//! a [`QwStatus`]; on failure `qw_last_error` gives a message for the calling
//! thread. Strings returned through `char **` out-parameters belong to the
//! caller and are released with `qw_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qwhittaker::dynamics::{simulate, SimulationOptions};
use qwhittaker::gibbs::log_weight;
use qwhittaker::scalar::parse_rational;
use qwhittaker::verification::check_stationarity;
use qwhittaker::{Configuration, Error, GibbsParams, Sector};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QwStatus {
    Ok = 0,
    /// A null pointer, bad UTF-8 or an out-of-range parameter.
    InvalidArgument = 1,
    /// Input that fails the interlacing constraints or is malformed.
    InvalidConfiguration = 2,
    /// `(L, N, m1, m2)` outside the admissible range.
    SectorBounds = 3,
    /// Enumeration would exceed the candidate cap.
    TooLarge = 4,
    /// A check ran and failed.
    VerificationFailed = 5,
    /// An internal invariant broke.
    Internal = 6,
}

/// Opaque configuration handle.
pub struct QwConfig(Configuration);

/// Opaque floating-point parameter handle.
pub struct QwParams(GibbsParams<f64>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(e: &Error) -> QwStatus {
    match e {
        Error::InvalidParameter(_) | Error::InvalidParticle { .. } | Error::Io(_) => QwStatus::InvalidArgument,
        Error::Structural(_) | Error::InvalidConfiguration | Error::Json(_) | Error::MismatchedSectors => {
            QwStatus::InvalidConfiguration
        }
        Error::SectorBounds(_) => QwStatus::SectorBounds,
        Error::CapExceeded { .. } => QwStatus::TooLarge,
        _ => QwStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (QwStatus, String)>) -> QwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QwStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside qwhittaker");
            QwStatus::Internal
        }
    }
}

fn lib<T>(r: qwhittaker::Result<T>) -> Result<T, (QwStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn bad(msg: &str) -> (QwStatus, String) {
    (QwStatus::InvalidArgument, msg.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (QwStatus, String)> {
    if p.is_null() {
        return Err(bad(&format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| bad(&format!("{name} is not UTF-8")))
}

unsafe fn out_string(out: *mut *mut c_char, s: String) -> Result<(), (QwStatus, String)> {
    let c = CString::new(s).map_err(|_| (QwStatus::Internal, "string contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call from the same thread.
#[no_mangle]
pub extern "C" fn qw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn qw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical configuration of sector `(l, n, m1, m2)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_config_canonical(l: u32, n: u32, m1: u32, m2: u32, out: *mut *mut QwConfig) -> QwStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("out is null"));
        }
        let sector = lib(Sector::new(l, n, m1, m2))?;
        *out = Box::into_raw(Box::new(QwConfig(Configuration::canonical(&sector))));
        Ok(())
    })
}

/// Parses `{"L": .., "N": .., "rows": [[..], ..]}`. The result must validate.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_config_from_json(json: *const c_char, out: *mut *mut QwConfig) -> QwStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("out is null"));
        }
        let c = lib(Configuration::from_json_str(str_arg(json, "json")?))?;
        if !c.validate() {
            return Err((QwStatus::InvalidConfiguration, Error::InvalidConfiguration.to_string()));
        }
        *out = Box::into_raw(Box::new(QwConfig(c)));
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_config_to_json(config: *const QwConfig, out: *mut *mut c_char) -> QwStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| bad("config is null"))?;
        if out.is_null() {
            return Err(bad("out is null"));
        }
        out_string(out, c.0.to_json_string())
    })
}

/// # Safety
/// `config` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn qw_config_free(config: *mut QwConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Writes 1 to `out` if the configuration interlaces, else 0.
///
/// # Safety
/// `config` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_config_validate(config: *const QwConfig, out: *mut i32) -> QwStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| bad("config is null"))?;
        if out.is_null() {
            return Err(bad("out is null"));
        }
        *out = i32::from(c.0.validate());
        Ok(())
    })
}

/// Torus dimensions and sector index. `m2` is 0 for flat configurations.
///
/// # Safety
/// `config` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qw_config_sector(
    config: *const QwConfig,
    l: *mut u32,
    n: *mut u32,
    m1: *mut u32,
    m2: *mut u32,
) -> QwStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| bad("config is null"))?;
        if l.is_null() || n.is_null() || m1.is_null() || m2.is_null() {
            return Err(bad("an out-pointer is null"));
        }
        let t = c.0.torus();
        let index = lib(c.0.sector_index())?;
        (*l, *n, *m1, *m2) = (t.l(), t.n(), t.m1(), index);
        Ok(())
    })
}

/// Float parameters `q` in `[0, 1)` and `n_rows` positive activities.
///
/// # Safety
/// `a` must point to `n_rows` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qw_params_new(q: f64, a: *const f64, n_rows: usize, out: *mut *mut QwParams) -> QwStatus {
    guard(|| {
        if out.is_null() || (a.is_null() && n_rows > 0) {
            return Err(bad("null pointer argument"));
        }
        let acts = if n_rows == 0 { Vec::new() } else { std::slice::from_raw_parts(a, n_rows).to_vec() };
        let p = lib(GibbsParams::new(q, acts))?;
        *out = Box::into_raw(Box::new(QwParams(p)));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn qw_params_free(params: *mut QwParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Natural log of the unnormalized Gibbs weight.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qw_log_weight(config: *const QwConfig, params: *const QwParams, out: *mut f64) -> QwStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| bad("config is null"))?;
        let p = params.as_ref().ok_or_else(|| bad("params is null"))?;
        if out.is_null() {
            return Err(bad("out is null"));
        }
        *out = lib(log_weight(&c.0, &p.0))?;
        Ok(())
    })
}

/// Runs the dynamics from `start` up to time `t_max` and returns the final
/// state as a new handle together with the number of events.
///
/// # Safety
/// Handles must be live; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qw_simulate(
    start: *const QwConfig,
    params: *const QwParams,
    t_max: f64,
    seed: u64,
    out_final: *mut *mut QwConfig,
    out_events: *mut u64,
) -> QwStatus {
    guard(|| {
        let c = start.as_ref().ok_or_else(|| bad("start is null"))?;
        let p = params.as_ref().ok_or_else(|| bad("params is null"))?;
        if out_final.is_null() || out_events.is_null() {
            return Err(bad("an out-pointer is null"));
        }
        let mut opts = SimulationOptions::new(t_max);
        opts.track_occupation = false;
        let tr = lib(simulate(&c.0, &p.0, &opts, seed))?;
        *out_events = tr.event_count;
        *out_final = Box::into_raw(Box::new(QwConfig(tr.final_state)));
        Ok(())
    })
}

/// Exact stationarity check on sector `(l, n, m1, m2)`. `q` and the
/// `n_rows` activities are rational strings such as `"1/2"`. Returns
/// `VerificationFailed` when the residual is nonzero; in both cases the JSON
/// report is written to `report` if it is not null.
///
/// # Safety
/// `q` and each `a[i]` must be NUL-terminated strings; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn qw_verify_stationarity(
    l: u32,
    n: u32,
    m1: u32,
    m2: u32,
    q: *const c_char,
    a: *const *const c_char,
    n_rows: usize,
    report: *mut *mut c_char,
) -> QwStatus {
    guard(|| {
        let sector = lib(Sector::new(l, n, m1, m2))?;
        let q = lib(parse_rational(str_arg(q, "q")?))?;
        if a.is_null() && n_rows > 0 {
            return Err(bad("a is null"));
        }
        let mut acts = Vec::with_capacity(n_rows);
        for i in 0..n_rows {
            acts.push(lib(parse_rational(str_arg(*a.add(i), "a[i]")?))?);
        }
        let params = lib(GibbsParams::new(q, acts))?;
        let rep = lib(check_stationarity(&sector, &params, 0.0))?;
        if !report.is_null() {
            let json = serde_json::to_string(&rep).map_err(|e| (QwStatus::Internal, e.to_string()))?;
            out_string(report, json)?;
        }
        if rep.passed {
            Ok(())
        } else {
            Err((QwStatus::VerificationFailed, format!("max residual {}", rep.max_residual)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_their_codes() {
        assert_eq!(status_of(&Error::SectorBounds(String::new())), QwStatus::SectorBounds);
        assert_eq!(status_of(&Error::CapExceeded { bound: 2, cap: 1 }), QwStatus::TooLarge);
        assert_eq!(status_of(&Error::InvalidConfiguration), QwStatus::InvalidConfiguration);
        assert_eq!(status_of(&Error::FrozenState), QwStatus::Internal);
    }

    #[test]
    fn panics_become_internal_errors() {
        assert_eq!(guard(|| panic!("boom")), QwStatus::Internal);
        assert!(!LAST_ERROR.with(|e| e.borrow().as_bytes().is_empty()));
    }
}
