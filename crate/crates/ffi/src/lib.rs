//! C interface to `ymgap`.
//!
//! Every function returns a [`YmgapStatus`]; on failure the message is available
//! from [`ymgap_last_error`] on the same thread. Handles are opaque and owned by
//! the caller, who releases them with the matching `_free` function. Strings
//! returned through out-parameters are released with [`ymgap_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ymgap::conformal::{lambda1, PolarGrid, RadialFunction, SLProblem};
use ymgap::instanton::InstantonParams;
use ymgap::liealg::{gamma0_estimate, gamma1_estimate, AlgebraSpec, GammaSettings};
use ymgap::quad4::{chern_weil_kappa, ym_energy, Orientation};
use ymgap::report::{
    corollary_thresholds, flow_admissible, gap_report, run_suite, ConnectionKind, GapConfig, GapReport,
    StructureGroup, Verdict,
};
use ymgap::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YmgapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Config = 3,
    NonConvergence = 4,
    NonFinite = 5,
    UnknownSuite = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YmgapGroup {
    Su2 = 0,
    So3 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YmgapVerdict {
    /// `F+` vanishes identically.
    Case1 = 0,
    StrictGapViolated = 1,
    InequalityHolds = 2,
    Equality = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YmgapAlgebra {
    Su2 = 0,
    So3 = 1,
    So4 = 2,
}

/// Numbers of a gap report; `lhs` is the Yamabe invariant.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct YmgapGapValues {
    pub yamabe: f64,
    pub gamma1: f64,
    pub curvature_plus_l2: f64,
    pub weyl_plus_l2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// `specialized` is NaN when the group has no closed-form value.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct YmgapThresholds {
    pub general: f64,
    pub specialized: f64,
    pub universal: f64,
}

/// Opaque gap configuration.
pub struct YmgapConfig {
    inner: GapConfig,
}

/// Opaque gap report.
pub struct YmgapReport {
    inner: GapReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> YmgapStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::InvalidInput(_) => YmgapStatus::InvalidInput,
        Error::Config(_) => YmgapStatus::Config,
        Error::NonConvergence { .. } => YmgapStatus::NonConvergence,
        Error::NonFinite { .. } => YmgapStatus::NonFinite,
        Error::UnknownSuite { .. } => YmgapStatus::UnknownSuite,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => YmgapStatus::Io,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), YmgapStatus>) -> YmgapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            YmgapStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            YmgapStatus::Panic
        }
    }
}

fn fail(e: Error) -> YmgapStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> YmgapStatus {
    set_error(&format!("{what} is null"));
    YmgapStatus::NullPointer
}

fn invalid(msg: String) -> YmgapStatus {
    set_error(&msg);
    YmgapStatus::InvalidInput
}

unsafe fn config_ref<'a>(cfg: *const YmgapConfig) -> Result<&'a GapConfig, YmgapStatus> {
    cfg.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn config_mut<'a>(cfg: *mut YmgapConfig) -> Result<&'a mut GapConfig, YmgapStatus> {
    cfg.as_mut().map(|c| &mut c.inner).ok_or_else(|| null("config"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), YmgapStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), YmgapStatus> {
    let c = CString::new(s).map_err(|_| invalid("string contains NUL".into()))?;
    write(out, c.into_raw())
}

/// Message for the last failing call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ymgap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ymgap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default configuration: SU(2), standard instanton, round `S^4`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_new(out: *mut *mut YmgapConfig) -> YmgapStatus {
    guard(|| {
        let cfg = Box::new(YmgapConfig {
            inner: GapConfig::default(),
        });
        write(out, Box::into_raw(cfg))
    })
}

/// Configuration from a JSON document with the fields of the report's `config`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_from_json(json: *const c_char, out: *mut *mut YmgapConfig) -> YmgapStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8".into()))?;
        let inner: GapConfig = serde_json::from_str(text).map_err(|e| fail(Error::Config(e.to_string())))?;
        inner.validate().map_err(fail)?;
        write(out, Box::into_raw(Box::new(YmgapConfig { inner })))
    })
}

/// # Safety
/// `cfg` must be null or come from `ymgap_config_new` / `ymgap_config_from_json`.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_free(cfg: *mut YmgapConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_group(cfg: *mut YmgapConfig, group: YmgapGroup) -> YmgapStatus {
    guard(|| {
        config_mut(cfg)?.group = match group {
            YmgapGroup::Su2 => StructureGroup::Su2,
            YmgapGroup::So3 => StructureGroup::So3,
        };
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle; `center` must point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_instanton(
    cfg: *mut YmgapConfig,
    scale: f64,
    center: *const f64,
) -> YmgapStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        if center.is_null() {
            return Err(null("center"));
        }
        let centre: [f64; 4] = std::slice::from_raw_parts(center, 4).try_into().expect("four entries");
        c.instanton = InstantonParams::new(scale, centre).map_err(fail)?;
        c.connection = ConnectionKind::Instanton;
        Ok(())
    })
}

/// Switches to the trivial connection (or back when `flat` is false).
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_flat(cfg: *mut YmgapConfig, flat: bool) -> YmgapStatus {
    guard(|| {
        config_mut(cfg)?.connection = if flat {
            ConnectionKind::Flat
        } else {
            ConnectionKind::Instanton
        };
        Ok(())
    })
}

/// Validates after applying, so a rejected value leaves the handle unchanged.
unsafe fn update(cfg: *mut YmgapConfig, apply: impl FnOnce(&mut GapConfig)) -> YmgapStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        let mut next = c.clone();
        apply(&mut next);
        next.validate().map_err(fail)?;
        *c = next;
        Ok(())
    })
}

/// `||W+||` in L2; must be nonnegative.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_weyl_l2(cfg: *mut YmgapConfig, value: f64) -> YmgapStatus {
    update(cfg, |c| c.weyl_l2 = value)
}

/// Yamabe invariant; NaN restores the round `S^4` value.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_yamabe(cfg: *mut YmgapConfig, value: f64) -> YmgapStatus {
    update(cfg, |c| c.yamabe = (!value.is_nan()).then_some(value))
}

/// Replaces the computed `||F+||`; NaN restores the computed value.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_curvature_l2(cfg: *mut YmgapConfig, value: f64) -> YmgapStatus {
    update(cfg, |c| c.curvature_l2 = (!value.is_nan()).then_some(value))
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_seed(cfg: *mut YmgapConfig, seed: u64) -> YmgapStatus {
    update(cfg, |c| c.seed = seed)
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_equality_tol(cfg: *mut YmgapConfig, tol: f64) -> YmgapStatus {
    update(cfg, |c| c.equality_tol = tol)
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_radial_grid(
    cfg: *mut YmgapConfig,
    panels: usize,
    order: usize,
    r_max: f64,
) -> YmgapStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        let mut grid = c.grid;
        grid.radial_panels = panels;
        grid.radial_order = order;
        grid.r_max = r_max;
        grid.radial().map_err(fail)?;
        c.grid = grid;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymgap_config_set_polar_nodes(cfg: *mut YmgapConfig, nodes: usize) -> YmgapStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        PolarGrid::new(nodes).map_err(fail)?;
        c.grid.polar_nodes = nodes;
        Ok(())
    })
}

/// Yang-Mills energy of the configured connection.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_energy(cfg: *const YmgapConfig, out: *mut f64) -> YmgapStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        let grid = c.grid.radial().map_err(fail)?;
        let e = ym_energy(c.build_connection().as_ref(), &grid).map_err(fail)?;
        write(out, e.value)
    })
}

/// Chern-Weil number of the configured connection, standard orientation.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_kappa(cfg: *const YmgapConfig, out: *mut f64) -> YmgapStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        let grid = c.grid.radial().map_err(fail)?;
        let k = chern_weil_kappa(c.build_connection().as_ref(), &grid, Orientation::Standard).map_err(fail)?;
        write(out, k.kappa)
    })
}

/// Numerical `gamma0` and `gamma1` of an algebra; either output may be null.
///
/// # Safety
/// Non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_gamma_estimates(
    algebra: YmgapAlgebra,
    seed: u64,
    gamma0: *mut f64,
    gamma1: *mut f64,
) -> YmgapStatus {
    guard(|| {
        let alg = match algebra {
            YmgapAlgebra::Su2 => AlgebraSpec::su2_real(),
            YmgapAlgebra::So3 => AlgebraSpec::so3_block(),
            YmgapAlgebra::So4 => AlgebraSpec::so(4),
        };
        let settings = GammaSettings {
            seed,
            ..GammaSettings::default()
        };
        if !gamma0.is_null() {
            write(gamma0, gamma0_estimate(&alg, &settings).map_err(fail)?.value)?;
        }
        if !gamma1.is_null() {
            write(gamma1, gamma1_estimate(&alg, &settings).map_err(fail)?.value)?;
        }
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_gap_report(cfg: *const YmgapConfig, out: *mut *mut YmgapReport) -> YmgapStatus {
    guard(|| {
        let inner = gap_report(config_ref(cfg)?).map_err(fail)?;
        write(out, Box::into_raw(Box::new(YmgapReport { inner })))
    })
}

/// # Safety
/// `report` must be null or come from `ymgap_gap_report`.
#[no_mangle]
pub unsafe extern "C" fn ymgap_report_free(report: *mut YmgapReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_report_verdict(report: *const YmgapReport, out: *mut YmgapVerdict) -> YmgapStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let v = match r.inner.verdict {
            Verdict::Case1 => YmgapVerdict::Case1,
            Verdict::StrictGapViolated => YmgapVerdict::StrictGapViolated,
            Verdict::InequalityHolds => YmgapVerdict::InequalityHolds,
            Verdict::Equality => YmgapVerdict::Equality,
        };
        write(out, v)
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_report_values(report: *const YmgapReport, out: *mut YmgapGapValues) -> YmgapStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.inner;
        write(
            out,
            YmgapGapValues {
                yamabe: r.yamabe.value,
                gamma1: r.gamma1.value,
                curvature_plus_l2: r.curvature_plus_l2.value,
                weyl_plus_l2: r.weyl_plus_l2.value,
                lhs: r.lhs.value,
                rhs: r.rhs.value,
                slack: r.slack.value,
            },
        )
    })
}

/// Full report with provenance tags, as JSON.
///
/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_report_to_json(report: *const YmgapReport, out: *mut *mut c_char) -> YmgapStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let s = serde_json::to_string(&r.inner).map_err(|e| fail(e.into()))?;
        write_string(out, s)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_thresholds(
    group: YmgapGroup,
    kappa_abs: f64,
    yamabe: f64,
    gamma1: f64,
    out: *mut YmgapThresholds,
) -> YmgapStatus {
    guard(|| {
        let g = match group {
            YmgapGroup::Su2 => StructureGroup::Su2,
            YmgapGroup::So3 => StructureGroup::So3,
        };
        let t = corollary_thresholds(&g, kappa_abs, yamabe, gamma1).map_err(fail)?;
        write(
            out,
            YmgapThresholds {
                general: t.general,
                specialized: t.specialized.unwrap_or(f64::NAN),
                universal: t.universal,
            },
        )
    })
}

/// `energy < 16 pi^2`.
#[no_mangle]
pub extern "C" fn ymgap_flow_admissible(energy: f64) -> bool {
    flow_admissible(energy)
}

/// First eigenvalue of `-6 Delta + Phi` on the round `S^4` for a radial `Phi`
/// sampled at increasing `rho` in `[0, pi]` (linear interpolation in between).
///
/// # Safety
/// `rho` and `phi` must each point to `len` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_lambda1(
    rho: *const f64,
    phi: *const f64,
    len: usize,
    nodes: usize,
    out: *mut f64,
) -> YmgapStatus {
    guard(|| {
        if rho.is_null() || phi.is_null() {
            return Err(null("samples"));
        }
        let rho = std::slice::from_raw_parts(rho, len).to_vec();
        let phi = std::slice::from_raw_parts(phi, len).to_vec();
        let f = RadialFunction::sampled(rho, phi).map_err(fail)?;
        let grid = PolarGrid::new(nodes).map_err(fail)?;
        let pair = lambda1(&SLProblem::round(grid, &f).map_err(fail)?).map_err(fail)?;
        write(out, pair.value)
    })
}

/// Runs one verification suite; the result is written as JSON and `passed` is set.
///
/// # Safety
/// `cfg` must be a live handle, `name` NUL-terminated, outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ymgap_run_suite(
    cfg: *const YmgapConfig,
    name: *const c_char,
    json: *mut *mut c_char,
    passed: *mut bool,
) -> YmgapStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        if name.is_null() {
            return Err(null("name"));
        }
        let n = CStr::from_ptr(name).to_str().map_err(|_| invalid("name is not UTF-8".into()))?;
        let mut r = run_suite(n, c).map_err(fail)?;
        r.runtime_seconds = None;
        r.checks.retain(|c| !c.timing);
        write(passed, r.passed)?;
        write_string(json, serde_json::to_string(&r).map_err(|e| fail(e.into()))?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_are_reported_per_thread() {
        unsafe {
            let mut out = 0.0;
            assert_eq!(ymgap_energy(std::ptr::null(), &mut out), YmgapStatus::NullPointer);
            let msg = CStr::from_ptr(ymgap_last_error()).to_str().unwrap().to_string();
            assert!(msg.contains("config"));
            std::thread::spawn(|| {
                let msg = CStr::from_ptr(ymgap_last_error()).to_str().unwrap();
                assert!(msg.is_empty());
            })
            .join()
            .unwrap();
        }
    }

    #[test]
    fn panics_become_status_codes() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, YmgapStatus::Panic);
        let msg = unsafe { CStr::from_ptr(ymgap_last_error()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }
}
