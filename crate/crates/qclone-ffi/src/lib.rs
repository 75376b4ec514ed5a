//! C bindings for the qclone library.
//!
//! Every fallible entry point returns a QcStatus and writes its result
//! through an out-pointer. Strings returned through `char **` are owned by
//! the caller and must be released with qc_string_free(); family handles
//! with qc_family_free(). The generated header is committed at
//! `include/qclone.h` and regenerated by the build script.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qclone::family::{FamilyBundle, Variant};
use qclone::report::{ExperimentReport, FamiliesReport};
use qclone::strategies::{analytic_scores, run_experiment, RunConfig};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum QcStatus {
    /// The call succeeded.
    QC_OK = 0,
    /// A pointer was null or a parameter was out of range.
    QC_INVALID_ARGUMENT = 1,
    /// An internal invariant failed.
    QC_INTERNAL_ERROR = 2,
}

/// Function family selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum QcVariant {
    /// The family whose base level is n = 3.
    QC_VARIANT_A = 0,
    /// The family whose base level is n = 2.
    QC_VARIANT_B = 1,
}

/// Opaque handle to a function family at a fixed level.
pub struct QcFamily {
    bundle: FamilyBundle,
}

/// Cardinalities of one family.
#[repr(C)]
pub struct QcFamilyCounts {
    /// Oracle input bits.
    pub n: usize,
    /// Candidates for the first hidden function (always 3).
    pub s_f0: usize,
    /// Size of the s1 basis (2^n).
    pub s1: usize,
    /// Size of the s2 basis (2^n).
    pub s2: usize,
    /// Candidates for the later hidden functions (2^(n+1)).
    pub s_f12: usize,
    /// Answer pairs (2^n).
    pub h_sets: usize,
}

/// Optimal cloning data for one family.
#[repr(C)]
pub struct QcEfficiencies {
    /// Maximal per-state cloning efficiencies.
    pub gamma: [f64; 3],
    /// Mean flag-success probability over a uniform input.
    pub p_success: f64,
    /// Posterior over the candidates after a failure flag.
    pub posterior: [f64; 3],
    /// Smallest eigenvalue of the achievability residual at the optimum.
    pub min_residual_eig: f64,
}

/// Analytic success probabilities at the optimal efficiencies.
#[repr(C)]
pub struct QcAnalytic {
    /// Best no-cloning success probability.
    pub p1: f64,
    /// Cloning-strategy success probability.
    pub p2: f64,
    /// Alternative cloning constant, or NaN when the family defines none.
    pub p2_alt: f64,
    /// Flag-success probability of the cloner.
    pub p_success: f64,
    /// Top posterior weight after a failure flag.
    pub posterior_top: f64,
}

/// Aggregate counts of one seeded simulation.
#[repr(C)]
pub struct QcSimulation {
    /// Trials per strategy.
    pub trials: u64,
    /// Wins of the no-cloning strategy.
    pub no_cloning_successes: u64,
    /// Wins of the cloning strategy.
    pub cloning_successes: u64,
    /// Trials whose clone attempt flagged success.
    pub flag_successes: u64,
    /// Trials whose clone attempt flagged failure.
    pub flag_failures: u64,
    /// Empirical no-cloning win rate.
    pub no_cloning_rate: f64,
    /// Empirical cloning win rate.
    pub cloning_rate: f64,
    /// Analytic no-cloning score.
    pub no_cloning_analytic: f64,
    /// Analytic cloning score.
    pub cloning_analytic: f64,
}

fn to_variant(v: QcVariant) -> Variant {
    match v {
        QcVariant::QC_VARIANT_A => Variant::A,
        QcVariant::QC_VARIANT_B => Variant::B,
    }
}

fn status_of(e: &qclone::Error) -> QcStatus {
    use qclone::Error;
    match e {
        Error::InvalidN { .. }
        | Error::NMismatch { .. }
        | Error::BadTable(_)
        | Error::BadGammas(_)
        | Error::BadConfig(_) => QcStatus::QC_INVALID_ARGUMENT,
        _ => QcStatus::QC_INTERNAL_ERROR,
    }
}

fn guard(f: impl FnOnce() -> QcStatus) -> QcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(QcStatus::QC_INTERNAL_ERROR)
}

/// Writes `s` to `out` as a heap C string; the caller frees it.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> QcStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            QcStatus::QC_OK
        }
        Err(_) => QcStatus::QC_INTERNAL_ERROR,
    }
}

/// Builds the family `variant` at level `n` and writes a handle to `out`.
///
/// # Safety
/// `out` must be a valid pointer to a `QcFamily *`.
#[no_mangle]
pub unsafe extern "C" fn qc_family_new(
    variant: QcVariant,
    n: usize,
    out: *mut *mut QcFamily,
) -> QcStatus {
    if out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| match FamilyBundle::build(to_variant(variant), n) {
        Ok(bundle) => {
            *out = Box::into_raw(Box::new(QcFamily { bundle }));
            QcStatus::QC_OK
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a family handle; accepts null.
///
/// # Safety
/// `family` must be null or a pointer from qc_family_new(), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_family_free(family: *mut QcFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Writes the family's cardinalities to `out`.
///
/// # Safety
/// `family` must come from qc_family_new(); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_family_counts(
    family: *const QcFamily,
    out: *mut QcFamilyCounts,
) -> QcStatus {
    if family.is_null() || out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| {
        let b = &(*family).bundle;
        *out = QcFamilyCounts {
            n: b.n(),
            s_f0: b.s_f0().len(),
            s1: b.s1().len(),
            s2: b.s2().len(),
            s_f12: b.s_f12().len(),
            h_sets: b.h_sets().len(),
        };
        QcStatus::QC_OK
    })
}

/// Looks up the answer-pair index of a function given as a truth-table
/// string of '0'/'1' characters of length 2^n (entry k is the value at
/// input k). Writes the index, or -1 when the function lies outside the
/// answer space.
///
/// # Safety
/// `family` must come from qc_family_new(); `table` must be a valid
/// NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_family_h_set_of(
    family: *const QcFamily,
    table: *const c_char,
    out: *mut isize,
) -> QcStatus {
    if family.is_null() || table.is_null() || out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| {
        let Ok(text) = CStr::from_ptr(table).to_str() else {
            return QcStatus::QC_INVALID_ARGUMENT;
        };
        let f = match text.parse::<qclone::BoolFunc>() {
            Ok(f) => f,
            Err(e) => return status_of(&e),
        };
        match (*family).bundle.h_set_of(&f) {
            Ok(found) => {
                *out = found.map_or(-1, |i| i as isize);
                QcStatus::QC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Writes the full family listing as a JSON document.
///
/// # Safety
/// `family` must come from qc_family_new(); `out` must be valid. The
/// string is released with qc_string_free().
#[no_mangle]
pub unsafe extern "C" fn qc_family_to_json(
    family: *const QcFamily,
    out: *mut *mut c_char,
) -> QcStatus {
    if family.is_null() || out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| write_string(out, FamiliesReport::new(&(*family).bundle).to_json()))
}

/// Computes the maximal cloning efficiencies for `variant` at level `n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_efficiencies(
    variant: QcVariant,
    n: usize,
    out: *mut QcEfficiencies,
) -> QcStatus {
    if out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| match qclone::optimal_spec(to_variant(variant), n) {
        Ok((_, spec)) => {
            let mut gamma = [0.0; 3];
            gamma.copy_from_slice(spec.gammas());
            let mut posterior = [0.0; 3];
            posterior.copy_from_slice(&spec.failure_posterior());
            *out = QcEfficiencies {
                gamma,
                p_success: spec.success_probability(),
                posterior,
                min_residual_eig: spec.min_residual_eig(spec.gammas()),
            };
            QcStatus::QC_OK
        }
        Err(e) => status_of(&e),
    })
}

/// Computes the analytic scores of both strategies at the optimal
/// efficiencies.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_analytic(
    variant: QcVariant,
    n: usize,
    out: *mut QcAnalytic,
) -> QcStatus {
    if out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| match qclone::optimal_spec(to_variant(variant), n) {
        Ok((_, spec)) => {
            let scores = analytic_scores(to_variant(variant), n, spec.gammas());
            *out = QcAnalytic {
                p1: scores.p1.value,
                p2: scores.p2.value,
                p2_alt: scores.p2_alt.as_ref().map_or(f64::NAN, |s| s.value),
                p_success: scores.p_success.value,
                posterior_top: scores.posterior_top.value,
            };
            QcStatus::QC_OK
        }
        Err(e) => status_of(&e),
    })
}

fn build_config(
    variant: QcVariant,
    n: usize,
    trials: u64,
    seed: u64,
    distinct_f12: bool,
    physical_wrong_branch: bool,
) -> RunConfig {
    let mut config = RunConfig::new(to_variant(variant), n);
    config.trials = trials;
    config.seed = seed;
    config.distinct_f12 = distinct_f12;
    config.physical_wrong_branch = physical_wrong_branch;
    config
}

/// Runs the seeded Monte Carlo comparison and writes aggregate counts.
/// Identical parameters reproduce identical counts.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_simulate(
    variant: QcVariant,
    n: usize,
    trials: u64,
    seed: u64,
    distinct_f12: bool,
    physical_wrong_branch: bool,
    out: *mut QcSimulation,
) -> QcStatus {
    if out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| {
        let config = build_config(variant, n, trials, seed, distinct_f12, physical_wrong_branch);
        match run_experiment(config) {
            Ok(result) => {
                let c = &result.counts;
                let t = c.trials as f64;
                *out = QcSimulation {
                    trials: c.trials,
                    no_cloning_successes: c.nc_success,
                    cloning_successes: c.cl_success,
                    flag_successes: c.flag_success,
                    flag_failures: c.flag_fail,
                    no_cloning_rate: c.nc_success as f64 / t,
                    cloning_rate: c.cl_success as f64 / t,
                    no_cloning_analytic: result.analytic.p1.value,
                    cloning_analytic: result.analytic.p2.value,
                };
                QcStatus::QC_OK
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Runs the seeded Monte Carlo comparison and writes the full report as a
/// JSON document (the same schema the command-line tool prints).
///
/// # Safety
/// `out` must be a valid pointer. The string is released with
/// qc_string_free().
#[no_mangle]
pub unsafe extern "C" fn qc_simulate_json(
    variant: QcVariant,
    n: usize,
    trials: u64,
    seed: u64,
    distinct_f12: bool,
    physical_wrong_branch: bool,
    out: *mut *mut c_char,
) -> QcStatus {
    if out.is_null() {
        return QcStatus::QC_INVALID_ARGUMENT;
    }
    guard(|| {
        let config = build_config(variant, n, trials, seed, distinct_f12, physical_wrong_branch);
        match run_experiment(config) {
            Ok(result) => write_string(out, ExperimentReport::new(&result).to_json()),
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a string returned by this library; accepts null.
///
/// # Safety
/// `s` must be null or an unfreed string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A static, human-readable name for a status code.
#[no_mangle]
pub extern "C" fn qc_status_name(status: QcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        QcStatus::QC_OK => c"ok",
        QcStatus::QC_INVALID_ARGUMENT => c"invalid argument",
        QcStatus::QC_INTERNAL_ERROR => c"internal error",
    };
    s.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn family_lifecycle_and_lookup() {
        unsafe {
            let mut family: *mut QcFamily = ptr::null_mut();
            let status = qc_family_new(QcVariant::QC_VARIANT_B, 2, &mut family);
            assert_eq!(status, QcStatus::QC_OK);
            assert!(!family.is_null());

            let mut counts = std::mem::zeroed::<QcFamilyCounts>();
            assert_eq!(qc_family_counts(family, &mut counts), QcStatus::QC_OK);
            assert_eq!(counts.n, 2);
            assert_eq!(counts.s_f0, 3);
            assert_eq!(counts.s1, 4);
            assert_eq!(counts.s_f12, 8);

            // "0011" is an s2 member, hence inside the answer space.
            let mut idx: isize = -2;
            let table = CString::new("0011").unwrap();
            assert_eq!(qc_family_h_set_of(family, table.as_ptr(), &mut idx), QcStatus::QC_OK);
            assert!(idx >= 0);

            // An s1 member lies outside the answer space.
            let outside = CString::new("0001").unwrap();
            assert_eq!(qc_family_h_set_of(family, outside.as_ptr(), &mut idx), QcStatus::QC_OK);
            assert_eq!(idx, -1);

            // A wrong-length table is rejected.
            let wrong = CString::new("01").unwrap();
            assert_eq!(
                qc_family_h_set_of(family, wrong.as_ptr(), &mut idx),
                QcStatus::QC_INVALID_ARGUMENT
            );

            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(qc_family_to_json(family, &mut json), QcStatus::QC_OK);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"variant\""));
            qc_string_free(json);

            qc_family_free(family);
        }
    }

    #[test]
    fn rejects_null_and_bad_level() {
        unsafe {
            assert_eq!(
                qc_family_new(QcVariant::QC_VARIANT_A, 3, ptr::null_mut()),
                QcStatus::QC_INVALID_ARGUMENT
            );
            let mut family: *mut QcFamily = ptr::null_mut();
            // Family A starts at n = 3.
            assert_eq!(
                qc_family_new(QcVariant::QC_VARIANT_A, 2, &mut family),
                QcStatus::QC_INVALID_ARGUMENT
            );
            assert!(family.is_null());
        }
    }

    #[test]
    fn efficiencies_match_golden_values() {
        unsafe {
            let mut eff = std::mem::zeroed::<QcEfficiencies>();
            assert_eq!(qc_efficiencies(QcVariant::QC_VARIANT_A, 3, &mut eff), QcStatus::QC_OK);
            assert!((eff.gamma[0] - 7.0 / 127.0).abs() < 1e-8);
            assert!((eff.gamma[1] - 112.0 / 127.0).abs() < 1e-8);
            assert!((eff.p_success - 77.0 / 127.0).abs() < 1e-8);
            assert!((eff.posterior[0] - 0.8).abs() < 1e-8);
            assert!(eff.min_residual_eig.abs() < 1e-8);
        }
    }

    #[test]
    fn analytic_alt_is_nan_only_for_family_a() {
        unsafe {
            let mut a = std::mem::zeroed::<QcAnalytic>();
            assert_eq!(qc_analytic(QcVariant::QC_VARIANT_A, 3, &mut a), QcStatus::QC_OK);
            assert!(a.p2_alt.is_nan());
            assert!(a.p2 > a.p1);

            let mut b = std::mem::zeroed::<QcAnalytic>();
            assert_eq!(qc_analytic(QcVariant::QC_VARIANT_B, 2, &mut b), QcStatus::QC_OK);
            assert!((b.p2_alt - 0.75).abs() < 1e-8);
            assert!((b.p2 - 41.0 / 56.0).abs() < 1e-8);
        }
    }

    #[test]
    fn simulation_is_reproducible() {
        unsafe {
            let mut first = std::mem::zeroed::<QcSimulation>();
            let mut second = std::mem::zeroed::<QcSimulation>();
            let status =
                qc_simulate(QcVariant::QC_VARIANT_B, 2, 20_000, 9, false, false, &mut first);
            assert_eq!(status, QcStatus::QC_OK);
            let status =
                qc_simulate(QcVariant::QC_VARIANT_B, 2, 20_000, 9, false, false, &mut second);
            assert_eq!(status, QcStatus::QC_OK);
            assert_eq!(first.no_cloning_successes, second.no_cloning_successes);
            assert_eq!(first.cloning_successes, second.cloning_successes);
            assert_eq!(first.flag_successes, second.flag_successes);
            assert_eq!(first.trials, 20_000);

            // Zero trials is a configuration error.
            assert_eq!(
                qc_simulate(QcVariant::QC_VARIANT_B, 2, 0, 9, false, false, &mut first),
                QcStatus::QC_INVALID_ARGUMENT
            );
        }
    }

    #[test]
    fn simulate_json_has_the_report_schema() {
        unsafe {
            let mut json: *mut c_char = ptr::null_mut();
            let status =
                qc_simulate_json(QcVariant::QC_VARIANT_A, 3, 5_000, 1, false, false, &mut json);
            assert_eq!(status, QcStatus::QC_OK);
            let text = CStr::from_ptr(json).to_str().unwrap();
            for key in ["config", "no_cloning", "cloning", "flag", "posterior"] {
                assert!(text.contains(&format!("\"{key}\"")), "missing {key}");
            }
            qc_string_free(json);
        }
    }

    #[test]
    fn status_names_are_stable() {
        unsafe {
            let name = CStr::from_ptr(qc_status_name(QcStatus::QC_OK));
            assert_eq!(name.to_str().unwrap(), "ok");
            let name = CStr::from_ptr(qc_status_name(QcStatus::QC_INVALID_ARGUMENT));
            assert_eq!(name.to_str().unwrap(), "invalid argument");
        }
    }
}
