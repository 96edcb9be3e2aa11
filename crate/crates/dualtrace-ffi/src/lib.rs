//! C ABI over the dualtrace pipeline.
//!
//! Handles are opaque; every fallible call returns a `DtStatus` and the
//! last failure's message is retrievable per thread via
//! `dt_last_error_message`. Strings returned to callers must be released
//! with `dt_string_free`, handles with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;

use dualtrace::analyzer::{analyze_dual_trace, AnalysisOutput, MaxMatchSegmenter};
use dualtrace::error::LogError;
use dualtrace::hybridizer::hybridize;
use dualtrace::simulator::{parse_script, run_session, Layout, Lexicon, SessionConfig};
use dualtrace::trace::{
    dual_trace_to_string, keystroke_log_to_string, parse_dual_trace, parse_keystroke_log,
    parse_text_log, text_log_to_string, DualTraceEvent,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum DtStatus {
    DtOk = 0,
    DtNullArgument = 1,
    DtInvalidUtf8 = 2,
    DtParseError = 3,
    DtIntegrityError = 4,
    DtHybridizeError = 5,
    DtAnalysisError = 6,
    DtScriptError = 7,
    DtIoError = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstring = CString::new(msg.replace('\0', "?")).expect("nul-free");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn log_error_status(e: &LogError) -> DtStatus {
    match e {
        LogError::Malformed { .. } | LogError::Schema { .. } => DtStatus::DtParseError,
        LogError::Integrity { .. } => DtStatus::DtIntegrityError,
        LogError::Io(_) => DtStatus::DtIoError,
    }
}

/// Aligned dual trace (opaque).
pub struct DtDualTrace {
    events: Vec<DualTraceEvent>,
}

/// Metrics report plus diagnostics (opaque).
pub struct DtReport {
    analysis: AnalysisOutput,
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, DtStatus> {
    if ptr.is_null() {
        set_error("null argument".to_string());
        return Err(DtStatus::DtNullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".to_string());
        DtStatus::DtInvalidUtf8
    })
}

fn open_reader(path: &str) -> Result<BufReader<File>, DtStatus> {
    File::open(path).map(BufReader::new).map_err(|e| {
        set_error(format!("{path}: {e}"));
        DtStatus::DtIoError
    })
}

fn load_lexicon(path: Option<&str>) -> Result<Lexicon, DtStatus> {
    match path {
        None => Ok(Lexicon::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                set_error(format!("{p}: {e}"));
                DtStatus::DtIoError
            })?;
            Lexicon::parse(&text).map_err(|e| {
                set_error(e.to_string());
                DtStatus::DtParseError
            })
        }
    }
}

/// Last error message for this thread, or null. Free with `dt_string_free`.
#[no_mangle]
pub extern "C" fn dt_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a dualtrace function and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn dt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Align a keystroke log file with a text log file into a dual trace.
///
/// # Safety
/// `keys_path` and `text_path` must be valid NUL-terminated strings;
/// `out` must be a valid location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn dt_hybridize_files(
    keys_path: *const c_char,
    text_path: *const c_char,
    out: *mut *mut DtDualTrace,
) -> DtStatus {
    if out.is_null() {
        set_error("null output handle".to_string());
        return DtStatus::DtNullArgument;
    }
    let keys_path = match cstr_arg(keys_path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let text_path = match cstr_arg(text_path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let keys = match open_reader(keys_path).and_then(|r| {
        parse_keystroke_log(r).map_err(|e| {
            set_error(e.to_string());
            log_error_status(&e)
        })
    }) {
        Ok(k) => k,
        Err(status) => return status,
    };
    let snapshots = match open_reader(text_path).and_then(|r| {
        parse_text_log(r).map_err(|e| {
            set_error(e.to_string());
            log_error_status(&e)
        })
    }) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match hybridize(&keys, &snapshots) {
        Ok((events, _diagnostics)) => {
            *out = Box::into_raw(Box::new(DtDualTrace { events }));
            DtStatus::DtOk
        }
        Err(e) => {
            set_error(e.to_string());
            match e {
                dualtrace::error::HybridizeError::MismatchedLogs { .. } => {
                    DtStatus::DtIntegrityError
                }
                _ => DtStatus::DtHybridizeError,
            }
        }
    }
}

/// Load a dual trace from a file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dt_dual_trace_load(
    path: *const c_char,
    out: *mut *mut DtDualTrace,
) -> DtStatus {
    if out.is_null() {
        set_error("null output handle".to_string());
        return DtStatus::DtNullArgument;
    }
    let path = match cstr_arg(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match open_reader(path).and_then(|r| {
        parse_dual_trace(r).map_err(|e| {
            set_error(e.to_string());
            log_error_status(&e)
        })
    }) {
        Ok(events) => {
            *out = Box::into_raw(Box::new(DtDualTrace { events }));
            DtStatus::DtOk
        }
        Err(status) => status,
    }
}

/// Number of events in a dual trace.
///
/// # Safety
/// `trace` must be a live handle from this library (or null, yielding 0).
#[no_mangle]
pub unsafe extern "C" fn dt_dual_trace_len(trace: *const DtDualTrace) -> u64 {
    if trace.is_null() {
        return 0;
    }
    (*trace).events.len() as u64
}

/// Write a dual trace to a file in the line-delimited trace schema.
///
/// # Safety
/// `trace` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dt_dual_trace_write(
    trace: *const DtDualTrace,
    path: *const c_char,
) -> DtStatus {
    if trace.is_null() {
        set_error("null trace handle".to_string());
        return DtStatus::DtNullArgument;
    }
    let path = match cstr_arg(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match std::fs::write(path, dual_trace_to_string(&(*trace).events)) {
        Ok(()) => DtStatus::DtOk,
        Err(e) => {
            set_error(format!("{path}: {e}"));
            DtStatus::DtIoError
        }
    }
}

/// Release a dual trace handle.
///
/// # Safety
/// `trace` must be a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn dt_dual_trace_free(trace: *mut DtDualTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Analyze a dual trace. `lexicon_path` may be null for an empty lexicon.
///
/// # Safety
/// `trace` must be a live handle; paths valid or null as documented; `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn dt_analyze(
    trace: *const DtDualTrace,
    lexicon_path: *const c_char,
    outlier_sd: f64,
    out: *mut *mut DtReport,
) -> DtStatus {
    if trace.is_null() || out.is_null() {
        set_error("null handle".to_string());
        return DtStatus::DtNullArgument;
    }
    let lexicon_path = if lexicon_path.is_null() {
        None
    } else {
        match cstr_arg(lexicon_path) {
            Ok(s) => Some(s),
            Err(status) => return status,
        }
    };
    let lexicon = match load_lexicon(lexicon_path) {
        Ok(l) => l,
        Err(status) => return status,
    };
    let segmenter = MaxMatchSegmenter::from_lexicon(&lexicon);
    match analyze_dual_trace(&(*trace).events, &segmenter, outlier_sd) {
        Ok(analysis) => {
            *out = Box::into_raw(Box::new(DtReport { analysis }));
            DtStatus::DtOk
        }
        Err(e) => {
            set_error(e.to_string());
            DtStatus::DtAnalysisError
        }
    }
}

/// The metrics report as CSV. Free with `dt_string_free`.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dt_report_csv(report: *const DtReport) -> *mut c_char {
    if report.is_null() {
        return std::ptr::null_mut();
    }
    CString::new((*report).analysis.report.to_csv().replace('\0', "?"))
        .expect("nul-free")
        .into_raw()
}

/// The metrics report as an aligned text table. Free with `dt_string_free`.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dt_report_table(report: *const DtReport) -> *mut c_char {
    if report.is_null() {
        return std::ptr::null_mut();
    }
    CString::new((*report).analysis.report.to_table().replace('\0', "?"))
        .expect("nul-free")
        .into_raw()
}

/// Alignment diagnostics as JSON. Free with `dt_string_free`.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dt_report_diagnostics_json(report: *const DtReport) -> *mut c_char {
    if report.is_null() {
        return std::ptr::null_mut();
    }
    CString::new((*report).analysis.diagnostics.to_json().replace('\0', "?"))
        .expect("nul-free")
        .into_raw()
}

/// Release a report handle.
///
/// # Safety
/// `report` must be a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn dt_report_free(report: *mut DtReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Replay a session script into paired log files.
///
/// # Safety
/// All path arguments must be valid NUL-terminated strings;
/// `lexicon_path` and `initial_text` may be null.
#[no_mangle]
pub unsafe extern "C" fn dt_simulate_files(
    script_path: *const c_char,
    lexicon_path: *const c_char,
    pinyin_layout: bool,
    initial_text: *const c_char,
    start_ms: u64,
    out_keys_path: *const c_char,
    out_text_path: *const c_char,
) -> DtStatus {
    let script_path = match cstr_arg(script_path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let out_keys_path = match cstr_arg(out_keys_path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let out_text_path = match cstr_arg(out_text_path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let lexicon_path = if lexicon_path.is_null() {
        None
    } else {
        match cstr_arg(lexicon_path) {
            Ok(s) => Some(s),
            Err(status) => return status,
        }
    };
    let initial = if initial_text.is_null() {
        String::new()
    } else {
        match cstr_arg(initial_text) {
            Ok(s) => s.to_string(),
            Err(status) => return status,
        }
    };

    let script_text = match std::fs::read_to_string(script_path) {
        Ok(t) => t,
        Err(e) => {
            set_error(format!("{script_path}: {e}"));
            return DtStatus::DtIoError;
        }
    };
    let actions = match parse_script(&script_text) {
        Ok(a) => a,
        Err(e) => {
            set_error(e.to_string());
            return DtStatus::DtScriptError;
        }
    };
    let lexicon = match load_lexicon(lexicon_path) {
        Ok(l) => l,
        Err(status) => return status,
    };
    let config = SessionConfig {
        layout: if pinyin_layout { Layout::Pinyin } else { Layout::Latin },
        initial_text: initial,
        start_ms,
        ..SessionConfig::default()
    };
    let output = match run_session(&actions, &lexicon, &config) {
        Ok(o) => o,
        Err(e) => {
            set_error(e.to_string());
            return DtStatus::DtScriptError;
        }
    };
    if let Err(e) = std::fs::write(out_keys_path, keystroke_log_to_string(&output.key_log)) {
        set_error(format!("{out_keys_path}: {e}"));
        return DtStatus::DtIoError;
    }
    if let Err(e) = std::fs::write(out_text_path, text_log_to_string(&output.text_log)) {
        set_error(format!("{out_text_path}: {e}"));
        return DtStatus::DtIoError;
    }
    DtStatus::DtOk
}
