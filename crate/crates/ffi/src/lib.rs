//! C ABI over `mvgraph`.
//!
//! Corpora and constraint sets live behind opaque handles. Every fallible
//! function returns an [`MvgStatus`]; on failure a message is available from
//! [`mvg_last_error`] on the calling thread. Reports are returned as
//! NUL-terminated JSON strings, identical to the CLI's `--json` output, and
//! must be released with [`mvg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use mvgraph::analysis::{mcheck_mv, pcheck_m_mv, pcheck_mv, LcpMode};
use mvgraph::baseline::{mcheck_svm, pcheck_m_svm, pcheck_svm};
use mvgraph::graph::Pattern;
use mvgraph::io::report::{model_view, tagged_json, to_json};
use mvgraph::io::{parse_constraints, parse_corpus, write_corpus, FormatError};
use mvgraph::mvm::{comb, MultiVersionModel};
use mvgraph::versioning::ModelVersioning;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Validation = 4,
    UnknownVersion = 5,
    Analysis = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvgMode {
    Mvm = 0,
    Svm = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvgLcp {
    All = 0,
    Single = 1,
}

impl From<MvgLcp> for LcpMode {
    fn from(l: MvgLcp) -> Self {
        match l {
            MvgLcp::All => LcpMode::All,
            MvgLcp::Single => LcpMode::Single,
        }
    }
}

/// A parsed, validated versioning. The multi-version model is built on first use.
pub struct MvgCorpus {
    versioning: ModelVersioning,
    mvm: OnceLock<MultiVersionModel>,
}

/// Violation patterns typed over one corpus' type graph.
pub struct MvgConstraints {
    patterns: Vec<Pattern>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(MvgStatus, String);

type FfiResult<T> = Result<T, Fail>;

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, mapping failures and panics to a status plus last-error message.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> MvgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MvgStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            MvgStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(MvgStatus::NullArgument, format!("`{what}` is null"))
}

fn format_fail(e: FormatError) -> Fail {
    let status = match e {
        FormatError::Syntax { .. } | FormatError::FormatTag { .. } => MvgStatus::Syntax,
        FormatError::Graph(_) | FormatError::Validation(_) => MvgStatus::Validation,
    };
    Fail(status, e.to_string())
}

fn analysis_fail(e: impl std::fmt::Display) -> Fail {
    Fail(MvgStatus::Analysis, e.to_string())
}

/// # Safety
/// `data` must be null or point to `len` readable bytes.
unsafe fn bytes<'a>(data: *const u8, len: usize) -> FfiResult<&'a [u8]> {
    if data.is_null() {
        return Err(null("data"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// # Safety
/// `p` must be null or a live handle created by this library.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn emit_string(out: *mut *mut c_char, bytes: Vec<u8>) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    let s = CString::new(bytes)
        .map_err(|_| Fail(MvgStatus::Analysis, "output contains NUL".to_owned()))?;
    *out = s.into_raw();
    Ok(())
}

impl MvgCorpus {
    fn mvm(&self) -> FfiResult<&MultiVersionModel> {
        if let Some(m) = self.mvm.get() {
            return Ok(m);
        }
        let m = comb(&self.versioning).map_err(analysis_fail)?;
        Ok(self.mvm.get_or_init(|| m))
    }
}

/// Parses and validates a corpus document. On success `*out` receives a
/// handle to release with [`mvg_corpus_free`].
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_corpus_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut MvgCorpus,
) -> MvgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let versioning = parse_corpus(bytes(data, len)?).map_err(format_fail)?;
        let corpus = Box::new(MvgCorpus {
            versioning,
            mvm: OnceLock::new(),
        });
        *out = Box::into_raw(corpus);
        Ok(())
    })
}

/// # Safety
/// `corpus` must be null or a handle from [`mvg_corpus_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mvg_corpus_free(corpus: *mut MvgCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of versions in the corpus, or 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a live corpus handle.
#[no_mangle]
pub unsafe extern "C" fn mvg_corpus_version_count(corpus: *const MvgCorpus) -> usize {
    corpus
        .as_ref()
        .map_or(0, |c| c.versioning.version_ids().len())
}

/// Canonical corpus document.
///
/// # Safety
/// `corpus` must be a live corpus handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_corpus_write(
    corpus: *const MvgCorpus,
    out: *mut *mut c_char,
) -> MvgStatus {
    guard(|| {
        let c = handle(corpus, "corpus")?;
        emit_string(out, write_corpus(&c.versioning))
    })
}

/// Parses a constraint document against the corpus' type graph.
///
/// # Safety
/// `corpus` must be a live corpus handle, `data` must point to `len`
/// readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_constraints_parse(
    corpus: *const MvgCorpus,
    data: *const u8,
    len: usize,
    out: *mut *mut MvgConstraints,
) -> MvgStatus {
    guard(|| {
        let c = handle(corpus, "corpus")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let patterns =
            parse_constraints(bytes(data, len)?, c.versioning.type_graph()).map_err(format_fail)?;
        *out = Box::into_raw(Box::new(MvgConstraints { patterns }));
        Ok(())
    })
}

/// # Safety
/// `constraints` must be null or a handle from [`mvg_constraints_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mvg_constraints_free(constraints: *mut MvgConstraints) {
    if !constraints.is_null() {
        drop(Box::from_raw(constraints));
    }
}

/// Violations in every version as a JSON array.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_check(
    corpus: *const MvgCorpus,
    constraints: *const MvgConstraints,
    mode: MvgMode,
    out: *mut *mut c_char,
) -> MvgStatus {
    guard(|| {
        let c = handle(corpus, "corpus")?;
        let k = handle(constraints, "constraints")?;
        let mut results = Vec::with_capacity(k.patterns.len());
        for p in &k.patterns {
            let mut r = match mode {
                MvgMode::Mvm => pcheck_mv(c.mvm()?, p),
                MvgMode::Svm => pcheck_svm(&c.versioning, p),
            }
            .map_err(analysis_fail)?;
            r.sort();
            results.push((p.name(), r));
        }
        emit_string(out, tagged_json(&results))
    })
}

/// Insert-delete conflicts for every mergeable version pair as a JSON array.
///
/// # Safety
/// `corpus` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_conflicts(
    corpus: *const MvgCorpus,
    mode: MvgMode,
    lcp: MvgLcp,
    out: *mut *mut c_char,
) -> MvgStatus {
    guard(|| {
        let c = handle(corpus, "corpus")?;
        let mut r = match mode {
            MvgMode::Mvm => mcheck_mv(c.mvm()?, lcp.into()),
            MvgMode::Svm => mcheck_svm(&c.versioning, lcp.into()),
        };
        r.sort();
        emit_string(out, to_json(&r))
    })
}

/// Violations in the deletion-favouring merges as a JSON array.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_merge_check(
    corpus: *const MvgCorpus,
    constraints: *const MvgConstraints,
    mode: MvgMode,
    lcp: MvgLcp,
    out: *mut *mut c_char,
) -> MvgStatus {
    guard(|| {
        let c = handle(corpus, "corpus")?;
        let k = handle(constraints, "constraints")?;
        let mut results = Vec::with_capacity(k.patterns.len());
        for p in &k.patterns {
            let mut r = match mode {
                MvgMode::Mvm => pcheck_m_mv(c.mvm()?, p, lcp.into()),
                MvgMode::Svm => pcheck_m_svm(&c.versioning, p, lcp.into()),
            }
            .map_err(analysis_fail)?;
            r.sort();
            results.push((p.name(), r));
        }
        emit_string(out, tagged_json(&results))
    })
}

/// One version, extracted from the multi-version model, as JSON.
///
/// # Safety
/// `corpus` must be live, `version` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mvg_project(
    corpus: *const MvgCorpus,
    version: *const c_char,
    out: *mut *mut c_char,
) -> MvgStatus {
    guard(|| {
        let c = handle(corpus, "corpus")?;
        if version.is_null() {
            return Err(null("version"));
        }
        let id = CStr::from_ptr(version)
            .to_str()
            .map_err(|e| Fail(MvgStatus::InvalidUtf8, e.to_string()))?;
        let m = c
            .mvm()?
            .proj(id)
            .map_err(|e| Fail(MvgStatus::UnknownVersion, e.to_string()))?;
        emit_string(out, to_json(&model_view(id, &m)))
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mvg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mvg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mvg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
