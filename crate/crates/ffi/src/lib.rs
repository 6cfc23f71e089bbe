//! C interface to the sculpt schema engine.
//!
//! Schemas, reports and regions are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns a
//! `SculptStatus`; on failure `sculpt_last_error` describes the problem.
//! Strings returned by the library are released with `sculpt_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sculpt::stream::StreamValidator;
use sculpt::{
    Coordinate, DocumentEvents, Fragment, GuardOptions, Location, PadMode, Schema, StreamMode, StreamOptions, ValidateOptions,
    ValidationReport,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SculptStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// Text that must be UTF-8 is not.
    Utf8 = 2,
    /// The schema does not parse or names undefined tokens.
    Schema = 3,
    /// The schema is outside the fragment the stream mode needs.
    Fragment = 4,
    /// A stream run exceeded its column-set bound.
    Stream = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SculptMode {
    Memory = 0,
    StreamWeak = 1,
    StreamStrong = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SculptPad {
    Trim = 0,
    Literal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SculptFragment {
    Full = 0,
    Forward = 1,
    GuardedForward = 2,
}

/// One failed rule. `row` is 0 when the rule checks its region as a whole.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SculptViolation {
    pub rule: usize,
    pub row: usize,
    pub failing_rows: usize,
}

pub struct SculptSchema {
    schema: Schema,
    source: String,
}

pub struct SculptReport {
    report: ValidationReport,
}

pub struct SculptRegion {
    cells: Vec<Coordinate>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

type Fallible<T> = Result<T, (SculptStatus, String)>;

fn guarded<F: FnOnce() -> Fallible<()>>(f: F) -> SculptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SculptStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            SculptStatus::Internal
        }
    }
}

fn invalid(what: &str) -> (SculptStatus, String) {
    (SculptStatus::InvalidArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Fallible<&'a str> {
    if p.is_null() {
        return Err(invalid(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (SculptStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Fallible<&'a [u8]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(invalid(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn owned_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

// enums arrive as plain integers so a bad value from C is an error, not UB
fn pad_mode(pad: u32) -> Fallible<PadMode> {
    match pad {
        x if x == SculptPad::Trim as u32 => Ok(PadMode::Trim),
        x if x == SculptPad::Literal as u32 => Ok(PadMode::Literal),
        x => Err((SculptStatus::InvalidArgument, format!("unknown pad mode {x}"))),
    }
}

fn stream_mode(mode: u32) -> Fallible<Option<StreamMode>> {
    match mode {
        x if x == SculptMode::Memory as u32 => Ok(None),
        x if x == SculptMode::StreamWeak as u32 => Ok(Some(StreamMode::Weak)),
        x if x == SculptMode::StreamStrong as u32 => Ok(Some(StreamMode::Strong)),
        x => Err((SculptStatus::InvalidArgument, format!("unknown mode {x}"))),
    }
}

/// Why the latest status-returning call on this thread failed; empty after
/// one that succeeded. The pointer stays valid until the next call into the
/// library on this thread.
#[no_mangle]
pub extern "C" fn sculpt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a NUL-terminated schema document.
///
/// # Safety
/// `source` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sculpt_schema_parse(source: *const c_char, out: *mut *mut SculptSchema) -> SculptStatus {
    guarded(|| {
        if out.is_null() {
            return Err(invalid("out"));
        }
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let schema = Schema::parse(src).map_err(|e| (SculptStatus::Schema, e.to_string()))?;
        *out = Box::into_raw(Box::new(SculptSchema {
            schema,
            source: src.to_string(),
        }));
        Ok(())
    })
}

/// # Safety
/// `schema` must come from `sculpt_schema_parse` and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn sculpt_schema_free(schema: *mut SculptSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Number of rules in the schema, or 0 for a null handle.
///
/// # Safety
/// `schema` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_schema_rule_count(schema: *const SculptSchema) -> usize {
    schema.as_ref().map_or(0, |s| s.schema.rules().len())
}

/// Classifies the schema. `strict_guard_text` reads the right-star case as
/// yielding row-guarded only.
///
/// # Safety
/// `schema` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sculpt_analyze(
    schema: *const SculptSchema,
    strict_guard_text: bool,
    out: *mut SculptFragment,
) -> SculptStatus {
    guarded(|| {
        let s = schema.as_ref().ok_or_else(|| invalid("schema"))?;
        let out = out.as_mut().ok_or_else(|| invalid("out"))?;
        *out = match s.schema.analyze(&GuardOptions { strict_guard_text }).fragment {
            Fragment::Full => SculptFragment::Full,
            Fragment::Forward => SculptFragment::Forward,
            Fragment::GuardedForward => SculptFragment::GuardedForward,
        };
        Ok(())
    })
}

/// Per-rule analysis as text, one line per rule plus a summary line.
///
/// # Safety
/// `schema` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_analyze_render(schema: *const SculptSchema, strict_guard_text: bool) -> *mut c_char {
    match schema.as_ref() {
        Some(s) => owned_string(&s.schema.analyze(&GuardOptions { strict_guard_text }).render()),
        None => ptr::null_mut(),
    }
}

fn run(s: &Schema, doc: &[u8], mode: Option<StreamMode>, pad: PadMode) -> Fallible<ValidationReport> {
    let Some(mode) = mode else {
        let t = s.read_table(doc).map_err(|e| (SculptStatus::Utf8, e.to_string()))?;
        return Ok(s.validate(&t, ValidateOptions { pad }));
    };
    let opts = StreamOptions {
        mode,
        pad,
        guard: GuardOptions::default(),
    };
    let mut v = StreamValidator::new(s, &opts).map_err(|e| (SculptStatus::Fragment, e.to_string()))?;
    let text = std::str::from_utf8(doc).map_err(|e| (SculptStatus::Utf8, e.to_string()))?;
    for ev in DocumentEvents::new(text, s.delimiters(), s.token_defs()) {
        v.feed(&ev).map_err(|e| (SculptStatus::Stream, e.to_string()))?;
    }
    Ok(v.finish().0)
}

/// Validates `len` bytes of document text. `mode` is a `SculptMode` and
/// `pad` a `SculptPad` value.
///
/// # Safety
/// `schema` must be a live handle, `doc` must point to `len` readable bytes
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sculpt_validate(
    schema: *const SculptSchema,
    doc: *const u8,
    len: usize,
    mode: u32,
    pad: u32,
    out: *mut *mut SculptReport,
) -> SculptStatus {
    guarded(|| {
        if out.is_null() {
            return Err(invalid("out"));
        }
        *out = ptr::null_mut();
        let s = schema.as_ref().ok_or_else(|| invalid("schema"))?;
        let report = run(&s.schema, bytes(doc, len, "doc")?, stream_mode(mode)?, pad_mode(pad)?)?;
        *out = Box::into_raw(Box::new(SculptReport { report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_report_is_valid(report: *const SculptReport) -> bool {
    report.as_ref().is_some_and(|r| r.report.is_valid())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_report_violation_count(report: *const SculptReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.violations.len())
}

/// Number of uniqueness violations, including any a stream run only counted.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_report_unique_violation_count(report: *const SculptReport) -> usize {
    report
        .as_ref()
        .map_or(0, |r| r.report.unique_violations.len() + r.report.unique_overflow)
}

/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sculpt_report_violation(
    report: *const SculptReport,
    index: usize,
    out: *mut SculptViolation,
) -> SculptStatus {
    guarded(|| {
        let r = report.as_ref().ok_or_else(|| invalid("report"))?;
        let out = out.as_mut().ok_or_else(|| invalid("out"))?;
        let v = r.report.violations.get(index).ok_or_else(|| {
            (
                SculptStatus::InvalidArgument,
                format!("violation {index} out of range ({} total)", r.report.violations.len()),
            )
        })?;
        *out = SculptViolation {
            rule: v.rule,
            row: match v.location {
                Location::Row(k) => k,
                Location::Region => 0,
            },
            failing_rows: v.failing_rows,
        };
        Ok(())
    })
}

/// The report as text: the line-oriented machine format when `machine` is
/// set, the human-readable one otherwise.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_report_render(report: *const SculptReport, machine: bool) -> *mut c_char {
    match report.as_ref() {
        Some(r) if machine => owned_string(&r.report.render_machine()),
        Some(r) => owned_string(&r.report.render_text()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `report` must come from `sculpt_validate` and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn sculpt_report_free(report: *mut SculptReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Evaluates a coordinate expression over a document, using the schema's
/// delimiters, token definitions and token types. `schema` may be null.
///
/// # Safety
/// `expr` must be a valid C string, `doc` must point to `len` readable bytes
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sculpt_select(
    schema: *const SculptSchema,
    expr: *const c_char,
    doc: *const u8,
    len: usize,
    out: *mut *mut SculptRegion,
) -> SculptStatus {
    guarded(|| {
        if out.is_null() {
            return Err(invalid("out"));
        }
        *out = ptr::null_mut();
        let expr = text(expr, "expr")?;
        let mut src = schema.as_ref().map_or_else(String::new, |s| s.source.clone());
        if !src.is_empty() && !src.ends_with('\n') {
            src.push('\n');
        }
        src.push_str(&format!("{expr} -> True*\n"));
        let s = Schema::parse(&src).map_err(|e| (SculptStatus::Schema, e.to_string()))?;
        let t = s
            .read_table(bytes(doc, len, "doc")?)
            .map_err(|e| (SculptStatus::Utf8, e.to_string()))?;
        let rule = s.rules().last().ok_or_else(|| (SculptStatus::Internal, "no rule".to_string()))?;
        let cells = rule.program.eval(&t).iter().collect();
        *out = Box::into_raw(Box::new(SculptRegion { cells }));
        Ok(())
    })
}

/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sculpt_region_len(region: *const SculptRegion) -> usize {
    region.as_ref().map_or(0, |r| r.cells.len())
}

/// Coordinate `index` of the region in table order, 1-based.
///
/// # Safety
/// `region` must be a live handle; `row` and `col` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sculpt_region_get(
    region: *const SculptRegion,
    index: usize,
    row: *mut usize,
    col: *mut usize,
) -> SculptStatus {
    guarded(|| {
        let r = region.as_ref().ok_or_else(|| invalid("region"))?;
        let (row, col) = (row.as_mut().ok_or_else(|| invalid("row"))?, col.as_mut().ok_or_else(|| invalid("col"))?);
        let c = r
            .cells
            .get(index)
            .ok_or_else(|| (SculptStatus::InvalidArgument, format!("cell {index} out of range")))?;
        (*row, *col) = (c.row, c.col);
        Ok(())
    })
}

/// # Safety
/// `region` must come from `sculpt_select` and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn sculpt_region_free(region: *mut SculptRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not freed already.
#[no_mangle]
pub unsafe extern "C" fn sculpt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
