use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use sculpt_ffi::*;

fn fixture(name: &str) -> Vec<u8> {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    std::fs::read(p).unwrap()
}

fn schema(name: &str) -> *mut SculptSchema {
    let src = CString::new(fixture(name)).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sculpt_schema_parse(src.as_ptr(), &mut out) }, SculptStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sculpt_last_error()) }.to_str().unwrap().to_string()
}

fn validate(s: *const SculptSchema, table: &[u8], mode: SculptMode) -> (SculptStatus, *mut SculptReport) {
    let mut r = ptr::null_mut();
    let st = unsafe { sculpt_validate(s, table.as_ptr(), table.len(), mode as u32, SculptPad::Trim as u32, &mut r) };
    (st, r)
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { sculpt_string_free(p) };
    s
}

#[test]
fn valid_document_in_every_mode() {
    let s = schema("triples_guarded.sculpt");
    assert_eq!(unsafe { sculpt_schema_rule_count(s) }, 5);
    for mode in [SculptMode::Memory, SculptMode::StreamWeak, SculptMode::StreamStrong] {
        let (st, r) = validate(s, &fixture("triples.csv"), mode);
        assert_eq!(st, SculptStatus::Ok, "{mode:?}: {}", last_error());
        assert!(unsafe { sculpt_report_is_valid(r) });
        assert_eq!(unsafe { sculpt_report_violation_count(r) }, 0);
        assert_eq!(take_string(unsafe { sculpt_report_render(r, true) }), "VALID\n");
        unsafe { sculpt_report_free(r) };
    }
    unsafe { sculpt_schema_free(s) };
}

#[test]
fn violations_are_reported_by_rule_and_row() {
    let s = schema("stats.sculpt");
    let (st, r) = validate(s, &fixture("stats.csv"), SculptMode::Memory);
    assert_eq!(st, SculptStatus::Ok);
    assert!(!unsafe { sculpt_report_is_valid(r) });
    assert_eq!(unsafe { sculpt_report_violation_count(r) }, 2);
    let mut v = SculptViolation::default();
    assert_eq!(unsafe { sculpt_report_violation(r, 1, &mut v) }, SculptStatus::Ok);
    assert_eq!(
        v,
        SculptViolation {
            rule: 9,
            row: 10,
            failing_rows: 1
        }
    );
    assert_eq!(unsafe { sculpt_report_violation(r, 2, &mut v) }, SculptStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));
    let text = take_string(unsafe { sculpt_report_render(r, false) });
    assert!(text.starts_with("invalid\n"));
    unsafe { sculpt_report_free(r) };
    unsafe { sculpt_schema_free(s) };
}

#[test]
fn strong_mode_on_unguarded_schema_is_a_fragment_error() {
    let s = schema("triples.sculpt");
    let (st, r) = validate(s, &fixture("triples.csv"), SculptMode::StreamStrong);
    assert_eq!(st, SculptStatus::Fragment);
    assert!(r.is_null());
    assert!(last_error().starts_with("schema not guarded"), "{}", last_error());
    let mut frag = SculptFragment::Full;
    assert_eq!(unsafe { sculpt_analyze(s, false, &mut frag) }, SculptStatus::Ok);
    assert_eq!(frag, SculptFragment::Forward);
    assert!(take_string(unsafe { sculpt_analyze_render(s, false) }).ends_with("schema: fragment=forward\n"));
    unsafe { sculpt_schema_free(s) };
}

#[test]
fn select_returns_coordinates_in_table_order() {
    let s = schema("stats.sculpt");
    let expr = CString::new("down+(right+(GeoArea))").unwrap();
    let table = fixture("stats.csv");
    let mut region = ptr::null_mut();
    let st = unsafe { sculpt_select(s, expr.as_ptr(), table.as_ptr(), table.len(), &mut region) };
    assert_eq!(st, SculptStatus::Ok, "{}", last_error());
    let n = unsafe { sculpt_region_len(region) };
    let mut cells = Vec::new();
    for i in 0..n {
        let (mut row, mut col) = (0, 0);
        assert_eq!(unsafe { sculpt_region_get(region, i, &mut row, &mut col) }, SculptStatus::Ok);
        cells.push((row, col));
    }
    assert_eq!(cells, [(9, 3), (9, 4), (10, 3), (10, 4)]);
    unsafe { sculpt_region_free(region) };
    unsafe { sculpt_schema_free(s) };

    // without a schema, names in the expression are literal tokens
    let expr = CString::new("right(a)").unwrap();
    let mut region = ptr::null_mut();
    let st = unsafe { sculpt_select(ptr::null(), expr.as_ptr(), b"a,b\n".as_ptr(), 4, &mut region) };
    assert_eq!(st, SculptStatus::Ok);
    assert_eq!(unsafe { sculpt_region_len(region) }, 1);
    unsafe { sculpt_region_free(region) };
}

#[test]
fn bad_arguments_are_reported_not_trusted() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sculpt_schema_parse(ptr::null(), &mut out) }, SculptStatus::InvalidArgument);
    let bad = CString::new("col(a -> b").unwrap();
    assert_eq!(unsafe { sculpt_schema_parse(bad.as_ptr(), &mut out) }, SculptStatus::Schema);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    let s = schema("climate.sculpt");
    let mut r = ptr::null_mut();
    let table = fixture("climate.csv");
    assert_eq!(
        unsafe { sculpt_validate(s, table.as_ptr(), table.len(), 9, 0, &mut r) },
        SculptStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { sculpt_validate(s, table.as_ptr(), table.len(), 0, 7, &mut r) },
        SculptStatus::InvalidArgument
    );
    let (st, _) = validate(s, b"\xff\xfe", SculptMode::Memory);
    assert_eq!(st, SculptStatus::Utf8);
    let (st, r) = validate(s, &table, SculptMode::Memory);
    assert_eq!(st, SculptStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { sculpt_report_free(r) };
    unsafe { sculpt_schema_free(s) };

    // null handles are harmless where the API says so
    unsafe {
        sculpt_schema_free(ptr::null_mut());
        sculpt_report_free(ptr::null_mut());
        sculpt_region_free(ptr::null_mut());
        sculpt_string_free(ptr::null_mut());
        assert!(!sculpt_report_is_valid(ptr::null()));
        assert_eq!(sculpt_region_len(ptr::null()), 0);
    }
}
