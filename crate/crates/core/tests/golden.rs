//! The figure tables and schemas, end to end.

mod common;

use common::*;

use sculpt::schema::parse_coord_expr;
use sculpt::{
    eval_coord, event_stream, run_strong, run_weak, Coordinate, Fragment, GuardOptions, Location, PadMode, Region, Schema,
    ValidateOptions,
};

fn memory(schema: &str, table: &str) -> sculpt::ValidationReport {
    let s = schema_fixture(schema);
    let t = s.read_table(read_fixture(table).as_bytes()).unwrap();
    s.validate(&t, ValidateOptions::default())
}

fn all_modes_valid(schema: &str, table: &str, strong: bool) {
    let s = schema_fixture(schema);
    let t = s.read_table(read_fixture(table).as_bytes()).unwrap();
    assert!(s.validate(&t, ValidateOptions::default()).is_valid(), "{schema} memory");
    let (weak, _) = run_weak(&s, event_stream(&t), PadMode::Trim).unwrap();
    assert!(weak.is_valid(), "{schema} weak");
    if strong {
        let (r, _) = run_strong(&s, event_stream(&t), PadMode::Trim).unwrap();
        assert!(r.is_valid(), "{schema} strong: {}", r.render_text());
    }
}

#[test]
fn climate_pair_is_valid() {
    all_modes_valid("climate.sculpt", "climate.csv", false);
    all_modes_valid("climate_guarded.sculpt", "climate.csv", true);
}

#[test]
fn stats_pair_as_printed_fails_on_case_and_wales() {
    let r = memory("stats.sculpt", "stats.csv");
    assert_eq!(
        r.render_machine(),
        "RULE 2 ROW 2: content does not match `row(2) -> ctype`\n\
         RULE 9 ROW 10: content does not match `col(GeoID) -> geo_id`\n\
         INVALID\n"
    );
}

#[test]
fn stats_pair_repaired_is_valid() {
    all_modes_valid("stats_repaired.sculpt", "stats.csv", false);
    all_modes_valid("stats_guarded.sculpt", "stats.csv", true);
}

#[test]
fn triples_pair_as_printed_fails_on_object_column() {
    let r = memory("triples.sculpt", "triples.csv");
    assert_eq!(r.violations.len(), 1);
    let v = &r.violations[0];
    assert_eq!((v.rule, v.location, v.failing_rows), (4, Location::Row(2), 4));
}

#[test]
fn triples_pair_repaired_is_valid() {
    all_modes_valid("triples_repaired.sculpt", "triples.csv", false);
    all_modes_valid("triples_guarded.sculpt", "triples.csv", true);
}

#[test]
fn empty_provenance_row_matches() {
    // row 2 ends after the object, so its provenance part is all padding
    let s = schema_fixture("triples_repaired.sculpt");
    let t = s.read_table(read_fixture("triples.csv").as_bytes()).unwrap();
    assert_eq!((t.rows(), t.cols()), (7, 11));
    assert!(t.get(Coordinate::new(2, 4)).is_null());
    let z = s.rules()[4].program.eval(&t);
    assert!(z.contains(Coordinate::new(2, 4)));
    assert!(s.validate(&t, ValidateOptions::default()).is_valid());
    let strict = s.validate(&t, ValidateOptions { pad: PadMode::Literal });
    assert!(strict.violations.iter().any(|v| (v.rule, v.location) == (5, Location::Row(2))));
}

fn cells(rows: usize, cols: usize, cs: &[(usize, usize)]) -> Region {
    Region::from_coords(rows, cols, cs.iter().map(|&(r, c)| Coordinate::new(r, c)))
}

#[test]
fn stats_region_selections() {
    let s = schema_fixture("stats.sculpt");
    let t = s.read_table(read_fixture("stats.csv").as_bytes()).unwrap();
    assert_eq!((t.rows(), t.cols()), (10, 4));
    let ev = |e: &str| eval_coord(&parse_coord_expr(e).unwrap(), &t);
    assert_eq!(ev("GeoArea"), cells(10, 4, &[(8, 2)]));
    assert_eq!(ev("right(GeoArea)"), cells(10, 4, &[(8, 3)]));
    assert_eq!(ev("right+(GeoArea)"), cells(10, 4, &[(8, 3), (8, 4)]));
    assert_eq!(ev("down(right+(GeoArea))"), cells(10, 4, &[(9, 3), (9, 4)]));
    assert_eq!(ev("down+(right+(GeoArea))"), cells(10, 4, &[(9, 3), (9, 4), (10, 3), (10, 4)]));
}

#[test]
fn climate_columns_without_dummies() {
    let s = Schema::parse("dummy = -99\\.00\n").unwrap();
    let t = s.read_table(read_fixture("climate.csv").as_bytes()).unwrap();
    let z = eval_coord(&parse_coord_expr("right+(root) and not up*(dummy)").unwrap(), &t);
    assert_eq!(z, cells(8, 4, &[(1, 4)]));
}

#[test]
fn fragment_classification_of_fixtures() {
    let opts = GuardOptions::default();
    let frag = |f: &str| schema_fixture(f).analyze(&opts).fragment;
    assert_eq!(frag("climate.sculpt"), Fragment::Forward);
    assert_eq!(frag("climate_guarded.sculpt"), Fragment::GuardedForward);
    assert_eq!(frag("stats.sculpt"), Fragment::Forward);
    assert_eq!(frag("stats_guarded.sculpt"), Fragment::GuardedForward);
    assert_eq!(frag("triples.sculpt"), Fragment::Forward);
    assert_eq!(frag("triples_unique.sculpt"), Fragment::GuardedForward);
    let strict = GuardOptions { strict_guard_text: true };
    assert_eq!(schema_fixture("stats_guarded.sculpt").analyze(&strict).fragment, Fragment::Forward);
}

#[test]
fn single_cell_mutations_name_rule_and_row() {
    for (schema, table, muts) in mutation_suite() {
        let s = schema_fixture(schema);
        let src = read_fixture(table);
        assert!(muts.len() >= 10);
        for m in &muts {
            check_mutation(&s, &src, m).unwrap_or_else(|e| panic!("{schema}: {e}"));
        }
    }
}
