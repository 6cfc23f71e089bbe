//! Validation reports shared by the in-memory and streaming engines.

use std::fmt::Write;

use crate::table::Coordinate;

/// Most coordinates kept as a sample for one violation.
pub const SAMPLE_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// First failing row of a row-based rule.
    Row(usize),
    /// The whole region of a region-based rule.
    Region,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based rule index.
    pub rule: usize,
    pub location: Location,
    /// Rows that failed, for row-based rules. Always 1 for regions.
    pub failing_rows: usize,
    pub sample: Vec<Coordinate>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardKind {
    Unique,
    UniquePerRow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniqueViolation {
    pub token: String,
    pub kind: GuardKind,
    /// Set for per-row violations.
    pub row: Option<usize>,
    pub coords: Vec<Coordinate>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub unique_violations: Vec<UniqueViolation>,
    /// Unique violations seen but not stored.
    pub unique_overflow: usize,
    /// Set when a stream engine stopped evaluating rules early.
    pub halted: Option<String>,
}

fn coords(cs: &[Coordinate]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.unique_violations.is_empty() && self.unique_overflow == 0
    }

    /// Line-oriented form: `RULE <i> ROW <k>: <msg>` and friends.
    pub fn render_machine(&self) -> String {
        let mut s = String::new();
        for v in &self.violations {
            match v.location {
                Location::Row(k) => writeln!(s, "RULE {} ROW {}: {}", v.rule, k, v.message),
                Location::Region => writeln!(s, "RULE {} REGION: {}", v.rule, v.message),
            }
            .unwrap();
        }
        for u in &self.unique_violations {
            match (u.kind, u.row) {
                (GuardKind::UniquePerRow, Some(k)) => {
                    writeln!(s, "UNIQUE-PER-ROW {} ROW {}: {}", u.token, k, coords(&u.coords))
                }
                _ => writeln!(s, "UNIQUE {}: {}", u.token, coords(&u.coords)),
            }
            .unwrap();
        }
        if self.unique_overflow > 0 {
            writeln!(s, "UNIQUE ...: {} more", self.unique_overflow).unwrap();
        }
        if let Some(h) = &self.halted {
            writeln!(s, "HALT: {h}").unwrap();
        }
        s.push_str(if self.is_valid() { "VALID\n" } else { "INVALID\n" });
        s
    }

    pub fn render_text(&self) -> String {
        if self.is_valid() {
            return "valid\n".into();
        }
        let mut s = String::from("invalid\n");
        for v in &self.violations {
            let at = match v.location {
                Location::Row(k) if v.failing_rows > 1 => {
                    format!("row {k} (and {} more rows)", v.failing_rows - 1)
                }
                Location::Row(k) => format!("row {k}"),
                Location::Region => "region".into(),
            };
            writeln!(s, "  rule {} at {}: {}", v.rule, at, v.message).unwrap();
            if !v.sample.is_empty() {
                writeln!(s, "    cells: {}", coords(&v.sample)).unwrap();
            }
        }
        for u in &self.unique_violations {
            match u.row {
                Some(k) => writeln!(s, "  token `{}` occurs more than once in row {k}: {}", u.token, coords(&u.coords)),
                None => writeln!(s, "  token `{}` occurs more than once: {}", u.token, coords(&u.coords)),
            }
            .unwrap();
        }
        if self.unique_overflow > 0 {
            writeln!(s, "  ... {} more uniqueness violations", self.unique_overflow).unwrap();
        }
        if let Some(h) = &self.halted {
            writeln!(s, "  stopped early: {h}").unwrap();
        }
        s
    }
}
