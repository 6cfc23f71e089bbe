//! Raw tables: delimiter parsing, padding, and byte-exact serialization.

use std::fmt;

use crate::error::{ParseError, SchemaError};

/// Row and column delimiter pair. Both are single scalar values and must differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Delimiters {
    row: char,
    col: char,
}

impl Delimiters {
    pub fn new(row: char, col: char) -> Result<Self, SchemaError> {
        if row == col {
            return Err(SchemaError::Delimiters(format!(
                "row and column delimiter are both {:?}",
                row
            )));
        }
        Ok(Self { row, col })
    }

    pub fn row(&self) -> char {
        self.row
    }

    pub fn col(&self) -> char {
        self.col
    }
}

impl Default for Delimiters {
    fn default() -> Self {
        Self { row: '\n', col: ',' }
    }
}

/// 1-based cell position. The derived ordering is table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate {
    pub row: usize,
    pub col: usize,
}

impl Coordinate {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellValue {
    Text(String),
    /// Padding cell to the right of a short row.
    Missing,
}

impl CellValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            CellValue::Text(s) => Some(s),
            CellValue::Missing => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, CellValue::Missing)
    }
}

/// Rectangular grid of untokenized cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    rows: usize,
    cols: usize,
    cells: Vec<CellValue>,
    delims: Delimiters,
    // the document ended with a row delimiter; kept so serialization is exact
    trailing_row_delim: bool,
}

impl RawTable {
    /// Builds a table from ragged rows, padding on the right.
    pub fn from_rows<S: AsRef<str>>(rows: &[Vec<S>], delims: Delimiters) -> Self {
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            cells.extend(row.iter().map(|s| CellValue::Text(s.as_ref().to_string())));
            cells.extend(std::iter::repeat_n(CellValue::Missing, cols - row.len()));
        }
        Self {
            rows: rows.len(),
            cols,
            cells,
            delims,
            trailing_row_delim: false,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn delimiters(&self) -> Delimiters {
        self.delims
    }

    pub fn cell(&self, at: Coordinate) -> &CellValue {
        assert!(at.row >= 1 && at.row <= self.rows && at.col >= 1 && at.col <= self.cols);
        &self.cells[(at.row - 1) * self.cols + at.col - 1]
    }

    pub fn set_cell(&mut self, at: Coordinate, value: &str) {
        assert!(at.row >= 1 && at.row <= self.rows && at.col >= 1 && at.col <= self.cols);
        let idx = (at.row - 1) * self.cols + at.col - 1;
        // overwriting padding would break the suffix invariant, so fill any gap with empties
        if self.cells[idx].is_missing() {
            let start = (at.row - 1) * self.cols;
            for i in start..idx {
                if self.cells[i].is_missing() {
                    self.cells[i] = CellValue::Text(String::new());
                }
            }
        }
        self.cells[idx] = CellValue::Text(value.to_string());
    }

    /// Cells in table order.
    pub fn cells(&self) -> &[CellValue] {
        &self.cells
    }

    pub fn row_cells(&self, row: usize) -> &[CellValue] {
        &self.cells[(row - 1) * self.cols..row * self.cols]
    }

    /// Inverse of [`parse_document`]. Column delimiters next to padding are omitted.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.rows {
            if k > 1 {
                out.push(self.delims.row);
            }
            for (i, cell) in self.row_cells(k).iter().enumerate() {
                match cell {
                    CellValue::Text(s) => {
                        if i > 0 {
                            out.push(self.delims.col);
                        }
                        out.push_str(s);
                    }
                    CellValue::Missing => break,
                }
            }
        }
        if self.trailing_row_delim {
            out.push(self.delims.row);
        }
        out
    }

    /// Canonical dump used by tests and the CLI: a JSON array of rows,
    /// one row per line, strings for text cells and `null` for padding.
    pub fn canonical_dump(&self) -> String {
        let mut out = String::from("[");
        for k in 1..=self.rows {
            let row: Vec<Option<&str>> = self.row_cells(k).iter().map(CellValue::as_text).collect();
            out.push_str(if k == 1 { "\n  " } else { ",\n  " });
            out.push_str(&serde_json::to_string(&row).expect("strings always serialize"));
        }
        if self.rows > 0 {
            out.push('\n');
        }
        out.push(']');
        out
    }
}

/// Splits a document into a padded rectangular table.
///
/// A row delimiter at the very end of the input terminates the last row
/// rather than opening an empty one.
pub fn parse_document(text: &[u8], delims: Delimiters) -> Result<RawTable, ParseError> {
    let s = std::str::from_utf8(text).map_err(|e| ParseError::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(parse_str(s, delims))
}

pub fn parse_str(s: &str, delims: Delimiters) -> RawTable {
    if s.is_empty() {
        return RawTable::from_rows::<&str>(&[], delims);
    }
    let (body, trailing) = match s.strip_suffix(delims.row) {
        Some(b) => (b, true),
        None => (s, false),
    };
    let rows: Vec<Vec<&str>> = body
        .split(delims.row)
        .map(|line| line.split(delims.col).collect())
        .collect();
    let mut table = RawTable::from_rows(&rows, delims);
    table.trailing_row_delim = trailing;
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Delimiters {
        Delimiters::default()
    }

    #[test]
    fn pads_short_rows() {
        let t = parse_document(b"a\nb,c", d()).unwrap();
        assert_eq!((t.rows(), t.cols()), (2, 2));
        assert_eq!(t.cell(Coordinate::new(1, 2)), &CellValue::Missing);
        assert_eq!(t.cell(Coordinate::new(2, 2)).as_text(), Some("c"));
    }

    #[test]
    fn empty_document() {
        let t = parse_document(b"", d()).unwrap();
        assert_eq!((t.rows(), t.cols()), (0, 0));
        assert_eq!(t.serialize(), "");
        assert_eq!(t.canonical_dump(), "[]");
    }

    #[test]
    fn trailing_newline_round_trips() {
        for doc in ["a,b\n", "\n", "\n\n", "a\n\nb,c,d\n", "x,,y", ","] {
            let t = parse_document(doc.as_bytes(), d()).unwrap();
            assert_eq!(t.serialize(), doc, "{doc:?}");
        }
        assert_eq!(parse_document(b"a,b\n", d()).unwrap().rows(), 1);
    }

    #[test]
    fn bad_utf8_reports_offset() {
        let err = parse_document(b"ab,\xff", d()).unwrap_err();
        assert_eq!(err, ParseError::Encoding { offset: 3 });
    }

    #[test]
    fn dump_format() {
        let t = parse_document(b"a\nb,\"c\"", d()).unwrap();
        assert_eq!(t.canonical_dump(), "[\n  [\"a\",null],\n  [\"b\",\"\\\"c\\\"\"]\n]");
    }

    #[test]
    fn custom_delimiters() {
        let t = parse_document(b"a;b|c", Delimiters::new('|', ';').unwrap()).unwrap();
        assert_eq!((t.rows(), t.cols()), (2, 2));
        assert!(Delimiters::new(',', ',').is_err());
    }

    #[test]
    fn set_cell_keeps_padding_suffix() {
        let mut t = parse_document(b"a\nb,c,d", d()).unwrap();
        t.set_cell(Coordinate::new(1, 3), "z");
        assert_eq!(t.serialize(), "a,,z\nb,c,d");
    }
}
