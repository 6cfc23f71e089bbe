//! Table event streams: one cell event per cell in table order, with a
//! new-row event between consecutive rows.

use crate::table::Delimiters;
use crate::tokens::{CellTokens, TokenDefs, TokenizedTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableEvent {
    Cell(CellTokens),
    NewRow,
}

/// Lazy event stream over an in-memory tokenized table.
pub struct EventStream<'a> {
    table: &'a TokenizedTable,
    next_cell: usize,
    // a new-row event is owed before `next_cell`
    pending_row: bool,
}

impl<'a> EventStream<'a> {
    pub fn new(table: &'a TokenizedTable) -> Self {
        Self {
            table,
            next_cell: 0,
            pending_row: false,
        }
    }
}

impl Iterator for EventStream<'_> {
    type Item = TableEvent;

    fn next(&mut self) -> Option<TableEvent> {
        if self.next_cell >= self.table.len() {
            return None;
        }
        if self.pending_row {
            self.pending_row = false;
            return Some(TableEvent::NewRow);
        }
        let cell = self.table.cells()[self.next_cell].clone();
        self.next_cell += 1;
        if self.next_cell.is_multiple_of(self.table.cols()) && self.next_cell < self.table.len() {
            self.pending_row = true;
        }
        Some(TableEvent::Cell(cell))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest_cells = self.table.len() - self.next_cell;
        let cols = self.table.cols().max(1);
        let rows_left = if rest_cells == 0 { 0 } else { (rest_cells - 1) / cols };
        let n = rest_cells + rows_left + usize::from(self.pending_row);
        (n, Some(n))
    }
}

pub fn event_stream(table: &TokenizedTable) -> EventStream<'_> {
    EventStream::new(table)
}

/// Events straight from document text, tokenizing one cell at a time.
///
/// A cheap pre-scan finds the table width so short rows can be padded; after
/// that the text is read once, front to back.
pub struct DocumentEvents<'a> {
    defs: &'a TokenDefs,
    delims: Delimiters,
    lines: std::str::Split<'a, char>,
    current: Option<std::str::Split<'a, char>>,
    emitted_in_row: usize,
    width: usize,
    rows: usize,
    rows_started: usize,
    served: usize,
}

impl<'a> DocumentEvents<'a> {
    pub fn new(text: &'a str, delims: Delimiters, defs: &'a TokenDefs) -> Self {
        let body = text.strip_suffix(delims.row()).unwrap_or(text);
        let (mut width, mut rows) = (0, 0);
        if !text.is_empty() {
            for line in body.split(delims.row()) {
                rows += 1;
                width = width.max(line.matches(delims.col()).count() + 1);
            }
        }
        Self {
            defs,
            delims,
            lines: body.split(delims.row()),
            current: None,
            emitted_in_row: 0,
            width,
            rows,
            rows_started: 0,
            served: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of events handed out so far.
    pub fn position(&self) -> usize {
        self.served
    }
}

impl Iterator for DocumentEvents<'_> {
    type Item = TableEvent;

    fn next(&mut self) -> Option<TableEvent> {
        if self.current.is_none() || self.emitted_in_row == self.width {
            if self.rows_started == self.rows {
                return None;
            }
            let line = self.lines.next()?;
            let first = self.current.is_none();
            self.current = Some(line.split(self.delims.col()));
            self.emitted_in_row = 0;
            self.rows_started += 1;
            if !first {
                self.served += 1;
                return Some(TableEvent::NewRow);
            }
        }
        self.emitted_in_row += 1;
        self.served += 1;
        let cell = match self.current.as_mut().and_then(Iterator::next) {
            Some(text) => CellTokens::Tokens(self.defs.classify(text)),
            None => CellTokens::Null,
        };
        Some(TableEvent::Cell(cell))
    }
}
