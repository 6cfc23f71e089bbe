//! Single-pass validation driven by table events.

use fixedbitset::FixedBitSet;

use crate::content::{ContentAutomaton, PadMode};
use crate::error::{FragmentError, StreamError};
use crate::events::TableEvent;
use crate::guard::GuardOptions;
use crate::report::{GuardKind, Location, UniqueViolation, ValidationReport, Violation, SAMPLE_LIMIT};
use crate::schema::ast::Semantics;
use crate::stream::network::{Network, NodeId, StreamMode};
use crate::table::Coordinate;
use crate::tokens::{CellTokens, TokenId};
use crate::validator::{rule_message, Schema};

/// Most uniqueness violations a stream run keeps; the rest are counted.
pub const UNIQUE_REPORT_LIMIT: usize = 16;

#[derive(Debug, Clone, Default)]
pub struct StreamOptions {
    pub mode: StreamMode,
    pub pad: PadMode,
    pub guard: GuardOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowUsage {
    pub row: usize,
    /// Largest footprint seen while reading the row.
    pub footprint: usize,
    /// Column numbers handed from this row to the next.
    pub carryover: usize,
}

/// Memory accounting for one run.
///
/// A footprint counts stored column numbers, stored state bits and two
/// coordinate registers, each as one unit. Column numbers and registers are
/// really `log m` and `log n` bits wide; the unit count is what the bounds
/// below are stated in.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemoryTrace {
    pub rows: Vec<RowUsage>,
    pub max_footprint: usize,
    pub max_carryover: usize,
}

impl MemoryTrace {
    /// One `row <k> footprint <f>` line per row.
    pub fn render(&self) -> String {
        self.rows
            .iter()
            .map(|r| format!("row {} footprint {}\n", r.row, r.footprint))
            .collect()
    }
}

struct RuleRun<'s> {
    node: NodeId,
    content: &'s ContentAutomaton,
    semantics: Semantics,
    state: FixedBitSet,
    pending_nulls: usize,
    touched: bool,
    sample: Vec<Coordinate>,
    failing: usize,
    first_fail: Option<(usize, Vec<Coordinate>)>,
}

impl RuleRun<'_> {
    fn feed(&mut self, at: Coordinate, cell: &CellTokens, pad: PadMode) {
        self.touched = true;
        if self.sample.len() < SAMPLE_LIMIT {
            self.sample.push(at);
        }
        if pad == PadMode::Trim && cell.is_null() {
            self.pending_nulls += 1;
            return;
        }
        if self.state.is_clear() {
            self.pending_nulls = 0;
            return;
        }
        for _ in 0..std::mem::take(&mut self.pending_nulls) {
            self.state = self.content.step(&self.state, &CellTokens::Null);
        }
        self.state = self.content.step(&self.state, cell);
    }

    fn close(&mut self, row: usize) {
        if !self.content.accepts(&self.state) {
            self.failing += 1;
            if self.first_fail.is_none() {
                self.first_fail = Some((row, std::mem::take(&mut self.sample)));
            }
        }
        self.state = self.content.start();
        self.pending_nulls = 0;
        self.touched = false;
        self.sample.clear();
    }
}

struct Guard {
    name: String,
    id: TokenId,
    kind: GuardKind,
    // first occurrence in the table, or in the current row
    first: Option<Coordinate>,
    reported: bool,
}

/// Validates a table one event at a time.
pub struct StreamValidator<'s> {
    schema: &'s Schema,
    net: Network,
    rules: Vec<RuleRun<'s>>,
    guards: Vec<Guard>,
    pad: PadMode,
    report: ValidationReport,
    trace: MemoryTrace,
    row_footprint: usize,
    row_open: bool,
    halted: bool,
}

impl<'s> StreamValidator<'s> {
    /// Fails if the schema is outside the fragment the mode supports.
    pub fn new(schema: &'s Schema, opts: &StreamOptions) -> Result<Self, FragmentError> {
        let analysis = schema.analyze(&opts.guard);
        if let Some((i, why)) = analysis.rules.iter().enumerate().find_map(|(i, r)| {
            (!r.forward).then(|| (i + 1, r.reasons.first().cloned().unwrap_or_default()))
        }) {
            return Err(FragmentError::NotForward(format!("rule {i}: {why}")));
        }
        if opts.mode == StreamMode::Strong && !analysis.guarded() {
            let (i, why) = analysis.first_reason().unwrap_or((0, "unguarded"));
            return Err(FragmentError::NotGuarded(format!("rule {i}: {why}")));
        }
        let mut net = Network::new(opts.mode, schema.token_defs().vocabulary().clone());
        let rules = schema
            .rules()
            .iter()
            .map(|r| {
                Ok(RuleRun {
                    node: net.add(&r.selector)?,
                    content: &r.content,
                    semantics: r.semantics,
                    state: r.content.start(),
                    pending_nulls: 0,
                    touched: false,
                    sample: Vec::new(),
                    failing: 0,
                    first_fail: None,
                })
            })
            .collect::<Result<Vec<_>, FragmentError>>()?;
        let guard = |(name, id): &(String, TokenId), kind| Guard {
            name: name.clone(),
            id: *id,
            kind,
            first: None,
            reported: false,
        };
        let guards = schema
            .unique_tokens()
            .iter()
            .map(|u| guard(u, GuardKind::Unique))
            .chain(schema.unique_per_row_tokens().iter().map(|u| guard(u, GuardKind::UniquePerRow)))
            .collect();
        Ok(Self {
            schema,
            net,
            rules,
            guards,
            pad: opts.pad,
            report: ValidationReport::default(),
            trace: MemoryTrace::default(),
            row_footprint: 0,
            row_open: false,
            halted: false,
        })
    }

    pub fn schema(&self) -> &Schema {
        self.schema
    }

    pub fn feed(&mut self, ev: &TableEvent) -> Result<(), StreamError> {
        match ev {
            TableEvent::Cell(c) => self.cell(c),
            TableEvent::NewRow => {
                if !self.row_open {
                    return Err(StreamError::OutOfOrder("new row before any cell of the row".into()));
                }
                self.end_row();
                self.net.new_row();
                self.clear_row_guards();
                if let Some(r) = self.trace.rows.last_mut() {
                    r.carryover = self.net.carryover();
                    self.trace.max_carryover = self.trace.max_carryover.max(r.carryover);
                }
                Ok(())
            }
        }
    }

    fn footprint(&self) -> usize {
        let u = self.net.usage();
        let content: usize = self.rules.iter().map(|r| r.content.states() + 1).sum();
        u.columns + u.state_bits + content + 2
    }

    fn cell(&mut self, cell: &CellTokens) -> Result<(), StreamError> {
        self.row_open = true;
        let (row, col) = self.net.position();
        let at = Coordinate::new(row, col + 1);
        self.check_guards(at, cell);
        if !self.halted {
            self.net.cell(cell)?;
            for r in &mut self.rules {
                if self.net.value(r.node) {
                    r.feed(at, cell, self.pad);
                }
            }
        } else {
            // keep coordinates in step even when rules no longer run
            self.net.skip_cell();
        }
        self.row_footprint = self.row_footprint.max(self.footprint());
        Ok(())
    }

    fn check_guards(&mut self, at: Coordinate, cell: &CellTokens) {
        for g in &mut self.guards {
            if !cell.contains(g.id) {
                continue;
            }
            let Some(first) = g.first else {
                g.first = Some(at);
                continue;
            };
            if g.kind == GuardKind::Unique && g.reported {
                if let Some(u) = self.report.unique_violations.iter_mut().find(|u| u.token == g.name && u.row.is_none()) {
                    if u.coords.len() < SAMPLE_LIMIT {
                        u.coords.push(at);
                    }
                }
                continue;
            }
            if g.reported {
                continue;
            }
            g.reported = true;
            if self.report.unique_violations.len() < UNIQUE_REPORT_LIMIT {
                self.report.unique_violations.push(UniqueViolation {
                    token: g.name.clone(),
                    kind: g.kind,
                    row: (g.kind == GuardKind::UniquePerRow).then_some(at.row),
                    coords: vec![first, at],
                });
            } else {
                self.report.unique_overflow += 1;
            }
            if self.net.mode() == StreamMode::Strong && !self.halted {
                self.halted = true;
                self.report.halted = Some(format!(
                    "declared uniqueness of `{}` fails at {at}; rules were not evaluated past this cell",
                    g.name
                ));
            }
        }
    }

    fn clear_row_guards(&mut self) {
        for g in &mut self.guards {
            if g.kind == GuardKind::UniquePerRow {
                g.first = None;
                g.reported = false;
            }
        }
    }

    fn end_row(&mut self) {
        let (row, _) = self.net.position();
        if !self.halted {
            for r in &mut self.rules {
                if r.semantics == Semantics::RowBased && r.touched {
                    r.close(row);
                }
            }
        }
        self.trace.rows.push(RowUsage {
            row,
            footprint: self.row_footprint,
            carryover: 0,
        });
        self.trace.max_footprint = self.trace.max_footprint.max(self.row_footprint);
        self.row_footprint = 0;
        self.row_open = false;
    }

    pub fn finish(mut self) -> (ValidationReport, MemoryTrace) {
        if self.row_open {
            self.end_row();
        }
        if !self.halted {
            for (i, r) in self.rules.iter_mut().enumerate() {
                match r.semantics {
                    Semantics::RegionBased => {
                        if !r.content.accepts(&r.state) {
                            let rule = &self.schema.rules()[i];
                            self.report.violations.push(Violation {
                                rule: i + 1,
                                location: Location::Region,
                                failing_rows: 1,
                                sample: std::mem::take(&mut r.sample),
                                message: rule_message(rule, 1),
                            });
                        }
                    }
                    Semantics::RowBased => {
                        if let Some((row, sample)) = r.first_fail.take() {
                            let rule = &self.schema.rules()[i];
                            self.report.violations.push(Violation {
                                rule: i + 1,
                                location: Location::Row(row),
                                failing_rows: r.failing,
                                sample,
                                message: rule_message(rule, r.failing),
                            });
                        }
                    }
                }
            }
        }
        (self.report, self.trace)
    }
}

/// Validates an event sequence in one pass.
pub fn run_stream<I>(schema: &Schema, events: I, opts: &StreamOptions) -> Result<(ValidationReport, MemoryTrace), StreamRunError>
where
    I: IntoIterator<Item = TableEvent>,
{
    let mut v = StreamValidator::new(schema, opts)?;
    for ev in events {
        v.feed(&ev)?;
    }
    Ok(v.finish())
}

pub fn run_weak<I>(schema: &Schema, events: I, pad: PadMode) -> Result<(ValidationReport, MemoryTrace), StreamRunError>
where
    I: IntoIterator<Item = TableEvent>,
{
    let opts = StreamOptions {
        mode: StreamMode::Weak,
        pad,
        ..Default::default()
    };
    run_stream(schema, events, &opts)
}

pub fn run_strong<I>(schema: &Schema, events: I, pad: PadMode) -> Result<(ValidationReport, MemoryTrace), StreamRunError>
where
    I: IntoIterator<Item = TableEvent>,
{
    let opts = StreamOptions {
        mode: StreamMode::Strong,
        pad,
        ..Default::default()
    };
    run_stream(schema, events, &opts)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StreamRunError {
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}
