//! Streaming validation: coordinate automata, column sets, and the
//! single-pass runners.

pub mod ca;
pub mod colset;
pub mod network;
pub mod runner;

pub use ca::{compile_coord_to_ca, compile_nav_to_ca, CoordinateAutomaton, Label};
pub use colset::{ColumnSet, ColumnSetBuilder};
pub use network::{Network, StreamMode};
pub use runner::{run_stream, run_strong, run_weak, MemoryTrace, RowUsage, StreamOptions, StreamRunError, StreamValidator};

use crate::error::FragmentError;
use crate::events::event_stream;
use crate::region::Region;
use crate::schema::ast::CoordExpr;
use crate::tokens::TokenizedTable;

/// Cells a forward expression selects, computed in one pass over the
/// table's events.
pub fn select_streaming(phi: &CoordExpr, t: &TokenizedTable, mode: StreamMode) -> Result<Region, FragmentError> {
    let mut net = Network::new(mode, t.vocabulary().clone());
    let id = net.add(phi)?;
    let mut out = Region::empty(t.rows(), t.cols());
    let mut i = 0;
    for ev in event_stream(t) {
        match ev {
            crate::events::TableEvent::Cell(c) => {
                net.cell(&c).expect("column sets cannot overflow on an in-memory table");
                if net.value(id) {
                    out.insert_index(i);
                }
                i += 1;
            }
            crate::events::TableEvent::NewRow => net.new_row(),
        }
    }
    Ok(out)
}
