//! SCULPT: schemas for tabular data.
//!
//! Tables are grids of cells. A schema selects regions of the grid with
//! coordinate expressions and constrains the cells in them with regular
//! content expressions. Validation runs either over the whole table in
//! memory or as a single pass over a stream of cell events.

pub mod cli;
pub mod content;
pub mod error;
pub mod eval;
pub mod events;
pub mod guard;
pub mod region;
pub mod report;
pub mod schema;
pub mod stream;
pub mod table;
pub mod tokens;
pub mod validator;

pub use error::{FragmentError, ParseError, SchemaError, StreamError};
pub use region::Region;
pub use table::{parse_document, parse_str, CellValue, Coordinate, Delimiters, RawTable};
pub use tokens::{tokenize, CellTokens, TokenDefs, TokenId, TokenizedTable, Vocabulary};
pub use content::PadMode;
pub use eval::{eval_coord, eval_nav};
pub use events::{event_stream, DocumentEvents, TableEvent};
pub use guard::{analyze, is_forward, level, Fragment, FragmentReport, GuardOptions};
pub use report::{Location, ValidationReport, Violation};
pub use stream::{run_stream, run_strong, run_weak, MemoryTrace, StreamMode, StreamOptions};
pub use validator::{validate, Schema, ValidateOptions};
