//! Schema documents: syntax tree, parser, printer and desugaring.

pub mod ast;
pub mod desugar;
pub mod parser;
pub mod print;

pub use ast::*;
pub use desugar::desugar;
pub use parser::{parse_content_expr, parse_coord_expr, parse_nav_expr, parse_schema, parse_schema_with, ParseOptions};
