//! Text format and command layer over the `hfgen` engines.
//!
//! The pipeline is: lex -> parse (AST with no positions; errors carry
//! line/column) -> pretty (canonical text; `parse . pretty` is the
//! identity on ASTs) -> desugar (resolve names, turn literals into
//! interned sets and rule blocks into engine rubrics). The small literal
//! parsers for terms, derivations and broad numbers share the same lexer.

pub mod ast;
pub mod desugar;
pub mod emit;
pub mod error;
pub mod lex;
pub mod parse;
pub mod pretty;
pub mod run;
pub mod textio;

pub use ast::Document;
pub use error::CliError;
