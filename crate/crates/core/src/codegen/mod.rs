//! Convention-driven shim generation.
//!
//! Layered source units are scanned into a [`Manifest`]; the manifest is then
//! rendered through a [`TemplateSet`] into layer declarations and
//! registration shims. Source units themselves are never rewritten.

pub mod diag;
pub mod generate;
pub mod lexer;
pub mod manifest;
pub mod parser;
pub mod rewrite;
pub mod scan;
pub mod template;

pub use diag::{Code, Diagnostic, ScanError};
pub use generate::{generate, GenerateError, TemplateSet};
pub use lexer::{join_tokens, lex, Token, TokenKind};
pub use manifest::{LayerMapping, LayeredClass, Manifest, MethodDecl, Param, PartialDecl};
pub use rewrite::rewrite_proceed;
pub use scan::scan;
pub use template::{render, Binding, Template, TemplateError};
