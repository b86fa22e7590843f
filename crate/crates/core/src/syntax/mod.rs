//! Propositions, proof-terms, their concrete syntax, and scalar tables.

mod bimagma;
mod parser;
mod print;
mod prop;
mod term;

pub use bimagma::{is_scalar_name, BiMagma, BiMagmaError, Mode};
pub use parser::{
    is_var_name, parse_prop, parse_term, parse_term_spanned, ParseError, Span, SpanTree,
};
pub use prop::Prop;
pub use term::{fresh_name, Name, Path, Term};
