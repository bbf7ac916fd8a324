//! Graded unification over prioritized feature structures, and an
//! activation-scored chart parser built on it.

pub mod atom;
pub mod avm;
pub mod chart;
pub mod cli;
pub mod demo;
pub mod grammar;
pub mod io;
pub mod unify;

pub use atom::{Atom, AtomError, EPSILON};
pub use avm::{AvmError, FeatureStructure, FsBuilder, FsList, Path};
pub use chart::{
    compute_activation, extract_parses, run_parse, ConfigError, Edge, EdgeKind, EventKind, Parse, ParseError,
    ParseReport, ParseTree, ParserConfig, TraceEvent,
};
pub use grammar::{Grammar, LexEntry, Lexicon, Rule};
pub use unify::{unify_graded, UnifyError, UnifyResult};
