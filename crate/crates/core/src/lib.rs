//! A toolkit for Milner's Calculus of Communicating Systems: parsing,
//! structural operational semantics, strong and weak bisimilarity,
//! observation congruence, and executable checks of the classic algebraic
//! laws and coarsest-congruence results on concrete processes.

pub mod cli;
pub mod congruence;
pub mod equivalence;
pub mod error;
pub mod generate;
pub mod klop;
pub mod laws;
pub mod parser;
pub mod semantics;
pub mod syntax;
pub mod weak;

pub use error::{Error, Result, SourceSpan};
pub use parser::{parse_term, parse_workspace, print_term, print_workspace};
pub use semantics::{explore, successors, Limits, Lts};
pub use syntax::{Action, ConstName, Environment, Label, LabelId, Polarity, ProcessTerm, Relabeling};
