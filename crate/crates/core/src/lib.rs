//! Dynamic quantum logic over finite registers: propositions denote
//! subspaces of `C^(2^n)`, gates act by image, and measurements by closure.
//! Includes a term language, a validated rewrite table that eliminates
//! gates and measurements symbolically, and a checker for staged assertions
//! about circuits.

pub mod cli;
pub mod engine;
pub mod error;
pub mod gates;
pub mod harness;
pub mod interp;
pub mod linalg;
pub mod logic;
pub mod rewrite;
pub mod script;
pub mod subspace;

pub use error::{Error, ParseError, Result};
pub use interp::{entails, equivalent, interpret, tautology, InterpContext};
pub use logic::{parse, pretty, Term, TermKind};
pub use subspace::{StateVector, Subspace, ToleranceConfig};
