//! Verification of tuple artifact systems against LTL-FO properties.
//!
//! A system is a read-only database schema with keys and acyclic foreign
//! keys, a tuple of artifact variables and a set of guarded services.
//! Checking explores the finite space of isomorphism types of the
//! navigation set, represented as typed integer valuations, in product with
//! a Büchi automaton for the negated property.

pub mod bench;
pub mod buchi;
pub mod checker;
pub mod gen;
pub mod model;
pub mod optimize;
pub mod promela;
pub mod speclang;
pub mod symbolic;
pub mod templates;

pub use buchi::{BuchiAutomaton, Ltl};
pub use model::{
    Condition, DatabaseSchema, DiagCode, Diagnostic, LtlFo, Prop, Relation, Service, TasSpec, Term, TypedVar,
    ValidationReport, VarType,
};
