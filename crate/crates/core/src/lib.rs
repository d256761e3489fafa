//! Component model, connector algebra, causal trees and the two execution
//! engines: an enumerative one over the flattened interaction list and a
//! symbolic one over binary decision diagrams, plus a textual model format.

pub mod causal;
pub mod connector;
pub mod dsl;
pub mod engine;
pub mod enumerative;
pub mod error;
pub mod model;
pub mod semantics;
pub mod symbolic;

pub use causal::{causal_rules, ct_interactions, rules_to_formula, tau, CausalRule, CausalTree, CtNode, RuleSet};
pub use connector::{
    bool_to_interactions, interactions_of, interactions_to_bool, normalize_binary, support, AcTerm, Factor,
    InteractionSet, Typing,
};
pub use dsl::{parse, parse_bytes, parse_source, serialize, DslDiagnostic, DslErrorKind, SourceMap, SourceModel, Span};
pub use engine::{run, run_silent, Engine, StepOutcome, Trace, TraceStep};
pub use enumerative::EnumEngine;
pub use error::ModelError;
pub use model::{
    validate, AtomicBehavior, Connector, Diagnostic, DiagnosticKind, GlobalState, Interaction, Location, Port,
    PriorityModel, SystemModel, Transition,
};
pub use semantics::{act, enabled, filter_priority, reachable, step, step_with, successors, survivors, Reachable};
pub use symbolic::{EncodingStats, SymbolicEngine, SystemEncoding};
