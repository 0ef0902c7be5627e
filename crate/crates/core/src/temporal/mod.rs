//! Temporal requirement templates, the pattern compiler and the trace checkers.

pub mod ltl;
pub mod monitor;
pub mod patterns;
pub mod stimulus;
pub mod template;

pub use ltl::{atom, classify, ltl_eval, ltl_eval_mode, LtlError, LtlFormula, Mode};
pub use monitor::{check_trace, scope_intervals, Interval};
pub use patterns::{pattern_to_ltl, required_slots, slots_from, PatternError, PatternId, PatternSlots, ScopeId};
pub use stimulus::verify_stimulus_response;
pub use template::{
    bindings_from, catalog, check_pattern, find_template, instantiate_template, SlotDecl, SlotKind,
    TemplateKind, TemporalError, TemporalRequirement, TemporalTemplate, DEFAULT_TIME_BOUNDARY,
};
