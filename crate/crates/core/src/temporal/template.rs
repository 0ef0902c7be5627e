//! Reusable requirement templates and their instantiation against a model.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{KernelError, SystemModel, Trace, Verdict};

use super::ltl::LtlFormula;
use super::monitor::check_trace;
use super::patterns::{pattern_to_ltl, required_slots, PatternError, PatternId, PatternSlots, ScopeId};
use super::stimulus::verify_stimulus_response;

/// Time boundary used when a requirement does not set one.
pub const DEFAULT_TIME_BOUNDARY: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("cannot instantiate `{requirement}` from {template}: {}", .problems.join("; "))]
    Instantiation {
        requirement: String,
        template: String,
        problems: Vec<String>,
    },
    #[error("`{0}` has no finite time boundary and its model has no horizon")]
    Unbounded(String),
    #[error("template {template} is not a {expected} template")]
    Family { template: String, expected: &'static str },
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Condition,
    Action,
    Measure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDecl {
    pub name: String,
    pub kind: SlotKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum TemplateKind {
    StimulusResponse,
    Pattern { pattern: PatternId, scope: ScopeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalTemplate {
    pub name: String,
    pub kind: TemplateKind,
    pub slots: Vec<SlotDecl>,
    /// Natural-language text with `{slot}` placeholders (and `{k}` for bounded existence).
    pub text_skeleton: String,
}

impl TemporalTemplate {
    pub fn stimulus_response() -> Self {
        let slot = |name: &str, kind| SlotDecl {
            name: name.into(),
            kind,
        };
        TemporalTemplate {
            name: "STIMULUS_RESPONSE".into(),
            kind: TemplateKind::StimulusResponse,
            slots: vec![
                slot("stimulus", SlotKind::Condition),
                slot("response", SlotKind::Condition),
                slot("action", SlotKind::Action),
                slot("timer", SlotKind::Measure),
            ],
            text_skeleton: "whenever {stimulus}, repeatedly applying {action} leads to {response} within {timer} steps".into(),
        }
    }

    pub fn pattern(pattern: PatternId, scope: ScopeId) -> Self {
        TemporalTemplate {
            name: format!("{}_{}", pattern.key(), scope.key()),
            kind: TemplateKind::Pattern { pattern, scope },
            slots: required_slots(pattern, scope)
                .into_iter()
                .map(|s| SlotDecl {
                    name: s.into(),
                    kind: SlotKind::Condition,
                })
                .collect(),
            text_skeleton: format!("{}{}", scope_text(scope), pattern_text(pattern)),
        }
    }

    /// A copy of a bounded-existence template with a different bound.
    pub fn with_k(&self, k: u32) -> Result<Self, TemporalError> {
        match self.kind {
            TemplateKind::Pattern {
                pattern: PatternId::BoundedExistence { .. },
                scope,
            } => Ok(Self::pattern(PatternId::BoundedExistence { k }, scope)),
            _ => Err(TemporalError::Family {
                template: self.name.clone(),
                expected: "bounded existence",
            }),
        }
    }

    pub fn slot_names(&self) -> Vec<&str> {
        self.slots.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn k(&self) -> Option<u32> {
        match self.kind {
            TemplateKind::Pattern {
                pattern: PatternId::BoundedExistence { k },
                ..
            } => Some(k),
            _ => None,
        }
    }
}

fn scope_text(scope: ScopeId) -> &'static str {
    match scope {
        ScopeId::Global => "",
        ScopeId::BeforeR => "before {R}, ",
        ScopeId::AfterQ => "after {Q}, ",
        ScopeId::BetweenQandR => "between {Q} and {R}, ",
        ScopeId::AfterQuntilR => "after {Q} until {R}, ",
    }
}

fn pattern_text(pattern: PatternId) -> &'static str {
    match pattern {
        PatternId::Absence => "{P} never happens",
        PatternId::Existence => "{P} eventually happens",
        PatternId::BoundedExistence { .. } => "{P} happens not more than {k} times",
        PatternId::Universality => "{P} always holds",
        PatternId::Precedence => "{P} is always preceded by {S}",
        PatternId::Response => "{P} is always followed by {S}",
        PatternId::PrecedenceChain21 => "{P} is always preceded by {S} and then {T}",
        PatternId::PrecedenceChain12 => "{S} followed by {T} is always preceded by {P}",
        PatternId::ResponseChain21 => "{S} followed by {T} is always followed by {P}",
        PatternId::ResponseChain12 => "{P} is always followed by {S} and then {T}",
    }
}

/// The shipped catalog: the stimulus/response template followed by every
/// pattern under every scope, named `{PATTERN}_{SCOPE}`.
pub fn catalog() -> Vec<TemporalTemplate> {
    let mut out = vec![TemporalTemplate::stimulus_response()];
    for p in PatternId::all() {
        for sc in ScopeId::all() {
            out.push(TemporalTemplate::pattern(p, sc));
        }
    }
    out
}

pub fn find_template(name: &str) -> Result<TemporalTemplate, TemporalError> {
    catalog()
        .into_iter()
        .find(|t| t.name == name)
        .ok_or_else(|| TemporalError::UnknownTemplate(name.to_string()))
}

/// A template bound to a model: every slot names a condition, action or measure of it.
#[derive(Clone)]
pub struct TemporalRequirement {
    pub name: String,
    pub template: TemporalTemplate,
    pub model: Arc<SystemModel>,
    pub bindings: BTreeMap<String, String>,
    pub time_boundary: u64,
}

impl fmt::Debug for TemporalRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TemporalRequirement")
            .field("name", &self.name)
            .field("template", &self.template.name)
            .field("model", &self.model.name())
            .field("bindings", &self.bindings)
            .field("time_boundary", &self.time_boundary)
            .finish()
    }
}

pub fn instantiate_template(
    t: &TemporalTemplate,
    m: Arc<SystemModel>,
    bindings: BTreeMap<String, String>,
    name: &str,
    bound: Option<u64>,
) -> Result<TemporalRequirement, TemporalError> {
    let mut problems = Vec::new();
    let missing: Vec<&str> = t
        .slots
        .iter()
        .filter(|s| !bindings.contains_key(&s.name))
        .map(|s| s.name.as_str())
        .collect();
    if !missing.is_empty() {
        problems.push(format!("missing slots: {}", missing.join(", ")));
    }
    let extra: Vec<&str> = bindings
        .keys()
        .filter(|k| !t.slots.iter().any(|s| &s.name == *k))
        .map(String::as_str)
        .collect();
    if !extra.is_empty() {
        problems.push(format!("unknown slots: {}", extra.join(", ")));
    }
    let unresolved: Vec<String> = t
        .slots
        .iter()
        .filter_map(|s| {
            let id = bindings.get(&s.name)?;
            let found = match s.kind {
                SlotKind::Condition => m.condition(id).is_ok(),
                SlotKind::Action => m.action(id).is_ok(),
                SlotKind::Measure => m.measure(id).is_ok(),
            };
            (!found).then(|| format!("{}={id}", s.name))
        })
        .collect();
    if !unresolved.is_empty() {
        problems.push(format!(
            "not defined by model `{}`: {}",
            m.name(),
            unresolved.join(", ")
        ));
    }
    if bound == Some(0) {
        problems.push("time boundary must be at least 1".into());
    }
    if !problems.is_empty() {
        return Err(TemporalError::Instantiation {
            requirement: name.to_string(),
            template: t.name.clone(),
            problems,
        });
    }
    Ok(TemporalRequirement {
        name: name.to_string(),
        template: t.clone(),
        model: m,
        bindings,
        time_boundary: bound.unwrap_or(DEFAULT_TIME_BOUNDARY),
    })
}

impl TemporalRequirement {
    pub fn with_time_boundary(mut self, bound: u64) -> Self {
        self.time_boundary = bound.max(1);
        self
    }

    pub fn binding(&self, slot: &str) -> Option<&str> {
        self.bindings.get(slot).map(String::as_str)
    }

    fn pattern(&self) -> Result<(PatternId, ScopeId), TemporalError> {
        match self.template.kind {
            TemplateKind::Pattern { pattern, scope } => Ok((pattern, scope)),
            TemplateKind::StimulusResponse => Err(TemporalError::Family {
                template: self.template.name.clone(),
                expected: "pattern",
            }),
        }
    }

    /// Slot letter to condition id, for the pattern compiler and monitor.
    pub fn pattern_slots(&self) -> PatternSlots {
        self.bindings.clone()
    }

    pub fn formula(&self) -> Result<LtlFormula, TemporalError> {
        let (p, sc) = self.pattern()?;
        Ok(pattern_to_ltl(p, sc, &self.pattern_slots())?)
    }

    /// Distinct condition ids the requirement observes, in slot order.
    pub fn observed_conditions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for s in &self.template.slots {
            if s.kind == SlotKind::Condition {
                let id = self.bindings[&s.name].as_str();
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        out
    }

    /// Number of main steps a trace-based check runs for.
    pub fn effective_bound(&self) -> Result<u64, TemporalError> {
        match (self.time_boundary, self.model.horizon()) {
            (DEFAULT_TIME_BOUNDARY, None) => Err(TemporalError::Unbounded(self.name.clone())),
            (tb, None) => Ok(tb),
            (tb, Some(h)) => Ok(tb.min(h)),
        }
    }

    pub fn trace(&self, seed: u64) -> Result<Trace, TemporalError> {
        let bound = self.effective_bound()?;
        Ok(self
            .model
            .generate_trace(self.model.init(seed), bound, &self.observed_conditions())?)
    }

    /// Runs the requirement from the model's initial state for `seed`.
    pub fn verify(&self, seed: u64) -> Result<Verdict, TemporalError> {
        match self.template.kind {
            TemplateKind::StimulusResponse => verify_stimulus_response(self, self.model.init(seed)),
            TemplateKind::Pattern { .. } => check_pattern(self, &self.trace(seed)?),
        }
    }

    /// Template text with every slot replaced by its condition text and id.
    pub fn render(&self) -> String {
        let mut body = self.template.text_skeleton.clone();
        for s in &self.template.slots {
            let id = &self.bindings[&s.name];
            let text = match s.kind {
                SlotKind::Condition => self.model.condition(id).map(|c| c.text().to_string()),
                SlotKind::Action => Ok(id.replace('_', " ")),
                SlotKind::Measure => self.model.measure(id).map(|m| m.text().to_string()),
            }
            .unwrap_or_default();
            let shown = if text.is_empty() || text == *id {
                format!("`{id}`")
            } else {
                format!("{text} (`{id}`)")
            };
            body = body.replace(&format!("{{{}}}", s.name), &shown);
        }
        if let Some(k) = self.template.k() {
            body = body.replace("{k}", &k.to_string());
        }
        let boundary = if self.time_boundary == DEFAULT_TIME_BOUNDARY {
            "no time boundary".to_string()
        } else {
            format!("time boundary {} steps", self.time_boundary)
        };
        format!(
            "{} [{}]: {} ({boundary})",
            self.name,
            self.model.name(),
            body
        )
    }
}

/// Checks a pattern requirement on a recorded trace.
pub fn check_pattern(r: &TemporalRequirement, t: &Trace) -> Result<Verdict, TemporalError> {
    let (p, sc) = r.pattern()?;
    Ok(check_trace(p, sc, &r.pattern_slots(), t)?)
}

pub fn bindings_from<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
