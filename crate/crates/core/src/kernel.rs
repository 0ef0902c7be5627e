//! System-under-specification abstraction shared by every other module.
//!
//! A [`SystemModel`] bundles a state factory, an autonomous step and named
//! conditions, actions, measures and equivalences. States are type-erased
//! behind [`StateRef`]; definitions are authored against the concrete state
//! type and downcast at evaluation time.

use std::any::Any;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("model `{model}` has no condition `{id}`")]
    UnknownCondition { model: String, id: String },
    #[error("model `{model}` has no action `{id}`")]
    UnknownAction { model: String, id: String },
    #[error("model `{model}` has no measure `{id}`")]
    UnknownMeasure { model: String, id: String },
    #[error("model `{model}` has no equivalence `{id}`")]
    UnknownEquivalence { model: String, id: String },
    #[error("state belongs to model `{found}`, expected `{expected}`")]
    ModelMismatch { expected: String, found: String },
    #[error("`{id}` cannot be applied to a state of type {found}")]
    StateType { id: String, found: String },
    #[error("guard `{guard}` of action `{action}` does not hold")]
    GuardFailed { action: String, guard: String },
    #[error("action `{action}` failed: {reason}")]
    ActionFailed { action: String, reason: String },
    #[error("trace step {step} has {found} valuations for {expected} conditions")]
    TraceShape {
        step: usize,
        expected: usize,
        found: usize,
    },
}

/// Concrete state of a system. Implementors expose a canonical, order-stable
/// rendering of each named region; frame checks and witnesses compare these.
pub trait State: Any + Send + Sync + fmt::Debug {
    fn boxed_clone(&self) -> Box<dyn State>;

    /// `(region, canonical text)` pairs in a fixed order.
    fn regions(&self) -> Vec<(String, String)>;
}

/// Type-erased handle to a state, tagged with the model it belongs to.
pub struct StateRef {
    model: Arc<str>,
    inner: Box<dyn State>,
}

impl StateRef {
    pub fn new<T: State>(model: impl Into<Arc<str>>, state: T) -> Self {
        Self {
            model: model.into(),
            inner: Box::new(state),
        }
    }

    pub fn from_boxed(model: impl Into<Arc<str>>, inner: Box<dyn State>) -> Self {
        Self {
            model: model.into(),
            inner,
        }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn get<T: State>(&self) -> Option<&T> {
        let any: &dyn Any = self.inner.as_ref();
        any.downcast_ref()
    }

    pub fn get_mut<T: State>(&mut self) -> Option<&mut T> {
        let any: &mut dyn Any = self.inner.as_mut();
        any.downcast_mut()
    }

    pub fn regions(&self) -> Vec<(String, String)> {
        self.inner.regions()
    }

    pub fn region(&self, name: &str) -> Option<String> {
        self.regions()
            .into_iter()
            .find_map(|(r, text)| (r == name).then_some(text))
    }

    /// Canonical serialization: one `region=text` line per region.
    pub fn serialize(&self) -> String {
        self.regions()
            .iter()
            .map(|(r, text)| format!("{r}={text}"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn type_name(&self) -> String {
        format!("{:?}", self.inner)
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .next()
            .unwrap_or_default()
            .to_string()
    }
}

impl Clone for StateRef {
    fn clone(&self) -> Self {
        Self {
            model: Arc::clone(&self.model),
            inner: self.inner.boxed_clone(),
        }
    }
}

impl fmt::Debug for StateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.model, self.inner)
    }
}

fn downcast<'a, T: State>(id: &str, s: &'a StateRef) -> Result<&'a T, KernelError> {
    s.get::<T>().ok_or_else(|| KernelError::StateType {
        id: id.to_string(),
        found: s.type_name(),
    })
}

type EvalFn = dyn Fn(&StateRef) -> Result<bool, KernelError> + Send + Sync;
type MeasureFn = dyn Fn(&StateRef) -> Result<u64, KernelError> + Send + Sync;
type ApplyFn = dyn Fn(&mut StateRef) -> Result<(), KernelError> + Send + Sync;
type EqFn = dyn Fn(&StateRef, &StateRef) -> Result<bool, KernelError> + Send + Sync;

/// A named, side-effect free predicate over states.
#[derive(Clone)]
pub struct ConditionDef {
    id: String,
    text: String,
    eval: Arc<EvalFn>,
}

impl ConditionDef {
    pub fn new<T: State>(
        id: impl Into<String>,
        text: impl Into<String>,
        f: impl Fn(&T) -> bool + Send + Sync + 'static,
    ) -> Self {
        let id = id.into();
        let key = id.clone();
        Self {
            id,
            text: text.into(),
            eval: Arc::new(move |s| downcast::<T>(&key, s).map(&f)),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Short natural-language phrase used when rendering requirements.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn eval(&self, s: &StateRef) -> Result<bool, KernelError> {
        (self.eval)(s)
    }
}

impl fmt::Debug for ConditionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConditionDef").field("id", &self.id).finish()
    }
}

/// A named non-negative integer expression over states, used as a timer.
#[derive(Clone)]
pub struct MeasureDef {
    id: String,
    text: String,
    eval: Arc<MeasureFn>,
}

impl MeasureDef {
    pub fn new<T: State>(
        id: impl Into<String>,
        text: impl Into<String>,
        f: impl Fn(&T) -> u64 + Send + Sync + 'static,
    ) -> Self {
        let id = id.into();
        let key = id.clone();
        Self {
            id,
            text: text.into(),
            eval: Arc::new(move |s| downcast::<T>(&key, s).map(&f)),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn eval(&self, s: &StateRef) -> Result<u64, KernelError> {
        (self.eval)(s)
    }
}

impl fmt::Debug for MeasureDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureDef").field("id", &self.id).finish()
    }
}

/// A state transformer with an optional guard and a frame (`modifies`) clause.
#[derive(Clone)]
pub struct ActionDef {
    id: String,
    modifies: BTreeSet<String>,
    guard: Option<ConditionDef>,
    apply: Arc<ApplyFn>,
}

impl ActionDef {
    pub fn new<T: State>(
        id: impl Into<String>,
        modifies: &[&str],
        f: impl Fn(&mut T) + Send + Sync + 'static,
    ) -> Self {
        Self::fallible::<T>(id, modifies, move |s| {
            f(s);
            Ok(())
        })
    }

    /// An action whose body may reject the state with a reason.
    pub fn fallible<T: State>(
        id: impl Into<String>,
        modifies: &[&str],
        f: impl Fn(&mut T) -> Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        let id = id.into();
        let key = id.clone();
        Self {
            id,
            modifies: modifies.iter().map(|m| m.to_string()).collect(),
            guard: None,
            apply: Arc::new(move |s| {
                let found = s.type_name();
                let state = s.get_mut::<T>().ok_or_else(|| KernelError::StateType {
                    id: key.clone(),
                    found,
                })?;
                f(state).map_err(|reason| KernelError::ActionFailed {
                    action: key.clone(),
                    reason,
                })
            }),
        }
    }

    pub fn with_guard(mut self, guard: ConditionDef) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn modifies(&self) -> &BTreeSet<String> {
        &self.modifies
    }

    pub fn guard(&self) -> Option<&ConditionDef> {
        self.guard.as_ref()
    }

    /// Applies the action in place. A false guard is an error, never a no-op.
    pub fn apply(&self, s: &mut StateRef) -> Result<(), KernelError> {
        if let Some(guard) = &self.guard {
            if !guard.eval(s)? {
                return Err(KernelError::GuardFailed {
                    action: self.id.clone(),
                    guard: guard.id().to_string(),
                });
            }
        }
        (self.apply)(s)
    }
}

impl fmt::Debug for ActionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionDef")
            .field("id", &self.id)
            .field("modifies", &self.modifies)
            .finish()
    }
}

/// Equality notion between two states of the same model.
#[derive(Clone)]
pub struct EquivalenceDef {
    id: String,
    eq: Arc<EqFn>,
}

impl EquivalenceDef {
    pub fn new<T: State>(
        id: impl Into<String>,
        f: impl Fn(&T, &T) -> bool + Send + Sync + 'static,
    ) -> Self {
        let id = id.into();
        let key = id.clone();
        Self {
            id,
            eq: Arc::new(move |a, b| Ok(f(downcast::<T>(&key, a)?, downcast::<T>(&key, b)?))),
        }
    }

    /// Equality of canonical serializations; the default when a model registers none.
    pub fn canonical() -> Self {
        Self {
            id: "canonical".to_string(),
            eq: Arc::new(|a, b| Ok(a.serialize() == b.serialize())),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn check(&self, a: &StateRef, b: &StateRef) -> Result<bool, KernelError> {
        if a.model() != b.model() {
            return Err(KernelError::ModelMismatch {
                expected: a.model().to_string(),
                found: b.model().to_string(),
            });
        }
        (self.eq)(a, b)
    }
}

impl fmt::Debug for EquivalenceDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivalenceDef").field("id", &self.id).finish()
    }
}

/// Condition valuations recorded per step; step 0 is the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    conditions: Vec<String>,
    steps: Vec<Vec<bool>>,
}

impl Trace {
    pub fn new(conditions: Vec<String>) -> Self {
        Self {
            conditions,
            steps: Vec::new(),
        }
    }

    pub fn from_steps(conditions: Vec<String>, steps: Vec<Vec<bool>>) -> Result<Self, KernelError> {
        let mut trace = Self::new(conditions);
        for valuation in steps {
            trace.push(valuation)?;
        }
        Ok(trace)
    }

    /// Builds a trace of `len` steps where `value(step, condition_index)` gives each valuation.
    pub fn from_fn(conditions: &[&str], len: usize, value: impl Fn(usize, usize) -> bool) -> Self {
        Self {
            conditions: conditions.iter().map(|c| c.to_string()).collect(),
            steps: (0..len)
                .map(|step| (0..conditions.len()).map(|c| value(step, c)).collect())
                .collect(),
        }
    }

    pub fn push(&mut self, valuation: Vec<bool>) -> Result<(), KernelError> {
        if valuation.len() != self.conditions.len() {
            return Err(KernelError::TraceShape {
                step: self.steps.len(),
                expected: self.conditions.len(),
                found: valuation.len(),
            });
        }
        self.steps.push(valuation);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn conditions(&self) -> &[String] {
        &self.conditions
    }

    pub fn steps(&self) -> &[Vec<bool>] {
        &self.steps
    }

    pub fn index_of(&self, condition: &str) -> Option<usize> {
        self.conditions.iter().position(|c| c == condition)
    }

    pub fn value(&self, step: usize, condition: &str) -> Option<bool> {
        let idx = self.index_of(condition)?;
        self.steps.get(step).map(|v| v[idx])
    }

    /// The full column of valuations of one condition.
    pub fn column(&self, condition: &str) -> Option<Vec<bool>> {
        let idx = self.index_of(condition)?;
        Some(self.steps.iter().map(|v| v[idx]).collect())
    }

    pub fn valuation(&self, step: usize) -> Option<BTreeMap<&str, bool>> {
        self.steps.get(step).map(|v| {
            self.conditions
                .iter()
                .map(String::as_str)
                .zip(v.iter().copied())
                .collect()
        })
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self {
            conditions: self.conditions.clone(),
            steps: self.steps.iter().take(len).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Violated,
    BoundExhausted,
    PreconditionUnmet,
}

impl Outcome {
    /// Severity used to pick the worst outcome of a run.
    pub fn severity(self) -> u8 {
        match self {
            Outcome::Holds | Outcome::PreconditionUnmet => 0,
            Outcome::BoundExhausted => 1,
            Outcome::Violated => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Violated => "violated",
            Outcome::BoundExhausted => "bound_exhausted",
            Outcome::PreconditionUnmet => "precondition_unmet",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What went wrong in a `Violated` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    Postcondition,
    Frame,
    Guard,
    Variant,
    Pattern,
    Underspecified,
}

impl Failure {
    pub fn as_str(self) -> &'static str {
        match self {
            Failure::Postcondition => "postcondition",
            Failure::Frame => "frame",
            Failure::Guard => "guard",
            Failure::Variant => "variant",
            Failure::Pattern => "pattern",
            Failure::Underspecified => "underspecified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Trace { trace: Trace, step: usize },
    Input { slots: BTreeMap<String, String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
}

impl Verdict {
    pub fn holds(message: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Holds,
            witness: None,
            message: message.into(),
            failure: None,
            iterations: None,
        }
    }

    pub fn violated(failure: Failure, witness: Witness, message: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Violated,
            witness: Some(witness),
            message: message.into(),
            failure: Some(failure),
            iterations: None,
        }
    }

    pub fn bound_exhausted(witness: Witness, message: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::BoundExhausted,
            witness: Some(witness),
            message: message.into(),
            failure: None,
            iterations: None,
        }
    }

    pub fn precondition_unmet(message: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::PreconditionUnmet,
            witness: None,
            message: message.into(),
            failure: None,
            iterations: None,
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_iterations(mut self, iterations: u64) -> Self {
        self.iterations = Some(iterations);
        self
    }

    pub fn is_violated(&self) -> bool {
        self.outcome == Outcome::Violated
    }

    /// Step index carried by a trace witness.
    pub fn witness_step(&self) -> Option<usize> {
        match &self.witness {
            Some(Witness::Trace { step, .. }) => Some(*step),
            _ => None,
        }
    }

    pub fn witness_trace(&self) -> Option<&Trace> {
        match &self.witness {
            Some(Witness::Trace { trace, .. }) => Some(trace),
            _ => None,
        }
    }
}

type InitFn = dyn Fn(u64) -> Box<dyn State> + Send + Sync;

/// The system under specification. Immutable once built; share it behind an `Arc`.
pub struct SystemModel {
    name: String,
    description: String,
    init: Arc<InitFn>,
    main_step: ActionDef,
    actions: BTreeMap<String, ActionDef>,
    conditions: BTreeMap<String, ConditionDef>,
    measures: BTreeMap<String, MeasureDef>,
    equivalences: BTreeMap<String, EquivalenceDef>,
    horizon: Option<u64>,
}

impl fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemModel")
            .field("name", &self.name)
            .field("actions", &self.actions.keys().collect::<Vec<_>>())
            .field("conditions", &self.conditions.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl SystemModel {
    pub fn builder<T: State>(
        name: impl Into<String>,
        init: impl Fn(u64) -> T + Send + Sync + 'static,
    ) -> ModelBuilder<T> {
        ModelBuilder {
            name: name.into(),
            description: String::new(),
            init: Arc::new(move |seed| Box::new(init(seed)) as Box<dyn State>),
            main_step: ActionDef::new::<T>("main", &[], |_| {}),
            actions: BTreeMap::new(),
            conditions: BTreeMap::new(),
            measures: BTreeMap::new(),
            equivalences: BTreeMap::new(),
            horizon: None,
            _state: std::marker::PhantomData,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Number of autonomous steps the model is meant to be run for, if it has one.
    pub fn horizon(&self) -> Option<u64> {
        self.horizon
    }

    pub fn init(&self, seed: u64) -> StateRef {
        StateRef::from_boxed(self.name.as_str(), (self.init)(seed))
    }

    /// Wraps a concrete state as belonging to this model.
    pub fn adopt<T: State>(&self, state: T) -> StateRef {
        StateRef::new(self.name.as_str(), state)
    }

    pub fn main_step(&self) -> &ActionDef {
        &self.main_step
    }

    pub fn actions(&self) -> impl Iterator<Item = &ActionDef> {
        self.actions.values()
    }

    pub fn conditions(&self) -> impl Iterator<Item = &ConditionDef> {
        self.conditions.values()
    }

    pub fn measures(&self) -> impl Iterator<Item = &MeasureDef> {
        self.measures.values()
    }

    pub fn equivalences(&self) -> impl Iterator<Item = &EquivalenceDef> {
        self.equivalences.values()
    }

    pub fn condition(&self, id: &str) -> Result<&ConditionDef, KernelError> {
        self.conditions.get(id).ok_or_else(|| KernelError::UnknownCondition {
            model: self.name.clone(),
            id: id.to_string(),
        })
    }

    pub fn action(&self, id: &str) -> Result<&ActionDef, KernelError> {
        self.actions.get(id).ok_or_else(|| KernelError::UnknownAction {
            model: self.name.clone(),
            id: id.to_string(),
        })
    }

    pub fn measure(&self, id: &str) -> Result<&MeasureDef, KernelError> {
        self.measures.get(id).ok_or_else(|| KernelError::UnknownMeasure {
            model: self.name.clone(),
            id: id.to_string(),
        })
    }

    /// Looks up an equivalence; `None` selects the first registered one, or
    /// canonical-serialization equality when the model registers none.
    pub fn equivalence(&self, id: Option<&str>) -> Result<EquivalenceDef, KernelError> {
        match id {
            Some("canonical") => Ok(EquivalenceDef::canonical()),
            Some(id) => self.equivalences.get(id).cloned().ok_or_else(|| {
                KernelError::UnknownEquivalence {
                    model: self.name.clone(),
                    id: id.to_string(),
                }
            }),
            None => Ok(self
                .equivalences
                .values()
                .next()
                .cloned()
                .unwrap_or_else(EquivalenceDef::canonical)),
        }
    }

    fn check_owner(&self, s: &StateRef) -> Result<(), KernelError> {
        if s.model() == self.name {
            Ok(())
        } else {
            Err(KernelError::ModelMismatch {
                expected: self.name.clone(),
                found: s.model().to_string(),
            })
        }
    }

    pub fn eval_condition(&self, id: &str, s: &StateRef) -> Result<bool, KernelError> {
        self.check_owner(s)?;
        self.condition(id)?.eval(s)
    }

    pub fn eval_measure(&self, id: &str, s: &StateRef) -> Result<u64, KernelError> {
        self.check_owner(s)?;
        self.measure(id)?.eval(s)
    }

    pub fn apply_action(&self, id: &str, s: &mut StateRef) -> Result<(), KernelError> {
        self.check_owner(s)?;
        self.action(id)?.apply(s)
    }

    pub fn check_equivalence(
        &self,
        id: Option<&str>,
        a: &StateRef,
        b: &StateRef,
    ) -> Result<bool, KernelError> {
        self.check_owner(a)?;
        self.check_owner(b)?;
        self.equivalence(id)?.check(a, b)
    }

    /// One autonomous step of the system.
    pub fn step(&self, s: &mut StateRef) -> Result<(), KernelError> {
        self.check_owner(s)?;
        self.main_step.apply(s)
    }

    /// Records the valuations of `conditions` on `s0` and after each of `bound` main steps.
    pub fn generate_trace(
        &self,
        s0: StateRef,
        bound: u64,
        conditions: &[&str],
    ) -> Result<Trace, KernelError> {
        let defs = conditions
            .iter()
            .map(|id| self.condition(id))
            .collect::<Result<Vec<_>, _>>()?;
        self.check_owner(&s0)?;
        let valuate = |s: &StateRef| defs.iter().map(|c| c.eval(s)).collect::<Result<Vec<_>, _>>();

        let mut trace = Trace::new(conditions.iter().map(|c| c.to_string()).collect());
        let mut state = s0;
        trace.push(valuate(&state)?)?;
        for _ in 0..bound {
            self.main_step.apply(&mut state)?;
            trace.push(valuate(&state)?)?;
        }
        Ok(trace)
    }
}

pub struct ModelBuilder<T: State> {
    name: String,
    description: String,
    init: Arc<InitFn>,
    main_step: ActionDef,
    actions: BTreeMap<String, ActionDef>,
    conditions: BTreeMap<String, ConditionDef>,
    measures: BTreeMap<String, MeasureDef>,
    equivalences: BTreeMap<String, EquivalenceDef>,
    horizon: Option<u64>,
    _state: std::marker::PhantomData<fn() -> T>,
}

impl<T: State> ModelBuilder<T> {
    pub fn describe(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }

    pub fn main_step(mut self, modifies: &[&str], f: impl Fn(&mut T) + Send + Sync + 'static) -> Self {
        self.main_step = ActionDef::new::<T>("main", modifies, f);
        self
    }

    pub fn condition(
        mut self,
        id: &str,
        text: &str,
        f: impl Fn(&T) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.conditions
            .insert(id.to_string(), ConditionDef::new::<T>(id, text, f));
        self
    }

    pub fn measure(
        mut self,
        id: &str,
        text: &str,
        f: impl Fn(&T) -> u64 + Send + Sync + 'static,
    ) -> Self {
        self.measures
            .insert(id.to_string(), MeasureDef::new::<T>(id, text, f));
        self
    }

    pub fn action(mut self, id: &str, modifies: &[&str], f: impl Fn(&mut T) + Send + Sync + 'static) -> Self {
        self.actions
            .insert(id.to_string(), ActionDef::new::<T>(id, modifies, f));
        self
    }

    /// Registers an action guarded by an already registered condition.
    pub fn guarded_action(
        mut self,
        id: &str,
        guard: &str,
        modifies: &[&str],
        f: impl Fn(&mut T) + Send + Sync + 'static,
    ) -> Result<Self, KernelError> {
        let guard = self
            .conditions
            .get(guard)
            .cloned()
            .ok_or_else(|| KernelError::UnknownCondition {
                model: self.name.clone(),
                id: guard.to_string(),
            })?;
        self.actions.insert(
            id.to_string(),
            ActionDef::new::<T>(id, modifies, f).with_guard(guard),
        );
        Ok(self)
    }

    pub fn equivalence(mut self, id: &str, f: impl Fn(&T, &T) -> bool + Send + Sync + 'static) -> Self {
        self.equivalences
            .insert(id.to_string(), EquivalenceDef::new::<T>(id, f));
        self
    }

    pub fn horizon(mut self, steps: u64) -> Self {
        self.horizon = Some(steps);
        self
    }

    pub fn build(self) -> SystemModel {
        SystemModel {
            name: self.name,
            description: self.description,
            init: self.init,
            main_step: self.main_step,
            actions: self.actions,
            conditions: self.conditions,
            measures: self.measures,
            equivalences: self.equivalences,
            horizon: self.horizon,
        }
    }
}

/// Region names whose canonical text differs between two snapshots.
pub fn changed_regions(before: &StateRef, after: &StateRef) -> BTreeSet<String> {
    diff_regions(&before.regions(), &after.regions())
}

/// As [`changed_regions`], on region texts captured earlier. Capturing text
/// rather than cloning matters for states that share storage with their clones.
pub fn diff_regions(before: &[(String, String)], after: &[(String, String)]) -> BTreeSet<String> {
    let after: BTreeMap<&str, &str> = after.iter().map(|(r, t)| (r.as_str(), t.as_str())).collect();
    let mut changed: BTreeSet<String> = before
        .iter()
        .filter(|(r, text)| after.get(r.as_str()) != Some(&text.as_str()))
        .map(|(r, _)| r.clone())
        .collect();
    changed.extend(
        after
            .keys()
            .filter(|r| !before.iter().any(|(b, _)| b == *r))
            .map(|r| r.to_string()),
    );
    changed
}
