//! Named fixtures: transition-system models, ADT bindings with mutants, the
//! flawed container library and contract-divergence probes.

mod adts;
mod containers;
mod models;
mod probes;

use std::sync::Arc;

use thiserror::Error;

use crate::adt::{AdtError, RunSuite};
use crate::kernel::{KernelError, SystemModel};

pub use adts::{
    queue_binding, queue_suite, reference_queue_suite, stack_binding, stack_suite, tree_binding, tree_suite,
    tree_suite_typed, CountedStack, RefQueue, RefStack, RefTree, QUEUE_MUTANTS, STACK_MUTANTS, TREE_MUTANTS,
};
pub use containers::{
    bag_sampler, bag_suite, container_fault, container_model, container_suite, copy_into, Bag, Container,
    CopyFault, CONTAINER_LIBRARY,
};
pub use models::{
    calendar_3eq_model, calendar_model, stack_model, turnstile_model, CalendarState, StackState,
    TurnstileEvent, TurnstileState,
};
pub use probes::{probe_contract, run_probe, PROBES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown model fixture `{0}`")]
    UnknownModel(String),
    #[error("unknown driver fixture `{0}`")]
    UnknownDrivers(String),
    #[error("unknown probe `{0}`")]
    UnknownProbe(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Adt(#[from] AdtError),
}

pub const MODEL_FIXTURES: [&str; 7] = [
    "stack",
    "turnstile",
    "calendar",
    "calendar_3eq",
    "array2_correct",
    "array2_wipe_on_alias",
    "linked_queue_alias_bug",
];

/// Builds a model fixture. Models are factories: the seed is supplied per
/// run through [`SystemModel::init`].
pub fn build_fixture(name: &str) -> Result<Arc<SystemModel>, FixtureError> {
    let m = match name {
        "stack" => stack_model()?,
        "turnstile" => turnstile_model()?,
        "calendar" => calendar_model(),
        "calendar_3eq" => calendar_3eq_model(),
        "array2_correct" => container_model(name, "array2", None),
        "array2_wipe_on_alias" => container_model(name, "array2", Some(CopyFault::WipeOnAlias)),
        "linked_queue_alias_bug" => container_model(name, "linked_queue", Some(CopyFault::ClearThenRead)),
        _ => return Err(FixtureError::UnknownModel(name.to_string())),
    };
    Ok(Arc::new(m))
}

/// Every driver fixture name: reference suites, `adt/mutant` variants, the
/// two bag equalities and one entry per container variant.
pub fn driver_fixture_names() -> Vec<String> {
    let mut out = Vec::new();
    for (adt, mutants) in [
        ("stack", &STACK_MUTANTS[..]),
        ("queue", &QUEUE_MUTANTS[..]),
        ("tree", &TREE_MUTANTS[..]),
    ] {
        out.push(adt.to_string());
        out.extend(mutants.iter().map(|m| format!("{adt}/{m}")));
    }
    out.push("bag/sequence".into());
    out.push("bag/multiset".into());
    out.extend(CONTAINER_LIBRARY.iter().map(|(k, _)| format!("containers/{k}")));
    out
}

pub fn driver_fixture(name: &str) -> Result<Box<dyn RunSuite>, FixtureError> {
    let unknown = || FixtureError::UnknownDrivers(name.to_string());
    let (adt, variant) = match name.split_once('/') {
        Some((a, v)) => (a, Some(v)),
        None => (name, None),
    };
    let built = match adt {
        "stack" => stack_suite(variant),
        "queue" => queue_suite(variant),
        "tree" => tree_suite(variant),
        "bag" => match variant {
            Some("sequence") => Some(Ok(Box::new(bag_suite(false)) as Box<dyn RunSuite>)),
            Some("multiset") => Some(Ok(Box::new(bag_suite(true)) as Box<dyn RunSuite>)),
            _ => None,
        },
        "containers" => variant
            .and_then(container_suite)
            .map(|s| Ok(Box::new(s) as Box<dyn RunSuite>)),
        _ => None,
    };
    Ok(built.ok_or_else(unknown)??)
}
