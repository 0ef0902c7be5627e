//! Running suites of requirements, driver suites and probes, and reporting on them.

mod report;
mod suites;

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::adt::{suite_outcome, InputGenerator, RunSuite};
use crate::fixtures::{build_fixture, driver_fixture, probe_contract, run_probe};
use crate::kernel::{Outcome, Verdict};
use crate::temporal::{find_template, instantiate_template, TemplateKind, TemporalRequirement};
use crate::{mix_seed, name_hash};

pub use report::{
    deserialize_report, report_schema, serialize_report, Format, ItemKind, ItemReport, Report, Totals,
    HUMAN_TRACE_LIMIT,
};
pub use suites::{
    builtin_suite, driver_fixtures, parse_suite_file, DriversEntry, ItemSpec, ProbeEntry, RequirementEntry,
    BUILTIN_SUITES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unresolved suite items:\n  {}", .0.join("\n  "))]
    Unresolved(Vec<String>),
    #[error("invalid suite file: {0}")]
    SuiteFile(String),
    #[error("unknown builtin suite `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid filter `{0}`")]
    Filter(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub items: Vec<ItemSpec>,
    /// Replaces every requirement's own time boundary.
    pub time_boundary: Option<u64>,
    pub seed: u64,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
    pub format: Format,
    /// Samples per driver and per probe.
    pub samples: usize,
    /// Record wall-clock time per item. Off by default so reports are byte-stable.
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            items: Vec::new(),
            time_boundary: None,
            seed: 0,
            jobs: 0,
            format: Format::Json,
            samples: 1000,
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn new(items: Vec<ItemSpec>, seed: u64) -> Self {
        Self {
            items,
            seed,
            ..Self::default()
        }
    }
}

/// Items from a `builtin:<name>` reference or the text of a suite file.
pub fn load_suite(reference: &str, read_file: impl FnOnce(&str) -> std::io::Result<String>) -> Result<Vec<ItemSpec>, EngineError> {
    match reference.strip_prefix("builtin:") {
        Some(name) => builtin_suite(name).ok_or_else(|| EngineError::UnknownBuiltin(name.to_string())),
        None => {
            let text = read_file(reference).map_err(|e| EngineError::SuiteFile(format!("{reference}: {e}")))?;
            parse_suite_file(&text)
        }
    }
}

/// Keeps the items whose names match a glob pattern.
pub fn filter_items(items: Vec<ItemSpec>, pattern: &str) -> Result<Vec<ItemSpec>, EngineError> {
    let p = glob::Pattern::new(pattern).map_err(|e| EngineError::Filter(format!("{pattern}: {e}")))?;
    Ok(items.into_iter().filter(|i| p.matches(i.name())).collect())
}

enum Resolved {
    Requirement(TemporalRequirement),
    Drivers { fixture: String, suite: Box<dyn RunSuite> },
    Probe { probe: String },
}

struct Item {
    name: String,
    resolved: Resolved,
}

pub fn resolve_requirement(e: &RequirementEntry) -> Result<TemporalRequirement, String> {
    let mut t = find_template(&e.template).map_err(|err| err.to_string())?;
    if let Some(k) = e.k {
        t = t.with_k(k).map_err(|err| err.to_string())?;
    }
    let model = build_fixture(&e.model).map_err(|err| err.to_string())?;
    let r = instantiate_template(&t, model, e.bind.clone(), &e.name, e.bound).map_err(|err| err.to_string())?;
    if matches!(r.template.kind, TemplateKind::Pattern { .. }) {
        r.effective_bound().map_err(|err| err.to_string())?;
    }
    Ok(r)
}

fn resolve(cfg: &SuiteConfig) -> Result<Vec<Item>, EngineError> {
    let mut problems = Vec::new();
    let mut items = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for spec in &cfg.items {
        let name = spec.name().to_string();
        if !seen.insert(name.clone()) {
            problems.push(format!("{name}: duplicate item name"));
            continue;
        }
        let resolved = match spec {
            ItemSpec::Requirement(e) => resolve_requirement(e).map(|mut r| {
                if let Some(tb) = cfg.time_boundary {
                    r = r.with_time_boundary(tb);
                }
                Resolved::Requirement(r)
            }),
            ItemSpec::Drivers(d) => driver_fixture(&d.fixture)
                .map(|suite| Resolved::Drivers {
                    fixture: d.fixture.clone(),
                    suite,
                })
                .map_err(|e| e.to_string()),
            ItemSpec::Probe(p) => match probe_contract(&p.probe) {
                Some(_) => Ok(Resolved::Probe { probe: p.probe.clone() }),
                None => Err(format!("unknown probe `{}`", p.probe)),
            },
        };
        match resolved {
            Ok(resolved) => items.push(Item { name, resolved }),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    if problems.is_empty() {
        Ok(items)
    } else {
        Err(EngineError::Unresolved(problems))
    }
}

fn generator(cfg: &SuiteConfig, name: &str) -> InputGenerator {
    InputGenerator::new(mix_seed(cfg.seed, name_hash(name))).with_samples(cfg.samples)
}

fn from_verdict(name: &str, kind: ItemKind, template: String, rendering: Option<String>, v: Verdict) -> ItemReport {
    ItemReport {
        name: name.to_string(),
        kind,
        template,
        verdict: v.outcome,
        witness: v.witness,
        rendering,
        millis: 0,
        message: v.message,
        failure: v.failure,
        iterations: v.iterations,
        details: Vec::new(),
    }
}

fn run_item(cfg: &SuiteConfig, item: &Item) -> ItemReport {
    let start = Instant::now();
    let mut rep = match &item.resolved {
        Resolved::Requirement(r) => {
            let v = r.verify(cfg.seed).unwrap_or_else(|e| {
                Verdict::violated(
                    crate::kernel::Failure::Guard,
                    crate::kernel::Witness::Input { slots: Default::default() },
                    format!("{}: {e}", r.name),
                )
            });
            from_verdict(&item.name, ItemKind::Requirement, r.template.name.clone(), Some(r.render()), v)
        }
        Resolved::Drivers { fixture, suite } => {
            let details = suite.run(&generator(cfg, &item.name));
            let outcome = suite_outcome(&details);
            let worst = details.iter().find(|d| d.outcome == outcome && outcome == Outcome::Violated);
            let counted = details.iter().filter(|d| d.outcome != Outcome::PreconditionUnmet).count();
            let message = match worst {
                Some(d) => d.message.clone(),
                None => format!(
                    "{}: {counted} of {} drivers evaluated, none violated",
                    suite.adt_name(),
                    details.len()
                ),
            };
            ItemReport {
                witness: worst.and_then(|d| d.witness.clone()),
                failure: worst.and_then(|d| d.failure),
                message,
                details,
                ..from_verdict(
                    &item.name,
                    ItemKind::Drivers,
                    fixture.clone(),
                    None,
                    Verdict {
                        outcome,
                        witness: None,
                        message: String::new(),
                        failure: None,
                        iterations: None,
                    },
                )
            }
        }
        Resolved::Probe { probe } => {
            let v = run_probe(probe, &generator(cfg, &item.name))
                .unwrap_or_else(|| unreachable!("probe names are checked during resolution"));
            from_verdict(&item.name, ItemKind::Probe, probe.clone(), None, v)
        }
    };
    if cfg.timings {
        rep.millis = start.elapsed().as_millis() as u64;
    }
    rep
}

/// Resolves every item, then runs them on a worker pool. Items appear in the
/// report in declaration order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, EngineError> {
    let items = resolve(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| EngineError::Pool(e.to_string()))?;
    let reports = pool.install(|| items.par_iter().map(|item| run_item(cfg, item)).collect());
    Ok(Report::new(cfg.seed, reports))
}

/// Natural-language text of a requirement.
pub fn render_requirement(r: &TemporalRequirement) -> String {
    r.render()
}

/// Shared handle to a resolved requirement, for callers that render without running.
pub fn requirement(e: &RequirementEntry) -> Result<Arc<TemporalRequirement>, EngineError> {
    resolve_requirement(e)
        .map(Arc::new)
        .map_err(|p| EngineError::Unresolved(vec![format!("{}: {p}", e.name)]))
}
