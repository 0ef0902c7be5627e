//! Suite items, the builtin suites and the declarative suite file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::fixtures::{driver_fixture_names, CONTAINER_LIBRARY, PROBES, QUEUE_MUTANTS, STACK_MUTANTS, TREE_MUTANTS};

/// One entry of a suite, before resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ItemSpec {
    Requirement(RequirementEntry),
    Drivers(DriversEntry),
    Probe(ProbeEntry),
}

impl ItemSpec {
    pub fn name(&self) -> &str {
        match self {
            ItemSpec::Requirement(r) => &r.name,
            ItemSpec::Drivers(d) => &d.name,
            ItemSpec::Probe(p) => &p.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementEntry {
    pub name: String,
    pub template: String,
    pub model: String,
    pub bind: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriversEntry {
    pub name: String,
    pub fixture: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeEntry {
    pub name: String,
    pub probe: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    #[serde(default)]
    requirement: Vec<RequirementEntry>,
    #[serde(default)]
    drivers: Vec<DriversEntry>,
    #[serde(default)]
    probe: Vec<ProbeEntry>,
}

/// Parses a suite file. Items run in file order within each table kind:
/// requirements, then driver suites, then probes.
pub fn parse_suite_file(text: &str) -> Result<Vec<ItemSpec>, EngineError> {
    let file: SuiteFile = toml::from_str(text).map_err(|e| EngineError::SuiteFile(e.to_string()))?;
    let mut items: Vec<ItemSpec> = file.requirement.into_iter().map(ItemSpec::Requirement).collect();
    items.extend(file.drivers.into_iter().map(ItemSpec::Drivers));
    items.extend(file.probe.into_iter().map(ItemSpec::Probe));
    Ok(items)
}

fn req(name: &str, template: &str, model: &str, bind: &[(&str, &str)], bound: Option<u64>, k: Option<u32>) -> ItemSpec {
    ItemSpec::Requirement(RequirementEntry {
        name: name.into(),
        template: template.into(),
        model: model.into(),
        bind: bind.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        bound,
        k,
    })
}

fn drivers(name: &str, fixture: &str) -> ItemSpec {
    ItemSpec::Drivers(DriversEntry {
        name: name.into(),
        fixture: fixture.into(),
    })
}

fn calendar_items(group: &str, model: &str) -> Vec<ItemSpec> {
    vec![
        req(
            &format!("{group}/EQUINOX_FREQUENCY"),
            "BOUNDED_EXISTENCE_BETWEEN",
            model,
            &[("P", "equinox"), ("Q", "year_beginning"), ("R", "year_end")],
            Some(366),
            Some(2),
        ),
        req(
            &format!("{group}/YEAR_END_RESPONDS_TO_YEAR_BEGINNING"),
            "RESPONSE_GLOBAL",
            model,
            &[("P", "year_beginning"), ("S", "year_end")],
            Some(366),
            None,
        ),
        req(
            &format!("{group}/EQUINOX_AFTER_MONTH_START"),
            "PRECEDENCE_GLOBAL",
            model,
            &[("P", "equinox"), ("S", "month_start")],
            Some(366),
            None,
        ),
    ]
}

pub const BUILTIN_SUITES: [&str; 9] = [
    "calendar",
    "calendar-3eq",
    "stack",
    "turnstile",
    "adt",
    "mutants",
    "contracts",
    "flawed-containers",
    "all",
];

/// Items of a builtin suite, addressed without the `builtin:` prefix.
pub fn builtin_suite(name: &str) -> Option<Vec<ItemSpec>> {
    let items = match name {
        "calendar" => calendar_items("calendar", "calendar"),
        "calendar-3eq" => calendar_items("calendar-3eq", "calendar_3eq"),
        "stack" => vec![
            req(
                "stack/POPPING_EMPTIES_STACK",
                "STIMULUS_RESPONSE",
                "stack",
                &[
                    ("stimulus", "not_is_empty"),
                    ("response", "is_empty"),
                    ("action", "pop"),
                    ("timer", "count"),
                ],
                None,
                None,
            ),
            req("stack/STACK_EMPTIES", "EXISTENCE_GLOBAL", "stack", &[("P", "is_empty")], None, None),
            req(
                "stack/EMPTY_STACK_STAYS_EMPTY",
                "UNIVERSALITY_AFTER",
                "stack",
                &[("P", "is_empty"), ("Q", "is_empty")],
                None,
                None,
            ),
        ],
        "turnstile" => vec![
            req(
                "turnstile/COIN_UNLOCKS",
                "STIMULUS_RESPONSE",
                "turnstile",
                &[
                    ("stimulus", "locked"),
                    ("response", "unlocked"),
                    ("action", "insert_coin"),
                    ("timer", "coins_missing"),
                ],
                None,
                None,
            ),
            req(
                "turnstile/PASSAGE_NEEDS_COIN",
                "PRECEDENCE_GLOBAL",
                "turnstile",
                &[("P", "passed"), ("S", "coin_inserted")],
                None,
                None,
            ),
            req(
                "turnstile/NO_PASSAGE_BEFORE_FIRST_COIN",
                "ABSENCE_BEFORE",
                "turnstile",
                &[("P", "passed"), ("R", "coin_inserted")],
                None,
                None,
            ),
        ],
        "adt" => ["stack", "queue", "tree", "bag/multiset"]
            .iter()
            .map(|f| drivers(&format!("adt/{f}"), f))
            .collect(),
        "mutants" => {
            let mut out = Vec::new();
            for (adt, mutants) in [
                ("stack", &STACK_MUTANTS[..]),
                ("queue", &QUEUE_MUTANTS[..]),
                ("tree", &TREE_MUTANTS[..]),
            ] {
                out.extend(mutants.iter().map(|m| drivers(&format!("mutants/{adt}/{m}"), &format!("{adt}/{m}"))));
            }
            out.push(drivers("mutants/bag/sequence", "bag/sequence"));
            out
        }
        "contracts" => PROBES
            .iter()
            .map(|p| {
                ItemSpec::Probe(ProbeEntry {
                    name: format!("contracts/{p}"),
                    probe: p.to_string(),
                })
            })
            .collect(),
        "flawed-containers" => CONTAINER_LIBRARY
            .iter()
            .map(|(k, _)| drivers(&format!("flawed-containers/{k}"), &format!("containers/{k}")))
            .collect(),
        "all" => BUILTIN_SUITES[..BUILTIN_SUITES.len() - 1]
            .iter()
            .flat_map(|s| builtin_suite(s).unwrap_or_default())
            .collect(),
        _ => return None,
    };
    Some(items)
}

/// Names accepted in `[[drivers]] fixture = ...`.
pub fn driver_fixtures() -> Vec<String> {
    driver_fixture_names()
}
