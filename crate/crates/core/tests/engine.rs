use proptest::prelude::*;
use soor_core::engine::{
    builtin_suite, deserialize_report, filter_items, load_suite, parse_suite_file, render_requirement,
    requirement, run_suite, serialize_report, DriversEntry, EngineError, Format, ItemSpec, Report,
    RequirementEntry, SuiteConfig, Totals, BUILTIN_SUITES,
};
use soor_core::Outcome;

fn config(suite: &str, seed: u64) -> SuiteConfig {
    SuiteConfig {
        samples: 200,
        ..SuiteConfig::new(builtin_suite(suite).unwrap(), seed)
    }
}

fn verdicts(r: &Report) -> Vec<(String, Outcome)> {
    r.items.iter().map(|i| (i.name.clone(), i.verdict)).collect()
}

#[test]
fn three_compliant_requirements_hold() {
    let rep = run_suite(&config("calendar", 7)).unwrap();
    assert_eq!(
        rep.totals,
        Totals {
            holds: 3,
            ..Totals::default()
        }
    );
    assert_eq!(rep.exit_status(), 0);
}

#[test]
fn empty_suite_gives_an_empty_successful_report() {
    let rep = run_suite(&SuiteConfig::new(Vec::new(), 1)).unwrap();
    assert!(rep.items.is_empty());
    assert_eq!(rep.totals.sum(), 0);
    assert_eq!(rep.exit_status(), 0);
}

#[test]
fn wipe_on_alias_fixture_is_the_one_violation() {
    let items = vec![
        ItemSpec::Drivers(DriversEntry {
            name: "copy/array".into(),
            fixture: "containers/array".into(),
        }),
        ItemSpec::Drivers(DriversEntry {
            name: "copy/array2".into(),
            fixture: "containers/array2".into(),
        }),
        ItemSpec::Drivers(DriversEntry {
            name: "copy/hash_set".into(),
            fixture: "containers/hash_set".into(),
        }),
    ];
    let rep = run_suite(&SuiteConfig::new(items, 3)).unwrap();
    assert_eq!(rep.totals.violated, 1);
    let bad = rep.items.iter().find(|i| i.verdict == Outcome::Violated).unwrap();
    assert_eq!(bad.name, "copy/array2");
    assert!(bad.witness.is_some());
    assert_eq!(rep.exit_status(), 1);
}

#[test]
fn resolution_failures_are_all_listed_before_running() {
    let text = r#"
[[requirement]]
name = "A"
template = "NO_SUCH_TEMPLATE"
model = "calendar"
bind = { P = "equinox" }

[[requirement]]
name = "B"
template = "ABSENCE_GLOBAL"
model = "calendar"
bind = { P = "no_such_condition" }

[[drivers]]
name = "C"
fixture = "stack/no_such_mutant"
"#;
    let items = parse_suite_file(text).unwrap();
    let err = run_suite(&SuiteConfig::new(items, 0)).unwrap_err();
    let EngineError::Unresolved(problems) = err else {
        panic!("expected unresolved items")
    };
    assert_eq!(problems.len(), 3, "{problems:?}");
    assert!(problems[1].contains("no_such_condition"));
}

#[test]
fn suite_files_reject_unknown_keys() {
    let text = "[[requirement]]\nname = \"A\"\ntemplate = \"ABSENCE_GLOBAL\"\nmodel = \"calendar\"\nbind = {}\ncolour = 1\n";
    assert!(matches!(parse_suite_file(text), Err(EngineError::SuiteFile(_))));
}

#[test]
fn builtin_references_resolve() {
    for s in BUILTIN_SUITES {
        let items = load_suite(&format!("builtin:{s}"), |_| unreachable!()).unwrap();
        assert!(!items.is_empty());
    }
    assert!(matches!(
        load_suite("builtin:nope", |_| unreachable!()),
        Err(EngineError::UnknownBuiltin(_))
    ));
}

#[test]
fn json_round_trips_on_a_ten_item_report() {
    let mut items = builtin_suite("calendar-3eq").unwrap();
    items.extend(builtin_suite("contracts").unwrap());
    items.extend(builtin_suite("stack").unwrap());
    items.push(builtin_suite("mutants").unwrap().remove(0));
    assert_eq!(items.len(), 10);
    let rep = run_suite(&SuiteConfig {
        samples: 100,
        ..SuiteConfig::new(items, 5)
    })
    .unwrap();
    let json = serialize_report(&rep, Format::Json);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(value["totals"].is_object());
    for key in ["name", "template", "verdict", "witness", "rendering", "millis"] {
        assert!(value["items"][0].get(key).is_some(), "{key}");
    }
    assert_eq!(deserialize_report(&json).unwrap(), rep);
}

#[test]
fn markdown_has_one_section_per_item() {
    let rep = run_suite(&config("turnstile", 2)).unwrap();
    let md = serialize_report(&rep, Format::Markdown);
    assert_eq!(md.matches("\n## ").count(), rep.items.len());
}

#[test]
fn human_formats_truncate_long_traces() {
    let rep = run_suite(&config("calendar-3eq", 7)).unwrap();
    let plain = serialize_report(&rep, Format::Plain);
    assert!(plain.contains("steps 225..275 of 365, witness at step 265"), "{plain}");
    let widest = plain
        .lines()
        .filter(|l| l.trim_start().starts_with("equinox "))
        .map(|l| l.trim_start().len())
        .max()
        .unwrap();
    assert_eq!(widest, "equinox ".len() + 50);
    let json = serialize_report(&rep, Format::Json);
    let full: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(full["items"][0]["witness"]["trace"]["trace"]["steps"].as_array().unwrap().len(), 365);
}

#[test]
fn rendering_names_the_bound_conditions() {
    let entry = |name: &str, template: &str, bind: &[(&str, &str)], k| RequirementEntry {
        name: name.into(),
        template: template.into(),
        model: "calendar".into(),
        bind: bind.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        bound: Some(366),
        k,
    };
    let r = requirement(&entry(
        "YEAR_END_RESPONDS_TO_YEAR_BEGINNING",
        "RESPONSE_GLOBAL",
        &[("P", "year_beginning"), ("S", "year_end")],
        None,
    ))
    .unwrap();
    let text = render_requirement(&r);
    assert!(text.contains("year_beginning") && text.contains("year_end"), "{text}");
    assert!(text.contains("is always followed by"), "{text}");
    assert_eq!(text, render_requirement(&r));

    let eq = requirement(&entry(
        "EQUINOX_FREQUENCY",
        "BOUNDED_EXISTENCE_BETWEEN",
        &[("P", "equinox"), ("Q", "year_beginning"), ("R", "year_end")],
        Some(2),
    ))
    .unwrap();
    let text = render_requirement(&eq);
    assert!(text.contains("not more than 2 times"), "{text}");
    assert!(text.starts_with("EQUINOX_FREQUENCY [calendar]: "), "{text}");
    assert!(text.ends_with("(time boundary 366 steps)"), "{text}");
}

#[test]
fn time_boundary_override_applies_to_every_requirement() {
    let mut cfg = config("calendar", 7);
    cfg.time_boundary = Some(100);
    let rep = run_suite(&cfg).unwrap();
    let resp = rep.items.iter().find(|i| i.name.ends_with("YEAR_END_RESPONDS_TO_YEAR_BEGINNING")).unwrap();
    assert_eq!(resp.verdict, Outcome::BoundExhausted);
    assert_eq!(rep.exit_status(), 2);
}

#[test]
fn filter_selects_by_glob_and_keeps_verdicts() {
    let all = run_suite(&config("all", 7)).unwrap();
    let items = filter_items(builtin_suite("all").unwrap(), "flawed-containers/*").unwrap();
    assert_eq!(items.len(), 17);
    let some = run_suite(&SuiteConfig {
        samples: 200,
        ..SuiteConfig::new(items, 7)
    })
    .unwrap();
    for item in &some.items {
        let same = all.items.iter().find(|i| i.name == item.name).unwrap();
        assert_eq!(same.verdict, item.verdict, "{}", item.name);
    }
    assert!(matches!(filter_items(Vec::new(), "[unclosed"), Err(EngineError::Filter(_))));
}

#[test]
fn reports_are_byte_identical_for_a_seed_and_parallelism_does_not_matter() {
    let mut one = config("all", 11);
    one.jobs = 1;
    let mut four = one.clone();
    four.jobs = 4;
    let a = serialize_report(&run_suite(&one).unwrap(), Format::Json);
    let b = serialize_report(&run_suite(&one).unwrap(), Format::Json);
    let c = serialize_report(&run_suite(&four).unwrap(), Format::Json);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn totals_match_the_item_verdicts(seed in any::<u64>(), suite in prop::sample::select(&BUILTIN_SUITES[..8])) {
        let rep = run_suite(&SuiteConfig { samples: 50, ..SuiteConfig::new(builtin_suite(suite).unwrap(), seed) }).unwrap();
        prop_assert_eq!(rep.totals, Totals::of(rep.items.iter().map(|i| &i.verdict)));
        prop_assert_eq!(rep.totals.sum(), rep.items.len());
    }

    #[test]
    fn verdicts_do_not_depend_on_worker_count(seed in any::<u64>(), jobs in 1usize..5) {
        let mut cfg = config("mutants", seed);
        cfg.samples = 50;
        let base = run_suite(&SuiteConfig { jobs: 1, ..cfg.clone() }).unwrap();
        let par = run_suite(&SuiteConfig { jobs, ..cfg }).unwrap();
        prop_assert_eq!(verdicts(&base), verdicts(&par));
    }
}
