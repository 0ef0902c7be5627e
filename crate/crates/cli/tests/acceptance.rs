//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line, then exits non-zero if any failed.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soor_core::adt::{suite_outcome, InputGenerator};
use soor_core::engine::{builtin_suite, parse_suite_file, run_suite, ItemSpec, SuiteConfig};
use soor_core::fixtures::{
    build_fixture, driver_fixture, run_probe, StackState, CONTAINER_LIBRARY, QUEUE_MUTANTS, STACK_MUTANTS,
    TREE_MUTANTS,
};
use soor_core::temporal::{
    bindings_from, catalog, check_trace, classify, find_template, instantiate_template, ltl_eval, pattern_to_ltl,
    required_slots, slots_from, verify_stimulus_response, LtlFormula, PatternId, PatternSlots, ScopeId,
    TemplateKind,
};
use soor_core::{Failure, Outcome, Trace, Witness};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bits_trace(atoms: &[&str], len: usize, bits: u64) -> Trace {
    let k = atoms.len();
    Trace::from_fn(atoms, len, |step, c| bits >> (step * k + c) & 1 == 1)
}

fn lower_slots(p: PatternId, sc: ScopeId) -> (PatternSlots, Vec<String>) {
    let names = required_slots(p, sc);
    let atoms: Vec<String> = names.iter().map(|s| s.to_lowercase()).collect();
    let slots = names.iter().zip(&atoms).map(|(s, a)| (s.to_string(), a.clone())).collect();
    (slots, atoms)
}

fn agree(p: PatternId, sc: ScopeId, slots: &PatternSlots, t: &Trace) -> Result<(), String> {
    let f = pattern_to_ltl(p, sc, slots).map_err(|e| e.to_string())?;
    let expected = classify(&f, t).map_err(|e| e.to_string())?;
    let finite = ltl_eval(&f, t, 0).map_err(|e| e.to_string())?;
    let got = check_trace(p, sc, slots, t).map_err(|e| e.to_string())?.outcome;
    ensure(got == expected && (got == Outcome::Holds) == finite, || {
        format!("{p} {sc}: monitor {got}, formula {expected} on {:?}", t.steps())
    })
}

fn pattern_oracle_equivalence() -> Check {
    let start = Instant::now();
    let (mut exhaustive, mut sampled) = (0u64, 0u64);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in PatternId::all() {
        for sc in ScopeId::all() {
            let (slots, atoms) = lower_slots(p, sc);
            let names: Vec<&str> = atoms.iter().map(String::as_str).collect();
            if names.len() <= 2 {
                for len in 1..=6 {
                    for bits in 0..(1u64 << (names.len() * len)) {
                        agree(p, sc, &slots, &bits_trace(&names, len, bits))?;
                        exhaustive += 1;
                    }
                }
            } else {
                for _ in 0..10_000 {
                    let len = rng.random_range(1..=12);
                    let bits: u64 = rng.random();
                    agree(p, sc, &slots, &bits_trace(&names, len, bits))?;
                    sampled += 1;
                }
            }
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!(
        "50 pairs, {exhaustive} exhaustive + {sampled} seeded traces, 0 disagreements, {:.1}s",
        took.as_secs_f64()
    ))
}

fn a(id: &str) -> LtlFormula {
    LtlFormula::Atom(id.into())
}
fn not(f: LtlFormula) -> LtlFormula {
    LtlFormula::Not(Box::new(f))
}
fn and(l: LtlFormula, r: LtlFormula) -> LtlFormula {
    LtlFormula::And(Box::new(l), Box::new(r))
}
fn or(l: LtlFormula, r: LtlFormula) -> LtlFormula {
    LtlFormula::Or(Box::new(l), Box::new(r))
}
fn until(l: LtlFormula, r: LtlFormula) -> LtlFormula {
    LtlFormula::Until(Box::new(l), Box::new(r))
}

/// □((Q ∧ ◇R) → (¬P∧¬R) U (R ∨ ((P∧¬R) U (R ∨ ((¬P∧¬R) U (R ∨ ((P∧¬R) U (R ∨ (¬P U R)))))))))
fn two_bounded_between_by_hand() -> LtlFormula {
    let (p, q, r) = (a("p"), a("q"), a("r"));
    let quiet = || and(not(p.clone()), not(r.clone()));
    let busy = || and(p.clone(), not(r.clone()));
    let innermost = until(not(p.clone()), r.clone());
    let level1 = until(quiet(), or(r.clone(), until(busy(), or(r.clone(), innermost))));
    let level2 = until(quiet(), or(r.clone(), until(busy(), or(r.clone(), level1))));
    LtlFormula::Always(Box::new(LtlFormula::Implies(
        Box::new(and(q, LtlFormula::Eventually(Box::new(r)))),
        Box::new(level2),
    )))
}

/// Violated iff some Q position opens a segment closed by a later (or same) R
/// that contains more than `k` maximal runs of P.
fn episode_oracle(t: &Trace, k: u32) -> Outcome {
    let steps = t.steps();
    let (p, q, r) = (0, 1, 2);
    for i in 0..steps.len() {
        if !steps[i][q] {
            continue;
        }
        let Some(j) = (i..steps.len()).find(|&j| steps[j][r]) else {
            continue;
        };
        let starts = (i..j).filter(|&t| steps[t][p] && (t == i || !steps[t - 1][p])).count();
        if starts > k as usize {
            return Outcome::Violated;
        }
    }
    Outcome::Holds
}

fn bounded_existence_fidelity() -> Check {
    let slots = slots_from([("P", "p"), ("Q", "q"), ("R", "r")]);
    let two = pattern_to_ltl(PatternId::BoundedExistence { k: 2 }, ScopeId::BetweenQandR, &slots)
        .map_err(|e| e.to_string())?;
    ensure(two == two_bounded_between_by_hand(), || format!("structure differs: {two}"))?;
    let mut checked = 0u64;
    for k in 1..=3 {
        let p = PatternId::BoundedExistence { k };
        let f = pattern_to_ltl(p, ScopeId::BetweenQandR, &slots).map_err(|e| e.to_string())?;
        for len in 1..=7 {
            for bits in 0..(1u64 << (3 * len)) {
                let t = bits_trace(&["p", "q", "r"], len, bits);
                let want = episode_oracle(&t, k);
                let by_formula = classify(&f, &t).map_err(|e| e.to_string())?;
                let by_monitor = check_trace(p, ScopeId::BetweenQandR, &slots, &t)
                    .map_err(|e| e.to_string())?
                    .outcome;
                ensure(by_formula == want && by_monitor == want, || {
                    format!("k={k}: oracle {want}, formula {by_formula}, monitor {by_monitor} on {:?}", t.steps())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("nesting matches for k=2; {checked} traces agree for k in 1..=3"))
}

fn stimulus_response_bound() -> Check {
    let model = build_fixture("stack").map_err(|e| e.to_string())?;
    let t = find_template("STIMULUS_RESPONSE").map_err(|e| e.to_string())?;
    let binding = bindings_from([
        ("stimulus", "not_is_empty"),
        ("response", "is_empty"),
        ("action", "pop"),
        ("timer", "count"),
    ]);
    let r = instantiate_template(&t, model.clone(), binding, "POPPING_EMPTIES_STACK", None)
        .map_err(|e| e.to_string())?;
    for n in 1..=100usize {
        let v = verify_stimulus_response(&r, model.adopt(StackState::of_len(n))).map_err(|e| e.to_string())?;
        ensure(v.outcome == Outcome::Holds && v.iterations == Some(n as u64), || {
            format!("n={n}: {} after {:?} iterations", v.outcome, v.iterations)
        })?;
    }
    let empty = verify_stimulus_response(&r, model.adopt(StackState::of_len(0))).map_err(|e| e.to_string())?;
    ensure(
        empty.outcome == Outcome::PreconditionUnmet && empty.iterations == Some(0),
        || format!("n=0: {} after {:?} iterations", empty.outcome, empty.iterations),
    )?;
    Ok("n in 1..=100 Holds after exactly n pops (variant = n); \
        n=0 is PreconditionUnmet after 0 iterations because the stimulus `not_is_empty` is false on an empty stack"
        .into())
}

fn flawed_container_analog() -> Check {
    let seeded: BTreeSet<String> = CONTAINER_LIBRARY
        .iter()
        .filter(|(_, fault)| fault.is_some())
        .map(|(k, _)| format!("flawed-containers/{k}"))
        .collect();
    ensure(CONTAINER_LIBRARY.len() == 17 && seeded.len() == 6, || "library is not 17/6".into())?;
    for seed in [1, 7, 42] {
        let items = builtin_suite("flawed-containers").ok_or("missing builtin")?;
        let rep = run_suite(&SuiteConfig::new(items, seed)).map_err(|e| e.to_string())?;
        let flagged: BTreeSet<String> = rep
            .items
            .iter()
            .filter(|i| i.verdict == Outcome::Violated)
            .map(|i| i.name.clone())
            .collect();
        let clean = rep.items.iter().filter(|i| i.verdict == Outcome::Holds).count();
        ensure(flagged == seeded && clean == 11, || {
            format!("seed {seed}: flagged {flagged:?}, {clean} clean")
        })?;
    }
    Ok("exactly the 6 seeded variants flagged and 11 clean, seeds 1, 7, 42".into())
}

fn adt_suites() -> Check {
    let gen = InputGenerator::new(1000).with_samples(1000);
    for adt in ["stack", "queue", "tree"] {
        let reports = driver_fixture(adt).map_err(|e| e.to_string())?.run(&gen);
        for d in &reports {
            ensure(d.outcome == Outcome::Holds && d.evaluated == 1000, || {
                format!("{adt}: {} {} after {} inputs: {}", d.driver, d.outcome, d.evaluated, d.message)
            })?;
        }
    }
    let mut mutants = 0;
    for (adt, names) in [("stack", &STACK_MUTANTS[..]), ("queue", &QUEUE_MUTANTS), ("tree", &TREE_MUTANTS)] {
        ensure(names.len() >= 5, || format!("{adt} ships {} mutants", names.len()))?;
        for m in names {
            let reports = driver_fixture(&format!("{adt}/{m}")).map_err(|e| e.to_string())?.run(&gen);
            ensure(suite_outcome(&reports) == Outcome::Violated, || format!("{adt}/{m} survives"))?;
            mutants += 1;
        }
    }
    Ok(format!("3 reference suites hold on 1000 inputs per driver; {mutants} of {mutants} mutants violated"))
}

fn contract_divergence() -> Check {
    let mut worst = 0;
    for seed in 0..50 {
        let v = run_probe("square_vs_zero", &InputGenerator::new(seed).with_samples(100)).ok_or("missing probe")?;
        ensure(v.outcome == Outcome::Violated && v.failure == Some(Failure::Underspecified), || {
            format!("seed {seed}: {} {}", v.outcome, v.message)
        })?;
        let Some(Witness::Input { slots }) = &v.witness else {
            return Err(format!("seed {seed}: no input witness"));
        };
        let x: i64 = slots["input"].parse().map_err(|_| "witness input is not an integer")?;
        ensure(x.checked_mul(x).is_some_and(|sq| sq > 0), || format!("seed {seed}: {x} is not a divergence"))?;
        worst = worst.max(v.iterations.unwrap_or(u64::MAX));
    }
    ensure(worst <= 100, || format!("needed {worst} samples"))?;
    Ok(format!("square vs zero flagged on 50 seeds, at most {worst} samples"))
}

fn calendar_soors() -> Check {
    for seed in 0..3 {
        for (suite, model, equinoxes, frequency) in [
            ("calendar", "calendar", 2, Outcome::Holds),
            ("calendar-3eq", "calendar_3eq", 3, Outcome::Violated),
        ] {
            let m = build_fixture(model).map_err(|e| e.to_string())?;
            let year = m
                .generate_trace(m.init(seed), 365, &["equinox"])
                .map_err(|e| e.to_string())?;
            let counted = year.steps().iter().filter(|v| v[0]).count();
            ensure(counted == equinoxes, || format!("{model} has {counted} equinoxes"))?;

            let items = builtin_suite(suite).ok_or("missing builtin")?;
            let rep = run_suite(&SuiteConfig::new(items, seed)).map_err(|e| e.to_string())?;
            let verdict = |name: &str| {
                rep.items
                    .iter()
                    .find(|i| i.name.ends_with(name))
                    .map(|i| i.verdict)
                    .ok_or_else(|| format!("{suite} lacks {name}"))
            };
            let eq = verdict("EQUINOX_FREQUENCY")?;
            let ye = verdict("YEAR_END_RESPONDS_TO_YEAR_BEGINNING")?;
            ensure(eq == frequency && ye == Outcome::Holds, || {
                format!("{suite} seed {seed}: EQUINOX_FREQUENCY {eq}, YEAR_END_RESPONDS_TO_YEAR_BEGINNING {ye}")
            })?;
        }
    }
    Ok("EQUINOX_FREQUENCY holds on 2 equinoxes and is violated on 3; year end responds on both; seeds 0..3".into())
}

fn declarative_entry(i: usize, template: &str, slots: &[&str]) -> String {
    let bind_for = |slot: &str| match slot {
        "stimulus" => "not_is_empty",
        "response" => "is_empty",
        "action" => "pop",
        "timer" => "count",
        "P" => "equinox",
        "S" => "solstice",
        "T" => "month_start",
        "Q" => "year_beginning",
        _ => "year_end",
    };
    let model = if template == "STIMULUS_RESPONSE" { "stack" } else { "calendar" };
    let bind: Vec<String> = slots.iter().map(|s| format!("{s} = \"{}\"", bind_for(s))).collect();
    format!(
        "[[requirement]]\nname = \"R{i}\"\ntemplate = \"{template}\"\nmodel = \"{model}\"\nbind = {{ {} }}\nbound = 366\n",
        bind.join(", ")
    )
}

fn reuse_linearity() -> Check {
    let templates = catalog();
    let mut text = String::new();
    let mut longest = 0;
    for (i, t) in templates.iter().enumerate() {
        let entry = declarative_entry(i, &t.name, &t.slot_names());
        longest = longest.max(entry.lines().count());
        text.push_str(&entry);
        text.push('\n');
    }
    ensure(longest <= 6, || format!("an entry needs {longest} lines"))?;
    let items = parse_suite_file(&text).map_err(|e| e.to_string())?;
    ensure(items.len() == templates.len(), || format!("{} items parsed", items.len()))?;
    let rep = run_suite(&SuiteConfig::new(items.clone(), 0)).map_err(|e| e.to_string())?;
    for (spec, (item, t)) in items.iter().zip(rep.items.iter().zip(&templates)) {
        let ItemSpec::Requirement(e) = spec else {
            return Err(format!("{} is not a requirement", spec.name()));
        };
        ensure(item.template == t.name && item.rendering.is_some() && e.k.is_none(), || {
            format!("{} did not instantiate {}", item.name, t.name)
        })?;
    }
    let patterns = templates.iter().filter(|t| matches!(t.kind, TemplateKind::Pattern { .. })).count();
    Ok(format!(
        "{} templates ({patterns} pattern, 1 stimulus/response) from entries of at most {longest} lines",
        templates.len()
    ))
}

fn determinism() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_soor"))
            .args(["verify", "--suite", "builtin:all", "--seed", "7", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (first, second) = (run()?, run()?);
    ensure(!first.stdout.is_empty() && first.status.code() == Some(1), || {
        format!("status {:?}: {}", first.status.code(), String::from_utf8_lossy(&first.stderr))
    })?;
    ensure(first.stdout == second.stdout, || "reports differ".into())?;
    Ok(format!("two runs produced the same {} bytes", first.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("pattern/oracle equivalence", pattern_oracle_equivalence),
        ("bounded existence between fidelity", bounded_existence_fidelity),
        ("stimulus/response bound", stimulus_response_bound),
        ("flawed-container analog", flawed_container_analog),
        ("ADT suites and mutants", adt_suites),
        ("contract divergence", contract_divergence),
        ("calendar requirements", calendar_soors),
        ("reuse linearity", reuse_linearity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (title, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {}: PASS {title}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {title}: {why}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
