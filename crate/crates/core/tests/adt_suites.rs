use proptest::prelude::*;
use soor_core::adt::{
    check_driver, frame_check, run_driver, suite_outcome, Bundle, InputGenerator, RunSuite,
};
use soor_core::fixtures::{
    bag_suite, driver_fixture, stack_binding, stack_suite, tree_suite_typed, RefQueue, RefStack, RefTree,
    CONTAINER_LIBRARY, QUEUE_MUTANTS, STACK_MUTANTS, TREE_MUTANTS,
};
use soor_core::{ActionDef, Failure, Outcome, StateRef};

fn outcome_of(name: &str, gen: &InputGenerator) -> Outcome {
    suite_outcome(&driver_fixture(name).unwrap().run(gen))
}

#[test]
fn reference_suites_hold_on_a_thousand_inputs() {
    let gen = InputGenerator::new(2024);
    for name in ["stack", "queue", "tree"] {
        for r in driver_fixture(name).unwrap().run(&gen) {
            assert_ne!(r.outcome, Outcome::Violated, "{name}: {} {}", r.driver, r.message);
            if r.outcome == Outcome::Holds {
                assert_eq!(r.evaluated, 1000, "{name}: {}", r.driver);
            }
        }
    }
}

#[test]
fn every_mutant_is_caught() {
    let gen = InputGenerator::new(7);
    for (adt, mutants) in [
        ("stack", &STACK_MUTANTS[..]),
        ("queue", &QUEUE_MUTANTS[..]),
        ("tree", &TREE_MUTANTS[..]),
    ] {
        assert!(mutants.len() >= 5);
        for m in mutants {
            let name = format!("{adt}/{m}");
            assert_eq!(outcome_of(&name, &gen), Outcome::Violated, "{name}");
        }
    }
}

#[test]
fn shared_counter_mutant_breaks_the_frame() {
    let reports = stack_suite(Some("shared_mod_count"))
        .unwrap()
        .unwrap()
        .run(&InputGenerator::new(3));
    assert!(reports.iter().any(|r| r.failure == Some(Failure::Frame)));
}

#[test]
fn push_then_pop_examples() {
    let suite = soor_core::adt::build_stack_suite(stack_binding(None).unwrap()).unwrap();
    let bundle = |a: Vec<i64>, b: Vec<i64>| Bundle {
        s_1: RefStack(a),
        s_2: RefStack(b),
        s_3: RefStack::default(),
        x: 5,
    };
    let equal = suite.run_driver("push_then_pop", bundle(vec![1, 2], vec![1, 2])).unwrap();
    assert_eq!(equal.outcome, Outcome::Holds);
    let unequal = suite.run_driver("push_then_pop", bundle(vec![1], vec![2])).unwrap();
    assert_eq!(unequal.outcome, Outcome::PreconditionUnmet);

    let noop = soor_core::adt::build_stack_suite(stack_binding(Some("pop_noop")).unwrap()).unwrap();
    let v = noop.run_driver("push_then_pop", bundle(vec![1, 2], vec![1, 2])).unwrap();
    assert_eq!(v.outcome, Outcome::Violated);
    assert_eq!(v.failure, Some(Failure::Postcondition));
}

#[test]
fn stack_suite_shape() {
    let suite = soor_core::adt::build_stack_suite(stack_binding(None).unwrap()).unwrap();
    let axioms = suite.axioms().count();
    let wd = suite.drivers.len() - axioms;
    assert!(axioms >= 5 && wd >= 2, "{axioms} axioms, {wd} well-definedness drivers");
    // One covers-tagged axiom per constructor/observer pair.
    assert!(suite.uncovered().is_empty());
    let pairs = suite.constructors.len() * suite.observers.len();
    assert_eq!(suite.axioms().filter(|d| d.covers.is_some()).count(), pairs);
}

#[test]
fn incomplete_binding_lists_missing_operations() {
    let b = soor_core::adt::StackBinding::<RefStack>::new().with_new(RefStack::default);
    let err = soor_core::adt::build_stack_suite(b).err().unwrap();
    let text = err.to_string();
    for op in ["push", "pop", "top", "is_empty", "count"] {
        assert!(text.contains(op), "{text}");
    }
}

#[test]
fn tree_suite_requires_a_queue_suite() {
    let b = soor_core::fixtures::tree_binding(None).unwrap();
    let err = soor_core::adt::build_tree_inord_suite::<RefTree, RefQueue>(b, None).err().unwrap();
    assert!(matches!(err, soor_core::adt::AdtError::MissingQueueSuite(_)));
}

#[test]
fn in_order_of_a_seven_node_tree() {
    let leaf = || RefTree::Leaf;
    let t = RefTree::node(
        RefTree::node(RefTree::node(leaf(), 1, leaf()), 2, RefTree::node(leaf(), 3, leaf())),
        4,
        RefTree::node(RefTree::node(leaf(), 5, leaf()), 6, RefTree::node(leaf(), 7, leaf())),
    );
    let suite = tree_suite_typed(None).unwrap().unwrap();
    let input = soor_core::adt::TreeBundle {
        t_1: t,
        t_2: leaf(),
        t_3: leaf(),
        x: 0,
        q_1: RefQueue::default(),
    };
    let v = suite.run_driver("in_ord_matches_traversal", input.clone()).unwrap();
    assert_eq!(v.outcome, Outcome::Holds);
    let leaf_case = suite.run_driver("in_ord_of_leaf_is_empty", input).unwrap();
    assert_eq!(leaf_case.outcome, Outcome::Holds);
}

#[test]
fn in_ord_well_definedness_on_500_equal_pairs() {
    let suite = tree_suite_typed(None).unwrap().unwrap();
    let d = suite.driver("in_ord_is_well_defined").unwrap();
    let mut gen = InputGenerator::new(9).with_samples(2000);
    gen.retry_budget = 100;
    let r = check_driver(d, &gen);
    assert_eq!(r.outcome, Outcome::Holds);
    assert!(r.evaluated >= 500, "{}", r.evaluated);
}

#[test]
fn bag_removal_depends_on_the_equality() {
    let gen = InputGenerator::new(11);
    assert_eq!(suite_outcome(&bag_suite(false).run(&gen)), Outcome::Violated);
    assert_eq!(suite_outcome(&bag_suite(true).run(&gen)), Outcome::Holds);
}

#[test]
fn container_library_flags_exactly_the_faulty_variants() {
    for seed in [1, 7, 42] {
        let gen = InputGenerator::new(seed);
        for (kind, fault) in CONTAINER_LIBRARY {
            let got = outcome_of(&format!("containers/{kind}"), &gen);
            let want = if fault.is_some() { Outcome::Violated } else { Outcome::Holds };
            assert_eq!(got, want, "{kind} seed {seed}");
        }
    }
}

#[test]
fn frame_check_examples() {
    let push = ActionDef::new::<Bundle<RefStack>>("push", &["s_1"], |b| b.s_1.0.push(b.x));
    let input = StateRef::new(
        "stack",
        Bundle {
            s_1: RefStack(vec![1]),
            s_2: RefStack(vec![2]),
            s_3: RefStack::default(),
            x: 3,
        },
    );
    assert_eq!(frame_check(&push, &["s_1", "s_2"], &input).outcome, Outcome::Holds);

    let leaky = ActionDef::new::<Bundle<RefStack>>("push", &["s_1"], |b| {
        b.s_1.0.push(b.x);
        b.s_2.0.clear();
    });
    let v = frame_check(&leaky, &["s_1", "s_2"], &input);
    assert_eq!(v.outcome, Outcome::Violated);
    assert_eq!(v.failure, Some(Failure::Frame));

    let noop = ActionDef::new::<Bundle<RefStack>>("noop", &[], |_| {});
    assert_eq!(frame_check(&noop, &["s_1", "s_2", "x"], &input).outcome, Outcome::Holds);
}

#[test]
fn resample_rate_is_reported_and_unmet_is_not_a_failure() {
    let gen = InputGenerator::new(5).with_samples(200);
    let reports = driver_fixture("stack").unwrap().run(&gen);
    let wd = reports.iter().find(|r| r.driver == "push_is_well_defined").unwrap();
    assert!(wd.discarded > 0 && wd.resample_rate > 0.0 && wd.resample_rate < 1.0);
    assert_eq!(suite_outcome(&reports), Outcome::Holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generator_is_reproducible(seed in any::<u64>()) {
        let gen = InputGenerator::new(seed).with_samples(50);
        let a = driver_fixture("queue/append_prepends").unwrap().run(&gen);
        let b = driver_fixture("queue/append_prepends").unwrap().run(&gen);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn well_definedness_is_order_insensitive(
        a in proptest::collection::vec(0i64..3, 0..6),
        salts in (any::<u64>(), any::<u64>()),
        x in -5i64..5,
    ) {
        for multiset in [false, true] {
            let suite = bag_suite(multiset);
            let d = &suite.drivers[0];
            let bag = |salt| soor_core::fixtures::Bag { items: a.clone(), salt };
            let fwd = Bundle { s_1: bag(salts.0), s_2: bag(salts.1), s_3: bag(0), x };
            let rev = Bundle { s_1: bag(salts.1), s_2: bag(salts.0), s_3: bag(0), x };
            prop_assert_eq!(run_driver(d, fwd).outcome, run_driver(d, rev).outcome);
        }
    }

    #[test]
    fn reference_stack_push_pop_holds_on_any_stack(items in proptest::collection::vec(-50i64..50, 0..12), x in any::<i64>()) {
        let suite = soor_core::adt::build_stack_suite(stack_binding(None).unwrap()).unwrap();
        let b = Bundle { s_1: RefStack(items.clone()), s_2: RefStack(items), s_3: RefStack::default(), x };
        prop_assert_eq!(suite.run_driver("push_then_pop", b).unwrap().outcome, Outcome::Holds);
    }
}
