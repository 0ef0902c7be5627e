use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soor_core::temporal::{
    check_trace, classify, pattern_to_ltl, required_slots, PatternId, PatternSlots, ScopeId,
};
use soor_core::{Outcome, Trace};

fn slots_for(p: PatternId, sc: ScopeId) -> (PatternSlots, Vec<String>) {
    let names = required_slots(p, sc);
    let slots = names
        .iter()
        .map(|s| (s.to_string(), s.to_lowercase()))
        .collect();
    (slots, names.iter().map(|s| s.to_lowercase()).collect())
}

fn trace_from_bits(atoms: &[String], len: usize, bits: u64) -> Trace {
    let k = atoms.len();
    let names: Vec<&str> = atoms.iter().map(String::as_str).collect();
    Trace::from_fn(&names, len, |step, c| bits >> (step * k + c) & 1 == 1)
}

fn compare(p: PatternId, sc: ScopeId, slots: &PatternSlots, t: &Trace) {
    let f = pattern_to_ltl(p, sc, slots).unwrap();
    let expected = classify(&f, t).unwrap();
    let got = check_trace(p, sc, slots, t).unwrap().outcome;
    assert_eq!(
        got,
        expected,
        "{p} {sc} disagrees on trace {:?}\nformula {f}",
        t.steps()
    );
}

#[test]
fn monitor_agrees_with_formulas_exhaustively_on_short_traces() {
    for p in PatternId::all() {
        for sc in ScopeId::all() {
            let (slots, atoms) = slots_for(p, sc);
            let k = atoms.len();
            let max_len = match k {
                0..=2 => 6,
                3 => 5,
                4 => 4,
                _ => 3,
            };
            for len in 1..=max_len {
                for bits in 0..(1u64 << (k * len)) {
                    compare(p, sc, &slots, &trace_from_bits(&atoms, len, bits));
                }
            }
        }
    }
}

#[test]
fn monitor_agrees_with_formulas_on_random_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in PatternId::all() {
        for sc in ScopeId::all() {
            let (slots, atoms) = slots_for(p, sc);
            for _ in 0..4000 {
                let len = rng.random_range(1..=9);
                let names: Vec<&str> = atoms.iter().map(String::as_str).collect();
                let density: Vec<f64> = atoms.iter().map(|_| rng.random_range(0.1..0.7)).collect();
                let steps = (0..len)
                    .map(|_| density.iter().map(|d| rng.random_bool(*d)).collect())
                    .collect();
                let t = Trace::from_steps(names.iter().map(|n| n.to_string()).collect(), steps).unwrap();
                compare(p, sc, &slots, &t);
            }
        }
    }
}

#[test]
fn bounded_existence_for_other_k() {
    for k in [1, 3] {
        for sc in ScopeId::all() {
            let p = PatternId::BoundedExistence { k };
            let (slots, atoms) = slots_for(p, sc);
            for len in 1..=5 {
                for bits in 0..(1u64 << (atoms.len() * len)) {
                    compare(p, sc, &slots, &trace_from_bits(&atoms, len, bits));
                }
            }
        }
    }
    let _ = Outcome::Holds;
}
