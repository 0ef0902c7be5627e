//! Contract-divergence scenarios.

use rand::Rng;

use crate::adt::{contract_divergence_probe, Contract, Implementation, InputGenerator, Probe};
use crate::kernel::Verdict;

pub const PROBES: [&str; 3] = ["square_vs_zero", "square_vs_itself", "stable_vs_unstable_sort"];

fn square() -> Implementation<i64, i64> {
    Implementation::new("square", |x: &i64| x * x)
}

fn non_negative() -> Probe<i64, i64> {
    Probe::new(
        Contract::new("non_negative_result", |_: &i64, r: &i64| *r >= 0),
        |rng| rng.random_range(-1000..=1000),
        |a: &i64, b: &i64| a == b,
    )
    .with_shrink(|x: &i64| if *x == 0 { vec![] } else { vec![x / 2, x - x.signum()] })
}

type Keyed = Vec<(i64, char)>;

fn sorted_permutation(input: &Keyed, out: &Keyed) -> bool {
    let mut a = input.clone();
    let mut b = out.clone();
    a.sort_unstable();
    b.sort_unstable();
    a == b && out.windows(2).all(|w| w[0].0 <= w[1].0)
}

fn sort_probe() -> Probe<Keyed, Keyed> {
    Probe::new(
        Contract::new("sorted_by_key", sorted_permutation),
        |rng| {
            (0..rng.random_range(0..8))
                .map(|i| (rng.random_range(0..4), char::from(b'a' + i as u8)))
                .collect()
        },
        |a: &Keyed, b: &Keyed| a == b,
    )
    .with_shrink(|v: &Keyed| {
        (0..v.len())
            .map(|i| {
                let mut w = v.clone();
                w.remove(i);
                w
            })
            .collect()
    })
}

/// Runs a named probe; `None` for unknown names.
pub fn run_probe(name: &str, gen: &InputGenerator) -> Option<Verdict> {
    match name {
        "square_vs_zero" => Some(contract_divergence_probe(
            &square(),
            &Implementation::new("zero", |_: &i64| 0),
            &non_negative(),
            gen,
        )),
        "square_vs_itself" => Some(contract_divergence_probe(&square(), &square(), &non_negative(), gen)),
        "stable_vs_unstable_sort" => {
            let stable = Implementation::new("stable_sort", |v: &Keyed| {
                let mut out = v.clone();
                out.sort_by_key(|e| e.0);
                out
            });
            let reversing = Implementation::new("tie_reversing_sort", |v: &Keyed| {
                let mut out: Keyed = v.iter().rev().copied().collect();
                out.sort_by_key(|e| e.0);
                out
            });
            Some(contract_divergence_probe(&stable, &reversing, &sort_probe(), gen))
        }
        _ => None,
    }
}

/// The contract text each probe checks.
pub fn probe_contract(name: &str) -> Option<&'static str> {
    match name {
        "square_vs_zero" | "square_vs_itself" => Some("non_negative_result: Result >= 0"),
        "stable_vs_unstable_sort" => Some("sorted_by_key: output is a key-ordered permutation of the input"),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Failure, Outcome, Witness};

    #[test]
    fn square_against_zero_shrinks_to_one() {
        let v = run_probe("square_vs_zero", &InputGenerator::new(5).with_samples(100)).unwrap();
        assert_eq!(v.outcome, Outcome::Violated);
        assert_eq!(v.failure, Some(Failure::Underspecified));
        let Some(Witness::Input { slots }) = &v.witness else {
            panic!("expected an input witness")
        };
        assert!(slots["input"] == "1" || slots["input"] == "-1", "{slots:?}");
    }

    #[test]
    fn identical_implementations_agree() {
        let v = run_probe("square_vs_itself", &InputGenerator::new(5).with_samples(300)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.iterations, Some(300));
    }

    #[test]
    fn sort_divergence_needs_a_duplicate_key() {
        let v = run_probe("stable_vs_unstable_sort", &InputGenerator::new(1).with_samples(100)).unwrap();
        assert_eq!(v.outcome, Outcome::Violated);
        let Some(Witness::Input { slots }) = &v.witness else {
            panic!("expected an input witness")
        };
        // Shrinking leaves exactly the two tied elements.
        assert_eq!(slots["input"].matches('(').count(), 2, "{slots:?}");
    }
}
