//! Searching for inputs on which two implementations of one contract disagree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use super::driver::InputGenerator;
use crate::kernel::{Failure, Verdict, Witness};

/// A named implementation of a routine from `I` to `O`.
pub struct Implementation<I, O> {
    pub id: String,
    f: Arc<dyn Fn(&I) -> O + Send + Sync>,
}

impl<I, O> Clone for Implementation<I, O> {
    fn clone(&self) -> Self {
        Self {
            id: self.id.clone(),
            f: Arc::clone(&self.f),
        }
    }
}

impl<I, O> Implementation<I, O> {
    pub fn new(id: impl Into<String>, f: impl Fn(&I) -> O + Send + Sync + 'static) -> Self {
        Self { id: id.into(), f: Arc::new(f) }
    }

    pub fn call(&self, input: &I) -> O {
        (self.f)(input)
    }
}

/// Postcondition relating an input to a result.
pub struct Contract<I, O> {
    pub name: String,
    post: Relation<I, O>,
}

impl<I, O> Clone for Contract<I, O> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            post: Arc::clone(&self.post),
        }
    }
}

impl<I, O> Contract<I, O> {
    pub fn new(name: impl Into<String>, post: impl Fn(&I, &O) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            post: Arc::new(post),
        }
    }

    pub fn admits(&self, input: &I, output: &O) -> bool {
        (self.post)(input, output)
    }
}

type Relation<A, B> = Arc<dyn Fn(&A, &B) -> bool + Send + Sync>;
type Generate<I> = Arc<dyn Fn(&mut ChaCha8Rng) -> I + Send + Sync>;
type Shrink<I> = Arc<dyn Fn(&I) -> Vec<I> + Send + Sync>;

/// Divergence search settings. `shrink` proposes smaller inputs; the first
/// one still diverging replaces the witness until none does.
pub struct Probe<I, O> {
    pub contract: Contract<I, O>,
    produce: Generate<I>,
    eq: Relation<O, O>,
    shrink: Option<Shrink<I>>,
}

impl<I: fmt::Debug, O: fmt::Debug> Probe<I, O> {
    pub fn new(
        contract: Contract<I, O>,
        produce: impl Fn(&mut ChaCha8Rng) -> I + Send + Sync + 'static,
        eq: impl Fn(&O, &O) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            contract,
            produce: Arc::new(produce),
            eq: Arc::new(eq),
            shrink: None,
        }
    }

    pub fn with_shrink(mut self, f: impl Fn(&I) -> Vec<I> + Send + Sync + 'static) -> Self {
        self.shrink = Some(Arc::new(f));
        self
    }
}

enum Probed {
    Agree,
    /// At least one implementation breaks the contract itself.
    Broken(String),
    Diverge,
}

fn probe_one<I, O>(a: &Implementation<I, O>, b: &Implementation<I, O>, p: &Probe<I, O>, input: &I) -> Probed {
    let (oa, ob) = (a.call(input), b.call(input));
    let broken: Vec<&str> = [(a, &oa), (b, &ob)]
        .into_iter()
        .filter(|(_, o)| !p.contract.admits(input, o))
        .map(|(imp, _)| imp.id.as_str())
        .collect();
    if !broken.is_empty() {
        Probed::Broken(broken.join(", "))
    } else if (p.eq)(&oa, &ob) {
        Probed::Agree
    } else {
        Probed::Diverge
    }
}

/// Looks for an input where `a` and `b` both satisfy the contract yet
/// disagree under the probe's equality. `iterations` on the verdict is the
/// number of samples drawn.
pub fn contract_divergence_probe<I: fmt::Debug, O: fmt::Debug>(
    a: &Implementation<I, O>,
    b: &Implementation<I, O>,
    probe: &Probe<I, O>,
    gen: &InputGenerator,
) -> Verdict {
    for sample in 0..gen.samples {
        let mut input = (probe.produce)(&mut gen.rng(sample, 0));
        match probe_one(a, b, probe, &input) {
            Probed::Agree => continue,
            Probed::Broken(ids) => {
                return Verdict::violated(
                    Failure::Postcondition,
                    witness(a, b, &input),
                    format!("{ids} breaks contract `{}` on {input:?}", probe.contract.name),
                )
                .with_iterations(sample as u64 + 1);
            }
            Probed::Diverge => {
                if let Some(shrink) = &probe.shrink {
                    'shrink: loop {
                        for smaller in shrink(&input) {
                            if matches!(probe_one(a, b, probe, &smaller), Probed::Diverge) {
                                input = smaller;
                                continue 'shrink;
                            }
                        }
                        break;
                    }
                }
                return Verdict::violated(
                    Failure::Underspecified,
                    witness(a, b, &input),
                    format!(
                        "contract `{}` underspecified: {} and {} both satisfy it but differ on {input:?}",
                        probe.contract.name, a.id, b.id
                    ),
                )
                .with_iterations(sample as u64 + 1);
            }
        }
    }
    Verdict::holds(format!(
        "{} and {} agree on {} samples under `{}`",
        a.id, b.id, gen.samples, probe.contract.name
    ))
    .with_iterations(gen.samples as u64)
}

fn witness<I: fmt::Debug, O: fmt::Debug>(a: &Implementation<I, O>, b: &Implementation<I, O>, input: &I) -> Witness {
    let mut slots = BTreeMap::new();
    slots.insert("input".to_string(), format!("{input:?}"));
    slots.insert(a.id.clone(), format!("{:?}", a.call(input)));
    slots.insert(b.id.clone(), format!("{:?}", b.call(input)));
    Witness::Input { slots }
}
