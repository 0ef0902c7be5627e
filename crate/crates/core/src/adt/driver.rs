//! Specification drivers: contracted procedures over bound ADT instances,
//! run against sampled inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{diff_regions, ActionDef, Failure, KernelError, Outcome, State, StateRef, Verdict, Witness};
use crate::mix_seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdtError {
    #[error("{adt} binding is missing operations: {}", .missing.join(", "))]
    IncompleteBinding { adt: String, missing: Vec<String> },
    #[error("{0} suite needs a queue suite to certify the in-order result type")]
    MissingQueueSuite(String),
    #[error("unknown driver `{0}`")]
    UnknownDriver(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Values manipulated by drivers. The canonical text feeds frame checks and witnesses.
pub trait AdtValue: Clone + fmt::Debug + Send + Sync + 'static {
    fn canonical(&self) -> String;
}

impl AdtValue for i64 {
    fn canonical(&self) -> String {
        self.to_string()
    }
}

/// Driver parameters: three instances and one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle<S> {
    pub s_1: S,
    pub s_2: S,
    pub s_3: S,
    pub x: i64,
}

impl<S: AdtValue> State for Bundle<S> {
    fn boxed_clone(&self) -> Box<dyn State> {
        Box::new(self.clone())
    }

    fn regions(&self) -> Vec<(String, String)> {
        vec![
            ("s_1".into(), self.s_1.canonical()),
            ("s_2".into(), self.s_2.canonical()),
            ("s_3".into(), self.s_3.canonical()),
            ("x".into(), self.x.to_string()),
        ]
    }
}

/// A named equality on instances.
pub struct Equiv<S> {
    pub id: String,
    f: Post<S>,
}

impl<S> Clone for Equiv<S> {
    fn clone(&self) -> Self {
        Self {
            id: self.id.clone(),
            f: Arc::clone(&self.f),
        }
    }
}

impl<S: AdtValue> Equiv<S> {
    pub fn new(id: impl Into<String>, f: impl Fn(&S, &S) -> bool + Send + Sync + 'static) -> Self {
        Self {
            id: id.into(),
            f: Arc::new(f),
        }
    }

    pub fn canonical() -> Self {
        Self::new("canonical", |a: &S, b: &S| a.canonical() == b.canonical())
    }

    pub fn eq(&self, a: &S, b: &S) -> bool {
        (self.f)(a, b)
    }
}

pub type Produce<B> = Arc<dyn Fn(&mut ChaCha8Rng, usize) -> B + Send + Sync>;
pub type Pre<B> = Arc<dyn Fn(&B) -> bool + Send + Sync>;
type Post<B> = Arc<dyn Fn(&B, &B) -> bool + Send + Sync>;
type Twin<S> = Arc<dyn Fn(&S, &mut ChaCha8Rng) -> S + Send + Sync>;

/// How instances of an ADT are generated: arbitrary values up to a size,
/// and observationally equal twins of an existing value.
pub struct Sampler<S> {
    arbitrary: Produce<S>,
    twin: Twin<S>,
    pub twin_rate: f64,
}

impl<S> Clone for Sampler<S> {
    fn clone(&self) -> Self {
        Self {
            arbitrary: Arc::clone(&self.arbitrary),
            twin: Arc::clone(&self.twin),
            twin_rate: self.twin_rate,
        }
    }
}

impl<S: AdtValue> Sampler<S> {
    pub fn new(arbitrary: impl Fn(&mut ChaCha8Rng, usize) -> S + Send + Sync + 'static) -> Self {
        Self {
            arbitrary: Arc::new(arbitrary),
            twin: Arc::new(|s: &S, _: &mut ChaCha8Rng| s.clone()),
            twin_rate: 0.75,
        }
    }

    /// Twins that are equal but may differ in hidden state.
    pub fn with_twin(mut self, twin: impl Fn(&S, &mut ChaCha8Rng) -> S + Send + Sync + 'static) -> Self {
        self.twin = Arc::new(twin);
        self
    }

    pub fn arbitrary(&self, rng: &mut ChaCha8Rng, size: usize) -> S {
        (self.arbitrary)(rng, size)
    }

    pub fn twin(&self, s: &S, rng: &mut ChaCha8Rng) -> S {
        (self.twin)(s, rng)
    }

    /// `s_2` is a twin of `s_1` at the twin rate, otherwise independent.
    pub fn bundle(&self) -> Produce<Bundle<S>> {
        let this = self.clone();
        Arc::new(move |rng, size| {
            let s_1 = this.arbitrary(rng, size);
            let s_2 = if rng.random_bool(this.twin_rate) {
                this.twin(&s_1, rng)
            } else {
                this.arbitrary(rng, size)
            };
            let s_3 = this.arbitrary(rng, size);
            let x = rng.random_range(-20..=20);
            Bundle { s_1, s_2, s_3, x }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Axiom,
    WellDefinedness,
    Aliasing,
    Frame,
}

/// A contracted procedure: precondition, body of actions, frame and postcondition.
pub struct AxiomDriver<B> {
    pub name: String,
    pub axiom: String,
    pub kind: DriverKind,
    pub params: Vec<String>,
    pub modifies: BTreeSet<String>,
    /// `(constructor, observer)` pair covered by an equational axiom.
    pub covers: Option<(String, String)>,
    pre: Pre<B>,
    body: Vec<ActionDef>,
    post: Post<B>,
    produce: Produce<B>,
}

impl<B> Clone for AxiomDriver<B> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            axiom: self.axiom.clone(),
            kind: self.kind,
            params: self.params.clone(),
            modifies: self.modifies.clone(),
            covers: self.covers.clone(),
            pre: Arc::clone(&self.pre),
            body: self.body.clone(),
            post: Arc::clone(&self.post),
            produce: Arc::clone(&self.produce),
        }
    }
}

impl<B> fmt::Debug for AxiomDriver<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AxiomDriver")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("modifies", &self.modifies)
            .finish()
    }
}

impl<B: State + Clone> AxiomDriver<B> {
    pub fn new(name: impl Into<String>, axiom: impl Into<String>, kind: DriverKind, produce: Produce<B>) -> Self {
        Self {
            name: name.into(),
            axiom: axiom.into(),
            kind,
            params: Vec::new(),
            modifies: BTreeSet::new(),
            covers: None,
            pre: Arc::new(|_| true),
            body: Vec::new(),
            post: Arc::new(|_, _| true),
            produce,
        }
    }

    pub fn params(mut self, params: &[&str]) -> Self {
        self.params = params.iter().map(|p| p.to_string()).collect();
        self
    }

    pub fn covers(mut self, constructor: &str, observer: &str) -> Self {
        self.covers = Some((constructor.into(), observer.into()));
        self
    }

    pub fn pre(mut self, f: impl Fn(&B) -> bool + Send + Sync + 'static) -> Self {
        self.pre = Arc::new(f);
        self
    }

    /// Appends a body step; its frame joins the driver's `modifies`.
    pub fn step(mut self, id: &str, modifies: &[&str], f: impl Fn(&mut B) + Send + Sync + 'static) -> Self {
        self.modifies.extend(modifies.iter().map(|m| m.to_string()));
        self.body.push(ActionDef::new::<B>(id, modifies, f));
        self
    }

    pub fn fallible_step(
        mut self,
        id: &str,
        modifies: &[&str],
        f: impl Fn(&mut B) -> Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        self.modifies.extend(modifies.iter().map(|m| m.to_string()));
        self.body.push(ActionDef::fallible::<B>(id, modifies, f));
        self
    }

    pub fn post(mut self, f: impl Fn(&B, &B) -> bool + Send + Sync + 'static) -> Self {
        self.post = Arc::new(f);
        self
    }

    pub fn body(&self) -> &[ActionDef] {
        &self.body
    }

    pub fn produce(&self, rng: &mut ChaCha8Rng, size: usize) -> B {
        (self.produce)(rng, size)
    }
}

fn input_witness(regions: &[(String, String)]) -> Witness {
    Witness::Input {
        slots: regions.iter().cloned().collect::<BTreeMap<_, _>>(),
    }
}

/// Runs one driver on one input.
pub fn run_driver<B: State + Clone>(d: &AxiomDriver<B>, inputs: B) -> Verdict {
    let state = StateRef::new(d.name.as_str(), inputs);
    let Some(b) = state.get::<B>() else {
        unreachable!("driver state has the driver's bundle type");
    };
    if !(d.pre)(b) {
        return Verdict::precondition_unmet(format!("{}: precondition does not hold", d.name));
    }
    let initial = state.regions();
    let old = state.clone();
    let mut cur = state;
    for action in &d.body {
        let before = cur.regions();
        if let Err(err) = action.apply(&mut cur) {
            return Verdict::violated(Failure::Guard, input_witness(&initial), format!("{}: {err}", d.name));
        }
        let outside: Vec<String> = diff_regions(&before, &cur.regions())
            .into_iter()
            .filter(|r| !action.modifies().contains(r))
            .collect();
        if !outside.is_empty() {
            return Verdict::violated(
                Failure::Frame,
                input_witness(&initial),
                format!(
                    "{}: `{}` changed {} outside its frame",
                    d.name,
                    action.id(),
                    outside.join(", ")
                ),
            );
        }
    }
    let (Some(o), Some(n)) = (old.get::<B>(), cur.get::<B>()) else {
        unreachable!("driver state has the driver's bundle type");
    };
    if (d.post)(o, n) {
        Verdict::holds(format!("{}: postcondition holds", d.name))
    } else {
        Verdict::violated(
            Failure::Postcondition,
            input_witness(&initial),
            format!("{}: postcondition fails", d.name),
        )
    }
}

/// Seeded input generation for driver runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputGenerator {
    pub seed: u64,
    pub samples: usize,
    pub max_size: usize,
    /// Resamples per sample when the precondition rejects an input.
    pub retry_budget: usize,
}

impl Default for InputGenerator {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            max_size: 8,
            retry_budget: 100,
        }
    }
}

impl InputGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn rng(&self, sample: usize, attempt: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix_seed(mix_seed(self.seed, sample as u64), attempt as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverReport {
    pub driver: String,
    pub axiom: String,
    pub kind: DriverKind,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    /// Samples whose precondition held and were evaluated.
    pub evaluated: usize,
    /// Inputs discarded by the precondition and resampled.
    pub discarded: usize,
    pub resample_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub message: String,
}

/// Samples inputs until a violation or until the sample budget is spent.
/// Violating inputs are shrunk by halving the size bound while they still fail.
pub fn check_driver<B: State + Clone>(d: &AxiomDriver<B>, gen: &InputGenerator) -> DriverReport {
    let mut evaluated = 0;
    let mut discarded = 0;
    let mut found: Option<(Verdict, usize, usize)> = None;
    'samples: for sample in 0..gen.samples {
        for attempt in 0..gen.retry_budget.max(1) {
            let input = d.produce(&mut gen.rng(sample, attempt), gen.max_size);
            let v = run_driver(d, input);
            match v.outcome {
                Outcome::PreconditionUnmet => discarded += 1,
                Outcome::Violated => {
                    evaluated += 1;
                    found = Some((v, sample, attempt));
                    break 'samples;
                }
                _ => {
                    evaluated += 1;
                    continue 'samples;
                }
            }
        }
    }
    let attempts = evaluated + discarded;
    let resample_rate = if attempts == 0 {
        0.0
    } else {
        discarded as f64 / attempts as f64
    };
    let mut report = DriverReport {
        driver: d.name.clone(),
        axiom: d.axiom.clone(),
        kind: d.kind,
        outcome: Outcome::Holds,
        failure: None,
        evaluated,
        discarded,
        resample_rate,
        witness: None,
        message: String::new(),
    };
    match found {
        Some((mut v, sample, attempt)) => {
            let mut size = gen.max_size;
            while size > 0 {
                size /= 2;
                let smaller = run_driver(d, d.produce(&mut gen.rng(sample, attempt), size));
                if smaller.outcome != Outcome::Violated {
                    break;
                }
                v = smaller;
            }
            report.outcome = Outcome::Violated;
            report.failure = v.failure;
            report.witness = v.witness;
            report.message = format!("{} (sample {sample})", v.message);
        }
        None if evaluated == 0 => {
            report.outcome = Outcome::PreconditionUnmet;
            report.message = format!("{}: no input satisfied the precondition", d.name);
        }
        None => {
            report.message = format!("{}: holds on {evaluated} inputs", d.name);
        }
    }
    report
}

/// An ordered collection of drivers for one ADT binding.
pub struct DriverSuite<B> {
    pub adt_name: String,
    pub drivers: Vec<AxiomDriver<B>>,
    /// Abstract operations the binding supplies.
    pub operations: Vec<String>,
    pub constructors: Vec<String>,
    pub observers: Vec<String>,
    pub equivalence: String,
}

impl<B> Clone for DriverSuite<B> {
    fn clone(&self) -> Self {
        Self {
            adt_name: self.adt_name.clone(),
            drivers: self.drivers.clone(),
            operations: self.operations.clone(),
            constructors: self.constructors.clone(),
            observers: self.observers.clone(),
            equivalence: self.equivalence.clone(),
        }
    }
}

impl<B: State + Clone> DriverSuite<B> {
    pub fn new(adt_name: &str, equivalence: &str) -> Self {
        Self {
            adt_name: adt_name.into(),
            drivers: Vec::new(),
            operations: Vec::new(),
            constructors: Vec::new(),
            observers: Vec::new(),
            equivalence: equivalence.into(),
        }
    }

    pub fn driver(&self, name: &str) -> Result<&AxiomDriver<B>, AdtError> {
        self.drivers
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| AdtError::UnknownDriver(name.to_string()))
    }

    pub fn run_driver(&self, name: &str, inputs: B) -> Result<Verdict, AdtError> {
        Ok(run_driver(self.driver(name)?, inputs))
    }

    /// Equational axioms: one per (constructor, observer) pair.
    pub fn axioms(&self) -> impl Iterator<Item = &AxiomDriver<B>> {
        self.drivers.iter().filter(|d| d.covers.is_some())
    }

    /// `(constructor, observer)` pairs with no covering axiom.
    pub fn uncovered(&self) -> Vec<(String, String)> {
        let covered: BTreeSet<&(String, String)> = self.axioms().filter_map(|d| d.covers.as_ref()).collect();
        self.constructors
            .iter()
            .flat_map(|c| self.observers.iter().map(move |o| (c.clone(), o.clone())))
            .filter(|pair| !covered.contains(pair))
            .collect()
    }

    pub fn check(&self, gen: &InputGenerator) -> Vec<DriverReport> {
        self.drivers.iter().map(|d| check_driver(d, gen)).collect()
    }
}

/// Type-erased suite, so suites over different bundles can run side by side.
pub trait RunSuite: Send + Sync {
    fn adt_name(&self) -> &str;
    fn driver_names(&self) -> Vec<String>;
    fn run(&self, gen: &InputGenerator) -> Vec<DriverReport>;
}

impl<B: State + Clone> RunSuite for DriverSuite<B> {
    fn adt_name(&self) -> &str {
        &self.adt_name
    }

    fn driver_names(&self) -> Vec<String> {
        self.drivers.iter().map(|d| d.name.clone()).collect()
    }

    fn run(&self, gen: &InputGenerator) -> Vec<DriverReport> {
        self.check(gen)
    }
}

/// Worst outcome over driver reports. Precondition-unmet drivers do not count
/// unless nothing was evaluated at all.
pub fn suite_outcome(reports: &[DriverReport]) -> Outcome {
    let counted: Vec<Outcome> = reports
        .iter()
        .map(|r| r.outcome)
        .filter(|o| *o != Outcome::PreconditionUnmet)
        .collect();
    if counted.is_empty() {
        if reports.is_empty() {
            Outcome::Holds
        } else {
            Outcome::PreconditionUnmet
        }
    } else {
        counted
            .into_iter()
            .max_by_key(|o| o.severity())
            .unwrap_or(Outcome::Holds)
    }
}

/// An operation on one instance, given the other instance argument (`s_3`)
/// and the element `x`.
pub type Operation<S> = Arc<dyn Fn(&mut S, &S, i64) -> Result<(), String> + Send + Sync>;

/// Equal instances stay equal under identical calls of `op`.
pub fn well_definedness_driver<S: AdtValue>(
    op_name: &str,
    op: Operation<S>,
    op_pre: Option<Pre<S>>,
    eq: Equiv<S>,
    gen: &Sampler<S>,
) -> AxiomDriver<Bundle<S>> {
    let (op_1, op_2) = (Arc::clone(&op), op);
    let (eq_pre, eq_post) = (eq.clone(), eq.clone());
    AxiomDriver::new(
        format!("{op_name}_is_well_defined"),
        format!("s_1 {0} s_2 implies {op_name}(s_1) {0} {op_name}(s_2)", "~"),
        DriverKind::WellDefinedness,
        gen.bundle(),
    )
    .params(&["s_1", "s_2", "s_3", "x"])
    .pre(move |b: &Bundle<S>| {
        eq_pre.eq(&b.s_1, &b.s_2) && op_pre.as_ref().is_none_or(|p| p(&b.s_1) && p(&b.s_2))
    })
    .fallible_step(&format!("{op_name}_s_1"), &["s_1"], move |b| {
        let arg = b.s_3.clone();
        op_1(&mut b.s_1, &arg, b.x)
    })
    .fallible_step(&format!("{op_name}_s_2"), &["s_2"], move |b| {
        let arg = b.s_3.clone();
        op_2(&mut b.s_2, &arg, b.x)
    })
    .post(move |_, new| eq_post.eq(&new.s_1, &new.s_2))
}

/// Source argument of a copy: another instance, or the target itself.
pub enum CopySource<'a, S> {
    Other(&'a S),
    Current,
}

pub type CopyOp<S> = Arc<dyn Fn(&mut S, CopySource<'_, S>) + Send + Sync>;

/// `copy(x, x)` leaves `x` equivalent to its prior value.
pub fn aliasing_self_copy_driver<S: AdtValue>(
    copy_name: &str,
    copy_op: CopyOp<S>,
    eq: Equiv<S>,
    gen: &Sampler<S>,
) -> AxiomDriver<Bundle<S>> {
    AxiomDriver::new(
        format!("{copy_name}_survives_aliasing"),
        format!("{copy_name}(s_1, s_1) leaves s_1 unchanged"),
        DriverKind::Aliasing,
        gen.bundle(),
    )
    .params(&["s_1"])
    .step(&format!("{copy_name}_self"), &["s_1"], move |b| {
        copy_op(&mut b.s_1, CopySource::Current)
    })
    .post(move |old, new| eq.eq(&old.s_1, &new.s_1))
}

/// Copying the same source into equal targets gives equal results.
pub fn copy_well_definedness_driver<S: AdtValue>(
    copy_name: &str,
    copy_op: CopyOp<S>,
    eq: Equiv<S>,
    gen: &Sampler<S>,
) -> AxiomDriver<Bundle<S>> {
    let (c1, c2) = (Arc::clone(&copy_op), copy_op);
    let eq_pre = eq.clone();
    AxiomDriver::new(
        format!("{copy_name}_is_well_defined"),
        format!("s_1 ~ s_2 implies {copy_name}(s_1, s_3) ~ {copy_name}(s_2, s_3)"),
        DriverKind::WellDefinedness,
        gen.bundle(),
    )
    .params(&["s_1", "s_2", "s_3"])
    .pre(move |b| eq_pre.eq(&b.s_1, &b.s_2))
    .step(&format!("{copy_name}_s_1"), &["s_1"], move |b| {
        let src = b.s_3.clone();
        c1(&mut b.s_1, CopySource::Other(&src))
    })
    .step(&format!("{copy_name}_s_2"), &["s_2"], move |b| {
        let src = b.s_3.clone();
        c2(&mut b.s_2, CopySource::Other(&src))
    })
    .post(move |_, new| eq.eq(&new.s_1, &new.s_2))
}

/// Holds iff every tracked region outside `op`'s frame is unchanged by `op`.
pub fn frame_check(op: &ActionDef, tracked: &[&str], input: &StateRef) -> Verdict {
    let initial = input.regions();
    let mut after = input.clone();
    if let Err(err) = op.apply(&mut after) {
        return Verdict::violated(Failure::Guard, input_witness(&initial), err.to_string());
    }
    let changed = diff_regions(&initial, &after.regions());
    let broken: Vec<&str> = tracked
        .iter()
        .copied()
        .filter(|r| changed.contains(*r) && !op.modifies().contains(*r))
        .collect();
    if broken.is_empty() {
        Verdict::holds(format!("`{}` respects its frame", op.id()))
    } else {
        Verdict::violated(
            Failure::Frame,
            input_witness(&initial),
            format!("`{}` changed {} outside its frame", op.id(), broken.join(", ")),
        )
    }
}
