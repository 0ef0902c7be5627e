//! Stack axioms, with constructors `new`, `push` and observers `top`, `pop`,
//! `is_empty`, `count`.

use std::sync::Arc;

use rand::Rng;

use super::driver::{
    well_definedness_driver, AdtError, AdtValue, AxiomDriver, Bundle, DriverKind, DriverSuite, Equiv, Operation,
    Sampler,
};

type Make<S> = Arc<dyn Fn() -> S + Send + Sync>;
type Push<S> = Arc<dyn Fn(&mut S, i64) + Send + Sync>;
type Pop<S> = Arc<dyn Fn(&mut S) -> Result<(), String> + Send + Sync>;
type Top<S> = Arc<dyn Fn(&S) -> Option<i64> + Send + Sync>;
type Test<S> = Arc<dyn Fn(&S) -> bool + Send + Sync>;
type Count<S> = Arc<dyn Fn(&S) -> usize + Send + Sync>;

/// Concrete operations standing in for the abstract stack.
pub struct StackBinding<S> {
    new: Option<Make<S>>,
    push: Option<Push<S>>,
    pop: Option<Pop<S>>,
    top: Option<Top<S>>,
    is_empty: Option<Test<S>>,
    count: Option<Count<S>>,
    equality: Option<Equiv<S>>,
}

impl<S: AdtValue> Default for StackBinding<S> {
    fn default() -> Self {
        Self {
            new: None,
            push: None,
            pop: None,
            top: None,
            is_empty: None,
            count: None,
            equality: None,
        }
    }
}

impl<S: AdtValue> StackBinding<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_new(mut self, f: impl Fn() -> S + Send + Sync + 'static) -> Self {
        self.new = Some(Arc::new(f));
        self
    }

    pub fn with_push(mut self, f: impl Fn(&mut S, i64) + Send + Sync + 'static) -> Self {
        self.push = Some(Arc::new(f));
        self
    }

    /// `pop` reports an error on stacks it cannot pop.
    pub fn with_pop(mut self, f: impl Fn(&mut S) -> Result<(), String> + Send + Sync + 'static) -> Self {
        self.pop = Some(Arc::new(f));
        self
    }

    pub fn with_top(mut self, f: impl Fn(&S) -> Option<i64> + Send + Sync + 'static) -> Self {
        self.top = Some(Arc::new(f));
        self
    }

    pub fn with_is_empty(mut self, f: impl Fn(&S) -> bool + Send + Sync + 'static) -> Self {
        self.is_empty = Some(Arc::new(f));
        self
    }

    pub fn with_count(mut self, f: impl Fn(&S) -> usize + Send + Sync + 'static) -> Self {
        self.count = Some(Arc::new(f));
        self
    }

    /// Defaults to canonical-text equality.
    pub fn with_equality(mut self, eq: Equiv<S>) -> Self {
        self.equality = Some(eq);
        self
    }
}

struct Ops<S> {
    new: Make<S>,
    push: Push<S>,
    pop: Pop<S>,
    top: Top<S>,
    is_empty: Test<S>,
    count: Count<S>,
}

impl<S> Clone for Ops<S> {
    fn clone(&self) -> Self {
        Self {
            new: Arc::clone(&self.new),
            push: Arc::clone(&self.push),
            pop: Arc::clone(&self.pop),
            top: Arc::clone(&self.top),
            is_empty: Arc::clone(&self.is_empty),
            count: Arc::clone(&self.count),
        }
    }
}

fn resolve<S>(b: &StackBinding<S>) -> Result<Ops<S>, AdtError> {
    let mut missing = Vec::new();
    macro_rules! take {
        ($f:ident) => {
            match &b.$f {
                Some(f) => Some(Arc::clone(f)),
                None => {
                    missing.push(stringify!($f).to_string());
                    None
                }
            }
        };
    }
    let (new, push, pop, top, is_empty, count) =
        (take!(new), take!(push), take!(pop), take!(top), take!(is_empty), take!(count));
    match (new, push, pop, top, is_empty, count) {
        (Some(new), Some(push), Some(pop), Some(top), Some(is_empty), Some(count)) => Ok(Ops {
            new,
            push,
            pop,
            top,
            is_empty,
            count,
        }),
        _ => Err(AdtError::IncompleteBinding {
            adt: "stack".into(),
            missing,
        }),
    }
}

/// Stacks built by `new` and up to `size` pushes.
pub fn stack_sampler<S: AdtValue>(binding: &StackBinding<S>) -> Result<Sampler<S>, AdtError> {
    let ops = resolve(binding)?;
    Ok(Sampler::new(move |rng, size| {
        let mut s = (ops.new)();
        for _ in 0..rng.random_range(0..=size) {
            (ops.push)(&mut s, rng.random_range(-20..=20));
        }
        s
    }))
}

pub fn build_stack_suite<S: AdtValue>(binding: StackBinding<S>) -> Result<DriverSuite<Bundle<S>>, AdtError> {
    build_stack_suite_with(binding, None)
}

/// As [`build_stack_suite`] with a custom sampler, e.g. for hidden state.
pub fn build_stack_suite_with<S: AdtValue>(
    binding: StackBinding<S>,
    sampler: Option<Sampler<S>>,
) -> Result<DriverSuite<Bundle<S>>, AdtError> {
    let ops = resolve(&binding)?;
    let eq = binding.equality.clone().unwrap_or_else(Equiv::canonical);
    let sampler = match sampler {
        Some(s) => s,
        None => stack_sampler(&binding)?,
    };
    let gen = sampler.bundle();

    let mut suite = DriverSuite::new("stack", &eq.id);
    suite.operations = ["new", "push", "pop", "top", "is_empty", "count"].map(String::from).to_vec();
    suite.constructors = ["new", "push"].map(String::from).to_vec();
    suite.observers = ["top", "pop", "is_empty", "count"].map(String::from).to_vec();

    let axiom = |name: &str, text: &str| AxiomDriver::new(name, text, DriverKind::Axiom, Arc::clone(&gen));
    let o = ops.clone();
    let reset = move |b: &mut Bundle<S>| b.s_1 = (o.new)();

    let o = ops.clone();
    suite.drivers.push(
        axiom("new_is_empty", "is_empty(new) = true")
            .covers("new", "is_empty")
            .params(&["s_1"])
            .step("new", &["s_1"], reset.clone())
            .post(move |_, n| (o.is_empty)(&n.s_1)),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("new_has_zero_count", "count(new) = 0")
            .covers("new", "count")
            .params(&["s_1"])
            .step("new", &["s_1"], reset.clone())
            .post(move |_, n| (o.count)(&n.s_1) == 0),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("top_of_new_is_undefined", "top(new) is undefined")
            .covers("new", "top")
            .params(&["s_1"])
            .step("new", &["s_1"], reset.clone())
            .post(move |_, n| (o.top)(&n.s_1).is_none()),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("pop_of_new_is_rejected", "pop(new) is undefined")
            .covers("new", "pop")
            .params(&["s_1"])
            .step("new", &["s_1"], reset)
            .post(move |_, n| (o.pop)(&mut n.s_1.clone()).is_err()),
    );

    let o = ops.clone();
    let push_s1 = move |b: &mut Bundle<S>| (o.push)(&mut b.s_1, b.x);
    let o = ops.clone();
    suite.drivers.push(
        axiom("push_is_not_empty", "is_empty(push(s, x)) = false")
            .covers("push", "is_empty")
            .params(&["s_1", "x"])
            .step("push", &["s_1"], push_s1.clone())
            .post(move |_, n| !(o.is_empty)(&n.s_1)),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("push_increments_count", "count(push(s, x)) = count(s) + 1")
            .covers("push", "count")
            .params(&["s_1", "x"])
            .step("push", &["s_1"], push_s1.clone())
            .post(move |old, n| (o.count)(&n.s_1) == (o.count)(&old.s_1) + 1),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("top_after_push", "top(push(s, x)) = x")
            .covers("push", "top")
            .params(&["s_1", "x"])
            .step("push", &["s_1"], push_s1.clone())
            .post(move |old, n| (o.top)(&n.s_1) == Some(old.x)),
    );
    let o = ops.clone();
    let (eq_pre, eq_post) = (eq.clone(), eq.clone());
    suite.drivers.push(
        axiom("push_then_pop", "pop(push(s, x)) = s")
            .covers("push", "pop")
            .params(&["s_1", "s_2", "x"])
            .pre(move |b| eq_pre.eq(&b.s_1, &b.s_2))
            .step("push", &["s_1"], push_s1)
            .fallible_step("pop", &["s_1"], move |b| (o.pop)(&mut b.s_1))
            .post(move |_, n| eq_post.eq(&n.s_1, &n.s_2)),
    );
    let (o, o2) = (ops.clone(), ops.clone());
    suite.drivers.push(
        axiom("pop_decrements_count", "count(pop(s)) = count(s) - 1 for non-empty s")
            .params(&["s_1"])
            .pre(move |b| !(o2.is_empty)(&b.s_1))
            .fallible_step("pop", &["s_1"], {
                let o = ops.clone();
                move |b| (o.pop)(&mut b.s_1)
            })
            .post(move |old, n| (o.count)(&n.s_1) + 1 == (o.count)(&old.s_1)),
    );

    let o = ops.clone();
    let push: Operation<S> = Arc::new(move |s, _, x| {
        (o.push)(s, x);
        Ok(())
    });
    suite
        .drivers
        .push(well_definedness_driver("push", push, None, eq.clone(), &sampler));
    let o = ops.clone();
    let pop: Operation<S> = Arc::new(move |s, _, _| (o.pop)(s));
    let o = ops;
    suite.drivers.push(well_definedness_driver(
        "pop",
        pop,
        Some(Arc::new(move |s: &S| !(o.is_empty)(s))),
        eq,
        &sampler,
    ));
    Ok(suite)
}
