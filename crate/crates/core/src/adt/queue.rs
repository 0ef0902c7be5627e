//! Queue-with-append axioms, with constructors `empty`, `enqueue` and
//! observers `front`, `dequeue`, `is_empty`, `count`.

use std::sync::Arc;

use rand::Rng;

use super::driver::{
    well_definedness_driver, AdtError, AdtValue, AxiomDriver, Bundle, DriverKind, DriverSuite, Equiv, Operation,
    Sampler,
};

type Make<Q> = Arc<dyn Fn() -> Q + Send + Sync>;
type Enqueue<Q> = Arc<dyn Fn(&mut Q, i64) + Send + Sync>;
type Dequeue<Q> = Arc<dyn Fn(&mut Q) -> Result<(), String> + Send + Sync>;
type Front<Q> = Arc<dyn Fn(&Q) -> Option<i64> + Send + Sync>;
type Test<Q> = Arc<dyn Fn(&Q) -> bool + Send + Sync>;
type Count<Q> = Arc<dyn Fn(&Q) -> usize + Send + Sync>;
type Append<Q> = Arc<dyn Fn(&mut Q, &Q) + Send + Sync>;

pub struct QueueBinding<Q> {
    empty: Option<Make<Q>>,
    enqueue: Option<Enqueue<Q>>,
    dequeue: Option<Dequeue<Q>>,
    front: Option<Front<Q>>,
    is_empty: Option<Test<Q>>,
    count: Option<Count<Q>>,
    append: Option<Append<Q>>,
    equality: Option<Equiv<Q>>,
}

impl<Q: AdtValue> Default for QueueBinding<Q> {
    fn default() -> Self {
        Self {
            empty: None,
            enqueue: None,
            dequeue: None,
            front: None,
            is_empty: None,
            count: None,
            append: None,
            equality: None,
        }
    }
}

impl<Q: AdtValue> QueueBinding<Q> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_empty(mut self, f: impl Fn() -> Q + Send + Sync + 'static) -> Self {
        self.empty = Some(Arc::new(f));
        self
    }

    pub fn with_enqueue(mut self, f: impl Fn(&mut Q, i64) + Send + Sync + 'static) -> Self {
        self.enqueue = Some(Arc::new(f));
        self
    }

    pub fn with_dequeue(mut self, f: impl Fn(&mut Q) -> Result<(), String> + Send + Sync + 'static) -> Self {
        self.dequeue = Some(Arc::new(f));
        self
    }

    pub fn with_front(mut self, f: impl Fn(&Q) -> Option<i64> + Send + Sync + 'static) -> Self {
        self.front = Some(Arc::new(f));
        self
    }

    pub fn with_is_empty(mut self, f: impl Fn(&Q) -> bool + Send + Sync + 'static) -> Self {
        self.is_empty = Some(Arc::new(f));
        self
    }

    pub fn with_count(mut self, f: impl Fn(&Q) -> usize + Send + Sync + 'static) -> Self {
        self.count = Some(Arc::new(f));
        self
    }

    /// `append(q, r)` extends `q` with the elements of `r`.
    pub fn with_append(mut self, f: impl Fn(&mut Q, &Q) + Send + Sync + 'static) -> Self {
        self.append = Some(Arc::new(f));
        self
    }

    pub fn with_equality(mut self, eq: Equiv<Q>) -> Self {
        self.equality = Some(eq);
        self
    }
}

/// Resolved queue operations.
pub struct QueueOps<Q> {
    pub empty: Make<Q>,
    pub enqueue: Enqueue<Q>,
    pub dequeue: Dequeue<Q>,
    pub front: Front<Q>,
    pub is_empty: Test<Q>,
    pub count: Count<Q>,
    pub append: Append<Q>,
}

impl<Q> Clone for QueueOps<Q> {
    fn clone(&self) -> Self {
        Self {
            empty: Arc::clone(&self.empty),
            enqueue: Arc::clone(&self.enqueue),
            dequeue: Arc::clone(&self.dequeue),
            front: Arc::clone(&self.front),
            is_empty: Arc::clone(&self.is_empty),
            count: Arc::clone(&self.count),
            append: Arc::clone(&self.append),
        }
    }
}

impl<Q: Clone> QueueOps<Q> {
    pub fn appended(&self, q: &Q, r: &Q) -> Q {
        let mut out = q.clone();
        (self.append)(&mut out, r);
        out
    }

    pub fn enqueued(&self, q: &Q, x: i64) -> Q {
        let mut out = q.clone();
        (self.enqueue)(&mut out, x);
        out
    }

    /// Elements front to back, read through `front` and `dequeue`.
    pub fn drain(&self, q: &Q) -> Vec<i64> {
        let mut q = q.clone();
        let mut out = Vec::new();
        let limit = (self.count)(&q) + 1;
        while !(self.is_empty)(&q) && out.len() < limit {
            match (self.front)(&q) {
                Some(x) => out.push(x),
                None => break,
            }
            if (self.dequeue)(&mut q).is_err() {
                break;
            }
        }
        out
    }
}

fn resolve<Q>(b: &QueueBinding<Q>) -> Result<QueueOps<Q>, AdtError> {
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
    let parts = (
        take!(empty),
        take!(enqueue),
        take!(dequeue),
        take!(front),
        take!(is_empty),
        take!(count),
        take!(append),
    );
    match parts {
        (Some(empty), Some(enqueue), Some(dequeue), Some(front), Some(is_empty), Some(count), Some(append)) => {
            Ok(QueueOps {
                empty,
                enqueue,
                dequeue,
                front,
                is_empty,
                count,
                append,
            })
        }
        _ => Err(AdtError::IncompleteBinding {
            adt: "queue".into(),
            missing,
        }),
    }
}

/// A queue suite together with the operations it certifies.
pub struct QueueSuite<Q> {
    pub suite: DriverSuite<Bundle<Q>>,
    pub ops: QueueOps<Q>,
    pub equality: Equiv<Q>,
}

pub fn queue_sampler<Q: AdtValue>(ops: &QueueOps<Q>) -> Sampler<Q> {
    let ops = ops.clone();
    Sampler::new(move |rng, size| {
        let mut q = (ops.empty)();
        for _ in 0..rng.random_range(0..=size) {
            (ops.enqueue)(&mut q, rng.random_range(-20..=20));
        }
        q
    })
}

pub fn build_queue_with_append_suite<Q: AdtValue>(binding: QueueBinding<Q>) -> Result<QueueSuite<Q>, AdtError> {
    let ops = resolve(&binding)?;
    let eq = binding.equality.clone().unwrap_or_else(Equiv::canonical);
    let sampler = queue_sampler(&ops);
    let gen = sampler.bundle();

    let mut suite = DriverSuite::new("queue_with_append", &eq.id);
    suite.operations = ["empty", "enqueue", "dequeue", "front", "is_empty", "count", "append"]
        .map(String::from)
        .to_vec();
    suite.constructors = ["empty", "enqueue"].map(String::from).to_vec();
    suite.observers = ["front", "dequeue", "is_empty", "count"].map(String::from).to_vec();

    let axiom = |name: &str, text: &str| AxiomDriver::new(name, text, DriverKind::Axiom, Arc::clone(&gen));
    let o = ops.clone();
    let reset = move |b: &mut Bundle<Q>| b.s_1 = (o.empty)();
    let o = ops.clone();
    let enqueue_s1 = move |b: &mut Bundle<Q>| (o.enqueue)(&mut b.s_1, b.x);

    let o = ops.clone();
    suite.drivers.push(
        axiom("front_of_empty_is_undefined", "front(empty) is undefined")
            .covers("empty", "front")
            .params(&["s_1"])
            .step("empty", &["s_1"], reset.clone())
            .post(move |_, n| (o.front)(&n.s_1).is_none()),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("dequeue_of_empty_is_rejected", "dequeue(empty) is undefined")
            .covers("empty", "dequeue")
            .params(&["s_1"])
            .step("empty", &["s_1"], reset.clone())
            .post(move |_, n| (o.dequeue)(&mut n.s_1.clone()).is_err()),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("empty_is_empty", "is_empty(empty) = true")
            .covers("empty", "is_empty")
            .params(&["s_1"])
            .step("empty", &["s_1"], reset.clone())
            .post(move |_, n| (o.is_empty)(&n.s_1)),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("empty_has_zero_count", "count(empty) = 0")
            .covers("empty", "count")
            .params(&["s_1"])
            .step("empty", &["s_1"], reset)
            .post(move |_, n| (o.count)(&n.s_1) == 0),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom(
            "front_after_enqueue",
            "front(enqueue(q, x)) = if is_empty(q) then x else front(q)",
        )
        .covers("enqueue", "front")
        .params(&["s_1", "x"])
        .step("enqueue", &["s_1"], enqueue_s1.clone())
        .post(move |old, n| {
            let expected = if (o.is_empty)(&old.s_1) {
                Some(old.x)
            } else {
                (o.front)(&old.s_1)
            };
            (o.front)(&n.s_1) == expected
        }),
    );
    let (o, o2) = (ops.clone(), ops.clone());
    let (eq_pre, eq_post) = (eq.clone(), eq.clone());
    suite.drivers.push(
        axiom(
            "dequeue_after_enqueue",
            "dequeue(enqueue(q, x)) = if is_empty(q) then empty else enqueue(dequeue(q), x)",
        )
        .covers("enqueue", "dequeue")
        .params(&["s_1", "s_2", "x"])
        .pre(move |b| eq_pre.eq(&b.s_1, &b.s_2))
        .step("enqueue", &["s_1"], enqueue_s1.clone())
        .fallible_step("dequeue", &["s_1"], move |b| (o.dequeue)(&mut b.s_1))
        .fallible_step("dequeue_then_enqueue", &["s_2"], move |b| {
            if (o2.is_empty)(&b.s_2) {
                return Ok(());
            }
            (o2.dequeue)(&mut b.s_2)?;
            (o2.enqueue)(&mut b.s_2, b.x);
            Ok(())
        })
        .post(move |_, n| eq_post.eq(&n.s_1, &n.s_2)),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("enqueue_is_not_empty", "is_empty(enqueue(q, x)) = false")
            .covers("enqueue", "is_empty")
            .params(&["s_1", "x"])
            .step("enqueue", &["s_1"], enqueue_s1.clone())
            .post(move |_, n| !(o.is_empty)(&n.s_1)),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("enqueue_increments_count", "count(enqueue(q, x)) = count(q) + 1")
            .covers("enqueue", "count")
            .params(&["s_1", "x"])
            .step("enqueue", &["s_1"], enqueue_s1)
            .post(move |old, n| (o.count)(&n.s_1) == (o.count)(&old.s_1) + 1),
    );

    let (o, e) = (ops.clone(), eq.clone());
    suite.drivers.push(
        axiom("append_empty_right", "append(q, empty) = q")
            .params(&["s_1", "s_2"])
            .step("empty", &["s_2"], {
                let o = ops.clone();
                move |b| b.s_2 = (o.empty)()
            })
            .step("append", &["s_1"], move |b| {
                let r = b.s_2.clone();
                (o.append)(&mut b.s_1, &r)
            })
            .post(move |old, n| e.eq(&n.s_1, &old.s_1)),
    );
    let (o, e) = (ops.clone(), eq.clone());
    suite.drivers.push(
        axiom("append_empty_left", "append(empty, q) = q")
            .params(&["s_1", "s_3"])
            .step("empty", &["s_3"], {
                let o = ops.clone();
                move |b| b.s_3 = (o.empty)()
            })
            .step("append", &["s_3"], move |b| {
                let r = b.s_1.clone();
                (o.append)(&mut b.s_3, &r)
            })
            .post(move |old, n| e.eq(&n.s_3, &old.s_1)),
    );
    let (o, o2, e) = (ops.clone(), ops.clone(), eq.clone());
    suite.drivers.push(
        axiom(
            "append_is_associative",
            "append(append(q, r), s) = append(q, append(r, s))",
        )
        .params(&["s_1", "s_2", "s_3"])
        .step("append_s_2", &["s_1"], {
            let o = ops.clone();
            move |b| {
                let r = b.s_2.clone();
                (o.append)(&mut b.s_1, &r)
            }
        })
        .step("append_s_3", &["s_1"], move |b| {
            let r = b.s_3.clone();
            (o.append)(&mut b.s_1, &r)
        })
        .post(move |old, n| {
            let right = o2.appended(&old.s_2, &old.s_3);
            e.eq(&n.s_1, &o2.appended(&old.s_1, &right))
        }),
    );
    let (o, e) = (ops.clone(), eq.clone());
    suite.drivers.push(
        axiom(
            "append_enqueue_fifo",
            "append(q, enqueue(r, x)) = enqueue(append(q, r), x)",
        )
        .params(&["s_1", "s_2", "x"])
        .step("enqueue", &["s_2"], {
            let o = ops.clone();
            move |b| (o.enqueue)(&mut b.s_2, b.x)
        })
        .step("append", &["s_1"], {
            let o = ops.clone();
            move |b| {
                let r = b.s_2.clone();
                (o.append)(&mut b.s_1, &r)
            }
        })
        .post(move |old, n| e.eq(&n.s_1, &o.enqueued(&o.appended(&old.s_1, &old.s_2), old.x))),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom(
            "front_of_append",
            "front(append(q, r)) = if is_empty(q) then front(r) else front(q)",
        )
        .params(&["s_1", "s_2"])
        .step("append", &["s_1"], {
            let o = ops.clone();
            move |b| {
                let r = b.s_2.clone();
                (o.append)(&mut b.s_1, &r)
            }
        })
        .post(move |old, n| {
            let expected = if (o.is_empty)(&old.s_1) {
                (o.front)(&old.s_2)
            } else {
                (o.front)(&old.s_1)
            };
            (o.front)(&n.s_1) == expected
        }),
    );

    let o = ops.clone();
    let enqueue: Operation<Q> = Arc::new(move |q, _, x| {
        (o.enqueue)(q, x);
        Ok(())
    });
    suite
        .drivers
        .push(well_definedness_driver("enqueue", enqueue, None, eq.clone(), &sampler));
    let o = ops.clone();
    let dequeue: Operation<Q> = Arc::new(move |q, _, _| (o.dequeue)(q));
    let o2 = ops.clone();
    suite.drivers.push(well_definedness_driver(
        "dequeue",
        dequeue,
        Some(Arc::new(move |q: &Q| !(o2.is_empty)(q))),
        eq.clone(),
        &sampler,
    ));
    let o = ops.clone();
    let append: Operation<Q> = Arc::new(move |q, r, _| {
        (o.append)(q, r);
        Ok(())
    });
    suite
        .drivers
        .push(well_definedness_driver("append", append, None, eq.clone(), &sampler));

    Ok(QueueSuite {
        suite,
        ops,
        equality: eq,
    })
}
