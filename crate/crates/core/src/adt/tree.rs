//! Binary trees with an in-order traversal into a queue.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::driver::{AdtError, AdtValue, AxiomDriver, DriverKind, DriverSuite, Equiv, Produce};
use super::queue::{QueueOps, QueueSuite};
use crate::kernel::State;

type Leaf<T> = Arc<dyn Fn() -> T + Send + Sync>;
type Node<T> = Arc<dyn Fn(T, i64, T) -> T + Send + Sync>;
type Child<T> = Arc<dyn Fn(&T) -> Option<T> + Send + Sync>;
type Item<T> = Arc<dyn Fn(&T) -> Option<i64> + Send + Sync>;
type Test<T> = Arc<dyn Fn(&T) -> bool + Send + Sync>;
type InOrd<T, Q> = Arc<dyn Fn(&T) -> Q + Send + Sync>;

/// Driver parameters for the tree suite: three trees, an element and a
/// queue receiving traversals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBundle<T, Q> {
    pub t_1: T,
    pub t_2: T,
    pub t_3: T,
    pub x: i64,
    pub q_1: Q,
}

impl<T: AdtValue, Q: AdtValue> State for TreeBundle<T, Q> {
    fn boxed_clone(&self) -> Box<dyn State> {
        Box::new(self.clone())
    }

    fn regions(&self) -> Vec<(String, String)> {
        vec![
            ("t_1".into(), self.t_1.canonical()),
            ("t_2".into(), self.t_2.canonical()),
            ("t_3".into(), self.t_3.canonical()),
            ("x".into(), self.x.to_string()),
            ("q_1".into(), self.q_1.canonical()),
        ]
    }
}

pub struct TreeBinding<T, Q> {
    leaf: Option<Leaf<T>>,
    node: Option<Node<T>>,
    left: Option<Child<T>>,
    right: Option<Child<T>>,
    item: Option<Item<T>>,
    is_leaf: Option<Test<T>>,
    in_ord: Option<InOrd<T, Q>>,
    equality: Option<Equiv<T>>,
}

impl<T: AdtValue, Q: AdtValue> Default for TreeBinding<T, Q> {
    fn default() -> Self {
        Self {
            leaf: None,
            node: None,
            left: None,
            right: None,
            item: None,
            is_leaf: None,
            in_ord: None,
            equality: None,
        }
    }
}

impl<T: AdtValue, Q: AdtValue> TreeBinding<T, Q> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_leaf(mut self, f: impl Fn() -> T + Send + Sync + 'static) -> Self {
        self.leaf = Some(Arc::new(f));
        self
    }

    pub fn with_node(mut self, f: impl Fn(T, i64, T) -> T + Send + Sync + 'static) -> Self {
        self.node = Some(Arc::new(f));
        self
    }

    pub fn with_left(mut self, f: impl Fn(&T) -> Option<T> + Send + Sync + 'static) -> Self {
        self.left = Some(Arc::new(f));
        self
    }

    pub fn with_right(mut self, f: impl Fn(&T) -> Option<T> + Send + Sync + 'static) -> Self {
        self.right = Some(Arc::new(f));
        self
    }

    pub fn with_item(mut self, f: impl Fn(&T) -> Option<i64> + Send + Sync + 'static) -> Self {
        self.item = Some(Arc::new(f));
        self
    }

    pub fn with_is_leaf(mut self, f: impl Fn(&T) -> bool + Send + Sync + 'static) -> Self {
        self.is_leaf = Some(Arc::new(f));
        self
    }

    pub fn with_in_ord(mut self, f: impl Fn(&T) -> Q + Send + Sync + 'static) -> Self {
        self.in_ord = Some(Arc::new(f));
        self
    }

    pub fn with_equality(mut self, eq: Equiv<T>) -> Self {
        self.equality = Some(eq);
        self
    }
}

struct Ops<T, Q> {
    leaf: Leaf<T>,
    node: Node<T>,
    left: Child<T>,
    right: Child<T>,
    item: Item<T>,
    is_leaf: Test<T>,
    in_ord: InOrd<T, Q>,
}

impl<T, Q> Clone for Ops<T, Q> {
    fn clone(&self) -> Self {
        Self {
            leaf: Arc::clone(&self.leaf),
            node: Arc::clone(&self.node),
            left: Arc::clone(&self.left),
            right: Arc::clone(&self.right),
            item: Arc::clone(&self.item),
            is_leaf: Arc::clone(&self.is_leaf),
            in_ord: Arc::clone(&self.in_ord),
        }
    }
}

impl<T: Clone, Q> Ops<T, Q> {
    /// In-order sequence read through the observers only.
    fn traversal(&self, t: &T, depth: usize) -> Vec<i64> {
        if depth > 64 || (self.is_leaf)(t) {
            return Vec::new();
        }
        let mut out = (self.left)(t).map_or_else(Vec::new, |l| self.traversal(&l, depth + 1));
        out.extend((self.item)(t));
        out.extend((self.right)(t).map_or_else(Vec::new, |r| self.traversal(&r, depth + 1)));
        out
    }

    fn arbitrary(&self, rng: &mut ChaCha8Rng, size: usize) -> T {
        if size == 0 || rng.random_bool(0.25) {
            return (self.leaf)();
        }
        let rest = size - 1;
        let left_size = rng.random_range(0..=rest);
        let l = self.arbitrary(rng, left_size);
        let r = self.arbitrary(rng, rest - left_size);
        (self.node)(l, rng.random_range(-20..=20), r)
    }
}

fn resolve<T, Q>(b: &TreeBinding<T, Q>) -> Result<Ops<T, Q>, AdtError> {
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
        take!(leaf),
        take!(node),
        take!(left),
        take!(right),
        take!(item),
        take!(is_leaf),
        take!(in_ord),
    );
    match parts {
        (Some(leaf), Some(node), Some(left), Some(right), Some(item), Some(is_leaf), Some(in_ord)) => Ok(Ops {
            leaf,
            node,
            left,
            right,
            item,
            is_leaf,
            in_ord,
        }),
        _ => Err(AdtError::IncompleteBinding {
            adt: "binary_tree".into(),
            missing,
        }),
    }
}

/// Builds the binary-tree suite extended with `in_ord`. The queue suite
/// supplies the operations and equality of the traversal's result type.
pub fn build_tree_inord_suite<T: AdtValue, Q: AdtValue>(
    binding: TreeBinding<T, Q>,
    queue_suite: Option<&QueueSuite<Q>>,
) -> Result<DriverSuite<TreeBundle<T, Q>>, AdtError> {
    let Some(qs) = queue_suite else {
        return Err(AdtError::MissingQueueSuite("binary_tree".into()));
    };
    let ops = resolve(&binding)?;
    let qops: QueueOps<Q> = qs.ops.clone();
    let qeq = qs.equality.clone();
    let eq = binding.equality.clone().unwrap_or_else(Equiv::canonical);

    let sampler_ops = ops.clone();
    let empty = Arc::clone(&qops.empty);
    let twin_rate = 0.75;
    let gen: Produce<TreeBundle<T, Q>> = Arc::new(move |rng, size| {
        let t_1 = sampler_ops.arbitrary(rng, size);
        let t_2 = if rng.random_bool(twin_rate) {
            t_1.clone()
        } else {
            sampler_ops.arbitrary(rng, size)
        };
        let t_3 = sampler_ops.arbitrary(rng, size);
        TreeBundle {
            t_1,
            t_2,
            t_3,
            x: rng.random_range(-20..=20),
            q_1: empty(),
        }
    });

    let mut suite = DriverSuite::new("binary_tree_in_order", &eq.id);
    suite.operations = ["leaf", "node", "left", "right", "item", "is_leaf", "in_ord"]
        .map(String::from)
        .to_vec();
    suite.constructors = ["leaf", "node"].map(String::from).to_vec();
    suite.observers = ["left", "right", "item", "is_leaf"].map(String::from).to_vec();

    let axiom = |name: &str, text: &str| AxiomDriver::new(name, text, DriverKind::Axiom, Arc::clone(&gen));
    let o = ops.clone();
    let make_leaf = move |b: &mut TreeBundle<T, Q>| b.t_3 = (o.leaf)();
    let o = ops.clone();
    let make_node = move |b: &mut TreeBundle<T, Q>| b.t_3 = (o.node)(b.t_1.clone(), b.x, b.t_2.clone());

    let o = ops.clone();
    suite.drivers.push(
        axiom("left_of_leaf_is_undefined", "left(leaf) is undefined")
            .covers("leaf", "left")
            .params(&["t_3"])
            .step("leaf", &["t_3"], make_leaf.clone())
            .post(move |_, n| (o.left)(&n.t_3).is_none()),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("right_of_leaf_is_undefined", "right(leaf) is undefined")
            .covers("leaf", "right")
            .params(&["t_3"])
            .step("leaf", &["t_3"], make_leaf.clone())
            .post(move |_, n| (o.right)(&n.t_3).is_none()),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("item_of_leaf_is_undefined", "item(leaf) is undefined")
            .covers("leaf", "item")
            .params(&["t_3"])
            .step("leaf", &["t_3"], make_leaf.clone())
            .post(move |_, n| (o.item)(&n.t_3).is_none()),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("leaf_is_leaf", "is_leaf(leaf) = true")
            .covers("leaf", "is_leaf")
            .params(&["t_3"])
            .step("leaf", &["t_3"], make_leaf.clone())
            .post(move |_, n| (o.is_leaf)(&n.t_3)),
    );
    let (o, e) = (ops.clone(), eq.clone());
    suite.drivers.push(
        axiom("left_of_node", "left(node(l, x, r)) = l")
            .covers("node", "left")
            .params(&["t_1", "t_2", "x", "t_3"])
            .step("node", &["t_3"], make_node.clone())
            .post(move |old, n| (o.left)(&n.t_3).is_some_and(|l| e.eq(&l, &old.t_1))),
    );
    let (o, e) = (ops.clone(), eq.clone());
    suite.drivers.push(
        axiom("right_of_node", "right(node(l, x, r)) = r")
            .covers("node", "right")
            .params(&["t_1", "t_2", "x", "t_3"])
            .step("node", &["t_3"], make_node.clone())
            .post(move |old, n| (o.right)(&n.t_3).is_some_and(|r| e.eq(&r, &old.t_2))),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("item_of_node", "item(node(l, x, r)) = x")
            .covers("node", "item")
            .params(&["t_1", "t_2", "x", "t_3"])
            .step("node", &["t_3"], make_node.clone())
            .post(move |old, n| (o.item)(&n.t_3) == Some(old.x)),
    );
    let o = ops.clone();
    suite.drivers.push(
        axiom("node_is_not_leaf", "is_leaf(node(l, x, r)) = false")
            .covers("node", "is_leaf")
            .params(&["t_1", "t_2", "x", "t_3"])
            .step("node", &["t_3"], make_node.clone())
            .post(move |_, n| !(o.is_leaf)(&n.t_3)),
    );

    let (o, q) = (ops.clone(), qops.clone());
    suite.drivers.push(
        axiom("in_ord_of_leaf_is_empty", "in_ord(leaf) = empty")
            .params(&["t_3", "q_1"])
            .step("leaf", &["t_3"], make_leaf)
            .step("in_ord", &["q_1"], move |b| b.q_1 = (o.in_ord)(&b.t_3))
            .post(move |_, n| (q.is_empty)(&n.q_1)),
    );
    let (o, o2, q, e) = (ops.clone(), ops.clone(), qops.clone(), qeq.clone());
    suite.drivers.push(
        axiom(
            "in_ord_of_node",
            "in_ord(node(l, x, r)) = append(in_ord(l), append(enqueue(empty, x), in_ord(r)))",
        )
        .params(&["t_1", "t_2", "x", "t_3", "q_1"])
        .step("node", &["t_3"], make_node)
        .step("in_ord", &["q_1"], move |b| b.q_1 = (o.in_ord)(&b.t_3))
        .post(move |old, n| {
            let middle = q.enqueued(&(q.empty)(), old.x);
            let tail = q.appended(&middle, &(o2.in_ord)(&old.t_2));
            let expected = q.appended(&(o2.in_ord)(&old.t_1), &tail);
            e.eq(&n.q_1, &expected)
        }),
    );
    let (o, o2, q) = (ops.clone(), ops.clone(), qops.clone());
    suite.drivers.push(
        axiom("in_ord_matches_traversal", "in_ord(t) lists t's items left to right")
            .params(&["t_1", "q_1"])
            .step("in_ord", &["q_1"], move |b| b.q_1 = (o.in_ord)(&b.t_1))
            .post(move |old, n| q.drain(&n.q_1) == o2.traversal(&old.t_1, 0)),
    );

    let (o, o2, e, ep) = (ops.clone(), ops.clone(), qeq.clone(), eq.clone());
    suite.drivers.push(
        AxiomDriver::new(
            "in_ord_is_well_defined",
            "t_1 ~ t_2 implies in_ord(t_1) ~ in_ord(t_2)",
            DriverKind::WellDefinedness,
            Arc::clone(&gen),
        )
        .params(&["t_1", "t_2", "q_1"])
        .pre(move |b| ep.eq(&b.t_1, &b.t_2))
        .step("in_ord", &["q_1"], move |b| b.q_1 = (o.in_ord)(&b.t_1))
        .post(move |old, n| e.eq(&n.q_1, &(o2.in_ord)(&old.t_2))),
    );
    let (o, o2, e, ep) = (ops.clone(), ops, eq.clone(), eq);
    suite.drivers.push(
        AxiomDriver::new(
            "node_is_well_defined",
            "t_1 ~ t_2 implies node(t_1, x, t_3) ~ node(t_2, x, t_3)",
            DriverKind::WellDefinedness,
            Arc::clone(&gen),
        )
        .params(&["t_1", "t_2", "x", "t_3"])
        .pre(move |b| ep.eq(&b.t_1, &b.t_2))
        .step("node", &["t_3"], move |b| b.t_3 = (o.node)(b.t_1.clone(), b.x, b.t_3.clone()))
        .post(move |old, n| e.eq(&n.t_3, &(o2.node)(old.t_2.clone(), old.x, old.t_3.clone()))),
    );
    Ok(suite)
}
