//! Reference stack, queue and tree implementations and their seeded mutants.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;

use crate::adt::{
    build_queue_with_append_suite, build_stack_suite, build_stack_suite_with, build_tree_inord_suite,
    AdtError, AdtValue, DriverSuite, Equiv, QueueBinding, QueueSuite, RunSuite, Sampler, StackBinding,
    TreeBinding, TreeBundle,
};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefStack(pub Vec<i64>);

impl AdtValue for RefStack {
    fn canonical(&self) -> String {
        format!("{:?}", self.0)
    }
}

pub const STACK_MUTANTS: [&str; 6] = [
    "pop_noop",
    "pop_removes_bottom",
    "push_twice",
    "top_returns_bottom",
    "count_off_by_one",
    "shared_mod_count",
];

fn pop_top(s: &mut RefStack) -> Result<(), String> {
    s.0.pop().map(|_| ()).ok_or_else(|| "pop on empty stack".to_string())
}

/// The reference binding, or the binding with one seeded fault. Returns
/// `None` for unknown names and for `shared_mod_count`, whose fault lives in
/// a different representation.
pub fn stack_binding(mutant: Option<&str>) -> Option<StackBinding<RefStack>> {
    let b = StackBinding::new()
        .with_new(RefStack::default)
        .with_push(|s: &mut RefStack, x| s.0.push(x))
        .with_pop(pop_top)
        .with_top(|s: &RefStack| s.0.last().copied())
        .with_is_empty(|s: &RefStack| s.0.is_empty())
        .with_count(|s: &RefStack| s.0.len())
        .with_equality(Equiv::new("elementwise", |a: &RefStack, b: &RefStack| a == b));
    Some(match mutant {
        None => b,
        Some("pop_noop") => b.with_pop(|s: &mut RefStack| {
            if s.0.is_empty() {
                Err("pop on empty stack".into())
            } else {
                Ok(())
            }
        }),
        Some("pop_removes_bottom") => b.with_pop(|s: &mut RefStack| {
            if s.0.is_empty() {
                Err("pop on empty stack".into())
            } else {
                s.0.remove(0);
                Ok(())
            }
        }),
        Some("push_twice") => b.with_push(|s: &mut RefStack, x| {
            s.0.push(x);
            s.0.push(x);
        }),
        Some("top_returns_bottom") => b.with_top(|s: &RefStack| s.0.first().copied()),
        Some("count_off_by_one") => b.with_count(|s: &RefStack| s.0.len() + 1),
        Some(_) => return None,
    })
}

/// Stack that bumps a modification counter shared by all of its clones.
#[derive(Debug, Clone, Default)]
pub struct CountedStack {
    pub items: Vec<i64>,
    pub mods: Arc<AtomicU64>,
}

impl AdtValue for CountedStack {
    fn canonical(&self) -> String {
        format!("{:?} mods={}", self.items, self.mods.load(Ordering::SeqCst))
    }
}

fn counted_stack_suite() -> Result<DriverSuite<crate::adt::Bundle<CountedStack>>, AdtError> {
    let binding = StackBinding::new()
        .with_new(CountedStack::default)
        .with_push(|s: &mut CountedStack, x| {
            s.items.push(x);
            s.mods.fetch_add(1, Ordering::SeqCst);
        })
        .with_pop(|s: &mut CountedStack| {
            s.mods.fetch_add(1, Ordering::SeqCst);
            s.items.pop().map(|_| ()).ok_or_else(|| "pop on empty stack".to_string())
        })
        .with_top(|s: &CountedStack| s.items.last().copied())
        .with_is_empty(|s: &CountedStack| s.items.is_empty())
        .with_count(|s: &CountedStack| s.items.len());
    let sampler = Sampler::new(|rng, size| {
        let items = (0..rng.random_range(0..=size))
            .map(|_| rng.random_range(-20..=20))
            .collect();
        CountedStack {
            items,
            mods: Arc::new(AtomicU64::new(0)),
        }
    });
    build_stack_suite_with(binding, Some(sampler))
}

pub fn stack_suite(mutant: Option<&str>) -> Option<Result<Box<dyn RunSuite>, AdtError>> {
    if mutant == Some("shared_mod_count") {
        return Some(counted_stack_suite().map(|s| Box::new(s) as Box<dyn RunSuite>));
    }
    let binding = stack_binding(mutant)?;
    Some(build_stack_suite(binding).map(|s| Box::new(s) as Box<dyn RunSuite>))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefQueue(pub VecDeque<i64>);

impl AdtValue for RefQueue {
    fn canonical(&self) -> String {
        format!("{:?}", self.0)
    }
}

pub const QUEUE_MUTANTS: [&str; 5] = [
    "append_prepends",
    "dequeue_from_back",
    "front_returns_back",
    "enqueue_drops_duplicates",
    "append_drops_last",
];

fn dequeue_front(q: &mut RefQueue) -> Result<(), String> {
    q.0.pop_front().map(|_| ()).ok_or_else(|| "dequeue on empty queue".to_string())
}

pub fn queue_binding(mutant: Option<&str>) -> Option<QueueBinding<RefQueue>> {
    let b = QueueBinding::new()
        .with_empty(RefQueue::default)
        .with_enqueue(|q: &mut RefQueue, x| q.0.push_back(x))
        .with_dequeue(dequeue_front)
        .with_front(|q: &RefQueue| q.0.front().copied())
        .with_is_empty(|q: &RefQueue| q.0.is_empty())
        .with_count(|q: &RefQueue| q.0.len())
        .with_append(|q: &mut RefQueue, r: &RefQueue| q.0.extend(r.0.iter().copied()))
        .with_equality(Equiv::new("elementwise", |a: &RefQueue, b: &RefQueue| a == b));
    Some(match mutant {
        None => b,
        Some("append_prepends") => b.with_append(|q: &mut RefQueue, r: &RefQueue| {
            for x in r.0.iter().rev() {
                q.0.push_front(*x);
            }
        }),
        Some("dequeue_from_back") => b.with_dequeue(|q: &mut RefQueue| {
            q.0.pop_back().map(|_| ()).ok_or_else(|| "dequeue on empty queue".to_string())
        }),
        Some("front_returns_back") => b.with_front(|q: &RefQueue| q.0.back().copied()),
        Some("enqueue_drops_duplicates") => b.with_enqueue(|q: &mut RefQueue, x| {
            if !q.0.contains(&x) {
                q.0.push_back(x);
            }
        }),
        Some("append_drops_last") => b.with_append(|q: &mut RefQueue, r: &RefQueue| {
            let keep = r.0.len().saturating_sub(1);
            q.0.extend(r.0.iter().take(keep).copied());
        }),
        Some(_) => return None,
    })
}

pub fn reference_queue_suite() -> Result<QueueSuite<RefQueue>, AdtError> {
    let binding = queue_binding(None).unwrap_or_default();
    build_queue_with_append_suite(binding)
}

pub fn queue_suite(mutant: Option<&str>) -> Option<Result<Box<dyn RunSuite>, AdtError>> {
    let binding = queue_binding(mutant)?;
    Some(build_queue_with_append_suite(binding).map(|qs| Box::new(qs.suite) as Box<dyn RunSuite>))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefTree {
    Leaf,
    Node(Box<RefTree>, i64, Box<RefTree>),
}

impl RefTree {
    pub fn node(l: RefTree, x: i64, r: RefTree) -> Self {
        RefTree::Node(Box::new(l), x, Box::new(r))
    }

    /// Direct in-order recursion.
    pub fn items_in_order(&self) -> Vec<i64> {
        match self {
            RefTree::Leaf => Vec::new(),
            RefTree::Node(l, x, r) => {
                let mut out = l.items_in_order();
                out.push(*x);
                out.extend(r.items_in_order());
                out
            }
        }
    }

    fn preorder(&self) -> Vec<i64> {
        match self {
            RefTree::Leaf => Vec::new(),
            RefTree::Node(l, x, r) => {
                let mut out = vec![*x];
                out.extend(l.preorder());
                out.extend(r.preorder());
                out
            }
        }
    }

    fn right_first(&self) -> Vec<i64> {
        match self {
            RefTree::Leaf => Vec::new(),
            RefTree::Node(l, x, r) => {
                let mut out = r.right_first();
                out.push(*x);
                out.extend(l.right_first());
                out
            }
        }
    }
}

impl AdtValue for RefTree {
    fn canonical(&self) -> String {
        match self {
            RefTree::Leaf => ".".into(),
            RefTree::Node(l, x, r) => format!("({} {x} {})", l.canonical(), r.canonical()),
        }
    }
}

pub const TREE_MUTANTS: [&str; 6] = [
    "node_swaps_children",
    "in_ord_preorder",
    "in_ord_right_first",
    "item_returns_zero",
    "left_returns_right",
    "in_ord_drops_root",
];

fn queue_of(items: Vec<i64>) -> RefQueue {
    RefQueue(items.into())
}

pub fn tree_binding(mutant: Option<&str>) -> Option<TreeBinding<RefTree, RefQueue>> {
    let child = |left: bool| {
        move |t: &RefTree| match t {
            RefTree::Leaf => None,
            RefTree::Node(l, _, r) => Some(if left { (**l).clone() } else { (**r).clone() }),
        }
    };
    let b = TreeBinding::new()
        .with_leaf(|| RefTree::Leaf)
        .with_node(RefTree::node)
        .with_left(child(true))
        .with_right(child(false))
        .with_item(|t: &RefTree| match t {
            RefTree::Leaf => None,
            RefTree::Node(_, x, _) => Some(*x),
        })
        .with_is_leaf(|t: &RefTree| *t == RefTree::Leaf)
        .with_in_ord(|t: &RefTree| queue_of(t.items_in_order()))
        .with_equality(Equiv::new("structural", |a: &RefTree, b: &RefTree| a == b));
    Some(match mutant {
        None => b,
        Some("node_swaps_children") => b.with_node(|l, x, r| RefTree::node(r, x, l)),
        Some("in_ord_preorder") => b.with_in_ord(|t: &RefTree| queue_of(t.preorder())),
        Some("in_ord_right_first") => b.with_in_ord(|t: &RefTree| queue_of(t.right_first())),
        Some("item_returns_zero") => b.with_item(|t: &RefTree| match t {
            RefTree::Leaf => None,
            RefTree::Node(..) => Some(0),
        }),
        Some("left_returns_right") => b.with_left(child(false)),
        Some("in_ord_drops_root") => b.with_in_ord(|t: &RefTree| match t {
            RefTree::Leaf => RefQueue::default(),
            RefTree::Node(l, _, r) => {
                let mut items = l.items_in_order();
                items.extend(r.items_in_order());
                queue_of(items)
            }
        }),
        Some(_) => return None,
    })
}

pub fn tree_suite_typed(
    mutant: Option<&str>,
) -> Option<Result<DriverSuite<TreeBundle<RefTree, RefQueue>>, AdtError>> {
    let binding = tree_binding(mutant)?;
    Some(reference_queue_suite().and_then(|qs| build_tree_inord_suite(binding, Some(&qs))))
}

pub fn tree_suite(mutant: Option<&str>) -> Option<Result<Box<dyn RunSuite>, AdtError>> {
    Some(tree_suite_typed(mutant)?.map(|s| Box::new(s) as Box<dyn RunSuite>))
}
