//! A bag with arbitrary removal, and a library of 17 copy operations of which
//! six mishandle aliasing or hidden layout.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adt::{
    aliasing_self_copy_driver, copy_well_definedness_driver, well_definedness_driver, AdtValue, Bundle,
    CopyOp, CopySource, DriverSuite, Equiv, Operation, Sampler,
};
use crate::kernel::{State, SystemModel};

/// Multiset kept as a sequence. `salt` is hidden state that decides which
/// occurrence `remove` deletes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bag {
    pub items: Vec<i64>,
    pub salt: u64,
}

impl AdtValue for Bag {
    fn canonical(&self) -> String {
        format!("{:?}", self.items)
    }
}

impl Bag {
    /// Removes one occurrence of `x mod 3`, chosen by the salt.
    pub fn remove(&mut self, x: i64) {
        let target = x.rem_euclid(3);
        let hits: Vec<usize> = (0..self.items.len()).filter(|i| self.items[*i] == target).collect();
        if !hits.is_empty() {
            let pick = hits[(self.salt % hits.len() as u64) as usize];
            self.items.remove(pick);
        }
    }
}

pub fn bag_sampler() -> Sampler<Bag> {
    Sampler::new(|rng, size| Bag {
        items: (0..rng.random_range(0..=size)).map(|_| rng.random_range(0..3)).collect(),
        salt: rng.random(),
    })
    .with_twin(|b, rng| Bag {
        items: b.items.clone(),
        salt: rng.random(),
    })
}

/// Well-definedness of `remove` under sequence or multiset equality.
pub fn bag_suite(multiset: bool) -> DriverSuite<Bundle<Bag>> {
    let eq = if multiset {
        Equiv::new("multiset", |a: &Bag, b: &Bag| {
            let (mut x, mut y) = (a.items.clone(), b.items.clone());
            x.sort_unstable();
            y.sort_unstable();
            x == y
        })
    } else {
        Equiv::new("sequence", |a: &Bag, b: &Bag| a.items == b.items)
    };
    let remove: Operation<Bag> = Arc::new(|b, _, x| {
        b.remove(x);
        Ok(())
    });
    let mut suite = DriverSuite::new("bag", &eq.id);
    suite.operations = vec!["remove".into()];
    suite
        .drivers
        .push(well_definedness_driver("remove", remove, None, eq, &bag_sampler()));
    suite
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyFault {
    /// Clears the target before reading the source.
    WipeOnAlias,
    /// Empties the target list, then walks the (now empty) source.
    ClearThenRead,
    /// Self-copy resets the cursor.
    CursorLostOnAlias,
    /// The copied cursor is translated through the target's own bucket layout.
    LayoutDependentCursor,
}

/// A container with a copy operation. `salt` models layout that is not part
/// of the abstract value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub kind: &'static str,
    pub items: Vec<i64>,
    pub width: usize,
    pub cursor: usize,
    pub salt: u64,
}

impl AdtValue for Container {
    fn canonical(&self) -> String {
        format!("{:?} width={} cursor={}", self.items, self.width, self.cursor)
    }
}

impl State for Container {
    fn boxed_clone(&self) -> Box<dyn State> {
        Box::new(self.clone())
    }

    fn regions(&self) -> Vec<(String, String)> {
        vec![
            ("items".into(), format!("{:?}", self.items)),
            ("width".into(), self.width.to_string()),
            ("cursor".into(), self.cursor.to_string()),
        ]
    }
}

fn assign(target: &mut Container, src: &Container) {
    target.items = src.items.clone();
    target.width = src.width;
    target.cursor = src.cursor;
}

/// Copies `src` (or the target itself) into `target` according to `fault`.
pub fn copy_into(fault: Option<CopyFault>, target: &mut Container, src: CopySource<'_, Container>) {
    match (fault, src) {
        (None, CopySource::Current) => {}
        (None, CopySource::Other(s)) => assign(target, s),
        (Some(CopyFault::WipeOnAlias | CopyFault::ClearThenRead), CopySource::Current) => {
            target.items.clear();
            target.cursor = 0;
        }
        (Some(CopyFault::CursorLostOnAlias), CopySource::Current) => target.cursor = 0,
        (Some(CopyFault::LayoutDependentCursor), CopySource::Current) => {}
        (Some(CopyFault::LayoutDependentCursor), CopySource::Other(s)) => {
            assign(target, s);
            let len = s.items.len().max(1) as u64;
            let shifted = (s.cursor as u64 % len + target.salt % len + len - s.salt % len) % len;
            target.cursor = if s.items.is_empty() { 0 } else { shifted as usize };
        }
        (Some(_), CopySource::Other(s)) => assign(target, s),
    }
}

/// The 17 copy-operation variants and their seeded faults.
pub const CONTAINER_LIBRARY: [(&str, Option<CopyFault>); 17] = [
    ("array", None),
    ("array2", Some(CopyFault::WipeOnAlias)),
    ("arrayed_list", None),
    ("linked_list", None),
    ("doubly_linked_list", None),
    ("arrayed_queue", None),
    ("linked_queue", Some(CopyFault::ClearThenRead)),
    ("arrayed_stack", None),
    ("linked_stack", Some(CopyFault::ClearThenRead)),
    ("hash_set", None),
    ("hash_table", None),
    ("array_iterator", Some(CopyFault::CursorLostOnAlias)),
    ("arrayed_list_iterator", Some(CopyFault::CursorLostOnAlias)),
    ("linked_list_iterator", None),
    ("doubly_linked_list_iterator", None),
    ("hash_set_iterator", Some(CopyFault::LayoutDependentCursor)),
    ("hash_table_iterator", None),
];

pub fn container_fault(kind: &str) -> Option<Option<CopyFault>> {
    CONTAINER_LIBRARY.iter().find(|(k, _)| *k == kind).map(|(_, f)| *f)
}

fn container_sampler(kind: &'static str) -> Sampler<Container> {
    let width_of = move |rng: &mut rand_chacha::ChaCha8Rng| if kind == "array2" { rng.random_range(1..=3) } else { 1 };
    Sampler::new(move |rng, size| {
        let width = width_of(rng);
        let rows = rng.random_range(0..=size);
        let items: Vec<i64> = (0..rows * width).map(|_| rng.random_range(-20..=20)).collect();
        let cursor = if items.is_empty() { 0 } else { rng.random_range(0..items.len()) };
        Container {
            kind,
            items,
            width,
            cursor,
            salt: rng.random(),
        }
    })
    .with_twin(|c, rng| Container {
        salt: rng.random(),
        ..c.clone()
    })
}

/// Aliasing and copy well-definedness drivers for one library variant.
pub fn container_suite(kind: &str) -> Option<DriverSuite<Bundle<Container>>> {
    let (kind, fault) = CONTAINER_LIBRARY.iter().find(|(k, _)| *k == kind).copied()?;
    let sampler = container_sampler(kind);
    let copy: CopyOp<Container> = Arc::new(move |t, s| copy_into(fault, t, s));
    let eq = Equiv::canonical();
    let mut suite = DriverSuite::new(kind, &eq.id);
    suite.operations = vec!["copy".into()];
    suite
        .drivers
        .push(aliasing_self_copy_driver("copy", Arc::clone(&copy), eq.clone(), &sampler));
    suite
        .drivers
        .push(copy_well_definedness_driver("copy", copy, eq, &sampler));
    Some(suite)
}

/// A container variant as a system model whose action copies it onto itself.
pub fn container_model(name: &str, kind: &'static str, fault: Option<CopyFault>) -> SystemModel {
    SystemModel::builder(name, move |seed| Container {
        kind,
        items: (0..6).map(|i| (seed as i64 + i) % 10).collect(),
        width: if kind == "array2" { 2 } else { 1 },
        cursor: 1,
        salt: seed,
    })
    .describe(format!("{kind} with self-copy"))
    .action("copy_self", &["items", "cursor"], move |c: &mut Container| {
        copy_into(fault, c, CopySource::Current)
    })
    .condition("is_empty", "the container is empty", |c: &Container| c.items.is_empty())
    .measure("count", "the number of elements", |c: &Container| c.items.len() as u64)
    .equivalence("canonical_text", |a: &Container, b: &Container| a.canonical() == b.canonical())
    .build()
}
