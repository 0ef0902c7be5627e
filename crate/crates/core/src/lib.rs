//! Executable requirement templates over transition systems, with ADT axiom
//! drivers alongside. A finite-trace LTL evaluator serves as the oracle.

pub mod adt;
pub mod engine;
pub mod fixtures;
pub mod kernel;
pub mod temporal;

pub use kernel::{
    ActionDef, ConditionDef, EquivalenceDef, Failure, KernelError, MeasureDef, Outcome, State,
    StateRef, SystemModel, Trace, Verdict, Witness,
};

/// Splitmix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a name, for stable per-item seeds.
pub fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
