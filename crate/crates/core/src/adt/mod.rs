//! Specification drivers for abstract data types.

mod driver;
mod probe;
mod queue;
mod stack;
mod tree;

pub use driver::{
    aliasing_self_copy_driver, check_driver, copy_well_definedness_driver, frame_check, run_driver,
    suite_outcome, well_definedness_driver, AdtError, AdtValue, AxiomDriver, Bundle, CopyOp, CopySource,
    DriverKind, DriverReport, DriverSuite, Equiv, InputGenerator, Operation, Produce, RunSuite, Sampler,
};
pub use probe::{contract_divergence_probe, Contract, Implementation, Probe};
pub use queue::{build_queue_with_append_suite, queue_sampler, QueueBinding, QueueOps, QueueSuite};
pub use stack::{build_stack_suite, build_stack_suite_with, stack_sampler, StackBinding};
pub use tree::{build_tree_inord_suite, TreeBinding, TreeBundle};
