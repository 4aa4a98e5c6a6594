//! Seeds and the constrained gradient flow.

mod flow;
mod seed;

pub use flow::{flow_step, run_flow, FlowConfig, FlowOutcome, FlowTrace, TraceRecord};
pub use seed::{seed, SeedKind};
