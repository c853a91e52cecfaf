//! Deterministic discrete-event network simulation.
//!
//! Hosts and routers are joined by full-duplex links. Every link direction has
//! an egress buffer at its sending node: routers use a [`RouterQueue`], hosts an
//! unbounded FIFO. Time is integer nanoseconds and events with equal times run in
//! scheduling order, so a run is a pure function of its scenario and seed.
//!
//! [`RouterQueue`]: crate::queue::RouterQueue

mod calendar;
mod config;
mod world;

pub use calendar::Calendar;
pub use config::{
    presets, FlowClass, FlowSpec, LinkSpec, Opener, RouterMode, RouterSpec, ScenarioConfig,
    TopologyKind, TopologySpec, SCHEMA_VERSION,
};
pub use world::{
    build, build_dumbbell, build_multihop, simulate, Channel, Node, NodeKind, RunOptions,
    SimOutput, SimWorld,
};
