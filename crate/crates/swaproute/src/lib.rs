//! Routing two-qubit circuits on sparse hardware graphs, plus the counting
//! arguments that lower-bound how much depth the routing must cost.
//!
//! The crate has three layers:
//!
//! * models: [`graph::InteractionGraph`] for hardware connectivity and
//!   [`circuit::LayeredCircuit`] for the logical circuit;
//! * routers: [`route::route_butterfly`] realizes every circuit layer in
//!   `O(log n)` hardware steps on the degree-reduced butterfly, and
//!   [`route::route_greedy`] works on any connected graph; both emit
//!   replayable schedules that [`route::verify_schedule`] checks gate by
//!   gate;
//! * analysis: exact small-instance oracles ([`oracle`]) and entropy-style
//!   depth lower bounds ([`bounds`]) that every schedule is measured
//!   against.

pub mod bounds;
pub mod circuit;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod pairing;
pub mod route;

pub use circuit::{generate_full_layer_circuit, LayeredCircuit};
pub use graph::{GraphError, GraphFamily, InteractionGraph};
pub use route::{route_butterfly, route_greedy, verify_schedule, RoutedSchedule};
