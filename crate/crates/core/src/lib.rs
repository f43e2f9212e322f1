//! Multi-route cut solver.
//!
//! Finds a cheap set of edges (or vertices) whose removal leaves every
//! demand pair with fewer than its threshold of disjoint paths. The pipeline
//! solves a cutting-plane LP relaxation whose separation oracle is a
//! min-cost k-flow, rounds it by region growing, prunes the result and
//! verifies it with max-flow. Brute-force oracles back the test suite.

pub mod bench;
pub mod connectivity;
mod flow;
pub mod format;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod rounding;

pub use connectivity::{
    connectivity, edge_connectivity, max_flow, min_cost_k_flow, verify_cut, vertex_connectivity, DisjointPathSet,
    FlowResult, KFlow, VerificationReport,
};
pub use format::{parse_instance, serialize_instance, FormatError};
pub use graph::{remove_edges, Edge, EdgeId, Graph, GraphView, VertexId};
pub use instance::{vertex_split_transform, Demand, Instance, InstanceError, Removal, Semantics, VertexSplitMap};
