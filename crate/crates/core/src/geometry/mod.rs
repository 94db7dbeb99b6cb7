//! Graph approximations of self-similar fractals and their products.

mod boundary;
mod graph;
mod metric;
mod spec;

pub use boundary::{boundary_r_neighborhood, minkowski_content, r_neighborhood};
pub use graph::{
    build_graph, effective_resistance, product_graph, projected_vertex_count, renormalization_factor,
    ApproxGraph, DEFAULT_VERTEX_CAP,
};
pub use metric::{bfs_hops, BallScratch, MetricOracle, HOP_TABLE_CAP};
pub use spec::{build_spec, carpet_topological_hausdorff_dim, FractalKind, FractalSpec};
