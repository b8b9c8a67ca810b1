//! Canonical hypergraph representation, degree and discrepancy computations,
//! graph projection, and the on-disk text format.

mod counts;
mod hypergraph;
mod io;

pub use counts::{discrepancy_counts, hamming_distance, DiscrepancyCounts, OrderCounts};
pub use hypergraph::{binomial, degree_sequence, project_to_graph, DegreeVector, Edge, Hypergraph};
pub use io::{parse_hypergraph, read_hypergraph, serialize_hypergraph, write_hypergraph, ParseReport};
