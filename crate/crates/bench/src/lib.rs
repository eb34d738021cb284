//! Benchmark instance generators shared by the criterion targets.

use cutmatch::graph::DiGraph;
use cutmatch::matching_player::{build_flow_network, Direction};
use cutmatch::maxflow::FlowNetwork;
use cutmatch::rational::rat;
use cutmatch::Cut;

/// The forward bisection network of a complete bidirected graph, the
/// densest per-round flow instance the solver produces.
pub fn complete_round_network(n: usize) -> FlowNetwork {
    let graph = DiGraph::complete_bidirected(n);
    let side = Cut::new(n, (0..n / 2).collect()).unwrap();
    build_flow_network(&graph, &side, Direction::Forward, &rat(1, 1)).unwrap()
}

pub fn random_instance(n: usize, seed: u64) -> DiGraph {
    DiGraph::random_strongly_connected(n, 3 * n, seed)
}
