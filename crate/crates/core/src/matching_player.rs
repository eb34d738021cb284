//! The matching player: given a bisection, either return a perfect
//! directed matching embeddable in the input graph with bounded
//! congestion, or a cut of expansion at most alpha.
//!
//! Each round builds two flow networks over G (one per direction). A
//! matching arc is never an arc of G; it is *embedded*, carrying the
//! G-path that routes its unit of flow.

use crate::error::{Error, Result};
use crate::graph::{expansion, Cut, DiGraph};
use crate::maxflow::{
    cancel_cycles, decompose_paths, max_flow, min_cut, FlowArc, FlowNetwork,
};
use crate::rational::{ceil_reciprocal, format_rational, BigRational};

/// One matching arc together with the G-path (vertex sequence) that
/// embeds its unit flow: `path[0] == tail`, `path.last() == head`, and
/// every consecutive pair is an arc of G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedArc {
    pub tail: usize,
    pub head: usize,
    pub path: Vec<usize>,
}

/// A round's matching M = forward ∪ backward. Forward arcs go from the
/// bisection side S to its complement, backward arcs the other way, and
/// every vertex ends up with in-degree and out-degree exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedPerfectMatching {
    n: usize,
    pub forward: Vec<EmbeddedArc>,
    pub backward: Vec<EmbeddedArc>,
}

impl DirectedPerfectMatching {
    /// Assembles a matching and checks the perfect-degree conditions.
    pub fn new(n: usize, mut forward: Vec<EmbeddedArc>, mut backward: Vec<EmbeddedArc>) -> Result<Self> {
        forward.sort_by_key(|arc| arc.tail);
        backward.sort_by_key(|arc| arc.tail);
        let matching = DirectedPerfectMatching { n, forward, backward };
        matching.check_perfect()?;
        Ok(matching)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All matching arcs as (tail, head) pairs, forward first.
    pub fn arc_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward
            .iter()
            .chain(self.backward.iter())
            .map(|arc| (arc.tail, arc.head))
    }

    /// Every vertex must have in-degree and out-degree exactly one over
    /// forward ∪ backward.
    pub fn check_perfect(&self) -> Result<()> {
        let mut out_degree = vec![0usize; self.n];
        let mut in_degree = vec![0usize; self.n];
        for (tail, head) in self.arc_pairs() {
            if tail >= self.n || head >= self.n {
                return Err(Error::NotPerfectMatching(format!(
                    "arc ({tail}, {head}) out of range for n = {}",
                    self.n
                )));
            }
            out_degree[tail] += 1;
            in_degree[head] += 1;
        }
        for v in 0..self.n {
            if out_degree[v] != 1 || in_degree[v] != 1 {
                return Err(Error::NotPerfectMatching(format!(
                    "vertex {v} has out-degree {} and in-degree {}",
                    out_degree[v], in_degree[v]
                )));
            }
        }
        Ok(())
    }
}

/// Which directional network a round is building.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Routes one unit from every vertex of S to the complement.
    Forward,
    /// Routes one unit from every complement vertex back into S.
    Backward,
}

/// The per-round result: either a matching with embeddings, or a cut
/// whose exact expansion is at most the round's alpha (checked at
/// construction, never trusted).
#[derive(Debug, Clone)]
pub enum MatchingOutcome {
    Matching(DirectedPerfectMatching),
    Cut { cut: Cut, expansion: BigRational },
}

/// Outcome plus instrumentation for the round.
#[derive(Debug, Clone)]
pub struct MatchingSearch {
    pub outcome: MatchingOutcome,
    pub maxflow_calls: usize,
    pub forward_value: u64,
    pub backward_value: Option<u64>,
}

/// Builds the directional flow network: a super-source with capacity-1
/// arcs to every origin-side vertex, capacity-1 arcs from every
/// destination-side vertex to a super-sink, and every arc of G (original
/// orientation in both directions' networks) with capacity ceil(1/alpha).
///
/// Nodes 0..n are G's vertices, node n the source, node n+1 the sink, so
/// the network has n+2 nodes and m+n arcs.
pub fn build_flow_network(
    graph: &DiGraph,
    side: &Cut,
    direction: Direction,
    alpha: &BigRational,
) -> Result<FlowNetwork> {
    let n = graph.n();
    let arc_capacity = ceil_reciprocal(alpha)?;
    let source = n;
    let sink = n + 1;

    let origin_side = |v: usize| match direction {
        Direction::Forward => side.contains(v),
        Direction::Backward => !side.contains(v),
    };

    let mut arcs = Vec::with_capacity(graph.m() + n);
    for v in 0..n {
        if origin_side(v) {
            arcs.push(FlowArc { tail: source, head: v, capacity: 1 });
        }
    }
    for v in 0..n {
        if !origin_side(v) {
            arcs.push(FlowArc { tail: v, head: sink, capacity: 1 });
        }
    }
    for &(tail, head) in graph.arcs() {
        arcs.push(FlowArc { tail, head, capacity: arc_capacity });
    }
    FlowNetwork::new(n + 2, arcs, source, sink)
}

/// Runs one round of the matching player on bisection side `side`.
///
/// The forward network is solved first. A forward flow below n/2 yields
/// the cut branch (and the backward network is not solved); otherwise the
/// backward network is solved, and a backward shortfall yields the cut
/// branch from that network. Both directions at value n/2 yield the
/// matching branch with embeddings from the path decompositions.
pub fn find_matching_or_cut(
    graph: &DiGraph,
    side: &Cut,
    alpha: &BigRational,
) -> Result<MatchingSearch> {
    let n = graph.n();
    if n < 2 || n % 2 != 0 {
        return Err(Error::OddVertexCount(n));
    }
    if side.size() != n / 2 {
        return Err(Error::InvalidParameter(format!(
            "bisection side has {} vertices, expected {}",
            side.size(),
            n / 2
        )));
    }
    let target = (n / 2) as u64;
    let arc_capacity = ceil_reciprocal(alpha)?;

    let forward_net = build_flow_network(graph, side, Direction::Forward, alpha)?;
    let forward_flow = max_flow(&forward_net);
    if forward_flow.value > target {
        return Err(Error::Internal(format!(
            "forward flow {} exceeds source capacity {target}",
            forward_flow.value
        )));
    }
    if forward_flow.value < target {
        let cut = cut_from_failed_flow(graph, &forward_net, &forward_flow, alpha)?;
        return Ok(MatchingSearch {
            outcome: cut,
            maxflow_calls: 1,
            forward_value: forward_flow.value,
            backward_value: None,
        });
    }

    let backward_net = build_flow_network(graph, side, Direction::Backward, alpha)?;
    let backward_flow = max_flow(&backward_net);
    if backward_flow.value > target {
        return Err(Error::Internal(format!(
            "backward flow {} exceeds source capacity {target}",
            backward_flow.value
        )));
    }
    if backward_flow.value < target {
        let cut = cut_from_failed_flow(graph, &backward_net, &backward_flow, alpha)?;
        return Ok(MatchingSearch {
            outcome: cut,
            maxflow_calls: 2,
            forward_value: forward_flow.value,
            backward_value: Some(backward_flow.value),
        });
    }

    let forward_arcs = matching_arcs_from_flow(graph, &forward_net, &forward_flow, arc_capacity)?;
    let backward_arcs = matching_arcs_from_flow(graph, &backward_net, &backward_flow, arc_capacity)?;
    let matching = DirectedPerfectMatching::new(n, forward_arcs, backward_arcs)
        .map_err(|e| Error::Internal(format!("flow decomposition produced a bad matching: {e}")))?;

    Ok(MatchingSearch {
        outcome: MatchingOutcome::Matching(matching),
        maxflow_calls: 2,
        forward_value: forward_flow.value,
        backward_value: Some(backward_flow.value),
    })
}

/// The failed-flow cut: G-vertices on the source side of the min cut. Its
/// expansion is guaranteed at most alpha; the guarantee is re-verified
/// with exact arithmetic and a violation aborts the run as a solver bug.
fn cut_from_failed_flow(
    graph: &DiGraph,
    net: &FlowNetwork,
    flow: &crate::maxflow::FlowAssignment,
    alpha: &BigRational,
) -> Result<MatchingOutcome> {
    let n = graph.n();
    let cut_nodes = min_cut(net, flow)?;
    let side: Vec<usize> = cut_nodes.source_side.iter().copied().filter(|&v| v < n).collect();
    if side.is_empty() || side.len() >= n {
        return Err(Error::Internal(format!(
            "degenerate min-cut shore with {} of {} vertices",
            side.len(),
            n
        )));
    }
    let cut = Cut::new(n, side)?;
    let value = expansion(graph, &cut);
    if &value > alpha {
        return Err(Error::Internal(format!(
            "failed-flow cut has expansion {} exceeding alpha {}",
            format_rational(&value),
            format_rational(alpha)
        )));
    }
    Ok(MatchingOutcome::Cut { cut, expansion: value })
}

/// Turns a successful directional flow into matching arcs: cancel cycles,
/// decompose into unit paths, and read each path as source -> tail ->
/// (G-path) -> head -> sink. Per-arc embedding load is re-measured against
/// ceil(1/alpha) even though the capacities already enforce it.
fn matching_arcs_from_flow(
    graph: &DiGraph,
    net: &FlowNetwork,
    flow: &crate::maxflow::FlowAssignment,
    arc_capacity: u64,
) -> Result<Vec<EmbeddedArc>> {
    let n = graph.n();
    let cancelled = cancel_cycles(net, flow);
    let paths = decompose_paths(net, &cancelled)?;

    let mut arc_load = vec![0u64; graph.m()];
    let mut arcs = Vec::with_capacity(paths.len());
    for path in &paths {
        if path.nodes.len() < 4 {
            return Err(Error::Internal("decomposed path too short to embed".into()));
        }
        let tail = path.nodes[1];
        let head = path.nodes[path.nodes.len() - 2];
        let g_path = path.nodes[1..path.nodes.len() - 1].to_vec();
        for &net_arc in &path.arcs[1..path.arcs.len() - 1] {
            // G arcs sit after the n source/sink arcs, in input order.
            let g_arc = net_arc.checked_sub(n).ok_or_else(|| {
                Error::Internal("embedding path uses a source/sink arc internally".into())
            })?;
            arc_load[g_arc] += 1;
        }
        arcs.push(EmbeddedArc { tail, head, path: g_path });
    }
    if let Some((g_arc, &load)) = arc_load.iter().enumerate().find(|&(_, &l)| l > arc_capacity) {
        return Err(Error::Internal(format!(
            "embedding load {load} on arc {g_arc} exceeds per-direction bound {arc_capacity}"
        )));
    }
    Ok(arcs)
}
