//! Integral single-commodity max-flow (blocking-flow / Dinic) with min-cut
//! extraction, flow-cycle cancellation, and unit-path decomposition.
//!
//! Everything here is deterministic given a fixed arc ordering: the solver
//! scans adjacency lists in input order, so identical networks produce
//! identical flow assignments.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub tail: usize,
    pub head: usize,
    pub capacity: u64,
}

/// Integral capacitated network. Capacities are integers; scaling
/// rationals to integers is the caller's job.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<FlowArc>,
    pub source: usize,
    pub sink: usize,
}

impl FlowNetwork {
    pub fn new(node_count: usize, arcs: Vec<FlowArc>, source: usize, sink: usize) -> Result<Self> {
        if source == sink {
            return Err(Error::InvalidNetwork("source equals sink".into()));
        }
        if source >= node_count || sink >= node_count {
            return Err(Error::InvalidNetwork("source or sink out of range".into()));
        }
        for arc in &arcs {
            if arc.tail >= node_count || arc.head >= node_count {
                return Err(Error::InvalidNetwork(format!(
                    "arc ({}, {}) out of range",
                    arc.tail, arc.head
                )));
            }
        }
        Ok(FlowNetwork { node_count, arcs, source, sink })
    }
}

/// A feasible integral flow, stored per original arc in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowAssignment {
    pub flows: Vec<u64>,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    /// Sorted node ids on the source side, always containing the source.
    pub source_side: Vec<usize>,
    pub capacity: u64,
}

/// One unit source-to-sink path from a decomposition: node sequence plus
/// the indices (into `net.arcs`) of the arcs traversed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPath {
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
}

#[derive(Clone, Copy)]
struct ResidualEdge {
    to: usize,
    cap: u64,
    /// Position of the paired reverse edge in `adjacency[to]`.
    rev: usize,
    /// Index of the original arc, or usize::MAX for reverse edges.
    arc: usize,
}

struct Dinic {
    adjacency: Vec<Vec<ResidualEdge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    source: usize,
    sink: usize,
}

impl Dinic {
    fn build(net: &FlowNetwork) -> Self {
        let mut adjacency: Vec<Vec<ResidualEdge>> = vec![Vec::new(); net.node_count];
        for (idx, arc) in net.arcs.iter().enumerate() {
            let fwd_pos = adjacency[arc.tail].len();
            let rev_pos = if arc.tail == arc.head { fwd_pos + 1 } else { adjacency[arc.head].len() };
            adjacency[arc.tail].push(ResidualEdge {
                to: arc.head,
                cap: arc.capacity,
                rev: rev_pos,
                arc: idx,
            });
            adjacency[arc.head].push(ResidualEdge {
                to: arc.tail,
                cap: 0,
                rev: fwd_pos,
                arc: usize::MAX,
            });
        }
        Dinic {
            adjacency,
            level: vec![-1; net.node_count],
            iter: vec![0; net.node_count],
            source: net.source,
            sink: net.sink,
        }
    }

    fn bfs(&mut self) -> bool {
        self.level.fill(-1);
        let mut queue = VecDeque::new();
        self.level[self.source] = 0;
        queue.push_back(self.source);
        while let Some(v) = queue.pop_front() {
            for edge in &self.adjacency[v] {
                if edge.cap > 0 && self.level[edge.to] < 0 {
                    self.level[edge.to] = self.level[v] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        self.level[self.sink] >= 0
    }

    fn dfs(&mut self, v: usize, limit: u64) -> u64 {
        if v == self.sink {
            return limit;
        }
        while self.iter[v] < self.adjacency[v].len() {
            let pos = self.iter[v];
            let edge = self.adjacency[v][pos];
            if edge.cap > 0 && self.level[v] < self.level[edge.to] {
                let pushed = self.dfs(edge.to, limit.min(edge.cap));
                if pushed > 0 {
                    self.adjacency[v][pos].cap -= pushed;
                    self.adjacency[edge.to][edge.rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn run(&mut self) -> u64 {
        let mut value = 0u64;
        while self.bfs() {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(self.source, u64::MAX);
                if pushed == 0 {
                    break;
                }
                value += pushed;
            }
        }
        value
    }
}

/// Maximum integral flow. Zero-capacity networks yield value 0.
pub fn max_flow(net: &FlowNetwork) -> FlowAssignment {
    let mut dinic = Dinic::build(net);
    let value = dinic.run();
    let mut flows = vec![0u64; net.arcs.len()];
    for edges in &dinic.adjacency {
        for edge in edges {
            if edge.arc != usize::MAX {
                flows[edge.arc] = net.arcs[edge.arc].capacity - edge.cap;
            }
        }
    }
    FlowAssignment { flows, value }
}

/// Min cut from a maximum flow: the nodes reachable from the source in the
/// residual network. The capacity of the emitted cut is checked against
/// the flow value; a mismatch signals a `max_flow` bug.
pub fn min_cut(net: &FlowNetwork, flow: &FlowAssignment) -> Result<MinCut> {
    let mut forward = vec![Vec::new(); net.node_count];
    let mut backward = vec![Vec::new(); net.node_count];
    for (idx, arc) in net.arcs.iter().enumerate() {
        forward[arc.tail].push(idx);
        backward[arc.head].push(idx);
    }

    let mut reachable = vec![false; net.node_count];
    reachable[net.source] = true;
    let mut queue = VecDeque::from([net.source]);
    while let Some(v) = queue.pop_front() {
        for &idx in &forward[v] {
            let head = net.arcs[idx].head;
            if !reachable[head] && flow.flows[idx] < net.arcs[idx].capacity {
                reachable[head] = true;
                queue.push_back(head);
            }
        }
        for &idx in &backward[v] {
            let tail = net.arcs[idx].tail;
            if !reachable[tail] && flow.flows[idx] > 0 {
                reachable[tail] = true;
                queue.push_back(tail);
            }
        }
    }

    if reachable[net.sink] {
        return Err(Error::Internal(
            "min_cut called on a non-maximum flow: sink is residually reachable".into(),
        ));
    }
    let capacity: u64 = net
        .arcs
        .iter()
        .filter(|arc| reachable[arc.tail] && !reachable[arc.head])
        .map(|arc| arc.capacity)
        .sum();
    if capacity != flow.value {
        return Err(Error::Internal(format!(
            "max-flow/min-cut duality violated: cut capacity {capacity} vs flow value {}",
            flow.value
        )));
    }
    let source_side = (0..net.node_count).filter(|&v| reachable[v]).collect();
    Ok(MinCut { source_side, capacity })
}

/// Removes all flow circulating on directed cycles. The result has the
/// same value and the same net divergence at every node, and total flow
/// mass never increases.
pub fn cancel_cycles(net: &FlowNetwork, flow: &FlowAssignment) -> FlowAssignment {
    let mut flows = flow.flows.clone();
    let mut adjacency = vec![Vec::new(); net.node_count];
    for (idx, arc) in net.arcs.iter().enumerate() {
        adjacency[arc.tail].push(idx);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }

    // Flows only decrease, so a node proven cycle-free (Black) stays
    // cycle-free; after each cancellation only Gray marks are reset.
    let mut color = vec![Color::White; net.node_count];
    'outer: loop {
        for v in 0..net.node_count {
            if color[v] == Color::Gray {
                color[v] = Color::White;
            }
        }
        for root in 0..net.node_count {
            if color[root] != Color::White {
                continue;
            }
            // Iterative DFS over positive-flow arcs.
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            let mut path_arcs: Vec<usize> = Vec::new();
            color[root] = Color::Gray;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let mut advanced = false;
                while *next < adjacency[v].len() {
                    let arc_idx = adjacency[v][*next];
                    *next += 1;
                    if flows[arc_idx] == 0 {
                        continue;
                    }
                    let head = net.arcs[arc_idx].head;
                    match color[head] {
                        Color::Gray => {
                            // Cycle: the stack suffix from `head` to `v`
                            // plus this closing arc.
                            let mut cycle = vec![arc_idx];
                            if head != v {
                                let pos = stack
                                    .iter()
                                    .position(|&(node, _)| node == head)
                                    .expect("gray node must be on the stack");
                                cycle.extend_from_slice(&path_arcs[pos..]);
                            }
                            let slack = cycle.iter().map(|&a| flows[a]).min().unwrap();
                            debug_assert!(slack > 0);
                            for a in cycle {
                                flows[a] -= slack;
                            }
                            continue 'outer;
                        }
                        Color::White => {
                            color[head] = Color::Gray;
                            path_arcs.push(arc_idx);
                            stack.push((head, 0));
                            advanced = true;
                            break;
                        }
                        Color::Black => {}
                    }
                }
                if !advanced && stack.last().map(|&(node, _)| node) == Some(v) {
                    color[v] = Color::Black;
                    stack.pop();
                    path_arcs.pop();
                }
            }
        }
        break;
    }
    FlowAssignment { flows, value: flow.value }
}

/// Decomposes a cycle-free integral flow into exactly `value` unit
/// source-to-sink paths. Summing unit flows along the returned paths
/// reproduces the assignment arc-for-arc; leftover mass after `value`
/// extractions signals an uncancelled cycle.
pub fn decompose_paths(net: &FlowNetwork, flow: &FlowAssignment) -> Result<Vec<FlowPath>> {
    let mut flows = flow.flows.clone();
    let mut adjacency = vec![Vec::new(); net.node_count];
    for (idx, arc) in net.arcs.iter().enumerate() {
        adjacency[arc.tail].push(idx);
    }
    // Per-node cursor: flows only decrease, so skipping exhausted arcs is
    // permanent-safe and keeps the walk deterministic (arc input order).
    let mut cursor = vec![0usize; net.node_count];

    let mut paths = Vec::with_capacity(flow.value as usize);
    for _ in 0..flow.value {
        let mut nodes = vec![net.source];
        let mut arcs = Vec::new();
        let mut v = net.source;
        while v != net.sink {
            while cursor[v] < adjacency[v].len() && flows[adjacency[v][cursor[v]]] == 0 {
                cursor[v] += 1;
            }
            let Some(&arc_idx) = adjacency[v].get(cursor[v]) else {
                return Err(Error::Internal(format!(
                    "path extraction stuck at node {v}: flow conservation violated"
                )));
            };
            flows[arc_idx] -= 1;
            v = net.arcs[arc_idx].head;
            nodes.push(v);
            arcs.push(arc_idx);
            if arcs.len() > net.arcs.len() {
                return Err(Error::Internal("path longer than arc count: cycle in flow".into()));
            }
        }
        paths.push(FlowPath { nodes, arcs });
    }

    if flows.iter().any(|&f| f > 0) {
        return Err(Error::Internal(
            "residual flow mass after extracting all paths: uncancelled cycle".into(),
        ));
    }
    Ok(paths)
}

/// Parses the flow-network text format: `n m`, then a `s t` line naming
/// source and sink, then `m` lines `tail head capacity`. `#` comments and
/// blank lines are ignored.
pub fn parse_flow_network(text: &str) -> Result<FlowNetwork> {
    let mut header: Option<(usize, usize)> = None;
    let mut endpoints: Option<(usize, usize)> = None;
    let mut arcs: Vec<FlowArc> = Vec::new();
    let mut last_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_field = |field: &str| -> Result<u64> {
            field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a nonnegative integer: {field:?}"),
            })
        };
        match (&header, &endpoints) {
            (None, _) | (_, None) if fields.len() != 2 => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected two fields, got {}", fields.len()),
                });
            }
            (None, _) => {
                header = Some((parse_field(fields[0])? as usize, parse_field(fields[1])? as usize));
            }
            (_, None) => {
                endpoints =
                    Some((parse_field(fields[0])? as usize, parse_field(fields[1])? as usize));
            }
            (Some((n, m)), Some(_)) => {
                if fields.len() != 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected three fields, got {}", fields.len()),
                    });
                }
                if arcs.len() == *m {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("more than the declared {m} arcs"),
                    });
                }
                let tail = parse_field(fields[0])? as usize;
                let head = parse_field(fields[1])? as usize;
                let capacity = parse_field(fields[2])?;
                if tail >= *n || head >= *n {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("arc ({tail}, {head}) out of range for n = {n}"),
                    });
                }
                arcs.push(FlowArc { tail, head, capacity });
            }
        }
    }

    let (Some((n, m)), Some((source, sink))) = (header, endpoints) else {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: "missing header or source/sink line".into(),
        });
    };
    if arcs.len() != m {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: format!("declared {m} arcs but found {}", arcs.len()),
        });
    }
    if source >= n || sink >= n {
        return Err(Error::Parse { line: 1, message: "source or sink out of range".into() });
    }
    FlowNetwork::new(n, arcs, source, sink)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive min-cut over all source/sink-separating node sets.
    /// Independent of the flow solver; usable up to n around 10.
    pub fn brute_force_min_cut(net: &FlowNetwork) -> u64 {
        let free: Vec<usize> =
            (0..net.node_count).filter(|&v| v != net.source && v != net.sink).collect();
        let mut best = u64::MAX;
        for mask in 0..(1u64 << free.len()) {
            let mut side = vec![false; net.node_count];
            side[net.source] = true;
            for (bit, &v) in free.iter().enumerate() {
                side[v] = mask >> bit & 1 == 1;
            }
            let capacity: u64 = net
                .arcs
                .iter()
                .filter(|arc| side[arc.tail] && !side[arc.head])
                .map(|arc| arc.capacity)
                .sum();
            best = best.min(capacity);
        }
        best
    }

    pub fn random_network(seed: u64, max_nodes: usize, max_cap: u64) -> FlowNetwork {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=max_nodes);
        let m = rng.random_range(1..=(3 * n));
        let arcs = (0..m)
            .map(|_| FlowArc {
                tail: rng.random_range(0..n),
                head: rng.random_range(0..n),
                capacity: rng.random_range(0..=max_cap),
            })
            .collect();
        let source = 0;
        let sink = n - 1;
        FlowNetwork::new(n, arcs, source, sink).unwrap()
    }
}
