//! Directed multigraph representation, cut arithmetic, graph I/O, and
//! structural preprocessing.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matching_player::DirectedPerfectMatching;
use crate::rational::{rat_usize, BigRational};

/// A directed multigraph on vertices `0..n`. Parallel arcs and self-loops
/// are permitted; self-loops never appear in any boundary set. Immutable
/// after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl DiGraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        for &(tail, head) in &arcs {
            if tail >= n || head >= n {
                return Err(Error::InvalidNetwork(format!(
                    "arc ({tail}, {head}) out of range for n = {n}"
                )));
            }
        }
        Ok(DiGraph { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Complete bidirected graph: both (u, v) and (v, u) for every pair.
    pub fn complete_bidirected(n: usize) -> Self {
        let mut arcs = Vec::with_capacity(n.saturating_sub(1) * n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    arcs.push((u, v));
                }
            }
        }
        DiGraph { n, arcs }
    }

    /// Directed cycle 0 -> 1 -> ... -> n-1 -> 0.
    pub fn directed_cycle(n: usize) -> Self {
        let arcs = (0..n).map(|i| (i, (i + 1) % n)).collect();
        DiGraph { n, arcs }
    }

    /// Random strongly connected multigraph: a directed Hamiltonian cycle
    /// over a random vertex order plus `extra_arcs` random non-loop arcs.
    pub fn random_strongly_connected(n: usize, extra_arcs: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut arcs: Vec<(usize, usize)> = (0..n)
            .map(|i| (order[i], order[(i + 1) % n]))
            .collect();
        for _ in 0..extra_arcs {
            let tail = rng.random_range(0..n);
            let mut head = rng.random_range(0..n - 1);
            if head >= tail {
                head += 1;
            }
            arcs.push((tail, head));
        }
        DiGraph { n, arcs }
    }

    /// Content digest of the canonical (sorted) arc multiset, used to bind
    /// certificates to graph instances.
    pub fn canonical_hash(&self) -> String {
        let mut sorted = self.arcs.clone();
        sorted.sort_unstable();
        let mut hasher = Sha256::new();
        hasher.update(format!("{} {}\n", self.n, sorted.len()).as_bytes());
        for (tail, head) in sorted {
            hasher.update(format!("{tail} {head}\n").as_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One side of a vertex partition, stored as a sorted vertex list plus a
/// membership bitmap. Always a proper nonempty subset. The stored side is
/// significant: directed expansion is computed for the stored side, not
/// for the canonical orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    n: usize,
    side: Vec<usize>,
    membership: Vec<bool>,
}

impl Cut {
    pub fn new(n: usize, mut side: Vec<usize>) -> Result<Self> {
        if side.is_empty() {
            return Err(Error::InvalidCut("side is empty".into()));
        }
        side.sort_unstable();
        side.dedup();
        if side.len() >= n {
            return Err(Error::InvalidCut(format!(
                "side has {} vertices out of {n}; a cut must be a proper subset",
                side.len()
            )));
        }
        let mut membership = vec![false; n];
        for &v in &side {
            if v >= n {
                return Err(Error::InvalidCut(format!("vertex {v} out of range for n = {n}")));
            }
            membership[v] = true;
        }
        Ok(Cut { n, side, membership })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> &[usize] {
        &self.side
    }

    pub fn size(&self) -> usize {
        self.side.len()
    }

    pub fn complement_size(&self) -> usize {
        self.n - self.side.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.membership[v]
    }

    /// The same partition with the opposite side stored.
    pub fn flipped(&self) -> Cut {
        let side = (0..self.n).filter(|&v| !self.membership[v]).collect();
        Cut::new(self.n, side).expect("complement of a proper subset is proper")
    }

    /// Canonical orientation: the smaller side; on ties, the side
    /// containing vertex 0. Used only where partitions are compared, never
    /// for expansion arithmetic.
    pub fn canonical(&self) -> Cut {
        let smaller = self.size() < self.complement_size()
            || (self.size() == self.complement_size() && self.contains(0));
        if smaller {
            self.clone()
        } else {
            self.flipped()
        }
    }
}

/// Arcs with tail in the cut side and head outside it, with multiplicity.
/// Self-loops never cross.
pub fn out_boundary<'g>(graph: &'g DiGraph, cut: &Cut) -> Vec<(usize, usize)> {
    graph
        .arcs()
        .iter()
        .copied()
        .filter(|&(tail, head)| cut.contains(tail) && !cut.contains(head))
        .collect()
}

/// Directed edge expansion of the stored side:
/// `|out_boundary| / min(|S|, n - |S|)`, exact.
pub fn expansion(graph: &DiGraph, cut: &Cut) -> BigRational {
    let crossing = out_boundary(graph, cut).len();
    let denom = cut.size().min(cut.complement_size());
    rat_usize(crossing, denom)
}

/// If the graph is not strongly connected, returns a sink component of the
/// condensation: a cut with expansion exactly zero. Strongly connected
/// graphs return `None`. Linear time (iterative Tarjan).
pub fn find_zero_expansion_cut(graph: &DiGraph) -> Option<Cut> {
    let components = strongly_connected_components(graph);
    if components.len() <= 1 {
        return None;
    }
    // Tarjan emits components in reverse topological order of the
    // condensation, so the first component has no outgoing arcs.
    let sink = components[0].clone();
    debug_assert!({
        let cut = Cut::new(graph.n(), sink.clone()).unwrap();
        expansion(graph, &cut).is_zero()
    });
    Some(Cut::new(graph.n(), sink).expect("sink component is a proper nonempty subset"))
}

/// Strongly connected components, iterative Tarjan. Components come out in
/// reverse topological order of the condensation.
pub fn strongly_connected_components(graph: &DiGraph) -> Vec<Vec<usize>> {
    let n = graph.n();
    let mut adjacency = vec![Vec::new(); n];
    for &(tail, head) in graph.arcs() {
        adjacency[tail].push(head);
    }

    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    // Explicit DFS frames: (vertex, next adjacency position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = frames.last_mut() {
            if *next < adjacency[v].len() {
                let w = adjacency[v][*next];
                *next += 1;
                if index[w] == UNSET {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Multigraph whose arc multiset is the concatenation of all matching arcs
/// (both directions) from the given rounds.
pub fn union_of_matchings(matchings: &[DirectedPerfectMatching]) -> Result<DiGraph> {
    let Some(first) = matchings.first() else {
        return DiGraph::new(0, Vec::new());
    };
    let n = first.n();
    let mut arcs = Vec::with_capacity(matchings.len() * n);
    for matching in matchings {
        if matching.n() != n {
            return Err(Error::VertexCountMismatch { expected: n, got: matching.n() });
        }
        arcs.extend(matching.arc_pairs());
    }
    DiGraph::new(n, arcs)
}

/// Parses the edge-list text format: a header line `n m` followed by `m`
/// lines `tail head` (0-indexed). `#` comment lines and blank lines are
/// ignored. Errors carry the 1-based line number.
pub fn parse_graph(text: &str) -> Result<DiGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut last_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two fields, got {}", fields.len()),
            });
        }
        let parse_field = |field: &str| -> Result<usize> {
            field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a nonnegative integer: {field:?}"),
            })
        };
        let a = parse_field(fields[0])?;
        let b = parse_field(fields[1])?;
        match header {
            None => header = Some((a, b)),
            Some((n, m)) => {
                if arcs.len() == m {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("more than the declared {m} arcs"),
                    });
                }
                if a >= n || b >= n {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("arc ({a}, {b}) out of range for n = {n}"),
                    });
                }
                arcs.push((a, b));
            }
        }
    }

    let Some((n, m)) = header else {
        return Err(Error::Parse { line: last_line.max(1), message: "missing header line".into() });
    };
    if arcs.len() != m {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: format!("declared {m} arcs but found {}", arcs.len()),
        });
    }
    DiGraph::new(n, arcs)
}

pub fn serialize_graph(graph: &DiGraph) -> String {
    let mut out = format!("{} {}\n", graph.n(), graph.m());
    for &(tail, head) in graph.arcs() {
        out.push_str(&format!("{tail} {head}\n"));
    }
    out
}
