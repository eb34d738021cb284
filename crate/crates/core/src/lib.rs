//! Directed sparsest cut via the cut-matching game.
//!
//! The solver either outputs a directed cut of expansion at most alpha,
//! or certifies a lower bound on every cut's expansion by embedding an
//! expander into the input graph with bounded congestion, using only a
//! polylogarithmic number of single-commodity max-flow computations. A
//! binary search over alpha turns the game into an approximation
//! algorithm, and every emitted certificate is re-checkable from scratch
//! with exact rational arithmetic.

#![forbid(unsafe_code)]

pub mod certify;
pub mod cut_player;
pub mod document;
pub mod error;
pub mod game;
pub mod graph;
pub mod matching_player;
pub mod maxflow;
pub mod rational;

pub use certify::{
    brute_force_sparsest_cut, projection_statistics, verify_cut_certificate,
    verify_double_stochastic, verify_expander_certificate, OracleResult, ProjectionReport,
    Violation,
};
pub use cut_player::{
    median_bisection, replay_walk_projection, sample_orthogonal_unit_vector, Bisection,
    ProjectionVector, WalkMatrix,
};
pub use document::{
    document_from_approx, document_from_game, document_from_json, document_to_json,
    extract_cut_certificate, extract_expander_certificate, CertificateDocument,
};
pub use error::{Error, Result};
pub use game::{
    approximate_sparsest_cut, play_game, ApproxResult, CutCertificate, ExpanderCertificate,
    GameConfig, GameOutcome, GameResult, GameTrace, WalkMode,
};
pub use graph::{
    expansion, find_zero_expansion_cut, out_boundary, parse_graph, serialize_graph,
    union_of_matchings, Cut, DiGraph,
};
pub use matching_player::{
    build_flow_network, find_matching_or_cut, DirectedPerfectMatching, Direction, EmbeddedArc,
    MatchingOutcome,
};
pub use maxflow::{
    cancel_cycles, decompose_paths, max_flow, min_cut, parse_flow_network, FlowArc,
    FlowAssignment, FlowNetwork, FlowPath, MinCut,
};
pub use rational::{format_rational, parse_rational, BigRational};
