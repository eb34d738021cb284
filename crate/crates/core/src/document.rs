//! The on-disk certificate document: a self-contained, versioned JSON
//! record binding a solver result to a graph instance by content hash.
//! All rationals serialize as exact "num/den" strings, never floats, so
//! identical runs produce byte-identical documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    ApproxResult, CutCertificate, ExpanderCertificate, GameConfig, GameResult, WalkMode,
};
use crate::graph::{Cut, DiGraph};
use crate::matching_player::{DirectedPerfectMatching, EmbeddedArc};
use crate::rational::{format_rational, parse_rational, BigRational};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema_version: u32,
    pub graph_hash: String,
    /// "cut" | "expander" | "inconclusive".
    pub result: String,
    pub cut: Option<CutPayload>,
    pub expander: Option<ExpanderPayload>,
    pub trace: TracePayload,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPayload {
    pub side: Vec<usize>,
    pub expansion: String,
    pub alpha: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderPayload {
    pub rounds: usize,
    pub matchings: Vec<MatchingPayload>,
    pub congestion_bound: String,
    pub final_psi: Option<String>,
    pub implied_lower_bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingPayload {
    pub forward: Vec<ArcPayload>,
    pub backward: Vec<ArcPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPayload {
    pub tail: usize,
    pub head: usize,
    /// Embedding as a vertex sequence from tail to head.
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePayload {
    pub initial_psi: Option<String>,
    pub rounds: Vec<RoundPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundPayload {
    pub bisection: Vec<usize>,
    pub forward_flow: u64,
    pub backward_flow: Option<u64>,
    pub psi: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub alpha: String,
    pub mode: String,
    pub seed: u64,
    pub round_cap: usize,
}

fn cut_payload(certificate: &CutCertificate) -> CutPayload {
    CutPayload {
        side: certificate.cut.side().to_vec(),
        expansion: format_rational(&certificate.expansion),
        alpha: format_rational(&certificate.alpha_at_failure),
    }
}

fn expander_payload(certificate: &ExpanderCertificate) -> ExpanderPayload {
    ExpanderPayload {
        rounds: certificate.rounds,
        matchings: certificate
            .matchings
            .iter()
            .map(|m| MatchingPayload {
                forward: m.forward.iter().map(arc_payload).collect(),
                backward: m.backward.iter().map(arc_payload).collect(),
            })
            .collect(),
        congestion_bound: format_rational(&certificate.congestion_bound),
        final_psi: certificate.mixing_evidence.as_ref().map(format_rational),
        implied_lower_bound: format_rational(&certificate.implied_lower_bound),
    }
}

fn arc_payload(arc: &EmbeddedArc) -> ArcPayload {
    ArcPayload { tail: arc.tail, head: arc.head, path: arc.path.clone() }
}

fn trace_payload(result: &GameResult) -> TracePayload {
    TracePayload {
        initial_psi: result.trace.initial_psi.as_ref().map(format_rational),
        rounds: result
            .trace
            .rounds
            .iter()
            .map(|round| RoundPayload {
                bisection: round.bisection.clone(),
                forward_flow: round.forward_flow,
                backward_flow: round.backward_flow,
                psi: round.psi.as_ref().map(format_rational),
            })
            .collect(),
    }
}

/// Document for a single fixed-alpha game.
pub fn document_from_game(
    graph: &DiGraph,
    config: &GameConfig,
    result: &GameResult,
) -> CertificateDocument {
    use crate::game::GameOutcome;
    let (cut, expander) = match &result.outcome {
        GameOutcome::Cut(c) => (Some(cut_payload(c)), None),
        GameOutcome::Expander(e) => (None, Some(expander_payload(e))),
        GameOutcome::Inconclusive => (None, None),
    };
    CertificateDocument {
        schema_version: SCHEMA_VERSION,
        graph_hash: graph.canonical_hash(),
        result: result.outcome.branch_name().to_string(),
        cut,
        expander,
        trace: trace_payload(result),
        config: ConfigEcho {
            alpha: format_rational(&config.alpha),
            mode: config.mode.as_str().to_string(),
            seed: config.seed,
            round_cap: config.resolved_round_cap(graph.n()),
        },
    }
}

/// Document for a binary-search run: the best cut is the result, and the
/// best certified lower bound rides along in the expander payload when a
/// probe produced one. The trace is per-game, so it stays empty here.
pub fn document_from_approx(
    graph: &DiGraph,
    seed: u64,
    mode: WalkMode,
    approx: &ApproxResult,
) -> CertificateDocument {
    CertificateDocument {
        schema_version: SCHEMA_VERSION,
        graph_hash: graph.canonical_hash(),
        result: "cut".to_string(),
        cut: Some(cut_payload(&approx.best_cut)),
        expander: approx.best_lower_bound.as_ref().map(expander_payload),
        trace: TracePayload { initial_psi: None, rounds: Vec::new() },
        config: ConfigEcho {
            alpha: format_rational(&approx.best_cut.alpha_at_failure),
            mode: mode.as_str().to_string(),
            seed,
            round_cap: GameConfig::default_round_cap(graph.n()),
        },
    }
}

pub fn document_to_json(document: &CertificateDocument) -> String {
    let mut text = serde_json::to_string_pretty(document).expect("document serializes");
    text.push('\n');
    text
}

pub fn document_from_json(text: &str) -> Result<CertificateDocument> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), message: format!("bad certificate JSON: {e}") })
}

/// Rebuilds the cut certificate for verification. `n` comes from the
/// graph the document will be checked against.
pub fn extract_cut_certificate(
    document: &CertificateDocument,
    n: usize,
) -> Result<Option<CutCertificate>> {
    let Some(payload) = &document.cut else {
        return Ok(None);
    };
    Ok(Some(CutCertificate {
        cut: Cut::new(n, payload.side.clone())?,
        expansion: parse_rational(&payload.expansion)?,
        alpha_at_failure: parse_rational(&payload.alpha)?,
    }))
}

pub fn extract_expander_certificate(
    document: &CertificateDocument,
    n: usize,
) -> Result<Option<ExpanderCertificate>> {
    let Some(payload) = &document.expander else {
        return Ok(None);
    };
    let mut matchings = Vec::with_capacity(payload.matchings.len());
    for round in &payload.matchings {
        let build = |arcs: &[ArcPayload]| -> Vec<EmbeddedArc> {
            arcs.iter()
                .map(|a| EmbeddedArc { tail: a.tail, head: a.head, path: a.path.clone() })
                .collect()
        };
        matchings.push(DirectedPerfectMatching::new(
            n,
            build(&round.forward),
            build(&round.backward),
        )?);
    }
    let mixing_evidence: Option<BigRational> = match &payload.final_psi {
        Some(text) => Some(parse_rational(text)?),
        None => None,
    };
    Ok(Some(ExpanderCertificate {
        n,
        matchings,
        rounds: payload.rounds,
        congestion_bound: parse_rational(&payload.congestion_bound)?,
        mixing_evidence,
        implied_lower_bound: parse_rational(&payload.implied_lower_bound)?,
    }))
}
