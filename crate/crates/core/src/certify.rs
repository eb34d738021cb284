//! Independent verification: a brute-force sparsest-cut oracle,
//! certificate re-checking, and the statistical harness for the random
//! projection behavior.
//!
//! Verifiers recompute everything from the graph and the certificate;
//! nothing the solver claims is trusted. Each check failure carries its
//! own verdict code so rejections are scriptable.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cut_player::{apply_round_to_vector, sample_orthogonal_unit_vector, WalkMatrix};
use crate::error::{Error, Result};
use crate::game::{CutCertificate, ExpanderCertificate};
use crate::graph::{expansion, union_of_matchings, Cut, DiGraph};
use crate::rational::{format_rational, rat, rat_usize, BigRational};

/// Hard cap for exhaustive enumeration.
pub const ORACLE_VERTEX_CAP: usize = 20;

/// Largest n at which verifiers brute-force the union-of-matchings
/// expansion.
pub const UNION_BRUTE_FORCE_CAP: usize = 14;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub cut: Cut,
    pub expansion: BigRational,
    /// Number of unordered partitions covered; every proper nonempty side
    /// of each partition is evaluated since expansion is side-specific.
    pub enumerated_partitions: u64,
}

/// Exhaustive minimum of the directed expansion over all proper nonempty
/// vertex subsets. Ties break to the lexicographically smallest sorted
/// side. Rejects n > 20.
pub fn brute_force_sparsest_cut(graph: &DiGraph) -> Result<OracleResult> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidParameter("oracle needs at least two vertices".into()));
    }
    if n > ORACLE_VERTEX_CAP {
        return Err(Error::OracleTooLarge { n, cap: ORACLE_VERTEX_CAP });
    }

    let arcs = graph.arcs();
    let mut best_num = u64::MAX;
    let mut best_den = 1u64;
    let mut best_mask = 0u32;
    for mask in 1u32..((1u32 << n) - 1) {
        let mut crossing = 0u64;
        for &(tail, head) in arcs {
            if mask >> tail & 1 == 1 && mask >> head & 1 == 0 {
                crossing += 1;
            }
        }
        let size = mask.count_ones() as u64;
        let denom = size.min(n as u64 - size);
        // Compare crossing/denom < best_num/best_den by cross
        // multiplication; arc counts stay well inside u64.
        let lhs = crossing * best_den;
        let rhs = best_num.saturating_mul(denom);
        if lhs < rhs || (lhs == rhs && lex_smaller_side(mask, best_mask, n)) {
            best_num = crossing;
            best_den = denom;
            best_mask = mask;
        }
    }

    let side: Vec<usize> = (0..n).filter(|&v| best_mask >> v & 1 == 1).collect();
    Ok(OracleResult {
        cut: Cut::new(n, side)?,
        expansion: rat_usize(best_num as usize, best_den as usize),
        enumerated_partitions: (1u64 << (n - 1)) - 1,
    })
}

fn lex_smaller_side(candidate: u32, incumbent: u32, n: usize) -> bool {
    if incumbent == 0 {
        return true;
    }
    // Sorted vertex lists compare lexicographically; walk ascending vertex
    // ids and the first side containing a vertex the other lacks wins.
    for v in 0..n {
        let a = candidate >> v & 1 == 1;
        let b = incumbent >> v & 1 == 1;
        if a != b {
            return a;
        }
    }
    false
}

/// A rejected certificate, tagged with the failing check's code.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Violation {
    #[error("expansion mismatch: certificate claims {claimed}, recomputed {recomputed}")]
    ExpansionMismatch { claimed: String, recomputed: String },
    #[error("cut expansion {expansion} exceeds alpha {alpha}")]
    AlphaExceeded { expansion: String, alpha: String },
    #[error("matching structure: {0}")]
    MatchingStructure(String),
    #[error("embedding path: {0}")]
    EmbeddingPath(String),
    #[error("congestion: {0}")]
    Congestion(String),
    #[error("walk replay: {0}")]
    WalkReplay(String),
    #[error("mixing: {0}")]
    Mixing(String),
    #[error("union expansion: {0}")]
    UnionExpansion(String),
    #[error("not doubly stochastic: {0}")]
    NotDoublyStochastic(String),
}

impl Violation {
    /// Stable verdict code, one per check.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::ExpansionMismatch { .. } => "expansion-mismatch",
            Violation::AlphaExceeded { .. } => "alpha-exceeded",
            Violation::MatchingStructure(_) => "matching-structure",
            Violation::EmbeddingPath(_) => "embedding-path",
            Violation::Congestion(_) => "congestion",
            Violation::WalkReplay(_) => "walk-replay",
            Violation::Mixing(_) => "mixing",
            Violation::UnionExpansion(_) => "union-expansion",
            Violation::NotDoublyStochastic(_) => "double-stochastic",
        }
    }
}

pub type Verdict = std::result::Result<(), Violation>;

/// Recomputes the cut expansion from scratch and accepts iff it equals
/// the certificate's claim and does not exceed the recorded alpha.
pub fn verify_cut_certificate(graph: &DiGraph, certificate: &CutCertificate) -> Verdict {
    let recomputed = expansion(graph, &certificate.cut);
    if recomputed != certificate.expansion {
        return Err(Violation::ExpansionMismatch {
            claimed: format_rational(&certificate.expansion),
            recomputed: format_rational(&recomputed),
        });
    }
    if certificate.expansion > certificate.alpha_at_failure {
        return Err(Violation::AlphaExceeded {
            expansion: format_rational(&certificate.expansion),
            alpha: format_rational(&certificate.alpha_at_failure),
        });
    }
    Ok(())
}

/// Full expander-certificate verification, in order:
///
/// 1. every round is a perfect directed matching;
/// 2. every embedding path is a directed G-path from its arc's tail to
///    its head;
/// 3. measured embedding load respects the congestion bound (parallel
///    arcs of G pool their budget), and the implied lower bound equals
///    (1/2) / congestion_bound;
/// 4. replaying all matchings through an exact walk matrix keeps it
///    doubly stochastic and reproduces the claimed final potential;
/// 5. the final walk mixes: every entry at least 1/(2n);
/// 6. for n <= 14, the brute-forced expansion of the union of matchings
///    is at least 1/2.
pub fn verify_expander_certificate(graph: &DiGraph, certificate: &ExpanderCertificate) -> Verdict {
    let n = graph.n();
    if certificate.n != n {
        return Err(Violation::MatchingStructure(format!(
            "certificate is for {} vertices, graph has {n}",
            certificate.n
        )));
    }
    if certificate.rounds != certificate.matchings.len() || certificate.rounds == 0 {
        return Err(Violation::MatchingStructure(format!(
            "round count {} does not match {} matchings",
            certificate.rounds,
            certificate.matchings.len()
        )));
    }

    // (1) degree conditions per round.
    for (round, matching) in certificate.matchings.iter().enumerate() {
        if matching.n() != n {
            return Err(Violation::MatchingStructure(format!(
                "round {round} is on {} vertices",
                matching.n()
            )));
        }
        matching
            .check_perfect()
            .map_err(|e| Violation::MatchingStructure(format!("round {round}: {e}")))?;
    }

    // (2) embeddings are G-paths.
    let mut multiplicity: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &arc in graph.arcs() {
        *multiplicity.entry(arc).or_default() += 1;
    }
    for (round, matching) in certificate.matchings.iter().enumerate() {
        for arc in matching.forward.iter().chain(matching.backward.iter()) {
            if arc.path.first() != Some(&arc.tail) || arc.path.last() != Some(&arc.head) {
                return Err(Violation::EmbeddingPath(format!(
                    "round {round}: path for ({}, {}) does not run tail to head",
                    arc.tail, arc.head
                )));
            }
            for hop in arc.path.windows(2) {
                if !multiplicity.contains_key(&(hop[0], hop[1])) {
                    return Err(Violation::EmbeddingPath(format!(
                        "round {round}: hop ({}, {}) is not an arc of the graph",
                        hop[0], hop[1]
                    )));
                }
            }
        }
    }

    // (3) congestion. Embeddings name vertices, so parallel arcs between
    // the same endpoints share their combined budget.
    let mut load: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for matching in &certificate.matchings {
        for arc in matching.forward.iter().chain(matching.backward.iter()) {
            for hop in arc.path.windows(2) {
                *load.entry((hop[0], hop[1])).or_default() += 1;
            }
        }
    }
    for (pair, used) in &load {
        let budget = &certificate.congestion_bound
            * BigRational::from_integer(multiplicity[pair].into());
        if BigRational::from_integer((*used).into()) > budget {
            return Err(Violation::Congestion(format!(
                "load {used} on arc pair {pair:?} exceeds bound {} x multiplicity {}",
                format_rational(&certificate.congestion_bound),
                multiplicity[pair]
            )));
        }
    }
    let expected_bound = rat(1, 2) / &certificate.congestion_bound;
    if certificate.implied_lower_bound != expected_bound {
        return Err(Violation::Congestion(format!(
            "implied lower bound {} is not (1/2)/congestion = {}",
            format_rational(&certificate.implied_lower_bound),
            format_rational(&expected_bound)
        )));
    }

    // (4) exact walk replay.
    let mut walk = WalkMatrix::identity(n);
    for (round, matching) in certificate.matchings.iter().enumerate() {
        walk = walk
            .apply_matching(matching)
            .map_err(|e| Violation::WalkReplay(format!("round {round}: {e}")))?;
        if let Err(v) = verify_double_stochastic(&walk) {
            return Err(Violation::WalkReplay(format!("round {round}: {v}")));
        }
    }
    let final_psi = walk.potential();
    if let Some(claimed) = &certificate.mixing_evidence {
        if &final_psi != claimed {
            return Err(Violation::WalkReplay(format!(
                "claimed final potential {} but replay gives {}",
                format_rational(claimed),
                format_rational(&final_psi)
            )));
        }
        let threshold = rat_usize(1, 4 * n * n);
        if final_psi > threshold {
            return Err(Violation::WalkReplay(format!(
                "final potential {} exceeds the mixing threshold {}",
                format_rational(&final_psi),
                format_rational(&threshold)
            )));
        }
    }

    // (5) mixing. Heuristic certificates (no potential evidence) must
    // pass this too; it is what upgrades them to verified.
    let min_entry = walk.min_entry();
    if min_entry < rat_usize(1, 2 * n) {
        return Err(Violation::Mixing(format!(
            "minimum walk entry {} is below 1/(2n) = {}",
            format_rational(&min_entry),
            format_rational(&rat_usize(1, 2 * n))
        )));
    }

    // (6) union expansion, verified rather than trusted, at desk scale.
    if n <= UNION_BRUTE_FORCE_CAP {
        let union = union_of_matchings(&certificate.matchings)
            .map_err(|e| Violation::MatchingStructure(e.to_string()))?;
        let optimum = brute_force_sparsest_cut(&union)
            .map_err(|e| Violation::UnionExpansion(e.to_string()))?;
        if optimum.expansion < rat(1, 2) {
            return Err(Violation::UnionExpansion(format!(
                "union of matchings has expansion {} below 1/2 at side {:?}",
                format_rational(&optimum.expansion),
                optimum.cut.side()
            )));
        }
    }

    Ok(())
}

/// Exact check of all 2n row/column sums.
pub fn verify_double_stochastic(walk: &WalkMatrix) -> Verdict {
    let n = walk.n();
    let one = BigRational::one();
    for i in 0..n {
        let row: BigRational = (0..n).map(|j| walk.entry(i, j).clone()).sum();
        if row != one {
            return Err(Violation::NotDoublyStochastic(format!(
                "row {i} sums to {}",
                format_rational(&row)
            )));
        }
    }
    for j in 0..n {
        let col: BigRational = (0..n).map(|i| walk.entry(i, j).clone()).sum();
        if col != one {
            return Err(Violation::NotDoublyStochastic(format!(
                "column {j} sums to {}",
                format_rational(&col)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GaussianCheck {
    pub label: String,
    pub expected: f64,
    pub empirical: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone)]
pub struct ProjectionReport {
    pub samples: usize,
    pub gaussian: Vec<GaussianCheck>,
    /// Fraction of draws violating the row-distance bound
    /// |P_i - P_j|^2 >= (n-1)/(C log2 n) * (u_i - u_j)^2 at C = 16.
    pub distance_bound_failure_fraction: f64,
    pub distance_bound_draws: usize,
}

/// The statistical harness: empirical second moments of random
/// projections against |v|^2/(n-1) for a fixed battery of directions, and
/// the failure fraction of the projected-distance inequality over random
/// walk states. C = 16 with base-2 logarithms; both knobs are empirical
/// surrogates, not prescribed constants.
pub fn projection_statistics<R: Rng + ?Sized>(
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<ProjectionReport> {
    if n < 4 {
        return Err(Error::InvalidParameter("projection statistics need n >= 4".into()));
    }
    if samples < 1000 {
        return Err(Error::InvalidParameter("projection statistics need >= 1000 samples".into()));
    }

    let battery = test_vector_battery(n, rng);
    let mut sums = vec![0.0f64; battery.len()];
    for _ in 0..samples {
        let r = sample_orthogonal_unit_vector(n, rng);
        for (slot, (_, v)) in battery.iter().enumerate() {
            let dot: f64 = v.iter().zip(&r).map(|(a, b)| a * b).sum();
            sums[slot] += dot * dot;
        }
    }
    let gaussian = battery
        .iter()
        .zip(&sums)
        .map(|((label, v), sum)| {
            let norm_sq: f64 = v.iter().map(|x| x * x).sum();
            let expected = norm_sq / (n as f64 - 1.0);
            let empirical = sum / samples as f64;
            GaussianCheck {
                label: label.clone(),
                expected,
                empirical,
                relative_error: (empirical - expected).abs() / expected,
            }
        })
        .collect();

    // Random walk states: a handful of random matching sequences, float
    // rows, then fresh directions with one random pair per draw.
    let state_count = 10usize;
    let draws_per_state = samples.div_ceil(10).max(100);
    let c_log = 16.0 * (n as f64).log2();
    let scale = (n as f64 - 1.0) / c_log;
    let mut failures = 0usize;
    let mut draws = 0usize;
    for state in 0..state_count {
        let rounds = 3 + state % 10;
        let pair_rounds: Vec<Vec<(usize, usize)>> =
            (0..rounds).map(|_| random_permutation_pairs(n, rng)).collect();
        let rows = float_walk_rows(n, &pair_rounds);
        for _ in 0..draws_per_state {
            let r = sample_orthogonal_unit_vector(n, rng);
            let mut u = r.clone();
            for pairs in &pair_rounds {
                apply_round_to_vector(&mut u, pairs);
            }
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let dist_sq: f64 =
                rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            let proj_sq = (u[i] - u[j]) * (u[i] - u[j]);
            draws += 1;
            if dist_sq < scale * proj_sq {
                failures += 1;
            }
        }
    }

    Ok(ProjectionReport {
        samples,
        gaussian,
        distance_bound_failure_fraction: failures as f64 / draws as f64,
        distance_bound_draws: draws,
    })
}

fn test_vector_battery<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(String, Vec<f64>)> {
    let mut battery = Vec::new();
    let mut push = |label: &str, mut v: Vec<f64>| {
        // Keep every test vector exactly orthogonal to the all-ones
        // vector; the second-moment identity needs v in the subspace.
        let mean = v.iter().sum::<f64>() / n as f64;
        for x in &mut v {
            *x -= mean;
        }
        battery.push((label.to_string(), v));
    };
    let mut v1 = vec![0.0; n];
    v1[0] = 1.0;
    v1[1] = -1.0;
    push("e0 - e1", v1);
    let mut v2 = vec![0.0; n];
    v2[0] = 1.0;
    v2[1] = 1.0;
    v2[2] = -1.0;
    v2[3] = -1.0;
    push("paired +/-", v2);
    let v3: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    push("alternating", v3);
    let v4: Vec<f64> = (0..n).map(|i| if i == 0 { (n - 1) as f64 } else { -1.0 }).collect();
    push("spike", v4);
    let v5: Vec<f64> = (0..n).map(|_| 10.0 * rng.sample::<f64, _>(StandardNormal)).collect();
    push("random scaled", v5);
    battery
}

pub(crate) fn random_permutation_pairs<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    use rand::seq::SliceRandom;
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    (0..n).map(|i| (i, targets[i])).collect()
}

pub(crate) fn float_walk_rows(n: usize, rounds: &[Vec<(usize, usize)>]) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for pairs in rounds {
        let old = rows.clone();
        for &(i, j) in pairs {
            let updated: Vec<f64> =
                old[i].iter().zip(&old[j]).map(|(a, b)| 0.5 * (a + b)).collect();
            rows[j] = updated;
        }
    }
    rows
}

/// Float view of a rational, for reports only.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{play_game, GameConfig, GameOutcome};
    use crate::matching_player::EmbeddedArc;
    use crate::rational::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn oracle_two_vertex_single_arc() {
        let g = DiGraph::new(2, vec![(0, 1)]).unwrap();
        let result = brute_force_sparsest_cut(&g).unwrap();
        assert_eq!(result.expansion, rat(0, 1));
        assert_eq!(result.cut.side(), &[1]);
        assert_eq!(result.enumerated_partitions, 1);
    }

    #[test]
    fn oracle_directed_cycles() {
        for n in [4usize, 6, 8] {
            let g = DiGraph::directed_cycle(n);
            let result = brute_force_sparsest_cut(&g).unwrap();
            assert_eq!(result.expansion, rat_usize(2, n), "n = {n}");
        }
    }

    #[test]
    fn oracle_complete_bidirected_k4() {
        let g = DiGraph::complete_bidirected(4);
        let result = brute_force_sparsest_cut(&g).unwrap();
        assert_eq!(result.expansion, rat(2, 1));
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let g = DiGraph::directed_cycle(21);
        assert!(matches!(
            brute_force_sparsest_cut(&g),
            Err(Error::OracleTooLarge { n: 21, cap: 20 })
        ));
    }

    #[test]
    fn oracle_is_lower_bound_for_sampled_sides() {
        let g = DiGraph::random_strongly_connected(8, 10, 11);
        let optimum = brute_force_sparsest_cut(&g).unwrap();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let size = rng.random_range(1..8usize);
            let mut vertices: Vec<usize> = (0..8).collect();
            use rand::seq::SliceRandom;
            vertices.shuffle(&mut rng);
            let cut = Cut::new(8, vertices[..size].to_vec()).unwrap();
            assert!(optimum.expansion <= expansion(&g, &cut));
        }
    }

    fn solved_cut_certificate() -> (DiGraph, CutCertificate) {
        let g = DiGraph::directed_cycle(8);
        for seed in 0..50u64 {
            let result = play_game(&g, &GameConfig::new(rat(1, 1), seed)).unwrap();
            if let GameOutcome::Cut(cert) = result.outcome {
                return (g, cert);
            }
        }
        panic!("no seed produced a cut certificate on the 8-cycle");
    }

    fn solved_expander_certificate() -> (DiGraph, ExpanderCertificate) {
        let g = DiGraph::complete_bidirected(8);
        let result = play_game(&g, &GameConfig::new(rat(1, 1), 7)).unwrap();
        let GameOutcome::Expander(cert) = result.outcome else {
            panic!("K8 must certify an expander");
        };
        (g, cert)
    }

    #[test]
    fn accepts_genuine_cut_certificate() {
        let (g, cert) = solved_cut_certificate();
        verify_cut_certificate(&g, &cert).unwrap();
    }

    #[test]
    fn rejects_inflated_cut_expansion() {
        let (g, mut cert) = solved_cut_certificate();
        cert.expansion += rat(1, 7);
        let violation = verify_cut_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "expansion-mismatch");
    }

    #[test]
    fn rejects_cut_beyond_alpha() {
        let (g, mut cert) = solved_cut_certificate();
        cert.alpha_at_failure = &cert.expansion - rat(1, 100);
        let violation = verify_cut_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "alpha-exceeded");
    }

    #[test]
    fn accepts_genuine_expander_certificate() {
        let (g, cert) = solved_expander_certificate();
        verify_expander_certificate(&g, &cert).unwrap();
    }

    #[test]
    fn rejects_missing_matching_arc() {
        let (g, mut cert) = solved_expander_certificate();
        cert.matchings[0].forward.pop();
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "matching-structure");
    }

    #[test]
    fn rejects_rerouted_embedding() {
        let (g, mut cert) = solved_expander_certificate();
        // Splice a vertex repetition the graph cannot support: K8 has no
        // self-loops, so hopping v -> v is not an arc.
        let arc = &mut cert.matchings[0].forward[0];
        let v = arc.path[0];
        arc.path.insert(1, v);
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "embedding-path");
    }

    #[test]
    fn rejects_understated_congestion_bound() {
        let (g, mut cert) = solved_expander_certificate();
        cert.congestion_bound = rat(1, 1000);
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "congestion");
    }

    #[test]
    fn rejects_tampered_lower_bound() {
        let (g, mut cert) = solved_expander_certificate();
        cert.implied_lower_bound = &cert.implied_lower_bound * rat(2, 1);
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "congestion");
    }

    #[test]
    fn rejects_fake_mixing_evidence() {
        let (g, mut cert) = solved_expander_certificate();
        cert.mixing_evidence = Some(rat(1, 10_000_000));
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "walk-replay");
    }

    #[test]
    fn rejects_truncated_matching_sequence() {
        let (g, mut cert) = solved_expander_certificate();
        cert.matchings.pop();
        cert.rounds -= 1;
        // The remaining sequence no longer reproduces the final potential.
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "walk-replay");
    }

    #[test]
    fn rejects_unmixed_heuristic_certificate() {
        // One round on K4: double stochastic but far from mixing. The
        // heuristic certificate must fail post-verification.
        let g = DiGraph::complete_bidirected(4);
        let config = GameConfig {
            alpha: rat(1, 1),
            mode: crate::game::WalkMode::Projected,
            seed: 3,
            round_cap: Some(1),
            potential_threshold: None,
        };
        let result = play_game(&g, &config).unwrap();
        let GameOutcome::Expander(cert) = result.outcome else {
            panic!("projected cap exhaustion must emit a heuristic certificate");
        };
        assert!(cert.mixing_evidence.is_none());
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "mixing");
    }

    #[test]
    fn double_stochastic_accepts_identity_and_replays() {
        verify_double_stochastic(&WalkMatrix::identity(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let n = 6;
            let mut walk = WalkMatrix::identity(n);
            for _ in 0..4 {
                walk = walk.apply_pairs(&random_permutation_pairs(n, &mut rng)).unwrap();
            }
            verify_double_stochastic(&walk).unwrap();
        }
    }

    #[test]
    fn double_stochastic_rejects_perturbed_entry() {
        let mut rows: Vec<Vec<BigRational>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { rat(1, 1) } else { rat(0, 1) }).collect())
            .collect();
        rows[0][1] = rat(1, 100);
        let walk = WalkMatrix::from_rows(rows).unwrap();
        let violation = verify_double_stochastic(&walk).unwrap_err();
        assert_eq!(violation.code(), "double-stochastic");
    }

    #[test]
    fn projection_statistics_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let report = projection_statistics(16, 2000, &mut rng).unwrap();
        assert_eq!(report.gaussian.len(), 5);
        for check in &report.gaussian {
            assert!(check.relative_error < 0.2, "{}: {}", check.label, check.relative_error);
        }
        assert!(report.distance_bound_failure_fraction <= 0.05);
    }

    #[test]
    fn projection_statistics_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(projection_statistics(3, 2000, &mut rng).is_err());
        assert!(projection_statistics(8, 10, &mut rng).is_err());
    }

    #[test]
    fn scaling_a_vector_scales_the_moment_quadratically() {
        // Homogeneity of the second moment, checked through the report.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 16;
        let v: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else if i == 1 { -1.0 } else { 0.0 }).collect();
        let scaled: Vec<f64> = v.iter().map(|x| 10.0 * x).collect();
        let mut mean = 0.0;
        let mut mean_scaled = 0.0;
        let samples = 20_000;
        for _ in 0..samples {
            let r = sample_orthogonal_unit_vector(n, &mut rng);
            let d: f64 = v.iter().zip(&r).map(|(a, b)| a * b).sum();
            let ds: f64 = scaled.iter().zip(&r).map(|(a, b)| a * b).sum();
            mean += d * d;
            mean_scaled += ds * ds;
        }
        assert!((mean_scaled - 100.0 * mean).abs() / mean_scaled < 1e-9);
    }

    #[test]
    fn implied_lower_bound_sound_against_oracle() {
        let g = DiGraph::complete_bidirected(8);
        let (_, cert) = solved_expander_certificate();
        verify_expander_certificate(&g, &cert).unwrap();
        let optimum = brute_force_sparsest_cut(&g).unwrap();
        assert!(cert.implied_lower_bound <= optimum.expansion);
    }

    #[test]
    fn tampered_congestion_survivors_still_fail_structurally() {
        // Deleting an arc and appending a replacement keeps degrees wrong
        // in a different way: tail duplicated.
        let (g, mut cert) = solved_expander_certificate();
        let arc = cert.matchings[0].forward[0].clone();
        cert.matchings[0].forward.push(EmbeddedArc {
            tail: arc.tail,
            head: arc.head,
            path: arc.path,
        });
        let violation = verify_expander_certificate(&g, &cert).unwrap_err();
        assert_eq!(violation.code(), "matching-structure");
    }
}
