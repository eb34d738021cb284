//! Command-line entry point. Exit codes are a scriptable contract:
//! 0 success, 1 input error, 2 inconclusive solve, 3 verification reject.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cutmatch::certify::{
    brute_force_sparsest_cut, rational_to_f64, verify_cut_certificate,
    verify_expander_certificate,
};
use cutmatch::document::{
    document_from_approx, document_from_game, document_from_json, document_to_json,
    extract_cut_certificate, extract_expander_certificate, CertificateDocument,
};
use cutmatch::game::{
    approximate_sparsest_cut, play_game, CutCertificate, GameConfig, GameOutcome, WalkMode,
};
use cutmatch::graph::{find_zero_expansion_cut, parse_graph, DiGraph};
use cutmatch::maxflow::{max_flow, min_cut, parse_flow_network};
use cutmatch::rational::{format_rational, parse_rational, BigRational};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_REJECT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cutmatch",
    about = "Directed sparsest cut via the cut-matching game",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Projected,
}

impl From<ModeArg> for WalkMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Exact => WalkMode::Exact,
            ModeArg::Projected => WalkMode::Projected,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance: emit a cut or an expander certificate.
    Solve {
        /// Graph file in edge-list format ("n m" header, then arcs).
        graph: PathBuf,
        /// Game parameter as an exact rational ("1/2", "0.25", "3").
        #[arg(long, conflicts_with = "auto")]
        alpha: Option<String>,
        /// Binary-search alpha for an approximate sparsest cut.
        #[arg(long)]
        auto: bool,
        /// The only entropy source; identical seeds reproduce runs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exact mode tracks the walk matrix and certifies mixing;
        /// projected mode scales further but yields heuristic expander
        /// certificates until verified.
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Override the default cap of ceil(10 * log2(n)^2) rounds.
        #[arg(long)]
        round_cap: Option<usize>,
        /// Write the certificate document here; without it the JSON goes
        /// to stdout and the summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force the exact sparsest cut (n <= 20).
    Oracle { graph: PathBuf },
    /// Re-check a certificate document against its graph.
    Verify { graph: PathBuf, certificate: PathBuf },
    /// Run max-flow/min-cut on a network file ("n m", "s t", then
    /// "tail head capacity" lines).
    Flow { network: PathBuf },
    /// Built-in benchmark table over generated instances.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Alpha for the per-row timed game.
        #[arg(long, default_value = "1/1")]
        alpha: String,
    },
}

fn main() -> ExitCode {
    // Flag errors must exit 1, not clap's default 2, which is reserved
    // for inconclusive solves.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Solve { graph, alpha, auto, seed, mode, round_cap, out } => {
            cmd_solve(&graph, alpha.as_deref(), auto, seed, mode.into(), round_cap, out.as_deref())
        }
        Command::Oracle { graph } => cmd_oracle(&graph),
        Command::Verify { graph, certificate } => cmd_verify(&graph, &certificate),
        Command::Flow { network } => cmd_flow(&network),
        Command::Bench { seed, alpha } => cmd_bench(seed, &alpha),
    }
}

fn load_graph(path: &Path) -> Result<DiGraph, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit_document(
    document: &CertificateDocument,
    summary: &str,
    out: Option<&Path>,
) -> Result<(), String> {
    let json = document_to_json(document);
    match out {
        Some(path) => {
            fs::write(path, json).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            println!("{summary}");
        }
        None => {
            print!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_solve(
    graph_path: &Path,
    alpha: Option<&str>,
    auto: bool,
    seed: u64,
    mode: WalkMode,
    round_cap: Option<usize>,
    out: Option<&Path>,
) -> Result<u8, String> {
    if auto == alpha.is_some() {
        return Err("pass exactly one of --alpha or --auto".into());
    }
    let graph = load_graph(graph_path)?;

    if auto {
        let result = approximate_sparsest_cut(&graph, seed, mode).map_err(|e| e.to_string())?;
        let document = document_from_approx(&graph, seed, mode, &result);
        let lower = match &result.best_lower_bound {
            Some(cert) => format!(
                "lower bound {}{}",
                format_rational(&cert.implied_lower_bound),
                if cert.mixing_evidence.is_some() { "" } else { " (heuristic)" }
            ),
            None => "no lower bound".to_string(),
        };
        let ratio = match &result.ratio {
            Some(r) => format!(", ratio {}", format_rational(r)),
            None => String::new(),
        };
        let summary = format!(
            "cut: expansion {} on side of {} vertices; {}{}; {} probes",
            format_rational(&result.best_cut.expansion),
            result.best_cut.cut.size(),
            lower,
            ratio,
            result.probes.len()
        );
        emit_document(&document, &summary, out)?;
        return Ok(EXIT_OK);
    }

    let alpha = parse_positive_rational(alpha.expect("validated above"))?;
    let mut config = GameConfig::new(alpha, seed);
    config.mode = mode;
    config.round_cap = round_cap;

    // Strong-connectivity pre-pass: a sink component is already a cut of
    // expansion zero, no game needed.
    if let Some(cut) = find_zero_expansion_cut(&graph) {
        let certificate = CutCertificate {
            cut,
            expansion: BigRational::from_integer(0.into()),
            alpha_at_failure: config.alpha.clone(),
        };
        let result = cutmatch::game::GameResult {
            outcome: GameOutcome::Cut(certificate.clone()),
            matchings: vec![],
            trace: cutmatch::game::GameTrace {
                initial_psi: None,
                rounds: vec![],
                maxflow_calls: 0,
            },
        };
        let document = document_from_game(&graph, &config, &result);
        let summary = format!(
            "cut: expansion 0/1 on side of {} vertices (graph is not strongly connected)",
            certificate.cut.size()
        );
        emit_document(&document, &summary, out)?;
        return Ok(EXIT_OK);
    }

    let result = play_game(&graph, &config).map_err(|e| e.to_string())?;
    let document = document_from_game(&graph, &config, &result);
    let (summary, code) = match &result.outcome {
        GameOutcome::Cut(cert) => (
            format!(
                "cut: expansion {} (alpha {}) on side of {} vertices after {} rounds",
                format_rational(&cert.expansion),
                format_rational(&cert.alpha_at_failure),
                cert.cut.size(),
                result.trace.rounds.len()
            ),
            EXIT_OK,
        ),
        GameOutcome::Expander(cert) => (
            format!(
                "expander: lower bound {} from {} rounds, congestion {}{}",
                format_rational(&cert.implied_lower_bound),
                cert.rounds,
                format_rational(&cert.congestion_bound),
                match &cert.mixing_evidence {
                    Some(psi) => format!(", final potential {}", format_rational(psi)),
                    None => " (heuristic: run verify to confirm mixing)".to_string(),
                }
            ),
            EXIT_OK,
        ),
        GameOutcome::Inconclusive => (
            format!(
                "inconclusive: round cap {} reached without mixing",
                config.resolved_round_cap(graph.n())
            ),
            EXIT_INCONCLUSIVE,
        ),
    };
    emit_document(&document, &summary, out)?;
    Ok(code)
}

fn parse_positive_rational(text: &str) -> Result<BigRational, String> {
    let value = parse_rational(text).map_err(|e| e.to_string())?;
    if value <= BigRational::from_integer(0.into()) {
        return Err(format!("alpha must be positive, got {text}"));
    }
    Ok(value)
}

fn cmd_oracle(graph_path: &Path) -> Result<u8, String> {
    let graph = load_graph(graph_path)?;
    let result = brute_force_sparsest_cut(&graph).map_err(|e| e.to_string())?;
    println!("OPT = {}", format_rational(&result.expansion));
    println!("side = {:?}", result.cut.side());
    Ok(EXIT_OK)
}

fn cmd_verify(graph_path: &Path, certificate_path: &Path) -> Result<u8, String> {
    let graph = load_graph(graph_path)?;
    let text = fs::read_to_string(certificate_path)
        .map_err(|e| format!("cannot read {}: {e}", certificate_path.display()))?;
    let document = document_from_json(&text).map_err(|e| e.to_string())?;

    if document.graph_hash != graph.canonical_hash() {
        return Err(format!(
            "graph hash mismatch: certificate is for {}, graph hashes to {}",
            document.graph_hash,
            graph.canonical_hash()
        ));
    }

    let cut = extract_cut_certificate(&document, graph.n()).map_err(|e| e.to_string())?;
    let expander = extract_expander_certificate(&document, graph.n());
    // A malformed expander payload (e.g. broken matchings) is a rejection,
    // not an input error: the hash already proved it targets this graph.
    let expander = match expander {
        Ok(value) => value,
        Err(e) => {
            println!("REJECT matching-structure: {e}");
            return Ok(EXIT_REJECT);
        }
    };

    if cut.is_none() && expander.is_none() {
        println!("ACCEPT (inconclusive document: nothing to verify)");
        return Ok(EXIT_OK);
    }
    if let Some(certificate) = &cut {
        if let Err(violation) = verify_cut_certificate(&graph, certificate) {
            println!("REJECT {}: {violation}", violation.code());
            return Ok(EXIT_REJECT);
        }
    }
    if let Some(certificate) = &expander {
        if let Err(violation) = verify_expander_certificate(&graph, certificate) {
            println!("REJECT {}: {violation}", violation.code());
            return Ok(EXIT_REJECT);
        }
    }
    println!("ACCEPT");
    Ok(EXIT_OK)
}

fn cmd_flow(network_path: &Path) -> Result<u8, String> {
    let text = fs::read_to_string(network_path)
        .map_err(|e| format!("cannot read {}: {e}", network_path.display()))?;
    let network = parse_flow_network(&text).map_err(|e| e.to_string())?;
    let flow = max_flow(&network);
    let cut = min_cut(&network, &flow).map_err(|e| e.to_string())?;
    println!("max flow = {}", flow.value);
    println!("min cut source side = {:?} capacity = {}", cut.source_side, cut.capacity);
    Ok(EXIT_OK)
}

fn cmd_bench(seed: u64, alpha_text: &str) -> Result<u8, String> {
    let alpha = parse_positive_rational(alpha_text)?;
    println!("family,n,m,alpha,branch,rounds,maxflow_calls,wall_ms,value,ratio_vs_opt");
    let mut rows: Vec<(&str, DiGraph)> = Vec::new();
    for n in [8usize, 16, 32, 64] {
        rows.push(("complete", DiGraph::complete_bidirected(n)));
    }
    for n in [8usize, 16, 32, 64] {
        rows.push(("cycle", DiGraph::directed_cycle(n)));
    }
    for (i, n) in [8usize, 10, 12, 14].into_iter().enumerate() {
        rows.push(("random", DiGraph::random_strongly_connected(n, 2 * n, seed + i as u64)));
    }

    for (family, graph) in rows {
        let config = GameConfig::new(alpha.clone(), seed);
        let started = Instant::now();
        let result = play_game(&graph, &config).map_err(|e| e.to_string())?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let rounds = result.matchings.len();
        let calls = result.trace.maxflow_calls;
        // The flow-call contract: two per successful round, plus the
        // failure round's one or two.
        let extra = calls as i64 - 2 * rounds as i64;
        let valid = match result.outcome {
            GameOutcome::Cut(_) => extra == 1 || extra == 2,
            _ => extra == 0,
        };
        if !valid {
            return Err(format!("flow call accounting broken on {family} n={}", graph.n()));
        }
        let value = match &result.outcome {
            GameOutcome::Cut(c) => format_rational(&c.expansion),
            GameOutcome::Expander(e) => format_rational(&e.implied_lower_bound),
            GameOutcome::Inconclusive => String::new(),
        };
        let ratio = if graph.n() <= 14 {
            let auto = approximate_sparsest_cut(&graph, seed, WalkMode::Exact)
                .map_err(|e| e.to_string())?;
            let optimum = brute_force_sparsest_cut(&graph).map_err(|e| e.to_string())?;
            format!(
                "{:.4}",
                rational_to_f64(&auto.best_cut.expansion) / rational_to_f64(&optimum.expansion)
            )
        } else {
            String::new()
        };
        println!(
            "{family},{},{},{},{},{rounds},{calls},{wall_ms:.2},{value},{ratio}",
            graph.n(),
            graph.m(),
            format_rational(&alpha),
            result.outcome.branch_name(),
        );
    }
    Ok(EXIT_OK)
}
