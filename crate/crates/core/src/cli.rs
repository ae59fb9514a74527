//! Command-line front end. Every subcommand prints a [`RunReport`] as JSON.
//!
//! Exit codes: 0 success (or unknown with witness), 1 no classical
//! homomorphism, 2 input error, 3 quantum-infeasibility certificate,
//! 4 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::gadget::{
    build_indicator, color_domains, endpoint_certificate, replace, verify_structural, ColorMask, IndicatorDoc,
    ReplacementGraph,
};
use crate::graph::{dicycles_to_digraph, from_json, to_dot, to_json, Graph};
use crate::hom::{check_witness, find_hom_with, SearchOptions};
use crate::poset::{
    encode, order_check_d, phi_of, verify_embedding_with, CheckOptions, EncodeOptions, Embedding, PairArtifact,
    Poset,
};
use crate::prune::{prune_closure, roles_from_labels, Problem, PruneConfig, RuleKind, Verdict};
use crate::report::{InputDigest, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_HOM: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qhorder", version, about = "Homomorphism order tools: solver, zero-forcing, gadgets, poset embeddings")]
pub struct Cli {
    /// Also write the run report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "phi")]
    Phi,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a homomorphism X -> Y (exit 0 found, 1 none).
    CheckHom {
        x: PathBuf,
        y: PathBuf,
        /// Write the witness mapping here.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Restrict role-carrying source vertices to matching target colors
        /// (needs replacement metadata for Y).
        #[arg(long)]
        color_prefilter: bool,
    },
    /// Zero-forcing closure for X ->q Y (exit 0 unknown, 3 infeasible).
    Qprune {
        x: PathBuf,
        y: PathBuf,
        /// Walk bound L (default |V(X)|*|V(Y)|, capped at 4096).
        #[arg(long)]
        bound: Option<usize>,
        /// Comma-separated subset of closed-walk,support,pair-walk,color.
        #[arg(long)]
        rules: Option<String>,
        /// Write the full derivation trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Emit the indicator graph J.
    BuildIndicator {
        #[arg(long)]
        out: PathBuf,
        /// Write terminals, spine and roles here.
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Replace every arc of a digraph H by a copy of J.
    Replace {
        host: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check the neighbourhood conditions and the spine certificate of a
    /// replacement graph (exit 0 pass, 4 fail).
    VerifyLemmas { meta: PathBuf },
    /// Encode a poset as cycle lengths and check the realisation.
    EmbedPoset {
        poset: PathBuf,
        #[arg(long, value_enum, default_value = "phi")]
        level: Level,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Shuffle the prime assignment with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_elements: Option<usize>,
    },
    /// Encode, check at cycle level and at replacement level, emit all graphs.
    DemoUniversality {
        poset: PathBuf,
        #[arg(long, default_value = "graphs")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckHom { .. } => "check-hom",
            Command::Qprune { .. } => "qprune",
            Command::BuildIndicator { .. } => "build-indicator",
            Command::Replace { .. } => "replace",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::EmbedPoset { .. } => "embed-poset",
            Command::DemoUniversality { .. } => "demo-universality",
        }
    }
}

type CliResult = Result<(), String>;

/// Parses `args`, runs the command, prints the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let mut report = RunReport::new(cli.command.name());
    if let Err(msg) = dispatch(&cli.command, &mut report) {
        eprintln!("error: {msg}");
        report.verdict = "error".into();
        report.exit_code = EXIT_INPUT;
        report.details = json!({ "error": msg });
    }
    report.set_elapsed(start.elapsed());
    let text = report.to_json();
    println!("{text}");
    if let Some(path) = &cli.report {
        if let Err(e) = fs::write(path, format!("{text}\n")) {
            eprintln!("error: writing report {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    report.exit_code
}

fn dispatch(cmd: &Command, r: &mut RunReport) -> CliResult {
    match cmd {
        Command::CheckHom { x, y, witness, color_prefilter } => check_hom(r, x, y, witness.as_deref(), *color_prefilter),
        Command::Qprune { x, y, bound, rules, trace } => qprune(r, x, y, *bound, rules.as_deref(), trace.as_deref()),
        Command::BuildIndicator { out, meta, format } => build_indicator_cmd(r, out, meta.as_deref(), *format),
        Command::Replace { host, out, meta, format } => replace_cmd(r, host, out, meta.as_deref(), *format),
        Command::VerifyLemmas { meta } => verify_lemmas(r, meta),
        Command::EmbedPoset { poset, level, out_dir, seed, max_elements } => {
            let enc = EncodeOptions { max_elements: max_elements.unwrap_or(0), seed: *seed };
            embed(r, poset, *level == Level::D, *level == Level::Phi, out_dir.as_deref(), &enc)
        }
        Command::DemoUniversality { poset, out_dir, seed } => {
            let enc = EncodeOptions { seed: *seed, ..Default::default() };
            embed(r, poset, true, true, Some(out_dir), &enc)
        }
    }
}

fn read_input(r: &mut RunReport, role: &str, path: &Path) -> Result<String, String> {
    let bytes = fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    r.inputs.push(InputDigest::new(role, path, &bytes));
    String::from_utf8(bytes).map_err(|_| format!("{}: not UTF-8", path.display()))
}

fn write_file(r: &mut RunReport, kind: &str, path: &Path, text: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    }
    fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))?;
    r.artifact(kind, path);
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}

/// A graph read from a plain graph document, an indicator document or a
/// replacement document.
struct Loaded {
    graph: Graph,
    meta: Option<ReplacementGraph>,
    roles: Vec<ColorMask>,
}

fn load_graph(r: &mut RunReport, role: &str, path: &Path) -> Result<Loaded, String> {
    let text = read_input(r, role, path)?;
    let ctx = |e: String| format!("{}: {e}", path.display());
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| ctx(e.to_string()))?;
    if value.get("host").is_some() {
        let meta = ReplacementGraph::from_json(&text).map_err(|e| ctx(e.to_string()))?;
        let roles = meta.roles.masks(&meta.graph);
        return Ok(Loaded { graph: meta.graph.clone(), roles, meta: Some(meta) });
    }
    if value.get("spine").is_some() {
        let doc: IndicatorDoc = serde_json::from_value(value).map_err(|e| ctx(e.to_string()))?;
        let graph = Graph::try_from(doc.graph).map_err(|e| ctx(e.to_string()))?;
        let roles = doc.roles.masks(&graph);
        return Ok(Loaded { graph, meta: None, roles });
    }
    let graph = from_json(&text).map_err(|e| ctx(e.to_string()))?;
    let roles = roles_from_labels(&graph);
    Ok(Loaded { graph, meta: None, roles })
}

fn write_graph(r: &mut RunReport, path: &Path, g: &Graph, format: Format) -> CliResult {
    let text = match format {
        Format::Json => format!("{}\n", to_json(g)),
        Format::Dot => to_dot(g),
    };
    write_file(r, "graph", path, &text)
}

fn summary(g: &Graph) -> serde_json::Value {
    json!({ "kind": g.kind(), "vertices": g.vertex_count(), "edges": g.edge_count() })
}

fn check_hom(r: &mut RunReport, x: &Path, y: &Path, witness: Option<&Path>, prefilter: bool) -> CliResult {
    let (sx, ty) = (load_graph(r, "source", x)?, load_graph(r, "target", y)?);
    let mut options = SearchOptions::default();
    if prefilter {
        let meta = ty.meta.as_ref().ok_or("--color-prefilter needs replacement metadata for the target")?;
        options.initial_domains = Some(color_domains(&sx.roles, &meta.color_masks()));
    }
    let found = find_hom_with(&sx.graph, &ty.graph, &options).map_err(|e| e.to_string())?;
    let mut details = json!({
        "source": summary(&sx.graph),
        "target": summary(&ty.graph),
        "color_prefilter": prefilter,
    });
    match found {
        Some(w) => {
            let check = check_witness(&sx.graph, &ty.graph, &w).map_err(|e| e.to_string())?;
            details["witness_valid"] = json!(check.valid);
            match witness {
                Some(path) => write_file(r, "witness", path, &pretty(&w))?,
                None => details["witness"] = json!(w.mapping),
            }
            r.verdict = "hom".into();
            r.exit_code = EXIT_OK;
        }
        None => {
            details["search"] = json!("exhaustive");
            r.verdict = "no-hom".into();
            r.exit_code = EXIT_NO_HOM;
        }
    }
    r.details = details;
    Ok(())
}

fn qprune(
    r: &mut RunReport,
    x: &Path,
    y: &Path,
    bound: Option<usize>,
    rules: Option<&str>,
    trace: Option<&Path>,
) -> CliResult {
    let (sx, ty) = (load_graph(r, "source", x)?, load_graph(r, "target", y)?);
    let rules = match rules {
        Some(s) => RuleKind::parse_list(s).map_err(|e| e.to_string())?,
        None => {
            let mut v = PruneConfig::default().rules;
            if ty.meta.is_some() {
                v.push(RuleKind::Color);
            }
            v
        }
    };
    let mut problem = Problem::new(&sx.graph, &ty.graph).with_source_roles(sx.roles.clone());
    if let Some(meta) = &ty.meta {
        problem = problem.with_target_colors(meta.color_masks());
    }
    let config = PruneConfig { bound, rules: rules.clone(), ..Default::default() };
    let ledger = prune_closure(&problem, &config).map_err(|e| e.to_string())?;
    let verdict = ledger.verdict();
    let resolved = bound.unwrap_or_else(|| crate::prune::default_bound(&sx.graph, &ty.graph));
    let mut details = json!({
        "source": summary(&sx.graph),
        "target": summary(&ty.graph),
        "bound": resolved,
        "rules": rules.iter().map(|r| r.name()).collect::<Vec<_>>(),
        "zero_pairs": ledger.zero_count(),
        "total_pairs": sx.graph.vertex_count() * ty.graph.vertex_count(),
    });
    if let Some(row) = ledger.dead_row() {
        // The entries that emptied the row; they refer to earlier entries of
        // the full trace.
        let certificate: Vec<_> = ledger
            .trace()
            .iter()
            .filter(|e| e.source as usize == row)
            .map(|e| e.named(&sx.graph, &ty.graph))
            .collect();
        details["dead_source"] = json!(sx.graph.name(row));
        details["certificate"] = json!(certificate);
    }
    if let Some(path) = trace {
        let entries: Vec<_> = ledger.trace().iter().map(|e| e.named(&sx.graph, &ty.graph)).collect();
        let doc = json!({ "verdict": verdict, "bound": resolved, "rules": details["rules"], "entries": entries });
        write_file(r, "trace", path, &pretty(&doc))?;
    }
    r.details = details;
    r.verdict = verdict.to_string();
    r.exit_code = match verdict {
        Verdict::Infeasible => EXIT_INFEASIBLE,
        Verdict::Unknown => EXIT_OK,
    };
    Ok(())
}

fn build_indicator_cmd(r: &mut RunReport, out: &Path, meta: Option<&Path>, format: Format) -> CliResult {
    let j = build_indicator();
    write_graph(r, out, &j.graph, format)?;
    if let Some(path) = meta {
        write_file(r, "meta", path, &pretty(&j.to_doc()))?;
    }
    r.details = json!({
        "graph": summary(&j.graph),
        "terminals": [j.a, j.b],
        "spine": j.spine,
        "spine_colors": j.spine_colors(),
    });
    r.verdict = "built".into();
    Ok(())
}

fn replace_cmd(r: &mut RunReport, host: &Path, out: &Path, meta: Option<&Path>, format: Format) -> CliResult {
    let h = load_graph(r, "host", host)?.graph;
    let y = replace(&h, &build_indicator()).map_err(|e| e.to_string())?;
    write_graph(r, out, &y.graph, format)?;
    if let Some(path) = meta {
        write_file(r, "meta", path, &format!("{}\n", y.to_json()))?;
    }
    let colors = y.color_sets();
    r.details = json!({
        "host": summary(&h),
        "graph": summary(&y.graph),
        "copies": y.copies.len(),
        "color_counts": { "A": colors.a.len(), "B": colors.b.len(), "E": colors.e.len() },
    });
    r.verdict = "built".into();
    Ok(())
}

fn verify_lemmas(r: &mut RunReport, meta: &Path) -> CliResult {
    let text = read_input(r, "meta", meta)?;
    let y = ReplacementGraph::from_json(&text).map_err(|e| format!("{}: {e}", meta.display()))?;
    let structural = verify_structural(&y);
    let certificate = endpoint_certificate(&y);
    let pass = structural.passed() && certificate.is_ok();
    r.details = json!({
        "structural": structural,
        "endpoint_certificate": match &certificate {
            Ok(pairs) => json!({ "ok": true, "pairs": pairs }),
            Err(e) => json!({ "ok": false, "error": e.to_string() }),
        },
    });
    r.verdict = if pass { "pass" } else { "fail" }.into();
    r.exit_code = if pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(())
}

fn emit_graphs(r: &mut RunReport, dir: &Path, p: &Poset, e: &Embedding, options: &CheckOptions, phi: bool) -> CliResult {
    let j = build_indicator();
    for i in 0..p.len() {
        let d = e.dicycles(i);
        write_graph(r, &dir.join(format!("element-{i}.cycles.json")), &dicycles_to_digraph(&d), Format::Json)?;
        if phi && crate::poset::phi_size(e.length(i), &j) <= options.phi_budget as u64 {
            let y = phi_of(&d, &j);
            write_graph(r, &dir.join(format!("element-{i}.phi.json")), &y.graph, Format::Json)?;
            write_file(r, "meta", &dir.join(format!("element-{i}.phi.meta.json")), &format!("{}\n", y.to_json()))?;
        }
    }
    Ok(())
}

fn rule_counts(trace: &[crate::prune::TraceEntry]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for e in trace {
        *m.entry(e.justification.rule_name()).or_insert(0) += 1;
    }
    m
}

fn embed(r: &mut RunReport, poset: &Path, level_d: bool, level_phi: bool, out_dir: Option<&Path>, enc: &EncodeOptions) -> CliResult {
    let text = read_input(r, "poset", poset)?;
    let p = Poset::from_json(&text).map_err(|e| format!("{}: {e}", poset.display()))?;
    let e = encode(&p, enc).map_err(|e| e.to_string())?;
    let options = CheckOptions::from_env()?;
    let mut details = json!({
        "elements": p.elements(),
        "encoding": e,
        "phi_budget": options.phi_budget,
        "cycle_budget": options.cycle_budget,
    });
    let mut pass = true;
    if let Some(dir) = out_dir {
        emit_graphs(r, dir, &p, &e, &options, level_phi)?;
    }
    if level_d {
        let check = order_check_d(&p, &e, &options);
        pass &= check.passed;
        details["order_check"] = json!(check);
    }
    if level_phi {
        let (report, artifacts) = verify_embedding_with(&p, &e, &options, out_dir.is_some());
        pass &= report.full;
        if let Some(dir) = out_dir {
            let index = |name: &str| p.elements().iter().position(|n| n == name).expect("element");
            let j = build_indicator();
            for (row, art) in report.pairs.iter().zip(&artifacts) {
                let (xi, yi) = (index(&row.x), index(&row.y));
                let stem = format!("pair-{xi}-{yi}");
                match art {
                    Some(PairArtifact::Witness(w)) => {
                        write_file(r, "witness", &dir.join(format!("{stem}.witness.json")), &pretty(w))?
                    }
                    Some(PairArtifact::Certificate { phi, host, host_seeds }) => {
                        let (sd, td) = (e.dicycles(xi), e.dicycles(yi));
                        let (hs, ht) = (dicycles_to_digraph(&sd), dicycles_to_digraph(&td));
                        let doc = json!({
                            "phi_rules": crate::poset::phi_rules().iter().map(|r| r.name()).collect::<Vec<_>>(),
                            "phi_zero_pairs": phi.zero_count(),
                            "phi_rule_counts": rule_counts(phi.trace()),
                            "phi_source_vertices": crate::poset::phi_size(e.length(xi), &j),
                            "host_seeds": host_seeds,
                            "host_verdict": host.verdict(),
                            "host_trace": host.trace().iter().map(|t| t.named(&hs, &ht)).collect::<Vec<_>>(),
                        });
                        write_file(r, "certificate", &dir.join(format!("{stem}.certificate.json")), &pretty(&doc))?
                    }
                    None => {}
                }
            }
        }
        details["embedding"] = json!(report);
    }
    r.details = details;
    r.verdict = if pass { "pass" } else { "fail" }.into();
    r.exit_code = if pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from(["qhorder", "qprune", "a.json", "b.json", "--bound", "12"]).unwrap();
        assert!(matches!(cli.command, Command::Qprune { bound: Some(12), .. }));
        let cli = Cli::try_parse_from(["qhorder", "embed-poset", "p.json", "--level", "D"]).unwrap();
        assert!(matches!(cli.command, Command::EmbedPoset { level: Level::D, .. }));
        assert!(Cli::try_parse_from(["qhorder", "frobnicate"]).is_err());
    }

    #[test]
    fn unknown_subcommand_is_input_error() {
        assert_eq!(run(["qhorder", "frobnicate"]), EXIT_INPUT);
    }
}
