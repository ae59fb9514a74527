//! Finite posets realised in the homomorphism order of directed cycles and,
//! through the indicator replacement, of undirected graphs.
//!
//! Element `x` gets a prime `p_x` and the cycle length
//! `f(x) = product of p_z over all z >= x`. Then `f(y) | f(x)` exactly when
//! `x <= y`, so `C_f(x) -> C_f(y)` exactly when `x <= y`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadget::{build_indicator, replace, Indicator, ReplacementGraph};
use crate::graph::{dicycles_to_digraph, DiCycles, Graph};
use crate::hom::{check_witness, cycle_hom, dicycles_hom, find_hom, HomError, HomWitness};
use crate::prune::{
    prune_closure, replay, Justification, Problem, PruneConfig, PruneError, RuleKind, TraceEntry, Verdict,
    ZeroLedger,
};

pub const DEFAULT_MAX_ELEMENTS: usize = 8;
/// Default cap on the vertex count of a replacement graph built for checking.
pub const DEFAULT_PHI_BUDGET: usize = 100_000;
/// Default cap on cycle lengths handed to the solver and the walk rules.
pub const DEFAULT_CYCLE_BUDGET: usize = 512;
pub const PHI_BUDGET_ENV: &str = "QHORDER_MAX_VERTICES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("poset JSON: {0}")]
    Json(String),
    #[error("elements[{index}]: duplicate element {name:?}")]
    DuplicateElement { index: usize, name: String },
    #[error("leq[{index}]: unknown element {name:?}")]
    UnknownElement { index: usize, name: String },
    #[error("not antisymmetric: {0:?} <= {1:?} and {1:?} <= {0:?}")]
    NotAntisymmetric(String, String),
    #[error("not transitive: {0:?} <= {1:?} <= {2:?} but not {0:?} <= {2:?}")]
    NotTransitive(String, String, String),
    #[error("poset has {size} elements, at most {max} allowed")]
    TooLarge { size: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<[String; 2]>,
}

/// A finite partial order; `leq` always contains the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    leq: BTreeSet<(usize, usize)>,
}

impl Poset {
    /// Validates the axioms after adding the reflexive pairs. Transitivity is
    /// checked, not completed.
    pub fn new(elements: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        let n = elements.len();
        let mut leq: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
        leq.extend((0..n).map(|i| (i, i)));
        let name = |i: usize| elements[i].clone();
        for &(a, b) in &leq {
            if a != b && leq.contains(&(b, a)) {
                return Err(PosetError::NotAntisymmetric(name(a), name(b)));
            }
        }
        for &(a, b) in &leq {
            for c in 0..n {
                if leq.contains(&(b, c)) && !leq.contains(&(a, c)) {
                    return Err(PosetError::NotTransitive(name(a), name(b), name(c)));
                }
            }
        }
        Ok(Poset { elements, leq })
    }

    pub fn from_doc(doc: &PosetDoc) -> Result<Self, PosetError> {
        let mut index = BTreeMap::new();
        for (i, e) in doc.elements.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(PosetError::DuplicateElement { index: i, name: e.clone() });
            }
        }
        let mut pairs = Vec::with_capacity(doc.leq.len());
        for (i, [a, b]) in doc.leq.iter().enumerate() {
            let look = |s: &String| {
                index.get(s.as_str()).copied().ok_or_else(|| PosetError::UnknownElement { index: i, name: s.clone() })
            };
            pairs.push((look(a)?, look(b)?));
        }
        Poset::new(doc.elements.clone(), &pairs)
    }

    pub fn from_json(text: &str) -> Result<Self, PosetError> {
        let doc: PosetDoc = serde_json::from_str(text).map_err(|e| PosetError::Json(e.to_string()))?;
        Poset::from_doc(&doc)
    }

    pub fn to_doc(&self) -> PosetDoc {
        PosetDoc {
            elements: self.elements.clone(),
            leq: self
                .leq
                .iter()
                .filter(|(a, b)| a != b)
                .map(|&(a, b)| [self.elements[a].clone(), self.elements[b].clone()])
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq.contains(&(a, b))
    }

    /// `{z : x <= z}`.
    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&z| self.leq(x, z)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EncodeOptions {
    /// `0` means [`DEFAULT_MAX_ELEMENTS`].
    pub max_elements: usize,
    /// Shuffle the prime assignment with this seed.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Encoded {
    pub element: String,
    pub prime: u64,
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub entries: Vec<Encoded>,
}

impl Embedding {
    pub fn length(&self, i: usize) -> u64 {
        self.entries[i].length
    }

    pub fn dicycles(&self, i: usize) -> DiCycles {
        DiCycles::new(vec![self.length(i) as usize]).expect("encoded lengths are at least 2")
    }
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

pub fn encode(p: &Poset, options: &EncodeOptions) -> Result<Embedding, PosetError> {
    let max = if options.max_elements == 0 { DEFAULT_MAX_ELEMENTS } else { options.max_elements };
    if p.len() > max {
        return Err(PosetError::TooLarge { size: p.len(), max });
    }
    let mut primes = first_primes(p.len());
    if let Some(seed) = options.seed {
        primes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let entries = (0..p.len())
        .map(|x| Encoded {
            element: p.elements[x].clone(),
            prime: primes[x],
            length: p.up_set(x).iter().map(|&z| primes[z]).product(),
        })
        .collect();
    Ok(Embedding { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest replacement graph (in vertices) that will be built.
    pub phi_budget: usize,
    /// Largest cycle handed to the solver or the walk rules.
    pub cycle_budget: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { phi_budget: DEFAULT_PHI_BUDGET, cycle_budget: DEFAULT_CYCLE_BUDGET }
    }
}

impl CheckOptions {
    /// Defaults, with the replacement budget taken from `QHORDER_MAX_VERTICES`
    /// when set.
    pub fn from_env() -> Result<Self, String> {
        let mut o = CheckOptions::default();
        if let Ok(v) = std::env::var(PHI_BUDGET_ENV) {
            o.phi_budget = v.trim().parse().map_err(|_| format!("{PHI_BUDGET_ENV}: not a number: {v:?}"))?;
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub x: String,
    pub y: String,
    pub leq: bool,
    pub divides: bool,
    pub dicycles_hom: bool,
    /// `None` when a cycle exceeds the budget.
    pub find_hom: Option<bool>,
    pub prune: Option<Verdict>,
    /// Shortest closed walk length used by an infeasibility certificate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_walk_length: Option<u32>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderCheck {
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
}

fn first_closed_walk(trace: &[TraceEntry]) -> Option<u32> {
    trace.iter().find_map(|e| match e.justification {
        Justification::ClosedWalk { length } => Some(length),
        _ => None,
    })
}

/// Checks every ordered pair at cycle level: divisibility, the cycle-union
/// criterion, the solver and the zero-forcing engine must all agree with the
/// poset order.
pub fn order_check_d(p: &Poset, e: &Embedding, options: &CheckOptions) -> OrderCheck {
    let n = p.len();
    let graphs: Vec<Option<Graph>> = (0..n)
        .map(|i| (e.length(i) as usize <= options.cycle_budget).then(|| dicycles_to_digraph(&e.dicycles(i))))
        .collect();
    let pairs: Vec<PairCheck> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(x, y)| {
            let leq = p.leq(x, y);
            let divides = e.length(x) % e.length(y) == 0;
            let dh = dicycles_hom(&e.dicycles(x), &e.dicycles(y));
            let (mut found, mut verdict, mut length) = (None, None, None);
            if let (Some(gx), Some(gy)) = (&graphs[x], &graphs[y]) {
                found = Some(find_hom(gx, gy).expect("both are digraphs").is_some());
                let l = prune_closure(&Problem::new(gx, gy), &PruneConfig::default()).expect("both are digraphs");
                if l.verdict() == Verdict::Infeasible {
                    length = first_closed_walk(l.trace());
                }
                verdict = Some(l.verdict());
            }
            let consistent = divides == leq
                && dh == leq
                && found.is_none_or(|f| f == leq)
                && verdict.is_none_or(|v| (v == Verdict::Infeasible) == !leq);
            PairCheck {
                x: p.elements[x].clone(),
                y: p.elements[y].clone(),
                leq,
                divides,
                dicycles_hom: dh,
                find_hom: found,
                prune: verdict,
                closed_walk_length: length,
                consistent,
            }
        })
        .collect();
    let passed = pairs.iter().all(|c| c.consistent);
    OrderCheck { pairs, passed }
}

/// Number of vertices of the replacement graph for a single cycle of length `n`.
pub fn phi_size(n: u64, j: &Indicator) -> u64 {
    n + n * (j.graph.vertex_count() as u64 - 2)
}

/// `Phi(D) = D * J`.
pub fn phi_of(d: &DiCycles, j: &Indicator) -> ReplacementGraph {
    replace(&dicycles_to_digraph(d), j).expect("cycle unions are digraphs with fresh names")
}

pub fn phi(e: &Embedding, x: usize) -> ReplacementGraph {
    phi_of(&e.dicycles(x), &build_indicator())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("host witness is not a homomorphism: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Prune(#[from] PruneError),
    #[error("source ledger was built without the color rule")]
    ColorRuleMissing,
    #[error("connector {0:?} is not the tail of any arc")]
    NoOutgoingArc(String),
    #[error("connector {connector:?} may still map to non-connector {target:?}")]
    ConnectorLeak { connector: String, target: String },
    #[error("copy of {tail:?}->{head:?} admits endpoint pair {pair:?}, which is not an arc of the target host")]
    Certificate { tail: String, head: String, pair: (String, String) },
    #[error("ledger shape {found:?} does not match the instance {expected:?}")]
    LedgerShape { found: (usize, usize), expected: (usize, usize) },
    #[error("host has {0} vertices, over the cycle budget")]
    OverBudget(usize),
}

/// Lifts a host homomorphism to the replacement graphs: connectors follow
/// `f_d` and each copy `J_uv` goes identically onto `J_f(u)f(v)`.
pub fn construct_phi_hom(
    src: &ReplacementGraph,
    tgt: &ReplacementGraph,
    f_d: &HomWitness,
) -> Result<HomWitness, EmbedError> {
    let check = check_witness(&src.host, &tgt.host, f_d)?;
    if let Some((a, b)) = check.violation {
        return Err(EmbedError::InvalidWitness(format!("arc {a:?}->{b:?} is not preserved")));
    }
    let mut mapping = BTreeMap::new();
    for u in src.host.names() {
        mapping.insert(u.clone(), f_d.get(u).expect("checked total").to_string());
    }
    for c in &src.copies {
        let (fu, fv) = (f_d.get(&c.tail).expect("total"), f_d.get(&c.head).expect("total"));
        let image = tgt.copy(fu, fv).expect("image arc exists, so does its copy");
        for (v, w) in c.vertices.iter().zip(&image.vertices) {
            mapping.insert(v.clone(), w.clone());
        }
    }
    Ok(HomWitness { mapping })
}

/// Cycle-level zero information extracted from a replacement-level ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Endpoint pairs admitted by some copy, over all source arcs.
    pub allowed: BTreeSet<(String, String)>,
    /// Connector pairs known to be zero, handed to the host-level closure.
    pub seeds: Vec<(String, String)>,
    /// Connector/target pairs that were not in the ledger but follow from the
    /// endpoint analysis.
    pub derived: usize,
    pub host_ledger: ZeroLedger,
    pub verdict: Verdict,
}

/// Per copy of an arc `u -> w`: the pairs `(p, q)` joined by a target walk
/// `p = t0, ..., t6 = q` with every `(s_i, t_i)` still alive along the spine.
fn copy_endpoints(src: &ReplacementGraph, tgt: &ReplacementGraph, ledger: &ZeroLedger, spine: &[String]) -> BTreeSet<(usize, usize)> {
    let s: Vec<usize> = spine.iter().map(|v| src.graph.index_of(v).expect("spine vertex")).collect();
    let alive: Vec<_> = s.iter().map(|&v| ledger.alive(v)).collect();
    let mut out = BTreeSet::new();
    for t0 in alive[0].ones() {
        let mut frontier = vec![t0];
        for a in &alive[1..] {
            let mut next = fixedbitset::FixedBitSet::with_capacity(tgt.graph.vertex_count());
            for &t in &frontier {
                for &w in tgt.graph.succ(t) {
                    if a.contains(w) {
                        next.insert(w);
                    }
                }
            }
            frontier = next.ones().collect();
        }
        out.extend(frontier.into_iter().map(|t6| (t0, t6)));
    }
    out
}

/// Turns a closure for `Phi(D) -> Phi(D2)` (built with the color rule) into a
/// zero-forcing instance `D -> D2` and runs it.
pub fn reduce_phi_to_d(
    src: &ReplacementGraph,
    tgt: &ReplacementGraph,
    ledger: &ZeroLedger,
    config: &PruneConfig,
    cycle_budget: usize,
) -> Result<Reduction, EmbedError> {
    if !config.rules.contains(&RuleKind::Color) {
        return Err(EmbedError::ColorRuleMissing);
    }
    let expected = (src.graph.vertex_count(), tgt.graph.vertex_count());
    if (ledger.source_count(), ledger.target_count()) != expected {
        return Err(EmbedError::LedgerShape { found: (ledger.source_count(), ledger.target_count()), expected });
    }
    for (u, name) in src.host.names().iter().enumerate() {
        if src.host.succ(u).is_empty() {
            return Err(EmbedError::NoOutgoingArc(name.clone()));
        }
    }
    for n in [src.host.vertex_count(), tgt.host.vertex_count()] {
        if n > cycle_budget {
            return Err(EmbedError::OverBudget(n));
        }
    }
    let tname = |t: usize| tgt.graph.name(t).to_string();
    let mut allowed = BTreeSet::new();
    // For each connector: targets that can start (resp. end) an admitted walk
    // along every outgoing (resp. incoming) copy.
    let mut heads_ok: BTreeMap<&str, Vec<BTreeSet<usize>>> = BTreeMap::new();
    let mut tails_ok: BTreeMap<&str, Vec<BTreeSet<usize>>> = BTreeMap::new();
    for c in &src.copies {
        let ends = copy_endpoints(src, tgt, ledger, &c.spine);
        for &(p, q) in &ends {
            let pair = (tname(p), tname(q));
            if !tgt.host.has_edge_named(&pair.0, &pair.1) {
                return Err(EmbedError::Certificate { tail: c.tail.clone(), head: c.head.clone(), pair });
            }
            allowed.insert(pair);
        }
        tails_ok.entry(&c.tail).or_default().push(ends.iter().map(|e| e.0).collect());
        heads_ok.entry(&c.head).or_default().push(ends.iter().map(|e| e.1).collect());
    }
    let mut seeds = Vec::new();
    let mut derived = 0;
    for u in src.host.names() {
        let su = src.graph.index_of(u).expect("connector");
        for t in 0..tgt.graph.vertex_count() {
            let excluded = |m: &BTreeMap<&str, Vec<BTreeSet<usize>>>| {
                m.get(u.as_str()).is_some_and(|sets| sets.iter().any(|s| !s.contains(&t)))
            };
            let zero = ledger.is_zero(su, t) || {
                let z = excluded(&tails_ok) || excluded(&heads_ok);
                derived += usize::from(z);
                z
            };
            let target_is_connector = tgt.is_connector(tgt.graph.name(t));
            match (zero, target_is_connector) {
                (false, false) => return Err(EmbedError::ConnectorLeak { connector: u.clone(), target: tname(t) }),
                (true, true) => seeds.push((u.clone(), tname(t))),
                _ => {}
            }
        }
    }
    let seed_ids = seeds
        .iter()
        .map(|(u, v)| (src.host.index_of(u).expect("host vertex"), tgt.host.index_of(v).expect("host vertex")))
        .collect();
    let host_config = PruneConfig { seeds: seed_ids, ..PruneConfig::default() };
    let host_ledger = prune_closure(&Problem::new(&src.host, &tgt.host), &host_config)?;
    let verdict = host_ledger.verdict();
    Ok(Reduction { allowed, seeds, derived, host_ledger, verdict })
}

/// Rules used for replacement-level closures in [`verify_embedding`].
pub fn phi_rules() -> Vec<RuleKind> {
    vec![RuleKind::Color]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    /// Lifted witness, validated on the replacement graphs.
    Witness { valid: bool, mapped_vertices: usize },
    /// Replacement-level zeros reduce to a cycle-level certificate.
    Infeasible {
        phi_zero_pairs: usize,
        phi_trace_replayed: bool,
        host_seeds: usize,
        host_verdict: Verdict,
        host_trace_replayed: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        closed_walk_length: Option<u32>,
    },
    Skipped { reason: String },
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRealization {
    pub x: String,
    pub y: String,
    pub leq: bool,
    pub source_length: u64,
    pub target_length: u64,
    pub source_vertices: u64,
    pub target_vertices: u64,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub realized: bool,
}

/// Artifacts kept for one pair when requested.
#[derive(Debug, Clone)]
pub enum PairArtifact {
    Witness(HomWitness),
    Certificate { phi: ZeroLedger, host: ZeroLedger, host_seeds: Vec<(String, String)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub encoding: Embedding,
    pub pairs: Vec<PairRealization>,
    pub realized: usize,
    pub total: usize,
    pub full: bool,
}

fn realize_pair(
    p: &Poset,
    e: &Embedding,
    phis: &[Option<ReplacementGraph>],
    (x, y): (usize, usize),
    options: &CheckOptions,
) -> (PairRealization, Option<PairArtifact>) {
    let j_inner = build_indicator().graph.vertex_count() as u64 - 2;
    let leq = p.leq(x, y);
    let mut row = PairRealization {
        x: p.elements[x].clone(),
        y: p.elements[y].clone(),
        leq,
        source_length: e.length(x),
        target_length: e.length(y),
        source_vertices: e.length(x) * (j_inner + 1),
        target_vertices: e.length(y) * (j_inner + 1),
        outcome: Outcome::Skipped { reason: String::new() },
        realized: false,
    };
    let (Some(src), Some(tgt)) = (&phis[x], &phis[y]) else {
        row.outcome = Outcome::Skipped {
            reason: format!("replacement graph over the budget of {} vertices", options.phi_budget),
        };
        return (row, None);
    };
    if leq {
        let (n, m) = (e.length(x) as usize, e.length(y) as usize);
        let f_d = cycle_hom(n, m).map(|w| relabel_single(&w));
        let Some(f_d) = f_d else {
            row.outcome = Outcome::Failed { reason: format!("{m} does not divide {n}") };
            return (row, None);
        };
        match construct_phi_hom(src, tgt, &f_d) {
            Ok(w) => {
                let valid = check_witness(&src.graph, &tgt.graph, &w).is_ok_and(|c| c.valid);
                row.outcome = Outcome::Witness { valid, mapped_vertices: w.mapping.len() };
                row.realized = valid;
                (row, Some(PairArtifact::Witness(w)))
            }
            Err(err) => {
                row.outcome = Outcome::Failed { reason: err.to_string() };
                (row, None)
            }
        }
    } else {
        match certify_infeasible(src, tgt, options) {
            Ok((outcome, artifact)) => {
                row.realized = matches!(
                    outcome,
                    Outcome::Infeasible { host_verdict: Verdict::Infeasible, phi_trace_replayed: true, host_trace_replayed: true, .. }
                );
                row.outcome = outcome;
                (row, Some(artifact))
            }
            Err(err) => {
                row.outcome = Outcome::Failed { reason: err.to_string() };
                (row, None)
            }
        }
    }
}

/// The witness `ci -> c(i mod m)` renamed to the single-component vertex names.
fn relabel_single(w: &HomWitness) -> HomWitness {
    HomWitness { mapping: w.mapping.iter().map(|(a, b)| (format!("p0.{a}"), format!("p0.{b}"))).collect() }
}

/// Replacement-level closure with the color rule, reduction to hosts, and a
/// replay of both traces.
pub fn certify_infeasible(
    src: &ReplacementGraph,
    tgt: &ReplacementGraph,
    options: &CheckOptions,
) -> Result<(Outcome, PairArtifact), EmbedError> {
    let problem = Problem::new(&src.graph, &tgt.graph).with_target_colors(tgt.color_masks());
    let config = PruneConfig::with_rules(&phi_rules());
    let phi = prune_closure(&problem, &config)?;
    let phi_ok = replay(&problem, &config, phi.trace()).is_ok_and(|l| l.same_zeros(&phi));
    let red = reduce_phi_to_d(src, tgt, &phi, &config, options.cycle_budget)?;
    let host_problem = Problem::new(&src.host, &tgt.host);
    let seed_ids: Vec<_> = red
        .seeds
        .iter()
        .map(|(u, v)| (src.host.index_of(u).expect("host"), tgt.host.index_of(v).expect("host")))
        .collect();
    let host_config = PruneConfig { seeds: seed_ids, ..PruneConfig::default() };
    let host_ok = replay(&host_problem, &host_config, red.host_ledger.trace()).is_ok_and(|l| l.same_zeros(&red.host_ledger));
    let outcome = Outcome::Infeasible {
        phi_zero_pairs: phi.zero_count(),
        phi_trace_replayed: phi_ok,
        host_seeds: red.seeds.len(),
        host_verdict: red.verdict,
        host_trace_replayed: host_ok,
        closed_walk_length: first_closed_walk(red.host_ledger.trace()),
    };
    Ok((outcome, PairArtifact::Certificate { phi, host: red.host_ledger, host_seeds: red.seeds }))
}

/// Checks every ordered pair at replacement level: witnesses for comparable
/// pairs, infeasibility certificates for the rest. Artifacts are returned
/// only when `keep` is set.
pub fn verify_embedding_with(
    p: &Poset,
    e: &Embedding,
    options: &CheckOptions,
    keep: bool,
) -> (EmbeddingReport, Vec<Option<PairArtifact>>) {
    let j = build_indicator();
    let phis: Vec<Option<ReplacementGraph>> = (0..p.len())
        .map(|i| (phi_size(e.length(i), &j) <= options.phi_budget as u64).then(|| phi_of(&e.dicycles(i), &j)))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..p.len()).flat_map(|x| (0..p.len()).map(move |y| (x, y))).collect();
    let results: Vec<(PairRealization, Option<PairArtifact>)> = pairs
        .into_par_iter()
        .map(|xy| {
            let (row, art) = realize_pair(p, e, &phis, xy, options);
            (row, if keep { art } else { None })
        })
        .collect();
    let (rows, arts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let realized = rows.iter().filter(|r| r.realized).count();
    let total = rows.len();
    (EmbeddingReport { encoding: e.clone(), pairs: rows, realized, total, full: realized == total }, arts)
}

pub fn verify_embedding(p: &Poset, options: &CheckOptions) -> Result<EmbeddingReport, PosetError> {
    let e = encode(p, &EncodeOptions::default())?;
    Ok(verify_embedding_with(p, &e, options, false).0)
}
