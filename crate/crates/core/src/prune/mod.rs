//! Zero-forcing for quantum homomorphisms.
//!
//! A ledger collects pairs `(x, y)` for which `E_{x,y} = 0` in every quantum
//! homomorphism `X -> Y`. If some source vertex loses all of its targets the
//! projections at that vertex cannot sum to the identity and the instance is
//! infeasible; otherwise the verdict is merely unknown.

mod ledger;
mod rules;
pub mod walk;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ledger::{Justification, NamedTraceEntry, TraceEntry, Verdict, ZeroLedger};
pub use rules::{
    roles_from_labels, rule_closed_walk, rule_color_localization, rule_pair_walk, rule_support,
    FlaggedProduct, PairRequest, Tables,
};
pub use walk::{joint_horizon, walk_table, WalkTable};

use crate::gadget::ColorMask;
use crate::graph::{weak_components, Graph, Kind};

/// Walk bound used when none is given: `|V(X)| * |V(Y)|`, capped.
pub const MAX_DEFAULT_BOUND: usize = 4096;

pub fn default_bound(x: &Graph, y: &Graph) -> usize {
    x.vertex_count().saturating_mul(y.vertex_count()).min(MAX_DEFAULT_BOUND)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PruneError {
    #[error("source is a {source_kind} but target is a {target_kind}")]
    KindMismatch { source_kind: Kind, target_kind: Kind },
    #[error("color rule needs target color classes (replacement metadata)")]
    MissingTargetColors,
    #[error("{what} has {found} entries, expected {expected}")]
    Shape { what: &'static str, found: usize, expected: usize },
    #[error("unknown rule {0:?} (expected closed-walk, support, pair-walk or color)")]
    UnknownRule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    ClosedWalk,
    Support,
    PairWalk,
    Color,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] = [RuleKind::ClosedWalk, RuleKind::Support, RuleKind::PairWalk, RuleKind::Color];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::ClosedWalk => "closed-walk",
            RuleKind::Support => "support",
            RuleKind::PairWalk => "pair-walk",
            RuleKind::Color => "color",
        }
    }

    /// Parses a comma-separated list such as `closed-walk,support`.
    pub fn parse_list(s: &str) -> Result<Vec<RuleKind>, PruneError> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let r = part.parse()?;
            if !out.contains(&r) {
                out.push(r);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = PruneError;

    fn from_str(s: &str) -> Result<Self, PruneError> {
        RuleKind::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| PruneError::UnknownRule(s.to_string()))
    }
}

/// Source and target graphs with the optional color data used by the color rule.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub source: &'a Graph,
    pub target: &'a Graph,
    /// Roles of source vertices; defaults to the `role` labels of the source.
    pub source_roles: Vec<ColorMask>,
    /// Color classes of target vertices, from replacement metadata.
    pub target_colors: Option<Vec<ColorMask>>,
}

impl<'a> Problem<'a> {
    pub fn new(source: &'a Graph, target: &'a Graph) -> Self {
        Problem { source, target, source_roles: roles_from_labels(source), target_colors: None }
    }

    pub fn with_target_colors(mut self, colors: Vec<ColorMask>) -> Self {
        self.target_colors = Some(colors);
        self
    }

    pub fn with_source_roles(mut self, roles: Vec<ColorMask>) -> Self {
        self.source_roles = roles;
        self
    }

    fn validate(&self, config: &PruneConfig) -> Result<(), PruneError> {
        let (sk, tk) = (self.source.kind(), self.target.kind());
        if sk != tk {
            return Err(PruneError::KindMismatch { source_kind: sk, target_kind: tk });
        }
        let shape = |what, found, expected| {
            if found == expected {
                Ok(())
            } else {
                Err(PruneError::Shape { what, found, expected })
            }
        };
        shape("source roles", self.source_roles.len(), self.source.vertex_count())?;
        match &self.target_colors {
            Some(c) => shape("target colors", c.len(), self.target.vertex_count())?,
            None if config.rules.contains(&RuleKind::Color) => return Err(PruneError::MissingTargetColors),
            None => {}
        }
        Ok(())
    }

    /// The sub-instance against the target vertices `keep` (sorted indices).
    fn restrict(&self, sub: &'a Graph, keep: &[usize]) -> Problem<'a> {
        Problem {
            source: self.source,
            target: sub,
            source_roles: self.source_roles.clone(),
            target_colors: self.target_colors.as_ref().map(|c| keep.iter().map(|&v| c[v]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneConfig {
    /// Walk bound `L`; `None` means [`default_bound`].
    pub bound: Option<usize>,
    /// Enabled rules, applied in this order in every round.
    pub rules: Vec<RuleKind>,
    /// Pair-walk partners are source vertices within this distance.
    pub pair_distance: usize,
    /// Additional pair-walk partners `(x, x2)`, used in both orders.
    pub extra_pairs: Vec<(usize, usize)>,
    /// Branch per target component when the source is connected.
    pub split_components: bool,
    /// Pairs known to be zero in advance.
    pub seeds: Vec<(usize, usize)>,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            bound: None,
            rules: vec![RuleKind::ClosedWalk, RuleKind::Support, RuleKind::PairWalk],
            pair_distance: 2,
            extra_pairs: Vec::new(),
            split_components: true,
            seeds: Vec::new(),
        }
    }
}

impl PruneConfig {
    pub fn with_rules(rules: &[RuleKind]) -> Self {
        PruneConfig { rules: rules.to_vec(), ..Default::default() }
    }

    fn needs_walks(&self) -> bool {
        self.rules.iter().any(|r| matches!(r, RuleKind::ClosedWalk | RuleKind::PairWalk))
    }
}

/// Incremental support propagation: each new zero `(x', y')` re-examines only
/// the pairs whose support it could have removed.
struct SupportState {
    succ: Vec<FixedBitSet>,
    pred: Vec<FixedBitSet>,
    cursor: usize,
    swept: bool,
}

impl SupportState {
    fn new(y: &Graph) -> Self {
        SupportState { succ: y.succ_bits(), pred: y.pred_bits(), cursor: 0, swept: false }
    }

    /// Kills `(x, y)` for every `x` adjacent to `xn` if `y` has no live
    /// neighbour of `xn` in the matching direction.
    fn check(&self, x: &Graph, ledger: &mut ZeroLedger, xn: usize, ty: usize) {
        let j = Justification::Support { neighbor: xn as u32 };
        if self.succ[ty].is_subset(ledger.row(xn)) {
            for &sx in x.pred(xn) {
                ledger.insert(TraceEntry::new(sx, ty, j));
            }
        }
        if x.is_directed() && self.pred[ty].is_subset(ledger.row(xn)) {
            for &sx in x.succ(xn) {
                ledger.insert(TraceEntry::new(sx, ty, j));
            }
        }
    }

    fn run(&mut self, x: &Graph, y: &Graph, ledger: &mut ZeroLedger) {
        if !self.swept {
            self.swept = true;
            for xn in 0..x.vertex_count() {
                for ty in 0..y.vertex_count() {
                    self.check(x, ledger, xn, ty);
                }
            }
        }
        while self.cursor < ledger.zero_count() {
            let (xn, yn) = ledger.trace()[self.cursor].pair();
            self.cursor += 1;
            for &ty in y.pred(yn) {
                self.check(x, ledger, xn, ty);
            }
            if y.is_directed() {
                for &ty in y.succ(yn) {
                    self.check(x, ledger, xn, ty);
                }
            }
        }
    }
}

struct PairWalkState {
    partners: Vec<(usize, usize, Vec<FixedBitSet>)>,
}

impl PairWalkState {
    fn new(x: &Graph, tables: &Tables, config: &PruneConfig) -> Self {
        let mut wanted: Vec<(usize, usize)> = Vec::new();
        for sx in 0..x.vertex_count() {
            for x2 in rules::near(x, sx, config.pair_distance) {
                wanted.push((sx, x2));
            }
        }
        for &(a, b) in &config.extra_pairs {
            wanted.push((a, b));
            wanted.push((b, a));
        }
        wanted.sort_unstable();
        wanted.dedup();
        let partners = wanted
            .into_iter()
            .filter_map(|(a, b)| tables.good_sets(a, b).map(|g| (a, b, g)))
            .collect();
        PairWalkState { partners }
    }

    fn run(&self, ledger: &mut ZeroLedger) {
        for (sx, x2, good) in &self.partners {
            for ty in ledger.alive(*sx).ones() {
                if good[ty].is_subset(ledger.row(*x2)) {
                    ledger.insert(TraceEntry::new(*sx, ty, Justification::PairWalk { partner: *x2 as u32 }));
                }
            }
        }
    }
}

/// Target components to branch on, if the split applies.
fn branches(problem: &Problem, config: &PruneConfig) -> Option<Vec<Vec<usize>>> {
    if !config.split_components || problem.source.is_empty() {
        return None;
    }
    if weak_components(problem.source).len() != 1 {
        return None;
    }
    let comps = weak_components(problem.target);
    (comps.len() >= 2).then_some(comps)
}

fn branch_config(config: &PruneConfig, bound: usize, keep: &[usize]) -> PruneConfig {
    let local: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    PruneConfig {
        bound: Some(bound),
        split_components: false,
        seeds: config
            .seeds
            .iter()
            .filter_map(|&(sx, ty)| local.get(&ty).map(|&t| (sx, t)))
            .collect(),
        ..config.clone()
    }
}

/// Runs every enabled rule to a common fixed point.
pub fn prune_closure(problem: &Problem, config: &PruneConfig) -> Result<ZeroLedger, PruneError> {
    problem.validate(config)?;
    let (x, y) = (problem.source, problem.target);
    let bound = config.bound.unwrap_or_else(|| default_bound(x, y));
    let mut ledger = ZeroLedger::new(x.vertex_count(), y.vertex_count());
    for &(sx, ty) in &config.seeds {
        ledger.insert(TraceEntry::new(sx, ty, Justification::Seed));
    }

    if let Some(comps) = branches(problem, config) {
        for (i, keep) in comps.iter().enumerate() {
            let sub = y.induced_subgraph(keep);
            let branch = prune_closure(&problem.restrict(&sub, keep), &branch_config(config, bound, keep))?;
            let j = Justification::Component { branch: i as u32 };
            let dead = branch.verdict() == Verdict::Infeasible;
            for sx in 0..x.vertex_count() {
                for (t, &ty) in keep.iter().enumerate() {
                    if dead || branch.is_zero(sx, t) {
                        ledger.insert(TraceEntry::new(sx, ty, j));
                    }
                }
            }
        }
    }

    let tables = config.needs_walks().then(|| Tables::new(x, y, bound));
    let mut support = SupportState::new(y);
    let mut pair_walk: Option<PairWalkState> = None;
    let mut applied_static = false;
    loop {
        let before = ledger.zero_count();
        for rule in &config.rules {
            match rule {
                RuleKind::ClosedWalk if !applied_static => {
                    let t = tables.as_ref().expect("walk tables built for walk rules");
                    for e in rules::closed_walk_with(t) {
                        ledger.insert(e);
                    }
                }
                RuleKind::Color if !applied_static => {
                    let colors = problem.target_colors.as_ref().expect("validated");
                    for e in rule_color_localization(&problem.source_roles, colors) {
                        ledger.insert(e);
                    }
                }
                RuleKind::ClosedWalk | RuleKind::Color => {}
                RuleKind::Support => support.run(x, y, &mut ledger),
                RuleKind::PairWalk => {
                    let t = tables.as_ref().expect("walk tables built for walk rules");
                    pair_walk.get_or_insert_with(|| PairWalkState::new(x, t, config)).run(&mut ledger);
                }
            }
        }
        applied_static = true;
        if ledger.zero_count() == before {
            break;
        }
    }
    Ok(ledger)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace entry {index} ({entry:?}) does not check: {reason}")]
pub struct ReplayError {
    pub index: usize,
    pub entry: TraceEntry,
    pub reason: String,
}

/// Re-derives a trace entry by entry, checking each justification against
/// the zeros established before it. Returns the rebuilt ledger.
pub fn replay(problem: &Problem, config: &PruneConfig, trace: &[TraceEntry]) -> Result<ZeroLedger, ReplayError> {
    let (x, y) = (problem.source, problem.target);
    let bound = config.bound.unwrap_or_else(|| default_bound(x, y));
    let mut ledger = ZeroLedger::new(x.vertex_count(), y.vertex_count());
    let mut tables: Option<Tables> = None;
    let mut branch_ledgers: Option<Vec<(Vec<usize>, ZeroLedger)>> = None;
    for (index, &entry) in trace.iter().enumerate() {
        let fail = |reason: &str| ReplayError { index, entry, reason: reason.to_string() };
        let (sx, ty) = entry.pair();
        if sx >= x.vertex_count() || ty >= y.vertex_count() {
            return Err(fail("pair out of range"));
        }
        if ledger.is_zero(sx, ty) {
            return Err(fail("pair already zero"));
        }
        let ok = match entry.justification {
            Justification::Seed => config.seeds.contains(&(sx, ty)),
            Justification::ClosedWalk { length } => {
                let l = length as usize;
                let t = tables.get_or_insert_with(|| Tables::new(x, y, bound));
                l <= bound && t.source.walk(sx, sx, l) && !t.target.walk(ty, ty, l)
            }
            Justification::Support { neighbor } => {
                let xn = neighbor as usize;
                xn < x.vertex_count()
                    && ((x.has_edge(sx, xn) && y.succ(ty).iter().all(|&v| ledger.is_zero(xn, v)))
                        || (x.has_edge(xn, sx) && y.pred(ty).iter().all(|&v| ledger.is_zero(xn, v))))
            }
            Justification::PairWalk { partner } => {
                let x2 = partner as usize;
                let t = tables.get_or_insert_with(|| Tables::new(x, y, bound));
                x2 < x.vertex_count()
                    && t.good_sets(sx, x2).is_some_and(|g| g[ty].is_subset(ledger.row(x2)))
            }
            Justification::Color { role } => {
                let colors = problem.target_colors.as_ref().ok_or_else(|| fail("no target colors"))?;
                problem.source_roles[sx].contains(role) && !colors[ty].contains(role)
            }
            Justification::Component { branch } => {
                if branch_ledgers.is_none() {
                    let comps = branches(problem, config).ok_or_else(|| fail("component split does not apply"))?;
                    let mut built = Vec::new();
                    for keep in comps {
                        let sub = y.induced_subgraph(&keep);
                        let l = prune_closure(&problem.restrict(&sub, &keep), &branch_config(config, bound, &keep))
                            .map_err(|e| fail(&e.to_string()))?;
                        built.push((keep, l));
                    }
                    branch_ledgers = Some(built);
                }
                let all = branch_ledgers.as_ref().expect("just built");
                match all.get(branch as usize) {
                    Some((keep, l)) => match keep.binary_search(&ty) {
                        Ok(t) => l.verdict() == Verdict::Infeasible || l.is_zero(sx, t),
                        Err(_) => false,
                    },
                    None => false,
                }
            }
        };
        if !ok {
            return Err(fail(&format!("{} justification fails", entry.justification.rule_name())));
        }
        ledger.insert(entry);
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dicycles_to_digraph, directed_cycle, DiCycles};

    #[test]
    fn four_cycle_into_three_and_five() {
        let c4 = directed_cycle(4).unwrap();
        let d = dicycles_to_digraph(&DiCycles::new(vec![3, 5]).unwrap());
        let cfg = PruneConfig { bound: Some(20), ..Default::default() };
        let l = prune_closure(&Problem::new(&c4, &d), &cfg).unwrap();
        assert_eq!(l.verdict(), Verdict::Infeasible);
        assert!(l.trace().iter().any(|e| matches!(e.justification, Justification::Component { .. })));
        let again = replay(&Problem::new(&c4, &d), &cfg, l.trace()).unwrap();
        assert!(again.same_zeros(&l));
    }

    #[test]
    fn divisible_cycles_stay_unknown() {
        let (c6, c3) = (directed_cycle(6).unwrap(), directed_cycle(3).unwrap());
        let l = prune_closure(&Problem::new(&c6, &c3), &PruneConfig::default()).unwrap();
        assert_eq!(l.verdict(), Verdict::Unknown);
        let same = prune_closure(&Problem::new(&c3, &c3), &PruneConfig::default()).unwrap();
        assert_eq!(same.zero_count(), 0);
    }

    #[test]
    fn arc_into_lone_vertex() {
        let arc = Graph::from_parts(Kind::Directed, &["a", "b"], &[("a", "b")]).unwrap();
        let one = Graph::from_parts::<&str>(Kind::Directed, &["u"], &[]).unwrap();
        let cfg = PruneConfig::with_rules(&[RuleKind::Support]);
        let l = prune_closure(&Problem::new(&arc, &one), &cfg).unwrap();
        assert_eq!(l.verdict(), Verdict::Infeasible);
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let (c4, c3) = (directed_cycle(4).unwrap(), directed_cycle(3).unwrap());
        let cfg = PruneConfig::default();
        let l = prune_closure(&Problem::new(&c4, &c3), &cfg).unwrap();
        let mut trace = l.trace().to_vec();
        trace[0].justification = Justification::ClosedWalk { length: 3 };
        let err = replay(&Problem::new(&c4, &c3), &cfg, &trace).unwrap_err();
        assert_eq!(err.index, 0);
    }

    #[test]
    fn rule_names_parse() {
        assert_eq!(
            RuleKind::parse_list("closed-walk, support,support").unwrap(),
            vec![RuleKind::ClosedWalk, RuleKind::Support]
        );
        assert!(RuleKind::parse_list("magic").is_err());
    }

    #[test]
    fn color_without_metadata_is_rejected() {
        let c3 = directed_cycle(3).unwrap();
        let cfg = PruneConfig::with_rules(&[RuleKind::Color]);
        assert_eq!(prune_closure(&Problem::new(&c3, &c3), &cfg).unwrap_err(), PruneError::MissingTargetColors);
    }
}
