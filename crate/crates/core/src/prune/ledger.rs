use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::gadget::Color;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Some source vertex has every target pair forced to zero.
    Infeasible,
    /// No contradiction found. Not a claim of feasibility.
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Infeasible => "infeasible",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Why a pair was forced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Justification {
    /// Supplied by the caller.
    Seed,
    /// Closed walk of this length at the source vertex, none at the target.
    ClosedWalk { length: u32 },
    /// Every target neighbour in the matching direction is already zero for
    /// this source neighbour.
    Support { neighbor: u32 },
    /// Every live target of this partner is unreachable from the target at
    /// some length realised between the source vertices.
    PairWalk { partner: u32 },
    /// The source vertex has this role, the target lacks the color.
    Color { role: Color },
    /// Zero in the closure against one weak component of the target, or that
    /// component admits no assignment at all.
    Component { branch: u32 },
}

impl Justification {
    pub fn rule_name(&self) -> &'static str {
        match self {
            Justification::Seed => "seed",
            Justification::ClosedWalk { .. } => "closed-walk",
            Justification::Support { .. } => "support",
            Justification::PairWalk { .. } => "pair-walk",
            Justification::Color { .. } => "color",
            Justification::Component { .. } => "component",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    pub source: u32,
    pub target: u32,
    pub justification: Justification,
}

impl TraceEntry {
    pub fn new(source: usize, target: usize, justification: Justification) -> Self {
        TraceEntry { source: source as u32, target: target as u32, justification }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.source as usize, self.target as usize)
    }

    /// Serializable form with vertex identifiers in place of indices.
    pub fn named(&self, x: &Graph, y: &Graph) -> NamedTraceEntry {
        let mut e = NamedTraceEntry {
            source: x.name(self.source as usize).to_string(),
            target: y.name(self.target as usize).to_string(),
            rule: self.justification.rule_name(),
            length: None,
            neighbor: None,
            partner: None,
            role: None,
            branch: None,
        };
        match self.justification {
            Justification::Seed => {}
            Justification::ClosedWalk { length } => e.length = Some(length),
            Justification::Support { neighbor } => {
                e.neighbor = Some(x.name(neighbor as usize).to_string())
            }
            Justification::PairWalk { partner } => {
                e.partner = Some(x.name(partner as usize).to_string())
            }
            Justification::Color { role } => e.role = Some(role),
            Justification::Component { branch } => e.branch = Some(branch),
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedTraceEntry {
    pub source: String,
    pub target: String,
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighbor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub role: Option<Color>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<u32>,
}

/// Pairs `(x, y)` proven to carry a zero projection, with their derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroLedger {
    rows: Vec<FixedBitSet>,
    targets: usize,
    trace: Vec<TraceEntry>,
}

impl ZeroLedger {
    pub fn new(sources: usize, targets: usize) -> Self {
        ZeroLedger {
            rows: vec![FixedBitSet::with_capacity(targets); sources],
            targets,
            trace: Vec::new(),
        }
    }

    pub fn source_count(&self) -> usize {
        self.rows.len()
    }

    pub fn target_count(&self) -> usize {
        self.targets
    }

    pub fn is_zero(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    /// Zero targets of source vertex `x`.
    pub fn row(&self, x: usize) -> &FixedBitSet {
        &self.rows[x]
    }

    /// Targets of `x` not yet forced to zero.
    pub fn alive(&self, x: usize) -> FixedBitSet {
        let mut a = self.rows[x].clone();
        a.toggle_range(..);
        a
    }

    /// Records a new zero; returns `false` if it was already known.
    pub fn insert(&mut self, entry: TraceEntry) -> bool {
        let (x, y) = entry.pair();
        if self.rows[x].put(y) {
            return false;
        }
        self.trace.push(entry);
        true
    }

    pub fn zero_count(&self) -> usize {
        self.trace.len()
    }

    pub fn zero_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(x, r)| r.ones().map(move |y| (x, y)))
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    /// First source vertex whose every target is zero.
    pub fn dead_row(&self) -> Option<usize> {
        self.rows.iter().position(|r| r.count_ones(..) == self.targets)
    }

    pub fn verdict(&self) -> Verdict {
        match self.dead_row() {
            Some(_) => Verdict::Infeasible,
            None => Verdict::Unknown,
        }
    }

    /// Same zero set, ignoring derivation order.
    pub fn same_zeros(&self, other: &ZeroLedger) -> bool {
        self.rows == other.rows
    }

    /// `true` if every zero of `self` is a zero of `other`.
    pub fn zeros_subset_of(&self, other: &ZeroLedger) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }
}
