//! Partially ordered traces and their weighted multisets.
//!
//! One trace of a process instance is represented as a strict partial order
//! over node handles; each handle carries a payload, initially an indexed
//! activity instance and later, during discovery, an arbitrary submodel.
//! Unordered node pairs denote concurrency. Identical traces are folded into
//! variants with a multiplicity count.
//!
//! Edge sets are stored transitively closed: the precedence relation derived
//! from execution intervals ("completes strictly before the other starts") is
//! transitive pointwise, so the stored relation always equals its own
//! closure and the invariant is cheap to maintain under projection and
//! substitution.

use crate::intervals::{IntervalEvent, IntervalLog};
use crate::powl::PowlModel;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PotError {
    #[error("a trace must contain at least one node")]
    EmptyCase,
    #[error("the interval log contains no cases")]
    EmptyLog,
    #[error("edge ({0}, {1}) references an unknown node")]
    UnknownNode(u32, u32),
    #[error("edges must be irreflexive, found self-edge on node {0}")]
    SelfEdge(u32),
    #[error("edges must be acyclic, found opposing edges between {0} and {1}")]
    Cycle(u32, u32),
    #[error("stored edges must equal their transitive closure, missing ({0}, {1})")]
    NotClosed(u32, u32),
}

/// Handle for one node of a partially ordered trace. Identity is scoped to
/// the containing [`Pot`] or [`PotMultiset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A partially ordered trace: payload-carrying nodes under a strict partial
/// order whose stored edge set equals its transitive closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pot {
    nodes: BTreeMap<NodeId, PowlModel>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl Pot {
    /// Builds a trace from payloads and edges given as positions into
    /// `payloads`. The edge set must already be transitively closed;
    /// irreflexivity and asymmetry are checked as well.
    pub fn new(
        payloads: Vec<PowlModel>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Pot, PotError> {
        if payloads.is_empty() {
            return Err(PotError::EmptyCase);
        }
        let n = payloads.len();
        let nodes: BTreeMap<NodeId, PowlModel> = payloads
            .into_iter()
            .enumerate()
            .map(|(i, p)| (NodeId(i as u32), p))
            .collect();
        let mut edge_set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(PotError::UnknownNode(i as u32, j as u32));
            }
            edge_set.insert((NodeId(i as u32), NodeId(j as u32)));
        }
        let pot = Pot {
            nodes,
            edges: edge_set,
        };
        pot.validate()?;
        Ok(pot)
    }

    /// Like [`Pot::new`] but closes the given relation transitively first.
    pub fn from_relation(
        payloads: Vec<PowlModel>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Pot, PotError> {
        if payloads.is_empty() {
            return Err(PotError::EmptyCase);
        }
        let n = payloads.len();
        let mut relation: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(PotError::UnknownNode(i as u32, j as u32));
            }
            relation.insert((i, j));
        }
        let closed = close_usize(&relation, n);
        Pot::new(payloads, closed)
    }

    fn validate(&self) -> Result<(), PotError> {
        for &(a, b) in &self.edges {
            if a == b {
                return Err(PotError::SelfEdge(a.0));
            }
            if self.edges.contains(&(b, a)) {
                return Err(PotError::Cycle(a.0, b.0));
            }
        }
        for &(a, b) in &self.edges {
            for &(b2, c) in self.edges.range((b, NodeId(0))..=(b, NodeId(u32::MAX))) {
                debug_assert_eq!(b, b2);
                if !self.edges.contains(&(a, c)) {
                    return Err(PotError::NotClosed(a.0, c.0));
                }
            }
        }
        Ok(())
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn payload(&self, id: NodeId) -> Option<&PowlModel> {
        self.nodes.get(&id)
    }

    pub fn edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.contains(&(from, to))
    }

    /// The transitive reduction of the stored (closed) relation: an edge
    /// survives unless it is implied by a two-step path.
    pub fn transitive_reduction(&self) -> BTreeSet<(NodeId, NodeId)> {
        self.edges
            .iter()
            .filter(|&&(a, b)| {
                !self
                    .nodes
                    .keys()
                    .any(|&w| w != a && w != b && self.has_edge(a, w) && self.has_edge(w, b))
            })
            .copied()
            .collect()
    }

    /// Deterministic folding key: payload identity tokens sorted, then the
    /// edge list over those tokens.
    pub fn canonical_form(&self) -> String {
        let mut out = String::new();
        for (i, payload) in self.nodes.values().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&payload_identity(payload));
        }
        out.push('|');
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&payload_identity(&self.nodes[a]));
            out.push('<');
            out.push_str(&payload_identity(&self.nodes[b]));
        }
        out
    }
}

fn close_usize(relation: &BTreeSet<(usize, usize)>, n: usize) -> BTreeSet<(usize, usize)> {
    let mut matrix = vec![false; n * n];
    for &(i, j) in relation {
        matrix[i * n + j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if matrix[i * n + k] {
                for j in 0..n {
                    if matrix[k * n + j] {
                        matrix[i * n + j] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| matrix[i * n + j])
        .collect()
}

/// Identity serialization of a payload: canonical key plus leaf indexes, so
/// that `(a, 1)` and `(a, 2)` stay distinct while equal instances unify.
pub(crate) fn payload_identity(payload: &PowlModel) -> String {
    match payload {
        PowlModel::Transition { label, index } => {
            let mut out = String::from("t(");
            for ch in label.chars() {
                if matches!(ch, '\\' | '(' | ')' | ',' | ';' | '>' | '#' | '<' | '|') {
                    out.push('\\');
                }
                out.push(ch);
            }
            out.push_str(&format!(")#{index}"));
            out
        }
        PowlModel::Silent { index } => format!("tau#{index}"),
        PowlModel::Xor { children } => {
            let mut parts: Vec<String> = children.iter().map(payload_identity).collect();
            parts.sort();
            format!("x({})", parts.join(","))
        }
        PowlModel::Loop { do_part, redo_part } => {
            format!(
                "l({},{})",
                payload_identity(do_part),
                payload_identity(redo_part)
            )
        }
        PowlModel::Order { children, edges } => {
            let parts: Vec<String> = children.iter().map(payload_identity).collect();
            let edge_parts: Vec<String> = edges.iter().map(|(a, b)| format!("{a}>{b}")).collect();
            format!("o({};{})", parts.join(","), edge_parts.join(","))
        }
    }
}

/// Derives the partially ordered trace of one case: one node per interval
/// event, instance indexes assigned per label in order of start and end
/// timestamps, and an edge wherever one interval completes strictly before
/// another starts.
pub fn build_pot(intervals: &[IntervalEvent]) -> Result<Pot, PotError> {
    if intervals.is_empty() {
        return Err(PotError::EmptyCase);
    }
    debug_assert!(
        intervals.windows(2).all(|w| w[0].case_id == w[1].case_id),
        "all intervals must belong to one case"
    );
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by_key(|&i| (intervals[i].start, intervals[i].end, i));

    let mut label_counters: BTreeMap<&str, u32> = BTreeMap::new();
    let mut payloads = vec![PowlModel::silent(); intervals.len()];
    let mut position_of = vec![0usize; intervals.len()];
    for (position, &i) in order.iter().enumerate() {
        let counter = label_counters
            .entry(intervals[i].label.as_str())
            .or_insert(0);
        *counter += 1;
        payloads[position] = PowlModel::transition_indexed(intervals[i].label.clone(), *counter);
        position_of[i] = position;
    }

    let mut edges = BTreeSet::new();
    for (i, a) in intervals.iter().enumerate() {
        for (j, b) in intervals.iter().enumerate() {
            if i != j && a.end < b.start {
                edges.insert((position_of[i], position_of[j]));
            }
        }
    }
    Pot::new(payloads, edges)
}

/// A weighted multiset of partially ordered traces over a shared node
/// universe. Node handles with equal payload identity are unified across
/// variants, so presence profiles and co-occurrence are well defined.
#[derive(Debug, Clone)]
pub struct PotMultiset {
    payloads: BTreeMap<NodeId, PowlModel>,
    variants: Vec<(PotVariant, u64)>,
    next_id: u32,
}

/// One variant: the node set and (closed) edge set of a trace shape, with
/// handles into the owning multiset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PotVariant {
    pub(crate) nodes: BTreeSet<NodeId>,
    pub(crate) edges: BTreeSet<(NodeId, NodeId)>,
}

impl PotVariant {
    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(&id)
    }
}

impl PotMultiset {
    /// Folds standalone traces into a multiset, unifying nodes by payload
    /// identity. Traces with identical node and edge sets become one variant
    /// with a summed count.
    pub fn from_pots(pots: impl IntoIterator<Item = Pot>) -> Result<PotMultiset, PotError> {
        let mut interned: BTreeMap<String, NodeId> = BTreeMap::new();
        let mut payloads: BTreeMap<NodeId, PowlModel> = BTreeMap::new();
        let mut next_id = 0u32;
        let mut folded: BTreeMap<PotVariant, u64> = BTreeMap::new();
        let mut seen_any = false;

        for pot in pots {
            seen_any = true;
            if pot.is_empty() {
                return Err(PotError::EmptyCase);
            }
            let mut translate: BTreeMap<NodeId, NodeId> = BTreeMap::new();
            for (local, payload) in &pot.nodes {
                let key = payload_identity(payload);
                let global = *interned.entry(key).or_insert_with(|| {
                    let id = NodeId(next_id);
                    next_id += 1;
                    payloads.insert(id, payload.clone());
                    id
                });
                translate.insert(*local, global);
            }
            let variant = PotVariant {
                nodes: pot.nodes.keys().map(|local| translate[local]).collect(),
                edges: pot
                    .edges
                    .iter()
                    .map(|(a, b)| (translate[a], translate[b]))
                    .collect(),
            };
            *folded.entry(variant).or_insert(0) += 1;
        }
        if !seen_any {
            return Err(PotError::EmptyLog);
        }
        Ok(PotMultiset {
            payloads,
            variants: folded.into_iter().collect(),
            next_id,
        })
    }

    /// Constructs a multiset directly from variants over explicit payloads.
    /// Intended for tests and generators; positions index into `payloads`.
    pub fn from_parts(
        payloads: Vec<PowlModel>,
        variants: impl IntoIterator<Item = (Vec<usize>, Vec<(usize, usize)>, u64)>,
    ) -> Result<PotMultiset, PotError> {
        let n = payloads.len();
        let payload_map: BTreeMap<NodeId, PowlModel> = payloads
            .into_iter()
            .enumerate()
            .map(|(i, p)| (NodeId(i as u32), p))
            .collect();
        let mut folded: BTreeMap<PotVariant, u64> = BTreeMap::new();
        let mut seen_any = false;
        for (nodes, edges, count) in variants {
            seen_any = true;
            if nodes.is_empty() {
                return Err(PotError::EmptyCase);
            }
            for &i in &nodes {
                if i >= n {
                    return Err(PotError::UnknownNode(i as u32, i as u32));
                }
            }
            let node_set: BTreeSet<NodeId> = nodes.iter().map(|&i| NodeId(i as u32)).collect();
            let mut edge_set = BTreeSet::new();
            for (a, b) in edges {
                if !node_set.contains(&NodeId(a as u32)) || !node_set.contains(&NodeId(b as u32)) {
                    return Err(PotError::UnknownNode(a as u32, b as u32));
                }
                edge_set.insert((NodeId(a as u32), NodeId(b as u32)));
            }
            let variant = PotVariant {
                nodes: node_set,
                edges: edge_set,
            };
            variant_as_pot_check(&variant)?;
            *folded.entry(variant).or_insert(0) += count.max(1);
        }
        if !seen_any {
            return Err(PotError::EmptyLog);
        }
        Ok(PotMultiset {
            payloads: payload_map,
            variants: folded.into_iter().collect(),
            next_id: n as u32,
        })
    }

    pub fn variants(&self) -> impl Iterator<Item = (&PotVariant, u64)> {
        self.variants.iter().map(|(v, c)| (v, *c))
    }

    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }

    /// Total number of traces, counting multiplicity.
    pub fn total_count(&self) -> u64 {
        self.variants.iter().map(|(_, c)| c).sum()
    }

    pub fn node_universe(&self) -> BTreeSet<NodeId> {
        self.variants
            .iter()
            .flat_map(|(v, _)| v.nodes.iter().copied())
            .collect()
    }

    pub fn payload(&self, id: NodeId) -> &PowlModel {
        &self.payloads[&id]
    }

    pub fn try_payload(&self, id: NodeId) -> Option<&PowlModel> {
        self.payloads.get(&id)
    }

    /// Nodes of the universe sorted by (canonical key, id): the iteration
    /// order used wherever determinism matters.
    pub fn canonical_nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self.node_universe().into_iter().collect();
        nodes.sort_by(|a, b| {
            self.payloads[a]
                .canonical_key()
                .cmp(&self.payloads[b].canonical_key())
                .then(a.cmp(b))
        });
        nodes
    }

    /// Looks up the handle of a leaf instance by label and index.
    pub fn leaf_node(&self, label: &str, index: u32) -> Option<NodeId> {
        self.payloads.iter().find_map(|(id, p)| match p {
            PowlModel::Transition { label: l, index: i } if l == label && *i == index => Some(*id),
            _ => None,
        })
    }

    pub(crate) fn next_id(&self) -> u32 {
        self.next_id
    }

    pub(crate) fn with_contents(
        payloads: BTreeMap<NodeId, PowlModel>,
        folded: BTreeMap<PotVariant, u64>,
        next_id: u32,
    ) -> PotMultiset {
        PotMultiset {
            payloads,
            variants: folded.into_iter().collect(),
            next_id,
        }
    }

    /// Folding key of a variant, readable and deterministic.
    pub fn variant_key(&self, variant: &PotVariant) -> String {
        let mut out = String::new();
        for (i, id) in variant.nodes.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&payload_identity(&self.payloads[id]));
        }
        out.push('|');
        for (i, (a, b)) in variant.edges.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&payload_identity(&self.payloads[a]));
            out.push('<');
            out.push_str(&payload_identity(&self.payloads[b]));
        }
        out
    }

    /// Labels occurring in the payload of `id`.
    pub fn labels_of(&self, id: NodeId) -> BTreeSet<String> {
        self.payloads[&id].labels()
    }
}

pub(crate) fn variant_as_pot_check(variant: &PotVariant) -> Result<(), PotError> {
    for &(a, b) in &variant.edges {
        if a == b {
            return Err(PotError::SelfEdge(a.0));
        }
        if variant.edges.contains(&(b, a)) {
            return Err(PotError::Cycle(a.0, b.0));
        }
    }
    for &(a, b) in &variant.edges {
        for &(b2, c) in variant.edges.range((b, NodeId(0))..=(b, NodeId(u32::MAX))) {
            debug_assert_eq!(b, b2);
            if !variant.edges.contains(&(a, c)) {
                return Err(PotError::NotClosed(a.0, c.0));
            }
        }
    }
    Ok(())
}

/// Builds the partially ordered event log: one trace per case, folded into
/// weighted variants.
pub fn build_pot_multiset(log: &IntervalLog) -> Result<PotMultiset, PotError> {
    if log.cases().is_empty() {
        return Err(PotError::EmptyLog);
    }
    let mut pots = Vec::with_capacity(log.cases().len());
    for case in log.cases() {
        let intervals = log.intervals_of(case);
        if intervals.is_empty() {
            continue;
        }
        pots.push(build_pot(&intervals)?);
    }
    PotMultiset::from_pots(pots)
}

/// Renders a trace as a Graphviz digraph. Edges are shown as the transitive
/// reduction for readability; node labels show the activity, with `#k`
/// appended for repeated instances.
pub fn export_pot_dot(pot: &Pot) -> String {
    let mut out = String::from("digraph pot {\n  rankdir=LR;\n  node [shape=box];\n");
    for (id, payload) in &pot.nodes {
        let label = match payload {
            PowlModel::Transition { label, index } if *index > 1 => format!("{label}#{index}"),
            PowlModel::Transition { label, .. } => label.clone(),
            PowlModel::Silent { .. } => "τ".to_string(),
            other => other.canonical_key(),
        };
        out.push_str(&format!("  {} [label=\"{}\"];\n", id, escape_dot(&label)));
    }
    for (a, b) in pot.transitive_reduction() {
        out.push_str(&format!("  {a} -> {b};\n"));
    }
    out.push_str("}\n");
    out
}

pub(crate) fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::IntervalOrigin;

    fn interval(label: &str, start: i64, end: i64) -> IntervalEvent {
        IntervalEvent {
            label: label.to_string(),
            case_id: "c1".to_string(),
            start: crate::event_log::Timestamp(start),
            end: crate::event_log::Timestamp(end),
            origin: IntervalOrigin::Matched,
        }
    }

    #[test]
    fn overlapping_intervals_are_concurrent() {
        let pot = build_pot(&[
            interval("x", 0, 2),
            interval("y", 1, 3),
            interval("z", 4, 5),
        ])
        .unwrap();
        let x = find(&pot, "x", 1);
        let y = find(&pot, "y", 1);
        let z = find(&pot, "z", 1);
        assert_eq!(pot.edges().len(), 2);
        assert!(pot.has_edge(x, z));
        assert!(pot.has_edge(y, z));
        assert!(!pot.has_edge(x, y) && !pot.has_edge(y, x));
    }

    #[test]
    fn same_label_instances_are_indexed_by_start() {
        let pot = build_pot(&[interval("a", 2, 6), interval("a", 1, 3)]).unwrap();
        let first = find(&pot, "a", 1);
        let second = find(&pot, "a", 2);
        // (a,1) started at 1, (a,2) at 2; intervals overlap, no edge.
        assert!(pot.edges().is_empty());
        assert_ne!(first, second);
    }

    #[test]
    fn chain_stores_the_closure() {
        let pot = build_pot(&[
            interval("a", 0, 1),
            interval("b", 2, 3),
            interval("c", 4, 5),
        ])
        .unwrap();
        assert_eq!(pot.edges().len(), 3, "a->b, b->c and the implied a->c");
        let reduced = pot.transitive_reduction();
        assert_eq!(reduced.len(), 2);
    }

    #[test]
    fn edge_iff_no_overlap() {
        let intervals = [
            interval("a", 0, 4),
            interval("b", 2, 6),
            interval("c", 5, 9),
            interval("d", 10, 10),
        ];
        let pot = build_pot(&intervals).unwrap();
        let position: Vec<NodeId> = pot.node_ids().collect();
        let sorted = {
            let mut v = intervals.to_vec();
            v.sort_by_key(|i| (i.start, i.end));
            v
        };
        for (i, a) in sorted.iter().enumerate() {
            for (j, b) in sorted.iter().enumerate() {
                if i == j {
                    continue;
                }
                let expected = a.end < b.start;
                assert_eq!(
                    pot.has_edge(position[i], position[j]),
                    expected,
                    "{} -> {}",
                    a.label,
                    b.label
                );
            }
        }
    }

    #[test]
    fn empty_case_is_an_error() {
        assert_eq!(build_pot(&[]).unwrap_err(), PotError::EmptyCase);
    }

    #[test]
    fn folding_sums_counts_of_identical_traces() {
        let a = || PowlModel::transition("a");
        let chain = || Pot::new(vec![a(), PowlModel::transition("b")], [(0usize, 1usize)]).unwrap();
        let single = || Pot::new(vec![a()], []).unwrap();
        let multiset = PotMultiset::from_pots(vec![chain(), single(), chain()]).unwrap();
        let counts: Vec<u64> = multiset.variants().map(|(_, c)| c).collect();
        assert_eq!(multiset.variant_count(), 2);
        assert_eq!(counts.iter().sum::<u64>(), 3);
        assert!(counts.contains(&2));
    }

    #[test]
    fn distinct_edges_make_distinct_variants() {
        let make = |with_edge: bool| {
            let payloads = vec![PowlModel::transition("a"), PowlModel::transition("b")];
            if with_edge {
                Pot::new(payloads, [(0usize, 1usize)]).unwrap()
            } else {
                Pot::new(payloads, []).unwrap()
            }
        };
        let multiset = PotMultiset::from_pots(vec![make(true), make(false)]).unwrap();
        assert_eq!(multiset.variant_count(), 2);
    }

    #[test]
    fn single_case_is_one_variant() {
        let pot = Pot::new(vec![PowlModel::transition("a")], []).unwrap();
        let multiset = PotMultiset::from_pots(vec![pot]).unwrap();
        assert_eq!(multiset.variant_count(), 1);
        assert_eq!(multiset.total_count(), 1);
    }

    #[test]
    fn dot_shows_reduction_of_chain() {
        let pot = Pot::new(
            vec![
                PowlModel::transition("a"),
                PowlModel::transition("b"),
                PowlModel::transition("c"),
            ],
            [(0usize, 1usize), (1, 2), (0, 2)],
        )
        .unwrap();
        let dot = export_pot_dot(&pot);
        assert_eq!(dot.matches(" -> ").count(), 2);
    }

    #[test]
    fn dot_shows_reduction_of_diamond() {
        // a before b and c, both before d: closure has 5 edges, reduction 4.
        let pot = Pot::new(
            vec![
                PowlModel::transition("a"),
                PowlModel::transition("b"),
                PowlModel::transition("c"),
                PowlModel::transition("d"),
            ],
            [(0usize, 1usize), (0, 2), (1, 3), (2, 3), (0, 3)],
        )
        .unwrap();
        let dot = export_pot_dot(&pot);
        assert_eq!(dot.matches(" -> ").count(), 4);
    }

    #[test]
    fn single_node_dot_has_no_edges() {
        let pot = Pot::new(vec![PowlModel::transition("a")], []).unwrap();
        let dot = export_pot_dot(&pot);
        assert_eq!(dot.matches(" -> ").count(), 0);
        assert!(dot.contains("label=\"a\""));
    }

    #[test]
    fn unclosed_edge_set_is_rejected() {
        let err = Pot::new(
            vec![
                PowlModel::transition("a"),
                PowlModel::transition("b"),
                PowlModel::transition("c"),
            ],
            [(0usize, 1usize), (1, 2)],
        )
        .unwrap_err();
        assert_eq!(err, PotError::NotClosed(0, 2));
    }

    fn find(pot: &Pot, label: &str, index: u32) -> NodeId {
        pot.node_ids()
            .find(|&id| {
                matches!(
                    pot.payload(id),
                    Some(PowlModel::Transition { label: l, index: i }) if l == label && *i == index
                )
            })
            .unwrap()
    }
}
