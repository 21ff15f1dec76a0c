//! Recursive model discovery from a multiset of partially ordered traces.
//!
//! The engine runs five steps per recursion level:
//!
//! 1. **Choice mining** — labels that never co-occur in a trace split the
//!    log into branches; each branch is discovered recursively and the
//!    branches are combined with an exclusive choice.
//! 2. **Co-occurrence grouping** — nodes that are always present or absent
//!    together form a coupled block; each block is discovered recursively
//!    and collapsed into one node.
//! 3. **Loop mining** — equivalent nodes signal repetition; each equivalence
//!    class collapses into a loop with a silent redo.
//! 4. **Skip mining** — a node absent from at least one trace becomes an
//!    exclusive choice with a silent branch.
//! 5. **Order aggregation** — the surviving nodes are merged into a single
//!    partial order that keeps exactly the precedences that are present and
//!    never contradicted across the traces.
//!
//! All iteration orders are canonical (keys, then ids), so discovery is a
//! pure function of the input multiset.

use crate::pot::{variant_as_pot_check, NodeId, PotMultiset, PotVariant};
use crate::powl::PowlModel;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiscoveryError {
    #[error("the multiset of traces is empty")]
    EmptyMultiset,
    #[error("traces must contain at least one node")]
    EmptyVariant,
    #[error("node {0} is not part of the multiset")]
    UnknownNode(NodeId),
    #[error("substitution target set must not be empty")]
    EmptySubstitution,
    #[error("replacement node {0} already occurs in the multiset")]
    IdentityCollision(NodeId),
    #[error("substitution produced an invalid partial order: {0}")]
    BrokenOrder(String),
}

/// A partition of the activity labels into mutually exclusive parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGroup {
    parts: Vec<BTreeSet<String>>,
}

impl ConflictGroup {
    pub fn parts(&self) -> &[BTreeSet<String>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Result of order aggregation: the final relation plus the intermediate
/// relations that produced it.
#[derive(Debug, Clone)]
pub struct AggregatedOrder {
    pub nodes: BTreeSet<NodeId>,
    /// The pruned, transitive relation.
    pub edges: BTreeSet<(NodeId, NodeId)>,
    /// Precedences present in some trace and contradicted by none.
    pub base: BTreeSet<(NodeId, NodeId)>,
    /// Base closed under reachability, minus contradicted pairs.
    pub extended: BTreeSet<(NodeId, NodeId)>,
    /// Edges removed to restore transitivity, in removal order.
    pub pruned: Vec<(NodeId, NodeId)>,
}

impl AggregatedOrder {
    /// (base edges, inferred edges, pruned edges)
    pub fn diagnostics(&self) -> (usize, usize, usize) {
        (
            self.base.len(),
            self.extended.len() - self.base.len(),
            self.pruned.len(),
        )
    }
}

impl PotMultiset {
    /// Restricts every variant to `keep`, dropping variants whose restriction
    /// is empty and re-folding equal restrictions.
    pub fn project(&self, keep: &BTreeSet<NodeId>) -> Result<PotMultiset, DiscoveryError> {
        let universe = self.node_universe();
        if let Some(&missing) = keep.iter().find(|id| !universe.contains(id)) {
            return Err(DiscoveryError::UnknownNode(missing));
        }
        let mut folded: BTreeMap<PotVariant, u64> = BTreeMap::new();
        for (variant, count) in self.variants() {
            let nodes: BTreeSet<NodeId> = variant.nodes().intersection(keep).copied().collect();
            if nodes.is_empty() {
                continue;
            }
            let edges: BTreeSet<(NodeId, NodeId)> = variant
                .edges()
                .iter()
                .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
                .copied()
                .collect();
            *folded.entry(PotVariant { nodes, edges }).or_insert(0) += count;
        }
        let payloads = keep
            .iter()
            .map(|id| (*id, self.payload(*id).clone()))
            .collect();
        Ok(PotMultiset::with_contents(payloads, folded, self.next_id()))
    }

    /// Replaces the nodes in `old` by a single fresh node carrying `payload`.
    /// The fresh node inherits exactly the unanimous precedences: it precedes
    /// a node iff every present old node did, and follows one iff that node
    /// preceded every present old node.
    pub fn substitute(
        &self,
        old: &BTreeSet<NodeId>,
        payload: PowlModel,
    ) -> Result<(PotMultiset, NodeId), DiscoveryError> {
        let replacement = NodeId(self.next_id());
        let multiset = self.substitute_as(old, replacement, payload)?;
        Ok((multiset, replacement))
    }

    /// [`PotMultiset::substitute`] with an explicit replacement handle.
    pub fn substitute_as(
        &self,
        old: &BTreeSet<NodeId>,
        replacement: NodeId,
        payload: PowlModel,
    ) -> Result<PotMultiset, DiscoveryError> {
        if old.is_empty() {
            return Err(DiscoveryError::EmptySubstitution);
        }
        let universe = self.node_universe();
        if let Some(&missing) = old.iter().find(|id| !universe.contains(id)) {
            return Err(DiscoveryError::UnknownNode(missing));
        }
        if universe.contains(&replacement) || self.try_payload(replacement).is_some() {
            return Err(DiscoveryError::IdentityCollision(replacement));
        }

        let mut folded: BTreeMap<PotVariant, u64> = BTreeMap::new();
        for (variant, count) in self.variants() {
            let present: Vec<NodeId> = variant.nodes().intersection(old).copied().collect();
            let substituted = if present.is_empty() {
                variant.clone()
            } else {
                let mut nodes: BTreeSet<NodeId> =
                    variant.nodes().difference(old).copied().collect();
                nodes.insert(replacement);
                let mut edges: BTreeSet<(NodeId, NodeId)> = variant
                    .edges()
                    .iter()
                    .filter(|(a, b)| !old.contains(a) && !old.contains(b))
                    .copied()
                    .collect();
                for &other in variant.nodes() {
                    if old.contains(&other) {
                        continue;
                    }
                    if present
                        .iter()
                        .all(|&s| variant.edges().contains(&(s, other)))
                    {
                        edges.insert((replacement, other));
                    }
                    if present
                        .iter()
                        .all(|&t| variant.edges().contains(&(other, t)))
                    {
                        edges.insert((other, replacement));
                    }
                }
                PotVariant { nodes, edges }
            };
            variant_as_pot_check(&substituted)
                .map_err(|e| DiscoveryError::BrokenOrder(e.to_string()))?;
            *folded.entry(substituted).or_insert(0) += count;
        }

        let mut payloads: BTreeMap<NodeId, PowlModel> = BTreeMap::new();
        let remaining: BTreeSet<NodeId> = folded
            .keys()
            .flat_map(|v| v.nodes().iter().copied())
            .collect();
        for id in &remaining {
            if *id == replacement {
                payloads.insert(*id, payload.clone());
            } else {
                payloads.insert(*id, self.payload(*id).clone());
            }
        }
        let next = self.next_id().max(replacement.0 + 1);
        Ok(PotMultiset::with_contents(payloads, folded, next))
    }
}

/// Partitions the labels of the multiset into mutually exclusive parts, when
/// possible. Two labels are connected iff they appear in the same trace;
/// the connected components of that relation form the single canonical
/// maximal conflict group. Returns `None` when everything is connected.
pub fn conflict_partition(m: &PotMultiset) -> Option<ConflictGroup> {
    let universe = m.node_universe();
    let mut all_labels: BTreeSet<String> = BTreeSet::new();
    for &id in &universe {
        let labels = m.labels_of(id);
        if labels.is_empty() {
            // A label-free node fits every part; no meaningful split exists.
            return None;
        }
        all_labels.extend(labels);
    }

    let index: BTreeMap<&String, usize> =
        all_labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut dsu = DisjointSets::new(all_labels.len());
    for (variant, _) in m.variants() {
        let mut first: Option<usize> = None;
        for &node in variant.nodes() {
            for label in m.labels_of(node) {
                let i = index[&label];
                match first {
                    None => first = Some(i),
                    Some(f) => dsu.union(f, i),
                }
            }
        }
    }

    let mut components: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for label in &all_labels {
        components
            .entry(dsu.find(index[label]))
            .or_default()
            .insert(label.clone());
    }
    if components.len() < 2 {
        return None;
    }
    let mut parts: Vec<BTreeSet<String>> = components.into_values().collect();
    parts.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
    Some(ConflictGroup { parts })
}

/// Groups the nodes by presence profile: two nodes share a block iff every
/// trace contains either both or neither. Blocks are returned in canonical
/// order.
pub fn cooccurrence_partition(m: &PotMultiset) -> Vec<BTreeSet<NodeId>> {
    let mut profiles: BTreeMap<Vec<bool>, BTreeSet<NodeId>> = BTreeMap::new();
    for &node in &m.node_universe() {
        let profile: Vec<bool> = m.variants().map(|(v, _)| v.contains(node)).collect();
        profiles.entry(profile).or_default().insert(node);
    }
    let mut blocks: Vec<BTreeSet<NodeId>> = profiles.into_values().collect();
    blocks.sort_by_key(|block| {
        let first = block
            .iter()
            .min_by(|a, b| {
                m.payload(**a)
                    .canonical_key()
                    .cmp(&m.payload(**b).canonical_key())
                    .then(a.cmp(b))
            })
            .copied();
        first.map(|id| (m.payload(id).canonical_key(), id))
    });
    blocks
}

/// Partitions `nodes` into classes of equivalent payloads (same canonical
/// key). Classes and members are in canonical order.
pub fn equivalence_classes(m: &PotMultiset, nodes: &BTreeSet<NodeId>) -> Vec<Vec<NodeId>> {
    let mut classes: BTreeMap<String, Vec<NodeId>> = BTreeMap::new();
    for &node in nodes {
        classes
            .entry(m.payload(node).canonical_key())
            .or_default()
            .push(node);
    }
    classes.into_values().collect()
}

/// Aggregates all variants into one partial order over the node universe.
///
/// With `n(u,v)` the number of traces (counting multiplicity) containing
/// both nodes and `e(u,v)` the number containing the edge:
/// a base edge needs `e >= 1` and `e = n`; an extended edge needs
/// reachability in the closed base relation and `e = n`; pruning then
/// removes minimal-support edges until the relation is transitive.
pub fn combine_orders(m: &PotMultiset) -> AggregatedOrder {
    let nodes: Vec<NodeId> = m.node_universe().into_iter().collect();
    let n = nodes.len();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, id)| (*id, i)).collect();

    let mut together = vec![0u64; n * n];
    let mut support = vec![0u64; n * n];
    for (variant, count) in m.variants() {
        let present: Vec<usize> = variant.nodes().iter().map(|id| index[id]).collect();
        for &i in &present {
            for &j in &present {
                if i != j {
                    together[i * n + j] += count;
                }
            }
        }
        for (a, b) in variant.edges() {
            support[index[a] * n + index[b]] += count;
        }
    }

    let mut base: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && support[i * n + j] >= 1 && support[i * n + j] == together[i * n + j] {
                base.insert((nodes[i], nodes[j]));
            }
        }
    }

    // Reachability over the base relation.
    let mut reach = vec![false; n * n];
    for (a, b) in &base {
        reach[index[a] * n + index[b]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i * n + k] {
                for j in 0..n {
                    if reach[k * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }

    let mut extended: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && reach[i * n + j] && support[i * n + j] == together[i * n + j] {
                extended.insert((nodes[i], nodes[j]));
            }
        }
    }

    let support_of = |edge: &(NodeId, NodeId)| support[index[&edge.0] * n + index[&edge.1]];
    let mut edges = extended.clone();
    let mut pruned = Vec::new();
    loop {
        let mut legs: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
        for &(a, b) in &edges {
            for &(b2, c) in edges.range((b, NodeId(0))..=(b, NodeId(u32::MAX))) {
                debug_assert_eq!(b, b2);
                if !edges.contains(&(a, c)) {
                    legs.insert((a, b));
                    legs.insert((b, c));
                }
            }
        }
        if legs.is_empty() {
            break;
        }
        let victim = legs
            .into_iter()
            .min_by(|x, y| {
                support_of(x)
                    .cmp(&support_of(y))
                    .then_with(|| {
                        m.payload(x.0)
                            .canonical_key()
                            .cmp(&m.payload(y.0).canonical_key())
                    })
                    .then_with(|| {
                        m.payload(x.1)
                            .canonical_key()
                            .cmp(&m.payload(y.1).canonical_key())
                    })
                    .then(x.cmp(y))
            })
            .expect("non-empty");
        edges.remove(&victim);
        pruned.push(victim);
    }

    AggregatedOrder {
        nodes: nodes.into_iter().collect(),
        edges,
        base,
        extended,
        pruned,
    }
}

/// Discovers a process model that fits every trace of the multiset: every
/// linearization of every input trace is accepted by the result.
pub fn discover(m: &PotMultiset) -> Result<PowlModel, DiscoveryError> {
    if m.variant_count() == 0 {
        return Err(DiscoveryError::EmptyMultiset);
    }
    if m.variants().any(|(v, _)| v.nodes().is_empty()) {
        return Err(DiscoveryError::EmptyVariant);
    }
    let model = discover_level(m.clone())?;
    Ok(model.canonicalize())
}

fn discover_level(mut m: PotMultiset) -> Result<PowlModel, DiscoveryError> {
    let universe = m.node_universe();
    if universe.len() == 1 {
        let only = universe.into_iter().next().expect("len checked");
        return Ok(m.payload(only).clone());
    }

    // Step 1: choice mining over the conflict partition. Every node's labels
    // fall into exactly one part, so the branch node sets cover the universe
    // and the substitution collapses the multiset to a single node.
    if let Some(group) = conflict_partition(&m) {
        let mut branches = Vec::with_capacity(group.len());
        let mut covered: BTreeSet<NodeId> = BTreeSet::new();
        for part in group.parts() {
            let branch_nodes: BTreeSet<NodeId> = m
                .node_universe()
                .into_iter()
                .filter(|id| m.labels_of(*id).is_subset(part))
                .collect();
            debug_assert!(!branch_nodes.is_empty());
            branches.push(discover_level(m.project(&branch_nodes)?)?);
            covered.extend(branch_nodes);
        }
        debug_assert_eq!(covered, m.node_universe());
        let xor = PowlModel::xor(branches).expect("conflict groups have at least two parts");
        let (next, _) = m.substitute(&covered, xor)?;
        m = next;
    }

    // Step 2: collapse coupled blocks. Singleton blocks are left in place;
    // recursing on them would only rename the node.
    let blocks = cooccurrence_partition(&m);
    if blocks.len() > 1 {
        for block in blocks {
            if block.len() < 2 {
                continue;
            }
            let submodel = discover_level(m.project(&block)?)?;
            let (next, _) = m.substitute(&block, submodel)?;
            m = next;
        }
    }

    // Step 3: merge equivalence classes into loops. The representative is
    // the canonically smallest member; equivalence makes the choice
    // semantically irrelevant.
    let classes = equivalence_classes(&m, &m.node_universe());
    for class in classes {
        if class.len() < 2 {
            continue;
        }
        let representative = class[0];
        let looped = PowlModel::loop_model(m.payload(representative).clone(), PowlModel::silent());
        let class_set: BTreeSet<NodeId> = class.into_iter().collect();
        let (next, _) = m.substitute(&class_set, looped)?;
        m = next;
    }

    // Step 4: make optional nodes skippable.
    for node in m.canonical_nodes() {
        if m.variants().any(|(v, _)| !v.contains(node)) {
            let wrapped = PowlModel::xor(vec![m.payload(node).clone(), PowlModel::silent()])
                .expect("two children");
            let (next, _) = m.substitute(&BTreeSet::from([node]), wrapped)?;
            m = next;
        }
    }

    // Step 5: aggregate the survivors into one partial order.
    let remaining = m.canonical_nodes();
    if remaining.len() == 1 {
        return Ok(m.payload(remaining[0]).clone());
    }
    let aggregated = combine_orders(&m);
    let position: BTreeMap<NodeId, usize> = remaining
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let children: Vec<PowlModel> = remaining.iter().map(|id| m.payload(*id).clone()).collect();
    let edges: Vec<(usize, usize)> = aggregated
        .edges
        .iter()
        .map(|(a, b)| (position[a], position[b]))
        .collect();
    PowlModel::order(children, edges).map_err(|e| DiscoveryError::BrokenOrder(e.to_string()))
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> DisjointSets {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
