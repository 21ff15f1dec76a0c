//! The hierarchical process model: transitions, exclusive choices, loops,
//! and partial orders over submodels.
//!
//! A model is a tree. Leaves are labeled transitions (or silent steps); inner
//! nodes combine at least two submodels with an exclusive choice, a do/redo
//! loop, or a strict partial order that constrains the execution of its
//! children. Models are immutable after construction and all operations on
//! them are pure.

mod json;
mod semantics;

pub use json::ModelJsonError;
pub use semantics::{
    accepts, enumerate_language, enumerate_language_capped, SemanticsError, DEFAULT_ENUMERATION_CAP,
};

use std::collections::BTreeSet;
use thiserror::Error;

/// Errors raised by model constructors when an invariant would be violated.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("{operator} requires at least two children, got {found}")]
    TooFewChildren {
        operator: &'static str,
        found: usize,
    },
    #[error("order edge ({0}, {1}) is out of range for {2} children")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("order edges must be irreflexive, found self-edge on child {0}")]
    SelfEdge(usize),
    #[error("order edges contain a cycle through children {0} and {1}")]
    CyclicEdges(usize, usize),
    #[error("activity label must be non-empty")]
    EmptyLabel,
}

/// A process model, defined recursively.
///
/// `Transition` and `Silent` are leaves. `Silent` emits nothing when
/// executed. The `index` on a leaf distinguishes repeated instances of the
/// same activity inside one trace or model; it never affects equivalence.
///
/// Children of `Xor` and `Order` are kept sorted by [`canonical_key`]
/// (`Order` edges refer to positions in that sorted order), so structurally
/// equal models built in different child orders compare equal.
///
/// [`canonical_key`]: PowlModel::canonical_key
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PowlModel {
    Transition {
        label: String,
        index: u32,
    },
    Silent {
        index: u32,
    },
    Xor {
        children: Vec<PowlModel>,
    },
    Loop {
        do_part: Box<PowlModel>,
        redo_part: Box<PowlModel>,
    },
    Order {
        children: Vec<PowlModel>,
        edges: BTreeSet<(usize, usize)>,
    },
}

/// Upper bound on the permutations tried when ordering children that share a
/// canonical key inside an `Order`. Beyond it the tied children keep their
/// incoming relative order.
const ORDER_TIE_PERMUTATION_CAP: usize = 720;

impl PowlModel {
    /// A labeled leaf with instance index 1.
    pub fn transition(label: impl Into<String>) -> PowlModel {
        PowlModel::Transition {
            label: label.into(),
            index: 1,
        }
    }

    /// A labeled leaf with an explicit instance index.
    pub fn transition_indexed(label: impl Into<String>, index: u32) -> PowlModel {
        PowlModel::Transition {
            label: label.into(),
            index,
        }
    }

    /// A silent leaf.
    pub fn silent() -> PowlModel {
        PowlModel::Silent { index: 1 }
    }

    pub fn silent_indexed(index: u32) -> PowlModel {
        PowlModel::Silent { index }
    }

    /// Exclusive choice over `children` (at least two). Children are sorted
    /// canonically.
    pub fn xor(children: Vec<PowlModel>) -> Result<PowlModel, ModelError> {
        if children.len() < 2 {
            return Err(ModelError::TooFewChildren {
                operator: "xor",
                found: children.len(),
            });
        }
        let mut children = children;
        children.sort_by_key(|child| child.canonical_key());
        Ok(PowlModel::Xor { children })
    }

    /// Loop with a mandatory `do_part` and a `redo_part` executed between
    /// repetitions.
    pub fn loop_model(do_part: PowlModel, redo_part: PowlModel) -> PowlModel {
        PowlModel::Loop {
            do_part: Box::new(do_part),
            redo_part: Box::new(redo_part),
        }
    }

    /// Partial order over `children` (at least two). `edges` are pairs of
    /// positions into the given `children` slice; the relation is closed
    /// transitively and must be acyclic. Children are re-sorted canonically
    /// and the edges remapped accordingly.
    pub fn order(
        children: Vec<PowlModel>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<PowlModel, ModelError> {
        let n = children.len();
        if n < 2 {
            return Err(ModelError::TooFewChildren {
                operator: "order",
                found: n,
            });
        }
        let mut relation: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(ModelError::EdgeOutOfRange(i, j, n));
            }
            if i == j {
                return Err(ModelError::SelfEdge(i));
            }
            relation.insert((i, j));
        }
        let closed = close_transitively(&relation, n);
        for &(i, j) in &closed {
            if i == j || closed.contains(&(j, i)) {
                return Err(ModelError::CyclicEdges(i, j));
            }
        }
        let perm = canonical_child_order(&children, &closed);
        let mut inverse = vec![0usize; n];
        for (new_pos, &old_pos) in perm.iter().enumerate() {
            inverse[old_pos] = new_pos;
        }
        let mut sorted_children: Vec<PowlModel> = Vec::with_capacity(n);
        let mut taken: Vec<Option<PowlModel>> = children.into_iter().map(Some).collect();
        for &old_pos in &perm {
            sorted_children.push(taken[old_pos].take().expect("permutation is a bijection"));
        }
        let remapped: BTreeSet<(usize, usize)> = closed
            .iter()
            .map(|&(i, j)| (inverse[i], inverse[j]))
            .collect();
        Ok(PowlModel::Order {
            children: sorted_children,
            edges: remapped,
        })
    }

    /// All activity labels occurring in the model. Silent leaves contribute
    /// nothing.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut BTreeSet<String>) {
        match self {
            PowlModel::Transition { label, .. } => {
                out.insert(label.clone());
            }
            PowlModel::Silent { .. } => {}
            PowlModel::Xor { children } => {
                for c in children {
                    c.collect_labels(out);
                }
            }
            PowlModel::Loop { do_part, redo_part } => {
                do_part.collect_labels(out);
                redo_part.collect_labels(out);
            }
            PowlModel::Order { children, .. } => {
                for c in children {
                    c.collect_labels(out);
                }
            }
        }
    }

    /// Structural equivalence: leaves compare by label only (indexes are
    /// ignored), choices by a bijection between equivalent children, loops
    /// positionally, and orders by a bijection that preserves both the
    /// children and the edge relation in both directions.
    pub fn equivalent(&self, other: &PowlModel) -> bool {
        match (self, other) {
            (PowlModel::Transition { label: a, .. }, PowlModel::Transition { label: b, .. }) => {
                a == b
            }
            (PowlModel::Silent { .. }, PowlModel::Silent { .. }) => true,
            (PowlModel::Xor { children: a }, PowlModel::Xor { children: b }) => {
                a.len() == b.len() && multiset_bijection(a, b)
            }
            (
                PowlModel::Loop {
                    do_part: d1,
                    redo_part: r1,
                },
                PowlModel::Loop {
                    do_part: d2,
                    redo_part: r2,
                },
            ) => d1.equivalent(d2) && r1.equivalent(r2),
            (
                PowlModel::Order {
                    children: c1,
                    edges: e1,
                },
                PowlModel::Order {
                    children: c2,
                    edges: e2,
                },
            ) => c1.len() == c2.len() && e1.len() == e2.len() && order_bijection(c1, e1, c2, e2),
            _ => false,
        }
    }

    /// A total serialization of the model that is identical for equivalent
    /// models and distinct otherwise. Keys define the global tie-breaking
    /// order used everywhere determinism matters.
    pub fn canonical_key(&self) -> String {
        let mut out = String::new();
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut String) {
        match self {
            PowlModel::Transition { label, .. } => {
                out.push_str("t(");
                escape_into(label, out);
                out.push(')');
            }
            PowlModel::Silent { .. } => out.push_str("tau"),
            PowlModel::Xor { children } => {
                out.push_str("x(");
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    c.write_key(out);
                }
                out.push(')');
            }
            PowlModel::Loop { do_part, redo_part } => {
                out.push_str("l(");
                do_part.write_key(out);
                out.push(',');
                redo_part.write_key(out);
                out.push(')');
            }
            PowlModel::Order { children, edges } => {
                out.push_str("o(");
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    c.write_key(out);
                }
                out.push(';');
                for (i, (a, b)) in edges.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&format!("{a}>{b}"));
                }
                out.push(')');
            }
        }
    }

    /// Rebuilds the model in fully canonical form: children re-sorted through
    /// the constructors and leaf indexes renumbered 1..m per label in
    /// depth-first order.
    pub fn canonicalize(&self) -> PowlModel {
        let normalized = self.normalized();
        let mut label_counters: std::collections::BTreeMap<String, u32> =
            std::collections::BTreeMap::new();
        let mut silent_counter = 0u32;
        normalized.renumbered(&mut label_counters, &mut silent_counter)
    }

    fn normalized(&self) -> PowlModel {
        match self {
            PowlModel::Transition { .. } | PowlModel::Silent { .. } => self.clone(),
            PowlModel::Xor { children } => {
                let normalized = children.iter().map(|c| c.normalized()).collect();
                PowlModel::xor(normalized).expect("existing model is valid")
            }
            PowlModel::Loop { do_part, redo_part } => {
                PowlModel::loop_model(do_part.normalized(), redo_part.normalized())
            }
            PowlModel::Order { children, edges } => {
                let normalized = children.iter().map(|c| c.normalized()).collect();
                PowlModel::order(normalized, edges.iter().copied())
                    .expect("existing model is valid")
            }
        }
    }

    fn renumbered(
        &self,
        label_counters: &mut std::collections::BTreeMap<String, u32>,
        silent_counter: &mut u32,
    ) -> PowlModel {
        match self {
            PowlModel::Transition { label, .. } => {
                let counter = label_counters.entry(label.clone()).or_insert(0);
                *counter += 1;
                PowlModel::Transition {
                    label: label.clone(),
                    index: *counter,
                }
            }
            PowlModel::Silent { .. } => {
                *silent_counter += 1;
                PowlModel::Silent {
                    index: *silent_counter,
                }
            }
            PowlModel::Xor { children } => PowlModel::Xor {
                children: children
                    .iter()
                    .map(|c| c.renumbered(label_counters, silent_counter))
                    .collect(),
            },
            PowlModel::Loop { do_part, redo_part } => PowlModel::Loop {
                do_part: Box::new(do_part.renumbered(label_counters, silent_counter)),
                redo_part: Box::new(redo_part.renumbered(label_counters, silent_counter)),
            },
            PowlModel::Order { children, edges } => PowlModel::Order {
                children: children
                    .iter()
                    .map(|c| c.renumbered(label_counters, silent_counter))
                    .collect(),
                edges: edges.clone(),
            },
        }
    }

    /// Number of leaves (labeled and silent).
    pub fn leaf_count(&self) -> usize {
        match self {
            PowlModel::Transition { .. } | PowlModel::Silent { .. } => 1,
            PowlModel::Xor { children } => children.iter().map(|c| c.leaf_count()).sum(),
            PowlModel::Loop { do_part, redo_part } => do_part.leaf_count() + redo_part.leaf_count(),
            PowlModel::Order { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    /// Number of operator nodes (choices, loops, orders).
    pub fn operator_count(&self) -> usize {
        match self {
            PowlModel::Transition { .. } | PowlModel::Silent { .. } => 0,
            PowlModel::Xor { children } => {
                1 + children.iter().map(|c| c.operator_count()).sum::<usize>()
            }
            PowlModel::Loop { do_part, redo_part } => {
                1 + do_part.operator_count() + redo_part.operator_count()
            }
            PowlModel::Order { children, .. } => {
                1 + children.iter().map(|c| c.operator_count()).sum::<usize>()
            }
        }
    }

    /// Total number of edges carried by order nodes in the hierarchy.
    pub fn order_edge_count(&self) -> usize {
        match self {
            PowlModel::Transition { .. } | PowlModel::Silent { .. } => 0,
            PowlModel::Xor { children } => children.iter().map(|c| c.order_edge_count()).sum(),
            PowlModel::Loop { do_part, redo_part } => {
                do_part.order_edge_count() + redo_part.order_edge_count()
            }
            PowlModel::Order { children, edges } => {
                edges.len() + children.iter().map(|c| c.order_edge_count()).sum::<usize>()
            }
        }
    }
}

fn escape_into(label: &str, out: &mut String) {
    for ch in label.chars() {
        if matches!(ch, '\\' | '(' | ')' | ',' | ';' | '>') {
            out.push('\\');
        }
        out.push(ch);
    }
}

fn close_transitively(relation: &BTreeSet<(usize, usize)>, n: usize) -> BTreeSet<(usize, usize)> {
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
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if matrix[i * n + j] {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Orders children by canonical key. Children with equal keys are permuted to
/// minimize the full serialization so that isomorphic edge relations yield
/// identical canonical forms.
fn canonical_child_order(children: &[PowlModel], edges: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    let keys: Vec<String> = children.iter().map(|c| c.canonical_key()).collect();
    let mut perm: Vec<usize> = (0..children.len()).collect();
    perm.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));

    if edges.is_empty() {
        return perm;
    }
    // Groups of consecutive positions with identical keys.
    let mut groups: Vec<(usize, usize)> = Vec::new(); // [start, end)
    let mut start = 0;
    for i in 1..=perm.len() {
        if i == perm.len() || keys[perm[i]] != keys[perm[start]] {
            if i - start > 1 {
                groups.push((start, i));
            }
            start = i;
        }
    }
    if groups.is_empty() {
        return perm;
    }
    let combinations: usize = groups
        .iter()
        .map(|&(s, e)| (1..=(e - s)).product::<usize>())
        .try_fold(1usize, usize::checked_mul)
        .unwrap_or(usize::MAX);
    if combinations > ORDER_TIE_PERMUTATION_CAP {
        return perm;
    }

    let serialize = |candidate: &[usize]| -> String {
        let mut inverse = vec![0usize; candidate.len()];
        for (new_pos, &old_pos) in candidate.iter().enumerate() {
            inverse[old_pos] = new_pos;
        }
        let remapped: BTreeSet<(usize, usize)> = edges
            .iter()
            .map(|&(i, j)| (inverse[i], inverse[j]))
            .collect();
        let mut s = String::new();
        for &old_pos in candidate {
            s.push_str(&keys[old_pos]);
            s.push('\u{1}');
        }
        for (a, b) in remapped {
            s.push_str(&format!("{a}>{b},"));
        }
        s
    };

    let mut best = perm.clone();
    let mut best_ser = serialize(&perm);
    let mut candidate = perm.clone();
    permute_groups(&mut candidate, &groups, 0, &mut |cand| {
        let ser = serialize(cand);
        if ser < best_ser {
            best_ser = ser;
            best = cand.to_vec();
        }
    });
    best
}

fn permute_groups(
    candidate: &mut Vec<usize>,
    groups: &[(usize, usize)],
    group_index: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if group_index == groups.len() {
        visit(candidate);
        return;
    }
    let (start, end) = groups[group_index];
    heap_permute(candidate, start, end, &mut |cand| {
        permute_groups(&mut cand.to_vec(), groups, group_index + 1, visit);
    });
}

fn heap_permute(
    slice: &mut Vec<usize>,
    start: usize,
    end: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    fn rec(slice: &mut Vec<usize>, k: usize, end: usize, visit: &mut impl FnMut(&[usize])) {
        if k == end {
            visit(slice);
            return;
        }
        for i in k..end {
            slice.swap(k, i);
            rec(slice, k + 1, end, visit);
            slice.swap(k, i);
        }
    }
    rec(slice, start, end, visit);
}

fn multiset_bijection(left: &[PowlModel], right: &[PowlModel]) -> bool {
    fn rec(left: &[PowlModel], right: &[PowlModel], used: &mut Vec<bool>, pos: usize) -> bool {
        if pos == left.len() {
            return true;
        }
        for j in 0..right.len() {
            if !used[j] && left[pos].equivalent(&right[j]) {
                used[j] = true;
                if rec(left, right, used, pos + 1) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; right.len()];
    rec(left, right, &mut used, 0)
}

fn order_bijection(
    c1: &[PowlModel],
    e1: &BTreeSet<(usize, usize)>,
    c2: &[PowlModel],
    e2: &BTreeSet<(usize, usize)>,
) -> bool {
    fn rec(
        c1: &[PowlModel],
        e1: &BTreeSet<(usize, usize)>,
        c2: &[PowlModel],
        e2: &BTreeSet<(usize, usize)>,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let pos = mapping.len();
        if pos == c1.len() {
            return true;
        }
        'candidates: for j in 0..c2.len() {
            if used[j] || !c1[pos].equivalent(&c2[j]) {
                continue;
            }
            for (k, &mapped) in mapping.iter().enumerate() {
                if e1.contains(&(pos, k)) != e2.contains(&(j, mapped))
                    || e1.contains(&(k, pos)) != e2.contains(&(mapped, j))
                {
                    continue 'candidates;
                }
            }
            used[j] = true;
            mapping.push(j);
            if rec(c1, e1, c2, e2, mapping, used) {
                return true;
            }
            mapping.pop();
            used[j] = false;
        }
        false
    }
    let mut mapping = Vec::with_capacity(c1.len());
    let mut used = vec![false; c2.len()];
    rec(c1, e1, c2, e2, &mut mapping, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(label: &str) -> PowlModel {
        PowlModel::transition(label)
    }

    #[test]
    fn labels_of_leaf() {
        assert_eq!(t("a").labels(), BTreeSet::from(["a".to_string()]));
    }

    #[test]
    fn labels_of_loop_over_choice() {
        let model = PowlModel::loop_model(
            PowlModel::xor(vec![t("a"), t("b")]).unwrap(),
            PowlModel::transition_indexed("a", 2),
        );
        assert_eq!(
            model.labels(),
            BTreeSet::from(["a".to_string(), "b".to_string()])
        );
    }

    #[test]
    fn silent_contributes_no_label() {
        let model = PowlModel::xor(vec![t("a"), PowlModel::silent()]).unwrap();
        assert_eq!(model.labels(), BTreeSet::from(["a".to_string()]));
    }

    #[test]
    fn leaf_equivalence_ignores_index() {
        assert!(t("a").equivalent(&PowlModel::transition_indexed("a", 7)));
        assert!(!t("a").equivalent(&t("b")));
        assert!(!t("a").equivalent(&PowlModel::silent()));
    }

    #[test]
    fn xor_is_commutative_loop_is_not() {
        let x1 = PowlModel::xor(vec![t("a"), t("b")]).unwrap();
        let x2 = PowlModel::xor(vec![t("b"), t("a")]).unwrap();
        assert!(x1.equivalent(&x2));

        let l1 = PowlModel::loop_model(t("a"), t("b"));
        let l2 = PowlModel::loop_model(t("b"), t("a"));
        assert!(!l1.equivalent(&l2));
    }

    #[test]
    fn order_equivalence_requires_matching_edges() {
        let ordered = PowlModel::order(vec![t("a"), t("b")], [(0, 1)]).unwrap();
        let concurrent = PowlModel::order(vec![t("a"), t("b")], []).unwrap();
        assert!(!ordered.equivalent(&concurrent));
        assert!(ordered.equivalent(&ordered.clone()));
    }

    #[test]
    fn canonical_key_ignores_leaf_indexes() {
        assert_eq!(
            t("a").canonical_key(),
            PowlModel::transition_indexed("a", 2).canonical_key()
        );
    }

    #[test]
    fn canonical_key_sorts_xor_children() {
        let x1 = PowlModel::xor(vec![t("a"), t("b")]).unwrap();
        let x2 = PowlModel::xor(vec![t("b"), t("a")]).unwrap();
        assert_eq!(x1.canonical_key(), x2.canonical_key());
    }

    #[test]
    fn loop_key_is_positional() {
        let l1 = PowlModel::loop_model(t("a"), t("b"));
        let l2 = PowlModel::loop_model(t("b"), t("a"));
        assert_ne!(l1.canonical_key(), l2.canonical_key());
    }

    #[test]
    fn order_constructor_closes_edges() {
        let model = PowlModel::order(vec![t("a"), t("b"), t("c")], [(0, 1), (1, 2)]).unwrap();
        if let PowlModel::Order { edges, .. } = &model {
            assert_eq!(edges.len(), 3, "chain closure adds the skip edge");
        } else {
            panic!("expected order");
        }
    }

    #[test]
    fn order_constructor_rejects_cycles() {
        let err = PowlModel::order(vec![t("a"), t("b")], [(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, ModelError::CyclicEdges(..)));
    }

    #[test]
    fn order_key_distinguishes_edge_direction_between_equivalent_children() {
        // Two children with the same label: direction must not collapse.
        let forward = PowlModel::order(
            vec![PowlModel::transition_indexed("a", 1), t("b")],
            [(0, 1)],
        )
        .unwrap();
        let backward = PowlModel::order(
            vec![PowlModel::transition_indexed("a", 1), t("b")],
            [(1, 0)],
        )
        .unwrap();
        assert_ne!(forward.canonical_key(), backward.canonical_key());
        assert!(!forward.equivalent(&backward));
    }

    #[test]
    fn order_key_stable_under_tied_children_relabeling() {
        // a#1 -> a#2 and a#2 -> a#1 describe the same order up to equivalence.
        let one = PowlModel::order(
            vec![
                PowlModel::transition_indexed("a", 1),
                PowlModel::transition_indexed("a", 2),
            ],
            [(0, 1)],
        )
        .unwrap();
        let two = PowlModel::order(
            vec![
                PowlModel::transition_indexed("a", 1),
                PowlModel::transition_indexed("a", 2),
            ],
            [(1, 0)],
        )
        .unwrap();
        assert_eq!(one.canonical_key(), two.canonical_key());
        assert!(one.equivalent(&two));
    }

    #[test]
    fn order_key_stable_under_three_way_ties() {
        // A chain over three same-label instances: every relabeling of the
        // chain must canonicalize identically.
        let instance = |k: u32| PowlModel::transition_indexed("a", k);
        let chains = [
            [(0usize, 1usize), (1, 2)],
            [(2, 0), (0, 1)],
            [(1, 2), (2, 0)],
        ];
        let keys: Vec<String> = chains
            .iter()
            .map(|edges| {
                PowlModel::order(
                    vec![instance(1), instance(2), instance(3)],
                    edges.iter().copied(),
                )
                .unwrap()
                .canonical_key()
            })
            .collect();
        assert_eq!(keys[0], keys[1]);
        assert_eq!(keys[1], keys[2]);
    }

    #[test]
    fn canonicalize_renumbers_leaves() {
        let model = PowlModel::loop_model(
            PowlModel::transition_indexed("a", 9),
            PowlModel::transition_indexed("a", 9),
        );
        let canonical = model.canonicalize();
        if let PowlModel::Loop { do_part, redo_part } = &canonical {
            assert_eq!(**do_part, PowlModel::transition_indexed("a", 1));
            assert_eq!(**redo_part, PowlModel::transition_indexed("a", 2));
        } else {
            panic!("expected loop");
        }
    }

    #[test]
    fn equivalence_is_reflexive_symmetric_transitive_on_samples() {
        let models = vec![
            t("a"),
            PowlModel::silent(),
            PowlModel::xor(vec![t("a"), t("b")]).unwrap(),
            PowlModel::xor(vec![t("b"), t("a")]).unwrap(),
            PowlModel::loop_model(t("a"), PowlModel::silent()),
            PowlModel::order(vec![t("a"), t("b")], [(0, 1)]).unwrap(),
        ];
        for m in &models {
            assert!(m.equivalent(m));
        }
        for m1 in &models {
            for m2 in &models {
                assert_eq!(m1.equivalent(m2), m2.equivalent(m1));
                for m3 in &models {
                    if m1.equivalent(m2) && m2.equivalent(m3) {
                        assert!(m1.equivalent(m3));
                    }
                }
            }
        }
    }

    #[test]
    fn key_equality_matches_equivalence_on_samples() {
        let models = vec![
            t("a"),
            t("b"),
            PowlModel::silent(),
            PowlModel::xor(vec![t("a"), t("b")]).unwrap(),
            PowlModel::xor(vec![t("b"), t("a")]).unwrap(),
            PowlModel::xor(vec![t("a"), PowlModel::silent()]).unwrap(),
            PowlModel::loop_model(t("a"), t("b")),
            PowlModel::loop_model(t("b"), t("a")),
            PowlModel::order(vec![t("a"), t("b")], [(0, 1)]).unwrap(),
            PowlModel::order(vec![t("b"), t("a")], [(1, 0)]).unwrap(),
            PowlModel::order(vec![t("a"), t("b")], []).unwrap(),
        ];
        for m1 in &models {
            for m2 in &models {
                assert_eq!(
                    m1.canonical_key() == m2.canonical_key(),
                    m1.equivalent(m2),
                    "key/equivalence mismatch for {m1:?} vs {m2:?}"
                );
            }
        }
    }
}
