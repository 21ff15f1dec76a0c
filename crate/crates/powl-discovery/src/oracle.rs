//! Independent verification machinery: linearization enumeration, the
//! perfect-fitness checker, and seeded model/log generators.
//!
//! The fitness guarantee of discovery is stated over linearizations: every
//! activity sequence consistent with the precedences of an input trace must
//! be accepted by the discovered model. [`verify_perfect_fitness`] checks
//! exactly that, enumerating linearizations per variant (capped) and
//! replaying each one. The generators produce structurally valid random
//! models and sample logs from them so the guarantee can be exercised on
//! thousands of seeded cases.

use crate::pot::{NodeId, Pot, PotMultiset, PotVariant};
use crate::powl::{accepts, PowlModel, SemanticsError};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("cap must be at least 1")]
    ZeroCap,
    #[error("linearization requires leaf payloads, found a composite node")]
    CompositePayload,
    #[error("label pool must not be empty")]
    EmptyLabelPool,
    #[error("trace count must be at least 1")]
    ZeroTraces,
    #[error("model produced only empty traces")]
    DegenerateModel,
}

/// All label sequences consistent with the trace's precedences, up to `cap`
/// sequences. The second component reports whether the cap was hit.
///
/// Node payloads must be leaves; silent leaves emit nothing.
pub fn linearizations(pot: &Pot, cap: usize) -> Result<(BTreeSet<Vec<String>>, bool), OracleError> {
    if cap == 0 {
        return Err(OracleError::ZeroCap);
    }
    let (extensions, capped) = linear_extensions(pot, cap)?;
    let mut sequences = BTreeSet::new();
    for extension in extensions {
        let mut sequence = Vec::with_capacity(extension.len());
        for id in extension {
            match pot.payload(id).expect("extension nodes come from the pot") {
                PowlModel::Transition { label, .. } => sequence.push(label.clone()),
                PowlModel::Silent { .. } => {}
                _ => return Err(OracleError::CompositePayload),
            }
        }
        sequences.insert(sequence);
    }
    Ok((sequences, capped))
}

/// All topological orderings of the trace's nodes, up to `cap`. Enumeration
/// order is deterministic: candidates are tried in canonical node order.
pub fn linear_extensions(pot: &Pot, cap: usize) -> Result<(Vec<Vec<NodeId>>, bool), OracleError> {
    if cap == 0 {
        return Err(OracleError::ZeroCap);
    }
    let nodes: Vec<NodeId> = pot.node_ids().collect();
    let mut remaining_preds: BTreeMap<NodeId, usize> = nodes.iter().map(|&n| (n, 0)).collect();
    for &(_, to) in pot.edges() {
        *remaining_preds
            .get_mut(&to)
            .expect("edge endpoints are nodes") += 1;
    }
    let mut extensions = Vec::new();
    let mut current = Vec::with_capacity(nodes.len());
    let mut visited: BTreeSet<NodeId> = BTreeSet::new();
    let mut capped = false;
    backtrack(
        pot,
        &nodes,
        &mut remaining_preds,
        &mut visited,
        &mut current,
        cap,
        &mut extensions,
        &mut capped,
    );
    Ok((extensions, capped))
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    pot: &Pot,
    nodes: &[NodeId],
    remaining_preds: &mut BTreeMap<NodeId, usize>,
    visited: &mut BTreeSet<NodeId>,
    current: &mut Vec<NodeId>,
    cap: usize,
    extensions: &mut Vec<Vec<NodeId>>,
    capped: &mut bool,
) {
    if extensions.len() >= cap {
        *capped = true;
        return;
    }
    if current.len() == nodes.len() {
        extensions.push(current.clone());
        return;
    }
    for &candidate in nodes {
        if visited.contains(&candidate) || remaining_preds[&candidate] > 0 {
            continue;
        }
        visited.insert(candidate);
        current.push(candidate);
        for &(from, to) in pot.edges() {
            if from == candidate {
                *remaining_preds.get_mut(&to).expect("known node") -= 1;
            }
        }
        backtrack(
            pot,
            nodes,
            remaining_preds,
            visited,
            current,
            cap,
            extensions,
            capped,
        );
        for &(from, to) in pot.edges() {
            if from == candidate {
                *remaining_preds.get_mut(&to).expect("known node") += 1;
            }
        }
        current.pop();
        visited.remove(&candidate);
        if *capped {
            return;
        }
    }
}

/// One rejected linearization.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FitnessFailure {
    /// Folding key of the variant the sequence was derived from.
    pub variant: String,
    pub trace: Vec<String>,
}

/// Outcome of a fitness verification run. `failures` is empty iff every
/// checked linearization was accepted; budget-exhausted checks land in
/// `inconclusive`, never in `failures`.
#[derive(Debug, Clone, Serialize)]
pub struct FitnessReport {
    pub variants_checked: usize,
    pub linearizations_checked: usize,
    pub failures: Vec<FitnessFailure>,
    pub inconclusive: usize,
    /// True when a linearization enumeration hit its cap, i.e. only a subset
    /// was checked.
    pub capped: bool,
}

impl FitnessReport {
    pub fn is_perfect(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Checks the fitness guarantee: every linearization of every variant (up to
/// `lin_cap` linearizations per variant) must be accepted by `model`.
pub fn verify_perfect_fitness(
    model: &PowlModel,
    multiset: &PotMultiset,
    lin_cap: usize,
    accept_budget: usize,
) -> Result<FitnessReport, OracleError> {
    if lin_cap == 0 || accept_budget == 0 {
        return Err(OracleError::ZeroCap);
    }
    let mut report = FitnessReport {
        variants_checked: 0,
        linearizations_checked: 0,
        failures: Vec::new(),
        inconclusive: 0,
        capped: false,
    };
    for (variant, _) in multiset.variants() {
        report.variants_checked += 1;
        let pot = variant_to_pot(multiset, variant);
        let (sequences, capped) = linearizations(&pot, lin_cap)?;
        report.capped |= capped;
        for sequence in sequences {
            report.linearizations_checked += 1;
            match accepts(model, &sequence, accept_budget) {
                Ok(true) => {}
                Ok(false) => report.failures.push(FitnessFailure {
                    variant: multiset.variant_key(variant),
                    trace: sequence,
                }),
                Err(SemanticsError::BudgetExhausted { .. }) => report.inconclusive += 1,
                Err(other) => unreachable!("budget is validated: {other}"),
            }
        }
    }
    Ok(report)
}

fn variant_to_pot(multiset: &PotMultiset, variant: &PotVariant) -> Pot {
    let nodes: Vec<NodeId> = variant.nodes().iter().copied().collect();
    let position: BTreeMap<NodeId, usize> =
        nodes.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let payloads: Vec<PowlModel> = nodes
        .iter()
        .map(|id| multiset.payload(*id).clone())
        .collect();
    let edges: Vec<(usize, usize)> = variant
        .edges()
        .iter()
        .map(|(a, b)| (position[a], position[b]))
        .collect();
    Pot::new(payloads, edges).expect("variants are valid traces")
}

/// Parameters for [`random_powl`].
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_depth: u32,
    pub max_children: usize,
    /// Probability that a loop gets a silent redo instead of splitting its
    /// labels.
    pub silent_redo_probability: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_depth: 3,
            max_children: 3,
            silent_redo_probability: 0.5,
        }
    }
}

/// Draws a structurally valid random model. Every label of the pool is used
/// at most once, so distinct subtrees never collide; operators always get
/// the arity they require.
pub fn random_powl(
    seed: u64,
    config: &GeneratorConfig,
    label_pool: &[String],
) -> Result<PowlModel, OracleError> {
    if label_pool.is_empty() {
        return Err(OracleError::EmptyLabelPool);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<String> = label_pool.to_vec();
    labels.dedup();
    let take = rng.random_range(1..=labels.len());
    labels.truncate(take);
    Ok(generate(&mut rng, &labels, config.max_depth, config))
}

fn generate(
    rng: &mut ChaCha8Rng,
    labels: &[String],
    depth: u32,
    config: &GeneratorConfig,
) -> PowlModel {
    if labels.len() == 1 || depth == 0 {
        return PowlModel::transition(labels[0].clone());
    }
    match rng.random_range(0..3u8) {
        // Exclusive choice
        0 => {
            let parts = split_labels(rng, labels, config.max_children);
            let children: Vec<PowlModel> = parts
                .iter()
                .map(|part| generate(rng, part, depth - 1, config))
                .collect();
            PowlModel::xor(children).expect("at least two parts")
        }
        // Loop
        1 => {
            if rng.random_bool(config.silent_redo_probability) {
                let do_part = generate(rng, labels, depth - 1, config);
                PowlModel::loop_model(do_part, PowlModel::silent())
            } else {
                let parts = split_labels(rng, labels, 2);
                let do_part = generate(rng, &parts[0], depth - 1, config);
                let redo_part = generate(rng, &parts[1], depth - 1, config);
                PowlModel::loop_model(do_part, redo_part)
            }
        }
        // Partial order with a random DAG over the children
        _ => {
            let parts = split_labels(rng, labels, config.max_children);
            let children: Vec<PowlModel> = parts
                .iter()
                .map(|part| generate(rng, part, depth - 1, config))
                .collect();
            let n = children.len();
            let mut positions: Vec<usize> = (0..n).collect();
            positions.shuffle(rng);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_bool(0.4) {
                        edges.push((positions[i], positions[j]));
                    }
                }
            }
            PowlModel::order(children, edges).expect("random DAG is acyclic")
        }
    }
}

/// Splits `labels` into 2..=max_children non-empty parts, randomly.
fn split_labels(rng: &mut ChaCha8Rng, labels: &[String], max_children: usize) -> Vec<Vec<String>> {
    let mut shuffled: Vec<String> = labels.to_vec();
    shuffled.shuffle(rng);
    let part_count = rng.random_range(2..=max_children.clamp(2, labels.len()));
    let mut parts: Vec<Vec<String>> = vec![Vec::new(); part_count];
    for (i, label) in shuffled.into_iter().enumerate() {
        if i < part_count {
            parts[i].push(label);
        } else {
            let target = rng.random_range(0..part_count);
            parts[target].push(label);
        }
    }
    parts
}

/// Executes `model` `traces` times and records each run as a partially
/// ordered trace whose edges are exactly the precedences the model imposes
/// between the emitted activity instances. Identical runs fold into one
/// variant. Deterministic given the seed.
pub fn sample_pot_log(
    model: &PowlModel,
    traces: usize,
    seed: u64,
    loop_redo_probability: f64,
) -> Result<PotMultiset, OracleError> {
    if traces == 0 {
        return Err(OracleError::ZeroTraces);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pots = Vec::with_capacity(traces);
    for _ in 0..traces {
        let run = execute(model, &mut rng, loop_redo_probability);
        if run.events.is_empty() {
            continue;
        }
        pots.push(run_to_pot(run));
    }
    if pots.is_empty() {
        return Err(OracleError::DegenerateModel);
    }
    PotMultiset::from_pots(pots).map_err(|_| OracleError::DegenerateModel)
}

/// Emitted events (labels, in emission order) and the precedence relation
/// over emission positions. The relation is transitively closed by
/// construction.
struct Run {
    events: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl Run {
    fn empty() -> Run {
        Run {
            events: Vec::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Appends `other`, returning the position offset it received.
    fn absorb(&mut self, other: Run) -> (usize, usize) {
        let offset = self.events.len();
        self.events.extend(other.events);
        for (a, b) in other.edges {
            self.edges.insert((a + offset, b + offset));
        }
        (offset, self.events.len())
    }

    /// Orders every event of range `before` ahead of every event of `after`.
    fn sequence(&mut self, before: (usize, usize), after: (usize, usize)) {
        for a in before.0..before.1 {
            for b in after.0..after.1 {
                self.edges.insert((a, b));
            }
        }
    }
}

/// Redo repetitions are capped so sampled languages stay bounded.
const MAX_SAMPLED_REDOS: u32 = 3;

fn execute(model: &PowlModel, rng: &mut ChaCha8Rng, redo_probability: f64) -> Run {
    match model {
        PowlModel::Transition { label, .. } => Run {
            events: vec![label.clone()],
            edges: BTreeSet::new(),
        },
        PowlModel::Silent { .. } => Run::empty(),
        PowlModel::Xor { children } => {
            let pick = rng.random_range(0..children.len());
            execute(&children[pick], rng, redo_probability)
        }
        PowlModel::Loop { do_part, redo_part } => {
            let mut run = Run::empty();
            let mut parts: Vec<(usize, usize)> = Vec::new();
            parts.push(run.absorb(execute(do_part, rng, redo_probability)));
            let mut redos = 0;
            while redos < MAX_SAMPLED_REDOS && rng.random_bool(redo_probability) {
                parts.push(run.absorb(execute(redo_part, rng, redo_probability)));
                parts.push(run.absorb(execute(do_part, rng, redo_probability)));
                redos += 1;
            }
            for i in 0..parts.len() {
                for j in (i + 1)..parts.len() {
                    run.sequence(parts[i], parts[j]);
                }
            }
            run
        }
        PowlModel::Order { children, edges } => {
            let mut run = Run::empty();
            let mut ranges = Vec::with_capacity(children.len());
            for child in children {
                ranges.push(run.absorb(execute(child, rng, redo_probability)));
            }
            for &(from, to) in edges {
                run.sequence(ranges[from], ranges[to]);
            }
            run
        }
    }
}

/// Turns a run into a trace: same-label instances are indexed 1..m along a
/// canonical topological order of the run.
fn run_to_pot(run: Run) -> Pot {
    let n = run.events.len();
    let mut remaining_preds = vec![0usize; n];
    for &(_, b) in &run.edges {
        remaining_preds[b] += 1;
    }
    // Kahn's algorithm with emission-position tie-break.
    let mut order = Vec::with_capacity(n);
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| remaining_preds[i] == 0).collect();
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for &(a, b) in &run.edges {
            if a == next {
                remaining_preds[b] -= 1;
                if remaining_preds[b] == 0 {
                    ready.insert(b);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), n, "run precedences are acyclic");

    let mut label_counters: BTreeMap<&str, u32> = BTreeMap::new();
    let mut payloads = vec![PowlModel::silent(); n];
    let mut position_of = vec![0usize; n];
    for (position, &emission) in order.iter().enumerate() {
        let counter = label_counters
            .entry(run.events[emission].as_str())
            .or_insert(0);
        *counter += 1;
        payloads[position] = PowlModel::transition_indexed(run.events[emission].clone(), *counter);
        position_of[emission] = position;
    }
    let edges: Vec<(usize, usize)> = run
        .edges
        .iter()
        .map(|&(a, b)| (position_of[a], position_of[b]))
        .collect();
    Pot::new(payloads, edges).expect("runs are strict partial orders")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::discover;

    fn t(label: &str) -> PowlModel {
        PowlModel::transition(label)
    }

    fn leaf_pot(specs: &[(&str, u32)], edges: &[(usize, usize)]) -> Pot {
        let payloads = specs
            .iter()
            .map(|(l, i)| PowlModel::transition_indexed(*l, *i))
            .collect();
        Pot::from_relation(payloads, edges.iter().copied()).unwrap()
    }

    #[test]
    fn chain_has_one_linearization() {
        let pot = leaf_pot(&[("a", 1), ("b", 1), ("c", 1)], &[(0, 1), (1, 2)]);
        let (sequences, capped) = linearizations(&pot, 100).unwrap();
        assert!(!capped);
        assert_eq!(sequences.len(), 1);
        assert!(sequences.contains(&vec!["a".to_string(), "b".to_string(), "c".to_string()]));
    }

    #[test]
    fn antichain_has_both_orders() {
        let pot = leaf_pot(&[("a", 1), ("b", 1)], &[]);
        let (sequences, _) = linearizations(&pot, 100).unwrap();
        assert_eq!(sequences.len(), 2);
    }

    #[test]
    fn partial_constraint_filters_permutations() {
        let pot = leaf_pot(&[("a", 1), ("b", 1), ("c", 1)], &[(0, 1)]);
        let (sequences, _) = linearizations(&pot, 100).unwrap();
        let expected: BTreeSet<Vec<String>> = [
            vec!["c", "a", "b"],
            vec!["a", "c", "b"],
            vec!["a", "b", "c"],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(str::to_string).collect())
        .collect();
        assert_eq!(sequences, expected);
    }

    type PotSpec = (Vec<(&'static str, u32)>, Vec<(usize, usize)>);

    #[test]
    fn extension_count_matches_brute_force() {
        let cases: Vec<PotSpec> = vec![
            (vec![("a", 1), ("b", 1), ("c", 1)], vec![]),
            (
                vec![("a", 1), ("b", 1), ("c", 1), ("d", 1)],
                vec![(0, 1), (2, 3)],
            ),
            (
                vec![("a", 1), ("b", 1), ("c", 1), ("d", 1)],
                vec![(0, 1), (0, 2), (0, 3)],
            ),
            (vec![("a", 1), ("a", 2), ("b", 1)], vec![(0, 1)]),
            (
                vec![("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1), ("f", 1)],
                vec![(0, 1), (1, 2), (3, 4)],
            ),
            (
                vec![
                    ("a", 1),
                    ("a", 2),
                    ("b", 1),
                    ("c", 1),
                    ("d", 1),
                    ("e", 1),
                    ("f", 1),
                ],
                vec![(0, 1), (2, 3), (2, 4), (5, 6)],
            ),
        ];
        for (payloads, edges) in cases {
            let pot = leaf_pot(&payloads, &edges);
            let (extensions, capped) = linear_extensions(&pot, 100_000).unwrap();
            assert!(!capped);
            let expected = brute_force_extension_count(&pot);
            assert_eq!(
                extensions.len(),
                expected,
                "payloads {payloads:?} edges {edges:?}"
            );
        }
    }

    fn brute_force_extension_count(pot: &Pot) -> usize {
        let nodes: Vec<NodeId> = pot.node_ids().collect();
        let mut count = 0;
        permute(
            &nodes,
            &mut Vec::new(),
            &mut vec![false; nodes.len()],
            &mut |perm| {
                let valid = pot.edges().iter().all(|(a, b)| {
                    let pa = perm.iter().position(|n| n == a).unwrap();
                    let pb = perm.iter().position(|n| n == b).unwrap();
                    pa < pb
                });
                if valid {
                    count += 1;
                }
            },
        );
        count
    }

    fn permute(
        nodes: &[NodeId],
        current: &mut Vec<NodeId>,
        used: &mut Vec<bool>,
        visit: &mut impl FnMut(&[NodeId]),
    ) {
        if current.len() == nodes.len() {
            visit(current);
            return;
        }
        for i in 0..nodes.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            current.push(nodes[i]);
            permute(nodes, current, used, visit);
            current.pop();
            used[i] = false;
        }
    }

    #[test]
    fn cap_is_reported() {
        let pot = leaf_pot(&[("a", 1), ("b", 1), ("c", 1), ("d", 1)], &[]);
        let (extensions, capped) = linear_extensions(&pot, 5).unwrap();
        assert!(capped);
        assert_eq!(extensions.len(), 5);
    }

    #[test]
    fn mismatching_model_is_reported_as_failure() {
        let model = PowlModel::xor(vec![t("a"), t("b")]).unwrap();
        let m = PotMultiset::from_parts(vec![t("a"), t("b")], vec![(vec![0, 1], vec![(0, 1)], 1)])
            .unwrap();
        let report = verify_perfect_fitness(&model, &m, 100, 10_000).unwrap();
        assert_eq!(report.failures.len(), 1);
        assert!(!report.is_perfect());
        assert_eq!(
            report.failures[0].trace,
            vec!["a".to_string(), "b".to_string()]
        );
    }

    #[test]
    fn concurrent_variant_fits_unordered_model() {
        let model = PowlModel::order(vec![t("a"), t("b")], [] as [(usize, usize); 0]).unwrap();
        let m =
            PotMultiset::from_parts(vec![t("a"), t("b")], vec![(vec![0, 1], vec![], 1)]).unwrap();
        let report = verify_perfect_fitness(&model, &m, 100, 10_000).unwrap();
        assert_eq!(report.linearizations_checked, 2);
        assert!(report.is_perfect());
    }

    #[test]
    fn discovered_model_fits_its_own_log() {
        let m = PotMultiset::from_parts(
            vec![t("a"), t("b"), t("c")],
            vec![
                (vec![0, 1, 2], vec![(0, 1), (1, 2), (0, 2)], 2),
                (vec![0, 2], vec![(0, 2)], 1),
            ],
        )
        .unwrap();
        let model = discover(&m).unwrap();
        let report = verify_perfect_fitness(&model, &m, 1000, 100_000).unwrap();
        assert!(report.is_perfect(), "failures: {:?}", report.failures);
    }

    #[test]
    fn sampling_a_leaf_gives_one_variant() {
        let log = sample_pot_log(&t("a"), 5, 7, 0.5).unwrap();
        assert_eq!(log.variant_count(), 1);
        assert_eq!(log.total_count(), 5);
    }

    #[test]
    fn sampling_a_choice_gives_both_branches() {
        let model = PowlModel::xor(vec![t("a"), t("b")]).unwrap();
        let log = sample_pot_log(&model, 64, 11, 0.5).unwrap();
        assert_eq!(log.variant_count(), 2);
    }

    #[test]
    fn sampling_records_model_precedences() {
        let model = PowlModel::order(vec![t("a"), t("b")], [(0, 1)]).unwrap();
        let log = sample_pot_log(&model, 4, 3, 0.5).unwrap();
        assert_eq!(log.variant_count(), 1);
        let (variant, _) = log.variants().next().unwrap();
        assert_eq!(variant.edges().len(), 1);
        let a = log.leaf_node("a", 1).unwrap();
        let b = log.leaf_node("b", 1).unwrap();
        assert!(variant.edges().contains(&(a, b)));
    }

    #[test]
    fn concurrent_children_stay_unordered_in_samples() {
        let model = PowlModel::order(vec![t("a"), t("b")], [] as [(usize, usize); 0]).unwrap();
        let log = sample_pot_log(&model, 4, 3, 0.5).unwrap();
        let (variant, _) = log.variants().next().unwrap();
        assert!(variant.edges().is_empty());
    }

    #[test]
    fn generators_are_deterministic() {
        let pool: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let config = GeneratorConfig::default();
        let m1 = random_powl(42, &config, &pool).unwrap();
        let m2 = random_powl(42, &config, &pool).unwrap();
        assert_eq!(m1, m2);
        let l1 = sample_pot_log(&m1, 10, 7, 0.5).unwrap();
        let l2 = sample_pot_log(&m2, 10, 7, 0.5).unwrap();
        let keys1: Vec<String> = l1.variants().map(|(v, _)| l1.variant_key(v)).collect();
        let keys2: Vec<String> = l2.variants().map(|(v, _)| l2.variant_key(v)).collect();
        assert_eq!(keys1, keys2);
    }

    #[test]
    fn generated_models_are_structurally_valid() {
        let pool: Vec<String> = ["a", "b", "c", "d", "e", "f"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let config = GeneratorConfig::default();
        for seed in 0..50 {
            let model = random_powl(seed, &config, &pool).unwrap();
            check_arities(&model);
        }
    }

    fn check_arities(model: &PowlModel) {
        match model {
            PowlModel::Transition { label, .. } => assert!(!label.is_empty()),
            PowlModel::Silent { .. } => {}
            PowlModel::Xor { children } => {
                assert!(children.len() >= 2);
                children.iter().for_each(check_arities);
            }
            PowlModel::Loop { do_part, redo_part } => {
                check_arities(do_part);
                check_arities(redo_part);
            }
            PowlModel::Order { children, edges } => {
                assert!(children.len() >= 2);
                for &(a, b) in edges {
                    assert!(a < children.len() && b < children.len());
                    assert!(!edges.contains(&(b, a)));
                }
                children.iter().for_each(check_arities);
            }
        }
    }

    #[test]
    fn round_trip_discovery_is_perfectly_fitting() {
        let pool: Vec<String> = ["a", "b", "c", "d", "e"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let config = GeneratorConfig::default();
        for seed in 0..25 {
            let model = random_powl(seed, &config, &pool).unwrap();
            let log = sample_pot_log(&model, 12, seed.wrapping_mul(31), 0.5).unwrap();
            let discovered = discover(&log).unwrap();
            let report = verify_perfect_fitness(&discovered, &log, 200, 100_000).unwrap();
            assert!(
                report.is_perfect(),
                "seed {seed}: {} failures, first: {:?}",
                report.failures.len(),
                report.failures.first()
            );
        }
    }
}
