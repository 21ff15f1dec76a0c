//! Workflow nets: translation from process models, bounded soundness
//! checking, and PNML / Graphviz serialization.
//!
//! Every submodel becomes a subnet with one entry and one exit place, glued
//! together by silent transitions where the control flow needs them. A final
//! fusion pass removes silent steps that are pure stutter, keeping the
//! reachable state space of concurrent sections small.
//!
//! A workflow net is sound when the final marking is reachable from every
//! reachable marking, the sink is only ever marked in the final marking, and
//! no transition is dead. The checker verifies this by explicit state
//! exploration under a marking budget.

use crate::powl::PowlModel;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("net has no unique source place (places with empty preset: {0})")]
    NoUniqueSource(usize),
    #[error("net has no unique sink place (places with empty postset: {0})")]
    NoUniqueSink(usize),
    #[error("node {0} is not on a path from source to sink")]
    Disconnected(String),
    #[error("state budget must be at least 1")]
    ZeroBudget,
    #[error("language exploration exceeded the cap of {0} states")]
    StateCapExceeded(usize),
}

/// A place/transition net with designated source and sink places.
#[derive(Debug, Clone)]
pub struct WorkflowNet {
    /// Human-oriented place names; positions are place ids.
    place_names: Vec<String>,
    /// Transition labels; `None` marks a silent transition.
    transition_labels: Vec<Option<String>>,
    /// Input places per transition.
    presets: Vec<Vec<usize>>,
    /// Output places per transition.
    postsets: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
}

impl WorkflowNet {
    pub fn place_count(&self) -> usize {
        self.place_names.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transition_labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.presets.iter().map(Vec::len).sum::<usize>()
            + self.postsets.iter().map(Vec::len).sum::<usize>()
    }

    pub fn labeled_transition_count(&self) -> usize {
        self.transition_labels
            .iter()
            .filter(|l| l.is_some())
            .count()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn transition_label(&self, transition: usize) -> Option<&str> {
        self.transition_labels[transition].as_deref()
    }

    fn initial_marking(&self) -> Vec<u32> {
        let mut marking = vec![0u32; self.place_count()];
        marking[self.source] = 1;
        marking
    }

    fn final_marking(&self) -> Vec<u32> {
        let mut marking = vec![0u32; self.place_count()];
        marking[self.sink] = 1;
        marking
    }

    fn enabled(&self, marking: &[u32], transition: usize) -> bool {
        let mut needed: BTreeMap<usize, u32> = BTreeMap::new();
        for &place in &self.presets[transition] {
            *needed.entry(place).or_insert(0) += 1;
        }
        needed
            .iter()
            .all(|(&place, &count)| marking[place] >= count)
    }

    fn fire(&self, marking: &[u32], transition: usize) -> Vec<u32> {
        let mut next = marking.to_vec();
        for &place in &self.presets[transition] {
            next[place] -= 1;
        }
        for &place in &self.postsets[transition] {
            next[place] += 1;
        }
        next
    }

    fn validate_structure(&self) -> Result<(), NetError> {
        let mut has_in = vec![false; self.place_count()];
        let mut has_out = vec![false; self.place_count()];
        for t in 0..self.transition_count() {
            for &p in &self.presets[t] {
                has_out[p] = true;
            }
            for &p in &self.postsets[t] {
                has_in[p] = true;
            }
        }
        let sources: Vec<usize> = (0..self.place_count()).filter(|&p| !has_in[p]).collect();
        let sinks: Vec<usize> = (0..self.place_count()).filter(|&p| !has_out[p]).collect();
        if sources != [self.source] {
            return Err(NetError::NoUniqueSource(sources.len()));
        }
        if sinks != [self.sink] {
            return Err(NetError::NoUniqueSink(sinks.len()));
        }

        // Forward from source and backward from sink over the bipartite graph.
        let node_count = self.place_count() + self.transition_count();
        let mut forward = vec![false; node_count];
        let mut stack = vec![self.source];
        forward[self.source] = true;
        while let Some(node) = stack.pop() {
            if node < self.place_count() {
                for t in 0..self.transition_count() {
                    if self.presets[t].contains(&node) && !forward[self.place_count() + t] {
                        forward[self.place_count() + t] = true;
                        stack.push(self.place_count() + t);
                    }
                }
            } else {
                for &p in &self.postsets[node - self.place_count()] {
                    if !forward[p] {
                        forward[p] = true;
                        stack.push(p);
                    }
                }
            }
        }
        let mut backward = vec![false; node_count];
        stack.push(self.sink);
        backward[self.sink] = true;
        while let Some(node) = stack.pop() {
            if node < self.place_count() {
                for t in 0..self.transition_count() {
                    if self.postsets[t].contains(&node) && !backward[self.place_count() + t] {
                        backward[self.place_count() + t] = true;
                        stack.push(self.place_count() + t);
                    }
                }
            } else {
                for &p in &self.presets[node - self.place_count()] {
                    if !backward[p] {
                        backward[p] = true;
                        stack.push(p);
                    }
                }
            }
        }
        for node in 0..node_count {
            if !forward[node] || !backward[node] {
                let name = if node < self.place_count() {
                    format!("p{node}")
                } else {
                    format!("t{}", node - self.place_count())
                };
                return Err(NetError::Disconnected(name));
            }
        }
        Ok(())
    }

    /// Test/verification helper: builds a net from explicit parts.
    pub fn from_parts(
        place_names: Vec<String>,
        transitions: Vec<(Option<String>, Vec<usize>, Vec<usize>)>,
        source: usize,
        sink: usize,
    ) -> WorkflowNet {
        let mut transition_labels = Vec::with_capacity(transitions.len());
        let mut presets = Vec::with_capacity(transitions.len());
        let mut postsets = Vec::with_capacity(transitions.len());
        for (label, pre, post) in transitions {
            transition_labels.push(label);
            presets.push(pre);
            postsets.push(post);
        }
        WorkflowNet {
            place_names,
            transition_labels,
            presets,
            postsets,
            source,
            sink,
        }
    }
}

/// Soundness verdict for a workflow net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sound,
    Unsound,
    /// The marking budget ran out before the state space was exhausted.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sound => "sound",
            Verdict::Unsound => "unsound",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Evidence for an unsound verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A reachable marking that covers the sink but is not the final
    /// marking, or from which the final marking is unreachable. Pairs are
    /// (place, tokens), non-zero entries only.
    Marking(Vec<(usize, u32)>),
    /// A transition that can never fire.
    DeadTransition(usize),
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub verdict: Verdict,
    pub explored_states: usize,
    pub witness: Option<Witness>,
}

/// Checks soundness by exhaustive marking exploration, up to `state_budget`
/// markings: (i) the final marking must be reachable from every reachable
/// marking, (ii) no other reachable marking may put a token on the sink, and
/// (iii) every transition must fire somewhere.
pub fn check_soundness(
    net: &WorkflowNet,
    state_budget: usize,
) -> Result<SoundnessReport, NetError> {
    if state_budget == 0 {
        return Err(NetError::ZeroBudget);
    }
    net.validate_structure()?;

    let initial = net.initial_marking();
    let final_marking = net.final_marking();

    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut markings: Vec<Vec<u32>> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new(); // successor marking ids
    let mut fired = vec![false; net.transition_count()];
    let mut queue = VecDeque::new();

    index.insert(initial.clone(), 0);
    markings.push(initial);
    edges.push(Vec::new());
    queue.push_back(0usize);

    let mut exceeded = false;
    while let Some(current) = queue.pop_front() {
        let marking = markings[current].clone();
        for (t, was_fired) in fired.iter_mut().enumerate() {
            if !net.enabled(&marking, t) {
                continue;
            }
            *was_fired = true;
            let next = net.fire(&marking, t);
            let next_id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if markings.len() >= state_budget {
                        exceeded = true;
                        continue;
                    }
                    let id = markings.len();
                    index.insert(next.clone(), id);
                    markings.push(next);
                    edges.push(Vec::new());
                    queue.push_back(id);
                    id
                }
            };
            edges[current].push(next_id);
        }
    }

    let explored_states = markings.len();
    if exceeded {
        return Ok(SoundnessReport {
            verdict: Verdict::Inconclusive,
            explored_states,
            witness: None,
        });
    }

    // (ii) improper sink markings.
    for marking in &markings {
        if marking[net.sink] >= 1 && *marking != final_marking {
            return Ok(SoundnessReport {
                verdict: Verdict::Unsound,
                explored_states,
                witness: Some(Witness::Marking(nonzero(marking))),
            });
        }
    }

    // (i) option to complete: reverse reachability from the final marking.
    let Some(&final_id) = index.get(&final_marking) else {
        return Ok(SoundnessReport {
            verdict: Verdict::Unsound,
            explored_states,
            witness: Some(Witness::Marking(nonzero(&markings[0]))),
        });
    };
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); markings.len()];
    for (from, successors) in edges.iter().enumerate() {
        for &to in successors {
            reverse[to].push(from);
        }
    }
    let mut reaches_final = vec![false; markings.len()];
    let mut stack = vec![final_id];
    reaches_final[final_id] = true;
    while let Some(node) = stack.pop() {
        for &previous in &reverse[node] {
            if !reaches_final[previous] {
                reaches_final[previous] = true;
                stack.push(previous);
            }
        }
    }
    if let Some(stuck) = (0..markings.len()).find(|&id| !reaches_final[id]) {
        return Ok(SoundnessReport {
            verdict: Verdict::Unsound,
            explored_states,
            witness: Some(Witness::Marking(nonzero(&markings[stuck]))),
        });
    }

    // (iii) dead transitions.
    if let Some(dead) = fired.iter().position(|&f| !f) {
        return Ok(SoundnessReport {
            verdict: Verdict::Unsound,
            explored_states,
            witness: Some(Witness::DeadTransition(dead)),
        });
    }

    Ok(SoundnessReport {
        verdict: Verdict::Sound,
        explored_states,
        witness: None,
    })
}

fn nonzero(marking: &[u32]) -> Vec<(usize, u32)> {
    marking
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(p, &c)| (p, c))
        .collect()
}

/// Translates a process model into a workflow net with a unique source and
/// sink.
pub fn to_workflow_net(model: &PowlModel) -> WorkflowNet {
    let mut builder = NetBuilder::default();
    let source = builder.place("source");
    let sink = builder.place("sink");
    builder.subnet(model, source, sink);
    let mut net = WorkflowNet {
        place_names: builder.place_names,
        transition_labels: builder.transition_labels,
        presets: builder.presets,
        postsets: builder.postsets,
        source,
        sink,
    };
    fuse_series_silents(&mut net);
    net
}

/// Series fusion: a silent transition with a single input place, a single
/// output place, and no competition on its input (the place has no other
/// consumer) is a pure stutter step. Merging its input place into its output
/// place preserves the language and soundness in both directions. Applied to
/// a fixpoint; keeps the state space of concurrent sections small.
fn fuse_series_silents(net: &mut WorkflowNet) {
    loop {
        let mut fused = false;
        'search: for t in 0..net.transition_count() {
            if net.transition_labels[t].is_some()
                || net.presets[t].len() != 1
                || net.postsets[t].len() != 1
            {
                continue;
            }
            let p = net.presets[t][0];
            let q = net.postsets[t][0];
            if p == q || p == net.source {
                continue;
            }
            // p must have no consumer besides t.
            for other in 0..net.transition_count() {
                if other != t && net.presets[other].contains(&p) {
                    continue 'search;
                }
            }
            // Redirect p's producers to q, drop t and p.
            for postset in &mut net.postsets {
                for place in postset.iter_mut() {
                    if *place == p {
                        *place = q;
                    }
                }
            }
            net.transition_labels.remove(t);
            net.presets.remove(t);
            net.postsets.remove(t);
            remove_place(net, p);
            fused = true;
            break;
        }
        if !fused {
            return;
        }
    }
}

fn remove_place(net: &mut WorkflowNet, removed: usize) {
    debug_assert!(removed != net.source && removed != net.sink);
    debug_assert!(!net
        .presets
        .iter()
        .chain(&net.postsets)
        .any(|ps| ps.contains(&removed)));
    net.place_names.remove(removed);
    let remap = |place: usize| if place > removed { place - 1 } else { place };
    for preset in &mut net.presets {
        for place in preset.iter_mut() {
            *place = remap(*place);
        }
    }
    for postset in &mut net.postsets {
        for place in postset.iter_mut() {
            *place = remap(*place);
        }
    }
    net.source = remap(net.source);
    net.sink = remap(net.sink);
}

#[derive(Default)]
struct NetBuilder {
    place_names: Vec<String>,
    transition_labels: Vec<Option<String>>,
    presets: Vec<Vec<usize>>,
    postsets: Vec<Vec<usize>>,
}

impl NetBuilder {
    fn place(&mut self, hint: &str) -> usize {
        self.place_names
            .push(format!("p{}_{hint}", self.place_names.len()));
        self.place_names.len() - 1
    }

    fn transition(&mut self, label: Option<String>, pre: Vec<usize>, post: Vec<usize>) {
        self.transition_labels.push(label);
        self.presets.push(pre);
        self.postsets.push(post);
    }

    fn subnet(&mut self, model: &PowlModel, entry: usize, exit: usize) {
        match model {
            PowlModel::Transition { label, .. } => {
                self.transition(Some(label.clone()), vec![entry], vec![exit]);
            }
            PowlModel::Silent { .. } => {
                self.transition(None, vec![entry], vec![exit]);
            }
            PowlModel::Xor { children } => {
                // Children attach to the shared entry and exit directly; the
                // single token on entry keeps the branches exclusive.
                for child in children {
                    self.subnet(child, entry, exit);
                }
            }
            PowlModel::Loop { do_part, redo_part } => {
                // The silent enter keeps the entry place single-use; the redo
                // subnet loops straight back to the do entry.
                let do_entry = self.place("do_in");
                let do_exit = self.place("do_out");
                self.transition(None, vec![entry], vec![do_entry]);
                self.subnet(do_part, do_entry, do_exit);
                self.subnet(redo_part, do_exit, do_entry);
                self.transition(None, vec![do_exit], vec![exit]);
            }
            PowlModel::Order { children, edges } => {
                // One control token per child, one place per edge of the
                // transitive reduction (token chaining enforces the closed
                // relation), one done token per child. Children without
                // incoming or outgoing edges skip the start/finish joins.
                let reduced: BTreeSet<(usize, usize)> = edges
                    .iter()
                    .filter(|&&(a, b)| {
                        !(0..children.len()).any(|w| {
                            w != a && w != b && edges.contains(&(a, w)) && edges.contains(&(w, b))
                        })
                    })
                    .copied()
                    .collect();
                let controls: Vec<usize> =
                    (0..children.len()).map(|_| self.place("ctrl")).collect();
                let dones: Vec<usize> = (0..children.len()).map(|_| self.place("done")).collect();
                let edge_places: BTreeMap<(usize, usize), usize> =
                    reduced.iter().map(|&e| (e, self.place("edge"))).collect();
                self.transition(None, vec![entry], controls.clone());
                for (i, child) in children.iter().enumerate() {
                    let incoming: Vec<usize> = edge_places
                        .iter()
                        .filter(|(&(_, to), _)| to == i)
                        .map(|(_, &place)| place)
                        .collect();
                    let outgoing: Vec<usize> = edge_places
                        .iter()
                        .filter(|(&(from, _), _)| from == i)
                        .map(|(_, &place)| place)
                        .collect();
                    let child_entry = if incoming.is_empty() {
                        controls[i]
                    } else {
                        let place = self.place("child_in");
                        let mut pre = vec![controls[i]];
                        pre.extend(incoming);
                        self.transition(None, pre, vec![place]);
                        place
                    };
                    let child_exit = if outgoing.is_empty() {
                        dones[i]
                    } else {
                        let place = self.place("child_out");
                        let mut post = vec![dones[i]];
                        post.extend(outgoing);
                        self.transition(None, vec![place], post);
                        place
                    };
                    self.subnet(child, child_entry, child_exit);
                }
                self.transition(None, dones, vec![exit]);
            }
        }
    }
}

/// Serializes the net as PNML (place/transition net, single page). Silent
/// transitions carry an empty name and a `toolspecific` element flagging
/// them invisible. Output is deterministic.
pub fn export_pnml(net: &WorkflowNet) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n");
    out.push_str("  <net id=\"net1\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n");
    out.push_str("    <page id=\"page1\">\n");
    for (p, name) in net.place_names.iter().enumerate() {
        out.push_str(&format!("      <place id=\"p{p}\">\n"));
        out.push_str(&format!(
            "        <name><text>{}</text></name>\n",
            escape_xml(name)
        ));
        if p == net.source {
            out.push_str("        <initialMarking><text>1</text></initialMarking>\n");
        }
        out.push_str("      </place>\n");
    }
    for (t, label) in net.transition_labels.iter().enumerate() {
        out.push_str(&format!("      <transition id=\"t{t}\">\n"));
        match label {
            Some(label) => {
                out.push_str(&format!(
                    "        <name><text>{}</text></name>\n",
                    escape_xml(label)
                ));
            }
            None => {
                out.push_str("        <name><text></text></name>\n");
                out.push_str(
                    "        <toolspecific tool=\"powl-discovery\" version=\"0.1\" invisible=\"true\"/>\n",
                );
            }
        }
        out.push_str("      </transition>\n");
    }
    let mut arc_id = 0usize;
    for t in 0..net.transition_count() {
        for &p in &net.presets[t] {
            out.push_str(&format!(
                "      <arc id=\"a{arc_id}\" source=\"p{p}\" target=\"t{t}\"/>\n"
            ));
            arc_id += 1;
        }
        for &p in &net.postsets[t] {
            out.push_str(&format!(
                "      <arc id=\"a{arc_id}\" source=\"t{t}\" target=\"p{p}\"/>\n"
            ));
            arc_id += 1;
        }
    }
    out.push_str("    </page>\n  </net>\n</pnml>\n");
    out
}

/// Renders the net as a Graphviz digraph: circles for places, boxes for
/// transitions, filled boxes for silent transitions.
pub fn export_net_dot(net: &WorkflowNet) -> String {
    let mut out = String::from("digraph net {\n  rankdir=LR;\n");
    for p in 0..net.place_count() {
        let extra = if p == net.source {
            ", xlabel=\"source\""
        } else if p == net.sink {
            ", xlabel=\"sink\""
        } else {
            ""
        };
        out.push_str(&format!("  p{p} [shape=circle, label=\"\"{extra}];\n"));
    }
    for (t, label) in net.transition_labels.iter().enumerate() {
        match label {
            Some(label) => out.push_str(&format!(
                "  t{t} [shape=box, label=\"{}\"];\n",
                crate::pot::escape_dot(label)
            )),
            None => out.push_str(&format!(
                "  t{t} [shape=box, style=filled, fillcolor=black, label=\"\", height=0.1];\n"
            )),
        }
    }
    for t in 0..net.transition_count() {
        for &p in &net.presets[t] {
            out.push_str(&format!("  p{p} -> t{t};\n"));
        }
        for &p in &net.postsets[t] {
            out.push_str(&format!("  t{t} -> p{p};\n"));
        }
    }
    out.push_str("}\n");
    out
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Exhaustively enumerates the label language of the net up to `max_len`
/// visible events, hiding silent transitions. Exploration is cut off at
/// `state_cap` distinct (marking, word) pairs. Verification helper for
/// cross-checking the net against the model semantics.
pub fn net_language(
    net: &WorkflowNet,
    max_len: usize,
    state_cap: usize,
) -> Result<std::collections::BTreeSet<Vec<String>>, NetError> {
    use std::collections::BTreeSet;
    if state_cap == 0 {
        return Err(NetError::ZeroBudget);
    }
    let final_marking = net.final_marking();
    let mut words = BTreeSet::new();
    let mut seen: HashMap<(Vec<u32>, Vec<String>), ()> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back((net.initial_marking(), Vec::<String>::new()));
    seen.insert((net.initial_marking(), Vec::new()), ());

    while let Some((marking, word)) = queue.pop_front() {
        if marking == final_marking {
            words.insert(word.clone());
        }
        for t in 0..net.transition_count() {
            if !net.enabled(&marking, t) {
                continue;
            }
            let next = net.fire(&marking, t);
            let next_word = match net.transition_label(t) {
                Some(label) => {
                    if word.len() >= max_len {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(label.to_string());
                    w
                }
                None => word.clone(),
            };
            let key = (next, next_word);
            if !seen.contains_key(&key) {
                if seen.len() >= state_cap {
                    return Err(NetError::StateCapExceeded(state_cap));
                }
                seen.insert(key.clone(), ());
                queue.push_back(key);
            }
        }
    }
    Ok(words)
}
