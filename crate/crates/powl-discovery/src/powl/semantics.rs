//! Execution semantics: trace membership and bounded language enumeration.
//!
//! A model's language is built from its structure: a labeled leaf emits its
//! label, a silent leaf emits nothing, a choice executes exactly one child, a
//! loop executes its do-part followed by zero or more redo/do rounds, and an
//! order interleaves one trace per child such that all events of a child
//! precede all events of its successors in the edge relation.
//!
//! [`accepts`] decides membership by searching an execution-state space (one
//! state per partially consumed model, silent moves folded in) and reports
//! budget exhaustion as an explicit error instead of a verdict. It is
//! deliberately independent of [`enumerate_language`], which materializes the
//! bounded language recursively; the two are cross-checked in tests.

use super::PowlModel;
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

/// Default cap on the number of sequences materialized by language
/// enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    /// The verdict is unknown: the search stopped before exhausting the
    /// reachable states, so this is not a rejection.
    #[error("state budget of {budget} exhausted after {explored} states; membership is unknown")]
    BudgetExhausted { budget: usize, explored: usize },
    #[error("language enumeration exceeded the cap of {cap} sequences")]
    CapExceeded { cap: usize },
    #[error("budget must be at least 1")]
    ZeroBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ExecState {
    Leaf {
        done: bool,
    },
    SilentLeaf,
    Xor {
        chosen: Option<(usize, Box<ExecState>)>,
    },
    Loop {
        in_redo: bool,
        inner: Box<ExecState>,
    },
    Order {
        slots: Vec<Slot>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Slot {
    Idle,
    Running(ExecState),
    Done,
}

fn initial(model: &PowlModel) -> ExecState {
    match model {
        PowlModel::Transition { .. } => ExecState::Leaf { done: false },
        PowlModel::Silent { .. } => ExecState::SilentLeaf,
        PowlModel::Xor { .. } => ExecState::Xor { chosen: None },
        PowlModel::Loop { do_part, .. } => ExecState::Loop {
            in_redo: false,
            inner: Box::new(initial(do_part)),
        },
        PowlModel::Order { children, .. } => ExecState::Order {
            slots: vec![Slot::Idle; children.len()],
        },
    }
}

/// Whether the remaining execution can complete without emitting anything.
fn can_finish(model: &PowlModel, state: &ExecState) -> bool {
    match (model, state) {
        (PowlModel::Transition { .. }, ExecState::Leaf { done }) => *done,
        (PowlModel::Silent { .. }, ExecState::SilentLeaf) => true,
        (PowlModel::Xor { children }, ExecState::Xor { chosen }) => match chosen {
            Some((i, inner)) => can_finish(&children[*i], inner),
            None => children.iter().any(nullable),
        },
        (PowlModel::Loop { do_part, redo_part }, ExecState::Loop { in_redo, inner }) => {
            if *in_redo {
                can_finish(redo_part, inner) && nullable(do_part)
            } else {
                can_finish(do_part, inner)
            }
        }
        (PowlModel::Order { children, .. }, ExecState::Order { slots }) => {
            slots.iter().zip(children).all(|(slot, child)| match slot {
                Slot::Idle => nullable(child),
                Slot::Running(inner) => can_finish(child, inner),
                Slot::Done => true,
            })
        }
        _ => unreachable!("state shape always mirrors the model"),
    }
}

fn nullable(model: &PowlModel) -> bool {
    can_finish(model, &initial(model))
}

/// All states reachable by emitting `symbol` once, silent moves included.
fn successors(model: &PowlModel, state: &ExecState, symbol: &str, out: &mut Vec<ExecState>) {
    match (model, state) {
        (PowlModel::Transition { label, .. }, ExecState::Leaf { done }) => {
            if !done && label == symbol {
                out.push(ExecState::Leaf { done: true });
            }
        }
        (PowlModel::Silent { .. }, ExecState::SilentLeaf) => {}
        (PowlModel::Xor { children }, ExecState::Xor { chosen }) => match chosen {
            Some((i, inner)) => {
                let mut inner_out = Vec::new();
                successors(&children[*i], inner, symbol, &mut inner_out);
                out.extend(inner_out.into_iter().map(|s| ExecState::Xor {
                    chosen: Some((*i, Box::new(s))),
                }));
            }
            None => {
                for (i, child) in children.iter().enumerate() {
                    let mut inner_out = Vec::new();
                    successors(child, &initial(child), symbol, &mut inner_out);
                    out.extend(inner_out.into_iter().map(|s| ExecState::Xor {
                        chosen: Some((i, Box::new(s))),
                    }));
                }
            }
        },
        (PowlModel::Loop { do_part, redo_part }, ExecState::Loop { in_redo, inner }) => {
            let wrap = |in_redo: bool, states: Vec<ExecState>, out: &mut Vec<ExecState>| {
                out.extend(states.into_iter().map(|s| ExecState::Loop {
                    in_redo,
                    inner: Box::new(s),
                }));
            };
            let mut stepped = Vec::new();
            if *in_redo {
                successors(redo_part, inner, symbol, &mut stepped);
                wrap(true, stepped, out);
                if can_finish(redo_part, inner) {
                    let mut next_do = Vec::new();
                    successors(do_part, &initial(do_part), symbol, &mut next_do);
                    wrap(false, next_do, out);
                    if nullable(do_part) {
                        let mut next_redo = Vec::new();
                        successors(redo_part, &initial(redo_part), symbol, &mut next_redo);
                        wrap(true, next_redo, out);
                    }
                }
            } else {
                successors(do_part, inner, symbol, &mut stepped);
                wrap(false, stepped, out);
                if can_finish(do_part, inner) {
                    let mut next_redo = Vec::new();
                    successors(redo_part, &initial(redo_part), symbol, &mut next_redo);
                    wrap(true, next_redo, out);
                    if nullable(redo_part) {
                        let mut next_do = Vec::new();
                        successors(do_part, &initial(do_part), symbol, &mut next_do);
                        wrap(false, next_do, out);
                    }
                }
            }
        }
        (PowlModel::Order { children, edges }, ExecState::Order { slots }) => {
            for (i, child) in children.iter().enumerate() {
                if matches!(slots[i], Slot::Done) {
                    continue;
                }
                let predecessors: Vec<usize> = edges
                    .iter()
                    .filter(|&&(_, to)| to == i)
                    .map(|&(from, _)| from)
                    .collect();
                let blocked = predecessors.iter().any(|&j| match &slots[j] {
                    Slot::Done => false,
                    Slot::Running(inner) => !can_finish(&children[j], inner),
                    Slot::Idle => !nullable(&children[j]),
                });
                if blocked {
                    continue;
                }
                let mut stepped = Vec::new();
                match &slots[i] {
                    Slot::Idle => successors(child, &initial(child), symbol, &mut stepped),
                    Slot::Running(inner) => successors(child, inner, symbol, &mut stepped),
                    Slot::Done => unreachable!(),
                }
                for next in stepped {
                    let mut new_slots = slots.clone();
                    for &j in &predecessors {
                        new_slots[j] = Slot::Done;
                    }
                    new_slots[i] = Slot::Running(next);
                    out.push(ExecState::Order { slots: new_slots });
                }
            }
        }
        _ => unreachable!("state shape always mirrors the model"),
    }
}

/// Decides whether `trace` is in the language of `model`.
///
/// `budget` caps the number of distinct execution states explored. Running
/// out of budget is reported as [`SemanticsError::BudgetExhausted`], which
/// means "unknown", not "rejected".
pub fn accepts<S: AsRef<str>>(
    model: &PowlModel,
    trace: &[S],
    budget: usize,
) -> Result<bool, SemanticsError> {
    if budget == 0 {
        return Err(SemanticsError::ZeroBudget);
    }
    let mut frontier: HashSet<ExecState> = HashSet::new();
    frontier.insert(initial(model));
    let mut explored = 1usize;
    for symbol in trace {
        let mut next: HashSet<ExecState> = HashSet::new();
        let mut buffer = Vec::new();
        for state in &frontier {
            buffer.clear();
            successors(model, state, symbol.as_ref(), &mut buffer);
            for successor in buffer.drain(..) {
                if next.insert(successor) {
                    explored += 1;
                    if explored > budget {
                        return Err(SemanticsError::BudgetExhausted { budget, explored });
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        frontier = next;
    }
    Ok(frontier.iter().any(|state| can_finish(model, state)))
}

/// Enumerates every trace of length at most `max_len` producible when each
/// loop executes its redo-part at most `max_redo` times. Uses the default
/// sequence cap.
pub fn enumerate_language(
    model: &PowlModel,
    max_redo: u32,
    max_len: usize,
) -> Result<BTreeSet<Vec<String>>, SemanticsError> {
    enumerate_language_capped(model, max_redo, max_len, DEFAULT_ENUMERATION_CAP)
}

/// [`enumerate_language`] with an explicit cap on the number of sequences.
pub fn enumerate_language_capped(
    model: &PowlModel,
    max_redo: u32,
    max_len: usize,
    cap: usize,
) -> Result<BTreeSet<Vec<String>>, SemanticsError> {
    match model {
        PowlModel::Transition { label, .. } => {
            let mut out = BTreeSet::new();
            if max_len >= 1 {
                out.insert(vec![label.clone()]);
            }
            Ok(out)
        }
        PowlModel::Silent { .. } => Ok(BTreeSet::from([Vec::new()])),
        PowlModel::Xor { children } => {
            let mut out = BTreeSet::new();
            for child in children {
                let words = enumerate_language_capped(child, max_redo, max_len, cap)?;
                for w in words {
                    out.insert(w);
                    if out.len() > cap {
                        return Err(SemanticsError::CapExceeded { cap });
                    }
                }
            }
            Ok(out)
        }
        PowlModel::Loop { do_part, redo_part } => {
            let do_words = enumerate_language_capped(do_part, max_redo, max_len, cap)?;
            if do_words.is_empty() {
                return Ok(BTreeSet::new());
            }
            let redo_words = enumerate_language_capped(redo_part, max_redo, max_len, cap)?;
            let mut out = do_words.clone();
            let mut round = do_words.clone();
            for _ in 0..max_redo {
                if redo_words.is_empty() {
                    break;
                }
                let with_redo = concat_sets(&round, &redo_words, max_len, cap)?;
                round = concat_sets(&with_redo, &do_words, max_len, cap)?;
                if round.is_empty() {
                    break;
                }
                for w in &round {
                    out.insert(w.clone());
                    if out.len() > cap {
                        return Err(SemanticsError::CapExceeded { cap });
                    }
                }
            }
            Ok(out)
        }
        PowlModel::Order { children, edges } => {
            let mut child_words = Vec::with_capacity(children.len());
            for child in children {
                let words = enumerate_language_capped(child, max_redo, max_len, cap)?;
                if words.is_empty() {
                    return Ok(BTreeSet::new());
                }
                child_words.push(words.into_iter().collect::<Vec<_>>());
            }
            let mut out = BTreeSet::new();
            let mut tuple: Vec<&Vec<String>> = Vec::with_capacity(children.len());
            interleave_tuples(&child_words, edges, max_len, cap, &mut tuple, &mut out)?;
            Ok(out)
        }
    }
}

fn concat_sets(
    left: &BTreeSet<Vec<String>>,
    right: &BTreeSet<Vec<String>>,
    max_len: usize,
    cap: usize,
) -> Result<BTreeSet<Vec<String>>, SemanticsError> {
    let mut out = BTreeSet::new();
    for l in left {
        for r in right {
            if l.len() + r.len() > max_len {
                continue;
            }
            let mut w = l.clone();
            w.extend(r.iter().cloned());
            out.insert(w);
            if out.len() > cap {
                return Err(SemanticsError::CapExceeded { cap });
            }
        }
    }
    Ok(out)
}

fn interleave_tuples<'a>(
    child_words: &'a [Vec<Vec<String>>],
    edges: &BTreeSet<(usize, usize)>,
    max_len: usize,
    cap: usize,
    tuple: &mut Vec<&'a Vec<String>>,
    out: &mut BTreeSet<Vec<String>>,
) -> Result<(), SemanticsError> {
    if tuple.len() == child_words.len() {
        let total: usize = tuple.iter().map(|w| w.len()).sum();
        if total <= max_len {
            let words: Vec<&[String]> = tuple.iter().map(|w| w.as_slice()).collect();
            let mut positions = vec![0usize; words.len()];
            let mut current = Vec::with_capacity(total);
            interleave(&words, edges, &mut positions, &mut current, out, cap)?;
        }
        return Ok(());
    }
    let so_far: usize = tuple.iter().map(|w| w.len()).sum();
    for word in &child_words[tuple.len()] {
        if so_far + word.len() > max_len {
            continue;
        }
        tuple.push(word);
        interleave_tuples(child_words, edges, max_len, cap, tuple, out)?;
        tuple.pop();
    }
    Ok(())
}

fn interleave(
    words: &[&[String]],
    edges: &BTreeSet<(usize, usize)>,
    positions: &mut Vec<usize>,
    current: &mut Vec<String>,
    out: &mut BTreeSet<Vec<String>>,
    cap: usize,
) -> Result<(), SemanticsError> {
    if positions.iter().zip(words).all(|(&p, w)| p == w.len()) {
        out.insert(current.clone());
        if out.len() > cap {
            return Err(SemanticsError::CapExceeded { cap });
        }
        return Ok(());
    }
    for i in 0..words.len() {
        if positions[i] == words[i].len() {
            continue;
        }
        let ready = edges
            .iter()
            .filter(|&&(_, to)| to == i)
            .all(|&(from, _)| positions[from] == words[from].len());
        if !ready {
            continue;
        }
        current.push(words[i][positions[i]].clone());
        positions[i] += 1;
        interleave(words, edges, positions, current, out, cap)?;
        positions[i] -= 1;
        current.pop();
    }
    Ok(())
}
