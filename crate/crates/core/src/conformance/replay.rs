use std::collections::{BTreeMap, HashSet, VecDeque};

use indexmap::IndexMap;
use rayon::prelude::*;

use super::ConformanceError;
use crate::eventlog::EventLog;
use crate::petrinet::{AcceptingPetriNet, PetriNet};

pub const DEFAULT_SILENT_DEPTH: usize = 4;

/// Token accounting of one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayResult {
    pub produced: u64,
    pub consumed: u64,
    pub missing: u64,
    pub remaining: u64,
    pub trace_fitness: f64,
    pub reached_final: bool,
    /// Ids of all fired transitions, silent ones included.
    pub fired_sequence: Vec<String>,
}

impl ReplayResult {
    pub fn is_fit(&self) -> bool {
        self.missing == 0 && self.remaining == 0
    }
}

pub(crate) fn fitness(produced: u64, consumed: u64, missing: u64, remaining: u64) -> f64 {
    let part = |bad: u64, total: u64| {
        if total == 0 {
            1.0
        } else {
            1.0 - bad as f64 / total as f64
        }
    };
    0.5 * part(missing, consumed) + 0.5 * part(remaining, produced)
}

/// Label-to-transition lookup plus silent-transition search over dense markings.
pub(crate) struct Replayer<'a> {
    pub net: &'a PetriNet,
    labels: BTreeMap<&'a str, usize>,
    silent: Vec<usize>,
    im: Vec<u32>,
    fm: Vec<u32>,
    silent_depth: usize,
}

/// Mutable token game state.
#[derive(Debug, Clone)]
pub(crate) struct TokenState {
    pub marking: Vec<u32>,
    pub produced: u64,
    pub consumed: u64,
    pub missing: u64,
    pub fired: Vec<usize>,
}

impl<'a> Replayer<'a> {
    pub fn new(anet: &'a AcceptingPetriNet, silent_depth: usize) -> Result<Self, ConformanceError> {
        if anet.im.is_empty() {
            return Err(ConformanceError::EmptyInitialMarking);
        }
        if anet.fm.is_empty() {
            return Err(ConformanceError::EmptyFinalMarking);
        }
        let mut labels = BTreeMap::new();
        for (label, ts) in anet.transitions_by_label() {
            if ts.len() > 1 {
                return Err(ConformanceError::DuplicateLabel(label.to_string()));
            }
            labels.insert(label, ts[0]);
        }
        let net = &anet.net;
        let silent = (0..net.transitions().len())
            .filter(|&t| net.transitions()[t].is_silent())
            .collect();
        Ok(Replayer {
            net,
            labels,
            silent,
            im: net.to_dense(&anet.im)?,
            fm: net.to_dense(&anet.fm)?,
            silent_depth,
        })
    }

    pub fn start(&self) -> TokenState {
        TokenState {
            marking: self.im.clone(),
            produced: self.im.iter().map(|&n| u64::from(n)).sum(),
            consumed: 0,
            missing: 0,
            fired: Vec::new(),
        }
    }

    fn fire(&self, state: &mut TokenState, t: usize) {
        state.consumed += self.net.preset(t).len() as u64;
        state.produced += self.net.postset(t).len() as u64;
        self.net.fire_dense(t, &mut state.marking);
        state.fired.push(t);
    }

    /// Shortest silent firing sequence (at most `silent_depth` long) from `marking` to a marking
    /// satisfying `goal`.
    fn silent_path(&self, marking: &[u32], goal: impl Fn(&[u32]) -> bool) -> Option<Vec<usize>> {
        if goal(marking) {
            return Some(Vec::new());
        }
        let mut seen: HashSet<Vec<u32>> = HashSet::from([marking.to_vec()]);
        let mut queue = VecDeque::from([(marking.to_vec(), Vec::new())]);
        while let Some((m, path)) = queue.pop_front() {
            if path.len() >= self.silent_depth {
                continue;
            }
            for &t in &self.silent {
                if !self.net.is_enabled_dense(t, &m) {
                    continue;
                }
                let mut next = m.clone();
                self.net.fire_dense(t, &mut next);
                if !seen.insert(next.clone()) {
                    continue;
                }
                let mut next_path = path.clone();
                next_path.push(t);
                if goal(&next) {
                    return Some(next_path);
                }
                queue.push_back((next, next_path));
            }
        }
        None
    }

    /// Replays one event. Returns false when the label has no transition; the caller decides how
    /// to account for it.
    pub fn step(&self, state: &mut TokenState, label: &str) -> bool {
        let Some(&t) = self.labels.get(label) else {
            return false;
        };
        if !self.net.is_enabled_dense(t, &state.marking) {
            if let Some(path) = self.silent_path(&state.marking, |m| self.net.is_enabled_dense(t, m)) {
                for s in path {
                    self.fire(state, s);
                }
            } else {
                for &p in self.net.preset(t) {
                    if state.marking[p] == 0 {
                        state.marking[p] += 1;
                        state.missing += 1;
                    }
                }
            }
        }
        self.fire(state, t);
        true
    }

    /// Labels of visible transitions enabled after at most `silent_depth` silent firings.
    pub fn allowed_labels(&self, marking: &[u32]) -> HashSet<&'a str> {
        let mut allowed = HashSet::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::from([marking.to_vec()]);
        let mut frontier = vec![marking.to_vec()];
        for depth in 0..=self.silent_depth {
            let mut next_frontier = Vec::new();
            for m in &frontier {
                for (&label, &t) in &self.labels {
                    if self.net.is_enabled_dense(t, m) {
                        allowed.insert(label);
                    }
                }
                if depth == self.silent_depth {
                    continue;
                }
                for &s in &self.silent {
                    if self.net.is_enabled_dense(s, m) {
                        let mut next = m.clone();
                        self.net.fire_dense(s, &mut next);
                        if seen.insert(next.clone()) {
                            next_frontier.push(next);
                        }
                    }
                }
            }
            frontier = next_frontier;
        }
        allowed
    }

    pub fn replay(&self, labels: &[String]) -> ReplayResult {
        let mut state = self.start();
        let mut unknown = 0u64;
        for label in labels {
            if !self.step(&mut state, label) {
                unknown += 1;
            }
        }
        let exact = |m: &[u32]| m == self.fm.as_slice();
        let covers = |m: &[u32]| m.iter().zip(&self.fm).all(|(have, need)| have >= need);
        let path = self
            .silent_path(&state.marking, exact)
            .or_else(|| self.silent_path(&state.marking, covers));
        if let Some(path) = path {
            for s in path {
                self.fire(&mut state, s);
            }
        }
        let reached_final = exact(&state.marking);
        for (have, &need) in state.marking.iter_mut().zip(&self.fm) {
            state.consumed += u64::from(need);
            if *have < need {
                state.missing += u64::from(need - *have);
                *have = 0;
            } else {
                *have -= need;
            }
        }
        let produced = state.produced + unknown;
        let consumed = state.consumed + unknown;
        let missing = state.missing + unknown;
        let remaining = state.marking.iter().map(|&n| u64::from(n)).sum::<u64>() + unknown;
        ReplayResult {
            produced,
            consumed,
            missing,
            remaining,
            trace_fitness: fitness(produced, consumed, missing, remaining),
            reached_final,
            fired_sequence: state
                .fired
                .iter()
                .map(|&t| self.net.transitions()[t].id.clone())
                .collect(),
        }
    }
}

/// Variants of `log` in first-appearance order, each with the indices of its traces.
pub(crate) fn variants(log: &EventLog) -> Result<IndexMap<Vec<String>, Vec<usize>>, ConformanceError> {
    let mut variants: IndexMap<Vec<String>, Vec<usize>> = IndexMap::new();
    for (i, trace) in log.traces.iter().enumerate() {
        variants.entry(trace.activities()?).or_default().push(i);
    }
    Ok(variants)
}

/// Computes `f` once per variant (in parallel) and expands the results back to trace order.
pub(crate) fn per_variant<T, F>(log: &EventLog, f: F) -> Result<Vec<T>, ConformanceError>
where
    T: Clone + Send,
    F: Fn(&[String]) -> Result<T, ConformanceError> + Sync,
{
    let variants = variants(log)?;
    let keys: Vec<(&Vec<String>, &Vec<usize>)> = variants.iter().collect();
    let computed: Vec<T> = keys.par_iter().map(|(labels, _)| f(labels)).collect::<Result<_, _>>()?;
    let mut out: Vec<Option<T>> = vec![None; log.traces.len()];
    for ((_, indices), result) in keys.iter().zip(computed) {
        for &i in indices.iter() {
            out[i] = Some(result.clone());
        }
    }
    Ok(out.into_iter().map(|r| r.expect("every trace has a variant")).collect())
}

/// Token-based replay of every trace, with silent transitions searched up to depth 4.
pub fn token_replay(log: &EventLog, anet: &AcceptingPetriNet) -> Result<Vec<ReplayResult>, ConformanceError> {
    token_replay_with_depth(log, anet, DEFAULT_SILENT_DEPTH)
}

pub fn token_replay_with_depth(
    log: &EventLog,
    anet: &AcceptingPetriNet,
    silent_depth: usize,
) -> Result<Vec<ReplayResult>, ConformanceError> {
    let replayer = Replayer::new(anet, silent_depth)?;
    per_variant(log, |labels| Ok(replayer.replay(labels)))
}
