//! Alpha and Alpha+ miners.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{DirectlyFollowsGraph, DiscoveryError};
use crate::eventlog::EventLog;
use crate::petrinet::{AcceptingPetriNet, Marking, PetriNet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `a -> b`
    Causal,
    /// `a <- b`
    ReverseCausal,
    Parallel,
    Unrelated,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Causal => "->",
            Relation::ReverseCausal => "<-",
            Relation::Parallel => "||",
            Relation::Unrelated => "#",
        }
    }
}

/// Footprint matrix over the activities of a DFG (sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    activities: Vec<String>,
    relations: Vec<Vec<Relation>>,
}

impl Footprint {
    pub fn from_dfg(dfg: &DirectlyFollowsGraph) -> Self {
        let activities: Vec<String> = dfg.activities.iter().cloned().collect();
        let relations = activities
            .iter()
            .map(|a| {
                activities
                    .iter()
                    .map(|b| match (dfg.count(a, b) > 0, dfg.count(b, a) > 0) {
                        (true, false) => Relation::Causal,
                        (false, true) => Relation::ReverseCausal,
                        (true, true) => Relation::Parallel,
                        (false, false) => Relation::Unrelated,
                    })
                    .collect()
            })
            .collect();
        Footprint { activities, relations }
    }

    pub fn activities(&self) -> &[String] {
        &self.activities
    }

    pub fn relation(&self, a: &str, b: &str) -> Option<Relation> {
        let i = self.activities.binary_search_by(|x| x.as_str().cmp(a)).ok()?;
        let j = self.activities.binary_search_by(|x| x.as_str().cmp(b)).ok()?;
        Some(self.relations[i][j])
    }

    fn rel(&self, i: usize, j: usize) -> Relation {
        self.relations[i][j]
    }
}

pub type ActivitySet = BTreeSet<String>;

/// All maximal pairs `(A, B)` with `a -> b` for every `a` in A and `b` in B, and A and B each
/// pairwise unrelated (including with themselves). Sorted.
pub fn maximal_pairs(footprint: &Footprint) -> Vec<(ActivitySet, ActivitySet)> {
    let n = footprint.activities.len();
    let unrelated: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| footprint.rel(i, j) == Relation::Unrelated).collect())
        .collect();
    let causal: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| footprint.rel(i, j) == Relation::Causal).collect())
        .collect();

    let can_join_left = |x: usize, left: &[usize], right: &[usize]| {
        !left.contains(&x)
            && unrelated[x][x]
            && left.iter().all(|&a| unrelated[x][a])
            && right.iter().all(|&b| causal[x][b])
    };
    let can_join_right = |x: usize, left: &[usize], right: &[usize]| {
        !right.contains(&x)
            && unrelated[x][x]
            && right.iter().all(|&b| unrelated[x][b])
            && left.iter().all(|&a| causal[a][x])
    };

    // Seed with single causal pairs and expand one activity at a time. Validity is hereditary,
    // so a pair is maximal exactly when no single activity can be added on either side.
    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    let mut stack: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if causal[a][b] && unrelated[a][a] && unrelated[b][b] {
                let seed = (vec![a], vec![b]);
                if seen.insert(seed.clone()) {
                    stack.push(seed);
                }
            }
        }
    }
    let mut maximal = Vec::new();
    while let Some((left, right)) = stack.pop() {
        let mut extended = false;
        for x in 0..n {
            if can_join_left(x, &left, &right) {
                extended = true;
                let mut l = left.clone();
                l.push(x);
                l.sort_unstable();
                let candidate = (l, right.clone());
                if seen.insert(candidate.clone()) {
                    stack.push(candidate);
                }
            }
            if can_join_right(x, &left, &right) {
                extended = true;
                let mut r = right.clone();
                r.push(x);
                r.sort_unstable();
                let candidate = (left.clone(), r);
                if seen.insert(candidate.clone()) {
                    stack.push(candidate);
                }
            }
        }
        if !extended {
            maximal.push((left, right));
        }
    }
    let names = |idx: &[usize]| -> ActivitySet { idx.iter().map(|&i| footprint.activities[i].clone()).collect() };
    let mut pairs: Vec<(ActivitySet, ActivitySet)> = maximal.iter().map(|(l, r)| (names(l), names(r))).collect();
    pairs.sort();
    pairs
}

pub fn place_name(left: &ActivitySet, right: &ActivitySet) -> String {
    let join = |s: &ActivitySet| s.iter().cloned().collect::<Vec<_>>().join(",");
    format!("p({{{}}},{{{}}})", join(left), join(right))
}

fn fresh_id(net: &PetriNet, base: &str) -> String {
    let mut id = base.to_string();
    while net.has_place(&id) || net.transition(&id).is_some() {
        id.push('\'');
    }
    id
}

struct AlphaNet {
    anet: AcceptingPetriNet,
    source: String,
    sink: String,
    /// `(place id, inputs, outputs)` for every maximal pair.
    places: Vec<(String, ActivitySet, ActivitySet)>,
}

/// Classic Alpha on activity traces. All traces must be non-empty.
fn alpha_from_traces(traces: &[Vec<String>]) -> Result<AlphaNet, DiscoveryError> {
    if let Some(index) = traces.iter().position(Vec::is_empty) {
        return Err(DiscoveryError::EmptyTrace { index });
    }
    let dfg = DirectlyFollowsGraph::from_traces(traces);
    if dfg.start_counts.is_empty() || dfg.end_counts.is_empty() {
        return Err(DiscoveryError::NoStartOrEnd);
    }
    let footprint = Footprint::from_dfg(&dfg);
    let pairs = maximal_pairs(&footprint);

    let mut net = PetriNet::new();
    let labels: BTreeSet<String> = dfg.activities.clone();
    for a in &labels {
        net.add_transition(a, Some(a))?;
    }
    let source = fresh_id(&net, "source");
    net.add_place(&source)?;
    let mut places = Vec::with_capacity(pairs.len());
    for (left, right) in pairs {
        let id = fresh_id(&net, &place_name(&left, &right));
        net.add_place(&id)?;
        for a in &left {
            net.add_arc(a, &id)?;
        }
        for b in &right {
            net.add_arc(&id, b)?;
        }
        places.push((id, left, right));
    }
    let sink = fresh_id(&net, "sink");
    net.add_place(&sink)?;
    for a in dfg.start_counts.keys() {
        net.add_arc(&source, a)?;
    }
    for a in dfg.end_counts.keys() {
        net.add_arc(a, &sink)?;
    }
    let anet = AcceptingPetriNet::new(net, Marking::single(&source), Marking::single(&sink))?;
    Ok(AlphaNet {
        anet,
        source,
        sink,
        places,
    })
}

pub fn alpha_classic(log: &EventLog) -> Result<AcceptingPetriNet, DiscoveryError> {
    let traces = log.activity_traces()?;
    alpha_from_traces(&traces).map(|alpha| alpha.anet)
}

/// Neighbouring activities of a short loop; `None` is the trace boundary.
type Boundary = BTreeSet<Option<String>>;

/// Alpha+: length-one-loop activities are removed, classic Alpha runs on the reduced traces,
/// and each removed activity is attached as a self-loop to every place whose input set is
/// contained in its observed predecessors and whose output set is contained in its observed
/// successors (ignoring other loop activities; trace start and end count as boundaries).
pub fn alpha_plus(log: &EventLog) -> Result<AcceptingPetriNet, DiscoveryError> {
    let traces = log.activity_traces()?;
    if let Some(index) = traces.iter().position(Vec::is_empty) {
        return Err(DiscoveryError::EmptyTrace { index });
    }
    let dfg = DirectlyFollowsGraph::from_traces(&traces);
    let loops: BTreeSet<String> = dfg.activities.iter().filter(|a| dfg.count(a, a) > 0).cloned().collect();
    if loops.is_empty() {
        return alpha_from_traces(&traces).map(|alpha| alpha.anet);
    }

    // None stands for the trace boundary.
    let mut neighbours: BTreeMap<String, (Boundary, Boundary)> = BTreeMap::new();
    for trace in &traces {
        for (i, a) in trace.iter().enumerate() {
            if !loops.contains(a) {
                continue;
            }
            let before = trace[..i].iter().rev().find(|x| !loops.contains(*x)).cloned();
            let after = trace[i + 1..].iter().find(|x| !loops.contains(*x)).cloned();
            let entry = neighbours.entry(a.clone()).or_default();
            entry.0.insert(before);
            entry.1.insert(after);
        }
    }

    let reduced: Vec<Vec<String>> = traces
        .iter()
        .map(|t| t.iter().filter(|a| !loops.contains(*a)).cloned().collect::<Vec<_>>())
        .filter(|t| !t.is_empty())
        .collect();
    if reduced.is_empty() {
        return Err(DiscoveryError::NoStartOrEnd);
    }
    let reduced_dfg = DirectlyFollowsGraph::from_traces(&reduced);
    let base = alpha_from_traces(&reduced)?;
    let boundary = |set: &BTreeSet<String>| -> Boundary { set.iter().cloned().map(Some).collect() };
    let mut place_sets: Vec<(String, Boundary, Boundary)> = Vec::new();
    place_sets.push((
        base.source.clone(),
        BTreeSet::from([None]),
        boundary(&reduced_dfg.start_counts.keys().cloned().collect()),
    ));
    for (id, left, right) in &base.places {
        place_sets.push((id.clone(), boundary(left), boundary(right)));
    }
    place_sets.push((
        base.sink.clone(),
        boundary(&reduced_dfg.end_counts.keys().cloned().collect()),
        BTreeSet::from([None]),
    ));

    let AcceptingPetriNet { mut net, im, fm } = base.anet;
    for a in &loops {
        let id = fresh_id(&net, a);
        net.add_transition(&id, Some(a))?;
        let (pred, succ) = &neighbours[a];
        for (place, inputs, outputs) in &place_sets {
            if inputs.is_subset(pred) && outputs.is_subset(succ) {
                net.add_arc(place, &id)?;
                net.add_arc(&id, place)?;
            }
        }
    }
    Ok(AcceptingPetriNet::new(net, im, fm)?)
}
