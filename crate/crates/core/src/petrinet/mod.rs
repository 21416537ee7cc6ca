//! Accepting Petri nets, markings and firing semantics. Process trees, the tree-to-net
//! conversion and reachability graphs live in the submodules.

mod convert;
mod reachability;
mod tree;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use self::convert::tree_to_petri;
pub use self::reachability::{reachability_graph, TransitionSystem, TsEdge, TsState, DEFAULT_STATE_BOUND};
pub use self::tree::{Operator, ProcessTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("marking references unknown place `{0}`")]
    ForeignPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("id `{0}` is already used")]
    DuplicateId(String),
    #[error("arc endpoint `{0}` does not exist")]
    UnknownNode(String),
    #[error("arc `{0}` -> `{1}` connects two nodes of the same kind")]
    SameKindArc(String, String),
    #[error("malformed process tree: {0}")]
    MalformedTree(String),
    #[error("state space exceeds bound of {bound} markings")]
    StateSpaceExceeded { bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub id: String,
    /// `None` marks a silent transition.
    pub label: Option<String>,
}

impl Transition {
    pub fn is_silent(&self) -> bool {
        self.label.is_none()
    }

    /// Label as rendered in reports and DOT: `tau` for silent transitions.
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or("tau")
    }
}

/// Place/transition net with unit arc weights.
#[derive(Debug, Clone, Default)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    arcs: Vec<(String, String)>,
    place_index: HashMap<String, usize>,
    transition_index: HashMap<String, usize>,
    preset: Vec<Vec<usize>>,
    postset: Vec<Vec<usize>>,
}

impl PartialEq for PetriNet {
    fn eq(&self, other: &Self) -> bool {
        self.places == other.places && self.transitions == other.transitions && self.arcs == other.arcs
    }
}

impl Eq for PetriNet {}

impl PetriNet {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, id: &str) -> Result<(), NetError> {
        if self.place_index.contains_key(id) || self.transition_index.contains_key(id) {
            Err(NetError::DuplicateId(id.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn add_place(&mut self, id: &str) -> Result<(), NetError> {
        self.check_fresh(id)?;
        self.place_index.insert(id.to_string(), self.places.len());
        self.places.push(id.to_string());
        Ok(())
    }

    pub fn add_transition(&mut self, id: &str, label: Option<&str>) -> Result<(), NetError> {
        self.check_fresh(id)?;
        self.transition_index.insert(id.to_string(), self.transitions.len());
        self.transitions.push(Transition {
            id: id.to_string(),
            label: label.map(str::to_string),
        });
        self.preset.push(Vec::new());
        self.postset.push(Vec::new());
        Ok(())
    }

    /// Adds an arc between a place and a transition (either direction). Re-adding an existing
    /// arc is a no-op.
    pub fn add_arc(&mut self, source: &str, target: &str) -> Result<(), NetError> {
        let src_place = self.place_index.get(source).copied();
        let src_trans = self.transition_index.get(source).copied();
        let tgt_place = self.place_index.get(target).copied();
        let tgt_trans = self.transition_index.get(target).copied();
        if src_place.is_none() && src_trans.is_none() {
            return Err(NetError::UnknownNode(source.to_string()));
        }
        if tgt_place.is_none() && tgt_trans.is_none() {
            return Err(NetError::UnknownNode(target.to_string()));
        }
        let (list, place) = match (src_place, src_trans, tgt_place, tgt_trans) {
            (Some(p), _, _, Some(t)) => (&mut self.preset[t], p),
            (_, Some(t), Some(p), _) => (&mut self.postset[t], p),
            _ => return Err(NetError::SameKindArc(source.to_string(), target.to_string())),
        };
        if let Err(pos) = list.binary_search(&place) {
            list.insert(pos, place);
            self.arcs.push((source.to_string(), target.to_string()));
        }
        Ok(())
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn arcs(&self) -> &[(String, String)] {
        &self.arcs
    }

    pub fn has_place(&self, id: &str) -> bool {
        self.place_index.contains_key(id)
    }

    pub fn transition(&self, id: &str) -> Option<&Transition> {
        self.transition_index.get(id).map(|&i| &self.transitions[i])
    }

    pub fn place_idx(&self, id: &str) -> Option<usize> {
        self.place_index.get(id).copied()
    }

    pub fn transition_idx(&self, id: &str) -> Option<usize> {
        self.transition_index.get(id).copied()
    }

    /// Input place indices of transition `t`, sorted.
    pub fn preset(&self, t: usize) -> &[usize] {
        &self.preset[t]
    }

    pub fn postset(&self, t: usize) -> &[usize] {
        &self.postset[t]
    }

    /// Total number of arcs touching each node: `(per place, per transition)`.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut place_deg = vec![0; self.places.len()];
        let mut trans_deg = vec![0; self.transitions.len()];
        for (deg, (pre, post)) in trans_deg.iter_mut().zip(self.preset.iter().zip(&self.postset)) {
            for &p in pre.iter().chain(post) {
                place_deg[p] += 1;
                *deg += 1;
            }
        }
        (place_deg, trans_deg)
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty() && self.transitions.is_empty()
    }

    pub(crate) fn to_dense(&self, marking: &Marking) -> Result<Vec<u32>, NetError> {
        let mut dense = vec![0; self.places.len()];
        for (place, &count) in marking.iter() {
            let idx = self
                .place_idx(place)
                .ok_or_else(|| NetError::ForeignPlace(place.to_string()))?;
            dense[idx] = count;
        }
        Ok(dense)
    }

    pub(crate) fn to_sparse(&self, dense: &[u32]) -> Marking {
        let mut marking = Marking::new();
        for (idx, &count) in dense.iter().enumerate() {
            marking.add(&self.places[idx], count);
        }
        marking
    }

    pub(crate) fn is_enabled_dense(&self, t: usize, dense: &[u32]) -> bool {
        self.preset[t].iter().all(|&p| dense[p] > 0)
    }

    pub(crate) fn fire_dense(&self, t: usize, dense: &mut [u32]) {
        for &p in &self.preset[t] {
            dense[p] -= 1;
        }
        for &p in &self.postset[t] {
            dense[p] += 1;
        }
    }
}

/// Multiset of places. Only strictly positive counts are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(BTreeMap<String, u32>);

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_places<S: AsRef<str>>(places: &[(S, u32)]) -> Self {
        let mut marking = Marking::new();
        for (p, n) in places {
            marking.add(p.as_ref(), *n);
        }
        marking
    }

    /// One token on `place`.
    pub fn single(place: &str) -> Self {
        Self::from_places(&[(place, 1)])
    }

    pub fn get(&self, place: &str) -> u32 {
        self.0.get(place).copied().unwrap_or(0)
    }

    pub fn add(&mut self, place: &str, count: u32) {
        if count > 0 {
            *self.0.entry(place.to_string()).or_insert(0) += count;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&v| u64::from(v)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (place, count)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{place}:{count}")?;
        }
        f.write_str("]")
    }
}

/// Petri net with initial and final marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptingPetriNet {
    pub net: PetriNet,
    pub im: Marking,
    pub fm: Marking,
}

impl AcceptingPetriNet {
    pub fn new(net: PetriNet, im: Marking, fm: Marking) -> Result<Self, NetError> {
        for (place, _) in im.iter().chain(fm.iter()) {
            if !net.has_place(place) {
                return Err(NetError::ForeignPlace(place.to_string()));
            }
        }
        Ok(AcceptingPetriNet { net, im, fm })
    }

    /// Visible transitions grouped by label.
    pub fn transitions_by_label(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.net.transitions().iter().enumerate() {
            if let Some(label) = &t.label {
                by_label.entry(label.as_str()).or_default().push(i);
            }
        }
        by_label
    }
}

/// Transitions whose every input place is marked.
pub fn enabled(anet: &AcceptingPetriNet, marking: &Marking) -> Result<BTreeSet<String>, NetError> {
    let dense = anet.net.to_dense(marking)?;
    Ok(anet
        .net
        .transitions()
        .iter()
        .enumerate()
        .filter(|(t, _)| anet.net.is_enabled_dense(*t, &dense))
        .map(|(_, tr)| tr.id.clone())
        .collect())
}

/// Fires `transition`: one token removed from each input place, one added to each output place.
pub fn fire(anet: &AcceptingPetriNet, marking: &Marking, transition: &str) -> Result<Marking, NetError> {
    let t = anet
        .net
        .transition_idx(transition)
        .ok_or_else(|| NetError::UnknownTransition(transition.to_string()))?;
    let mut dense = anet.net.to_dense(marking)?;
    if !anet.net.is_enabled_dense(t, &dense) {
        return Err(NetError::NotEnabled(transition.to_string()));
    }
    anet.net.fire_dense(t, &mut dense);
    Ok(anet.net.to_sparse(&dense))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> AcceptingPetriNet {
        let mut net = PetriNet::new();
        net.add_place("p1").unwrap();
        net.add_place("p2").unwrap();
        net.add_transition("t", Some("a")).unwrap();
        net.add_arc("p1", "t").unwrap();
        net.add_arc("t", "p2").unwrap();
        AcceptingPetriNet::new(net, Marking::single("p1"), Marking::single("p2")).unwrap()
    }

    #[test]
    fn enabled_follows_input_tokens() {
        let anet = chain();
        let e = enabled(&anet, &Marking::single("p1")).unwrap();
        assert_eq!(e.into_iter().collect::<Vec<_>>(), vec!["t"]);
        assert!(enabled(&anet, &Marking::single("p2")).unwrap().is_empty());
        assert_eq!(
            enabled(&anet, &Marking::single("nowhere")),
            Err(NetError::ForeignPlace("nowhere".into()))
        );
    }

    #[test]
    fn fire_moves_token() {
        let anet = chain();
        let m = fire(&anet, &Marking::single("p1"), "t").unwrap();
        assert_eq!(m, Marking::single("p2"));
        assert_eq!(fire(&anet, &m, "t"), Err(NetError::NotEnabled("t".into())));
    }

    #[test]
    fn fire_split_adds_token() {
        let mut net = PetriNet::new();
        for p in ["pin", "o1", "o2"] {
            net.add_place(p).unwrap();
        }
        net.add_transition("t", None).unwrap();
        net.add_arc("pin", "t").unwrap();
        net.add_arc("t", "o1").unwrap();
        net.add_arc("t", "o2").unwrap();
        let anet = AcceptingPetriNet::new(net, Marking::single("pin"), Marking::new()).unwrap();
        let m = fire(&anet, &anet.im, "t").unwrap();
        assert_eq!(m, Marking::from_places(&[("o1", 1), ("o2", 1)]));
        assert_eq!(m.total(), anet.im.total() + 1);
    }

    #[test]
    fn structural_errors() {
        let mut net = PetriNet::new();
        net.add_place("p").unwrap();
        net.add_place("q").unwrap();
        net.add_transition("t", None).unwrap();
        assert_eq!(net.add_place("t"), Err(NetError::DuplicateId("t".into())));
        assert_eq!(
            net.add_arc("p", "q"),
            Err(NetError::SameKindArc("p".into(), "q".into()))
        );
        assert_eq!(net.add_arc("p", "x"), Err(NetError::UnknownNode("x".into())));
        net.add_arc("p", "t").unwrap();
        net.add_arc("p", "t").unwrap();
        assert_eq!(net.arcs().len(), 1);
        assert!(AcceptingPetriNet::new(net, Marking::single("z"), Marking::new()).is_err());
    }

    #[test]
    fn marking_drops_zero_counts() {
        let m = Marking::from_places(&[("a", 0), ("b", 2)]);
        assert_eq!(m.iter().count(), 1);
        assert_eq!(m.get("a"), 0);
        assert_eq!(m.to_string(), "[b:2]");
    }
}
