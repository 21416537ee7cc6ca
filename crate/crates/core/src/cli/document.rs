//! JSON documents for nets and directly-follows graphs exchanged between commands.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::discovery::DirectlyFollowsGraph;
use crate::petrinet::{AcceptingPetriNet, Marking, NetError, PetriNet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDocument {
    pub id: String,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetDocument {
    pub places: Vec<String>,
    pub transitions: Vec<TransitionDocument>,
    pub arcs: Vec<(String, String)>,
    pub im: BTreeMap<String, u32>,
    pub fm: BTreeMap<String, u32>,
}

fn marking_map(marking: &Marking) -> BTreeMap<String, u32> {
    marking.iter().map(|(p, &n)| (p.to_string(), n)).collect()
}

fn marking_of(map: &BTreeMap<String, u32>) -> Marking {
    let pairs: Vec<(&str, u32)> = map.iter().map(|(p, &n)| (p.as_str(), n)).collect();
    Marking::from_places(&pairs)
}

impl NetDocument {
    pub fn from_net(anet: &AcceptingPetriNet) -> Self {
        NetDocument {
            places: anet.net.places().to_vec(),
            transitions: anet
                .net
                .transitions()
                .iter()
                .map(|t| TransitionDocument {
                    id: t.id.clone(),
                    label: t.label.clone(),
                })
                .collect(),
            arcs: anet.net.arcs().to_vec(),
            im: marking_map(&anet.im),
            fm: marking_map(&anet.fm),
        }
    }

    pub fn to_net(&self) -> Result<AcceptingPetriNet, NetError> {
        let mut net = PetriNet::new();
        for p in &self.places {
            net.add_place(p)?;
        }
        for t in &self.transitions {
            net.add_transition(&t.id, t.label.as_deref())?;
        }
        for (s, t) in &self.arcs {
            net.add_arc(s, t)?;
        }
        AcceptingPetriNet::new(net, marking_of(&self.im), marking_of(&self.fm))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfgDocument {
    pub activities: Vec<String>,
    /// `[from, to, count]`.
    pub edges: Vec<(String, String, u64)>,
    pub start: BTreeMap<String, u64>,
    pub end: BTreeMap<String, u64>,
}

impl DfgDocument {
    pub fn from_dfg(dfg: &DirectlyFollowsGraph) -> Self {
        DfgDocument {
            activities: dfg.activities.iter().cloned().collect(),
            edges: dfg
                .counts
                .iter()
                .map(|((a, b), &n)| (a.clone(), b.clone(), n))
                .collect(),
            start: dfg.start_counts.clone(),
            end: dfg.end_counts.clone(),
        }
    }

    pub fn to_dfg(&self) -> DirectlyFollowsGraph {
        let mut dfg = DirectlyFollowsGraph::new();
        dfg.activities.extend(self.activities.iter().cloned());
        for (a, b, n) in &self.edges {
            dfg.add_edge(a, b, *n);
        }
        dfg.activities.extend(self.start.keys().chain(self.end.keys()).cloned());
        dfg.start_counts = self.start.clone();
        dfg.end_counts = self.end.clone();
        dfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::alpha_classic;
    use crate::eventlog::EventLog;

    #[test]
    fn net_round_trip() {
        let log = EventLog::from_activity_traces(&[vec!["a", "b", "d"], vec!["a", "c", "d"]]);
        let anet = alpha_classic(&log).unwrap();
        let doc = NetDocument::from_net(&anet);
        let text = serde_json::to_string(&doc).unwrap();
        let back: NetDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_net().unwrap(), anet);
    }

    #[test]
    fn dfg_round_trip() {
        let dfg = DirectlyFollowsGraph::from_traces(&[vec!["a", "b", "b"], vec!["c"]]);
        let doc = DfgDocument::from_dfg(&dfg);
        let text = serde_json::to_string(&doc).unwrap();
        let back: DfgDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_dfg(), dfg);
    }

    #[test]
    fn invalid_net_is_rejected() {
        let doc = NetDocument {
            places: vec!["p".into()],
            transitions: vec![],
            arcs: vec![("p".into(), "q".into())],
            im: BTreeMap::new(),
            fm: BTreeMap::new(),
        };
        assert_eq!(doc.to_net(), Err(NetError::UnknownNode("q".into())));
    }
}
