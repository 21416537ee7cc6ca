use std::collections::{HashMap, VecDeque};

use super::{AcceptingPetriNet, Marking, NetError};

pub const DEFAULT_STATE_BOUND: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsState {
    pub id: String,
    pub marking: Marking,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsEdge {
    pub source: usize,
    pub label: String,
    pub target: usize,
}

/// Labelled transition system; `initial` indexes into `states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    pub states: Vec<TsState>,
    pub edges: Vec<TsEdge>,
    pub initial: usize,
}

impl TransitionSystem {
    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &TsEdge> {
        self.edges.iter().filter(move |e| e.source == state)
    }
}

/// Breadth-first construction of the reachability graph from the initial marking.
///
/// States are numbered `s0, s1, ...` in discovery order; transitions are tried in id order.
/// Fails once more than `state_bound` distinct markings have been found.
pub fn reachability_graph(anet: &AcceptingPetriNet, state_bound: usize) -> Result<TransitionSystem, NetError> {
    let net = &anet.net;
    let mut order: Vec<usize> = (0..net.transitions().len()).collect();
    order.sort_by(|&a, &b| net.transitions()[a].id.cmp(&net.transitions()[b].id));

    let initial = net.to_dense(&anet.im)?;
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut dense_states = vec![initial.clone()];
    index.insert(initial, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    if state_bound == 0 {
        return Err(NetError::StateSpaceExceeded { bound: 0 });
    }
    while let Some(current) = queue.pop_front() {
        for &t in &order {
            if !net.is_enabled_dense(t, &dense_states[current]) {
                continue;
            }
            let mut next = dense_states[current].clone();
            net.fire_dense(t, &mut next);
            let target = match index.get(&next) {
                Some(&i) => i,
                None => {
                    if dense_states.len() >= state_bound {
                        return Err(NetError::StateSpaceExceeded { bound: state_bound });
                    }
                    let i = dense_states.len();
                    index.insert(next.clone(), i);
                    dense_states.push(next);
                    queue.push_back(i);
                    i
                }
            };
            edges.push(TsEdge {
                source: current,
                label: net.transitions()[t].display_label().to_string(),
                target,
            });
        }
    }
    let states = dense_states
        .iter()
        .enumerate()
        .map(|(i, d)| TsState {
            id: format!("s{i}"),
            marking: net.to_sparse(d),
        })
        .collect();
    Ok(TransitionSystem {
        states,
        edges,
        initial: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petrinet::{tree_to_petri, PetriNet, ProcessTree};

    #[test]
    fn single_activity() {
        let anet = tree_to_petri(&ProcessTree::activity("a")).unwrap();
        let ts = reachability_graph(&anet, 10).unwrap();
        assert_eq!(ts.states.len(), 2);
        assert_eq!(ts.edges.len(), 1);
        assert_eq!(ts.edges[0].label, "a");
    }

    #[test]
    fn xor_has_two_maximal_paths() {
        let anet = tree_to_petri(&ProcessTree::xor(vec![
            ProcessTree::activity("a"),
            ProcessTree::activity("b"),
        ]))
        .unwrap();
        let ts = reachability_graph(&anet, 10).unwrap();
        fn paths(ts: &TransitionSystem, s: usize) -> usize {
            let out: Vec<_> = ts.outgoing(s).collect();
            if out.is_empty() {
                1
            } else {
                out.iter().map(|e| paths(ts, e.target)).sum()
            }
        }
        assert_eq!(paths(&ts, ts.initial), 2);
    }

    #[test]
    fn unbounded_net_exceeds_bound() {
        let mut net = PetriNet::new();
        net.add_place("p").unwrap();
        net.add_transition("gen", Some("g")).unwrap();
        net.add_arc("gen", "p").unwrap();
        let anet = AcceptingPetriNet::new(net, Marking::new(), Marking::new()).unwrap();
        assert_eq!(
            reachability_graph(&anet, 100),
            Err(NetError::StateSpaceExceeded { bound: 100 })
        );
    }
}
