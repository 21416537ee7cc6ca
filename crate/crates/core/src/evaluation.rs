//! Model quality: fitness, precision, generalization and simplicity.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::conformance::{align, token_replay, AlignmentCosts, ConformanceError, Replayer, DEFAULT_SILENT_DEPTH};
use crate::eventlog::EventLog;
use crate::petrinet::AcceptingPetriNet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluationError {
    #[error("net has no places and no transitions")]
    EmptyNet,
    #[error("unknown fitness method '{0}' (expected token or alignment)")]
    UnknownMethod(String),
    #[error(transparent)]
    Conformance(#[from] ConformanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitnessMethod {
    Token,
    Alignment,
}

impl fmt::Display for FitnessMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitnessMethod::Token => "token",
            FitnessMethod::Alignment => "alignment",
        })
    }
}

impl FromStr for FitnessMethod {
    type Err = EvaluationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token" => Ok(FitnessMethod::Token),
            "alignment" => Ok(FitnessMethod::Alignment),
            other => Err(EvaluationError::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    pub average_trace_fitness: f64,
    /// Percentage in `[0, 100]`.
    pub perc_fit_traces: f64,
    pub method: FitnessMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub fitness: FitnessReport,
    pub precision: f64,
    pub generalization: f64,
    pub simplicity: f64,
}

/// Mean trace fitness and share of perfectly fitting traces. An empty log scores 1.0 and 100%.
pub fn evaluate_fitness(
    log: &EventLog,
    anet: &AcceptingPetriNet,
    method: FitnessMethod,
) -> Result<FitnessReport, EvaluationError> {
    let scores: Vec<(f64, bool)> = match method {
        FitnessMethod::Token => token_replay(log, anet)?
            .iter()
            .map(|r| (r.trace_fitness, r.is_fit()))
            .collect(),
        FitnessMethod::Alignment => align(log, anet, AlignmentCosts::default())?
            .iter()
            .map(|a| (a.fitness, a.cost == 0))
            .collect(),
    };
    if scores.is_empty() {
        return Ok(FitnessReport {
            average_trace_fitness: 1.0,
            perc_fit_traces: 100.0,
            method,
        });
    }
    let n = scores.len() as f64;
    Ok(FitnessReport {
        average_trace_fitness: scores.iter().map(|s| s.0).sum::<f64>() / n,
        perc_fit_traces: 100.0 * scores.iter().filter(|s| s.1).count() as f64 / n,
        method,
    })
}

/// Escaping-edges precision.
///
/// Every proper non-empty prefix occurrence is replayed (missing tokens are inserted as in token
/// replay). The visible labels enabled in the reached marking, after up to four silent firings,
/// are the allowed activities; the activities that follow the same prefix somewhere in the log
/// are the observed ones. The empty prefix contributes once, observed being the start
/// activities. Precision is `1 - sum |allowed \ observed| / sum |allowed|`, or 1 when nothing is
/// allowed.
pub fn evaluate_precision(log: &EventLog, anet: &AcceptingPetriNet) -> Result<f64, EvaluationError> {
    let replayer = Replayer::new(anet, DEFAULT_SILENT_DEPTH)?;
    let traces = log.activity_traces().map_err(ConformanceError::from)?;
    let mut observed: HashMap<&[String], HashSet<&str>> = HashMap::new();
    let mut weight: HashMap<&[String], u64> = HashMap::new();
    for trace in &traces {
        for i in 0..trace.len() {
            observed.entry(&trace[..i]).or_default().insert(trace[i].as_str());
            if i > 0 {
                *weight.entry(&trace[..i]).or_default() += 1;
            }
        }
    }
    if observed.is_empty() {
        return Ok(1.0);
    }
    let mut escaping = 0u64;
    let mut allowed_total = 0u64;
    let mut account = |allowed: &HashSet<&str>, seen: &HashSet<&str>, w: u64| {
        allowed_total += w * allowed.len() as u64;
        escaping += w * allowed.iter().filter(|a| !seen.contains(*a)).count() as u64;
    };
    let start = replayer.start();
    account(&replayer.allowed_labels(&start.marking), &observed[&[][..]], 1);
    let mut done: HashSet<&[String]> = HashSet::new();
    for trace in &traces {
        let mut state = replayer.start();
        for i in 1..trace.len() {
            replayer.step(&mut state, &trace[i - 1]);
            let prefix = &trace[..i];
            if done.insert(prefix) {
                account(
                    &replayer.allowed_labels(&state.marking),
                    &observed[prefix],
                    weight[prefix],
                );
            }
        }
    }
    Ok(if allowed_total == 0 {
        1.0
    } else {
        1.0 - escaping as f64 / allowed_total as f64
    })
}

/// `1 - sum(1 / sqrt(exec(t))) / |T|` over transitions that fired or are visible, where a
/// transition that never fired contributes 1. A net without transitions scores 0.
pub fn evaluate_generalization(log: &EventLog, anet: &AcceptingPetriNet) -> Result<f64, EvaluationError> {
    let results = token_replay(log, anet)?;
    let mut executions: HashMap<&str, u64> = HashMap::new();
    for result in &results {
        for t in &result.fired_sequence {
            *executions.entry(t.as_str()).or_default() += 1;
        }
    }
    let transitions = anet.net.transitions();
    if transitions.is_empty() {
        return Ok(0.0);
    }
    let penalty: f64 = transitions
        .iter()
        .filter_map(|t| match executions.get(t.id.as_str()).copied().unwrap_or(0) {
            0 if t.is_silent() => None,
            0 => Some(1.0),
            n => Some(1.0 / (n as f64).sqrt()),
        })
        .sum();
    Ok(1.0 - penalty / transitions.len() as f64)
}

/// `1 / (1 + max(0, mean degree - 2))` with the mean taken over all places and transitions.
pub fn evaluate_simplicity(anet: &AcceptingPetriNet) -> Result<f64, EvaluationError> {
    let net = &anet.net;
    if net.is_empty() {
        return Err(EvaluationError::EmptyNet);
    }
    let nodes = net.places().len() + net.transitions().len();
    let mean_degree = 2.0 * net.arcs().len() as f64 / nodes as f64;
    Ok(1.0 / (1.0 + (mean_degree - 2.0).max(0.0)))
}

pub fn evaluate(
    log: &EventLog,
    anet: &AcceptingPetriNet,
    method: FitnessMethod,
) -> Result<QualityReport, EvaluationError> {
    Ok(QualityReport {
        fitness: evaluate_fitness(log, anet, method)?,
        precision: evaluate_precision(log, anet)?,
        generalization: evaluate_generalization(log, anet)?,
        simplicity: evaluate_simplicity(anet)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::alpha_classic;
    use crate::petrinet::{tree_to_petri, Marking, PetriNet, ProcessTree};

    fn abd_acd() -> EventLog {
        EventLog::from_activity_traces(&[vec!["a", "b", "d"], vec!["a", "c", "d"]])
    }

    #[test]
    fn fitness_of_own_alpha_model() {
        let anet = alpha_classic(&abd_acd()).unwrap();
        for method in [FitnessMethod::Token, FitnessMethod::Alignment] {
            let f = evaluate_fitness(&abd_acd(), &anet, method).unwrap();
            assert_eq!(f.average_trace_fitness, 1.0);
            assert_eq!(f.perc_fit_traces, 100.0);
        }
        let bad = EventLog::from_activity_traces(&[vec!["a", "d"]]);
        let f = evaluate_fitness(&bad, &anet, FitnessMethod::Token).unwrap();
        assert!((f.average_trace_fitness - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.perc_fit_traces, 0.0);
    }

    #[test]
    fn precision_examples() {
        let log = EventLog::from_activity_traces(&[vec!["a", "b"], vec!["a", "c"]]);
        let alpha = alpha_classic(&log).unwrap();
        assert_eq!(evaluate_precision(&log, &alpha).unwrap(), 1.0);
        let flower = tree_to_petri(&ProcessTree::flower(&["a", "b", "c"])).unwrap();
        let p = evaluate_precision(&log, &flower).unwrap();
        assert!((p - (1.0 - 4.0 / 9.0)).abs() < 1e-12, "{p}");
        assert_eq!(evaluate_precision(&EventLog::new(), &flower).unwrap(), 1.0);
    }

    fn two_transition_net() -> AcceptingPetriNet {
        let mut net = PetriNet::new();
        net.add_place("p").unwrap();
        net.add_transition("t1", Some("a")).unwrap();
        net.add_transition("t2", Some("b")).unwrap();
        net.add_arc("p", "t1").unwrap();
        net.add_arc("t1", "p").unwrap();
        net.add_arc("p", "t2").unwrap();
        net.add_arc("t2", "p").unwrap();
        AcceptingPetriNet::new(net, Marking::single("p"), Marking::single("p")).unwrap()
    }

    #[test]
    fn generalization_formula() {
        let anet = two_transition_net();
        let log = EventLog::from_activity_traces(&[vec!["a", "a", "a", "a", "b"]]);
        assert!((evaluate_generalization(&log, &anet).unwrap() - 0.25).abs() < 1e-12);
        let once = EventLog::from_activity_traces(&[vec!["a", "b"]]);
        assert_eq!(evaluate_generalization(&once, &anet).unwrap(), 0.0);
    }

    #[test]
    fn simplicity_formula() {
        let line = tree_to_petri(&ProcessTree::sequence(vec![
            ProcessTree::activity("a"),
            ProcessTree::activity("b"),
        ]))
        .unwrap();
        assert_eq!(evaluate_simplicity(&line).unwrap(), 1.0);
        // 3 nodes, 4 arcs: mean degree 8/3.
        let s = evaluate_simplicity(&two_transition_net()).unwrap();
        assert!((s - 1.0 / (1.0 + 2.0 / 3.0)).abs() < 1e-12);
        // 4 places, 4 transitions, 8 arcs: mean degree 2.
        let alpha = alpha_classic(&abd_acd()).unwrap();
        assert_eq!(alpha.net.arcs().len(), 8);
        assert_eq!(evaluate_simplicity(&alpha).unwrap(), 1.0);
        let empty = AcceptingPetriNet::new(PetriNet::new(), Marking::new(), Marking::new()).unwrap();
        assert_eq!(evaluate_simplicity(&empty), Err(EvaluationError::EmptyNet));
    }
}
