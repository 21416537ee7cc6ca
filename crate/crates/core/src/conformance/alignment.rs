use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;

use super::replay::per_variant;
use super::ConformanceError;
use crate::eventlog::EventLog;
use crate::petrinet::AcceptingPetriNet;

pub const DEFAULT_SEARCH_BUDGET: usize = 2_000_000;
pub const SKIP: &str = ">>";

/// Move costs. Synchronous and silent moves are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentCosts {
    pub log_move: u64,
    pub visible_model_move: u64,
}

impl Default for AlignmentCosts {
    fn default() -> Self {
        AlignmentCosts {
            log_move: 10,
            visible_model_move: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignOptions {
    pub costs: AlignmentCosts,
    /// `false` runs plain Dijkstra.
    pub heuristic: bool,
    /// Maximum number of expanded states per trace variant.
    pub budget: usize,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            costs: AlignmentCosts::default(),
            heuristic: true,
            budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelPart {
    Skip,
    Silent { transition: String },
    Visible { transition: String, label: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    /// `None` is a skip on the log side.
    pub log: Option<String>,
    pub model: ModelPart,
}

impl Move {
    pub fn is_synchronous(&self) -> bool {
        self.log.is_some() && matches!(self.model, ModelPart::Visible { .. })
    }

    pub fn is_log_move(&self) -> bool {
        matches!(self.model, ModelPart::Skip)
    }

    pub fn transition(&self) -> Option<&str> {
        match &self.model {
            ModelPart::Skip => None,
            ModelPart::Silent { transition } | ModelPart::Visible { transition, .. } => Some(transition),
        }
    }
}

/// `('register request', 'register request')`, `('>>', tau)`, `('x', '>>')`.
impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let log = self.log.as_deref().unwrap_or(SKIP);
        match &self.model {
            ModelPart::Skip => write!(f, "('{log}', '{SKIP}')"),
            ModelPart::Silent { .. } => write!(f, "('{log}', tau)"),
            ModelPart::Visible { label, .. } => write!(f, "('{log}', '{label}')"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub moves: Vec<Move>,
    pub cost: u64,
    pub fitness: f64,
    pub optimal: bool,
}

impl Alignment {
    pub fn moves_text(&self) -> String {
        let parts: Vec<String> = self.moves.iter().map(Move::to_string).collect();
        format!("[{}]", parts.join(", "))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Sync = 0,
    Silent = 1,
    Model = 2,
    Log = 3,
}

/// Marking, trace position, cost so far, move kind and fired transition.
type Successor = (Vec<u32>, usize, u64, Kind, Option<usize>);

struct Node {
    marking: Vec<u32>,
    pos: usize,
    g: u64,
    parent: Option<(usize, Kind, Option<usize>)>,
}

#[derive(PartialEq, Eq)]
struct Entry {
    f: u64,
    kind: Kind,
    transition: String,
    seq: u64,
    node: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.f, self.kind, &self.transition, self.seq).cmp(&(other.f, other.kind, &other.transition, other.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct Aligner<'a> {
    anet: &'a AcceptingPetriNet,
    options: AlignOptions,
    im: Vec<u32>,
    fm: Vec<u32>,
    labels: HashSet<&'a str>,
    /// Transitions sorted by id.
    order: Vec<usize>,
}

impl<'a> Aligner<'a> {
    pub fn new(anet: &'a AcceptingPetriNet, options: AlignOptions) -> Result<Self, ConformanceError> {
        if options.costs.log_move == 0 || options.costs.visible_model_move == 0 {
            return Err(ConformanceError::InvalidCosts);
        }
        let net = &anet.net;
        let mut order: Vec<usize> = (0..net.transitions().len()).collect();
        order.sort_by(|&a, &b| net.transitions()[a].id.cmp(&net.transitions()[b].id));
        Ok(Aligner {
            anet,
            options,
            im: net.to_dense(&anet.im)?,
            fm: net.to_dense(&anet.fm)?,
            labels: anet.transitions_by_label().into_keys().collect(),
            order,
        })
    }

    fn heuristic(&self, trace: &[String], pos: usize) -> u64 {
        if !self.options.heuristic {
            return 0;
        }
        let unmatched = trace[pos..]
            .iter()
            .filter(|l| !self.labels.contains(l.as_str()))
            .count();
        unmatched as u64 * self.options.costs.log_move
    }

    /// Cheapest alignment of `trace`.
    pub fn search(&self, trace: &[String]) -> Result<(Vec<Move>, u64), ConformanceError> {
        let net = &self.anet.net;
        let costs = self.options.costs;
        let mut nodes = vec![Node {
            marking: self.im.clone(),
            pos: 0,
            g: 0,
            parent: None,
        }];
        let mut best: HashMap<(Vec<u32>, usize), usize> = HashMap::from([((self.im.clone(), 0), 0)]);
        let mut closed: HashSet<usize> = HashSet::new();
        let mut open = BinaryHeap::new();
        let mut seq = 0u64;
        open.push(Reverse(Entry {
            f: self.heuristic(trace, 0),
            kind: Kind::Sync,
            transition: String::new(),
            seq,
            node: 0,
        }));
        let mut expanded = 0usize;
        while let Some(Reverse(entry)) = open.pop() {
            let current = entry.node;
            if !closed.insert(current) {
                continue;
            }
            if nodes[current].pos == trace.len() && nodes[current].marking == self.fm {
                return Ok((self.reconstruct(&nodes, current, trace), nodes[current].g));
            }
            expanded += 1;
            if expanded > self.options.budget {
                return Err(ConformanceError::SearchBudgetExceeded {
                    budget: self.options.budget,
                });
            }
            let (marking, pos, g) = (nodes[current].marking.clone(), nodes[current].pos, nodes[current].g);
            let mut successors: Vec<Successor> = Vec::new();
            for &t in &self.order {
                if !net.is_enabled_dense(t, &marking) {
                    continue;
                }
                let mut next = marking.clone();
                net.fire_dense(t, &mut next);
                match &net.transitions()[t].label {
                    None => successors.push((next, pos, g, Kind::Silent, Some(t))),
                    Some(label) => {
                        if trace.get(pos) == Some(label) {
                            successors.push((next.clone(), pos + 1, g, Kind::Sync, Some(t)));
                        }
                        successors.push((next, pos, g + costs.visible_model_move, Kind::Model, Some(t)));
                    }
                }
            }
            if pos < trace.len() {
                successors.push((marking.clone(), pos + 1, g + costs.log_move, Kind::Log, None));
            }
            for (next, next_pos, next_g, kind, t) in successors {
                let key = (next, next_pos);
                let target = match best.get(&key) {
                    Some(&i) if nodes[i].g <= next_g || closed.contains(&i) => continue,
                    Some(&i) => {
                        nodes[i].g = next_g;
                        nodes[i].parent = Some((current, kind, t));
                        i
                    }
                    None => {
                        let i = nodes.len();
                        nodes.push(Node {
                            marking: key.0.clone(),
                            pos: next_pos,
                            g: next_g,
                            parent: Some((current, kind, t)),
                        });
                        best.insert(key, i);
                        i
                    }
                };
                seq += 1;
                open.push(Reverse(Entry {
                    f: next_g + self.heuristic(trace, next_pos),
                    kind,
                    transition: t.map(|t| net.transitions()[t].id.clone()).unwrap_or_default(),
                    seq,
                    node: target,
                }));
            }
        }
        Err(ConformanceError::NoFinalMarkingPath)
    }

    fn reconstruct(&self, nodes: &[Node], goal: usize, trace: &[String]) -> Vec<Move> {
        let net = &self.anet.net;
        let mut moves = Vec::new();
        let mut current = goal;
        while let Some((parent, kind, t)) = nodes[current].parent {
            let log = match kind {
                Kind::Sync | Kind::Log => Some(trace[nodes[parent].pos].clone()),
                Kind::Silent | Kind::Model => None,
            };
            let model = match t {
                None => ModelPart::Skip,
                Some(t) => {
                    let tr = &net.transitions()[t];
                    match &tr.label {
                        None => ModelPart::Silent {
                            transition: tr.id.clone(),
                        },
                        Some(label) => ModelPart::Visible {
                            transition: tr.id.clone(),
                            label: label.clone(),
                        },
                    }
                }
            };
            moves.push(Move { log, model });
            current = parent;
        }
        moves.reverse();
        moves
    }

    pub fn align_trace(&self, trace: &[String], model_cost: u64) -> Result<Alignment, ConformanceError> {
        let (moves, cost) = self.search(trace)?;
        let denominator = trace.len() as u64 * self.options.costs.log_move + model_cost;
        let fitness = if denominator == 0 {
            1.0
        } else {
            1.0 - cost as f64 / denominator as f64
        };
        Ok(Alignment {
            moves,
            cost,
            fitness,
            optimal: true,
        })
    }
}

/// Optimal alignments with default costs and budget.
pub fn align(
    log: &EventLog,
    anet: &AcceptingPetriNet,
    costs: AlignmentCosts,
) -> Result<Vec<Alignment>, ConformanceError> {
    align_with(
        log,
        anet,
        AlignOptions {
            costs,
            ..AlignOptions::default()
        },
    )
}

/// One alignment per trace; each distinct variant is searched once.
pub fn align_with(
    log: &EventLog,
    anet: &AcceptingPetriNet,
    options: AlignOptions,
) -> Result<Vec<Alignment>, ConformanceError> {
    let aligner = Aligner::new(anet, options)?;
    let (_, model_cost) = aligner.search(&[])?;
    per_variant(log, |labels| aligner.align_trace(labels, model_cost))
}

/// Alignment of a single activity sequence.
pub fn align_trace<S: AsRef<str>>(
    trace: &[S],
    anet: &AcceptingPetriNet,
    options: AlignOptions,
) -> Result<Alignment, ConformanceError> {
    let aligner = Aligner::new(anet, options)?;
    let (_, model_cost) = aligner.search(&[])?;
    let trace: Vec<String> = trace.iter().map(|s| s.as_ref().to_string()).collect();
    aligner.align_trace(&trace, model_cost)
}
