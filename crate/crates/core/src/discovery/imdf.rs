//! Inductive Miner on directly-follows graphs.
//!
//! Cuts are tried in the order xor, sequence, parallel, loop; if none applies the activities are
//! wrapped in a flower loop. Parts are ordered by their smallest activity name, so the tree is a
//! deterministic function of the graph.

use std::collections::{BTreeMap, VecDeque};

use super::DirectlyFollowsGraph;
use crate::petrinet::ProcessTree;

/// Discovers a process tree. `noise_threshold` in `[0, 1]` drops, at every recursion level, each
/// edge whose count is below `threshold * max incoming count` of its target.
pub fn discover_imdf(dfg: &DirectlyFollowsGraph, noise_threshold: f64) -> ProcessTree {
    let graph = Graph::from_dfg(dfg);
    mine(&graph, noise_threshold)
}

/// Index-based working copy of a DFG.
#[derive(Debug, Clone)]
struct Graph {
    names: Vec<String>,
    edges: BTreeMap<(usize, usize), u64>,
    starts: Vec<u64>,
    ends: Vec<u64>,
}

impl Graph {
    fn from_dfg(dfg: &DirectlyFollowsGraph) -> Self {
        let names: Vec<String> = dfg.activities.iter().cloned().collect();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let edges = dfg
            .counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|((a, b), &c)| ((index[a.as_str()], index[b.as_str()]), c))
            .collect();
        let starts = names.iter().map(|n| dfg.start_count(n)).collect();
        let ends = names.iter().map(|n| dfg.end_count(n)).collect();
        Graph {
            names,
            edges,
            starts,
            ends,
        }
    }

    fn len(&self) -> usize {
        self.names.len()
    }

    fn filtered(&self, threshold: f64) -> Graph {
        if threshold <= 0.0 {
            return self.clone();
        }
        let mut max_in = vec![0u64; self.len()];
        for (&(_, b), &c) in &self.edges {
            max_in[b] = max_in[b].max(c);
        }
        let edges = self
            .edges
            .iter()
            .filter(|(&(_, b), &c)| c as f64 >= threshold * max_in[b] as f64)
            .map(|(&k, &c)| (k, c))
            .collect();
        Graph { edges, ..self.clone() }
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.len()];
        for &(a, b) in self.edges.keys() {
            succ[a].push(b);
        }
        succ
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains_key(&(a, b))
    }

    /// `reach[a][b]`: b reachable from a by a non-empty path.
    fn reachability(&self) -> Vec<Vec<bool>> {
        let succ = self.successors();
        (0..self.len())
            .map(|from| {
                let mut seen = vec![false; self.len()];
                let mut queue: VecDeque<usize> = succ[from].iter().copied().collect();
                while let Some(x) = queue.pop_front() {
                    if !seen[x] {
                        seen[x] = true;
                        queue.extend(succ[x].iter().copied());
                    }
                }
                seen
            })
            .collect()
    }

    fn trace_count(&self) -> u64 {
        self.starts.iter().sum()
    }

    /// Sub-graph on `part`. Edges entering (leaving) the part from outside become start (end)
    /// counts.
    fn project(&self, part: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.len()];
        for (i, &x) in part.iter().enumerate() {
            local[x] = i;
        }
        let mut starts: Vec<u64> = part.iter().map(|&x| self.starts[x]).collect();
        let mut ends: Vec<u64> = part.iter().map(|&x| self.ends[x]).collect();
        let mut edges = BTreeMap::new();
        for (&(a, b), &c) in &self.edges {
            match (local[a] != usize::MAX, local[b] != usize::MAX) {
                (true, true) => {
                    edges.insert((local[a], local[b]), c);
                }
                (false, true) => starts[local[b]] += c,
                (true, false) => ends[local[a]] += c,
                (false, false) => {}
            }
        }
        Graph {
            names: part.iter().map(|&x| self.names[x].clone()).collect(),
            edges,
            starts,
            ends,
        }
    }
}

fn mine(graph: &Graph, noise: f64) -> ProcessTree {
    let graph = graph.filtered(noise);
    match graph.len() {
        0 => return ProcessTree::Tau,
        1 => {
            let leaf = ProcessTree::Activity(graph.names[0].clone());
            return if graph.has_edge(0, 0) {
                ProcessTree::looped(vec![leaf, ProcessTree::Tau])
            } else {
                leaf
            };
        }
        _ => {}
    }
    let recurse =
        |parts: Vec<Vec<usize>>| -> Vec<ProcessTree> { parts.iter().map(|p| mine(&graph.project(p), noise)).collect() };
    if let Some(parts) = xor_cut(&graph) {
        return ProcessTree::xor(recurse(parts));
    }
    if let Some(parts) = sequence_cut(&graph) {
        return ProcessTree::sequence(recurse(parts));
    }
    if let Some(parts) = parallel_cut(&graph) {
        return ProcessTree::parallel(recurse(parts));
    }
    if let Some(parts) = loop_cut(&graph) {
        return ProcessTree::looped(recurse(parts));
    }
    ProcessTree::flower(&graph.names)
}

/// Union-find with deterministic grouping (parts sorted by smallest member).
struct Partition {
    parent: Vec<usize>,
}

impl Partition {
    fn new(n: usize) -> Self {
        Partition {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn parts(&mut self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in members {
            let root = self.find(x);
            groups.entry(root).or_default().push(x);
        }
        let mut parts: Vec<Vec<usize>> = groups.into_values().collect();
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort();
        parts
    }
}

/// Weakly connected components.
fn xor_cut(graph: &Graph) -> Option<Vec<Vec<usize>>> {
    let mut partition = Partition::new(graph.len());
    for &(a, b) in graph.edges.keys() {
        partition.union(a, b);
    }
    let all: Vec<usize> = (0..graph.len()).collect();
    let parts = partition.parts(&all);
    (parts.len() > 1).then_some(parts)
}

/// Strongly connected components merged into blocks that are totally ordered by reachability.
fn sequence_cut(graph: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = graph.len();
    let reach = graph.reachability();
    // Strongly connected components: mutual reachability.
    let mut partition = Partition::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if reach[a][b] && reach[b][a] {
                partition.union(a, b);
            }
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mut groups = partition.parts(&all);
    if groups.len() < 2 {
        return None;
    }
    let group_reaches = |g: &[usize], h: &[usize]| g.iter().any(|&x| h.iter().any(|&y| reach[x][y]));
    // Merge groups that are unordered (neither reaches the other) or mutually reachable.
    loop {
        let mut merged = false;
        'search: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let forward = group_reaches(&groups[i], &groups[j]);
                let backward = group_reaches(&groups[j], &groups[i]);
                if forward == backward {
                    let other = groups.remove(j);
                    groups[i].extend(other);
                    groups[i].sort_unstable();
                    merged = true;
                    break 'search;
                }
            }
        }
        if !merged {
            break;
        }
    }
    if groups.len() < 2 {
        return None;
    }
    // Every pair is now ordered one way; earlier blocks reach more blocks.
    let reached: Vec<usize> = groups
        .iter()
        .map(|g| groups.iter().filter(|h| *h != g && group_reaches(g, h)).count())
        .collect();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| reached[b].cmp(&reached[a]).then(groups[a].cmp(&groups[b])));
    let ordered: Vec<Vec<usize>> = order.into_iter().map(|i| groups[i].clone()).collect();
    for i in 0..ordered.len() {
        for j in i + 1..ordered.len() {
            for &x in &ordered[i] {
                for &y in &ordered[j] {
                    if !reach[x][y] || reach[y][x] {
                        return None;
                    }
                }
            }
        }
    }
    Some(ordered)
}

/// Components of the graph linking activities that are not connected in both directions. Parts
/// without a start or an end activity are merged into the first complete part. Each part must
/// also be entered and left at least once per trace: start count plus incoming cross edges, and
/// end count plus outgoing cross edges, must reach the number of traces.
fn parallel_cut(graph: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = graph.len();
    let mut partition = Partition::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if !(graph.has_edge(a, b) && graph.has_edge(b, a)) {
                partition.union(a, b);
            }
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let parts = partition.parts(&all);
    if parts.len() < 2 {
        return None;
    }
    let complete = |p: &[usize]| p.iter().any(|&x| graph.starts[x] > 0) && p.iter().any(|&x| graph.ends[x] > 0);
    let anchor = parts.iter().position(|p| complete(p))?;
    let mut merged: Vec<Vec<usize>> = Vec::new();
    let mut extra: Vec<usize> = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if i == anchor || complete(p) {
            merged.push(p.clone());
        } else {
            extra.extend(p);
        }
    }
    if !extra.is_empty() {
        let idx = merged
            .iter()
            .position(|p| *p == parts[anchor])
            .expect("anchor part kept");
        merged[idx].extend(extra);
        merged[idx].sort_unstable();
    }
    if merged.len() < 2 {
        return None;
    }
    merged.sort();
    let traces = graph.trace_count();
    for part in &merged {
        let inside = |x: usize| part.binary_search(&x).is_ok();
        let mut entries: u64 = part.iter().map(|&x| graph.starts[x]).sum();
        let mut exits: u64 = part.iter().map(|&x| graph.ends[x]).sum();
        for (&(a, b), &c) in &graph.edges {
            if !inside(a) && inside(b) {
                entries += c;
            }
            if inside(a) && !inside(b) {
                exits += c;
            }
        }
        if entries < traces || exits < traces {
            return None;
        }
    }
    Some(merged)
}

/// Do-part = start and end activities plus every component that cannot be a redo-part. A
/// redo-part is only entered from end activities (all of them) and only left towards start
/// activities (all of them).
fn loop_cut(graph: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = graph.len();
    let is_start: Vec<bool> = graph.starts.iter().map(|&c| c > 0).collect();
    let is_end: Vec<bool> = graph.ends.iter().map(|&c| c > 0).collect();
    let mut in_do: Vec<bool> = (0..n).map(|x| is_start[x] || is_end[x]).collect();
    if !in_do.iter().any(|&d| d) {
        return None;
    }
    let rest: Vec<usize> = (0..n).filter(|&x| !in_do[x]).collect();
    let mut partition = Partition::new(n);
    for &(a, b) in graph.edges.keys() {
        if !in_do[a] && !in_do[b] {
            partition.union(a, b);
        }
    }
    let mut candidates = partition.parts(&rest);
    let starts: Vec<usize> = (0..n).filter(|&x| is_start[x]).collect();
    let ends: Vec<usize> = (0..n).filter(|&x| is_end[x]).collect();
    loop {
        let mut changed = false;
        let mut kept = Vec::new();
        for comp in candidates {
            let member = |x: usize| comp.binary_search(&x).is_ok();
            let mut valid = true;
            for &(a, b) in graph.edges.keys() {
                if in_do[a] && member(b) && !is_end[a] {
                    valid = false;
                }
                if member(a) && in_do[b] && !is_start[b] {
                    valid = false;
                }
            }
            let entered_by_all_ends = ends.iter().all(|&e| comp.iter().any(|&x| graph.has_edge(e, x)));
            let leaves_to_all_starts = starts.iter().all(|&s| comp.iter().any(|&x| graph.has_edge(x, s)));
            if valid && entered_by_all_ends && leaves_to_all_starts {
                kept.push(comp);
            } else {
                for &x in &comp {
                    in_do[x] = true;
                }
                changed = true;
            }
        }
        candidates = kept;
        if !changed {
            break;
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let do_part: Vec<usize> = (0..n).filter(|&x| in_do[x]).collect();
    let mut parts = vec![do_part];
    parts.extend(candidates);
    Some(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mine_traces(traces: &[Vec<&str>]) -> ProcessTree {
        discover_imdf(&DirectlyFollowsGraph::from_traces(traces), 0.0)
    }

    #[test]
    fn sequence_with_choice() {
        let tree = mine_traces(&[vec!["a", "b", "d"], vec!["a", "c", "d"]]);
        assert_eq!(tree.to_string(), "sequence(a, xor(b, c), d)");
    }

    #[test]
    fn loop_with_redo() {
        let tree = mine_traces(&[vec!["a"], vec!["a", "b", "a"]]);
        assert_eq!(tree.to_string(), "loop(a, b)");
    }

    #[test]
    fn flower_fall_through() {
        let tree = mine_traces(&[vec!["a", "b"], vec!["b", "a"], vec!["a"], vec!["b"], vec!["a", "a"]]);
        assert_eq!(tree.to_string(), "loop(tau, a, b)");
    }

    #[test]
    fn parallel_pair() {
        let tree = mine_traces(&[vec!["a", "b"], vec!["b", "a"]]);
        assert_eq!(tree.to_string(), "parallel(a, b)");
    }

    #[test]
    fn empty_and_single() {
        assert_eq!(mine_traces(&[]), ProcessTree::Tau);
        assert_eq!(mine_traces(&[vec!["a"]]).to_string(), "a");
        assert_eq!(mine_traces(&[vec!["a", "a"]]).to_string(), "loop(a, tau)");
    }

    #[test]
    fn noise_removes_rare_edge() {
        let mut traces = vec![vec!["a", "b", "c"]; 20];
        traces.push(vec!["a", "c", "b"]);
        let dfg = DirectlyFollowsGraph::from_traces(&traces);
        assert_ne!(discover_imdf(&dfg, 0.0).to_string(), "sequence(a, b, c)");
        assert_eq!(discover_imdf(&dfg, 0.2).to_string(), "sequence(a, b, c)");
    }
}
