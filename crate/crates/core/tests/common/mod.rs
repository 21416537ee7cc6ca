//! Generators and independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::DateTime;
use procmine::discovery::{Footprint, Relation};
use procmine::eventlog::{Event, EventLog, Timestamp, Trace};
use procmine::petrinet::{enabled, fire, AcceptingPetriNet, Marking, PetriNet, ProcessTree};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ACTIVITIES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
pub const RESOURCES: [&str; 4] = ["r1", "r2", "r3", "r4"];
pub const BASE_EPOCH: i64 = 1_704_067_200;

/// Random activity traces over the first `alphabet` activities.
pub fn random_traces(rng: &mut StdRng, alphabet: usize, traces: usize, max_len: usize) -> Vec<Vec<String>> {
    (0..traces)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| ACTIVITIES[rng.gen_range(0..alphabet)].to_string())
                .collect()
        })
        .collect()
}

/// Random log with timestamps, resources, a numeric cost and a trace-level `region` attribute.
pub fn random_rich_log(rng: &mut StdRng, traces: usize) -> EventLog {
    let mut log = EventLog::new();
    for i in 0..traces {
        let mut trace = Trace::new(&format!("case{i}"));
        trace
            .attributes
            .insert("region".into(), ["north", "south"][rng.gen_range(0..2)].into());
        let mut t = BASE_EPOCH + rng.gen_range(0..100_000);
        for _ in 0..rng.gen_range(1..=6) {
            let mut e = Event::with_activity(ACTIVITIES[rng.gen_range(0..4)]);
            if rng.gen_bool(0.9) {
                e.set("org:resource", RESOURCES[rng.gen_range(0..RESOURCES.len())]);
            }
            e.set("cost", rng.gen_range(0..100) as i64);
            e.set(
                "time:timestamp",
                Timestamp::from_utc(DateTime::from_timestamp(t, 0).unwrap()),
            );
            t += rng.gen_range(0..20_000);
            trace.events.push(e);
        }
        log.traces.push(trace);
    }
    log
}

/// Random tree over distinct activities drawn from `pool`.
pub fn random_tree(rng: &mut StdRng, pool: &mut Vec<&'static str>, depth: usize, operators: &[usize]) -> ProcessTree {
    if depth == 0 || pool.len() < 2 || rng.gen_bool(0.3) {
        return match pool.pop() {
            Some(a) => ProcessTree::activity(a),
            None => ProcessTree::Tau,
        };
    }
    let op = operators[rng.gen_range(0..operators.len())];
    let arity = rng.gen_range(2..=3).min(pool.len().max(2));
    let children: Vec<ProcessTree> = (0..arity)
        .map(|_| random_tree(rng, pool, depth - 1, operators))
        .collect();
    match op {
        0 => ProcessTree::sequence(children),
        1 => ProcessTree::xor(children),
        2 => ProcessTree::parallel(children),
        _ => ProcessTree::looped(children),
    }
}

pub fn shuffled_pool(rng: &mut StdRng, size: usize) -> Vec<&'static str> {
    let mut pool: Vec<&'static str> = ACTIVITIES[..size].to_vec();
    pool.shuffle(rng);
    pool
}

/// Language of a loop-free tree, enumerated structurally.
pub fn tree_language(tree: &ProcessTree) -> BTreeSet<Vec<String>> {
    use procmine::petrinet::Operator;
    match tree {
        ProcessTree::Activity(a) => BTreeSet::from([vec![a.clone()]]),
        ProcessTree::Tau => BTreeSet::from([vec![]]),
        ProcessTree::Operator(Operator::Xor, children) => children.iter().flat_map(tree_language).collect(),
        ProcessTree::Operator(Operator::Sequence, children) => {
            children.iter().fold(BTreeSet::from([vec![]]), |acc, child| {
                let lang = tree_language(child);
                acc.iter()
                    .flat_map(|p| {
                        lang.iter().map(move |s| {
                            let mut t = p.clone();
                            t.extend(s.iter().cloned());
                            t
                        })
                    })
                    .collect()
            })
        }
        ProcessTree::Operator(Operator::Parallel, children) => {
            children.iter().fold(BTreeSet::from([vec![]]), |acc, child| {
                let lang = tree_language(child);
                let mut out = BTreeSet::new();
                for x in &acc {
                    for y in &lang {
                        interleave(x, y, &mut Vec::new(), &mut out);
                    }
                }
                out
            })
        }
        ProcessTree::Operator(Operator::Loop, _) => panic!("loop languages are infinite"),
    }
}

fn interleave(x: &[String], y: &[String], prefix: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
    if x.is_empty() || y.is_empty() {
        let mut t = prefix.clone();
        t.extend(x.iter().chain(y).cloned());
        out.insert(t);
        return;
    }
    prefix.push(x[0].clone());
    interleave(&x[1..], y, prefix, out);
    prefix.pop();
    prefix.push(y[0].clone());
    interleave(x, &y[1..], prefix, out);
    prefix.pop();
}

/// Visible traces of length <= `max_len` accepted by the net, via explicit search over markings
/// with the public firing API. Silent steps are bounded by `max_silent` per visible step.
pub fn net_language(anet: &AcceptingPetriNet, max_len: usize, max_silent: usize) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(anet.im.clone(), Vec::<String>::new(), 0usize)];
    let mut seen = BTreeSet::new();
    while let Some((m, trace, silent)) = stack.pop() {
        if !seen.insert((m.clone(), trace.clone(), silent)) {
            continue;
        }
        if m == anet.fm {
            out.insert(trace.clone());
        }
        for t in enabled(anet, &m).unwrap() {
            let next = fire(anet, &m, &t).unwrap();
            match &anet.net.transition(&t).unwrap().label {
                None if silent < max_silent => stack.push((next, trace.clone(), silent + 1)),
                None => {}
                Some(l) if trace.len() < max_len => {
                    let mut tr = trace.clone();
                    tr.push(l.clone());
                    stack.push((next, tr, 0));
                }
                Some(_) => {}
            }
        }
    }
    out
}

/// Maximal `(A, B)` pairs by testing every pair of non-empty activity subsets.
pub fn brute_force_pairs(footprint: &Footprint) -> Vec<(BTreeSet<String>, BTreeSet<String>)> {
    let acts = footprint.activities();
    let n = acts.len();
    let subset =
        |mask: usize| -> BTreeSet<String> { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| acts[i].clone()).collect() };
    let unrelated = |s: &BTreeSet<String>| {
        s.iter()
            .all(|x| s.iter().all(|y| footprint.relation(x, y) == Some(Relation::Unrelated)))
    };
    let mut valid = Vec::new();
    for am in 1..(1usize << n) {
        let a = subset(am);
        if !unrelated(&a) {
            continue;
        }
        for bm in 1..(1usize << n) {
            let b = subset(bm);
            if unrelated(&b)
                && a.iter()
                    .all(|x| b.iter().all(|y| footprint.relation(x, y) == Some(Relation::Causal)))
            {
                valid.push((am, bm));
            }
        }
    }
    let mut maximal: Vec<(BTreeSet<String>, BTreeSet<String>)> = valid
        .iter()
        .filter(|&&(a, b)| !valid.iter().any(|&(c, d)| (c, d) != (a, b) && c & a == a && d & b == b))
        .map(|&(a, b)| (subset(a), subset(b)))
        .collect();
    maximal.sort();
    maximal
}

/// Cheapest alignment cost by Dijkstra over the explicit product of the complete reachability
/// graph and trace positions.
pub fn exhaustive_alignment_cost(
    anet: &AcceptingPetriNet,
    trace: &[&str],
    log_cost: u64,
    model_cost: u64,
) -> Option<u64> {
    // Reachable markings via the public API.
    let mut states: Vec<Marking> = vec![anet.im.clone()];
    let mut index: HashMap<Marking, usize> = HashMap::from([(anet.im.clone(), 0)]);
    let mut edges: Vec<(usize, Option<String>, usize)> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let m = states[i].clone();
        for t in enabled(anet, &m).unwrap() {
            let next = fire(anet, &m, &t).unwrap();
            let j = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            edges.push((i, anet.net.transition(&t).unwrap().label.clone(), j));
        }
        i += 1;
        assert!(states.len() < 10_000, "oracle needs a bounded net");
    }
    let n = states.len();
    let node = |s: usize, p: usize| s * (trace.len() + 1) + p;
    let total = n * (trace.len() + 1);
    let mut adjacency: Vec<Vec<(usize, u64)>> = vec![Vec::new(); total];
    for s in 0..n {
        for p in 0..=trace.len() {
            if p < trace.len() {
                adjacency[node(s, p)].push((node(s, p + 1), log_cost));
            }
        }
    }
    for (s, label, t) in &edges {
        for p in 0..=trace.len() {
            match label {
                None => adjacency[node(*s, p)].push((node(*t, p), 0)),
                Some(l) => {
                    adjacency[node(*s, p)].push((node(*t, p), model_cost));
                    if p < trace.len() && trace[p] == l {
                        adjacency[node(*s, p)].push((node(*t, p + 1), 0));
                    }
                }
            }
        }
    }
    let mut dist = vec![u64::MAX; total];
    let mut done = vec![false; total];
    dist[node(0, 0)] = 0;
    for _ in 0..total {
        let Some(u) = (0..total)
            .filter(|&u| !done[u] && dist[u] != u64::MAX)
            .min_by_key(|&u| dist[u])
        else {
            break;
        };
        done[u] = true;
        for &(v, w) in &adjacency[u] {
            dist[v] = dist[v].min(dist[u] + w);
        }
    }
    let goal = *index.get(&anet.fm)?;
    let d = dist[node(goal, trace.len())];
    (d != u64::MAX).then_some(d)
}

/// Number of reachable markings, or `None` above `cap`.
pub fn reachable_markings(anet: &AcceptingPetriNet, cap: usize) -> Option<usize> {
    let mut seen = BTreeSet::from([anet.im.clone()]);
    let mut stack = vec![anet.im.clone()];
    while let Some(m) = stack.pop() {
        for t in enabled(anet, &m).unwrap() {
            let next = fire(anet, &m, &t).unwrap();
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(next);
            }
        }
    }
    Some(seen.len())
}

/// Request-handling net used for the alignment example: after registration a silent split
/// enables the ticket check and the examination in parallel, a silent join leads to the
/// decision, which is followed either by a reinitiation or, after a silent step, by payment or
/// rejection.
pub fn request_handling_net() -> AcceptingPetriNet {
    type TransitionRow = (
        &'static str,
        Option<&'static str>,
        &'static [&'static str],
        &'static [&'static str],
    );
    let mut net = PetriNet::new();
    for p in ["start", "p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8", "end"] {
        net.add_place(p).unwrap();
    }
    let transitions: [TransitionRow; 11] = [
        ("register", Some("register request"), &["start"], &["p1"]),
        ("split", None, &["p1"], &["p2", "p3"]),
        ("check", Some("check ticket"), &["p2"], &["p4"]),
        ("thorough", Some("examine thoroughly"), &["p3"], &["p5"]),
        ("casual", Some("examine casually"), &["p3"], &["p5"]),
        ("join", None, &["p4", "p5"], &["p6"]),
        ("decide", Some("decide"), &["p6"], &["p7"]),
        ("reinitiate", Some("reinitiate request"), &["p7"], &["p1"]),
        ("finish", None, &["p7"], &["p8"]),
        ("pay", Some("pay compensation"), &["p8"], &["end"]),
        ("reject", Some("reject request"), &["p8"], &["end"]),
    ];
    for (id, label, inputs, outputs) in transitions {
        net.add_transition(id, label).unwrap();
        for p in inputs {
            net.add_arc(p, id).unwrap();
        }
        for p in outputs {
            net.add_arc(id, p).unwrap();
        }
    }
    AcceptingPetriNet::new(net, Marking::single("start"), Marking::single("end")).unwrap()
}

/// Multiset of traces keyed by case id and content.
pub fn trace_multiset(log: &EventLog) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in &log.traces {
        *out.entry(format!("{t:?}")).or_default() += 1;
    }
    out
}

pub fn is_sub_multiset(small: &EventLog, big: &EventLog) -> bool {
    let big = trace_multiset(big);
    trace_multiset(small)
        .iter()
        .all(|(k, n)| big.get(k).is_some_and(|m| m >= n))
}
