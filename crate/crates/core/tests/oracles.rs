//! Independent oracles: enumerated languages and frozen renderings.

mod common;

use common::{net_language, random_tree, shuffled_pool, tree_language};
use procmine::discovery::alpha_classic;
use procmine::eventlog::EventLog;
use procmine::petrinet::tree_to_petri;
use procmine::render::{check_dot, petri_to_dot};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn tree_translation_preserves_language() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..150 {
        let mut pool = shuffled_pool(&mut rng, 5);
        let tree = random_tree(&mut rng, &mut pool, 3, &[0, 1, 2]);
        let expected = tree_language(&tree);
        let longest = expected.iter().map(Vec::len).max().unwrap_or(0);
        let anet = tree_to_petri(&tree).unwrap();
        assert_eq!(net_language(&anet, longest + 1, 8), expected, "{tree}");
    }
}

#[test]
fn alpha_choice_net_renders_to_frozen_dot() {
    let log = EventLog::from_activity_traces(&[vec!["a", "b", "d"], vec!["a", "c", "d"]]);
    let anet = alpha_classic(&log).unwrap();
    let dot = petri_to_dot(&anet);
    check_dot(&dot).unwrap();
    let expected = r#"digraph petri {
  rankdir=LR;
  p0 [shape=circle, label="", xlabel="p({a},{b,c})"];
  p1 [shape=circle, label="", xlabel="p({b,c},{d})"];
  p2 [shape=doublecircle, label="", xlabel="sink"];
  p3 [shape=circle, label="●", xlabel="source"];
  t0 [shape=box, label="a"];
  t1 [shape=box, label="b"];
  t2 [shape=box, label="c"];
  t3 [shape=box, label="d"];
  p0 -> t1;
  p0 -> t2;
  p1 -> t3;
  p3 -> t0;
  t0 -> p0;
  t1 -> p1;
  t2 -> p1;
  t3 -> p2;
}
"#;
    assert_eq!(dot, expected);
}
