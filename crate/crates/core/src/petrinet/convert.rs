use super::{AcceptingPetriNet, Marking, NetError, Operator, PetriNet, ProcessTree};

/// Translates a process tree into a workflow net with one source and one sink place.
///
/// Each subtree is built between an entry and an exit place:
/// - leaves become one transition (silent for `tau`);
/// - sequence children are chained through fresh intermediate places;
/// - xor children share the entry and exit place;
/// - parallel children get their own entry/exit places behind a silent split and join;
/// - a loop is entered and left through silent transitions; the do-part runs from the loop's
///   inner start place to its inner end place and every redo-part runs back.
///
/// No subtree ever produces into its entry place or consumes from its exit place, which keeps
/// siblings sharing places isolated from each other.
pub fn tree_to_petri(tree: &ProcessTree) -> Result<AcceptingPetriNet, NetError> {
    tree.validate()?;
    let mut builder = Builder::default();
    builder.net.add_place("source")?;
    builder.net.add_place("sink")?;
    builder.build(tree, "source", "sink")?;
    AcceptingPetriNet::new(builder.net, Marking::single("source"), Marking::single("sink"))
}

#[derive(Default)]
struct Builder {
    net: PetriNet,
    places: usize,
    visible: usize,
    silent: usize,
}

impl Builder {
    fn place(&mut self) -> Result<String, NetError> {
        self.places += 1;
        let id = format!("p{}", self.places);
        self.net.add_place(&id)?;
        Ok(id)
    }

    fn transition(&mut self, label: Option<&str>, from: &[&str], to: &[&str]) -> Result<(), NetError> {
        let id = match label {
            Some(_) => {
                self.visible += 1;
                format!("t{}", self.visible)
            }
            None => {
                self.silent += 1;
                format!("tau{}", self.silent)
            }
        };
        self.net.add_transition(&id, label)?;
        for p in from {
            self.net.add_arc(p, &id)?;
        }
        for p in to {
            self.net.add_arc(&id, p)?;
        }
        Ok(())
    }

    fn build(&mut self, tree: &ProcessTree, entry: &str, exit: &str) -> Result<(), NetError> {
        match tree {
            ProcessTree::Activity(label) => self.transition(Some(label), &[entry], &[exit]),
            ProcessTree::Tau => self.transition(None, &[entry], &[exit]),
            ProcessTree::Operator(Operator::Sequence, children) => {
                let mut current = entry.to_string();
                for (i, child) in children.iter().enumerate() {
                    let next = if i + 1 == children.len() {
                        exit.to_string()
                    } else {
                        self.place()?
                    };
                    self.build(child, &current, &next)?;
                    current = next;
                }
                Ok(())
            }
            ProcessTree::Operator(Operator::Xor, children) => {
                for child in children {
                    self.build(child, entry, exit)?;
                }
                Ok(())
            }
            ProcessTree::Operator(Operator::Parallel, children) => {
                let mut starts = Vec::with_capacity(children.len());
                let mut ends = Vec::with_capacity(children.len());
                for child in children {
                    let s = self.place()?;
                    let e = self.place()?;
                    self.build(child, &s, &e)?;
                    starts.push(s);
                    ends.push(e);
                }
                let starts: Vec<&str> = starts.iter().map(String::as_str).collect();
                let ends: Vec<&str> = ends.iter().map(String::as_str).collect();
                self.transition(None, &[entry], &starts)?;
                self.transition(None, &ends, &[exit])
            }
            ProcessTree::Operator(Operator::Loop, children) => {
                let start = self.place()?;
                let end = self.place()?;
                self.transition(None, &[entry], &[&start])?;
                self.build(&children[0], &start, &end)?;
                for redo in &children[1..] {
                    self.build(redo, &end, &start)?;
                }
                self.transition(None, &[&end], &[exit])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petrinet::{enabled, fire};

    fn accepts(anet: &AcceptingPetriNet, labels: &[&str]) -> bool {
        // Depth-first search over firing sequences, silent transitions bounded per step.
        fn go(anet: &AcceptingPetriNet, m: &Marking, rest: &[&str], budget: usize) -> bool {
            if rest.is_empty() && *m == anet.fm {
                return true;
            }
            if budget == 0 {
                return false;
            }
            for t in enabled(anet, m).unwrap() {
                let tr = anet.net.transition(&t).unwrap();
                let next = fire(anet, m, &t).unwrap();
                match &tr.label {
                    None if go(anet, &next, rest, budget - 1) => return true,
                    Some(l) if rest.first() == Some(&l.as_str()) && go(anet, &next, &rest[1..], budget - 1) => {
                        return true
                    }
                    _ => {}
                }
            }
            false
        }
        go(anet, &anet.im, labels, 4 * labels.len() + 8)
    }

    #[test]
    fn leaf_is_single_transition() {
        let anet = tree_to_petri(&ProcessTree::activity("a")).unwrap();
        assert_eq!(anet.net.places(), ["source", "sink"]);
        assert_eq!(anet.net.transitions().len(), 1);
        assert_eq!(anet.im, Marking::single("source"));
        assert_eq!(anet.fm, Marking::single("sink"));
        assert!(accepts(&anet, &["a"]));
    }

    #[test]
    fn xor_language() {
        let anet = tree_to_petri(&ProcessTree::xor(vec![
            ProcessTree::activity("a"),
            ProcessTree::activity("b"),
        ]))
        .unwrap();
        assert!(accepts(&anet, &["a"]));
        assert!(accepts(&anet, &["b"]));
        assert!(!accepts(&anet, &["a", "b"]));
        assert!(!accepts(&anet, &[]));
    }

    #[test]
    fn loop_language() {
        let anet = tree_to_petri(&ProcessTree::looped(vec![
            ProcessTree::activity("a"),
            ProcessTree::activity("b"),
        ]))
        .unwrap();
        assert!(accepts(&anet, &["a"]));
        assert!(accepts(&anet, &["a", "b", "a"]));
        assert!(accepts(&anet, &["a", "b", "a", "b", "a"]));
        assert!(!accepts(&anet, &["a", "b"]));
    }

    #[test]
    fn loop_under_xor_does_not_leak() {
        let anet = tree_to_petri(&ProcessTree::xor(vec![
            ProcessTree::looped(vec![ProcessTree::activity("a"), ProcessTree::activity("b")]),
            ProcessTree::activity("c"),
        ]))
        .unwrap();
        assert!(accepts(&anet, &["a", "b", "a"]));
        assert!(accepts(&anet, &["c"]));
        assert!(!accepts(&anet, &["a", "b", "c"]));
    }

    #[test]
    fn malformed_loop_rejected() {
        let err = tree_to_petri(&ProcessTree::looped(vec![ProcessTree::activity("a")]));
        assert!(matches!(err, Err(NetError::MalformedTree(_))));
    }
}
