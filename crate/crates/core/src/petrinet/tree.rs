use std::collections::BTreeSet;
use std::fmt;

use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Sequence,
    Xor,
    Parallel,
    /// First child is the do-part, the remaining children are redo-parts.
    Loop,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Sequence => "sequence",
            Operator::Xor => "xor",
            Operator::Parallel => "parallel",
            Operator::Loop => "loop",
        }
    }
}

/// Block-structured process model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProcessTree {
    Operator(Operator, Vec<ProcessTree>),
    Activity(String),
    Tau,
}

impl ProcessTree {
    pub fn activity(label: &str) -> Self {
        ProcessTree::Activity(label.to_string())
    }

    pub fn sequence(children: Vec<ProcessTree>) -> Self {
        ProcessTree::Operator(Operator::Sequence, children)
    }

    pub fn xor(children: Vec<ProcessTree>) -> Self {
        ProcessTree::Operator(Operator::Xor, children)
    }

    pub fn parallel(children: Vec<ProcessTree>) -> Self {
        ProcessTree::Operator(Operator::Parallel, children)
    }

    pub fn looped(children: Vec<ProcessTree>) -> Self {
        ProcessTree::Operator(Operator::Loop, children)
    }

    /// `loop(tau, a1, ..., an)`: accepts every sequence over the given activities.
    pub fn flower<S: AsRef<str>>(activities: &[S]) -> Self {
        let mut children = vec![ProcessTree::Tau];
        children.extend(activities.iter().map(|a| ProcessTree::activity(a.as_ref())));
        ProcessTree::looped(children)
    }

    pub fn validate(&self) -> Result<(), NetError> {
        match self {
            ProcessTree::Operator(op, children) => {
                if children.is_empty() {
                    return Err(NetError::MalformedTree(format!("{} without children", op.name())));
                }
                if *op == Operator::Loop && children.len() < 2 {
                    return Err(NetError::MalformedTree("loop needs at least 2 children".into()));
                }
                children.iter().try_for_each(ProcessTree::validate)
            }
            ProcessTree::Activity(_) | ProcessTree::Tau => Ok(()),
        }
    }

    /// Activity labels of all leaves, left to right (duplicates kept).
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ProcessTree::Operator(_, children) => children.iter().for_each(|c| c.collect_leaves(out)),
            ProcessTree::Activity(a) => out.push(a),
            ProcessTree::Tau => {}
        }
    }

    pub fn activities(&self) -> BTreeSet<&str> {
        self.leaves().into_iter().collect()
    }
}

impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessTree::Operator(op, children) => {
                write!(f, "{}(", op.name())?;
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{child}")?;
                }
                f.write_str(")")
            }
            ProcessTree::Activity(a) => f.write_str(a),
            ProcessTree::Tau => f.write_str("tau"),
        }
    }
}
