//! Process discovery from event logs.

pub mod alpha;
pub mod dfg;
pub mod imdf;

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

pub use alpha::{alpha_classic, alpha_plus, maximal_pairs, Footprint, Relation};
pub use dfg::{discover_dfg, DirectlyFollowsGraph};
pub use imdf::discover_imdf;

use crate::eventlog::{EventLog, EventLogError};
use crate::petrinet::{tree_to_petri, AcceptingPetriNet, NetError, ProcessTree};

pub const NOISE_THRESHOLD: &str = "noise_threshold";

#[derive(Debug, Error, PartialEq)]
pub enum DiscoveryError {
    #[error("trace {index} is empty")]
    EmptyTrace { index: usize },
    #[error("log has no start or end activities")]
    NoStartOrEnd,
    #[error("unknown algorithm '{0}' (expected alpha, alpha-plus or imdf)")]
    UnknownAlgorithm(String),
    #[error("unknown parameter '{key}' for {algorithm}")]
    UnknownParameter { algorithm: String, key: String },
    #[error("invalid value '{value}' for parameter '{key}'")]
    InvalidParameter { key: String, value: String },
    #[error(transparent)]
    Log(#[from] EventLogError),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaVariant {
    Classic,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Alpha,
    AlphaPlus,
    Imdf,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Alpha => "alpha",
            Algorithm::AlphaPlus => "alpha-plus",
            Algorithm::Imdf => "imdf",
        }
    }

    fn parameters(self) -> &'static [&'static str] {
        match self {
            Algorithm::Alpha | Algorithm::AlphaPlus => &[],
            Algorithm::Imdf => &[NOISE_THRESHOLD],
        }
    }
}

impl FromStr for Algorithm {
    type Err = DiscoveryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(Algorithm::Alpha),
            "alpha-plus" => Ok(Algorithm::AlphaPlus),
            "imdf" => Ok(Algorithm::Imdf),
            other => Err(DiscoveryError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// String-keyed algorithm parameters; absent keys take their defaults.
pub type Parameters = BTreeMap<String, String>;

pub fn discover_alpha(log: &EventLog, variant: AlphaVariant) -> Result<AcceptingPetriNet, DiscoveryError> {
    match variant {
        AlphaVariant::Classic => alpha_classic(log),
        AlphaVariant::Plus => alpha_plus(log),
    }
}

/// IMDF on the log's directly-follows graph.
pub fn discover_imdf_log(log: &EventLog, noise_threshold: f64) -> Result<ProcessTree, DiscoveryError> {
    Ok(discover_imdf(&discover_dfg(log)?, noise_threshold))
}

fn noise_threshold(params: &Parameters) -> Result<f64, DiscoveryError> {
    let Some(value) = params.get(NOISE_THRESHOLD) else {
        return Ok(0.0);
    };
    let invalid = || DiscoveryError::InvalidParameter {
        key: NOISE_THRESHOLD.to_string(),
        value: value.clone(),
    };
    let parsed: f64 = value.trim().parse().map_err(|_| invalid())?;
    if (0.0..=1.0).contains(&parsed) {
        Ok(parsed)
    } else {
        Err(invalid())
    }
}

/// Runs `algorithm` on `log`. Unknown parameter keys are rejected.
pub fn discover(
    log: &EventLog,
    algorithm: Algorithm,
    params: &Parameters,
) -> Result<AcceptingPetriNet, DiscoveryError> {
    if let Some(key) = params.keys().find(|k| !algorithm.parameters().contains(&k.as_str())) {
        return Err(DiscoveryError::UnknownParameter {
            algorithm: algorithm.name().to_string(),
            key: key.clone(),
        });
    }
    match algorithm {
        Algorithm::Alpha => alpha_classic(log),
        Algorithm::AlphaPlus => alpha_plus(log),
        Algorithm::Imdf => {
            let tree = discover_imdf_log(log, noise_threshold(params)?)?;
            Ok(tree_to_petri(&tree)?)
        }
    }
}
