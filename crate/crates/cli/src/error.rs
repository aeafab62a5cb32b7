use std::fmt;

use splitsam_core::graph::GraphError;
use splitsam_core::netsim::NetError;
use splitsam_core::partition::PartitionError;
use splitsam_core::prompt::PromptError;
use splitsam_core::sero::SeroError;
use splitsam_core::sim::SimError;

/// Process exit codes.
pub mod code {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const SCHEMA: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const INTERNAL: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Schema(String),
    Infeasible(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => code::CONFIG,
            CliError::Schema(_) => code::SCHEMA,
            CliError::Infeasible(_) => code::INFEASIBLE,
            CliError::Internal(_) => code::INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Config(m) => ("configuration error", m),
            CliError::Schema(m) => ("schema error", m),
            CliError::Infeasible(m) => ("infeasible", m),
            CliError::Internal(m) => ("internal error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(_) | GraphError::InvalidSynthOption(_) | GraphError::NoLayers => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::Io(_)
            | NetError::TraceGap { .. }
            | NetError::TraceExhausted { .. }
            | NetError::InvalidParameter(_)
            | NetError::UnknownClass(_)
            | NetError::NonPositiveBandwidth(_) => CliError::Config(e.to_string()),
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::Graph(g) => g.into(),
            PartitionError::Net(n) => n.into(),
            PartitionError::TooLarge { .. } => CliError::Config(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<SeroError> for CliError {
    fn from(e: SeroError) -> Self {
        match e {
            SeroError::Graph(g) => g.into(),
            SeroError::Partition(p) => p.into(),
            SeroError::Net(n) => n.into(),
            SeroError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            SeroError::Io(_) => CliError::Config(e.to_string()),
            SeroError::Invalid(_) | SeroError::Json(_) => CliError::Schema(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Sero(s) => s.into(),
            SimError::Net(n) => n.into(),
            SimError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            SimError::MissingParameters(_) | SimError::Invalid(_) | SimError::Json(_) => {
                CliError::Schema(e.to_string())
            }
            SimError::UnknownPolicy(_) | SimError::EmptySweep | SimError::Io(_) => CliError::Config(e.to_string()),
            SimError::Csv(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<PromptError> for CliError {
    fn from(e: PromptError) -> Self {
        match e {
            PromptError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            PromptError::ZeroBudget => CliError::Config(e.to_string()),
            PromptError::EmptyProfile => CliError::Internal(e.to_string()),
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}
