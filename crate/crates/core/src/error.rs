use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("reward function needs at least one agent")]
    NoAgents,
    #[error("{what} {value} is not a probability in [0, 1]")]
    InvalidValue { what: &'static str, value: f64 },
    #[error("total reward {0} exceeds 1")]
    TotalAboveOne(f64),
    #[error("agent {agent} covers element {element}, but only {elements} elements exist")]
    UnknownElement {
        agent: usize,
        element: usize,
        elements: usize,
    },
    #[error("{n} agents exceeds the limit of {limit}")]
    TooManyAgents { n: usize, limit: usize },
    #[error("explicit table for {n} agents needs {expected} entries, got {got}")]
    TableSize {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("f(empty set) must be 0, got {0}")]
    NotNormalized(f64),
    #[error("invalid subset: agent {agent} is outside 0..{n}")]
    InvalidSubset { agent: usize, n: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContractError {
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error("expected {expected} costs, got {got}")]
    CostCount { expected: usize, got: usize },
    #[error("cost of agent {agent} must be a positive finite number, got {cost}")]
    NonPositiveCost { agent: usize, cost: f64 },
    #[error("reward function is not monotone submodular: {0}")]
    NotStructured(String),
    #[error("agent {agent} is not a member of the incentive set")]
    AgentNotInSet { agent: usize },
    #[error("incentive set is empty")]
    EmptySet,
    #[error("payment {value} for agent {agent} is outside [0, 1]")]
    PaymentOutOfRange { agent: usize, value: f64 },
    #[error("contract has {got} payments for {expected} agents")]
    ContractLength { expected: usize, got: usize },
    #[error("beta must be a finite number >= 1, got {0}")]
    InvalidBeta(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("{n} agents exceeds the brute-force limit of {limit}; use --method symmetric or --method partition")]
    TooLarge { n: usize, limit: usize },
    #[error("method needs a {expected} reward function, got {got}")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },
    #[error("method needs exactly {expected} agents, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("delta must lie in (0, 1], got {0}")]
    InvalidDelta(f64),
    #[error("base set is empty")]
    EmptyBase,
    #[error("base set cannot be incentivized by an unconstrained contract: {0}")]
    BaseInfeasible(String),
    #[error("all b-agents must share one cost")]
    NonUniformCosts,
    #[error("invalid group layout: {0}")]
    GroupLayout(String),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForgeError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Contract(#[from] ContractError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error(transparent)]
    Forge(#[from] ForgeError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Forge(#[from] ForgeError),
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("{0}")]
    Method(String),
}
