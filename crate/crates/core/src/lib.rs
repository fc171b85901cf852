//! Optimal linear contracts for teams of agents under hidden action, with
//! and without (approximate) non-discrimination constraints.
//!
//! The modules follow the data flow: [`reward`] oracles feed [`contract`]
//! evaluation, [`solvers`] search over incentive sets, [`forge`] builds
//! instance families, [`harness`] measures utility ratios, and [`format`]
//! reads and writes the file formats used by the command-line tool.

pub mod agents;
pub mod contract;
pub mod error;
pub mod forge;
pub mod format;
pub mod harness;
pub mod reward;
pub mod solvers;

pub use agents::AgentSet;
pub use contract::{
    best_response_step, deviating_agents, group_payment_nd, indifference_payment, is_equilibrium,
    optimal_contract_for_set, Contract, IncentiveOutcome, Infeasibility, Instance, ModeSpec,
};
pub use error::{ContractError, ForgeError, FormatError, HarnessError, RewardError, SolveError};
pub use reward::{RewardFunction, RewardKind, StructureCheck, StructureReport};
pub use solvers::{solve, Method, PartitionResult, SolveOptions, SolveReport};

/// Comparison tolerance for marginals, payments and equilibrium checks.
pub const TOL: f64 = 1e-9;
