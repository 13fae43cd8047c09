//! Claims problems with history, solved in exact rational arithmetic.
//!
//! * [`rules`]: standard division rules (proportional, constrained equal
//!   awards and losses, Talmud, priority).
//! * [`operator`]: the historical operator, which runs a standard rule on
//!   history-adjusted claims and clamps the result at present claims, plus
//!   the two alternative extensions `gamma1` and `gamma2`.
//! * [`axioms`]: axiom checkers, randomized counterexample search and the
//!   fixture suite.
//! * [`paths`]: paths of awards as the endowment sweeps from zero to total
//!   claims.
//!
//! ```
//! use histclaims_core::{amt, amts, apply_historical, ClaimsProblem, History, HistoricalProblem, RuleHandle};
//!
//! let problem = ClaimsProblem::with_natural_agents(amts(&["10", "5", "2"]), amt("15"));
//! let history = History::single(amts(&["7", "7", "20"]), amts(&["2", "2", "2"]));
//! let solution = apply_historical(&RuleHandle::cel(), &HistoricalProblem::new(problem, history)).unwrap();
//! assert_eq!(solution.awards.awards, amts(&["9", "4", "2"]));
//! assert_eq!(solution.lambda, amt("4"));
//! ```

// Errors carry exact bounds; boxing them would only hide the values.
#![allow(clippy::result_large_err)]

pub mod amount;
pub mod axioms;
pub mod error;
pub mod operator;
pub mod paths;
pub mod problem;
pub mod rules;
pub mod solver;

pub use amount::{amt, amts, Amount, ParseAmountError};
pub use axioms::{
    check_general, check_operator_axiom, check_standard, run_fixtures, run_fixtures_with, search_counterexample,
    AxiomId, CheckResult, FixtureReport, Instance, InstanceKind, Verdict, Witness,
};
pub use error::{Error, Result, ValidationError};
pub use operator::{
    apply_historical, apply_historical_iterative, gamma1, gamma2, solve_lambda, tentative_awards, HistoricalSolution,
    IterativeTrace, OperatorHandle,
};
pub use paths::{trace_historical, trace_standard, AwardPath, Sampling};
pub use problem::{
    aggregates, natural_agents, validate_allocation, validate_historical, validate_problem, AgentId, Allocation,
    ClaimsProblem, HistoricalProblem, History, HistoryAggregates, PeriodRecord,
};
pub use rules::{RuleHandle, RuleKind};
pub use solver::{solve_monotone_level, LevelForm, SolveParam};
