//! Machine-checkable axioms for standard rules, general rules and
//! extension operators.
//!
//! A checker evaluates one axiom on one concrete [`Instance`] and reports
//! whether its defining (in)equality holds there. Universal statements
//! ("the induced rule is resource monotonic") are only ever approached by
//! [`search_counterexample`], which draws random instances and stops at the
//! first violation.
//!
//! General ("historical") versions follow the standard ones with the history
//! carried along:
//!
//! * equal treatment and order preservation also require the agents'
//!   aggregate past claims and past awards to compare the same way;
//! * anonymity permutes present claims and every period's columns together;
//! * scale invariance scales the whole history with the present problem;
//! * resource monotonicity, self-duality and the composition properties move
//!   the present endowment (or claims) with the history held fixed;
//! * population monotonicity compares problems whose claims and history
//!   agree on the common agents;
//! * consistency restricts every past period to the subgroup.

mod check;
mod fixtures;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::Error;
use crate::problem::{AgentId, HistoricalProblem};

pub use check::{check_general, check_operator_axiom, check_standard, CONTINUITY_STEPS};
pub use fixtures::{run_fixtures, run_fixtures_with, FixtureComparison, FixtureReport, FixtureVerdict};
pub use search::{search_counterexample, trial_seed, InstanceGenerator, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    EqualTreatment,
    OrderGains,
    OrderLosses,
    Anonymity,
    ScaleInvariance,
    ContinuitySampled,
    SelfDuality,
    Securement,
    CompositionUp,
    CompositionDown,
    ResourceMonotonicity,
    ClaimsMonotonicity,
    PopulationMonotonicity,
    Consistency,
    PresentBoundedness,
    BalancedTreatment,
    NonArbitrariness,
}

impl AxiomId {
    pub const ALL: [AxiomId; 17] = [
        AxiomId::EqualTreatment,
        AxiomId::OrderGains,
        AxiomId::OrderLosses,
        AxiomId::Anonymity,
        AxiomId::ScaleInvariance,
        AxiomId::ContinuitySampled,
        AxiomId::SelfDuality,
        AxiomId::Securement,
        AxiomId::CompositionUp,
        AxiomId::CompositionDown,
        AxiomId::ResourceMonotonicity,
        AxiomId::ClaimsMonotonicity,
        AxiomId::PopulationMonotonicity,
        AxiomId::Consistency,
        AxiomId::PresentBoundedness,
        AxiomId::BalancedTreatment,
        AxiomId::NonArbitrariness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::EqualTreatment => "equal-treatment",
            AxiomId::OrderGains => "order-gains",
            AxiomId::OrderLosses => "order-losses",
            AxiomId::Anonymity => "anonymity",
            AxiomId::ScaleInvariance => "scale-invariance",
            AxiomId::ContinuitySampled => "continuity-sampled",
            AxiomId::SelfDuality => "self-duality",
            AxiomId::Securement => "securement",
            AxiomId::CompositionUp => "composition-up",
            AxiomId::CompositionDown => "composition-down",
            AxiomId::ResourceMonotonicity => "resource-monotonicity",
            AxiomId::ClaimsMonotonicity => "claims-monotonicity",
            AxiomId::PopulationMonotonicity => "population-monotonicity",
            AxiomId::Consistency => "consistency",
            AxiomId::PresentBoundedness => "present-boundedness",
            AxiomId::BalancedTreatment => "balanced-treatment",
            AxiomId::NonArbitrariness => "non-arbitrariness",
        }
    }

    /// The instance shape the axiom's checker consumes.
    pub fn signature(self) -> InstanceKind {
        match self {
            AxiomId::EqualTreatment
            | AxiomId::OrderGains
            | AxiomId::OrderLosses
            | AxiomId::SelfDuality
            | AxiomId::Securement
            | AxiomId::PresentBoundedness
            | AxiomId::BalancedTreatment
            | AxiomId::NonArbitrariness => InstanceKind::Single,
            AxiomId::Anonymity => InstanceKind::Permuted,
            AxiomId::ScaleInvariance => InstanceKind::Scaled,
            AxiomId::ContinuitySampled => InstanceKind::Perturbed,
            AxiomId::CompositionUp => InstanceKind::Split,
            AxiomId::CompositionDown | AxiomId::ResourceMonotonicity => InstanceKind::LargerEndowment,
            AxiomId::ClaimsMonotonicity => InstanceKind::ClaimIncrease,
            AxiomId::PopulationMonotonicity => InstanceKind::Enlarged,
            AxiomId::Consistency => InstanceKind::Subgroup,
        }
    }

    /// Axioms about an operator rather than about a rule.
    pub fn is_operator_axiom(self) -> bool {
        matches!(
            self,
            AxiomId::PresentBoundedness | AxiomId::BalancedTreatment | AxiomId::NonArbitrariness
        )
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "axiom",
                name: s.to_owned(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Single,
    Permuted,
    Scaled,
    Split,
    LargerEndowment,
    ClaimIncrease,
    Enlarged,
    Subgroup,
    Perturbed,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Single => "single",
            InstanceKind::Permuted => "permuted",
            InstanceKind::Scaled => "scaled",
            InstanceKind::Split => "split",
            InstanceKind::LargerEndowment => "larger-endowment",
            InstanceKind::ClaimIncrease => "claim-increase",
            InstanceKind::Enlarged => "enlarged",
            InstanceKind::Subgroup => "subgroup",
            InstanceKind::Perturbed => "perturbed",
        }
    }
}

/// Concrete input to one axiom check. Agents are always referred to by
/// identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Single {
        problem: HistoricalProblem,
    },
    /// Position `k` of the permuted problem carries agent `permutation[k]`'s
    /// claim and history.
    Permuted {
        problem: HistoricalProblem,
        permutation: Vec<AgentId>,
    },
    Scaled {
        problem: HistoricalProblem,
        factor: Amount,
    },
    /// The problem's endowment split as `first + second`, both positive.
    Split {
        problem: HistoricalProblem,
        first: Amount,
        second: Amount,
    },
    /// A second endowment with `E < larger <= C`.
    LargerEndowment {
        problem: HistoricalProblem,
        larger: Amount,
    },
    ClaimIncrease {
        problem: HistoricalProblem,
        agent: AgentId,
        new_claim: Amount,
    },
    /// A problem on a superset of agents agreeing with `problem` on its
    /// agents' claims and history, with the same endowment.
    Enlarged {
        problem: HistoricalProblem,
        enlarged: HistoricalProblem,
    },
    /// A nonempty proper subgroup.
    Subgroup {
        problem: HistoricalProblem,
        subgroup: Vec<AgentId>,
    },
    /// Continuity probe along the segment from `toward` back to `problem`.
    Perturbed {
        problem: HistoricalProblem,
        toward: HistoricalProblem,
    },
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Single { .. } => InstanceKind::Single,
            Instance::Permuted { .. } => InstanceKind::Permuted,
            Instance::Scaled { .. } => InstanceKind::Scaled,
            Instance::Split { .. } => InstanceKind::Split,
            Instance::LargerEndowment { .. } => InstanceKind::LargerEndowment,
            Instance::ClaimIncrease { .. } => InstanceKind::ClaimIncrease,
            Instance::Enlarged { .. } => InstanceKind::Enlarged,
            Instance::Subgroup { .. } => InstanceKind::Subgroup,
            Instance::Perturbed { .. } => InstanceKind::Perturbed,
        }
    }

    pub fn problem(&self) -> &HistoricalProblem {
        match self {
            Instance::Single { problem }
            | Instance::Permuted { problem, .. }
            | Instance::Scaled { problem, .. }
            | Instance::Split { problem, .. }
            | Instance::LargerEndowment { problem, .. }
            | Instance::ClaimIncrease { problem, .. }
            | Instance::Enlarged { problem, .. }
            | Instance::Subgroup { problem, .. }
            | Instance::Perturbed { problem, .. } => problem,
        }
    }

    /// Every historical problem the instance carries.
    pub fn problems(&self) -> Vec<&HistoricalProblem> {
        match self {
            Instance::Enlarged { problem, enlarged } => vec![problem, enlarged],
            Instance::Perturbed { problem, toward } => vec![problem, toward],
            other => vec![other.problem()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

/// The instance on which an axiom failed and the two sides that differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: Instance,
    /// The agents the failing comparison is about.
    pub agents: Vec<AgentId>,
    /// Human-readable form of the failed relation, `lhs <op> rhs`.
    pub relation: String,
    pub lhs: Vec<Amount>,
    pub rhs: Vec<Amount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl CheckResult {
    pub fn holds(axiom: AxiomId) -> Self {
        CheckResult {
            axiom,
            verdict: Verdict::Holds,
            witness: None,
        }
    }

    pub fn violated(axiom: AxiomId, witness: Witness) -> Self {
        CheckResult {
            axiom,
            verdict: Verdict::Violated,
            witness: Some(witness),
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in AxiomId::ALL {
            assert_eq!(a.name().parse::<AxiomId>().unwrap(), a);
            assert_eq!(serde_json_name(a), a.name());
        }
        assert!("monotonicity".parse::<AxiomId>().is_err());
    }

    fn serde_json_name(a: AxiomId) -> String {
        serde_json::to_value(a).unwrap().as_str().unwrap().to_owned()
    }

    #[test]
    fn operator_axioms_take_single_problems() {
        for a in AxiomId::ALL.into_iter().filter(|a| a.is_operator_axiom()) {
            assert_eq!(a.signature(), InstanceKind::Single);
        }
    }
}
