//! Standard and historical claims problems.
//!
//! Agents are positional: the `i`-th entry of every vector (claims, awards,
//! each period's claims and allocations) belongs to `agents[i]`. Identifiers
//! only matter to rules that look at them (priority orders) and to
//! population changes, where agents are matched by identifier.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::ValidationError;

/// A positive agent identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// `agents[0..n]` as `1..=n`.
pub fn natural_agents(n: usize) -> Vec<AgentId> {
    (1..=n as u64).map(AgentId).collect()
}

/// A one-shot claims problem `(N, c, E)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimsProblem {
    pub agents: Vec<AgentId>,
    pub claims: Vec<Amount>,
    pub endowment: Amount,
}

impl ClaimsProblem {
    pub fn new(agents: Vec<AgentId>, claims: Vec<Amount>, endowment: Amount) -> Self {
        ClaimsProblem {
            agents,
            claims,
            endowment,
        }
    }

    /// Problem over agents `1..=n`.
    pub fn with_natural_agents(claims: Vec<Amount>, endowment: Amount) -> Self {
        ClaimsProblem {
            agents: natural_agents(claims.len()),
            claims,
            endowment,
        }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn total_claims(&self) -> Amount {
        self.claims.iter().sum()
    }

    pub fn with_endowment(&self, endowment: Amount) -> Self {
        ClaimsProblem {
            agents: self.agents.clone(),
            claims: self.claims.clone(),
            endowment,
        }
    }

    pub fn with_claims(&self, claims: Vec<Amount>) -> Self {
        ClaimsProblem {
            agents: self.agents.clone(),
            claims,
            endowment: self.endowment.clone(),
        }
    }

    pub fn index_of(&self, agent: AgentId) -> Option<usize> {
        self.agents.iter().position(|&a| a == agent)
    }
}

/// An award vector aligned with its problem's agent list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation {
    pub awards: Vec<Amount>,
}

impl Allocation {
    pub fn new(awards: Vec<Amount>) -> Self {
        Allocation { awards }
    }

    pub fn zeros(n: usize) -> Self {
        Allocation {
            awards: vec![Amount::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.awards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.awards.is_empty()
    }

    pub fn total(&self) -> Amount {
        self.awards.iter().sum()
    }

    pub fn get(&self, i: usize) -> &Amount {
        &self.awards[i]
    }
}

impl From<Vec<Amount>> for Allocation {
    fn from(awards: Vec<Amount>) -> Self {
        Allocation { awards }
    }
}

/// One past period: what agents claimed and what they were given. The
/// period's endowment is the sum of the allocations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub claims: Vec<Amount>,
    pub allocations: Vec<Amount>,
}

impl PeriodRecord {
    pub fn new(claims: Vec<Amount>, allocations: Vec<Amount>) -> Self {
        PeriodRecord { claims, allocations }
    }

    pub fn endowment(&self) -> Amount {
        self.allocations.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct History {
    pub periods: Vec<PeriodRecord>,
}

impl History {
    pub fn new(periods: Vec<PeriodRecord>) -> Self {
        History { periods }
    }

    pub fn empty() -> Self {
        History::default()
    }

    pub fn single(claims: Vec<Amount>, allocations: Vec<Amount>) -> Self {
        History {
            periods: vec![PeriodRecord::new(claims, allocations)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    /// Keeps the listed agent positions of every period, in the given order.
    pub fn select(&self, indices: &[usize]) -> History {
        let pick = |v: &[Amount]| indices.iter().map(|&i| v[i].clone()).collect();
        History {
            periods: self
                .periods
                .iter()
                .map(|p| PeriodRecord::new(pick(&p.claims), pick(&p.allocations)))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Amount) -> History {
        let mul = |v: &[Amount]| v.iter().map(|x| x * factor).collect();
        History {
            periods: self
                .periods
                .iter()
                .map(|p| PeriodRecord::new(mul(&p.claims), mul(&p.allocations)))
                .collect(),
        }
    }

    pub fn concat(&self, other: &History) -> History {
        let mut periods = self.periods.clone();
        periods.extend(other.periods.iter().cloned());
        History { periods }
    }
}

/// A present problem together with its history, `(N, c, E, h)`.
///
/// Serialised flat: `{"agents", "claims", "endowment", "history"}`, with
/// `history` optional on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoricalProblem {
    #[serde(flatten)]
    pub problem: ClaimsProblem,
    #[serde(default)]
    pub history: History,
}

impl HistoricalProblem {
    pub fn new(problem: ClaimsProblem, history: History) -> Self {
        HistoricalProblem { problem, history }
    }

    /// Historical problem with no past periods.
    pub fn without_history(problem: ClaimsProblem) -> Self {
        HistoricalProblem {
            problem,
            history: History::empty(),
        }
    }

    pub fn len(&self) -> usize {
        self.problem.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problem.is_empty()
    }

    pub fn claims(&self) -> &[Amount] {
        &self.problem.claims
    }

    pub fn endowment(&self) -> &Amount {
        &self.problem.endowment
    }

    pub fn with_endowment(&self, endowment: Amount) -> Self {
        HistoricalProblem {
            problem: self.problem.with_endowment(endowment),
            history: self.history.clone(),
        }
    }

    pub fn with_claims(&self, claims: Vec<Amount>) -> Self {
        HistoricalProblem {
            problem: self.problem.with_claims(claims),
            history: self.history.clone(),
        }
    }

    /// Restriction to the listed positions: claims, agents and every period
    /// restricted componentwise. The endowment is left unchanged.
    pub fn select(&self, indices: &[usize]) -> Self {
        let p = &self.problem;
        HistoricalProblem {
            problem: ClaimsProblem {
                agents: indices.iter().map(|&i| p.agents[i]).collect(),
                claims: indices.iter().map(|&i| p.claims[i].clone()).collect(),
                endowment: p.endowment.clone(),
            },
            history: self.history.select(indices),
        }
    }

    /// Position `k` of the result carries the data of position `perm[k]`;
    /// the identifier list is kept as is.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = self.select(perm);
        out.problem.agents = self.problem.agents.clone();
        out
    }

    /// Scales claims, endowment and every past claim and allocation.
    pub fn scale(&self, factor: &Amount) -> Self {
        let p = &self.problem;
        HistoricalProblem {
            problem: ClaimsProblem {
                agents: p.agents.clone(),
                claims: p.claims.iter().map(|c| c * factor).collect(),
                endowment: &p.endowment * factor,
            },
            history: self.history.scale(factor),
        }
    }
}

impl From<ClaimsProblem> for HistoricalProblem {
    fn from(problem: ClaimsProblem) -> Self {
        HistoricalProblem::without_history(problem)
    }
}

/// Per-agent history totals and the history-adjusted claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryAggregates {
    /// Sum of past claims.
    pub delta_claims: Vec<Amount>,
    /// Sum of past allocations.
    pub delta_awards: Vec<Amount>,
    /// Accumulated shortfall, `delta_claims - delta_awards`.
    pub delta: Vec<Amount>,
    /// Present claim plus accumulated shortfall.
    pub adjusted_claims: Vec<Amount>,
}

pub fn validate_problem(p: &ClaimsProblem) -> Result<(), ValidationError> {
    if p.claims.len() != p.agents.len() {
        return Err(ValidationError::LengthMismatch {
            field: "claims",
            expected: p.agents.len(),
            found: p.claims.len(),
        });
    }
    let mut seen = HashSet::with_capacity(p.agents.len());
    for (index, &agent) in p.agents.iter().enumerate() {
        if agent.0 == 0 {
            return Err(ValidationError::InvalidAgent { index });
        }
        if !seen.insert(agent) {
            return Err(ValidationError::DuplicateAgent { agent });
        }
    }
    if let Some((index, value)) = p.claims.iter().enumerate().find(|(_, c)| c.is_negative()) {
        return Err(ValidationError::NegativeClaim {
            index,
            value: value.clone(),
        });
    }
    if p.endowment.is_negative() {
        return Err(ValidationError::NegativeEndowment {
            value: p.endowment.clone(),
        });
    }
    let total = p.total_claims();
    if !total.is_positive() {
        return Err(ValidationError::ZeroTotalClaims);
    }
    if total < p.endowment {
        return Err(ValidationError::InfeasibleEndowment {
            total,
            endowment: p.endowment.clone(),
        });
    }
    Ok(())
}

/// Checks boundedness (`0 <= x_i <= c_i`) and balance (`sum x = E`).
pub fn validate_allocation(p: &ClaimsProblem, x: &Allocation) -> Result<(), ValidationError> {
    if x.len() != p.claims.len() {
        return Err(ValidationError::LengthMismatch {
            field: "awards",
            expected: p.claims.len(),
            found: x.len(),
        });
    }
    for (index, (award, claim)) in x.awards.iter().zip(&p.claims).enumerate() {
        if award.is_negative() || award > claim {
            return Err(ValidationError::BoundednessViolated { index });
        }
    }
    let total = x.total();
    if total != p.endowment {
        return Err(ValidationError::BalanceViolated {
            total,
            endowment: p.endowment.clone(),
        });
    }
    Ok(())
}

/// Validates the present problem and the shape and boundedness of every
/// past period.
pub fn validate_historical(hp: &HistoricalProblem) -> Result<(), ValidationError> {
    validate_problem(&hp.problem)?;
    let n = hp.len();
    for (period, record) in hp.history.periods.iter().enumerate() {
        for (field, v) in [
            ("history claims", &record.claims),
            ("history allocations", &record.allocations),
        ] {
            if v.len() != n {
                return Err(ValidationError::LengthMismatch {
                    field,
                    expected: n,
                    found: v.len(),
                });
            }
        }
        for (index, (x, c)) in record.allocations.iter().zip(&record.claims).enumerate() {
            if x.is_negative() || x > c {
                return Err(ValidationError::HistoryBoundednessViolated { period, index });
            }
        }
    }
    Ok(())
}

/// Aggregates the history of `hp`. Only the history is inspected; the
/// present problem is not validated here.
pub fn aggregates(hp: &HistoricalProblem) -> Result<HistoryAggregates, ValidationError> {
    let n = hp.len();
    let mut delta_claims = vec![Amount::zero(); n];
    let mut delta_awards = vec![Amount::zero(); n];
    for (period, record) in hp.history.periods.iter().enumerate() {
        if record.claims.len() != n || record.allocations.len() != n {
            return Err(ValidationError::LengthMismatch {
                field: "history",
                expected: n,
                found: record.claims.len().min(record.allocations.len()),
            });
        }
        for i in 0..n {
            let (c, x) = (&record.claims[i], &record.allocations[i]);
            if x.is_negative() || x > c {
                return Err(ValidationError::HistoryBoundednessViolated { period, index: i });
            }
            delta_claims[i] += c;
            delta_awards[i] += x;
        }
    }
    let delta: Vec<Amount> = delta_claims.iter().zip(&delta_awards).map(|(c, x)| c - x).collect();
    let adjusted_claims = hp.problem.claims.iter().zip(&delta).map(|(c, d)| c + d).collect();
    Ok(HistoryAggregates {
        delta_claims,
        delta_awards,
        delta,
        adjusted_claims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::{amt, amts};

    fn problem(claims: &[&str], e: &str) -> ClaimsProblem {
        ClaimsProblem::with_natural_agents(amts(claims), amt(e))
    }

    #[test]
    fn validate_problem_cases() {
        assert_eq!(validate_problem(&problem(&["2", "4"], "2")), Ok(()));
        assert_eq!(
            validate_problem(&problem(&["0"], "0")),
            Err(ValidationError::ZeroTotalClaims)
        );
        assert!(matches!(
            validate_problem(&problem(&["1", "1"], "3")),
            Err(ValidationError::InfeasibleEndowment { .. })
        ));
        assert!(matches!(
            validate_problem(&problem(&["1", "-1", "3"], "1")),
            Err(ValidationError::NegativeClaim { index: 1, .. })
        ));
        assert!(matches!(
            validate_problem(&problem(&["1"], "-1")),
            Err(ValidationError::NegativeEndowment { .. })
        ));
        let dup = ClaimsProblem::new(vec![AgentId(3), AgentId(3)], amts(&["1", "1"]), amt("1"));
        assert_eq!(
            validate_problem(&dup),
            Err(ValidationError::DuplicateAgent { agent: AgentId(3) })
        );
        let zero_id = ClaimsProblem::new(vec![AgentId(0)], amts(&["1"]), amt("1"));
        assert_eq!(
            validate_problem(&zero_id),
            Err(ValidationError::InvalidAgent { index: 0 })
        );
    }

    #[test]
    fn validate_allocation_cases() {
        let p = problem(&["10", "5", "2"], "15");
        assert_eq!(validate_allocation(&p, &amts(&["9", "4", "2"]).into()), Ok(()));
        let q = problem(&["1", "1"], "1");
        assert!(matches!(
            validate_allocation(&q, &amts(&["1", "1"]).into()),
            Err(ValidationError::BalanceViolated { .. })
        ));
        assert_eq!(
            validate_allocation(&q, &amts(&["2", "-1"]).into()),
            Err(ValidationError::BoundednessViolated { index: 0 })
        );
    }

    #[test]
    fn aggregates_match_worked_examples() {
        let hp = HistoricalProblem::new(
            problem(&["10", "5", "2"], "15"),
            History::single(amts(&["7", "7", "20"]), amts(&["2", "2", "2"])),
        );
        let agg = aggregates(&hp).unwrap();
        assert_eq!(agg.delta, amts(&["5", "5", "18"]));
        assert_eq!(agg.adjusted_claims, amts(&["15", "10", "20"]));

        let hp = HistoricalProblem::new(
            problem(&["2", "4", "8", "6"], "9"),
            History::single(amts(&["12", "7", "6", "4"]), amts(&["2", "2", "2", "2"])),
        );
        let agg = aggregates(&hp).unwrap();
        assert_eq!(agg.delta, amts(&["10", "5", "4", "2"]));
        assert_eq!(agg.adjusted_claims, amts(&["12", "9", "12", "8"]));
    }

    #[test]
    fn empty_history_leaves_claims() {
        let hp = HistoricalProblem::without_history(problem(&["3", "1/2"], "1"));
        let agg = aggregates(&hp).unwrap();
        assert!(agg.delta.iter().all(Amount::is_zero));
        assert_eq!(agg.adjusted_claims, hp.problem.claims);
    }

    #[test]
    fn zero_endowment_period_is_allowed() {
        let hp = HistoricalProblem::new(
            problem(&["1", "1"], "1"),
            History::single(amts(&["2", "3"]), amts(&["0", "0"])),
        );
        assert_eq!(validate_historical(&hp), Ok(()));
        assert_eq!(aggregates(&hp).unwrap().adjusted_claims, amts(&["3", "4"]));
    }

    #[test]
    fn history_boundedness_reported() {
        let hp = HistoricalProblem::new(
            problem(&["1", "1"], "1"),
            History::new(vec![
                PeriodRecord::new(amts(&["1", "1"]), amts(&["1", "0"])),
                PeriodRecord::new(amts(&["1", "1"]), amts(&["0", "2"])),
            ]),
        );
        assert_eq!(
            aggregates(&hp),
            Err(ValidationError::HistoryBoundednessViolated { period: 1, index: 1 })
        );
        assert_eq!(
            validate_historical(&hp),
            Err(ValidationError::HistoryBoundednessViolated { period: 1, index: 1 })
        );
    }

    #[test]
    fn json_schema() {
        let text = r#"{"agents":[1,2,3], "claims":["10","5","2"], "endowment":"15",
            "history":[{"claims":["7","7","20"], "allocations":["2","2","2"]}]}"#;
        let hp: HistoricalProblem = serde_json::from_str(text).unwrap();
        assert_eq!(hp.problem.agents, natural_agents(3));
        assert_eq!(hp.history.len(), 1);
        let back: HistoricalProblem = serde_json::from_str(&serde_json::to_string(&hp).unwrap()).unwrap();
        assert_eq!(back, hp);

        let no_history: HistoricalProblem =
            serde_json::from_str(r#"{"agents":[1],"claims":["1"],"endowment":"1/2"}"#).unwrap();
        assert!(no_history.history.is_empty());

        let float = r#"{"agents":[1],"claims":[1.5],"endowment":"1"}"#;
        assert!(serde_json::from_str::<ClaimsProblem>(float).is_err());
    }
}
