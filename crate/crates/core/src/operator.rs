//! Extension operators: turning a standard rule into a rule for problems
//! with history.
//!
//! The historical operator works in three steps. History is folded into
//! adjusted claims `c~ = c + (sum of past claims - sum of past awards)`; the
//! standard rule is applied to `(N, c~, E)` to get a tentative allocation
//! `t`; finally awards are `min(c_i, t_i + lambda)` where `lambda >= 0`
//! restores balance. Because `sum t = E` and `t` is bounded by `c~` rather
//! than `c`, some agents may be over-awarded by `t`; `lambda` passes their
//! excess on, equally, to everyone still below their claim.
//!
//! [`apply_historical`] solves for `lambda` directly.
//! [`apply_historical_iterative`] reaches the same awards by repeatedly
//! satiating over-awarded agents and splitting their excess equally among
//! the rest, and is kept as an independent route for cross-checking.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::problem::{
    aggregates, validate_allocation, validate_historical, Allocation, ClaimsProblem, HistoricalProblem,
};
use crate::rules::{cel, RuleHandle};
use crate::solver::{capped_sum, solve_capped_level};

/// Result of applying the historical operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoricalSolution {
    pub awards: Allocation,
    /// The balancing shift; the smallest valid one when `C = E`.
    pub lambda: Amount,
    /// The standard rule applied to the history-adjusted claims.
    pub tentative: Vec<Amount>,
    pub adjusted_claims: Vec<Amount>,
    /// Positions whose clamp binds strictly: `t_i + lambda > c_i`.
    pub satiated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterativeStage {
    /// Agents satiated at this stage.
    pub satiated: Vec<usize>,
    /// Their combined excess over their claims, passed on to the others.
    pub excess: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterativeTrace {
    /// Stages in order; the last one is always empty.
    pub stages: Vec<IterativeStage>,
    /// Union of all satiated sets.
    pub final_set: Vec<usize>,
}

/// Smallest `lambda >= 0` with `sum_i min(c_i, t_i + lambda) = E`.
///
/// Requires `sum_i min(c_i, t_i) <= E <= sum_i c_i`, which holds whenever the
/// tentative vector is balanced for `E`.
pub fn solve_lambda(claims: &[Amount], tentative: &[Amount], endowment: &Amount) -> Result<Amount> {
    let low = capped_sum(tentative, claims, &Amount::zero());
    let high: Amount = claims.iter().sum();
    if endowment < &low || endowment > &high {
        return Err(Error::WindowViolated {
            endowment: endowment.clone(),
            low,
            high,
        });
    }
    solve_capped_level(tentative, claims, endowment)
}

fn tentative_allocation(rule: &RuleHandle, hp: &HistoricalProblem) -> Result<(Vec<Amount>, Vec<Amount>)> {
    validate_historical(hp)?;
    let adjusted = aggregates(hp)?.adjusted_claims;
    let problem = ClaimsProblem::new(
        hp.problem.agents.clone(),
        adjusted.clone(),
        hp.problem.endowment.clone(),
    );
    let tentative = rule.evaluate_unchecked(&problem)?.awards;
    Ok((adjusted, tentative))
}

/// The rule `R` applied to the history-adjusted problem `(N, c~, E)`.
pub fn tentative_awards(rule: &RuleHandle, hp: &HistoricalProblem) -> Result<Vec<Amount>> {
    tentative_allocation(rule, hp).map(|(_, t)| t)
}

/// Applies the historical operator by solving for the balancing shift.
pub fn apply_historical(rule: &RuleHandle, hp: &HistoricalProblem) -> Result<HistoricalSolution> {
    let (adjusted_claims, tentative) = tentative_allocation(rule, hp)?;
    let claims = hp.claims();
    let lambda = solve_lambda(claims, &tentative, hp.endowment())?;
    let mut awards = Vec::with_capacity(claims.len());
    let mut satiated = Vec::new();
    for (i, (c, t)) in claims.iter().zip(&tentative).enumerate() {
        let shifted = t + &lambda;
        if &shifted > c {
            satiated.push(i);
            awards.push(c.clone());
        } else {
            awards.push(shifted);
        }
    }
    Ok(HistoricalSolution {
        awards: awards.into(),
        lambda,
        tentative,
        adjusted_claims,
        satiated,
    })
}

/// Applies the historical operator through staged satiation.
///
/// Stage 1 satiates every agent whose tentative award exceeds the claim and
/// collects the excess; the excess is split equally among the agents not yet
/// satiated, which may push further agents over their claims, and so on
/// until a stage satiates nobody.
pub fn apply_historical_iterative(
    rule: &RuleHandle,
    hp: &HistoricalProblem,
) -> Result<(HistoricalSolution, IterativeTrace)> {
    let (adjusted_claims, tentative) = tentative_allocation(rule, hp)?;
    let claims = hp.claims();
    let n = claims.len();

    let mut in_final = vec![false; n];
    let mut shift = Amount::zero();
    let mut stages = Vec::new();
    loop {
        let mut newly = Vec::new();
        let mut excess = Amount::zero();
        for i in (0..n).filter(|&i| !in_final[i]) {
            let over = &tentative[i] + &shift - &claims[i];
            if over.is_positive() {
                newly.push(i);
                excess += over;
            }
        }
        let done = newly.is_empty();
        for &i in &newly {
            in_final[i] = true;
        }
        stages.push(IterativeStage {
            satiated: newly,
            excess: excess.clone(),
        });
        let remaining = in_final.iter().filter(|s| !**s).count();
        if done || remaining == 0 {
            break;
        }
        shift += &excess / remaining;
    }

    let mut awards = Vec::with_capacity(n);
    for i in 0..n {
        awards.push(if in_final[i] {
            claims[i].clone()
        } else {
            &tentative[i] + &shift
        });
    }
    let final_set: Vec<usize> = (0..n).filter(|&i| in_final[i]).collect();
    let solution = HistoricalSolution {
        awards: awards.into(),
        lambda: shift,
        tentative,
        adjusted_claims,
        satiated: final_set.clone(),
    };
    Ok((solution, IterativeTrace { stages, final_set }))
}

/// `|N| = 2` with both claims below the endowment: the branch on which the
/// two independence operators depart from the historical operator.
fn two_agent_branch(hp: &HistoricalProblem) -> bool {
    let c = hp.claims();
    c.len() == 2 && c[0].max_ref(&c[1]) < hp.endowment()
}

/// Honours agent 1 in full on the two-agent branch, otherwise the
/// historical operator. On the branch `max(c) < E <= c_1 + c_2` forces
/// `0 < E - c_1 <= c_2`, so the output is always a valid allocation.
pub fn gamma1(rule: &RuleHandle, hp: &HistoricalProblem) -> Result<Allocation> {
    validate_historical(hp)?;
    if two_agent_branch(hp) {
        let c1 = hp.claims()[0].clone();
        let rest = hp.endowment() - &c1;
        return Ok(vec![c1, rest].into());
    }
    Ok(apply_historical(rule, hp)?.awards)
}

/// Present-claims CEL on the two-agent branch, otherwise the historical
/// operator.
pub fn gamma2(rule: &RuleHandle, hp: &HistoricalProblem) -> Result<Allocation> {
    validate_historical(hp)?;
    if two_agent_branch(hp) {
        return Ok(cel(&hp.problem));
    }
    Ok(apply_historical(rule, hp)?.awards)
}

pub type OperatorFn = dyn Fn(&RuleHandle, &HistoricalProblem) -> Result<Allocation> + Send + Sync;

#[derive(Clone)]
pub enum OperatorKind {
    Phi,
    Gamma1,
    Gamma2,
    Custom(Arc<OperatorFn>),
}

/// A named extension operator.
#[derive(Clone)]
pub struct OperatorHandle {
    name: String,
    kind: OperatorKind,
}

impl OperatorHandle {
    pub fn phi() -> Self {
        OperatorHandle {
            name: "phi".into(),
            kind: OperatorKind::Phi,
        }
    }

    pub fn gamma1() -> Self {
        OperatorHandle {
            name: "gamma1".into(),
            kind: OperatorKind::Gamma1,
        }
    }

    pub fn gamma2() -> Self {
        OperatorHandle {
            name: "gamma2".into(),
            kind: OperatorKind::Gamma2,
        }
    }

    /// Registers a candidate operator; its outputs are validated on every
    /// call.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(&RuleHandle, &HistoricalProblem) -> Result<Allocation> + Send + Sync + 'static,
    ) -> Self {
        OperatorHandle {
            name: name.into(),
            kind: OperatorKind::Custom(Arc::new(f)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn extend(&self, rule: &RuleHandle, hp: &HistoricalProblem) -> Result<Allocation> {
        match &self.kind {
            OperatorKind::Phi => Ok(apply_historical(rule, hp)?.awards),
            OperatorKind::Gamma1 => gamma1(rule, hp),
            OperatorKind::Gamma2 => gamma2(rule, hp),
            OperatorKind::Custom(f) => {
                validate_historical(hp)?;
                let x = f(rule, hp)?;
                validate_allocation(&hp.problem, &x).map_err(|source| Error::InvalidOperatorOutput {
                    operator: self.name.clone(),
                    source: Box::new(source),
                })?;
                Ok(x)
            }
        }
    }
}

impl fmt::Debug for OperatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("OperatorHandle").field(&self.name).finish()
    }
}

impl fmt::Display for OperatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for OperatorHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Self::phi()),
            "gamma1" => Ok(Self::gamma1()),
            "gamma2" => Ok(Self::gamma2()),
            _ => Err(Error::UnknownName {
                kind: "operator",
                name: s.to_owned(),
            }),
        }
    }
}
