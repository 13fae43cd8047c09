//! Standard division rules on one-shot claims problems.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::problem::{validate_allocation, validate_problem, AgentId, Allocation, ClaimsProblem};
use crate::solver::{solve_capped_level, solve_loss_level};

/// Awards proportional to claims: `c_i * E / C`.
pub fn proportional(p: &ClaimsProblem) -> Allocation {
    let total = p.total_claims();
    let share = &p.endowment / &total;
    p.claims.iter().map(|c| c * &share).collect::<Vec<_>>().into()
}

/// Constrained equal awards: `min(c_i, delta)`.
pub fn cea(p: &ClaimsProblem) -> Allocation {
    cea_on(&p.claims, &p.endowment).into()
}

fn cea_on(claims: &[Amount], endowment: &Amount) -> Vec<Amount> {
    let zeros = vec![Amount::zero(); claims.len()];
    let delta = solve_capped_level(&zeros, claims, endowment).expect("endowment within [0, sum of claims]");
    claims.iter().map(|c| c.min_ref(&delta).clone()).collect()
}

/// Constrained equal losses: `max(0, c_i - delta)`.
pub fn cel(p: &ClaimsProblem) -> Allocation {
    cel_on(&p.claims, &p.endowment).into()
}

fn cel_on(claims: &[Amount], endowment: &Amount) -> Vec<Amount> {
    let delta = solve_loss_level(claims, endowment).expect("endowment within [0, sum of claims]");
    claims
        .iter()
        .map(|c| if c > &delta { c - &delta } else { Amount::zero() })
        .collect()
}

/// Lower Talmud branch: constrained equal awards on half-claims. Valid for
/// `E <= C/2`.
pub fn talmud_lower(claims: &[Amount], endowment: &Amount) -> Vec<Amount> {
    let halves: Vec<Amount> = claims.iter().map(Amount::half).collect();
    cea_on(&halves, endowment)
}

/// Upper Talmud branch: `max(c_i / 2, c_i - gamma)`. Valid for `E >= C/2`.
pub fn talmud_upper(claims: &[Amount], endowment: &Amount) -> Vec<Amount> {
    let halves: Vec<Amount> = claims.iter().map(Amount::half).collect();
    let half_total: Amount = halves.iter().sum();
    let losses = cel_on(&halves, &(endowment - &half_total));
    halves.iter().zip(losses).map(|(h, l)| h + l).collect()
}

/// The Talmud rule: constrained equal awards on half-claims up to `C/2`,
/// then constrained equal losses on the other halves.
pub fn talmud(p: &ClaimsProblem) -> Allocation {
    let half_total = p.total_claims().half();
    if p.endowment <= half_total {
        talmud_lower(&p.claims, &p.endowment).into()
    } else {
        talmud_upper(&p.claims, &p.endowment).into()
    }
}

/// Positions of `p`'s agents in service order: agents listed in `order`
/// first, in that order, then any unlisted agents by ascending identifier.
fn service_order(order: &[AgentId], p: &ClaimsProblem) -> Vec<usize> {
    let mut positions: Vec<usize> = order.iter().filter_map(|&a| p.index_of(a)).collect();
    let mut rest: Vec<usize> = (0..p.len()).filter(|i| !positions.contains(i)).collect();
    rest.sort_by_key(|&i| p.agents[i]);
    positions.extend(rest);
    positions
}

/// Priority rule: claims are honoured in full, one agent at a time, until
/// the endowment runs out.
pub fn priority(order: &[AgentId], p: &ClaimsProblem) -> Allocation {
    let mut awards = vec![Amount::zero(); p.len()];
    let mut remaining = p.endowment.clone();
    for i in service_order(order, p) {
        if !remaining.is_positive() {
            break;
        }
        let award = p.claims[i].min_ref(&remaining).clone();
        remaining -= &award;
        awards[i] = award;
    }
    awards.into()
}

/// The claims-monotonic but history-sensitive priority rule used as a
/// counterexample fixture. On `N = {1, 2, 3}` it serves `1, 3, 2` when both
/// `c_1 > E` and `c_2 > E`, and `3, 1, 2` otherwise; on any other agent set
/// it is the natural-order priority rule.
pub fn conditional_priority_fixture(p: &ClaimsProblem) -> Allocation {
    let mut ids: Vec<AgentId> = p.agents.clone();
    ids.sort();
    if ids != [AgentId(1), AgentId(2), AgentId(3)] {
        return priority(&[], p);
    }
    let claim = |id| &p.claims[p.index_of(AgentId(id)).expect("agent present")];
    let order = if claim(1) > &p.endowment && claim(2) > &p.endowment {
        [AgentId(1), AgentId(3), AgentId(2)]
    } else {
        [AgentId(3), AgentId(1), AgentId(2)]
    };
    priority(&order, p)
}

pub type RuleFn = dyn Fn(&ClaimsProblem) -> Allocation + Send + Sync;

#[derive(Clone)]
pub enum RuleKind {
    Proportional,
    Cea,
    Cel,
    Talmud,
    Priority(Vec<AgentId>),
    ConditionalPriority,
    Custom(Arc<RuleFn>),
}

/// A named, evaluable standard rule.
#[derive(Clone)]
pub struct RuleHandle {
    name: String,
    kind: RuleKind,
}

impl RuleHandle {
    pub fn proportional() -> Self {
        Self::builtin("prop", RuleKind::Proportional)
    }

    pub fn cea() -> Self {
        Self::builtin("cea", RuleKind::Cea)
    }

    pub fn cel() -> Self {
        Self::builtin("cel", RuleKind::Cel)
    }

    pub fn talmud() -> Self {
        Self::builtin("talmud", RuleKind::Talmud)
    }

    pub fn priority(order: Vec<AgentId>) -> Self {
        let ids: Vec<String> = order.iter().map(|a| a.to_string()).collect();
        RuleHandle {
            name: format!("priority:{}", ids.join(",")),
            kind: RuleKind::Priority(order),
        }
    }

    pub fn conditional_priority_fixture() -> Self {
        Self::builtin("fixture:r-dagger", RuleKind::ConditionalPriority)
    }

    /// Registers an arbitrary rule. Its outputs are validated on every call.
    pub fn custom(name: impl Into<String>, f: impl Fn(&ClaimsProblem) -> Allocation + Send + Sync + 'static) -> Self {
        RuleHandle {
            name: name.into(),
            kind: RuleKind::Custom(Arc::new(f)),
        }
    }

    /// The proportional, CEA, CEL and Talmud rules.
    pub fn classical() -> [RuleHandle; 4] {
        [Self::proportional(), Self::cea(), Self::cel(), Self::talmud()]
    }

    fn builtin(name: &str, kind: RuleKind) -> Self {
        RuleHandle {
            name: name.to_owned(),
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, RuleKind::Custom(_))
    }

    /// Validates `p` and applies the rule.
    pub fn evaluate(&self, p: &ClaimsProblem) -> Result<Allocation> {
        validate_problem(p)?;
        self.evaluate_unchecked(p)
    }

    /// Applies the rule to a problem the caller has already validated.
    pub(crate) fn evaluate_unchecked(&self, p: &ClaimsProblem) -> Result<Allocation> {
        let x = match &self.kind {
            RuleKind::Proportional => proportional(p),
            RuleKind::Cea => cea(p),
            RuleKind::Cel => cel(p),
            RuleKind::Talmud => talmud(p),
            RuleKind::Priority(order) => priority(order, p),
            RuleKind::ConditionalPriority => conditional_priority_fixture(p),
            RuleKind::Custom(f) => {
                let x = f(p);
                validate_allocation(p, &x).map_err(|source| Error::InvalidRuleOutput {
                    rule: self.name.clone(),
                    source: Box::new(source),
                })?;
                return Ok(x);
            }
        };
        debug_assert_eq!(validate_allocation(p, &x), Ok(()), "rule {}", self.name);
        Ok(x)
    }
}

impl fmt::Debug for RuleHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("RuleHandle").field(&self.name).finish()
    }
}

impl fmt::Display for RuleHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for RuleHandle {
    type Err = Error;

    /// Accepts `prop`, `cea`, `cel`, `talmud`, `priority:<ids>` and
    /// `fixture:r-dagger`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownName {
            kind: "rule",
            name: s.to_owned(),
        };
        Ok(match s {
            "prop" => Self::proportional(),
            "cea" => Self::cea(),
            "cel" => Self::cel(),
            "talmud" => Self::talmud(),
            "fixture:r-dagger" => Self::conditional_priority_fixture(),
            _ => {
                let list = s.strip_prefix("priority:").ok_or_else(unknown)?;
                let mut order = Vec::new();
                for item in list.split(',') {
                    let id: u64 = item.trim().parse().map_err(|_| unknown())?;
                    if id == 0 || order.contains(&AgentId(id)) {
                        return Err(unknown());
                    }
                    order.push(AgentId(id));
                }
                Self::priority(order)
            }
        })
    }
}
