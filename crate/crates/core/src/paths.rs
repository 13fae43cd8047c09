//! Paths of awards: the locus of awards as the endowment sweeps `[0, C]`
//! with claims held fixed.
//!
//! Exact mode emits the vertices of the polyline. For the built-in rules the
//! standard path bends only at known endowments (where an agent's claim, or
//! half-claim, becomes binding), so the rule is evaluated there and collinear
//! points are dropped. Under the historical operator the base rule runs on
//! the adjusted claims, and the clamp at present claims adds one vertex each
//! time an agent becomes satiated; those events are located exactly by
//! solving the affine balance equation on each piece of the base path.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::operator::{apply_historical, solve_lambda};
use crate::problem::{aggregates, natural_agents, validate_historical, ClaimsProblem, HistoricalProblem, History};
use crate::rules::{RuleHandle, RuleKind};

/// Default number of points in sampled mode.
pub const DEFAULT_SAMPLES: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exact,
    /// Equally spaced endowments from 0 to `C`, endpoints included.
    Samples(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwardPath {
    pub claims: Vec<Amount>,
    pub vertices: Vec<Vec<Amount>>,
}

impl AwardPath {
    /// Endowment at each vertex (the sum of its awards).
    pub fn endowments(&self) -> Vec<Amount> {
        self.vertices.iter().map(|v| v.iter().sum()).collect()
    }

    /// Linear interpolation along the polyline at endowment `e`.
    pub fn at(&self, e: &Amount) -> Option<Vec<Amount>> {
        let ends = self.endowments();
        for k in 0..ends.len() {
            if &ends[k] == e {
                return Some(self.vertices[k].clone());
            }
            if k + 1 < ends.len() && &ends[k] < e && e < &ends[k + 1] {
                let w = (e - &ends[k]) / (&ends[k + 1] - &ends[k]);
                return Some(lerp(&self.vertices[k], &self.vertices[k + 1], &w));
            }
        }
        None
    }

    /// `endowment,award_1,...,award_n` with amounts as integers or `p/q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("endowment");
        for i in 1..=self.claims.len() {
            let _ = write!(out, ",award_{i}");
        }
        out.push('\n');
        for (v, e) in self.vertices.iter().zip(self.endowments()) {
            out.push_str(&e.to_string());
            for a in v {
                let _ = write!(out, ",{a}");
            }
            out.push('\n');
        }
        out
    }
}

fn lerp(a: &[Amount], b: &[Amount], w: &Amount) -> Vec<Amount> {
    a.iter().zip(b).map(|(x, y)| x + (y - x) * w).collect()
}

/// Endowments at which the standard path of `rule` for `claims` may bend.
fn rule_kinks(rule: &RuleHandle, claims: &[Amount]) -> Result<Vec<Amount>> {
    let capped = |level: &Amount| -> Amount { claims.iter().map(|c| c.min_ref(level).clone()).sum() };
    let kinks = match rule.kind() {
        RuleKind::Proportional => Vec::new(),
        RuleKind::Cea => claims.iter().map(capped).collect(),
        RuleKind::Cel => claims
            .iter()
            .map(|level| claims.iter().filter(|c| *c > level).map(|c| c - level).sum())
            .collect(),
        RuleKind::Talmud => {
            let total: Amount = claims.iter().sum();
            let halves: Vec<Amount> = claims.iter().map(Amount::half).collect();
            let mut v = Vec::with_capacity(2 * claims.len());
            for h in &halves {
                let lower: Amount = halves.iter().map(|x| x.min_ref(h).clone()).sum();
                v.push(&total - &lower);
                v.push(lower);
            }
            v
        }
        RuleKind::Priority(order) => {
            let p = ClaimsProblem::with_natural_agents(claims.to_vec(), Amount::zero());
            let mut positions: Vec<usize> = order.iter().filter_map(|&a| p.index_of(a)).collect();
            let rest: Vec<usize> = (0..claims.len()).filter(|i| !positions.contains(i)).collect();
            positions.extend(rest);
            let mut acc = Amount::zero();
            positions
                .into_iter()
                .map(|i| {
                    acc += &claims[i];
                    acc.clone()
                })
                .collect()
        }
        RuleKind::ConditionalPriority | RuleKind::Custom(_) => {
            return Err(Error::ExactModeUnsupported {
                rule: rule.name().to_owned(),
            })
        }
    };
    Ok(kinks)
}

fn sorted_unique(mut v: Vec<Amount>) -> Vec<Amount> {
    v.sort();
    v.dedup();
    v
}

/// Standard path of awards of `rule` for `claims` (agents `1..=n`).
pub fn trace_standard(rule: &RuleHandle, claims: &[Amount], sampling: Sampling) -> Result<AwardPath> {
    trace_historical(rule, claims, &History::empty(), sampling)
}

/// Path of `E -> Phi(rule)(N, c, E, h)` for `E` in `[0, sum c]`.
pub fn trace_historical(
    rule: &RuleHandle,
    claims: &[Amount],
    history: &History,
    sampling: Sampling,
) -> Result<AwardPath> {
    let total: Amount = claims.iter().sum();
    let base = HistoricalProblem::new(
        ClaimsProblem::new(natural_agents(claims.len()), claims.to_vec(), total.clone()),
        history.clone(),
    );
    validate_historical(&base)?;
    let awards_at = |e: &Amount| -> Result<Vec<Amount>> {
        Ok(apply_historical(rule, &base.with_endowment(e.clone()))?.awards.awards)
    };

    let endowments = match sampling {
        Sampling::Samples(count) => {
            let steps = count.max(2) - 1;
            let vertices = (0..=steps)
                .map(|k| awards_at(&(&total * Amount::new(k as i64, steps as i64))))
                .collect::<Result<_>>()?;
            return Ok(AwardPath {
                claims: claims.to_vec(),
                vertices,
            });
        }
        Sampling::Exact => exact_endowments(rule, &base, &total)?,
    };

    let points: Vec<(Amount, Vec<Amount>)> = endowments
        .into_iter()
        .map(|e| awards_at(&e).map(|x| (e, x)))
        .collect::<Result<_>>()?;
    let kept = drop_collinear(points);

    for w in kept.windows(2) {
        let mid = (&w[0].0 + &w[1].0).half();
        if awards_at(&mid)? != lerp(&w[0].1, &w[1].1, &Amount::new(1, 2)) {
            return Err(Error::NonLinearPath {
                rule: rule.name().to_owned(),
                from: w[0].0.clone(),
                to: w[1].0.clone(),
            });
        }
    }

    Ok(AwardPath {
        claims: claims.to_vec(),
        vertices: kept.into_iter().map(|(_, x)| x).collect(),
    })
}

/// Base-rule kinks at the adjusted claims, plus the satiation events the
/// clamp introduces between them.
fn exact_endowments(rule: &RuleHandle, base: &HistoricalProblem, total: &Amount) -> Result<Vec<Amount>> {
    let claims = base.claims();
    let adjusted = aggregates(base)?.adjusted_claims;
    let adjusted_problem = ClaimsProblem::new(base.problem.agents.clone(), adjusted.clone(), Amount::zero());
    let tentative_at =
        |e: &Amount| -> Result<Vec<Amount>> { Ok(rule.evaluate(&adjusted_problem.with_endowment(e.clone()))?.awards) };

    let mut breaks: Vec<Amount> = rule_kinks(rule, &adjusted)?
        .into_iter()
        .filter(|e| e.is_positive() && e < total)
        .collect();
    breaks.push(Amount::zero());
    breaks.push(total.clone());
    let breaks = sorted_unique(breaks);

    let mut out = breaks.clone();
    for w in breaks.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let ta = tentative_at(a)?;
        let tb = tentative_at(b)?;
        let width = b - a;
        let slopes: Vec<Amount> = ta.iter().zip(&tb).map(|(x, y)| (y - x) / &width).collect();

        let mut cur = a.clone();
        // Each event satiates at least one more agent.
        for _ in 0..=claims.len() {
            let t: Vec<Amount> = ta.iter().zip(&slopes).map(|(x, s)| x + s * (&cur - a)).collect();
            let lambda = solve_lambda(claims, &t, &cur)?;
            let free: Vec<usize> = (0..claims.len()).filter(|&j| &t[j] + &lambda < claims[j]).collect();
            if free.is_empty() {
                break;
            }
            let free_slope: Amount = free.iter().map(|&j| &slopes[j]).sum();
            let lambda_slope = (Amount::one() - free_slope) / &Amount::from_integer(free.len() as i64);
            let next = free
                .iter()
                .filter_map(|&j| {
                    let speed = &slopes[j] + &lambda_slope;
                    speed
                        .is_positive()
                        .then(|| &cur + (&claims[j] - &t[j] - &lambda) / speed)
                })
                .filter(|e| e < b)
                .min();
            match next {
                Some(e) => {
                    out.push(e.clone());
                    cur = e;
                }
                None => break,
            }
        }
    }
    Ok(sorted_unique(out))
}

fn drop_collinear(points: Vec<(Amount, Vec<Amount>)>) -> Vec<(Amount, Vec<Amount>)> {
    let mut kept: Vec<(Amount, Vec<Amount>)> = Vec::with_capacity(points.len());
    let mut iter = points.into_iter().peekable();
    while let Some(point) = iter.next() {
        if let (Some(last), Some(next)) = (kept.last(), iter.peek()) {
            let w = (&point.0 - &last.0) / (&next.0 - &last.0);
            if lerp(&last.1, &next.1, &w) == point.1 {
                continue;
            }
        }
        kept.push(point);
    }
    kept
}
