use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::operator::{tentative_awards, OperatorHandle};
use crate::problem::{aggregates, validate_historical, AgentId, HistoricalProblem, History, PeriodRecord};
use crate::rules::RuleHandle;

use super::{AxiomId, CheckResult, Instance, Witness};

/// Number of halvings in the continuity probe.
pub const CONTINUITY_STEPS: u32 = 20;

/// What an axiom is evaluated on: a standard rule (empty histories only) or
/// the general rule an operator induces from a standard one.
#[derive(Clone, Copy)]
enum Subject<'a> {
    Standard(&'a RuleHandle),
    General(&'a RuleHandle, &'a OperatorHandle),
}

impl Subject<'_> {
    fn solve(&self, hp: &HistoricalProblem) -> Result<Vec<Amount>> {
        match self {
            Subject::Standard(rule) => Ok(rule.evaluate(&hp.problem)?.awards),
            Subject::General(rule, op) => Ok(op.extend(rule, hp)?.awards),
        }
    }
}

/// Evaluates a standard axiom on a standard rule. Every problem in the
/// instance must have an empty history.
pub fn check_standard(axiom: AxiomId, rule: &RuleHandle, instance: &Instance) -> Result<CheckResult> {
    if axiom.is_operator_axiom() {
        return Err(mismatch(axiom, "operator axioms are checked against an operator"));
    }
    if instance.problems().iter().any(|p| !p.history.is_empty()) {
        return Err(mismatch(axiom, "standard axioms take problems without history"));
    }
    check_with(axiom, Subject::Standard(rule), instance)
}

/// Evaluates the general version of `axiom` on the rule `op` induces from
/// `rule`. Operator axioms are delegated to [`check_operator_axiom`].
pub fn check_general(
    axiom: AxiomId,
    rule: &RuleHandle,
    op: &OperatorHandle,
    instance: &Instance,
) -> Result<CheckResult> {
    if axiom.is_operator_axiom() {
        return match instance {
            Instance::Single { problem } => check_operator_axiom(axiom, rule, op, problem),
            _ => Err(signature_error(axiom, instance)),
        };
    }
    check_with(axiom, Subject::General(rule, op), instance)
}

/// Present boundedness, balanced treatment and non-arbitrariness of `op`
/// at `hp`, measured against the tentative awards `R(N, c~, E)`.
pub fn check_operator_axiom(
    axiom: AxiomId,
    rule: &RuleHandle,
    op: &OperatorHandle,
    hp: &HistoricalProblem,
) -> Result<CheckResult> {
    if !axiom.is_operator_axiom() {
        return Err(mismatch(axiom, "not an operator axiom"));
    }
    validate_historical(hp)?;
    let t = tentative_awards(rule, hp)?;
    let x = op.extend(rule, hp)?.awards;
    let c = hp.claims();
    let ids = &hp.problem.agents;
    let instance = || Instance::Single { problem: hp.clone() };
    let margin = |i: usize| &x[i] - &t[i];
    let rationed: Vec<usize> = (0..c.len()).filter(|&i| x[i] < c[i]).collect();

    match axiom {
        AxiomId::PresentBoundedness => {
            for i in 0..c.len() {
                if t[i] >= c[i] && x[i] != c[i] {
                    return Ok(CheckResult::violated(
                        axiom,
                        Witness {
                            instance: instance(),
                            agents: vec![ids[i]],
                            relation: "award = claim".into(),
                            lhs: vec![x[i].clone()],
                            rhs: vec![c[i].clone()],
                        },
                    ));
                }
            }
        }
        AxiomId::BalancedTreatment => {
            if let Some((&first, rest)) = rationed.split_first() {
                for &j in rest {
                    if margin(j) != margin(first) {
                        return Ok(CheckResult::violated(
                            axiom,
                            Witness {
                                instance: instance(),
                                agents: vec![ids[first], ids[j]],
                                relation: "award_i - tentative_i = award_j - tentative_j".into(),
                                lhs: vec![margin(first)],
                                rhs: vec![margin(j)],
                            },
                        ));
                    }
                }
            }
        }
        AxiomId::NonArbitrariness => {
            for i in (0..c.len()).filter(|&i| x[i] == c[i] && t[i] < c[i]) {
                for &j in &rationed {
                    if margin(i) > margin(j) {
                        return Ok(CheckResult::violated(
                            axiom,
                            Witness {
                                instance: instance(),
                                agents: vec![ids[i], ids[j]],
                                relation: "award_i - tentative_i <= award_j - tentative_j".into(),
                                lhs: vec![margin(i)],
                                rhs: vec![margin(j)],
                            },
                        ));
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(CheckResult::holds(axiom))
}

fn check_with(axiom: AxiomId, subject: Subject<'_>, instance: &Instance) -> Result<CheckResult> {
    if instance.kind() != axiom.signature() {
        return Err(signature_error(axiom, instance));
    }
    for p in instance.problems() {
        validate_historical(p)?;
    }
    let found = match (axiom, instance) {
        (AxiomId::EqualTreatment, Instance::Single { problem }) => equal_treatment(subject, problem)?,
        (AxiomId::OrderGains, Instance::Single { problem }) => order(subject, problem, false)?,
        (AxiomId::OrderLosses, Instance::Single { problem }) => order(subject, problem, true)?,
        (AxiomId::SelfDuality, Instance::Single { problem }) => self_duality(subject, problem)?,
        (AxiomId::Securement, Instance::Single { problem }) => securement(subject, problem)?,
        (AxiomId::Anonymity, Instance::Permuted { problem, permutation }) => {
            anonymity(axiom, subject, problem, permutation)?
        }
        (AxiomId::ScaleInvariance, Instance::Scaled { problem, factor }) => {
            scale_invariance(axiom, subject, problem, factor)?
        }
        (AxiomId::CompositionUp, Instance::Split { problem, first, second }) => {
            composition_up(axiom, subject, problem, first, second)?
        }
        (AxiomId::CompositionDown, Instance::LargerEndowment { problem, larger }) => {
            composition_down(axiom, subject, problem, larger)?
        }
        (AxiomId::ResourceMonotonicity, Instance::LargerEndowment { problem, larger }) => {
            resource_monotonicity(axiom, subject, problem, larger)?
        }
        (
            AxiomId::ClaimsMonotonicity,
            Instance::ClaimIncrease {
                problem,
                agent,
                new_claim,
            },
        ) => claims_monotonicity(axiom, subject, problem, *agent, new_claim)?,
        (AxiomId::PopulationMonotonicity, Instance::Enlarged { problem, enlarged }) => {
            population_monotonicity(axiom, subject, problem, enlarged)?
        }
        (AxiomId::Consistency, Instance::Subgroup { problem, subgroup }) => {
            consistency(axiom, subject, problem, subgroup)?
        }
        (AxiomId::ContinuitySampled, Instance::Perturbed { problem, toward }) => {
            continuity(axiom, subject, problem, toward)?
        }
        _ => unreachable!("signature checked above"),
    };
    Ok(match found {
        None => CheckResult::holds(axiom),
        Some(f) => CheckResult::violated(
            axiom,
            Witness {
                instance: instance.clone(),
                agents: f.agents,
                relation: f.relation.into(),
                lhs: f.lhs,
                rhs: f.rhs,
            },
        ),
    })
}

/// A failed comparison, before the instance is attached.
struct Failure {
    agents: Vec<AgentId>,
    relation: &'static str,
    lhs: Vec<Amount>,
    rhs: Vec<Amount>,
}

fn mismatch(axiom: AxiomId, detail: &str) -> Error {
    Error::SignatureMismatch {
        axiom: axiom.name(),
        expected: axiom.signature().name(),
        detail: detail.to_owned(),
    }
}

fn signature_error(axiom: AxiomId, instance: &Instance) -> Error {
    mismatch(axiom, &format!("got a {} instance", instance.kind().name()))
}

fn indices_of(axiom: AxiomId, hp: &HistoricalProblem, agents: &[AgentId]) -> Result<Vec<usize>> {
    agents
        .iter()
        .map(|&a| {
            hp.problem
                .index_of(a)
                .ok_or_else(|| mismatch(axiom, &format!("agent {a} is not in the problem")))
        })
        .collect()
}

fn vector_failure(ids: &[AgentId], relation: &'static str, lhs: Vec<Amount>, rhs: Vec<Amount>) -> Failure {
    Failure {
        agents: ids.to_vec(),
        relation,
        lhs,
        rhs,
    }
}

fn equal_treatment(s: Subject<'_>, hp: &HistoricalProblem) -> Result<Option<Failure>> {
    let agg = aggregates(hp)?;
    let x = s.solve(hp)?;
    let c = hp.claims();
    let n = c.len();
    for i in 0..n {
        for j in i + 1..n {
            let equals = c[i] == c[j]
                && agg.delta_claims[i] == agg.delta_claims[j]
                && agg.delta_awards[i] == agg.delta_awards[j];
            if equals && x[i] != x[j] {
                return Ok(Some(Failure {
                    agents: vec![hp.problem.agents[i], hp.problem.agents[j]],
                    relation: "award_i = award_j",
                    lhs: vec![x[i].clone()],
                    rhs: vec![x[j].clone()],
                }));
            }
        }
    }
    Ok(None)
}

fn order(s: Subject<'_>, hp: &HistoricalProblem, losses: bool) -> Result<Option<Failure>> {
    let agg = aggregates(hp)?;
    let x = s.solve(hp)?;
    let c = hp.claims();
    let n = c.len();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let dominates = c[i] >= c[j]
                && agg.delta_claims[i] >= agg.delta_claims[j]
                && agg.delta_awards[i] <= agg.delta_awards[j];
            if !dominates {
                continue;
            }
            let (lhs, rhs, relation) = if losses {
                (&c[i] - &x[i], &c[j] - &x[j], "claim_i - award_i >= claim_j - award_j")
            } else {
                (x[i].clone(), x[j].clone(), "award_i >= award_j")
            };
            if lhs < rhs {
                return Ok(Some(Failure {
                    agents: vec![hp.problem.agents[i], hp.problem.agents[j]],
                    relation,
                    lhs: vec![lhs],
                    rhs: vec![rhs],
                }));
            }
        }
    }
    Ok(None)
}

fn self_duality(s: Subject<'_>, hp: &HistoricalProblem) -> Result<Option<Failure>> {
    let x = s.solve(hp)?;
    let c = hp.claims();
    let losses = hp.problem.total_claims() - hp.endowment();
    let dual = s.solve(&hp.with_endowment(losses))?;
    let complement: Vec<Amount> = c.iter().zip(&dual).map(|(c, y)| c - y).collect();
    Ok((x != complement).then(|| vector_failure(&hp.problem.agents, "S(c, E) = c - S(c, C - E)", x, complement)))
}

fn securement(s: Subject<'_>, hp: &HistoricalProblem) -> Result<Option<Failure>> {
    let x = s.solve(hp)?;
    let n = hp.len();
    for (i, c) in hp.claims().iter().enumerate() {
        let floor = c.min_ref(hp.endowment()) / n;
        if x[i] < floor {
            return Ok(Some(Failure {
                agents: vec![hp.problem.agents[i]],
                relation: "award_i >= min(claim_i, E) / n",
                lhs: vec![x[i].clone()],
                rhs: vec![floor],
            }));
        }
    }
    Ok(None)
}

fn anonymity(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    permutation: &[AgentId],
) -> Result<Option<Failure>> {
    let perm = indices_of(axiom, hp, permutation)?;
    let mut sorted = perm.clone();
    sorted.sort_unstable();
    if sorted != (0..hp.len()).collect::<Vec<_>>() {
        return Err(mismatch(axiom, "permutation must list every agent once"));
    }
    let x = s.solve(hp)?;
    let permuted = s.solve(&hp.permute(&perm))?;
    let expected: Vec<Amount> = perm.iter().map(|&k| x[k].clone()).collect();
    Ok((permuted != expected).then(|| {
        vector_failure(
            &hp.problem.agents,
            "S(pi(problem)) = pi(S(problem))",
            permuted,
            expected,
        )
    }))
}

fn scale_invariance(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    factor: &Amount,
) -> Result<Option<Failure>> {
    if !factor.is_positive() {
        return Err(mismatch(axiom, "scale factor must be positive"));
    }
    let scaled_first: Vec<Amount> = s.solve(hp)?.iter().map(|v| v * factor).collect();
    let solved_scaled = s.solve(&hp.scale(factor))?;
    Ok((solved_scaled != scaled_first).then(|| {
        vector_failure(
            &hp.problem.agents,
            "S(rho * problem) = rho * S(problem)",
            solved_scaled,
            scaled_first,
        )
    }))
}

fn composition_up(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    first: &Amount,
    second: &Amount,
) -> Result<Option<Failure>> {
    if !first.is_positive() || !second.is_positive() || &(first + second) != hp.endowment() {
        return Err(mismatch(axiom, "the endowment must split into two positive parts"));
    }
    let direct = s.solve(hp)?;
    let step1 = s.solve(&hp.with_endowment(first.clone()))?;
    let remaining: Vec<Amount> = hp.claims().iter().zip(&step1).map(|(c, y)| c - y).collect();
    let step2 = s.solve(&hp.with_claims(remaining).with_endowment(second.clone()))?;
    let composed: Vec<Amount> = step1.iter().zip(&step2).map(|(a, b)| a + b).collect();
    Ok((direct != composed).then(|| {
        vector_failure(
            &hp.problem.agents,
            "S(c, E1 + E2) = S(c, E1) + S(c - S(c, E1), E2)",
            direct,
            composed,
        )
    }))
}

fn check_larger(axiom: AxiomId, hp: &HistoricalProblem, larger: &Amount) -> Result<()> {
    if larger < hp.endowment() || larger > &hp.problem.total_claims() {
        return Err(mismatch(axiom, "the second endowment must lie in [E, sum of claims]"));
    }
    Ok(())
}

fn composition_down(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    larger: &Amount,
) -> Result<Option<Failure>> {
    check_larger(axiom, hp, larger)?;
    let direct = s.solve(hp)?;
    let over = s.solve(&hp.with_endowment(larger.clone()))?;
    let two_step = s.solve(&hp.with_claims(over))?;
    Ok((direct != two_step).then(|| vector_failure(&hp.problem.agents, "S(c, E) = S(S(c, E'), E)", direct, two_step)))
}

fn resource_monotonicity(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    larger: &Amount,
) -> Result<Option<Failure>> {
    check_larger(axiom, hp, larger)?;
    let x = s.solve(hp)?;
    let y = s.solve(&hp.with_endowment(larger.clone()))?;
    Ok((0..x.len()).find(|&i| x[i] > y[i]).map(|i| Failure {
        agents: vec![hp.problem.agents[i]],
        relation: "S_i(c, E) <= S_i(c, E')",
        lhs: vec![x[i].clone()],
        rhs: vec![y[i].clone()],
    }))
}

fn claims_monotonicity(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    agent: AgentId,
    new_claim: &Amount,
) -> Result<Option<Failure>> {
    let i = indices_of(axiom, hp, &[agent])?[0];
    if new_claim < &hp.claims()[i] {
        return Err(mismatch(axiom, "the new claim must not be smaller"));
    }
    let x = s.solve(hp)?;
    let mut claims = hp.claims().to_vec();
    claims[i] = new_claim.clone();
    let y = s.solve(&hp.with_claims(claims))?;
    Ok((y[i] < x[i]).then(|| Failure {
        agents: vec![agent],
        relation: "S_i(c', E) >= S_i(c, E)",
        lhs: vec![y[i].clone()],
        rhs: vec![x[i].clone()],
    }))
}

fn population_monotonicity(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    enlarged: &HistoricalProblem,
) -> Result<Option<Failure>> {
    let idx = indices_of(axiom, enlarged, &hp.problem.agents)?;
    if enlarged.endowment() != hp.endowment() || enlarged.history.len() != hp.history.len() {
        return Err(mismatch(
            axiom,
            "the enlarged problem must keep the endowment and history length",
        ));
    }
    let restricted = enlarged.select(&idx);
    if restricted.claims() != hp.claims() || restricted.history != hp.history {
        return Err(mismatch(axiom, "claims and history must agree on the common agents"));
    }
    let x = s.solve(hp)?;
    let y = s.solve(enlarged)?;
    Ok((0..x.len()).find(|&k| y[idx[k]] > x[k]).map(|k| Failure {
        agents: vec![hp.problem.agents[k]],
        relation: "S_i(enlarged) <= S_i(problem)",
        lhs: vec![y[idx[k]].clone()],
        rhs: vec![x[k].clone()],
    }))
}

fn consistency(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    subgroup: &[AgentId],
) -> Result<Option<Failure>> {
    let idx = indices_of(axiom, hp, subgroup)?;
    let mut distinct = idx.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if idx.is_empty() || distinct.len() != idx.len() || idx.len() >= hp.len() {
        return Err(mismatch(axiom, "the subgroup must be a nonempty proper subset"));
    }
    let x = s.solve(hp)?;
    let restricted: Vec<Amount> = idx.iter().map(|&i| x[i].clone()).collect();
    let sub = hp.select(&idx);
    if !sub.problem.total_claims().is_positive() {
        // Every subgroup award is then zero on both sides.
        return Ok(None);
    }
    let sub = sub.with_endowment(restricted.iter().sum());
    let resolved = s.solve(&sub)?;
    Ok((resolved != restricted)
        .then(|| vector_failure(subgroup, "S(M, c_M, E_M, h_M) = S_M(N, c, E, h)", resolved, restricted)))
}

/// `p + w (q - p)` on claims, endowment and every past entry.
fn interpolate(p: &HistoricalProblem, q: &HistoricalProblem, w: &Amount) -> HistoricalProblem {
    let mix = |a: &[Amount], b: &[Amount]| -> Vec<Amount> { a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect() };
    let periods = p
        .history
        .periods
        .iter()
        .zip(&q.history.periods)
        .map(|(a, b)| PeriodRecord::new(mix(&a.claims, &b.claims), mix(&a.allocations, &b.allocations)))
        .collect();
    let mut out = p.with_claims(mix(p.claims(), q.claims()));
    out.problem.endowment = p.endowment() + w * (q.endowment() - p.endowment());
    out.history = History::new(periods);
    out
}

/// Sampled convergence along `p_k = p + 2^-k (q - p)`: the awards at
/// `p_K` must lie within `(1 + C_p + C_q) 2^(-K/2)` of the awards at `p`.
fn continuity(
    axiom: AxiomId,
    s: Subject<'_>,
    hp: &HistoricalProblem,
    toward: &HistoricalProblem,
) -> Result<Option<Failure>> {
    if toward.problem.agents != hp.problem.agents || toward.history.len() != hp.history.len() {
        return Err(mismatch(axiom, "both problems need the same agents and history length"));
    }
    let w = Amount::new(1, 1 << CONTINUITY_STEPS);
    let near = interpolate(hp, toward, &w);
    let x = s.solve(hp)?;
    let y = s.solve(&near)?;
    let distance = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).max().unwrap_or_default();
    let bound = (Amount::one() + hp.problem.total_claims() + toward.problem.total_claims())
        * Amount::new(1, 1 << (CONTINUITY_STEPS / 2));
    Ok((distance > bound).then(|| Failure {
        agents: hp.problem.agents.clone(),
        relation: "max_i |S_i(p_K) - S_i(p)| <= (1 + C_p + C_q) 2^(-K/2)",
        lhs: vec![distance],
        rhs: vec![bound],
    }))
}
