use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::Result;
use crate::operator::OperatorHandle;
use crate::problem::{natural_agents, AgentId, ClaimsProblem, HistoricalProblem, History, PeriodRecord};
use crate::rules::RuleHandle;

use super::{check_general, check_standard, AxiomId, CheckResult, Instance, InstanceKind};

const MAX_DENOMINATOR: i64 = 12;
const MAX_CLAIM: i64 = 10;

/// Seed of trial `trial` in a search seeded with `seed`; trials draw from
/// independent streams so the outcome does not depend on scheduling.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random valid instances: 2 to 6 agents, claims in `[0, 10]` with
/// denominators up to 12, frequent ties, histories of length 0 to 3 and
/// endowments spread over `[0, C]` including both ends.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    with_history: bool,
}

impl InstanceGenerator {
    pub fn new(seed: u64, with_history: bool) -> Self {
        InstanceGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            with_history,
        }
    }

    /// A rational in `[0, max]`, integral half of the time.
    fn rational(&mut self, max: i64) -> Amount {
        let d = if self.rng.random_bool(0.5) {
            1
        } else {
            self.rng.random_range(2..=MAX_DENOMINATOR)
        };
        Amount::new(self.rng.random_range(0..=max * d), d)
    }

    /// A rational strictly inside `(0, 1)`.
    fn fraction(&mut self) -> Amount {
        let d = self.rng.random_range(2..=MAX_DENOMINATOR);
        Amount::new(self.rng.random_range(1..d), d)
    }

    fn claim(&mut self) -> Amount {
        if self.rng.random_bool(0.1) {
            Amount::zero()
        } else {
            self.rational(MAX_CLAIM)
        }
    }

    fn period(&mut self, n: usize) -> PeriodRecord {
        let claims: Vec<Amount> = (0..n).map(|_| self.claim()).collect();
        let allocations = claims
            .iter()
            .map(|c| {
                let d = self.rng.random_range(1..=MAX_DENOMINATOR);
                c * &Amount::new(self.rng.random_range(0..=d), d)
            })
            .collect();
        PeriodRecord::new(claims, allocations)
    }

    fn endowment(&mut self, total: &Amount) -> Amount {
        let roll: f64 = self.rng.random();
        if roll < 0.05 {
            Amount::zero()
        } else if roll < 0.1 {
            total.clone()
        } else {
            total * &self.fraction()
        }
    }

    /// Claims and history for `n` agents, with some agents copying another
    /// agent's data so that equal-treatment and order premises bind.
    fn columns(&mut self, n: usize, periods: usize) -> (Vec<Amount>, History) {
        let mut claims: Vec<Amount> = (0..n).map(|_| self.claim()).collect();
        let mut history: Vec<PeriodRecord> = (0..periods).map(|_| self.period(n)).collect();
        for i in 1..n {
            if self.rng.random_bool(0.3) {
                let j = self.rng.random_range(0..i);
                let partial = self.rng.random_bool(0.3);
                claims[i] = claims[j].clone();
                for p in &mut history {
                    if partial && self.rng.random_bool(0.5) {
                        continue;
                    }
                    p.claims[i] = p.claims[j].clone();
                    p.allocations[i] = p.allocations[j].clone();
                }
            }
        }
        if claims.iter().all(Amount::is_zero) {
            claims[0] = Amount::one();
        }
        (claims, History::new(history))
    }

    fn history_len(&mut self) -> usize {
        if self.with_history {
            self.rng.random_range(0..=3)
        } else {
            0
        }
    }

    pub fn problem(&mut self) -> HistoricalProblem {
        let n = self.rng.random_range(2..=6);
        let periods = self.history_len();
        self.problem_shaped(n, periods)
    }

    fn problem_shaped(&mut self, n: usize, periods: usize) -> HistoricalProblem {
        let (claims, history) = self.columns(n, periods);
        let total: Amount = claims.iter().sum();
        let endowment = self.endowment(&total);
        HistoricalProblem::new(ClaimsProblem::with_natural_agents(claims, endowment), history)
    }

    /// An instance of the given shape around a fresh random problem.
    pub fn instance(&mut self, kind: InstanceKind) -> Instance {
        let mut problem = self.problem();
        let n = problem.len();
        let total = problem.problem.total_claims();
        match kind {
            InstanceKind::Single => Instance::Single { problem },
            InstanceKind::Permuted => {
                let mut permutation = problem.problem.agents.clone();
                permutation.shuffle(&mut self.rng);
                Instance::Permuted { problem, permutation }
            }
            InstanceKind::Scaled => {
                let factor = Amount::new(
                    self.rng.random_range(1..=MAX_DENOMINATOR),
                    self.rng.random_range(1..=MAX_DENOMINATOR),
                );
                Instance::Scaled { problem, factor }
            }
            InstanceKind::Split => {
                if problem.endowment().is_zero() {
                    problem.problem.endowment = &total * &self.fraction();
                }
                let first = problem.endowment() * &self.fraction();
                let second = problem.endowment() - &first;
                Instance::Split { problem, first, second }
            }
            InstanceKind::LargerEndowment => {
                if problem.endowment() == &total {
                    problem.problem.endowment = &total * &self.fraction();
                }
                let larger = if self.rng.random_bool(0.2) {
                    total.clone()
                } else {
                    problem.endowment() + (&total - problem.endowment()) * self.fraction()
                };
                Instance::LargerEndowment { problem, larger }
            }
            InstanceKind::ClaimIncrease => {
                let i = self.rng.random_range(0..n);
                let agent = problem.problem.agents[i];
                let new_claim = &problem.claims()[i] + Amount::new(self.rng.random_range(1..=60), MAX_DENOMINATOR);
                Instance::ClaimIncrease {
                    problem,
                    agent,
                    new_claim,
                }
            }
            InstanceKind::Enlarged => {
                let extra = self.rng.random_range(1..=2);
                let (claims, history) = self.columns(extra, problem.history.len());
                let mut enlarged = problem.clone();
                enlarged.problem.agents = natural_agents(n + extra);
                enlarged.problem.claims.extend(claims);
                for (p, q) in enlarged.history.periods.iter_mut().zip(history.periods) {
                    p.claims.extend(q.claims);
                    p.allocations.extend(q.allocations);
                }
                Instance::Enlarged { problem, enlarged }
            }
            InstanceKind::Subgroup => {
                let mut ids: Vec<AgentId> = problem.problem.agents.clone();
                ids.shuffle(&mut self.rng);
                ids.truncate(self.rng.random_range(1..n));
                Instance::Subgroup { problem, subgroup: ids }
            }
            InstanceKind::Perturbed => {
                let toward = self.problem_shaped(n, problem.history.len());
                Instance::Perturbed { problem, toward }
            }
        }
    }
}

/// Outcome of a randomized search: the first violation found, or `holds`
/// after the full budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub axiom: AxiomId,
    pub rule: String,
    pub operator: Option<String>,
    pub budget: u64,
    pub seed: u64,
    pub trials_run: u64,
    pub result: CheckResult,
}

/// Runs up to `budget` random trials of `axiom` on `rule` (standard version
/// when `op` is `None`, general version of `op(rule)` otherwise). The result
/// depends only on the arguments, not on thread scheduling.
pub fn search_counterexample(
    axiom: AxiomId,
    rule: &RuleHandle,
    op: Option<&OperatorHandle>,
    budget: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    let run = |trial: u64| -> Option<Result<(u64, CheckResult)>> {
        let mut generator = InstanceGenerator::new(trial_seed(seed, trial), op.is_some());
        let instance = generator.instance(axiom.signature());
        let checked = match op {
            Some(op) => check_general(axiom, rule, op, &instance),
            None => check_standard(axiom, rule, &instance),
        };
        match checked {
            Ok(r) if r.is_violated() => Some(Ok((trial, r))),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        }
    };
    let first = (0..budget).into_par_iter().find_map_first(run).transpose()?;
    let (trials_run, result) = match first {
        Some((trial, r)) => (trial + 1, r),
        None => (budget, CheckResult::holds(axiom)),
    };
    Ok(SearchOutcome {
        axiom,
        rule: rule.name().to_owned(),
        operator: op.map(|o| o.name().to_owned()),
        budget,
        seed,
        trials_run,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::Verdict;
    use crate::problem::validate_historical;

    #[test]
    fn generated_instances_are_valid() {
        let mut g = InstanceGenerator::new(7, true);
        for _ in 0..500 {
            let hp = g.problem();
            validate_historical(&hp).unwrap();
            assert!((2..=6).contains(&hp.len()));
            assert!(hp.history.len() <= 3);
        }
        let mut g = InstanceGenerator::new(7, false);
        assert!((0..100).all(|_| g.problem().history.is_empty()));
    }

    #[test]
    fn generated_instances_fit_their_checkers() {
        let phi = OperatorHandle::phi();
        let rule = RuleHandle::cea();
        for axiom in AxiomId::ALL {
            let mut g = InstanceGenerator::new(11, true);
            for _ in 0..50 {
                let inst = g.instance(axiom.signature());
                check_general(axiom, &rule, &phi, &inst).unwrap();
            }
        }
    }

    #[test]
    fn search_is_deterministic() {
        let rule = RuleHandle::proportional();
        let phi = OperatorHandle::phi();
        let a = search_counterexample(AxiomId::SelfDuality, &rule, Some(&phi), 2000, 5).unwrap();
        let b = search_counterexample(AxiomId::SelfDuality, &rule, Some(&phi), 2000, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.result.verdict, Verdict::Violated);
        let w = a.result.witness.as_ref().unwrap();
        let replay = check_general(AxiomId::SelfDuality, &rule, &phi, &w.instance).unwrap();
        assert_eq!(replay, a.result);
    }

    #[test]
    fn standard_search_on_classical_rules() {
        for rule in RuleHandle::classical() {
            let r = search_counterexample(AxiomId::ResourceMonotonicity, &rule, None, 300, 1).unwrap();
            assert_eq!(r.result.verdict, Verdict::Holds);
            assert_eq!(r.trials_run, 300);
        }
        let r = search_counterexample(AxiomId::SelfDuality, &RuleHandle::cea(), None, 300, 1).unwrap();
        assert_eq!(r.result.verdict, Verdict::Violated);
    }
}
