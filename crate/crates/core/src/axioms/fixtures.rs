//! Worked counterexamples for the axioms the historical operator does not
//! preserve, and the two instances separating the operator axioms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amount::{amt, amts, Amount};
use crate::error::Result;
use crate::operator::{apply_historical, tentative_awards, OperatorHandle};
use crate::problem::{AgentId, ClaimsProblem, HistoricalProblem, History, PeriodRecord};
use crate::rules::RuleHandle;

use super::{check_general, check_operator_axiom, AxiomId, Instance, Verdict, Witness};

/// One expected vector against the value computed now.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureComparison {
    pub fixture: String,
    pub quantity: String,
    pub expected: Vec<Amount>,
    pub computed: Vec<Amount>,
    pub matches: bool,
}

impl FixtureComparison {
    /// `fixture/quantity`, the key used by [`run_fixtures_with`].
    pub fn key(&self) -> String {
        format!("{}/{}", self.fixture, self.quantity)
    }
}

/// The checker's verdict on the fixture's instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureVerdict {
    pub fixture: String,
    pub axiom: AxiomId,
    pub operator: String,
    pub expected: Verdict,
    pub computed: Verdict,
    pub matches: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub comparisons: Vec<FixtureComparison>,
    pub verdicts: Vec<FixtureVerdict>,
    pub all_match: bool,
}

impl FixtureReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &FixtureComparison> {
        self.comparisons.iter().filter(|c| !c.matches)
    }
}

pub fn run_fixtures() -> Result<FixtureReport> {
    run_fixtures_with(&BTreeMap::new())
}

/// Replays every fixture; `overrides` replaces expected vectors by key
/// (`fixture/quantity`). Mismatches are reported, not raised.
pub fn run_fixtures_with(overrides: &BTreeMap<String, Vec<Amount>>) -> Result<FixtureReport> {
    let mut r = Recorder::new(overrides);
    let phi = OperatorHandle::phi();

    // Claims monotonicity under the conditional-priority rule.
    {
        let f = "claims-monotonicity";
        let rule = RuleHandle::conditional_priority_fixture();
        let hp = problem(&["4", "1", "2"], "3", &[(&["3", "3", "3"], &["2", "2", "1"])]);
        let before = apply_historical(&rule, &hp)?;
        r.compare(f, "tentative", &["0", "0", "3"], before.tentative.clone());
        r.compare(f, "awards", &["1/2", "1/2", "2"], before.awards.awards);
        let raised = hp.with_claims(amts(&["4", "3", "2"]));
        let after = apply_historical(&rule, &raised)?;
        r.compare(f, "raised-tentative", &["3", "0", "0"], after.tentative.clone());
        r.compare(f, "raised-awards", &["3", "0", "0"], after.awards.awards);
        let inst = Instance::ClaimIncrease {
            problem: hp,
            agent: AgentId(2),
            new_claim: amt("3"),
        };
        r.verdict(
            f,
            AxiomId::ClaimsMonotonicity,
            &phi,
            Verdict::Violated,
            check_general(AxiomId::ClaimsMonotonicity, &rule, &phi, &inst)?,
        );
    }

    let cel = RuleHandle::cel();
    let cel_history: &[(&[&str], &[&str])] = &[(&["7", "7", "20"], &["2", "2", "2"])];

    // Composition up under constrained equal losses.
    {
        let f = "composition-up";
        let hp = problem(&["10", "5", "2"], "15", cel_history);
        let direct = apply_historical(&cel, &hp)?;
        r.compare(f, "tentative", &["5", "0", "10"], direct.tentative.clone());
        r.compare(f, "lambda", &["4"], vec![direct.lambda.clone()]);
        r.compare(f, "awards", &["9", "4", "2"], direct.awards.awards);
        let first = apply_historical(&cel, &hp.with_endowment(amt("5")))?;
        r.compare(f, "first-step", &["3/2", "3/2", "2"], first.awards.awards.clone());
        r.compare(f, "first-step-lambda", &["3/2"], vec![first.lambda.clone()]);
        let remaining: Vec<Amount> = hp
            .claims()
            .iter()
            .zip(&first.awards.awards)
            .map(|(c, y)| c - y)
            .collect();
        let second = apply_historical(&cel, &hp.with_claims(remaining).with_endowment(amt("10")))?;
        r.compare(f, "second-step", &["13/2", "7/2", "0"], second.awards.awards);
        let inst = Instance::Split {
            problem: hp,
            first: amt("5"),
            second: amt("10"),
        };
        r.verdict(
            f,
            AxiomId::CompositionUp,
            &phi,
            Verdict::Violated,
            check_general(AxiomId::CompositionUp, &cel, &phi, &inst)?,
        );
    }

    // Composition down under constrained equal losses.
    {
        let f = "composition-down";
        let hp = problem(&["10", "5", "2"], "9", cel_history);
        let direct = apply_historical(&cel, &hp)?;
        r.compare(f, "tentative", &["2", "0", "7"], direct.tentative.clone());
        r.compare(f, "lambda", &["5/2"], vec![direct.lambda.clone()]);
        r.compare(f, "direct", &["9/2", "5/2", "2"], direct.awards.awards);
        let over = apply_historical(&cel, &hp.with_endowment(amt("15")))?;
        r.compare(f, "larger-endowment", &["9", "4", "2"], over.awards.awards.clone());
        let two_step = apply_historical(&cel, &hp.with_claims(over.awards.awards))?;
        r.compare(
            f,
            "two-step-tentative",
            &["3/2", "0", "15/2"],
            two_step.tentative.clone(),
        );
        r.compare(f, "two-step-lambda", &["11/4"], vec![two_step.lambda.clone()]);
        r.compare(f, "two-step", &["17/4", "11/4", "2"], two_step.awards.awards);
        let inst = Instance::LargerEndowment {
            problem: hp,
            larger: amt("15"),
        };
        r.verdict(
            f,
            AxiomId::CompositionDown,
            &phi,
            Verdict::Violated,
            check_general(AxiomId::CompositionDown, &cel, &phi, &inst)?,
        );
    }

    let prop = RuleHandle::proportional();

    // Consistency under the proportional rule.
    {
        let f = "consistency";
        let hp = problem(
            &["2", "4", "8", "6"],
            "9",
            &[(&["12", "7", "6", "4"], &["2", "2", "2", "2"])],
        );
        let full = apply_historical(&prop, &hp)?;
        r.compare(f, "lambda", &["26/123"], vec![full.lambda.clone()]);
        r.compare(
            f,
            "awards",
            &["2", "269/123", "350/123", "242/123"],
            full.awards.awards.clone(),
        );
        let group = vec![AgentId(1), AgentId(2), AgentId(3)];
        let e_m: Amount = full.awards.awards[..3].iter().sum();
        r.compare(f, "subgroup-endowment", &["865/123"], vec![e_m.clone()]);
        let sub = hp.select(&[0, 1, 2]).with_endowment(e_m);
        let restricted = apply_historical(&prop, &sub)?;
        r.compare(
            f,
            "subgroup-tentative",
            &["3460/1353", "865/451", "3460/1353"],
            restricted.tentative.clone(),
        );
        r.compare(f, "subgroup-lambda", &["377/1353"], vec![restricted.lambda.clone()]);
        r.compare(
            f,
            "subgroup-awards",
            &["2", "2972/1353", "1279/451"],
            restricted.awards.awards,
        );
        let inst = Instance::Subgroup {
            problem: hp,
            subgroup: group,
        };
        r.verdict(
            f,
            AxiomId::Consistency,
            &phi,
            Verdict::Violated,
            check_general(AxiomId::Consistency, &prop, &phi, &inst)?,
        );
    }

    // Population monotonicity under the proportional rule.
    {
        let f = "population-monotonicity";
        let hp = problem(&["2", "15"], "15", &[(&["2", "20"], &["1", "0"])]);
        let small = apply_historical(&prop, &hp)?;
        r.compare(f, "awards", &["45/38", "525/38"], small.awards.awards);
        let enlarged = problem(&["2", "15", "1"], "15", &[(&["2", "20", "105"], &["1", "0", "5"])]);
        let large = apply_historical(&prop, &enlarged)?;
        r.compare(f, "enlarged-awards", &["2", "12", "1"], large.awards.awards);
        let inst = Instance::Enlarged { problem: hp, enlarged };
        r.verdict(
            f,
            AxiomId::PopulationMonotonicity,
            &phi,
            Verdict::Violated,
            check_general(AxiomId::PopulationMonotonicity, &prop, &phi, &inst)?,
        );
    }

    // Self-duality under the proportional rule.
    {
        let f = "self-duality";
        let hp = problem(&["2", "4"], "2", &[(&["2", "2"], &["1", "1"])]);
        let x = apply_historical(&prop, &hp)?;
        r.compare(f, "awards", &["3/4", "5/4"], x.awards.awards);
        let dual = apply_historical(&prop, &hp.with_endowment(amt("4")))?;
        let complement: Vec<Amount> = hp
            .claims()
            .iter()
            .zip(&dual.awards.awards)
            .map(|(c, y)| c - y)
            .collect();
        r.compare(f, "dual-awards", &["3/2", "5/2"], dual.awards.awards);
        r.compare(f, "dual-complement", &["1/2", "3/2"], complement);
        let inst = Instance::Single { problem: hp };
        r.verdict(
            f,
            AxiomId::SelfDuality,
            &phi,
            Verdict::Violated,
            check_general(AxiomId::SelfDuality, &prop, &phi, &inst)?,
        );
    }

    // The two operators separating balanced treatment from non-arbitrariness.
    {
        let hp = problem(&["3", "4"], "5", &[]);
        let t = tentative_awards(&prop, &hp)?;
        let seps = [
            (
                "gamma1-independence",
                OperatorHandle::gamma1(),
                ["3", "2"],
                ["6/7", "-6/7"],
                Verdict::Holds,
                Verdict::Violated,
            ),
            (
                "gamma2-independence",
                OperatorHandle::gamma2(),
                ["2", "3"],
                ["-1/7", "1/7"],
                Verdict::Violated,
                Verdict::Holds,
            ),
        ];
        for (f, op, awards, margins, balanced, non_arbitrary) in seps {
            r.compare(f, "tentative", &["15/7", "20/7"], t.clone());
            let x = op.extend(&prop, &hp)?.awards;
            let m: Vec<Amount> = x.iter().zip(&t).map(|(a, b)| a - b).collect();
            r.compare(f, "awards", &awards, x);
            r.compare(f, "margins", &margins, m);
            for (axiom, expected) in [
                (AxiomId::BalancedTreatment, balanced),
                (AxiomId::NonArbitrariness, non_arbitrary),
                (AxiomId::PresentBoundedness, Verdict::Holds),
            ] {
                r.verdict(f, axiom, &op, expected, check_operator_axiom(axiom, &prop, &op, &hp)?);
                r.verdict(
                    f,
                    axiom,
                    &phi,
                    Verdict::Holds,
                    check_operator_axiom(axiom, &prop, &phi, &hp)?,
                );
            }
        }
    }

    Ok(r.finish())
}

fn problem(claims: &[&str], endowment: &str, periods: &[(&[&str], &[&str])]) -> HistoricalProblem {
    let history = History::new(
        periods
            .iter()
            .map(|(c, x)| PeriodRecord::new(amts(c), amts(x)))
            .collect(),
    );
    HistoricalProblem::new(
        ClaimsProblem::with_natural_agents(amts(claims), amt(endowment)),
        history,
    )
}

struct Recorder<'a> {
    overrides: &'a BTreeMap<String, Vec<Amount>>,
    comparisons: Vec<FixtureComparison>,
    verdicts: Vec<FixtureVerdict>,
}

impl<'a> Recorder<'a> {
    fn new(overrides: &'a BTreeMap<String, Vec<Amount>>) -> Self {
        Recorder {
            overrides,
            comparisons: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    fn compare(&mut self, fixture: &str, quantity: &str, expected: &[&str], computed: Vec<Amount>) {
        let key = format!("{fixture}/{quantity}");
        let expected = self.overrides.get(&key).cloned().unwrap_or_else(|| amts(expected));
        self.comparisons.push(FixtureComparison {
            fixture: fixture.to_owned(),
            quantity: quantity.to_owned(),
            matches: expected == computed,
            expected,
            computed,
        });
    }

    fn verdict(
        &mut self,
        fixture: &str,
        axiom: AxiomId,
        op: &OperatorHandle,
        expected: Verdict,
        result: super::CheckResult,
    ) {
        self.verdicts.push(FixtureVerdict {
            fixture: fixture.to_owned(),
            axiom,
            operator: op.name().to_owned(),
            expected,
            computed: result.verdict,
            matches: expected == result.verdict,
            witness: result.witness,
        });
    }

    fn finish(self) -> FixtureReport {
        let all_match = self.comparisons.iter().all(|c| c.matches) && self.verdicts.iter().all(|v| v.matches);
        FixtureReport {
            comparisons: self.comparisons,
            verdicts: self.verdicts,
            all_match,
        }
    }
}
