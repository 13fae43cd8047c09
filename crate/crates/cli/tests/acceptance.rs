//! Acceptance criteria, one PASS/FAIL/UNATTAINABLE line each. Runs without the libtest
//! harness so the lines show up in plain `cargo test` output.

use std::collections::BTreeMap;
use std::process::{Command as Process, ExitCode, Stdio};
use std::time::Instant;

use histclaims_cli::{run, Command, RunConfig, EXIT_OK, EXIT_VIOLATION};
use histclaims_core::axioms::InstanceGenerator;
use histclaims_core::{
    aggregates, amt, amts, apply_historical, apply_historical_iterative, check_operator_axiom, search_counterexample,
    solve_lambda, tentative_awards, trace_historical, trace_standard, Amount, AxiomId, ClaimsProblem,
    HistoricalProblem, History, OperatorHandle, PeriodRecord, RuleHandle, Sampling, Verdict, Witness,
};

const TRIALS: u64 = 10_000;
const SEED: u64 = 20_240_601;

/// A criterion either passes, fails, or is shown not to hold as stated, with
/// the counterexamples independently confirmed.
enum Met {
    Pass(String),
    Unattainable(String),
}

type Outcome = Result<Met, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn pass(detail: impl Into<String>) -> Outcome {
    Ok(Met::Pass(detail.into()))
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

fn expect(label: &str, computed: &[Amount], expected: &[&str]) -> Result<(), String> {
    if computed == amts(expected).as_slice() {
        Ok(())
    } else {
        Err(format!("{label}: computed {computed:?}, expected {expected:?}"))
    }
}

fn awards(rule: &RuleHandle, hp: &HistoricalProblem) -> Result<Vec<Amount>, String> {
    apply_historical(rule, hp)
        .map(|s| s.awards.awards)
        .map_err(|e| e.to_string())
}

fn golden_values() -> Outcome {
    let cel = RuleHandle::cel();
    let prop = RuleHandle::proportional();
    let h7 = &[(&["7", "7", "20"][..], &["2", "2", "2"][..])];

    let up = problem(&["10", "5", "2"], "15", h7);
    let s = apply_historical(&cel, &up).map_err(|e| e.to_string())?;
    expect("composition-up direct", &s.awards.awards, &["9", "4", "2"])?;
    expect("composition-up lambda", &[s.lambda], &["4"])?;
    let first = awards(&cel, &up.with_endowment(amt("5")))?;
    expect("composition-up first step", &first, &["3/2", "3/2", "2"])?;
    let rest: Vec<Amount> = up.claims().iter().zip(&first).map(|(c, y)| c - y).collect();
    let second = awards(&cel, &up.with_claims(rest).with_endowment(amt("10")))?;
    expect("composition-up second step", &second, &["13/2", "7/2", "0"])?;

    let down = problem(&["10", "5", "2"], "9", h7);
    expect("composition-down direct", &awards(&cel, &down)?, &["9/2", "5/2", "2"])?;
    let over = awards(&cel, &down.with_endowment(amt("15")))?;
    expect(
        "composition-down two-step",
        &awards(&cel, &down.with_claims(over))?,
        &["17/4", "11/4", "2"],
    )?;

    let cons = problem(
        &["2", "4", "8", "6"],
        "9",
        &[(&["12", "7", "6", "4"], &["2", "2", "2", "2"])],
    );
    let s = apply_historical(&prop, &cons).map_err(|e| e.to_string())?;
    expect(
        "consistency on N",
        &s.awards.awards,
        &["2", "269/123", "350/123", "242/123"],
    )?;
    expect("consistency lambda", &[s.lambda], &["26/123"])?;
    let e_m: Amount = s.awards.awards[..3].iter().sum();
    expect("consistency E_M", std::slice::from_ref(&e_m), &["865/123"])?;
    let sub = cons.select(&[0, 1, 2]).with_endowment(e_m);
    expect(
        "consistency on M",
        &awards(&prop, &sub)?,
        &["2", "2972/1353", "1279/451"],
    )?;

    let dagger = RuleHandle::conditional_priority_fixture();
    let cm = problem(&["4", "1", "2"], "3", &[(&["3", "3", "3"], &["2", "2", "1"])]);
    expect(
        "claims-monotonicity before",
        &awards(&dagger, &cm)?,
        &["1/2", "1/2", "2"],
    )?;
    expect(
        "claims-monotonicity after",
        &awards(&dagger, &cm.with_claims(amts(&["4", "3", "2"])))?,
        &["3", "0", "0"],
    )?;

    let pm = problem(&["2", "15"], "15", &[(&["2", "20"], &["1", "0"])]);
    expect(
        "population-monotonicity small",
        &awards(&prop, &pm)?,
        &["45/38", "525/38"],
    )?;
    let big = problem(&["2", "15", "1"], "15", &[(&["2", "20", "105"], &["1", "0", "5"])]);
    expect(
        "population-monotonicity enlarged",
        &awards(&prop, &big)?,
        &["2", "12", "1"],
    )?;

    let sd = problem(&["2", "4"], "2", &[(&["2", "2"], &["1", "1"])]);
    expect("self-duality awards", &awards(&prop, &sd)?, &["3/4", "5/4"])?;
    let dual = awards(&prop, &sd.with_endowment(amt("4")))?;
    let complement: Vec<Amount> = sd.claims().iter().zip(&dual).map(|(c, y)| c - y).collect();
    expect("self-duality complement", &complement, &["1/2", "3/2"])?;
    pass("all counterexample values match exactly")
}

fn rule_values() -> Outcome {
    let eval = |rule: RuleHandle, c: &[&str], e: &str| {
        rule.evaluate(&ClaimsProblem::with_natural_agents(amts(c), amt(e)))
            .map(|x| x.awards)
            .map_err(|e| e.to_string())
    };
    expect(
        "CEL((15,10,20),15)",
        &eval(RuleHandle::cel(), &["15", "10", "20"], "15")?,
        &["5", "0", "10"],
    )?;
    expect(
        "CEL((14,9,20),9)",
        &eval(RuleHandle::cel(), &["14", "9", "20"], "9")?,
        &["3/2", "0", "15/2"],
    )?;
    expect(
        "PROP((12,9,12,8),9)",
        &eval(RuleHandle::proportional(), &["12", "9", "12", "8"], "9")?,
        &["108/41", "81/41", "108/41", "72/41"],
    )?;
    expect(
        "PROP((12,9,12),865/123)",
        &eval(RuleHandle::proportional(), &["12", "9", "12"], "865/123")?,
        &["3460/1353", "865/451", "3460/1353"],
    )?;
    pass("4 rule values match exactly")
}

/// `sum_i min(c_i, t_i + level)`, written out independently of the solver.
fn clamp_sum(c: &[Amount], t: &[Amount], level: &Amount) -> Amount {
    c.iter().zip(t).map(|(c, t)| (t + level).min(c.clone())).sum()
}

fn well_definedness() -> Outcome {
    let rules = RuleHandle::classical();
    let (mut unique_checked, mut full_checked) = (0, 0);
    for trial in 0..TRIALS {
        let mut g = InstanceGenerator::new(SEED ^ trial, true);
        let hp = g.problem();
        let rule = &rules[(trial % 4) as usize];
        let total = hp.problem.total_claims();
        for hp in [hp.clone(), hp.with_endowment(total.clone())] {
            let t = tentative_awards(rule, &hp).map_err(|e| e.to_string())?;
            let lambda = solve_lambda(hp.claims(), &t, hp.endowment()).map_err(|e| e.to_string())?;
            let c = hp.claims();
            let x: Vec<Amount> = c.iter().zip(&t).map(|(c, t)| (t + &lambda).min(c.clone())).collect();
            if x.iter().sum::<Amount>() != *hp.endowment() {
                return Err(format!("unbalanced at trial {trial}: {hp:?}"));
            }
            if hp.endowment() == &total {
                if x != c {
                    return Err(format!("C = E but awards differ from claims at trial {trial}"));
                }
                full_checked += 1;
                continue;
            }
            // lambda is the smallest root and the sum rises right after it.
            let eps = Amount::new(1, 1000).min(lambda.clone());
            let above = clamp_sum(c, &t, &(&lambda + Amount::new(1, 1000)));
            let below_ok = lambda.is_zero() || clamp_sum(c, &t, &(&lambda - &eps)) < *hp.endowment();
            if above <= *hp.endowment() || !below_ok {
                return Err(format!(
                    "lambda {lambda} not the unique balancing level at trial {trial}"
                ));
            }
            unique_checked += 1;
        }
    }
    pass(format!(
        "{TRIALS} instances balanced; uniqueness on {unique_checked}, C = E on {full_checked}"
    ))
}

fn iterative_equivalence() -> Outcome {
    let mut stages_seen = 0usize;
    for trial in 0..TRIALS {
        let mut g = InstanceGenerator::new(SEED.wrapping_add(trial), true);
        let hp = g.problem();
        for rule in RuleHandle::classical() {
            let direct = apply_historical(&rule, &hp).map_err(|e| e.to_string())?;
            let (iterative, trace) = apply_historical_iterative(&rule, &hp).map_err(|e| e.to_string())?;
            if direct.awards != iterative.awards {
                return Err(format!("{rule} differs at trial {trial}: {hp:?}"));
            }
            stages_seen = stages_seen.max(trace.stages.len());
        }
    }
    pass(format!(
        "{TRIALS} instances x 4 rules identical (up to {stages_seen} stages)"
    ))
}

/// Re-derives an order-in-losses violation of the operator without trusting
/// the checker: aggregates are summed by hand, the awards are confirmed to be
/// `min(c, t + lambda)` for one common level, and the premises and the failed
/// inequality are compared directly.
fn confirm_order_losses(rule: &RuleHandle, w: &Witness) -> Result<String, String> {
    let hp = w.instance.problem();
    let c = hp.claims();
    let n = c.len();
    let idx = |a| hp.problem.index_of(a).ok_or_else(|| format!("unknown agent {a}"));
    let (i, j) = (idx(w.agents[0])?, idx(w.agents[1])?);
    let column = |k: usize, past: fn(&PeriodRecord) -> &Vec<Amount>| -> Amount {
        hp.history.periods.iter().map(|p| past(p)[k].clone()).sum()
    };
    let dc: Vec<Amount> = (0..n).map(|k| column(k, |p| &p.claims)).collect();
    let dx: Vec<Amount> = (0..n).map(|k| column(k, |p| &p.allocations)).collect();
    let adjusted: Vec<Amount> = (0..n).map(|k| &c[k] + &dc[k] - &dx[k]).collect();
    let t = rule
        .evaluate(&ClaimsProblem::with_natural_agents(adjusted, hp.endowment().clone()))
        .map_err(|e| e.to_string())?
        .awards;
    let x = awards(rule, hp)?;

    if x.iter().sum::<Amount>() != *hp.endowment() || x.iter().zip(c).any(|(x, c)| x.is_negative() || x > c) {
        return Err(format!("{rule}: awards {} are not an allocation", fmt(&x)));
    }
    let levels: Vec<Amount> = (0..n).filter(|&k| x[k] < c[k]).map(|k| &x[k] - &t[k]).collect();
    let level = levels.first().ok_or("every agent is satiated, so no loss can differ")?;
    let common = levels.iter().all(|l| l == level)
        && !level.is_negative()
        && (0..n).filter(|&k| x[k] == c[k]).all(|k| &t[k] + level >= c[k]);
    if !common {
        return Err(format!(
            "{rule}: awards {} are not min(c, t + lambda) for t = {}",
            fmt(&x),
            fmt(&t)
        ));
    }
    let premises = c[i] >= c[j] && dc[i] >= dc[j] && dx[i] <= dx[j];
    let (li, lj) = (&c[i] - &x[i], &c[j] - &x[j]);
    if !premises || li >= lj || w.lhs != [li.clone()] || w.rhs != [lj.clone()] {
        return Err(format!("{rule}: witness does not replay: {w:?}"));
    }
    Ok(format!(
        "{rule} (c = {}, E = {}, past claims {}, past awards {}: losses {li} < {lj})",
        fmt(c),
        hp.endowment(),
        fmt(&dc),
        fmt(&dx)
    ))
}

fn preservation() -> Outcome {
    // Hand oracle: c = (1, 1), E = 1 after one period with claims (2, 0) and
    // nothing awarded. Adjusted claims are (3, 1), PROP there gives (3/4, 1/4),
    // below both present claims, so agent 1 loses 1/4 and agent 2 loses 3/4
    // although agent 1 weakly dominates on every premise.
    let minimal = problem(&["1", "1"], "1", &[(&["2", "0"], &["0", "0"])]);
    expect(
        "minimal order-losses instance",
        &awards(&RuleHandle::proportional(), &minimal)?,
        &["3/4", "1/4"],
    )?;

    let phi = OperatorHandle::phi();
    let axioms = [
        AxiomId::Anonymity,
        AxiomId::EqualTreatment,
        AxiomId::OrderGains,
        AxiomId::OrderLosses,
        AxiomId::ScaleInvariance,
        AxiomId::ResourceMonotonicity,
        AxiomId::Securement,
    ];
    let (mut preserved, mut vacuous, mut broken) = (0, Vec::new(), Vec::new());
    for rule in RuleHandle::classical() {
        for axiom in axioms {
            let base = search_counterexample(axiom, &rule, None, TRIALS, SEED).map_err(|e| e.to_string())?;
            let general = search_counterexample(axiom, &rule, Some(&phi), TRIALS, SEED).map_err(|e| e.to_string())?;
            match (base.result.verdict, general.result.verdict) {
                (Verdict::Holds, Verdict::Holds) => preserved += 1,
                (Verdict::Holds, Verdict::Violated) => {
                    let w = general.result.witness.expect("violation has a witness");
                    if axiom != AxiomId::OrderLosses {
                        return Err(format!("phi({rule}) violates {axiom}: {:?}", w.instance));
                    }
                    broken.push(confirm_order_losses(&rule, &w)?);
                }
                (Verdict::Violated, _) => {
                    let w = base.result.witness.expect("violation has a witness");
                    vacuous.push(format!("{rule}/{axiom} ({} vs {})", fmt(&w.lhs), fmt(&w.rhs)));
                }
            }
        }
    }
    let mut line = format!("{preserved} of 28 (rule, axiom) pairs preserved over {TRIALS} trials each");
    if !vacuous.is_empty() {
        line.push_str(&format!("; base rule already violates: {}", vacuous.join(", ")));
    }
    if broken.is_empty() {
        return pass(line);
    }
    line.push_str(&format!(
        "; order-losses not preserved, confirmed by oracle: {}",
        broken.join("; ")
    ));
    Ok(Met::Unattainable(line))
}

fn fmt(v: &[Amount]) -> String {
    v.iter().map(Amount::to_string).collect::<Vec<_>>().join(",")
}

fn operator_axioms() -> Outcome {
    let phi = OperatorHandle::phi();
    let operator_axioms = [
        AxiomId::PresentBoundedness,
        AxiomId::BalancedTreatment,
        AxiomId::NonArbitrariness,
    ];
    for rule in RuleHandle::classical() {
        for axiom in operator_axioms {
            let r = search_counterexample(axiom, &rule, Some(&phi), TRIALS, SEED).map_err(|e| e.to_string())?;
            if r.result.is_violated() {
                return Err(format!("phi({rule}) fails {axiom}: {:?}", r.result.witness));
            }
        }
    }

    // Hand oracle for c = (3, 4), E = 5: PROP gives c_i E / C; the first
    // alternative gives (c_1, E - c_1); CEL gives equal losses L with
    // (3 - L) + (4 - L) = 5, so L = 1.
    let (c, e) = ([Amount::from(3), Amount::from(4)], Amount::from(5));
    let total = &c[0] + &c[1];
    let t: Vec<Amount> = c.iter().map(|ci| ci * &e / &total).collect();
    let first = [c[0].clone(), &e - &c[0]];
    let loss = (&total - &e).half();
    let second = [&c[0] - &loss, &c[1] - &loss];
    let m1: Vec<Amount> = first.iter().zip(&t).map(|(x, t)| x - t).collect();
    let m2: Vec<Amount> = second.iter().zip(&t).map(|(x, t)| x - t).collect();
    if fmt(&m1) != "6/7,-6/7" || fmt(&m2) != "-1/7,1/7" {
        return Err(format!("hand oracle margins {} and {}", fmt(&m1), fmt(&m2)));
    }

    let prop = RuleHandle::proportional();
    let hp = problem(&["3", "4"], "5", &[]);
    let g1 = OperatorHandle::gamma1();
    let g2 = OperatorHandle::gamma2();
    let check = |axiom, op: &OperatorHandle| check_operator_axiom(axiom, &prop, op, &hp).map_err(|e| e.to_string());
    let na = check(AxiomId::NonArbitrariness, &g1)?;
    let w = na.witness.ok_or("gamma1 passes non-arbitrariness on (3,4), 5")?;
    if (w.lhs.as_slice(), w.rhs.as_slice()) != (&m1[..1], &m1[1..]) {
        return Err(format!("gamma1 witness {} vs {}", fmt(&w.lhs), fmt(&w.rhs)));
    }
    let bt = check(AxiomId::BalancedTreatment, &g2)?;
    let w = bt.witness.ok_or("gamma2 passes balanced treatment on (3,4), 5")?;
    if (w.lhs.as_slice(), w.rhs.as_slice()) != (&m2[..1], &m2[1..]) {
        return Err(format!("gamma2 witness {} vs {}", fmt(&w.lhs), fmt(&w.rhs)));
    }
    if check(AxiomId::BalancedTreatment, &g1)?.is_violated() || check(AxiomId::NonArbitrariness, &g2)?.is_violated() {
        return Err("an alternative operator fails the axiom it should pass".into());
    }

    // Randomized: each alternative fails exactly one of the two axioms.
    for (op, fails, passes) in [
        (&g1, AxiomId::NonArbitrariness, AxiomId::BalancedTreatment),
        (&g2, AxiomId::BalancedTreatment, AxiomId::NonArbitrariness),
    ] {
        let bad = search_counterexample(fails, &prop, Some(op), TRIALS, SEED).map_err(|e| e.to_string())?;
        let good = search_counterexample(passes, &prop, Some(op), TRIALS, SEED).map_err(|e| e.to_string())?;
        if !bad.result.is_violated() || good.result.is_violated() {
            return Err(format!(
                "{op}: search verdicts {:?} / {:?}",
                bad.result.verdict, good.result.verdict
            ));
        }
    }
    pass(format!(
        "phi passes all three on {TRIALS} trials x 4 rules; gamma1 margins {} ; gamma2 margins {}",
        fmt(&m1),
        fmt(&m2)
    ))
}

fn vertices(path: &[Vec<Amount>]) -> Vec<String> {
    path.iter().map(|v| format!("({})", fmt(v))).collect()
}

fn paths() -> Outcome {
    let standard_paths = [
        ("prop", vec!["(0,0)", "(3,6)"]),
        ("cea", vec!["(0,0)", "(3,3)", "(3,6)"]),
        ("cel", vec!["(0,0)", "(0,3)", "(3,6)"]),
        ("talmud", vec!["(0,0)", "(3/2,3/2)", "(3/2,9/2)", "(3,6)"]),
    ];
    let historical_paths = [
        ("prop", vec!["(0,0)", "(27/20,27/10)", "(2,27/10)"]),
        ("cea", vec!["(0,0)", "(2,2)", "(2,27/10)"]),
        ("cel", vec!["(0,0)", "(0,27/10)", "(2,27/10)"]),
        ("talmud", vec!["(0,0)", "(3/2,3/2)", "(3/2,27/10)", "(2,27/10)"]),
    ];
    let c = amts(&["3", "6"]);
    let present = amts(&["2", "27/10"]);
    let history = History::single(amts(&["1", "33/10"]), amts(&["0", "0"]));
    let hp = HistoricalProblem::new(
        ClaimsProblem::with_natural_agents(present.clone(), Amount::zero()),
        history.clone(),
    );
    let adjusted = aggregates(&hp).map_err(|e| e.to_string())?.adjusted_claims;
    if adjusted != c {
        return Err(format!("reference history adjusts claims to {adjusted:?}"));
    }
    for ((name, one), (_, two)) in standard_paths.iter().zip(&historical_paths) {
        let rule: RuleHandle = name.parse().map_err(|e: histclaims_core::Error| e.to_string())?;
        let p1 = trace_standard(&rule, &c, Sampling::Exact).map_err(|e| e.to_string())?;
        if vertices(&p1.vertices) != *one {
            return Err(format!("standard path {name}: {:?}", vertices(&p1.vertices)));
        }
        let p2 = trace_historical(&rule, &present, &history, Sampling::Exact).map_err(|e| e.to_string())?;
        if vertices(&p2.vertices) != *two {
            return Err(format!("historical path {name}: {:?}", vertices(&p2.vertices)));
        }
    }

    // Two-agent mimicry: the historical path is the standard path at the
    // adjusted claims until an agent's award reaches its present claim, after
    // which that agent stays at its claim and the other takes the rest.
    let mut checked = 0;
    let mut trial = 0u64;
    while checked < 1_000 {
        trial += 1;
        let mut g = InstanceGenerator::new(SEED ^ (trial << 20), true);
        let hp = g.problem().select(&[0, 1]);
        let claims = hp.claims().to_vec();
        let total: Amount = claims.iter().sum();
        if !total.is_positive() {
            continue;
        }
        let adjusted = aggregates(&hp).map_err(|e| e.to_string())?.adjusted_claims;
        for rule in RuleHandle::classical() {
            let path = trace_historical(&rule, &claims, &hp.history, Sampling::Exact).map_err(|e| e.to_string())?;
            let mut probes = path.endowments();
            probes.extend((0..=16).map(|k| &total * Amount::new(k, 16)));
            for e in probes {
                let standard = rule
                    .evaluate(&ClaimsProblem::with_natural_agents(adjusted.clone(), e.clone()))
                    .map_err(|e| e.to_string())?
                    .awards;
                let oracle = match (0..2).find(|&i| standard[i] > claims[i]) {
                    None => standard,
                    Some(i) => {
                        let mut v = vec![Amount::zero(), Amount::zero()];
                        v[i] = claims[i].clone();
                        v[1 - i] = &e - &claims[i];
                        v
                    }
                };
                if path.at(&e) != Some(oracle.clone()) {
                    return Err(format!("{rule} mimicry fails at E = {e} on {hp:?}: oracle {oracle:?}"));
                }
            }
        }
        checked += 1;
    }
    pass(format!(
        "standard and historical reference polylines exact for 4 rules; mimicry holds on {checked} two-agent instances"
    ))
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_histclaims");
    let clean = Process::new(bin)
        .arg("fixtures")
        .stdout(Stdio::piped())
        .output()
        .map_err(|e| e.to_string())?;
    let report: serde_json::Value = serde_json::from_slice(&clean.stdout).map_err(|e| e.to_string())?;
    if clean.status.code() != Some(EXIT_OK) || report["all_match"] != true {
        return Err(format!("fixtures exited {:?}", clean.status.code()));
    }

    // Perturb every expected vector in turn.
    let keys: Vec<String> = report["comparisons"]
        .as_array()
        .ok_or("report lacks comparisons")?
        .iter()
        .map(|c| {
            format!(
                "{}/{}",
                c["fixture"].as_str().unwrap_or(""),
                c["quantity"].as_str().unwrap_or("")
            )
        })
        .collect();
    let config = RunConfig::new(Command::Fixtures);
    for (k, key) in keys.iter().enumerate() {
        let entry = &report["comparisons"][k]["expected"];
        let mut v: Vec<Amount> = serde_json::from_value(entry.clone()).map_err(|e| e.to_string())?;
        let slot = k % v.len();
        v[slot] += Amount::new(1, 1_000_003);
        let overrides = BTreeMap::from([(key.clone(), v)]);
        let input = serde_json::to_vec(&overrides).map_err(|e| e.to_string())?;
        let (code, _) = run(&config, &input);
        if code != EXIT_VIOLATION {
            return Err(format!("perturbing {key} exited {code}"));
        }
    }
    let mut child = Process::new(bin)
        .args(["fixtures", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    {
        use std::io::Write;
        let mut stdin = child.stdin.take().ok_or("no stdin")?;
        stdin
            .write_all(br#"{"composition-down/two-step": ["17/4", "11/4", "3"]}"#)
            .map_err(|e| e.to_string())?;
    }
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    if out.status.code() != Some(EXIT_VIOLATION) {
        return Err(format!("binary with perturbation exited {:?}", out.status.code()));
    }
    pass(format!(
        "fixtures exit 0 with all matches; each of {} perturbations exits 3",
        keys.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden counterexample values", golden_values),
        ("rule unit values", rule_values),
        ("balancing level well-defined", well_definedness),
        ("closed form equals staged procedure", iterative_equivalence),
        ("preservation under the operator", preservation),
        ("operator axioms and independence", operator_axioms),
        ("reference paths and two-agent mimicry", paths),
        ("cli fixtures contract", cli_contract),
    ];
    let (mut passed, mut failed, mut unattainable) = (0, 0, 0);
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(Met::Pass(d)) => {
                passed += 1;
                ("PASS", d)
            }
            Ok(Met::Unattainable(d)) => {
                unattainable += 1;
                ("UNATTAINABLE", d)
            }
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} criterion {}: {name} [{secs:.1}s] {detail}", k + 1);
    }
    println!("acceptance: {passed} passed, {failed} failed, {unattainable} unattainable");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
