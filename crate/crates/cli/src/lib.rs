//! Command dispatch for the `histclaims` binary, kept free of process I/O so
//! tests can drive it directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use histclaims_core::paths::DEFAULT_SAMPLES;
use histclaims_core::{
    apply_historical, check_general, check_standard, run_fixtures_with, search_counterexample, tentative_awards,
    trace_historical, AgentId, Amount, AxiomId, ClaimsProblem, Error, HistoricalProblem, History, Instance,
    InstanceKind, OperatorHandle, RuleHandle, Sampling,
};
use serde::Deserialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    SolveHist,
    AxiomsCheck,
    AxiomsSearch,
    Fixtures,
    Trace,
}

impl Command {
    /// Whether the command reads a JSON document.
    pub fn needs_input(self) -> bool {
        !matches!(self, Command::AxiomsSearch | Command::Fixtures)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// `--operator none` selects the standard version of an axiom.
#[derive(Debug, Clone)]
pub enum OperatorChoice {
    None,
    Op(OperatorHandle),
}

impl FromStr for OperatorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "none" {
            Ok(OperatorChoice::None)
        } else {
            s.parse().map(OperatorChoice::Op)
        }
    }
}

impl fmt::Display for OperatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorChoice::None => f.write_str("none"),
            OperatorChoice::Op(op) => op.fmt(f),
        }
    }
}

/// A fully resolved invocation. Names are parsed when the config is built,
/// so unknown rules, operators and axioms never reach a computation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub rule: RuleHandle,
    pub operator: OperatorChoice,
    pub axiom: Option<AxiomId>,
    pub seed: u64,
    pub budget: u64,
    pub sampling: Sampling,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            rule: RuleHandle::proportional(),
            operator: OperatorChoice::Op(OperatorHandle::phi()),
            axiom: None,
            seed: 0,
            budget: 10_000,
            sampling: Sampling::Samples(DEFAULT_SAMPLES),
            format: Format::Json,
        }
    }
}

/// Parses `N` or `exact`.
pub fn parse_sampling(s: &str) -> Result<Sampling, String> {
    if s == "exact" {
        return Ok(Sampling::Exact);
    }
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(Sampling::Samples(n)),
        _ => Err(format!("expected an integer >= 2 or `exact`, got {s:?}")),
    }
}

/// Problem input: `agents` and `history` are optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemInput {
    #[serde(default)]
    agents: Option<Vec<AgentId>>,
    claims: Vec<Amount>,
    endowment: Amount,
    #[serde(default)]
    history: History,
}

impl ProblemInput {
    fn into_historical(self) -> HistoricalProblem {
        let agents = self
            .agents
            .unwrap_or_else(|| histclaims_core::natural_agents(self.claims.len()));
        HistoricalProblem::new(ClaimsProblem::new(agents, self.claims, self.endowment), self.history)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimIncreaseInput {
    agent: AgentId,
    new_claim: Amount,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckInput {
    #[serde(default)]
    agents: Option<Vec<AgentId>>,
    claims: Vec<Amount>,
    endowment: Amount,
    #[serde(default)]
    history: History,
    #[serde(rename = "E1")]
    e1: Option<Amount>,
    #[serde(rename = "E2")]
    e2: Option<Amount>,
    subgroup: Option<Vec<AgentId>>,
    permutation: Option<Vec<AgentId>>,
    scaled_by: Option<Amount>,
    claim_increase: Option<ClaimIncreaseInput>,
    larger_endowment: Option<Amount>,
    enlarged: Option<ProblemInput>,
    toward: Option<ProblemInput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceInput {
    claims: Vec<Amount>,
    #[serde(default)]
    history: History,
}

/// Failure carried to the error payload.
struct Failure {
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind().to_owned(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            kind: "ParseError".into(),
            message: e.to_string(),
        }
    }
}

fn missing(axiom: AxiomId, field: &str) -> Failure {
    Error::SignatureMismatch {
        axiom: axiom.name(),
        expected: axiom.signature().name(),
        detail: format!("input needs the {field:?} field"),
    }
    .into()
}

/// Runs one command on `input` and returns the exit code and the bytes for
/// standard output.
pub fn run(config: &RunConfig, input: &[u8]) -> (i32, Vec<u8>) {
    match dispatch(config, input) {
        Ok((code, Payload::Json(v))) => (code, render(&v)),
        Ok((code, Payload::Text(s))) => (code, s.into_bytes()),
        Err(f) => {
            let v = json!({ "error": { "kind": f.kind, "message": f.message } });
            (EXIT_INVALID, render(&v))
        }
    }
}

enum Payload {
    Json(Value),
    Text(String),
}

fn render(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("values serialize");
    out.push(b'\n');
    out
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

fn dispatch(config: &RunConfig, input: &[u8]) -> Result<(i32, Payload), Failure> {
    let rule = &config.rule;
    match config.command {
        Command::Solve => {
            let p = serde_json::from_slice::<ProblemInput>(input)?.into_historical();
            if !p.history.is_empty() {
                return Err(Failure {
                    kind: "ParseError".into(),
                    message: "solve takes a problem without history; use solve-hist".into(),
                });
            }
            let x = rule.evaluate(&p.problem)?;
            let v = json!({ "rule": rule.name(), "agents": p.problem.agents, "awards": x });
            Ok((EXIT_OK, Payload::Json(v)))
        }
        Command::SolveHist => {
            let hp = serde_json::from_slice::<ProblemInput>(input)?.into_historical();
            let v = match &config.operator {
                OperatorChoice::None => {
                    return Err(Failure {
                        kind: "UnknownName".into(),
                        message: "solve-hist needs an operator".into(),
                    })
                }
                OperatorChoice::Op(op) if op.name() == "phi" => {
                    let s = apply_historical(rule, &hp)?;
                    json!({
                        "rule": rule.name(),
                        "operator": op.name(),
                        "agents": hp.problem.agents,
                        "awards": s.awards,
                        "lambda": s.lambda,
                        "tentative": s.tentative,
                        "adjusted_claims": s.adjusted_claims,
                        "satiated": s.satiated.iter().map(|&i| hp.problem.agents[i]).collect::<Vec<_>>(),
                    })
                }
                OperatorChoice::Op(op) => {
                    let x = op.extend(rule, &hp)?;
                    json!({
                        "rule": rule.name(),
                        "operator": op.name(),
                        "agents": hp.problem.agents,
                        "awards": x,
                        "tentative": tentative_awards(rule, &hp)?,
                    })
                }
            };
            Ok((EXIT_OK, Payload::Json(v)))
        }
        Command::AxiomsCheck => {
            let axiom = config.axiom.ok_or_else(|| Failure {
                kind: "UnknownName".into(),
                message: "axioms-check needs --axiom".into(),
            })?;
            let raw: CheckInput = serde_json::from_slice(input)?;
            let instance = build_instance(axiom, raw)?;
            let result = match &config.operator {
                OperatorChoice::None => check_standard(axiom, rule, &instance)?,
                OperatorChoice::Op(op) => check_general(axiom, rule, op, &instance)?,
            };
            let code = if result.is_violated() { EXIT_VIOLATION } else { EXIT_OK };
            let v = json!({
                "axiom": axiom,
                "rule": rule.name(),
                "operator": config.operator.to_string(),
                "verdict": result.verdict,
                "witness": result.witness,
            });
            Ok((code, Payload::Json(v)))
        }
        Command::AxiomsSearch => {
            let axiom = config.axiom.ok_or_else(|| Failure {
                kind: "UnknownName".into(),
                message: "axioms-search needs --axiom".into(),
            })?;
            let op = match &config.operator {
                OperatorChoice::None => None,
                OperatorChoice::Op(op) => Some(op),
            };
            if config.budget == 0 {
                return Err(Failure {
                    kind: "ParseError".into(),
                    message: "budget must be at least 1".into(),
                });
            }
            let outcome = search_counterexample(axiom, rule, op, config.budget, config.seed)?;
            let code = if outcome.result.is_violated() {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            };
            Ok((code, Payload::Json(to_value(&outcome))))
        }
        Command::Fixtures => {
            let overrides: BTreeMap<String, Vec<Amount>> = if input.iter().all(u8::is_ascii_whitespace) {
                BTreeMap::new()
            } else {
                serde_json::from_slice(input)?
            };
            let report = run_fixtures_with(&overrides)?;
            let code = if report.all_match { EXIT_OK } else { EXIT_VIOLATION };
            Ok((code, Payload::Json(to_value(&report))))
        }
        Command::Trace => {
            let t: TraceInput = serde_json::from_slice(input)?;
            let path = trace_historical(rule, &t.claims, &t.history, config.sampling)?;
            let payload = match config.format {
                Format::Csv => Payload::Text(path.to_csv()),
                Format::Json => {
                    let endowments = path.endowments();
                    let points: Vec<Value> = endowments
                        .iter()
                        .zip(&path.vertices)
                        .map(|(e, v)| json!({ "endowment": e, "awards": v }))
                        .collect();
                    Payload::Json(json!({
                        "rule": rule.name(),
                        "mode": match config.sampling {
                            Sampling::Exact => "exact".to_owned(),
                            Sampling::Samples(n) => n.to_string(),
                        },
                        "claims": path.claims,
                        "points": points,
                    }))
                }
            };
            Ok((EXIT_OK, payload))
        }
    }
}

fn build_instance(axiom: AxiomId, raw: CheckInput) -> Result<Instance, Failure> {
    let problem = ProblemInput {
        agents: raw.agents,
        claims: raw.claims,
        endowment: raw.endowment,
        history: raw.history,
    }
    .into_historical();
    Ok(match axiom.signature() {
        InstanceKind::Single => Instance::Single { problem },
        InstanceKind::Permuted => Instance::Permuted {
            problem,
            permutation: raw.permutation.ok_or_else(|| missing(axiom, "permutation"))?,
        },
        InstanceKind::Scaled => Instance::Scaled {
            problem,
            factor: raw.scaled_by.ok_or_else(|| missing(axiom, "scaled_by"))?,
        },
        InstanceKind::Split => {
            let first = raw.e1.ok_or_else(|| missing(axiom, "E1"))?;
            let second = raw.e2.ok_or_else(|| missing(axiom, "E2"))?;
            Instance::Split { problem, first, second }
        }
        InstanceKind::LargerEndowment => Instance::LargerEndowment {
            problem,
            larger: raw.larger_endowment.ok_or_else(|| missing(axiom, "larger_endowment"))?,
        },
        InstanceKind::ClaimIncrease => {
            let inc = raw.claim_increase.ok_or_else(|| missing(axiom, "claim_increase"))?;
            Instance::ClaimIncrease {
                problem,
                agent: inc.agent,
                new_claim: inc.new_claim,
            }
        }
        InstanceKind::Enlarged => Instance::Enlarged {
            problem,
            enlarged: raw
                .enlarged
                .ok_or_else(|| missing(axiom, "enlarged"))?
                .into_historical(),
        },
        InstanceKind::Subgroup => Instance::Subgroup {
            problem,
            subgroup: raw.subgroup.ok_or_else(|| missing(axiom, "subgroup"))?,
        },
        InstanceKind::Perturbed => Instance::Perturbed {
            problem,
            toward: raw.toward.ok_or_else(|| missing(axiom, "toward"))?.into_historical(),
        },
    })
}
