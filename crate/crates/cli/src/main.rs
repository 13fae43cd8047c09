use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use histclaims_cli::{parse_sampling, run, Command, Format, OperatorChoice, RunConfig, EXIT_INVALID};
use histclaims_core::{AxiomId, Error, RuleHandle};
use serde_json::json;

/// Claims problems with history, in exact arithmetic.
#[derive(Parser)]
#[command(name = "histclaims", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Rule: prop, cea, cel, talmud, priority:<ids>, fixture:r-dagger.
    #[arg(long, global = true, default_value = "prop")]
    rule: String,

    /// Operator: phi, gamma1, gamma2, or none for standard axioms.
    #[arg(long, global = true, default_value = "phi")]
    operator: String,

    #[arg(long, global = true)]
    axiom: Option<String>,

    #[arg(long, global = true, default_value_t = 10_000)]
    budget: u64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of sample points, or `exact` for path vertices.
    #[arg(long, global = true, default_value = "101", value_parser = parse_sampling)]
    samples: histclaims_core::Sampling,

    /// Input file, `-` for standard input.
    #[arg(long, global = true)]
    input: Option<String>,

    /// Output file, `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    output: String,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Apply a standard rule to a claims problem.
    Solve,
    /// Apply an extension operator to a problem with history.
    SolveHist,
    /// Check one axiom on one instance.
    AxiomsCheck,
    /// Randomized counterexample search.
    AxiomsSearch,
    /// Replay the worked counterexamples.
    Fixtures,
    /// Path of awards for fixed claims.
    Trace,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Json,
    Csv,
}

fn config(cli: &Cli) -> Result<RunConfig, Box<Error>> {
    let command = match cli.command {
        Sub::Solve => Command::Solve,
        Sub::SolveHist => Command::SolveHist,
        Sub::AxiomsCheck => Command::AxiomsCheck,
        Sub::AxiomsSearch => Command::AxiomsSearch,
        Sub::Fixtures => Command::Fixtures,
        Sub::Trace => Command::Trace,
    };
    let mut config = RunConfig::new(command);
    config.rule = cli.rule.parse::<RuleHandle>()?;
    config.operator = cli.operator.parse::<OperatorChoice>()?;
    config.axiom = cli.axiom.as_deref().map(str::parse::<AxiomId>).transpose()?;
    config.seed = cli.seed;
    config.budget = cli.budget;
    config.sampling = cli.samples;
    config.format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    Ok(config)
}

fn read_input(cli: &Cli, command: Command) -> Result<Vec<u8>> {
    let source = match (&cli.input, command.needs_input()) {
        (Some(path), _) => path.as_str(),
        (None, true) => "-",
        (None, false) => return Ok(Vec::new()),
    };
    if source == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).context("reading standard input")?;
        Ok(buf)
    } else {
        fs::read(source).with_context(|| format!("reading {source}"))
    }
}

fn write_output(target: &str, bytes: &[u8]) -> Result<()> {
    if target == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
    } else {
        fs::write(PathBuf::from(target), bytes).with_context(|| format!("writing {target}"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, bytes) = match config(&cli) {
        Ok(config) => match read_input(&cli, config.command) {
            Ok(input) => run(&config, &input),
            Err(e) => {
                eprintln!("histclaims: {e:#}");
                return ExitCode::from(1);
            }
        },
        Err(e) => {
            let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            let mut bytes = serde_json::to_vec_pretty(&v).expect("values serialize");
            bytes.push(b'\n');
            (EXIT_INVALID, bytes)
        }
    };
    if let Err(e) = write_output(&cli.output, &bytes) {
        eprintln!("histclaims: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
