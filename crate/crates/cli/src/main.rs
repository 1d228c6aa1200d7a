//! `spdc-sim`: run the built-in interference scenarios and write plot-ready
//! CSV and JSON results.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use spdc_cli::config::{parse_config, Formats, ModeChoice, RunConfig};
use spdc_cli::emit::emit;
use spdc_core::{ParamValue, ScenarioKind};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "spdc-sim",
    about = "Simulator for parametric down-conversion interference experiments",
    version
)]
struct Cli {
    /// List the built-in scenarios and exit.
    #[arg(long)]
    list_scenarios: bool,

    /// Print the parameter table of one scenario and exit.
    #[arg(long, value_name = "SCENARIO")]
    explain: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario by name, or a config file by path.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario name (see --list-scenarios) or path to a config file.
    target: String,

    /// Parameter override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Rate mode: analytic, mc or poisson.
    #[arg(long)]
    mode: Option<String>,

    /// Monte Carlo trials per scan point (mc mode).
    #[arg(long)]
    trials: Option<u64>,

    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Counts per second per unit rate (poisson mode).
    #[arg(long)]
    scale: Option<f64>,

    /// Integration time per point in seconds (poisson mode).
    #[arg(long)]
    integration: Option<f64>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated output formats from {csv, json}.
    #[arg(long, value_name = "LIST")]
    format: Option<String>,
}

fn list_scenarios() {
    println!("{:<24} description", "scenario");
    for kind in ScenarioKind::all() {
        println!("{:<24} {}", kind.name(), kind.summary());
    }
}

fn explain(name: &str) -> Result<()> {
    let kind = ScenarioKind::parse(name)
        .with_context(|| format!("no scenario named {name:?}; try --list-scenarios"))?;
    println!("{} — {}\n", kind.name(), kind.summary());
    println!("{:<28} {:<12} description", "parameter", "default");
    for p in kind.params() {
        println!(
            "{:<28} {:<12} {}",
            p.key,
            p.default.to_value().to_string(),
            p.doc
        );
    }
    Ok(())
}

fn parse_override(text: &str) -> Result<(String, ParamValue)> {
    let Some((key, value)) = text.split_once('=') else {
        bail!("--set expects key=value, got {text:?}");
    };
    let value = value.trim();
    let parsed = if let Ok(i) = value.parse::<u64>() {
        ParamValue::Int(i)
    } else if let Ok(f) = value.parse::<f64>() {
        ParamValue::Float(f)
    } else {
        ParamValue::Text(value.to_string())
    };
    Ok((key.trim().to_string(), parsed))
}

fn build_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = if Path::new(&args.target).is_file() {
        let text = std::fs::read_to_string(&args.target)
            .with_context(|| format!("cannot read config file {}", args.target))?;
        parse_config(&text).with_context(|| format!("in config file {}", args.target))?
    } else if ScenarioKind::parse(&args.target).is_ok() {
        RunConfig::new(args.target.clone())
    } else {
        bail!(
            "{:?} is neither a scenario name nor a config file; try --list-scenarios",
            args.target
        );
    };

    for item in &args.set {
        config.overrides.push(parse_override(item)?);
    }
    if let Some(mode) = &args.mode {
        config.mode = ModeChoice::parse(mode)
            .with_context(|| format!("unknown mode {mode:?}; expected analytic, mc or poisson"))?;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(scale) = args.scale {
        config.scale = scale;
    }
    if let Some(integration) = args.integration {
        config.integration = integration;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if let Some(list) = &args.format {
        let mut formats = Formats {
            csv: false,
            json: false,
        };
        for part in list.split(',') {
            match part.trim() {
                "csv" => formats.csv = true,
                "json" => formats.json = true,
                other => bail!("unknown format {other:?}; expected csv and/or json"),
            }
        }
        config.formats = formats;
    }
    Ok(config)
}

fn run(args: &RunArgs) -> Result<i32> {
    let config = build_config(args)?;
    let scenario = config.to_scenario()?;
    let bundle = scenario.run()?;
    let files = emit(&bundle, &config)?;
    for file in &files {
        println!("wrote {}", file.display());
    }
    for report in &bundle.duality {
        let r = &report.report;
        println!(
            "{}: V = {:.6} ± {:.1e}, D = {:.6}, D²+V² = {:.6}{}",
            report.name,
            r.visibility,
            r.sigma_v,
            r.distinguishability,
            r.duality_sum,
            if r.violation { "  [VIOLATION]" } else { "" }
        );
    }
    if let Some(bad) = bundle.duality.iter().find(|r| r.report.violation) {
        eprintln!(
            "duality violation in report {:?}: D²+V² = {} exceeds 1 beyond 2σ",
            bad.name, bad.report.duality_sum
        );
        return Ok(1);
    }
    Ok(0)
}

fn main() {
    let cli = Cli::parse();
    if cli.list_scenarios {
        list_scenarios();
        return;
    }
    if let Some(name) = &cli.explain {
        if let Err(err) = explain(name) {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
        return;
    }
    match &cli.command {
        Some(Command::Run(args)) => match run(args) {
            Ok(code) => std::process::exit(code),
            Err(err) => {
                eprintln!("error: {err:#}");
                std::process::exit(2);
            }
        },
        None => {
            eprintln!("nothing to do; try `spdc-sim run <scenario>` or --list-scenarios");
            std::process::exit(2);
        }
    }
}
