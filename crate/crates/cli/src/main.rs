use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use soor_core::engine::{
    filter_items, load_suite, report_schema, requirement, run_suite, serialize_report, EngineError, Format,
    ItemSpec, SuiteConfig, BUILTIN_SUITES,
};
use soor_core::fixtures::{driver_fixture_names, MODEL_FIXTURES, PROBES};
use soor_core::temporal::catalog;

const CONFIG_ERROR: u8 = 3;

/// Run requirement suites against model fixtures.
#[derive(Debug, Parser)]
#[command(name = "soor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List templates, fixtures, probes and builtin suites.
    List {
        /// Only entries matching this glob.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run a suite and print its report.
    Verify(SuiteArgs),
    /// Print the natural-language text of every requirement in a suite.
    Render(SuiteArgs),
    /// Print the JSON report schema.
    ReportSchema,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// `builtin:<name>` or a path to a suite file.
    #[arg(long)]
    suite: String,
    /// Overrides every requirement's time boundary.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    time_boundary: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    /// Only items whose names match this glob.
    #[arg(long)]
    filter: Option<String>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Samples per driver and per probe.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Record per-item wall-clock milliseconds in the report.
    #[arg(long)]
    timings: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn items(args: &SuiteArgs) -> Result<Vec<ItemSpec>, EngineError> {
    let items = load_suite(&args.suite, |p| std::fs::read_to_string(p))?;
    match &args.filter {
        Some(f) => filter_items(items, f),
        None => Ok(items),
    }
}

fn list(filter: Option<&str>) -> Result<String, EngineError> {
    let pattern = filter
        .map(glob::Pattern::new)
        .transpose()
        .map_err(|e| EngineError::Filter(e.to_string()))?;
    let keep = |s: &str| pattern.as_ref().is_none_or(|p| p.matches(s));
    let mut out = String::new();
    let mut section = |title: &str, entries: Vec<String>| {
        let entries: Vec<String> = entries.into_iter().filter(|e| keep(e.split_whitespace().next().unwrap_or(""))).collect();
        if !entries.is_empty() {
            out.push_str(title);
            out.push_str(":\n");
            for e in entries {
                out.push_str("  ");
                out.push_str(&e);
                out.push('\n');
            }
        }
    };
    section(
        "templates",
        catalog()
            .into_iter()
            .map(|t| format!("{:<32} {}", t.name, t.text_skeleton))
            .collect(),
    );
    section("models", MODEL_FIXTURES.iter().map(|s| s.to_string()).collect());
    section("drivers", driver_fixture_names());
    section("probes", PROBES.iter().map(|s| s.to_string()).collect());
    section("suites", BUILTIN_SUITES.iter().map(|s| format!("builtin:{s}")).collect());
    Ok(out)
}

fn verify(args: &SuiteArgs) -> Result<(String, u8), EngineError> {
    let cfg = SuiteConfig {
        items: items(args)?,
        time_boundary: args.time_boundary,
        seed: args.seed,
        jobs: args.jobs,
        format: args.format,
        samples: args.samples,
        timings: args.timings,
    };
    let report = run_suite(&cfg)?;
    Ok((serialize_report(&report, cfg.format), report.exit_status() as u8))
}

fn render(args: &SuiteArgs) -> Result<String, EngineError> {
    let mut out = String::new();
    for item in items(args)? {
        if let ItemSpec::Requirement(e) = item {
            let mut r = (*requirement(&e)?).clone();
            if let Some(tb) = args.time_boundary {
                r = r.with_time_boundary(tb);
            }
            out.push_str(&r.render());
            out.push('\n');
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::List { filter } => list(filter.as_deref()).map(|s| (s, 0)),
        Command::Verify(args) => verify(args),
        Command::Render(args) => render(args).map(|s| (s, 0)),
        Command::ReportSchema => Ok((
            format!("{:#}\n", report_schema()),
            0,
        )),
    };
    match result {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(CONFIG_ERROR);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
