//! Reports and their json, markdown and plain renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adt::DriverReport;
use crate::kernel::{Failure, Outcome, Trace, Witness};

/// Witness traces in human formats show at most this many steps.
pub const HUMAN_TRACE_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Markdown,
    Plain,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            "plain" | "text" => Ok(Format::Plain),
            other => Err(format!("unknown format `{other}` (json, markdown, plain)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Requirement,
    Drivers,
    Probe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub name: String,
    pub kind: ItemKind,
    /// Template, driver fixture or probe the item was built from.
    pub template: String,
    pub verdict: Outcome,
    pub witness: Option<Witness>,
    /// Natural-language text of a requirement; `None` for drivers and probes.
    pub rendering: Option<String>,
    pub millis: u64,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<DriverReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub holds: usize,
    pub violated: usize,
    pub bound_exhausted: usize,
    pub precondition_unmet: usize,
}

impl Totals {
    pub fn of<'a>(outcomes: impl IntoIterator<Item = &'a Outcome>) -> Self {
        let mut t = Totals::default();
        for o in outcomes {
            match o {
                Outcome::Holds => t.holds += 1,
                Outcome::Violated => t.violated += 1,
                Outcome::BoundExhausted => t.bound_exhausted += 1,
                Outcome::PreconditionUnmet => t.precondition_unmet += 1,
            }
        }
        t
    }

    pub fn sum(&self) -> usize {
        self.holds + self.violated + self.bound_exhausted + self.precondition_unmet
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub items: Vec<ItemReport>,
    pub totals: Totals,
}

impl Report {
    pub fn new(seed: u64, items: Vec<ItemReport>) -> Self {
        let totals = Totals::of(items.iter().map(|i| &i.verdict));
        Report { seed, items, totals }
    }

    /// 1 if anything is violated, else 2 if a bound was exhausted, else 0.
    pub fn exit_status(&self) -> i32 {
        if self.totals.violated > 0 {
            1
        } else if self.totals.bound_exhausted > 0 {
            2
        } else {
            0
        }
    }
}

pub fn serialize_report(rep: &Report, fmt: Format) -> String {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rep).unwrap_or_else(|e| unreachable!("report serializes: {e}"));
            s.push('\n');
            s
        }
        Format::Markdown => markdown(rep),
        Format::Plain => plain(rep),
    }
}

pub fn deserialize_report(json: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(json)
}

fn bits(column: impl Iterator<Item = bool>) -> String {
    column.map(|b| if b { '1' } else { '.' }).collect()
}

/// A window of at most [`HUMAN_TRACE_LIMIT`] steps that contains the witness step.
fn trace_lines(trace: &Trace, step: usize) -> Vec<String> {
    let shown = trace.len().min(HUMAN_TRACE_LIMIT);
    let start = step.saturating_sub(shown * 4 / 5).min(trace.len() - shown);
    let end = start + shown;
    let width = trace.conditions().iter().map(String::len).max().unwrap_or(0);
    let mut out = vec![format!(
        "steps {start}..{end} of {}, witness at step {step}{}",
        trace.len(),
        if trace.len() > shown { " (truncated)" } else { "" }
    )];
    for (c, name) in trace.conditions().iter().enumerate() {
        let col = trace.steps()[start..end].iter().map(|v| v[c]);
        out.push(format!("{name:>width$} {}", bits(col)));
    }
    out
}

fn witness_lines(w: &Witness) -> Vec<String> {
    match w {
        Witness::Trace { trace, step } => trace_lines(trace, *step),
        Witness::Input { slots } => slots.iter().map(|(k, v)| format!("{k} = {v}")).collect(),
    }
}

fn markdown(rep: &Report) -> String {
    let t = &rep.totals;
    let mut s = format!(
        "# Verification report\n\nseed {}: {} holds, {} violated, {} bound exhausted, {} precondition unmet\n",
        rep.seed, t.holds, t.violated, t.bound_exhausted, t.precondition_unmet
    );
    for item in &rep.items {
        let _ = write!(s, "\n## {}\n\n- verdict: **{}**\n- from: `{}`\n", item.name, item.verdict, item.template);
        if let Some(r) = &item.rendering {
            let _ = writeln!(s, "- requirement: {r}");
        }
        if let Some(f) = item.failure {
            let _ = writeln!(s, "- failure: {}", f.as_str());
        }
        let _ = writeln!(s, "- {}", item.message);
        if !item.details.is_empty() {
            s.push_str("\n| driver | kind | verdict | evaluated | discarded |\n|---|---|---|---|---|\n");
            for d in &item.details {
                let _ = writeln!(
                    s,
                    "| {} | {:?} | {} | {} | {} |",
                    d.driver, d.kind, d.outcome, d.evaluated, d.discarded
                );
            }
        }
        if let Some(w) = &item.witness {
            s.push_str("\n```\n");
            for line in witness_lines(w) {
                s.push_str(&line);
                s.push('\n');
            }
            s.push_str("```\n");
        }
    }
    s
}

fn plain(rep: &Report) -> String {
    let mut s = String::new();
    for item in &rep.items {
        let _ = writeln!(s, "{:<20} {}: {}", item.verdict.as_str(), item.name, item.message);
        if let Some(r) = &item.rendering {
            let _ = writeln!(s, "    {r}");
        }
        if let Some(w) = &item.witness {
            for line in witness_lines(w) {
                let _ = writeln!(s, "    {line}");
            }
        }
    }
    let t = &rep.totals;
    let _ = writeln!(
        s,
        "totals: {} holds, {} violated, {} bound_exhausted, {} precondition_unmet",
        t.holds, t.violated, t.bound_exhausted, t.precondition_unmet
    );
    s
}

/// Stable JSON keys of a report, for the `report-schema` command.
pub fn report_schema() -> serde_json::Value {
    serde_json::json!({
        "type": "object",
        "required": ["seed", "items", "totals"],
        "properties": {
            "seed": {"type": "integer"},
            "totals": {
                "type": "object",
                "required": ["holds", "violated", "bound_exhausted", "precondition_unmet"]
            },
            "items": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["name", "kind", "template", "verdict", "witness", "rendering", "millis", "message"],
                    "properties": {
                        "name": {"type": "string"},
                        "kind": {"enum": ["requirement", "drivers", "probe"]},
                        "template": {"type": "string"},
                        "verdict": {"enum": ["holds", "violated", "bound_exhausted", "precondition_unmet"]},
                        "witness": {
                            "oneOf": [
                                {"type": "null"},
                                {"type": "object", "required": ["trace"], "description": "{trace: {conditions, steps}, step}"},
                                {"type": "object", "required": ["input"], "description": "{input: {slots}}"}
                            ]
                        },
                        "rendering": {"type": ["string", "null"]},
                        "millis": {"type": "integer", "description": "0 unless timings are requested"},
                        "message": {"type": "string"},
                        "failure": {"enum": ["postcondition", "frame", "guard", "variant", "pattern", "underspecified"]},
                        "iterations": {"type": "integer"},
                        "details": {"type": "array", "description": "one entry per driver"}
                    }
                }
            }
        }
    })
}
