//! Command output in text, JSON or CSV form.

use std::fmt::Write as _;

use geoscore::{Athlete, Scalar, TotalRanking};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    /// Plot-ready rows; only some commands support it.
    Csv,
}

/// Result of one command. Commands that assert something list the failed
/// checks in `failures`; a non-empty list makes the process exit with 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub text: String,
    pub csv: Option<String>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            results: json!({}),
            text: String::new(),
            csv: None,
            failures: Vec::new(),
        }
    }

    pub fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    /// Records a check and prints it as `ok` or `FAILED`.
    pub fn check(&mut self, label: impl Into<String>, passed: bool) {
        let label = label.into();
        self.line(format!(
            "check {label}: {}",
            if passed { "ok" } else { "FAILED" }
        ));
        if !passed {
            self.failures.push(label);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self, seed: u64) -> Value {
        let mut results = self.results.clone();
        if let Value::Object(map) = &mut results {
            if !self.failures.is_empty() || map.contains_key("checks") {
                map.insert("failures".into(), json!(self.failures));
            }
        }
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": results,
            "provenance": { "seed": seed, "version": env!("CARGO_PKG_VERSION") },
        })
    }

    /// The output for `format`, or `None` when the command has no CSV form.
    pub fn render(&self, format: Format, seed: u64) -> Option<String> {
        match format {
            Format::Text => Some(self.text.clone()),
            Format::Json => {
                let mut out = serde_json::to_string_pretty(&self.to_json(seed)).expect("json");
                out.push('\n');
                Some(out)
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

/// Rounds half away from zero, treating values within `1e-9` of a tie as ties.
pub fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let scaled = x * scale;
    let nudged = scaled + scaled.signum() * 1e-9 * scaled.abs().max(1.0);
    let rounded = nudged.round() / scale;
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

pub fn fixed(x: f64, decimals: usize) -> String {
    format!("{:.*}", decimals, round_to(x, decimals as i32))
}

/// Competition place of `athlete`: one more than the number of athletes
/// ranked strictly above.
pub fn place<S: Scalar>(ranking: &TotalRanking<S>, athlete: &Athlete) -> Option<usize> {
    let group = ranking.rank_of(athlete)?;
    Some(
        1 + ranking.groups()[..group]
            .iter()
            .map(Vec::len)
            .sum::<usize>(),
    )
}

/// One line per athlete: place (with `=` for ties), name and totals per round.
pub fn ranking_lines<S: Scalar + std::fmt::Display>(
    ranking: &TotalRanking<S>,
    limit: Option<usize>,
) -> Vec<String> {
    let width = ranking
        .groups()
        .iter()
        .flatten()
        .map(|a| a.name().chars().count())
        .max()
        .unwrap_or(0);
    let mut lines = Vec::new();
    let mut place = 1;
    for group in ranking.groups() {
        let tied = if group.len() > 1 { "=" } else { " " };
        for athlete in group {
            if limit.is_some_and(|l| lines.len() >= l) {
                return lines;
            }
            let totals = ranking.totals(athlete).unwrap_or(&[]);
            let shown: Vec<String> = totals.iter().map(ToString::to_string).collect();
            let pad = width - athlete.name().chars().count();
            lines.push(format!(
                "{place:>4}{tied} {}{}  {}",
                athlete.name(),
                " ".repeat(pad),
                shown.join(" | ")
            ));
        }
        place += group.len();
    }
    lines
}

pub fn ranking_json<S: Scalar + std::fmt::Display>(ranking: &TotalRanking<S>) -> Value {
    let groups: Vec<Value> = ranking
        .groups()
        .iter()
        .map(|group| {
            let members: Vec<Value> = group
                .iter()
                .map(|a| {
                    let totals: Vec<String> = ranking
                        .totals(a)
                        .unwrap_or(&[])
                        .iter()
                        .map(ToString::to_string)
                        .collect();
                    json!({ "athlete": a.name(), "totals": totals })
                })
                .collect();
            Value::Array(members)
        })
        .collect();
    Value::Array(groups)
}

pub fn join_values<T: std::fmt::Display>(values: &[T], sep: &str) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use geoscore::{aggregate, Profile, Rational, ScoreTable};

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(fixed(-0.375, 2), "-0.38");
        assert_eq!(fixed(-3.57 / 6.0, 2), "-0.60");
        assert_eq!(fixed(0.125, 2), "0.13");
        assert_eq!(fixed(-0.001, 2), "0.00");
        assert_eq!(fixed(72.5, 0), "73");
    }

    #[test]
    fn places_skip_over_ties() {
        let profile = Profile::from_names(&[["a", "b", "c"], ["b", "a", "c"]]).unwrap();
        let ranking = aggregate(&profile, &ScoreTable::<Rational>::borda()).unwrap();
        let c = Athlete::new("c").unwrap();
        assert_eq!(place(&ranking, &c), Some(3));
        let lines = ranking_lines(&ranking, None);
        assert!(lines[0].starts_with("   1= a"), "{lines:?}");
        assert!(lines[2].starts_with("   3  c"), "{lines:?}");
        assert_eq!(ranking_lines(&ranking, Some(1)).len(), 1);
    }

    #[test]
    fn json_envelope() {
        let mut report = Report::new("demo", json!({"x": 1}));
        report.check("something", false);
        let value = report.to_json(7);
        assert_eq!(value["provenance"]["seed"], 7);
        assert_eq!(value["results"]["failures"][0], "something");
        assert!(report.render(Format::Csv, 0).is_none());
    }
}
