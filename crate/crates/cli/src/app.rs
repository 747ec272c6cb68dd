//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use geoscore::axioms::{
    check_axiom, check_axiom_exhaustive, check_duality, AxiomId, SamplerConfig, TrialReport,
};
use geoscore::optimal::{
    calibrate_lambda, fit_geometric_with, normalize, normalized_geometric, optimal_scores,
    FitOptions, Lambda,
};
use geoscore::rules::catalog;
use geoscore::witness::{self, Side, Witness};
use geoscore::{
    aggregate, Athlete, GeometricParam, Profile, Scalar, ScoreTable, Tiebreak, TrimPolicy,
};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::fixtures;
use crate::ingest::{
    parse_performance, parse_races, parse_score_vector, parse_table, profile_to_json, read_source,
    IngestOptions, RaceFile,
};
use crate::replay::{replay, Episode};
use crate::report::{fixed, join_values, ranking_json, ranking_lines, round_to, Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "geoscore",
    version,
    about = "Rank athletes across races with positional scoring rules"
)]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for randomized checks; recorded in JSON output
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the score vectors a rule uses for one field size
    Scores {
        #[command(flatten)]
        rule: RuleArgs,
        /// Number of athletes
        #[arg(long)]
        size: usize,
    },
    /// Aggregate race results into an overall ranking
    Rank {
        /// Race results CSV or JSON profile (or fixture:NAME)
        input: String,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        ingest: IngestArgs,
        /// Show only the first N athletes
        #[arg(long)]
        top: Option<usize>,
        /// Also write the ingested profile as JSON
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Re-rank after deleting one athlete from every race
    Remove {
        input: String,
        #[command(flatten)]
        rule: RuleArgs,
        #[command(flatten)]
        ingest: IngestArgs,
        #[arg(long)]
        athlete: String,
        /// Exit with 1 unless the verdict matches
        #[arg(long, value_enum)]
        expect: Option<Change>,
    },
    /// Test axioms on random (or all small) profiles
    Check {
        #[command(flatten)]
        rule: RuleArgs,
        /// Axiom name, `all`, or `duality` (geometric rules only)
        #[arg(long, default_value = "all")]
        axiom: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Largest roster [default: 6, or 4 with --exhaustive]
        #[arg(long)]
        max_athletes: Option<usize>,
        /// Largest number of races [default: 8, or 4 with --exhaustive]
        #[arg(long)]
        max_races: Option<usize>,
        /// Enumerate every small profile instead of sampling
        #[arg(long)]
        exhaustive: bool,
        /// Exit with 1 unless every checked axiom holds (or is violated)
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Build a profile that exhibits a paradox and verify it
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
    /// Estimate optimal scores from per-race performances
    Optimal {
        /// Performance CSV (or fixture:NAME)
        input: String,
        /// Organiser's lambda; repeat for several
        #[arg(long = "lambda", required = true)]
        lambdas: Vec<f64>,
        /// Keep only the first K positions of each race
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Fit the geometric parameter closest to a score vector
    Fit {
        /// Score vector CSV (or fixture:NAME)
        input: String,
        /// Fit only the first K positions
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long, default_value_t = FitOptions::default().p_min)]
        p_min: f64,
        #[arg(long, default_value_t = FitOptions::default().p_max)]
        p_max: f64,
        #[arg(long, default_value_t = FitOptions::default().grid_points)]
        grid_points: usize,
    },
    /// Translate a lambda between events with different records
    Calibrate {
        /// Record of the reference event
        #[arg(long)]
        record: f64,
        /// Lambda used for the reference event
        #[arg(long)]
        lambda: f64,
        /// Record of the target event
        #[arg(long)]
        target: f64,
    },
    /// Recompute a bundled episode and check the published numbers
    Replay {
        #[arg(long, value_enum)]
        fixture: Episode,
    },
    /// List the bundled data files, or print one
    Fixtures { name: Option<String> },
}

#[derive(Debug, Subcommand)]
pub enum WitnessKind {
    /// Overall winner who never wins a race (finite geometric rules)
    NoRaceWin {
        #[arg(long)]
        p: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Majority loser ranked first (geometric rules with p > 1)
    MajorityLoserFirst {
        #[arg(long)]
        p: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Removing unanimous winners or losers flips two athletes
    Independence {
        #[command(flatten)]
        rule: RuleArgs,
        /// Athletes before removal
        #[arg(long)]
        size: usize,
        /// Athletes after removal
        #[arg(long)]
        field: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Winner)]
        side: SideArg,
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    Geometric,
    Borda,
    Plurality,
    Antiplurality,
    BordaPlusOne,
    TriangularPenalty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TrimArg {
    Bottom,
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TiebreakArg {
    None,
    Plurality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Change {
    Changed,
    Unchanged,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Holds,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Winner,
    Loser,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    /// Named rule; ignored when --table is given
    #[arg(long, value_enum, default_value_t = RuleKind::Geometric)]
    pub rule: RuleKind,
    /// Geometric parameter: 2, 0.5, 3/2, 0 or inf
    #[arg(long)]
    pub p: Option<String>,
    /// Score table: `position,score` CSV or JSON rounds (or fixture:NAME)
    #[arg(long, conflicts_with = "p")]
    pub table: Option<String>,
    /// How a CSV table shrinks for smaller fields
    #[arg(long, value_enum, default_value_t = TrimArg::Bottom)]
    pub trim: TrimArg,
    /// Break ties by race wins (overrides the table file)
    #[arg(long, value_enum)]
    pub tiebreak: Option<TiebreakArg>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Keep only athletes present in every race
    #[arg(long)]
    pub intersect: bool,
}

impl RuleArgs {
    fn geometric_param(&self) -> Result<Option<GeometricParam>> {
        match (&self.table, self.rule, &self.p) {
            (None, RuleKind::Geometric, Some(p)) => Ok(Some(p.parse()?)),
            (None, RuleKind::Geometric, None) => Err(CliError::usage(
                "--rule geometric needs --p (or pass --table)",
            )),
            (None, _, Some(_)) => Err(CliError::usage("--p only applies to --rule geometric")),
            _ => Ok(None),
        }
    }

    /// The score table for fields of up to `size` athletes.
    pub fn table(&self, size: usize) -> Result<ScoreTable> {
        let trim = match self.trim {
            TrimArg::Bottom => TrimPolicy::FromBottom,
            TrimArg::Top => TrimPolicy::FromTop,
        };
        let table = if let Some(source) = &self.table {
            parse_table(&read_source(source)?, trim)?
        } else if let Some(p) = self.geometric_param()? {
            ScoreTable::geometric(p)
        } else {
            match self.rule {
                RuleKind::Geometric => unreachable!("handled by geometric_param"),
                RuleKind::Borda => ScoreTable::borda(),
                RuleKind::Plurality => catalog::plurality(size),
                RuleKind::Antiplurality => catalog::antiplurality(size),
                RuleKind::BordaPlusOne => catalog::borda_plus_one(size),
                RuleKind::TriangularPenalty => catalog::triangular_penalty(size),
            }
        };
        Ok(match self.tiebreak {
            Some(TiebreakArg::Plurality) => table.with_tiebreak(Tiebreak::Plurality),
            Some(TiebreakArg::None) => table.with_tiebreak(Tiebreak::None),
            None => table,
        })
    }

    fn describe(&self) -> Value {
        json!({
            "rule": if self.table.is_some() { "table".to_string() } else {
                self.rule.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
            },
            "p": self.p,
            "table": self.table,
            "trim": format!("{:?}", self.trim).to_lowercase(),
            "tiebreak": self.tiebreak.map(|t| format!("{t:?}").to_lowercase()),
        })
    }
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let (format, seed) = (cli.format, cli.seed);
    match execute(cli) {
        Ok(report) => match report.render(format, seed) {
            Some(stdout) => Outcome {
                code: if report.passed() { 0 } else { 1 },
                stdout,
                stderr: report
                    .failures
                    .iter()
                    .map(|f| format!("assertion failed: {f}\n"))
                    .collect(),
            },
            None => Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: `{}` has no CSV output\n", report.command),
            },
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

pub fn execute(cli: Cli) -> Result<Report> {
    let seed = cli.seed;
    match cli.command {
        Command::Scores { rule, size } => scores(&rule, size),
        Command::Rank {
            input,
            rule,
            ingest,
            top,
            emit_profile,
        } => rank(&input, &rule, &ingest, top, emit_profile.as_deref()),
        Command::Remove {
            input,
            rule,
            ingest,
            athlete,
            expect,
        } => remove(&input, &rule, &ingest, &athlete, expect),
        Command::Check {
            rule,
            axiom,
            trials,
            max_athletes,
            max_races,
            exhaustive,
            expect,
        } => {
            let (default_m, default_n) = if exhaustive { (4, 4) } else { (6, 8) };
            let bounds = (
                max_athletes.unwrap_or(default_m),
                max_races.unwrap_or(default_n),
            );
            check(&rule, &axiom, trials, seed, bounds, exhaustive, expect)
        }
        Command::Witness { kind } => witness_command(kind),
        Command::Optimal {
            input,
            lambdas,
            top_k,
        } => optimal(&input, &lambdas, top_k),
        Command::Fit {
            input,
            top_k,
            p_min,
            p_max,
            grid_points,
        } => {
            let options = FitOptions {
                p_min,
                p_max,
                grid_points,
                ..FitOptions::default()
            };
            fit(&input, top_k, &options)
        }
        Command::Calibrate {
            record,
            lambda,
            target,
        } => calibrate(record, lambda, target),
        Command::Replay { fixture } => replay(fixture),
        Command::Fixtures { name } => list_fixtures(name.as_deref()),
    }
}

fn load_races(input: &str, ingest: &IngestArgs) -> Result<RaceFile> {
    parse_races(
        &read_source(input)?,
        IngestOptions {
            intersect: ingest.intersect,
        },
    )
}

fn write_profile(path: &Path, profile: &Profile, race_ids: Option<&[String]>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&profile_to_json(profile, race_ids))?;
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn set(report: &mut Report, key: &str, value: Value) {
    if let Value::Object(map) = &mut report.results {
        map.insert(key.to_string(), value);
    }
}

fn scores(rule: &RuleArgs, size: usize) -> Result<Report> {
    let mut report = Report::new("scores", json!({ "rule": rule.describe(), "size": size }));
    let table = rule.table(size)?;
    let rounds = table.rounds(size)?;
    report.line(format!("{table}, {size} athletes"));
    for (r, round) in rounds.iter().enumerate() {
        report.line(format!("round {}: {}", r + 1, join_values(round, " ")));
    }
    let mut csv = String::from("position");
    for r in 0..rounds.len() {
        csv.push_str(&format!(",round_{}", r + 1));
    }
    csv.push('\n');
    for j in 0..size {
        csv.push_str(&(j + 1).to_string());
        for round in &rounds {
            csv.push_str(&format!(",{}", round[j]));
        }
        csv.push('\n');
    }
    report.csv = Some(csv);
    let rounds_json: Vec<Vec<String>> = rounds
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();
    set(&mut report, "rounds", json!(rounds_json));
    Ok(report)
}

fn rank(
    input: &str,
    rule: &RuleArgs,
    ingest: &IngestArgs,
    top: Option<usize>,
    emit_profile: Option<&Path>,
) -> Result<Report> {
    let file = load_races(input, ingest)?;
    let profile = &file.profile;
    let table = rule.table(profile.num_athletes())?;
    let ranking = aggregate(profile, &table)?;
    let mut report = Report::new(
        "rank",
        json!({ "input": input, "rule": rule.describe(), "intersect": ingest.intersect }),
    );
    report.line(format!(
        "{} races, {} athletes, {table}",
        profile.num_races(),
        profile.num_athletes()
    ));
    if !file.dropped.is_empty() {
        report.line(format!(
            "dropped (not in every race): {}",
            join_values(&file.dropped, ", ")
        ));
    }
    for line in ranking_lines(&ranking, top) {
        report.line(line);
    }
    set(&mut report, "ranking", ranking_json(&ranking));
    let dropped: Vec<&str> = file.dropped.iter().map(Athlete::name).collect();
    set(&mut report, "dropped", json!(dropped));
    set(
        &mut report,
        "profile",
        profile_to_json(profile, Some(&file.race_ids)),
    );
    if let Some(path) = emit_profile {
        write_profile(path, profile, Some(&file.race_ids))?;
    }
    Ok(report)
}

fn remove(
    input: &str,
    rule: &RuleArgs,
    ingest: &IngestArgs,
    name: &str,
    expect: Option<Change>,
) -> Result<Report> {
    let file = load_races(input, ingest)?;
    let athlete = Athlete::new(name)?;
    if file.profile.index_of(&athlete).is_none() {
        return Err(CliError::data(format!(
            "athlete `{name}` is not in the profile"
        )));
    }
    let table = rule.table(file.profile.num_athletes())?;
    let before = aggregate(&file.profile, &table)?;
    let reduced = file.profile.remove_athlete(&athlete)?;
    let after = aggregate(&reduced, &table)?;
    let changed = before.order().without(&athlete) != *after.order();

    let mut report = Report::new(
        "remove",
        json!({ "input": input, "rule": rule.describe(), "athlete": name }),
    );
    report.line("before:");
    for line in ranking_lines(&before, None) {
        report.line(line);
    }
    report.line(format!("after removing {name}:"));
    for line in ranking_lines(&after, None) {
        report.line(line);
    }
    report.line(if changed { "CHANGED" } else { "UNCHANGED" });
    set(&mut report, "before", ranking_json(&before));
    set(&mut report, "after", ranking_json(&after));
    set(
        &mut report,
        "verdict",
        json!(if changed { "CHANGED" } else { "UNCHANGED" }),
    );
    if let Some(expect) = expect {
        let wanted = expect == Change::Changed;
        report.check(
            format!("expected {:?}", expect).to_lowercase(),
            changed == wanted,
        );
    }
    Ok(report)
}

fn race_lines(profile: &Profile) -> Vec<String> {
    let mut seen: Vec<(Vec<usize>, usize)> = Vec::new();
    for i in 0..profile.num_races() {
        let race = profile.race_indices(i).to_vec();
        match seen.iter_mut().find(|(r, _)| *r == race) {
            Some((_, count)) => *count += 1,
            None => seen.push((race, 1)),
        }
    }
    seen.iter()
        .map(|(race, count)| {
            let names: Vec<&str> = race.iter().map(|&i| profile.athlete(i).name()).collect();
            format!("  {count:>3} x {}", names.join(" > "))
        })
        .collect()
}

fn report_json(r: &TrialReport) -> Value {
    json!({
        "label": r.label,
        "trials": r.trials,
        "violations": r.violations,
        "vacuous": r.skipped,
        "first_violation_trial": r.first_violation_trial,
        "counterexample": r.first_counterexample.as_ref().map(|p| profile_to_json(p, None)),
    })
}

fn check(
    rule: &RuleArgs,
    axiom: &str,
    trials: usize,
    seed: u64,
    (max_athletes, max_races): (usize, usize),
    exhaustive: bool,
    expect: Option<Expect>,
) -> Result<Report> {
    let table = rule.table(max_athletes)?;
    let config = SamplerConfig::new(trials, seed, max_athletes, max_races);
    let mut report = Report::new(
        "check",
        json!({
            "rule": rule.describe(), "axiom": axiom, "trials": trials,
            "max_athletes": max_athletes, "max_races": max_races, "exhaustive": exhaustive,
        }),
    );
    report.line(format!("{table}"));
    let mut reports = Vec::new();
    if axiom == "duality" {
        if exhaustive {
            return Err(CliError::usage(
                "duality is checked on random profiles only",
            ));
        }
        let Some(p) = rule.geometric_param()? else {
            return Err(CliError::usage("duality needs a geometric rule (--p)"));
        };
        let dual = ScoreTable::geometric(p.reciprocal());
        report.line(format!("dual: {dual}"));
        reports.push(check_duality(&table, &dual, &config)?);
    } else {
        let axioms: Vec<AxiomId> = if axiom == "all" {
            AxiomId::ALL.to_vec()
        } else {
            vec![axiom
                .parse()
                .map_err(|e: geoscore::Error| CliError::usage(e.to_string()))?]
        };
        for id in axioms {
            reports.push(if exhaustive {
                check_axiom_exhaustive(&table, id, max_athletes, max_races)?
            } else {
                check_axiom(&table, id, &config)?
            });
        }
    }
    for r in &reports {
        report.line(r.to_string());
        if let Some(cex) = &r.first_counterexample {
            report.line("  counterexample:");
            for line in race_lines(cex) {
                report.line(format!("  {line}"));
            }
        }
    }
    set(
        &mut report,
        "reports",
        Value::Array(reports.iter().map(report_json).collect()),
    );
    if let Some(expect) = expect {
        for r in &reports {
            let ok = match expect {
                Expect::Holds => r.violations == 0,
                Expect::Violated => r.violations > 0,
            };
            report.check(format!("{} {:?}", r.label, expect).to_lowercase(), ok);
        }
    }
    Ok(report)
}

fn witness_command(kind: WitnessKind) -> Result<Report> {
    let (inputs, built, emit) = match kind {
        WitnessKind::NoRaceWin {
            p,
            size,
            emit_profile,
        } => {
            let param: GeometricParam = p.parse()?;
            let w = witness::no_race_win_winner(&param, size)?;
            (
                json!({ "kind": "no-race-win", "p": p, "size": size }),
                w,
                emit_profile,
            )
        }
        WitnessKind::MajorityLoserFirst {
            p,
            size,
            emit_profile,
        } => {
            let value = geoscore::scalar::parse_rational(&p)?;
            let w = witness::majority_loser_first(&value, size)?;
            (
                json!({ "kind": "majority-loser-first", "p": p, "size": size }),
                w,
                emit_profile,
            )
        }
        WitnessKind::Independence {
            rule,
            size,
            field,
            side,
            emit_profile,
        } => {
            let table = rule.table(size)?;
            let side = match side {
                SideArg::Winner => Side::Winner,
                SideArg::Loser => Side::Loser,
            };
            let w = witness::independence_violation(&table, size, field, side)?;
            let inputs = json!({
                "kind": "independence", "rule": rule.describe(), "size": size,
                "field": field, "side": side.to_string(),
            });
            (inputs, w, emit_profile)
        }
    };
    witness_report(inputs, &built, emit.as_deref())
}

fn witness_report(inputs: Value, w: &Witness, emit: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("witness", inputs);
    report.line(&w.claim);
    report.line(format!(
        "{} races, {} athletes (focus {}, rival {})",
        w.profile.num_races(),
        w.profile.num_athletes(),
        w.focus,
        w.rival
    ));
    for line in race_lines(&w.profile) {
        report.line(line);
    }
    report.line("ranking:");
    for line in ranking_lines(&w.verification.before, None) {
        report.line(line);
    }
    if let Some(after) = &w.verification.after {
        report.line("ranking after removal:");
        for line in ranking_lines(after, None) {
            report.line(line);
        }
    }
    report.check("witness verified by re-aggregation", w.verification.holds);
    set(&mut report, "claim", json!(w.claim));
    set(&mut report, "focus", json!(w.focus.name()));
    set(&mut report, "rival", json!(w.rival.name()));
    set(&mut report, "profile", profile_to_json(&w.profile, None));
    set(&mut report, "ranking", ranking_json(&w.verification.before));
    if let Some(after) = &w.verification.after {
        set(&mut report, "ranking_after", ranking_json(after));
    }
    if let Some(path) = emit {
        write_profile(path, &w.profile, None)?;
    }
    Ok(report)
}

fn optimal(input: &str, lambdas: &[f64], top_k: Option<usize>) -> Result<Report> {
    let file = parse_performance(&read_source(input)?, top_k)?;
    let mut report = Report::new(
        "optimal",
        json!({ "input": input, "lambdas": lambdas, "top_k": top_k }),
    );
    report.line(format!("{} races", file.table.num_races()));
    let mut csv = String::from("lambda,position,raw,normalized\n");
    let mut rows = Vec::new();
    for &value in lambdas {
        let lambda = Lambda::new(value)?;
        let raw = optimal_scores(&file.table, lambda)?;
        let normalized = normalize(&raw)?;
        let shown: Vec<String> = raw.iter().map(|x| fixed(*x, 2)).collect();
        let rounded: Vec<i64> = normalized.iter().map(|x| round_to(*x, 0) as i64).collect();
        report.line(format!("lambda {value}: raw {}", shown.join(" ")));
        report.line(format!(
            "lambda {value}: normalized {}",
            join_values(&rounded, " ")
        ));
        for (j, (r, n)) in raw.iter().zip(&normalized).enumerate() {
            csv.push_str(&format!("{value},{},{r},{n}\n", j + 1));
        }
        rows.push(json!({ "lambda": value, "raw": raw, "normalized": normalized }));
    }
    report.csv = Some(csv);
    set(&mut report, "scores", Value::Array(rows));
    Ok(report)
}

fn fit(input: &str, top_k: Option<usize>, options: &FitOptions) -> Result<Report> {
    let mut scores: Vec<f64> = parse_score_vector(&read_source(input)?)?
        .iter()
        .map(Scalar::to_f64)
        .collect();
    if let Some(k) = top_k {
        if k > scores.len() {
            return Err(CliError::data(format!(
                "top-k {k} exceeds the {} scores",
                scores.len()
            )));
        }
        scores.truncate(k);
    }
    let result = fit_geometric_with(&scores, options)?;
    let mut report = Report::new("fit", json!({ "input": input, "top_k": top_k }));
    if let Some(f) = input.strip_prefix("fixture:").and_then(fixtures::find) {
        if f.reconstructed {
            report.line(format!("note: `{}` is a reconstructed vector", f.name));
        }
    }
    report.line(format!("p = {}", fixed(result.p, 3)));
    report.line(format!("objective = {:.6e}", result.objective));
    let (first, last) = (scores[0], scores[scores.len() - 1]);
    let geometric = normalized_geometric(result.p.ln(), scores.len());
    let mut csv = String::from("position,score,geometric\n");
    for (j, (s, g)) in scores.iter().zip(&geometric).enumerate() {
        csv.push_str(&format!("{},{},{g}\n", j + 1, (s - last) / (first - last)));
    }
    report.csv = Some(csv);
    set(&mut report, "p", json!(result.p));
    set(&mut report, "objective", json!(result.objective));
    Ok(report)
}

fn calibrate(record: f64, lambda: f64, target: f64) -> Result<Report> {
    let result = calibrate_lambda(record, Lambda::new(lambda)?, target)?;
    let mut report = Report::new(
        "calibrate",
        json!({ "record": record, "lambda": lambda, "target": target }),
    );
    report.line(format!("lambda = {}", fixed(result.value(), 3)));
    set(&mut report, "lambda", json!(result.value()));
    Ok(report)
}

fn list_fixtures(name: Option<&str>) -> Result<Report> {
    let mut report = Report::new("fixtures", json!({ "name": name }));
    match name {
        Some(name) => {
            let contents = fixtures::get(name)?;
            report.text = contents.to_string();
            report.csv = Some(contents.to_string());
            set(&mut report, "contents", json!(contents));
        }
        None => {
            let mut listed = Vec::new();
            for f in fixtures::ALL {
                let flag = if f.reconstructed {
                    " [reconstructed]"
                } else {
                    ""
                };
                report.line(format!("{:<15} {}{flag}", f.name, f.description));
                listed.push(json!({
                    "name": f.name, "description": f.description, "reconstructed": f.reconstructed,
                }));
            }
            set(&mut report, "fixtures", Value::Array(listed));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use geoscore::Rational;

    fn rule(args: &[&str]) -> RuleArgs {
        #[derive(Parser)]
        struct Wrapper {
            #[command(flatten)]
            rule: RuleArgs,
        }
        let mut full = vec!["x"];
        full.extend_from_slice(args);
        Wrapper::parse_from(full).rule
    }

    #[test]
    fn rule_arguments_build_tables() {
        let table = rule(&["--p", "2"]).table(4).unwrap();
        assert_eq!(
            table.round_one(4).unwrap(),
            [8, 4, 2, 1].map(Rational::from_i64)
        );
        let table = rule(&["--rule", "borda-plus-one"]).table(4).unwrap();
        assert_eq!(
            table.round_one(4).unwrap(),
            [4, 3, 2, 0].map(Rational::from_i64)
        );
        let table = rule(&[
            "--table",
            "fixture:diamond-league",
            "--tiebreak",
            "plurality",
        ])
        .table(9)
        .unwrap();
        assert_eq!(table.tiebreak(), Tiebreak::Plurality);
        assert!(matches!(rule(&[]).table(3), Err(CliError::Usage(_))));
        assert!(matches!(
            rule(&["--rule", "borda", "--p", "2"]).table(3),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn repeated_races_are_condensed() {
        let profile = Profile::from_names(&[["a", "b"], ["b", "a"], ["a", "b"]]).unwrap();
        assert_eq!(race_lines(&profile), ["    2 x a > b", "    1 x b > a"]);
    }
}
