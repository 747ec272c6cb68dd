//! The bundled episodes, recomputed from the fixture data and checked
//! against the published numbers.

use std::cmp::Ordering;

use geoscore::aggregate::finishes_at;
use geoscore::optimal::{normalize, optimal_scores, Lambda};
use geoscore::witness::winner_without_race_win;
use geoscore::{aggregate, Athlete, Rational, Scalar, ScoreTable, TotalRanking, TrimPolicy};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::fixtures;
use crate::ingest::{parse_performance, parse_races, parse_score_vector, IngestOptions, RaceFile};
use crate::report::{fixed, join_values, place, round_to, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Episode {
    Table1,
    Table2,
    Table3,
    Table4,
}

impl Episode {
    pub fn name(self) -> &'static str {
        match self {
            Episode::Table1 => "table1",
            Episode::Table2 => "table2",
            Episode::Table3 => "table3",
            Episode::Table4 => "table4",
        }
    }
}

pub fn replay(episode: Episode) -> Result<Report> {
    let mut report = Report::new("replay", json!({ "fixture": episode.name() }));
    if let Some(f) = fixtures::find(episode.name()) {
        report.line(format!("replay {}: {}", f.name, f.description));
    }
    match episode {
        Episode::Table1 => table1(&mut report)?,
        Episode::Table2 => table2(&mut report)?,
        Episode::Table3 => table3(&mut report)?,
        Episode::Table4 => table4(&mut report)?,
    }
    report.line(if report.passed() {
        "all checks passed"
    } else {
        "some checks FAILED"
    });
    Ok(report)
}

fn athlete(name: &str) -> Athlete {
    Athlete::new(name).expect("non-empty")
}

fn races(name: &str) -> Result<RaceFile> {
    parse_races(fixtures::get(name)?, IngestOptions::default())
}

fn score_vector(name: &str) -> Result<Vec<Rational>> {
    parse_score_vector(fixtures::get(name)?)
}

fn total(ranking: &TotalRanking<Rational>, who: &Athlete) -> Result<Rational> {
    ranking
        .total(who)
        .cloned()
        .ok_or_else(|| CliError::data(format!("fixture lacks athlete `{who}`")))
}

/// Prints the featured athletes with place and total; returns their totals.
fn standings(
    report: &mut Report,
    key: &str,
    heading: &str,
    ranking: &TotalRanking<Rational>,
    featured: &[&str],
) -> Result<Vec<i64>> {
    report.line(heading);
    let width = featured
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(0);
    let mut totals = Vec::new();
    let mut rows = Vec::new();
    let mut featured = featured.to_vec();
    featured.sort_by_key(|name| place(ranking, &athlete(name)));
    for name in featured {
        let who = athlete(name);
        let value = total(ranking, &who)?;
        let place = place(ranking, &who).unwrap_or(0);
        let pad = width - name.chars().count();
        report.line(format!("  {place:>3}. {name}{}  {value}", " ".repeat(pad)));
        totals.push(value.to_integer().try_into().unwrap_or(i64::MIN));
        rows.push(json!({ "athlete": name, "place": place, "total": value.to_string() }));
    }
    if let Value::Object(map) = &mut report.results {
        map.insert(key.to_string(), Value::Array(rows));
    }
    Ok(totals)
}

fn table1(report: &mut Report) -> Result<()> {
    let file = races("table1")?;
    let table = ScoreTable::single(score_vector("ibu-scores")?, TrimPolicy::FromBottom)?
        .with_plurality_tiebreak();
    report.line(format!("score table: {table}"));
    let names = ["Mäkäräinen", "Domracheva", "Glazyrina"];
    let before = aggregate(&file.profile, &table)?;
    let totals = standings(report, "before", "before removal:", &before, &names)?;
    report.check("totals 348/347/190", totals == [348, 347, 190]);
    report.check(
        "Mäkäräinen ranked first",
        before.unique_top() == Some(&athlete(names[0])),
    );

    let removed = file.profile.remove_athlete(&athlete("Glazyrina"))?;
    let after = aggregate(&removed, &table)?;
    let totals = standings(
        report,
        "after",
        "after removing Glazyrina:",
        &after,
        &names[..2],
    )?;
    report.check("totals tie at 348", totals == [348, 348]);
    let wins = |name: &str| finishes_at(&removed, &athlete(name), 1).unwrap_or(0);
    report.line(format!(
        "race wins: Domracheva {}, Mäkäräinen {}",
        wins("Domracheva"),
        wins("Mäkäräinen")
    ));
    report.check(
        "plurality tie-break ranks Domracheva first",
        after.unique_top() == Some(&athlete("Domracheva")),
    );
    report.line("Domracheva overtakes Mäkäräinen");
    Ok(())
}

fn table2(report: &mut Report) -> Result<()> {
    let file = races("table2")?;
    let table = ScoreTable::single(score_vector("ibu-scores")?, TrimPolicy::FromBottom)?;
    report.line(format!("score table: {table}"));
    let names = [
        "Soukalová",
        "Domracheva",
        "Kuzmina",
        "Skardino",
        "Hildebrand",
    ];
    let before = aggregate(&file.profile, &table)?;
    let totals = standings(report, "before", "before removal:", &before, &names)?;
    report.check("totals 120/92/84/72/71", totals == [120, 92, 84, 72, 71]);

    let removed = file.profile.remove_athlete(&athlete("Soukalová"))?;
    let after = aggregate(&removed, &table)?;
    let order = ["Domracheva", "Kuzmina", "Hildebrand", "Skardino"];
    let totals = standings(report, "after", "after removing Soukalová:", &after, &order)?;
    report.check("totals 100/91/77/76", totals == [100, 91, 77, 76]);
    let (sk, hi) = (athlete("Skardino"), athlete("Hildebrand"));
    let overtakes = before.compare(&sk, &hi) == Some(Ordering::Greater)
        && after.compare(&hi, &sk) == Some(Ordering::Greater);
    report.check(
        "Hildebrand ranked above Skardino only after removal",
        overtakes,
    );
    report.line("Hildebrand overtakes Skardino");
    Ok(())
}

fn table3(report: &mut Report) -> Result<()> {
    let file = races("table3")?;
    let mut scores = score_vector("moto125-1999")?;
    let m = file.profile.num_athletes();
    if scores.len() < m {
        scores.resize(m, Rational::from_i64(0));
    }
    let table = ScoreTable::single(scores, TrimPolicy::FromBottom)?;
    report.line(format!("score table: {table}"));
    let names = ["Alzamora", "Melandri", "Azuma"];
    let ranking = aggregate(&file.profile, &table)?;
    let totals = standings(report, "standings", "final standings:", &ranking, &names)?;
    report.check("totals 227/226/190", totals == [227, 226, 190]);
    let wins: Vec<String> = names
        .iter()
        .map(|n| {
            format!(
                "{n} {}",
                finishes_at(&file.profile, &athlete(n), 1).unwrap_or(0)
            )
        })
        .collect();
    report.line(format!("race wins: {}", wins.join(", ")));
    let winner = winner_without_race_win(&file.profile, &table)?;
    report.check(
        "overall winner Alzamora never won a race",
        winner.as_ref() == Some(&athlete("Alzamora")),
    );
    if let Value::Object(map) = &mut report.results {
        map.insert(
            "winner_without_race_win".into(),
            json!(winner.map(|a| a.name().to_string())),
        );
    }
    Ok(())
}

const PUBLISHED_RAW_UNIT: [f64; 8] = [-0.28, -0.38, -0.43, -0.46, -0.49, -0.54, -0.60, -0.63];
const PUBLISHED_NORMALIZED_UNIT: [i64; 8] = [100, 73, 59, 49, 42, 27, 11, 0];
const PUBLISHED_NORMALIZED_HUNDRED: [i64; 8] = [100, 51, 34, 26, 20, 11, 5, 0];
/// Published raw values carry two decimals.
pub const RAW_TOLERANCE: f64 = 0.005 + 1e-12;

fn table4(report: &mut Report) -> Result<()> {
    let file = parse_performance(fixtures::get("table4")?, Some(8))?;
    report.line(format!("races: {}", file.race_ids.join(", ")));
    let mut results = serde_json::Map::new();
    for (lambda, published) in [
        (1.0, PUBLISHED_NORMALIZED_UNIT),
        (100.0, PUBLISHED_NORMALIZED_HUNDRED),
    ] {
        let raw = optimal_scores(&file.table, Lambda::new(lambda)?)?;
        let normalized: Vec<i64> = normalize(&raw)?
            .iter()
            .map(|x| round_to(*x, 0) as i64)
            .collect();
        let shown: Vec<String> = raw.iter().map(|x| fixed(*x, 2)).collect();
        report.line(format!("lambda {lambda}: raw {}", shown.join(" ")));
        report.line(format!(
            "lambda {lambda}: normalized {}",
            join_values(&normalized, " ")
        ));
        report.check(
            format!("lambda {lambda} normalized scores"),
            normalized == published,
        );
        if lambda == 1.0 {
            let worst = raw
                .iter()
                .zip(PUBLISHED_RAW_UNIT)
                .map(|(x, p)| (x - p).abs())
                .fold(0.0, f64::max);
            report.check("lambda 1 raw scores within 0.005", worst <= RAW_TOLERANCE);
        }
        results.insert(
            format!("lambda_{lambda}"),
            json!({ "raw": raw, "normalized": normalized }),
        );
    }
    if let Value::Object(map) = &mut report.results {
        map.extend(results);
    }
    Ok(())
}
