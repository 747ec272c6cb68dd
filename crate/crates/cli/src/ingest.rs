//! CSV and JSON input formats.
//!
//! Race results: `race_id,position,athlete`. Performances:
//! `race_id,position,performance`. Score vectors: `position,score`.
//! Lines starting with `#` are comments. Profiles and score tables can also
//! be given as JSON.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use geoscore::optimal::PerformanceTable;
use geoscore::scalar::parse_rational;
use geoscore::{Athlete, Profile, RaceRanking, Rational, ScoreTable, Tiebreak, TrimPolicy};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::fixtures;

/// Reads a file, or a bundled fixture when `source` is `fixture:NAME`.
pub fn read_source(source: &str) -> Result<String> {
    if let Some(name) = source.strip_prefix("fixture:") {
        return fixtures::get(name).map(str::to_string);
    }
    fs::read_to_string(source).map_err(|source_err| CliError::Io {
        path: source.into(),
        source: source_err,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Keep only athletes present in every race instead of failing.
    pub intersect: bool,
}

/// A profile together with the race labels it was read with.
#[derive(Clone, Debug, PartialEq)]
pub struct RaceFile {
    pub profile: Profile,
    pub race_ids: Vec<String>,
    /// Athletes dropped by `intersect`, sorted.
    pub dropped: Vec<Athlete>,
}

pub fn ingest_races(path: &Path, options: IngestOptions) -> Result<RaceFile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_races(&text, options)
}

/// Parses race results given as CSV or as a JSON profile.
pub fn parse_races(text: &str, options: IngestOptions) -> Result<RaceFile> {
    let text = text.trim_start_matches('\u{feff}');
    if text.trim().is_empty() {
        return Err(CliError::data("empty input: no races"));
    }
    let races = if text.trim_start().starts_with('{') {
        races_from_json(text)?
    } else {
        races_from_csv(text)?
    };
    assemble(races, options)
}

#[derive(Deserialize)]
struct RaceRow {
    race_id: String,
    position: usize,
    athlete: String,
}

#[derive(Deserialize)]
struct PerformanceRow {
    race_id: String,
    position: usize,
    performance: f64,
}

#[derive(Deserialize)]
struct ScoreRow {
    position: usize,
    score: String,
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if !header.iter().eq(expected.iter().copied()) {
        return Err(CliError::data(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Rows grouped per race in order of first appearance, keyed by position.
struct Grouped<T> {
    races: Vec<(String, BTreeMap<usize, T>)>,
    index: HashMap<String, usize>,
}

impl<T> Grouped<T> {
    fn new() -> Self {
        Grouped {
            races: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn insert(&mut self, race_id: String, position: usize, value: T) -> Result<()> {
        let slot = match self.index.get(&race_id) {
            Some(&i) => i,
            None => {
                self.index.insert(race_id.clone(), self.races.len());
                self.races.push((race_id.clone(), BTreeMap::new()));
                self.races.len() - 1
            }
        };
        if self.races[slot].1.insert(position, value).is_some() {
            return Err(CliError::data(format!(
                "race `{race_id}`: position {position} appears more than once"
            )));
        }
        Ok(())
    }

    /// Checks that each race uses exactly the positions `1..=k`.
    fn into_ordered(self) -> Result<Vec<(String, Vec<T>)>> {
        if self.races.is_empty() {
            return Err(CliError::data("no races in input"));
        }
        self.races
            .into_iter()
            .map(|(id, entries)| {
                let mut values = Vec::with_capacity(entries.len());
                for (expected, (position, value)) in (1..).zip(entries) {
                    if position != expected {
                        return Err(CliError::data(if expected == 1 {
                            format!("race `{id}`: positions must start at 1, first is {position}")
                        } else {
                            format!(
                                "race `{id}`: gap in positions, {} is followed by {position}",
                                expected - 1
                            )
                        }));
                    }
                    values.push(value);
                }
                Ok((id, values))
            })
            .collect()
    }
}

fn races_from_csv(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, &["race_id", "position", "athlete"])?;
    let mut grouped = Grouped::new();
    for row in reader.deserialize() {
        let row: RaceRow = row?;
        grouped.insert(row.race_id, row.position, row.athlete)?;
    }
    grouped.into_ordered()
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    races: Vec<RaceDoc>,
}

#[derive(Serialize, Deserialize)]
struct RaceDoc {
    id: String,
    order: Vec<String>,
}

/// Accepts a bare profile document or a command report whose results hold one.
fn races_from_json(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    let value: Value = serde_json::from_str(text)?;
    let doc = if value.get("races").is_some() {
        value
    } else if let Some(inner) = value.pointer("/results/profile") {
        inner.clone()
    } else {
        return Err(CliError::data("JSON input has no `races` array"));
    };
    let doc: ProfileDoc = serde_json::from_value(doc)?;
    if doc.races.is_empty() {
        return Err(CliError::data("no races in input"));
    }
    Ok(doc.races.into_iter().map(|r| (r.id, r.order)).collect())
}

fn assemble(races: Vec<(String, Vec<String>)>, options: IngestOptions) -> Result<RaceFile> {
    for (id, order) in &races {
        let mut seen = BTreeSet::new();
        for name in order {
            if !seen.insert(name) {
                return Err(CliError::data(format!(
                    "race `{id}`: athlete `{name}` appears more than once"
                )));
            }
        }
    }
    let sets: Vec<BTreeSet<&String>> = races.iter().map(|(_, o)| o.iter().collect()).collect();
    let common: BTreeSet<&String> = sets.iter().skip(1).fold(sets[0].clone(), |acc, s| {
        acc.intersection(s).copied().collect()
    });

    let mut dropped = Vec::new();
    if options.intersect {
        let all: BTreeSet<&String> = sets.iter().flatten().copied().collect();
        dropped = all
            .difference(&common)
            .map(|name| Athlete::new(name.as_str()))
            .collect::<geoscore::Result<Vec<_>>>()?;
        if common.is_empty() {
            return Err(CliError::data("no athlete takes part in every race"));
        }
    } else {
        let (first_id, _) = &races[0];
        for ((id, _), set) in races.iter().zip(&sets).skip(1) {
            if let Some(name) = set.difference(&sets[0]).next() {
                return Err(CliError::data(format!(
                    "athlete `{name}` in race `{id}` is missing from race `{first_id}` \
                     (use --intersect to keep the common athletes)"
                )));
            }
            if let Some(name) = sets[0].difference(set).next() {
                return Err(CliError::data(format!(
                    "athlete `{name}` is missing from race `{id}` \
                     (use --intersect to keep the common athletes)"
                )));
            }
        }
    }

    let race_ids = races.iter().map(|(id, _)| id.clone()).collect();
    let rankings = races
        .iter()
        .map(|(_, order)| {
            let kept: Vec<&String> = order.iter().filter(|n| common.contains(n)).collect();
            RaceRanking::from_names(&kept)
        })
        .collect::<geoscore::Result<Vec<_>>>()?;
    Ok(RaceFile {
        profile: Profile::new(rankings)?,
        race_ids,
        dropped,
    })
}

/// JSON form of a profile, re-readable by [`parse_races`]. Races without a
/// label are called `R1`, `R2`, ...
pub fn profile_to_json(profile: &Profile, race_ids: Option<&[String]>) -> Value {
    let races = profile
        .races()
        .enumerate()
        .map(|(i, race)| RaceDoc {
            id: race_ids
                .and_then(|ids| ids.get(i).cloned())
                .unwrap_or_else(|| format!("R{}", i + 1)),
            order: race.order().iter().map(|a| a.name().to_string()).collect(),
        })
        .collect();
    serde_json::to_value(ProfileDoc { races }).expect("profile serializes")
}

/// Per-race performances with their labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PerformanceFile {
    pub table: PerformanceTable,
    pub race_ids: Vec<String>,
}

pub fn ingest_performance(path: &Path, top_k: Option<usize>) -> Result<PerformanceFile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_performance(&text, top_k)
}

/// Parses performances, keeping the first `top_k` positions of each race.
/// Without `top_k` every race must have the same length.
pub fn parse_performance(text: &str, top_k: Option<usize>) -> Result<PerformanceFile> {
    if text.trim().is_empty() {
        return Err(CliError::data("empty input: no races"));
    }
    let mut reader = csv_reader(text.trim_start_matches('\u{feff}'));
    check_header(&mut reader, &["race_id", "position", "performance"])?;
    let mut grouped = Grouped::new();
    for row in reader.deserialize() {
        let row: PerformanceRow = row?;
        if !row.performance.is_finite() {
            return Err(CliError::data(format!(
                "race `{}`: performance at position {} is not finite",
                row.race_id, row.position
            )));
        }
        grouped.insert(row.race_id, row.position, row.performance)?;
    }
    let races = grouped.into_ordered()?;
    let shortest = races.iter().map(|(_, v)| v.len()).min().unwrap_or(0);
    let longest = races.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    match top_k {
        Some(k) if k > shortest => {
            let (id, _) = races
                .iter()
                .find(|(_, v)| v.len() == shortest)
                .expect("non-empty");
            return Err(CliError::data(format!(
                "top-k {k} exceeds the {shortest} positions of race `{id}`"
            )));
        }
        None if shortest != longest => {
            return Err(CliError::data(format!(
                "races have between {shortest} and {longest} positions; pass a top-k to truncate"
            )));
        }
        _ => {}
    }
    let race_ids = races.iter().map(|(id, _)| id.clone()).collect();
    let table =
        PerformanceTable::new(races.into_iter().map(|(_, v)| v).collect())?.with_top_k(top_k)?;
    Ok(PerformanceFile { table, race_ids })
}

/// Parses a `position,score` vector with exact values.
pub fn parse_score_vector(text: &str) -> Result<Vec<Rational>> {
    if text.trim().is_empty() {
        return Err(CliError::data("empty score vector"));
    }
    let mut reader = csv_reader(text.trim_start_matches('\u{feff}'));
    check_header(&mut reader, &["position", "score"])?;
    let mut grouped = Grouped::new();
    for row in reader.deserialize() {
        let row: ScoreRow = row?;
        grouped.insert(
            String::from("scores"),
            row.position,
            parse_rational(&row.score)?,
        )?;
    }
    let (_, scores) = grouped.into_ordered()?.pop().expect("one group");
    Ok(scores)
}

pub fn score_vector_to_csv(scores: &[Rational]) -> String {
    let mut out = String::from("position,score\n");
    for (j, s) in scores.iter().enumerate() {
        out.push_str(&format!("{},{}\n", j + 1, s));
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    rounds: Vec<Vec<Value>>,
    #[serde(default)]
    trim: Option<String>,
    #[serde(default)]
    tiebreak: Option<String>,
}

fn json_number(value: &Value) -> Result<Rational> {
    match value {
        Value::Number(n) => Ok(parse_rational(&n.to_string())?),
        Value::String(s) => Ok(parse_rational(s)?),
        other => Err(CliError::data(format!("score `{other}` is not a number"))),
    }
}

/// Parses a score table: a `position,score` CSV (one round) or a JSON
/// document `{"rounds": [[...], ...], "trim": "bottom", "tiebreak": "none"}`.
///
/// `trim` applies to CSV input and to JSON documents that do not set one.
pub fn parse_table(text: &str, trim: TrimPolicy) -> Result<ScoreTable> {
    let text = text.trim_start_matches('\u{feff}');
    if !text.trim_start().starts_with('{') {
        return Ok(ScoreTable::single(parse_score_vector(text)?, trim)?);
    }
    let doc: TableDoc = serde_json::from_str(text)?;
    let rounds = doc
        .rounds
        .iter()
        .map(|round| round.iter().map(json_number).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let trim = match doc.trim {
        Some(t) => t.parse()?,
        None => trim,
    };
    let tiebreak: Tiebreak = match doc.tiebreak {
        Some(t) => t.parse()?,
        None => Tiebreak::None,
    };
    Ok(ScoreTable::explicit(rounds, trim)?.with_tiebreak(tiebreak))
}

#[cfg(test)]
mod tests {
    use super::*;
    use geoscore::Scalar;

    const SMALL: &str = "race_id,position,athlete\n\
                         r1,1,a\nr1,2,b\nr1,3,c\n\
                         r2,2,a\nr2,1,c\nr2,3,b\n";

    #[test]
    fn reads_races_in_order_of_appearance() {
        let file = parse_races(SMALL, IngestOptions::default()).unwrap();
        assert_eq!(file.race_ids, ["r1", "r2"]);
        assert_eq!(
            file.profile,
            Profile::from_names(&[["a", "b", "c"], ["c", "a", "b"]]).unwrap()
        );
    }

    #[test]
    fn rejects_malformed_races() {
        let cases = [
            ("", "empty"),
            ("race_id,position,athlete\n", "no races"),
            ("race_id,position,athlete\nr,1,a\nr,2,b\nr,4,c\n", "gap"),
            ("race_id,position,athlete\nr,2,a\nr,3,b\n", "start at 1"),
            ("race_id,position,athlete\nr,1,a\nr,1,b\n", "more than once"),
            ("race_id,position,athlete\nr,1,a\nr,2,a\n", "more than once"),
            ("race,position,athlete\nr,1,a\n", "header"),
            (
                "race_id,position,athlete\nr1,1,a\nr1,2,b\nr2,1,a\nr2,2,c\n",
                "missing",
            ),
        ];
        for (text, needle) in cases {
            let err = parse_races(text, IngestOptions::default())
                .unwrap_err()
                .to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
        assert!(parse_races(
            "race_id,position,athlete\nr,x,a\n",
            IngestOptions::default()
        )
        .is_err());
    }

    #[test]
    fn intersect_reranks_common_athletes() {
        let text = "race_id,position,athlete\n\
                    r1,1,a\nr1,2,x\nr1,3,b\n\
                    r2,1,y\nr2,2,b\nr2,3,a\n";
        let file = parse_races(text, IngestOptions { intersect: true }).unwrap();
        assert_eq!(
            file.profile,
            Profile::from_names(&[["a", "b"], ["b", "a"]]).unwrap()
        );
        let dropped: Vec<&str> = file.dropped.iter().map(Athlete::name).collect();
        assert_eq!(dropped, ["x", "y"]);
        let disjoint = "race_id,position,athlete\nr1,1,a\nr2,1,b\n";
        assert!(parse_races(disjoint, IngestOptions { intersect: true }).is_err());
    }

    #[test]
    fn quoted_names_and_comments() {
        let text = "# results\nrace_id,position,athlete\nr,1,\"Smith, J\"\nr,2,Doe\n";
        let file = parse_races(text, IngestOptions::default()).unwrap();
        assert_eq!(file.profile.athlete(0).name(), "Smith, J");
    }

    #[test]
    fn json_profiles_round_trip() {
        let file = parse_races(SMALL, IngestOptions::default()).unwrap();
        let json = profile_to_json(&file.profile, Some(&file.race_ids));
        let again = parse_races(&json.to_string(), IngestOptions::default()).unwrap();
        assert_eq!(again, file);
        let wrapped = serde_json::json!({ "command": "x", "results": { "profile": json } });
        assert_eq!(
            parse_races(&wrapped.to_string(), IngestOptions::default()).unwrap(),
            file
        );
    }

    #[test]
    fn performance_truncation() {
        let text = "race_id,position,performance\n\
                    a,1,-0.1\na,2,-0.2\na,3,-0.3\n\
                    b,1,-0.5\nb,2,-0.6\n";
        let file = parse_performance(text, Some(2)).unwrap();
        assert_eq!(file.table.num_races(), 2);
        assert!(file.table.races().all(|r| r.len() == 2));
        assert!(parse_performance(text, Some(3))
            .unwrap_err()
            .to_string()
            .contains("top-k 3"));
        assert!(parse_performance(text, None).is_err());
        let one =
            parse_performance("race_id,position,performance\nr,1,2.5\nr,2,1\n", None).unwrap();
        assert_eq!(one.table.num_races(), 1);
        assert!(parse_performance("race_id,position,performance\nr,1,NaN\nr,2,1\n", None).is_err());
    }

    #[test]
    fn score_vectors_are_exact() {
        let v = parse_score_vector("position,score\n2,0.1\n1,1/3\n3,0\n").unwrap();
        assert_eq!(
            v,
            [
                Rational::new(1.into(), 3.into()),
                Rational::new(1.into(), 10.into()),
                Rational::from_i64(0)
            ]
        );
        let csv = score_vector_to_csv(&v);
        assert_eq!(parse_score_vector(&csv).unwrap(), v);
    }

    #[test]
    fn table_documents() {
        let doc = r#"{"rounds": [[3, 2, "1/2", 0], [1, 0, 0, 0]], "trim": "top", "tiebreak": "plurality"}"#;
        let table = parse_table(doc, TrimPolicy::FromBottom).unwrap();
        assert_eq!(table.trim_policy(), TrimPolicy::FromTop);
        assert_eq!(table.tiebreak(), Tiebreak::Plurality);
        // Two given rounds plus the plurality tie-break round.
        assert_eq!(table.rounds(4).unwrap().len(), 3);
        assert!(parse_table(r#"{"rounds": [[0, 1]]}"#, TrimPolicy::FromBottom).is_err());
        assert!(parse_table(
            r#"{"rounds": [[1, 0]], "extra": 1}"#,
            TrimPolicy::FromBottom
        )
        .is_err());
        let csv = parse_table("position,score\n1,5\n2,1\n", TrimPolicy::FromBottom).unwrap();
        assert_eq!(csv.round_one(2).unwrap(), [5, 1].map(Rational::from_i64));
    }
}
