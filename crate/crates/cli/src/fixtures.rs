//! Data files compiled into the binary.
//!
//! The race fixtures contain the published athletes; the remaining field is
//! made of synthetic athletes whose finishing positions are arranged so that
//! none of them interferes with the published standings.

use crate::error::{CliError, Result};

pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    /// Values between printed endpoints were filled in by a constant step.
    pub reconstructed: bool,
    pub contents: &'static str,
}

pub const ALL: &[Fixture] = &[
    Fixture {
        name: "table1",
        description: "IBU women's sprint, 7 races, 41 finishers",
        reconstructed: false,
        contents: include_str!("../fixtures/table1.csv"),
    },
    Fixture {
        name: "table2",
        description: "IBU women's sprint, 2 races, 41 finishers",
        reconstructed: false,
        contents: include_str!("../fixtures/table2.csv"),
    },
    Fixture {
        name: "table3",
        description: "125cc motorcycle Grand Prix 1999, 16 races, 28 riders",
        reconstructed: false,
        contents: include_str!("../fixtures/table3.csv"),
    },
    Fixture {
        name: "table4",
        description: "Diamond League men's 100m 2015, lag behind the world record (s)",
        reconstructed: false,
        contents: include_str!("../fixtures/table4.csv"),
    },
    Fixture {
        name: "ibu-scores",
        description: "IBU World Cup points, 41 positions",
        reconstructed: false,
        contents: include_str!("../fixtures/ibu_scores.csv"),
    },
    Fixture {
        name: "ibu-prize",
        description: "IBU World Cup prize money (EUR), 41 positions",
        reconstructed: false,
        contents: include_str!("../fixtures/ibu_prize.csv"),
    },
    Fixture {
        name: "pga-scores",
        description: "PGA TOUR points, 70 positions",
        reconstructed: true,
        contents: include_str!("../fixtures/pga_scores.csv"),
    },
    Fixture {
        name: "pga-prize",
        description: "PGA TOUR prize money (% of purse), 70 positions",
        reconstructed: true,
        contents: include_str!("../fixtures/pga_prize.csv"),
    },
    Fixture {
        name: "diamond-league",
        description: "Diamond League points, 9 positions",
        reconstructed: false,
        contents: include_str!("../fixtures/diamond_league.csv"),
    },
    Fixture {
        name: "moto125-1999",
        description: "Motorcycle Grand Prix points, 15 scoring positions",
        reconstructed: false,
        contents: include_str!("../fixtures/moto125_1999.csv"),
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

pub fn get(name: &str) -> Result<&'static str> {
    find(name).map(|f| f.contents).ok_or_else(|| {
        let known: Vec<&str> = ALL.iter().map(|f| f.name).collect();
        CliError::usage(format!(
            "unknown fixture `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_performance, parse_races, parse_score_vector, IngestOptions};

    #[test]
    fn every_fixture_parses() {
        for f in ALL {
            let ok = match f.name {
                "table4" => parse_performance(f.contents, None).is_ok(),
                n if n.starts_with("table") => {
                    parse_races(f.contents, IngestOptions::default()).is_ok()
                }
                _ => parse_score_vector(f.contents).is_ok(),
            };
            assert!(ok, "{}", f.name);
        }
    }

    #[test]
    fn vector_lengths() {
        let len = |name| parse_score_vector(get(name).unwrap()).unwrap().len();
        assert_eq!(len("ibu-scores"), 41);
        assert_eq!(len("ibu-prize"), 41);
        assert_eq!(len("pga-scores"), 70);
        assert_eq!(len("pga-prize"), 70);
        assert_eq!(len("diamond-league"), 9);
        assert_eq!(len("moto125-1999"), 15);
        assert!(get("table9").is_err());
    }
}
