//! Athletes, single-race rankings and profiles over a common roster.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// An athlete label, unique within a profile.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Athlete(String);

impl Athlete {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyName);
        }
        Ok(Athlete(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Athlete {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The finishing order of one race, best first. No ties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaceRanking {
    order: Vec<Athlete>,
}

impl RaceRanking {
    pub fn new(order: Vec<Athlete>) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let mut seen = BTreeMap::new();
        for athlete in &order {
            if seen.insert(athlete, ()).is_some() {
                return Err(Error::DuplicateAthlete(athlete.name().to_string()));
            }
        }
        Ok(RaceRanking { order })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let order = names
            .iter()
            .map(|n| Athlete::new(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(order)
    }

    pub fn order(&self) -> &[Athlete] {
        &self.order
    }

    /// 1-based finishing position.
    pub fn position_of(&self, athlete: &Athlete) -> Option<usize> {
        self.order.iter().position(|a| a == athlete).map(|i| i + 1)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// `n >= 1` races over a roster of `m >= 1` athletes.
///
/// The roster keeps the order of the first race; every race is stored as a
/// list of roster indices, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    roster: Vec<Athlete>,
    races: Vec<Vec<usize>>,
}

impl Profile {
    pub fn new(races: Vec<RaceRanking>) -> Result<Self> {
        let first = races.first().ok_or(Error::EmptyProfile)?;
        let roster: Vec<Athlete> = first.order.clone();
        let index: BTreeMap<&Athlete, usize> =
            roster.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut indexed = Vec::with_capacity(races.len());
        for (r, race) in races.iter().enumerate() {
            if race.len() != roster.len() {
                return Err(Error::RosterMismatch { race: r });
            }
            let order = race
                .order
                .iter()
                .map(|a| {
                    index
                        .get(a)
                        .copied()
                        .ok_or(Error::RosterMismatch { race: r })
                })
                .collect::<Result<Vec<_>>>()?;
            indexed.push(order);
        }
        Ok(Profile {
            roster,
            races: indexed,
        })
    }

    /// Builds a profile from races given as name lists.
    pub fn from_names<S: AsRef<str>, R: AsRef<[S]>>(races: &[R]) -> Result<Self> {
        let races = races
            .iter()
            .map(|r| RaceRanking::from_names(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(races)
    }

    /// Internal constructor; `races` must be permutations of `0..roster.len()`.
    pub(crate) fn from_indices(roster: Vec<Athlete>, races: Vec<Vec<usize>>) -> Self {
        debug_assert!(!races.is_empty() && !roster.is_empty());
        debug_assert!(races.iter().all(|r| {
            let mut sorted = r.clone();
            sorted.sort_unstable();
            sorted.iter().copied().eq(0..roster.len())
        }));
        Profile { roster, races }
    }

    pub fn roster(&self) -> &[Athlete] {
        &self.roster
    }

    pub fn num_athletes(&self) -> usize {
        self.roster.len()
    }

    pub fn num_races(&self) -> usize {
        self.races.len()
    }

    pub fn index_of(&self, athlete: &Athlete) -> Option<usize> {
        self.roster.iter().position(|a| a == athlete)
    }

    pub fn athlete(&self, index: usize) -> &Athlete {
        &self.roster[index]
    }

    /// Race `i` as roster indices, best first.
    pub fn race_indices(&self, i: usize) -> &[usize] {
        &self.races[i]
    }

    pub fn race(&self, i: usize) -> RaceRanking {
        RaceRanking {
            order: self.races[i]
                .iter()
                .map(|&a| self.roster[a].clone())
                .collect(),
        }
    }

    pub fn races(&self) -> impl Iterator<Item = RaceRanking> + '_ {
        (0..self.races.len()).map(|i| self.race(i))
    }

    /// `counts[a][j]`: how often roster athlete `a` finished at 0-based position `j`.
    pub fn position_counts(&self) -> Vec<Vec<u32>> {
        let m = self.roster.len();
        let mut counts = alloc::vec![alloc::vec![0u32; m]; m];
        for race in &self.races {
            for (pos, &a) in race.iter().enumerate() {
                counts[a][pos] += 1;
            }
        }
        counts
    }

    /// Deletes `athlete` from the roster and from every race; the others move up.
    pub fn remove_athlete(&self, athlete: &Athlete) -> Result<Profile> {
        let gone = self
            .index_of(athlete)
            .ok_or_else(|| Error::UnknownAthlete(athlete.name().to_string()))?;
        if self.roster.len() < 2 {
            return Err(Error::LastAthlete);
        }
        let roster = self
            .roster
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != gone)
            .map(|(_, a)| a.clone())
            .collect();
        let shift = |a: usize| if a > gone { a - 1 } else { a };
        let races = self
            .races
            .iter()
            .map(|race| {
                race.iter()
                    .filter(|&&a| a != gone)
                    .map(|&a| shift(a))
                    .collect()
            })
            .collect();
        Ok(Profile { roster, races })
    }

    /// Every race order reversed.
    pub fn reverse(&self) -> Profile {
        let races = self
            .races
            .iter()
            .map(|race| race.iter().rev().copied().collect())
            .collect();
        Profile {
            roster: self.roster.clone(),
            races,
        }
    }

    /// Adds a new athlete at the front of every race.
    pub fn with_unanimous_winner(&self, athlete: Athlete) -> Result<Profile> {
        self.with_extra(athlete, true)
    }

    /// Adds a new athlete at the back of every race.
    pub fn with_unanimous_loser(&self, athlete: Athlete) -> Result<Profile> {
        self.with_extra(athlete, false)
    }

    fn with_extra(&self, athlete: Athlete, front: bool) -> Result<Profile> {
        if self.index_of(&athlete).is_some() {
            return Err(Error::DuplicateAthlete(athlete.name().to_string()));
        }
        let new = self.roster.len();
        let mut roster = self.roster.clone();
        roster.push(athlete);
        let races = self
            .races
            .iter()
            .map(|race| {
                let mut r = Vec::with_capacity(race.len() + 1);
                if front {
                    r.push(new);
                }
                r.extend_from_slice(race);
                if !front {
                    r.push(new);
                }
                r
            })
            .collect();
        Ok(Profile { roster, races })
    }

    /// Renames athletes through `rename`; the result must stay injective.
    pub fn relabel(&self, mut rename: impl FnMut(&Athlete) -> Athlete) -> Result<Profile> {
        let roster: Vec<Athlete> = self.roster.iter().map(&mut rename).collect();
        let mut seen = BTreeMap::new();
        for a in &roster {
            if seen.insert(a, ()).is_some() {
                return Err(Error::DuplicateAthlete(a.name().to_string()));
            }
        }
        Ok(Profile {
            roster,
            races: self.races.clone(),
        })
    }

    /// Concatenates the races of two profiles over the same roster.
    pub fn concat(&self, other: &Profile) -> Result<Profile> {
        let mut races = self.races().collect::<Vec<_>>();
        races.extend(other.races());
        Profile::new(races)
    }
}
