//! Total scores and lexicographic aggregation into a weak order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::profile::{Athlete, Profile};
use crate::rules::{CountOrder, ScoreTable};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Ordered tie groups, best first. Athletes inside a group are sorted by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakOrder(Vec<Vec<Athlete>>);

impl WeakOrder {
    pub fn new(mut groups: Vec<Vec<Athlete>>) -> Self {
        groups.retain(|g| !g.is_empty());
        for g in &mut groups {
            g.sort();
        }
        WeakOrder(groups)
    }

    pub fn groups(&self) -> &[Vec<Athlete>] {
        &self.0
    }

    pub fn without(&self, athlete: &Athlete) -> WeakOrder {
        WeakOrder::new(
            self.0
                .iter()
                .map(|g| g.iter().filter(|a| *a != athlete).cloned().collect())
                .collect(),
        )
    }

    pub fn reversed(&self) -> WeakOrder {
        WeakOrder(self.0.iter().rev().cloned().collect())
    }

    /// 0-based index of the group holding `athlete`.
    pub fn rank_of(&self, athlete: &Athlete) -> Option<usize> {
        self.0.iter().position(|g| g.contains(athlete))
    }
}

/// Aggregate ranking with the per-round totals that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalRanking<S> {
    order: WeakOrder,
    totals: BTreeMap<Athlete, Vec<S>>,
}

impl<S: Scalar> TotalRanking<S> {
    pub fn order(&self) -> &WeakOrder {
        &self.order
    }

    pub fn groups(&self) -> &[Vec<Athlete>] {
        self.order.groups()
    }

    /// Totals of `athlete` in every round.
    pub fn totals(&self, athlete: &Athlete) -> Option<&[S]> {
        self.totals.get(athlete).map(Vec::as_slice)
    }

    /// Round-1 total of `athlete`.
    pub fn total(&self, athlete: &Athlete) -> Option<&S> {
        self.totals(athlete).and_then(|t| t.first())
    }

    pub fn rank_of(&self, athlete: &Athlete) -> Option<usize> {
        self.order.rank_of(athlete)
    }

    pub fn top_group(&self) -> &[Athlete] {
        self.groups().first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn bottom_group(&self) -> &[Athlete] {
        self.groups().last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// The winner, if the top group has exactly one member.
    pub fn unique_top(&self) -> Option<&Athlete> {
        match self.top_group() {
            [a] => Some(a),
            _ => None,
        }
    }

    pub fn unique_bottom(&self) -> Option<&Athlete> {
        match self.bottom_group() {
            [a] => Some(a),
            _ => None,
        }
    }

    /// `Greater` when `a` is ranked above `b`.
    pub fn compare(&self, a: &Athlete, b: &Athlete) -> Option<Ordering> {
        Some(self.rank_of(b)?.cmp(&self.rank_of(a)?))
    }
}

/// Sum over races of the score at each athlete's position.
pub fn total_scores<S: Scalar>(profile: &Profile, scores: &[S]) -> Result<BTreeMap<Athlete, S>> {
    let m = profile.num_athletes();
    if scores.len() != m {
        return Err(Error::Dimension {
            expected: m,
            actual: scores.len(),
        });
    }
    let counts = profile.position_counts();
    Ok(profile
        .roster()
        .iter()
        .zip(&counts)
        .map(|(a, row)| (a.clone(), weighted_sum(row, scores)))
        .collect())
}

fn weighted_sum<S: Scalar>(counts: &[u32], scores: &[S]) -> S {
    counts
        .iter()
        .zip(scores)
        .filter(|(c, _)| **c > 0)
        .fold(S::zero(), |acc, (&c, s)| acc + s.mul_count(c))
}

/// Ranks the roster by round-1 totals, breaking ties with later rounds.
/// Athletes equal in every round share a group.
pub fn aggregate<S: Scalar>(profile: &Profile, table: &ScoreTable<S>) -> Result<TotalRanking<S>> {
    let m = profile.num_athletes();
    let plan = table.plan(m)?;
    let counts = profile.position_counts();
    let n = profile.num_races() as i64;

    // Count-based rounds compare integer keys; their reported totals are the
    // equivalent prefix-ones round scores.
    let count_keys: Option<Vec<Vec<i64>>> = plan.counts.map(|order| {
        counts
            .iter()
            .map(|row| match order {
                CountOrder::TopDown => row[..m - 1].iter().map(|&c| i64::from(c)).collect(),
                CountOrder::BottomUp => row[1..].iter().rev().map(|&c| -i64::from(c)).collect(),
            })
            .collect()
    });

    let totals: Vec<Vec<S>> = counts
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let mut t = Vec::new();
            if let Some(keys) = &count_keys {
                let mut running = 0i64;
                for key in &keys[a] {
                    running += key.abs();
                    let value = match plan.counts {
                        Some(CountOrder::BottomUp) => n - running,
                        _ => running,
                    };
                    t.push(S::from_i64(value));
                }
            }
            t.extend(plan.vectors.iter().map(|v| weighted_sum(row, v)));
            t
        })
        .collect();

    let cmp = |x: usize, y: usize| -> Ordering {
        if let Some(keys) = &count_keys {
            let c = keys[x].cmp(&keys[y]);
            if c != Ordering::Equal {
                return c;
            }
        }
        let skip = count_keys.as_ref().map_or(0, |k| k[x].len());
        totals[x][skip..]
            .iter()
            .zip(&totals[y][skip..])
            .map(|(p, q)| p.approx_cmp(q))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    };

    // Selection of the best remaining group; never relies on transitivity of
    // the float comparison.
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut groups = Vec::new();
    while !remaining.is_empty() {
        let best = remaining
            .iter()
            .copied()
            .reduce(|best, x| {
                if cmp(x, best) == Ordering::Greater {
                    x
                } else {
                    best
                }
            })
            .expect("non-empty");
        let (group, rest): (Vec<usize>, Vec<usize>) = remaining
            .iter()
            .partition(|&&x| cmp(x, best) != Ordering::Less);
        groups.push(
            group
                .into_iter()
                .map(|i| profile.athlete(i).clone())
                .collect(),
        );
        remaining = rest;
    }

    Ok(TotalRanking {
        order: WeakOrder::new(groups),
        totals: profile.roster().iter().cloned().zip(totals).collect(),
    })
}

/// How often `athlete` finished at 1-based `position`.
pub fn finishes_at(profile: &Profile, athlete: &Athlete, position: usize) -> Option<u32> {
    let a = profile.index_of(athlete)?;
    profile.position_counts()[a]
        .get(position.checked_sub(1)?)
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{GeometricParam, ScoreTable, TrimPolicy};
    use crate::scalar::Rational;
    use alloc::vec;

    fn a(name: &str) -> Athlete {
        Athlete::new(name).unwrap()
    }

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn single_race_borda_totals() {
        let p = Profile::from_names(&[vec!["a", "b", "c"]]).unwrap();
        let t = total_scores(&p, &[r(2), r(1), r(0)]).unwrap();
        assert_eq!(t[&a("a")], r(2));
        assert_eq!(t[&a("b")], r(1));
        assert_eq!(t[&a("c")], r(0));
    }

    #[test]
    fn symmetric_races_tie() {
        let p = Profile::from_names(&[vec!["a", "b"], vec!["b", "a"]]).unwrap();
        let t = total_scores(&p, &[r(1), r(0)]).unwrap();
        assert_eq!(t[&a("a")], r(1));
        assert_eq!(t[&a("b")], r(1));
        let table = ScoreTable::single(vec![r(1), r(0)], TrimPolicy::FromBottom).unwrap();
        let ranking = aggregate(&p, &table).unwrap();
        assert_eq!(ranking.groups().len(), 1);
    }

    #[test]
    fn length_mismatch_is_a_dimension_error() {
        let p = Profile::from_names(&[vec!["a", "b"]]).unwrap();
        assert_eq!(
            total_scores(&p, &[r(1)]),
            Err(Error::Dimension {
                expected: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn constant_scores_give_one_group() {
        let p = Profile::from_names(&[vec!["a", "b", "c"], vec!["c", "a", "b"]]).unwrap();
        let table = ScoreTable::single(vec![r(5), r(5), r(5)], TrimPolicy::FromBottom).unwrap();
        let ranking = aggregate(&p, &table).unwrap();
        assert_eq!(ranking.groups(), &[vec![a("a"), a("b"), a("c")]]);
    }

    #[test]
    fn missing_field_size_is_reported() {
        let p = Profile::from_names(&[vec!["a", "b", "c"]]).unwrap();
        let table = ScoreTable::single(vec![r(1), r(0)], TrimPolicy::FromBottom).unwrap();
        assert_eq!(aggregate(&p, &table).unwrap_err(), Error::MissingVector(3));
    }

    #[test]
    fn tiebreak_round_separates_equal_totals() {
        // a: 1st + 3rd = 2 + 0, b: 2nd twice = 1 + 1. Borda ties them; plurality favours a.
        let p = Profile::from_names(&[vec!["a", "b", "c"], vec!["c", "b", "a"]]).unwrap();
        let table = ScoreTable::<Rational>::borda().with_plurality_tiebreak();
        let ranking = aggregate(&p, &table).unwrap();
        assert_eq!(ranking.compare(&a("a"), &a("b")), Some(Ordering::Greater));
        assert_eq!(ranking.totals(&a("a")).unwrap(), &[r(2), r(1)]);
        assert_eq!(ranking.totals(&a("b")).unwrap(), &[r(2), r(0)]);
    }

    #[test]
    fn generalised_plurality_is_a_medal_count() {
        // Golds: c 2, a 1, b 0; b has three silvers.
        let p = Profile::from_names(&[
            vec!["a", "b", "c"],
            vec!["c", "b", "a"],
            vec!["c", "b", "a"],
        ])
        .unwrap();
        let table = ScoreTable::geometric(GeometricParam::<Rational>::Infinity);
        let ranking = aggregate(&p, &table).unwrap();
        assert_eq!(
            ranking.groups(),
            &[vec![a("c")], vec![a("a")], vec![a("b")]]
        );
        // Reported totals are the prefix-ones rounds: top-1 then top-2 finishes.
        assert_eq!(ranking.totals(&a("b")).unwrap(), &[r(0), r(3)]);
        assert_eq!(ranking.totals(&a("a")).unwrap(), &[r(1), r(1)]);
    }

    #[test]
    fn generalised_antiplurality_avoids_last_places() {
        let p = Profile::from_names(&[
            vec!["a", "b", "c"],
            vec!["b", "c", "a"],
            vec!["c", "b", "a"],
        ])
        .unwrap();
        let table = ScoreTable::geometric(GeometricParam::<Rational>::Zero);
        let ranking = aggregate(&p, &table).unwrap();
        // Last places: a 2, b 0, c 1. Then b vs c on second-to-last: equal at
        // round 1 only if last places tie, which they don't.
        assert_eq!(
            ranking.groups(),
            &[vec![a("b")], vec![a("c")], vec![a("a")]]
        );
        assert_eq!(ranking.totals(&a("a")).unwrap(), &[r(1), r(1)]);
    }

    #[test]
    fn count_rounds_match_explicit_prefix_ones_rounds() {
        let p = Profile::from_names(&[
            vec!["a", "b", "c", "d"],
            vec!["b", "a", "d", "c"],
            vec!["d", "c", "b", "a"],
            vec!["a", "d", "c", "b"],
        ])
        .unwrap();
        for param in [GeometricParam::<Rational>::Infinity, GeometricParam::Zero] {
            let table = ScoreTable::geometric(param);
            let rounds = table.rounds(4).unwrap();
            let explicit = ScoreTable::explicit(rounds, TrimPolicy::FromBottom).unwrap();
            let x = aggregate(&p, &table).unwrap();
            let y = aggregate(&p, &explicit).unwrap();
            assert_eq!(x.order(), y.order());
            for athlete in p.roster() {
                assert_eq!(x.totals(athlete), y.totals(athlete));
            }
        }
    }

    #[test]
    fn float_mode_ties_within_tolerance() {
        let p = Profile::from_names(&[vec!["a", "b"], vec!["b", "a"]]).unwrap();
        let table = ScoreTable::single(vec![0.1 + 0.2, 0.0], TrimPolicy::FromBottom).unwrap();
        let ranking = aggregate(&p, &table).unwrap();
        assert_eq!(ranking.groups().len(), 1);
    }
}
