//! Constructive counterexample profiles.
//!
//! Every constructor builds a profile in exact arithmetic and then verifies
//! the claimed outcome by running [`aggregate`] on it; the verification never
//! reuses construction-time totals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_traits::{Signed, ToPrimitive};

use crate::aggregate::{aggregate, finishes_at, TotalRanking};
use crate::axioms::majority_loser;
use crate::profile::{Athlete, Profile};
use crate::rules::{linear_equiv, strictly_decreasing, GeometricParam, ScoreTable};
use crate::scalar::{simplest_between, smallest_integer_exceeding, Rational, Scalar};
use crate::{Error, Result};

/// Aggregate rankings recomputed from a witness profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification<S = Rational> {
    pub before: TotalRanking<S>,
    /// Ranking after the removals the claim is about, if any.
    pub after: Option<TotalRanking<S>>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness<S = Rational> {
    pub profile: Profile,
    pub claim: String,
    /// The athlete the claim is about.
    pub focus: Athlete,
    /// The athlete `focus` is compared against.
    pub rival: Athlete,
    pub verification: Verification<S>,
}

fn named(prefix: &str, i: usize) -> Athlete {
    Athlete::new(format!("{prefix}{i}")).expect("non-empty")
}

fn plain(name: &str) -> Athlete {
    Athlete::new(name).expect("non-empty")
}

/// Places `others` in cyclic order over `slots`, shifted by `shift`:
/// `others[j]` takes `slots[(j - shift) mod len]`.
fn circulant(race: &mut [usize], slots: &[usize], others: &[usize], shift: usize) {
    let len = slots.len();
    for (j, &athlete) in others.iter().enumerate() {
        race[slots[(j + len - shift % len) % len]] = athlete;
    }
}

/// A profile of `m - 1` races in which the overall winner finishes second in
/// every race and never wins one.
///
/// Athlete `a` is second everywhere; `b1..b(m-1)` take every other position
/// exactly once, in circulant order.
pub fn no_race_win_winner(p: &GeometricParam<Rational>, m: usize) -> Result<Witness> {
    let GeometricParam::Finite(value) = p else {
        return Err(Error::InvalidParameter(
            "a finite geometric parameter is required".into(),
        ));
    };
    let one = Rational::one();
    match value.cmp(&one) {
        Ordering::Less if m < 3 => {
            return Err(Error::Precondition(format!(
                "p < 1 needs m >= 3, got m = {m}"
            )))
        }
        Ordering::Equal if m < 4 => {
            return Err(Error::Precondition(format!(
                "p = 1 needs m >= 4, got m = {m}; at m = 3 the totals tie"
            )))
        }
        Ordering::Greater => {
            let bound = value * value / (value - &one);
            if m < 3 || Rational::from_i64(m as i64) <= bound {
                return Err(Error::Precondition(format!(
                    "p = {value} needs m >= 3 and m > p^2/(p-1) = {bound}, got m = {m}"
                )));
            }
        }
        _ => {}
    }

    let roster: Vec<Athlete> = core::iter::once(plain("a"))
        .chain((1..m).map(|j| named("b", j)))
        .collect();
    let slots: Vec<usize> = core::iter::once(0).chain(2..m).collect();
    let others: Vec<usize> = (1..m).collect();
    let races = (0..m - 1)
        .map(|i| {
            let mut race = alloc::vec![0usize; m];
            race[1] = 0;
            circulant(&mut race, &slots, &others, i);
            race
        })
        .collect();
    let profile = Profile::from_indices(roster, races);

    let table = ScoreTable::geometric(p.clone());
    let before = aggregate(&profile, &table)?;
    let focus = plain("a");
    let rival = named("b", 1);
    let holds = before.unique_top() == Some(&focus) && finishes_at(&profile, &focus, 1) == Some(0);
    Ok(Witness {
        profile,
        claim: format!(
            "with p = {p} and {m} athletes, a wins overall without winning any of {} races",
            m - 1
        ),
        focus,
        rival,
        verification: Verification {
            before,
            after: None,
            holds,
        },
    })
}

/// `(k-2)p^k - k p^(k-1) + k p - k + 2`: zero at `p = 1` and strictly
/// increasing in `p`.
pub fn majority_loser_coefficient(p: &Rational, k: usize) -> Rational {
    let k_r = Rational::from_i64(k as i64);
    let two = Rational::from_i64(2);
    (&k_r - &two) * p.powu(k as u32) - &k_r * p.powu(k as u32 - 1) + &k_r * p - &k_r + two
}

/// Smallest `n` with `n * coefficient > (p^(k-1) - 1)(p - 1)`.
pub fn majority_loser_blocks(p: &Rational, k: usize) -> Result<u64> {
    check_majority_loser_args(p, k)?;
    let bound = (p.powu(k as u32 - 1) - Rational::one()) * (p - Rational::one());
    smallest_integer_exceeding(&bound, &majority_loser_coefficient(p, k))
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("race count overflows u64".into()))
}

fn check_majority_loser_args(p: &Rational, k: usize) -> Result<()> {
    if *p <= Rational::one() {
        return Err(Error::Precondition(format!("p must exceed 1, got {p}")));
    }
    if k < 3 {
        return Err(Error::Precondition(format!(
            "k must be at least 3, got {k}"
        )));
    }
    Ok(())
}

/// A profile in which the geometric rule with `p > 1` ranks the majority
/// loser strictly first.
///
/// With `n` from [`majority_loser_blocks`]: `n(k-1)` races with `ak` first,
/// `n(k-1)` races with `ak` last, the others rotating through the remaining
/// positions, and one race `a1 > ... > ak`.
pub fn majority_loser_first(p: &Rational, k: usize) -> Result<Witness> {
    let blocks = majority_loser_blocks(p, k)? as usize;
    let roster: Vec<Athlete> = (1..=k).map(|j| named("a", j)).collect();
    let loser = k - 1;
    let others: Vec<usize> = (0..k - 1).collect();
    let mut races = Vec::with_capacity(2 * blocks * (k - 1) + 1);
    for (loser_slot, slots) in [
        (0, (1..k).collect::<Vec<_>>()),
        (k - 1, (0..k - 1).collect()),
    ] {
        for i in 0..blocks * (k - 1) {
            let mut race = alloc::vec![0usize; k];
            race[loser_slot] = loser;
            circulant(&mut race, &slots, &others, i);
            races.push(race);
        }
    }
    races.push((0..k).collect());
    let profile = Profile::from_indices(roster, races);

    let table = ScoreTable::geometric(GeometricParam::Finite(p.clone()));
    let before = aggregate(&profile, &table)?;
    let focus = named("a", k);
    let rival = named("a", 1);
    let holds = majority_loser(&profile).as_ref() == Some(&focus)
        && before.unique_top() == Some(&focus)
        && before.compare(&focus, &rival) == Some(Ordering::Greater);
    Ok(Witness {
        claim: format!(
            "with p = {p} and {k} athletes, the majority loser {focus} is ranked first over {} races",
            profile.num_races()
        ),
        profile,
        focus,
        rival,
        verification: Verification { before, after: None, holds },
    })
}

/// Which unanimous athletes are removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Winner,
    Loser,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Winner => "winner",
            Side::Loser => "loser",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "winner" => Ok(Side::Winner),
            "loser" => Ok(Side::Loser),
            _ => Err(Error::InvalidParameter(format!("unknown side `{s}`"))),
        }
    }
}

/// A profile on `m` athletes where removing the `m - k` unanimous winners
/// (or losers) flips the order of two athletes.
///
/// Fails with [`Error::NoWitness`] when the size-`k` scores are linearly
/// equivalent to the matching slice of the size-`m` scores. Float tables are
/// rationalized for the construction; the verification uses `table` itself.
pub fn independence_violation<S: Scalar>(
    table: &ScoreTable<S>,
    m: usize,
    k: usize,
    side: Side,
) -> Result<Witness<S>> {
    if k < 2 || k > m {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= k <= m, got k = {k}, m = {m}"
        )));
    }
    let exact = table.to_rational();
    let full = exact.round_one(m)?;
    if !strictly_decreasing(&full) {
        return Err(Error::Precondition(format!(
            "scores for {m} athletes are not strictly decreasing"
        )));
    }
    let reference = match side {
        Side::Loser => &full[..k],
        Side::Winner => &full[m - k..],
    };
    let small = exact.round_one(k)?;
    if linear_equiv(&small, reference)?.is_some() {
        return Err(Error::NoWitness(format!(
            "scores for {k} athletes are linearly equivalent to the matching slice for {m}; \
             removing unanimous {side}s cannot change the ranking"
        )));
    }
    if small[0] == small[1] {
        return Err(Error::Precondition(format!(
            "the top two scores for {k} athletes coincide"
        )));
    }

    let (r1, r2) = (&reference[0], &reference[1]);
    let spread = r1 - r2;
    let alpha = &spread / (&small[0] - &small[1]);
    let beta = r1 - &alpha * &small[0];
    let (j, t_j) = (2..k)
        .map(|j| (j, &alpha * &small[j] + &beta))
        .find(|(j, t)| *t != reference[*j])
        .expect("non-equivalent vectors differ beyond the first two coordinates");
    let r_j = &reference[j];
    let at_t = (r2 - &t_j) / &spread;
    let at_r = (r2 - r_j) / &spread;
    let ratio = if at_t < at_r {
        simplest_between(&at_t, &at_r)?
    } else {
        simplest_between(&at_r, &at_t)?
    };
    let layout = sandwich_layout(ratio.numer(), ratio.denom(), j + 1)?;

    // Roster indices: a = 0, b = 1, c1.. = 2..k, padding = k..m.
    let offset = match side {
        Side::Loser => 0,
        Side::Winner => m - k,
    };
    let padding_slots: Vec<usize> = match side {
        Side::Loser => (k..m).collect(),
        Side::Winner => (0..m - k).collect(),
    };
    let mut races = Vec::new();
    for (times, pa, pb) in layout {
        let mut race = alloc::vec![usize::MAX; m];
        for (i, &slot) in padding_slots.iter().enumerate() {
            race[slot] = k + i;
        }
        race[offset + pa - 1] = 0;
        race[offset + pb - 1] = 1;
        let mut fill = 2..k;
        for slot in &mut race[offset..offset + k] {
            if *slot == usize::MAX {
                *slot = fill.next().expect("k - 2 fillers");
            }
        }
        races.extend(core::iter::repeat_n(race, times));
    }

    // When t_j < r_j the inequalities flip and b wins before removal; swap
    // labels so that `a` always leads first.
    let a_leads = t_j > *r_j;
    let mut roster: Vec<Athlete> = Vec::with_capacity(m);
    roster.push(plain(if a_leads { "a" } else { "b" }));
    roster.push(plain(if a_leads { "b" } else { "a" }));
    roster.extend((1..k - 1).map(|i| named("c", i)));
    roster.extend((1..=m - k).map(|i| named("p", i)));
    let padding: Vec<Athlete> = roster[k..].to_vec();
    let profile = Profile::from_indices(roster, races);

    let focus = plain("a");
    let rival = plain("b");
    let before = aggregate(&profile, table)?;
    let mut reduced = profile.clone();
    for athlete in &padding {
        reduced = reduced.remove_athlete(athlete)?;
    }
    let after = aggregate(&reduced, table)?;
    let holds = before.compare(&focus, &rival) == Some(Ordering::Greater)
        && after.compare(&rival, &focus) == Some(Ordering::Greater);
    Ok(Witness {
        claim: format!(
            "a beats b with {m} athletes, but b beats a after removing the {} unanimous {side}s \
             (position {} differs, n1/n2 = {ratio})",
            m - k,
            j + 1
        ),
        profile,
        focus,
        rival,
        verification: Verification {
            before,
            after: Some(after),
            holds,
        },
    })
}

/// `(race count, a's position, b's position)` blocks of the sandwich profile
/// for `n1/n2`, positions 1-based. `a` finishes `n` times at each of 1, 2 and
/// `j`; `b` finishes first `n + n1` times, second `|n1| - n1` times and
/// `j`-th `n + n2` times, where `n = |n1| + n2`.
fn sandwich_layout(
    n1: &num_bigint::BigInt,
    n2: &num_bigint::BigInt,
    j: usize,
) -> Result<Vec<(usize, usize, usize)>> {
    let count = |v: &num_bigint::BigInt| {
        v.to_usize()
            .ok_or_else(|| Error::InvalidParameter("witness too large".into()))
    };
    let n1_abs = n1.abs();
    let n = &n1_abs + n2;
    Ok(if !n1.is_positive() {
        alloc::vec![
            (count(&n1_abs)?, 1, 2),
            (count(n2)?, 1, j),
            (count(&n)?, 2, j),
            (count(&n1_abs)?, j, 2),
            (count(&(&n + n1))?, j, 1),
        ]
    } else {
        alloc::vec![
            (count(&n)?, 1, j),
            (count(n2)?, 2, j),
            (count(n1)?, 2, 1),
            (count(&n)?, j, 1),
        ]
    })
}

/// The unique overall winner of `profile` under `table`, if that athlete won
/// no race.
pub fn winner_without_race_win<S: Scalar>(
    profile: &Profile,
    table: &ScoreTable<S>,
) -> Result<Option<Athlete>> {
    let ranking = aggregate(profile, table)?;
    Ok(ranking
        .unique_top()
        .filter(|a| finishes_at(profile, a, 1) == Some(0))
        .cloned())
}
