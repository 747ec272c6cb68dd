//! Axiom predicates and randomized or exhaustive trial checkers.
//!
//! Random profiles follow impartial culture: every race is an independent,
//! uniformly random permutation. Each trial draws from its own generator,
//! seeded from the master seed and the trial index, so reports are
//! reproducible and can be split and merged.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregate::aggregate;
use crate::profile::{Athlete, Profile};
use crate::rules::ScoreTable;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    IndependenceUnanimousWinner,
    IndependenceUnanimousLoser,
    MajorityWinnerFirst,
    MajorityLoserNeverFirst,
    MajorityLoserLast,
    ReversalSymmetry,
}

impl AxiomId {
    pub const ALL: [AxiomId; 6] = [
        AxiomId::IndependenceUnanimousWinner,
        AxiomId::IndependenceUnanimousLoser,
        AxiomId::MajorityWinnerFirst,
        AxiomId::MajorityLoserNeverFirst,
        AxiomId::MajorityLoserLast,
        AxiomId::ReversalSymmetry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::IndependenceUnanimousWinner => "independence-unanimous-winner",
            AxiomId::IndependenceUnanimousLoser => "independence-unanimous-loser",
            AxiomId::MajorityWinnerFirst => "majority-winner-first",
            AxiomId::MajorityLoserNeverFirst => "majority-loser-never-first",
            AxiomId::MajorityLoserLast => "majority-loser-last",
            AxiomId::ReversalSymmetry => "reversal-symmetry",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown axiom `{s}`")))
    }
}

/// Outcome of testing one profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// The premise of the axiom does not apply to this profile.
    Vacuous,
}

fn first_everywhere(profile: &Profile, last: bool) -> Option<Athlete> {
    let pick = |i: usize| {
        let race = profile.race_indices(i);
        if last {
            race[race.len() - 1]
        } else {
            race[0]
        }
    };
    let candidate = pick(0);
    (1..profile.num_races())
        .all(|i| pick(i) == candidate)
        .then(|| profile.athlete(candidate).clone())
}

/// The athlete first in every race, if any.
pub fn unanimous_winner(profile: &Profile) -> Option<Athlete> {
    first_everywhere(profile, false)
}

/// The athlete last in every race, if any.
pub fn unanimous_loser(profile: &Profile) -> Option<Athlete> {
    first_everywhere(profile, true)
}

fn majority_at(profile: &Profile, last: bool) -> Option<Athlete> {
    let m = profile.num_athletes();
    let mut counts = alloc::vec![0usize; m];
    for i in 0..profile.num_races() {
        let race = profile.race_indices(i);
        counts[if last { race[m - 1] } else { race[0] }] += 1;
    }
    let n = profile.num_races();
    counts
        .iter()
        .position(|&c| 2 * c > n)
        .map(|a| profile.athlete(a).clone())
}

/// The athlete first in strictly more than half the races, if any.
pub fn majority_winner(profile: &Profile) -> Option<Athlete> {
    majority_at(profile, false)
}

/// The athlete last in strictly more than half the races, if any.
pub fn majority_loser(profile: &Profile) -> Option<Athlete> {
    majority_at(profile, true)
}

/// Every race reversed.
pub fn reverse(profile: &Profile) -> Profile {
    profile.reverse()
}

/// Tests `axiom` for `table` on one profile.
///
/// "First" and "last" in the aggregate mean membership in the top or bottom
/// tie group, except where the axiom names a unique position.
pub fn evaluate<S: Scalar>(
    table: &ScoreTable<S>,
    axiom: AxiomId,
    profile: &Profile,
) -> Result<Verdict> {
    use Verdict::*;
    let ranking = aggregate(profile, table)?;
    let verdict = match axiom {
        AxiomId::IndependenceUnanimousWinner | AxiomId::IndependenceUnanimousLoser => {
            let winner_side = axiom == AxiomId::IndependenceUnanimousWinner;
            let found = if winner_side {
                unanimous_winner(profile)
            } else {
                unanimous_loser(profile)
            };
            let Some(u) = found.filter(|_| profile.num_athletes() >= 2) else {
                return Ok(Vacuous);
            };
            let extreme = if winner_side {
                ranking.top_group()
            } else {
                ranking.bottom_group()
            };
            if !extreme.contains(&u) {
                return Ok(Violated);
            }
            let after = aggregate(&profile.remove_athlete(&u)?, table)?;
            if *after.order() == ranking.order().without(&u) {
                Holds
            } else {
                Violated
            }
        }
        AxiomId::MajorityWinnerFirst => match majority_winner(profile) {
            None => Vacuous,
            Some(w) if ranking.unique_top() == Some(&w) => Holds,
            Some(_) => Violated,
        },
        AxiomId::MajorityLoserNeverFirst => match majority_loser(profile) {
            None => Vacuous,
            Some(l) if ranking.top_group().contains(&l) => Violated,
            Some(_) => Holds,
        },
        AxiomId::MajorityLoserLast => match majority_loser(profile) {
            None => Vacuous,
            Some(l) if ranking.unique_bottom() == Some(&l) => Holds,
            Some(_) => Violated,
        },
        AxiomId::ReversalSymmetry => match ranking.unique_top() {
            Some(a) if profile.num_athletes() >= 2 => {
                let reversed = aggregate(&profile.reverse(), table)?;
                if reversed.unique_top() == Some(a) {
                    Violated
                } else {
                    Holds
                }
            }
            _ => Vacuous,
        },
    };
    Ok(verdict)
}

/// Result of a batch of trials. Vacuous trials count towards `trials` and
/// `skipped`, never towards `violations`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub label: String,
    pub trials: usize,
    pub violations: usize,
    pub skipped: usize,
    pub first_counterexample: Option<Profile>,
    pub first_violation_trial: Option<usize>,
    pub seed: u64,
}

impl TrialReport {
    fn empty(label: String, seed: u64) -> Self {
        TrialReport {
            label,
            trials: 0,
            violations: 0,
            skipped: 0,
            first_counterexample: None,
            first_violation_trial: None,
            seed,
        }
    }

    fn record(&mut self, verdict: Verdict, profile: impl FnOnce() -> Profile) {
        let trial = self.trials;
        self.trials += 1;
        match verdict {
            Verdict::Holds => {}
            Verdict::Vacuous => self.skipped += 1,
            Verdict::Violated => {
                self.violations += 1;
                if self.first_counterexample.is_none() {
                    self.first_counterexample = Some(profile());
                    self.first_violation_trial = Some(trial);
                }
            }
        }
    }

    /// Appends `other`, whose trial indices continue after this report's.
    pub fn merge(mut self, other: TrialReport) -> TrialReport {
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample;
            self.first_violation_trial = other.first_violation_trial.map(|t| t + self.trials);
        }
        self.trials += other.trials;
        self.violations += other.violations;
        self.skipped += other.skipped;
        self
    }

    /// Trials whose premise applied.
    pub fn tested(&self) -> usize {
        self.trials - self.skipped
    }
}

impl fmt::Display for TrialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations == 0 {
            write!(
                f,
                "{}: no violation in {} trials ({} vacuous, seed {})",
                self.label, self.trials, self.skipped, self.seed
            )
        } else {
            write!(
                f,
                "{}: {} violations in {} trials, first at trial {} (seed {})",
                self.label,
                self.violations,
                self.trials,
                self.first_violation_trial.unwrap_or(0),
                self.seed
            )
        }
    }
}

/// Bounds for the random profile sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub trials: usize,
    pub seed: u64,
    /// Largest roster, at least 2.
    pub max_athletes: usize,
    /// Largest number of races, at least 1.
    pub max_races: usize,
}

impl SamplerConfig {
    pub fn new(trials: usize, seed: u64, max_athletes: usize, max_races: usize) -> Self {
        SamplerConfig {
            trials,
            seed,
            max_athletes,
            max_races,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.max_athletes < 2 {
            return Err(Error::Degenerate("max_athletes must be at least 2".into()));
        }
        if self.max_races == 0 {
            return Err(Error::Degenerate("max_races must be at least 1".into()));
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The generator used for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(trial as u64)))
}

fn roster(m: usize) -> Vec<Athlete> {
    (0..m)
        .map(|i| Athlete::new(format!("x{i}")).expect("non-empty"))
        .collect()
}

/// A uniformly random profile with `m` athletes and `n` races.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> Profile {
    let races = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(rng);
            order
        })
        .collect();
    Profile::from_indices(roster(m), races)
}

/// Draws the profile tested by trial `trial`. For the independence axioms a
/// fresh unanimous winner or loser is added to a random base profile.
pub fn sample_profile(axiom: AxiomId, config: &SamplerConfig, trial: usize) -> Profile {
    let mut rng = trial_rng(config.seed, trial);
    let n = rng.random_range(1..=config.max_races);
    match axiom {
        AxiomId::IndependenceUnanimousWinner | AxiomId::IndependenceUnanimousLoser => {
            let base_m = rng.random_range(1..config.max_athletes);
            let base = random_profile(&mut rng, base_m, n);
            pad(&base, axiom)
        }
        _ => {
            let m = rng.random_range(2..=config.max_athletes);
            random_profile(&mut rng, m, n)
        }
    }
}

fn pad(base: &Profile, axiom: AxiomId) -> Profile {
    let extra = Athlete::new("u").expect("non-empty");
    let padded = if axiom == AxiomId::IndependenceUnanimousWinner {
        base.with_unanimous_winner(extra)
    } else {
        base.with_unanimous_loser(extra)
    };
    padded.expect("fresh name")
}

/// Runs `config.trials` random trials of `axiom` against `table`.
pub fn check_axiom<S: Scalar>(
    table: &ScoreTable<S>,
    axiom: AxiomId,
    config: &SamplerConfig,
) -> Result<TrialReport> {
    config.validate()?;
    let mut report = TrialReport::empty(String::from(axiom.name()), config.seed);
    for trial in 0..config.trials {
        let profile = sample_profile(axiom, config, trial);
        let verdict = evaluate(table, axiom, &profile)?;
        report.record(verdict, || profile);
    }
    Ok(report)
}

/// Random trials of the duality `aggregate(rev P, dual) == reverse(aggregate(P, table))`.
pub fn check_duality<S: Scalar>(
    table: &ScoreTable<S>,
    dual: &ScoreTable<S>,
    config: &SamplerConfig,
) -> Result<TrialReport> {
    config.validate()?;
    let mut report = TrialReport::empty(String::from("duality"), config.seed);
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial);
        let n = rng.random_range(1..=config.max_races);
        let m = rng.random_range(2..=config.max_athletes);
        let profile = random_profile(&mut rng, m, n);
        let verdict = if duality_holds(table, dual, &profile)? {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        report.record(verdict, || profile);
    }
    Ok(report)
}

/// Whether ranking the reversed profile with `dual` reverses the ranking
/// of `profile` under `table`.
pub fn duality_holds<S: Scalar>(
    table: &ScoreTable<S>,
    dual: &ScoreTable<S>,
    profile: &Profile,
) -> Result<bool> {
    let forward = aggregate(profile, table)?;
    let backward = aggregate(&profile.reverse(), dual)?;
    Ok(*backward.order() == forward.order().reversed())
}

/// Largest roster the exhaustive mode accepts.
pub const EXHAUSTIVE_MAX_ATHLETES: usize = 4;
/// Largest number of races the exhaustive mode accepts.
pub const EXHAUSTIVE_MAX_RACES: usize = 4;

/// Tests `axiom` on every profile (as a multiset of races) with
/// `2..=max_athletes` athletes and `1..=max_races` races.
///
/// For the independence axioms the base profiles have one athlete fewer and
/// are padded with a unanimous winner or loser.
pub fn check_axiom_exhaustive<S: Scalar>(
    table: &ScoreTable<S>,
    axiom: AxiomId,
    max_athletes: usize,
    max_races: usize,
) -> Result<TrialReport> {
    if !(2..=EXHAUSTIVE_MAX_ATHLETES).contains(&max_athletes)
        || !(1..=EXHAUSTIVE_MAX_RACES).contains(&max_races)
    {
        return Err(Error::InvalidParameter(format!(
            "exhaustive mode supports 2..={EXHAUSTIVE_MAX_ATHLETES} athletes and \
             1..={EXHAUSTIVE_MAX_RACES} races"
        )));
    }
    let padded = matches!(
        axiom,
        AxiomId::IndependenceUnanimousWinner | AxiomId::IndependenceUnanimousLoser
    );
    let mut report = TrialReport::empty(format!("{} (exhaustive)", axiom.name()), 0);
    for m in 2..=max_athletes {
        let base_m = if padded { m - 1 } else { m };
        let perms = permutations(base_m);
        for n in 1..=max_races {
            let mut choice = alloc::vec![0usize; n];
            loop {
                let races = choice.iter().map(|&c| perms[c].clone()).collect();
                let base = Profile::from_indices(roster(base_m), races);
                let profile = if padded { pad(&base, axiom) } else { base };
                let verdict = evaluate(table, axiom, &profile)?;
                report.record(verdict, || profile);
                if !next_multiset(&mut choice, perms.len()) {
                    break;
                }
            }
        }
    }
    Ok(report)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for slot in 0..m {
            let mut q = p.clone();
            q.insert(slot, m - 1);
            out.push(q);
        }
    }
    out
}

/// Advances a non-decreasing index sequence; false after the last one.
fn next_multiset(choice: &mut [usize], base: usize) -> bool {
    let Some(i) = choice.iter().rposition(|&c| c + 1 < base) else {
        return false;
    };
    let v = choice[i] + 1;
    for c in &mut choice[i..] {
        *c = v;
    }
    true
}
