//! Score tables: the geometric family, explicit tables with trimming, and
//! linear equivalence of score vectors.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

/// Largest field size a geometric table answers for unless overridden.
/// Bounds the size of `p^(k-1)` numerators and denominators.
pub const DEFAULT_GEOMETRIC_MAX_SIZE: usize = 64;

/// Parameter of a geometric rule: `Zero` is generalised antiplurality,
/// `Finite(1)` is Borda and `Infinity` is generalised plurality.
#[derive(Clone, Debug, PartialEq)]
pub enum GeometricParam<S = Rational> {
    Zero,
    Finite(S),
    Infinity,
}

impl<S: Scalar> GeometricParam<S> {
    pub fn finite(p: S) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "geometric p must be positive, got {p}"
            )));
        }
        Ok(GeometricParam::Finite(p))
    }

    pub fn borda() -> Self {
        GeometricParam::Finite(S::one())
    }

    /// `1/p`, mapping `Zero` and `Infinity` onto each other.
    pub fn reciprocal(&self) -> Self {
        match self {
            GeometricParam::Zero => GeometricParam::Infinity,
            GeometricParam::Infinity => GeometricParam::Zero,
            GeometricParam::Finite(p) => GeometricParam::Finite(S::one() / p.clone()),
        }
    }

    pub fn to_rational(&self) -> GeometricParam<Rational> {
        match self {
            GeometricParam::Zero => GeometricParam::Zero,
            GeometricParam::Infinity => GeometricParam::Infinity,
            GeometricParam::Finite(p) => GeometricParam::Finite(p.to_rational()),
        }
    }

    /// Single-round scores for `k` athletes; `None` for the two multi-round edges.
    pub fn finite_vector(&self, k: usize) -> Option<Vec<S>> {
        let GeometricParam::Finite(p) = self else {
            return None;
        };
        let one = S::one();
        let k = k as u32;
        let v = (1..=k)
            .map(|j| match p.approx_cmp(&one) {
                Ordering::Greater => p.powu(k - j),
                Ordering::Equal => S::from_i64(i64::from(k - j)),
                Ordering::Less => S::one() - p.powu(k - j),
            })
            .collect();
        Some(v)
    }
}

impl<S: fmt::Display> fmt::Display for GeometricParam<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometricParam::Zero => f.write_str("0"),
            GeometricParam::Infinity => f.write_str("inf"),
            GeometricParam::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// How the vector for `k - 1` athletes is derived from the one for `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrimPolicy {
    /// Keep the first `k` scores (drop the worst positions).
    FromBottom,
    /// Keep the last `k` scores (drop the best positions).
    FromTop,
    /// Every size comes from a closed formula.
    Formula,
}

/// Extra round appended after the table's own rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Tiebreak {
    #[default]
    None,
    /// `(1, 0, ..., 0)`: count of first places.
    Plurality,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind<S> {
    Geometric(GeometricParam<S>),
    Explicit {
        rounds: Vec<Vec<S>>,
        trim: TrimPolicy,
        overrides: BTreeMap<usize, Vec<Vec<S>>>,
    },
}

/// Score vectors for every field size `k` and tie-break round `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable<S = Rational> {
    kind: Kind<S>,
    tiebreak: Tiebreak,
    max_size: Option<usize>,
}

/// Lexicographic count comparison used for the multi-round geometric edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CountOrder {
    /// More first places, then more second places, ...
    TopDown,
    /// Fewer last places, then fewer second-to-last places, ...
    BottomUp,
}

/// How `aggregate` evaluates a table at one field size.
pub(crate) struct Plan<S> {
    pub counts: Option<CountOrder>,
    pub vectors: Vec<Vec<S>>,
}

impl<S: Scalar> ScoreTable<S> {
    pub fn geometric(p: GeometricParam<S>) -> Self {
        ScoreTable {
            kind: Kind::Geometric(p),
            tiebreak: Tiebreak::None,
            max_size: Some(DEFAULT_GEOMETRIC_MAX_SIZE),
        }
    }

    pub fn borda() -> Self {
        Self::geometric(GeometricParam::borda())
    }

    /// A table given by its vectors at the largest size, trimmed for smaller fields.
    ///
    /// All rounds must share one length and round 1 must be non-increasing.
    pub fn explicit(rounds: Vec<Vec<S>>, trim: TrimPolicy) -> Result<Self> {
        if trim == TrimPolicy::Formula {
            return Err(Error::InvalidTable(
                "explicit tables trim from the top or bottom".into(),
            ));
        }
        let len = rounds.first().map(Vec::len).unwrap_or(0);
        if len == 0 {
            return Err(Error::InvalidTable(
                "a table needs at least one non-empty round".into(),
            ));
        }
        validate_rounds(&rounds, len)?;
        Ok(ScoreTable {
            kind: Kind::Explicit {
                rounds,
                trim,
                overrides: BTreeMap::new(),
            },
            tiebreak: Tiebreak::None,
            max_size: Some(len),
        })
    }

    /// Single-round table from one vector.
    pub fn single(scores: Vec<S>, trim: TrimPolicy) -> Result<Self> {
        Self::explicit(alloc::vec![scores], trim)
    }

    /// Supplies the rounds for field size `k` directly instead of trimming.
    pub fn with_override(mut self, k: usize, rounds: Vec<Vec<S>>) -> Result<Self> {
        let Kind::Explicit { overrides, .. } = &mut self.kind else {
            return Err(Error::InvalidTable(
                "geometric tables are defined by formula".into(),
            ));
        };
        if rounds.is_empty() {
            return Err(Error::InvalidTable(format!("no rounds given for size {k}")));
        }
        validate_rounds(&rounds, k)?;
        overrides.insert(k, rounds);
        self.max_size = self.max_size.map(|m| m.max(k));
        Ok(self)
    }

    pub fn with_tiebreak(mut self, tiebreak: Tiebreak) -> Self {
        self.tiebreak = tiebreak;
        self
    }

    pub fn with_plurality_tiebreak(self) -> Self {
        self.with_tiebreak(Tiebreak::Plurality)
    }

    /// Changes the largest field size a geometric table answers for.
    pub fn with_max_size(mut self, max: Option<usize>) -> Self {
        if matches!(self.kind, Kind::Geometric(_)) {
            self.max_size = max;
        }
        self
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }

    pub fn tiebreak(&self) -> Tiebreak {
        self.tiebreak
    }

    pub fn trim_policy(&self) -> TrimPolicy {
        match &self.kind {
            Kind::Geometric(_) => TrimPolicy::Formula,
            Kind::Explicit { trim, .. } => *trim,
        }
    }

    pub fn geometric_param(&self) -> Option<&GeometricParam<S>> {
        match &self.kind {
            Kind::Geometric(p) => Some(p),
            Kind::Explicit { .. } => None,
        }
    }

    /// All rounds for a field of `k` athletes, tie-break included.
    pub fn rounds(&self, k: usize) -> Result<Vec<Vec<S>>> {
        let plan = self.plan(k)?;
        let mut rounds = match plan.counts {
            None => Vec::new(),
            Some(order) => (1..k)
                .map(|r| {
                    let ones = match order {
                        CountOrder::TopDown => r,
                        CountOrder::BottomUp => k - r,
                    };
                    (0..k)
                        .map(|j| if j < ones { S::one() } else { S::zero() })
                        .collect()
                })
                .collect(),
        };
        rounds.extend(plan.vectors);
        Ok(rounds)
    }

    /// The first round at size `k`.
    pub fn round_one(&self, k: usize) -> Result<Vec<S>> {
        self.rounds(k)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidTable(format!("no rounds at size {k}")))
    }

    pub(crate) fn plan(&self, k: usize) -> Result<Plan<S>> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "field size must be at least 1".into(),
            ));
        }
        if self.max_size.is_some_and(|max| k > max) {
            return Err(Error::MissingVector(k));
        }
        let mut plan = match &self.kind {
            Kind::Geometric(GeometricParam::Infinity) => Plan {
                counts: Some(CountOrder::TopDown),
                vectors: Vec::new(),
            },
            Kind::Geometric(GeometricParam::Zero) => Plan {
                counts: Some(CountOrder::BottomUp),
                vectors: Vec::new(),
            },
            Kind::Geometric(p) => Plan {
                counts: None,
                vectors: alloc::vec![p.finite_vector(k).expect("finite parameter")],
            },
            Kind::Explicit {
                rounds,
                trim,
                overrides,
            } => {
                let vectors = match overrides.get(&k) {
                    Some(v) => v.clone(),
                    None => {
                        let len = rounds[0].len();
                        if k > len {
                            return Err(Error::MissingVector(k));
                        }
                        rounds
                            .iter()
                            .map(|r| match trim {
                                TrimPolicy::FromTop => r[len - k..].to_vec(),
                                _ => r[..k].to_vec(),
                            })
                            .collect()
                    }
                };
                Plan {
                    counts: None,
                    vectors,
                }
            }
        };
        if self.tiebreak == Tiebreak::Plurality {
            plan.vectors.push(
                (0..k)
                    .map(|j| if j == 0 { S::one() } else { S::zero() })
                    .collect(),
            );
        }
        Ok(plan)
    }

    /// The same table with exact coefficients (floats are rationalized).
    pub fn to_rational(&self) -> ScoreTable<Rational> {
        let conv = |rounds: &Vec<Vec<S>>| -> Vec<Vec<Rational>> {
            rounds
                .iter()
                .map(|r| r.iter().map(Scalar::to_rational).collect())
                .collect()
        };
        let kind = match &self.kind {
            Kind::Geometric(p) => Kind::Geometric(p.to_rational()),
            Kind::Explicit {
                rounds,
                trim,
                overrides,
            } => Kind::Explicit {
                rounds: conv(rounds),
                trim: *trim,
                overrides: overrides.iter().map(|(k, v)| (*k, conv(v))).collect(),
            },
        };
        ScoreTable {
            kind,
            tiebreak: self.tiebreak,
            max_size: self.max_size,
        }
    }
}

fn validate_rounds<S: Scalar>(rounds: &[Vec<S>], len: usize) -> Result<()> {
    if let Some(bad) = rounds.iter().find(|r| r.len() != len) {
        return Err(Error::Dimension {
            expected: len,
            actual: bad.len(),
        });
    }
    let first = &rounds[0];
    if first
        .windows(2)
        .any(|w| w[0].approx_cmp(&w[1]) == Ordering::Less)
    {
        return Err(Error::InvalidTable(
            "round-1 scores must be non-increasing".into(),
        ));
    }
    Ok(())
}

/// Rounds of the geometric rule with parameter `p` for `k` athletes.
pub fn geometric_scores<S: Scalar>(p: &GeometricParam<S>, k: usize) -> Result<Vec<Vec<S>>> {
    ScoreTable::geometric(p.clone())
        .with_max_size(None)
        .rounds(k)
}

/// Whether `s = alpha * t + beta` for some `alpha > 0`; returns `(alpha, beta)`.
///
/// `alpha` and `beta` are solved from the two coordinates where `t` spreads
/// the most; the remaining coordinates are checked with [`Scalar::is_negligible`]
/// on the residuals, relative to the largest magnitude in `s`.
pub fn linear_equiv<S: Scalar>(s: &[S], t: &[S]) -> Result<Option<(S, S)>> {
    if s.len() != t.len() {
        return Err(Error::Dimension {
            expected: s.len(),
            actual: t.len(),
        });
    }
    if s.len() < 2 {
        return Err(Error::Precondition(
            "linear equivalence needs vectors of length >= 2".into(),
        ));
    }
    let arg = |v: &[S], want: Ordering| {
        (0..v.len())
            .reduce(|best, i| {
                if v[i].total_cmp(&v[best]) == want {
                    i
                } else {
                    best
                }
            })
            .expect("non-empty")
    };
    let (hi, lo) = (arg(t, Ordering::Greater), arg(t, Ordering::Less));
    let scale = s
        .iter()
        .map(|x| {
            if x.total_cmp(&S::zero()) == Ordering::Less {
                -x.clone()
            } else {
                x.clone()
            }
        })
        .reduce(|a, b| {
            if a.total_cmp(&b) == Ordering::Less {
                b
            } else {
                a
            }
        })
        .expect("non-empty");

    let t_spread = t[hi].clone() - t[lo].clone();
    let (alpha, beta) = if t_spread.is_negligible(&t[hi]) && t[hi].approx_eq(&t[lo]) {
        // t is constant: only a constant s matches.
        (S::one(), s[0].clone() - t[0].clone())
    } else {
        let alpha = (s[hi].clone() - s[lo].clone()) / t_spread;
        if !alpha.is_positive() {
            return Ok(None);
        }
        let beta = s[hi].clone() - alpha.clone() * t[hi].clone();
        (alpha, beta)
    };
    let fits = s.iter().zip(t).all(|(sj, tj)| {
        let residual = sj.clone() - (alpha.clone() * tj.clone() + beta.clone());
        residual.is_negligible(&scale)
    });
    Ok(fits.then_some((alpha, beta)))
}

/// Whether `v` is strictly decreasing.
pub fn strictly_decreasing<S: Scalar>(v: &[S]) -> bool {
    v.windows(2)
        .all(|w| w[0].approx_cmp(&w[1]) == Ordering::Greater)
}

/// Per-size outcome of [`independence_by_size`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeIndependence {
    pub k: usize,
    pub loser_independent: bool,
    pub winner_independent: bool,
}

/// Tests the round-1 vectors of `table` for sizes `2..=m` against the
/// prefix (loser side) and suffix (winner side) of the size-`m` vector.
///
/// Both flags also require the size-`m` vector to be strictly decreasing.
/// Only round 1 is inspected, so the flags describe the table as a
/// single-round scoring rule.
pub fn independence_by_size<S: Scalar>(
    table: &ScoreTable<S>,
    m: usize,
) -> Result<Vec<SizeIndependence>> {
    let full = table.round_one(m)?;
    let strict = strictly_decreasing(&full);
    (2..=m)
        .map(|k| {
            let small = table.round_one(k)?;
            let prefix = linear_equiv(&small, &full[..k])?.is_some();
            let suffix = linear_equiv(&small, &full[m - k..])?.is_some();
            Ok(SizeIndependence {
                k,
                loser_independent: strict && prefix,
                winner_independent: strict && suffix,
            })
        })
        .collect()
}

/// Small catalogue of named tables.
pub mod catalog {
    use super::*;

    /// Plurality `(1, 0, ..., 0)` at every size.
    pub fn plurality<S: Scalar>(m: usize) -> ScoreTable<S> {
        let v = (0..m)
            .map(|j| if j == 0 { S::one() } else { S::zero() })
            .collect();
        ScoreTable::single(v, TrimPolicy::FromBottom).expect("valid")
    }

    /// Antiplurality `(1, ..., 1, 0)` at every size.
    pub fn antiplurality<S: Scalar>(m: usize) -> ScoreTable<S> {
        let v = (0..m)
            .map(|j| if j + 1 < m { S::one() } else { S::zero() })
            .collect();
        ScoreTable::single(v, TrimPolicy::FromTop).expect("valid")
    }

    /// `(k, k-1, ..., 2, 0)`: Borda plus one point for everyone but the last.
    /// Trimming from the top reproduces the formula at every size.
    pub fn borda_plus_one<S: Scalar>(m: usize) -> ScoreTable<S> {
        let v = (1..=m)
            .map(|j| {
                if j == m {
                    S::zero()
                } else {
                    S::from_i64((m - j + 1) as i64)
                }
            })
            .collect();
        ScoreTable::single(v, TrimPolicy::FromTop).expect("valid")
    }

    /// `(0, -1, -3, ..., -k(k-1)/2)`: the gap below position `j` is `j`.
    /// Trimming from the bottom reproduces the formula at every size.
    pub fn triangular_penalty<S: Scalar>(m: usize) -> ScoreTable<S> {
        let v = (1..=m as i64)
            .map(|j| S::from_i64(-(j * (j - 1) / 2)))
            .collect();
        ScoreTable::single(v, TrimPolicy::FromBottom).expect("valid")
    }
}

impl<S: Scalar> fmt::Display for ScoreTable<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Geometric(p) => write!(f, "geometric(p={p})")?,
            Kind::Explicit { rounds, trim, .. } => write!(
                f,
                "table(size={}, rounds={}, trim={trim})",
                rounds[0].len(),
                rounds.len()
            )?,
        }
        if self.tiebreak == Tiebreak::Plurality {
            f.write_str(" + plurality tie-break")?;
        }
        Ok(())
    }
}

impl Tiebreak {
    pub fn name(&self) -> &'static str {
        match self {
            Tiebreak::None => "none",
            Tiebreak::Plurality => "plurality",
        }
    }
}

impl core::str::FromStr for Tiebreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Tiebreak::None),
            "plurality" => Ok(Tiebreak::Plurality),
            other => Err(Error::InvalidParameter(format!(
                "unknown tie-break `{other}`"
            ))),
        }
    }
}

impl core::str::FromStr for TrimPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bottom" | "from-bottom" => Ok(TrimPolicy::FromBottom),
            "top" | "from-top" => Ok(TrimPolicy::FromTop),
            "formula" => Ok(TrimPolicy::Formula),
            other => Err(Error::InvalidParameter(format!(
                "unknown trim policy `{other}`"
            ))),
        }
    }
}

impl core::str::FromStr for GeometricParam<Rational> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(GeometricParam::Infinity),
            text => {
                let p = crate::scalar::parse_rational(text)?;
                if num_traits::Zero::is_zero(&p) {
                    Ok(GeometricParam::Zero)
                } else {
                    GeometricParam::finite(p)
                }
            }
        }
    }
}

impl fmt::Display for TrimPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrimPolicy::FromBottom => "bottom",
            TrimPolicy::FromTop => "top",
            TrimPolicy::Formula => "formula",
        })
    }
}
