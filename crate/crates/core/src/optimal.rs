//! Optimal scores from cardinal performance data, and geometric fitting.
//!
//! Everything here works in `f64`. Sums use pairwise summation so results do
//! not depend on evaluation order beyond rounding.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Risk attitude of the organiser; any positive value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Lambda(f64);

impl Lambda {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Lambda(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Per-race quality of a single performance.
    pub fn utility(self, x: f64) -> f64 {
        if self.0 == 1.0 {
            x
        } else if self.0 > 1.0 {
            libm::pow(self.0, x)
        } else {
            -libm::pow(self.0, x)
        }
    }
}

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (left, right) = values.split_at(values.len() / 2);
        pairwise_sum(left) + pairwise_sum(right)
    }
}

/// Overall quality of the per-race performances `x`.
pub fn quality(x: &[f64], lambda: Lambda) -> Result<f64> {
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite performance {bad}"
        )));
    }
    let terms: Vec<f64> = x.iter().map(|&v| lambda.utility(v)).collect();
    Ok(pairwise_sum(&terms))
}

/// Per-race performances listed best-to-worst by finishing position.
#[derive(Clone, Debug, PartialEq)]
pub struct PerformanceTable {
    races: Vec<Vec<f64>>,
    top_k: Option<usize>,
}

impl PerformanceTable {
    pub fn new(races: Vec<Vec<f64>>) -> Result<Self> {
        if races.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (i, race) in races.iter().enumerate() {
            if race.len() < 2 {
                return Err(Error::InvalidTable(format!(
                    "race {i} has fewer than 2 entries"
                )));
            }
            if race.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidTable(format!(
                    "race {i} has a non-finite entry"
                )));
            }
        }
        Ok(PerformanceTable { races, top_k: None })
    }

    /// Keeps only the first `k` positions of every race.
    pub fn with_top_k(mut self, k: Option<usize>) -> Result<Self> {
        if let Some(k) = k {
            if k < 2 {
                return Err(Error::InvalidParameter("top_k must be at least 2".into()));
            }
            if let Some((i, short)) = self.races.iter().enumerate().find(|(_, r)| r.len() < k) {
                return Err(Error::InvalidTable(format!(
                    "race {i} has {} entries, fewer than top_k = {k}",
                    short.len()
                )));
            }
        }
        self.top_k = k;
        Ok(self)
    }

    pub fn top_k(&self) -> Option<usize> {
        self.top_k
    }

    pub fn num_races(&self) -> usize {
        self.races.len()
    }

    /// Race vectors after truncation.
    pub fn races(&self) -> impl Iterator<Item = &[f64]> {
        self.races.iter().map(move |r| match self.top_k {
            Some(k) => &r[..k],
            None => &r[..],
        })
    }
}

/// Mean per-position order statistic of the per-race qualities.
pub fn optimal_scores(perf: &PerformanceTable, lambda: Lambda) -> Result<Vec<f64>> {
    let mut rows = perf.races();
    let width = rows.next().map(<[f64]>::len).ok_or(Error::EmptyProfile)?;
    if let Some(bad) = rows.find(|r| r.len() != width) {
        return Err(Error::Dimension {
            expected: width,
            actual: bad.len(),
        });
    }
    let sorted: Vec<Vec<f64>> = perf
        .races()
        .map(|race| {
            let mut u: Vec<f64> = race.iter().map(|&x| lambda.utility(x)).collect();
            u.sort_by(|a, b| b.total_cmp(a));
            u
        })
        .collect();
    let n = sorted.len() as f64;
    Ok((0..width)
        .map(|j| {
            let column: Vec<f64> = sorted.iter().map(|u| u[j]).collect();
            pairwise_sum(&column) / n
        })
        .collect())
}

/// Affine map sending the first score to 100 and the last to 0.
pub fn normalize(scores: &[f64]) -> Result<Vec<f64>> {
    let (Some(&first), Some(&last)) = (scores.first(), scores.last()) else {
        return Err(Error::Degenerate("empty score vector".into()));
    };
    if first.partial_cmp(&last) != Some(core::cmp::Ordering::Greater) {
        return Err(Error::Degenerate(format!(
            "first score {first} must exceed last score {last}"
        )));
    }
    let span = first - last;
    Ok(scores.iter().map(|s| 100.0 * (s - last) / span).collect())
}

/// Search settings for [`fit_geometric_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub p_min: f64,
    pub p_max: f64,
    pub grid_points: usize,
    /// Stop once the bracket on `ln p` is narrower than this.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            p_min: 0.01,
            p_max: 100.0,
            grid_points: 2000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricFit {
    pub p: f64,
    pub objective: f64,
}

/// The geometric vector for `m` positions scaled to run from 1 down to 0.
pub fn normalized_geometric(ln_p: f64, m: usize) -> Vec<f64> {
    let top = (m - 1) as f64;
    if libm::fabs(ln_p * top) < 1e-12 {
        return (0..m).map(|j| (top - j as f64) / top).collect();
    }
    let denom = libm::expm1(ln_p * top);
    (0..m)
        .map(|j| libm::expm1(ln_p * (top - j as f64)) / denom)
        .collect()
}

fn unit_range(scores: &[f64]) -> Vec<f64> {
    let (first, last) = (scores[0], scores[scores.len() - 1]);
    scores.iter().map(|s| (s - last) / (first - last)).collect()
}

/// Sum over position pairs `j < z` of `(d_j - d_z)^2`, `d = s - g`.
fn spread_objective(target: &[f64], ln_p: f64) -> f64 {
    let g = normalized_geometric(ln_p, target.len());
    let d: Vec<f64> = target.iter().zip(&g).map(|(s, g)| s - g).collect();
    let mean = pairwise_sum(&d) / d.len() as f64;
    let squares: Vec<f64> = d.iter().map(|x| (x - mean) * (x - mean)).collect();
    d.len() as f64 * pairwise_sum(&squares)
}

/// Least-squares geometric parameter for `scores` with default settings.
pub fn fit_geometric(scores: &[f64]) -> Result<GeometricFit> {
    fit_geometric_with(scores, &FitOptions::default())
}

/// Least-squares geometric parameter for `scores`.
///
/// Both `scores` and the candidate geometric vector are rescaled to run from
/// 1 to 0. The objective is minimised over a log-spaced grid of `p` and the
/// best grid cell is refined by golden-section search. Scores must be
/// non-increasing with a strictly larger first than last entry; trailing
/// runs of equal values (as in prize tables padded with zeros) are allowed.
pub fn fit_geometric_with(scores: &[f64], options: &FitOptions) -> Result<GeometricFit> {
    if scores.len() < 3 {
        return Err(Error::InvalidParameter(
            "fitting needs at least 3 scores".into(),
        ));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("scores must be finite".into()));
    }
    if scores.windows(2).any(|w| w[0] < w[1]) || scores[0] <= scores[scores.len() - 1] {
        return Err(Error::InvalidParameter(
            "scores must be non-increasing with first above last".into(),
        ));
    }
    if !(options.p_min > 0.0 && options.p_max > options.p_min && options.grid_points >= 3) {
        return Err(Error::InvalidParameter("invalid fit search range".into()));
    }
    let target = unit_range(scores);
    let f = |ln_p: f64| spread_objective(&target, ln_p);

    let (lo, hi) = (libm::log(options.p_min), libm::log(options.p_max));
    let step = (hi - lo) / (options.grid_points - 1) as f64;
    let grid_at = |i: usize| lo + step * i as f64;
    let (best_i, best_val) = (0..options.grid_points).map(|i| (i, f(grid_at(i)))).fold(
        (0, f64::INFINITY),
        |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
    );

    let mut a = grid_at(best_i.saturating_sub(1));
    let mut b = grid_at((best_i + 1).min(options.grid_points - 1));
    let ratio = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > options.tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / 2.0;
    let refined = f(mid);
    let (ln_p, objective) = if refined <= best_val {
        (mid, refined)
    } else {
        (grid_at(best_i), best_val)
    };
    Ok(GeometricFit {
        p: libm::exp(ln_p),
        objective,
    })
}

/// Lambda for a target event whose record is `target_record`, matching the
/// reference event's valuation of its own record.
pub fn calibrate_lambda(ref_record: f64, ref_lambda: Lambda, target_record: f64) -> Result<Lambda> {
    if !(ref_record > 0.0 && target_record > 0.0) {
        return Err(Error::InvalidParameter("records must be positive".into()));
    }
    if ref_lambda.value() <= 1.0 {
        return Err(Error::InvalidParameter(
            "reference lambda must exceed 1".into(),
        ));
    }
    Lambda::new(libm::pow(ref_lambda.value(), ref_record / target_record))
}
