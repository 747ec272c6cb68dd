//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Where a number is derived, it is recomputed here from the raw fixture
//! text by plain arithmetic rather than through the library.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geoscore::axioms::{check_axiom, check_duality, evaluate, AxiomId, SamplerConfig, Verdict};
use geoscore::optimal::{calibrate_lambda, fit_geometric, Lambda};
use geoscore::rules::catalog;
use geoscore::witness::{
    independence_violation, majority_loser_blocks, majority_loser_first, no_race_win_winner, Side,
};
use geoscore::{aggregate, GeometricParam, Rational, Scalar, ScoreTable, TrimPolicy};
use geoscore_cli::{fixtures, run};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Score column of a `position,score` fixture.
fn vector(name: &str) -> Vec<f64> {
    fixtures::get(name)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("position"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

/// Races of a `race_id,position,athlete` fixture, in file order.
fn race_rows(name: &str) -> Vec<Vec<String>> {
    let mut races: Vec<(String, Vec<(usize, String)>)> = Vec::new();
    for line in fixtures::get(name).unwrap().lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let (race, pos, who) = (cells[0], cells[1].parse().unwrap(), cells[2].to_string());
        match races.iter_mut().find(|(r, _)| r == race) {
            Some((_, rows)) => rows.push((pos, who)),
            None => races.push((race.to_string(), vec![(pos, who)])),
        }
    }
    races
        .into_iter()
        .map(|(_, mut rows)| {
            rows.sort();
            rows.into_iter().map(|(_, w)| w).collect()
        })
        .collect()
}

/// Plain points totals, skipping `removed` and padding the vector with zeros.
fn oracle_totals(races: &[Vec<String>], scores: &[f64], removed: &[&str]) -> BTreeMap<String, f64> {
    let mut totals = BTreeMap::new();
    for race in races {
        let kept = race.iter().filter(|w| !removed.contains(&w.as_str()));
        for (j, who) in kept.enumerate() {
            *totals.entry(who.clone()).or_insert(0.0) += scores.get(j).copied().unwrap_or(0.0);
        }
    }
    totals
}

fn wins(races: &[Vec<String>], who: &str) -> usize {
    races.iter().filter(|r| r[0] == who).count()
}

fn replay_ok(fixture: &str) -> Result<(String, Duration), String> {
    let start = Instant::now();
    let out = run(["geoscore", "replay", "--fixture", fixture]);
    let elapsed = start.elapsed();
    ensure(
        out.code == 0,
        format!("replay {fixture} exited {}: {}", out.code, out.stderr),
    )?;
    Ok((out.stdout, elapsed))
}

fn expect_totals(totals: &BTreeMap<String, f64>, expected: &[(&str, f64)]) -> Result<(), String> {
    for (who, value) in expected {
        ensure(
            totals.get(*who) == Some(value),
            format!("{who}: {:?} != {value}", totals.get(*who)),
        )?;
    }
    Ok(())
}

fn criterion_1() -> Check {
    let (stdout, elapsed) = replay_ok("table1")?;
    let races = race_rows("table1");
    let ibu = vector("ibu-scores");
    let before = oracle_totals(&races, &ibu, &[]);
    expect_totals(
        &before,
        &[
            ("Mäkäräinen", 348.0),
            ("Domracheva", 347.0),
            ("Glazyrina", 190.0),
        ],
    )?;
    let after = oracle_totals(&races, &ibu, &["Glazyrina"]);
    expect_totals(&after, &[("Mäkäräinen", 348.0), ("Domracheva", 348.0)])?;
    ensure(
        wins(&races, "Domracheva") > wins(&races, "Mäkäräinen"),
        "tie-break race wins",
    )?;
    ensure(
        stdout.contains("1. Domracheva  348") && stdout.contains("Domracheva overtakes Mäkäräinen"),
        "replay output lacks the tie-break result",
    )?;
    ensure(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "348/347/190, then 348 = 348 with Domracheva first ({elapsed:.0?})"
    ))
}

fn criterion_2() -> Check {
    let (stdout, elapsed) = replay_ok("table2")?;
    let races = race_rows("table2");
    let ibu = vector("ibu-scores");
    let before = oracle_totals(&races, &ibu, &[]);
    expect_totals(
        &before,
        &[
            ("Soukalová", 120.0),
            ("Domracheva", 92.0),
            ("Kuzmina", 84.0),
            ("Skardino", 72.0),
            ("Hildebrand", 71.0),
        ],
    )?;
    let after = oracle_totals(&races, &ibu, &["Soukalová"]);
    expect_totals(
        &after,
        &[
            ("Domracheva", 100.0),
            ("Kuzmina", 91.0),
            ("Hildebrand", 77.0),
            ("Skardino", 76.0),
        ],
    )?;
    ensure(
        stdout.contains("Hildebrand overtakes Skardino"),
        "replay output lacks the overtake",
    )?;
    ensure(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "120/92/84/72/71, then 100/91/77/76 ({elapsed:.0?})"
    ))
}

fn criterion_3() -> Check {
    let (stdout, _) = replay_ok("table3")?;
    let races = race_rows("table3");
    let totals = oracle_totals(&races, &vector("moto125-1999"), &[]);
    expect_totals(
        &totals,
        &[("Alzamora", 227.0), ("Melandri", 226.0), ("Azuma", 190.0)],
    )?;
    let best_other = totals
        .iter()
        .filter(|(w, _)| *w != "Alzamora")
        .map(|(_, t)| *t)
        .fold(0.0, f64::max);
    ensure(best_other < 227.0, "Alzamora is not the unique leader")?;
    ensure(wins(&races, "Alzamora") == 0, "Alzamora won a race")?;
    ensure(
        stdout.contains("check overall winner Alzamora never won a race: ok"),
        "detector",
    )?;
    Ok("227/226/190; the winner has zero first places".into())
}

fn criterion_4() -> Check {
    replay_ok("table4")?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); 8];
    for line in fixtures::get("table4").unwrap().lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let pos: usize = cells[1].parse().unwrap();
        columns[pos - 1].push(cells[2].parse().unwrap());
    }
    let mean = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        columns
            .iter()
            .map(|c| c.iter().map(|x| f(*x)).sum::<f64>() / c.len() as f64)
            .collect()
    };
    let normalized = |v: &[f64]| -> Vec<i64> {
        v.iter()
            .map(|x| (100.0 * (x - v[7]) / (v[0] - v[7])).round() as i64)
            .collect()
    };
    let unit = mean(&|x| x);
    let hundred = mean(&|x| 100f64.powf(x));
    ensure(
        normalized(&unit) == [100, 73, 59, 49, 42, 27, 11, 0],
        format!("{:?}", normalized(&unit)),
    )?;
    ensure(
        normalized(&hundred) == [100, 51, 34, 26, 20, 11, 5, 0],
        format!("{:?}", normalized(&hundred)),
    )?;
    let published = [-0.28, -0.38, -0.43, -0.46, -0.49, -0.54, -0.60, -0.63];
    let worst = unit
        .iter()
        .zip(published)
        .map(|(x, p)| (x - p).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 0.005 + 1e-12, format!("raw deviation {worst}"))?;

    // The library agrees with the oracle.
    let table = geoscore_cli::ingest::parse_performance(fixtures::get("table4").unwrap(), Some(8))
        .map_err(|e| e.to_string())?
        .table;
    let lib = geoscore::optimal::optimal_scores(&table, Lambda::new(1.0).unwrap()).unwrap();
    let gap = lib
        .iter()
        .zip(&unit)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(gap < 1e-12, format!("library differs from oracle by {gap}"))?;
    Ok(format!(
        "normalized rows match; raw lambda=1 max deviation {worst:.4}"
    ))
}

fn sampler(seed: u64) -> SamplerConfig {
    SamplerConfig::new(1000, seed, 6, 8)
}

fn no_violations(
    table: &ScoreTable,
    axiom: AxiomId,
    seed: u64,
    label: &str,
) -> Result<usize, String> {
    let report = check_axiom(table, axiom, &sampler(seed)).map_err(|e| e.to_string())?;
    ensure(report.violations == 0, format!("{label}: {report}"))?;
    ensure(
        report.trials == 1000,
        format!("{label}: {} trials", report.trials),
    )?;
    Ok(report.tested())
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let params: Vec<(&str, GeometricParam)> = vec![
        ("0.3", GeometricParam::finite(q(3, 10)).unwrap()),
        ("0.7", GeometricParam::finite(q(7, 10)).unwrap()),
        ("1", GeometricParam::borda()),
        ("1.5", GeometricParam::finite(q(3, 2)).unwrap()),
        ("2.5", GeometricParam::finite(q(5, 2)).unwrap()),
        ("0", GeometricParam::Zero),
        ("inf", GeometricParam::Infinity),
    ];
    let mut runs = 0;
    for (i, (label, p)) in params.iter().enumerate() {
        let table = ScoreTable::geometric(p.clone());
        let seed = 500 + i as u64;
        no_violations(
            &table,
            AxiomId::IndependenceUnanimousWinner,
            seed,
            &format!("p={label} IUW"),
        )?;
        no_violations(
            &table,
            AxiomId::IndependenceUnanimousLoser,
            seed,
            &format!("p={label} IUL"),
        )?;
        runs += 2;
        let concave = matches!(*label, "0.3" | "0.7" | "1" | "0");
        if concave {
            no_violations(
                &table,
                AxiomId::MajorityLoserNeverFirst,
                seed,
                &format!("p={label} MLNF"),
            )?;
            runs += 1;
        }
        match *label {
            "inf" => {
                no_violations(&table, AxiomId::MajorityWinnerFirst, seed, "p=inf MWF")?;
                runs += 1;
            }
            "1" => {
                let tested =
                    no_violations(&table, AxiomId::ReversalSymmetry, seed, "p=1 reversal")?;
                ensure(
                    tested > 500,
                    format!("only {tested} non-vacuous reversal trials"),
                )?;
                runs += 1;
            }
            "0" => {
                no_violations(&table, AxiomId::MajorityLoserLast, seed, "p=0 MLL")?;
                runs += 1;
            }
            _ => {}
        }
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "{runs} axiom runs x 1000 trials, zero violations ({elapsed:.1?})"
    ))
}

fn criterion_6() -> Check {
    for (i, p) in [q(1, 2), q(2, 1), q(3, 1)].into_iter().enumerate() {
        let p = GeometricParam::finite(p).unwrap();
        let table = ScoreTable::geometric(p.clone());
        let dual = ScoreTable::geometric(p.reciprocal());
        let report =
            check_duality(&table, &dual, &sampler(600 + i as u64)).map_err(|e| e.to_string())?;
        ensure(
            report.violations == 0 && report.trials == 1000,
            format!("p={p}: {report}"),
        )?;
    }
    let report = check_duality(
        &ScoreTable::geometric(GeometricParam::<Rational>::Zero),
        &ScoreTable::geometric(GeometricParam::Infinity),
        &sampler(610),
    )
    .map_err(|e| e.to_string())?;
    ensure(report.violations == 0, format!("(0, inf): {report}"))?;
    Ok("p in {1/2, 2, 3} and (0, inf): 4 x 1000 profiles, zero violations".into())
}

fn criterion_7() -> Check {
    // No-race-win winner, p = 1, m = 4: recount Borda points by hand.
    let w = no_race_win_winner(&GeometricParam::borda(), 4).map_err(|e| e.to_string())?;
    let mut borda: BTreeMap<String, i64> = BTreeMap::new();
    for race in w.profile.races() {
        for (j, a) in race.order().iter().enumerate() {
            *borda.entry(a.name().to_string()).or_default() += 3 - j as i64;
        }
    }
    let rival_best = borda
        .iter()
        .filter(|(n, _)| **n != w.focus.name())
        .map(|(_, v)| *v)
        .max();
    ensure(
        borda[w.focus.name()] == 6 && rival_best == Some(4),
        format!("{borda:?}"),
    )?;
    ensure(
        w.profile.races().all(|r| r.order()[0] != w.focus),
        "focus won a race",
    )?;
    let ranking = aggregate(&w.profile, &ScoreTable::<Rational>::borda()).unwrap();
    ensure(
        ranking.unique_top() == Some(&w.focus),
        "aggregate disagrees",
    )?;

    // Majority loser first, p = 2, k = 3.
    let blocks = majority_loser_blocks(&q(2, 1), 3).map_err(|e| e.to_string())?;
    let w = majority_loser_first(&q(2, 1), 3).map_err(|e| e.to_string())?;
    ensure(
        blocks == 4 && w.profile.num_races() == 17,
        format!("n_k {blocks}, {} races", w.profile.num_races()),
    )?;
    let mut points: BTreeMap<String, i64> = BTreeMap::new();
    let mut last = 0;
    for race in w.profile.races() {
        for (j, a) in race.order().iter().enumerate() {
            *points.entry(a.name().to_string()).or_default() += 1 << (2 - j);
        }
        last += usize::from(race.order()[2] == w.focus);
    }
    ensure(
        points[w.focus.name()] == 41 && points[w.rival.name()] == 40,
        format!("{points:?}"),
    )?;
    ensure(2 * last > 17, "focus is not a majority loser")?;
    let table = ScoreTable::geometric(GeometricParam::finite(q(2, 1)).unwrap());
    let ranking = aggregate(&w.profile, &table).unwrap();
    ensure(
        ranking.unique_top() == Some(&w.focus),
        "majority loser not on top",
    )?;

    // Independence violation against the IBU table.
    let ibu: Vec<Rational> = vector("ibu-scores")
        .iter()
        .map(|&x| Rational::from_i64(x as i64))
        .collect();
    let table = ScoreTable::single(ibu, TrimPolicy::FromBottom).unwrap();
    let w = independence_violation(&table, 41, 40, Side::Winner).map_err(|e| e.to_string())?;
    let padding = w.profile.athlete(w.profile.race_indices(0)[0]).clone();
    let before = aggregate(&w.profile, &table).unwrap();
    let after = aggregate(&w.profile.remove_athlete(&padding).unwrap(), &table).unwrap();
    let flipped = before.compare(&w.focus, &w.rival) == Some(std::cmp::Ordering::Greater)
        && after.compare(&w.rival, &w.focus) == Some(std::cmp::Ordering::Greater);
    ensure(flipped, "IBU witness does not flip")?;
    Ok("6 vs 4; n_k = 4, 17 races, 41 vs 40; IBU pair flips after removal".into())
}

fn criterion_8() -> Check {
    let m = 6;
    let plus_one = catalog::borda_plus_one::<Rational>(m);
    no_violations(
        &plus_one,
        AxiomId::IndependenceUnanimousWinner,
        801,
        "(k..2,0) IUW",
    )?;
    no_violations(
        &plus_one,
        AxiomId::MajorityLoserNeverFirst,
        802,
        "(k..2,0) MLNF",
    )?;
    let small = catalog::borda_plus_one::<Rational>(4);
    let w = independence_violation(&small, 4, 3, Side::Loser).map_err(|e| e.to_string())?;
    ensure(
        evaluate(&small, AxiomId::IndependenceUnanimousLoser, &w.profile).unwrap()
            == Verdict::Violated,
        "(k..2,0) passes IUL on its witness",
    )?;

    let penalty = catalog::triangular_penalty::<Rational>(m);
    no_violations(
        &penalty,
        AxiomId::IndependenceUnanimousLoser,
        803,
        "(0,-1,-3..) IUL",
    )?;
    no_violations(
        &penalty,
        AxiomId::MajorityLoserNeverFirst,
        804,
        "(0,-1,-3..) MLNF",
    )?;
    let small = catalog::triangular_penalty::<Rational>(4);
    let w = independence_violation(&small, 4, 3, Side::Winner).map_err(|e| e.to_string())?;
    ensure(
        evaluate(&small, AxiomId::IndependenceUnanimousWinner, &w.profile).unwrap()
            == Verdict::Violated,
        "(0,-1,-3..) passes IUW on its witness",
    )?;
    Ok("each rule passes its proved axioms and fails the other on its witness".into())
}

fn criterion_9() -> Check {
    let mut worst: f64 = 0.0;
    for p in [0.5f64, 1.0, 1.3, 2.0] {
        for m in [8usize, 41] {
            let scores: Vec<f64> = (0..m)
                .map(|j| {
                    let e = (m - 1 - j) as i32;
                    if p > 1.0 {
                        p.powi(e)
                    } else if p == 1.0 {
                        f64::from(e)
                    } else {
                        1.0 - p.powi(e)
                    }
                })
                .collect();
            let fit = fit_geometric(&scores).map_err(|e| e.to_string())?;
            worst = worst.max((fit.p - p).abs());
            ensure(
                (fit.p - p).abs() <= 1e-4,
                format!("p={p}, m={m}: fitted {}", fit.p),
            )?;
        }
    }
    let prize = fit_geometric(&vector("ibu-prize"))
        .map_err(|e| e.to_string())?
        .p;
    ensure(
        (prize - 1.244).abs() <= 0.05,
        format!("IBU prize p = {prize}"),
    )?;
    let score = fit_geometric(&vector("ibu-scores"))
        .map_err(|e| e.to_string())?
        .p;
    ensure(
        (score - 1.058).abs() <= 0.05,
        format!("IBU score p = {score}"),
    )?;
    let cli = run(["geoscore", "fit", "fixture:ibu-prize"]);
    ensure(
        cli.code == 0 && cli.stdout.starts_with(&format!("p = {prize:.3}\n")),
        cli.stdout,
    )?;
    Ok(format!(
        "recovery error <= {worst:.1e}; IBU prize {prize:.3}, IBU score {score:.3}"
    ))
}

fn criterion_10() -> Check {
    let lambda =
        calibrate_lambda(9.58, Lambda::new(100.0).unwrap(), 21.34).map_err(|e| e.to_string())?;
    // 100^(9.58/21.34) by hand.
    let oracle = (9.58 / 21.34 * 100f64.ln()).exp();
    ensure(
        (lambda.value() - oracle).abs() < 1e-12,
        "library differs from oracle",
    )?;
    ensure(
        (lambda.value() - 7.9).abs() <= 0.05,
        format!("{}", lambda.value()),
    )?;
    Ok(format!("lambda = {:.3}", lambda.value()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("table1 replay", criterion_1),
        ("table2 replay", criterion_2),
        ("table3 replay", criterion_3),
        ("table4 optimal scores", criterion_4),
        ("property suite", criterion_5),
        ("duality", criterion_6),
        ("witness constructors", criterion_7),
        ("logical independence fixtures", criterion_8),
        ("geometric fit", criterion_9),
        ("lambda calibration", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
