//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use recipmatch::harness::{
    run_per_rank, run_strategy_count, run_welfare_sweep, ExperimentSpec, Mechanism, PerRankMode,
};
use recipmatch::matching::boston;
use recipmatch::model::BonusFunction;
use recipmatch::rng::{substream, Purpose};
use recipmatch::simgen::default_reputations;
use recipmatch::strategy::{audit_market, deviation_threshold, deviation_witness};
use recipmatch::{
    blocking_pairs, deferred_acceptance, enumerate_stable, gen_instance, generalized_match, is_student_optimal,
    reciprocating_market, AlphaDist, CollegeId, GenConfig, Instance, Market, Matching, MechanismConfig, Mode,
    PreferenceList, StudentId,
};

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn generalized(seed: u64) -> MechanismConfig {
    MechanismConfig::new(Mode::Generalized, seed)
}

/// 10 x 5 markets with a spread of correlations and both factor models.
fn mixed_instance(seed: u64) -> Instance {
    gen_instance(&GenConfig {
        seed,
        beta: (seed % 11) as f64 / 10.0,
        alpha: if seed.is_multiple_of(2) {
            AlphaDist::Uniform { lo: 0.0, hi: 1.0 }
        } else {
            AlphaDist::BernoulliHalf
        },
        ..GenConfig::default()
    })
    .unwrap()
}

fn r_stability() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..1000 {
        let inst = mixed_instance(seed);
        let config = generalized(seed);
        let m = generalized_match(&inst, &inst.student_prefs, &config).unwrap();
        let market = reciprocating_market(&inst, &inst.student_prefs, &config).unwrap();
        if !market.admits(&m) || !blocking_pairs(&m, &market).is_empty() {
            bad.push(seed);
        }
    }
    check(bad.is_empty(), format!("1000 instances, unstable outcomes: {bad:?}"))
}

fn student_optimality() -> Outcome {
    let mut bad = Vec::new();
    let mut stable_sets = 0;
    for seed in 0..200u64 {
        let mut rng = substream(seed, Purpose::Probe, 0, 0);
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=3);
        let mut inst = gen_instance(&GenConfig {
            seed,
            quota: rng.random_range(1..=2),
            beta: rng.random_range(0.0..=1.0),
            alpha: AlphaDist::Uniform { lo: 0.0, hi: 1.0 },
            ..GenConfig::sized(n, m)
        })
        .unwrap();
        // Truncate some lists so unacceptable pairs occur too.
        for list in &mut inst.student_prefs {
            let keep = rng.random_range(1..=m);
            *list = list.iter().take(keep).collect();
        }
        let market = reciprocating_market(&inst, &inst.student_prefs, &generalized(seed)).unwrap();
        let da = deferred_acceptance(&market);
        let set = enumerate_stable(&market).unwrap();
        stable_sets += set.len();
        if !set.contains(&da) || !is_student_optimal(&da, &set, &market).unwrap() {
            bad.push(seed);
        }
    }
    // Arbitrary college lists as well, where stable sets are rarely singletons.
    let mut multi = 0;
    for seed in 0..1000u64 {
        let market = random_market(seed);
        let da = deferred_acceptance(&market);
        let set = enumerate_stable(&market).unwrap();
        stable_sets += set.len();
        multi += usize::from(set.len() > 1);
        if !set.contains(&da) || !is_student_optimal(&da, &set, &market).unwrap() {
            bad.push(10_000 + seed);
        }
    }
    check(
        bad.is_empty(),
        format!(
            "200 generated + 1000 arbitrary markets, {stable_sets} stable matchings enumerated, {multi} arbitrary markets with several, failures: {bad:?}"
        ),
    )
}

/// 3 to 5 students and 3 colleges with uniformly random, nearly full lists on
/// both sides.
fn random_market(seed: u64) -> Market {
    use rand::seq::SliceRandom;
    let mut rng = substream(seed, Purpose::Probe, 2, 0);
    let n = rng.random_range(3..=5);
    let m = 3;
    let mut list = |len: usize, keep_min: usize| {
        let mut v: Vec<usize> = (0..len).collect();
        v.shuffle(&mut rng);
        let keep = rng.random_range(keep_min..=len);
        v.truncate(keep);
        v
    };
    let student_prefs = (0..n)
        .map(|_| list(m, 2).into_iter().map(CollegeId).collect())
        .collect();
    let college_prefs = (0..m)
        .map(|_| list(n, n - 1).into_iter().map(StudentId).collect())
        .collect();
    let quotas = (0..m).map(|_| if rng.random_bool(0.8) { 1 } else { 2 }).collect();
    Market {
        student_prefs,
        college_prefs,
        quotas,
    }
}

/// Simultaneous-rounds student-proposing DA with colleges ranking by score.
fn raw_score_da(inst: &Instance) -> Matching {
    let n = inst.n_students();
    let mut next = vec![0usize; n];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); inst.n_colleges()];
    let mut free: Vec<usize> = (0..n).collect();
    while !free.is_empty() {
        let mut offers: Vec<Vec<usize>> = vec![Vec::new(); inst.n_colleges()];
        for s in free.drain(..) {
            if let Some(c) = inst.student_prefs[s].at_rank(next[s] + 1) {
                next[s] += 1;
                offers[c.index()].push(s);
            }
        }
        for (c, new) in offers.into_iter().enumerate() {
            if new.is_empty() {
                continue;
            }
            let pool = &mut held[c];
            pool.extend(new);
            pool.sort_by(|&a, &b| {
                inst.students[b]
                    .score
                    .total_cmp(&inst.students[a].score)
                    .then(a.cmp(&b))
            });
            free.extend(pool.drain(inst.colleges[c].quota.min(pool.len())..));
        }
    }
    let mut m = Matching::unmatched(n);
    for (c, pool) in held.iter().enumerate() {
        for &s in pool {
            m.assign(StudentId(s), Some(CollegeId(c)));
        }
    }
    m
}

/// College priority by the rank at which a student listed it, then score.
fn choice_priority_market(inst: &Instance) -> Market {
    let college_prefs = (0..inst.n_colleges())
        .map(|c| {
            let c = CollegeId(c);
            let mut listed: Vec<(usize, usize)> = (0..inst.n_students())
                .filter_map(|s| inst.student_prefs[s].rank_of(c).map(|r| (r, s)))
                .collect();
            listed.sort_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(inst.students[b.1].score.total_cmp(&inst.students[a.1].score))
                    .then(a.1.cmp(&b.1))
            });
            listed
                .into_iter()
                .map(|(_, s)| StudentId(s))
                .collect::<PreferenceList<_>>()
        })
        .collect();
    Market {
        student_prefs: inst.student_prefs.clone(),
        college_prefs,
        quotas: inst.quotas(),
    }
}

fn limit_equivalences() -> Outcome {
    let mut bad_da = Vec::new();
    let mut bad_bm = Vec::new();
    for seed in 0..200u64 {
        let mut rng = substream(seed, Purpose::Probe, 1, 0);
        let base = GenConfig {
            seed,
            quota: rng.random_range(1..=3),
            beta: rng.random_range(0.0..=1.0),
            ..GenConfig::default()
        };
        let zero = gen_instance(&GenConfig {
            alpha: AlphaDist::Constant { value: 0.0 },
            ..base.clone()
        })
        .unwrap();
        if generalized_match(&zero, &zero.student_prefs, &generalized(seed)).unwrap() != raw_score_da(&zero) {
            bad_da.push(seed);
        }
        let one = gen_instance(&GenConfig {
            alpha: AlphaDist::Constant { value: 1.0 },
            ..base
        })
        .unwrap();
        let direct = boston(&choice_priority_market(&one));
        let via_merit = generalized_match(&one, &one.student_prefs, &generalized(seed)).unwrap();
        let via_mode = generalized_match(&one, &one.student_prefs, &MechanismConfig::new(Mode::PureBm, seed)).unwrap();
        if via_merit != direct || via_mode != direct {
            bad_bm.push(seed);
        }
    }
    check(
        bad_da.is_empty() && bad_bm.is_empty(),
        format!("200 + 200 instances, alpha=0 mismatches {bad_da:?}, alpha=1 mismatches {bad_bm:?}"),
    )
}

fn welfare_sweep() -> Outcome {
    let spec = ExperimentSpec {
        seed: 20_240_601,
        ..ExperimentSpec::default()
    };
    let out = run_welfare_sweep(&spec, None).unwrap();
    let mut failures = Vec::new();
    let gs_c_all_forty = out
        .trials
        .iter()
        .filter(|t| t.mechanism == Mechanism::Gs)
        .all(|t| t.pi_c == 40.0);
    if !gs_c_all_forty {
        failures.push("gs piC != 40".to_string());
    }
    let mut within = |label: &str, v: f64, lo: f64, hi: f64| {
        if !(lo..=hi).contains(&v) {
            failures.push(format!("{label} = {v:.3} not in [{lo}, {hi}]"));
        }
    };
    for row in &out.rows {
        let (b, hybrid) = (row.beta, row.mechanism == Mechanism::Hybrid);
        if b <= 0.4 {
            let (lo, hi) = if hybrid { (46.0, 48.0) } else { (45.0, 47.0) };
            within(&format!("piS {} beta {b}", row.mechanism), row.pi_s.mean, lo, hi);
        }
        if b < 0.5 {
            let (lo, hi) = if hybrid { (91.0, 95.0) } else { (84.0, 88.0) };
            within(&format!("Pi {} beta {b}", row.mechanism), row.pi.mean, lo, hi);
        }
        if b >= 0.95 {
            within(&format!("Pi {} beta {b}", row.mechanism), row.pi.mean, 79.0, 81.0);
        }
    }
    let at = |b: f64, m: Mechanism| out.rows.iter().find(|r| r.beta == b && r.mechanism == m).unwrap();
    check(
        failures.is_empty(),
        format!(
            "{} grid points x 1000 trials; beta=0 hybrid piS {:.2} Pi {:.2}, gs piS {:.2} Pi {:.2}; beta=1 Pi {:.2}/{:.2}{}",
            out.rows.len() / 2,
            at(0.0, Mechanism::Hybrid).pi_s.mean,
            at(0.0, Mechanism::Hybrid).pi.mean,
            at(0.0, Mechanism::Gs).pi_s.mean,
            at(0.0, Mechanism::Gs).pi.mean,
            at(1.0, Mechanism::Hybrid).pi.mean,
            at(1.0, Mechanism::Gs).pi.mean,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn strategy_experiment() -> Outcome {
    let spec = ExperimentSpec {
        seed: 20_240_602,
        ..ExperimentSpec::default()
    };
    let out = run_strategy_count(&spec, None).unwrap();
    let pi_s_forty = out.trials.iter().all(|t| t.pi_s == 40.0);
    let pi_c_zero = out.trials.iter().filter(|t| t.k == 0).all(|t| t.pi_c_submitted == 40.0);
    let k1 = out.rows[1].u_strategic.unwrap();
    let k9 = out.rows[9].u_truthful.unwrap();
    let pass = pi_s_forty && pi_c_zero && (k1.mean - 5.5).abs() <= 0.2 && k9.mean >= 3.6;
    check(
        pass,
        format!(
            "piS=40 every k: {pi_s_forty}; piC(k=0)=40: {pi_c_zero}; k=1 strategic {:.3} (se {:.3}); k=9 truthful {:.3} (se {:.3})",
            k1.mean, k1.se, k9.mean, k9.se
        ),
    )
}

fn deviation_witness_check() -> Outcome {
    let bonus = BonusFunction::linear(110.0, 10.0, 2);
    let mut checked = 0;
    let mut bad = Vec::new();
    for eps in [0.05, 0.1, 0.25, 0.5, 0.75, 0.9] {
        let delta = deviation_threshold(eps, &bonus).unwrap();
        let f2 = 5.0;
        for frac in [0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1.001, 1.05, 1.5, 2.0, 3.0] {
            let f1 = f2 + frac * delta;
            if f1 > 100.0 {
                continue;
            }
            let out = deviation_witness(eps, f1, f2, bonus.clone(), &generalized(0)).unwrap();
            checked += 1;
            if out.deviation_pays() != (frac < 1.0) {
                bad.push((eps, frac));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("{checked} (epsilon, gap) cases, wrong outcomes: {bad:?}"),
    )
}

fn college_truthfulness() -> Outcome {
    let mut profitable = Vec::new();
    let mut strategies = 0;
    let mut multi = 0;
    for seed in 0..1000u64 {
        let inst = gen_instance(&GenConfig {
            seed,
            beta: (seed % 11) as f64 / 10.0,
            alpha: if seed.is_multiple_of(2) {
                AlphaDist::Uniform { lo: 0.0, hi: 1.0 }
            } else {
                AlphaDist::BernoulliHalf
            },
            ..GenConfig::sized(5, 3)
        })
        .unwrap();
        let market = reciprocating_market(&inst, &inst.student_prefs, &generalized(seed)).unwrap();
        multi += usize::from(enumerate_stable(&market).unwrap().len() > 1);
        for c in 0..3 {
            let report = audit_market(&market, CollegeId(c), usize::MAX).unwrap();
            strategies += report.rows.len();
            if report.profitable() {
                profitable.push((seed, c));
            }
        }
    }
    check(
        profitable.is_empty(),
        format!(
            "1000 instances ({multi} with several stable matchings), {strategies} dropping strategies, {} profitable (seed, college): {:?}",
            profitable.len(),
            &profitable[..profitable.len().min(10)]
        ),
    )
}

fn rank_monotonicity() -> Outcome {
    let mut bad = Vec::new();
    let mut promotions = 0;
    for seed in 0..1000u64 {
        let inst = mixed_instance(seed);
        let config = generalized(seed);
        let base = generalized_match(&inst, &inst.student_prefs, &config).unwrap();
        for s in 0..inst.n_students() {
            let Some(c) = base.college_of(StudentId(s)) else {
                continue;
            };
            let r = inst.student_prefs[s].rank_of(c).unwrap();
            if r == 1 {
                continue;
            }
            let mut one_up = inst.student_prefs.clone();
            one_up[s].swap_ranks(r - 1, r);
            let mut to_top = inst.student_prefs.clone();
            to_top[s] = std::iter::once(c)
                .chain(inst.student_prefs[s].iter().filter(|&x| x != c))
                .collect();
            for submitted in [one_up, to_top] {
                promotions += 1;
                let m = generalized_match(&inst, &submitted, &config).unwrap();
                if m.college_of(StudentId(s)) != Some(c) {
                    bad.push((seed, s));
                }
            }
        }
    }
    check(
        bad.is_empty(),
        format!("1000 instances, {promotions} promotions, lost matches: {bad:?}"),
    )
}

fn college_anonymity() -> Outcome {
    const TRIALS: u64 = 20_000;
    let lists = [[0usize, 1, 2, 3], [2, 0, 3, 1]];
    let mut freq = [[0u64; 5]; 2];
    for (which, list) in lists.iter().enumerate() {
        for t in 0..TRIALS {
            let mut inst = gen_instance(&GenConfig {
                seed: t + which as u64 * 1_000_000,
                n_students: 5,
                n_colleges: 4,
                reputations: default_reputations(4),
                alpha: AlphaDist::Uniform { lo: 0.0, hi: 1.0 },
                ..GenConfig::default()
            })
            .unwrap();
            inst.student_prefs[0] = list.iter().map(|&c| CollegeId(c)).collect();
            let m = generalized_match(&inst, &inst.student_prefs, &generalized(t)).unwrap();
            let slot = m
                .college_of(StudentId(0))
                .and_then(|c| inst.student_prefs[0].rank_of(c))
                .unwrap_or(0);
            freq[which][slot] += 1;
        }
    }
    let n = TRIALS as f64;
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for slot in [1, 2, 3, 4, 0] {
        let (p, q) = (freq[0][slot] as f64 / n, freq[1][slot] as f64 / n);
        let se = (p * (1.0 - p) / n + q * (1.0 - q) / n).sqrt();
        let z = if se > 0.0 { (p - q).abs() / se } else { 0.0 };
        worst = worst.max(z);
        cells.push(format!(
            "{}:{p:.4}/{q:.4}",
            if slot == 0 { "none".into() } else { slot.to_string() }
        ));
    }
    check(
        worst <= 3.0,
        format!("20000 trials per list, max |z| {worst:.2}; {}", cells.join(" ")),
    )
}

fn per_rank_truthfulness() -> Outcome {
    let spec = ExperimentSpec {
        seed: 20_240_603,
        ..ExperimentSpec::default()
    };
    let out = run_per_rank(&spec, None).unwrap();
    let advantage = |beta: f64, rank: usize| {
        let t = out.row(beta, rank, PerRankMode::Truthful).unwrap().utility;
        let s = out.row(beta, rank, PerRankMode::StrategyS).unwrap().utility;
        let se = (t.se.powi(2) + s.se.powi(2)).sqrt();
        (s.mean - t.mean, se)
    };
    let beats_at_zero: Vec<usize> = (1..=10)
        .filter(|&r| {
            let (d, se) = advantage(0.0, r);
            d > 2.0 * se
        })
        .collect();
    let wins_at_one: Vec<usize> = (1..=10)
        .filter(|&r| {
            let (d, se) = advantage(1.0, r);
            d > 0.0 && d >= 2.0 * se
        })
        .collect();
    let (d6, se6) = advantage(1.0, 6);
    check(
        beats_at_zero.is_empty() && !wins_at_one.is_empty(),
        format!(
            "beta=0 ranks where S beats truthful by >2 se: {beats_at_zero:?}; beta=1 ranks with a >=2 se S advantage: {wins_at_one:?} (rank 6: +{d6:.2}, se {se6:.3})"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "R-stability of generalized outcomes",
            Duration::from_secs(10),
            r_stability,
        ),
        (
            "student optimality against stable-set enumeration",
            Duration::from_secs(60),
            student_optimality,
        ),
        (
            "alpha limits equal raw-score DA and Boston",
            Duration::from_secs(10),
            limit_equivalences,
        ),
        ("welfare sweep anchors", Duration::from_secs(300), welfare_sweep),
        (
            "strategic-student experiment at full correlation",
            Duration::from_secs(120),
            strategy_experiment,
        ),
        (
            "non-strategy-proofness witness",
            Duration::from_secs(1),
            deviation_witness_check,
        ),
        (
            "college truthfulness under dropping strategies",
            Duration::from_secs(120),
            college_truthfulness,
        ),
        ("rank monotonicity", Duration::from_secs(60), rank_monotonicity),
        ("college anonymity", Duration::from_secs(60), college_anonymity),
        (
            "truth-telling by score rank",
            Duration::from_secs(120),
            per_rank_truthfulness,
        ),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let in_time = took <= budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.2}s of {}s]{}",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            took.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { " over time budget" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
